//! Command-line front end: invariant syntax, rendering and the `run` entry.
//!
//! Invariant grammar (on top of the polynomial grammar in [`crate::poly`]):
//!
//! ```text
//! invariant := conjunct ('&&' conjunct)*
//! conjunct  := expr '==' expr
//! ```
//!
//! An identifier `v0` names the initial value of loop variable `v` when `v`
//! is itself a loop variable. Without `--params`, every such initial value is
//! a parameter of the synthesized loop.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser as ClapParser, ValueEnum};

use crate::pcp::{GuardMode, InvariantSpec, PcpError, SpectrumGuards};
use crate::poly::{identifiers, lex, ParseError, Parser, Polynomial, Rational, Tok, VarId, VarKind};
use crate::recurrence::{IntegerPartition, MatrixShape, Parameter};
use crate::smt::{SolverConfig, SolverKind};
use crate::synth::{synthesize, LoopData, SearchMode, SearchReport, SynthError, SynthesisProblem, SynthesizedLoop, Verification};

/// Raw invariant text plus optional declarations.
#[derive(Debug, Clone, Default)]
pub struct InvariantSource {
    pub text: String,
    /// Loop variables in row order.
    pub declared_vars: Option<Vec<String>>,
    /// Initial-value symbols (`v0`) that stay symbolic.
    pub declared_params: Option<Vec<String>>,
    /// `(symbol, variable, k)`: `symbol` stands for `variable` `k` iterations ahead.
    pub shifts: Vec<(String, String, u32)>,
}

impl InvariantSource {
    pub fn new(text: impl Into<String>) -> Self {
        InvariantSource {
            text: text.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedInvariant {
    pub spec: InvariantSpec,
    pub params: Vec<Parameter>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("the invariant is empty")]
    Empty,
    #[error("conjunct {0} has no variables")]
    NoVariables(usize),
    #[error("conjunct {0} must have the form `lhs == rhs`")]
    NotAnEquality(usize),
    #[error("`{0}` is not among the declared variables")]
    UndeclaredVariable(String),
    #[error("parameter `{0}` must be an initial value `v0` of a loop variable `v`")]
    BadParameter(String),
    #[error("bad shift declaration `{0}`")]
    BadShift(String),
    #[error(transparent)]
    Spec(#[from] PcpError),
}

/// Splits `toks` at top-level `&&`.
fn split_conjuncts(toks: &[(usize, Tok)]) -> Vec<&[(usize, Tok)]> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, (_, t)) in toks.iter().enumerate() {
        match t {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            Tok::AndAnd if depth == 0 => {
                out.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&toks[start..]);
    out
}

fn initial_base(name: &str) -> Option<&str> {
    name.strip_suffix('0').filter(|b| !b.is_empty())
}

/// Parses and classifies an invariant.
pub fn parse_invariant(src: &InvariantSource) -> Result<ParsedInvariant, InvariantError> {
    let toks = lex(&src.text)?;
    if toks.is_empty() {
        return Err(InvariantError::Empty);
    }
    let idents = identifiers(&src.text)?;
    let shifts: HashMap<&str, (&str, u32)> = src.shifts.iter().map(|(s, v, k)| (s.as_str(), (v.as_str(), *k))).collect();
    let declared_params: Option<BTreeSet<&str>> = src.declared_params.as_ref().map(|p| p.iter().map(String::as_str).collect());
    for p in declared_params.iter().flatten() {
        if initial_base(p).is_none() {
            return Err(InvariantError::BadParameter(p.to_string()));
        }
    }

    // Loop variables.
    let mut program: Vec<String> = Vec::new();
    let add = |name: &str, program: &mut Vec<String>| {
        if !program.iter().any(|p| p == name) {
            program.push(name.to_string());
        }
    };
    let occurs = |name: &str| idents.iter().any(|i| i == name);
    match &src.declared_vars {
        Some(vars) => {
            for v in vars {
                add(v, &mut program);
            }
        }
        None => {
            for id in &idents {
                if let Some((base, _)) = shifts.get(id.as_str()) {
                    add(base, &mut program);
                } else if declared_params.as_ref().is_some_and(|p| p.contains(id.as_str())) {
                    add(initial_base(id).unwrap_or(id), &mut program);
                } else if let Some(base) = initial_base(id).filter(|b| occurs(b) || shifts.values().any(|(v, _)| v == b)) {
                    add(base, &mut program);
                } else {
                    add(id, &mut program);
                }
            }
            for (base, _) in shifts.values() {
                add(base, &mut program);
            }
        }
    }
    let program_ids: Vec<VarId> = program.iter().map(|n| VarId::program(n.clone())).collect();
    let by_name: HashMap<&str, &VarId> = program.iter().map(String::as_str).zip(&program_ids).collect();

    // Everything else.
    let mut resolved: HashMap<String, VarId> = HashMap::new();
    let mut initial_vars: BTreeMap<VarId, VarId> = BTreeMap::new();
    let mut shifted: BTreeMap<VarId, (VarId, u32)> = BTreeMap::new();
    let mut params: Vec<Parameter> = Vec::new();
    for (sym, (base, k)) in &shifts {
        let base_id = by_name
            .get(base)
            .ok_or_else(|| InvariantError::BadShift(format!("{sym}={base}:{k}")))?;
        if *k == 0 || by_name.contains_key(sym) {
            return Err(InvariantError::BadShift(format!("{sym}={base}:{k}")));
        }
        let id = VarId::program(sym.to_string());
        shifted.insert(id.clone(), ((*base_id).clone(), *k));
        resolved.insert(sym.to_string(), id);
    }
    for id in &idents {
        if resolved.contains_key(id) {
            continue;
        }
        if let Some(v) = by_name.get(id.as_str()) {
            resolved.insert(id.clone(), (*v).clone());
            continue;
        }
        let base = initial_base(id).and_then(|b| by_name.get(b));
        let is_param = declared_params.as_ref().is_none_or(|p| p.contains(id.as_str()));
        match base {
            Some(var) => {
                let sym = VarId::new(id.clone(), VarKind::InitialParam);
                initial_vars.insert((*var).clone(), sym.clone());
                if is_param {
                    params.push(Parameter {
                        var: (*var).clone(),
                        symbol: sym.clone(),
                    });
                }
                resolved.insert(id.clone(), sym);
            }
            None if declared_params.as_ref().is_some_and(|p| p.contains(id.as_str())) => {
                return Err(InvariantError::BadParameter(id.clone()));
            }
            None => return Err(InvariantError::UndeclaredVariable(id.clone())),
        }
    }
    if let Some(p) = &declared_params {
        for name in p {
            if !resolved.contains_key(*name) {
                // A parameter the invariant never mentions still fixes that variable's start.
                let base = initial_base(name).and_then(|b| by_name.get(b)).ok_or_else(|| InvariantError::BadParameter(name.to_string()))?;
                let sym = VarId::new(name.to_string(), VarKind::InitialParam);
                initial_vars.insert((*base).clone(), sym.clone());
                params.push(Parameter {
                    var: (*base).clone(),
                    symbol: sym,
                });
            }
        }
    }
    params.sort_by_key(|p| program_ids.iter().position(|v| *v == p.var));

    let mut polys = Vec::new();
    let end = src.text.chars().count();
    for (i, conj) in split_conjuncts(&toks).into_iter().enumerate() {
        let eq: Vec<usize> = conj.iter().enumerate().filter(|(_, (_, t))| *t == Tok::EqEq).map(|(k, _)| k).collect();
        if eq.len() != 1 {
            return Err(InvariantError::NotAnEquality(i + 1));
        }
        let k = eq[0];
        let resolve = |name: &str| resolved.get(name).cloned().unwrap_or_else(|| VarId::program(name));
        let side = |toks: &[(usize, Tok)], stop: usize| -> Result<Polynomial, ParseError> {
            let mut p = Parser::new(toks, stop, resolve);
            let out = p.expr()?;
            if !p.done() {
                return Err(ParseError::Syntax {
                    pos: p.at(),
                    msg: "unexpected token".into(),
                });
            }
            Ok(out)
        };
        let eq_pos = conj[k].0;
        let lhs = side(&conj[..k], eq_pos)?;
        let rhs_end = conj.get(conj.len()).map_or(end, |(p, _)| *p);
        let rhs = side(&conj[k + 1..], rhs_end)?;
        if !conj.iter().any(|(_, t)| matches!(t, Tok::Ident(_))) {
            return Err(InvariantError::NoVariables(i + 1));
        }
        polys.push(&lhs - &rhs);
    }
    let spec = InvariantSpec::with_shifts(polys, program_ids, initial_vars, shifted)?;
    Ok(ParsedInvariant { spec, params })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderStyle {
    Simultaneous,
    Sequential,
}

fn fmt_approx(x: Option<f64>) -> String {
    match x {
        Some(v) if (v - v.round()).abs() < 1e-12 => format!("{}", v.round()),
        Some(v) => format!("{v:.6}"),
        None => "?".into(),
    }
}

/// An order of the update statements such that each one reads only variables
/// not yet overwritten; `None` if the updates are mutually dependent.
pub fn sequential_order(reads: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    // `i` must precede `j` whenever update `i` reads `j`.
    let n = reads.len();
    let mut indegree = vec![0usize; n];
    for (i, r) in reads.iter().enumerate() {
        for &j in r {
            if j != i {
                indegree[j] += 1;
            }
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        out.push(i);
        for &j in &reads[i] {
            if j != i {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.insert(j);
                }
            }
        }
    }
    (out.len() == n).then_some(out)
}

/// Pseudocode for a synthesized loop. The constant variable is folded away.
pub fn render_loop(sl: &SynthesizedLoop, style: RenderStyle) -> String {
    let vars = sl.data.vars();
    let constant = sl.constant_var.as_ref();
    let shown: Vec<usize> = (0..vars.len()).filter(|&i| Some(&vars[i]) != constant).collect();
    let names: Vec<&str> = shown.iter().map(|&i| vars[i].name()).collect();
    let (init, updates, reads): (Vec<String>, Vec<String>, Vec<BTreeSet<usize>>) = match &sl.data {
        LoopData::Exact(lp) => {
            let one: HashMap<VarId, Polynomial> = constant.map(|c| (c.clone(), Polynomial::one())).into_iter().collect();
            let x0 = lp.initial_symbolic();
            let init = shown.iter().map(|&i| x0[i].to_string()).collect();
            let updates = shown.iter().map(|&i| lp.update(i).substitute(&one).to_string()).collect();
            let reads = shown
                .iter()
                .map(|&i| {
                    shown
                        .iter()
                        .enumerate()
                        .filter(|(_, &j)| !lp.b[i][j].is_zero())
                        .map(|(k, _)| k)
                        .collect()
                })
                .collect();
            (init, updates, reads)
        }
        LoopData::Approximate { a, b, params, .. } => {
            let r = params.len();
            let init = shown
                .iter()
                .map(|&i| {
                    let mut parts: Vec<String> = params
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| a[i][*k] != Some(0.0))
                        .map(|(k, p)| format!("{}*{}", fmt_approx(a[i][k]), p.symbol))
                        .collect();
                    if a[i][r] != Some(0.0) || parts.is_empty() {
                        parts.push(fmt_approx(a[i][r]));
                    }
                    parts.join(" + ")
                })
                .collect();
            let updates = shown
                .iter()
                .map(|&i| {
                    let mut parts: Vec<String> = Vec::new();
                    for (j, v) in vars.iter().enumerate() {
                        if b[i][j] == Some(0.0) {
                            continue;
                        }
                        if Some(v) == constant {
                            parts.push(fmt_approx(b[i][j]));
                        } else {
                            parts.push(format!("{}*{}", fmt_approx(b[i][j]), v));
                        }
                    }
                    if parts.is_empty() {
                        "0".into()
                    } else {
                        parts.join(" + ")
                    }
                })
                .collect();
            let reads = shown
                .iter()
                .map(|&i| shown.iter().enumerate().filter(|(_, &j)| b[i][j] != Some(0.0)).map(|(k, _)| k).collect())
                .collect();
            (init, updates, reads)
        }
    };
    let mut out = String::new();
    if !sl.is_verified() {
        out.push_str("UNVERIFIED: the solver returned irrational entries (values shown approximately)\n");
    }
    out.push_str(&format!("({}) ← ({})\nwhile true do\n", names.join(", "), init.join(", ")));
    let order = match style {
        RenderStyle::Sequential => sequential_order(&reads),
        RenderStyle::Simultaneous => None,
    };
    match order {
        Some(order) => {
            for k in order {
                out.push_str(&format!("  {} ← {}\n", names[k], updates[k]));
            }
        }
        None => {
            out.push_str(&format!("  ({}) ← ({})\n", names.join(", "), updates.join(", ")));
        }
    }
    out.push_str("end\n");
    if style == RenderStyle::Sequential && sequential_order(&reads).is_none() {
        out.push_str("(updates are mutually dependent; shown as a simultaneous assignment)\n");
    }
    out
}

fn verdict_line(sl: &SynthesizedLoop) -> String {
    match &sl.verification {
        Verification::OracleVerified { certificate, .. } => {
            let last = certificate.hash_trace.last().map(|h| &h[..16]).unwrap_or("");
            format!("verified: {} [trace {last}]", certificate.verdict)
        }
        Verification::UnverifiedAlgebraic { entries } => {
            let names: Vec<String> = entries.iter().map(|e| format!("{}[{},{}]", e.matrix, e.row + 1, e.col + 1)).collect();
            format!("not verified: algebraic entries {}", names.join(" "))
        }
    }
}

fn eigen_line(sl: &SynthesizedLoop) -> String {
    let parts: Vec<String> = sl
        .eigenvalues
        .iter()
        .map(|e| {
            if e.multiplicity > 1 {
                format!("{} (x{})", e.value, e.multiplicity)
            } else {
                e.value.to_string()
            }
        })
        .collect();
    format!("eigenvalues: {}", parts.join(", "))
}

fn report_table(report: &SearchReport) -> String {
    let mut out = String::from("config  shape          partition   order                 status                constraints  degree  ms\n");
    for c in &report.configs {
        out.push_str(&format!(
            "{:<7} {:<14} {:<11} {:<21} {:<21} {:>11}  {:>6}  {}\n",
            c.index,
            c.shape.to_string(),
            c.partition.to_string(),
            c.order.join(","),
            c.status,
            c.constraints,
            c.max_degree,
            c.solve_ms
        ));
    }
    if report.not_started > 0 {
        out.push_str(&format!("({} configurations not started)\n", report.not_started));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Full,
    Upper,
    Unitriangular,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GuardArg {
    All,
    Any,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeedOrder {
    Fixed,
    Enumerate,
}

/// Synthesize loops from polynomial invariants.
#[derive(Debug, ClapParser)]
#[command(name = "loopsynth", version)]
struct Args {
    /// Invariant, e.g. "a == b^2 && c == 2*a"; `@path` reads it from a file.
    #[arg(long)]
    invariant: String,
    /// Loop variables in row order.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Initial values kept symbolic, e.g. x0,y0.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    params: Option<Vec<String>>,
    /// Shifted reference `sym=var:k`: `sym` is `var` k iterations ahead.
    #[arg(long)]
    shift: Vec<String>,
    /// System size, auxiliary variables included.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    shape: ShapeArg,
    /// Only try these eigenvalue multiplicities, e.g. 1,1 (repeatable).
    #[arg(long)]
    partition: Vec<String>,
    /// z3, yices, cvc5 or generic.
    #[arg(long, default_value = "z3")]
    solver: String,
    /// Solver binary; defaults to $LOOPSYNTH_SOLVER or the solver's name on PATH
    #[arg(long)]
    solver_path: Option<PathBuf>,
    /// JSON solver configuration; command-line flags override it.
    #[arg(long)]
    solver_config: Option<PathBuf>,
    /// Per-configuration solver timeout.
    #[arg(long)]
    timeout_ms: Option<u64>,
    /// Stop starting new configurations after this many milliseconds.
    #[arg(long)]
    budget_ms: Option<u64>,
    /// first, all:<N> or exhaustive.
    #[arg(long, default_value = "first")]
    search: String,
    #[arg(long, value_enum, default_value = "all")]
    guard: GuardArg,
    /// Require every eigenvalue to occur in each guarded variable.
    #[arg(long)]
    visible_roots: bool,
    /// Forbid the eigenvalues 1 and -1.
    #[arg(long)]
    aperiodic: bool,
    /// With all:N, require each further loop to differ in its updates.
    #[arg(long)]
    distinct_updates: bool,
    /// Directory for one SMT-LIB script per configuration
    #[arg(long)]
    dump_smt: Option<PathBuf>,
    /// Directory for each configuration's clause set as text and JSON
    #[arg(long)]
    dump_pcp: Option<PathBuf>,
    /// Write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Minimum number of iterations the oracle unrolls.
    #[arg(long, default_value_t = 20)]
    verify_iters: usize,
    /// Print loops with irrational entries, labeled unverified.
    #[arg(long)]
    allow_algebraic: bool,
    /// Do not add the constant variable `one`.
    #[arg(long)]
    no_aux: bool,
    /// Configurations solved in parallel
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "enumerate")]
    seed_order: SeedOrder,
    #[arg(long, value_enum, default_value = "sequential")]
    style: RenderStyle,
    /// Print the per-configuration table.
    #[arg(long)]
    report: bool,
}

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_EXHAUSTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ENVIRONMENT: i32 = 3;

fn parse_shift(s: &str) -> Option<(String, String, u32)> {
    let (sym, rest) = s.split_once('=')?;
    let (var, k) = rest.split_once(':').unwrap_or((rest, "1"));
    Some((sym.trim().to_string(), var.trim().to_string(), k.trim().parse().ok()?))
}

fn parse_partition(s: &str) -> Option<IntegerPartition> {
    let parts: Option<Vec<u32>> = s.split(',').map(|p| p.trim().parse().ok()).collect();
    IntegerPartition::new(parts?)
}

/// Parses `argv` (program name first), runs the search and prints the
/// result. Returns the process exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_FOUND };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    macro_rules! usage {
        ($($t:tt)*) => {{
            let _ = writeln!(err, "error: {}", format!($($t)*));
            return EXIT_USAGE;
        }};
    }
    macro_rules! environment {
        ($($t:tt)*) => {{
            let _ = writeln!(err, "error: {}", format!($($t)*));
            return EXIT_ENVIRONMENT;
        }};
    }

    let text = match args.invariant.strip_prefix('@') {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t.trim().to_string(),
            Err(e) => usage!("cannot read invariant file {path}: {e}"),
        },
        None => args.invariant.clone(),
    };
    let mut shifts = Vec::new();
    for s in &args.shift {
        match parse_shift(s) {
            Some(t) => shifts.push(t),
            None => usage!("bad --shift `{s}` (expected sym=var:k)"),
        }
    }
    let src = InvariantSource {
        text,
        declared_vars: args.vars.clone(),
        declared_params: args.params.clone(),
        shifts,
    };
    let parsed = match parse_invariant(&src) {
        Ok(p) => p,
        Err(e) => usage!("{e}"),
    };

    let kind: SolverKind = match args.solver.parse() {
        Ok(k) => k,
        Err(e) => usage!("{e}"),
    };
    let mut solver = match &args.solver_config {
        Some(path) => match SolverConfig::from_file(path) {
            Ok(c) => c,
            Err(e) => environment!("{e}"),
        },
        None => SolverConfig::new(kind),
    };
    if args.solver_config.is_some() && args.solver != "z3" {
        solver.solver_kind = kind;
    }
    if let Some(p) = &args.solver_path {
        solver.binary_path = p.clone();
    }
    if let Some(t) = args.timeout_ms {
        if t == 0 {
            usage!("--timeout-ms must be positive");
        }
        solver.timeout_ms = t;
    }
    let search: SearchMode = match args.search.parse() {
        Ok(s) => s,
        Err(e) => usage!("{e}"),
    };
    let mut partitions = Vec::new();
    for p in &args.partition {
        match parse_partition(p) {
            Some(part) => partitions.push(part),
            None => usage!("bad --partition `{p}`"),
        }
    }
    if args.jobs == 0 {
        usage!("--jobs must be at least 1");
    }

    let mut problem = SynthesisProblem::new(parsed.spec.clone());
    problem.params = parsed.params.clone();
    problem.aux = !args.no_aux;
    problem.size = args.size.unwrap_or(parsed.spec.program_vars.len() + usize::from(problem.aux));
    problem.shapes = match args.shape {
        ShapeArg::Full => vec![MatrixShape::Full],
        ShapeArg::Upper => vec![MatrixShape::UpperTriangular],
        ShapeArg::Unitriangular => vec![MatrixShape::UpperUnitriangular],
        ShapeArg::Auto => MatrixShape::ALL.to_vec(),
    };
    problem.partitions = (!partitions.is_empty()).then_some(partitions);
    problem.guard_mode = match args.guard {
        GuardArg::All => GuardMode::NonconstantAll,
        GuardArg::Any => GuardMode::NonconstantAny,
        GuardArg::None => GuardMode::None,
    };
    problem.solver = solver;
    problem.search = search;
    problem.fixed_order = args.seed_order == SeedOrder::Fixed;
    problem.allow_algebraic = args.allow_algebraic;
    problem.verify_iters = args.verify_iters;
    problem.jobs = args.jobs;
    problem.distinct_updates = args.distinct_updates;
    problem.spectrum = SpectrumGuards {
        visible_roots: args.visible_roots,
        aperiodic: args.aperiodic,
    };
    problem.dump_smt = args.dump_smt.clone();
    problem.dump_pcp = args.dump_pcp.clone();
    problem.global_budget = args.budget_ms.map(std::time::Duration::from_millis);

    let report = match synthesize(&problem) {
        Ok(r) => r,
        Err(e @ (SynthError::Solver(_) | SynthError::Dump(_))) => environment!("{e}"),
        Err(e) => usage!("{e}"),
    };

    let _ = writeln!(out, "invariant: {}", parsed.spec);
    let system: Vec<String> = problem.system_vars().map(|(v, _)| v.iter().map(|x| x.name().to_string()).collect()).unwrap_or_default();
    let _ = writeln!(out, "system: s = {} ({})", problem.size, system.join(", "));
    for (k, sl) in report.solutions.iter().enumerate() {
        let _ = writeln!(
            out,
            "\nsolution {} (config {}, {}, partition {}):",
            k + 1,
            sl.config_index,
            sl.shape,
            sl.partition
        );
        let _ = write!(out, "{}", render_loop(sl, args.style));
        let _ = writeln!(out, "{}", eigen_line(sl));
        let _ = writeln!(out, "{}", verdict_line(sl));
    }
    let tried = report.configs.len();
    let sat = report.configs.iter().filter(|c| c.status == "sat").count();
    let _ = writeln!(out, "\nsearch: {tried} configurations tried, {sat} sat, {} ms", report.elapsed.as_millis());
    if args.report || report.solutions.is_empty() {
        let _ = write!(out, "{}", report_table(&report));
    }
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&report.to_json(&problem)).unwrap_or_default();
        if let Err(e) = std::fs::write(path, text) {
            environment!("cannot write {}: {e}", path.display());
        }
    }
    if report.has_verified() {
        EXIT_FOUND
    } else if report.all_solver_errors() {
        let detail = report.configs.iter().find_map(|c| c.detail.clone()).unwrap_or_default();
        environment!("every configuration ended in a solver error: {detail}")
    } else {
        EXIT_EXHAUSTED
    }
}

/// Parses a rational literal the way the invariant grammar does.
pub fn parse_rational(text: &str) -> Option<Rational> {
    text.trim().parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(vs: &[VarId]) -> Vec<&str> {
        vs.iter().map(|v| v.name()).collect()
    }

    #[test]
    fn eucliddiv_with_params() {
        let mut src = InvariantSource::new("x0 == y0*q + r");
        src.declared_params = Some(vec!["x0".into(), "y0".into()]);
        let p = parse_invariant(&src).unwrap();
        assert_eq!(names(&p.spec.program_vars), vec!["x", "y", "q", "r"]);
        assert_eq!(p.params.len(), 2);
        assert_eq!(p.spec.polys[0].to_string(), "-q*y0 - r + x0");
    }

    #[test]
    fn without_params_v0_is_ordinary() {
        let p = parse_invariant(&InvariantSource::new("x0 == y0*q + r")).unwrap();
        assert_eq!(names(&p.spec.program_vars), vec!["x0", "y0", "q", "r"]);
        assert!(p.params.is_empty());
    }

    #[test]
    fn default_params_when_base_occurs() {
        let p = parse_invariant(&InvariantSource::new("a0 + r == r^2 + 2y && a == a")).unwrap();
        assert_eq!(names(&p.spec.program_vars), vec!["a", "r", "y"]);
        assert_eq!(p.params.len(), 1);
        assert_eq!(p.params[0].symbol.name(), "a0");
    }

    #[test]
    fn conjuncts_and_errors() {
        let p = parse_invariant(&InvariantSource::new("1+2a == c && 4b == (c-1)^2")).unwrap();
        assert_eq!(p.spec.polys.len(), 2);
        assert!(matches!(parse_invariant(&InvariantSource::new("1 == 1")), Err(InvariantError::NoVariables(1))));
        assert!(matches!(parse_invariant(&InvariantSource::new("x")), Err(InvariantError::NotAnEquality(1))));
        assert!(matches!(parse_invariant(&InvariantSource::new("x == y == z")), Err(InvariantError::NotAnEquality(1))));
        assert!(matches!(parse_invariant(&InvariantSource::new("x == $")), Err(InvariantError::Parse(_))));
        assert!(matches!(parse_invariant(&InvariantSource::new("")), Err(InvariantError::Empty)));
        let mut src = InvariantSource::new("x == 2*y");
        src.declared_vars = Some(vec!["x".into()]);
        assert_eq!(parse_invariant(&src).unwrap_err(), InvariantError::UndeclaredVariable("y".into()));
    }

    #[test]
    fn shifts_name_the_base_variable() {
        let mut src = InvariantSource::new("f1 == f + 1");
        src.shifts = vec![("f1".into(), "f".into(), 1)];
        let p = parse_invariant(&src).unwrap();
        assert_eq!(names(&p.spec.program_vars), vec!["f"]);
        assert_eq!(p.spec.shifted.len(), 1);
    }

    #[test]
    fn sequential_order_rules() {
        // c <- c + k; k <- k + m; m <- m + 6; n <- n + 1
        let reads = vec![
            BTreeSet::from([0, 1]),
            BTreeSet::from([1, 2]),
            BTreeSet::from([2]),
            BTreeSet::from([3]),
        ];
        assert_eq!(sequential_order(&reads), Some(vec![0, 1, 2, 3]));
        // x <- y; y <- x
        assert_eq!(sequential_order(&[BTreeSet::from([1]), BTreeSet::from([0])]), None);
        // y read by x's update, so x goes first even when listed second
        assert_eq!(sequential_order(&[BTreeSet::from([0]), BTreeSet::from([0, 1])]), Some(vec![1, 0]));
    }
}
