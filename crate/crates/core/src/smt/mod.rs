//! Solving clause sets with an external SMT-LIB 2 solver.
//!
//! Every configuration gets a fresh solver process fed over stdin. The
//! process is polled and killed when the timeout elapses or the caller's
//! cancellation flag is raised.

mod encode;
mod model;
mod sexpr;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use encode::{clause_term, encode, encode_with, polynomial_term, rational_literal, symbol};
pub use model::{approx_value, exact_value, read_value, real_roots, Model, ModelValue};
pub use sexpr::{parse_all, SExpr, SExprError};

use crate::pcp::ClauseSet;
use crate::poly::{PolyMatrix, Polynomial, Rational, VarId};
use crate::recurrence::RecurrenceTemplate;

/// Environment variable naming the default solver binary.
pub const SOLVER_PATH_ENV: &str = "LOOPSYNTH_SOLVER";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Z3,
    Yices,
    Cvc5,
    GenericSmtlib,
}

impl SolverKind {
    fn default_binary(self) -> &'static str {
        match self {
            SolverKind::Z3 | SolverKind::GenericSmtlib => "z3",
            SolverKind::Yices => "yices-smt2",
            SolverKind::Cvc5 => "cvc5",
        }
    }

    fn default_args(self) -> &'static [&'static str] {
        match self {
            SolverKind::Z3 => &["-in", "-smt2"],
            SolverKind::Cvc5 => &["--lang=smt2", "--produce-models"],
            SolverKind::Yices | SolverKind::GenericSmtlib => &[],
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z3" => Ok(SolverKind::Z3),
            "yices" => Ok(SolverKind::Yices),
            "cvc5" => Ok(SolverKind::Cvc5),
            "generic" | "generic-smtlib" => Ok(SolverKind::GenericSmtlib),
            other => Err(format!("unknown solver kind `{other}` (expected z3, yices, cvc5 or generic)")),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Z3 => "z3",
            SolverKind::Yices => "yices",
            SolverKind::Cvc5 => "cvc5",
            SolverKind::GenericSmtlib => "generic-smtlib",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub solver_kind: SolverKind,
    pub binary_path: PathBuf,
    pub timeout_ms: u64,
    /// Arguments passed after the kind's defaults.
    #[serde(default)]
    pub extra_args: Vec<String>,
}

impl SolverConfig {
    /// Binary from `LOOPSYNTH_SOLVER` if set, else the kind's usual name on `PATH`.
    pub fn new(kind: SolverKind) -> Self {
        let binary_path = std::env::var_os(SOLVER_PATH_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(kind.default_binary()));
        SolverConfig {
            solver_kind: kind,
            binary_path,
            timeout_ms: 60_000,
            extra_args: Vec::new(),
        }
    }

    pub fn with_timeout_ms(mut self, ms: u64) -> Self {
        self.timeout_ms = ms;
        self
    }

    pub fn with_path(mut self, path: impl Into<PathBuf>) -> Self {
        self.binary_path = path.into();
        self
    }

    /// Reads a JSON config file.
    pub fn from_file(path: &Path) -> Result<Self, SmtError> {
        let text = std::fs::read_to_string(path).map_err(|e| SmtError::Config(format!("{}: {e}", path.display())))?;
        let cfg: SolverConfig = serde_json::from_str(&text).map_err(|e| SmtError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SmtError> {
        if self.timeout_ms == 0 {
            return Err(SmtError::Config("timeout must be positive".into()));
        }
        Ok(())
    }

    pub fn args(&self) -> Vec<String> {
        self.solver_kind
            .default_args()
            .iter()
            .map(|s| s.to_string())
            .chain(self.extra_args.iter().cloned())
            .collect()
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(SolverKind::Z3)
    }
}

/// Problems with the solver setup, as opposed to answers from the solver.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmtError {
    #[error("solver binary `{0}` not found")]
    BinaryNotFound(String),
    #[error("solver configuration: {0}")]
    Config(String),
    #[error("solver process: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Sat(Model),
    Unsat,
    Unknown(String),
    Timeout,
    SolverError(String),
    /// Stopped through the cancellation flag.
    Cancelled,
}

impl SolveOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SolveOutcome::Sat(_) => "sat",
            SolveOutcome::Unsat => "unsat",
            SolveOutcome::Unknown(_) => "unknown",
            SolveOutcome::Timeout => "timeout",
            SolveOutcome::SolverError(_) => "solver-error",
            SolveOutcome::Cancelled => "cancelled",
        }
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveOutcome::Sat(m) => Some(m),
            _ => None,
        }
    }
}

/// What came back from one solver run.
#[derive(Debug, Clone)]
pub struct RawRun {
    pub stdout: String,
    pub stderr: String,
    pub timed_out: bool,
    pub cancelled: bool,
}

const POLL: Duration = Duration::from_millis(2);

/// Feeds `script` to a fresh solver process and collects its output.
pub fn run_script(script: &str, cfg: &SolverConfig, cancel: Option<&AtomicBool>) -> Result<RawRun, SmtError> {
    cfg.validate()?;
    let mut child = Command::new(&cfg.binary_path)
        .args(cfg.args())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
                SmtError::BinaryNotFound(cfg.binary_path.display().to_string())
            }
            _ => SmtError::Io(e.to_string()),
        })?;
    let mut stdin = child.stdin.take().ok_or_else(|| SmtError::Io("no stdin".into()))?;
    let mut stdout = child.stdout.take().ok_or_else(|| SmtError::Io("no stdout".into()))?;
    let mut stderr = child.stderr.take().ok_or_else(|| SmtError::Io("no stderr".into()))?;
    let script = script.to_string();
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(script.as_bytes());
    });
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let deadline = Instant::now() + Duration::from_millis(cfg.timeout_ms);
    let mut timed_out = false;
    let mut cancelled = false;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {}
            Err(e) => return Err(SmtError::Io(e.to_string())),
        }
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            cancelled = true;
        } else if Instant::now() >= deadline {
            timed_out = true;
        }
        if cancelled || timed_out {
            let _ = child.kill();
            let _ = child.wait();
            break;
        }
        thread::sleep(POLL);
    }
    let _ = writer.join();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok(RawRun {
        stdout,
        stderr,
        timed_out,
        cancelled,
    })
}

/// Encodes, runs and parses.
pub fn solve(cs: &ClauseSet, cfg: &SolverConfig) -> Result<SolveOutcome, SmtError> {
    solve_cancellable(cs, cfg, &[], None)
}

/// [`solve`] with extra SMT-LIB assertions and a cancellation flag.
pub fn solve_cancellable(
    cs: &ClauseSet,
    cfg: &SolverConfig,
    extra_assertions: &[String],
    cancel: Option<&AtomicBool>,
) -> Result<SolveOutcome, SmtError> {
    let script = encode_with(cs, extra_assertions);
    let run = run_script(&script, cfg, cancel)?;
    if run.cancelled {
        return Ok(SolveOutcome::Cancelled);
    }
    if run.timed_out {
        return Ok(SolveOutcome::Timeout);
    }
    Ok(parse_response(&run.stdout, cs))
}

/// Interprets the solver's answer to `check-sat` followed by `get-model`.
pub fn parse_response(stdout: &str, cs: &ClauseSet) -> SolveOutcome {
    let exprs = match parse_all(stdout) {
        Ok(e) => e,
        Err(e) => return SolveOutcome::SolverError(format!("{e}: {}", excerpt(stdout))),
    };
    let mut iter = exprs.iter().peekable();
    // Errors before the status line (e.g. an unsupported option) are not fatal.
    let mut errors = Vec::new();
    while let Some(e) = iter.peek() {
        if e.head() == Some("error") {
            errors.push(e.to_string());
            iter.next();
        } else {
            break;
        }
    }
    let status = match iter.next().and_then(SExpr::as_atom) {
        Some(s) => s.to_string(),
        None => {
            return SolveOutcome::SolverError(if errors.is_empty() {
                format!("no status in solver output: {}", excerpt(stdout))
            } else {
                errors.join("; ")
            })
        }
    };
    match status.as_str() {
        "unsat" => return SolveOutcome::Unsat,
        "unknown" => return SolveOutcome::Unknown(errors.join("; ")),
        "timeout" => return SolveOutcome::Timeout,
        "sat" => {}
        other => return SolveOutcome::SolverError(format!("unexpected status `{other}`")),
    }
    let by_name: HashMap<String, &VarId> = cs.free_vars().iter().map(|v| (v.name().to_string(), v)).collect();
    let mut values: BTreeMap<VarId, ModelValue> = BTreeMap::new();
    for e in iter {
        collect_assignments(e, &by_name, &mut values);
    }
    let mut model = Model::new(values);
    for v in cs.free_vars() {
        if model.get(v).is_none() {
            model.complete_with_zero(v.clone());
        }
    }
    SolveOutcome::Sat(model)
}

fn collect_assignments(e: &SExpr, by_name: &HashMap<String, &VarId>, out: &mut BTreeMap<VarId, ModelValue>) {
    let Some(items) = e.as_list() else {
        return;
    };
    match e.head() {
        // (define-fun name () Real value)
        Some("define-fun") if items.len() == 5 => {
            if let (Some(name), Some(args)) = (items[1].as_atom(), items[2].as_list()) {
                if args.is_empty() {
                    if let Some(v) = by_name.get(name) {
                        out.insert((*v).clone(), read_value(&items[4]));
                    }
                }
            }
        }
        // yices style: (= name value)
        Some("=") if items.len() == 3 => {
            if let Some(v) = items[1].as_atom().and_then(|n| by_name.get(n)) {
                out.insert((*v).clone(), read_value(&items[2]));
            }
        }
        Some("error") => {}
        _ => {
            for it in items {
                collect_assignments(it, by_name, out);
            }
        }
    }
}

fn excerpt(s: &str) -> String {
    let t: String = s.chars().take(200).collect();
    t.replace('\n', " ")
}

/// An entry of `A` or `B` the solver only gave symbolically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraicEntry {
    pub matrix: char,
    pub row: usize,
    pub col: usize,
    pub text: String,
    pub approx: Option<f64>,
}

/// `sigma(A)` and `sigma(B)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtractedLoop {
    Rational {
        a: Vec<Vec<Rational>>,
        b: Vec<Vec<Rational>>,
    },
    Algebraic {
        entries: Vec<AlgebraicEntry>,
        a_approx: Vec<Vec<Option<f64>>>,
        b_approx: Vec<Vec<Option<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("model has no value for `{0}`")]
    Incomplete(String),
}

fn approx_poly(p: &Polynomial, model: &Model) -> Option<f64> {
    let mut total = 0.0;
    for (m, c) in p.terms() {
        let mut t = c.to_f64();
        for (v, e) in m.iter() {
            t *= model.get(v)?.approx()?.powi(e as i32);
        }
        total += t;
    }
    Some(total)
}

/// Substitutes the model into the template's `A` and `B`.
pub fn extract_loop(model: &Model, rt: &RecurrenceTemplate) -> Result<ExtractedLoop, ExtractError> {
    for v in rt.a_vars.iter().chain(&rt.b_vars) {
        let used = rt.a.entries().iter().chain(rt.b.entries()).any(|p| p.contains_var(v));
        if used && model.get(v).is_none() {
            return Err(ExtractError::Incomplete(v.name().to_string()));
        }
    }
    let exact = model.exact_values();
    let mut entries = Vec::new();
    let mut eval = |m: &PolyMatrix, tag: char| -> (Option<Vec<Vec<Rational>>>, Vec<Vec<Option<f64>>>) {
        let mut rat = Some(Vec::new());
        let mut approx = Vec::new();
        for i in 0..m.rows() {
            let mut rrow = Vec::new();
            let mut arow = Vec::new();
            for (j, p) in m.row(i).iter().enumerate() {
                match p.evaluate(&exact).as_constant() {
                    Some(c) => {
                        arow.push(Some(c.to_f64()));
                        rrow.push(c);
                    }
                    None => {
                        let text = p
                            .variables()
                            .iter()
                            .filter_map(|v| match model.get(v) {
                                Some(ModelValue::AlgebraicOpaque { text, .. }) => Some(format!("{v} = {text}")),
                                _ => None,
                            })
                            .collect::<Vec<_>>()
                            .join(", ");
                        let approx = approx_poly(p, model);
                        entries.push(AlgebraicEntry {
                            matrix: tag,
                            row: i,
                            col: j,
                            text,
                            approx,
                        });
                        arow.push(approx);
                        rat = None;
                    }
                }
            }
            if let Some(r) = rat.as_mut() {
                r.push(rrow);
            }
            approx.push(arow);
        }
        (rat, approx)
    };
    let (a, a_approx) = eval(&rt.a, 'A');
    let (b, b_approx) = eval(&rt.b, 'B');
    Ok(match (a, b) {
        (Some(a), Some(b)) => ExtractedLoop::Rational { a, b },
        _ => ExtractedLoop::Algebraic {
            entries,
            a_approx,
            b_approx,
        },
    })
}

/// A clause forbidding the exact values the model gives the template's
/// unknowns in `A` and `B` (only `B` with `updates_only`); `None` if one
/// of them is not rational.
pub fn blocking_assertion(model: &Model, rt: &RecurrenceTemplate, updates_only: bool) -> Option<String> {
    let mut parts = Vec::new();
    let a_vars: &[VarId] = if updates_only { &[] } else { &rt.a_vars };
    for v in a_vars.iter().chain(&rt.b_vars) {
        let value = model.get(v)?.exact()?;
        parts.push(format!("(not (= {} {}))", symbol(v), rational_literal(value)));
    }
    match parts.len() {
        0 => None,
        1 => parts.pop(),
        _ => Some(format!("(or {})", parts.join(" "))),
    }
}
