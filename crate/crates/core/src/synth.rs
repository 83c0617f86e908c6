//! The search over configurations.
//!
//! A configuration fixes the shape of `B`, the eigenvalue multiplicities and
//! the order in which loop variables are assigned to rows. For each one the
//! constraint problem is assembled and solved; every model is turned into a
//! loop and checked by the unrolling oracle before it is returned.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::pcp::{assemble_with, FamilySizes, GuardMode, InvariantSpec, PcpError, SpectrumGuards};
use crate::poly::{Rational, VarId, VarKind};
use crate::recurrence::{
    build_templates, int_partitions, permutations_for_shape, IntegerPartition, MatrixShape, Parameter, Permutations,
    RecurrenceError,
};
use crate::smt::{
    blocking_assertion, encode_with, extract_loop, solve_cancellable, AlgebraicEntry, ExtractedLoop, ModelValue, SmtError,
    SolveOutcome, SolverConfig,
};
use crate::verify::{grid_check, verify_complete, Certificate, ConcreteLoop, Verdict};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Name of the auxiliary variable pinned to 1.
pub const CONSTANT_VAR: &str = "one";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "n")]
pub enum SearchMode {
    /// Stop at the first verified loop.
    First,
    /// Collect up to `N` verified loops, several per configuration if the
    /// solver finds them.
    AllUpTo(usize),
    /// One model per configuration, every configuration.
    Exhaustive,
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(SearchMode::First),
            "exhaustive" => Ok(SearchMode::Exhaustive),
            _ => match s.strip_prefix("all:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(SearchMode::AllUpTo(n)),
                _ => Err(format!("bad search mode `{s}` (expected first, all:<N> or exhaustive)")),
            },
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMode::First => f.write_str("first"),
            SearchMode::AllUpTo(n) => write!(f, "all:{n}"),
            SearchMode::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("system size {size} is smaller than the {vars} loop variables")]
    SizeTooSmall { size: usize, vars: usize },
    #[error("parameter `{0}` does not belong to a loop variable")]
    BadParameter(String),
    #[error("no shapes to try")]
    NoShapes,
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Solver(#[from] SmtError),
    #[error("cannot write SMT dump: {0}")]
    Dump(String),
}

/// Everything the search needs.
#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    pub spec: InvariantSpec,
    /// System size `s`, including auxiliary variables.
    pub size: usize,
    /// Insert the constant-1 variable when `size` leaves room for it.
    pub aux: bool,
    pub params: Vec<Parameter>,
    pub shapes: Vec<MatrixShape>,
    /// Restricts the eigenvalue multiplicities tried; `None` tries all.
    pub partitions: Option<Vec<IntegerPartition>>,
    pub guard_mode: GuardMode,
    pub solver: SolverConfig,
    pub search: SearchMode,
    /// Orderings per shape and partition; `None` means `min(s!, 120)`.
    pub permutation_budget: Option<usize>,
    /// Only try the declared variable order.
    pub fixed_order: bool,
    /// Emit loops whose `A` or `B` the solver only gave as algebraic numbers.
    pub allow_algebraic: bool,
    /// Minimum number of loop iterations the oracle unrolls.
    pub verify_iters: usize,
    pub jobs: usize,
    pub spectrum: SpectrumGuards,
    /// With `all:N`, a further solution must differ in `B`, not just in `A`.
    pub distinct_updates: bool,
    pub dump_smt: Option<PathBuf>,
    /// Writes each configuration's clause set as text and JSON.
    pub dump_pcp: Option<PathBuf>,
    /// Stop starting configurations after this much wall-clock time.
    pub global_budget: Option<Duration>,
}

impl SynthesisProblem {
    /// Defaults: one slot more than the loop variables for the constant, all
    /// shapes cheapest first, nontriviality guard on every invariant variable,
    /// 60 s per configuration.
    pub fn new(spec: InvariantSpec) -> Self {
        let size = spec.program_vars.len() + 1;
        SynthesisProblem {
            spec,
            size,
            aux: true,
            params: Vec::new(),
            shapes: MatrixShape::ALL.to_vec(),
            partitions: None,
            guard_mode: GuardMode::NonconstantAll,
            solver: SolverConfig::default(),
            search: SearchMode::First,
            permutation_budget: None,
            fixed_order: false,
            allow_algebraic: false,
            verify_iters: 20,
            jobs: 1,
            distinct_updates: false,
            spectrum: SpectrumGuards::default(),
            dump_smt: None,
            dump_pcp: None,
            global_budget: None,
        }
    }

    /// Rows of the system in declared order, and the constant variable if any.
    pub fn system_vars(&self) -> Result<(Vec<VarId>, Option<VarId>), SynthError> {
        let nvars = self.spec.program_vars.len();
        if self.size < nvars || self.size == 0 {
            return Err(SynthError::SizeTooSmall {
                size: self.size,
                vars: nvars,
            });
        }
        let mut vars = self.spec.program_vars.clone();
        let mut constant = None;
        if self.aux && self.size > nvars {
            let mut name = CONSTANT_VAR.to_string();
            while vars.iter().any(|v| v.name() == name) {
                name.push('_');
            }
            let one = VarId::new(name, VarKind::ProgramVar);
            vars.push(one.clone());
            constant = Some(one);
        }
        let mut k = 1;
        while vars.len() < self.size {
            let name = format!("t{k}");
            k += 1;
            if vars.iter().any(|v| v.name() == name) {
                continue;
            }
            vars.push(VarId::new(name, VarKind::ProgramVar));
        }
        Ok((vars, constant))
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.shapes.is_empty() {
            return Err(SynthError::NoShapes);
        }
        for p in &self.params {
            if !self.spec.program_vars.contains(&p.var) {
                return Err(SynthError::BadParameter(p.symbol.name().to_string()));
            }
        }
        self.solver.validate()?;
        Ok(())
    }

    fn budget(&self) -> usize {
        self.permutation_budget.unwrap_or_else(|| {
            let mut f: usize = 1;
            for k in 2..=self.size {
                f = f.saturating_mul(k);
                if f >= 120 {
                    return 120;
                }
            }
            f.min(120)
        })
    }

    /// The configuration cursor for this problem.
    pub fn configurations(&self) -> Result<ConfigCursor, SynthError> {
        let (vars, _) = self.system_vars()?;
        let partitions = match &self.partitions {
            Some(p) => p.iter().filter(|p| p.sum() == self.size).cloned().collect(),
            None => int_partitions(self.size)?.collect(),
        };
        let limit = if self.fixed_order { 1 } else { self.budget() };
        Ok(ConfigCursor::new(self.shapes.clone(), partitions, vars, limit))
    }
}

/// One point of the search space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub index: usize,
    pub shape: MatrixShape,
    pub partition: IntegerPartition,
    /// Variable of each row.
    pub order: Vec<VarId>,
}

impl Configuration {
    fn tag(&self) -> String {
        let parts: Vec<String> = self.partition.parts().iter().map(|p| p.to_string()).collect();
        let order: Vec<&str> = self.order.iter().map(|v| v.name()).collect();
        format!("{:04}_{}_{}_{}", self.index, self.shape, parts.join("-"), order.join("-"))
    }
}

/// Deterministic, resumable walk over shapes, then partitions in descending
/// lexicographic order, then variable orders in lexicographic order.
#[derive(Debug, Clone)]
pub struct ConfigCursor {
    shapes: Vec<MatrixShape>,
    partitions: Vec<IntegerPartition>,
    vars: Vec<VarId>,
    limit: usize,
    shape_idx: usize,
    part_idx: usize,
    perms: Option<Permutations<VarId>>,
    index: usize,
}

impl ConfigCursor {
    pub fn new(shapes: Vec<MatrixShape>, partitions: Vec<IntegerPartition>, vars: Vec<VarId>, limit: usize) -> Self {
        ConfigCursor {
            shapes,
            partitions,
            vars,
            limit: limit.max(1),
            shape_idx: 0,
            part_idx: 0,
            perms: None,
            index: 0,
        }
    }

    /// The next configuration, or `None` once exhausted (and forever after).
    pub fn next_config(&mut self) -> Option<Configuration> {
        loop {
            let shape = *self.shapes.get(self.shape_idx)?;
            let Some(partition) = self.partitions.get(self.part_idx).cloned() else {
                self.shape_idx += 1;
                self.part_idx = 0;
                continue;
            };
            let (vars, limit) = (&self.vars, self.limit);
            let perms = self
                .perms
                .get_or_insert_with(|| permutations_for_shape(shape, vars, Some(limit)));
            match perms.next() {
                Some(order) => {
                    let index = self.index;
                    self.index += 1;
                    return Some(Configuration {
                        index,
                        shape,
                        partition,
                        order,
                    });
                }
                None => {
                    self.perms = None;
                    self.part_idx += 1;
                }
            }
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.shape_idx >= self.shapes.len()
    }
}

impl Iterator for ConfigCursor {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        self.next_config()
    }
}

/// How a returned loop was checked.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verification {
    OracleVerified { bound: usize, certificate: Box<Certificate> },
    /// `A` or `B` has irrational entries; only emitted on request.
    UnverifiedAlgebraic { entries: Vec<AlgebraicEntry> },
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::OracleVerified { .. })
    }
}

/// `A` and `B` of a solution, exact when possible.
#[derive(Debug, Clone)]
pub enum LoopData {
    Exact(ConcreteLoop),
    Approximate {
        vars: Vec<VarId>,
        params: Vec<Parameter>,
        a: Vec<Vec<Option<f64>>>,
        b: Vec<Vec<Option<f64>>>,
    },
}

impl LoopData {
    pub fn vars(&self) -> &[VarId] {
        match self {
            LoopData::Exact(lp) => &lp.vars,
            LoopData::Approximate { vars, .. } => vars,
        }
    }

    pub fn exact(&self) -> Option<&ConcreteLoop> {
        match self {
            LoopData::Exact(lp) => Some(lp),
            LoopData::Approximate { .. } => None,
        }
    }
}

/// An eigenvalue of `B` as the solver assigned it.
#[derive(Debug, Clone, Serialize)]
pub struct Eigenvalue {
    pub value: ModelValue,
    pub multiplicity: u32,
}

#[derive(Debug, Clone)]
pub struct SynthesizedLoop {
    pub data: LoopData,
    pub shape: MatrixShape,
    pub partition: IntegerPartition,
    pub config_index: usize,
    pub eigenvalues: Vec<Eigenvalue>,
    pub verification: Verification,
    /// The row pinned to 1, if the system has one.
    pub constant_var: Option<VarId>,
}

impl SynthesizedLoop {
    pub fn is_verified(&self) -> bool {
        self.verification.is_verified()
    }
}

/// Outcome of one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigReport {
    pub index: usize,
    pub shape: MatrixShape,
    pub partition: IntegerPartition,
    pub order: Vec<String>,
    /// sat, unsat, unsat-static, unknown, timeout, solver-error, cancelled,
    /// discarded-algebraic or rejected-by-oracle.
    pub status: String,
    pub constraints: usize,
    pub max_degree: u32,
    pub families: Option<FamilySizes>,
    pub solve_ms: u128,
    pub solutions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// The whole run.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub configs: Vec<ConfigReport>,
    pub solutions: Vec<SynthesizedLoop>,
    pub elapsed: Duration,
    /// Configurations never started because the search stopped early.
    pub not_started: usize,
}

impl SearchReport {
    pub fn verified(&self) -> impl Iterator<Item = &SynthesizedLoop> {
        self.solutions.iter().filter(|s| s.is_verified())
    }

    pub fn has_verified(&self) -> bool {
        self.verified().next().is_some()
    }

    /// Every attempted configuration ended in a solver error.
    pub fn all_solver_errors(&self) -> bool {
        !self.configs.is_empty() && self.configs.iter().all(|c| c.status == "solver-error")
    }

    /// Versioned machine-readable record of the run.
    pub fn to_json(&self, problem: &SynthesisProblem) -> serde_json::Value {
        let solutions: Vec<serde_json::Value> = self.solutions.iter().map(solution_json).collect();
        serde_json::json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "problem": {
                "invariant": problem.spec.to_string(),
                "vars": problem.spec.program_vars.iter().map(|v| v.name()).collect::<Vec<_>>(),
                "params": problem.params.iter().map(|p| p.symbol.name()).collect::<Vec<_>>(),
                "size": problem.size,
                "shapes": problem.shapes,
                "guard": problem.guard_mode,
                "search": problem.search.to_string(),
                "solver": problem.solver.solver_kind.to_string(),
                "timeout_ms": problem.solver.timeout_ms,
            },
            "configs": self.configs,
            "not_started": self.not_started,
            "elapsed_ms": self.elapsed.as_millis(),
            "solutions": solutions,
        })
    }
}

fn solution_json(s: &SynthesizedLoop) -> serde_json::Value {
    let matrices = match &s.data {
        LoopData::Exact(lp) => {
            let strs = |m: &[Vec<Rational>]| -> Vec<Vec<String>> { m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect() };
            serde_json::json!({
                "exact": true,
                "a": strs(&lp.a),
                "b": strs(&lp.b),
                "assignments": (0..lp.size()).map(|i| format!("{} <- {}", lp.vars[i], lp.update(i))).collect::<Vec<_>>(),
                "initial": lp.vars.iter().zip(lp.initial_symbolic()).map(|(v, p)| format!("{v} = {p}")).collect::<Vec<_>>(),
            })
        }
        LoopData::Approximate { a, b, .. } => serde_json::json!({ "exact": false, "a": a, "b": b }),
    };
    serde_json::json!({
        "config_index": s.config_index,
        "shape": s.shape,
        "partition": s.partition,
        "vars": s.data.vars().iter().map(|v| v.name()).collect::<Vec<_>>(),
        "matrices": matrices,
        "eigenvalues": s.eigenvalues,
        "verification": s.verification,
    })
}

/// Works through one configuration.
fn run_config(
    problem: &SynthesisProblem,
    config: &Configuration,
    constant: Option<&VarId>,
    want: usize,
    cancel: &AtomicBool,
) -> Result<(ConfigReport, Vec<SynthesizedLoop>), SynthError> {
    let start = Instant::now();
    let (rt, cft) = build_templates(config.shape, &config.partition, &problem.params, &config.order, constant)?;
    let mut report = ConfigReport {
        index: config.index,
        shape: config.shape,
        partition: config.partition.clone(),
        order: config.order.iter().map(|v| v.name().to_string()).collect(),
        status: String::new(),
        constraints: 0,
        max_degree: 0,
        families: None,
        solve_ms: 0,
        solutions: 0,
        detail: None,
    };
    let pcp = match assemble_with(&problem.spec, &rt, &cft, problem.guard_mode, None, problem.spectrum) {
        Ok(p) => p,
        Err(PcpError::UnsatisfiableGuard(v)) => {
            report.status = "unsat-static".into();
            report.detail = Some(format!("`{v}` cannot change under this template"));
            return Ok((report, Vec::new()));
        }
        Err(e) => {
            report.status = "solver-error".into();
            report.detail = Some(e.to_string());
            return Ok((report, Vec::new()));
        }
    };
    report.constraints = pcp.clauses.len();
    report.max_degree = pcp.clauses.max_degree();
    report.families = Some(pcp.sizes);
    if let Some(dir) = &problem.dump_smt {
        write_dump(dir, &format!("{}.smt2", config.tag()), &encode_with(&pcp.clauses, &[]))?;
    }
    if let Some(dir) = &problem.dump_pcp {
        write_dump(dir, &format!("{}.pcp.txt", config.tag()), &pcp.clauses.to_text())?;
        write_dump(dir, &format!("{}.pcp.json", config.tag()), &pcp.clauses.to_json())?;
    }
    // A unitriangular B has the single eigenvalue 1.
    if pcp.clauses.is_trivially_unsat() || (config.shape == MatrixShape::UpperUnitriangular && config.partition.len() > 1) {
        report.status = "unsat-static".into();
        return Ok((report, Vec::new()));
    }

    let mut solutions = Vec::new();
    let mut blocks: Vec<String> = Vec::new();
    let mut last_status = String::new();
    while solutions.len() < want {
        let outcome = solve_cancellable(&pcp.clauses, &problem.solver, &blocks, Some(cancel))?;
        last_status = outcome.label().to_string();
        let SolveOutcome::Sat(model) = outcome else {
            if let SolveOutcome::SolverError(msg) | SolveOutcome::Unknown(msg) = &outcome {
                if !msg.is_empty() {
                    report.detail = Some(msg.clone());
                }
            }
            break;
        };
        let extracted = match extract_loop(&model, &rt) {
            Ok(e) => e,
            Err(e) => {
                last_status = "solver-error".into();
                report.detail = Some(e.to_string());
                break;
            }
        };
        let eigenvalues: Vec<Eigenvalue> = cft
            .roots
            .iter()
            .zip(config.partition.parts())
            .map(|(w, &m)| Eigenvalue {
                value: model.get(w).cloned().unwrap_or(ModelValue::Exact { value: Rational::zero() }),
                multiplicity: m,
            })
            .collect();
        match extracted {
            ExtractedLoop::Rational { a, b } => {
                let lp = ConcreteLoop::new(config.order.clone(), b, a, problem.params.clone())
                    .expect("template shapes are consistent");
                let result = verify_complete(&lp, &problem.spec, problem.verify_iters);
                let grid = grid_check(&lp, &problem.spec, result.states_checked.saturating_sub(1));
                match (&result.verdict, grid) {
                    (Verdict::HoldsComplete { bound }, None) => {
                        let certificate = Certificate::new(&lp, &problem.spec, &result);
                        solutions.push(SynthesizedLoop {
                            data: LoopData::Exact(lp),
                            shape: config.shape,
                            partition: config.partition.clone(),
                            config_index: config.index,
                            eigenvalues,
                            constant_var: constant.cloned(),
                            verification: Verification::OracleVerified {
                                bound: *bound,
                                certificate: Box::new(certificate),
                            },
                        });
                    }
                    (verdict, grid) => {
                        last_status = "rejected-by-oracle".into();
                        let v = grid.unwrap_or_else(|| verdict.clone());
                        report.detail = Some(format!("{lp}: {v}"));
                        break;
                    }
                }
            }
            ExtractedLoop::Algebraic {
                entries,
                a_approx,
                b_approx,
            } => {
                if !problem.allow_algebraic {
                    last_status = "discarded-algebraic".into();
                    report.detail = Some(entries.iter().map(|e| format!("{}[{},{}]", e.matrix, e.row + 1, e.col + 1)).collect::<Vec<_>>().join(" "));
                    break;
                }
                solutions.push(SynthesizedLoop {
                    data: LoopData::Approximate {
                        vars: config.order.clone(),
                        params: problem.params.clone(),
                        a: a_approx,
                        b: b_approx,
                    },
                    shape: config.shape,
                    partition: config.partition.clone(),
                    config_index: config.index,
                    eigenvalues,
                    constant_var: constant.cloned(),
                    verification: Verification::UnverifiedAlgebraic { entries },
                });
                break;
            }
        }
        match blocking_assertion(&model, &rt, problem.distinct_updates) {
            Some(b) => blocks.push(b),
            None => break,
        }
    }
    report.status = if solutions.is_empty() {
        last_status
    } else {
        "sat".into()
    };
    report.solutions = solutions.len();
    report.solve_ms = start.elapsed().as_millis();
    Ok((report, solutions))
}

fn write_dump(dir: &std::path::Path, name: &str, text: &str) -> Result<(), SynthError> {
    std::fs::create_dir_all(dir).map_err(|e| SynthError::Dump(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| SynthError::Dump(format!("{}: {e}", path.display())))
}

fn per_config_quota(search: SearchMode, found: usize) -> usize {
    match search {
        SearchMode::First => 1,
        SearchMode::AllUpTo(n) => n.saturating_sub(found),
        SearchMode::Exhaustive => 1,
    }
}

fn done(search: SearchMode, found_verified: usize) -> bool {
    match search {
        SearchMode::First => found_verified >= 1,
        SearchMode::AllUpTo(n) => found_verified >= n,
        SearchMode::Exhaustive => false,
    }
}

/// Runs the search. Sequential when `jobs <= 1`, which is the reference
/// behavior; otherwise configurations are handed to a pool of workers and,
/// once the search goal is met, running solvers are killed.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SearchReport, SynthError> {
    problem.validate()?;
    let (_, constant) = problem.system_vars()?;
    let configs: Vec<Configuration> = problem.configurations()?.collect();
    let start = Instant::now();
    if problem.jobs <= 1 {
        let cancel = AtomicBool::new(false);
        let mut reports = Vec::new();
        let mut solutions: Vec<SynthesizedLoop> = Vec::new();
        let mut started = 0;
        for config in &configs {
            let verified = solutions.iter().filter(|s| s.is_verified()).count();
            if done(problem.search, verified) || problem.global_budget.is_some_and(|b| start.elapsed() >= b) {
                break;
            }
            started += 1;
            let (report, sols) = run_config(problem, config, constant.as_ref(), per_config_quota(problem.search, verified), &cancel)?;
            reports.push(report);
            solutions.extend(sols);
        }
        return Ok(SearchReport {
            configs: reports,
            solutions,
            elapsed: start.elapsed(),
            not_started: configs.len() - started,
        });
    }

    let next = AtomicUsize::new(0);
    let cancel = AtomicBool::new(false);
    let verified_count = AtomicUsize::new(0);
    let results: Mutex<Vec<(ConfigReport, Vec<SynthesizedLoop>)>> = Mutex::new(Vec::new());
    let error: Mutex<Option<SynthError>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..problem.jobs {
            scope.spawn(|| loop {
                if cancel.load(Ordering::Relaxed) || problem.global_budget.is_some_and(|b| start.elapsed() >= b) {
                    return;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(config) = configs.get(i) else {
                    return;
                };
                let quota = per_config_quota(problem.search, verified_count.load(Ordering::SeqCst));
                match run_config(problem, config, constant.as_ref(), quota.max(1), &cancel) {
                    Ok((report, sols)) => {
                        let v = sols.iter().filter(|s| s.is_verified()).count();
                        let total = verified_count.fetch_add(v, Ordering::SeqCst) + v;
                        if let Ok(mut r) = results.lock() {
                            r.push((report, sols));
                        }
                        if done(problem.search, total) {
                            cancel.store(true, Ordering::Relaxed);
                        }
                    }
                    Err(e) => {
                        if let Ok(mut slot) = error.lock() {
                            slot.get_or_insert(e);
                        }
                        cancel.store(true, Ordering::Relaxed);
                    }
                }
            });
        }
    });
    if let Some(e) = error.into_inner().unwrap_or(None) {
        return Err(e);
    }
    let mut results = results.into_inner().unwrap_or_default();
    results.sort_by_key(|(r, _)| r.index);
    let started = results.len();
    let mut reports = Vec::new();
    let mut solutions = Vec::new();
    for (report, sols) in results {
        reports.push(report);
        solutions.extend(sols);
    }
    if let SearchMode::AllUpTo(n) = problem.search {
        solutions.truncate(n);
    }
    if problem.search == SearchMode::First {
        solutions.retain(|s| s.is_verified());
        solutions.truncate(1);
    }
    Ok(SearchReport {
        configs: reports,
        solutions,
        elapsed: start.elapsed(),
        not_started: configs.len() - started,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn vars(names: &[&str]) -> Vec<VarId> {
        names.iter().map(|n| VarId::program(*n)).collect()
    }

    #[test]
    fn cursor_order_for_two_variables() {
        let parts: Vec<IntegerPartition> = int_partitions(2).unwrap().collect();
        let mut c = ConfigCursor::new(
            vec![MatrixShape::UpperUnitriangular, MatrixShape::Full],
            parts,
            vars(&["x", "y"]),
            120,
        );
        let seen: Vec<(MatrixShape, String, String)> = std::iter::from_fn(|| c.next_config())
            .map(|k| (k.shape, k.partition.to_string(), k.order.iter().map(|v| v.name()).collect::<String>()))
            .collect();
        let u = MatrixShape::UpperUnitriangular;
        let f = MatrixShape::Full;
        assert_eq!(
            seen,
            vec![
                (u, "[2]".into(), "xy".into()),
                (u, "[2]".into(), "yx".into()),
                (u, "[1,1]".into(), "xy".into()),
                (u, "[1,1]".into(), "yx".into()),
                (f, "[2]".into(), "xy".into()),
                (f, "[1,1]".into(), "xy".into()),
            ]
        );
        assert!(c.next_config().is_none());
        assert!(c.next_config().is_none());
        assert!(c.is_exhausted());
    }

    #[test]
    fn size_one_has_one_config_per_shape() {
        let parts: Vec<IntegerPartition> = int_partitions(1).unwrap().collect();
        let c = ConfigCursor::new(MatrixShape::ALL.to_vec(), parts, vars(&["x"]), 120);
        assert_eq!(c.count(), 3);
    }

    #[test]
    fn system_vars_insert_constant_and_padding() {
        let x = VarId::program("x");
        let spec = InvariantSpec::new(vec![crate::poly::Polynomial::var(x.clone())], vec![x], BTreeMap::new()).unwrap();
        let mut p = SynthesisProblem::new(spec);
        p.size = 3;
        let (v, c) = p.system_vars().unwrap();
        assert_eq!(v.iter().map(|v| v.name()).collect::<Vec<_>>(), vec!["x", "one", "t1"]);
        assert_eq!(c.unwrap().name(), "one");
        p.aux = false;
        p.size = 1;
        assert_eq!(p.system_vars().unwrap().1, None);
        p.size = 0;
        assert!(p.system_vars().is_err());
    }

    #[test]
    fn search_mode_syntax() {
        assert_eq!("first".parse::<SearchMode>(), Ok(SearchMode::First));
        assert_eq!("all:3".parse::<SearchMode>(), Ok(SearchMode::AllUpTo(3)));
        assert_eq!("exhaustive".parse::<SearchMode>(), Ok(SearchMode::Exhaustive));
        assert!("all:0".parse::<SearchMode>().is_err());
        assert!("some".parse::<SearchMode>().is_err());
    }

    #[test]
    fn budget_caps_at_120() {
        let x = VarId::program("x");
        let spec = InvariantSpec::new(vec![crate::poly::Polynomial::var(x.clone())], vec![x], BTreeMap::new()).unwrap();
        let mut p = SynthesisProblem::new(spec);
        p.size = 3;
        assert_eq!(p.budget(), 6);
        p.size = 6;
        assert_eq!(p.budget(), 120);
    }
}
