//! Exact unrolling oracle.
//!
//! Every invariant polynomial composed with the sequences of a linear loop is
//! C-finite of bounded order, and a C-finite sequence of order `r` that
//! vanishes at `n = 0..r-1` vanishes everywhere. Unrolling up to that bound is
//! therefore a complete check. Parameterized loops are unrolled with the
//! parameters kept symbolic, which makes the check complete for all parameter
//! values at once; a fixed grid of instances supplies concrete witnesses.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::pcp::InvariantSpec;
use crate::poly::{Polynomial, Rational, VarId};
use crate::recurrence::Parameter;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoopError {
    #[error("update matrix must be square and match the {0} variables")]
    BadUpdate(usize),
    #[error("initializer must have one row per variable and one column per parameter plus one")]
    BadInitializer,
}

/// `X_{n+1} = B X_n` with `X_0 = A (params..., 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteLoop {
    pub vars: Vec<VarId>,
    pub b: Vec<Vec<Rational>>,
    /// `s x (r+1)`: one column per parameter, then the constant column.
    pub a: Vec<Vec<Rational>>,
    pub params: Vec<Parameter>,
}

impl ConcreteLoop {
    pub fn new(vars: Vec<VarId>, b: Vec<Vec<Rational>>, a: Vec<Vec<Rational>>, params: Vec<Parameter>) -> Result<Self, LoopError> {
        let s = vars.len();
        if b.len() != s || b.iter().any(|r| r.len() != s) {
            return Err(LoopError::BadUpdate(s));
        }
        if a.len() != s || a.iter().any(|r| r.len() != params.len() + 1) {
            return Err(LoopError::BadInitializer);
        }
        Ok(ConcreteLoop { vars, b, a, params })
    }

    /// A loop without parameters from integer data.
    pub fn from_ints(vars: &[VarId], b: &[&[i64]], x0: &[i64]) -> Result<Self, LoopError> {
        ConcreteLoop::new(
            vars.to_vec(),
            b.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect(),
            x0.iter().map(|&x| vec![Rational::from_int(x)]).collect(),
            Vec::new(),
        )
    }

    pub fn size(&self) -> usize {
        self.vars.len()
    }

    pub fn is_parameterized(&self) -> bool {
        !self.params.is_empty()
    }

    /// `X_0` with parameters as symbols.
    pub fn initial_symbolic(&self) -> Vec<Polynomial> {
        let r = self.params.len();
        self.a
            .iter()
            .map(|row| {
                let mut p = Polynomial::constant(row[r].clone());
                for (k, prm) in self.params.iter().enumerate() {
                    if !row[k].is_zero() {
                        p = &p + &Polynomial::var(prm.symbol.clone()).scale(&row[k]);
                    }
                }
                p
            })
            .collect()
    }

    /// `X_0` for concrete parameter values.
    pub fn initial_at(&self, values: &[Rational]) -> Vec<Rational> {
        let r = self.params.len();
        self.a
            .iter()
            .map(|row| {
                let mut acc = row[r].clone();
                for (k, v) in values.iter().enumerate().take(r) {
                    acc += &(&row[k] * v);
                }
                acc
            })
            .collect()
    }

    pub fn step(&self, x: &[Rational]) -> Vec<Rational> {
        self.b
            .iter()
            .map(|row| {
                row.iter().zip(x).fold(Rational::zero(), |mut acc, (c, v)| {
                    if !c.is_zero() {
                        acc += &(c * v);
                    }
                    acc
                })
            })
            .collect()
    }

    pub fn step_symbolic(&self, x: &[Polynomial]) -> Vec<Polynomial> {
        self.b
            .iter()
            .map(|row| {
                row.iter().zip(x).fold(Polynomial::zero(), |acc, (c, v)| {
                    if c.is_zero() {
                        acc
                    } else {
                        &acc + &v.scale(c)
                    }
                })
            })
            .collect()
    }

    /// `X_0, ..., X_{count-1}` for concrete parameter values.
    pub fn trace(&self, param_values: &[Rational], count: usize) -> Vec<Vec<Rational>> {
        let mut out = Vec::with_capacity(count);
        let mut x = self.initial_at(param_values);
        for _ in 0..count {
            let next = self.step(&x);
            out.push(std::mem::replace(&mut x, next));
        }
        out
    }

    /// Row `i` of `B` as an update expression over the loop variables.
    pub fn update(&self, i: usize) -> Polynomial {
        self.b[i].iter().zip(&self.vars).fold(Polynomial::zero(), |acc, (c, v)| {
            if c.is_zero() {
                acc
            } else {
                &acc + &Polynomial::var(v.clone()).scale(c)
            }
        })
    }
}

impl fmt::Display for ConcreteLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vars.iter().map(|v| v.name()).collect();
        let init: Vec<String> = self.initial_symbolic().iter().map(|p| p.to_string()).collect();
        let upd: Vec<String> = (0..self.size()).map(|i| self.update(i).to_string()).collect();
        write!(
            f,
            "({}) <- ({}); while true: ({}) <- ({})",
            names.join(", "),
            init.join(", "),
            names.join(", "),
            upd.join(", ")
        )
    }
}

/// Upper bound on the C-finite order of the invariant composed with the
/// loop: each monomial of total degree `d` in loop variables and initial
/// values is a product of `d` sequences of order at most `s`, hence of order
/// at most `s^d`; sums add orders.
pub fn order_bound(spec: &InvariantSpec, s: usize) -> usize {
    let s = s.max(1);
    let relevant = |v: &VarId| {
        spec.program_vars.contains(v) || spec.initial_vars.values().any(|w| w == v) || spec.shifted.contains_key(v)
    };
    let per_poly = spec.polys.iter().map(|p| {
        p.terms()
            .map(|(m, _)| {
                let d: u32 = m.iter().filter(|(v, _)| relevant(v)).map(|(_, e)| e).sum();
                s.saturating_pow(d)
            })
            .fold(0usize, usize::saturating_add)
    });
    per_poly.max().unwrap_or(1).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Report `HoldsComplete` when enough iterations were checked.
    CompleteIfBoundMet,
    /// Only ever report `HoldsBounded`.
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    HoldsComplete {
        bound: usize,
    },
    HoldsBounded {
        n_checked: usize,
    },
    Fails {
        n: usize,
        /// Index of the violated conjunct.
        conjunct: usize,
        /// Parameter values and loop-variable values at iteration `n`.
        witness: Vec<(String, Rational)>,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::Fails { .. })
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Verdict::HoldsComplete { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::HoldsComplete { bound } => write!(f, "holds for all n (checked n < {bound}, the order bound)"),
            Verdict::HoldsBounded { n_checked } => write!(f, "holds for n < {n_checked} (below the order bound)"),
            Verdict::Fails { n, conjunct, witness } => {
                write!(f, "fails at n = {n} (conjunct {}) with ", conjunct + 1)?;
                let parts: Vec<String> = witness.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

/// Verdict plus the audit trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationResult {
    pub verdict: Verdict,
    pub bound: usize,
    /// Number of states `X_0, X_1, ...` examined.
    pub states_checked: usize,
    /// Running SHA-256 over the examined states.
    pub hash_trace: Vec<String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Hasher {
    prev: Vec<u8>,
    trace: Vec<String>,
}

impl Hasher {
    fn new() -> Self {
        Hasher {
            prev: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn push(&mut self, n: usize, state: &[String]) {
        let mut h = Sha256::new();
        h.update(&self.prev);
        h.update(format!("{n}:{}", state.join(",")).as_bytes());
        self.prev = h.finalize().to_vec();
        self.trace.push(hex(&self.prev));
    }
}

/// Rational parameter instances used for witnesses: 0, ±1, ±1/2 and a
/// spread of larger magnitudes.
pub fn parameter_grid(r: usize) -> Vec<Vec<Rational>> {
    let base: Vec<Rational> = [
        (0, 1),
        (1, 1),
        (-1, 1),
        (1, 2),
        (-1, 2),
        (2, 1),
        (-2, 1),
        (3, 1),
        (-3, 1),
        (1, 3),
        (5, 1),
        (-5, 1),
        (3, 2),
        (-7, 3),
        (7, 1),
        (10, 1),
        (-10, 1),
        (2, 7),
        (13, 1),
        (17, 1),
        (-19, 4),
        (42, 1),
        (100, 1),
        (-100, 1),
        (1000, 1),
    ]
    .iter()
    .map(|&(p, q)| Rational::new(p, q))
    .collect();
    if r == 0 {
        return vec![Vec::new()];
    }
    (0..base.len())
        .map(|k| (0..r).map(|j| base[(k + j * (k / 5 + 3)) % base.len()].clone()).collect())
        .collect()
}

fn bindings_at(
    spec: &InvariantSpec,
    vars: &[VarId],
    states: &[Vec<Polynomial>],
    n: usize,
) -> HashMap<VarId, Polynomial> {
    let mut b = HashMap::new();
    for (row, v) in vars.iter().enumerate() {
        b.insert(v.clone(), states[n][row].clone());
    }
    for (v, sym) in &spec.initial_vars {
        if let Some(row) = vars.iter().position(|w| w == v) {
            b.insert(sym.clone(), states[0][row].clone());
        }
    }
    for (sym, (v, k)) in &spec.shifted {
        if let Some(row) = vars.iter().position(|w| w == v) {
            b.insert(sym.clone(), states[n + *k as usize][row].clone());
        }
    }
    b
}

fn max_shift(spec: &InvariantSpec) -> usize {
    spec.shifted.values().map(|(_, k)| *k as usize).max().unwrap_or(0)
}

/// Unrolls `iterations` loop steps (states `X_0..X_iterations`) and checks
/// every conjunct at every state. Parameters stay symbolic, so a pass is a
/// pass for every parameter value.
pub fn unroll_check(lp: &ConcreteLoop, spec: &InvariantSpec, iterations: usize, mode: CheckMode) -> VerificationResult {
    let bound = order_bound(spec, lp.size());
    let states_wanted = iterations + 1;
    let total = states_wanted + max_shift(spec);
    let mut states: Vec<Vec<Polynomial>> = Vec::with_capacity(total);
    states.push(lp.initial_symbolic());
    while states.len() < total {
        let next = lp.step_symbolic(states.last().map(Vec::as_slice).unwrap_or_default());
        states.push(next);
    }
    let mut hasher = Hasher::new();
    for n in 0..states_wanted {
        hasher.push(n, &states[n].iter().map(|p| p.to_string()).collect::<Vec<_>>());
        let bind = bindings_at(spec, &lp.vars, &states, n);
        for (ci, p) in spec.polys.iter().enumerate() {
            let value = p.substitute(&bind);
            if !value.is_zero() {
                let witness = concrete_witness(lp, &states[n], &value);
                return VerificationResult {
                    verdict: Verdict::Fails {
                        n,
                        conjunct: ci,
                        witness,
                    },
                    bound,
                    states_checked: n + 1,
                    hash_trace: hasher.trace,
                };
            }
        }
    }
    let verdict = if mode == CheckMode::CompleteIfBoundMet && states_wanted >= bound {
        Verdict::HoldsComplete { bound }
    } else {
        Verdict::HoldsBounded {
            n_checked: states_wanted,
        }
    };
    VerificationResult {
        verdict,
        bound,
        states_checked: states_wanted,
        hash_trace: hasher.trace,
    }
}

/// Picks parameter values where `value` (a nonzero polynomial in the
/// parameters) does not vanish: the grid first, then small integers.
fn concrete_witness(lp: &ConcreteLoop, state: &[Polynomial], value: &Polynomial) -> Vec<(String, Rational)> {
    let r = lp.params.len();
    let mut candidates = parameter_grid(r);
    candidates.extend((2..200i64).map(|k| (0..r).map(|j| Rational::from_int(k + 3 * j as i64)).collect()));
    let chosen = candidates
        .into_iter()
        .find(|vals| {
            let env: HashMap<VarId, Rational> = lp.params.iter().map(|p| p.symbol.clone()).zip(vals.iter().cloned()).collect();
            value.evaluate(&env).as_constant().is_some_and(|c| !c.is_zero())
        })
        .unwrap_or_else(|| vec![Rational::zero(); r]);
    let env: HashMap<VarId, Rational> = lp.params.iter().map(|p| p.symbol.clone()).zip(chosen.iter().cloned()).collect();
    let mut out: Vec<(String, Rational)> = lp.params.iter().zip(&chosen).map(|(p, v)| (p.symbol.name().to_string(), v.clone())).collect();
    for (v, p) in lp.vars.iter().zip(state) {
        let val = p.evaluate(&env).as_constant().unwrap_or_else(Rational::zero);
        out.push((v.name().to_string(), val));
    }
    out
}

/// Runs the concrete grid instances for `iterations` steps. Redundant with the
/// symbolic check; kept as an independent cross-check.
pub fn grid_check(lp: &ConcreteLoop, spec: &InvariantSpec, iterations: usize) -> Option<Verdict> {
    let shift = max_shift(spec);
    for vals in parameter_grid(lp.params.len()) {
        let trace = lp.trace(&vals, iterations + 1 + shift);
        let states: Vec<Vec<Polynomial>> = trace.iter().map(|x| x.iter().cloned().map(Polynomial::constant).collect()).collect();
        let mut env: HashMap<VarId, Polynomial> = HashMap::new();
        for (p, v) in lp.params.iter().zip(&vals) {
            env.insert(p.symbol.clone(), Polynomial::constant(v.clone()));
        }
        for n in 0..=iterations {
            let mut bind = bindings_at(spec, &lp.vars, &states, n);
            bind.extend(env.clone());
            for (ci, p) in spec.polys.iter().enumerate() {
                if !p.substitute(&bind).is_zero() {
                    let mut witness: Vec<(String, Rational)> =
                        lp.params.iter().zip(&vals).map(|(p, v)| (p.symbol.name().to_string(), v.clone())).collect();
                    witness.extend(lp.vars.iter().zip(&trace[n]).map(|(v, x)| (v.name().to_string(), x.clone())));
                    return Some(Verdict::Fails {
                        n,
                        conjunct: ci,
                        witness,
                    });
                }
            }
        }
    }
    None
}

/// Complete check: unrolls to at least the order bound.
pub fn verify_complete(lp: &ConcreteLoop, spec: &InvariantSpec, min_iterations: usize) -> VerificationResult {
    let bound = order_bound(spec, lp.size());
    let iterations = min_iterations.max(bound.saturating_sub(1));
    unroll_check(lp, spec, iterations, CheckMode::CompleteIfBoundMet)
}

/// Machine-readable record of one verification.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub invariant: Vec<String>,
    pub vars: Vec<String>,
    pub params: Vec<String>,
    pub b: Vec<Vec<String>>,
    pub a: Vec<Vec<String>>,
    pub bound: usize,
    pub states_checked: usize,
    pub verdict: Verdict,
    pub hash_trace: Vec<String>,
}

impl Certificate {
    pub fn new(lp: &ConcreteLoop, spec: &InvariantSpec, result: &VerificationResult) -> Self {
        let strs = |m: &[Vec<Rational>]| m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        Certificate {
            schema_version: 1,
            invariant: spec.polys.iter().map(|p| format!("{p} == 0")).collect(),
            vars: lp.vars.iter().map(|v| v.name().to_string()).collect(),
            params: lp.params.iter().map(|p| p.symbol.name().to_string()).collect(),
            b: strs(&lp.b),
            a: strs(&lp.a),
            bound: result.bound,
            states_checked: result.states_checked,
            verdict: result.verdict.clone(),
            hash_trace: result.hash_trace.clone(),
        }
    }

    /// Recomputes the hash trace from the loop and compares.
    pub fn replay(&self, lp: &ConcreteLoop) -> bool {
        let mut states = vec![lp.initial_symbolic()];
        let mut hasher = Hasher::new();
        for n in 0..self.hash_trace.len() {
            if n > 0 {
                let next = lp.step_symbolic(&states[n - 1]);
                states.push(next);
            }
            hasher.push(n, &states[n].iter().map(|p| p.to_string()).collect::<Vec<_>>());
        }
        hasher.trace == self.hash_trace
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn spec(polys: Vec<Polynomial>, vars: &[VarId]) -> InvariantSpec {
        InvariantSpec::new(polys, vars.to_vec(), BTreeMap::new()).unwrap()
    }

    #[test]
    fn bound_examples() {
        let (x, y) = (VarId::program("x"), VarId::program("y"));
        let p = &Polynomial::var(x.clone()) - &Polynomial::var(y.clone()).scale(&Rational::from_int(2));
        assert_eq!(order_bound(&spec(vec![p], &[x.clone(), y.clone()]), 2), 4);
        let (a, b) = (VarId::program("a"), VarId::program("b"));
        let q = &Polynomial::var(a.clone()) - &Polynomial::var(b.clone()).pow(2);
        assert_eq!(order_bound(&spec(vec![q], &[a, b]), 3), 12);
        assert_eq!(order_bound(&spec(vec![Polynomial::one()], &[x]), 2), 1);
    }

    #[test]
    fn zero_iterations_checks_initial_state() {
        let x = VarId::program("x");
        let lp = ConcreteLoop::from_ints(std::slice::from_ref(&x), &[&[1]], &[1]).unwrap();
        let s = spec(vec![Polynomial::var(x)], &lp.vars);
        let r = unroll_check(&lp, &s, 0, CheckMode::Bounded);
        assert!(matches!(r.verdict, Verdict::Fails { n: 0, .. }));
        assert_eq!(r.hash_trace.len(), 1);
    }

    #[test]
    fn certificate_replays() {
        let (x, y) = (VarId::program("x"), VarId::program("y"));
        let lp = ConcreteLoop::from_ints(&[x.clone(), y.clone()], &[&[2, 0], &[0, 2]], &[2, 1]).unwrap();
        let p = &Polynomial::var(x) - &Polynomial::var(y).scale(&Rational::from_int(2));
        let s = spec(vec![p], &lp.vars);
        let r = unroll_check(&lp, &s, 20, CheckMode::CompleteIfBoundMet);
        assert_eq!(r.verdict, Verdict::HoldsComplete { bound: 4 });
        let cert = Certificate::new(&lp, &s, &r);
        assert!(cert.replay(&lp));
        let other = ConcreteLoop::from_ints(&lp.vars, &[&[2, 0], &[0, 2]], &[4, 2]).unwrap();
        assert!(!cert.replay(&other));
    }

    #[test]
    fn grid_has_25_distinct_tuples() {
        let g = parameter_grid(2);
        assert_eq!(g.len(), 25);
        let set: std::collections::BTreeSet<_> = g.iter().collect();
        assert_eq!(set.len(), 25);
        assert_eq!(parameter_grid(1)[0], vec![Rational::zero()]);
    }
}
