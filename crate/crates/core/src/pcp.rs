//! The polynomial constraint problem tying a recurrence template, its closed
//! form and the invariant together.
//!
//! Four clause families are built:
//!
//! - roots: `chi_B(z) = prod (z - omega_i)^(m_i)` coefficient-wise, distinct
//!   and nonzero roots;
//! - coeff: the closed form satisfies `X_{n+1} = B X_n`;
//! - init: the closed form agrees with `B^i X_0` for `i < s`;
//! - alg: the invariant vanishes on the closed form for every `n`.
//!
//! For parameterized templates every equality is split into the coefficients
//! of its parameter monomials, which removes the universal quantifier over the
//! parameters.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::poly::{fresh_scope, parse_polynomial, Monomial, ParseError, PolyMatrix, Polynomial, VarId, VarKind};
use crate::recurrence::{closed_form_column, ClosedFormPoint, ClosedFormTemplate, RecurrenceTemplate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PcpError {
    #[error("invariant must contain at least one polynomial")]
    EmptyInvariant,
    #[error("variable `{0}` does not belong to the recurrence template")]
    UnknownVariable(String),
    #[error("variable `{0}` is neither a program variable nor an initial value")]
    UnclassifiedVariable(String),
    #[error("guard on `{0}` can never hold: its update is identically the identity")]
    UnsatisfiableGuard(String),
    #[error("clause dump: {0}")]
    Dump(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq0,
    Neq0,
}

/// `poly = 0` or `poly != 0`, with `poly` sign-normalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub poly: Polynomial,
    pub rel: Relation,
}

impl Constraint {
    pub fn eq0(p: &Polynomial) -> Self {
        Constraint {
            poly: p.sign_normalized(),
            rel: Relation::Eq0,
        }
    }

    pub fn neq0(p: &Polynomial) -> Self {
        Constraint {
            poly: p.sign_normalized(),
            rel: Relation::Neq0,
        }
    }

    /// Truth value when the polynomial is constant.
    pub fn constant_truth(&self) -> Option<bool> {
        let c = self.poly.as_constant()?;
        Some(match self.rel {
            Relation::Eq0 => c.is_zero(),
            Relation::Neq0 => !c.is_zero(),
        })
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rel {
            Relation::Eq0 => write!(f, "{} = 0", self.poly),
            Relation::Neq0 => write!(f, "{} != 0", self.poly),
        }
    }
}

/// A non-empty disjunction of constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub disjuncts: Vec<Constraint>,
}

impl Clause {
    pub fn unit(c: Constraint) -> Self {
        Clause { disjuncts: vec![c] }
    }

    pub fn any(disjuncts: Vec<Constraint>) -> Option<Self> {
        if disjuncts.is_empty() {
            None
        } else {
            Some(Clause { disjuncts })
        }
    }

    pub fn is_unit(&self) -> bool {
        self.disjuncts.len() == 1
    }

    pub fn as_unit(&self) -> Option<&Constraint> {
        if self.is_unit() {
            self.disjuncts.first()
        } else {
            None
        }
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        self.disjuncts.iter().flat_map(|c| c.poly.variables()).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.disjuncts.iter().map(|c| c.poly.total_degree()).max().unwrap_or(0)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" or ")?;
            }
            if self.is_unit() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})")?;
            }
        }
        Ok(())
    }
}

/// A conjunction of clauses. `free_vars` is exactly the set of symbols that
/// occur in some clause.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseSet {
    clauses: Vec<Clause>,
    free_vars: BTreeSet<VarId>,
}

impl ClauseSet {
    pub fn new() -> Self {
        ClauseSet::default()
    }

    /// Adds a clause, skipping clauses that are trivially true and exact
    /// duplicates. Returns whether it was added.
    pub fn push(&mut self, clause: Clause) -> bool {
        let mut disjuncts: Vec<Constraint> = Vec::new();
        for c in clause.disjuncts {
            match c.constant_truth() {
                Some(true) => return false,
                Some(false) if disjuncts.is_empty() => {}
                Some(false) => continue,
                None => {}
            }
            if !disjuncts.contains(&c) {
                disjuncts.push(c);
            }
        }
        // Keep one false constant if nothing else survived; it makes the set unsat.
        if disjuncts.len() > 1 {
            disjuncts.retain(|c| c.constant_truth().is_none());
        }
        let clause = Clause { disjuncts };
        if self.clauses.contains(&clause) {
            return false;
        }
        self.free_vars.extend(clause.variables());
        self.clauses.push(clause);
        true
    }

    pub fn push_eq0(&mut self, p: &Polynomial) -> bool {
        if p.is_zero() {
            return false;
        }
        self.push(Clause::unit(Constraint::eq0(p)))
    }

    pub fn push_neq0(&mut self, p: &Polynomial) -> bool {
        self.push(Clause::unit(Constraint::neq0(p)))
    }

    pub fn extend(&mut self, other: ClauseSet) {
        for c in other.clauses {
            self.push(c);
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn free_vars(&self) -> &BTreeSet<VarId> {
        &self.free_vars
    }

    /// Largest total degree of any monomial in any constraint.
    pub fn max_degree(&self) -> u32 {
        self.clauses.iter().map(Clause::max_degree).max().unwrap_or(0)
    }

    /// A clause whose every disjunct is a false constant.
    pub fn is_trivially_unsat(&self) -> bool {
        self.clauses
            .iter()
            .any(|c| c.disjuncts.iter().all(|d| d.constant_truth() == Some(false)))
    }

    /// Sign-normalized polynomials of the unit equality clauses.
    pub fn equalities(&self) -> BTreeSet<Polynomial> {
        self.clauses
            .iter()
            .filter_map(Clause::as_unit)
            .filter(|c| c.rel == Relation::Eq0)
            .map(|c| c.poly.clone())
            .collect()
    }

    pub fn disequalities(&self) -> BTreeSet<Polynomial> {
        self.clauses
            .iter()
            .filter_map(Clause::as_unit)
            .filter(|c| c.rel == Relation::Neq0)
            .map(|c| c.poly.clone())
            .collect()
    }

    /// Checks an exact assignment. `None` if some variable of a clause is unassigned.
    pub fn is_satisfied_by(&self, values: &HashMap<VarId, crate::poly::Rational>) -> Option<bool> {
        for clause in &self.clauses {
            let mut any = false;
            for d in &clause.disjuncts {
                let v = d.poly.evaluate(values).as_constant()?;
                let holds = match d.rel {
                    Relation::Eq0 => v.is_zero(),
                    Relation::Neq0 => !v.is_zero(),
                };
                any |= holds;
            }
            if !any {
                return Some(false);
            }
        }
        Some(true)
    }

    /// One clause per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.clauses {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_dump(&self) -> ClauseDump {
        ClauseDump {
            free_vars: self
                .free_vars
                .iter()
                .map(|v| DumpVar {
                    name: v.name().to_string(),
                    kind: v.kind(),
                })
                .collect(),
            clauses: self
                .clauses
                .iter()
                .map(|c| {
                    c.disjuncts
                        .iter()
                        .map(|d| DumpConstraint {
                            poly: d.poly.to_string(),
                            rel: d.rel,
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_dump()).expect("clause dumps always serialize")
    }

    /// Reads a dump back. Symbols are recreated in a fresh scope.
    pub fn from_json(text: &str) -> Result<ClauseSet, PcpError> {
        let dump: ClauseDump = serde_json::from_str(text).map_err(|e| PcpError::Dump(e.to_string()))?;
        let scope = fresh_scope();
        let vars: HashMap<String, VarId> = dump
            .free_vars
            .iter()
            .map(|v| (v.name.clone(), VarId::scoped(v.name.clone(), v.kind, scope)))
            .collect();
        let mut out = ClauseSet::new();
        for clause in dump.clauses {
            let mut disjuncts = Vec::new();
            for d in clause {
                let mut unknown = None;
                let poly = parse_polynomial(&d.poly, |name| {
                    vars.get(name).cloned().unwrap_or_else(|| {
                        unknown = Some(name.to_string());
                        VarId::new(name, VarKind::ProgramVar)
                    })
                })
                .map_err(|e: ParseError| PcpError::Dump(e.to_string()))?;
                if let Some(name) = unknown {
                    return Err(PcpError::Dump(format!("undeclared symbol `{name}`")));
                }
                disjuncts.push(Constraint { poly, rel: d.rel });
            }
            let clause = Clause::any(disjuncts).ok_or_else(|| PcpError::Dump("empty clause".into()))?;
            out.push(clause);
        }
        Ok(out)
    }
}

/// Machine-readable form of a [`ClauseSet`]: one record per constraint with
/// its relation tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClauseDump {
    pub free_vars: Vec<DumpVar>,
    pub clauses: Vec<Vec<DumpConstraint>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DumpVar {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DumpConstraint {
    pub poly: String,
    pub rel: Relation,
}

/// A conjunction of polynomial invariants `p = 0`.
#[derive(Debug, Clone)]
pub struct InvariantSpec {
    pub polys: Vec<Polynomial>,
    /// Loop variables in declaration order.
    pub program_vars: Vec<VarId>,
    /// Initial-value symbol of a loop variable, keyed by the loop variable.
    pub initial_vars: BTreeMap<VarId, VarId>,
    /// Symbols standing for a loop variable a fixed number of iterations ahead.
    pub shifted: BTreeMap<VarId, (VarId, u32)>,
}

impl InvariantSpec {
    pub fn new(
        polys: Vec<Polynomial>,
        program_vars: Vec<VarId>,
        initial_vars: BTreeMap<VarId, VarId>,
    ) -> Result<Self, PcpError> {
        InvariantSpec::with_shifts(polys, program_vars, initial_vars, BTreeMap::new())
    }

    pub fn with_shifts(
        polys: Vec<Polynomial>,
        program_vars: Vec<VarId>,
        initial_vars: BTreeMap<VarId, VarId>,
        shifted: BTreeMap<VarId, (VarId, u32)>,
    ) -> Result<Self, PcpError> {
        if polys.is_empty() {
            return Err(PcpError::EmptyInvariant);
        }
        let known: HashSet<&VarId> = program_vars
            .iter()
            .chain(initial_vars.values())
            .chain(shifted.keys())
            .collect();
        for p in &polys {
            for v in p.variables() {
                if !known.contains(&v) {
                    return Err(PcpError::UnclassifiedVariable(v.name().to_string()));
                }
            }
        }
        for base in initial_vars.keys().chain(shifted.values().map(|(b, _)| b)) {
            if !program_vars.contains(base) {
                return Err(PcpError::UnclassifiedVariable(base.name().to_string()));
            }
        }
        Ok(InvariantSpec {
            polys,
            program_vars,
            initial_vars,
            shifted,
        })
    }

    /// Loop variables that the invariant reads at some iteration `n` (directly
    /// or shifted); initial-value references do not count.
    pub fn mentioned_vars(&self) -> Vec<VarId> {
        let used: BTreeSet<VarId> = self.polys.iter().flat_map(Polynomial::variables).collect();
        self.program_vars
            .iter()
            .filter(|v| used.contains(*v) || self.shifted.iter().any(|(sym, (base, _))| base == *v && used.contains(sym)))
            .cloned()
            .collect()
    }

    pub fn initial_symbol(&self, var: &VarId) -> Option<&VarId> {
        self.initial_vars.get(var)
    }
}

impl fmt::Display for InvariantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.polys.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{p} == 0")?;
        }
        Ok(())
    }
}

pub fn roots_constraints(rt: &RecurrenceTemplate, cft: &ClosedFormTemplate) -> ClauseSet {
    let z = VarId::scoped("z", VarKind::CharZ, rt.scope);
    let zp = Polynomial::var(z.clone());
    let chi = rt.b.char_poly(&z).expect("B is square by construction");
    let prod = cft
        .roots
        .iter()
        .zip(cft.mults.parts())
        .fold(Polynomial::one(), |acc, (w, &m)| &acc * &(&zp - &Polynomial::var(w.clone())).pow(m));
    let diff = &chi - &prod;
    let mut out = ClauseSet::new();
    for (_, q) in diff.collect_by(&[z]).iter().rev() {
        out.push_eq0(q);
    }
    for i in 0..cft.roots.len() {
        for j in i + 1..cft.roots.len() {
            out.push_neq0(&(&Polynomial::var(cft.roots[i].clone()) - &Polynomial::var(cft.roots[j].clone())));
        }
    }
    for w in &cft.roots {
        out.push_neq0(&Polynomial::var(w.clone()));
    }
    out
}

fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let mut acc: i64 = 1;
    for i in 0..k as i64 {
        acc = acc * (n as i64 - i) / (i + 1);
    }
    acc
}

/// Entries of `D_ij = (sum_{k>=j} binom(k, j) C_ik omega_i) - B C_ij` (0-based).
pub fn coeff_constraints(rt: &RecurrenceTemplate, cft: &ClosedFormTemplate) -> ClauseSet {
    let mut out = ClauseSet::new();
    for (i, per_root) in cft.coeffs.iter().enumerate() {
        let omega = Polynomial::var(cft.roots[i].clone());
        let m = per_root.len();
        for j in 0..m {
            let mut shifted = PolyMatrix::zeros(per_root[j].rows(), per_root[j].cols());
            for (k, cik) in per_root.iter().enumerate().skip(j) {
                let w = &omega * &Polynomial::int(binomial(k as u32, j as u32));
                shifted = shifted.add(&cik.scale(&w)).expect("same shape");
            }
            let d = shifted.sub(&rt.b.mul(&per_root[j]).expect("conforming")).expect("same shape");
            for e in d.entries() {
                out.push_eq0(e);
            }
        }
    }
    out
}

/// Closed form at `n = i` equals `B^i X_0` for `i = 0..s-1`.
pub fn init_constraints(rt: &RecurrenceTemplate, cft: &ClosedFormTemplate) -> ClauseSet {
    let mut out = ClauseSet::new();
    let mut state = rt.x0();
    for i in 0..rt.size as u32 {
        let cf = closed_form_column(cft, ClosedFormPoint::At(i));
        let m = cf.sub(&state).expect("both are s x 1");
        for e in m.entries() {
            out.push_eq0(e);
        }
        state = rt.b.mul(&state).expect("conforming");
    }
    out
}

/// The invariant vanishes on the closed form for all `n`.
///
/// After substitution each polynomial is grouped by powers of `n`; each
/// coefficient is a sum of `l` terms `w^n u` with `w` a product of roots,
/// which vanishes for all `n` iff it vanishes for `n = 0..l-1`.
pub fn alg_constraints(spec: &InvariantSpec, rt: &RecurrenceTemplate, cft: &ClosedFormTemplate) -> Result<ClauseSet, PcpError> {
    let symbolic = closed_form_column(cft, ClosedFormPoint::Symbolic);
    let x0 = rt.x0();
    let mut bindings: HashMap<VarId, Polynomial> = HashMap::new();
    for (row, v) in rt.var_order.iter().enumerate() {
        bindings.insert(v.clone(), symbolic.get(row, 0).clone());
    }
    for (var, sym) in &spec.initial_vars {
        if let Some(row) = rt.row_of(var) {
            bindings.insert(sym.clone(), x0.get(row, 0).clone());
        }
    }
    let mut shift_cache: HashMap<u32, PolyMatrix> = HashMap::new();
    for (sym, (var, k)) in &spec.shifted {
        if let Some(row) = rt.row_of(var) {
            let col = shift_cache
                .entry(*k)
                .or_insert_with(|| closed_form_column(cft, ClosedFormPoint::Shifted(*k)));
            bindings.insert(sym.clone(), col.get(row, 0).clone());
        }
    }
    let params: HashSet<VarId> = rt.param_symbols().into_iter().collect();
    for p in &spec.polys {
        for v in p.variables() {
            if !bindings.contains_key(&v) && !params.contains(&v) {
                return Err(PcpError::UnknownVariable(v.name().to_string()));
            }
        }
    }

    let marker_omega: HashMap<VarId, VarId> = cft.markers.iter().cloned().zip(cft.roots.iter().cloned()).collect();
    let mut out = ClauseSet::new();
    for p in &spec.polys {
        let substituted = p.substitute(&bindings);
        for (_, q) in substituted.collect_by(std::slice::from_ref(&cft.n)) {
            let groups = q.collect_by(&cft.markers);
            let ell = groups.len() as u32;
            for j in 0..ell {
                let mut inst = Polynomial::zero();
                for (w, u) in &groups {
                    let omega_pow = Monomial::from_pairs(w.iter().map(|(m, e)| (marker_omega[m].clone(), e * j)));
                    inst = &inst + &u.mul_monomial(&omega_pow);
                }
                out.push_eq0(&inst);
            }
        }
    }
    Ok(out)
}

/// Splits every unit equality into the coefficients of its monomials over
/// `params`. Disequalities and proper disjunctions pass through.
pub fn decompose_params(cs: &ClauseSet, params: &[VarId]) -> ClauseSet {
    if params.is_empty() {
        return cs.clone();
    }
    let mut out = ClauseSet::new();
    for clause in cs.clauses() {
        match clause.as_unit() {
            Some(c) if c.rel == Relation::Eq0 => {
                for (_, q) in c.poly.collect_by(params) {
                    out.push_eq0(&q);
                }
            }
            _ => {
                out.push(clause.clone());
            }
        }
    }
    out
}

/// Which loop variables must not induce constant sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuardMode {
    None,
    NonconstantAll,
    NonconstantAny,
}

/// Disequalities `(B X_0 - X_0)_i != 0` for the rows of `targets`.
///
/// With parameters the row is a polynomial in them; it is nonzero as a
/// polynomial iff one of its parameter coefficients is nonzero, so the row
/// becomes a disjunction over those coefficients.
pub fn guard_constraints(rt: &RecurrenceTemplate, mode: GuardMode, targets: &[VarId]) -> Result<ClauseSet, PcpError> {
    let mut out = ClauseSet::new();
    if mode == GuardMode::None {
        return Ok(out);
    }
    let x0 = rt.x0();
    let step = rt.b.mul(&x0).expect("conforming").sub(&x0).expect("same shape");
    let params = rt.param_symbols();
    let mut any_disjuncts = Vec::new();
    let mut first_dead = None;
    for v in targets {
        let Some(row) = rt.row_of(v) else {
            continue;
        };
        if rt.constant_var.as_ref() == Some(v) {
            continue;
        }
        let diff = step.get(row, 0);
        let parts: Vec<Constraint> = if params.is_empty() {
            if diff.is_zero() {
                Vec::new()
            } else {
                vec![Constraint::neq0(diff)]
            }
        } else {
            diff.collect_by(&params).values().map(Constraint::neq0).collect()
        };
        let parts: Vec<Constraint> = parts.into_iter().filter(|c| c.constant_truth() != Some(false)).collect();
        if parts.is_empty() {
            first_dead.get_or_insert_with(|| v.name().to_string());
            if mode == GuardMode::NonconstantAll {
                return Err(PcpError::UnsatisfiableGuard(v.name().to_string()));
            }
            continue;
        }
        match mode {
            GuardMode::NonconstantAll => {
                out.push(Clause { disjuncts: parts });
            }
            GuardMode::NonconstantAny => any_disjuncts.extend(parts),
            GuardMode::None => unreachable!(),
        }
    }
    if mode == GuardMode::NonconstantAny {
        match Clause::any(any_disjuncts) {
            Some(c) => {
                out.push(c);
            }
            None => {
                if let Some(name) = first_dead {
                    return Err(PcpError::UnsatisfiableGuard(name));
                }
            }
        }
    }
    Ok(out)
}

/// Restrictions on the spectrum of `B`, off by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumGuards {
    /// Every eigenvalue occurs in the closed form of every guarded variable.
    pub visible_roots: bool,
    /// No eigenvalue is 1 or -1, so no guarded variable has a periodic part.
    pub aperiodic: bool,
}

pub fn spectrum_constraints(rt: &RecurrenceTemplate, cft: &ClosedFormTemplate, guards: SpectrumGuards, targets: &[VarId]) -> ClauseSet {
    let mut out = ClauseSet::new();
    if guards.visible_roots {
        for v in targets {
            let Some(row) = rt.row_of(v) else {
                continue;
            };
            if rt.constant_var.as_ref() == Some(v) {
                continue;
            }
            for per_root in &cft.coeffs {
                let parts: Vec<Constraint> = per_root
                    .iter()
                    .flat_map(|c| (0..c.cols()).map(move |k| c.get(row, k).clone()))
                    .filter(|p| !p.is_zero())
                    .map(|p| Constraint::neq0(&p))
                    .collect();
                if let Some(c) = Clause::any(parts) {
                    out.push(c);
                } else {
                    out.push(Clause::unit(Constraint::neq0(&Polynomial::zero())));
                }
            }
        }
    }
    if guards.aperiodic {
        for w in &cft.roots {
            let w = Polynomial::var(w.clone());
            out.push_neq0(&(&w - &Polynomial::one()));
            out.push_neq0(&(&w + &Polynomial::one()));
        }
    }
    out
}

/// Sizes of the four families, in the order roots, init, coeff, alg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilySizes {
    pub roots: usize,
    pub init: usize,
    pub coeff: usize,
    pub alg: usize,
    pub guards: usize,
}

/// The full problem for one configuration.
#[derive(Debug, Clone)]
pub struct AssembledPcp {
    pub clauses: ClauseSet,
    pub sizes: FamilySizes,
}

/// Unites the four families and the guards. With parameters the union is
/// decomposed over them. Guards apply to `guard_targets`, or to the loop
/// variables the invariant reads when `None`.
pub fn assemble(
    spec: &InvariantSpec,
    rt: &RecurrenceTemplate,
    cft: &ClosedFormTemplate,
    guard_mode: GuardMode,
    guard_targets: Option<&[VarId]>,
) -> Result<AssembledPcp, PcpError> {
    assemble_with(spec, rt, cft, guard_mode, guard_targets, SpectrumGuards::default())
}

/// [`assemble`] with spectrum restrictions; they count as guards.
pub fn assemble_with(
    spec: &InvariantSpec,
    rt: &RecurrenceTemplate,
    cft: &ClosedFormTemplate,
    guard_mode: GuardMode,
    guard_targets: Option<&[VarId]>,
    spectrum: SpectrumGuards,
) -> Result<AssembledPcp, PcpError> {
    if spec.polys.is_empty() {
        return Err(PcpError::EmptyInvariant);
    }
    let params = rt.param_symbols();
    let roots = roots_constraints(rt, cft);
    let init = decompose_params(&init_constraints(rt, cft), &params);
    let coeff = coeff_constraints(rt, cft);
    let alg = decompose_params(&alg_constraints(spec, rt, cft)?, &params);
    let mentioned;
    let targets = match guard_targets {
        Some(t) => t,
        None => {
            mentioned = spec.mentioned_vars();
            &mentioned
        }
    };
    let mut guards = guard_constraints(rt, guard_mode, targets)?;
    guards.extend(spectrum_constraints(rt, cft, spectrum, targets));
    let sizes = FamilySizes {
        roots: roots.len(),
        init: init.len(),
        coeff: coeff.len(),
        alg: alg.len(),
        guards: guards.len(),
    };
    let mut clauses = ClauseSet::new();
    for family in [roots, init, coeff, alg, guards] {
        clauses.extend(family);
    }
    Ok(AssembledPcp { clauses, sizes })
}
