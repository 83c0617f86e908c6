//! Symbolic recurrence templates and their closed forms.
//!
//! A template fixes the size `s` of the system, the shape of the update
//! matrix `B`, the multiplicities of its eigenvalues (an integer partition of
//! `s`) and the assignment of program variables to rows. Everything else is
//! a fresh unknown.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::poly::{fresh_scope, PolyMatrix, Polynomial, Rational, VarId, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("a recurrence system needs at least one variable")]
    EmptySystem,
    #[error("partition {partition} does not sum to the system size {size}")]
    PartitionMismatch { partition: IntegerPartition, size: usize },
    #[error("variable order has {got} entries, expected {size}")]
    VarOrderMismatch { got: usize, size: usize },
    #[error("parameter `{0}` is not attached to a program variable of the system")]
    UnknownParam(String),
}

/// Eigenvalue multiplicities `m_1 >= ... >= m_t`, all positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IntegerPartition(Vec<u32>);

impl IntegerPartition {
    /// Sorts the parts into non-increasing order. Returns `None` if any part is zero
    /// or the list is empty.
    pub fn new(mut parts: Vec<u32>) -> Option<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return None;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Some(IntegerPartition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> usize {
        self.0.iter().map(|&m| m as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

/// Lazily enumerates the partitions of `s` in descending lexicographic order,
/// starting with `[s]`.
#[derive(Debug, Clone)]
pub struct Partitions {
    next: Option<Vec<u32>>,
}

impl Iterator for Partitions {
    type Item = IntegerPartition;

    fn next(&mut self) -> Option<IntegerPartition> {
        let current = self.next.take()?;
        // Successor: drop trailing ones, decrement the last part > 1 and
        // refill with parts no larger than it.
        let mut succ = current.clone();
        let mut ones = 0u32;
        while succ.last() == Some(&1) {
            succ.pop();
            ones += 1;
        }
        if let Some(last) = succ.pop() {
            let k = last - 1;
            let mut rest = ones + 1;
            succ.push(k);
            while rest > 0 {
                let part = rest.min(k);
                succ.push(part);
                rest -= part;
            }
            self.next = Some(succ);
        }
        Some(IntegerPartition(current))
    }
}

pub fn int_partitions(s: usize) -> Result<Partitions, RecurrenceError> {
    if s == 0 {
        return Err(RecurrenceError::EmptySystem);
    }
    Ok(Partitions {
        next: Some(vec![s as u32]),
    })
}

/// Structural restriction on the update matrix `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixShape {
    Full,
    UpperTriangular,
    UpperUnitriangular,
}

impl MatrixShape {
    /// Cheapest first.
    pub const ALL: [MatrixShape; 3] = [MatrixShape::UpperUnitriangular, MatrixShape::UpperTriangular, MatrixShape::Full];

    /// Whether variable order can matter for this shape.
    pub fn is_order_sensitive(self) -> bool {
        !matches!(self, MatrixShape::Full)
    }
}

impl fmt::Display for MatrixShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixShape::Full => "full",
            MatrixShape::UpperTriangular => "upper",
            MatrixShape::UpperUnitriangular => "unitriangular",
        })
    }
}

/// A program variable whose initial value stays symbolic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Parameter {
    /// The loop variable.
    pub var: VarId,
    /// The symbol standing for its initial value.
    pub symbol: VarId,
}

/// `X_{n+1} = B X_n`, `X_0 = A X̊` where `X̊ = (params..., 1)`.
#[derive(Debug, Clone)]
pub struct RecurrenceTemplate {
    pub size: usize,
    pub shape: MatrixShape,
    pub b: PolyMatrix,
    /// `s x (r+1)`; a single column when there are no parameters.
    pub a: PolyMatrix,
    pub params: Vec<Parameter>,
    /// Variable assigned to each row.
    pub var_order: Vec<VarId>,
    /// Auxiliary variable pinned to the constant 1, if any.
    pub constant_var: Option<VarId>,
    pub a_vars: Vec<VarId>,
    pub b_vars: Vec<VarId>,
    pub scope: u32,
}

impl RecurrenceTemplate {
    /// `X̊ = (x̊_1, ..., x̊_r, 1)` as a column.
    pub fn param_vector(&self) -> PolyMatrix {
        let mut v: Vec<Polynomial> = self.params.iter().map(|p| Polynomial::var(p.symbol.clone())).collect();
        v.push(Polynomial::one());
        PolyMatrix::column(v)
    }

    /// The initial state `A X̊`.
    pub fn x0(&self) -> PolyMatrix {
        self.a.mul(&self.param_vector()).expect("A and X̊ conform by construction")
    }

    pub fn row_of(&self, v: &VarId) -> Option<usize> {
        self.var_order.iter().position(|w| w == v)
    }

    pub fn param_symbols(&self) -> Vec<VarId> {
        self.params.iter().map(|p| p.symbol.clone()).collect()
    }

    pub fn is_parameterized(&self) -> bool {
        !self.params.is_empty()
    }

    /// Looks up a template unknown by its name.
    pub fn symbol(&self, name: &str) -> Option<VarId> {
        self.a_vars.iter().chain(&self.b_vars).find(|v| v.name() == name).cloned()
    }
}

/// `X_n = sum_i sum_j C_ij X̊ omega_i^n n^(j-1)`.
#[derive(Debug, Clone)]
pub struct ClosedFormTemplate {
    pub roots: Vec<VarId>,
    /// One marker per root standing for `omega_i^n`.
    pub markers: Vec<VarId>,
    pub n: VarId,
    pub mults: IntegerPartition,
    /// `coeffs[i][j]` is `C_{i+1, j+1}`, of shape `s x (r+1)`.
    pub coeffs: Vec<Vec<PolyMatrix>>,
    pub c_vars: Vec<VarId>,
    param_vector: PolyMatrix,
}

/// Where to evaluate a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormPoint {
    /// Symbolic `n`, exponentials kept as markers.
    Symbolic,
    /// Concrete `n = k`; `omega^k` is expanded.
    At(u32),
    /// Symbolic `n + k`.
    Shifted(u32),
}

impl ClosedFormTemplate {
    /// The column `C_ij X̊`.
    pub fn coeff_column(&self, i: usize, j: usize) -> PolyMatrix {
        self.coeffs[i][j].mul(&self.param_vector).expect("C_ij and X̊ conform by construction")
    }

    pub fn symbol(&self, name: &str) -> Option<VarId> {
        self.c_vars.iter().chain(&self.roots).find(|v| v.name() == name).cloned()
    }
}

/// Builds the recurrence and closed-form templates for one configuration.
///
/// `var_order` lists the system variables row by row; `params` must refer to
/// variables in it. Every call draws its unknowns from a fresh scope.
pub fn build_templates(
    shape: MatrixShape,
    partition: &IntegerPartition,
    params: &[Parameter],
    var_order: &[VarId],
    constant_var: Option<&VarId>,
) -> Result<(RecurrenceTemplate, ClosedFormTemplate), RecurrenceError> {
    let s = var_order.len();
    if s == 0 {
        return Err(RecurrenceError::EmptySystem);
    }
    if partition.sum() != s {
        return Err(RecurrenceError::PartitionMismatch {
            partition: partition.clone(),
            size: s,
        });
    }
    let param_rows: Vec<usize> = params
        .iter()
        .map(|p| var_order.iter().position(|v| *v == p.var).ok_or_else(|| RecurrenceError::UnknownParam(p.symbol.name().to_string())))
        .collect::<Result<_, _>>()?;
    let const_row = constant_var.and_then(|c| var_order.iter().position(|v| v == c));
    let scope = fresh_scope();
    let sym = |name: String, kind| VarId::scoped(name, kind, scope);

    let mut b_vars = Vec::new();
    let b = PolyMatrix::from_fn(s, s, |i, j| {
        if Some(i) == const_row {
            return if i == j { Polynomial::one() } else { Polynomial::zero() };
        }
        match shape {
            MatrixShape::UpperTriangular | MatrixShape::UpperUnitriangular if i > j => return Polynomial::zero(),
            MatrixShape::UpperUnitriangular if i == j => return Polynomial::one(),
            _ => {}
        }
        let v = sym(format!("b{}_{}", i + 1, j + 1), VarKind::EntryB);
        b_vars.push(v.clone());
        Polynomial::var(v)
    });

    let r = params.len();
    let mut a_vars = Vec::new();
    let a = PolyMatrix::from_fn(s, r + 1, |i, j| {
        if Some(i) == const_row {
            return if j == r { Polynomial::one() } else { Polynomial::zero() };
        }
        if let Some(k) = param_rows.iter().position(|&row| row == i) {
            return if k == j { Polynomial::one() } else { Polynomial::zero() };
        }
        let name = if r == 0 { format!("a{}", i + 1) } else { format!("a{}_{}", i + 1, j + 1) };
        let v = sym(name, VarKind::EntryA);
        a_vars.push(v.clone());
        Polynomial::var(v)
    });

    let t = partition.len();
    let roots: Vec<VarId> = (1..=t).map(|i| sym(format!("w{i}"), VarKind::RootOmega)).collect();
    let markers: Vec<VarId> = (1..=t).map(|i| sym(format!("w{i}^n"), VarKind::ExpMarker)).collect();
    let n = sym("n".to_string(), VarKind::IterationN);
    let mut c_vars = Vec::new();
    let mut coeffs = Vec::with_capacity(t);
    for (i, &m) in partition.parts().iter().enumerate() {
        let mut per_root = Vec::with_capacity(m as usize);
        for j in 0..m as usize {
            per_root.push(PolyMatrix::from_fn(s, r + 1, |row, col| {
                let name = if r == 0 {
                    format!("c{}_{}_{}", i + 1, j + 1, row + 1)
                } else {
                    format!("c{}_{}_{}_{}", i + 1, j + 1, row + 1, col + 1)
                };
                let v = sym(name, VarKind::CoeffC);
                c_vars.push(v.clone());
                Polynomial::var(v)
            }));
        }
        coeffs.push(per_root);
    }

    let rt = RecurrenceTemplate {
        size: s,
        shape,
        b,
        a,
        params: params.to_vec(),
        var_order: var_order.to_vec(),
        constant_var: const_row.map(|k| var_order[k].clone()),
        a_vars,
        b_vars,
        scope,
    };
    let cft = ClosedFormTemplate {
        roots,
        markers,
        n,
        mults: partition.clone(),
        coeffs,
        c_vars,
        param_vector: rt.param_vector(),
    };
    Ok((rt, cft))
}

/// Evaluates the closed form at `point`, one polynomial per row.
pub fn closed_form_column(cft: &ClosedFormTemplate, point: ClosedFormPoint) -> PolyMatrix {
    let s = cft.coeffs[0][0].rows();
    let mut col = vec![Polynomial::zero(); s];
    let n = Polynomial::var(cft.n.clone());
    for (i, per_root) in cft.coeffs.iter().enumerate() {
        let omega = Polynomial::var(cft.roots[i].clone());
        let marker = Polynomial::var(cft.markers[i].clone());
        let factor = match point {
            ClosedFormPoint::Symbolic => marker,
            ClosedFormPoint::At(k) => omega.pow(k),
            ClosedFormPoint::Shifted(k) => &marker * &omega.pow(k),
        };
        for j in 0..per_root.len() {
            let npow = match point {
                ClosedFormPoint::Symbolic => n.pow(j as u32),
                ClosedFormPoint::At(k) => Polynomial::constant(Rational::from_int(k as i64).pow(j as u32)),
                ClosedFormPoint::Shifted(k) => (&n + &Polynomial::int(k as i64)).pow(j as u32),
            };
            let weight = &factor * &npow;
            let cij = cft.coeff_column(i, j);
            for (row, acc) in col.iter_mut().enumerate() {
                let e = cij.get(row, 0);
                if !e.is_zero() {
                    *acc = &*acc + &(e * &weight);
                }
            }
        }
    }
    PolyMatrix::column(col)
}

/// Bindings that turn a symbolic closed form at `n = k` into the concrete one:
/// each marker `omega_i^n` becomes `omega_i^k` and `n` becomes `k`.
pub fn instantiate_n(cft: &ClosedFormTemplate, k: u32) -> HashMap<VarId, Polynomial> {
    let mut b: HashMap<VarId, Polynomial> = cft
        .markers
        .iter()
        .zip(&cft.roots)
        .map(|(m, w)| (m.clone(), Polynomial::var(w.clone()).pow(k)))
        .collect();
    b.insert(cft.n.clone(), Polynomial::int(k as i64));
    b
}

/// Lexicographic permutations of `items`, optionally truncated to `limit`.
#[derive(Debug, Clone)]
pub struct Permutations<T> {
    items: Vec<T>,
    idx: Option<Vec<usize>>,
    remaining: Option<usize>,
}

impl<T: Clone> Iterator for Permutations<T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        if self.remaining == Some(0) {
            return None;
        }
        let idx = self.idx.take()?;
        let out: Vec<T> = idx.iter().map(|&i| self.items[i].clone()).collect();
        let mut succ = idx;
        // Standard next-permutation on the index vector.
        let n = succ.len();
        let mut has_next = false;
        if n > 1 {
            let mut i = n - 1;
            while i > 0 && succ[i - 1] >= succ[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while succ[j] <= succ[i - 1] {
                    j -= 1;
                }
                succ.swap(i - 1, j);
                succ[i..].reverse();
                has_next = true;
            }
        }
        if has_next {
            self.idx = Some(succ);
        }
        if let Some(r) = self.remaining.as_mut() {
            *r -= 1;
        }
        Some(out)
    }
}

pub fn var_permutations<T: Clone>(items: &[T], limit: Option<usize>) -> Permutations<T> {
    Permutations {
        items: items.to_vec(),
        idx: Some((0..items.len()).collect()),
        remaining: limit,
    }
}

/// Orderings worth trying for `shape`: the full shape is invariant under
/// reordering, so only the given order is produced for it.
pub fn permutations_for_shape<T: Clone>(shape: MatrixShape, items: &[T], limit: Option<usize>) -> Permutations<T> {
    if shape.is_order_sensitive() {
        var_permutations(items, limit)
    } else {
        var_permutations(items, Some(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(s: usize) -> Vec<Vec<u32>> {
        int_partitions(s).unwrap().map(|p| p.parts().to_vec()).collect()
    }

    #[test]
    fn partitions_of_small_numbers() {
        assert_eq!(parts(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(parts(1), vec![vec![1]]);
        assert_eq!(parts(4), vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
        assert!(matches!(int_partitions(0), Err(RecurrenceError::EmptySystem)));
    }

    #[test]
    fn permutations_lexicographic() {
        let p: Vec<_> = var_permutations(&["x", "y"], None).collect();
        assert_eq!(p, vec![vec!["x", "y"], vec!["y", "x"]]);
        assert_eq!(var_permutations(&[1, 2, 3, 4], None).count(), 24);
        assert_eq!(var_permutations(&[1, 2, 3, 4], Some(5)).count(), 5);
        assert_eq!(permutations_for_shape(MatrixShape::Full, &[1, 2, 3], None).count(), 1);
        assert_eq!(var_permutations::<u8>(&[], None).count(), 1);
    }

    fn xy() -> Vec<VarId> {
        vec![VarId::program("x"), VarId::program("y")]
    }

    #[test]
    fn unitriangular_shape_is_baked_in() {
        let p = IntegerPartition::new(vec![2]).unwrap();
        let (rt, _) = build_templates(MatrixShape::UpperUnitriangular, &p, &[], &xy(), None).unwrap();
        assert_eq!(rt.b.get(0, 0), &Polynomial::one());
        assert_eq!(rt.b.get(1, 0), &Polynomial::zero());
        assert_eq!(rt.b.get(1, 1), &Polynomial::one());
        assert_eq!(rt.b.get(0, 1).to_string(), "b1_2");
        assert_eq!(rt.b_vars.len(), 1);
    }

    #[test]
    fn full_template_counts() {
        let p = IntegerPartition::new(vec![2]).unwrap();
        let (rt, cft) = build_templates(MatrixShape::Full, &p, &[], &xy(), None).unwrap();
        assert_eq!(rt.b_vars.len(), 4);
        assert_eq!(rt.a_vars.len(), 2);
        assert_eq!(cft.roots.len(), 1);
        assert_eq!(cft.c_vars.len(), 4);
    }

    #[test]
    fn partition_mismatch_rejected() {
        let p = IntegerPartition::new(vec![2, 1]).unwrap();
        assert!(matches!(
            build_templates(MatrixShape::Full, &p, &[], &xy(), None),
            Err(RecurrenceError::PartitionMismatch { .. })
        ));
    }

    #[test]
    fn parameterized_initializer_rows() {
        let vars: Vec<VarId> = ["x1", "x2", "x3"].iter().map(|n| VarId::program(*n)).collect();
        let params = vec![
            Parameter { var: vars[0].clone(), symbol: VarId::new("x10", VarKind::InitialParam) },
            Parameter { var: vars[2].clone(), symbol: VarId::new("x30", VarKind::InitialParam) },
        ];
        let p = IntegerPartition::new(vec![3]).unwrap();
        let (rt, cft) = build_templates(MatrixShape::Full, &p, &params, &vars, None).unwrap();
        assert_eq!(rt.a.shape(), (3, 3));
        assert_eq!(rt.a.row(0), &[Polynomial::one(), Polynomial::zero(), Polynomial::zero()]);
        assert_eq!(rt.a.row(2), &[Polynomial::zero(), Polynomial::one(), Polynomial::zero()]);
        assert_eq!(rt.a_vars.len(), 3);
        assert_eq!(cft.coeffs[0][0].shape(), (3, 3));
        assert_eq!(rt.x0().get(0, 0), &Polynomial::var(params[0].symbol.clone()));
    }

    #[test]
    fn constant_variable_is_pinned() {
        let vars = vec![VarId::program("a"), VarId::program("one")];
        let p = IntegerPartition::new(vec![2]).unwrap();
        let (rt, _) = build_templates(MatrixShape::Full, &p, &[], &vars, Some(&vars[1])).unwrap();
        assert_eq!(rt.b.row(1), &[Polynomial::zero(), Polynomial::one()]);
        assert_eq!(rt.a.get(1, 0), &Polynomial::one());
        assert_eq!(rt.b_vars.len(), 2);
    }

    #[test]
    fn fresh_symbols_per_call() {
        let p = IntegerPartition::new(vec![2]).unwrap();
        let (r1, c1) = build_templates(MatrixShape::Full, &p, &[], &xy(), None).unwrap();
        let (r2, c2) = build_templates(MatrixShape::Full, &p, &[], &xy(), None).unwrap();
        assert!(r1.b_vars.iter().all(|v| !r2.b_vars.contains(v)));
        assert!(c1.roots.iter().all(|v| !c2.roots.contains(v)));
    }
}
