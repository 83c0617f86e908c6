//! Solver models and their values.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use super::sexpr::SExpr;
use crate::poly::{Rational, VarId};

/// A value assigned by the solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelValue {
    Exact {
        value: Rational,
    },
    /// A value the solver reported symbolically, e.g. an algebraic number.
    /// `approx` is our own decimal reading of it, when we can produce one.
    AlgebraicOpaque {
        text: String,
        approx: Option<f64>,
    },
}

impl ModelValue {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            ModelValue::Exact { value } => Some(value),
            ModelValue::AlgebraicOpaque { .. } => None,
        }
    }

    pub fn approx(&self) -> Option<f64> {
        match self {
            ModelValue::Exact { value } => Some(value.to_f64()),
            ModelValue::AlgebraicOpaque { approx, .. } => *approx,
        }
    }
}

impl fmt::Display for ModelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelValue::Exact { value } => write!(f, "{value}"),
            ModelValue::AlgebraicOpaque { approx: Some(a), .. } => write!(f, "~{a:.6}"),
            ModelValue::AlgebraicOpaque { text, approx: None } => f.write_str(text),
        }
    }
}

/// An assignment to every free variable of a solved clause set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    assignments: BTreeMap<VarId, ModelValue>,
    /// Variables the solver left out of its model; they were set to 0.
    completed: Vec<VarId>,
}

impl Model {
    pub fn new(assignments: BTreeMap<VarId, ModelValue>) -> Self {
        Model {
            assignments,
            completed: Vec::new(),
        }
    }

    pub fn get(&self, v: &VarId) -> Option<&ModelValue> {
        self.assignments.get(v)
    }

    pub fn exact(&self, v: &VarId) -> Option<&Rational> {
        self.get(v)?.exact()
    }

    pub fn assignments(&self) -> &BTreeMap<VarId, ModelValue> {
        &self.assignments
    }

    pub fn completed(&self) -> &[VarId] {
        &self.completed
    }

    pub fn is_exact(&self) -> bool {
        self.assignments.values().all(|v| v.exact().is_some())
    }

    /// The exactly known part of the model.
    pub fn exact_values(&self) -> HashMap<VarId, Rational> {
        self.assignments
            .iter()
            .filter_map(|(k, v)| v.exact().map(|r| (k.clone(), r.clone())))
            .collect()
    }

    pub(crate) fn complete_with_zero(&mut self, v: VarId) {
        self.assignments.insert(
            v.clone(),
            ModelValue::Exact {
                value: Rational::zero(),
            },
        );
        self.completed.push(v);
    }
}

/// Reads a value term. Rational arithmetic on literals is folded exactly;
/// anything else is kept as text with a best-effort approximation.
pub fn read_value(e: &SExpr) -> ModelValue {
    match exact_value(e) {
        Some(value) => ModelValue::Exact { value },
        None => ModelValue::AlgebraicOpaque {
            text: e.to_string(),
            approx: approx_value(e),
        },
    }
}

fn literal(s: &str) -> Option<Rational> {
    let s = s.strip_suffix(".0").filter(|t| !t.is_empty() && !t.ends_with('.')).unwrap_or(s);
    if s.starts_with(|c: char| c.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

pub fn exact_value(e: &SExpr) -> Option<Rational> {
    match e {
        SExpr::Atom(s) => literal(s),
        SExpr::List(items) => {
            let (head, args) = items.split_first()?;
            let vals: Option<Vec<Rational>> = args.iter().map(exact_value).collect();
            let vals = vals?;
            match (head.as_atom()?, vals.as_slice()) {
                ("-", [a]) => Some(-a),
                ("-", [a, rest @ ..]) => Some(rest.iter().fold(a.clone(), |acc, x| &acc - x)),
                ("+", all) => Some(all.iter().fold(Rational::zero(), |acc, x| &acc + x)),
                ("*", all) => Some(all.iter().fold(Rational::one(), |acc, x| &acc * x)),
                ("/", [a, b]) if !b.is_zero() => Some(a / b),
                _ => None,
            }
        }
    }
}

/// Approximates `(root-obj p k)` (the `k`-th real root of `p`) and folds
/// arithmetic over approximable subterms.
pub fn approx_value(e: &SExpr) -> Option<f64> {
    if let Some(r) = exact_value(e) {
        return Some(r.to_f64());
    }
    let items = e.as_list()?;
    let head = items.first()?.as_atom()?;
    if head == "root-obj" {
        let poly = univariate(items.get(1)?)?;
        let k: usize = items.get(2)?.as_atom()?.parse().ok()?;
        let coeffs: Vec<f64> = poly.iter().map(Rational::to_f64).collect();
        return real_roots(&coeffs).get(k.checked_sub(1)?).copied();
    }
    let vals: Option<Vec<f64>> = items[1..].iter().map(approx_value).collect();
    let vals = vals?;
    match (head, vals.as_slice()) {
        ("-", [a]) => Some(-a),
        ("-", [a, rest @ ..]) => Some(rest.iter().fold(*a, |acc, x| acc - x)),
        ("+", all) => Some(all.iter().sum()),
        ("*", all) => Some(all.iter().product()),
        ("/", [a, b]) => Some(a / b),
        _ => None,
    }
}

/// Coefficients, lowest degree first, of a univariate term in any one symbol.
fn univariate(e: &SExpr) -> Option<Vec<Rational>> {
    fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
                let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
                &x + &y
            })
            .collect()
    }
    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        out
    }
    if let Some(c) = exact_value(e) {
        return Some(vec![c]);
    }
    match e {
        SExpr::Atom(_) => Some(vec![Rational::zero(), Rational::one()]),
        SExpr::List(items) => {
            let head = items.first()?.as_atom()?;
            if head == "^" {
                let base = univariate(items.get(1)?)?;
                let k: u32 = literal(items.get(2)?.as_atom()?)?.to_string().parse().ok()?;
                let mut acc = vec![Rational::one()];
                for _ in 0..k {
                    acc = mul(&acc, &base);
                }
                return Some(acc);
            }
            let args: Option<Vec<Vec<Rational>>> = items[1..].iter().map(univariate).collect();
            let args = args?;
            match (head, args.as_slice()) {
                ("+", all) => Some(all.iter().fold(vec![Rational::zero()], |acc, x| add(&acc, x))),
                ("*", all) => Some(all.iter().fold(vec![Rational::one()], |acc, x| mul(&acc, x))),
                ("-", [a]) => Some(a.iter().map(|c| -c).collect()),
                ("-", [a, rest @ ..]) => Some(rest.iter().fold(a.clone(), |acc, x| {
                    let neg: Vec<Rational> = x.iter().map(|c| -c).collect();
                    add(&acc, &neg)
                })),
                ("/", [a, b]) if b.len() == 1 && !b[0].is_zero() => Some(a.iter().map(|c| c / &b[0]).collect()),
                _ => None,
            }
        }
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Real roots in ascending order, by bisection between the critical points.
/// Coefficients are lowest degree first.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    if c.len() == 2 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[c.len() - 1];
    let bound = 1.0 + c[..c.len() - 1].iter().map(|x| (x / lead).abs()).fold(0.0, f64::max);
    let deriv: Vec<f64> = c.iter().enumerate().skip(1).map(|(i, x)| x * i as f64).collect();
    let mut points = vec![-bound];
    points.extend(real_roots(&deriv).into_iter().filter(|x| x.abs() < bound));
    points.push(bound);
    let scale = c.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|last| (r - last).abs() > 1e-9 * (1.0 + r.abs())) {
            roots.push(r);
        }
    };
    for w in points.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (horner(&c, a), horner(&c, b));
        if fa.abs() <= 1e-12 * scale {
            push(a, &mut roots);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let fm = horner(&c, m);
            if fm == 0.0 || m == a || m == b {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == horner(&c, a).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        push(0.5 * (a + b), &mut roots);
    }
    if let Some(&last) = points.last() {
        if horner(&c, last).abs() <= 1e-12 * scale {
            push(last, &mut roots);
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::super::sexpr::parse_all;
    use super::*;

    fn one(text: &str) -> SExpr {
        parse_all(text).unwrap().remove(0)
    }

    #[test]
    fn exact_forms() {
        assert_eq!(exact_value(&one("(/ 1.0 2.0)")), Some(Rational::new(1, 2)));
        assert_eq!(exact_value(&one("(- (/ 3.0 4.0))")), Some(Rational::new(-3, 4)));
        assert_eq!(exact_value(&one("(- 7)")), Some(Rational::from_int(-7)));
        assert_eq!(exact_value(&one("2.5")), Some(Rational::new(5, 2)));
        assert_eq!(exact_value(&one("x")), None);
    }

    #[test]
    fn golden_ratio_root_obj() {
        let v = read_value(&one("(root-obj (+ (^ x 2) (* (- 1) x) (- 1)) 2)"));
        let approx = v.approx().unwrap();
        assert!((approx - 1.618_033_988_749_895).abs() < 1e-12, "{approx}");
        assert!(v.exact().is_none());
        let v = read_value(&one("(root-obj (+ (^ x 2) (* (- 1) x) (- 1)) 1)"));
        assert!((v.approx().unwrap() + 0.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn double_roots_found_once() {
        // (x - 1)^2 (x + 2)
        let roots = real_roots(&[2.0, -3.0, 0.0, 1.0]);
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!((roots[0] + 2.0).abs() < 1e-9 && (roots[1] - 1.0).abs() < 1e-6);
    }
}
