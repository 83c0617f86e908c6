//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use loopsynth::cli::{parse_invariant, InvariantSource, ParsedInvariant};
use loopsynth::poly::{Monomial, PolyMatrix, Polynomial, Rational, VarId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero();
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = entry * &cofactor_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `det(z I - B)` the slow way.
pub fn cofactor_char_poly(b: &PolyMatrix, z: &VarId) -> Polynomial {
    let n = b.rows();
    let zp = Polynomial::var(z.clone());
    let rows: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = -b.get(i, j);
                    if i == j {
                        &e + &zp
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    cofactor_det(&rows)
}

/// Number of partitions of `s` by the recursion on the largest part.
pub fn partition_count(s: u32) -> usize {
    fn count(rest: u32, max: u32) -> usize {
        if rest == 0 {
            return 1;
        }
        (1..=max.min(rest)).map(|k| count(rest - k, k)).sum()
    }
    count(s, s)
}

/// All multisets of positive integers summing to `s`, by brute force over
/// compositions.
pub fn brute_force_partitions(s: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = Vec::new();
    // Every composition of s corresponds to a subset of the s-1 gaps.
    for mask in 0u32..(1 << (s - 1)) {
        let mut parts = Vec::new();
        let mut run = 1;
        for gap in 0..s - 1 {
            if mask & (1 << gap) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        if !out.contains(&parts) {
            out.push(parts);
        }
    }
    out
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.gen_range(-6i64..=6);
    let den = rng.gen_range(1i64..=4);
    Rational::new(num, den)
}

pub fn random_rational_matrix(rng: &mut ChaCha8Rng, n: usize) -> PolyMatrix {
    PolyMatrix::from_fn(n, n, |_, _| {
        if rng.gen_bool(0.25) {
            Polynomial::zero()
        } else {
            Polynomial::constant(small_rational(rng))
        }
    })
}

pub fn random_polynomial(rng: &mut ChaCha8Rng, vars: &[VarId], terms: usize, max_exp: u32) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..terms {
        let m = Monomial::from_pairs(vars.iter().map(|v| (v.clone(), rng.gen_range(0..=max_exp))));
        p = &p + &Polynomial::term(small_rational(rng), m);
    }
    p
}

pub fn spec(text: &str, vars: &[&str], params: &[&str]) -> ParsedInvariant {
    let src = InvariantSource {
        text: text.into(),
        declared_vars: Some(vars.iter().map(|s| s.to_string()).collect()),
        declared_params: Some(params.iter().map(|s| s.to_string()).collect()),
        shifts: Vec::new(),
    };
    parse_invariant(&src).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn r(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Whether a solver binary can be started; solver-backed tests are skipped
/// with a note otherwise.
pub fn solver_available() -> bool {
    let bin = std::env::var(loopsynth::smt::SOLVER_PATH_ENV).unwrap_or_else(|_| "z3".into());
    std::process::Command::new(bin).arg("-version").output().is_ok()
}

/// One benchmark from the appendix: its invariant, the variable order the
/// original loop is upper unitriangular in, and the original loop.
pub struct Benchmark {
    pub name: &'static str,
    pub invariant: &'static str,
    pub vars: &'static [&'static str],
    pub params: &'static [&'static str],
    pub size: usize,
    /// Rows over `vars` followed by `one`; `A` columns are params then constant.
    pub b: Vec<Vec<Rational>>,
    pub a: Vec<Vec<Rational>>,
}

fn rows(m: &[&[i64]]) -> Vec<Vec<Rational>> {
    m.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect()
}

pub fn benchmarks() -> Vec<Benchmark> {
    vec![
        Benchmark {
            name: "square",
            invariant: "a == b^2",
            vars: &["a", "b"],
            params: &[],
            size: 3,
            // a, b = 0, 0; a = a + 2b + 1; b = b + 1
            b: rows(&[&[1, 2, 1], &[0, 1, 1], &[0, 0, 1]]),
            a: rows(&[&[0], &[0], &[1]]),
        },
        Benchmark {
            name: "sum1",
            invariant: "1+2a == c && 4b == (c-1)^2",
            vars: &["a", "b", "c"],
            params: &[],
            size: 4,
            // a, b, c = 0, 0, 1; a = a + 1; b = b + c; c = c + 2
            b: rows(&[&[1, 0, 0, 1], &[0, 1, 1, 0], &[0, 0, 1, 2], &[0, 0, 0, 1]]),
            a: rows(&[&[0], &[0], &[1], &[1]]),
        },
        Benchmark {
            name: "intsqrt2",
            invariant: "a0+r == r^2+2y",
            vars: &["a", "y", "r"],
            params: &["a0"],
            size: 4,
            // y, r = 1/2 a0, 0; y = y - r; r = r + 1
            b: rows(&[&[1, 0, 0, 0], &[0, 1, -1, 0], &[0, 0, 1, 1], &[0, 0, 0, 1]]),
            a: vec![vec![r(1), r(0)], vec![q(1, 2), r(0)], vec![r(0), r(0)], vec![r(0), r(1)]],
        },
        Benchmark {
            name: "eucliddiv",
            invariant: "x0 == y0*q+r",
            vars: &["x", "q", "r", "y"],
            params: &["x0", "y0"],
            size: 5,
            // r, q, y = x0, 0, y0; r = r - y; q = q + 1
            b: rows(&[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 1], &[0, 0, 1, -1, 0], &[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1]]),
            a: rows(&[&[1, 0, 0], &[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        },
        Benchmark {
            name: "intcbrt",
            invariant: "1/4+3r^2 == s && 1+4a0+6r^2 == 3r+4r^3+4x",
            vars: &["a", "x", "s", "r"],
            params: &["a0"],
            size: 5,
            // x, r, s = a0, 1, 13/4; x = x - s; s = s + 6r + 3; r = r + 1
            b: rows(&[&[1, 0, 0, 0, 0], &[0, 1, -1, 0, 0], &[0, 0, 1, 6, 3], &[0, 0, 0, 1, 1], &[0, 0, 0, 0, 1]]),
            a: vec![
                vec![r(1), r(0)],
                vec![r(1), r(0)],
                vec![r(0), q(13, 4)],
                vec![r(0), r(1)],
                vec![r(0), r(1)],
            ],
        },
    ]
}

/// The system variables of a benchmark: its loop variables and `one`.
pub fn system_vars(b: &Benchmark) -> Vec<VarId> {
    b.vars.iter().map(|v| VarId::program(*v)).chain([VarId::program("one")]).collect()
}

pub fn env_map<'a>(vars: &'a [VarId], values: &[Rational]) -> BTreeMap<&'a str, Rational> {
    vars.iter().map(|v| v.name()).zip(values.iter().cloned()).collect()
}
