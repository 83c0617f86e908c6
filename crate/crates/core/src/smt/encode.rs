//! SMT-LIB 2 text for a clause set.

use std::fmt::Write;

use crate::pcp::{Clause, ClauseSet, Constraint, Relation};
use crate::poly::{Polynomial, Rational, VarId};

/// Plain symbols pass through; anything else is quoted with `|...|`.
pub fn symbol(v: &VarId) -> String {
    let name = v.name();
    let simple = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "_.".contains(c));
    if simple && !is_reserved(name) {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(
        name,
        "and" | "or" | "not" | "ite" | "let" | "true" | "false" | "exists" | "forall" | "distinct" | "as" | "par" | "_"
    )
}

/// Exact literal: `3`, `(- 3)`, `(/ 1 2)`, `(- (/ 1 2))`.
pub fn rational_literal(c: &Rational) -> String {
    let abs = c.abs();
    let body = if abs.is_integer() {
        format!("{}.0", abs.numer())
    } else {
        format!("(/ {}.0 {}.0)", abs.numer(), abs.denom())
    };
    if c.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

pub fn polynomial_term(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0.0".into();
    }
    let mut terms: Vec<String> = Vec::with_capacity(p.num_terms());
    for (m, c) in p.terms().rev() {
        let mut factors: Vec<String> = Vec::new();
        if !c.is_one() || m.is_one() {
            factors.push(rational_literal(c));
        }
        for (v, e) in m.iter() {
            let s = symbol(v);
            for _ in 0..e {
                factors.push(s.clone());
            }
        }
        terms.push(if factors.len() == 1 {
            factors.pop().unwrap_or_default()
        } else {
            format!("(* {})", factors.join(" "))
        });
    }
    if terms.len() == 1 {
        terms.pop().unwrap_or_default()
    } else {
        format!("(+ {})", terms.join(" "))
    }
}

fn constraint_term(c: &Constraint) -> String {
    let eq = format!("(= {} 0.0)", polynomial_term(&c.poly));
    match c.rel {
        Relation::Eq0 => eq,
        Relation::Neq0 => format!("(not {eq})"),
    }
}

pub fn clause_term(c: &Clause) -> String {
    if c.is_unit() {
        constraint_term(&c.disjuncts[0])
    } else {
        let parts: Vec<String> = c.disjuncts.iter().map(constraint_term).collect();
        format!("(or {})", parts.join(" "))
    }
}

/// The full script: logic, declarations, assertions, `check-sat`, `get-model`.
pub fn encode(cs: &ClauseSet) -> String {
    encode_with(cs, &[])
}

/// Like [`encode`], with extra assertions (already in SMT-LIB syntax) appended.
pub fn encode_with(cs: &ClauseSet, extra_assertions: &[String]) -> String {
    let mut out = String::new();
    out.push_str("(set-option :produce-models true)\n");
    out.push_str("(set-logic QF_NRA)\n");
    for v in cs.free_vars() {
        let _ = writeln!(out, "(declare-const {} Real)", symbol(v));
    }
    for c in cs.clauses() {
        let _ = writeln!(out, "(assert {})", clause_term(c));
    }
    for a in extra_assertions {
        let _ = writeln!(out, "(assert {a})");
    }
    out.push_str("(check-sat)\n(get-model)\n(exit)\n");
    out
}
