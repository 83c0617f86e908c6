//! Runs the benchmark invariants at their usual sizes, cheapest matrix shape
//! first, and prints one row per problem.

use std::time::Instant;

use loopsynth::cli::{parse_invariant, InvariantSource};
use loopsynth::synth::{synthesize, SynthesisProblem};

struct Bench {
    name: &'static str,
    invariant: &'static str,
    vars: &'static [&'static str],
    params: &'static [&'static str],
}

const BENCHES: &[Bench] = &[
    Bench { name: "square", invariant: "a == b^2", vars: &["a", "b"], params: &[] },
    Bench { name: "sum1", invariant: "1+2a == c && 4b == (c-1)^2", vars: &["a", "b", "c"], params: &[] },
    Bench { name: "intsqrt2", invariant: "a0+r == r^2+2y", vars: &["a", "y", "r"], params: &["a0"] },
    Bench { name: "eucliddiv", invariant: "x0 == y0*q+r", vars: &["x", "q", "r", "y"], params: &["x0", "y0"] },
    Bench {
        name: "intcbrt",
        invariant: "1/4+3r^2 == s && 1+4a0+6r^2 == 3r+4r^3+4x",
        vars: &["a", "x", "s", "r"],
        params: &["a0"],
    },
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<10} {:>2} {:>6} {:>6} {:>8}  loop", "name", "s", "clauses", "degree", "ms");
    for b in BENCHES {
        let src = InvariantSource {
            text: b.invariant.into(),
            declared_vars: Some(b.vars.iter().map(|s| s.to_string()).collect()),
            declared_params: Some(b.params.iter().map(|s| s.to_string()).collect()),
            shifts: Vec::new(),
        };
        let parsed = parse_invariant(&src)?;
        let mut problem = SynthesisProblem::new(parsed.spec);
        problem.params = parsed.params;
        problem.fixed_order = true;
        let start = Instant::now();
        let report = synthesize(&problem)?;
        let ms = start.elapsed().as_millis();
        let (clauses, degree) = report
            .configs
            .iter()
            .find(|c| c.status == "sat")
            .map_or((0, 0), |c| (c.constraints, c.max_degree));
        let found = report
            .verified()
            .next()
            .and_then(|sl| sl.data.exact())
            .map_or("none".to_string(), |lp| lp.to_string());
        println!("{:<10} {:>2} {:>6} {:>6} {:>8}  {found}", b.name, problem.size, clauses, degree, ms);
    }
    Ok(())
}
