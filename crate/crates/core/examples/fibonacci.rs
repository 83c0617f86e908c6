//! Sequences from a relation between consecutive terms.
//!
//! `f1` stands for `f` one step ahead. Requiring both eigenvalues to show up
//! in `f` and excluding 1 and -1 leaves only loops whose `f` obeys
//! `f(n+2) = f(n+1) + f(n)`; the eigenvalues themselves are irrational.

use std::collections::BTreeMap;
use std::time::Duration;

use loopsynth::pcp::{InvariantSpec, SpectrumGuards};
use loopsynth::poly::{parse_polynomial, VarId};
use loopsynth::recurrence::{IntegerPartition, MatrixShape};
use loopsynth::synth::{synthesize, SynthesisProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (f, g, f1) = (VarId::program("f"), VarId::program("g"), VarId::program("f1"));
    let known = [f.clone(), f1.clone()];
    let p = parse_polynomial("f^4 + 2f^3*f1 - f^2*f1^2 - 2f*f1^3 + f1^4 - 1", |s| {
        known.iter().find(|v| v.name() == s).cloned().unwrap()
    })?;
    let shifted = BTreeMap::from([(f1, (f.clone(), 1))]);
    let spec = InvariantSpec::with_shifts(vec![p], vec![f, g], BTreeMap::new(), shifted)?;

    let mut problem = SynthesisProblem::new(spec);
    problem.size = 2;
    problem.shapes = vec![MatrixShape::Full];
    problem.partitions = Some(vec![IntegerPartition::new(vec![1, 1]).unwrap()]);
    problem.spectrum = SpectrumGuards { visible_roots: true, aperiodic: true };
    problem.solver.timeout_ms = Duration::from_secs(600).as_millis() as u64;
    problem.fixed_order = true;
    let report = synthesize(&problem)?;
    for sl in report.verified() {
        let lp = sl.data.exact().expect("verified loops are exact");
        println!("{lp}");
        let trace: Vec<String> = lp.trace(&[], 12).iter().map(|x| x[0].to_string()).collect();
        println!("f: {}", trace.join(", "));
        for e in &sl.eigenvalues {
            println!("eigenvalue {}", e.value);
        }
    }
    if !report.has_verified() {
        for c in &report.configs {
            println!("config {}: {}", c.index, c.status);
        }
    }
    Ok(())
}
