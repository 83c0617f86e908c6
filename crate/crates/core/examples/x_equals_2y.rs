//! The smallest synthesis problem: loops keeping `x == 2*y`.
//!
//! Prints the four clause families for a 2x2 full matrix with a double
//! eigenvalue, then asks the solver for a loop of size 2.

use std::collections::BTreeMap;

use loopsynth::pcp::{alg_constraints, coeff_constraints, init_constraints, roots_constraints, InvariantSpec};
use loopsynth::poly::{parse_polynomial, VarId};
use loopsynth::recurrence::{build_templates, IntegerPartition, MatrixShape};
use loopsynth::synth::{synthesize, SynthesisProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (x, y) = (VarId::program("x"), VarId::program("y"));
    let vars = [x.clone(), y.clone()];
    let p = parse_polynomial("x - 2y", |s| vars.iter().find(|v| v.name() == s).cloned().unwrap())?;
    let spec = InvariantSpec::new(vec![p], vars.to_vec(), BTreeMap::new())?;

    let double = IntegerPartition::new(vec![2]).unwrap();
    let (rt, cft) = build_templates(MatrixShape::Full, &double, &[], &vars, None)?;
    println!("roots:\n{}", roots_constraints(&rt, &cft).to_text());
    println!("coeff:\n{}", coeff_constraints(&rt, &cft).to_text());
    println!("init:\n{}", init_constraints(&rt, &cft).to_text());
    println!("alg:\n{}", alg_constraints(&spec, &rt, &cft)?.to_text());

    let mut problem = SynthesisProblem::new(spec);
    problem.size = 2;
    let report = synthesize(&problem)?;
    for sl in report.verified() {
        println!("{}", sl.data.exact().expect("verified loops are exact"));
    }
    Ok(())
}
