//! Builds the constraint problem for one configuration and writes it out as
//! text, JSON and an SMT-LIB script, without calling a solver.

use loopsynth::cli::{parse_invariant, InvariantSource};
use loopsynth::pcp::{assemble, GuardMode};
use loopsynth::poly::VarId;
use loopsynth::recurrence::{build_templates, IntegerPartition, MatrixShape};
use loopsynth::smt::encode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "a == b^2".into());
    let parsed = parse_invariant(&InvariantSource::new(text))?;
    let one = VarId::program("one");
    let mut order = parsed.spec.program_vars.clone();
    order.push(one.clone());

    let single = IntegerPartition::new(vec![order.len() as u32]).unwrap();
    let (rt, cft) = build_templates(MatrixShape::UpperUnitriangular, &single, &parsed.params, &order, Some(&one))?;
    let pcp = assemble(&parsed.spec, &rt, &cft, GuardMode::NonconstantAll, None)?;
    println!("{:?}", pcp.sizes);
    println!("{} clauses, max degree {}\n", pcp.clauses.len(), pcp.clauses.max_degree());
    println!("{}", pcp.clauses.to_text());
    println!("{}", pcp.clauses.to_json());
    println!("{}", encode(&pcp.clauses));
    Ok(())
}
