//! Repairing a buggy loop: the oracle rejects a loop whose `m` grows by 9,
//! accepts the corrected one, and synthesis proposes its own.

use loopsynth::cli::{parse_invariant, InvariantSource};
use loopsynth::poly::VarId;
use loopsynth::synth::{synthesize, SynthesisProblem};
use loopsynth::verify::{verify_complete, ConcreteLoop};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut src = InvariantSource::new("c == n^3 && k == 3*n^2 + 3*n + 1 && m == 6*n + 6");
    src.declared_vars = Some(["c", "k", "m", "n"].map(String::from).to_vec());
    let spec = parse_invariant(&src)?.spec;

    let vars: Vec<VarId> = ["c", "k", "m", "n", "one"].into_iter().map(VarId::program).collect();
    let buggy = ConcreteLoop::from_ints(
        &vars,
        &[&[1, 1, 0, 0, 0], &[0, 1, 1, 0, 0], &[0, 0, 1, 0, 9], &[0, 0, 0, 1, 1], &[0, 0, 0, 0, 1]],
        &[0, 0, 0, 0, 1],
    )?;
    let fixed = ConcreteLoop::from_ints(
        &vars,
        &[&[1, 1, 0, 0, 0], &[0, 1, 1, 0, 0], &[0, 0, 1, 0, 6], &[0, 0, 0, 1, 1], &[0, 0, 0, 0, 1]],
        &[0, 1, 6, 0, 1],
    )?;
    println!("buggy: {}", verify_complete(&buggy, &spec, 20).verdict);
    println!("fixed: {}", verify_complete(&fixed, &spec, 20).verdict);

    let mut problem = SynthesisProblem::new(spec);
    problem.fixed_order = true;
    let report = synthesize(&problem)?;
    match report.verified().next() {
        Some(sl) => println!("synthesized: {}", sl.data.exact().expect("exact")),
        None => println!("no loop found in {} configurations", report.configs.len()),
    }
    Ok(())
}
