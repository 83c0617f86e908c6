//! The verification oracle on its own: symbolic unrolling up to the order
//! bound, a failing loop with its witness, and certificate replay.

use loopsynth::cli::{parse_invariant, InvariantSource};
use loopsynth::poly::{Rational, VarId};
use loopsynth::recurrence::Parameter;
use loopsynth::verify::{order_bound, verify_complete, Certificate, ConcreteLoop};

fn r(n: i64) -> Rational {
    Rational::from_int(n)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // eucliddiv: r, q, y = x0, 0, y0; r = r - y; q = q + 1
    let mut src = InvariantSource::new("x0 == y0*q + r");
    src.declared_vars = Some(["x", "y", "q", "r"].map(String::from).to_vec());
    src.declared_params = Some(vec!["x0".into(), "y0".into()]);
    let parsed = parse_invariant(&src)?;
    let vars: Vec<VarId> = ["x", "y", "q", "r", "one"].into_iter().map(VarId::program).collect();
    let params: Vec<Parameter> = parsed.params.clone();
    // Columns of A: x0, y0, constant.
    let a = vec![
        vec![r(1), r(0), r(0)],
        vec![r(0), r(1), r(0)],
        vec![r(0), r(0), r(0)],
        vec![r(1), r(0), r(0)],
        vec![r(0), r(0), r(1)],
    ];
    let b = vec![
        vec![r(1), r(0), r(0), r(0), r(0)],
        vec![r(0), r(1), r(0), r(0), r(0)],
        vec![r(0), r(0), r(1), r(0), r(1)],
        vec![r(0), r(-1), r(0), r(1), r(0)],
        vec![r(0), r(0), r(0), r(0), r(1)],
    ];
    let lp = ConcreteLoop::new(vars, b, a, params)?;
    println!("{lp}");
    println!("order bound {}", order_bound(&parsed.spec, lp.size()));
    let result = verify_complete(&lp, &parsed.spec, 20);
    println!("{}", result.verdict);

    let cert = Certificate::new(&lp, &parsed.spec, &result);
    println!("replays: {}", cert.replay(&lp));
    println!("{}", cert.to_json());

    // Dropping the counter breaks the invariant.
    let mut broken = lp.clone();
    broken.b[2][4] = r(0);
    broken.b[2][2] = r(2);
    println!("broken: {}", verify_complete(&broken, &parsed.spec, 20).verdict);
    Ok(())
}
