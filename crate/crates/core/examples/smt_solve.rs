//! Encoding a hand-made clause set and solving it with an external solver.
//! Set `LOOPSYNTH_SOLVER` to point at a binary other than `z3` on the path.

use loopsynth::pcp::{Clause, ClauseSet, Constraint};
use loopsynth::poly::{Polynomial, VarId};
use loopsynth::smt::{encode, solve, SolveOutcome, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (x, y) = (VarId::program("x"), VarId::program("y"));
    let (px, py) = (Polynomial::var(x.clone()), Polynomial::var(y.clone()));
    let mut cs = ClauseSet::new();
    // x^2 = 2, y = x + 1, and x or y negative
    cs.push_eq0(&(&px.pow(2) - &Polynomial::int(2)));
    cs.push_eq0(&(&(&py - &px) - &Polynomial::one()));
    cs.push(Clause::any(vec![Constraint::neq0(&py), Constraint::neq0(&px)]).unwrap());
    println!("{}", encode(&cs));

    match solve(&cs, &SolverConfig::default())? {
        SolveOutcome::Sat(model) => {
            for (v, value) in model.assignments() {
                println!("{v} = {value}");
            }
        }
        other => println!("{}", other.label()),
    }
    Ok(())
}
