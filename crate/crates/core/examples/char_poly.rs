//! Characteristic polynomials of symbolic matrices and eigenvalue
//! multiplicity patterns.

use loopsynth::poly::{PolyMatrix, Polynomial, Rational, VarId};
use loopsynth::recurrence::int_partitions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = VarId::program("z");
    let fib = PolyMatrix::from_rational_rows(&[
        vec![Rational::from_int(1), Rational::from_int(1)],
        vec![Rational::from_int(1), Rational::from_int(0)],
    ])?;
    println!("fibonacci: {}", fib.char_poly(&z)?);

    // A generic 3x3 matrix of unknowns.
    let b = PolyMatrix::from_fn(3, 3, |i, j| Polynomial::var(VarId::program(format!("b{}_{}", i + 1, j + 1))));
    let chi = b.char_poly(&z)?;
    println!("generic 3x3 has {} terms, degree {}", chi.num_terms(), chi.total_degree());

    for s in 1..=6 {
        let shown: Vec<String> = int_partitions(s)?.map(|p| p.to_string()).collect();
        println!("s = {s}: {}", shown.join(" "));
    }
    Ok(())
}
