//! Recurrence and closed-form templates for one configuration.

use loopsynth::poly::VarId;
use loopsynth::recurrence::{build_templates, closed_form_column, ClosedFormPoint, IntegerPartition, MatrixShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = [VarId::program("x"), VarId::program("y"), VarId::program("z")];
    for parts in [vec![3], vec![2, 1], vec![1, 1, 1]] {
        let partition = IntegerPartition::new(parts).unwrap();
        let (rt, cft) = build_templates(MatrixShape::UpperTriangular, &partition, &[], &vars, None)?;
        println!("partition {partition}: {} unknowns in B, {} in A, {} coefficients", rt.b_vars.len(), rt.a_vars.len(), cft.c_vars.len());
        let col = closed_form_column(&cft, ClosedFormPoint::Symbolic);
        for (v, e) in vars.iter().zip(col.entries()) {
            println!("  {v}(n) = {e}");
        }
    }
    Ok(())
}
