//! Orthonormal polynomials for the virial weight, by Gram–Schmidt and by the
//! three-term recurrence.

use std::io;
use std::sync::Arc;

use virial_ansatz::orthopoly::{gram_schmidt, three_term};
use virial_ansatz::potentials::PotentialSpec;
use virial_ansatz::virial::VirialWeight;
use virial_ansatz::Result;

fn main() -> Result<()> {
    let weight = Arc::new(VirialWeight::new(&PotentialSpec::monomial(2, 1.0))?);
    let gs = gram_schmidt(weight.clone(), 6)?;
    let tt = three_term(weight, 6)?;
    println!("orthonormality defect: gram-schmidt {:.2e}, three-term {:.2e}", gs.orthonormality_defect()?, tt.orthonormality_defect()?);
    println!("recurrence b: {:?}", &tt.recurrence_b()[1..]);

    let mut worst = 0.0f64;
    for (a, b) in gs.coeffs().iter().flatten().zip(tt.coeffs().iter().flatten()) {
        worst = worst.max((a - b).abs());
    }
    println!("largest coefficient difference between constructions: {worst:.2e}");

    for x in [0.0, 0.7, 1.4] {
        let (p, dp) = tt.eval(4, x)?;
        println!("φ_4({x}) = {p:.10}, φ_4'({x}) = {dp:.10}");
    }
    println!();
    tt.write_coefficients_csv(io::stdout())?;
    Ok(())
}
