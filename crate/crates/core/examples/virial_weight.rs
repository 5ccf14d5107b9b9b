//! The virial weight σ = χ_v² and its moments, closed form against quadrature.

use virial_ansatz::integrate::{integrate_interval, QuadratureSettings};
use virial_ansatz::potentials::PotentialSpec;
use virial_ansatz::virial::VirialWeight;
use virial_ansatz::Result;

fn main() -> Result<()> {
    let spec = PotentialSpec::monomial(2, 1.0);
    let w = VirialWeight::new(&spec)?;
    println!("{spec}: mode {:?}, normalization {:.12}", w.mode(), w.norm());
    println!("{:>6} {:>22} {:>22}", "order", "closed form", "quadrature");
    for order in (0..=8).step_by(2) {
        println!("{order:>6} {:>22.16} {:>22.16}", w.moment(order)?, w.moment_by_quadrature(order)?);
    }

    // ∫ σ over a finite window, for comparison with the full norm
    let settings = QuadratureSettings::default();
    let inner = integrate_interval(|x| w.sigma(x), -1.0, 1.0, &settings)?;
    println!("mass in [-1, 1]: {:.10} (error estimate {:.1e})", inner.value, inner.error);

    let anh = VirialWeight::new(&PotentialSpec::quartic_anharmonic(1.0, 0.5))?;
    println!("anharmonic weight, mode {:?}", anh.mode());
    for x in [0.0, 0.5, 1.0, 2.0] {
        let gp = anh.g_prime(x);
        let virial = x * anh.spec().evaluate(x).1;
        println!("  x = {x:3.1}: g = {:.8}, g'^2 = {:.8}, x U' = {virial:.8}", anh.g(x), gp * gp);
    }
    Ok(())
}
