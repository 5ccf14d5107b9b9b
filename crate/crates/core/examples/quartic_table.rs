//! Ansatz and reference energies of λx⁴ for several couplings.

use virial_ansatz::potentials::PotentialSpec;
use virial_ansatz::spectra::{compute_spectrum, SpectrumOptions};
use virial_ansatz::Result;

fn main() -> Result<()> {
    let opts = SpectrumOptions::default();
    for lambda in [0.1, 0.5, 1.0, 1.5] {
        let report = compute_spectrum(&PotentialSpec::monomial(2, lambda), 5, &opts)?;
        println!("λ = {lambda}");
        println!("{:>3} {:>14} {:>14} {:>10} {:>10}", "n", "E_ref", "E_ansatz", "ε %", "γ");
        for r in &report.rows {
            println!("{:>3} {:>14.8} {:>14.8} {:>10.5} {:>10.6}", r.n, r.e_ref, r.e_virial, r.eps_percent, r.gamma);
        }
        let solver = &report.metadata.solver;
        println!("    box ±{:.3}, step {:.2e}, last change {:.1e}\n", solver.half_width, solver.step, solver.convergence);
    }
    Ok(())
}
