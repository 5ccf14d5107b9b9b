//! Coupling-constant scaling of coefficients, energies and wavefunctions.

use virial_ansatz::spectra::{scaling_audit, ScalingFrame, ScalingTolerances};
use virial_ansatz::Result;

fn main() -> Result<()> {
    let lambdas = [0.1, 0.5, 1.0, 1.5, 10.0];
    for kappa in 1..=4 {
        let frame = ScalingFrame::new(kappa, 10.0)?;
        let audit = scaling_audit(kappa, &lambdas, 6)?;
        let worst = audit.worst();
        println!(
            "κ = {kappa}: s(10) = {:.6}, e(10) = {:.6}; worst coefficient {:.1e}, energy {:.1e}, pointwise {:.1e}, ε spread {:.1e} -> {}",
            frame.length,
            frame.energy,
            worst.coefficient,
            worst.energy,
            worst.pointwise,
            worst.eps_spread,
            if audit.passes(&ScalingTolerances::default()) { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}
