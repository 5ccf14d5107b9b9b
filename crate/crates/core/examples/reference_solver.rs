//! The finite-difference reference solver: refinement ladder, Numerov variant,
//! node counts and virial residuals.

use virial_ansatz::potentials::PotentialSpec;
use virial_ansatz::refsolver::{refine_with, virial_residual, RefineOptions, Scheme};
use virial_ansatz::Result;

fn main() -> Result<()> {
    let spec = PotentialSpec::quartic_anharmonic(1.0, 1.0);
    for scheme in [Scheme::SecondDifference, Scheme::Numerov] {
        let opts = RefineOptions { scheme, ..RefineOptions::default() };
        let refined = refine_with(&spec, 6, &opts)?;
        let report = &refined.report;
        println!("{spec}, {scheme:?}: box ±{:.3}, grids {:?}, converged {}", report.half_width, report.points, report.converged);
        let residuals = virial_residual(&refined.finest, &spec);
        for (lvl, res) in report.levels.iter().zip(&residuals) {
            println!(
                "  n = {}: E = {:.12}  change {:.1e}  order {:.2}  nodes {}  virial residual {res:.1e}",
                lvl.level,
                lvl.eigenvalue,
                lvl.change,
                lvl.observed_order,
                refined.finest.node_count(lvl.level)
            );
        }
    }
    Ok(())
}
