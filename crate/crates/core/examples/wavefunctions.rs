//! Ansatz against reference eigenfunctions for x⁴, written as CSV.

use std::fs::File;

use virial_ansatz::potentials::PotentialSpec;
use virial_ansatz::spectra::SpectrumOptions;
use virial_ansatz::tables::wavefunctions;
use virial_ansatz::Result;

fn main() -> Result<()> {
    let table = wavefunctions(&PotentialSpec::monomial(2, 1.0), 3, 201, &SpectrumOptions::default())?;
    let h = table.x[1] - table.x[0];
    for n in 0..table.psi.len() {
        let (psi, chi) = (&table.psi[n], &table.chi[n]);
        let max_diff = psi.iter().zip(chi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let overlap: f64 = h * psi.iter().zip(chi).map(|(a, b)| a * b).sum::<f64>();
        println!("n = {n}: max |ψ − χ| = {max_diff:.4}, overlap ≈ {overlap:.6}");
    }
    let path = std::env::temp_dir().join("quartic_wavefunctions.csv");
    table.write_csv(File::create(&path)?)?;
    println!("written to {}", path.display());
    Ok(())
}
