//! Relative errors ε_n for x^{2κ}, κ = 1..5, and their large-n plateau.

use std::io;

use virial_ansatz::spectra::SpectrumOptions;
use virial_ansatz::tables::error_table;
use virial_ansatz::Result;

fn main() -> Result<()> {
    let table = error_table(&[1, 2, 3, 4, 5], 10, &SpectrumOptions::default())?;
    table.write_csv(io::stdout())?;
    println!();
    for &kappa in &table.kappas {
        let tail: Vec<f64> = (8..=10).filter_map(|n| table.get(kappa, n)).collect();
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        println!("κ = {kappa}: ε_0 = {:.4}%, plateau ≈ {mean:.4}%", table.get(kappa, 0).unwrap_or(f64::NAN));
    }
    Ok(())
}
