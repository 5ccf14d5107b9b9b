//! ε_n of ½x² + λx⁴ from the harmonic to the quartic limit.

use virial_ansatz::spectra::SpectrumOptions;
use virial_ansatz::tables::{anharmonic_sweep, log_spaced};
use virial_ansatz::Result;

fn main() -> Result<()> {
    let lambdas = log_spaced(1e-3, 1e3, 13)?;
    let sweep = anharmonic_sweep(1.0, &lambdas, 3, &SpectrumOptions::default())?;
    print!("{:>10}", "λ");
    for n in 0..=3 {
        print!(" {:>9}", format!("ε_{n} %"));
    }
    println!();
    let series: Vec<_> = (0..=3).map(|n| sweep.eps_series(n)).collect();
    for (i, lambda) in lambdas.iter().enumerate() {
        print!("{lambda:>10.3e}");
        for s in &series {
            print!(" {:>9.4}", s[i].1);
        }
        println!();
    }
    Ok(())
}
