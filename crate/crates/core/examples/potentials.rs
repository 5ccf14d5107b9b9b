//! Build, validate and evaluate the supported potential families.

use virial_ansatz::potentials::PotentialSpec;
use virial_ansatz::Result;

fn main() -> Result<()> {
    let specs = [
        PotentialSpec::monomial(2, 1.0),
        PotentialSpec::harmonic(1.0),
        PotentialSpec::quartic_anharmonic(1.0, 0.25),
        PotentialSpec::even_polynomial(vec![1.0, -0.2, 0.3]),
        PotentialSpec::monomial(3, 0.5).translate(1.5)?,
    ];
    for spec in specs {
        let spec = spec.validate()?;
        let xi = spec.xi();
        let (u, du, d2u) = spec.evaluate(xi + 1.0);
        println!("{spec}");
        println!("  U(ξ+1) = {u:.6}  U'(ξ+1) = {du:.6}  U''(ξ+1) = {d2u:.6}");
        println!("  config: {}", spec.to_config_string().replace('\n', "; "));
    }

    for bad in [PotentialSpec::monomial(2, -1.0), PotentialSpec::even_polynomial(vec![-1.0, 1.0])] {
        match bad.clone().validate() {
            Ok(_) => println!("{bad}: accepted"),
            Err(e) => println!("{bad}: rejected ({e})"),
        }
    }

    let parsed = PotentialSpec::from_config_str("kind = quartic-anharmonic\nomega = 2\nlambda = 0.1\n")?;
    println!("parsed from config: {parsed}");
    Ok(())
}
