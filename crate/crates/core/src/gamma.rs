//! Gamma function and the closed-form moments of `e^{−|x|^{κ+1}}`.

use crate::error::{Error, Result};

/// Γ(z) for `z > 0`.
pub fn gamma_fn(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::DomainError(z));
    }
    Ok(statrs::function::gamma::gamma(z))
}

/// `I_{2i} = ∫ x^{2i} e^{−|x|^{κ+1}} dx = (2/(κ+1))·Γ((2i+1)/(κ+1))`.
pub fn monomial_base_integral(kappa: u32, i: u32) -> f64 {
    let p = kappa as f64 + 1.0;
    2.0 / p * gamma_fn((2 * i + 1) as f64 / p).expect("positive argument")
}

/// `J_{2i} = I_{2i} / I_0 = Γ((2i+1)/(κ+1)) / Γ(1/(κ+1))`.
pub fn monomial_moment_ratio(kappa: u32, i: u32) -> f64 {
    let p = kappa as f64 + 1.0;
    let num = gamma_fn((2 * i + 1) as f64 / p).expect("positive argument");
    let den = gamma_fn(1.0 / p).expect("positive argument");
    num / den
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn known_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        // Γ(1/3) = 2.678938534707747633...
        assert!((gamma_fn(1.0 / 3.0).unwrap() - 2.678_938_534_707_747_6).abs() < 1e-13);
    }

    #[test]
    fn recurrence_holds() {
        for k in 1..200 {
            let z = 0.05 * k as f64;
            let lhs = gamma_fn(z + 1.0).unwrap();
            let rhs = z * gamma_fn(z).unwrap();
            assert!((lhs - rhs).abs() <= 1e-13 * lhs, "z = {z}");
        }
    }

    #[test]
    fn domain_error() {
        assert_eq!(gamma_fn(0.0), Err(Error::DomainError(0.0)));
        assert_eq!(gamma_fn(-1.5), Err(Error::DomainError(-1.5)));
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn base_integrals() {
        assert!((monomial_base_integral(1, 0) - PI.sqrt()).abs() < 1e-14);
        assert!((monomial_base_integral(2, 0) - 1.785_959_023_138_498_4).abs() < 1e-13);
        assert!((monomial_moment_ratio(2, 2) - 0.336_978_725_437_392_8).abs() < 1e-13);
        assert_eq!(monomial_moment_ratio(3, 0), 1.0);
    }
}
