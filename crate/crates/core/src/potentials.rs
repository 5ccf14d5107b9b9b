//! Admissible potentials: symmetric, strictly convex, with a unique minimum.
//!
//! Every potential is represented by a [`PotentialSpec`]. Specs are plain data;
//! [`PotentialSpec::validate`] checks symmetry and convexity and must be called
//! before a spec is handed to the ansatz builders or the reference solver.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points sampled by the convexity and symmetry scans.
pub const SCAN_POINTS: usize = 1001;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// `λ x^{2κ}`.
    Monomial { kappa: u32, lambda: f64 },
    /// `½ω²x² + λx⁴`.
    QuarticAnharmonic { omega: f64, lambda: f64 },
    /// `Σ_j c_{2j} x^{2j}`, coefficients listed from `c_2` upwards.
    EvenPolynomial { coeffs: Vec<f64> },
    /// `inner(x − ξ)`.
    Shifted { inner: Box<PotentialSpec>, xi: f64 },
}

impl PotentialSpec {
    pub fn monomial(kappa: u32, lambda: f64) -> Self {
        PotentialSpec::Monomial { kappa, lambda }
    }

    pub fn quartic_anharmonic(omega: f64, lambda: f64) -> Self {
        PotentialSpec::QuarticAnharmonic { omega, lambda }
    }

    /// Harmonic oscillator `½ω²x²`, expressed as the `λ = 0` anharmonic case.
    pub fn harmonic(omega: f64) -> Self {
        PotentialSpec::QuarticAnharmonic { omega, lambda: 0.0 }
    }

    pub fn even_polynomial(coeffs: Vec<f64>) -> Self {
        PotentialSpec::EvenPolynomial { coeffs }
    }

    /// Location of the unique minimum.
    pub fn xi(&self) -> f64 {
        match self {
            PotentialSpec::Shifted { xi, .. } => *xi,
            _ => 0.0,
        }
    }

    /// The spec with any shift removed.
    pub fn unshifted(&self) -> &PotentialSpec {
        match self {
            PotentialSpec::Shifted { inner, .. } => inner,
            other => other,
        }
    }

    /// `(κ, λ)` when the (unshifted) potential is a pure monomial.
    pub fn as_monomial(&self) -> Option<(u32, f64)> {
        match self.unshifted() {
            PotentialSpec::Monomial { kappa, lambda } => Some((*kappa, *lambda)),
            _ => None,
        }
    }

    /// Returns `(U, U′, U″)` at `x`.
    pub fn evaluate(&self, x: f64) -> (f64, f64, f64) {
        match self {
            PotentialSpec::Monomial { kappa, lambda } => {
                let k = *kappa as i32;
                let p = 2 * k;
                let u = lambda * x.powi(p);
                let du = p as f64 * lambda * x.powi(p - 1);
                let d2u = (p * (p - 1)) as f64 * lambda * x.powi(p - 2);
                (u, du, d2u)
            }
            PotentialSpec::QuarticAnharmonic { omega, lambda } => {
                let w2 = omega * omega;
                let x2 = x * x;
                (
                    0.5 * w2 * x2 + lambda * x2 * x2,
                    w2 * x + 4.0 * lambda * x2 * x,
                    w2 + 12.0 * lambda * x2,
                )
            }
            PotentialSpec::EvenPolynomial { coeffs } => {
                let (mut u, mut du, mut d2u) = (0.0, 0.0, 0.0);
                for (idx, c) in coeffs.iter().enumerate() {
                    let p = 2 * (idx as i32 + 1);
                    u += c * x.powi(p);
                    du += p as f64 * c * x.powi(p - 1);
                    d2u += (p * (p - 1)) as f64 * c * x.powi(p - 2);
                }
                (u, du, d2u)
            }
            PotentialSpec::Shifted { inner, xi } => inner.evaluate(x - xi),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.evaluate(x).0
    }

    /// `U(x) + ½(x − ξ)U′(x)`, the operator whose expectation is the virial
    /// energy estimate.
    pub fn virial_energy_density(&self, x: f64) -> f64 {
        let (u, du, _) = self.evaluate(x);
        u + 0.5 * (x - self.xi()) * du
    }

    /// Checks that the spec describes a symmetric, strictly convex potential
    /// with a unique minimum and returns it unchanged on success.
    pub fn validate(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        match self {
            PotentialSpec::Monomial { kappa, lambda } => {
                finite("lambda", *lambda)?;
                if *kappa == 0 {
                    return Err(Error::InvalidParameter("kappa must be at least 1".into()));
                }
                if *kappa > 30 {
                    return Err(Error::InvalidParameter(format!("kappa = {kappa} is too large")));
                }
                if *lambda == 0.0 {
                    return Err(Error::DegeneratePotential);
                }
                if *lambda < 0.0 {
                    return Err(Error::NotConvex(format!(
                        "lambda = {lambda} makes lambda*x^{} concave",
                        2 * kappa
                    )));
                }
            }
            PotentialSpec::QuarticAnharmonic { omega, lambda } => {
                finite("omega", *omega)?;
                finite("lambda", *lambda)?;
                if *omega < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "omega must be non-negative, got {omega}"
                    )));
                }
                if *lambda < 0.0 {
                    return Err(Error::NotConvex(format!(
                        "quartic coefficient lambda = {lambda} is negative"
                    )));
                }
                if *omega == 0.0 && *lambda == 0.0 {
                    return Err(Error::DegeneratePotential);
                }
            }
            PotentialSpec::EvenPolynomial { coeffs } => {
                for c in coeffs {
                    finite("coefficient", *c)?;
                }
                let Some(lead) = coeffs.iter().rposition(|c| *c != 0.0) else {
                    return Err(Error::DegeneratePotential);
                };
                if coeffs[lead] < 0.0 {
                    return Err(Error::NotConvex(format!(
                        "leading coefficient c_{} = {} is negative",
                        2 * (lead + 1),
                        coeffs[lead]
                    )));
                }
                if coeffs.iter().any(|c| *c < 0.0) {
                    self.convexity_scan()?;
                }
            }
            PotentialSpec::Shifted { inner, xi } => {
                finite("xi", *xi)?;
                if matches!(**inner, PotentialSpec::Shifted { .. }) {
                    return Err(Error::AlreadyShifted);
                }
                inner.check()?;
            }
        }
        self.symmetry_scan()
    }

    /// Half-width `R` around ξ with `U(ξ ± R) ≥ 10⁶·U(ξ) + 1`.
    pub fn scan_radius(&self) -> f64 {
        let xi = self.xi();
        let floor = self.value(xi);
        let target = 1e6 * floor + 1.0;
        let mut r = 1.0;
        for _ in 0..200 {
            if self.value(xi + r) - floor >= target {
                break;
            }
            r *= 2.0;
        }
        r
    }

    /// Sample offsets `d` (relative to ξ) used by the scans: 0 plus a geometric
    /// ladder out to `±R`.
    fn scan_offsets(&self) -> Vec<f64> {
        let r = self.scan_radius();
        let half = (SCAN_POINTS - 1) / 2;
        let ratio = (1e-6f64).powf(1.0 / (half - 1) as f64);
        let mut pos: Vec<f64> = (0..half).map(|k| r * ratio.powi(k as i32)).collect();
        pos.reverse();
        let mut out = Vec::with_capacity(SCAN_POINTS);
        out.extend(pos.iter().rev().map(|d| -d));
        out.push(0.0);
        out.extend(pos);
        out
    }

    fn convexity_scan(&self) -> Result<()> {
        let xi = self.xi();
        let offsets = self.scan_offsets();
        let curv: Vec<f64> = offsets.iter().map(|d| self.evaluate(xi + d).2).collect();
        let scale = curv.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        // isolated zeros are fine; two adjacent negative samples mark an interval
        let negative: Vec<bool> = curv.iter().map(|c| *c < -tol).collect();
        for (i, w) in negative.windows(2).enumerate() {
            if w[0] && w[1] {
                return Err(Error::NotConvex(format!(
                    "U'' = {:e} < 0 near x = {}",
                    curv[i],
                    xi + offsets[i]
                )));
            }
        }
        // a lone negative sample at the minimum is still an interval of
        // negative curvature for a polynomial
        if let Some(i) = negative.iter().position(|n| *n) {
            if offsets[i] == 0.0 {
                return Err(Error::NotConvex(format!("U''(xi) = {:e} < 0", curv[i])));
            }
        }
        Ok(())
    }

    fn symmetry_scan(&self) -> Result<()> {
        let xi = self.xi();
        for d in self.scan_offsets().into_iter().filter(|d| *d > 0.0) {
            let (a, slope, _) = self.evaluate(xi + d);
            let b = self.value(xi - d);
            let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
            // forming ξ ± d rounds the argument by about eps·(|ξ| + d)
            let arg_rounding = 4.0 * f64::EPSILON * (xi.abs() + d) * slope.abs();
            if (a - b).abs() > SYMMETRY_TOL * scale + arg_rounding {
                return Err(Error::NotSymmetric(format!(
                    "U(xi + {d}) = {a} but U(xi - {d}) = {b}"
                )));
            }
        }
        Ok(())
    }

    /// Moves the minimum to `xi`. A zero shift returns the spec unchanged.
    pub fn translate(self, xi: f64) -> Result<Self> {
        if matches!(self, PotentialSpec::Shifted { .. }) {
            return Err(Error::AlreadyShifted);
        }
        finite("xi", xi)?;
        if xi == 0.0 {
            return Ok(self);
        }
        Ok(PotentialSpec::Shifted {
            inner: Box::new(self),
            xi,
        })
    }

    /// Parses `key=value` lines (`#` starts a comment). Recognised keys: `kind`,
    /// `kappa`, `lambda`, `omega`, `coeffs` (comma separated) and `xi`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        Self::from_key_values(&map)
    }

    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let num = |k: &str| -> Result<Option<f64>> {
            get(k)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::Config(format!("{k}: cannot parse '{v}' as a number")))
                })
                .transpose()
        };
        let kind = get("kind").unwrap_or("monomial");
        let spec = match kind {
            "monomial" => {
                let kappa = get("kappa")
                    .ok_or_else(|| Error::Config("monomial potential needs kappa".into()))?;
                let kappa = kappa
                    .parse::<u32>()
                    .map_err(|_| Error::Config(format!("kappa: '{kappa}' is not a positive integer")))?;
                let lambda = num("lambda")?.unwrap_or(1.0);
                PotentialSpec::monomial(kappa, lambda)
            }
            "quartic-anharmonic" | "quartic_anharmonic" | "anharmonic" => {
                PotentialSpec::quartic_anharmonic(num("omega")?.unwrap_or(1.0), num("lambda")?.unwrap_or(0.0))
            }
            "harmonic" => PotentialSpec::harmonic(num("omega")?.unwrap_or(1.0)),
            "even-polynomial" | "even_polynomial" | "polynomial" => {
                let raw = get("coeffs")
                    .ok_or_else(|| Error::Config("even polynomial needs coeffs".into()))?;
                PotentialSpec::even_polynomial(parse_list(raw)?)
            }
            other => return Err(Error::Config(format!("unknown potential kind '{other}'"))),
        };
        match num("xi")? {
            Some(xi) if xi != 0.0 => spec.translate(xi),
            _ => Ok(spec),
        }
    }

    /// Inverse of [`PotentialSpec::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        match self.unshifted() {
            PotentialSpec::Monomial { kappa, lambda } => {
                out.push_str(&format!("kind=monomial\nkappa={kappa}\nlambda={lambda:?}\n"));
            }
            PotentialSpec::QuarticAnharmonic { omega, lambda } => {
                out.push_str(&format!(
                    "kind=quartic-anharmonic\nomega={omega:?}\nlambda={lambda:?}\n"
                ));
            }
            PotentialSpec::EvenPolynomial { coeffs } => {
                let list: Vec<String> = coeffs.iter().map(|c| format!("{c:?}")).collect();
                out.push_str(&format!("kind=even-polynomial\ncoeffs={}\n", list.join(",")));
            }
            PotentialSpec::Shifted { .. } => unreachable!("unshifted() strips the shift"),
        }
        if self.xi() != 0.0 {
            out.push_str(&format!("xi={:?}\n", self.xi()));
        }
        out
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Monomial { kappa, lambda } => write!(f, "{lambda} x^{}", 2 * kappa),
            PotentialSpec::QuarticAnharmonic { omega, lambda } => {
                write!(f, "0.5*{omega}^2 x^2 + {lambda} x^4")
            }
            PotentialSpec::EvenPolynomial { coeffs } => {
                let terms: Vec<String> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{c} x^{}", 2 * (i + 1)))
                    .collect();
                write!(f, "{}", terms.join(" + "))
            }
            PotentialSpec::Shifted { inner, xi } => write!(f, "[{inner}](x - {xi})"),
        }
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

/// Splits `key=value` lines into a map. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
        map.insert(k.trim().to_lowercase().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

/// Parses a comma separated list of reals.
pub fn parse_list(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse '{s}' as a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        assert_eq!(PotentialSpec::monomial(2, 1.0).evaluate(1.0), (1.0, 4.0, 12.0));
        assert_eq!(PotentialSpec::harmonic(1.0).evaluate(2.0), (2.0, 2.0, 1.0));
        assert_eq!(PotentialSpec::monomial(3, 0.5).evaluate(-1.0), (0.5, -3.0, 15.0));
    }

    #[test]
    fn validate_examples() {
        let spec = PotentialSpec::monomial(1, 0.5).validate().unwrap();
        assert_eq!(spec.xi(), 0.0);
        assert!(matches!(
            PotentialSpec::even_polynomial(vec![-1.0, 0.01]).validate(),
            Err(Error::NotConvex(_))
        ));
        assert_eq!(
            PotentialSpec::quartic_anharmonic(0.0, 0.0).validate(),
            Err(Error::DegeneratePotential)
        );
        assert_eq!(
            PotentialSpec::even_polynomial(vec![0.0, 0.0]).validate(),
            Err(Error::DegeneratePotential)
        );
        assert!(matches!(
            PotentialSpec::monomial(2, -1.0).validate(),
            Err(Error::NotConvex(_))
        ));
    }

    #[test]
    fn convexity_scan_accepts_mixed_signs_when_convex() {
        // 2x^2 - 0.1x^4 + x^6: U'' = 4 - 1.2x^2 + 30x^4 > 0 everywhere
        PotentialSpec::even_polynomial(vec![2.0, -0.1, 1.0]).validate().unwrap();
        // x^2 - x^4 + 0.2 x^6 has U'' < 0 on a band around |x| ~ 0.6
        assert!(matches!(
            PotentialSpec::even_polynomial(vec![1.0, -1.0, 0.2]).validate(),
            Err(Error::NotConvex(_))
        ));
    }

    #[test]
    fn pure_quartic_with_flat_minimum_is_admissible() {
        // U''(0) = 0 is an isolated point
        PotentialSpec::monomial(2, 1.0).validate().unwrap();
        PotentialSpec::even_polynomial(vec![0.0, 1.0]).validate().unwrap();
    }

    #[test]
    fn translate_behaviour() {
        let spec = PotentialSpec::monomial(2, 1.0);
        assert_eq!(spec.clone().translate(0.0).unwrap(), spec);

        let shifted = PotentialSpec::monomial(1, 0.5).translate(3.0).unwrap().validate().unwrap();
        assert_eq!(shifted.xi(), 3.0);
        assert_eq!(shifted.value(3.0), 0.0);
        assert!(shifted.value(2.9) > 0.0 && shifted.value(3.1) > 0.0);
        assert_eq!(shifted.evaluate(3.0).1, 0.0);
        assert_eq!(shifted.translate(1.0), Err(Error::AlreadyShifted));
    }

    #[test]
    fn config_round_trip() {
        let text = "# pure quartic\nkind = monomial\nkappa = 2\nlambda = 0.5\nxi = 1.25\n";
        let spec = PotentialSpec::from_config_str(text).unwrap();
        assert_eq!(spec.as_monomial(), Some((2, 0.5)));
        assert_eq!(spec.xi(), 1.25);
        assert_eq!(PotentialSpec::from_config_str(&spec.to_config_string()).unwrap(), spec);

        let poly = PotentialSpec::from_config_str("kind=even-polynomial\ncoeffs=1, 0.5,0.25").unwrap();
        assert_eq!(poly, PotentialSpec::even_polynomial(vec![1.0, 0.5, 0.25]));
        assert!(PotentialSpec::from_config_str("kind=coulomb").is_err());
        assert!(PotentialSpec::from_config_str("kappa").is_err());
    }
}
