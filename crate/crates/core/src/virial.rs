//! The virial function `g`, the ground-state ansatz `χ_v = N·e^{−g}` and the
//! orthogonality weight `σ = χ_v²`.
//!
//! `g` is the even antiderivative of `√((x−ξ)U′(x))` with `g(ξ) = 0`, so that
//! `g′(x)² = (x−ξ)U′(x)` holds pointwise. Monomial and quartic-anharmonic
//! potentials have closed forms; every other admissible potential falls back to
//! a tabulated numerical integral.

use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{monomial_base_integral, monomial_moment_ratio};
use crate::integrate::{gauss10, integrate_interval, integrate_weighted, Decay, QuadratureSettings};
use crate::potentials::PotentialSpec;

/// How `g` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    ClosedFormMonomial,
    ClosedFormQuarticAnharmonic,
    NumericG,
}

/// Below this ratio `λ/ω²` the anharmonic closed form is replaced by its
/// harmonic limit `g = ωx²/2`.
pub const HARMONIC_LIMIT_RATIO: f64 = 1e-12;

#[derive(Debug, Clone)]
enum VirialFunction {
    /// `g = c·|t|^p`
    Power { coef: f64, power: i32, kappa: u32, lambda: f64 },
    /// `g = ωt²/2`
    Harmonic { omega: f64 },
    /// `g = (ω³/12λ)[(1 + 4λt²/ω²)^{3/2} − 1]`
    Anharmonic { omega: f64, lambda: f64 },
    Numeric(NumericG),
}

#[derive(Debug)]
pub struct VirialWeight {
    spec: PotentialSpec,
    xi: f64,
    mode: WeightMode,
    g: VirialFunction,
    norm: f64,
    normalized: bool,
    settings: QuadratureSettings,
    // even moments ⟨t^{2i}⟩_σ, filled on demand
    moments: RwLock<Vec<f64>>,
}

impl Clone for VirialWeight {
    fn clone(&self) -> Self {
        VirialWeight {
            spec: self.spec.clone(),
            xi: self.xi,
            mode: self.mode,
            g: self.g.clone(),
            norm: self.norm,
            normalized: self.normalized,
            settings: self.settings,
            moments: RwLock::new(self.moments.read().expect("moment cache poisoned").clone()),
        }
    }
}

impl VirialWeight {
    /// Builds and normalizes the weight for a validated potential.
    pub fn new(spec: &PotentialSpec) -> Result<Self> {
        Self::build(spec, QuadratureSettings::default())?.normalize()
    }

    /// Builds `g` with `N = 1` (unnormalized).
    pub fn build(spec: &PotentialSpec, settings: QuadratureSettings) -> Result<Self> {
        let spec = spec.clone().validate()?;
        let settings = settings.validated()?;
        let xi = spec.xi();
        let (mode, g) = match spec.unshifted() {
            PotentialSpec::Monomial { kappa, lambda } => {
                let k = *kappa as f64;
                (
                    WeightMode::ClosedFormMonomial,
                    VirialFunction::Power {
                        coef: (2.0 * k * lambda).sqrt() / (k + 1.0),
                        power: *kappa as i32 + 1,
                        kappa: *kappa,
                        lambda: *lambda,
                    },
                )
            }
            PotentialSpec::QuarticAnharmonic { omega, lambda } => {
                let g = if *omega == 0.0 {
                    // pure quartic: the closed form degenerates to (2√λ/3)|t|³
                    VirialFunction::Power {
                        coef: 2.0 * lambda.sqrt() / 3.0,
                        power: 3,
                        kappa: 2,
                        lambda: *lambda,
                    }
                } else if *lambda < HARMONIC_LIMIT_RATIO * omega * omega {
                    VirialFunction::Harmonic { omega: *omega }
                } else {
                    VirialFunction::Anharmonic {
                        omega: *omega,
                        lambda: *lambda,
                    }
                };
                (WeightMode::ClosedFormQuarticAnharmonic, g)
            }
            _ => (WeightMode::NumericG, VirialFunction::Numeric(NumericG::tabulate(&spec)?)),
        };
        Ok(VirialWeight {
            spec,
            xi,
            mode,
            g,
            norm: 1.0,
            normalized: false,
            settings,
            moments: RwLock::new(Vec::new()),
        })
    }

    /// Fixes `N` so that `∫σ = 1`.
    pub fn normalize(mut self) -> Result<Self> {
        self.norm = 1.0;
        let norm = match &self.g {
            VirialFunction::Power { coef, power, kappa, .. } if self.mode == WeightMode::ClosedFormMonomial => {
                let i0 = monomial_base_integral(*kappa, 0);
                (2.0 * coef).powf(0.5 / *power as f64) / i0.sqrt()
            }
            _ => {
                let total = integrate_weighted(|_| 1.0, &self, &self.settings)?.value;
                1.0 / total.sqrt()
            }
        };
        self.norm = norm;
        self.normalized = true;
        self.moments = RwLock::new(Vec::new());
        Ok(self)
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    /// Normalization constant `N`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn settings(&self) -> &QuadratureSettings {
        &self.settings
    }

    /// `(κ, λ)` for monomial weights.
    pub fn monomial(&self) -> Option<(u32, f64)> {
        match (&self.g, self.mode) {
            (VirialFunction::Power { kappa, lambda, .. }, WeightMode::ClosedFormMonomial) => {
                Some((*kappa, *lambda))
            }
            _ => None,
        }
    }

    pub fn g(&self, x: f64) -> f64 {
        let t = x - self.xi;
        match &self.g {
            VirialFunction::Power { coef, power, .. } => coef * t.abs().powi(*power),
            VirialFunction::Harmonic { omega } => 0.5 * omega * t * t,
            VirialFunction::Anharmonic { omega, lambda } => {
                let u = 4.0 * lambda * t * t / (omega * omega);
                omega.powi(3) / (12.0 * lambda) * (1.5 * u.ln_1p()).exp_m1()
            }
            VirialFunction::Numeric(table) => table.eval(t.abs()),
        }
    }

    /// `g′(x) = sign(x−ξ)·√((x−ξ)U′(x))`.
    pub fn g_prime(&self, x: f64) -> f64 {
        let t = x - self.xi;
        match &self.g {
            VirialFunction::Power { coef, power, .. } => {
                t.signum() * coef * *power as f64 * t.abs().powi(power - 1)
            }
            VirialFunction::Harmonic { omega } => omega * t,
            VirialFunction::Anharmonic { omega, lambda } => {
                omega * t * (1.0 + 4.0 * lambda * t * t / (omega * omega)).sqrt()
            }
            VirialFunction::Numeric(_) => {
                let du = self.spec.evaluate(x).1;
                t.signum() * (t * du).max(0.0).sqrt()
            }
        }
    }

    /// `χ_v(x) = N·e^{−g(x)}`.
    pub fn chi_v(&self, x: f64) -> f64 {
        self.norm * (-self.g(x)).exp()
    }

    /// `σ(x) = N²·e^{−2g(x)}`.
    pub fn sigma(&self, x: f64) -> f64 {
        self.norm * self.norm * (-2.0 * self.g(x)).exp()
    }

    /// `∫ f σ dx` by quadrature.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let raw = integrate_weighted(f, self, &self.settings)?.value;
        Ok(self.norm * self.norm * raw)
    }

    /// `⟨(x−ξ)^order⟩_σ`. Odd orders are exactly zero; monomial weights use the
    /// Gamma-function closed form, everything else quadrature. Results are
    /// memoized.
    pub fn moment(&self, order: u32) -> Result<f64> {
        if order % 2 == 1 {
            return Ok(0.0);
        }
        let i = (order / 2) as usize;
        if let Some(v) = self.moments.read().expect("moment cache poisoned").get(i) {
            return Ok(*v);
        }
        let mut cache = self.moments.write().expect("moment cache poisoned");
        while cache.len() <= i {
            let next = cache.len() as u32;
            let v = self.compute_moment(next)?;
            cache.push(v);
        }
        Ok(cache[i])
    }

    fn compute_moment(&self, i: u32) -> Result<f64> {
        match (&self.g, self.mode, self.normalized) {
            (VirialFunction::Power { coef, power, kappa, .. }, WeightMode::ClosedFormMonomial, true) => {
                let scale = (1.0 / (2.0 * coef)).powf(2.0 * i as f64 / *power as f64);
                Ok(scale * monomial_moment_ratio(*kappa, i))
            }
            _ => self.moment_by_quadrature(2 * i),
        }
    }

    /// `⟨(x−ξ)^order⟩_σ` by quadrature regardless of mode.
    pub fn moment_by_quadrature(&self, order: u32) -> Result<f64> {
        let xi = self.xi;
        self.expectation(|x| (x - xi).powi(order as i32))
    }
}

impl Decay for VirialWeight {
    fn g(&self, x: f64) -> f64 {
        VirialWeight::g(self, x)
    }

    fn center(&self) -> f64 {
        self.xi
    }
}

/// `g(ξ + t)` for `t ≥ 0` tabulated on adaptive panels; values inside a panel
/// come from a 10-point Gauss rule on `[node, t]`.
#[derive(Debug, Clone)]
struct NumericG {
    /// The potential centred at the origin.
    spec: PotentialSpec,
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
}

/// Tabulation stops once `g` exceeds this value (`e^{−2g}` underflows).
const NUMERIC_G_CEILING: f64 = 400.0;

impl NumericG {
    fn tabulate(spec: &PotentialSpec) -> Result<Self> {
        // work in t = x − ξ directly; going through ξ + t loses digits near t = 0
        let centred = spec.unshifted().clone();
        let integrand = |t: f64| (t * centred.evaluate(t).1).max(0.0).sqrt();
        // panel width scale: where the potential rise matches a unit kinetic scale
        let mut width = characteristic_length(spec) / 64.0;
        let mut nodes = vec![0.0];
        let mut cumulative = vec![0.0];
        let mut t = 0.0;
        let mut g = 0.0;
        while g < NUMERIC_G_CEILING {
            if nodes.len() > 100_000 {
                return Err(Error::NoConvergence {
                    subdivisions: nodes.len(),
                    estimate: g,
                    error: f64::NAN,
                });
            }
            let whole = gauss10(integrand, t, t + width);
            let mid = t + 0.5 * width;
            let halves = gauss10(integrand, t, mid) + gauss10(integrand, mid, t + width);
            if (whole - halves).abs() <= 1e-15 * (g + halves.abs()).max(f64::MIN_POSITIVE) {
                t += width;
                g += halves;
                nodes.push(t);
                cumulative.push(g);
                width *= 1.5;
            } else {
                width *= 0.5;
            }
        }
        Ok(NumericG {
            spec: centred,
            nodes,
            cumulative,
        })
    }

    fn integrand(&self, t: f64) -> f64 {
        (t * self.spec.evaluate(t).1).max(0.0).sqrt()
    }

    fn eval(&self, t: f64) -> f64 {
        let last = self.nodes.len() - 1;
        if t >= self.nodes[last] {
            let extra = integrate_interval(
                |s| self.integrand(s),
                self.nodes[last],
                t,
                &QuadratureSettings::default(),
            )
            .map(|e| e.value)
            .unwrap_or(f64::INFINITY);
            return self.cumulative[last] + extra;
        }
        let k = self.nodes.partition_point(|n| *n <= t) - 1;
        if t == self.nodes[k] {
            return self.cumulative[k];
        }
        self.cumulative[k] + gauss10(|s| self.integrand(s), self.nodes[k], t)
    }
}

/// Length `a > 0` with `U(ξ+a) − U(ξ) = 1/(2a²)`: where the potential rise
/// matches the kinetic energy of localizing to width `a`.
pub fn characteristic_length(spec: &PotentialSpec) -> f64 {
    let xi = spec.xi();
    let floor = spec.value(xi);
    let f = |a: f64| (spec.value(xi + a) - floor) - 0.5 / (a * a);
    let (mut lo, mut hi) = (1.0, 1.0);
    while f(lo) > 0.0 && lo > 1e-150 {
        lo *= 0.5;
    }
    while f(hi) < 0.0 && hi < 1e150 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    (lo * hi).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quartic_monomial_g() {
        let w = VirialWeight::new(&PotentialSpec::monomial(2, 1.0)).unwrap();
        assert_eq!(w.mode(), WeightMode::ClosedFormMonomial);
        assert!((w.g(1.5) - 2.25).abs() < 1e-15);
        assert!((w.g(-1.5) - 2.25).abs() < 1e-15);
        assert_eq!(w.g(0.0), 0.0);
    }

    #[test]
    fn harmonic_limit_gives_gaussian_ground_state() {
        let w = VirialWeight::new(&PotentialSpec::harmonic(1.0)).unwrap();
        assert_eq!(w.mode(), WeightMode::ClosedFormQuarticAnharmonic);
        for x in [-2.0f64, -0.3, 0.0, 0.7, 3.0] {
            let exact = PI.powf(-0.25) * (-0.5 * x * x).exp();
            assert!((w.chi_v(x) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn anharmonic_g_prime() {
        let w = VirialWeight::new(&PotentialSpec::quartic_anharmonic(1.0, 1.0)).unwrap();
        assert!((w.g_prime(1.0) - 5f64.sqrt()).abs() < 1e-14);
        // derivative of the closed form by central differences
        let h = 1e-5;
        for x in [0.2, 0.9, 1.7] {
            let fd = (w.g(x + h) - w.g(x - h)) / (2.0 * h);
            assert!((fd - w.g_prime(x)).abs() < 1e-8 * w.g_prime(x));
        }
    }

    #[test]
    fn anharmonic_small_lambda_has_no_cancellation() {
        let w = VirialWeight::new(&PotentialSpec::quartic_anharmonic(1.0, 1e-9)).unwrap();
        let x: f64 = 0.5;
        let expected = 0.5 * x * x + 0.5 * 1e-9 * x.powi(4);
        assert!((w.g(x) - expected).abs() < 1e-15);
    }

    #[test]
    fn normalization_closed_forms() {
        let w = VirialWeight::new(&PotentialSpec::monomial(1, 0.5)).unwrap();
        assert!((w.norm() - PI.powf(-0.25)).abs() < 1e-14);

        let w = VirialWeight::new(&PotentialSpec::monomial(2, 1.0)).unwrap();
        let i0 = 2.0 / 3.0 * crate::gamma::gamma_fn(1.0 / 3.0).unwrap();
        assert!((w.norm() - (4.0f64 / 3.0).powf(1.0 / 6.0) / i0.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn weights_integrate_to_one() {
        let specs = [
            PotentialSpec::monomial(3, 0.7),
            PotentialSpec::quartic_anharmonic(1.0, 0.3),
            PotentialSpec::even_polynomial(vec![0.5, 0.2, 0.05]),
            PotentialSpec::monomial(2, 1.0).translate(-1.5).unwrap(),
        ];
        for spec in specs {
            let w = VirialWeight::new(&spec).unwrap();
            let total = w.expectation(|_| 1.0).unwrap();
            assert!((total - 1.0).abs() < 1e-10, "{spec}: {total}");
        }
    }

    #[test]
    fn moment_examples() {
        let omega: f64 = 1.7;
        let w = VirialWeight::new(&PotentialSpec::monomial(1, 0.5 * omega * omega)).unwrap();
        assert!((w.moment(2).unwrap() - 0.5 / omega).abs() < 1e-14);

        let w = VirialWeight::new(&PotentialSpec::monomial(2, 1.0)).unwrap();
        assert!((w.moment(4).unwrap() - 0.229_624_118_001_980_3).abs() < 1e-14);
        assert!((3.0 * w.moment(4).unwrap() - 0.688_872_35).abs() < 5e-9);
        assert_eq!(w.moment(3).unwrap(), 0.0);
    }

    #[test]
    fn numeric_g_matches_closed_form() {
        // x^2/2 + x^4 written as an even polynomial must reproduce the
        // anharmonic closed form with omega = 1, lambda = 1
        let numeric = VirialWeight::new(&PotentialSpec::even_polynomial(vec![0.5, 1.0])).unwrap();
        let closed = VirialWeight::new(&PotentialSpec::quartic_anharmonic(1.0, 1.0)).unwrap();
        assert_eq!(numeric.mode(), WeightMode::NumericG);
        for k in 0..=60 {
            let x = -3.0 + 0.1 * k as f64;
            let (a, b) = (numeric.g(x), closed.g(x));
            assert!((a - b).abs() <= 1e-13 * b.max(1.0), "x = {x}: {a} vs {b}");
        }
        assert!((numeric.norm() - closed.norm()).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_weight_has_unit_prefactor() {
        let w = VirialWeight::build(&PotentialSpec::monomial(2, 1.0), QuadratureSettings::default()).unwrap();
        assert!(!w.is_normalized());
        assert_eq!(w.chi_v(0.0), 1.0);
    }

    #[test]
    fn characteristic_length_of_harmonic() {
        // x^2/2 = 1/(2x^2) at x = 1
        let a = characteristic_length(&PotentialSpec::harmonic(1.0));
        assert!((a - 1.0).abs() < 1e-12);
    }
}
