//! Ansatz states `χ_n = φ_n·χ_v`, their energy estimates, relative errors
//! against reference eigenvalues and the coupling-constant scaling audit.

use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::{gram_schmidt, three_term, Construction, OrthoBasis};
use crate::potentials::PotentialSpec;
use crate::refsolver::{refine_with, GridSolution, RefineOptions, Scheme};
use crate::virial::{VirialWeight, WeightMode};

/// One ansatz state; cheap to clone.
#[derive(Debug, Clone)]
pub struct AnsatzState {
    n: usize,
    basis: Arc<OrthoBasis>,
}

/// `χ_n` for the given basis.
pub fn ansatz(basis: &Arc<OrthoBasis>, n: usize) -> Result<AnsatzState> {
    if n > basis.n_max() {
        return Err(Error::OrderOutOfRange {
            order: n,
            max: basis.n_max(),
        });
    }
    Ok(AnsatzState {
        n,
        basis: Arc::clone(basis),
    })
}

impl AnsatzState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &Arc<OrthoBasis> {
        &self.basis
    }

    pub fn weight(&self) -> &VirialWeight {
        self.basis.weight()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_and_derivative(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.value_and_derivative(x).1
    }

    /// `(χ_n(x), χ_n′(x))`.
    pub fn value_and_derivative(&self, x: f64) -> (f64, f64) {
        let (p, dp) = self
            .basis
            .eval(self.n, x)
            .expect("order checked at construction");
        let w = self.weight();
        let chi = w.chi_v(x);
        (p * chi, (dp - p * w.g_prime(x)) * chi)
    }

    /// `∫ f χ_n² dx`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let basis = &self.basis;
        let n = self.n;
        self.weight().expectation(|x| {
            let p = basis.eval(n, x).map(|v| v.0).unwrap_or(f64::NAN);
            p * p * f(x)
        })
    }

    /// `∫ χ_n² dx`.
    pub fn norm_sq(&self) -> Result<f64> {
        self.expectation(|_| 1.0)
    }

    /// `∫ (χ_n′)² dx`, written as `⟨(φ′ − φg′)²⟩_σ`.
    pub fn kinetic(&self) -> Result<f64> {
        let basis = &self.basis;
        let w = self.weight();
        let n = self.n;
        w.expectation(|x| {
            let (p, dp) = basis.eval(n, x).unwrap_or((f64::NAN, f64::NAN));
            let d = dp - p * w.g_prime(x);
            d * d
        })
    }
}

fn check_spec(state: &AnsatzState, spec: &PotentialSpec) -> Result<()> {
    if state.weight().spec() != spec {
        return Err(Error::InvalidParameter(format!(
            "ansatz was built for {} but evaluated for {spec}",
            state.weight().spec()
        )));
    }
    Ok(())
}

/// `⟨U + ½(x−ξ)U′⟩` under `χ_n²`. Monomial weights sum the closed-form moment
/// table, everything else integrates directly.
pub fn energy_virial(state: &AnsatzState, spec: &PotentialSpec) -> Result<f64> {
    check_spec(state, spec)?;
    let w = state.weight();
    match (w.mode(), w.monomial()) {
        (WeightMode::ClosedFormMonomial, Some((kappa, lambda))) => {
            let row = &state.basis.coeffs()[state.n];
            let shift = 2 * kappa;
            let mut terms = Vec::with_capacity(row.len() * row.len());
            for (i, a) in row.iter().enumerate() {
                for (j, b) in row.iter().enumerate() {
                    if (i + j) % 2 == 0 {
                        terms.push(a * b * w.moment((i + j) as u32 + shift)?);
                    }
                }
            }
            Ok((kappa as f64 + 1.0) * lambda * crate::integrate::compensated_sum(terms))
        }
        _ => energy_virial_quadrature(state, spec),
    }
}

/// [`energy_virial`] by direct quadrature, whatever the weight mode.
pub fn energy_virial_quadrature(state: &AnsatzState, spec: &PotentialSpec) -> Result<f64> {
    check_spec(state, spec)?;
    state.expectation(|x| spec.virial_energy_density(x))
}

/// `½∫(χ_n′)² + ⟨U⟩` under `χ_n²`.
pub fn energy_rayleigh(state: &AnsatzState, spec: &PotentialSpec) -> Result<f64> {
    check_spec(state, spec)?;
    let basis = &state.basis;
    let w = state.weight();
    let n = state.n;
    w.expectation(|x| {
        let (p, dp) = basis.eval(n, x).unwrap_or((f64::NAN, f64::NAN));
        let d = dp - p * w.g_prime(x);
        0.5 * d * d + p * p * spec.value(x)
    })
}

/// `|∫(χ_n′)² − ⟨(x−ξ)U′⟩|`, zero for `n = 0` by construction.
pub fn ansatz_virial_residual(state: &AnsatzState, spec: &PotentialSpec) -> Result<f64> {
    check_spec(state, spec)?;
    let basis = &state.basis;
    let w = state.weight();
    let n = state.n;
    let xi = spec.xi();
    let r = w.expectation(|x| {
        let (p, dp) = basis.eval(n, x).unwrap_or((f64::NAN, f64::NAN));
        let gp = w.g_prime(x);
        let d = dp - p * gp;
        d * d - p * p * (x - xi) * spec.evaluate(x).1
    })?;
    Ok(r.abs())
}

/// `100·|E_ans − E_ref|/E_ref`.
pub fn relative_error(e_ans: f64, e_ref: f64) -> Result<f64> {
    if e_ref == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(100.0 * (e_ans - e_ref).abs() / e_ref.abs())
}

/// `γ = 1/(1 + ε/100)`, so that `E_ref = γ·E_ans`.
pub fn gamma_factor(eps_percent: f64) -> f64 {
    1.0 / (1.0 + eps_percent / 100.0)
}

/// Scale factors relating `λx^{2κ}` to the unit-coupling problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFrame {
    pub kappa: u32,
    pub lambda: f64,
    /// `s = λ^{1/[2(κ+1)]}`
    pub length: f64,
    /// `a = λ^{1/[4(κ+1)]}`
    pub amplitude: f64,
    /// `e = λ^{1/(κ+1)}`
    pub energy: f64,
}

impl ScalingFrame {
    pub fn new(kappa: u32, lambda: f64) -> Result<Self> {
        if kappa == 0 || !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scaling needs kappa >= 1 and lambda > 0, got kappa = {kappa}, lambda = {lambda}"
            )));
        }
        let k1 = kappa as f64 + 1.0;
        Ok(ScalingFrame {
            kappa,
            lambda,
            length: lambda.powf(0.5 / k1),
            amplitude: lambda.powf(0.25 / k1),
            energy: lambda.powf(1.0 / k1),
        })
    }
}

/// How bases are built for spectra and audits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub construction: Construction,
    pub refine: RefineOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            construction: Construction::ThreeTerm,
            refine: RefineOptions::default(),
        }
    }
}

/// Builds the normalized weight and an orthonormal basis up to `n_max`.
pub fn build_basis(spec: &PotentialSpec, n_max: usize, construction: Construction) -> Result<Arc<OrthoBasis>> {
    let weight = Arc::new(VirialWeight::new(spec)?);
    let basis = match construction {
        Construction::GramSchmidt => gram_schmidt(weight, n_max)?,
        Construction::ThreeTerm => three_term(weight, n_max)?,
    };
    Ok(Arc::new(basis))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    #[serde(rename = "E_ref")]
    pub e_ref: f64,
    #[serde(rename = "E_virial")]
    pub e_virial: f64,
    #[serde(rename = "E_rayleigh")]
    pub e_rayleigh: f64,
    pub eps_percent: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub scheme: Scheme,
    pub half_width: f64,
    pub step: f64,
    /// Largest per-level change at the last refinement rung.
    pub convergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub spec: PotentialSpec,
    pub n_max: usize,
    pub construction: Construction,
    pub solver: SolverSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<SpectrumRow>,
}

/// Report rows for `n = 0..=n_max` against the eigenvalues of `reference`.
pub fn spectrum_report(spec: &PotentialSpec, n_max: usize, reference: &GridSolution) -> Result<SpectrumReport> {
    spectrum_report_with(spec, n_max, reference, Construction::ThreeTerm)
}

pub fn spectrum_report_with(
    spec: &PotentialSpec,
    n_max: usize,
    reference: &GridSolution,
    construction: Construction,
) -> Result<SpectrumReport> {
    if reference.eigenvalues.len() <= n_max {
        return Err(Error::InvalidParameter(format!(
            "reference has {} levels, {} needed",
            reference.eigenvalues.len(),
            n_max + 1
        )));
    }
    let basis = build_basis(spec, n_max, construction)?;
    let rows = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let state = ansatz(&basis, n)?;
            let e_virial = energy_virial(&state, spec)?;
            let e_rayleigh = energy_rayleigh(&state, spec)?;
            let e_ref = reference.eigenvalues[n];
            let eps = relative_error(e_virial, e_ref)?;
            Ok(SpectrumRow {
                n,
                e_ref,
                e_virial,
                e_rayleigh,
                eps_percent: eps,
                gamma: gamma_factor(eps),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let convergence = reference
        .convergence_estimate
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    Ok(SpectrumReport {
        metadata: ReportMetadata {
            spec: spec.clone(),
            n_max,
            construction,
            solver: SolverSettings {
                scheme: reference.scheme,
                half_width: reference.half_width,
                step: reference.step,
                convergence,
            },
        },
        rows,
    })
}

/// Reference solve plus report in one call.
pub fn compute_spectrum(spec: &PotentialSpec, n_max: usize, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let spec = spec.clone().validate()?;
    let refined = refine_with(&spec, n_max + 1, &opts.refine)?;
    spectrum_report_with(&spec, n_max, &refined.finest, opts.construction)
}

/// `v` to five significant digits, fixed-point.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), v);
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

impl SpectrumReport {
    /// CSV with energies to 8 decimals and ε to 5 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "E_ref", "E_virial", "E_rayleigh", "eps_percent", "gamma"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                format!("{:.8}", r.e_ref),
                format!("{:.8}", r.e_virial),
                format!("{:.8}", r.e_rayleigh),
                format_significant(r.eps_percent, 5),
                format!("{:.8}", r.gamma),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Vec<SpectrumRow>> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for rec in rdr.deserialize() {
            rows.push(rec?);
        }
        Ok(rows)
    }

    /// JSON document `{metadata, rows}` at full precision.
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        Ok(serde_json::from_reader(input)?)
    }
}

/// Residuals of the scaling laws for one `(λ, n)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub lambda: f64,
    pub n: usize,
    /// `max_j |α_nj(λ) − A_nj s^j| / max_j |α_nj(λ)|`
    pub coefficient_residual: f64,
    /// `|E(λ) − e·E(1)| / E(λ)`
    pub energy_residual: f64,
    /// `max_x |χ_n(x; λ) − a·χ_n(s x; 1)|` on the sample grid.
    pub pointwise_residual: f64,
    pub e_virial: f64,
    pub e_ref: f64,
    pub eps_percent: f64,
}

/// Pass thresholds for [`ScalingAuditReport::passes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingTolerances {
    pub coefficient: f64,
    pub energy: f64,
    pub pointwise: f64,
    pub eps_spread: f64,
}

impl Default for ScalingTolerances {
    fn default() -> Self {
        ScalingTolerances {
            coefficient: 1e-8,
            energy: 1e-9,
            pointwise: 1e-9,
            eps_spread: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingAuditReport {
    pub kappa: u32,
    pub n_max: usize,
    pub lambdas: Vec<f64>,
    pub rows: Vec<ScalingRow>,
    /// `max − min` of ε_n over the λ list, per n.
    pub eps_spread: Vec<f64>,
}

impl ScalingAuditReport {
    pub fn worst(&self) -> ScalingTolerances {
        let max = |f: fn(&ScalingRow) -> f64| self.rows.iter().map(f).fold(0.0, f64::max);
        ScalingTolerances {
            coefficient: max(|r| r.coefficient_residual),
            energy: max(|r| r.energy_residual),
            pointwise: max(|r| r.pointwise_residual),
            eps_spread: self.eps_spread.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn passes(&self, tol: &ScalingTolerances) -> bool {
        let w = self.worst();
        w.coefficient <= tol.coefficient
            && w.energy <= tol.energy
            && w.pointwise <= tol.pointwise
            && w.eps_spread <= tol.eps_spread
    }

    /// Long-format CSV, one row per `(λ, n)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Points in scaled units `v = s·x` where pointwise covariance is sampled.
const SAMPLE_HALF_WIDTH: f64 = 3.0;
const SAMPLE_POINTS: usize = 61;

/// Checks the coupling-constant scaling of coefficients, energies, ansatz
/// values and relative errors of `λx^{2κ}` against the `λ = 1` problem.
pub fn scaling_audit(kappa: u32, lambdas: &[f64], n_max: usize) -> Result<ScalingAuditReport> {
    scaling_audit_with(kappa, lambdas, n_max, &SpectrumOptions::default())
}

pub fn scaling_audit_with(
    kappa: u32,
    lambdas: &[f64],
    n_max: usize,
    opts: &SpectrumOptions,
) -> Result<ScalingAuditReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("scaling audit needs at least one lambda".into()));
    }
    for l in lambdas {
        ScalingFrame::new(kappa, *l)?;
    }
    let unit_spec = PotentialSpec::monomial(kappa, 1.0);
    let unit = build_basis(&unit_spec, n_max, opts.construction)?;
    let unit_energies = (0..=n_max)
        .map(|n| energy_virial(&ansatz(&unit, n)?, &unit_spec))
        .collect::<Result<Vec<_>>>()?;
    let per_lambda = lambdas
        .par_iter()
        .map(|&lambda| -> Result<Vec<ScalingRow>> {
            let frame = ScalingFrame::new(kappa, lambda)?;
            let spec = PotentialSpec::monomial(kappa, lambda);
            let basis = build_basis(&spec, n_max, opts.construction)?;
            let reference = refine_with(&spec, n_max + 1, &opts.refine)?;
            (0..=n_max)
                .map(|n| {
                    let row = &basis.coeffs()[n];
                    let unit_row = &unit.coeffs()[n];
                    let scale = row.iter().fold(0.0f64, |m, a| m.max(a.abs()));
                    let coefficient_residual = row
                        .iter()
                        .zip(unit_row)
                        .enumerate()
                        .map(|(j, (a, big_a))| (a - big_a * frame.length.powi(j as i32)).abs())
                        .fold(0.0, f64::max)
                        / scale;
                    let state = ansatz(&basis, n)?;
                    let unit_state = ansatz(&unit, n)?;
                    let e_virial = energy_virial(&state, &spec)?;
                    let energy_residual = (e_virial - frame.energy * unit_energies[n]).abs() / e_virial;
                    let pointwise_residual = (0..SAMPLE_POINTS)
                        .map(|k| {
                            let v = -SAMPLE_HALF_WIDTH
                                + 2.0 * SAMPLE_HALF_WIDTH * k as f64 / (SAMPLE_POINTS - 1) as f64;
                            let x = v / frame.length;
                            (state.value(x) - frame.amplitude * unit_state.value(v)).abs()
                        })
                        .fold(0.0, f64::max);
                    let e_ref = reference.eigenvalues[n];
                    Ok(ScalingRow {
                        lambda,
                        n,
                        coefficient_residual,
                        energy_residual,
                        pointwise_residual,
                        e_virial,
                        e_ref,
                        eps_percent: relative_error(e_virial, e_ref)?,
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ScalingRow> = per_lambda.into_iter().flatten().collect();
    let eps_spread = (0..=n_max)
        .map(|n| {
            let (lo, hi) = rows
                .iter()
                .filter(|r| r.n == n)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r.eps_percent), hi.max(r.eps_percent))
                });
            hi - lo
        })
        .collect();
    Ok(ScalingAuditReport {
        kappa,
        n_max,
        lambdas: lambdas.to_vec(),
        rows,
        eps_spread,
    })
}
