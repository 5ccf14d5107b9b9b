//! Reference eigenpairs of `−½ψ″ + Uψ = Eψ` on a uniform grid with Dirichlet
//! walls, refined by halving the step and Richardson extrapolation.

mod numerov;
mod tridiag;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::virial::characteristic_length;

pub use tridiag::Tridiagonal;

/// Fraction of the box on each side used by the wall-leakage test.
const WALL_FRACTION: f64 = 0.05;
const WALL_LEAK_TOL: f64 = 1e-8;
/// WKB decay exponent `∫√(2(U−E))` required between the top turning point and
/// the wall.
const WKB_ACTION: f64 = 18.0;
/// Relative size below which a grid value counts as zero for node counting and
/// sign fixing.
const NEGLIGIBLE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Three-point Laplacian, error `O(h²)`.
    #[default]
    SecondDifference,
    /// Numerov-corrected shooting, error `O(h⁴)`.
    Numerov,
}

impl Scheme {
    /// Leading power of `h` in the eigenvalue error.
    pub fn order(self) -> u32 {
        match self {
            Scheme::SecondDifference => 2,
            Scheme::Numerov => 4,
        }
    }
}

/// Eigenpairs on one grid. Node `i = 1..M−1` sits at `ξ − L + i·h`; the walls
/// `i = 0, M` are not stored.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub half_width: f64,
    pub step: f64,
    pub center: f64,
    pub scheme: Scheme,
    pub eigenvalues: Vec<f64>,
    /// `h·Σψ² = 1`, first non-negligible value positive.
    pub eigenfunctions: Vec<Vec<f64>>,
    /// Per-level change against the previous grid of a refinement ladder, or
    /// NaN for a single solve.
    pub convergence_estimate: Vec<f64>,
}

impl GridSolution {
    pub fn len(&self) -> usize {
        self.eigenfunctions.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.center - self.half_width + (i + 1) as f64 * self.step
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Linear interpolation of eigenfunction `n` at `x`, zero outside the box.
    pub fn interpolate(&self, n: usize, x: f64) -> f64 {
        let psi = &self.eigenfunctions[n];
        let s = (x - (self.center - self.half_width)) / self.step;
        if !(s > 0.0) || s >= (psi.len() + 1) as f64 {
            return 0.0;
        }
        let k = s.floor() as usize;
        let t = s - k as f64;
        let at = |j: usize| if j == 0 || j > psi.len() { 0.0 } else { psi[j - 1] };
        (1.0 - t) * at(k) + t * at(k + 1)
    }

    /// Interior sign changes of eigenfunction `n`, skipping negligible values.
    pub fn node_count(&self, n: usize) -> usize {
        let psi = &self.eigenfunctions[n];
        let cut = NEGLIGIBLE * psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut last = 0.0f64;
        let mut count = 0;
        for &v in psi.iter().filter(|v| v.abs() > cut) {
            if last != 0.0 && (v < 0.0) != (last < 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Largest `|ψ_n(ξ−d) − (−1)ⁿψ_n(ξ+d)|` over the grid.
    pub fn parity_defect(&self, n: usize) -> f64 {
        let psi = &self.eigenfunctions[n];
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let m = psi.len();
        (0..m).map(|i| (psi[i] - sign * psi[m - 1 - i]).abs()).fold(0.0, f64::max)
    }

    /// `h·Σψ²` for eigenfunction `n`.
    pub fn norm_sq(&self, n: usize) -> f64 {
        self.step * self.eigenfunctions[n].iter().map(|v| v * v).sum::<f64>()
    }

    /// Writes `x, psi_0, …` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string()];
        header.extend((0..self.eigenfunctions.len()).map(|n| format!("psi_{n}")));
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![format!("{:.10e}", self.x(i))];
            row.extend(self.eigenfunctions.iter().map(|f| format!("{:.12e}", f[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn interior_potential(spec: &PotentialSpec, half_width: f64, points: usize) -> (f64, Vec<f64>) {
    let h = 2.0 * half_width / points as f64;
    let left = spec.xi() - half_width;
    let u = (0..=points).map(|i| spec.value(left + i as f64 * h)).collect();
    (h, u)
}

/// Eigenpairs of the lowest `n_levels` states on a box `[ξ−L, ξ+L]` with step
/// close to `h` (rounded so that `2L/h` is an integer).
pub fn solve_grid(spec: &PotentialSpec, n_levels: usize, half_width: f64, h: f64) -> Result<GridSolution> {
    solve_grid_with(spec, n_levels, half_width, h, Scheme::default())
}

pub fn solve_grid_with(
    spec: &PotentialSpec,
    n_levels: usize,
    half_width: f64,
    h: f64,
    scheme: Scheme,
) -> Result<GridSolution> {
    if !(half_width > 0.0) || !(h > 0.0) || h > half_width / 200.0 {
        return Err(Error::InvalidParameter(format!(
            "grid needs L > 0 and 0 < h <= L/200, got L = {half_width}, h = {h}"
        )));
    }
    if n_levels == 0 {
        return Err(Error::InvalidParameter("at least one level is required".into()));
    }
    let points = (2.0 * half_width / h).round() as usize;
    let sol = solve_points(spec, n_levels, half_width, points, scheme, true)?;
    check_walls(&sol)?;
    Ok(sol)
}

fn solve_points(
    spec: &PotentialSpec,
    n_levels: usize,
    half_width: f64,
    points: usize,
    scheme: Scheme,
    vectors: bool,
) -> Result<GridSolution> {
    let (h, u) = interior_potential(spec, half_width, points);
    let (eigenvalues, mut eigenfunctions) = match scheme {
        Scheme::SecondDifference => {
            let t = Tridiagonal {
                diag: u[1..points].iter().map(|v| v + 1.0 / (h * h)).collect(),
                off: -0.5 / (h * h),
            };
            let vals = t.lowest_eigenvalues(n_levels)?;
            let vecs = if vectors {
                vals.par_iter().map(|e| t.eigenvector(*e)).collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            (vals, vecs)
        }
        Scheme::Numerov => {
            let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            if h * h * (hi - lo) / 6.0 > 0.9 {
                return Err(Error::InvalidParameter(format!(
                    "step {h} is too coarse for Numerov with a potential range of {:e}",
                    hi - lo
                )));
            }
            let grid = numerov::NumerovGrid { potential: u, step: h };
            let vals = grid.lowest_eigenvalues(n_levels)?;
            let vecs = if vectors {
                vals.par_iter().map(|e| grid.eigenvector(*e)).collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            (vals, vecs)
        }
    };
    if eigenvalues.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::EigensolveFailure("eigenvalues are not strictly increasing".into()));
    }
    for psi in eigenfunctions.iter_mut() {
        let norm = (h * psi.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let cut = NEGLIGIBLE * psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let first = psi.iter().copied().find(|v| v.abs() > cut).unwrap_or(1.0);
        let s = first.signum() / norm;
        psi.iter_mut().for_each(|v| *v *= s);
    }
    Ok(GridSolution {
        half_width,
        step: h,
        center: spec.xi(),
        scheme,
        convergence_estimate: vec![f64::NAN; eigenvalues.len()],
        eigenvalues,
        eigenfunctions,
    })
}

fn check_walls(sol: &GridSolution) -> Result<()> {
    let Some(top) = sol.eigenfunctions.last() else {
        return Ok(());
    };
    let m = top.len();
    let band = ((WALL_FRACTION * m as f64).ceil() as usize).max(1).min(m / 2);
    let tail: f64 = sol.step
        * top[..band]
            .iter()
            .chain(&top[m - band..])
            .map(|v| v * v)
            .sum::<f64>();
    if tail > WALL_LEAK_TOL {
        return Err(Error::DomainTooSmall {
            half_width: sol.half_width,
            level: sol.eigenvalues.len() - 1,
            tail,
        });
    }
    Ok(())
}

/// Options for [`refine_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub scheme: Scheme,
    /// Stop once extrapolated eigenvalues change by less than
    /// `tol·max(1, |E|)` between rungs.
    pub tol: f64,
    /// Interior intervals on the coarsest rung.
    pub initial_points: usize,
    /// Rungs beyond the first, each halving the step.
    pub max_halvings: usize,
    /// Fixed box half-width; chosen automatically when `None`.
    pub half_width: Option<f64>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            scheme: Scheme::SecondDifference,
            tol: 1e-10,
            initial_points: 800,
            max_halvings: 5,
            half_width: None,
        }
    }
}

/// Per-level summary of a refinement ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub eigenvalue: f64,
    /// Change of the extrapolated value over the last rung.
    pub change: f64,
    /// `log₂` ratio of successive raw differences on the three finest grids.
    pub observed_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub half_width: f64,
    /// Interval counts of every rung, coarse to fine.
    pub points: Vec<usize>,
    /// Raw eigenvalues per rung.
    pub raw: Vec<Vec<f64>>,
    pub levels: Vec<LevelReport>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Refined {
    pub eigenvalues: Vec<f64>,
    pub report: ConvergenceReport,
    /// Eigenfunctions of the finest rung, carrying the extrapolated
    /// eigenvalues and their last change as convergence estimate.
    pub finest: GridSolution,
}

/// Refines the lowest `n_levels` eigenvalues to tolerance `tol` with default
/// settings otherwise.
pub fn refine(spec: &PotentialSpec, n_levels: usize, tol: f64) -> Result<Refined> {
    refine_with(spec, n_levels, &RefineOptions { tol, ..RefineOptions::default() })
}

pub fn refine_with(spec: &PotentialSpec, n_levels: usize, opts: &RefineOptions) -> Result<Refined> {
    if !(opts.tol >= 1e-12) {
        return Err(Error::InvalidParameter(format!("refinement tolerance {} is below 1e-12", opts.tol)));
    }
    if n_levels == 0 {
        return Err(Error::InvalidParameter("at least one level is required".into()));
    }
    if opts.initial_points < 400 {
        return Err(Error::InvalidParameter("at least 400 initial intervals are required".into()));
    }
    let mut half_width = match opts.half_width {
        Some(l) if l > 0.0 => l,
        Some(l) => return Err(Error::InvalidParameter(format!("box half-width {l} must be positive"))),
        None => auto_half_width(spec, n_levels)?,
    };
    for _ in 0..8 {
        match ladder(spec, n_levels, half_width, opts) {
            Err(Error::DomainTooSmall { .. }) => half_width *= 1.25,
            other => return other,
        }
    }
    Err(Error::RefinementFailed("box kept growing without containing the top level".into()))
}

fn ladder(spec: &PotentialSpec, n_levels: usize, half_width: f64, opts: &RefineOptions) -> Result<Refined> {
    let p = opts.scheme.order() as i32;
    let mut raw: Vec<Vec<f64>> = Vec::new();
    let mut points = Vec::new();
    // tableau[k][j]: j-th extrapolation using rungs k−j..=k
    let mut tableau: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut converged = false;
    let mut change = vec![f64::INFINITY; n_levels];
    for rung in 0..=opts.max_halvings {
        let m = opts.initial_points << rung;
        let sol = solve_points(spec, n_levels, half_width, m, opts.scheme, false)?;
        points.push(m);
        let mut row = vec![sol.eigenvalues.clone()];
        for j in 1..=rung.min(2) {
            let factor = 2f64.powi(p + 2 * (j as i32 - 1)) - 1.0;
            let finer = &row[j - 1];
            let coarser = &tableau[rung - 1][j - 1];
            row.push(finer.iter().zip(coarser).map(|(f, c)| f + (f - c) / factor).collect());
        }
        raw.push(sol.eigenvalues);
        if rung > 0 {
            let best = row.last().unwrap();
            let prev = tableau[rung - 1].last().unwrap();
            change = best.iter().zip(prev).map(|(b, q)| (b - q).abs()).collect();
            let floor = bisection_floor(spec, half_width, m);
            converged = rung >= 2
                && change
                    .iter()
                    .zip(best)
                    .all(|(d, e)| *d < (opts.tol * e.abs().max(1.0)).max(floor));
        }
        tableau.push(row);
        if converged {
            break;
        }
    }
    let best = tableau.last().unwrap().last().unwrap().clone();
    let finest_points = *points.last().unwrap();
    let mut finest = solve_points(spec, n_levels, half_width, finest_points, opts.scheme, true)?;
    check_walls(&finest)?;
    finest.eigenvalues = best.clone();
    finest.convergence_estimate = change.clone();
    let levels = (0..n_levels)
        .map(|n| LevelReport {
            level: n,
            eigenvalue: best[n],
            change: change[n],
            observed_order: observed_order(&raw, n),
        })
        .collect();
    let report = ConvergenceReport {
        scheme: opts.scheme,
        half_width,
        points,
        raw,
        levels,
        converged,
    };
    if !converged {
        return Err(Error::RefinementFailed(format!(
            "levels still moving by up to {:e} after {} rungs",
            change.iter().fold(0.0f64, |m, d| m.max(*d)),
            report.points.len()
        )));
    }
    Ok(Refined { eigenvalues: best, report, finest })
}

/// Resolution of the Sturm-count bisection on `m` intervals: a few ulps of
/// the matrix norm. Changes below it are rounding noise.
fn bisection_floor(spec: &PotentialSpec, half_width: f64, m: usize) -> f64 {
    let h = 2.0 * half_width / m as f64;
    let xi = spec.xi();
    let top = spec.value(xi + half_width).max(spec.value(xi - half_width)) - spec.value(xi);
    4.0 * f64::EPSILON * (2.0 / (h * h) + top.abs())
}

fn observed_order(raw: &[Vec<f64>], n: usize) -> f64 {
    if raw.len() < 3 {
        return f64::NAN;
    }
    let k = raw.len();
    let d1 = raw[k - 2][n] - raw[k - 3][n];
    let d2 = raw[k - 1][n] - raw[k - 2][n];
    (d1 / d2).abs().log2()
}

/// Observed convergence order of the raw eigenvalues on three grids `h`,
/// `h/2`, `h/4`.
pub fn three_grid_order(
    spec: &PotentialSpec,
    n_levels: usize,
    half_width: f64,
    points: usize,
    scheme: Scheme,
) -> Result<Vec<f64>> {
    let raw = (0..3)
        .map(|k| solve_points(spec, n_levels, half_width, points << k, scheme, false).map(|s| s.eigenvalues))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n_levels).map(|n| observed_order(&raw, n)).collect())
}

/// Offset `d > 0` with `U(ξ+d) − U(ξ) = E − U(ξ)`.
fn turning_point(spec: &PotentialSpec, energy: f64) -> f64 {
    let xi = spec.xi();
    let floor = spec.value(xi);
    let f = |d: f64| spec.value(xi + d) - energy;
    if energy <= floor {
        return 0.0;
    }
    let mut hi = characteristic_length(spec);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest offset past the turning point where the WKB action reaches
/// `action`.
fn decay_distance(spec: &PotentialSpec, energy: f64, action: f64) -> f64 {
    let xi = spec.xi();
    let d0 = turning_point(spec, energy);
    let step = characteristic_length(spec) / 200.0;
    let kappa = |d: f64| (2.0 * (spec.value(xi + d) - energy)).max(0.0).sqrt();
    let mut d = d0;
    let mut acc = 0.0;
    while acc < action {
        acc += 0.5 * step * (kappa(d) + kappa(d + step));
        d += step;
    }
    d
}

/// Box half-width: the larger of 1.8× the top turning point, the point where
/// the top level has decayed by `e^{-18}` and the point where `U ≥ 3E`.
pub fn auto_half_width(spec: &PotentialSpec, n_levels: usize) -> Result<f64> {
    let a = characteristic_length(spec);
    let mut l = a * (4.0 + 2.0 * (n_levels as f64).sqrt());
    for _ in 0..20 {
        let sol = solve_points(spec, n_levels, l, 400, Scheme::SecondDifference, false)?;
        let top = *sol.eigenvalues.last().unwrap() * 1.05;
        let floor = spec.value(spec.xi());
        let need = (1.8 * turning_point(spec, top))
            .max(decay_distance(spec, top, WKB_ACTION))
            .max(turning_point(spec, floor + 3.0 * (top - floor)));
        if need <= l {
            return Ok(need);
        }
        l = need * 1.2;
    }
    Err(Error::RefinementFailed("could not size the solver box".into()))
}

/// `|⟨−D²⟩ − ⟨(x−ξ)U′⟩|` for each level on the solution grid, with the
/// trapezoidal rule and a three-point (second-difference solutions) or
/// five-point (Numerov solutions) stencil for `D²`.
pub fn virial_residual(solution: &GridSolution, spec: &PotentialSpec) -> Vec<f64> {
    let h = solution.step;
    let xi = spec.xi();
    let lever: Vec<f64> = solution
        .xs()
        .into_iter()
        .map(|x| (x - xi) * spec.evaluate(x).1)
        .collect();
    solution
        .eigenfunctions
        .iter()
        .map(|psi| {
            let m = psi.len() as isize;
            let at = |j: isize| if j < 0 || j >= m { 0.0 } else { psi[j as usize] };
            let mut kinetic = 0.0;
            let mut force = 0.0;
            for (i, v) in psi.iter().enumerate() {
                let j = i as isize;
                let lap = match solution.scheme {
                    Scheme::SecondDifference => 2.0 * v - at(j - 1) - at(j + 1),
                    Scheme::Numerov => {
                        (30.0 * v - 16.0 * (at(j - 1) + at(j + 1)) + at(j - 2) + at(j + 2)) / 12.0
                    }
                };
                kinetic += v * lap;
                force += v * v * lever[i];
            }
            (kinetic / h - h * force).abs()
        })
        .collect()
}
