//! Orthonormal polynomials for the virial weight σ.
//!
//! Two independent constructions are provided: Gram–Schmidt on the monomials
//! `(x−ξ)^n` and the three-term recurrence. Both compute every inner product by
//! quadrature of evaluated polynomial products; neither assembles a Hankel
//! moment matrix. Polynomials live in the shifted coordinate `t = x − ξ`.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::virial::VirialWeight;

/// Default cap on the polynomial order.
pub const DEFAULT_MAX_ORDER: usize = 12;

/// Squared norms below this value abort the construction.
pub const ILL_CONDITIONED_NORM_SQ: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Construction {
    GramSchmidt,
    #[default]
    ThreeTerm,
}

#[derive(Debug, Clone, Copy)]
pub struct BasisOptions {
    pub max_order: usize,
    /// Extra orthogonalization sweeps in Gram–Schmidt.
    pub reorthogonalize: bool,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions {
            max_order: DEFAULT_MAX_ORDER,
            reorthogonalize: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrthoBasis {
    n_max: usize,
    /// `β_n`, index 0 unused.
    recur_b: Vec<f64>,
    /// `⟨t φ_{n−1} φ_{n−2}⟩`, zero for n < 2.
    recur_c: Vec<f64>,
    /// `coeffs[n][j] = α_nj`.
    coeffs: Vec<Vec<f64>>,
    weight: Arc<VirialWeight>,
    construction: Construction,
    conditioning: f64,
}

impl OrthoBasis {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn weight(&self) -> &Arc<VirialWeight> {
        &self.weight
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Ratio of the smallest to the largest squared norm met before
    /// normalization.
    pub fn conditioning(&self) -> f64 {
        self.conditioning
    }

    /// `α_nj` for `j ≤ n`.
    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn recurrence_b(&self) -> &[f64] {
        &self.recur_b
    }

    pub fn recurrence_c(&self) -> &[f64] {
        &self.recur_c
    }

    /// `(φ_n(x), φ_n′(x))` by the three-term recurrence.
    pub fn eval(&self, n: usize, x: f64) -> Result<(f64, f64)> {
        if n > self.n_max {
            return Err(Error::OrderOutOfRange {
                order: n,
                max: self.n_max,
            });
        }
        Ok(recurrence_eval(&self.recur_b, &self.recur_c, n, x - self.weight.xi()))
    }

    /// `φ_n(x)` from the monomial coefficients (Horner).
    pub fn eval_expanded(&self, n: usize, x: f64) -> Result<f64> {
        let row = self.coeffs.get(n).ok_or(Error::OrderOutOfRange {
            order: n,
            max: self.n_max,
        })?;
        Ok(horner(row, x - self.weight.xi()))
    }

    /// `max_{i,j} |⟨φ_i φ_j⟩_σ − δ_ij|` with φ taken from the coefficient table.
    pub fn orthonormality_defect(&self) -> Result<f64> {
        let xi = self.weight.xi();
        let mut worst = 0.0f64;
        for i in 0..=self.n_max {
            for j in 0..=i {
                let (a, b) = (&self.coeffs[i], &self.coeffs[j]);
                let ip = self.weight.expectation(|x| horner(a, x - xi) * horner(b, x - xi))?;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        Ok(worst)
    }

    /// Writes `n,a0,a1,…` rows of the coefficient table.
    pub fn write_coefficients_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n".to_string()];
        header.extend((0..=self.n_max).map(|j| format!("a{j}")));
        w.write_record(&header)?;
        for (n, row) in self.coeffs.iter().enumerate() {
            let mut rec = vec![n.to_string()];
            rec.extend((0..=self.n_max).map(|j| format!("{:.17e}", row.get(j).copied().unwrap_or(0.0))));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a table written by [`OrthoBasis::write_coefficients_csv`].
pub fn read_coefficients_csv<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let n: usize = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Io("bad row index".into()))?;
        let mut row = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let v: f64 = rec
                .get(j + 1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Io(format!("row {n}: bad coefficient {j}")))?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn check_inputs(weight: &VirialWeight, n_max: usize, opts: &BasisOptions) -> Result<()> {
    if !weight.is_normalized() {
        return Err(Error::InvalidParameter("orthogonal polynomials need a normalized weight".into()));
    }
    if n_max > opts.max_order {
        return Err(Error::OrderOutOfRange {
            order: n_max,
            max: opts.max_order,
        });
    }
    Ok(())
}

/// Gram–Schmidt orthonormalization of `1, t, t², …, t^{n_max}`.
pub fn gram_schmidt(weight: Arc<VirialWeight>, n_max: usize) -> Result<OrthoBasis> {
    gram_schmidt_with(weight, n_max, &BasisOptions::default())
}

pub fn gram_schmidt_with(weight: Arc<VirialWeight>, n_max: usize, opts: &BasisOptions) -> Result<OrthoBasis> {
    check_inputs(&weight, n_max, opts)?;
    let xi = weight.xi();
    let mut coeffs: Vec<Vec<f64>> = vec![vec![1.0]];
    let mut norms = Vec::with_capacity(n_max);
    let sweeps = if opts.reorthogonalize { 2 } else { 1 };
    for n in 1..=n_max {
        let mut r = vec![0.0; n + 1];
        r[n] = 1.0;
        for _ in 0..sweeps {
            // modified Gram–Schmidt: project the running remainder
            for (k, phi) in coeffs.iter().enumerate() {
                if (n + k) % 2 == 1 {
                    continue;
                }
                let proj = weight.expectation(|x| {
                    let t = x - xi;
                    horner(&r, t) * horner(phi, t)
                })?;
                for (rj, pj) in r.iter_mut().zip(phi.iter()) {
                    *rj -= proj * pj;
                }
            }
        }
        enforce_parity(&mut r, n);
        let norm_sq = weight.expectation(|x| {
            let p = horner(&r, x - xi);
            p * p
        })?;
        if !(norm_sq > ILL_CONDITIONED_NORM_SQ) {
            return Err(Error::IllConditioned { order: n, norm_sq });
        }
        norms.push(norm_sq);
        let scale = 1.0 / norm_sq.sqrt();
        r.iter_mut().for_each(|c| *c *= scale);
        coeffs.push(r);
    }
    // recurrence constants implied by the leading coefficients
    let mut recur_b = vec![0.0; n_max + 1];
    let mut recur_c = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        recur_b[n] = coeffs[n][n] / coeffs[n - 1][n - 1];
        if n >= 2 {
            recur_c[n] = coeffs[n - 2][n - 2] / coeffs[n - 1][n - 1];
        }
    }
    Ok(OrthoBasis {
        n_max,
        recur_b,
        recur_c,
        coeffs,
        weight,
        construction: Construction::GramSchmidt,
        conditioning: conditioning(&norms),
    })
}

/// Three-term recurrence `φ_n = β_n[t φ_{n−1} − ⟨t φ_{n−1} φ_{n−2}⟩ φ_{n−2}]`.
pub fn three_term(weight: Arc<VirialWeight>, n_max: usize) -> Result<OrthoBasis> {
    three_term_with(weight, n_max, &BasisOptions::default())
}

pub fn three_term_with(weight: Arc<VirialWeight>, n_max: usize, opts: &BasisOptions) -> Result<OrthoBasis> {
    check_inputs(&weight, n_max, opts)?;
    let xi = weight.xi();
    let mut recur_b = vec![0.0; n_max + 1];
    let mut recur_c = vec![0.0; n_max + 1];
    let mut norms = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (b, c) = (&recur_b, &recur_c);
        let coupling = if n >= 2 {
            weight.expectation(|x| {
                let t = x - xi;
                let (p1, p2) = recurrence_pair(b, c, n - 1, t);
                t * p1 * p2
            })?
        } else {
            0.0
        };
        let second = weight.expectation(|x| {
            let t = x - xi;
            let p1 = recurrence_pair(b, c, n - 1, t).0;
            t * t * p1 * p1
        })?;
        let norm_sq = second - coupling * coupling;
        if !(norm_sq > ILL_CONDITIONED_NORM_SQ) {
            return Err(Error::IllConditioned { order: n, norm_sq });
        }
        norms.push(norm_sq);
        recur_b[n] = 1.0 / norm_sq.sqrt();
        recur_c[n] = coupling;
    }
    let coeffs = expand_recurrence(&recur_b, &recur_c, n_max);
    Ok(OrthoBasis {
        n_max,
        recur_b,
        recur_c,
        coeffs,
        weight,
        construction: Construction::ThreeTerm,
        conditioning: conditioning(&norms),
    })
}

fn conditioning(norms: &[f64]) -> f64 {
    if norms.is_empty() {
        return 1.0;
    }
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().copied().fold(0.0, f64::max);
    lo / hi
}

fn enforce_parity(row: &mut [f64], n: usize) {
    for (j, c) in row.iter_mut().enumerate() {
        if (n + j) % 2 == 1 {
            *c = 0.0;
        }
    }
}

/// Monomial coefficients generated by the recurrence.
fn expand_recurrence(b: &[f64], c: &[f64], n_max: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
    for n in 1..=n_max {
        let mut row = vec![0.0; n + 1];
        for (j, a) in rows[n - 1].iter().enumerate() {
            row[j + 1] += a;
        }
        if n >= 2 {
            for (j, a) in rows[n - 2].iter().enumerate() {
                row[j] -= c[n] * a;
            }
        }
        row.iter_mut().for_each(|v| *v *= b[n]);
        enforce_parity(&mut row, n);
        rows.push(row);
    }
    rows
}

/// `(φ_n(t), φ_{n−1}(t))`, with `φ_{−1} = 0`.
fn recurrence_pair(b: &[f64], c: &[f64], n: usize, t: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 1..=n {
        let next = b[k] * (t * cur - c[k] * prev);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

fn recurrence_eval(b: &[f64], c: &[f64], n: usize, t: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for k in 1..=n {
        let p_next = b[k] * (t * p - c[k] * p_prev);
        let d_next = b[k] * (p + t * d - c[k] * d_prev);
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

pub(crate) fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}
