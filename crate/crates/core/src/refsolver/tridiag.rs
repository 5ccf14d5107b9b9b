//! Symmetric tridiagonal eigenvalues by Sturm-count bisection, eigenvectors by
//! inverse iteration.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix with diagonal `diag` and constant off-diagonal
/// `off`.
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `shift`.
    pub fn count_below(&self, shift: f64) -> usize {
        let off_sq = self.off * self.off;
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut pivot = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            pivot = if i == 0 { d - shift } else { d - shift - off_sq / pivot };
            if pivot == 0.0 {
                pivot = -tiny;
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval.
    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// The `count` lowest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        if count > self.diag.len() {
            return Err(Error::EigensolveFailure(format!(
                "asked for {count} eigenvalues of a {}x{} matrix",
                self.diag.len(),
                self.diag.len()
            )));
        }
        let (lo0, hi0) = self.bounds();
        let mut out = Vec::with_capacity(count);
        let mut floor = lo0;
        for k in 0..count {
            let (mut lo, mut hi) = (floor, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            if !value.is_finite() {
                return Err(Error::EigensolveFailure(format!("level {k} did not bracket")));
            }
            out.push(value);
            floor = lo;
        }
        Ok(out)
    }

    /// Eigenvector for the eigenvalue `value` by inverse iteration, scaled to
    /// unit Euclidean norm.
    pub fn eigenvector(&self, value: f64) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let scale = self.diag.iter().fold(self.off.abs(), |m, d| m.max(d.abs()));
        let shift = value + 4.0 * f64::EPSILON * scale;
        // deterministic start with components in every eigendirection
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
        for _ in 0..3 {
            v = self.solve_shifted(shift, &v)?;
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::EigensolveFailure("inverse iteration broke down".into()));
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(v)
    }

    /// Solves `(T − shift)·x = rhs` by Gaussian elimination with partial
    /// pivoting.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        // rows after elimination: main, first and second superdiagonal
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut du = vec![self.off; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut dl = vec![self.off; n.saturating_sub(1)];
        let mut b = rhs.to_vec();
        let tiny = f64::EPSILON * self.off.abs().max(1.0);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let m = dl[i] / d[i];
                d[i + 1] -= m * du[i];
                b[i + 1] -= m * b[i];
                dl[i] = 0.0;
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - m * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
                b.swap(i, i + 1);
                b[i + 1] -= m * b[i];
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        let mut x = b;
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        Ok(x)
    }
}
