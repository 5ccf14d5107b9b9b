//! Numerov shooting on a uniform grid with Dirichlet walls.
//!
//! The number of sign changes of the left-anchored solution equals the number
//! of discrete eigenvalues below the trial energy, so eigenvalues are located by
//! bisection on that count. Eigenvectors are assembled from a left and a right
//! shot matched at the outer turning point.

use crate::error::{Error, Result};

const RESCALE: f64 = 1e150;

pub struct NumerovGrid {
    /// Potential at the nodes `0..=M`, walls included.
    pub potential: Vec<f64>,
    pub step: f64,
}

impl NumerovGrid {
    fn weights(&self, energy: f64) -> Vec<f64> {
        let h2 = self.step * self.step;
        self.potential
            .iter()
            .map(|u| 1.0 - h2 * 2.0 * (u - energy) / 12.0)
            .collect()
    }

    /// Eigenvalues strictly below `energy`.
    pub fn count_below(&self, energy: f64) -> usize {
        let k = self.weights(energy);
        let m = self.potential.len() - 1;
        let (mut prev, mut cur) = (0.0f64, 1.0f64);
        let mut count = 0;
        for i in 1..m {
            let next = (cur * (12.0 - 10.0 * k[i]) - prev * k[i - 1]) / k[i + 1];
            if next == 0.0 || (next < 0.0) != (cur < 0.0) {
                count += 1;
            }
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE {
                prev /= RESCALE;
                cur /= RESCALE;
            }
        }
        count
    }

    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        let lo0 = self.potential.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi0 = self.potential.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(lo0 + 1.0);
        let mut guard = 0;
        while self.count_below(hi0) < count {
            hi0 = lo0 + 2.0 * (hi0 - lo0);
            guard += 1;
            if guard > 60 {
                return Err(Error::EigensolveFailure("cannot bracket the requested levels".into()));
            }
        }
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
            out.push(0.5 * (lo + hi));
            floor = lo;
        }
        Ok(out)
    }

    /// Interior values `1..M` of the eigenvector, unit Euclidean norm.
    pub fn eigenvector(&self, energy: f64) -> Result<Vec<f64>> {
        let k = self.weights(energy);
        let m = self.potential.len() - 1;
        // outermost classically allowed node on the right is the match point
        let mut mid = (1..m).rev().find(|&i| self.potential[i] <= energy).unwrap_or(m / 2);
        mid = mid.clamp(2, m - 2);
        let mut left = vec![0.0; m + 1];
        left[1] = 1.0;
        for i in 1..mid + 1 {
            left[i + 1] = (left[i] * (12.0 - 10.0 * k[i]) - left[i - 1] * k[i - 1]) / k[i + 1];
            if left[i + 1].abs() > RESCALE {
                left[..=i + 1].iter_mut().for_each(|v| *v /= RESCALE);
            }
        }
        let mut right = vec![0.0; m + 1];
        right[m - 1] = 1.0;
        for i in (mid..m).rev() {
            right[i - 1] = (right[i] * (12.0 - 10.0 * k[i]) - right[i + 1] * k[i + 1]) / k[i - 1];
            if right[i - 1].abs() > RESCALE {
                right[i - 1..].iter_mut().for_each(|v| *v /= RESCALE);
            }
        }
        let (num, den) = (mid - 1..=mid + 1).fold((0.0, 0.0), |(n, d), i| {
            (n + left[i] * right[i], d + right[i] * right[i])
        });
        if !(den > 0.0) {
            return Err(Error::EigensolveFailure("right shot vanished at the match point".into()));
        }
        let scale = num / den;
        let mut v: Vec<f64> = (1..m)
            .map(|i| if i <= mid { left[i] } else { scale * right[i] })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::EigensolveFailure("shooting produced a null vector".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(v)
    }
}
