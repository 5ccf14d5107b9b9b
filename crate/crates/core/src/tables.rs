//! Derived data tables: relative-error matrices across κ, coupling sweeps of
//! the quartic anharmonic oscillator and wavefunction overlays. Each table
//! writes CSV and JSON and reads its own CSV back.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::refsolver::refine_with;
use crate::spectra::{ansatz, build_basis, compute_spectrum, SpectrumOptions};

/// `ε_n^{(κ)}` for `n = 0..=n_max` and a list of κ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub kappas: Vec<u32>,
    pub n_max: usize,
    /// `eps[n][k]` for `kappas[k]`.
    pub eps: Vec<Vec<f64>>,
}

/// One point of an `(n, ε)` series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub kappa: u32,
    pub n: usize,
    pub eps_percent: f64,
}

/// Relative errors of `x^{2κ}` ansätze (unit coupling; ε does not depend on λ).
pub fn error_table(kappas: &[u32], n_max: usize, opts: &SpectrumOptions) -> Result<ErrorTable> {
    if kappas.is_empty() {
        return Err(Error::Config("the kappa list is empty".into()));
    }
    let columns = kappas
        .par_iter()
        .map(|&k| {
            let rep = compute_spectrum(&PotentialSpec::monomial(k, 1.0), n_max, opts)?;
            Ok(rep.rows.iter().map(|r| r.eps_percent).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let eps = (0..=n_max)
        .map(|n| columns.iter().map(|c| c[n]).collect())
        .collect();
    Ok(ErrorTable {
        kappas: kappas.to_vec(),
        n_max,
        eps,
    })
}

impl ErrorTable {
    pub fn get(&self, kappa: u32, n: usize) -> Option<f64> {
        let k = self.kappas.iter().position(|v| *v == kappa)?;
        self.eps.get(n).map(|row| row[k])
    }

    pub fn series(&self) -> Vec<SeriesPoint> {
        let mut out = Vec::new();
        for (k, kappa) in self.kappas.iter().enumerate() {
            for (n, row) in self.eps.iter().enumerate() {
                out.push(SeriesPoint {
                    kappa: *kappa,
                    n,
                    eps_percent: row[k],
                });
            }
        }
        out
    }

    /// Matrix with header `n,kappa_2,…`, values to 4 decimals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n".to_string()];
        header.extend(self.kappas.iter().map(|k| format!("kappa_{k}")));
        w.write_record(&header)?;
        for (n, row) in self.eps.iter().enumerate() {
            let mut rec = vec![n.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:.4}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let kappas = rdr
            .headers()?
            .iter()
            .skip(1)
            .map(|h| {
                h.strip_prefix("kappa_")
                    .and_then(|k| k.parse::<u32>().ok())
                    .ok_or_else(|| Error::Config(format!("bad error-table column '{h}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut eps = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .skip(1)
                .map(|v| v.parse::<f64>().map_err(|_| Error::Config(format!("bad value '{v}'"))))
                .collect::<Result<Vec<_>>>()?;
            eps.push(row);
        }
        Ok(ErrorTable {
            kappas,
            n_max: eps.len().saturating_sub(1),
            eps,
        })
    }

    /// Long format `kappa,n,eps_percent` at full precision.
    pub fn write_series_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in self.series() {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_series_csv<R: Read>(input: R) -> Result<Vec<SeriesPoint>> {
        let mut rdr = csv::Reader::from_reader(input);
        rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
    }
}

/// One `(λ, n)` point of a coupling sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub n: usize,
    #[serde(rename = "E_ref")]
    pub e_ref: f64,
    #[serde(rename = "E_virial")]
    pub e_virial: f64,
    pub eps_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub omega: f64,
    pub n_max: usize,
    pub points: Vec<SweepPoint>,
}

/// `count` values spaced evenly in `log λ` from `lo` to `hi`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || count == 0 {
        return Err(Error::Config(format!(
            "log spacing needs 0 < lo <= hi and at least one point, got {lo}..{hi} x {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..count)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect())
}

/// `E_n` and `ε_n` of `½ω²x² + λx⁴` along `lambdas`.
pub fn anharmonic_sweep(omega: f64, lambdas: &[f64], n_max: usize, opts: &SpectrumOptions) -> Result<SweepTable> {
    if lambdas.is_empty() {
        return Err(Error::Config("the lambda list is empty".into()));
    }
    let blocks = lambdas
        .par_iter()
        .map(|&lambda| {
            let spec = PotentialSpec::quartic_anharmonic(omega, lambda).validate()?;
            let rep = compute_spectrum(&spec, n_max, opts)?;
            Ok(rep
                .rows
                .into_iter()
                .map(|r| SweepPoint {
                    lambda,
                    n: r.n,
                    e_ref: r.e_ref,
                    e_virial: r.e_virial,
                    eps_percent: r.eps_percent,
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        omega,
        n_max,
        points: blocks.into_iter().flatten().collect(),
    })
}

impl SweepTable {
    /// `ε_n` along the sweep, in λ order.
    pub fn eps_series(&self, n: usize) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.n == n)
            .map(|p| (p.lambda, p.eps_percent))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepPoint>> {
        let mut rdr = csv::Reader::from_reader(input);
        rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
    }
}

/// Reference eigenfunctions `ψ_n` and ansätze `χ_n` on a shared uniform grid.
/// `(x, psi, chi)` as read back from CSV.
pub type WavefunctionColumns = (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionTable {
    pub spec: PotentialSpec,
    pub x: Vec<f64>,
    pub psi: Vec<Vec<f64>>,
    pub chi: Vec<Vec<f64>>,
}

/// Overlay data for `n = 0..=n_max` with about `points` samples. Each `ψ_n` is
/// signed to have positive overlap with `χ_n`.
pub fn wavefunctions(
    spec: &PotentialSpec,
    n_max: usize,
    points: usize,
    opts: &SpectrumOptions,
) -> Result<WavefunctionTable> {
    if points < 3 {
        return Err(Error::Config("at least 3 grid points are required".into()));
    }
    let spec = spec.clone().validate()?;
    let refined = refine_with(&spec, n_max + 1, &opts.refine)?;
    let sol = &refined.finest;
    let basis = build_basis(&spec, n_max, opts.construction)?;
    let stride = (sol.len() / (points - 1)).max(1);
    // keep the node at ξ so the samples are symmetric about it
    let centre = sol.len() / 2;
    let idx: Vec<usize> = (centre % stride..sol.len()).step_by(stride).collect();
    let x: Vec<f64> = idx.iter().map(|i| sol.x(*i)).collect();
    let mut psi = Vec::with_capacity(n_max + 1);
    let mut chi = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let state = ansatz(&basis, n)?;
        let c: Vec<f64> = sol.xs().iter().map(|x| state.value(*x)).collect();
        let overlap: f64 = c.iter().zip(&sol.eigenfunctions[n]).map(|(a, b)| a * b).sum();
        let sign = if overlap < 0.0 { -1.0 } else { 1.0 };
        psi.push(idx.iter().map(|i| sign * sol.eigenfunctions[n][*i]).collect());
        chi.push(idx.iter().map(|i| c[*i]).collect());
    }
    Ok(WavefunctionTable { spec, x, psi, chi })
}

impl WavefunctionTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string()];
        header.extend((0..self.psi.len()).map(|n| format!("psi_{n}")));
        header.extend((0..self.chi.len()).map(|n| format!("chi_{n}")));
        w.write_record(&header)?;
        for (i, x) in self.x.iter().enumerate() {
            let mut rec = vec![format!("{x:.10e}")];
            rec.extend(self.psi.iter().map(|f| format!("{:.12e}", f[i])));
            rec.extend(self.chi.iter().map(|f| format!("{:.12e}", f[i])));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `(x, psi, chi)` columns back; the spec is not stored in CSV.
    pub fn read_csv<R: Read>(input: R) -> Result<WavefunctionColumns> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        let n_psi = headers.iter().filter(|h| h.starts_with("psi_")).count();
        let n_chi = headers.iter().filter(|h| h.starts_with("chi_")).count();
        let (mut x, mut psi, mut chi) = (Vec::new(), vec![Vec::new(); n_psi], vec![Vec::new(); n_chi]);
        for rec in rdr.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|v| v.parse::<f64>().map_err(|_| Error::Config(format!("bad value '{v}'"))))
                .collect::<Result<Vec<_>>>()?;
            x.push(vals[0]);
            for n in 0..n_psi {
                psi[n].push(vals[1 + n]);
            }
            for n in 0..n_chi {
                chi[n].push(vals[1 + n_psi + n]);
            }
        }
        Ok((x, psi, chi))
    }
}
