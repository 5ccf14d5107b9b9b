use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use virial_ansatz::spectra::{SpectrumReport, SpectrumRow};
use virial_ansatz::tables::{ErrorTable, SweepTable, WavefunctionTable};

fn virial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virial"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_to_stdout() {
    let out = virial(&["--quiet", "spectrum", "--kappa", "2", "--lambda", "1", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = SpectrumReport::read_csv(out.stdout.as_slice()).unwrap();
    let expected = [(0.66798626, 0.68887235), (2.39364401, 2.43397719), (4.69679538, 4.77567638)];
    assert_eq!(rows.len(), 3);
    for (row, (e_ref, e_ans)) in rows.iter().zip(expected) {
        assert!((row.e_ref - e_ref).abs() < 2e-8);
        assert!((row.e_virial - e_ans).abs() < 2e-8);
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = virial(&["--quiet", "--out", path_arg(p), "spectrum", "--kappa", "3", "--nmax", "3"]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn json_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    let out = virial(&[
        "--quiet",
        "--format",
        "json",
        "--out",
        path_arg(&p),
        "spectrum",
        "--quartic-anharmonic",
        "--omega",
        "1",
        "--lambda",
        "0",
        "--nmax",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = SpectrumReport::read_json(fs::File::open(&p).unwrap()).unwrap();
    // harmonic: every ansatz level is exact
    for SpectrumRow { n, e_ref, e_virial, .. } in &report.rows {
        assert!((e_virial - (*n as f64 + 0.5)).abs() < 1e-10);
        assert!((e_ref - e_virial).abs() < 1e-8);
    }
}

#[test]
fn error_table_with_series() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    let out = virial(&["--quiet", "--out", path_arg(&p), "error-table", "--kappas", "1,2", "--nmax", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let table = ErrorTable::read_csv(fs::File::open(&p).unwrap()).unwrap();
    for n in 0..=3 {
        assert!(table.get(1, n).unwrap() < 1e-5, "harmonic column n = {n}");
    }
    assert!((table.get(2, 0).unwrap() - 3.1267).abs() < 1e-4);
    let series = ErrorTable::read_series_csv(fs::File::open(dir.path().join("t_series.csv")).unwrap()).unwrap();
    assert_eq!(series.len(), 8);
}

#[test]
fn export_wavefunctions_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.csv");
    let out = virial(&[
        "--quiet",
        "--out",
        path_arg(&p),
        "export-wavefunctions",
        "--kappa",
        "2",
        "--nmax",
        "1",
        "--points",
        "201",
        "--sweep",
        "--sweep-points",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (x, psi, chi) = WavefunctionTable::read_csv(fs::File::open(&p).unwrap()).unwrap();
    assert!(x.len() > 150);
    let peak = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    assert!(peak(&chi[0]) < peak(&psi[0]));
    let sweep = SweepTable::read_csv(fs::File::open(dir.path().join("w_sweep.csv")).unwrap()).unwrap();
    assert_eq!(sweep.len(), 10);
}

#[test]
fn scaling_check_passes_and_fails() {
    let ok = virial(&["--quiet", "scaling-check", "--kappa", "2", "--lambdas", "0.5,2", "--nmax", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let strict = virial(&[
        "--quiet",
        "scaling-check",
        "--kappa",
        "2",
        "--lambdas",
        "0.5,2",
        "--nmax",
        "3",
        "--threshold-scale",
        "1e-12",
    ]);
    assert_eq!(strict.status.code(), Some(4));
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(virial(&["--quiet", "spectrum", "--lambda", "-1"]).status.code(), Some(2));
    assert_eq!(virial(&["--quiet", "--tol", "1e-15", "spectrum"]).status.code(), Some(2));
    assert_eq!(virial(&["--quiet", "--config", "/nonexistent/virial.conf", "spectrum"]).status.code(), Some(2));
    assert_eq!(virial(&["spectrum", "--bogus"]).status.code(), Some(2));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# quartic at half coupling\nkappa = 2\nlambda = 0.5\nnmax = 1\nformat = json\n").unwrap();
    let out = virial(&[
        "--quiet",
        "--config",
        path_arg(&conf),
        "spectrum",
        "--kappa",
        "4",
        "--lambda",
        "3",
        "--nmax",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = SpectrumReport::read_json(out.stdout.as_slice()).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert!((report.rows[0].e_virial - 0.54675835).abs() < 1e-8);
    assert!((report.rows[1].e_ref - 1.89983651).abs() < 2e-8);
}
