//! Command-line driver behind the `virial` binary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 failed
//! scaling audit.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orthopoly::Construction;
use crate::potentials::{parse_key_values, parse_list, PotentialSpec};
use crate::refsolver::{RefineOptions, Scheme};
use crate::spectra::{compute_spectrum, scaling_audit_with, ScalingTolerances, SpectrumOptions};
use crate::tables::{anharmonic_sweep, error_table, log_spaced, wavefunctions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_AUDIT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    SecondDifference,
    Numerov,
}

#[derive(Parser, Debug)]
#[command(name = "virial", version, about = "Parameter-free virial ansatz spectra for symmetric convex potentials")]
pub struct Cli {
    /// Output file (standard output when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Relative tolerance of the reference eigenvalue refinement
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Accepted for scripted runs; no computation here is random
    #[arg(long, global = true)]
    pub seedless: bool,

    #[arg(long, global = true)]
    pub quiet: bool,

    /// key=value file whose entries override command-line flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Discretization used by the reference solver
    #[arg(long, global = true, value_enum, default_value_t = SchemeArg::SecondDifference)]
    pub scheme: SchemeArg,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PotentialArgs {
    #[arg(long, default_value_t = 2)]
    pub kappa: u32,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,

    /// Use ½ω²x² + λx⁴ instead of λx^{2κ}
    #[arg(long)]
    pub quartic_anharmonic: bool,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega: f64,

    /// Even-polynomial coefficients c2,c4,… (replaces the monomial)
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,

    /// Location of the minimum
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub xi: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reference and ansatz energies, relative errors and γ factors
    Spectrum {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
    },
    /// Relative-error matrix ε_n over several κ
    ErrorTable {
        #[arg(long, default_value = "2,3,4,5")]
        kappas: String,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Coupling-constant scaling audit of λx^{2κ}
    ScalingCheck {
        #[arg(long, default_value_t = 2)]
        kappa: u32,
        #[arg(long, default_value = "0.1,0.5,1.0,1.5", allow_hyphen_values = true)]
        lambdas: String,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        /// Multiplies every pass threshold of the audit
        #[arg(long, default_value_t = 1.0)]
        threshold_scale: f64,
    },
    /// Grid data of ψ_n and χ_n, optionally with a quartic-anharmonic λ sweep
    ExportWavefunctions {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Approximate number of grid samples
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Also write E_n and ε_n of ½ω²x² + λx⁴ along a log-spaced λ grid
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 1e-3)]
        sweep_min: f64,
        #[arg(long, default_value_t = 1e3)]
        sweep_max: f64,
        #[arg(long, default_value_t = 25)]
        sweep_points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    ErrorTable,
    ScalingCheck,
    ExportWavefunctions,
}

/// Fully resolved run settings: flags first, then config-file overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub potential: Option<PotentialSpec>,
    pub n_max: usize,
    pub kappas: Vec<u32>,
    pub lambdas: Vec<f64>,
    pub tol: f64,
    pub scheme: Scheme,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub quiet: bool,
    pub points: usize,
    /// `(ω, λ list)` of the anharmonic sweep.
    pub sweep: Option<(f64, Vec<f64>)>,
    pub audit_tolerances: ScalingTolerances,
}

fn potential_map(p: &PotentialArgs) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let kind = if p.coeffs.is_some() {
        "even-polynomial"
    } else if p.quartic_anharmonic {
        "quartic-anharmonic"
    } else {
        "monomial"
    };
    m.insert("kind".into(), kind.into());
    m.insert("kappa".into(), p.kappa.to_string());
    m.insert("lambda".into(), format!("{:?}", p.lambda));
    m.insert("omega".into(), format!("{:?}", p.omega));
    m.insert("xi".into(), format!("{:?}", p.xi));
    if let Some(c) = &p.coeffs {
        m.insert("coeffs".into(), c.clone());
    }
    m
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{raw}'")))
}

fn parse_kappas(raw: &str) -> Result<Vec<u32>> {
    let list = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value::<u32>("kappas", s))
        .collect::<Result<Vec<_>>>()?;
    if list.is_empty() {
        return Err(Error::Config("the kappa list is empty".into()));
    }
    Ok(list)
}

fn parse_bool(key: &str, raw: &str) -> Result<bool> {
    match raw.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("{key}: '{other}' is not a boolean"))),
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let overrides = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                parse_key_values(&text)?
            }
            None => BTreeMap::new(),
        };
        Self::resolve_with(cli, &overrides)
    }

    pub fn resolve_with(cli: &Cli, overrides: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| overrides.get(k).map(String::as_str);
        let mut cfg = RunConfig {
            command: CommandKind::Spectrum,
            potential: None,
            n_max: 5,
            kappas: Vec::new(),
            lambdas: Vec::new(),
            tol: cli.tol,
            scheme: match cli.scheme {
                SchemeArg::SecondDifference => Scheme::SecondDifference,
                SchemeArg::Numerov => Scheme::Numerov,
            },
            out: cli.out.clone(),
            format: cli.format,
            quiet: cli.quiet,
            points: 401,
            sweep: None,
            audit_tolerances: ScalingTolerances::default(),
        };
        let mut potential = None;
        let mut sweep_range = None;
        match &cli.command {
            Command::Spectrum { potential: p, nmax } => {
                potential = Some(potential_map(p));
                cfg.n_max = *nmax;
            }
            Command::ErrorTable { kappas, nmax } => {
                cfg.command = CommandKind::ErrorTable;
                cfg.kappas = parse_kappas(get("kappas").unwrap_or(kappas))?;
                cfg.n_max = *nmax;
            }
            Command::ScalingCheck {
                kappa,
                lambdas,
                nmax,
                threshold_scale,
            } => {
                cfg.command = CommandKind::ScalingCheck;
                cfg.kappas = vec![match get("kappa") {
                    Some(k) => parse_value("kappa", k)?,
                    None => *kappa,
                }];
                cfg.lambdas = parse_list(get("lambdas").unwrap_or(lambdas))?;
                cfg.n_max = *nmax;
                let scale: f64 = match get("threshold-scale") {
                    Some(v) => parse_value("threshold-scale", v)?,
                    None => *threshold_scale,
                };
                if !(scale > 0.0) {
                    return Err(Error::Config(format!("threshold-scale must be positive, got {scale}")));
                }
                let t = ScalingTolerances::default();
                cfg.audit_tolerances = ScalingTolerances {
                    coefficient: t.coefficient * scale,
                    energy: t.energy * scale,
                    pointwise: t.pointwise * scale,
                    eps_spread: t.eps_spread * scale,
                };
            }
            Command::ExportWavefunctions {
                potential: p,
                nmax,
                points,
                sweep,
                sweep_min,
                sweep_max,
                sweep_points,
            } => {
                cfg.command = CommandKind::ExportWavefunctions;
                potential = Some(potential_map(p));
                cfg.n_max = *nmax;
                cfg.points = *points;
                let on = match get("sweep") {
                    Some(v) => parse_bool("sweep", v)?,
                    None => *sweep,
                };
                if on {
                    let lo = get("sweep-min").map(|v| parse_value("sweep-min", v)).transpose()?.unwrap_or(*sweep_min);
                    let hi = get("sweep-max").map(|v| parse_value("sweep-max", v)).transpose()?.unwrap_or(*sweep_max);
                    let count = get("sweep-points")
                        .map(|v| parse_value("sweep-points", v))
                        .transpose()?
                        .unwrap_or(*sweep_points);
                    sweep_range = Some((lo, hi, count, p.omega));
                }
            }
        }
        if let Some(v) = get("nmax").or(get("n-max")) {
            cfg.n_max = parse_value("nmax", v)?;
        }
        if let Some(v) = get("points") {
            cfg.points = parse_value("points", v)?;
        }
        if let Some(v) = get("tol") {
            cfg.tol = parse_value("tol", v)?;
        }
        if let Some(v) = get("out") {
            cfg.out = Some(PathBuf::from(v));
        }
        if let Some(v) = get("quiet") {
            cfg.quiet = parse_bool("quiet", v)?;
        }
        if let Some(v) = get("format") {
            cfg.format = Format::from_str(v, true).map_err(|_| Error::Config(format!("format: unknown '{v}'")))?;
        }
        if let Some(v) = get("scheme") {
            cfg.scheme = match v {
                "second-difference" => Scheme::SecondDifference,
                "numerov" => Scheme::Numerov,
                other => return Err(Error::Config(format!("scheme: unknown '{other}'"))),
            };
        }
        if let Some(mut map) = potential {
            for key in ["kind", "kappa", "lambda", "omega", "coeffs", "xi"] {
                if let Some(v) = get(key) {
                    map.insert(key.into(), v.into());
                }
            }
            if let Some((lo, hi, count, omega)) = sweep_range {
                let omega = match map.get("omega") {
                    Some(v) => parse_value("omega", v)?,
                    None => omega,
                };
                cfg.sweep = Some((omega, log_spaced(lo, hi, count)?));
            }
            cfg.potential = Some(PotentialSpec::from_key_values(&map)?.validate()?);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol >= 1e-12) {
            return Err(Error::Config(format!("tol = {} must be at least 1e-12", self.tol)));
        }
        if self.n_max > 12 {
            return Err(Error::Config(format!("nmax = {} exceeds the supported 12", self.n_max)));
        }
        if self.command == CommandKind::ScalingCheck {
            if self.lambdas.is_empty() {
                return Err(Error::Config("the lambda list is empty".into()));
            }
            if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0)) {
                return Err(Error::Config(format!("scaling needs lambda > 0, got {l}")));
            }
        }
        Ok(())
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        SpectrumOptions {
            construction: Construction::ThreeTerm,
            refine: RefineOptions {
                scheme: self.scheme,
                tol: self.tol,
                ..RefineOptions::default()
            },
        }
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> i32 {
    let cfg = match RunConfig::resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match execute(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() || matches!(e, Error::Io(_)) {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// `results.csv` → `results_<suffix>.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}_{suffix}.{ext}"),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Runs a resolved configuration and returns the exit code.
pub fn execute(cfg: &RunConfig) -> Result<i32> {
    let opts = cfg.spectrum_options();
    let note = |msg: String| {
        if !cfg.quiet {
            eprintln!("{msg}");
        }
    };
    match cfg.command {
        CommandKind::Spectrum => {
            let spec = cfg.potential.as_ref().expect("spectrum has a potential");
            let report = compute_spectrum(spec, cfg.n_max, &opts)?;
            let mut out = open_output(cfg.out.as_deref())?;
            match cfg.format {
                Format::Csv => report.write_csv(&mut out)?,
                Format::Json => write_json(&mut out, &report)?,
            }
            out.flush()?;
            note(format!("spectrum of {spec}: {} levels", report.rows.len()));
            Ok(EXIT_OK)
        }
        CommandKind::ErrorTable => {
            let table = error_table(&cfg.kappas, cfg.n_max, &opts)?;
            match cfg.format {
                Format::Csv => {
                    let mut out = open_output(cfg.out.as_deref())?;
                    table.write_csv(&mut out)?;
                    match &cfg.out {
                        Some(p) => {
                            let series = sibling_path(p, "series");
                            table.write_series_csv(File::create(&series)?)?;
                            note(format!("series written to {}", series.display()));
                        }
                        None => {
                            writeln!(out)?;
                            table.write_series_csv(&mut out)?;
                        }
                    }
                    out.flush()?;
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Doc<'a> {
                        table: &'a crate::tables::ErrorTable,
                        series: Vec<crate::tables::SeriesPoint>,
                    }
                    let mut out = open_output(cfg.out.as_deref())?;
                    write_json(&mut out, &Doc { table: &table, series: table.series() })?;
                    out.flush()?;
                }
            }
            Ok(EXIT_OK)
        }
        CommandKind::ScalingCheck => {
            let audit = scaling_audit_with(cfg.kappas[0], &cfg.lambdas, cfg.n_max, &opts)?;
            let mut out = open_output(cfg.out.as_deref())?;
            match cfg.format {
                Format::Csv => audit.write_csv(&mut out)?,
                Format::Json => write_json(&mut out, &audit)?,
            }
            out.flush()?;
            let tol = cfg.audit_tolerances;
            let worst = audit.worst();
            if audit.passes(&tol) {
                note(format!("scaling audit passed: {worst:?}"));
                Ok(EXIT_OK)
            } else {
                eprintln!("scaling audit failed: worst {worst:?}, limits {tol:?}");
                Ok(EXIT_AUDIT)
            }
        }
        CommandKind::ExportWavefunctions => {
            let spec = cfg.potential.as_ref().expect("export has a potential");
            let table = wavefunctions(spec, cfg.n_max, cfg.points, &opts)?;
            let mut out = open_output(cfg.out.as_deref())?;
            match cfg.format {
                Format::Csv => table.write_csv(&mut out)?,
                Format::Json => write_json(&mut out, &table)?,
            }
            if let Some((omega, lambdas)) = &cfg.sweep {
                let sweep = anharmonic_sweep(*omega, lambdas, cfg.n_max, &opts)?;
                match (&cfg.out, cfg.format) {
                    (Some(p), Format::Csv) => sweep.write_csv(File::create(sibling_path(p, "sweep"))?)?,
                    (Some(p), Format::Json) => {
                        let mut f = BufWriter::new(File::create(sibling_path(p, "sweep"))?);
                        write_json(&mut f, &sweep)?;
                        f.flush()?;
                    }
                    (None, Format::Csv) => {
                        writeln!(out)?;
                        sweep.write_csv(&mut out)?;
                    }
                    (None, Format::Json) => write_json(&mut out, &sweep)?,
                }
                note(format!("sweep over {} coupling values", lambdas.len()));
            }
            out.flush()?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("virial").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn negative_lambda_is_a_config_error() {
        let cli = parse(&["spectrum", "--kappa", "2", "--lambda", "-1"]);
        let err = RunConfig::resolve(&cli).unwrap_err();
        assert!(matches!(err, Error::NotConvex(_)));
        assert_eq!(run(&cli), EXIT_CONFIG);
    }

    #[test]
    fn config_overrides_flags() {
        let cli = parse(&["spectrum", "--kappa", "2", "--nmax", "3"]);
        let map = parse_key_values("kappa = 3\nnmax=2\nformat=json\n").unwrap();
        let cfg = RunConfig::resolve_with(&cli, &map).unwrap();
        assert_eq!(cfg.potential, Some(PotentialSpec::monomial(3, 1.0)));
        assert_eq!(cfg.n_max, 2);
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn zero_lambda_in_scaling_list() {
        let cli = parse(&["scaling-check", "--lambdas", "0,1"]);
        assert!(RunConfig::resolve(&cli).unwrap_err().is_config());
        assert_eq!(run(&cli), EXIT_CONFIG);
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling_path(Path::new("/tmp/t2.csv"), "series"), PathBuf::from("/tmp/t2_series.csv"));
        assert_eq!(sibling_path(Path::new("table"), "sweep"), PathBuf::from("table_sweep"));
    }
}
