//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed identity check or I/O error, 2 invalid
//! arguments, 3 series non-convergence (results are still printed).

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::evolution::TimeEvolution;
use crate::heun::{eta_at_half, Precision, SeriesControl};
use crate::limits::check_identities;
use crate::oracle::{
    numeric_floquet, numeric_r_alpha, numeric_trace, symmetry_residuals, IntegratorConfig,
};
use crate::params::{DimensionalParams, PhysicalParams, MIN_SCALED_OMEGA};
use crate::registry::{MethodSettings, Registry};
use crate::sweep::{
    branch_rows, gap_minima, run_sweep, write_branch_csv, write_sweep_csv, BranchScan, SimplexGrid,
    SweepConfig,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;

/// Tolerance for the identity checks run by `oracle`.
const ORACLE_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "rabi-heun",
    version,
    about = "Quasienergies of the linearly driven two-level system"
)]
pub struct Cli {
    /// Worker threads for sweeps and traces (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasienergy, r and alpha at one point.
    Quasi(QuasiArgs),
    /// Full-period trace of the state starting from (1, 0), as CSV.
    Trace(TraceArgs),
    /// Sweep over the barycentric simplex grid, as CSV plus a summary.
    Sweep(SweepArgs),
    /// Branch fan over a frequency range, as CSV plus gap minima.
    Branches(BranchArgs),
    /// Identity checks of the nu -> 0 limit.
    Limits(LimitsArgs),
    /// Monodromy by direct integration, with symmetry checks.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Dimensionless drive amplitude F/omega.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["omega", "omega0", "f_amp"])]
    pub f: Option<f64>,
    /// Dimensionless static field omega0/omega.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["omega", "omega0", "f_amp"])]
    pub nu: Option<f64>,
    /// Static-field frequency, with --omega and --F.
    #[arg(long, allow_negative_numbers = true, requires = "omega")]
    pub omega0: Option<f64>,
    /// Drive frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Drive amplitude, with --omega.
    #[arg(
        long = "F",
        id = "f_amp",
        allow_negative_numbers = true,
        requires = "omega"
    )]
    pub f_amp: Option<f64>,
    /// Skip the accuracy guard on the scaled frequency.
    #[arg(long)]
    pub force: bool,
}

impl PointArgs {
    pub fn resolve(&self) -> Result<(PhysicalParams, Option<DimensionalParams>)> {
        let (p, d) = match self.omega {
            Some(omega) => {
                let d = DimensionalParams::new(
                    self.omega0.unwrap_or(0.0),
                    omega,
                    self.f_amp.unwrap_or(0.0),
                )?;
                non_negative("omega0", d.omega0)?;
                non_negative("F", d.f_amp)?;
                (d.physical(), Some(d))
            }
            None => {
                let f = self.f.unwrap_or(0.0);
                let nu = self.nu.unwrap_or(0.0);
                non_negative("f", f)?;
                non_negative("nu", nu)?;
                (PhysicalParams::new(f, nu)?, None)
            }
        };
        if !self.force && !p.within_accuracy_guard() {
            return Err(Error::InvalidParameter(format!(
                "scaled frequency 1/(1+f+nu) = {:.6} is not above 3/128; pass --force to evaluate anyway",
                p.scaled_omega()
            )));
        }
        Ok((p, d))
    }
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be non-negative (got {x})"
        )));
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Maximum number of series terms.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Working precision of the series: f64 or dd.
    #[arg(long, default_value = "f64")]
    pub precision: Precision,
}

impl SeriesArgs {
    fn control(&self, default_terms: usize) -> Result<SeriesControl> {
        let terms = self.terms.unwrap_or(default_terms);
        if terms == 0 {
            return Err(Error::InvalidParameter("--terms must be positive".into()));
        }
        Ok(SeriesControl::with_terms(terms).precision(self.precision))
    }
}

#[derive(Debug, Args)]
pub struct QuasiArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Evaluation method: heun, oracle or small-nu.
    #[arg(long, default_value = "heun")]
    pub method: String,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Number of equally spaced times over [0, 2 pi], ends included.
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also integrate numerically and report the largest deviation.
    #[arg(long)]
    pub with_oracle: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Lattice subdivision; gives (depth-1)(depth-2)/2 interior points.
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    /// Points with scaled omega at or below this are dropped.
    #[arg(long, default_value_t = MIN_SCALED_OMEGA)]
    pub omega_min: f64,
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Method evaluated at every point.
    #[arg(long, default_value = "heun")]
    pub method: String,
    /// Compare each point against direct integration.
    #[arg(long)]
    pub with_oracle: bool,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BranchArgs {
    /// Drive amplitude.
    #[arg(long = "F", default_value_t = 0.5)]
    pub f_amp: f64,
    /// Static-field frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub omega_from: f64,
    #[arg(long, default_value_t = 2.0)]
    pub omega_to: f64,
    /// Number of frequencies in the range, ends included.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
    pub n_min: i64,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub n_max: i64,
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the accuracy guard on the low end of the range.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(long, default_value_t = 5.0)]
    pub f_max: f64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// RK4 steps per period.
    #[arg(long, default_value_t = IntegratorConfig::DEFAULT_STEPS)]
    pub steps: usize,
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::Domain { .. } | Error::UnknownMethod { .. } => {
            EXIT_INVALID
        }
        Error::NotConverged { .. } | Error::UnphysicalR(_) => EXIT_NOT_CONVERGED,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_CHECK_FAILED,
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> u8 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_INVALID;
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let json = cli.json;
    let result = match cli.command {
        Command::Quasi(a) => cmd_quasi(&a, json),
        Command::Trace(a) => cmd_trace(&a, json),
        Command::Sweep(a) => cmd_sweep(&a, json),
        Command::Branches(a) => cmd_branches(&a, json),
        Command::Limits(a) => cmd_limits(&a, json),
        Command::Oracle(a) => cmd_oracle(&a, json),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn converged_code(converged: bool) -> u8 {
    if converged {
        EXIT_OK
    } else {
        eprintln!("warning: series did not converge within the term limit");
        EXIT_NOT_CONVERGED
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.15e} {:+.15e}i", z.re, z.im)
}

/// CSV destination; reports go to stderr when the CSV takes stdout.
fn csv_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn report(to_stdout: bool, text: &str) {
    if to_stdout {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn cmd_quasi(a: &QuasiArgs, json: bool) -> Result<u8> {
    let (p, d) = a.point.resolve()?;
    let ctrl = a.series.control(SeriesControl::QUASIENERGY_TERMS)?;
    let settings = MethodSettings {
        series: ctrl,
        integrator: IntegratorConfig::default(),
    };
    let method = Registry::builtin().create(&a.method, &settings)?;
    let res = method.evaluate(p)?;
    let half = if a.method == "heun" {
        Some(eta_at_half(p, &ctrl)?)
    } else {
        None
    };
    let energy = d.map(|d| d.energy(res.quasienergy.epsilon));
    if json {
        print_json(&json!({
            "f": p.f,
            "nu": p.nu,
            "method": a.method,
            "epsilon": res.quasienergy.epsilon,
            "energy": energy,
            "r": res.r,
            "alpha": res.alpha,
            "eta_pp": half.map(|h| h.eta_pp.value),
            "eta_mp": half.map(|h| h.eta_mp.value),
            "terms_used": res.terms_used,
            "precision": ctrl.precision.to_string(),
            "converged": res.converged,
        }))?;
    } else {
        println!("f         = {}", p.f);
        println!("nu        = {}", p.nu);
        println!("method    = {}", a.method);
        println!("epsilon   = {:.15}", res.quasienergy.epsilon);
        if let Some(e) = energy {
            println!("energy    = {e:.15}");
        }
        println!("r         = {:.15}", res.r);
        if let Some(alpha) = res.alpha {
            println!("alpha     = {alpha:.15}");
        }
        if let Some(h) = half {
            println!("eta_pp    = {}", fmt_c(h.eta_pp.value));
            println!("eta_mp    = {}", fmt_c(h.eta_mp.value));
            println!("terms     = {}", h.terms_used());
        }
        println!("converged = {}", res.converged);
    }
    Ok(converged_code(res.converged))
}

#[derive(Serialize)]
struct TraceRow {
    tau: f64,
    u1: f64,
    v1: f64,
    u2: f64,
    v2: f64,
    norm_error: f64,
}

fn cmd_trace(a: &TraceArgs, json: bool) -> Result<u8> {
    let (p, _) = a.point.resolve()?;
    let ctrl = a.series.control(SeriesControl::TRACE_TERMS)?;
    let evo = TimeEvolution::new(p, ctrl)?;
    let points = evo.trace(a.samples)?;

    let mut w = csv::Writer::from_writer(csv_sink(&a.out)?);
    for pt in &points {
        let [u1, v1, u2, v2] = pt.state.components();
        // `+ 0.0` writes negative zeros as zeros.
        w.serialize(TraceRow {
            tau: pt.tau,
            u1: u1 + 0.0,
            v1: v1 + 0.0,
            u2: u2 + 0.0,
            v2: v2 + 0.0,
            norm_error: pt.state.norm_error(),
        })?;
    }
    w.flush()?;
    drop(w);

    let converged = evo.converged && points.iter().all(|pt| pt.converged);
    let v1_end = points.last().map_or(0.0, |pt| pt.state.psi1.im);
    let u2_half = evo.state(PI)?.value.psi2.re;
    let max_norm_error = points
        .iter()
        .map(|pt| pt.state.norm_error())
        .fold(0.0, f64::max);
    let oracle_deviation = if a.with_oracle {
        let taus: Vec<f64> = points.iter().map(|pt| pt.tau).collect();
        let numeric = numeric_trace(p, &taus, &IntegratorConfig::default())?;
        Some(
            points
                .iter()
                .zip(&numeric)
                .map(|(pt, s)| pt.state.distance(s))
                .fold(0.0, f64::max),
        )
    } else {
        None
    };

    let to_stdout = a.out.is_some();
    if json && to_stdout {
        print_json(&json!({
            "samples": points.len(),
            "terms": ctrl.max_terms,
            "r": evo.monodromy.r,
            "alpha": evo.monodromy.alpha,
            "v1_at_2pi": v1_end,
            "u2_at_pi": u2_half,
            "max_norm_error": max_norm_error,
            "max_oracle_deviation": oracle_deviation,
            "converged": converged,
        }))?;
    } else {
        report(to_stdout, &format!("samples            = {}", points.len()));
        report(to_stdout, &format!("v1(2pi)            = {v1_end:.3e}"));
        report(to_stdout, &format!("u2(pi)             = {u2_half:.3e}"));
        report(
            to_stdout,
            &format!("max norm error     = {max_norm_error:.3e}"),
        );
        if let Some(dev) = oracle_deviation {
            report(to_stdout, &format!("max oracle dev.    = {dev:.3e}"));
        }
        report(to_stdout, &format!("converged          = {converged}"));
    }
    Ok(converged_code(converged))
}

fn cmd_sweep(a: &SweepArgs, json: bool) -> Result<u8> {
    let grid = SimplexGrid::new(a.depth, a.omega_min)?;
    let cfg = SweepConfig {
        method: a.method.clone(),
        reference: a.with_oracle.then(|| "oracle".to_string()),
        settings: MethodSettings {
            series: a.series.control(SeriesControl::QUASIENERGY_TERMS)?,
            integrator: IntegratorConfig::default(),
        },
    };
    let (records, summary) = run_sweep(&grid, &cfg, &Registry::builtin())?;
    write_sweep_csv(&records, csv_sink(&a.out)?)?;

    let to_stdout = a.out.is_some();
    if json && to_stdout {
        print_json(&summary)?;
    } else {
        let text = serde_json::to_string_pretty(&summary)?;
        report(to_stdout, &text);
    }
    // Per-point non-convergence is recorded in the CSV, not fatal.
    Ok(EXIT_OK)
}

fn cmd_branches(a: &BranchArgs, json: bool) -> Result<u8> {
    non_negative("F", a.f_amp)?;
    non_negative("omega0", a.omega0)?;
    let scan = BranchScan {
        omega0: a.omega0,
        f_amp: a.f_amp,
        omega_from: a.omega_from,
        omega_to: a.omega_to,
        samples: a.samples,
        n_range: a.n_min..=a.n_max,
    };
    scan.validate(a.force)?;
    let ctrl = a.series.control(SeriesControl::QUASIENERGY_TERMS)?;
    let (rows, converged) = branch_rows(&scan, &ctrl)?;
    write_branch_csv(&rows, csv_sink(&a.out)?)?;
    let minima = gap_minima(&scan, &ctrl)?;

    let to_stdout = a.out.is_some();
    if json && to_stdout {
        print_json(&json!({ "gap_minima": minima, "converged": converged }))?;
    } else {
        for m in &minima {
            report(
                to_stdout,
                &format!("gap minimum at omega = {:.9}, gap = {:.6e}", m.omega, m.gap),
            );
        }
    }
    Ok(converged_code(converged))
}

fn cmd_limits(a: &LimitsArgs, json: bool) -> Result<u8> {
    let report = check_identities(a.f_max, a.samples)?;
    if json {
        print_json(&report)?;
    } else {
        println!(
            "{:>10} {:>36} {:>36} {:>10}",
            "f", "eta_mp (series, nu = 0)", "eta_mp (closed form)", "error"
        );
        for row in &report.rows {
            println!(
                "{:>10.6} {:>36} {:>36} {:>10.2e}",
                row.f,
                fmt_c(row.eta_mp_series),
                fmt_c(row.eta_mp_closed),
                row.max_abs_error
            );
        }
        for s in &report.suites {
            println!(
                "{:<16} max error {:.3e} (tolerance {:.0e}) {}",
                s.name,
                s.max_error,
                s.tolerance,
                if s.passed { "ok" } else { "FAILED" }
            );
        }
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_oracle(a: &OracleArgs, json: bool) -> Result<u8> {
    let (p, _) = a.point.resolve()?;
    let cfg = IntegratorConfig::new(a.steps)?;
    let nf = numeric_floquet(p, &cfg)?;
    let m = numeric_r_alpha(p, &cfg)?;
    let sym = symmetry_residuals(p, PI / 4.0, &cfg)?;
    let unitarity = nf.monodromy.unitarity_error();
    let passed = unitarity < ORACLE_CHECK_TOL && sym.max() < ORACLE_CHECK_TOL;
    if json {
        print_json(&json!({
            "f": p.f,
            "nu": p.nu,
            "steps_per_period": cfg.steps_per_period,
            "monodromy": nf.monodromy,
            "half_period": nf.half,
            "epsilon": nf.quasienergy.epsilon,
            "r": m.r,
            "alpha": m.alpha,
            "unitarity_error": unitarity,
            "symmetry": sym,
            "passed": passed,
        }))?;
    } else {
        println!("U(2pi, 0):");
        for row in nf.monodromy.0 {
            println!("  [{}, {}]", fmt_c(row[0]), fmt_c(row[1]));
        }
        println!("epsilon         = {:.15}", nf.quasienergy.epsilon);
        println!("r               = {:.15}", m.r);
        println!("alpha           = {:.15}", m.alpha);
        println!("unitarity error = {unitarity:.3e}");
        println!("symmetry error  = {:.3e}", sym.max());
    }
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    fn point(args: &[&str]) -> Result<(PhysicalParams, Option<DimensionalParams>)> {
        let mut argv = vec!["rabi-heun", "quasi"];
        argv.extend_from_slice(args);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Quasi(q) => q.point.resolve(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn point_resolution() {
        let (p, d) = point(&["--f", "0.5", "--nu", "1"]).unwrap();
        assert_eq!((p.f, p.nu), (0.5, 1.0));
        assert!(d.is_none());
        let (p, d) = point(&["--omega0", "1", "--omega", "2", "--F", "1"]).unwrap();
        assert_eq!((p.f, p.nu), (0.5, 0.5));
        assert_eq!(d.unwrap().omega, 2.0);
        assert!(point(&["--f", "-1"]).is_err());
        assert!(point(&["--f", "30", "--nu", "20"]).is_err());
        assert!(point(&["--f", "30", "--nu", "20", "--force"]).is_ok());
        assert!(Cli::try_parse_from(["rabi-heun", "quasi", "--f", "1", "--omega", "2"]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::InvalidParameter(String::new())),
            EXIT_INVALID
        );
        assert_eq!(
            exit_code(&Error::NotConverged {
                what: "x",
                terms: 1
            }),
            EXIT_NOT_CONVERGED
        );
    }
}
