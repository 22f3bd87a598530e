//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a parameter violates a mathematical
//! condition or a computation fails, 2 on usage and config-file errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::blowup::{build_omega_sequence, certify_with_terms};
use crate::config::{RawConfig, Settings};
use crate::fractional::kernel_l1_report;
use crate::mild::{existence_budget, picard_solve};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "fraclap", version, about = "Fractional heat equation with a Fourier-side quadratic nonlinearity")]
struct Cli {
    /// Flat `key = value` config file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    /// Override one config key, e.g. `--set alpha=1.5`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Run the Picard solver and write trajectory.csv.
    Solve,
    /// Build the ω_k sequence and audit the blow-up chain; writes certificate.txt and certificate.csv.
    Certify,
    /// Kernel L¹ estimates and homogeneity ratios; writes kernel.csv.
    KernelCheck,
    /// Write ω̂_k on the certificate lattice as omega_k{K}.csv.
    Omega,
    /// Existence-time budget for the configured data; writes budget.txt.
    Budget,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Usage(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

/// Sizes the rayon pool from `FRACLAP_THREADS` when set.
fn configure_threads() {
    if let Some(n) = std::env::var("FRACLAP_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load_settings(cli: &Cli) -> std::result::Result<Settings, Failure> {
    let mut raw = match &cli.config {
        None => RawConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            RawConfig::parse(&text)?
        }
    };
    for ov in &cli.overrides {
        raw.assign(ov, 0)
            .map_err(|e| Failure::Usage(format!("--set {ov}: {e}")))?;
    }
    Ok(raw.resolve()?)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn execute(cli: &Cli) -> std::result::Result<(), Failure> {
    let settings = load_settings(cli)?;
    std::fs::create_dir_all(&cli.output_dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", cli.output_dir.display())))?;
    let dir = cli.output_dir.as_path();
    match cli.command {
        Command::Solve => solve(&settings, dir)?,
        Command::Certify => certify_cmd(&settings, dir)?,
        Command::KernelCheck => kernel_check(&settings, dir)?,
        Command::Omega => omega(&settings, dir)?,
        Command::Budget => budget(&settings, dir)?,
    }
    Ok(())
}

fn solve(s: &Settings, dir: &Path) -> std::result::Result<(), Failure> {
    let cfg = s.problem()?;
    let traj = picard_solve(&cfg)?;
    let mut out = create(dir, "trajectory.csv")?;
    traj.write_csv(&mut out)?;
    out.flush().map_err(Error::from)?;
    for (i, &t) in s.snapshots.iter().enumerate() {
        let node = ((t / cfg.dt).round().max(0.0) as usize).min(traj.fields.len().saturating_sub(1));
        let mut f = create(dir, &format!("snapshot_{i}.csv"))?;
        traj.fields[node].write_csv(&mut f)?;
        f.flush().map_err(Error::from)?;
    }
    println!(
        "solve: {} nodes, {} Picard iterations, converged = {}",
        traj.times.len(),
        traj.iterations,
        traj.converged
    );
    match traj.overflow_at {
        Some(t) => println!("overflow: H1 norm exceeded {:e} at t = {t:.6e}", cfg.overflow_threshold),
        None => println!(
            "final H1 = {:.6e}",
            traj.h1_norms.last().copied().unwrap_or(f64::NAN)
        ),
    }
    Ok(())
}

fn certify_cmd(s: &Settings, dir: &Path) -> std::result::Result<(), Failure> {
    let params = s.certificate_params()?;
    let grid = s.certificate_grid()?;
    let report = certify_with_terms(&params, &grid, s.k_max, s.series_terms)?;
    let mut txt = create(dir, "certificate.txt")?;
    txt.write_all(report.to_text().as_bytes()).map_err(Error::from)?;
    txt.flush().map_err(Error::from)?;
    let mut csv = create(dir, "certificate.csv")?;
    report.write_csv(&mut csv)?;
    csv.flush().map_err(Error::from)?;
    println!("verdict: {}", report.verdict);
    if !report.violations.is_empty() {
        return Err(Failure::Domain(format!(
            "blow-up hypotheses violated: {}",
            report.violations.join("; ")
        )));
    }
    Ok(())
}

fn kernel_check(s: &Settings, dir: &Path) -> std::result::Result<(), Failure> {
    let report = kernel_l1_report(s.s, s.alpha, &s.t_values)?;
    let mut out = create(dir, "kernel.csv")?;
    report.write_csv(&mut out)?;
    out.flush().map_err(Error::from)?;
    println!(
        "kernel-check: alpha = {} s = {} on L = {:.4} N = {}; ratio spread = {:.3e}, bound constant = {:.6e}",
        report.alpha,
        report.s,
        report.grid.length(),
        report.grid.modes(),
        report.ratio_spread,
        report.bound_constant
    );
    Ok(())
}

fn omega(s: &Settings, dir: &Path) -> std::result::Result<(), Failure> {
    let grid = s.certificate_grid()?;
    let levels = build_omega_sequence(s.k_max, &grid)?;
    println!("{:>2} {:>10} {:>16} {:>12} {:>12}", "k", "nnz", "l1", "l1 rel err", "off corona");
    for level in &levels {
        let mut out = create(dir, &format!("omega_k{}.csv", level.k))?;
        level.patch.write_csv(&mut out, &format!("omega_hat_{}", level.k))?;
        out.flush().map_err(Error::from)?;
        println!(
            "{:>2} {:>10} {:>16.10e} {:>12.3e} {:>12.3e}",
            level.k,
            level.patch.nnz(),
            level.l1,
            level.l1_rel_error,
            level.out_of_corona
        );
    }
    Ok(())
}

fn budget(s: &Settings, dir: &Path) -> std::result::Result<(), Failure> {
    let cfg = s.problem()?;
    let b = existence_budget(&cfg)?;
    let norm = if b.case == 1 { "H^-gamma" } else { "H^gamma" };
    let text = format!(
        "existence budget\n\
         case = {}\n\
         delta = ||u0||_H1 = {:.12e}\n\
         C_abs = {:.12e}\n\
         ||b||_{norm} = {:.12e}{}\n\
         time exponent = {:.12}\n\
         T0 = {:.12e}\n\
         C_B = C_abs T0^exponent ||b|| = {:.12e}\n\
         4 C_B delta = {:.12e}\n\
         contraction (4 C_B delta < 1) = {}\n\
         T0_max = {:.12e}\n",
        b.case,
        b.delta,
        b.c_abs,
        b.b_norm,
        if b.b_norm_divergent { "  (not settled under mode doubling)" } else { "" },
        b.time_exponent,
        cfg.t0,
        b.c_b,
        b.contraction_product(),
        b.contraction_ok,
        b.t0_max
    );
    let mut out = create(dir, "budget.txt")?;
    out.write_all(text.as_bytes()).map_err(Error::from)?;
    out.flush().map_err(Error::from)?;
    print!("{text}");
    Ok(())
}
