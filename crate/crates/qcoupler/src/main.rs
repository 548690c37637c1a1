// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for the qcoupler simulator.
//!
//! Verbs: `validate` prints the dispersive-regime report for one operating
//! point, `run` executes a single protocol run, `sweep` evaluates a grid
//! from a config file, and `fig3`/`fig4` run the canned reproduction
//! sweeps (entanglement-fidelity curves and the transfer-fidelity surface)
//! with reference defaults.
//!
//! Values resolve as defaults < config file < flags. Exit status is
//! nonzero iff validation failed or any run was flagged non-converged.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use qcoupler::model::{derive_params, schedule, validate_regime, DeriveSpec};
use qcoupler::protocol::{run_entanglement, run_transfer, ModelKind, ProtocolRun, RunSettings};
use qcoupler::sweep::{
    emit_outputs, fig3_spec, fig4_spec, load_config, resolve_sweep, run_sweep, FileConfig,
    SweepKind, SweepSpec,
};
use qcoupler::{Error, Result};

fn parse_model(s: &str) -> Result<ModelKind> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<SweepKind> {
    s.parse()
}

/// Simulator for coupler-mediated entanglement generation and quantum
/// state transfer between qutrits in two separate cavities.
#[derive(Parser)]
#[command(name = "qcoupler", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dispersive-regime report and schedule for one operating point.
    Validate(ValidateCmd),
    /// Execute a single protocol run and print its summary.
    Run(RunCmd),
    /// Evaluate a sweep grid from a config file.
    Sweep(SweepCmd),
    /// Canned sweep: entanglement fidelity vs b at five crosstalk fractions.
    Fig3(FigCmd),
    /// Canned sweep: transfer fidelity vs (b, α) at crosstalk fraction 0.2.
    Fig4(FigCmd),
}

/// Flags shared by the point-wise verbs.
#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output path prefix.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = one per CPU).
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Integrator step in picoseconds.
    #[arg(long = "dt-ps", value_name = "REAL")]
    dt_ps: Option<f64>,
    /// Fock levels retained per cavity (≥ 3).
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
    /// Dynamical model: ideal | full | lindblad | effective.
    #[arg(long, value_name = "MODEL", value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Run even if the dispersive-regime report fails.
    #[arg(long)]
    override_regime_check: bool,
}

/// Operating-point selectors for single-point verbs.
#[derive(Args, Debug, Clone, Default)]
struct PointArgs {
    /// Normalized detuning b = |δ1|/g1.
    #[arg(long, value_name = "REAL")]
    b: Option<f64>,
    /// Crosstalk fraction g12/g_max.
    #[arg(long = "g12-fraction", value_name = "REAL")]
    g12_fraction: Option<f64>,
}

#[derive(Args)]
struct ValidateCmd {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    point: PointArgs,
}

#[derive(Args)]
struct RunCmd {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    point: PointArgs,
    /// Protocol: entanglement | transfer.
    #[arg(long, value_name = "KIND", value_parser = parse_kind)]
    kind: Option<SweepKind>,
    /// Transfer input amplitude α ∈ [0, 1]; β = √(1−α²). Default 1/√2.
    #[arg(long, value_name = "REAL")]
    alpha: Option<f64>,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    common: CommonArgs,
}

/// The canned verbs take no config file: their grids are fixed.
#[derive(Args)]
struct FigCmd {
    /// Output path prefix (defaults to the verb name).
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per CPU).
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Integrator step in picoseconds.
    #[arg(long = "dt-ps", value_name = "REAL")]
    dt_ps: Option<f64>,
    /// Fock levels retained per cavity (≥ 3).
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
    /// Dynamical model override (the canned default is lindblad).
    #[arg(long, value_name = "MODEL", value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Run even if the dispersive-regime report fails.
    #[arg(long)]
    override_regime_check: bool,
}

fn load(common: &CommonArgs) -> Result<(FileConfig, Option<String>)> {
    match &common.config {
        Some(path) => load_config(path).map(|(c, h)| (c, Some(h))),
        None => Ok((FileConfig::default(), None)),
    }
}

fn resolve_base(config: &FileConfig, point: &PointArgs) -> Result<DeriveSpec> {
    let mut base = config.base.clone().unwrap_or_default().resolve()?;
    if let Some(b) = point.b {
        base = base.with_b(b);
    }
    if let Some(f) = point.g12_fraction {
        base = base.with_g12_fraction(f);
    }
    Ok(base)
}

fn resolve_settings(config: &FileConfig, common: &CommonArgs) -> RunSettings {
    let mut settings = config.run.clone().unwrap_or_default().resolve_settings();
    if let Some(ps) = common.dt_ps {
        settings.dt = ps * 1e-3;
    }
    if let Some(n) = common.truncation {
        settings.truncation = n;
    }
    settings.override_regime_check |= common.override_regime_check;
    settings
}

fn to_mhz(rad_per_ns: f64) -> f64 {
    rad_per_ns / TAU * 1e3
}

fn cmd_validate(cmd: &ValidateCmd) -> Result<bool> {
    let (config, _) = load(&cmd.common)?;
    let base = resolve_base(&config, &cmd.point)?;
    let settings = resolve_settings(&config, &cmd.common);
    let params = derive_params(&base)?;
    let sched = schedule(&params)?;
    let report = validate_regime(&params, settings.regime_threshold)?;

    println!(
        "operating point: b = {}, δ1/2π = {} GHz, δ2/2π = {} GHz, g12 = {}·g_max",
        base.b, base.delta1_ghz, base.delta2_ghz, base.g12_fraction
    );
    println!(
        "couplings /2π: g1 = {:.4} MHz, g2 = {:.4} MHz, gA1 = {:.4} MHz, gA2 = {:.4} MHz",
        to_mhz(params.g[0]),
        to_mhz(params.g[1]),
        to_mhz(params.g_a[0]),
        to_mhz(params.g_a[1]),
    );
    println!(
        "schedule: λ/2π = ({:.4}, {:.4}) MHz, Λ/2π = {:.4} MHz, t1 = {:.3} ns, t2 = {:.3} ns",
        to_mhz(sched.lambda[0]),
        to_mhz(sched.lambda[1]),
        to_mhz(sched.big_lambda),
        sched.t1,
        sched.t2,
    );
    print!("{report}");
    let pass = report.all_pass();
    println!("regime: {}", if pass { "PASS" } else { "FAIL" });
    Ok(pass || settings.override_regime_check)
}

fn write_trace(run: &ProtocolRun, prefix: &Path) -> Result<PathBuf> {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(".trace.csv");
    let path = PathBuf::from(name);
    let mut out = String::from(
        "time_ns,trace_dev,herm_defect,spectral_floor,n_exc,n_photons_c1,n_photons_c2\n",
    );
    for m in &run.evolution.monitors {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            m.time,
            m.trace_dev,
            m.herm_defect,
            m.spectral_floor,
            m.n_exc,
            m.n_photons[0],
            m.n_photons[1],
        ));
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::Config(format!("creating {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(&path, out)
        .map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

fn cmd_run(cmd: &RunCmd) -> Result<bool> {
    let (config, _) = load(&cmd.common)?;
    let base = resolve_base(&config, &cmd.point)?;
    let settings = resolve_settings(&config, &cmd.common);
    let run_section = config.run.clone().unwrap_or_default();
    let model = cmd
        .common
        .model
        .or(run_section.model)
        .unwrap_or(ModelKind::FullLindblad);
    let kind = cmd
        .kind
        .or(run_section.kind)
        .unwrap_or(SweepKind::Entanglement);
    let params = derive_params(&base)?;

    let run = match kind {
        SweepKind::Entanglement => run_entanglement(&params, model, &settings)?,
        SweepKind::Transfer => {
            let alpha = cmd.alpha.or(run_section.alpha).unwrap_or(FRAC_1_SQRT_2);
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::Config(format!(
                    "alpha must lie in [0, 1] (got {alpha})"
                )));
            }
            let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
            run_transfer(
                &params,
                model,
                C64::new(alpha, 0.0),
                C64::new(beta, 0.0),
                &settings,
            )?
        }
    };

    println!(
        "{} / {} at b = {}, g12 = {}·g_max:",
        kind, model, base.b, base.g12_fraction
    );
    println!("  fidelity              = {:.6}", run.fidelity);
    println!("  duration              = {:.3} ns", run.t_op());
    println!(
        "  max cavity photons    = {:.5}",
        run.evolution.max_cavity_photons
    );
    println!("  converged             = {}", run.converged());
    if let Some(v) = &run.evolution.violation {
        println!("  violation at {:.3} ns: {}", v.time, v.description);
    }
    if let Some(prefix) = &cmd.common.out {
        let path = write_trace(&run, prefix)?;
        println!("  trace written to {}", path.display());
    }
    Ok(run.converged())
}

fn apply_overrides(spec: &mut SweepSpec, common: &CommonArgs) {
    if let Some(out) = &common.out {
        spec.out_prefix = out.clone();
    }
    if let Some(w) = common.workers {
        spec.workers = w;
    }
    if let Some(ps) = common.dt_ps {
        spec.settings.dt = ps * 1e-3;
    }
    if let Some(n) = common.truncation {
        spec.settings.truncation = n;
    }
    if let Some(m) = common.model {
        spec.model = m;
    }
    spec.settings.override_regime_check |= common.override_regime_check;
}

fn finish_sweep(spec: SweepSpec, config_file_sha256: Option<String>) -> Result<bool> {
    spec.validate()?;
    let mut result = run_sweep(&spec)?;
    result.config_file_sha256 = config_file_sha256;
    let files = emit_outputs(&result, &spec.out_prefix)?;
    let converged = result.rows.iter().filter(|r| r.converged).count();
    println!(
        "{} rows evaluated in {:.1} s; {} converged",
        result.rows.len(),
        result.total_wall_ms / 1e3,
        converged,
    );
    for row in result.rows.iter().filter(|r| !r.converged) {
        let alpha = row
            .alpha
            .map(|a| format!(", alpha = {a}"))
            .unwrap_or_default();
        println!(
            "  non-converged: b = {}, g12_fraction = {}{alpha}: {}",
            row.b,
            row.g12_fraction,
            row.error.as_deref().unwrap_or("monitor violation"),
        );
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(result.all_converged())
}

fn cmd_sweep(cmd: &SweepCmd) -> Result<bool> {
    let path = cmd.common.config.as_ref().ok_or_else(|| {
        Error::Config("sweep requires --config with at least an [axes] section".into())
    })?;
    let (config, hash) = load_config(path)?;
    let mut spec = resolve_sweep(&config)?;
    apply_overrides(&mut spec, &cmd.common);
    finish_sweep(spec, Some(hash))
}

fn cmd_fig(cmd: &FigCmd, make: fn(PathBuf) -> SweepSpec, default_prefix: &str) -> Result<bool> {
    let prefix = cmd
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_prefix));
    let mut spec = make(prefix);
    let common = CommonArgs {
        out: cmd.out.clone(),
        workers: cmd.workers,
        dt_ps: cmd.dt_ps,
        truncation: cmd.truncation,
        model: cmd.model,
        override_regime_check: cmd.override_regime_check,
        ..CommonArgs::default()
    };
    apply_overrides(&mut spec, &common);
    finish_sweep(spec, None)
}

/// Restores the default SIGPIPE disposition so that piping into a pager
/// that exits early (`qcoupler … | head`) kills the process quietly
/// instead of panicking on the failed write.
fn reset_sigpipe() {
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

fn main() -> ExitCode {
    reset_sigpipe();
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate(cmd) => cmd_validate(cmd),
        Command::Run(cmd) => cmd_run(cmd),
        Command::Sweep(cmd) => cmd_sweep(cmd),
        Command::Fig3(cmd) => cmd_fig(cmd, fig3_spec, "fig3"),
        Command::Fig4(cmd) => cmd_fig(cmd, fig4_spec, "fig4"),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
