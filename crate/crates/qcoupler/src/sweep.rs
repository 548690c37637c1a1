// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps over the protocol runners, configuration ingestion, and
//! result persistence.
//!
//! A sweep enumerates a grid — normalized detuning `b`, crosstalk fraction
//! `g12/g_max`, and (for transfer) the real input amplitude α — in
//! lexicographic order, evaluates each point through the protocol module,
//! and assembles rows deterministically regardless of how many workers ran
//! them. A failed point is recorded in its row (fidelity `NaN`, converged
//! false, error kept for the manifest) and never aborts the sweep.
//!
//! [`emit_outputs`] persists a sweep as three files under a common prefix:
//! a CSV of rows (header + one line per run; `.` decimal separator, UTF-8,
//! LF), a TOML manifest (config echo, hashes, versions, timings, row
//! errors), and a gnuplot script that renders fidelity-versus-`b` curves or
//! a fidelity surface from the CSV. The script is generated, never
//! executed — plotting needs no dependency here.
//!
//! [`fig3_spec`] and [`fig4_spec`] are the canned reproduction grids: the
//! entanglement fidelity curves over b ∈ [7, 15] at five crosstalk
//! fractions, and the transfer fidelity surface over b ∈ [7, 13] × α ∈
//! [0, 1] at the reference fraction 0.2.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{derive_params, DeriveSpec, DissipationRates};
use crate::protocol::{run_entanglement, run_transfer, ModelKind, ProtocolRun, RunSettings};
use crate::{Error, Result};

/// Which protocol a sweep drives at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepKind {
    /// Entanglement preparation; the α axis must be empty.
    #[serde(rename = "entanglement")]
    Entanglement,
    /// State transfer with real amplitudes (α, √(1−α²)); the α axis is
    /// required.
    #[serde(rename = "transfer")]
    Transfer,
}

impl SweepKind {
    /// The stable lowercase token used in configs, CLI flags, and CSV rows.
    pub fn token(self) -> &'static str {
        match self {
            SweepKind::Entanglement => "entanglement",
            SweepKind::Transfer => "transfer",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entanglement" => Ok(SweepKind::Entanglement),
            "transfer" => Ok(SweepKind::Transfer),
            other => Err(Error::Config(format!(
                "unknown protocol kind '{other}' (expected entanglement|transfer)"
            ))),
        }
    }
}

/// A fully resolved sweep: base parameters, grid axes, protocol and model
/// selection, integrator settings, and output placement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Base derivation inputs; `b` and `g12_fraction` are overridden per
    /// grid point.
    pub base: DeriveSpec,
    /// Normalized-detuning axis.
    pub b_grid: Vec<f64>,
    /// Crosstalk-fraction axis.
    pub g12_fractions: Vec<f64>,
    /// Real-α axis; empty for entanglement, non-empty for transfer.
    pub alpha_grid: Vec<f64>,
    /// Which protocol runs at each point.
    pub kind: SweepKind,
    /// Which dynamical model evolves each point.
    pub model: ModelKind,
    /// Integrator and gating knobs shared by all points.
    pub settings: RunSettings,
    /// Worker threads for grid evaluation; 0 means one per available CPU.
    pub workers: usize,
    /// Output path prefix for [`emit_outputs`].
    pub out_prefix: PathBuf,
}

impl SweepSpec {
    /// Checks the grid invariants: axes non-empty (α empty for
    /// entanglement, non-empty for transfer), values in range, dt > 0.
    pub fn validate(&self) -> Result<()> {
        if self.b_grid.is_empty() {
            return Err(Error::Config("b grid must be non-empty".into()));
        }
        if self.g12_fractions.is_empty() {
            return Err(Error::Config("g12_fraction grid must be non-empty".into()));
        }
        match self.kind {
            SweepKind::Entanglement if !self.alpha_grid.is_empty() => {
                return Err(Error::Config(
                    "entanglement sweeps take no alpha axis (found a non-empty alpha grid)".into(),
                ));
            }
            SweepKind::Transfer if self.alpha_grid.is_empty() => {
                return Err(Error::Config(
                    "transfer sweeps require a non-empty alpha grid".into(),
                ));
            }
            _ => {}
        }
        for &b in &self.b_grid {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::Config(format!("b grid value must be > 0 (got {b})")));
            }
        }
        for &f in &self.g12_fractions {
            if !(f >= 0.0) || !f.is_finite() {
                return Err(Error::Config(format!(
                    "g12_fraction grid value must be ≥ 0 (got {f})"
                )));
            }
        }
        for &a in &self.alpha_grid {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Config(format!(
                    "alpha grid value must lie in [0, 1] (got {a})"
                )));
            }
        }
        if !(self.settings.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive (got {} ns)",
                self.settings.dt
            )));
        }
        Ok(())
    }

    /// Number of grid points = product of the axis sizes.
    pub fn grid_size(&self) -> usize {
        let alpha = match self.kind {
            SweepKind::Entanglement => 1,
            SweepKind::Transfer => self.alpha_grid.len(),
        };
        self.b_grid.len() * self.g12_fractions.len() * alpha
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Protocol token ("entanglement" | "transfer").
    pub kind: SweepKind,
    /// Model token ("ideal" | "full" | "lindblad" | "effective").
    pub model: ModelKind,
    /// Normalized detuning of this point.
    pub b: f64,
    /// Crosstalk fraction of this point.
    pub g12_fraction: f64,
    /// Transfer amplitude α, when the sweep has that axis.
    pub alpha: Option<f64>,
    /// Fidelity against the ideal target; `NaN` when the point failed.
    pub fidelity: f64,
    /// Protocol duration integrated, ns; `NaN` when the point failed.
    pub t_op_ns: f64,
    /// Max instantaneous total cavity photons; `NaN` when the point failed.
    pub max_photon_expectation: f64,
    /// False when the point failed or a convergence monitor tripped.
    pub converged: bool,
    /// Wall-clock spent on this point, ms (manifest only, not CSV).
    pub wall_ms: f64,
    /// Error text when the point failed outright (manifest only).
    pub error: Option<String>,
}

/// All rows of a sweep plus the metadata the manifest records.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// The spec that was run (echoed into the manifest).
    pub spec: SweepSpec,
    /// One row per grid point, lexicographic over (b, g12_fraction, α).
    pub rows: Vec<SweepRow>,
    /// SHA-256 (hex) of the canonical TOML echo of `spec`.
    pub config_sha256: String,
    /// SHA-256 (hex) of the raw config file, when one was loaded.
    pub config_file_sha256: Option<String>,
    /// Total wall-clock for the sweep, ms.
    pub total_wall_ms: f64,
}

impl SweepResult {
    /// True when every row converged (the CLI exit-status contract).
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

/// Canonical TOML echo of a spec: the bytes that `config_sha256` covers and
/// the manifest embeds.
pub fn canonical_config(spec: &SweepSpec) -> Result<String> {
    toml::to_string_pretty(spec).map_err(|e| Error::Config(e.to_string()))
}

/// Hex SHA-256 of arbitrary bytes (the hash used throughout the manifest).
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn evaluate_point(
    spec: &SweepSpec,
    b: f64,
    fraction: f64,
    alpha: Option<f64>,
) -> (std::result::Result<ProtocolRun, Error>, f64) {
    let started = Instant::now();
    let outcome =
        derive_params(&spec.base.with_b(b).with_g12_fraction(fraction)).and_then(|params| {
            match alpha {
                None => run_entanglement(&params, spec.model, &spec.settings),
                Some(a) => {
                    let beta = (1.0 - a * a).max(0.0).sqrt();
                    run_transfer(
                        &params,
                        spec.model,
                        C64::new(a, 0.0),
                        C64::new(beta, 0.0),
                        &spec.settings,
                    )
                }
            }
        });
    (outcome, started.elapsed().as_secs_f64() * 1e3)
}

fn row_for(spec: &SweepSpec, b: f64, fraction: f64, alpha: Option<f64>) -> SweepRow {
    let (outcome, wall_ms) = evaluate_point(spec, b, fraction, alpha);
    match outcome {
        Ok(run) => SweepRow {
            kind: spec.kind,
            model: spec.model,
            b,
            g12_fraction: fraction,
            alpha,
            fidelity: run.fidelity,
            t_op_ns: run.t_op(),
            max_photon_expectation: run.evolution.max_cavity_photons,
            converged: run.converged(),
            wall_ms,
            error: run
                .evolution
                .violation
                .as_ref()
                .map(|v| format!("non-converged at t = {:.3} ns: {}", v.time, v.description)),
        },
        Err(e) => SweepRow {
            kind: spec.kind,
            model: spec.model,
            b,
            g12_fraction: fraction,
            alpha,
            fidelity: f64::NAN,
            t_op_ns: f64::NAN,
            max_photon_expectation: f64::NAN,
            converged: false,
            wall_ms,
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates every grid point and assembles rows in lexicographic axis
/// order (b, then g12 fraction, then α), independent of worker count.
/// Failed points become rows with `NaN` fidelity and an error message;
/// the sweep itself only fails on invalid input.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let started = Instant::now();
    let mut points = Vec::with_capacity(spec.grid_size());
    for &b in &spec.b_grid {
        for &fraction in &spec.g12_fractions {
            match spec.kind {
                SweepKind::Entanglement => points.push((b, fraction, None)),
                SweepKind::Transfer => {
                    for &alpha in &spec.alpha_grid {
                        points.push((b, fraction, Some(alpha)));
                    }
                }
            }
        }
    }

    let rows: Vec<SweepRow> = if spec.workers == 1 {
        points
            .iter()
            .map(|&(b, f, a)| row_for(spec, b, f, a))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            points
                .par_iter()
                .map(|&(b, f, a)| row_for(spec, b, f, a))
                .collect()
        })
    };

    let config_sha256 = sha256_hex(canonical_config(spec)?.as_bytes());
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        config_sha256,
        config_file_sha256: None,
        total_wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn format_float(v: f64) -> String {
    // Shortest-roundtrip decimal form: deterministic, '.'-separated, and
    // parses back to the identical f64.
    format!("{v}")
}

fn render_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "kind,model,b,g12_fraction,alpha,fidelity,t_op_ns,max_photon_expectation,converged\n",
    );
    for row in &result.rows {
        let alpha = row.alpha.map(format_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.kind,
            row.model,
            format_float(row.b),
            format_float(row.g12_fraction),
            alpha,
            format_float(row.fidelity),
            format_float(row.t_op_ns),
            format_float(row.max_photon_expectation),
            row.converged,
        ));
    }
    out
}

#[derive(Serialize)]
struct RowError {
    index: usize,
    message: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    artifact: &'static str,
    version: &'static str,
    format: u32,
    config_sha256: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_file_sha256: Option<&'a str>,
    rows: usize,
    converged_rows: usize,
    total_wall_ms: f64,
    per_point_wall_ms: Vec<f64>,
    row_errors: Vec<RowError>,
    config: &'a SweepSpec,
}

fn render_manifest(result: &SweepResult) -> Result<String> {
    let manifest = Manifest {
        artifact: "qcoupler",
        version: env!("CARGO_PKG_VERSION"),
        format: 1,
        config_sha256: &result.config_sha256,
        config_file_sha256: result.config_file_sha256.as_deref(),
        rows: result.rows.len(),
        converged_rows: result.rows.iter().filter(|r| r.converged).count(),
        total_wall_ms: result.total_wall_ms,
        per_point_wall_ms: result.rows.iter().map(|r| r.wall_ms).collect(),
        row_errors: result
            .rows
            .iter()
            .enumerate()
            .filter_map(|(index, row)| {
                row.error.as_ref().map(|message| RowError {
                    index,
                    message: message.clone(),
                })
            })
            .collect(),
        config: &result.spec,
    };
    toml::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))
}

fn render_plot_script(result: &SweepResult, csv_name: &str) -> String {
    let mut s = String::new();
    s.push_str("# Generated by qcoupler; render with: gnuplot <this file>\n");
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("csv = '{csv_name}'\n"));
    s.push_str("set grid\n");
    match result.spec.kind {
        SweepKind::Entanglement => {
            s.push_str("set xlabel 'b = |δ1|/g1'\n");
            s.push_str("set ylabel 'fidelity'\n");
            s.push_str("set key bottom right\n");
            s.push_str(&format!(
                "set terminal pngcairo size 900,600\nset output '{}'\n",
                csv_name.replace(".csv", ".png")
            ));
            s.push_str("plot \\\n");
            let curves: Vec<String> = result
                .spec
                .g12_fractions
                .iter()
                .map(|&f| {
                    let f = format_float(f);
                    format!(
                        "  csv using 3:(abs($4 - {f}) < 1e-12 ? $6 : 1/0) \
                         with linespoints title 'g12 = {f}·g_max'"
                    )
                })
                .collect();
            s.push_str(&curves.join(", \\\n"));
            s.push('\n');
        }
        SweepKind::Transfer => {
            s.push_str("set xlabel 'b = |δ1|/g1'\n");
            s.push_str("set ylabel 'α'\n");
            s.push_str("set zlabel 'fidelity'\n");
            s.push_str("set ticslevel 0\n");
            s.push_str(&format!(
                "set terminal pngcairo size 900,700\nset output '{}'\n",
                csv_name.replace(".csv", ".png")
            ));
            s.push_str("set dgrid3d 30,30\nset hidden3d\n");
            s.push_str("splot csv using 3:5:6 with lines title 'transfer fidelity'\n");
        }
    }
    s
}

/// Writes the three sweep artifacts under `prefix`: `<prefix>.csv`,
/// `<prefix>.manifest.toml`, and `<prefix>.gp`. Returns the written paths
/// in that order. Parent directories are created; I/O errors carry the
/// offending path.
pub fn emit_outputs(result: &SweepResult, prefix: &Path) -> Result<Vec<PathBuf>> {
    if let Some(parent) = prefix.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::Config(format!("creating {}: {e}", parent.display())))?;
        }
    }
    let csv_path = with_suffix(prefix, ".csv");
    let manifest_path = with_suffix(prefix, ".manifest.toml");
    let script_path = with_suffix(prefix, ".gp");

    let csv_name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep.csv".to_string());

    let write = |path: &Path, contents: &str| -> Result<()> {
        std::fs::write(path, contents)
            .map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))
    };
    write(&csv_path, &render_csv(result))?;
    write(&manifest_path, &render_manifest(result)?)?;
    write(&script_path, &render_plot_script(result, &csv_name))?;
    Ok(vec![csv_path, manifest_path, script_path])
}

/// The canned entanglement-fidelity sweep: b from 7 to 15 in steps of 0.5,
/// crosstalk fractions {0, 0.2, 0.4, 0.6, 0.8}, lossy model.
pub fn fig3_spec(out_prefix: PathBuf) -> SweepSpec {
    SweepSpec {
        base: DeriveSpec::default(),
        b_grid: (0..=16).map(|k| 7.0 + 0.5 * k as f64).collect(),
        g12_fractions: vec![0.0, 0.2, 0.4, 0.6, 0.8],
        alpha_grid: Vec::new(),
        kind: SweepKind::Entanglement,
        model: ModelKind::FullLindblad,
        settings: RunSettings::default(),
        workers: 0,
        out_prefix,
    }
}

/// The canned transfer-fidelity sweep: b from 7 to 13 in steps of 0.5 (the
/// range is printed, the step is this artifact's choice), α from 0 to 1 in
/// steps of 0.1, crosstalk fraction 0.2, lossy model.
pub fn fig4_spec(out_prefix: PathBuf) -> SweepSpec {
    SweepSpec {
        base: DeriveSpec::default(),
        b_grid: (0..=12).map(|k| 7.0 + 0.5 * k as f64).collect(),
        g12_fractions: vec![0.2],
        alpha_grid: (0..=10).map(|k| k as f64 / 10.0).collect(),
        kind: SweepKind::Transfer,
        model: ModelKind::FullLindblad,
        settings: RunSettings::default(),
        workers: 0,
        out_prefix,
    }
}

/// The on-disk configuration: every field optional, reference-point
/// defaults fill the gaps, so a minimal file is just the sweep axes.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Physical base parameters.
    pub base: Option<BaseSection>,
    /// Sweep axes.
    pub axes: Option<AxesSection>,
    /// Protocol, model, integrator, and output settings.
    pub run: Option<RunSection>,
}

/// `[base]`: derivation inputs and channel lifetimes (µs).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSection {
    /// Normalized detuning |δ1|/g1.
    pub b: Option<f64>,
    /// δ1/2π in GHz (signed).
    pub delta1_ghz: Option<f64>,
    /// δ2/2π in GHz (signed, same sign as δ1).
    pub delta2_ghz: Option<f64>,
    /// ω10/2π in GHz.
    pub omega10_ghz: Option<f64>,
    /// Relative anharmonicity (ω10 − ω21)/ω10.
    pub anharmonicity: Option<f64>,
    /// Crosstalk fraction g12/g_max.
    pub g12_fraction: Option<f64>,
    /// Cavity photon lifetime κ⁻¹, µs.
    pub kappa_us: Option<f64>,
    /// Qutrit |1⟩ relaxation lifetime γ⁻¹, µs.
    pub gamma_us: Option<f64>,
    /// |2⟩→|1⟩ relaxation lifetime, µs.
    pub gamma21_us: Option<f64>,
    /// |2⟩→|0⟩ relaxation lifetime, µs.
    pub gamma20_us: Option<f64>,
    /// |1⟩ pure-dephasing lifetime, µs.
    pub gamma_phi1_us: Option<f64>,
    /// |2⟩ pure-dephasing lifetime, µs.
    pub gamma_phi2_us: Option<f64>,
}

impl BaseSection {
    /// Fills unset fields with the reference defaults; rejects
    /// non-positive lifetimes.
    pub fn resolve(&self) -> Result<DeriveSpec> {
        let defaults = DeriveSpec::default();
        Ok(DeriveSpec {
            b: self.b.unwrap_or(defaults.b),
            delta1_ghz: self.delta1_ghz.unwrap_or(defaults.delta1_ghz),
            delta2_ghz: self.delta2_ghz.unwrap_or(defaults.delta2_ghz),
            omega10_ghz: self.omega10_ghz.unwrap_or(defaults.omega10_ghz),
            anharmonicity: self.anharmonicity.unwrap_or(defaults.anharmonicity),
            g12_fraction: self.g12_fraction.unwrap_or(defaults.g12_fraction),
            rates: DissipationRates::from_lifetimes_us(
                self.kappa_us.unwrap_or(5.0),
                self.gamma_us.unwrap_or(10.0),
                self.gamma21_us.unwrap_or(7.5),
                self.gamma20_us.unwrap_or(30.0),
                self.gamma_phi1_us.unwrap_or(2.5),
                self.gamma_phi2_us.unwrap_or(2.5),
            )?,
        })
    }
}

/// `[axes]`: sweep grids.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxesSection {
    /// Normalized-detuning grid.
    pub b: Option<Vec<f64>>,
    /// Crosstalk-fraction grid.
    pub g12_fraction: Option<Vec<f64>>,
    /// Real-α grid (transfer only).
    pub alpha: Option<Vec<f64>>,
}

/// `[run]`: protocol, model, integrator, and output settings.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// "entanglement" or "transfer".
    pub kind: Option<SweepKind>,
    /// "ideal", "full", "lindblad", or "effective".
    pub model: Option<ModelKind>,
    /// Integrator step in picoseconds.
    pub dt_ps: Option<f64>,
    /// Monitor sampling stride, steps.
    pub sample_every: Option<usize>,
    /// Fock levels per cavity.
    pub truncation: Option<usize>,
    /// Dispersive-ratio threshold for the regime gate.
    pub regime_threshold: Option<f64>,
    /// Skip the regime gate.
    pub override_regime_check: Option<bool>,
    /// Skip the step-size check.
    pub override_step_check: Option<bool>,
    /// Worker threads (0 = one per CPU).
    pub workers: Option<usize>,
    /// Output path prefix.
    pub out_prefix: Option<String>,
    /// Transfer amplitude α for single runs.
    pub alpha: Option<f64>,
}

impl RunSection {
    /// Folds this section over default [`RunSettings`].
    pub fn resolve_settings(&self) -> RunSettings {
        let defaults = RunSettings::default();
        RunSettings {
            dt: self.dt_ps.map(|ps| ps * 1e-3).unwrap_or(defaults.dt),
            sample_every: self.sample_every.unwrap_or(defaults.sample_every),
            truncation: self.truncation.unwrap_or(defaults.truncation),
            regime_threshold: self.regime_threshold.unwrap_or(defaults.regime_threshold),
            override_regime_check: self
                .override_regime_check
                .unwrap_or(defaults.override_regime_check),
            override_step_check: self
                .override_step_check
                .unwrap_or(defaults.override_step_check),
        }
    }
}

/// Parses a TOML config file; returns the config and the hex SHA-256 of
/// the raw file bytes (recorded in the manifest so the file can be
/// re-hashed out-of-band).
pub fn load_config(path: &Path) -> Result<(FileConfig, String)> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::Config(format!("{} is not UTF-8: {e}", path.display())))?;
    let config: FileConfig = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("parsing {}: {e}", path.display())))?;
    Ok((config, hash))
}

/// Resolves a file config into a full sweep spec (axes required, the rest
/// defaulted).
pub fn resolve_sweep(config: &FileConfig) -> Result<SweepSpec> {
    let axes = config.axes.clone().unwrap_or_default();
    let run = config.run.clone().unwrap_or_default();
    let base = config.base.clone().unwrap_or_default().resolve()?;
    let kind = run.kind.unwrap_or(SweepKind::Entanglement);
    let spec = SweepSpec {
        b_grid: axes.b.unwrap_or_else(|| vec![base.b]),
        g12_fractions: axes.g12_fraction.unwrap_or_else(|| vec![base.g12_fraction]),
        alpha_grid: axes.alpha.unwrap_or_default(),
        base,
        kind,
        model: run.model.unwrap_or(ModelKind::FullLindblad),
        settings: run.resolve_settings(),
        workers: run.workers.unwrap_or(0),
        out_prefix: PathBuf::from(run.out_prefix.as_deref().unwrap_or("sweep")),
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::reduced_population;

    fn tiny_spec(dir: &Path) -> SweepSpec {
        // One cheap effective-model point: exact physics, small t1.
        SweepSpec {
            base: DeriveSpec::default().with_b(6.0),
            b_grid: vec![6.0],
            g12_fractions: vec![0.2],
            alpha_grid: Vec::new(),
            kind: SweepKind::Entanglement,
            model: ModelKind::Effective,
            settings: RunSettings::default(),
            workers: 1,
            out_prefix: dir.join("tiny"),
        }
    }

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("qcoupler-sweep-{tag}"));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn single_point_sweep_matches_direct_run_bitwise() {
        let dir = temp_dir("single");
        let spec = tiny_spec(&dir);
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 1);
        let row = &result.rows[0];

        let params = derive_params(&spec.base.with_b(6.0).with_g12_fraction(0.2)).unwrap();
        let direct = run_entanglement(&params, spec.model, &spec.settings).unwrap();
        assert_eq!(row.fidelity.to_bits(), direct.fidelity.to_bits());
        assert_eq!(row.t_op_ns.to_bits(), direct.t_op().to_bits());
        assert_eq!(
            row.max_photon_expectation.to_bits(),
            direct.evolution.max_cavity_photons.to_bits()
        );
        assert!(row.converged);
        // Round-trip sanity on the protocol result used above.
        let coupler = reduced_population(&direct.evolution.final_state, 2, 1).unwrap();
        assert!((coupler - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn rows_are_lexicographic_and_counted() {
        let spec = SweepSpec {
            b_grid: vec![6.0, 7.0],
            g12_fractions: vec![0.0, 0.2],
            alpha_grid: vec![0.0, 1.0],
            kind: SweepKind::Transfer,
            ..tiny_spec(&temp_dir("lex"))
        };
        assert_eq!(spec.grid_size(), 8);
        // Validation-only path: check ordering without integrating by using
        // an invalid-at-runtime-but-cheap trick is unavailable (every point
        // must run), so use the cheapest real grid: all α = 1 rows are
        // stationary... still 8 integrations ≈ a minute. Instead check the
        // point enumeration through a failed-fast spec: b values below the
        // derivation floor fail instantly yet still produce ordered rows.
        let failing = SweepSpec {
            b_grid: vec![1.0, 2.0],
            g12_fractions: vec![0.0, 0.2],
            alpha_grid: vec![0.0, 0.5],
            ..spec
        };
        let result = run_sweep(&failing).unwrap();
        assert_eq!(result.rows.len(), 8);
        let key: Vec<(f64, f64, f64)> = result
            .rows
            .iter()
            .map(|r| (r.b, r.g12_fraction, r.alpha.unwrap()))
            .collect();
        let mut sorted = key.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(key, sorted);
        for row in &result.rows {
            assert!(!row.converged);
            assert!(row.fidelity.is_nan());
            assert!(row.error.is_some());
        }
        assert!(!result.all_converged());
    }

    #[test]
    fn emitted_files_have_expected_shape_and_are_deterministic() {
        let dir = temp_dir("emit");
        let spec = tiny_spec(&dir);
        let result = run_sweep(&spec).unwrap();
        let files = emit_outputs(&result, &spec.out_prefix).unwrap();
        assert_eq!(files.len(), 3);
        let csv = std::fs::read_to_string(&files[0]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "kind,model,b,g12_fraction,alpha,fidelity,t_op_ns,max_photon_expectation,converged"
        );
        assert_eq!(lines.count(), result.rows.len());
        assert!(csv.starts_with("kind") && csv.ends_with('\n'));
        assert!(!csv.contains('\r'));

        let manifest = std::fs::read_to_string(&files[1]).unwrap();
        assert!(manifest.contains(&result.config_sha256));
        assert!(manifest.contains("artifact = \"qcoupler\""));
        // The recorded hash is recomputable from the embedded echo.
        let echo = canonical_config(&result.spec).unwrap();
        assert_eq!(sha256_hex(echo.as_bytes()), result.config_sha256);

        let script = std::fs::read_to_string(&files[2]).unwrap();
        assert!(script.contains("gnuplot") && script.contains("tiny.csv"));

        // Re-running the identical spec reproduces the CSV byte-for-byte.
        let again = run_sweep(&spec).unwrap();
        assert_eq!(render_csv(&again), csv);
    }

    #[test]
    fn grid_validation_rejects_malformed_specs() {
        let dir = temp_dir("validate");
        let good = tiny_spec(&dir);
        assert!(good.validate().is_ok());

        let mut no_b = good.clone();
        no_b.b_grid.clear();
        assert!(matches!(no_b.validate(), Err(Error::Config(_))));

        let mut stray_alpha = good.clone();
        stray_alpha.alpha_grid = vec![0.5];
        assert!(matches!(stray_alpha.validate(), Err(Error::Config(_))));

        let mut transfer_without_alpha = good.clone();
        transfer_without_alpha.kind = SweepKind::Transfer;
        assert!(matches!(
            transfer_without_alpha.validate(),
            Err(Error::Config(_))
        ));

        let mut bad_dt = good.clone();
        bad_dt.settings.dt = 0.0;
        assert!(matches!(bad_dt.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn canned_grids_match_their_documented_shapes() {
        let fig3 = fig3_spec(PathBuf::from("fig3"));
        assert_eq!(fig3.b_grid.len(), 17);
        assert_eq!(fig3.b_grid[0], 7.0);
        assert_eq!(*fig3.b_grid.last().unwrap(), 15.0);
        assert_eq!(fig3.g12_fractions, vec![0.0, 0.2, 0.4, 0.6, 0.8]);
        assert_eq!(fig3.kind, SweepKind::Entanglement);
        assert_eq!(fig3.grid_size(), 85);
        fig3.validate().unwrap();

        let fig4 = fig4_spec(PathBuf::from("fig4"));
        assert_eq!(fig4.b_grid.len(), 13);
        assert_eq!(*fig4.b_grid.last().unwrap(), 13.0);
        assert_eq!(fig4.alpha_grid.len(), 11);
        assert_eq!(fig4.kind, SweepKind::Transfer);
        assert_eq!(fig4.grid_size(), 143);
        fig4.validate().unwrap();
    }

    #[test]
    fn minimal_config_resolves_with_reference_defaults() {
        let text = r#"
            [axes]
            b = [9.0, 11.0]
        "#;
        let config: FileConfig = toml::from_str(text).unwrap();
        let spec = resolve_sweep(&config).unwrap();
        assert_eq!(spec.b_grid, vec![9.0, 11.0]);
        assert_eq!(spec.g12_fractions, vec![0.2]);
        assert_eq!(spec.kind, SweepKind::Entanglement);
        assert_eq!(spec.model, ModelKind::FullLindblad);
        assert_eq!(spec.settings.dt, 0.010);
        assert_eq!(spec.base.rates.kappa[0], 1.0 / 5_000.0);

        let full = r#"
            [base]
            b = 8.0
            gamma_us = 20.0

            [axes]
            b = [8.0]
            g12_fraction = [0.0]
            alpha = [0.0, 0.5, 1.0]

            [run]
            kind = "transfer"
            model = "effective"
            dt_ps = 5.0
            truncation = 4
            workers = 2
            out_prefix = "out/t"
        "#;
        let config: FileConfig = toml::from_str(full).unwrap();
        let spec = resolve_sweep(&config).unwrap();
        assert_eq!(spec.kind, SweepKind::Transfer);
        assert_eq!(spec.model, ModelKind::Effective);
        assert_eq!(spec.settings.dt, 0.005);
        assert_eq!(spec.settings.truncation, 4);
        assert_eq!(spec.workers, 2);
        assert_eq!(spec.base.rates.gamma[0], 1.0 / 20_000.0);
        assert_eq!(spec.out_prefix, PathBuf::from("out/t"));

        let unknown = "[axes]\nb = [9.0]\nbogus = 1\n";
        assert!(toml::from_str::<FileConfig>(unknown).is_err());
    }
}
