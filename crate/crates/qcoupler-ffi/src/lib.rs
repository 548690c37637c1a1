// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for the qcoupler simulator.
//!
//! Parameters live behind an opaque [`QcParams`] handle created from the
//! high-level derivation inputs (normalized detuning b, the two signed
//! detunings, the |0⟩↔|1⟩ frequency, the relative anharmonicity, and the
//! crosstalk fraction); channel lifetimes can be overridden afterwards.
//! Every fallible call returns a [`QcStatus`] and writes its result through
//! an out-pointer, so the ABI carries no Rust types and no panics: all
//! entry points catch unwinds and surface them as `QC_STATUS_INTERNAL`.
//!
//! The committed C header (`include/qcoupler.h`) is generated from these
//! declarations by cbindgen and checked for drift by the test suite.
//!
//! ```c
//! QcParams *p = NULL;
//! if (qc_params_new(11.0, -0.5, -1.0, 6.5, 0.05, 0.2, &p) != QC_STATUS_OK)
//!     return 1;
//! QcRunResult r;
//! QcStatus s = qc_run_entanglement(p, QC_MODEL_LINDBLAD, 0.0, 0, &r);
//! if (s == QC_STATUS_OK && r.converged)
//!     printf("fidelity %f\n", r.fidelity);
//! qc_params_free(p);
//! ```

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64 as C64;
use qcoupler::model::{derive_params, schedule, validate_regime, DeriveSpec, DissipationRates};
use qcoupler::protocol::{run_entanglement, run_transfer, ModelKind, RunSettings};
use qcoupler::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    /// The call succeeded and the out-pointer (if any) was written.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 2,
    /// The operating point failed the dispersive-regime gate.
    RegimeViolation = 3,
    /// An unexpected internal failure (including a caught panic).
    Internal = 4,
}

/// Dynamical model selector for protocol runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcModel {
    /// Two-level effective swap model (closed form, exact).
    Effective = 0,
    /// Ideal two-level cavity-mediated model, unitary.
    Ideal = 1,
    /// Full qutrit model with leakage and crosstalk, unitary.
    Full = 2,
    /// Full qutrit model with dissipation (master equation).
    Lindblad = 3,
}

impl QcModel {
    fn to_kind(self) -> ModelKind {
        match self {
            QcModel::Effective => ModelKind::Effective,
            QcModel::Ideal => ModelKind::IdealUnitary,
            QcModel::Full => ModelKind::FullUnitary,
            QcModel::Lindblad => ModelKind::FullLindblad,
        }
    }
}

/// Opaque parameter handle. Create with [`qc_params_new`], release with
/// [`qc_params_free`].
pub struct QcParams {
    spec: DeriveSpec,
}

/// Derived protocol schedule: effective couplings and durations.
/// Rates are angular (rad/ns); durations are in ns.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QcSchedule {
    /// Effective qutrit–coupler swap coupling λ₁.
    pub lambda1: f64,
    /// Effective qutrit–coupler swap coupling λ₂.
    pub lambda2: f64,
    /// Collective swap rate Λ = √(λ₁² + λ₂²).
    pub big_lambda: f64,
    /// Dispersive phase rate φ₁ = g₁²/δ₁.
    pub phi1: f64,
    /// Dispersive phase rate φ₂ = g₂²/δ₂.
    pub phi2: f64,
    /// Coupler phase rate φ_A = Σ_j g_Aj²/δ_Aj.
    pub phi_a: f64,
    /// Entanglement-preparation duration t₁ = π/(2Λ), ns.
    pub t1_ns: f64,
    /// State-transfer duration t₂ = π/Λ, ns.
    pub t2_ns: f64,
}

/// Summary of one protocol run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QcRunResult {
    /// Fidelity against the ideal target state (cavity vacuum included).
    pub fidelity: f64,
    /// Protocol duration integrated, ns.
    pub t_op_ns: f64,
    /// Largest instantaneous total cavity photon expectation.
    pub max_cavity_photons: f64,
    /// False when a convergence monitor tripped; the numbers above are
    /// then indicative only.
    pub converged: bool,
}

fn status_of(e: &Error) -> QcStatus {
    match e {
        Error::RegimeViolation(_) => QcStatus::RegimeViolation,
        Error::InvalidParameter(_)
        | Error::Config(_)
        | Error::NotNormalized { .. }
        | Error::StepTooLarge { .. } => QcStatus::InvalidArgument,
        _ => QcStatus::Internal,
    }
}

fn guarded(body: impl FnOnce() -> QcStatus) -> QcStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(QcStatus::Internal)
}

fn settings_for(dt_ns: f64, truncation: u32) -> RunSettings {
    let mut settings = RunSettings::default();
    if dt_ns > 0.0 {
        settings.dt = dt_ns;
    }
    if truncation > 0 {
        settings.truncation = truncation as usize;
    }
    settings
}

/// Creates a parameter handle from the derivation inputs. Frequencies are
/// ordinary (value/2π) in GHz; `b` is the normalized detuning |δ₁|/g₁;
/// `g12_fraction` scales the intercavity crosstalk relative to the largest
/// coupler–cavity coupling. Dissipation defaults to the reference channel
/// lifetimes; override with [`qc_params_set_lifetimes_us`].
///
/// On success writes a handle the caller owns to `out`.
///
/// # Safety
/// `out` must be a valid pointer to a `*mut QcParams`.
#[no_mangle]
pub unsafe extern "C" fn qc_params_new(
    b: f64,
    delta1_ghz: f64,
    delta2_ghz: f64,
    omega10_ghz: f64,
    anharmonicity: f64,
    g12_fraction: f64,
    out: *mut *mut QcParams,
) -> QcStatus {
    if out.is_null() {
        return QcStatus::NullPointer;
    }
    guarded(|| {
        let spec = DeriveSpec {
            b,
            delta1_ghz,
            delta2_ghz,
            omega10_ghz,
            anharmonicity,
            g12_fraction,
            rates: DissipationRates::default(),
        };
        // Reject inconsistent inputs now so the handle is always usable.
        match derive_params(&spec) {
            Ok(_) => {
                unsafe { *out = Box::into_raw(Box::new(QcParams { spec })) };
                QcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Replaces the dissipation channel lifetimes (all in µs): cavity photon
/// lifetime κ⁻¹, qutrit relaxation γ⁻¹, |2⟩→|1⟩ and |2⟩→|0⟩ relaxation,
/// and the two pure-dephasing lifetimes. Non-positive values are rejected.
///
/// # Safety
/// `params` must be a live handle from [`qc_params_new`].
#[no_mangle]
pub unsafe extern "C" fn qc_params_set_lifetimes_us(
    params: *mut QcParams,
    kappa_us: f64,
    gamma_us: f64,
    gamma21_us: f64,
    gamma20_us: f64,
    gamma_phi1_us: f64,
    gamma_phi2_us: f64,
) -> QcStatus {
    if params.is_null() {
        return QcStatus::NullPointer;
    }
    guarded(|| {
        match DissipationRates::from_lifetimes_us(
            kappa_us,
            gamma_us,
            gamma21_us,
            gamma20_us,
            gamma_phi1_us,
            gamma_phi2_us,
        ) {
            Ok(rates) => {
                unsafe { (*params).spec.rates = rates };
                QcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a handle created by [`qc_params_new`]. Null is a no-op.
///
/// # Safety
/// `params` must be null or a live handle; the handle must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_params_free(params: *mut QcParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Computes the derived schedule (effective couplings, phase rates,
/// protocol durations) for a handle.
///
/// # Safety
/// `params` must be a live handle; `out` must point to writable memory for
/// one `QcSchedule`.
#[no_mangle]
pub unsafe extern "C" fn qc_schedule(params: *const QcParams, out: *mut QcSchedule) -> QcStatus {
    if params.is_null() || out.is_null() {
        return QcStatus::NullPointer;
    }
    guarded(|| {
        let spec = unsafe { &(*params).spec };
        match derive_params(spec).and_then(|p| schedule(&p)) {
            Ok(s) => {
                unsafe {
                    *out = QcSchedule {
                        lambda1: s.lambda[0],
                        lambda2: s.lambda[1],
                        big_lambda: s.big_lambda,
                        phi1: s.phi[0],
                        phi2: s.phi[1],
                        phi_a: s.phi_a,
                        t1_ns: s.t1,
                        t2_ns: s.t2,
                    }
                };
                QcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Evaluates the dispersive-regime report at the given ratio threshold and
/// writes whether every check passed.
///
/// # Safety
/// `params` must be a live handle; `out_pass` must point to a writable
/// `bool`.
#[no_mangle]
pub unsafe extern "C" fn qc_validate_regime(
    params: *const QcParams,
    threshold: f64,
    out_pass: *mut bool,
) -> QcStatus {
    if params.is_null() || out_pass.is_null() {
        return QcStatus::NullPointer;
    }
    guarded(|| {
        let spec = unsafe { &(*params).spec };
        match derive_params(spec).and_then(|p| validate_regime(&p, threshold)) {
            Ok(report) => {
                unsafe { *out_pass = report.all_pass() };
                QcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

fn write_run(
    out: *mut QcRunResult,
    outcome: Result<qcoupler::protocol::ProtocolRun, Error>,
) -> QcStatus {
    match outcome {
        Ok(run) => {
            let result = QcRunResult {
                fidelity: run.fidelity,
                t_op_ns: run.t_op(),
                max_cavity_photons: run.evolution.max_cavity_photons,
                converged: run.converged(),
            };
            unsafe { *out = result };
            QcStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Runs the entanglement-preparation protocol (|110⟩ held for t₁) under
/// the selected model. `dt_ns ≤ 0` and `truncation = 0` select the
/// defaults (10 ps, 3 Fock levels).
///
/// # Safety
/// `params` must be a live handle; `out` must point to writable memory for
/// one `QcRunResult`.
#[no_mangle]
pub unsafe extern "C" fn qc_run_entanglement(
    params: *const QcParams,
    model: QcModel,
    dt_ns: f64,
    truncation: u32,
    out: *mut QcRunResult,
) -> QcStatus {
    if params.is_null() || out.is_null() {
        return QcStatus::NullPointer;
    }
    guarded(|| {
        let spec = unsafe { &(*params).spec };
        let settings = settings_for(dt_ns, truncation);
        let outcome =
            derive_params(spec).and_then(|p| run_entanglement(&p, model.to_kind(), &settings));
        write_run(out, outcome)
    })
}

/// Runs the state-transfer protocol for input amplitudes α, β (complex,
/// |α|² + |β|² = 1) held for t₂ under the selected model. `dt_ns ≤ 0` and
/// `truncation = 0` select the defaults.
///
/// # Safety
/// `params` must be a live handle; `out` must point to writable memory for
/// one `QcRunResult`.
#[no_mangle]
pub unsafe extern "C" fn qc_run_transfer(
    params: *const QcParams,
    model: QcModel,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    dt_ns: f64,
    truncation: u32,
    out: *mut QcRunResult,
) -> QcStatus {
    if params.is_null() || out.is_null() {
        return QcStatus::NullPointer;
    }
    guarded(|| {
        let spec = unsafe { &(*params).spec };
        let settings = settings_for(dt_ns, truncation);
        let outcome = derive_params(spec).and_then(|p| {
            run_transfer(
                &p,
                model.to_kind(),
                C64::new(alpha_re, alpha_im),
                C64::new(beta_re, beta_im),
                &settings,
            )
        });
        write_run(out, outcome)
    })
}

/// Returns a static, NUL-terminated name for a status code.
#[no_mangle]
pub extern "C" fn qc_status_name(status: QcStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        QcStatus::Ok => b"ok\0",
        QcStatus::NullPointer => b"null pointer\0",
        QcStatus::InvalidArgument => b"invalid argument\0",
        QcStatus::RegimeViolation => b"regime violation\0",
        QcStatus::Internal => b"internal error\0",
    };
    name.as_ptr() as *const c_char
}

/// Returns the library version as a static, NUL-terminated string.
#[no_mangle]
pub extern "C" fn qc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
