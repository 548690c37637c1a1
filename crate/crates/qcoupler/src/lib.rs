// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical simulator for a two-cavity circuit-QED device in which a single
//! coupler qutrit mediates entanglement generation and quantum state transfer
//! between two qutrits hosted in separate cavities.
//!
//! The device operates dispersively: every qutrit–cavity detuning is large
//! compared to the corresponding coupling, so excitation is exchanged through
//! virtual photons and cavity population stays perturbatively small. The crate
//! provides
//!
//! * exact tensor-product Hilbert-space algebra ([`hilbert`]),
//! * parameter derivation and regime validation ([`model`]),
//! * the interaction-picture Hamiltonians, from the ideal two-level model to
//!   the full three-level model with unwanted transitions and intercavity
//!   crosstalk ([`hamiltonian`]),
//! * the closed-form effective evolution used as an oracle ([`analytic`]),
//! * a Lindblad master-equation integrator with invariant monitoring
//!   ([`lindblad`]),
//! * end-to-end protocol runners that score fidelity ([`protocol`]), and
//! * parameter sweeps with CSV/manifest/plot-script persistence ([`sweep`]).
//!
//! # Conventions
//!
//! All angular frequencies are stored in rad/ns; configuration and CLI
//! surfaces accept ordinary frequencies (value/2π) in GHz. Times are in ns,
//! rates in 1/ns. The composite space is ordered
//! `[qutrit 1, qutrit 2, coupler qutrit, cavity 1, cavity 2]` with row-major
//! mixed-radix basis indexing.

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`: the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod hamiltonian;
pub mod hilbert;
pub mod lindblad;
pub mod model;
pub mod protocol;
pub mod sweep;

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    /// A local operator's dimension does not match the subsystem it targets.
    #[error(
        "subsystem {subsystem}: local operator is {got}×{got}, expected {expected}×{expected}"
    )]
    DimensionMismatch {
        subsystem: usize,
        expected: usize,
        got: usize,
    },
    /// A matrix or vector does not match the total dimension of its space.
    #[error("shape {got} does not match the space dimension {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    /// Two objects that must share a Hilbert space do not.
    #[error("objects live on different Hilbert spaces")]
    SpaceMismatch,
    /// Subsystem dimensions must each be at least 2.
    #[error("subsystem dimension {0} is below the minimum of 2")]
    InvalidSubsystemDim(usize),
    /// A matrix required to be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian: max |M − M†| entry {defect:.3e} exceeds {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },
    /// A state vector is not normalized, beyond tolerance.
    #[error("state norm {norm} differs from 1 beyond {tol:.1e}")]
    NotNormalized { norm: f64, tol: f64 },
    /// A density matrix does not have unit trace, beyond tolerance.
    #[error("density-matrix trace {trace} differs from 1 beyond {tol:.1e}")]
    TraceNotOne { trace: f64, tol: f64 },
    /// A basis label or subsystem index is out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    /// A scalar input violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Parameters fail the dispersive-regime checks and no override was given.
    #[error("dispersive-regime validation failed: {0}")]
    RegimeViolation(String),
    /// The integrator step does not resolve the fastest phase present.
    #[error(
        "time step too large: dt·max|phase rate| = {product:.3} rad exceeds 0.1 rad \
         (dt = {dt} ns); reduce dt or set the step-check override"
    )]
    StepTooLarge { dt: f64, product: f64 },
    /// The closed-form evolution was asked to evolve a ket it has no rule for.
    #[error("initial state outside the closed-form evolution domain: {0}")]
    UnsupportedInitialState(String),
    /// A dense eigensolve failed.
    #[error("eigensolver failure: {0}")]
    Linalg(String),
    /// Filesystem failure while persisting results.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Configuration file could not be parsed or resolved.
    #[error("configuration error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
