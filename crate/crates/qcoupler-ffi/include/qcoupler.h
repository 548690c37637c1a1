/*
 * Copyright 2026 qcoupler contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef QCOUPLER_H
#define QCOUPLER_H

/* Generated from the qcoupler-ffi Rust crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum {
  /**
   * The call succeeded and the out-pointer (if any) was written.
   */
  QC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QC_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or inconsistent.
   */
  QC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The operating point failed the dispersive-regime gate.
   */
  QC_STATUS_REGIME_VIOLATION = 3,
  /**
   * An unexpected internal failure (including a caught panic).
   */
  QC_STATUS_INTERNAL = 4,
} QcStatus;

/**
 * Dynamical model selector for protocol runs.
 */
typedef enum {
  /**
   * Two-level effective swap model (closed form, exact).
   */
  QC_MODEL_EFFECTIVE = 0,
  /**
   * Ideal two-level cavity-mediated model, unitary.
   */
  QC_MODEL_IDEAL = 1,
  /**
   * Full qutrit model with leakage and crosstalk, unitary.
   */
  QC_MODEL_FULL = 2,
  /**
   * Full qutrit model with dissipation (master equation).
   */
  QC_MODEL_LINDBLAD = 3,
} QcModel;

/**
 * Opaque parameter handle. Create with [`qc_params_new`], release with
 * [`qc_params_free`].
 */
typedef struct QcParams QcParams;

/**
 * Derived protocol schedule: effective couplings and durations.
 * Rates are angular (rad/ns); durations are in ns.
 */
typedef struct {
  /**
   * Effective qutrit–coupler swap coupling λ₁.
   */
  double lambda1;
  /**
   * Effective qutrit–coupler swap coupling λ₂.
   */
  double lambda2;
  /**
   * Collective swap rate Λ = √(λ₁² + λ₂²).
   */
  double big_lambda;
  /**
   * Dispersive phase rate φ₁ = g₁²/δ₁.
   */
  double phi1;
  /**
   * Dispersive phase rate φ₂ = g₂²/δ₂.
   */
  double phi2;
  /**
   * Coupler phase rate φ_A = Σ_j g_Aj²/δ_Aj.
   */
  double phi_a;
  /**
   * Entanglement-preparation duration t₁ = π/(2Λ), ns.
   */
  double t1_ns;
  /**
   * State-transfer duration t₂ = π/Λ, ns.
   */
  double t2_ns;
} QcSchedule;

/**
 * Summary of one protocol run.
 */
typedef struct {
  /**
   * Fidelity against the ideal target state (cavity vacuum included).
   */
  double fidelity;
  /**
   * Protocol duration integrated, ns.
   */
  double t_op_ns;
  /**
   * Largest instantaneous total cavity photon expectation.
   */
  double max_cavity_photons;
  /**
   * False when a convergence monitor tripped; the numbers above are
   * then indicative only.
   */
  bool converged;
} QcRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a parameter handle from the derivation inputs. Frequencies are
 * ordinary (value/2π) in GHz; `b` is the normalized detuning |δ₁|/g₁;
 * `g12_fraction` scales the intercavity crosstalk relative to the largest
 * coupler–cavity coupling. Dissipation defaults to the reference channel
 * lifetimes; override with [`qc_params_set_lifetimes_us`].
 *
 * On success writes a handle the caller owns to `out`.
 *
 * # Safety
 * `out` must be a valid pointer to a `*mut QcParams`.
 */
QcStatus qc_params_new(double b,
                       double delta1_ghz,
                       double delta2_ghz,
                       double omega10_ghz,
                       double anharmonicity,
                       double g12_fraction,
                       QcParams **out);

/**
 * Replaces the dissipation channel lifetimes (all in µs): cavity photon
 * lifetime κ⁻¹, qutrit relaxation γ⁻¹, |2⟩→|1⟩ and |2⟩→|0⟩ relaxation,
 * and the two pure-dephasing lifetimes. Non-positive values are rejected.
 *
 * # Safety
 * `params` must be a live handle from [`qc_params_new`].
 */
QcStatus qc_params_set_lifetimes_us(QcParams *params,
                                    double kappa_us,
                                    double gamma_us,
                                    double gamma21_us,
                                    double gamma20_us,
                                    double gamma_phi1_us,
                                    double gamma_phi2_us);

/**
 * Releases a handle created by [`qc_params_new`]. Null is a no-op.
 *
 * # Safety
 * `params` must be null or a live handle; the handle must not be used
 * afterwards.
 */
void qc_params_free(QcParams *params);

/**
 * Computes the derived schedule (effective couplings, phase rates,
 * protocol durations) for a handle.
 *
 * # Safety
 * `params` must be a live handle; `out` must point to writable memory for
 * one `QcSchedule`.
 */
QcStatus qc_schedule(const QcParams *params, QcSchedule *out);

/**
 * Evaluates the dispersive-regime report at the given ratio threshold and
 * writes whether every check passed.
 *
 * # Safety
 * `params` must be a live handle; `out_pass` must point to a writable
 * `bool`.
 */
QcStatus qc_validate_regime(const QcParams *params, double threshold, bool *out_pass);

/**
 * Runs the entanglement-preparation protocol (|110⟩ held for t₁) under
 * the selected model. `dt_ns ≤ 0` and `truncation = 0` select the
 * defaults (10 ps, 3 Fock levels).
 *
 * # Safety
 * `params` must be a live handle; `out` must point to writable memory for
 * one `QcRunResult`.
 */
QcStatus qc_run_entanglement(const QcParams *params,
                             QcModel model,
                             double dt_ns,
                             uint32_t truncation,
                             QcRunResult *out);

/**
 * Runs the state-transfer protocol for input amplitudes α, β (complex,
 * |α|² + |β|² = 1) held for t₂ under the selected model. `dt_ns ≤ 0` and
 * `truncation = 0` select the defaults.
 *
 * # Safety
 * `params` must be a live handle; `out` must point to writable memory for
 * one `QcRunResult`.
 */
QcStatus qc_run_transfer(const QcParams *params,
                         QcModel model,
                         double alpha_re,
                         double alpha_im,
                         double beta_re,
                         double beta_im,
                         double dt_ns,
                         uint32_t truncation,
                         QcRunResult *out);

/**
 * Returns a static, NUL-terminated name for a status code.
 */
const char *qc_status_name(QcStatus status);

/**
 * Returns the library version as a static, NUL-terminated string.
 */
const char *qc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCOUPLER_H */
