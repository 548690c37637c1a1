// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical parameters of the two-cavity, three-qutrit device: storage,
//! derivation of dependent quantities from the matching conditions, and
//! validation of the dispersive-regime inequalities.
//!
//! Two frequency scales coexist. Angular frequencies (couplings, detunings,
//! transition and cavity frequencies) are stored in rad/ns; constructors and
//! configuration accept ordinary frequencies (value/2π) in GHz. Dissipation
//! rates are plain rates in 1/ns.
//!
//! Index conventions: two-element arrays run over `[cavity 1, cavity 2]` (or
//! the qutrit hosted there), three-element arrays over
//! `[qutrit 1, qutrit 2, coupler qutrit]`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Converts an ordinary frequency in GHz (value/2π) to rad/ns.
pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    TAU * f_ghz
}

/// Converts an angular frequency in rad/ns to an ordinary frequency in GHz.
pub fn angular_to_ghz(omega: f64) -> f64 {
    omega / TAU
}

/// Dissipation rates of the lossy model, all in 1/ns.
///
/// `kappa` runs over the two cavities; the qutrit arrays run over
/// `[qutrit 1, qutrit 2, coupler qutrit]`. `gamma` is relaxation of level
/// `|1⟩`; `gamma21`/`gamma20` are the two decay paths out of level `|2⟩`;
/// `gamma_phi1`/`gamma_phi2` are pure dephasing of levels `|1⟩` and `|2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationRates {
    pub kappa: [f64; 2],
    pub gamma: [f64; 3],
    pub gamma21: [f64; 3],
    pub gamma20: [f64; 3],
    pub gamma_phi1: [f64; 3],
    pub gamma_phi2: [f64; 3],
}

impl DissipationRates {
    /// No dissipation at all (unitary dynamics).
    pub fn zero() -> Self {
        Self {
            kappa: [0.0; 2],
            gamma: [0.0; 3],
            gamma21: [0.0; 3],
            gamma20: [0.0; 3],
            gamma_phi1: [0.0; 3],
            gamma_phi2: [0.0; 3],
        }
    }

    /// Identical rates for all qutrits/cavities, specified as lifetimes in µs.
    pub fn from_lifetimes_us(
        kappa_inv: f64,
        gamma_inv: f64,
        gamma21_inv: f64,
        gamma20_inv: f64,
        gamma_phi1_inv: f64,
        gamma_phi2_inv: f64,
    ) -> Result<Self> {
        let rate = |name: &str, life_us: f64| -> Result<f64> {
            if life_us <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "lifetime {name} must be positive (got {life_us} µs)"
                )));
            }
            Ok(1.0 / (life_us * 1e3))
        };
        Ok(Self {
            kappa: [rate("kappa", kappa_inv)?; 2],
            gamma: [rate("gamma", gamma_inv)?; 3],
            gamma21: [rate("gamma21", gamma21_inv)?; 3],
            gamma20: [rate("gamma20", gamma20_inv)?; 3],
            gamma_phi1: [rate("gamma_phi1", gamma_phi1_inv)?; 3],
            gamma_phi2: [rate("gamma_phi2", gamma_phi2_inv)?; 3],
        })
    }

    fn non_negative(&self) -> Result<()> {
        let all = self
            .kappa
            .iter()
            .chain(&self.gamma)
            .chain(&self.gamma21)
            .chain(&self.gamma20)
            .chain(&self.gamma_phi1)
            .chain(&self.gamma_phi2);
        for &r in all {
            if !(r >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "dissipation rates must be ≥ 0 (got {r})"
                )));
            }
        }
        Ok(())
    }
}

impl Default for DissipationRates {
    /// Reference rates for superconducting phase qutrits: κ⁻¹ = 5 µs,
    /// γ⁻¹ = 10 µs, γ₂₁⁻¹ = 7.5 µs, γ₂₀⁻¹ = 30 µs, γ_φ1⁻¹ = γ_φ2⁻¹ = 2.5 µs,
    /// identical for all three qutrits and both cavities.
    fn default() -> Self {
        Self::from_lifetimes_us(5.0, 10.0, 7.5, 30.0, 2.5, 2.5)
            .expect("reference lifetimes are positive")
    }
}

/// Every physical constant of the device in one validated record.
///
/// Angular frequencies in rad/ns. Validation enforces the identities that tie
/// detunings to transition and cavity frequencies, and
/// `Δ = δ_A1 − δ_A2 = ω_c2 − ω_c1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Qutrit–cavity couplings g₁, g₂ on the |0⟩↔|1⟩ transition.
    pub g: [f64; 2],
    /// Coupler–cavity couplings g_A1, g_A2 on the |0⟩↔|1⟩ transition.
    pub g_a: [f64; 2],
    /// Detunings δ_j = ω10_j − ω_cj.
    pub delta: [f64; 2],
    /// Coupler detunings δ_Aj = ω10_A − ω_cj.
    pub delta_a: [f64; 2],
    /// |0⟩↔|1⟩ transition frequencies of qutrits 1, 2, A.
    pub omega10: [f64; 3],
    /// |1⟩↔|2⟩ transition frequencies of qutrits 1, 2, A.
    pub omega21: [f64; 3],
    /// Cavity mode frequencies ω_c1, ω_c2.
    pub omega_c: [f64; 2],
    /// |1⟩↔|2⟩ couplings g̃₁, g̃₂.
    pub g_tilde: [f64; 2],
    /// Coupler |1⟩↔|2⟩ couplings g̃_A1, g̃_A2.
    pub g_tilde_a: [f64; 2],
    /// |1⟩↔|2⟩ detunings δ̃_j = ω21_j − ω_cj.
    pub delta_tilde: [f64; 2],
    /// Coupler |1⟩↔|2⟩ detunings δ̃_Aj = ω21_A − ω_cj.
    pub delta_tilde_a: [f64; 2],
    /// Intercavity crosstalk coupling g₁₂.
    pub g12: f64,
    /// Cavity frequency difference Δ = ω_c2 − ω_c1.
    pub delta_c: f64,
    /// Dissipation rates of the lossy model.
    pub rates: DissipationRates,
}

impl SystemParams {
    /// Checks the internal identities to 1e-12 relative and rate positivity.
    pub fn validate(&self) -> Result<()> {
        let rel = |a: f64, b: f64| -> f64 {
            let scale = a.abs().max(b.abs()).max(1.0);
            (a - b).abs() / scale
        };
        let checks: [(&str, f64, f64); 11] = [
            (
                "Δ vs δ_A1 − δ_A2",
                self.delta_c,
                self.delta_a[0] - self.delta_a[1],
            ),
            (
                "Δ vs ω_c2 − ω_c1",
                self.delta_c,
                self.omega_c[1] - self.omega_c[0],
            ),
            (
                "δ_1 vs ω10_1 − ω_c1",
                self.delta[0],
                self.omega10[0] - self.omega_c[0],
            ),
            (
                "δ_2 vs ω10_2 − ω_c2",
                self.delta[1],
                self.omega10[1] - self.omega_c[1],
            ),
            (
                "δ_A1 vs ω10_A − ω_c1",
                self.delta_a[0],
                self.omega10[2] - self.omega_c[0],
            ),
            (
                "δ_A2 vs ω10_A − ω_c2",
                self.delta_a[1],
                self.omega10[2] - self.omega_c[1],
            ),
            (
                "δ̃_1 vs ω21_1 − ω_c1",
                self.delta_tilde[0],
                self.omega21[0] - self.omega_c[0],
            ),
            (
                "δ̃_2 vs ω21_2 − ω_c2",
                self.delta_tilde[1],
                self.omega21[1] - self.omega_c[1],
            ),
            (
                "δ̃_A1 vs ω21_A − ω_c1",
                self.delta_tilde_a[0],
                self.omega21[2] - self.omega_c[0],
            ),
            (
                "δ̃_A2 vs ω21_A − ω_c2",
                self.delta_tilde_a[1],
                self.omega21[2] - self.omega_c[1],
            ),
            (
                "Δ consistency",
                self.delta_a[0] - self.delta_a[1],
                self.omega_c[1] - self.omega_c[0],
            ),
        ];
        for (name, a, b) in checks {
            if rel(a, b) > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "identity violated: {name} ({a} vs {b})"
                )));
            }
        }
        self.rates.non_negative()
    }

    /// Largest phase rate appearing in the interaction-picture Hamiltonians,
    /// used to bound the integrator step.
    pub fn max_phase_rate(&self) -> f64 {
        self.delta
            .iter()
            .chain(&self.delta_a)
            .chain(&self.delta_tilde)
            .chain(&self.delta_tilde_a)
            .map(|d| d.abs())
            .fold(self.delta_c.abs(), f64::max)
    }
}

/// Inputs from which a full [`SystemParams`] is derived via the matching
/// conditions. Frequencies are ordinary (value/2π) in GHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeriveSpec {
    /// Normalized detuning b = |δ₁|/g₁, the main operating knob.
    pub b: f64,
    /// Detuning δ₁/2π of qutrit 1 from cavity 1, GHz (sign matters).
    pub delta1_ghz: f64,
    /// Detuning δ₂/2π of qutrit 2 from cavity 2, GHz (same sign as δ₁).
    pub delta2_ghz: f64,
    /// |0⟩↔|1⟩ transition frequency /2π shared by the three qutrits, GHz.
    pub omega10_ghz: f64,
    /// Relative anharmonicity: ω21 = (1 − anharmonicity)·ω10.
    pub anharmonicity: f64,
    /// Intercavity crosstalk as a fraction of max(g_A1, g_A2).
    pub g12_fraction: f64,
    /// Dissipation rates carried into the derived record.
    pub rates: DissipationRates,
}

impl Default for DeriveSpec {
    /// The reference operating point: b = 11, δ₁/2π = −0.5 GHz,
    /// δ₂/2π = −1 GHz, ω10/2π = 6.5 GHz, 5% anharmonicity,
    /// g₁₂ = 0.2·max(g_A1, g_A2), reference dissipation rates.
    fn default() -> Self {
        Self {
            b: 11.0,
            delta1_ghz: -0.5,
            delta2_ghz: -1.0,
            omega10_ghz: 6.5,
            anharmonicity: 0.05,
            g12_fraction: 0.2,
            rates: DissipationRates::default(),
        }
    }
}

impl DeriveSpec {
    /// Returns a copy with a different normalized detuning.
    pub fn with_b(&self, b: f64) -> Self {
        Self { b, ..self.clone() }
    }

    /// Returns a copy with a different crosstalk fraction.
    pub fn with_g12_fraction(&self, g12_fraction: f64) -> Self {
        Self {
            g12_fraction,
            ..self.clone()
        }
    }
}

/// Derives a complete parameter record from the matching conditions.
///
/// Given b = |δ₁|/g₁ and the two signed detunings, the couplings follow as
/// g₁ = |δ₁|/b, g₂ = g₁·√(δ₂/δ₁), g_A1 = g₁/√2, g_A2 = g₂/√2, which makes the
/// two effective swap couplings equal. The coupler detunings match the qutrit
/// detunings (δ_Aj = δ_j). The |1⟩↔|2⟩ sector uses ω21 = (1 − a)·ω10 (so
/// δ̃_j = δ_j − a·ω10_j) and g̃ = √2·g for every coupling, the phase-qutrit
/// values. Cavity frequencies are fixed by ω_cj = ω10 − δ_j, which guarantees
/// Δ = ω_c2 − ω_c1 = δ_A1 − δ_A2 identically. Finally
/// g₁₂ = g12_fraction · max(g_A1, g_A2).
///
/// Rejected: detunings of mixed sign or zero (the square root in g₂ would
/// leave the real axis), and operating points with any |δ|/g ratio below 3
/// (outside the dispersive regime).
pub fn derive_params(spec: &DeriveSpec) -> Result<SystemParams> {
    if !(spec.b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "b must be positive (got {})",
            spec.b
        )));
    }
    if spec.delta1_ghz == 0.0 || spec.delta2_ghz == 0.0 || spec.delta1_ghz * spec.delta2_ghz < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "detunings must be nonzero and share a sign (got {} and {} GHz)",
            spec.delta1_ghz, spec.delta2_ghz
        )));
    }
    if !(spec.g12_fraction >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "g12 fraction must be ≥ 0 (got {})",
            spec.g12_fraction
        )));
    }
    if !(0.0..1.0).contains(&spec.anharmonicity) {
        return Err(Error::InvalidParameter(format!(
            "anharmonicity fraction must lie in [0, 1) (got {})",
            spec.anharmonicity
        )));
    }

    let delta1 = ghz_to_angular(spec.delta1_ghz);
    let delta2 = ghz_to_angular(spec.delta2_ghz);
    let omega10 = ghz_to_angular(spec.omega10_ghz);

    let g1 = delta1.abs() / spec.b;
    let g2 = g1 * (delta2 / delta1).sqrt();
    let ga1 = g1 / 2.0f64.sqrt();
    let ga2 = g2 / 2.0f64.sqrt();

    // Dispersive-regime floor: every |δ|/g ratio must stay above 3.
    let ratios = [
        (delta1.abs(), g1),
        (delta2.abs(), g2),
        (delta1.abs(), ga1),
        (delta2.abs(), ga2),
    ];
    for (d, g) in ratios {
        if d < 3.0 * g {
            return Err(Error::InvalidParameter(format!(
                "b = {} places |δ|/g = {:.3} below the dispersive floor of 3",
                spec.b,
                d / g
            )));
        }
    }

    let omega21 = (1.0 - spec.anharmonicity) * omega10;
    let omega_c = [omega10 - delta1, omega10 - delta2];

    let params = SystemParams {
        g: [g1, g2],
        g_a: [ga1, ga2],
        delta: [delta1, delta2],
        delta_a: [delta1, delta2],
        omega10: [omega10; 3],
        omega21: [omega21; 3],
        omega_c,
        g_tilde: [2.0f64.sqrt() * g1, 2.0f64.sqrt() * g2],
        g_tilde_a: [2.0f64.sqrt() * ga1, 2.0f64.sqrt() * ga2],
        delta_tilde: [omega21 - omega_c[0], omega21 - omega_c[1]],
        delta_tilde_a: [omega21 - omega_c[0], omega21 - omega_c[1]],
        g12: spec.g12_fraction * ga1.max(ga2),
        delta_c: omega_c[1] - omega_c[0],
        rates: spec.rates,
    };
    params.validate()?;
    Ok(params)
}

/// Derived protocol quantities: effective swap couplings, collective rate,
/// dispersive phase rates, and the two operation durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    /// Effective swap couplings λ₁, λ₂ between each qutrit and the coupler.
    pub lambda: [f64; 2],
    /// Collective swap rate Λ = √(λ₁² + λ₂²).
    pub big_lambda: f64,
    /// Branching factor N = λ₂²/(λ₁² + λ₂²).
    pub n_factor: f64,
    /// Dispersive phase rates φ₁ = g₁²/δ₁, φ₂ = g₂²/δ₂.
    pub phi: [f64; 2],
    /// Coupler phase rate φ_A = g_A1²/δ_A1 + g_A2²/δ_A2.
    pub phi_a: f64,
    /// Entanglement-preparation duration t₁ = π/(2Λ), ns.
    pub t1: f64,
    /// State-transfer duration t₂ = π/Λ, ns.
    pub t2: f64,
}

/// Effective swap couplings λ_j = (g_j·g_Aj/2)(1/δ_j + 1/δ_Aj), the
/// second-order qutrit–coupler rates mediated by each cavity.
pub fn lambda_couplings(params: &SystemParams) -> [f64; 2] {
    let lambda_j = |j: usize| -> f64 {
        params.g[j] * params.g_a[j] / 2.0 * (1.0 / params.delta[j] + 1.0 / params.delta_a[j])
    };
    [lambda_j(0), lambda_j(1)]
}

/// Dispersive phase rates `(φ = [φ₁, φ₂], φ_A)` with φ_j = g_j²/δ_j and
/// φ_A = Σ_j g_Aj²/δ_Aj.
pub fn phase_rates(params: &SystemParams) -> ([f64; 2], f64) {
    let phi = [
        params.g[0] * params.g[0] / params.delta[0],
        params.g[1] * params.g[1] / params.delta[1],
    ];
    let phi_a = params.g_a[0] * params.g_a[0] / params.delta_a[0]
        + params.g_a[1] * params.g_a[1] / params.delta_a[1];
    (phi, phi_a)
}

/// Computes the effective-model schedule from a parameter record:
/// λ_j = (g_j·g_Aj/2)(1/δ_j + 1/δ_Aj), Λ = √(λ₁²+λ₂²), N = λ₂²/Λ²,
/// φ_j = g_j²/δ_j, φ_A = Σ_j g_Aj²/δ_Aj, t₁ = π/(2Λ), t₂ = π/Λ.
///
/// Λ uses magnitudes, so both durations are positive regardless of detuning
/// sign; the sign of λ only shifts phases the closed-form evolution already
/// carries.
pub fn schedule(params: &SystemParams) -> Result<ProtocolSchedule> {
    let lambda = lambda_couplings(params);
    let big_lambda = (lambda[0] * lambda[0] + lambda[1] * lambda[1]).sqrt();
    if big_lambda == 0.0 {
        return Err(Error::InvalidParameter(
            "both effective swap couplings vanish; the protocol has no rate".into(),
        ));
    }
    let (phi, phi_a) = phase_rates(params);
    Ok(ProtocolSchedule {
        lambda,
        big_lambda,
        n_factor: lambda[1] * lambda[1] / (big_lambda * big_lambda),
        phi,
        phi_a,
        t1: PI / (2.0 * big_lambda),
        t2: PI / big_lambda,
    })
}

/// One line of a regime-validity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    /// What is being compared.
    pub name: String,
    /// The measured ratio or residual.
    pub value: f64,
    /// The bound it is held against.
    pub threshold: f64,
    /// Whether the check passed.
    pub pass: bool,
}

/// Dispersive-regime validity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// Ratio checks: each `value` must be ≥ `threshold`.
    pub checks: Vec<RegimeCheck>,
    /// Residual of the phase-rate matching condition φ₁ = φ_A, relative;
    /// must be ≤ 1e-10 for the effective model's stationary-phase reduction.
    pub matching_residual: f64,
    /// Whether the matching residual is within tolerance.
    pub matching_pass: bool,
}

impl RegimeReport {
    /// True when every ratio check and the matching residual pass.
    pub fn all_pass(&self) -> bool {
        self.matching_pass && self.checks.iter().all(|c| c.pass)
    }

    /// A short description of the first failure, if any.
    pub fn first_failure(&self) -> Option<String> {
        for c in &self.checks {
            if !c.pass {
                return Some(format!(
                    "{} = {:.3} below threshold {}",
                    c.name, c.value, c.threshold
                ));
            }
        }
        if !self.matching_pass {
            return Some(format!(
                "phase-rate matching residual {:.3e} above 1e-10",
                self.matching_residual
            ));
        }
        None
    }
}

impl std::fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<44} {:>12.4}  ≥ {:<6} {}",
                c.name,
                c.value,
                c.threshold,
                if c.pass { "pass" } else { "FAIL" }
            )?;
        }
        writeln!(
            f,
            "{:<44} {:>12.4e}  ≤ 1e-10 {}",
            "phase-rate matching residual",
            self.matching_residual,
            if self.matching_pass { "pass" } else { "FAIL" }
        )
    }
}

/// Tolerance on the phase-rate matching residual in [`validate_regime`].
pub const MATCHING_RESIDUAL_TOL: f64 = 1e-10;

/// Evaluates the dispersive-regime inequalities.
///
/// Reports the four ratios |δ_j|/g_j and |δ_Aj|/g_Aj, the coupler
/// detuning-separation ratio |δ_A2 − δ_A1| / |(g_A1·g_A2/2)(1/δ_A1 + 1/δ_A2)|
/// (the scale that keeps the two cavity channels from interfering), and the
/// relative residual of the phase-rate matching condition
/// |g₁²/δ₁ − Σ_j g_Aj²/δ_Aj| / |g₁²/δ₁|.
///
/// Ratios are compared against `threshold` (must be > 1; 5 is the
/// conventional default), the residual against 1e-10. A vanishing coupling
/// makes its ratio infinite, which passes: a decoupled subsystem cannot leave
/// the dispersive regime.
pub fn validate_regime(params: &SystemParams, threshold: f64) -> Result<RegimeReport> {
    if !(threshold > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "regime threshold must exceed 1 (got {threshold})"
        )));
    }
    let ratio = |num: f64, den: f64| -> f64 {
        if den == 0.0 {
            f64::INFINITY
        } else {
            (num / den).abs()
        }
    };
    let mut checks = vec![
        RegimeCheck {
            name: "|δ_1|/g_1 (qutrit 1 dispersive)".into(),
            value: ratio(params.delta[0], params.g[0]),
            threshold,
            pass: false,
        },
        RegimeCheck {
            name: "|δ_2|/g_2 (qutrit 2 dispersive)".into(),
            value: ratio(params.delta[1], params.g[1]),
            threshold,
            pass: false,
        },
        RegimeCheck {
            name: "|δ_A1|/g_A1 (coupler–cavity 1 dispersive)".into(),
            value: ratio(params.delta_a[0], params.g_a[0]),
            threshold,
            pass: false,
        },
        RegimeCheck {
            name: "|δ_A2|/g_A2 (coupler–cavity 2 dispersive)".into(),
            value: ratio(params.delta_a[1], params.g_a[1]),
            threshold,
            pass: false,
        },
    ];
    // Separation of the two coupler channels: the detuning difference must
    // dominate the second-order cross-cavity rate.
    let cross_rate =
        params.g_a[0] * params.g_a[1] / 2.0 * (1.0 / params.delta_a[0] + 1.0 / params.delta_a[1]);
    checks.push(RegimeCheck {
        name: "|δ_A1 − δ_A2| / cross-cavity rate".into(),
        value: ratio(params.delta_a[0] - params.delta_a[1], cross_rate),
        threshold,
        pass: false,
    });
    for c in &mut checks {
        c.pass = c.value >= c.threshold;
    }

    let ([phi1, _], phi_a) = phase_rates(params);
    let matching_residual = if phi1 == 0.0 {
        if phi_a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((phi1 - phi_a) / phi1).abs()
    };

    Ok(RegimeReport {
        checks,
        matching_residual,
        matching_pass: matching_residual <= MATCHING_RESIDUAL_TOL,
    })
}

/// Combined lifetime of the two cavity modes, in seconds.
///
/// Each mode individually lives for `T_i = (Q_i / 2πν_ci) / n̄_i` given its
/// loaded quality factor `Q_i`, frequency `ν_ci` in Hz, and mean photon
/// number `n̄_i`; the pair is limited by `T = ½·min(T_1, T_2)`.
pub fn cavity_lifetime(
    q1: f64,
    q2: f64,
    nu_c1: f64,
    nu_c2: f64,
    nbar1: f64,
    nbar2: f64,
) -> Result<f64> {
    for (name, v) in [
        ("Q1", q1),
        ("Q2", q2),
        ("nu_c1", nu_c1),
        ("nu_c2", nu_c2),
        ("nbar1", nbar1),
        ("nbar2", nbar2),
    ] {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive (got {v})"
            )));
        }
    }
    let t1 = (q1 / (TAU * nu_c1)) / nbar1;
    let t2 = (q2 / (TAU * nu_c2)) / nbar2;
    Ok(0.5 * t1.min(t2))
}

/// Capacitive estimate of the intercavity crosstalk coupling.
///
/// With coupling capacitances C₁, C₂ and qutrit self-capacitance C_q, the
/// crosstalk mediated by the coupler is of order `g_A1·C₂/C_Σ` and
/// `g_A2·C₁/C_Σ` with `C_Σ = C₁ + C₂ + C_q`; both estimates are returned.
pub fn estimate_crosstalk(c1: f64, c2: f64, cq: f64, g_a1: f64, g_a2: f64) -> Result<(f64, f64)> {
    for (name, v) in [("C1", c1), ("C2", c2), ("Cq", cq)] {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "capacitance {name} must be positive (got {v})"
            )));
        }
    }
    let c_sigma = c1 + c2 + cq;
    Ok((g_a1 * c2 / c_sigma, g_a2 * c1 / c_sigma))
}
