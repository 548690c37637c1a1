// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! Interaction-picture Hamiltonians of the device, in four variants: the
//! ideal two-level qutrit–cavity couplings, the full model adding the
//! |1⟩↔|2⟩ leakage couplings and intercavity crosstalk, the static effective
//! qutrit–coupler swap model, and its phased pre-resonance form with explicit
//! photon-number-dependent dispersive shifts.
//!
//! Every Hamiltonian is represented as a list of [`Term`]s under the
//! convention
//!
//! ```text
//! H(t) = Σ_k ( e^{i ω_k t} · T_k  +  h.c. )
//! ```
//!
//! so the operator factor of each term is built once and only the scalar
//! phase is recomputed per evaluation — integrators apply phases to
//! precompiled sparse copies instead of rebuilding matrices. A static
//! Hermitian block `H_s` is carried as the term `(H_s/2, ω = 0)`, whose two
//! halves reassemble it. The Hermitian conjugate half is always produced by
//! an explicit adjoint of the constructed half, never re-derived.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::hilbert::{
    annihilation, embed_many, number, projector, transition, HilbertSpace, Operator, CAVITY_1,
    CAVITY_2, QUTRIT_1, QUTRIT_2, QUTRIT_A,
};
use crate::model::{lambda_couplings, phase_rates, SystemParams};
use crate::{Error, Result};

/// Which Hamiltonian family to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Two-level qutrit–cavity exchange couplings only:
    /// Σ_j g_j(e^{iδ_j t} a_j σ_j⁺ + h.c.) + Σ_j g_Aj(e^{iδ_Aj t} a_j σ_A⁺ + h.c.).
    Ideal,
    /// [`Variant::Ideal`] plus the |1⟩↔|2⟩ couplings
    /// Σ g̃(e^{iδ̃t} a σ₂₁⁺ + h.c.) on all three qutrits and the intercavity
    /// crosstalk g₁₂(e^{iΔt} a₁a₂† + h.c.).
    Full,
    /// Static effective model H₀ + H_int: dispersive phase rates
    /// φ₁|1⟩₁⟨1| + φ₂|1⟩₂⟨1| + φ_A|1⟩_A⟨1| plus the swap couplings
    /// Σ_j λ_j(σ_j⁺σ_A⁻ + h.c.). Valid when δ_j = δ_Aj.
    Effective,
    /// Pre-resonance effective model: photon-number-dependent dispersive
    /// shifts −Σ_j (g_j²/δ_j)(|0⟩_j⟨0| a_j†a_j − |1⟩_j⟨1| a_j a_j†) and the
    /// coupler analog, plus swap terms carrying e^{i(δ_j−δ_Aj)t} phases.
    EffectiveFull,
}

impl Variant {
    /// True for the two variants derived under the equal-detuning condition.
    pub fn is_effective(self) -> bool {
        matches!(self, Variant::Effective | Variant::EffectiveFull)
    }
}

/// Relative tolerance on the equal-detuning condition δ_j = δ_Aj required by
/// the effective variants.
pub const DETUNING_MATCH_TOL: f64 = 1e-9;

/// A validated recipe for one Hamiltonian: parameters, the space to build on,
/// and the variant.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub params: SystemParams,
    pub space: HilbertSpace,
    pub variant: Variant,
}

impl HamiltonianSpec {
    /// Validates the parameters, the space layout (three qutrits and two
    /// cavity modes in the standard order), and — for the effective
    /// variants — the equal-detuning condition δ_j = δ_Aj within
    /// [`DETUNING_MATCH_TOL`] relative, which their derivation assumes.
    pub fn new(params: SystemParams, space: HilbertSpace, variant: Variant) -> Result<Self> {
        params.validate()?;
        let dims = space.dims();
        if dims.len() != 5 || dims[QUTRIT_1] != 3 || dims[QUTRIT_2] != 3 || dims[QUTRIT_A] != 3 {
            return Err(Error::InvalidParameter(format!(
                "space layout must be [3, 3, 3, n_c1, n_c2] (got {dims:?})"
            )));
        }
        if variant.is_effective() {
            for j in 0..2 {
                let scale = params.delta[j].abs().max(params.delta_a[j].abs());
                if (params.delta[j] - params.delta_a[j]).abs() > DETUNING_MATCH_TOL * scale {
                    return Err(Error::RegimeViolation(format!(
                        "effective variants require δ_{0} = δ_A{0} (got {1} vs {2} rad/ns)",
                        j + 1,
                        params.delta[j],
                        params.delta_a[j]
                    )));
                }
            }
        }
        Ok(Self {
            params,
            space,
            variant,
        })
    }

    /// The term decomposition of this Hamiltonian (see module docs for the
    /// `e^{iωt}·T + h.c.` convention). Couplings that are exactly zero
    /// produce no term.
    pub fn terms(&self) -> Result<Vec<Term>> {
        build_terms(self)
    }

    /// Evaluates the Hamiltonian matrix at time `t` (ns, must be ≥ 0):
    /// `H(t) = S(t) + S(t)†` with `S(t) = Σ_k e^{iω_k t}·T_k`, Hermitian by
    /// construction.
    pub fn hamiltonian_at(&self, t: f64) -> Result<Operator> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "evaluation time must be ≥ 0 ns (got {t})"
            )));
        }
        let mut s: Array2<C64> = Array2::zeros((self.space.total_dim(), self.space.total_dim()));
        for term in self.terms()? {
            let phase = C64::from_polar(1.0, term.freq * t);
            s.scaled_add(phase, &term.op.matrix);
        }
        let h = &s + &s.t().mapv(|v| v.conj());
        Operator::new(self.space.clone(), h)
    }
}

/// One summand of a Hamiltonian decomposition: contributes
/// `e^{i·freq·t}·op + h.c.` (a static Hermitian block `H_s` appears as
/// `(H_s/2, freq = 0)`).
#[derive(Debug, Clone)]
pub struct Term {
    /// The constant operator factor.
    pub op: Operator,
    /// Phase frequency ω in rad/ns.
    pub freq: f64,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Appends `coupling · A ⊗ B` as a term with the given frequency, skipping
/// exact zeros.
fn push_pair(
    terms: &mut Vec<Term>,
    space: &HilbertSpace,
    coupling: f64,
    a: (usize, &Array2<C64>),
    b: (usize, &Array2<C64>),
    freq: f64,
) -> Result<()> {
    if coupling == 0.0 {
        return Ok(());
    }
    let mut op = embed_many(space, &[a, b])?;
    op.matrix.mapv_inplace(|v| v * c(coupling));
    terms.push(Term { op, freq });
    Ok(())
}

fn exchange_terms(spec: &HamiltonianSpec, terms: &mut Vec<Term>) -> Result<()> {
    let p = &spec.params;
    let space = &spec.space;
    let dims = space.dims();
    let raise10 = transition(3, 1, 0)?;
    // Σ_j g_j e^{iδ_j t} a_j σ_j⁺ and the coupler's Σ_j g_Aj e^{iδ_Aj t} a_j σ_A⁺.
    for (j, (cavity, qutrit)) in [(CAVITY_1, QUTRIT_1), (CAVITY_2, QUTRIT_2)]
        .into_iter()
        .enumerate()
    {
        let a_j = annihilation(dims[cavity])?;
        push_pair(
            terms,
            space,
            p.g[j],
            (cavity, &a_j),
            (qutrit, &raise10),
            p.delta[j],
        )?;
        push_pair(
            terms,
            space,
            p.g_a[j],
            (cavity, &a_j),
            (QUTRIT_A, &raise10),
            p.delta_a[j],
        )?;
    }
    Ok(())
}

fn leakage_and_crosstalk_terms(spec: &HamiltonianSpec, terms: &mut Vec<Term>) -> Result<()> {
    let p = &spec.params;
    let space = &spec.space;
    let dims = space.dims();
    let raise21 = transition(3, 2, 1)?;
    // Σ_j g̃_j e^{iδ̃_j t} a_j σ₂₁_j⁺ and Σ_j g̃_Aj e^{iδ̃_Aj t} a_j σ₂₁_A⁺.
    for (j, (cavity, qutrit)) in [(CAVITY_1, QUTRIT_1), (CAVITY_2, QUTRIT_2)]
        .into_iter()
        .enumerate()
    {
        let a_j = annihilation(dims[cavity])?;
        push_pair(
            terms,
            space,
            p.g_tilde[j],
            (cavity, &a_j),
            (qutrit, &raise21),
            p.delta_tilde[j],
        )?;
        push_pair(
            terms,
            space,
            p.g_tilde_a[j],
            (cavity, &a_j),
            (QUTRIT_A, &raise21),
            p.delta_tilde_a[j],
        )?;
    }
    // Intercavity crosstalk g₁₂ e^{iΔt} a₁ a₂†.
    let a_1 = annihilation(dims[CAVITY_1])?;
    let adag_2 = annihilation(dims[CAVITY_2])?.t().mapv(|v| v.conj());
    push_pair(
        terms,
        space,
        p.g12,
        (CAVITY_1, &a_1),
        (CAVITY_2, &adag_2),
        p.delta_c,
    )?;
    Ok(())
}

/// Swap couplings Σ_j λ_j σ_j⁺σ_A⁻ as half-terms, with per-channel phase
/// frequencies (zero for the static effective variant).
fn swap_terms(spec: &HamiltonianSpec, freqs: [f64; 2], terms: &mut Vec<Term>) -> Result<()> {
    let space = &spec.space;
    let lambda = lambda_couplings(&spec.params);
    let raise10 = transition(3, 1, 0)?;
    let lower10 = raise10.t().mapv(|v| v.conj());
    for (j, qutrit) in [QUTRIT_1, QUTRIT_2].into_iter().enumerate() {
        push_pair(
            terms,
            space,
            lambda[j],
            (qutrit, &raise10),
            (QUTRIT_A, &lower10),
            freqs[j],
        )?;
    }
    Ok(())
}

/// The diagonal phase block of the static effective model:
/// H₀ = φ₁|1⟩₁⟨1| + φ₂|1⟩₂⟨1| + φ_A|1⟩_A⟨1|.
fn vacuum_phase_block(spec: &HamiltonianSpec) -> Result<Operator> {
    let space = &spec.space;
    let (phi, phi_a) = phase_rates(&spec.params);
    let p1 = projector(3, 1)?;
    let mut h0 = Operator::zeros(space.clone());
    for (rate, qutrit) in [(phi[0], QUTRIT_1), (phi[1], QUTRIT_2), (phi_a, QUTRIT_A)] {
        if rate == 0.0 {
            continue;
        }
        let mut block = embed_many(space, &[(qutrit, &p1)])?;
        block.matrix.mapv_inplace(|v| v * c(rate));
        h0.matrix += &block.matrix;
    }
    Ok(h0)
}

/// The photon-number-dependent dispersive shifts of the pre-resonance model:
/// −Σ_j (g_j²/δ_j)(|0⟩_j⟨0| a_j†a_j − |1⟩_j⟨1| a_j a_j†)
/// −Σ_j (g_Aj²/δ_Aj)(|0⟩_A⟨0| a_j†a_j − |1⟩_A⟨1| a_j a_j†).
///
/// Restricted to cavity vacuum (a†a → 0, aa† → 1) this reduces to the
/// diagonal block of [`vacuum_phase_block`].
fn dispersive_shift_block(spec: &HamiltonianSpec) -> Result<Operator> {
    let p = &spec.params;
    let space = &spec.space;
    let dims = space.dims();
    let p0 = projector(3, 0)?;
    let p1 = projector(3, 1)?;
    let mut shifts = Operator::zeros(space.clone());
    for (j, (cavity, qutrit)) in [(CAVITY_1, QUTRIT_1), (CAVITY_2, QUTRIT_2)]
        .into_iter()
        .enumerate()
    {
        let n_j = number(dims[cavity]);
        let aadag_j = &n_j + &Array2::<C64>::eye(dims[cavity]);
        for (chi, atom) in [
            (p.g[j] * p.g[j] / p.delta[j], qutrit),
            (p.g_a[j] * p.g_a[j] / p.delta_a[j], QUTRIT_A),
        ] {
            if chi == 0.0 {
                continue;
            }
            let mut dark = embed_many(space, &[(atom, &p0), (cavity, &n_j)])?;
            dark.matrix.mapv_inplace(|v| v * c(-chi));
            shifts.matrix += &dark.matrix;
            let mut bright = embed_many(space, &[(atom, &p1), (cavity, &aadag_j)])?;
            bright.matrix.mapv_inplace(|v| v * c(chi));
            shifts.matrix += &bright.matrix;
        }
    }
    Ok(shifts)
}

fn push_static(terms: &mut Vec<Term>, block: Operator) {
    let half = block.matrix.mapv(|v| v * c(0.5));
    let mut op = block;
    op.matrix = half;
    terms.push(Term { op, freq: 0.0 });
}

fn build_terms(spec: &HamiltonianSpec) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    match spec.variant {
        Variant::Ideal => exchange_terms(spec, &mut terms)?,
        Variant::Full => {
            exchange_terms(spec, &mut terms)?;
            leakage_and_crosstalk_terms(spec, &mut terms)?;
        }
        Variant::Effective => {
            push_static(&mut terms, vacuum_phase_block(spec)?);
            swap_terms(spec, [0.0, 0.0], &mut terms)?;
        }
        Variant::EffectiveFull => {
            push_static(&mut terms, dispersive_shift_block(spec)?);
            let p = &spec.params;
            swap_terms(
                spec,
                [p.delta[0] - p.delta_a[0], p.delta[1] - p.delta_a[1]],
                &mut terms,
            )?;
        }
    }
    terms.retain(|t| t.op.matrix.iter().any(|v| v.norm_sqr() != 0.0));
    Ok(terms)
}

/// Total excitation number Σ_qutrits (|1⟩⟨1| + 2|2⟩⟨2|) + Σ_cavities a†a,
/// the conserved charge of the exchange couplings: every interaction term
/// moves one excitation between subsystems.
pub fn excitation_number(space: &HilbertSpace) -> Result<Operator> {
    let dims = space.dims();
    let mut total = Operator::zeros(space.clone());
    for qutrit in [QUTRIT_1, QUTRIT_2, QUTRIT_A] {
        let mut levels = projector(3, 1)?;
        levels.scaled_add(c(2.0), &projector(3, 2)?);
        total.matrix += &embed_many(space, &[(qutrit, &levels)])?.matrix;
    }
    for cavity in [CAVITY_1, CAVITY_2] {
        total.matrix += &embed_many(space, &[(cavity, &number(dims[cavity]))])?.matrix;
    }
    Ok(total)
}
