// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation right-hand side and fixed-step integration with invariant
//! monitoring.
//!
//! The equation of motion is
//!
//! ```text
//! dρ/dt = −i[H(t), ρ]
//!       + Σ_c rate_c (Λ_c ρ Λ_c† − ½{Λ_c†Λ_c, ρ})
//!       + Σ_d rate_d (P_d ρ P_d  − ½{P_d, ρ})
//! ```
//!
//! where the first dissipator sum runs over collapse operators (cavity decay,
//! qutrit relaxation paths) and the second over dephasing projectors, kept in
//! the printed single-projector anticommutator form so rate conventions
//! cannot drift by factors of two (for a projector P² = P, making the two
//! forms equal — the point is which one is transcribed).
//!
//! Two right-hand-side implementations exist: [`master_rhs`] is the dense,
//! obviously-correct reference; [`integrate`] runs a compiled sparse form in
//! which every Hamiltonian term and dissipator is a coordinate list applied
//! by row AXPYs, with the combined weight operator
//! `G = Σ rate·Λ†Λ + Σ rate·P` folded in as one more static piece. The two
//! are equality-tested against each other.
//!
//! Integration is classical fixed-step RK4. The fastest scale is known a
//! priori (the largest interaction-picture phase rate), so the step is
//! checked against it up front: `dt·ω_max ≤ 0.1` rad or the call is
//! rejected. After every step the state is re-Hermitized, `ρ ← (ρ + ρ†)/2`
//! (the defect is recorded); the trace is **not** renormalized — trace drift
//! stays visible as a convergence diagnostic. A run is flagged non-converged
//! if the trace deviates beyond 1e-6 or an eigenvalue dips below −1e-6 at
//! any sample; it is flagged, not aborted.

use std::io::Write as _;
use std::path::PathBuf;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::hamiltonian::{excitation_number, HamiltonianSpec, Term};
use crate::hilbert::{
    annihilation, embed, hermitian_eigenvalues, number, projector, transition, DensityMatrix,
    HilbertSpace, Operator, CAVITY_1, CAVITY_2, QUTRIT_1, QUTRIT_2, QUTRIT_A,
};
use crate::model::DissipationRates;
use crate::{Error, Result};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Maximum allowed phase advance per step, in radians: `dt·ω_max` must stay
/// at or below this unless the caller overrides the check.
pub const STEP_PHASE_LIMIT: f64 = 0.1;

/// Trace deviation beyond which a run is flagged non-converged.
pub const TRACE_CONVERGENCE_TOL: f64 = 1e-6;

/// Eigenvalue floor below which a run is flagged non-converged.
pub const SPECTRAL_CONVERGENCE_TOL: f64 = 1e-6;

/// The dissipation channels of a master equation: collapse operators with
/// rates, and dephasing projectors with rates (kept separate because their
/// anticommutator parts are transcribed differently — see module docs).
#[derive(Debug, Clone)]
pub struct DissipatorSet {
    /// (Λ, rate): contributes rate·(ΛρΛ† − ½{Λ†Λ, ρ}).
    pub collapse: Vec<(Operator, f64)>,
    /// (P, rate): contributes rate·(PρP − ½{P, ρ}); P must be a projector.
    pub dephasing: Vec<(Operator, f64)>,
}

impl DissipatorSet {
    /// No dissipation: unitary dynamics.
    pub fn empty() -> Self {
        Self {
            collapse: Vec::new(),
            dephasing: Vec::new(),
        }
    }

    /// Validates rates (≥ 0) and that every operator lives on `space`.
    pub fn validate(&self, space: &HilbertSpace) -> Result<()> {
        for (op, rate) in self.collapse.iter().chain(&self.dephasing) {
            if !(*rate >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "dissipation rate must be ≥ 0 (got {rate})"
                )));
            }
            if op.space != *space {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(())
    }

    /// Total channel count.
    pub fn len(&self) -> usize {
        self.collapse.len() + self.dephasing.len()
    }

    /// True when no channel is present.
    pub fn is_empty(&self) -> bool {
        self.collapse.is_empty() && self.dephasing.is_empty()
    }
}

/// Builds the standard channel set on the given space from per-subsystem
/// rates: cavity decay `κ_j L[a_j]`, qutrit relaxation `γ_j L[σ_j⁻]`, the
/// two decay paths out of level |2⟩ (`γ21 L[σ₂₁⁻]`, `γ20 L[σ₂₀⁻]`), and pure
/// dephasing of levels |1⟩ and |2⟩. Channels with zero rate are omitted.
pub fn standard_dissipators(
    space: &HilbertSpace,
    rates: &DissipationRates,
) -> Result<DissipatorSet> {
    let dims = space.dims();
    if dims.len() != 5 || dims[..3] != [3, 3, 3] {
        return Err(Error::SpaceMismatch);
    }
    let mut set = DissipatorSet::empty();
    let push = |list: &mut Vec<(Operator, f64)>, op: Operator, rate: f64| {
        if rate > 0.0 {
            list.push((op, rate));
        }
    };

    for (j, cavity) in [CAVITY_1, CAVITY_2].into_iter().enumerate() {
        let a = annihilation(dims[cavity])?;
        push(&mut set.collapse, embed(space, cavity, &a)?, rates.kappa[j]);
    }

    let lower10 = transition(3, 1, 0)?.t().mapv(|v| v.conj());
    let lower21 = transition(3, 2, 1)?.t().mapv(|v| v.conj());
    let lower20 = transition(3, 2, 0)?.t().mapv(|v| v.conj());
    let p1 = projector(3, 1)?;
    let p2 = projector(3, 2)?;
    for (q, qutrit) in [QUTRIT_1, QUTRIT_2, QUTRIT_A].into_iter().enumerate() {
        push(
            &mut set.collapse,
            embed(space, qutrit, &lower10)?,
            rates.gamma[q],
        );
        push(
            &mut set.collapse,
            embed(space, qutrit, &lower21)?,
            rates.gamma21[q],
        );
        push(
            &mut set.collapse,
            embed(space, qutrit, &lower20)?,
            rates.gamma20[q],
        );
        push(
            &mut set.dephasing,
            embed(space, qutrit, &p1)?,
            rates.gamma_phi1[q],
        );
        push(
            &mut set.dephasing,
            embed(space, qutrit, &p2)?,
            rates.gamma_phi2[q],
        );
    }
    Ok(set)
}

/// Dense reference right-hand side of the master equation at time `t`.
///
/// The returned derivative is trace-free and Hermiticity-preserving; the
/// compiled integration path is tested against this function.
pub fn master_rhs(
    spec: &HamiltonianSpec,
    dissipators: &DissipatorSet,
    t: f64,
    rho: &DensityMatrix,
) -> Result<Array2<C64>> {
    if rho.space != spec.space {
        return Err(Error::SpaceMismatch);
    }
    dissipators.validate(&spec.space)?;
    let h = spec.hamiltonian_at(t)?.matrix;
    let r = &rho.rho;
    let minus_i = c(0.0, -1.0);
    let mut out = (h.dot(r) - r.dot(&h)).mapv(|v| v * minus_i);
    for (op, rate) in &dissipators.collapse {
        let l = &op.matrix;
        let ldag = l.t().mapv(|v| v.conj());
        let ldl = ldag.dot(l);
        let sandwich = l.dot(r).dot(&ldag);
        let anti = ldl.dot(r) + r.dot(&ldl);
        out.scaled_add(
            c(*rate, 0.0),
            &(&sandwich - &anti.mapv(|v| v * c(0.5, 0.0))),
        );
    }
    for (op, rate) in &dissipators.dephasing {
        let p = &op.matrix;
        let sandwich = p.dot(r).dot(p);
        let anti = p.dot(r) + r.dot(p);
        out.scaled_add(
            c(*rate, 0.0),
            &(&sandwich - &anti.mapv(|v| v * c(0.5, 0.0))),
        );
    }
    Ok(out)
}

/// A sparse coordinate-list operator: the integrator's working format.
#[derive(Debug, Clone)]
struct Coo {
    entries: Vec<(u32, u32, C64)>,
}

impl Coo {
    fn from_dense(m: &Array2<C64>) -> Self {
        let mut entries = Vec::new();
        for ((r, cidx), v) in m.indexed_iter() {
            if v.norm_sqr() != 0.0 {
                entries.push((r as u32, cidx as u32, *v));
            }
        }
        Self { entries }
    }

    fn dagger(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|&(r, cidx, v)| (cidx, r, v.conj()))
                .collect(),
        }
    }

    /// `out += scale · (M · x)`, one contiguous row AXPY per stored entry.
    fn accumulate_product(&self, scale: C64, x: &Array2<C64>, out: &mut Array2<C64>) {
        let d = x.nrows();
        let xs = x.as_slice().expect("row-major scratch");
        let os = out.as_slice_mut().expect("row-major scratch");
        for &(r, cidx, v) in &self.entries {
            let a = scale * v;
            let src = &xs[cidx as usize * d..cidx as usize * d + d];
            let dst = &mut os[r as usize * d..r as usize * d + d];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += a * s;
            }
        }
    }

    /// `out += rate · M x M†`, by direct pairwise expansion
    /// `out[r_a, r_b] += rate·v_a·v̄_b·x[c_a, c_b]` — cheap because the
    /// stored operators have O(d) entries.
    fn accumulate_sandwich(&self, rate: f64, x: &Array2<C64>, out: &mut Array2<C64>) {
        let d = x.nrows();
        let xs = x.as_slice().expect("row-major scratch");
        let os = out.as_slice_mut().expect("row-major scratch");
        for &(ra, ca, va) in &self.entries {
            for &(rb, cb, vb) in &self.entries {
                os[ra as usize * d + rb as usize] +=
                    rate * va * vb.conj() * xs[ca as usize * d + cb as usize];
            }
        }
    }
}

/// A Hamiltonian compiled to sparse term form
/// `H(t) = Σ_k (e^{iω_k t}·T_k + h.c.)` plus the largest phase rate used for
/// the step-size check.
#[derive(Debug, Clone)]
pub struct TermHamiltonian {
    space: HilbertSpace,
    terms: Vec<(Coo, Coo, f64)>,
    max_frequency: f64,
}

impl TermHamiltonian {
    /// Compiles an explicit term list. `max_frequency` (rad/ns) must bound
    /// every phase rate relevant to the dynamics; it drives the step check.
    pub fn new(space: HilbertSpace, terms: &[Term], max_frequency: f64) -> Result<Self> {
        if !(max_frequency >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "max_frequency must be ≥ 0 (got {max_frequency})"
            )));
        }
        let mut compiled = Vec::with_capacity(terms.len());
        for term in terms {
            if term.op.space != space {
                return Err(Error::SpaceMismatch);
            }
            if term.freq.abs() > max_frequency {
                return Err(Error::InvalidParameter(format!(
                    "term frequency {} exceeds declared max_frequency {max_frequency}",
                    term.freq
                )));
            }
            let coo = Coo::from_dense(&term.op.matrix);
            let dag = coo.dagger();
            compiled.push((coo, dag, term.freq));
        }
        Ok(Self {
            space,
            terms: compiled,
            max_frequency,
        })
    }

    /// Compiles a model Hamiltonian; the step check uses the largest
    /// detuning in the parameter record regardless of variant, so effective
    /// and full variants integrate on comparable grids.
    pub fn from_spec(spec: &HamiltonianSpec) -> Result<Self> {
        Self::new(
            spec.space.clone(),
            &spec.terms()?,
            spec.params.max_phase_rate(),
        )
    }

    /// The space the Hamiltonian acts on.
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// The declared bound on phase rates, rad/ns.
    pub fn max_frequency(&self) -> f64 {
        self.max_frequency
    }
}

/// Diagonals of the observables recorded at every sample. All standard
/// monitors are diagonal in the product basis, so expectations are
/// `Σ_i diag[i]·ρ[i,i]`.
#[derive(Debug, Clone)]
pub struct MonitorDiagonals {
    /// Total excitation number.
    pub n_exc: Vec<f64>,
    /// Photon number of cavity 1.
    pub n_photons_c1: Vec<f64>,
    /// Photon number of cavity 2.
    pub n_photons_c2: Vec<f64>,
}

impl MonitorDiagonals {
    /// The standard-layout monitors: total excitation and the two cavity
    /// photon numbers.
    pub fn standard(space: &HilbertSpace) -> Result<Self> {
        let dims = space.dims();
        if dims.len() != 5 || dims[..3] != [3, 3, 3] {
            return Err(Error::SpaceMismatch);
        }
        let diag_of =
            |op: &Operator| -> Vec<f64> { op.matrix.diag().iter().map(|v| v.re).collect() };
        let n_exc = excitation_number(space)?;
        let p1 = embed(space, CAVITY_1, &number(dims[CAVITY_1]))?;
        let p2 = embed(space, CAVITY_2, &number(dims[CAVITY_2]))?;
        Ok(Self {
            n_exc: diag_of(&n_exc),
            n_photons_c1: diag_of(&p1),
            n_photons_c2: diag_of(&p2),
        })
    }

    /// All-zero monitors for spaces where the standard observables are not
    /// meaningful.
    pub fn inactive(dim: usize) -> Self {
        Self {
            n_exc: vec![0.0; dim],
            n_photons_c1: vec![0.0; dim],
            n_photons_c2: vec![0.0; dim],
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        for v in [&self.n_exc, &self.n_photons_c1, &self.n_photons_c2] {
            if v.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }
}

/// Knobs of a single integration run.
#[derive(Debug, Clone)]
pub struct IntegrationOptions {
    /// Step size in ns; checked against the Hamiltonian's fastest phase.
    pub dt: f64,
    /// Record monitors every this many steps (the initial and final states
    /// are always sampled). Must be ≥ 1.
    pub sample_every: usize,
    /// Skip the `dt·ω_max ≤ 0.1` precondition (results may be garbage; the
    /// convergence monitors will say so).
    pub override_step_check: bool,
    /// Keep a density-matrix snapshot at every sample (memory: one full
    /// matrix per sample).
    pub store_states: bool,
    /// Write a per-sample diagnostic CSV to this path.
    pub trace_dump: Option<PathBuf>,
}

impl Default for IntegrationOptions {
    /// dt = 10 ps (phase advance ≈ 0.083 rad at the fastest reference
    /// detuning, 2π·1.325 rad/ns), monitors every 50 steps, no state
    /// storage, no dump.
    fn default() -> Self {
        Self {
            dt: 0.010,
            sample_every: 50,
            override_step_check: false,
            store_states: false,
            trace_dump: None,
        }
    }
}

/// One row of the per-sample diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct MonitorSample {
    /// Sample time, ns.
    pub time: f64,
    /// |tr ρ − 1|.
    pub trace_dev: f64,
    /// Worst Hermiticity defect removed at the preceding step.
    pub herm_defect: f64,
    /// Smallest eigenvalue of ρ.
    pub spectral_floor: f64,
    /// ⟨total excitation⟩.
    pub n_exc: f64,
    /// ⟨photons⟩ in cavities 1 and 2.
    pub n_photons: [f64; 2],
}

/// Where and how a convergence monitor first tripped.
#[derive(Debug, Clone)]
pub struct Violation {
    /// Sample time of the first offense, ns.
    pub time: f64,
    /// What exceeded which threshold.
    pub description: String,
}

/// Output of [`integrate`]: sampled diagnostics, the final state, and the
/// convergence verdict.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Sample times, ns.
    pub times: Vec<f64>,
    /// Diagnostics, one per sample time.
    pub monitors: Vec<MonitorSample>,
    /// Density-matrix snapshots (empty unless requested).
    pub states: Vec<(f64, DensityMatrix)>,
    /// The state at `t_final`.
    pub final_state: DensityMatrix,
    /// False iff any sample tripped a convergence monitor.
    pub converged: bool,
    /// First monitor violation, if any.
    pub violation: Option<Violation>,
    /// Maximum over samples of the total cavity photon expectation.
    pub max_cavity_photons: f64,
}

/// Integrates a compiled Hamiltonian and dissipator set from `rho0` to
/// `t_final` (ns) with fixed-step RK4 (a shortened last step lands exactly
/// on `t_final`). See the module docs for the scheme and the convergence
/// flags.
pub fn integrate_terms(
    hamiltonian: &TermHamiltonian,
    dissipators: &DissipatorSet,
    rho0: &DensityMatrix,
    t_final: f64,
    options: &IntegrationOptions,
    monitors: &MonitorDiagonals,
) -> Result<EvolutionResult> {
    let space = &hamiltonian.space;
    if rho0.space != *space {
        return Err(Error::SpaceMismatch);
    }
    dissipators.validate(space)?;
    monitors.check_dim(space.total_dim())?;
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_final must be ≥ 0 ns (got {t_final})"
        )));
    }
    if !(options.dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive (got {} ns)",
            options.dt
        )));
    }
    if options.sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be ≥ 1".into()));
    }
    let phase_product = options.dt * hamiltonian.max_frequency;
    if phase_product > STEP_PHASE_LIMIT && !options.override_step_check {
        return Err(Error::StepTooLarge {
            dt: options.dt,
            product: phase_product,
        });
    }

    let mut engine = Engine::new(hamiltonian, dissipators, space.total_dim());
    let mut run = Run {
        rho: rho0.rho.clone(),
        space: space.clone(),
        monitors,
        options,
        last_herm_defect: 0.0,
        result: RunAccumulator::default(),
    };

    run.sample(0.0)?;
    let dt = options.dt;
    let n_full = (t_final / dt).floor() as usize;
    let remainder = t_final - n_full as f64 * dt;
    let has_tail = remainder > dt * 1e-9;
    let total_steps = n_full + usize::from(has_tail);
    for step in 1..=total_steps {
        let t0 = (step - 1) as f64 * dt;
        let h = if step <= n_full { dt } else { remainder };
        engine.rk4_step(t0, h, &mut run.rho);
        run.last_herm_defect = hermitize(&mut run.rho);
        if step % options.sample_every == 0 || step == total_steps {
            let t = if step == total_steps {
                t_final
            } else {
                step as f64 * dt
            };
            run.sample(t)?;
        }
    }

    run.finish(rho0)
}

/// Compiles a model Hamiltonian, builds the standard monitors, and
/// integrates. This is the protocol-facing entry point.
pub fn integrate(
    spec: &HamiltonianSpec,
    dissipators: &DissipatorSet,
    rho0: &DensityMatrix,
    t_final: f64,
    options: &IntegrationOptions,
) -> Result<EvolutionResult> {
    let hamiltonian = TermHamiltonian::from_spec(spec)?;
    let monitors = MonitorDiagonals::standard(&spec.space)?;
    integrate_terms(&hamiltonian, dissipators, rho0, t_final, options, &monitors)
}

/// Re-Hermitizes in place, `m ← (m + m†)/2`, returning the worst defect
/// `max |m − m†|` found.
fn hermitize(m: &mut Array2<C64>) -> f64 {
    let d = m.nrows();
    let s = m.as_slice_mut().expect("row-major state");
    let mut worst: f64 = 0.0;
    for i in 0..d {
        // Diagonal: drop the imaginary part.
        let di = s[i * d + i];
        worst = worst.max(2.0 * di.im.abs());
        s[i * d + i] = c(di.re, 0.0);
        for j in i + 1..d {
            let a = s[i * d + j];
            let b = s[j * d + i];
            worst = worst.max((a - b.conj()).norm());
            let avg = (a + b.conj()) * c(0.5, 0.0);
            s[i * d + j] = avg;
            s[j * d + i] = avg.conj();
        }
    }
    worst
}

/// The compiled right-hand side and the RK4 scratch buffers.
struct Engine {
    terms: Vec<(Coo, Coo, f64)>,
    /// Static weight operator G = Σ rate·Λ†Λ + Σ rate·P.
    weight: Coo,
    /// (operator, rate) sandwich channels, collapse and dephasing alike.
    sandwiches: Vec<(Coo, f64)>,
    b: Array2<C64>,
    k: Array2<C64>,
    acc: Array2<C64>,
    stage: Array2<C64>,
}

impl Engine {
    fn new(hamiltonian: &TermHamiltonian, dissipators: &DissipatorSet, d: usize) -> Self {
        let mut weight: Array2<C64> = Array2::zeros((d, d));
        let mut sandwiches = Vec::with_capacity(dissipators.len());
        for (op, rate) in &dissipators.collapse {
            let ldag = op.matrix.t().mapv(|v| v.conj());
            weight.scaled_add(c(*rate, 0.0), &ldag.dot(&op.matrix));
            sandwiches.push((Coo::from_dense(&op.matrix), *rate));
        }
        for (op, rate) in &dissipators.dephasing {
            weight.scaled_add(c(*rate, 0.0), &op.matrix);
            sandwiches.push((Coo::from_dense(&op.matrix), *rate));
        }
        Self {
            terms: hamiltonian.terms.clone(),
            weight: Coo::from_dense(&weight),
            sandwiches,
            b: Array2::zeros((d, d)),
            k: Array2::zeros((d, d)),
            acc: Array2::zeros((d, d)),
            stage: Array2::zeros((d, d)),
        }
    }

    /// `out = −i[H(t), x] − ½{G, x} + sandwiches`, computed as
    /// `B + B†` with `B = (−iH − ½G)·x` plus the sandwich sums — valid
    /// because `x` is Hermitian along the trajectory.
    fn rhs(&mut self, t: f64, x: &Array2<C64>, out: &mut Array2<C64>) {
        let d = x.nrows();
        self.b.fill(c(0.0, 0.0));
        let minus_i = c(0.0, -1.0);
        for (op, dag, freq) in &self.terms {
            let phase = C64::from_polar(1.0, freq * t);
            op.accumulate_product(minus_i * phase, x, &mut self.b);
            dag.accumulate_product(minus_i * phase.conj(), x, &mut self.b);
        }
        self.weight.accumulate_product(c(-0.5, 0.0), x, &mut self.b);
        let bs = self.b.as_slice().expect("row-major scratch");
        let os = out.as_slice_mut().expect("row-major scratch");
        for i in 0..d {
            for j in 0..d {
                os[i * d + j] = bs[i * d + j] + bs[j * d + i].conj();
            }
        }
        for (op, rate) in &self.sandwiches {
            op.accumulate_sandwich(*rate, x, out);
        }
    }

    /// One classical RK4 step of size `h` starting at `t0`, in place.
    fn rk4_step(&mut self, t0: f64, h: f64, rho: &mut Array2<C64>) {
        let half = h / 2.0;

        let mut k = std::mem::take(&mut self.k);
        let mut acc = std::mem::take(&mut self.acc);
        let mut stage = std::mem::take(&mut self.stage);

        // k1.
        self.rhs(t0, rho, &mut k);
        acc.assign(&k);
        // k2.
        stage.assign(rho);
        stage.scaled_add(c(half, 0.0), &k);
        self.rhs(t0 + half, &stage, &mut k);
        acc.scaled_add(c(2.0, 0.0), &k);
        // k3.
        stage.assign(rho);
        stage.scaled_add(c(half, 0.0), &k);
        self.rhs(t0 + half, &stage, &mut k);
        acc.scaled_add(c(2.0, 0.0), &k);
        // k4.
        stage.assign(rho);
        stage.scaled_add(c(h, 0.0), &k);
        self.rhs(t0 + h, &stage, &mut k);
        acc.scaled_add(c(1.0, 0.0), &k);

        rho.scaled_add(c(h / 6.0, 0.0), &acc);

        self.k = k;
        self.acc = acc;
        self.stage = stage;
    }
}

#[derive(Default)]
struct RunAccumulator {
    times: Vec<f64>,
    monitors: Vec<MonitorSample>,
    states: Vec<(f64, DensityMatrix)>,
    violation: Option<Violation>,
    max_cavity_photons: f64,
}

struct Run<'a> {
    rho: Array2<C64>,
    space: HilbertSpace,
    monitors: &'a MonitorDiagonals,
    options: &'a IntegrationOptions,
    last_herm_defect: f64,
    result: RunAccumulator,
}

impl Run<'_> {
    fn sample(&mut self, t: f64) -> Result<()> {
        let d = self.rho.nrows();
        let diag: Vec<f64> = (0..d).map(|i| self.rho[[i, i]].re).collect();
        let trace: f64 = diag.iter().sum();
        let trace_dev = (trace - 1.0).abs();
        let floor = hermitian_eigenvalues(&self.rho)?
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        let expect =
            |weights: &[f64]| -> f64 { weights.iter().zip(&diag).map(|(w, p)| w * p).sum() };
        let sample = MonitorSample {
            time: t,
            trace_dev,
            herm_defect: self.last_herm_defect,
            spectral_floor: floor,
            n_exc: expect(&self.monitors.n_exc),
            n_photons: [
                expect(&self.monitors.n_photons_c1),
                expect(&self.monitors.n_photons_c2),
            ],
        };
        let photons = sample.n_photons[0] + sample.n_photons[1];
        self.result.max_cavity_photons = self.result.max_cavity_photons.max(photons);
        if self.result.violation.is_none() {
            if trace_dev > TRACE_CONVERGENCE_TOL {
                self.result.violation = Some(Violation {
                    time: t,
                    description: format!(
                        "trace deviation {trace_dev:.3e} exceeds {TRACE_CONVERGENCE_TOL:.0e}"
                    ),
                });
            } else if floor < -SPECTRAL_CONVERGENCE_TOL {
                self.result.violation = Some(Violation {
                    time: t,
                    description: format!(
                        "spectral floor {floor:.3e} below -{SPECTRAL_CONVERGENCE_TOL:.0e}"
                    ),
                });
            }
        }
        self.result.times.push(t);
        self.result.monitors.push(sample);
        if self.options.store_states {
            self.result.states.push((
                t,
                DensityMatrix::from_raw(self.space.clone(), self.rho.clone()),
            ));
        }
        Ok(())
    }

    fn write_trace_dump(&self, path: &PathBuf) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(
            w,
            "time_ns,trace_dev,herm_defect,spectral_floor,n_exc,n_photons_c1,n_photons_c2"
        )?;
        for m in &self.result.monitors {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                m.time,
                m.trace_dev,
                m.herm_defect,
                m.spectral_floor,
                m.n_exc,
                m.n_photons[0],
                m.n_photons[1]
            )?;
        }
        w.flush()?;
        Ok(())
    }

    fn finish(self, _rho0: &DensityMatrix) -> Result<EvolutionResult> {
        if let Some(path) = &self.options.trace_dump {
            self.write_trace_dump(path)?;
        }
        let RunAccumulator {
            times,
            monitors,
            states,
            violation,
            max_cavity_photons,
        } = self.result;
        Ok(EvolutionResult {
            times,
            monitors,
            states,
            final_state: DensityMatrix::from_raw(self.space, self.rho),
            converged: violation.is_none(),
            violation,
            max_cavity_photons,
        })
    }
}
