// Copyright 2026 qcoupler contributors
// SPDX-License-Identifier: Apache-2.0

//! Tensor-product Hilbert-space algebra: subsystem bookkeeping, operator
//! construction and embedding, states, and the small set of dense
//! linear-algebra queries the rest of the crate is built on.
//!
//! Basis states are indexed in row-major mixed radix over the subsystem
//! labels: for dims `[d₀, …, dₙ₋₁]` the index of `|l₀ l₁ … lₙ₋₁⟩` is
//! `(((l₀·d₁) + l₁)·d₂ + …) + lₙ₋₁`. The standard layout used by the physics
//! modules is `[qutrit 1, qutrit 2, coupler qutrit, cavity 1, cavity 2]`.
//!
//! Everything here is dense: at the default cavity truncation the composite
//! dimension is 3³·3² = 243, small enough that dense storage beats sparse
//! bookkeeping everywhere except the integrator's inner loop (which compiles
//! its own sparse form, see [`crate::lindblad`]).

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Subsystem index of qutrit 1 in the standard layout.
pub const QUTRIT_1: usize = 0;
/// Subsystem index of qutrit 2 in the standard layout.
pub const QUTRIT_2: usize = 1;
/// Subsystem index of the coupler qutrit in the standard layout.
pub const QUTRIT_A: usize = 2;
/// Subsystem index of cavity 1 in the standard layout.
pub const CAVITY_1: usize = 3;
/// Subsystem index of cavity 2 in the standard layout.
pub const CAVITY_2: usize = 4;

/// Maximum |trace − 1| accepted when constructing a [`DensityMatrix`].
pub const TRACE_TOL: f64 = 1e-8;
/// Maximum Hermiticity defect accepted when constructing a [`DensityMatrix`].
pub const HERM_TOL: f64 = 1e-10;
/// Maximum |norm − 1| accepted when constructing a [`PureState`].
pub const NORM_TOL: f64 = 1e-10;

/// An ordered tensor product of finite-dimensional subsystems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    dims: Vec<usize>,
    total_dim: usize,
}

impl HilbertSpace {
    /// Builds a space from the ordered subsystem dimensions.
    ///
    /// Every dimension must be ≥ 2.
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter(
                "a Hilbert space needs at least one subsystem".into(),
            ));
        }
        for &d in dims {
            if d < 2 {
                return Err(Error::InvalidSubsystemDim(d));
            }
        }
        let total_dim = dims.iter().product();
        Ok(Self {
            dims: dims.to_vec(),
            total_dim,
        })
    }

    /// The standard layout `[qutrit 1, qutrit 2, coupler qutrit, cavity 1,
    /// cavity 2]` with `n_c` retained Fock levels per cavity.
    ///
    /// `n_c = 3` (photon numbers 0..2) is the default used throughout: the
    /// protocol is a virtual-photon process, so population above one photon is
    /// perturbatively small, but at least three levels are needed to detect
    /// leakage upward.
    pub fn standard(n_c: usize) -> Result<Self> {
        Self::new(&[3, 3, 3, n_c, n_c])
    }

    /// Ordered subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of subsystems.
    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Product of the subsystem dimensions.
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Basis index of the product ket with the given per-subsystem labels.
    pub fn index_of(&self, labels: &[usize]) -> Result<usize> {
        if labels.len() != self.dims.len() {
            return Err(Error::IndexOutOfRange(format!(
                "{} labels supplied for {} subsystems",
                labels.len(),
                self.dims.len()
            )));
        }
        let mut index = 0;
        for (k, (&l, &d)) in labels.iter().zip(&self.dims).enumerate() {
            if l >= d {
                return Err(Error::IndexOutOfRange(format!(
                    "label {l} at subsystem {k} (dimension {d})"
                )));
            }
            index = index * d + l;
        }
        Ok(index)
    }

    /// Per-subsystem labels of a basis index (inverse of [`Self::index_of`]).
    pub fn labels_of(&self, index: usize) -> Result<Vec<usize>> {
        if index >= self.total_dim {
            return Err(Error::IndexOutOfRange(format!(
                "basis index {index} in a space of dimension {}",
                self.total_dim
            )));
        }
        let mut labels = vec![0; self.dims.len()];
        let mut rest = index;
        for (k, &d) in self.dims.iter().enumerate().rev() {
            labels[k] = rest % d;
            rest /= d;
        }
        Ok(labels)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let v = a[[i, j]];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = v * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Truncated bosonic annihilation operator: entries `√n` on the
/// `(n−1, n)` superdiagonal, zero elsewhere.
pub fn annihilation(dim: usize) -> Result<Array2<C64>> {
    if dim < 2 {
        return Err(Error::InvalidSubsystemDim(dim));
    }
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Level-transition operator `|upper⟩⟨lower|` on a `dim`-level system.
pub fn transition(dim: usize, upper: usize, lower: usize) -> Result<Array2<C64>> {
    if !(lower < upper && upper < dim) {
        return Err(Error::IndexOutOfRange(format!(
            "transition |{upper}⟩⟨{lower}| on a {dim}-level system requires 0 ≤ lower < upper < dim"
        )));
    }
    let mut t = Array2::zeros((dim, dim));
    t[[upper, lower]] = C64::new(1.0, 0.0);
    Ok(t)
}

/// Number operator `diag(0, 1, …, dim−1)`.
pub fn number(dim: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_iter(
        (0..dim).map(|n| C64::new(n as f64, 0.0)),
    ))
}

/// Projector `|level⟩⟨level|` on a `dim`-level system.
pub fn projector(dim: usize, level: usize) -> Result<Array2<C64>> {
    if level >= dim {
        return Err(Error::IndexOutOfRange(format!(
            "projector level {level} on a {dim}-level system"
        )));
    }
    let mut p = Array2::zeros((dim, dim));
    p[[level, level]] = C64::new(1.0, 0.0);
    Ok(p)
}

/// A complex linear operator on a [`HilbertSpace`].
///
/// Entries are dimensionless unless stated; Hamiltonians carry angular
/// frequency in rad/ns.
#[derive(Debug, Clone)]
pub struct Operator {
    pub space: HilbertSpace,
    pub matrix: Array2<C64>,
}

impl Operator {
    /// Wraps a matrix after checking it matches the space dimension.
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::ShapeMismatch {
                expected: d,
                got: matrix.dim().0.max(matrix.dim().1),
            });
        }
        Ok(Self { space, matrix })
    }

    /// The zero operator.
    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space,
            matrix: Array2::zeros((d, d)),
        }
    }

    /// The identity operator.
    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space,
            matrix: Array2::eye(d),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.t().mapv(|v| v.conj()),
        }
    }

    /// Largest entry of `|M − M†|`.
    pub fn herm_defect(&self) -> f64 {
        herm_defect(&self.matrix)
    }

    /// Expectation value `tr(M ρ)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<C64> {
        if self.space != rho.space {
            return Err(Error::SpaceMismatch);
        }
        let d = self.space.total_dim();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                acc += self.matrix[[r, c]] * rho.rho[[c, r]];
            }
        }
        Ok(acc)
    }
}

/// Largest entry of `|M − M†|` for a raw square matrix.
pub(crate) fn herm_defect(m: &Array2<C64>) -> f64 {
    let d = m.dim().0;
    let mut worst = 0.0f64;
    for r in 0..d {
        for c in r..d {
            let defect = (m[[r, c]] - m[[c, r]].conj()).norm();
            if defect > worst {
                worst = defect;
            }
        }
    }
    worst
}

/// Embeds a single-subsystem operator into the full space:
/// `1 ⊗ … ⊗ local_op ⊗ … ⊗ 1` at the given subsystem position.
pub fn embed(
    space: &HilbertSpace,
    subsystem_index: usize,
    local_op: &Array2<C64>,
) -> Result<Operator> {
    embed_many(space, &[(subsystem_index, local_op)])
}

/// Embeds one local operator per listed subsystem (identity elsewhere) and
/// returns their tensor product in a single pass.
///
/// This is how multi-subsystem products such as `a_j σ_j⁺` are built without
/// a dense matrix multiplication: operators on distinct subsystems commute,
/// and their product is the tensor product of the locals.
pub fn embed_many(space: &HilbertSpace, locals: &[(usize, &Array2<C64>)]) -> Result<Operator> {
    let dims = space.dims();
    let mut slot: Vec<Option<&Array2<C64>>> = vec![None; dims.len()];
    for &(idx, op) in locals {
        if idx >= dims.len() {
            return Err(Error::IndexOutOfRange(format!(
                "subsystem index {idx} in a {}-subsystem space",
                dims.len()
            )));
        }
        let d = dims[idx];
        if op.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                subsystem: idx,
                expected: d,
                got: op.dim().0.max(op.dim().1),
            });
        }
        if slot[idx].replace(op).is_some() {
            return Err(Error::InvalidParameter(format!(
                "subsystem {idx} listed twice in an embedding"
            )));
        }
    }
    let mut acc = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
    for (k, &d) in dims.iter().enumerate() {
        let eye;
        let factor = match slot[k] {
            Some(op) => op,
            None => {
                eye = Array2::eye(d);
                &eye
            }
        };
        acc = kron(&acc, factor);
    }
    Operator::new(space.clone(), acc)
}

/// A pure state on a [`HilbertSpace`], normalized to 1 within [`NORM_TOL`].
#[derive(Debug, Clone)]
pub struct PureState {
    pub space: HilbertSpace,
    pub amplitudes: Array1<C64>,
}

impl PureState {
    /// Wraps an amplitude vector after checking shape and normalization.
    pub fn new(space: HilbertSpace, amplitudes: Array1<C64>) -> Result<Self> {
        let d = space.total_dim();
        if amplitudes.len() != d {
            return Err(Error::ShapeMismatch {
                expected: d,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                norm,
                tol: NORM_TOL,
            });
        }
        Ok(Self { space, amplitudes })
    }

    /// The product basis ket with the given per-subsystem labels.
    pub fn basis(space: &HilbertSpace, labels: &[usize]) -> Result<Self> {
        let idx = space.index_of(labels)?;
        let mut amplitudes = Array1::zeros(space.total_dim());
        amplitudes[idx] = C64::new(1.0, 0.0);
        Ok(Self {
            space: space.clone(),
            amplitudes,
        })
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// A density matrix on a [`HilbertSpace`]: unit trace within [`TRACE_TOL`],
/// Hermitian within [`HERM_TOL`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub space: HilbertSpace,
    pub rho: Array2<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, trace, and Hermiticity.
    pub fn new(space: HilbertSpace, rho: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if rho.dim() != (d, d) {
            return Err(Error::ShapeMismatch {
                expected: d,
                got: rho.dim().0.max(rho.dim().1),
            });
        }
        let trace = (0..d).map(|i| rho[[i, i]]).sum::<C64>();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                tol: TRACE_TOL,
            });
        }
        let defect = herm_defect(&rho);
        if defect > HERM_TOL {
            return Err(Error::NotHermitian {
                defect,
                tol: HERM_TOL,
            });
        }
        Ok(Self { space, rho })
    }

    /// Wraps a matrix without validating trace or Hermiticity. Reserved for
    /// integrator output, where bounded trace drift is a reported
    /// convergence diagnostic rather than a constructor-time invariant.
    pub(crate) fn from_raw(space: HilbertSpace, rho: Array2<C64>) -> Self {
        Self { space, rho }
    }

    /// Projector `|ψ⟩⟨ψ|` onto a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        let d = psi.space.total_dim();
        let mut rho = Array2::zeros((d, d));
        for r in 0..d {
            for c in 0..d {
                rho[[r, c]] = psi.amplitudes[r] * psi.amplitudes[c].conj();
            }
        }
        Self {
            space: psi.space.clone(),
            rho,
        }
    }

    /// Trace of the matrix.
    pub fn trace(&self) -> C64 {
        let d = self.space.total_dim();
        (0..d).map(|i| self.rho[[i, i]]).sum()
    }
}

/// Overlap fidelity `⟨ψ|ρ|ψ⟩` of a state against a pure target.
///
/// The real part is taken and the value clamped to `[0, 1]`; clamping beyond
/// 1e-8 is logged rather than silently absorbed. Insensitive to the global
/// phase of the target by construction.
pub fn fidelity_pure(target: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if target.space != rho.space {
        return Err(Error::SpaceMismatch);
    }
    let d = target.space.total_dim();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        let tr = target.amplitudes[r].conj();
        if tr == C64::new(0.0, 0.0) {
            continue;
        }
        for c in 0..d {
            acc += tr * rho.rho[[r, c]] * target.amplitudes[c];
        }
    }
    let f = acc.re;
    if !(-1e-8..=1.0 + 1e-8).contains(&f) {
        log::warn!("fidelity {f} clamped to [0, 1] beyond the 1e-8 tolerance");
    }
    Ok(f.clamp(0.0, 1.0))
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &Array2<C64>) -> Result<Array1<f64>> {
    let (vals, _) = m
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    Ok(vals)
}

/// Smallest eigenvalue of a density matrix (positivity monitor).
///
/// The input must be Hermitian within 1e-8; [`DensityMatrix`] construction
/// already guarantees a tighter bound.
pub fn spectral_floor(rho: &DensityMatrix) -> Result<f64> {
    let defect = herm_defect(&rho.rho);
    if defect > 1e-8 {
        return Err(Error::NotHermitian { defect, tol: 1e-8 });
    }
    let vals = hermitian_eigenvalues(&rho.rho)?;
    Ok(vals[0])
}

/// Exact evolution under a constant Hermitian operator, via one
/// eigendecomposition: `|ψ(t)⟩ = V e^{−i diag(λ) t} V† |ψ(0)⟩`.
///
/// Build once, then evolve to any number of times cheaply. The operator is
/// interpreted in rad/ns, times in ns.
#[derive(Debug, Clone)]
pub struct HermitianPropagator {
    space: HilbertSpace,
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<C64>,
}

impl HermitianPropagator {
    /// Diagonalizes the operator. Rejects inputs with a Hermiticity defect
    /// beyond 1e-9.
    pub fn new(op: &Operator) -> Result<Self> {
        let defect = herm_defect(&op.matrix);
        if defect > 1e-9 {
            return Err(Error::NotHermitian { defect, tol: 1e-9 });
        }
        let (vals, vecs) = op
            .matrix
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Linalg(e.to_string()))?;
        Ok(Self {
            space: op.space.clone(),
            eigenvalues: vals,
            eigenvectors: vecs,
        })
    }

    /// Applies `e^{−iHt}` to a state.
    pub fn evolve(&self, psi: &PureState, t: f64) -> Result<PureState> {
        if psi.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        let d = self.space.total_dim();
        // c = V†ψ, phase-rotate, then ψ' = Vc.
        let mut coeffs = Array1::<C64>::zeros(d);
        for k in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..d {
                acc += self.eigenvectors[[r, k]].conj() * psi.amplitudes[r];
            }
            coeffs[k] = acc * C64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        let mut out = Array1::<C64>::zeros(d);
        for r in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += self.eigenvectors[[r, k]] * coeffs[k];
            }
            out[r] = acc;
        }
        PureState::new(self.space.clone(), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn index_roundtrip_standard_layout() {
        let space = HilbertSpace::standard(3).unwrap();
        assert_eq!(space.total_dim(), 243);
        for idx in 0..space.total_dim() {
            let labels = space.labels_of(idx).unwrap();
            assert_eq!(space.index_of(&labels).unwrap(), idx);
        }
        // |110; 0, 0⟩ sits at ((1·3 + 1)·3 + 0)·9 + 0 = 108.
        assert_eq!(space.index_of(&[1, 1, 0, 0, 0]).unwrap(), 108);
    }

    #[test]
    fn space_rejects_degenerate_dims() {
        assert!(HilbertSpace::new(&[3, 1]).is_err());
        assert!(HilbertSpace::new(&[]).is_err());
    }

    #[test]
    fn embed_identity_is_identity() {
        let space = HilbertSpace::new(&[2, 3]).unwrap();
        for k in 0..2 {
            let eye = Array2::eye(space.dims()[k]);
            let op = embed(&space, k, &eye).unwrap();
            assert_eq!(op.matrix, Array2::eye(6));
        }
    }

    #[test]
    fn embed_raising_operator_moves_single_excitation() {
        // In [2,2], raise subsystem 0: |00⟩ → |10⟩.
        let space = HilbertSpace::new(&[2, 2]).unwrap();
        let raise = transition(2, 1, 0).unwrap();
        let op = embed(&space, 0, &raise).unwrap();
        let ket00 = PureState::basis(&space, &[0, 0]).unwrap();
        let out = op.matrix.dot(&ket00.amplitudes);
        let idx10 = space.index_of(&[1, 0]).unwrap();
        for i in 0..4 {
            let expect = if i == idx10 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(out[i].re, expect, epsilon = 1e-15);
            assert_abs_diff_eq!(out[i].im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn embedded_annihilation_matrix_elements() {
        // ⟨n−1|a|n⟩ = √n for the truncated ladder, embedded at a cavity slot.
        let space = HilbertSpace::new(&[2, 3]).unwrap();
        let a = annihilation(3).unwrap();
        let op = embed(&space, 1, &a).unwrap();
        for q in 0..2 {
            for n in 1..3 {
                let row = space.index_of(&[q, n - 1]).unwrap();
                let col = space.index_of(&[q, n]).unwrap();
                assert_abs_diff_eq!(op.matrix[[row, col]].re, (n as f64).sqrt(), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn annihilation_small_cases() {
        let a2 = annihilation(2).unwrap();
        assert_eq!(a2[[0, 1]], c(1.0, 0.0));
        assert_eq!(a2[[1, 0]], c(0.0, 0.0));
        let a3 = annihilation(3).unwrap();
        assert_abs_diff_eq!(a3[[0, 1]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a3[[1, 2]].re, 2.0f64.sqrt(), epsilon = 1e-15);
        assert!(annihilation(1).is_err());
    }

    #[test]
    fn number_operator_from_ladder() {
        // a†a |n⟩ = n |n⟩ below the truncation edge.
        let a = annihilation(4).unwrap();
        let n_op = a.t().mapv(|v| v.conj()).dot(&a);
        for n in 0..4 {
            assert_abs_diff_eq!(n_op[[n, n]].re, n as f64, epsilon = 1e-14);
        }
    }

    #[test]
    fn transition_examples() {
        let t10 = transition(3, 1, 0).unwrap();
        // |0⟩ → |1⟩.
        assert_eq!(t10[[1, 0]], c(1.0, 0.0));
        // σ₂₁ on |0⟩ → 0.
        let t21 = transition(3, 2, 1).unwrap();
        let ket0 = ndarray::arr1(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let out = t21.dot(&ket0);
        assert!(out.iter().all(|v| v.norm() == 0.0));
        // Adjoint swaps rows and columns; σ⁻σ⁺|0⟩ = |0⟩.
        let lower = t10.t().mapv(|v| v.conj());
        let prod = lower.dot(&t10);
        let back = prod.dot(&ket0);
        assert_abs_diff_eq!(back[0].re, 1.0, epsilon = 1e-15);
        assert!(transition(3, 0, 1).is_err());
        assert!(transition(3, 3, 0).is_err());
    }

    #[test]
    fn fidelity_pure_cases() {
        let space = HilbertSpace::new(&[2]).unwrap();
        let psi = PureState::basis(&space, &[0]).unwrap();
        let phi = PureState::basis(&space, &[1]).unwrap();
        let rho_psi = DensityMatrix::from_pure(&psi);
        assert_abs_diff_eq!(fidelity_pure(&psi, &rho_psi).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity_pure(&phi, &rho_psi).unwrap(), 0.0, epsilon = 1e-12);
        // Equal mixture of orthogonal states scores 1/2.
        let half = c(0.5, 0.0);
        let mixed = DensityMatrix::new(
            space.clone(),
            DensityMatrix::from_pure(&psi).rho.mapv(|v| v * half)
                + DensityMatrix::from_pure(&phi).rho.mapv(|v| v * half),
        )
        .unwrap();
        assert_abs_diff_eq!(fidelity_pure(&psi, &mixed).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn spectral_floor_cases() {
        let space = HilbertSpace::new(&[4]).unwrap();
        let d = space.total_dim();
        let maximally_mixed = DensityMatrix::new(
            space.clone(),
            Array2::eye(d).mapv(|v: f64| c(v / d as f64, 0.0)),
        )
        .unwrap();
        assert_abs_diff_eq!(
            spectral_floor(&maximally_mixed).unwrap(),
            1.0 / d as f64,
            epsilon = 1e-12
        );
        let pure = DensityMatrix::from_pure(&PureState::basis(&space, &[2]).unwrap());
        assert!(spectral_floor(&pure).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn density_matrix_validation() {
        let space = HilbertSpace::new(&[2]).unwrap();
        // Trace 2 rejected.
        assert!(
            DensityMatrix::new(space.clone(), Array2::eye(2).mapv(|v: f64| c(v, 0.0))).is_err()
        );
        // Non-Hermitian rejected.
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = c(1.0, 0.0);
        m[[0, 1]] = c(0.5, 0.0);
        assert!(DensityMatrix::new(space, m).is_err());
    }

    #[test]
    fn propagator_matches_two_level_rabi() {
        // H = Ω σx/2 rotates |0⟩ with ⟨0|ψ(t)⟩ = cos(Ωt/2).
        let space = HilbertSpace::new(&[2]).unwrap();
        let omega = 0.37;
        let mut sx = Array2::zeros((2, 2));
        sx[[0, 1]] = c(0.5 * omega, 0.0);
        sx[[1, 0]] = c(0.5 * omega, 0.0);
        let h = Operator::new(space.clone(), sx).unwrap();
        let prop = HermitianPropagator::new(&h).unwrap();
        let psi0 = PureState::basis(&space, &[0]).unwrap();
        for &t in &[0.0, 0.7, 2.3, 11.0] {
            let psi_t = prop.evolve(&psi0, t).unwrap();
            assert_abs_diff_eq!(
                psi_t.amplitudes[0].norm_sqr(),
                (0.5 * omega * t).cos().powi(2),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn embed_many_builds_tensor_products() {
        // a ⊗ σ⁺ on [2 (qubit), 3 (cavity)] equals the dense product of the
        // two single-subsystem embeddings.
        let space = HilbertSpace::new(&[2, 3]).unwrap();
        let raise = transition(2, 1, 0).unwrap();
        let a = annihilation(3).unwrap();
        let direct = embed_many(&space, &[(0, &raise), (1, &a)]).unwrap();
        let lhs = embed(&space, 0, &raise).unwrap();
        let rhs = embed(&space, 1, &a).unwrap();
        let product = lhs.matrix.dot(&rhs.matrix);
        let diff = (&direct.matrix - &product).mapv(|v| v.norm()).sum();
        assert_abs_diff_eq!(diff, 0.0, epsilon = 1e-14);
    }
}
