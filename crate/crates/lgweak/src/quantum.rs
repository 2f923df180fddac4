//! System-side linear algebra: observables, states, weak values, unitaries.
//!
//! Everything here lives in a small finite-dimensional Hilbert space (a few
//! qubits at most). The central quantity is the weak value
//!
//! ```text
//!     ⟨Â⟩w = ⟨ψf|Â|ψi⟩ / ⟨ψf|ψi⟩,
//! ```
//!
//! a complex number that is not an eigenvalue and need not lie in the
//! spectrum of Â. [`joint_weak_value_report`] bundles the six weak values
//! the displacement formulas consume: ⟨Â⟩w, ⟨B̂⟩w, ⟨Â²⟩w, ⟨B̂²⟩w, the
//! symmetrized joint value ⟨(ÂB̂+B̂Â)/2⟩w and the difference-of-squares
//! value ⟨(Â²−B̂²)/2⟩w.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::complex_pair;

/// Per-entry absolute tolerance for the Hermiticity check.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance on |Σ|aᵢ|² − 1| for state normalization.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Smallest |⟨ψf|ψi⟩| for which a weak value is considered well-posed.
/// Below this, round-off is amplified into arbitrarily large spurious
/// values, so the computation refuses instead.
pub const OVERLAP_FLOOR: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix not Hermitian (max |H - H†| entry = {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },
    #[error("state not normalized (Σ|a|² = {norm_sq:.17})")]
    NotNormalized { norm_sq: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("post-selection nearly orthogonal to pre-selection (|⟨ψf|ψi⟩| = {overlap_abs:.3e})")]
    NearOrthogonalPostSelection { overlap_abs: f64 },
    #[error("Hermitian eigendecomposition did not converge")]
    EigendecompositionFailure,
}

/// A Hermitian operator on the system space.
///
/// Hermiticity is enforced at construction to [`HERMITICITY_TOL`] per entry,
/// so downstream code can rely on real eigenvalues and self-adjointness
/// without re-checking.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: DMatrix<Complex64>,
}

impl Observable {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self, QuantumError> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(QuantumError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let max_asymmetry = hermitian_defect(&matrix);
        if max_asymmetry > HERMITICITY_TOL {
            return Err(QuantumError::NotHermitian { max_asymmetry });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        }
    }

    pub fn pauli_y() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        }
    }

    pub fn pauli_z() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Largest |H[j][k] − conj(H[k][j])| over all entries.
fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

/// A normalized pure state of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    vector: DVector<Complex64>,
}

impl SystemState {
    /// Wraps a vector that is already normalized to [`STATE_NORM_TOL`].
    pub fn new(vector: DVector<Complex64>) -> Result<Self, QuantumError> {
        if vector.is_empty() {
            return Err(QuantumError::ZeroVector);
        }
        let norm_sq = vector.norm_squared();
        if (norm_sq - 1.0).abs() > STATE_NORM_TOL {
            return Err(QuantumError::NotNormalized { norm_sq });
        }
        Ok(Self { vector })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(vector: DVector<Complex64>) -> Result<Self, QuantumError> {
        let norm = vector.norm();
        if vector.is_empty() || norm == 0.0 {
            return Err(QuantumError::ZeroVector);
        }
        Ok(Self {
            vector: vector / Complex64::new(norm, 0.0),
        })
    }

    /// Basis state |k⟩ in a `dim`-dimensional space.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Self { vector: v }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.vector
    }
}

/// The six weak values entering the displacement formulas, plus the
/// post-selection overlap they were conditioned on.
///
/// `diff_sq_half_w` is (a2_w − b2_w)/2 by construction, so the identity
/// holds exactly rather than to round-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValueReport {
    #[serde(with = "complex_pair")]
    pub a_w: Complex64,
    #[serde(with = "complex_pair")]
    pub b_w: Complex64,
    #[serde(with = "complex_pair")]
    pub a2_w: Complex64,
    #[serde(with = "complex_pair")]
    pub b2_w: Complex64,
    /// ⟨(ÂB̂+B̂Â)/2⟩w
    #[serde(with = "complex_pair")]
    pub sym_ab_half_w: Complex64,
    /// ⟨(Â²−B̂²)/2⟩w
    #[serde(with = "complex_pair")]
    pub diff_sq_half_w: Complex64,
    /// ⟨ψf|ψi⟩
    #[serde(with = "complex_pair")]
    pub overlap: Complex64,
}

/// Kronecker product, first factor major: (o1 ⊗ o2)[(j1,j2),(k1,k2)] =
/// o1[j1,k1]·o2[j2,k2] with j1 the slower index.
pub fn tensor_product(o1: &Observable, o2: &Observable) -> Observable {
    Observable {
        matrix: o1.matrix.kronecker(&o2.matrix),
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), QuantumError> {
    if left == right {
        Ok(())
    } else {
        Err(QuantumError::DimensionMismatch { left, right })
    }
}

/// ⟨ψf|ψi⟩, checked against [`OVERLAP_FLOOR`].
fn checked_overlap(pre: &SystemState, post: &SystemState) -> Result<Complex64, QuantumError> {
    check_dims(pre.dim(), post.dim())?;
    let overlap = post.vector.dotc(&pre.vector);
    if overlap.norm() <= OVERLAP_FLOOR {
        return Err(QuantumError::NearOrthogonalPostSelection {
            overlap_abs: overlap.norm(),
        });
    }
    Ok(overlap)
}

/// Weak value from a raw matrix; callers guarantee Hermiticity.
fn weak_value_raw(
    pre: &SystemState,
    post: &SystemState,
    m: &DMatrix<Complex64>,
    overlap: Complex64,
) -> Complex64 {
    post.vector.dotc(&(m * &pre.vector)) / overlap
}

/// ⟨ψf|obs|ψi⟩ / ⟨ψf|ψi⟩.
pub fn weak_value(
    pre: &SystemState,
    post: &SystemState,
    obs: &Observable,
) -> Result<Complex64, QuantumError> {
    check_dims(obs.dim(), pre.dim())?;
    let overlap = checked_overlap(pre, post)?;
    Ok(weak_value_raw(pre, post, &obs.matrix, overlap))
}

/// All six weak values needed by the displacement formulas, from one
/// pre/post pair.
pub fn joint_weak_value_report(
    pre: &SystemState,
    post: &SystemState,
    a: &Observable,
    b: &Observable,
) -> Result<WeakValueReport, QuantumError> {
    check_dims(a.dim(), b.dim())?;
    check_dims(a.dim(), pre.dim())?;
    let overlap = checked_overlap(pre, post)?;

    let a2 = &a.matrix * &a.matrix;
    let b2 = &b.matrix * &b.matrix;
    let sym_half = (&a.matrix * &b.matrix + &b.matrix * &a.matrix) * Complex64::new(0.5, 0.0);

    let a_w = weak_value_raw(pre, post, &a.matrix, overlap);
    let b_w = weak_value_raw(pre, post, &b.matrix, overlap);
    let a2_w = weak_value_raw(pre, post, &a2, overlap);
    let b2_w = weak_value_raw(pre, post, &b2, overlap);
    let sym_ab_half_w = weak_value_raw(pre, post, &sym_half, overlap);

    Ok(WeakValueReport {
        a_w,
        b_w,
        a2_w,
        b2_w,
        sym_ab_half_w,
        diff_sq_half_w: (a2_w - b2_w) * 0.5,
        overlap,
    })
}

/// exp(−i·scale·h) for Hermitian h, by spectral decomposition. Unitary to
/// machine precision by construction: U = V·diag(e^{−i·scale·λ})·V†.
pub fn unitary_exp(h: &Observable, scale: f64) -> Result<DMatrix<Complex64>, QuantumError> {
    unitary_exp_raw(&h.matrix, scale)
}

/// [`unitary_exp`] on a raw matrix for the hot per-momentum-point path;
/// the caller guarantees Hermiticity (real linear combinations of
/// validated observables).
pub(crate) fn unitary_exp_raw(
    m: &DMatrix<Complex64>,
    scale: f64,
) -> Result<DMatrix<Complex64>, QuantumError> {
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 1024)
        .ok_or(QuantumError::EigendecompositionFailure)?;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&lam| Complex64::cis(-scale * lam)),
    );
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&phases) * v.adjoint())
}
