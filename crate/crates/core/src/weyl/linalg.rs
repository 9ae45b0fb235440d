//! Dense `f64` linear algebra on complex matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

type C64 = Complex<f64>;

/// Spectral decomposition `H = Q diag(λ) Q*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<C64>,
}

/// Eigendecomposition of the Hermitian part `(H + H*)/2`.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> HermitianEigen {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    HermitianEigen { values: eig.eigenvalues, vectors: eig.eigenvectors }
}

/// `exp(−i θ H)` for Hermitian `H`; unitary up to the eigenvector orthogonality.
pub fn expm_hermitian(h: &DMatrix<C64>, theta: f64) -> DMatrix<C64> {
    let HermitianEigen { values, vectors } = hermitian_eigen(h);
    let mut scaled = vectors.clone();
    for (j, lambda) in values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -theta * lambda);
        let col = vectors.column(j) * phase;
        scaled.set_column(j, &col);
    }
    &scaled * vectors.adjoint()
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}
