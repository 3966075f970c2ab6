//! Thin dense-linear-algebra helpers over nalgebra, specialized to the
//! complex matrices this crate materializes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest absolute entry; the max-norm used by entrywise residual checks.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// first so accumulated float asymmetry cannot poison the decomposition.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// (min, max) eigenvalue of a Hermitian matrix.
pub fn hermitian_extremes(m: &CMatrix) -> (f64, f64) {
    let ev = hermitian_eigenvalues(m);
    (*ev.first().unwrap(), *ev.last().unwrap())
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// (sigma_min, sigma_max).
pub fn singular_extremes(m: &CMatrix) -> (f64, f64) {
    let sv = singular_values(m);
    (*sv.last().unwrap(), *sv.first().unwrap())
}

/// Numerical rank at a relative tolerance.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Dense inverse; `None` when the matrix is numerically singular.
pub fn try_inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().try_inverse()
}

/// Orthonormal basis of the column space, at a relative singular-value cut.
pub fn column_space_basis(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let sv = &svd.singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return zeros(m.nrows(), 0);
    }
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > rel_tol * top).collect();
    let mut basis = zeros(m.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        basis.set_column(j, &u.column(i));
    }
    basis
}

/// Largest principal angle (radians) between the column spaces of two
/// matrices. Zero means the spans coincide.
///
/// Uses the sine formulation sin(theta) = ||(I - Qa Qa^dagger) Qb||_2, which
/// stays accurate for tiny angles where the cosine route saturates.
pub fn max_principal_angle(a: &CMatrix, b: &CMatrix, rel_tol: f64) -> f64 {
    let qa = column_space_basis(a, rel_tol);
    let qb = column_space_basis(b, rel_tol);
    if qa.ncols() != qb.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let residual = &qb - &qa * (qa.adjoint() * &qb);
    let sin = spectral_norm(&residual).clamp(0.0, 1.0);
    sin.asin()
}

/// Hermitian residual ||M - M^dagger||_max.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn apply(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let x = CVector::from_column_slice(v);
    (m * x).iter().cloned().collect()
}
