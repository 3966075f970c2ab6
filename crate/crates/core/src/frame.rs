//! (n,d)-matrix Gabor analysis: coefficient and synthesis operators, frame
//! operators, frame/Riesz detection with bounds, canonical dual and
//! biorthogonal atoms.
//!
//! The coefficient space for an n x d atom over a lattice Lambda is indexed
//! by Lambda x Z_n x Z_n and carries the lattice's integration weight (the
//! counting measure for primal lattices). Everything is materialized densely
//! and decided by eigen/singular decompositions; sizes stay in the hundreds.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bimodule::{
    matrix_left_act, matrix_left_inner, matrix_right_act, matrix_right_inner, MatrixModuleElement,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::phase::PhaseSpaceSubgroup;
use crate::signal::complex_pairs;
use crate::timefreq::tf_shift;

/// Default relative spectral tolerance for invertibility decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Allowed residual between the dense and the algebra-side canonical-dual
/// routes.
pub const DUAL_ROUTE_TOL: f64 = 1e-9;

/// Coefficients over Lambda x Z_n x Z_n, the target of the analysis
/// operator. Values are stored with the lattice index fastest, then the
/// second window index l, then the signal row k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientArray {
    n: usize,
    lattice_order: usize,
    #[serde(with = "complex_pairs")]
    values: Vec<Complex64>,
}

impl CoefficientArray {
    pub fn zero(n: usize, lattice_order: usize) -> Self {
        Self {
            n,
            lattice_order,
            values: vec![Complex64::new(0.0, 0.0); lattice_order * n * n],
        }
    }

    pub fn from_values(n: usize, lattice_order: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice_order * n * n {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients", lattice_order * n * n),
                got: format!("{}", values.len()),
            });
        }
        Ok(Self {
            n,
            lattice_order,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lattice_order(&self) -> usize {
        self.lattice_order
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    fn index(&self, lam_idx: usize, k: usize, l: usize) -> usize {
        (k * self.n + l) * self.lattice_order + lam_idx
    }

    pub fn get(&self, lam_idx: usize, k: usize, l: usize) -> Complex64 {
        self.values[self.index(lam_idx, k, l)]
    }

    pub fn set(&mut self, lam_idx: usize, k: usize, l: usize, v: Complex64) {
        let idx = self.index(lam_idx, k, l);
        self.values[idx] = v;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Weighted l^2 inner product on the coefficient space.
    pub fn inner(&self, other: &Self, weight: f64) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * weight
    }
}

/// Frame/Riesz analysis report for one atom over one lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub is_frame: bool,
    pub is_riesz: bool,
    /// lambda_min of the frame operator.
    pub lower_bound: f64,
    /// lambda_max of the frame operator.
    pub upper_bound: f64,
    /// Optimal Bessel bound; equals the upper frame bound.
    pub bessel_bound: f64,
    /// upper_bound / lower_bound when the atom generates a frame.
    pub condition: Option<f64>,
    /// Relative spectral tolerance used for the invertibility decisions.
    pub tolerance: f64,
    /// Integration weight of the coefficient-space lattice.
    pub lattice_weight: Ratio<i64>,
    /// The lattice the system was analyzed over.
    pub subgroup: PhaseSpaceSubgroup,
}

/// Dense matrix of the coefficient operator C_g on the flattened spaces:
/// rows indexed by (lambda, k, l), columns by the ambient signal layout.
///
/// C_g f (lambda, k, l) = sum_m <f_{k,m}, pi(lambda) g_{l,m}>.
pub fn coefficient_matrix(g: &MatrixModuleElement) -> CMatrix {
    let sub = g.lattice().subgroup();
    let (n, d) = (g.rows(), g.cols());
    let glen = g.group().order();
    let rows = sub.order() * n * n;
    let cols = glen * n * d;
    let mut mc = CMatrix::zeros(rows, cols);
    for (lam_idx, lam) in sub.elements().iter().enumerate() {
        for l in 0..n {
            for m in 0..d {
                let shifted = tf_shift(lam, g.entry(l, m));
                for k in 0..n {
                    let row = (k * n + l) * sub.order() + lam_idx;
                    let col_base = (k * d + m) * glen;
                    for t in 0..glen {
                        mc[(row, col_base + t)] += shifted.values()[t].conj();
                    }
                }
            }
        }
    }
    mc
}

/// The analysis (coefficient) operator applied to one element.
pub fn coefficient_op(
    g: &MatrixModuleElement,
    f: &MatrixModuleElement,
) -> Result<CoefficientArray> {
    g.same_shape(f)?;
    let sub = g.lattice().subgroup();
    let n = g.rows();
    let mut out = CoefficientArray::zero(n, sub.order());
    for (lam_idx, lam) in sub.elements().iter().enumerate() {
        for l in 0..n {
            for m in 0..g.cols() {
                let shifted = tf_shift(lam, g.entry(l, m));
                for k in 0..n {
                    let v = out.get(lam_idx, k, l) + f.entry(k, m).inner(&shifted);
                    out.set(lam_idx, k, l, v);
                }
            }
        }
    }
    Ok(out)
}

/// The synthesis operator: D_g a (k, l) = sum_m int a_{k,m}(lambda)
/// pi(lambda) g_{m,l}, integrated with the lattice weight.
pub fn synthesis_op(
    g: &MatrixModuleElement,
    coeffs: &CoefficientArray,
) -> Result<MatrixModuleElement> {
    let lattice = g.lattice();
    let sub = lattice.subgroup();
    let n = g.rows();
    if coeffs.n() != n || coeffs.lattice_order() != sub.order() {
        return Err(Error::ShapeMismatch {
            expected: format!("coefficients over {} x {n} x {n}", sub.order()),
            got: format!(
                "{} x {} x {}",
                coeffs.lattice_order(),
                coeffs.n(),
                coeffs.n()
            ),
        });
    }
    let w = lattice.weight_f64();
    let mut out = MatrixModuleElement::zero(n, g.cols(), lattice.clone());
    for (lam_idx, lam) in sub.elements().iter().enumerate() {
        for m in 0..n {
            for l in 0..g.cols() {
                let shifted = tf_shift(lam, g.entry(m, l));
                for k in 0..n {
                    let c = coeffs.get(lam_idx, k, m) * w;
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    out.entry_mut(k, l).add_assign(&shifted.scale(c));
                }
            }
        }
    }
    Ok(out)
}

/// Dense frame-like operator S_{g,h} = D_h C_g on the ambient space; with
/// `h` absent this is the frame operator S_g, a Hermitian PSD matrix.
pub fn frame_operator(
    g: &MatrixModuleElement,
    h: Option<&MatrixModuleElement>,
) -> Result<CMatrix> {
    let h = match h {
        Some(h) => {
            g.same_shape(h)?;
            h
        }
        None => g,
    };
    let w = g.lattice().weight_f64();
    let mc_g = coefficient_matrix(g);
    let mc_h = coefficient_matrix(h);
    Ok((mc_h.adjoint() * mc_g).map(|v| v * w))
}

/// Gram operator C_g C_g^* on the coefficient space, with the lattice weight.
pub fn gram_operator(g: &MatrixModuleElement) -> CMatrix {
    let w = g.lattice().weight_f64();
    let mc = coefficient_matrix(g);
    (&mc * mc.adjoint()).map(|v| v * w)
}

/// Extreme eigenvalues (lambda_min, lambda_max) of the frame operator;
/// tiny negative round-off on the PSD operator is clamped to zero.
pub fn frame_bounds(g: &MatrixModuleElement) -> Result<(f64, f64)> {
    let s = frame_operator(g, None)?;
    let (lo, hi) = linalg::hermitian_extremes(&s);
    Ok((lo.max(0.0), hi.max(0.0)))
}

/// The optimal Bessel bound: lambda_max of the frame operator.
pub fn bessel_bound(g: &MatrixModuleElement) -> Result<f64> {
    Ok(frame_bounds(g)?.1)
}

/// Full frame/Riesz analysis of an atom over its lattice.
pub fn frame_report(g: &MatrixModuleElement, tol: f64) -> Result<FrameReport> {
    let (lower, upper) = frame_bounds(g)?;
    let is_frame = lower > tol * upper && upper > 0.0;
    let gram = gram_operator(g);
    let (glo, ghi) = linalg::hermitian_extremes(&gram);
    let is_riesz = glo.max(0.0) > tol * ghi && ghi > 0.0;
    Ok(FrameReport {
        is_frame,
        is_riesz,
        lower_bound: lower,
        upper_bound: upper,
        bessel_bound: upper,
        condition: if is_frame { Some(upper / lower) } else { None },
        tolerance: tol,
        lattice_weight: g.lattice().weight(),
        subgroup: g.lattice().subgroup().clone(),
    })
}

/// Frame predicate: the frame operator is invertible at the given relative
/// tolerance.
pub fn is_frame(g: &MatrixModuleElement, tol: f64) -> Result<FrameReport> {
    frame_report(g, tol)
}

/// Riesz predicate: the coefficient-space Gram operator is invertible at the
/// given relative tolerance.
pub fn is_riesz(g: &MatrixModuleElement, tol: f64) -> Result<FrameReport> {
    frame_report(g, tol)
}

/// Canonical dual atom h = S_g^{-1} g, cross-validated against the algebra
/// route g . [g,g]_adjoint^{-1}; the two must agree to [`DUAL_ROUTE_TOL`]
/// relative to the atom norm.
pub fn canonical_dual(g: &MatrixModuleElement, tol: f64) -> Result<MatrixModuleElement> {
    let s = frame_operator(g, None)?;
    let (lo, hi) = linalg::hermitian_extremes(&s);
    if lo.max(0.0) <= tol * hi || hi == 0.0 {
        return Err(Error::NotInvertible {
            sigma_min: lo.max(0.0),
            sigma_max: hi,
        });
    }
    let s_inv = linalg::try_inverse(&s).ok_or(Error::NotInvertible {
        sigma_min: lo,
        sigma_max: hi,
    })?;
    let dense_route = MatrixModuleElement::from_flat(
        g.rows(),
        g.cols(),
        g.lattice().clone(),
        &linalg::apply(&s_inv, &g.flatten()),
    )?;

    // Independent algebra route through the adjoint-side inner product.
    let adjoint = g.lattice().adjoint();
    let right = matrix_right_inner(g, g, adjoint.subgroup())?;
    let right_inv = right.inverse()?;
    let algebra_route = matrix_right_act(g, &right_inv)?;

    let residual = dense_route.distance(&algebra_route)?;
    let scale = dense_route.norm().max(1.0);
    if residual > DUAL_ROUTE_TOL * scale {
        return Err(Error::DualRouteMismatch {
            residual: residual / scale,
        });
    }
    Ok(dense_route)
}

/// Canonical biorthogonal atom h = [[g,g]]^{-1} g for a Riesz atom; the
/// returned atom satisfies C_g C_h^* = Id on the coefficient space.
pub fn canonical_biorthogonal(g: &MatrixModuleElement, tol: f64) -> Result<MatrixModuleElement> {
    let gram = gram_operator(g);
    let (lo, hi) = linalg::hermitian_extremes(&gram);
    if lo.max(0.0) <= tol * hi || hi == 0.0 {
        return Err(Error::NotInvertible {
            sigma_min: lo.max(0.0),
            sigma_max: hi,
        });
    }
    let left = matrix_left_inner(g, g)?;
    let left_inv = left.inverse()?;
    let h = matrix_left_act(&left_inv, g)?;

    // Cross-check biorthogonality on the coefficient space.
    let w = g.lattice().weight_f64();
    let cross = (coefficient_matrix(g) * coefficient_matrix(&h).adjoint()).map(|v| v * w);
    let dim = cross.nrows();
    let residual = linalg::max_abs(&(cross - linalg::identity(dim)));
    if residual > DUAL_ROUTE_TOL {
        return Err(Error::DualRouteMismatch { residual });
    }
    Ok(h)
}

/// Applies the frame-like operator S_{g,h} to an element; the reconstruction
/// map used in dual-pair checks.
pub fn reconstruct(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
    f: &MatrixModuleElement,
) -> Result<MatrixModuleElement> {
    let coeffs = coefficient_op(g, f)?;
    synthesis_op(h, &coeffs)
}

/// Module-route frame predicate: invertibility of the represented module
/// frame operator f -> [[f, g]] g, decided by singular values. This path
/// shares no decomposition with [`frame_report`]'s eigenvalue route.
pub fn module_frame_predicate(g: &MatrixModuleElement, tol: f64) -> Result<bool> {
    let theta = crate::bimodule::theta_matrix(g, g)?;
    let (sigma_min, sigma_max) = linalg::singular_extremes(&theta);
    Ok(sigma_min > tol * sigma_max && sigma_max > 0.0)
}

/// Module-route frame bounds (||Theta^{-1}||^{-1}, ||Theta||) from singular
/// values of the represented module frame operator.
pub fn module_frame_bounds(g: &MatrixModuleElement) -> Result<(f64, f64)> {
    let theta = crate::bimodule::theta_matrix(g, g)?;
    let (sigma_min, sigma_max) = linalg::singular_extremes(&theta);
    Ok((sigma_min, sigma_max))
}

/// Module-route Riesz predicate: invertibility of [[g, g]] in the matrix
/// algebra over the atom's lattice.
pub fn module_riesz_predicate(g: &MatrixModuleElement, tol: f64) -> Result<bool> {
    let left = matrix_left_inner(g, g)?;
    let rep = left.represent();
    let (sigma_min, sigma_max) = linalg::singular_extremes(&rep);
    Ok(sigma_min > tol * sigma_max && sigma_max > 0.0)
}
