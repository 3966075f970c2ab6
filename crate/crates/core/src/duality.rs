//! Theorem verifiers producing machine-checkable verdicts.
//!
//! A verdict never asserts a theorem directly: it reports two independently
//! computed predicates together with their residuals, and `pass` records
//! whether the instance is consistent with the theorem. A failing verdict is
//! a reportable counterexample (in practice, an implementation bug flag).

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::algebra::MatrixAlgebraElement;
use crate::bimodule::{
    atom_hash, left_action_matrix, matrix_left_inner, matrix_right_inner, MatrixModuleElement,
};
use crate::error::{Error, Result};
use crate::frame::{frame_operator, frame_report, FrameReport};
use crate::linalg::{self, CMatrix};
use crate::phase::{PhaseSpacePoint, PhaseSpaceSubgroup};
use crate::timefreq::{tf_shift, tf_shift_adjoint};

/// Maximum principal angle accepted by the range check.
pub const RANGE_ANGLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    Duality,
    WexlerRaz,
    Density,
    Idempotent,
    IdempotentRange,
    MultiwindowSuper,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Duality => "duality",
            TheoremId::WexlerRaz => "wexler-raz",
            TheoremId::Density => "density",
            TheoremId::Idempotent => "idempotent",
            TheoremId::IdempotentRange => "idempotent-range",
            TheoremId::MultiwindowSuper => "multiwindow-super",
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which concrete instance a verdict talks about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub group_orders: Vec<usize>,
    pub subgroup_order: usize,
    pub subgroup_generators: Vec<PhaseSpacePoint>,
    pub n: usize,
    pub d: usize,
    pub atom_hash: String,
}

impl InstanceInfo {
    pub fn for_atom(g: &MatrixModuleElement) -> Self {
        let sub = g.lattice().subgroup();
        Self {
            group_orders: g.group().orders().to_vec(),
            subgroup_order: sub.order(),
            subgroup_generators: sub.generators().to_vec(),
            n: g.rows(),
            d: g.cols(),
            atom_hash: atom_hash(g),
        }
    }
}

/// Outcome of checking one theorem on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub theorem: TheoremId,
    pub instance: InstanceInfo,
    /// First independently computed predicate.
    pub lhs: bool,
    /// Second independently computed predicate.
    pub rhs: bool,
    /// Named residuals backing the predicates.
    pub residuals: BTreeMap<String, f64>,
    pub max_residual: f64,
    pub pass: bool,
}

impl TheoremVerdict {
    fn new(
        theorem: TheoremId,
        instance: InstanceInfo,
        lhs: bool,
        rhs: bool,
        residuals: BTreeMap<String, f64>,
        pass: bool,
    ) -> Self {
        let max_residual = residuals.values().cloned().fold(0.0, f64::max);
        Self {
            theorem,
            instance,
            lhs,
            rhs,
            residuals,
            max_residual,
            pass,
        }
    }
}

/// The biorthogonality data of a pair: for each adjoint point mu one d x d
/// matrix with entries sum_k <g_{k,i}, pi(mu) h_{k,j}>. For a dual pair this
/// equals s(Lambda) delta_{mu,0} times the identity.
pub fn biorthogonality_matrices(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
    adjoint_sub: &PhaseSpaceSubgroup,
) -> Result<Vec<CMatrix>> {
    g.same_shape(h)?;
    let d = g.cols();
    let mut out = Vec::with_capacity(adjoint_sub.order());
    for mu in adjoint_sub.elements() {
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..g.rows() {
                    acc += g.entry(k, i).inner(&tf_shift(mu, h.entry(k, j)));
                }
                m[(i, j)] = acc;
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// Wexler-Raz biorthogonality: compares (i) the reconstruction predicate
/// S_{g,h} = Id against (ii) the biorthogonality sums hitting
/// s(Lambda) delta_{mu,0} delta_{i,j}; the verdict passes when the two
/// predicates agree.
pub fn wexler_raz_check(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
    tol: f64,
) -> Result<TheoremVerdict> {
    g.same_shape(h)?;
    let dim = g.dim();
    let s_gh = frame_operator(g, Some(h))?;
    let rec_residual = linalg::max_abs(&(s_gh - linalg::identity(dim)));
    let reconstructs = rec_residual < tol;

    let s = g.lattice().subgroup().size();
    let s_f64 = (*s.numer() as f64) / (*s.denom() as f64);
    let adjoint = g.lattice().adjoint();
    let matrices = biorthogonality_matrices(g, h, adjoint.subgroup())?;
    let mut bio_residual: f64 = 0.0;
    for (mu, m) in adjoint.subgroup().elements().iter().zip(&matrices) {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let expected = if mu.is_identity() && i == j { s_f64 } else { 0.0 };
                bio_residual = bio_residual.max((m[(i, j)] - expected).norm());
            }
        }
    }
    let biorthogonal = bio_residual < tol;

    let mut residuals = BTreeMap::new();
    residuals.insert("reconstruction".into(), rec_residual);
    residuals.insert("biorthogonality".into(), bio_residual);
    Ok(TheoremVerdict::new(
        TheoremId::WexlerRaz,
        InstanceInfo::for_atom(g),
        reconstructs,
        biorthogonal,
        residuals,
        reconstructs == biorthogonal,
    ))
}

/// The duality principle: frame over Lambda versus Riesz of the transposed
/// atom over the adjoint lattice, computed by unrelated decompositions
/// (frame-operator eigenvalues vs coefficient-space Gram eigenvalues).
pub fn duality_check(g: &MatrixModuleElement, tol: f64) -> Result<TheoremVerdict> {
    let frame_side = frame_report(g, tol)?;
    let flipped = g.transpose_to(g.lattice().adjoint())?;
    let riesz_side = frame_report(&flipped, tol)?;

    let mut residuals = BTreeMap::new();
    residuals.insert("frame_lower_bound".into(), frame_side.lower_bound);
    residuals.insert("riesz_gram_lower_bound".into(), riesz_side.lower_bound);
    Ok(TheoremVerdict::new(
        TheoremId::Duality,
        InstanceInfo::for_atom(g),
        frame_side.is_frame,
        riesz_side.is_riesz,
        residuals,
        frame_side.is_frame == riesz_side.is_riesz,
    ))
}

/// Exact rational density bookkeeping for a lattice and a shape (n, d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub lattice_size: Ratio<i64>,
    /// n/d as an exact rational.
    pub shape_ratio: Ratio<i64>,
    /// s(Lambda) <= n/d: frames can exist.
    pub frame_possible: bool,
    /// s(Lambda) >= n/d: Riesz sequences can exist.
    pub riesz_possible: bool,
    /// s(Lambda) = n/d exactly.
    pub critical: bool,
}

pub fn density_check(sub: &PhaseSpaceSubgroup, n: usize, d: usize) -> DensityCheck {
    let s = sub.size();
    let ratio = Ratio::new(n as i64, d as i64);
    DensityCheck {
        lattice_size: s,
        shape_ratio: ratio,
        frame_possible: s <= ratio,
        riesz_possible: s >= ratio,
        critical: s == ratio,
    }
}

/// Density verdict for one analyzed atom: the observed frame/Riesz
/// predicates must respect the exact rational bounds, and at critical
/// density the two predicates must coincide.
pub fn density_verdict(g: &MatrixModuleElement, report: &FrameReport) -> TheoremVerdict {
    let check = density_check(g.lattice().subgroup(), g.rows(), g.cols());
    let frame_ok = !report.is_frame || check.frame_possible;
    let riesz_ok = !report.is_riesz || check.riesz_possible;
    let critical_ok = !check.critical || (report.is_frame == report.is_riesz);
    let mut residuals = BTreeMap::new();
    residuals.insert("frame_lower_bound".into(), report.lower_bound);
    let pass = frame_ok && riesz_ok && critical_ok;
    TheoremVerdict::new(
        TheoremId::Density,
        InstanceInfo::for_atom(g),
        report.is_frame,
        report.is_riesz,
        residuals,
        pass,
    )
}

/// Residual of the dual-pair condition: distance of the adjoint-side inner
/// product [g,h] from the identity of the right matrix algebra, measured in
/// the represented operator max-norm.
pub fn dual_pair_residual(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
) -> Result<f64> {
    let adjoint = g.lattice().adjoint();
    let rb = matrix_right_inner(g, h, adjoint.subgroup())?;
    let rep = rb.represent();
    let dim = rep.nrows();
    Ok(linalg::max_abs(&(rep - linalg::identity(dim))))
}

/// Builds the idempotent p = [[g, h]] from a dual pair; errors with
/// [`Error::NotDualPair`] when [g,h] is not the identity within `tol`.
pub fn idempotent_from_pair(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
    tol: f64,
) -> Result<MatrixAlgebraElement> {
    g.same_shape(h)?;
    let residual = dual_pair_residual(g, h)?;
    if residual > tol {
        return Err(Error::NotDualPair { residual });
    }
    matrix_left_inner(g, h)
}

/// Idempotency verdict for a (claimed) dual pair: lhs is the dual-pair
/// predicate, rhs the idempotency of p = [[g,h]]; since idempotency also
/// holds for degenerate non-dual pairs, the verdict checks the implication
/// "dual implies idempotent" rather than agreement.
pub fn idempotent_check(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
    tol: f64,
) -> Result<TheoremVerdict> {
    g.same_shape(h)?;
    let pair_residual = dual_pair_residual(g, h)?;
    let is_dual = pair_residual < tol;
    let p = matrix_left_inner(g, h)?;
    let p_squared = p.mul(&p)?;
    let idem_residual = p_squared.sub(&p)?.max_coeff_abs();
    let is_idempotent = idem_residual < tol;

    let mut residuals = BTreeMap::new();
    residuals.insert("dual_pair".into(), pair_residual);
    residuals.insert("idempotency".into(), idem_residual);

    // Self-adjoint idempotents (canonical duals) must be projections with
    // 0/1 spectrum and the exact trace forced by the density bookkeeping.
    let rep = p.represent();
    let selfadjoint_residual = linalg::max_abs(&(p.adjoint().sub(&p)?.represent()));
    let mut projection_ok = true;
    if is_dual && selfadjoint_residual < tol {
        // Distance of each eigenvalue from {0, 1}.
        let eigs = linalg::hermitian_eigenvalues(&rep);
        let spectrum_residual = eigs
            .iter()
            .map(|&e| e.abs().min((e - 1.0).abs()))
            .fold(0.0_f64, f64::max);
        residuals.insert("spectrum".into(), spectrum_residual);
        projection_ok = spectrum_residual < tol;

        // Algebra trace: n tr(p) = d s(Lambda); ambient matrix trace: the
        // same number scaled by d |G|.
        let s = g.lattice().subgroup().size();
        let s_f64 = (*s.numer() as f64) / (*s.denom() as f64);
        let n = g.rows() as f64;
        let d = g.cols() as f64;
        let algebra_trace = p.matrix_trace(g.rows());
        let trace_residual = (algebra_trace * n - (d * s_f64)).norm();
        residuals.insert("algebra_trace".into(), trace_residual);
        projection_ok = projection_ok && trace_residual < tol;
    }

    let pass = !is_dual || (is_idempotent && projection_ok);
    Ok(TheoremVerdict::new(
        TheoremId::Idempotent,
        InstanceInfo::for_atom(g),
        is_dual,
        is_idempotent,
        residuals,
        pass,
    ))
}

/// Range check for the idempotent of a dual pair: the column space of the
/// represented [[g, h]] acting on the ambient space must equal the span of
/// the adjoint-shift placements of the columns of g, compared through
/// principal angles.
pub fn idempotent_range_check(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
    tol: f64,
) -> Result<TheoremVerdict> {
    g.same_shape(h)?;
    let pair_residual = dual_pair_residual(g, h)?;
    if pair_residual > tol {
        return Err(Error::NotDualPair {
            residual: pair_residual,
        });
    }
    let p = matrix_left_inner(g, h)?;
    let p_ambient = left_action_matrix(&p, g.cols(), g.lattice())?;

    // Spanning family of the range: for each adjoint point mu, source column
    // k and target column j, place pi(mu)^* (column k of g) into column j.
    let adjoint = g.lattice().adjoint();
    let d = g.cols();
    let dim = g.dim();
    let mut span = CMatrix::zeros(dim, adjoint.order() * d * d);
    let mut col = 0;
    for mu in adjoint.subgroup().elements() {
        for k in 0..d {
            for j in 0..d {
                let mut placed =
                    MatrixModuleElement::zero(g.rows(), g.cols(), g.lattice().clone());
                for i in 0..g.rows() {
                    *placed.entry_mut(i, j) = tf_shift_adjoint(mu, g.entry(i, k));
                }
                for (row, v) in placed.flatten().into_iter().enumerate() {
                    span[(row, col)] = v;
                }
                col += 1;
            }
        }
    }

    let angle = linalg::max_principal_angle(&p_ambient, &span, 1e-10);
    let mut residuals = BTreeMap::new();
    residuals.insert("dual_pair".into(), pair_residual);
    residuals.insert("principal_angle".into(), angle);
    let rhs = angle < RANGE_ANGLE_TOL;
    Ok(TheoremVerdict::new(
        TheoremId::IdempotentRange,
        InstanceInfo::for_atom(g),
        true,
        rhs,
        residuals,
        rhs,
    ))
}

/// Equivalence of row-wise (multiwindow/super) reconstruction with full
/// matrix reconstruction: the two predicates must agree on the supplied
/// test elements, and the row decomposition must sum back to the full
/// residual exactly.
pub fn multiwindow_super_equivalence(
    g: &MatrixModuleElement,
    h: &MatrixModuleElement,
    trials: &[MatrixModuleElement],
    tol: f64,
) -> Result<TheoremVerdict> {
    g.same_shape(h)?;
    let s_gh = frame_operator(g, Some(h))?;
    let apply = |f: &MatrixModuleElement| -> Result<MatrixModuleElement> {
        MatrixModuleElement::from_flat(
            f.rows(),
            f.cols(),
            f.lattice().clone(),
            &linalg::apply(&s_gh, &f.flatten()),
        )
    };

    let mut row_residual: f64 = 0.0;
    let mut full_residual: f64 = 0.0;
    let mut decomposition_residual: f64 = 0.0;
    for f in trials {
        f.same_shape(g)?;
        let full_err = apply(f)?.sub(f)?;
        full_residual = full_residual.max(full_err.norm());
        let mut row_err_sum = MatrixModuleElement::zero(f.rows(), f.cols(), f.lattice().clone());
        for i in 0..f.rows() {
            let part = f.row_part(i);
            let err = apply(&part)?.sub(&part)?;
            row_residual = row_residual.max(err.norm());
            row_err_sum = row_err_sum.add(&err)?;
        }
        decomposition_residual = decomposition_residual.max(full_err.distance(&row_err_sum)?);
    }

    let rows_reconstruct = row_residual < tol;
    let full_reconstructs = full_residual < tol;
    let mut residuals = BTreeMap::new();
    residuals.insert("row_reconstruction".into(), row_residual);
    residuals.insert("full_reconstruction".into(), full_residual);
    residuals.insert("row_decomposition".into(), decomposition_residual);
    let pass = rows_reconstruct == full_reconstructs && decomposition_residual < 1e-10;
    Ok(TheoremVerdict::new(
        TheoremId::MultiwindowSuper,
        InstanceInfo::for_atom(g),
        rows_reconstruct,
        full_reconstructs,
        residuals,
        pass,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{canonical_dual, DEFAULT_TOL};
    use crate::group::FiniteLcaGroup;
    use crate::phase::{enumerate_subgroups, subgroup_closure, Lattice};
    use crate::signal::Signal;
    use approx::assert_abs_diff_eq;

    fn z(n: usize) -> FiniteLcaGroup {
        FiniteLcaGroup::cyclic(n).unwrap()
    }

    fn random_signal(group: &FiniteLcaGroup, seed: u64) -> Signal {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(3);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let values = (0..group.order())
            .map(|_| Complex64::new(next(), next()))
            .collect();
        Signal::new(group.clone(), values).unwrap()
    }

    fn random_atom(rows: usize, cols: usize, lattice: &Lattice, seed: u64) -> MatrixModuleElement {
        let mut out = MatrixModuleElement::zero(rows, cols, lattice.clone());
        for i in 0..rows {
            for j in 0..cols {
                *out.entry_mut(i, j) =
                    random_signal(lattice.group(), seed * 37 + (i * cols + j) as u64);
            }
        }
        out
    }

    fn z2_full_delta_pair() -> (MatrixModuleElement, MatrixModuleElement) {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let atom = MatrixModuleElement::scalar(Signal::delta_at_identity(&g), lat).unwrap();
        let dual = atom.scale(Complex64::new(0.5, 0.0));
        (atom, dual)
    }

    #[test]
    fn wexler_raz_on_worked_instance() {
        let (atom, dual) = z2_full_delta_pair();
        let verdict = wexler_raz_check(&atom, &dual, DEFAULT_TOL).unwrap();
        assert!(verdict.pass);
        assert!(verdict.lhs && verdict.rhs);
        assert!(verdict.max_residual < 1e-12);

        let adjoint = atom.lattice().adjoint();
        assert_eq!(adjoint.order(), 1);
        let sums = biorthogonality_matrices(&atom, &dual, adjoint.subgroup()).unwrap();
        assert_abs_diff_eq!((sums[0][(0, 0)] - 0.5).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn wexler_raz_rejects_nondual_yet_passes_agreement() {
        // g = h = delta_0 on the full Z_2 lattice is not a dual pair; both
        // predicates are false, so the verdict still passes.
        let (atom, _) = z2_full_delta_pair();
        let verdict = wexler_raz_check(&atom, &atom, DEFAULT_TOL).unwrap();
        assert!(verdict.pass);
        assert!(!verdict.lhs && !verdict.rhs);
        assert!(verdict.max_residual > 0.4);
    }

    #[test]
    fn wexler_raz_for_canonical_duals() {
        let g = z(4);
        let sub = subgroup_closure(
            &g,
            &[
                crate::phase::PhaseSpacePoint::from_coords(&g, &[1], &[0]).unwrap(),
                crate::phase::PhaseSpacePoint::from_coords(&g, &[0], &[2]).unwrap(),
            ],
        )
        .unwrap();
        let lat = Lattice::primal(sub);
        let atom = random_atom(1, 1, &lat, 7);
        let dual = canonical_dual(&atom, DEFAULT_TOL).unwrap();
        let verdict = wexler_raz_check(&atom, &dual, DEFAULT_TOL).unwrap();
        assert!(verdict.pass && verdict.lhs && verdict.rhs);
        assert!(verdict.residuals["biorthogonality"] < 1e-9);
    }

    #[test]
    fn duality_on_z2_instances() {
        let g = z(2);
        // Full lattice, delta atom: frame, and Riesz over the trivial adjoint.
        let (atom, _) = z2_full_delta_pair();
        let verdict = duality_check(&atom, DEFAULT_TOL).unwrap();
        assert!(verdict.pass && verdict.lhs && verdict.rhs);

        // Trivial lattice, delta atom: not a frame; adjoint is the full
        // lattice where the delta orbit is dependent, so not Riesz either.
        let triv = Lattice::primal(PhaseSpaceSubgroup::trivial(&g));
        let atom = MatrixModuleElement::scalar(Signal::delta_at_identity(&g), triv).unwrap();
        let verdict = duality_check(&atom, DEFAULT_TOL).unwrap();
        assert!(verdict.pass);
        assert!(!verdict.lhs && !verdict.rhs);
    }

    #[test]
    fn duality_sweep_on_z4_subgroups() {
        let g = z(4);
        for sub in enumerate_subgroups(&g).unwrap() {
            let lat = Lattice::primal(sub);
            for (n, d) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
                for seed in 0..3u64 {
                    let atom = random_atom(n, d, &lat, 100 + seed);
                    let verdict = duality_check(&atom, DEFAULT_TOL).unwrap();
                    assert!(
                        verdict.pass,
                        "duality disagreement: |sub|={} n={} d={} seed={}",
                        lat.order(),
                        n,
                        d,
                        seed
                    );
                }
            }
        }
    }

    #[test]
    fn density_flags() {
        let g = z(2);
        let full = PhaseSpaceSubgroup::full(&g);
        let check = density_check(&full, 1, 1);
        assert_eq!(check.lattice_size, Ratio::new(1, 2));
        assert!(check.frame_possible);
        assert!(!check.riesz_possible);
        assert!(!check.critical);

        let g4 = z(4);
        let sub = subgroup_closure(
            &g4,
            &[crate::phase::PhaseSpacePoint::from_coords(&g4, &[2], &[0]).unwrap()],
        )
        .unwrap();
        let check = density_check(&sub, 1, 1);
        assert_eq!(check.lattice_size, Ratio::from_integer(2));
        assert!(!check.frame_possible);
        assert!(check.riesz_possible);

        // Critical shape for s = 2: n/d = 2.
        let check = density_check(&sub, 2, 1);
        assert!(check.critical && check.frame_possible && check.riesz_possible);
    }

    #[test]
    fn density_verdicts_across_z4() {
        let g = z(4);
        for sub in enumerate_subgroups(&g).unwrap() {
            let lat = Lattice::primal(sub);
            for (n, d) in [(1, 1), (2, 1), (1, 2)] {
                for seed in 0..4u64 {
                    let atom = random_atom(n, d, &lat, 200 + seed);
                    let report = frame_report(&atom, DEFAULT_TOL).unwrap();
                    let verdict = density_verdict(&atom, &report);
                    assert!(verdict.pass, "density violated on |sub|={}", lat.order());
                }
            }
        }
    }

    #[test]
    fn idempotent_on_worked_instance() {
        let (atom, dual) = z2_full_delta_pair();
        let p = idempotent_from_pair(&atom, &dual, DEFAULT_TOL).unwrap();
        let p2 = p.mul(&p).unwrap();
        assert!(p2.sub(&p).unwrap().max_coeff_abs() < 1e-12);
        // Represented projection: diag(1, 0) in some basis; rank d^2 |adjoint| = 1.
        let rep = p.represent();
        let eigs = linalg::hermitian_eigenvalues(&rep);
        for e in &eigs {
            assert!(e.abs().min((e - 1.0).abs()) < 1e-12);
        }
        let trace: Complex64 = rep.diagonal().iter().sum();
        assert_abs_diff_eq!((trace - 1.0).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn idempotent_rejects_nondual_pairs() {
        let (atom, _) = z2_full_delta_pair();
        assert!(matches!(
            idempotent_from_pair(&atom, &atom, DEFAULT_TOL),
            Err(Error::NotDualPair { .. })
        ));
    }

    #[test]
    fn idempotent_at_critical_density_is_identity() {
        // Lambda = {0, (1,0)} on Z_2 has s = 1: the delta atom is an
        // orthonormal basis, so the canonical dual is the atom itself and
        // the idempotent is the full identity.
        let g = z(2);
        let sub = subgroup_closure(
            &g,
            &[crate::phase::PhaseSpacePoint::from_coords(&g, &[1], &[0]).unwrap()],
        )
        .unwrap();
        let lat = Lattice::primal(sub.clone());
        let atom = MatrixModuleElement::scalar(Signal::delta_at_identity(&g), lat).unwrap();
        let dual = canonical_dual(&atom, DEFAULT_TOL).unwrap();
        assert!(dual.distance(&atom).unwrap() < 1e-12);
        let p = idempotent_from_pair(&atom, &dual, DEFAULT_TOL).unwrap();
        let one = MatrixAlgebraElement::identity(1, &sub, crate::algebra::Orientation::Left);
        assert!(p.sub(&one).unwrap().max_coeff_abs() < 1e-12);
    }

    #[test]
    fn idempotent_verdict_with_canonical_dual() {
        let g = z(4);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let atom = random_atom(1, 1, &lat, 301);
        let dual = canonical_dual(&atom, DEFAULT_TOL).unwrap();
        let verdict = idempotent_check(&atom, &dual, DEFAULT_TOL).unwrap();
        assert!(verdict.pass && verdict.lhs && verdict.rhs);
        assert!(verdict.residuals.contains_key("spectrum"));
        assert!(verdict.residuals["spectrum"] < 1e-9);
        assert!(verdict.residuals["algebra_trace"] < 1e-9);
    }

    #[test]
    fn range_check_on_worked_instance() {
        let (atom, dual) = z2_full_delta_pair();
        let verdict = idempotent_range_check(&atom, &dual, DEFAULT_TOL).unwrap();
        assert!(verdict.pass);
        assert!(verdict.residuals["principal_angle"] < RANGE_ANGLE_TOL);
    }

    #[test]
    fn range_check_on_oversampled_z4() {
        let g = z(4);
        let sub = subgroup_closure(
            &g,
            &[
                crate::phase::PhaseSpacePoint::from_coords(&g, &[1], &[0]).unwrap(),
                crate::phase::PhaseSpacePoint::from_coords(&g, &[0], &[2]).unwrap(),
            ],
        )
        .unwrap();
        let lat = Lattice::primal(sub);
        let atom = random_atom(1, 1, &lat, 311);
        let dual = canonical_dual(&atom, DEFAULT_TOL).unwrap();
        let verdict = idempotent_range_check(&atom, &dual, DEFAULT_TOL).unwrap();
        assert!(verdict.pass, "angle = {}", verdict.residuals["principal_angle"]);
    }

    #[test]
    fn multiwindow_equivalence_for_dual_and_nondual() {
        let g = z(4);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let atom = random_atom(2, 1, &lat, 321);
        let dual = canonical_dual(&atom, DEFAULT_TOL).unwrap();
        let trials: Vec<_> = (0..5).map(|s| random_atom(2, 1, &lat, 400 + s)).collect();
        let verdict = multiwindow_super_equivalence(&atom, &dual, &trials, DEFAULT_TOL).unwrap();
        assert!(verdict.pass && verdict.lhs && verdict.rhs);

        // Non-dual pair: both predicates false, decomposition still exact.
        let other = random_atom(2, 1, &lat, 500);
        let verdict = multiwindow_super_equivalence(&atom, &other, &trials, DEFAULT_TOL).unwrap();
        assert!(verdict.pass);
        assert!(!verdict.lhs && !verdict.rhs);
        assert!(verdict.residuals["row_decomposition"] < 1e-10);
    }

    #[test]
    fn multiwindow_trivial_for_single_row() {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let (atom, dual) = z2_full_delta_pair();
        let trials: Vec<_> = (0..3).map(|s| random_atom(1, 1, &lat, 600 + s)).collect();
        let verdict = multiwindow_super_equivalence(&atom, &dual, &trials, DEFAULT_TOL).unwrap();
        assert!(verdict.pass && verdict.lhs && verdict.rhs);
    }

    #[test]
    fn verdict_serializes_to_json_lines() {
        let (atom, dual) = z2_full_delta_pair();
        let verdict = wexler_raz_check(&atom, &dual, DEFAULT_TOL).unwrap();
        let line = serde_json::to_string(&verdict).unwrap();
        assert!(!line.contains('\n'));
        assert!(line.contains("\"theorem\":\"wexler-raz\""));
        let back: TheoremVerdict = serde_json::from_str(&line).unwrap();
        assert_eq!(back, verdict);
    }
}
