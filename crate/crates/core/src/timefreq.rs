//! Time-frequency shift operators pi(xi) = E_omega T_x on l^2(G) and
//! short-time Fourier coefficients sampled on a phase-space subgroup.
//!
//! Shifts are applied as an index permutation plus a phase, O(|G|) per
//! application; [`tf_shift_matrix`] materializes the dense |G| x |G| matrix
//! for oracle-style comparisons and for the integrated representation.

use num_complex::Complex64;

use crate::error::Result;
use crate::group::FiniteLcaGroup;
use crate::linalg::CMatrix;
use crate::phase::{cocycle, PhaseSpacePoint, PhaseSpaceSubgroup};
use crate::signal::Signal;

/// (pi(xi) f)(t) = omega(t) f(t - x).
pub fn tf_shift(xi: &PhaseSpacePoint, f: &Signal) -> Signal {
    let group = f.group().clone();
    let mut out = Signal::zero(&group);
    for (idx, t) in group.elements().enumerate() {
        let src = group.index_of(&group.sub(&t, xi.x()));
        out.values_mut()[idx] = group.character(xi.omega(), &t) * f.values()[src];
    }
    out
}

pub fn tf_shift_checked(xi: &PhaseSpacePoint, f: &Signal) -> Result<Signal> {
    let group = f.group();
    let in_range = |e: &crate::group::GroupElement| {
        e.coords().len() == group.rank()
            && e.coords().iter().zip(group.orders()).all(|(&c, &n)| c < n)
    };
    if !in_range(xi.x()) || !in_range(xi.omega()) {
        return Err(crate::error::Error::GroupMismatch {
            left: group.orders().to_vec(),
            right: xi.x().coords().to_vec(),
        });
    }
    Ok(tf_shift(xi, f))
}

/// The adjoint pi(xi)^* = c(xi, xi) pi(-xi), applied directly.
pub fn tf_shift_adjoint(xi: &PhaseSpacePoint, f: &Signal) -> Signal {
    let group = f.group();
    let phase = cocycle(group, xi, xi);
    tf_shift(&xi.neg(group), f).scale(phase)
}

/// Dense matrix of pi(xi): M[t, t - x] = omega(t).
pub fn tf_shift_matrix(group: &FiniteLcaGroup, xi: &PhaseSpacePoint) -> CMatrix {
    let n = group.order();
    let mut m = CMatrix::zeros(n, n);
    for (row, t) in group.elements().enumerate() {
        let col = group.index_of(&group.sub(&t, xi.x()));
        m[(row, col)] = group.character(xi.omega(), &t);
    }
    m
}

/// Dense matrix of pi(xi)^*.
pub fn tf_shift_adjoint_matrix(group: &FiniteLcaGroup, xi: &PhaseSpacePoint) -> CMatrix {
    tf_shift_matrix(group, xi).adjoint()
}

/// Short-time Fourier coefficients of `f` against window `g`, restricted to
/// a subgroup: lambda -> <f, pi(lambda) g>, in the subgroup's canonical
/// element order.
pub fn stft_on_subgroup(g: &Signal, f: &Signal, sub: &PhaseSpaceSubgroup) -> Vec<Complex64> {
    sub.elements()
        .iter()
        .map(|lam| f.inner(&tf_shift(lam, g)))
        .collect()
}

pub fn stft_on_subgroup_checked(
    g: &Signal,
    f: &Signal,
    sub: &PhaseSpaceSubgroup,
) -> Result<Vec<Complex64>> {
    f.group().same_as(g.group())?;
    f.group().same_as(sub.group())?;
    Ok(stft_on_subgroup(g, f, sub))
}
