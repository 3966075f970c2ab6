//! Twisted group algebras on a phase-space lattice and on its adjoint:
//! twisted convolution, involution, traces, the integrated representation on
//! l^2(G), coefficient recovery, and inversion, plus the square matrix
//! algebras over them.
//!
//! A left-oriented element lives on a lattice Lambda with counting measure
//! and represents through pi(lambda); a right-oriented element lives on an
//! adjoint lattice with the dual weight |G|/|M| and represents through
//! pi(mu)^*. In both orientations the integrated representation is a
//! *-homomorphism, which fixes the argument order of the cocycle twist in
//! the convolution below.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteLcaGroup;
use crate::linalg::{self, CMatrix};
use crate::phase::{cocycle, PhaseSpacePoint, PhaseSpaceSubgroup};
use crate::signal::complex_pairs;

/// Relative singular-value threshold below which inversion is refused.
pub const INVERSION_TOL: f64 = 1e-9;

/// Relative residual above which a matrix is declared outside the algebra.
pub const RECOVERY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Supported on Lambda, twisted by c, represented via pi(lambda).
    Left,
    /// Supported on an adjoint lattice, twisted by conj(c), represented via pi(mu)^*.
    Right,
}

/// The integration weight fixed by the measure convention: counting measure
/// on the primal lattice, |G|/|M| on an adjoint lattice M.
pub fn orientation_weight(orientation: Orientation, sub: &PhaseSpaceSubgroup) -> Ratio<i64> {
    match orientation {
        Orientation::Left => Ratio::from_integer(1),
        Orientation::Right => Ratio::new(sub.group().order() as i64, sub.order() as i64),
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraElementJson {
    subgroup: PhaseSpaceSubgroup,
    orientation: Orientation,
    #[serde(with = "complex_pairs")]
    coeffs: Vec<Complex64>,
}

/// A finitely supported coefficient function on a phase-space subgroup,
/// tagged with its cocycle orientation; an element of the twisted group
/// algebra on that subgroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraElementJson", into = "AlgebraElementJson")]
pub struct AlgebraElement {
    subgroup: PhaseSpaceSubgroup,
    orientation: Orientation,
    weight: Ratio<i64>,
    coeffs: Vec<Complex64>,
}

impl TryFrom<AlgebraElementJson> for AlgebraElement {
    type Error = Error;

    fn try_from(json: AlgebraElementJson) -> Result<Self> {
        AlgebraElement::new(json.subgroup, json.orientation, json.coeffs)
    }
}

impl From<AlgebraElement> for AlgebraElementJson {
    fn from(el: AlgebraElement) -> Self {
        AlgebraElementJson {
            subgroup: el.subgroup,
            orientation: el.orientation,
            coeffs: el.coeffs,
        }
    }
}

impl AlgebraElement {
    pub fn new(
        subgroup: PhaseSpaceSubgroup,
        orientation: Orientation,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if coeffs.len() != subgroup.order() {
            return Err(Error::AlgebraMismatch(format!(
                "{} coefficients for a subgroup of order {}",
                coeffs.len(),
                subgroup.order()
            )));
        }
        let weight = orientation_weight(orientation, &subgroup);
        Ok(Self {
            subgroup,
            orientation,
            weight,
            coeffs,
        })
    }

    pub fn zero(subgroup: &PhaseSpaceSubgroup, orientation: Orientation) -> Self {
        Self::new(
            subgroup.clone(),
            orientation,
            vec![Complex64::new(0.0, 0.0); subgroup.order()],
        )
        .expect("length matches by construction")
    }

    /// Point mass at a lattice point.
    pub fn delta(
        subgroup: &PhaseSpaceSubgroup,
        orientation: Orientation,
        at: &PhaseSpacePoint,
    ) -> Result<Self> {
        let idx = subgroup
            .index_of(at)
            .ok_or_else(|| Error::Invalid("point not in the subgroup".into()))?;
        let mut el = Self::zero(subgroup, orientation);
        el.coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(el)
    }

    /// The multiplicative identity: (1/weight) * delta_0. On the left this
    /// is delta_0; on an adjoint lattice it is s(Lambda) * delta_0, and in
    /// both cases it represents to the identity matrix exactly.
    pub fn identity(subgroup: &PhaseSpaceSubgroup, orientation: Orientation) -> Self {
        let mut el = Self::zero(subgroup, orientation);
        let w = orientation_weight(orientation, subgroup);
        el.coeffs[0] = Complex64::new((*w.denom() as f64) / (*w.numer() as f64), 0.0);
        el
    }

    pub fn subgroup(&self) -> &PhaseSpaceSubgroup {
        &self.subgroup
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        self.subgroup.group()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn weight(&self) -> Ratio<i64> {
        self.weight
    }

    pub fn weight_f64(&self) -> f64 {
        (*self.weight.numer() as f64) / (*self.weight.denom() as f64)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff_at(&self, p: &PhaseSpacePoint) -> Option<Complex64> {
        self.subgroup.index_of(p).map(|i| self.coeffs[i])
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.subgroup != other.subgroup || self.orientation != other.orientation {
            return Err(Error::AlgebraMismatch(
                "operands live on different subgroups or orientations".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.subgroup.clone(), self.orientation, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.subgroup.clone(), self.orientation, coeffs)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.coeffs {
            *v *= c;
        }
        out
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Cocycle twist for the convolution term F1(mu) F2(lambda - mu).
    fn convolution_phase(&self, mu: &PhaseSpacePoint, rest: &PhaseSpacePoint) -> Complex64 {
        let group = self.group();
        match self.orientation {
            Orientation::Left => cocycle(group, mu, rest),
            // pi(mu)^* pi(nu)^* = conj(c(nu, mu)) pi(mu + nu)^*.
            Orientation::Right => cocycle(group, rest, mu).conj(),
        }
    }

    /// Twisted convolution, the algebra product. The integration weight of
    /// the lattice multiplies the sum.
    pub fn twisted_convolve(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let group = self.group().clone();
        let elements = self.subgroup.elements();
        let w = self.weight_f64();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); elements.len()];
        for (out_idx, lam) in elements.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (mu_idx, mu) in elements.iter().enumerate() {
                let rest = lam.sub(mu, &group);
                let rest_idx = self
                    .subgroup
                    .index_of(&rest)
                    .expect("subgroups are closed under subtraction");
                acc += self.coeffs[mu_idx]
                    * other.coeffs[rest_idx]
                    * self.convolution_phase(mu, &rest);
            }
            coeffs[out_idx] = acc * w;
        }
        Self::new(self.subgroup.clone(), self.orientation, coeffs)
    }

    /// Twisted involution F^*(lambda) = phase * conj(F(-lambda)); represents
    /// to the conjugate transpose.
    pub fn twisted_involution(&self) -> Self {
        let group = self.group().clone();
        let elements = self.subgroup.elements();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); elements.len()];
        for (idx, lam) in elements.iter().enumerate() {
            let neg = lam.neg(&group);
            let neg_idx = self
                .subgroup
                .index_of(&neg)
                .expect("subgroups are closed under negation");
            let phase = match self.orientation {
                Orientation::Left => cocycle(&group, lam, lam),
                Orientation::Right => cocycle(&group, lam, lam).conj(),
            };
            coeffs[idx] = phase * self.coeffs[neg_idx].conj();
        }
        Self::new(self.subgroup.clone(), self.orientation, coeffs)
            .expect("same support as the input")
    }

    /// The canonical faithful trace: evaluation at the group identity.
    pub fn trace(&self) -> Complex64 {
        // Element 0 of the canonical order is always the identity.
        self.coeffs[0]
    }

    /// Basis operator behind one lattice point: pi(lambda) on the left,
    /// pi(lambda)^* on the right.
    fn basis_matrix(&self, p: &PhaseSpacePoint) -> CMatrix {
        match self.orientation {
            Orientation::Left => crate::timefreq::tf_shift_matrix(self.group(), p),
            Orientation::Right => crate::timefreq::tf_shift_adjoint_matrix(self.group(), p),
        }
    }

    /// The integrated representation: the dense |G| x |G| matrix
    /// sum_lambda weight * F(lambda) * pi(lambda) (resp. pi(lambda)^*).
    pub fn represent(&self) -> CMatrix {
        let n = self.group().order();
        let w = self.weight_f64();
        let mut m = CMatrix::zeros(n, n);
        for (idx, lam) in self.subgroup.elements().iter().enumerate() {
            let c = self.coeffs[idx];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            m += self.basis_matrix(lam).map(|v| v * c * w);
        }
        m
    }

    /// Operator norm of the element (spectral norm of the representation).
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.represent())
    }

    /// Inverts the element through its representation; the inverse is pulled
    /// back into the algebra and validated by a residual check.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.represent();
        let (sigma_min, sigma_max) = linalg::singular_extremes(&m);
        if sigma_min <= INVERSION_TOL * sigma_max || sigma_max == 0.0 {
            return Err(Error::NotInvertible {
                sigma_min,
                sigma_max,
            });
        }
        let inv = linalg::try_inverse(&m).ok_or(Error::NotInvertible {
            sigma_min,
            sigma_max,
        })?;
        recover_coefficients(&inv, &self.subgroup, self.orientation)
    }
}

/// Recovers algebra coefficients from a dense matrix via the orthogonality
/// of the time-frequency shift family:
/// a(lambda) = Tr(U(lambda)^dagger M) / (|G| * weight).
///
/// Returns [`Error::NotInAlgebra`] when the matrix is not, up to the
/// recovery tolerance, in the span of the lattice shifts.
pub fn recover_coefficients(
    m: &CMatrix,
    subgroup: &PhaseSpaceSubgroup,
    orientation: Orientation,
) -> Result<AlgebraElement> {
    let group = subgroup.group();
    let n = group.order();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let w = {
        let w = orientation_weight(orientation, subgroup);
        (*w.numer() as f64) / (*w.denom() as f64)
    };
    let mut coeffs = Vec::with_capacity(subgroup.order());
    for lam in subgroup.elements() {
        let basis = match orientation {
            Orientation::Left => crate::timefreq::tf_shift_matrix(group, lam),
            Orientation::Right => crate::timefreq::tf_shift_adjoint_matrix(group, lam),
        };
        let tr: Complex64 = (basis.adjoint() * m).diagonal().iter().sum();
        coeffs.push(tr / (n as f64 * w));
    }
    let el = AlgebraElement::new(subgroup.clone(), orientation, coeffs)?;
    let residual = linalg::max_abs(&(m - el.represent()));
    let scale = linalg::max_abs(m).max(1.0);
    if residual > RECOVERY_TOL * scale {
        return Err(Error::NotInAlgebra {
            residual: residual / scale,
        });
    }
    Ok(el)
}

/// A square matrix of algebra elements over one common subgroup and
/// orientation; the matrix algebra over A or over B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixAlgebraElement {
    size: usize,
    entries: Vec<AlgebraElement>,
}

impl MatrixAlgebraElement {
    pub fn new(size: usize, entries: Vec<AlgebraElement>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::ShapeMismatch {
                expected: format!("{size}x{size} entries"),
                got: format!("{}", entries.len()),
            });
        }
        if size == 0 {
            return Err(Error::Invalid("empty matrix algebra element".into()));
        }
        let first = &entries[0];
        for e in &entries[1..] {
            if e.subgroup() != first.subgroup() || e.orientation() != first.orientation() {
                return Err(Error::AlgebraMismatch(
                    "matrix entries must share subgroup and orientation".into(),
                ));
            }
        }
        Ok(Self { size, entries })
    }

    pub fn zero(size: usize, subgroup: &PhaseSpaceSubgroup, orientation: Orientation) -> Self {
        let entries = (0..size * size)
            .map(|_| AlgebraElement::zero(subgroup, orientation))
            .collect();
        Self { size, entries }
    }

    pub fn identity(size: usize, subgroup: &PhaseSpaceSubgroup, orientation: Orientation) -> Self {
        let mut out = Self::zero(size, subgroup, orientation);
        for i in 0..size {
            *out.entry_mut(i, i) = AlgebraElement::identity(subgroup, orientation);
        }
        out
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn subgroup(&self) -> &PhaseSpaceSubgroup {
        self.entries[0].subgroup()
    }

    pub fn orientation(&self) -> Orientation {
        self.entries[0].orientation()
    }

    pub fn entry(&self, row: usize, col: usize) -> &AlgebraElement {
        &self.entries[row * self.size + col]
    }

    pub fn entry_mut(&mut self, row: usize, col: usize) -> &mut AlgebraElement {
        &mut self.entries[row * self.size + col]
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", self.size),
                got: format!("{0}x{0}", other.size),
            });
        }
        self.entries[0].compatible(&other.entries[0])
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Self::new(self.size, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Self::new(self.size, entries)
    }

    /// Matrix product with twisted convolution as the entry product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Self::zero(self.size, self.subgroup(), self.orientation());
        for i in 0..self.size {
            for j in 0..self.size {
                let mut acc = AlgebraElement::zero(self.subgroup(), self.orientation());
                for k in 0..self.size {
                    acc = acc.add(&self.entry(i, k).twisted_convolve(other.entry(k, j))?)?;
                }
                *out.entry_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    /// *-involution: transpose plus entrywise twisted involution.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.size, self.subgroup(), self.orientation());
        for i in 0..self.size {
            for j in 0..self.size {
                *out.entry_mut(i, j) = self.entry(j, i).twisted_involution();
            }
        }
        out
    }

    /// Matrix trace with the fixed 1/n normalization: both the left and the
    /// right matrix traces divide the diagonal trace sum by n, the size of
    /// the matrix algebra on the left-hand side. With that convention the
    /// identity of the left n x n algebra has trace 1, while the identity of
    /// the right d x d algebra has trace (d/n) s(Lambda) and is generally
    /// not a state.
    pub fn matrix_trace(&self, normalization: usize) -> Complex64 {
        let sum: Complex64 = (0..self.size).map(|i| self.entry(i, i).trace()).sum();
        sum / normalization as f64
    }

    /// Dense block-matrix representation; each entry represents to a
    /// |G| x |G| block.
    pub fn represent(&self) -> CMatrix {
        let n = self.subgroup().group().order();
        let mut m = CMatrix::zeros(self.size * n, self.size * n);
        for i in 0..self.size {
            for j in 0..self.size {
                let block = self.entry(i, j).represent();
                m.view_mut((i * n, j * n), (n, n)).copy_from(&block);
            }
        }
        m
    }

    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.represent())
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_coeff_abs())
            .fold(0.0, f64::max)
    }

    /// Inverse computed in the block representation and pulled back
    /// entrywise into the algebra.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.represent();
        let (sigma_min, sigma_max) = linalg::singular_extremes(&m);
        if sigma_min <= INVERSION_TOL * sigma_max || sigma_max == 0.0 {
            return Err(Error::NotInvertible {
                sigma_min,
                sigma_max,
            });
        }
        let inv = linalg::try_inverse(&m).ok_or(Error::NotInvertible {
            sigma_min,
            sigma_max,
        })?;
        self.from_block_matrix(&inv)
    }

    /// Pulls a dense block matrix back into the matrix algebra, entry by
    /// entry, with the recovery residual check.
    pub fn from_block_matrix(&self, m: &CMatrix) -> Result<Self> {
        let n = self.subgroup().group().order();
        let mut entries = Vec::with_capacity(self.size * self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                let block = m.view((i * n, j * n), (n, n)).into_owned();
                entries.push(recover_coefficients(
                    &block,
                    self.subgroup(),
                    self.orientation(),
                )?);
            }
        }
        Self::new(self.size, entries)
    }
}
