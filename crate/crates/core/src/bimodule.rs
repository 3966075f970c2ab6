//! The Heisenberg bimodule structure on signals: algebra-valued inner
//! products on both sides, the module actions, and their matrix lifts.
//!
//! For a lattice Lambda with adjoint M, a signal pair yields
//!
//! * a left element with coefficients lambda -> <f, pi(lambda) g>, and
//! * a right element with coefficients mu -> <g, pi(mu)^* f>,
//!
//! and the two interact through the associativity law
//! `left_inner(f,g) . h = f . right_inner(g,h)`, which the tests exercise as
//! the central bookkeeping check for the measure weights.
//!
//! Matrix atoms (n x d grids of signals) flatten to vectors of length
//! |G| n d with the G index fastest, then the column j, then the row i.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{AlgebraElement, MatrixAlgebraElement, Orientation};
use crate::error::{Error, Result};
use crate::group::FiniteLcaGroup;
use crate::linalg::CMatrix;
use crate::phase::{Lattice, PhaseSpaceSubgroup};
use crate::signal::Signal;
use crate::timefreq::{stft_on_subgroup, tf_shift, tf_shift_adjoint};

/// Left inner product: coefficients lambda -> <f, pi(lambda) g> on Lambda.
pub fn left_inner(f: &Signal, g: &Signal, sub: &PhaseSpaceSubgroup) -> Result<AlgebraElement> {
    f.group().same_as(g.group())?;
    f.group().same_as(sub.group())?;
    let coeffs = stft_on_subgroup(g, f, sub);
    AlgebraElement::new(sub.clone(), Orientation::Left, coeffs)
}

/// Right inner product: coefficients mu -> <g, pi(mu)^* f> on the adjoint
/// subgroup, carrying the dual integration weight.
pub fn right_inner(
    f: &Signal,
    g: &Signal,
    adjoint_sub: &PhaseSpaceSubgroup,
) -> Result<AlgebraElement> {
    f.group().same_as(g.group())?;
    f.group().same_as(adjoint_sub.group())?;
    let coeffs = adjoint_sub
        .elements()
        .iter()
        .map(|mu| g.inner(&tf_shift_adjoint(mu, f)))
        .collect();
    AlgebraElement::new(adjoint_sub.clone(), Orientation::Right, coeffs)
}

/// Left action a . f = sum_lambda weight a(lambda) pi(lambda) f.
pub fn left_act(a: &AlgebraElement, f: &Signal) -> Result<Signal> {
    if a.orientation() != Orientation::Left {
        return Err(Error::AlgebraMismatch(
            "left action requires a left-oriented element".into(),
        ));
    }
    a.group().same_as(f.group())?;
    let w = a.weight_f64();
    let mut out = Signal::zero(f.group());
    for (idx, lam) in a.subgroup().elements().iter().enumerate() {
        let c = a.coeffs()[idx];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        out.add_assign(&tf_shift(lam, f).scale(c * w));
    }
    Ok(out)
}

/// Right action f . b = sum_mu weight b(mu) pi(mu)^* f.
pub fn right_act(f: &Signal, b: &AlgebraElement) -> Result<Signal> {
    if b.orientation() != Orientation::Right {
        return Err(Error::AlgebraMismatch(
            "right action requires a right-oriented element".into(),
        ));
    }
    b.group().same_as(f.group())?;
    let w = b.weight_f64();
    let mut out = Signal::zero(f.group());
    for (idx, mu) in b.subgroup().elements().iter().enumerate() {
        let c = b.coeffs()[idx];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        out.add_assign(&tf_shift_adjoint(mu, f).scale(c * w));
    }
    Ok(out)
}

/// The localization identity: tr_A of the left inner product, which equals
/// the plain l^2 inner product <f, g>.
pub fn localized_inner(f: &Signal, g: &Signal, sub: &PhaseSpaceSubgroup) -> Result<Complex64> {
    Ok(left_inner(f, g, sub)?.trace())
}

/// An n x d grid of signals over a common group, tied to the lattice it is
/// analyzed against; an atom or target vector for (n,d)-matrix systems.
///
/// Serializes as `{"n": .., "d": .., "entries": [[signal, ..], ..]}` (rows of
/// signals); the lattice context is supplied separately on load.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixModuleElement {
    rows: usize,
    cols: usize,
    lattice: Lattice,
    entries: Vec<Signal>,
}

impl Serialize for MatrixModuleElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MatrixModuleElement", 3)?;
        st.serialize_field("n", &self.rows)?;
        st.serialize_field("d", &self.cols)?;
        let rows: Vec<&[Signal]> = (0..self.rows)
            .map(|i| &self.entries[i * self.cols..(i + 1) * self.cols])
            .collect();
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

/// The serialized shape of [`MatrixModuleElement`]; pair it with a lattice
/// via [`MatrixModuleElement::from_grid`] to rebuild the element.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MatrixModuleGrid {
    pub n: usize,
    pub d: usize,
    pub entries: Vec<Vec<Signal>>,
}

impl MatrixModuleElement {
    pub fn new(rows: usize, cols: usize, lattice: Lattice, entries: Vec<Signal>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{rows}x{cols} signals"),
                got: format!("{}", entries.len()),
            });
        }
        for s in &entries {
            s.group().same_as(lattice.group())?;
        }
        Ok(Self {
            rows,
            cols,
            lattice,
            entries,
        })
    }

    pub fn from_grid(grid: MatrixModuleGrid, lattice: Lattice) -> Result<Self> {
        let entries: Vec<Signal> = grid.entries.into_iter().flatten().collect();
        Self::new(grid.n, grid.d, lattice, entries)
    }

    pub fn zero(rows: usize, cols: usize, lattice: Lattice) -> Self {
        let zero = Signal::zero(lattice.group());
        Self {
            rows,
            cols,
            lattice,
            entries: vec![zero; rows * cols],
        }
    }

    /// A 1 x 1 atom.
    pub fn scalar(signal: Signal, lattice: Lattice) -> Result<Self> {
        Self::new(1, 1, lattice, vec![signal])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        self.lattice.group()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Signal {
        &self.entries[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Signal {
        &mut self.entries[i * self.cols + j]
    }

    /// Ambient dimension |G| * n * d.
    pub fn dim(&self) -> usize {
        self.group().order() * self.rows * self.cols
    }

    /// Flattens with the G index fastest, then j, then i.
    pub fn flatten(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.dim());
        for s in &self.entries {
            out.extend_from_slice(s.values());
        }
        out
    }

    pub fn from_flat(
        rows: usize,
        cols: usize,
        lattice: Lattice,
        flat: &[Complex64],
    ) -> Result<Self> {
        let g = lattice.group().clone();
        let glen = g.order();
        if flat.len() != glen * rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} values", glen * rows * cols),
                got: format!("{}", flat.len()),
            });
        }
        let entries = flat
            .chunks(glen)
            .map(|chunk| Signal::new(g.clone(), chunk.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, lattice, entries)
    }

    /// Grid transpose (no conjugation), re-anchored on the given lattice;
    /// used to read an n x d atom as a d x n atom over the adjoint lattice.
    pub fn transpose_to(&self, lattice: Lattice) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.entry(i, j).clone());
            }
        }
        Self::new(self.cols, self.rows, lattice, entries)
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|s| s.norm_sq()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            lattice: self.lattice.clone(),
            entries: self.entries.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Self::new(self.rows, self.cols, self.lattice.clone(), entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Self::new(self.rows, self.cols, self.lattice.clone(), entries)
    }

    /// Distance in the ambient l^2 norm.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        self.group().same_as(other.group())?;
        Ok(())
    }

    /// Restriction to a single row, all other rows zeroed.
    pub fn row_part(&self, row: usize) -> Self {
        let mut out = Self::zero(self.rows, self.cols, self.lattice.clone());
        for j in 0..self.cols {
            *out.entry_mut(row, j) = self.entry(row, j).clone();
        }
        out
    }
}

/// Matrix-valued left inner product: entry (i,j) = sum_k <f_{i,k}, g_{j,k}>
/// as left algebra elements on the lattice of `f`.
pub fn matrix_left_inner(
    f: &MatrixModuleElement,
    g: &MatrixModuleElement,
) -> Result<MatrixAlgebraElement> {
    f.same_shape(g)?;
    let sub = f.lattice().subgroup();
    let n = f.rows();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = AlgebraElement::zero(sub, Orientation::Left);
            for k in 0..f.cols() {
                acc = acc.add(&left_inner(f.entry(i, k), g.entry(j, k), sub)?)?;
            }
            entries.push(acc);
        }
    }
    MatrixAlgebraElement::new(n, entries)
}

/// Matrix-valued right inner product: entry (i,j) = sum_k <f_{k,i}, g_{k,j}>
/// as right algebra elements on the adjoint subgroup.
pub fn matrix_right_inner(
    f: &MatrixModuleElement,
    g: &MatrixModuleElement,
    adjoint_sub: &PhaseSpaceSubgroup,
) -> Result<MatrixAlgebraElement> {
    f.same_shape(g)?;
    let d = f.cols();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = AlgebraElement::zero(adjoint_sub, Orientation::Right);
            for k in 0..f.rows() {
                acc = acc.add(&right_inner(f.entry(k, i), g.entry(k, j), adjoint_sub)?)?;
            }
            entries.push(acc);
        }
    }
    MatrixAlgebraElement::new(d, entries)
}

/// Left action of a matrix algebra element: (a f)_{i,j} = sum_k a_{i,k} f_{k,j}.
pub fn matrix_left_act(
    a: &MatrixAlgebraElement,
    f: &MatrixModuleElement,
) -> Result<MatrixModuleElement> {
    if a.size() != f.rows() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} rows", a.size()),
            got: format!("{}", f.rows()),
        });
    }
    let mut out = MatrixModuleElement::zero(f.rows(), f.cols(), f.lattice().clone());
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            let mut acc = Signal::zero(f.group());
            for k in 0..f.rows() {
                acc.add_assign(&left_act(a.entry(i, k), f.entry(k, j))?);
            }
            *out.entry_mut(i, j) = acc;
        }
    }
    Ok(out)
}

/// Right action of a matrix algebra element: (f b)_{i,j} = sum_k f_{i,k} b_{k,j}.
pub fn matrix_right_act(
    f: &MatrixModuleElement,
    b: &MatrixAlgebraElement,
) -> Result<MatrixModuleElement> {
    if b.size() != f.cols() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} cols", b.size()),
            got: format!("{}", f.cols()),
        });
    }
    let mut out = MatrixModuleElement::zero(f.rows(), f.cols(), f.lattice().clone());
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            let mut acc = Signal::zero(f.group());
            for k in 0..f.cols() {
                acc.add_assign(&right_act(f.entry(i, k), b.entry(k, j))?);
            }
            *out.entry_mut(i, j) = acc;
        }
    }
    Ok(out)
}

/// Ambient l^2 inner product on matrix module elements.
pub fn ambient_inner(f: &MatrixModuleElement, g: &MatrixModuleElement) -> Result<Complex64> {
    f.same_shape(g)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in f.flatten().iter().zip(g.flatten()) {
        acc += a * b.conj();
    }
    Ok(acc)
}

/// Dense matrix of the left action of a matrix algebra element on the
/// flattened space of n x d module elements.
pub fn left_action_matrix(
    a: &MatrixAlgebraElement,
    cols: usize,
    lattice: &Lattice,
) -> Result<CMatrix> {
    let rows = a.size();
    let dim = lattice.group().order() * rows * cols;
    let mut m = CMatrix::zeros(dim, dim);
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    for col in 0..dim {
        basis[col] = Complex64::new(1.0, 0.0);
        let f = MatrixModuleElement::from_flat(rows, cols, lattice.clone(), &basis)?;
        basis[col] = Complex64::new(0.0, 0.0);
        let out = matrix_left_act(a, &f)?;
        for (row, v) in out.flatten().into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    Ok(m)
}

/// Content hash of an atom (dims plus value bits), for instance descriptions
/// in reports. FNV-1a, stable across runs of the same build.
pub fn atom_hash(f: &MatrixModuleElement) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    };
    eat(&(f.rows() as u64).to_le_bytes());
    eat(&(f.cols() as u64).to_le_bytes());
    for v in f.flatten() {
        eat(&v.re.to_le_bytes());
        eat(&v.im.to_le_bytes());
    }
    format!("{hash:016x}")
}

/// Dense matrix of the module frame-like operator f -> [[f, g]] h on the
/// flattened ambient space. This is the module-side route to the frame
/// operator, built entirely from algebra inner products and actions.
pub fn theta_matrix(g: &MatrixModuleElement, h: &MatrixModuleElement) -> Result<CMatrix> {
    g.same_shape(h)?;
    let dim = g.dim();
    let mut m = CMatrix::zeros(dim, dim);
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    for col in 0..dim {
        basis[col] = Complex64::new(1.0, 0.0);
        let f = MatrixModuleElement::from_flat(g.rows(), g.cols(), g.lattice().clone(), &basis)?;
        basis[col] = Complex64::new(0.0, 0.0);
        let inner = matrix_left_inner(&f, g)?;
        let out = matrix_left_act(&inner, h)?;
        for (row, v) in out.flatten().into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Orientation;
    use crate::linalg;
    use crate::phase::{enumerate_subgroups, PhaseSpacePoint};
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

    #[test]
    fn left_inner_of_deltas_on_full_z2() {
        let g = z(2);
        let full = PhaseSpaceSubgroup::full(&g);
        let d0 = Signal::delta_at_identity(&g);
        let el = left_inner(&d0, &d0, &full).unwrap();
        for (lam, c) in full.elements().iter().zip(el.coeffs()) {
            let expected = if lam.x().is_identity() { 1.0 } else { 0.0 };
            assert_abs_diff_eq!((c - expected).norm(), 0.0, epsilon = 1e-14);
        }
        let zero = left_inner(&Signal::zero(&g), &d0, &full).unwrap();
        assert_eq!(zero.max_coeff_abs(), 0.0);
    }

    #[test]
    fn left_inner_symmetry() {
        let g = z(4);
        for sub in enumerate_subgroups(&g).unwrap().into_iter().step_by(2) {
            let f = random_signal(&g, 1);
            let h = random_signal(&g, 2);
            let fg = left_inner(&f, &h, &sub).unwrap();
            let gf = left_inner(&h, &f, &sub).unwrap();
            let diff = gf.sub(&fg.twisted_involution()).unwrap();
            assert!(diff.max_coeff_abs() < 1e-12);
        }
    }

    #[test]
    fn right_inner_on_trivial_adjoint() {
        // Lambda = full phase space of Z_2, adjoint = {0}, dual weight 2.
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let adjoint = lat.adjoint();
        let d0 = Signal::delta_at_identity(&g);
        let el = right_inner(&d0, &d0, adjoint.subgroup()).unwrap();
        assert_eq!(el.coeffs().len(), 1);
        assert_abs_diff_eq!((el.coeffs()[0] - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(el.weight_f64(), 2.0);
        // As an operator it multiplies by 2.
        let f = random_signal(&g, 9);
        let acted = right_act(&f, &el).unwrap();
        let expected = f.scale(Complex64::new(2.0, 0.0));
        assert!(acted.sub(&expected).norm() < 1e-13);
    }

    #[test]
    fn associativity_of_inner_products() {
        let g = z(4);
        for sub in enumerate_subgroups(&g).unwrap() {
            let adjoint_sub = crate::phase::adjoint_subgroup(&sub);
            for seed in 0..6u64 {
                let f = random_signal(&g, 10 + seed);
                let w = random_signal(&g, 20 + seed);
                let h = random_signal(&g, 30 + seed);
                let lhs = left_act(&left_inner(&f, &w, &sub).unwrap(), &h).unwrap();
                let rhs = right_act(&f, &right_inner(&w, &h, &adjoint_sub).unwrap()).unwrap();
                assert!(
                    lhs.sub(&rhs).norm() < 1e-10,
                    "associativity failed on subgroup of order {}",
                    sub.order()
                );
            }
        }
    }

    #[test]
    fn left_action_basics() {
        let g = z(2);
        let full = PhaseSpaceSubgroup::full(&g);
        let f = random_signal(&g, 4);
        let one = AlgebraElement::identity(&full, Orientation::Left);
        assert!(left_act(&one, &f).unwrap().sub(&f).norm() < 1e-14);

        let d10 = AlgebraElement::delta(
            &full,
            Orientation::Left,
            &PhaseSpacePoint::from_coords(&g, &[1], &[0]).unwrap(),
        )
        .unwrap();
        let shifted = left_act(&d10, &Signal::delta_at_identity(&g)).unwrap();
        let d1 = Signal::delta(&g, &g.element(&[1]).unwrap());
        assert!(shifted.sub(&d1).norm() < 1e-14);
    }

    #[test]
    fn actions_compose_with_products() {
        let g = z(4);
        let sub = crate::phase::subgroup_closure(
            &g,
            &[PhaseSpacePoint::from_coords(&g, &[1], &[2]).unwrap()],
        )
        .unwrap();
        let adjoint_sub = crate::phase::adjoint_subgroup(&sub);
        let f = random_signal(&g, 77);

        // Left: (a1 conv a2) f = a1 (a2 f).
        let a1 = left_inner(&random_signal(&g, 1), &random_signal(&g, 2), &sub).unwrap();
        let a2 = left_inner(&random_signal(&g, 3), &random_signal(&g, 4), &sub).unwrap();
        let lhs = left_act(&a1.twisted_convolve(&a2).unwrap(), &f).unwrap();
        let rhs = left_act(&a1, &left_act(&a2, &f).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).norm() < 1e-12);

        // Right: f (b1 conv b2) = (f b1) b2.
        let b1 = right_inner(&random_signal(&g, 5), &random_signal(&g, 6), &adjoint_sub).unwrap();
        let b2 = right_inner(&random_signal(&g, 7), &random_signal(&g, 8), &adjoint_sub).unwrap();
        let lhs = right_act(&f, &b1.twisted_convolve(&b2).unwrap()).unwrap();
        let rhs = right_act(&right_act(&f, &b1).unwrap(), &b2).unwrap();
        assert!(lhs.sub(&rhs).norm() < 1e-12);

        // Mixed: (a f) b = a (f b).
        let lhs = right_act(&left_act(&a1, &f).unwrap(), &b1).unwrap();
        let rhs = left_act(&a1, &right_act(&f, &b1).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).norm() < 1e-12);
    }

    #[test]
    fn right_action_weight_arithmetic() {
        // Lambda full on Z_2: adjoint {0}, f . (beta delta_0) = 2 beta f.
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let adjoint = lat.adjoint();
        let beta = Complex64::new(0.3, -0.7);
        let b = AlgebraElement::delta(
            adjoint.subgroup(),
            Orientation::Right,
            &PhaseSpacePoint::identity(&g),
        )
        .unwrap()
        .scale(beta);
        let f = random_signal(&g, 12);
        let acted = right_act(&f, &b).unwrap();
        let expected = f.scale(beta * 2.0);
        assert!(acted.sub(&expected).norm() < 1e-13);

        let one_b = AlgebraElement::identity(adjoint.subgroup(), Orientation::Right);
        assert!(right_act(&f, &one_b).unwrap().sub(&f).norm() < 1e-13);
    }

    #[test]
    fn compatibility_of_actions_with_inner_products() {
        let g = z(3);
        for sub in enumerate_subgroups(&g).unwrap() {
            let adjoint_sub = crate::phase::adjoint_subgroup(&sub);
            let f = random_signal(&g, 41);
            let h = random_signal(&g, 42);
            let a = left_inner(&random_signal(&g, 43), &random_signal(&g, 44), &sub).unwrap();
            let b =
                right_inner(&random_signal(&g, 45), &random_signal(&g, 46), &adjoint_sub).unwrap();

            // <a f, h>_right = <f, a* h>_right
            let lhs = right_inner(&left_act(&a, &f).unwrap(), &h, &adjoint_sub).unwrap();
            let rhs =
                right_inner(&f, &left_act(&a.twisted_involution(), &h).unwrap(), &adjoint_sub)
                    .unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_coeff_abs() < 1e-11);

            // <f b, h>_left = <f, h b*>_left
            let lhs = left_inner(&right_act(&f, &b).unwrap(), &h, &sub).unwrap();
            let rhs =
                left_inner(&f, &right_act(&h, &b.twisted_involution()).unwrap(), &sub).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_coeff_abs() < 1e-11);
        }
    }

    #[test]
    fn inner_products_are_positive_with_equal_norms() {
        let g = z(4);
        for sub in enumerate_subgroups(&g).unwrap().into_iter().step_by(2) {
            let adjoint_sub = crate::phase::adjoint_subgroup(&sub);
            let f = random_signal(&g, 51);
            let left = left_inner(&f, &f, &sub).unwrap();
            let right = right_inner(&f, &f, &adjoint_sub).unwrap();
            let (lo_l, _) = linalg::hermitian_extremes(&left.represent());
            let (lo_r, _) = linalg::hermitian_extremes(&right.represent());
            assert!(lo_l > -1e-10);
            assert!(lo_r > -1e-10);
            let nl = left.norm();
            let nr = right.norm();
            assert!((nl - nr).abs() <= 1e-10 * nl.max(nr).max(1e-300));
        }
    }

    #[test]
    fn localization_identities() {
        let g = z(4);
        for sub in enumerate_subgroups(&g).unwrap().into_iter().step_by(3) {
            let adjoint_sub = crate::phase::adjoint_subgroup(&sub);
            let f = random_signal(&g, 61);
            let h = random_signal(&g, 62);
            let plain = f.inner(&h);
            let via_left = localized_inner(&f, &h, &sub).unwrap();
            let via_right = right_inner(&h, &f, &adjoint_sub).unwrap().trace();
            assert_abs_diff_eq!((via_left - plain).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((via_right - plain).norm(), 0.0, epsilon = 1e-12);
        }
    }

    fn random_matrix_atom(
        rows: usize,
        cols: usize,
        lattice: &Lattice,
        seed: u64,
    ) -> MatrixModuleElement {
        let mut out = MatrixModuleElement::zero(rows, cols, lattice.clone());
        for i in 0..rows {
            for j in 0..cols {
                *out.entry_mut(i, j) = random_signal(lattice.group(), seed + (i * cols + j) as u64);
            }
        }
        out
    }

    #[test]
    fn matrix_inner_reduces_to_scalar_case() {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let f = random_signal(&g, 71);
        let h = random_signal(&g, 72);
        let fm = MatrixModuleElement::scalar(f.clone(), lat.clone()).unwrap();
        let hm = MatrixModuleElement::scalar(h.clone(), lat.clone()).unwrap();
        let matrix = matrix_left_inner(&fm, &hm).unwrap();
        let scalar = left_inner(&f, &h, lat.subgroup()).unwrap();
        assert!(matrix.entry(0, 0).sub(&scalar).unwrap().max_coeff_abs() < 1e-14);

        let adjoint = lat.adjoint();
        let matrix = matrix_right_inner(&fm, &hm, adjoint.subgroup()).unwrap();
        let scalar = right_inner(&f, &h, adjoint.subgroup()).unwrap();
        assert!(matrix.entry(0, 0).sub(&scalar).unwrap().max_coeff_abs() < 1e-14);
    }

    #[test]
    fn matrix_inner_block_sparsity() {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let mut f = MatrixModuleElement::zero(2, 2, lat.clone());
        *f.entry_mut(0, 0) = random_signal(&g, 81);
        let inner = matrix_left_inner(&f, &f).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let c = inner.entry(i, j).max_coeff_abs();
                if i == 0 && j == 0 {
                    assert!(c > 0.0);
                } else {
                    assert_eq!(c, 0.0);
                }
            }
        }
    }

    #[test]
    fn matrix_associativity() {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let adjoint_sub = lat.adjoint();
        let f = random_matrix_atom(2, 2, &lat, 90);
        let w = random_matrix_atom(2, 2, &lat, 95);
        let h = random_matrix_atom(2, 2, &lat, 99);
        let lhs = matrix_left_act(&matrix_left_inner(&f, &w).unwrap(), &h).unwrap();
        let rhs = matrix_right_act(
            &f,
            &matrix_right_inner(&w, &h, adjoint_sub.subgroup()).unwrap(),
        )
        .unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() < 1e-10);
    }

    #[test]
    fn matrix_trace_compatibility() {
        let g = z(2);
        for sub in enumerate_subgroups(&g).unwrap() {
            let lat = Lattice::primal(sub.clone());
            let adjoint_sub = crate::phase::adjoint_subgroup(&sub);
            let n = 2usize;
            let f = random_matrix_atom(n, 2, &lat, 101);
            let w = random_matrix_atom(n, 2, &lat, 107);
            let left = matrix_left_inner(&f, &w).unwrap().matrix_trace(n);
            let right = matrix_right_inner(&w, &f, &adjoint_sub)
                .unwrap()
                .matrix_trace(n);
            assert_abs_diff_eq!((left - right).norm(), 0.0, epsilon = 1e-10);
            // The matrix localization identity: (1/n) <f, w> on the ambient space.
            let ambient = ambient_inner(&f, &w).unwrap() / n as f64;
            assert_abs_diff_eq!((left - ambient).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn inner_products_span_full_coefficient_space() {
        let g = z(3);
        let full = PhaseSpaceSubgroup::full(&g);
        let mut rows = Vec::new();
        for seed in 0..20u64 {
            let f = random_signal(&g, 200 + seed);
            let h = random_signal(&g, 300 + seed);
            rows.push(left_inner(&f, &h, &full).unwrap().coeffs().to_vec());
        }
        let m = CMatrix::from_fn(rows.len(), full.order(), |i, j| rows[i][j]);
        assert_eq!(linalg::rank(&m, 1e-10), full.order());
    }

    #[test]
    fn flatten_layout_is_g_fastest() {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let mut f = MatrixModuleElement::zero(2, 2, lat);
        *f.entry_mut(1, 0) = Signal::delta_at_identity(&g);
        let flat = f.flatten();
        // Block order: (0,0), (0,1), (1,0), (1,1); block length |G| = 2.
        let idx = (2 + 0) * 2;
        assert_eq!(flat[idx], Complex64::new(1.0, 0.0));
        assert_eq!(flat.iter().filter(|c| c.norm() > 0.0).count(), 1);
    }

    #[test]
    fn theta_matrix_matches_direct_application() {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let atom = random_matrix_atom(2, 1, &lat, 120);
        let other = random_matrix_atom(2, 1, &lat, 130);
        let theta = theta_matrix(&atom, &other).unwrap();
        let f = random_matrix_atom(2, 1, &lat, 140);
        let direct = matrix_left_act(&matrix_left_inner(&f, &atom).unwrap(), &other).unwrap();
        let via_matrix = linalg::apply(&theta, &f.flatten());
        let expected = direct.flatten();
        for (a, b) in via_matrix.iter().zip(&expected) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn matrix_module_json_shape() {
        let g = z(2);
        let lat = Lattice::primal(PhaseSpaceSubgroup::full(&g));
        let f = random_matrix_atom(2, 1, &lat, 12);
        let json = serde_json::to_value(&f).unwrap();
        assert_eq!(json["n"], 2);
        assert_eq!(json["d"], 1);
        assert!(json["entries"].is_array());
        let grid: MatrixModuleGrid = serde_json::from_value(json).unwrap();
        let back = MatrixModuleElement::from_grid(grid, lat).unwrap();
        assert_eq!(back, f);
    }
}
