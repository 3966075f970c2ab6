//! Finite abelian groups Z_{N1} x ... x Z_{Nk}, their elements, and characters.
//!
//! The dual group is identified with the group itself through the character
//! pairing below, so there is no separate dual-group type: frequency
//! variables are plain [`GroupElement`]s used in the second slot of
//! [`FiniteLcaGroup::character`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite product of cyclic groups, the index space for signals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteLcaGroup {
    orders: Vec<usize>,
}

impl FiniteLcaGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() || orders.iter().any(|&n| n == 0) {
            return Err(Error::InvalidOrders { orders });
        }
        Ok(Self { orders })
    }

    /// Single cyclic factor Z_n.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Total order |G|.
    pub fn order(&self) -> usize {
        self.orders.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.orders.len()],
        }
    }

    /// Builds an element, reducing each coordinate mod its order.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.orders.len() {
            return Err(Error::Invalid(format!(
                "coordinate tuple of length {} for a group of rank {}",
                coords.len(),
                self.orders.len()
            )));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as usize)
                .collect(),
        })
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.orders)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.orders)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// Canonical index of an element in the lexicographic enumeration.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        let mut idx = 0;
        for (c, n) in a.coords.iter().zip(&self.orders) {
            idx = idx * n + c;
        }
        idx
    }

    /// Element at position `idx` of the canonical enumeration.
    pub fn element_at(&self, idx: usize) -> GroupElement {
        let mut rem = idx;
        let mut coords = vec![0usize; self.orders.len()];
        for i in (0..self.orders.len()).rev() {
            coords[i] = rem % self.orders[i];
            rem /= self.orders[i];
        }
        GroupElement { coords }
    }

    /// All elements in canonical (lexicographic) order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|i| self.element_at(i))
    }

    /// Least common multiple of the cyclic orders; the denominator of every
    /// character phase.
    pub(crate) fn phase_lcm(&self) -> i64 {
        self.orders
            .iter()
            .fold(1i64, |acc, &n| num_integer_lcm(acc, n as i64))
    }

    /// Exact character phase: omega(x) = exp(2 pi i k / L) with L = [`Self::phase_lcm`]
    /// and k the value returned here, reduced into [0, L).
    pub(crate) fn phase_numerator(&self, omega: &GroupElement, x: &GroupElement) -> i64 {
        let lcm = self.phase_lcm();
        let mut num = 0i64;
        for ((&w, &t), &n) in omega.coords.iter().zip(&x.coords).zip(&self.orders) {
            num = (num + (w as i64) * (t as i64) % (n as i64) * (lcm / n as i64)) % lcm;
        }
        num
    }

    /// The bicharacter pairing omega(x) = exp(2 pi i sum_j omega_j x_j / N_j).
    ///
    /// The phase is reduced exactly as a rational multiple of 2 pi before
    /// evaluating, so characters of small groups hit exact values (1, i, -1)
    /// to machine precision.
    pub fn character(&self, omega: &GroupElement, x: &GroupElement) -> Complex64 {
        debug_assert_eq!(omega.coords.len(), self.orders.len());
        debug_assert_eq!(x.coords.len(), self.orders.len());
        let lcm = self.phase_lcm();
        let num = self.phase_numerator(omega, x);
        let phase = std::f64::consts::TAU * (num as f64) / (lcm as f64);
        Complex64::new(phase.cos(), phase.sin())
    }

    /// Checked character: errors when the operands live on a different group.
    pub fn character_checked(
        &self,
        omega: &GroupElement,
        x: &GroupElement,
    ) -> Result<Complex64> {
        if omega.coords.len() != self.orders.len() || x.coords.len() != self.orders.len() {
            return Err(Error::GroupMismatch {
                left: self.orders.clone(),
                right: vec![omega.coords.len(), x.coords.len()],
            });
        }
        Ok(self.character(omega, x))
    }

    pub(crate) fn same_as(&self, other: &FiniteLcaGroup) -> Result<()> {
        if self != other {
            return Err(Error::GroupMismatch {
                left: self.orders.clone(),
                right: other.orders.clone(),
            });
        }
        Ok(())
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    let gcd = {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    a / gcd * b
}

/// An element of a [`FiniteLcaGroup`], stored with reduced coordinates.
///
/// Serializes as the bare coordinate array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<usize>,
}

impl GroupElement {
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_zero_order() {
        assert!(FiniteLcaGroup::new(vec![0]).is_err());
        assert!(FiniteLcaGroup::new(vec![2, 0, 3]).is_err());
        assert!(FiniteLcaGroup::new(vec![]).is_err());
    }

    #[test]
    fn arithmetic_reduces_mod_orders() {
        let g = FiniteLcaGroup::new(vec![2, 3]).unwrap();
        let a = g.element(&[5, -1]).unwrap();
        assert_eq!(a.coords(), &[1, 2]);
        let b = g.element(&[1, 2]).unwrap();
        assert_eq!(g.add(&a, &b).coords(), &[0, 1]);
        assert_eq!(g.neg(&a).coords(), &[1, 1]);
        assert!(g.add(&a, &g.neg(&a)).is_identity());
    }

    #[test]
    fn enumeration_round_trips() {
        let g = FiniteLcaGroup::new(vec![2, 3, 2]).unwrap();
        assert_eq!(g.order(), 12);
        for idx in 0..g.order() {
            assert_eq!(g.index_of(&g.element_at(idx)), idx);
        }
        // Lexicographic: element 0 is the identity, element 1 bumps the last coord.
        assert_eq!(g.element_at(0).coords(), &[0, 0, 0]);
        assert_eq!(g.element_at(1).coords(), &[0, 0, 1]);
    }

    #[test]
    fn character_on_z4_is_i() {
        let g = FiniteLcaGroup::cyclic(4).unwrap();
        let one = g.element(&[1]).unwrap();
        let val = g.character(&one, &one);
        assert_abs_diff_eq!(val.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(val.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn trivial_character_is_one() {
        let g = FiniteLcaGroup::new(vec![3, 5]).unwrap();
        let zero = g.identity();
        for x in g.elements() {
            let val = g.character(&zero, &x);
            assert_abs_diff_eq!(val.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(val.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn character_on_z2_x_z3() {
        // omega = (1,1), x = (1,2): phase 1/2 + 2/3 = 7/6 of a full turn,
        // i.e. exp(i pi / 3) = 1/2 + i sqrt(3)/2.
        let g = FiniteLcaGroup::new(vec![2, 3]).unwrap();
        let omega = g.element(&[1, 1]).unwrap();
        let x = g.element(&[1, 2]).unwrap();
        let val = g.character(&omega, &x);
        assert_abs_diff_eq!(val.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(val.im, 0.75f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn character_is_a_bicharacter() {
        let g = FiniteLcaGroup::new(vec![4, 3]).unwrap();
        for w in g.elements() {
            for x in g.elements() {
                for y in g.elements() {
                    let lhs = g.character(&w, &g.add(&x, &y));
                    let rhs = g.character(&w, &x) * g.character(&w, &y);
                    assert_abs_diff_eq!(lhs.re, rhs.re, epsilon = 1e-12);
                    assert_abs_diff_eq!(lhs.im, rhs.im, epsilon = 1e-12);
                    let lhs = g.character(&g.add(&w, &x), &y);
                    let rhs = g.character(&w, &y) * g.character(&x, &y);
                    assert_abs_diff_eq!(lhs.re, rhs.re, epsilon = 1e-12);
                    assert_abs_diff_eq!(lhs.im, rhs.im, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn mismatched_rank_is_an_error() {
        let g = FiniteLcaGroup::new(vec![2, 2]).unwrap();
        let h = FiniteLcaGroup::cyclic(4).unwrap();
        let w = h.element(&[1]).unwrap();
        let x = g.element(&[1, 0]).unwrap();
        assert!(g.character_checked(&w, &x).is_err());
    }
}
