//! Complex signals indexed by the canonical enumeration of a finite group.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteLcaGroup, GroupElement};

/// An element of l^2(G): a complex vector of length |G|.
///
/// The inner product is linear in the first argument. Values serialize as
/// arrays of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    group: FiniteLcaGroup,
    #[serde(with = "complex_pairs")]
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(group: FiniteLcaGroup, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::SignalLength {
                expected: group.order(),
                got: values.len(),
            });
        }
        Ok(Self { group, values })
    }

    pub fn zero(group: &FiniteLcaGroup) -> Self {
        Self {
            group: group.clone(),
            values: vec![Complex64::new(0.0, 0.0); group.order()],
        }
    }

    /// The Kronecker delta at a group element.
    pub fn delta(group: &FiniteLcaGroup, at: &GroupElement) -> Self {
        let mut s = Self::zero(group);
        s.values[group.index_of(at)] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn delta_at_identity(group: &FiniteLcaGroup) -> Self {
        Self::delta(group, &group.identity())
    }

    /// Constant signal normalized to unit l^2 norm.
    pub fn normalized_constant(group: &FiniteLcaGroup) -> Self {
        let v = 1.0 / (group.order() as f64).sqrt();
        Self {
            group: group.clone(),
            values: vec![Complex64::new(v, 0.0); group.order()],
        }
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn value_at(&self, g: &GroupElement) -> Complex64 {
        self.values[self.group.index_of(g)]
    }

    /// l^2 inner product, linear in `self`: sum f(t) conj(g(t)).
    pub fn inner(&self, other: &Signal) -> Complex64 {
        debug_assert_eq!(self.group, other.group);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn inner_checked(&self, other: &Signal) -> Result<Complex64> {
        self.group.same_as(&other.group)?;
        Ok(self.inner(other))
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Signal {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Signal {
        debug_assert_eq!(self.group, other.group);
        Signal {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Signal) -> Signal {
        debug_assert_eq!(self.group, other.group);
        Signal {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Signal) {
        debug_assert_eq!(self.group, other.group);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }
}

/// Serde helpers serializing complex vectors as `[[re, im], ...]`.
pub mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], ser: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(de)?;
        Ok(pairs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}
