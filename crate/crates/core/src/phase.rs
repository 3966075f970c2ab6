//! Phase space G x G^, its cocycles, and subgroup machinery: closure from
//! generators, the adjoint subgroup, lattice sizes, and exhaustive subgroup
//! enumeration.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteLcaGroup, GroupElement};

/// Largest phase space (|G|^2) accepted by [`enumerate_subgroups`].
pub const ENUMERATION_LIMIT: usize = 10_000;

/// A point xi = (x, omega) of the time-frequency plane.
///
/// Serializes as `[[x coords], [omega coords]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(GroupElement, GroupElement)", into = "(GroupElement, GroupElement)")]
pub struct PhaseSpacePoint {
    x: GroupElement,
    omega: GroupElement,
}

impl From<(GroupElement, GroupElement)> for PhaseSpacePoint {
    fn from((x, omega): (GroupElement, GroupElement)) -> Self {
        Self { x, omega }
    }
}

impl From<PhaseSpacePoint> for (GroupElement, GroupElement) {
    fn from(p: PhaseSpacePoint) -> Self {
        (p.x, p.omega)
    }
}

impl PhaseSpacePoint {
    pub fn new(x: GroupElement, omega: GroupElement) -> Self {
        Self { x, omega }
    }

    /// Convenience constructor reducing raw coordinates mod the group orders.
    pub fn from_coords(group: &FiniteLcaGroup, x: &[i64], omega: &[i64]) -> Result<Self> {
        Ok(Self {
            x: group.element(x)?,
            omega: group.element(omega)?,
        })
    }

    pub fn x(&self) -> &GroupElement {
        &self.x
    }

    pub fn omega(&self) -> &GroupElement {
        &self.omega
    }

    pub fn identity(group: &FiniteLcaGroup) -> Self {
        Self {
            x: group.identity(),
            omega: group.identity(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_identity() && self.omega.is_identity()
    }

    pub fn add(&self, other: &Self, group: &FiniteLcaGroup) -> Self {
        Self {
            x: group.add(&self.x, &other.x),
            omega: group.add(&self.omega, &other.omega),
        }
    }

    pub fn neg(&self, group: &FiniteLcaGroup) -> Self {
        Self {
            x: group.neg(&self.x),
            omega: group.neg(&self.omega),
        }
    }

    pub fn sub(&self, other: &Self, group: &FiniteLcaGroup) -> Self {
        self.add(&other.neg(group), group)
    }

    /// Index in the canonical enumeration of G x G^ (x-major, then omega).
    pub fn index_in(&self, group: &FiniteLcaGroup) -> usize {
        group.index_of(&self.x) * group.order() + group.index_of(&self.omega)
    }
}

/// All |G|^2 phase-space points in canonical order.
pub fn phase_space_points(group: &FiniteLcaGroup) -> Vec<PhaseSpacePoint> {
    let mut out = Vec::with_capacity(group.order() * group.order());
    for x in group.elements() {
        for omega in group.elements() {
            out.push(PhaseSpacePoint::new(x.clone(), omega.clone()));
        }
    }
    out
}

/// The 2-cocycle c(xi1, xi2) = conj(omega2(x1)) governing composition of
/// time-frequency shifts.
pub fn cocycle(
    group: &FiniteLcaGroup,
    xi1: &PhaseSpacePoint,
    xi2: &PhaseSpacePoint,
) -> Complex64 {
    group.character(&xi2.omega, &xi1.x).conj()
}

/// Checked variant for callers holding points of unknown provenance.
pub fn cocycle_checked(
    group: &FiniteLcaGroup,
    xi1: &PhaseSpacePoint,
    xi2: &PhaseSpacePoint,
) -> Result<Complex64> {
    check_point(group, xi1)?;
    check_point(group, xi2)?;
    Ok(cocycle(group, xi1, xi2))
}

/// The symplectic cocycle c_s(xi1, xi2) = conj(omega2(x1)) * omega1(x2); it
/// measures the commutation defect of two time-frequency shifts.
pub fn symplectic_cocycle(
    group: &FiniteLcaGroup,
    xi1: &PhaseSpacePoint,
    xi2: &PhaseSpacePoint,
) -> Complex64 {
    group.character(&xi2.omega, &xi1.x).conj() * group.character(&xi1.omega, &xi2.x)
}

pub fn symplectic_cocycle_checked(
    group: &FiniteLcaGroup,
    xi1: &PhaseSpacePoint,
    xi2: &PhaseSpacePoint,
) -> Result<Complex64> {
    check_point(group, xi1)?;
    check_point(group, xi2)?;
    Ok(symplectic_cocycle(group, xi1, xi2))
}

/// Exact test for c_s(xi1, xi2) = 1, done in integer arithmetic on the
/// rational character phases so the adjoint subgroup is float-free.
fn symplectic_pairs_trivially(
    group: &FiniteLcaGroup,
    xi1: &PhaseSpacePoint,
    xi2: &PhaseSpacePoint,
) -> bool {
    let lcm = group.phase_lcm();
    let a = group.phase_numerator(&xi1.omega, &xi2.x);
    let b = group.phase_numerator(&xi2.omega, &xi1.x);
    (a - b).rem_euclid(lcm) == 0
}

fn check_point(group: &FiniteLcaGroup, p: &PhaseSpacePoint) -> Result<()> {
    if p.x.coords().len() != group.rank() || p.omega.coords().len() != group.rank() {
        return Err(Error::GroupMismatch {
            left: group.orders().to_vec(),
            right: vec![p.x.coords().len(), p.omega.coords().len()],
        });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SubgroupJson {
    orders: Vec<usize>,
    generators: Vec<PhaseSpacePoint>,
    elements: Vec<PhaseSpacePoint>,
}

/// A fully enumerated subgroup of the phase space G x G^.
///
/// Elements are kept sorted by the lexicographic order on (x, omega)
/// coordinates, so identical subgroups enumerate identically across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubgroupJson", into = "SubgroupJson")]
pub struct PhaseSpaceSubgroup {
    group: FiniteLcaGroup,
    generators: Vec<PhaseSpacePoint>,
    elements: Vec<PhaseSpacePoint>,
}

impl TryFrom<SubgroupJson> for PhaseSpaceSubgroup {
    type Error = Error;

    fn try_from(json: SubgroupJson) -> Result<Self> {
        let group = FiniteLcaGroup::new(json.orders)?;
        let rebuilt = subgroup_closure(&group, &json.generators)?;
        if !json.elements.is_empty() && rebuilt.elements != json.elements {
            return Err(Error::Invalid(
                "subgroup elements do not match the closure of the generators".into(),
            ));
        }
        Ok(rebuilt)
    }
}

impl From<PhaseSpaceSubgroup> for SubgroupJson {
    fn from(sub: PhaseSpaceSubgroup) -> Self {
        SubgroupJson {
            orders: sub.group.orders().to_vec(),
            generators: sub.generators,
            elements: sub.elements,
        }
    }
}

impl PhaseSpaceSubgroup {
    pub fn group(&self) -> &FiniteLcaGroup {
        &self.group
    }

    pub fn generators(&self) -> &[PhaseSpacePoint] {
        &self.generators
    }

    /// Elements in the fixed canonical order.
    pub fn elements(&self) -> &[PhaseSpacePoint] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &PhaseSpacePoint) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Position of `p` in the canonical enumeration, if present.
    pub fn index_of(&self, p: &PhaseSpacePoint) -> Option<usize> {
        self.elements.binary_search(p).ok()
    }

    /// s(Lambda) = |G| / |Lambda|, as an exact rational.
    pub fn size(&self) -> Ratio<i64> {
        Ratio::new(self.group.order() as i64, self.order() as i64)
    }

    /// The full phase space as a subgroup of itself.
    pub fn full(group: &FiniteLcaGroup) -> Self {
        let gens: Vec<PhaseSpacePoint> = minimal_generators(group, &phase_space_points(group));
        subgroup_closure(group, &gens).expect("generators come from the same group")
    }

    pub fn trivial(group: &FiniteLcaGroup) -> Self {
        subgroup_closure(group, &[]).expect("empty generator list is always valid")
    }
}

/// Smallest subgroup of G x G^ containing the generators.
///
/// The empty generator list yields the trivial subgroup {0}.
pub fn subgroup_closure(
    group: &FiniteLcaGroup,
    generators: &[PhaseSpacePoint],
) -> Result<PhaseSpaceSubgroup> {
    for g in generators {
        check_point(group, g)?;
    }
    let mut set: BTreeSet<PhaseSpacePoint> = BTreeSet::new();
    set.insert(PhaseSpacePoint::identity(group));
    for gen in generators {
        if set.contains(gen) {
            continue;
        }
        // Cyclic extension: close the current set under all multiples of `gen`.
        let mut multiples = vec![PhaseSpacePoint::identity(group)];
        let mut m = gen.clone();
        while !m.is_identity() {
            multiples.push(m.clone());
            m = m.add(gen, group);
        }
        let base: Vec<PhaseSpacePoint> = set.iter().cloned().collect();
        for s in &base {
            for m in &multiples {
                set.insert(s.add(m, group));
            }
        }
    }
    Ok(PhaseSpaceSubgroup {
        group: group.clone(),
        generators: generators.to_vec(),
        elements: set.into_iter().collect(),
    })
}

/// Greedy minimal generating set, scanning elements in canonical order.
fn minimal_generators(
    group: &FiniteLcaGroup,
    elements: &[PhaseSpacePoint],
) -> Vec<PhaseSpacePoint> {
    let mut gens: Vec<PhaseSpacePoint> = Vec::new();
    let mut current: BTreeSet<PhaseSpacePoint> = BTreeSet::new();
    current.insert(PhaseSpacePoint::identity(group));
    for p in elements {
        if !current.contains(p) {
            gens.push(p.clone());
            let closed = subgroup_closure(group, &gens).expect("elements are valid points");
            current = closed.elements.iter().cloned().collect();
            if current.len() == elements.len() {
                break;
            }
        }
    }
    gens
}

/// The adjoint subgroup: all xi with c_s(xi, lambda) = 1 for every lambda.
///
/// Computed by exact integer phase arithmetic over the whole phase space;
/// only the generators of the input need checking since c_s is a bicharacter.
pub fn adjoint_subgroup(subgroup: &PhaseSpaceSubgroup) -> PhaseSpaceSubgroup {
    let group = &subgroup.group;
    let testers: &[PhaseSpacePoint] = if subgroup.generators.is_empty() {
        &subgroup.elements
    } else {
        &subgroup.generators
    };
    let elements: Vec<PhaseSpacePoint> = phase_space_points(group)
        .into_iter()
        .filter(|xi| {
            testers
                .iter()
                .all(|lam| symplectic_pairs_trivially(group, xi, lam))
        })
        .collect();
    // phase_space_points is already in canonical order, and filtering keeps it.
    let generators = minimal_generators(group, &elements);
    PhaseSpaceSubgroup {
        group: group.clone(),
        generators,
        elements,
    }
}

/// All subgroups of G x G^, deduplicated, in a deterministic order
/// (ascending order, then lexicographic element lists).
pub fn enumerate_subgroups(group: &FiniteLcaGroup) -> Result<Vec<PhaseSpaceSubgroup>> {
    let size = group.order() * group.order();
    if size > ENUMERATION_LIMIT {
        return Err(Error::PhaseSpaceTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let points = phase_space_points(group);
    let trivial = PhaseSpaceSubgroup::trivial(group);
    let mut seen: BTreeSet<Vec<PhaseSpacePoint>> = BTreeSet::new();
    seen.insert(trivial.elements.clone());
    let mut frontier = vec![trivial];
    let mut all = Vec::new();
    while let Some(sub) = frontier.pop() {
        for p in &points {
            if sub.contains(p) {
                continue;
            }
            let mut gens = sub.generators.clone();
            gens.push(p.clone());
            let bigger = subgroup_closure(group, &gens)?;
            if seen.insert(bigger.elements.clone()) {
                frontier.push(bigger);
            }
        }
        all.push(sub);
    }
    all.sort_by(|a, b| {
        (a.order(), &a.elements).cmp(&(b.order(), &b.elements))
    });
    // Rebuild with minimal generating sets so serialized output is tidy.
    Ok(all
        .into_iter()
        .map(|s| {
            let generators = minimal_generators(group, &s.elements);
            PhaseSpaceSubgroup { generators, ..s }
        })
        .collect())
}

/// A subgroup together with its integration weight: lattices carry the
/// counting measure (weight 1), adjoint lattices the Plancherel-dual weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    subgroup: PhaseSpaceSubgroup,
    weight: Ratio<i64>,
}

impl Lattice {
    /// A primal lattice: counting measure, weight 1.
    pub fn primal(subgroup: PhaseSpaceSubgroup) -> Self {
        Self {
            subgroup,
            weight: Ratio::from_integer(1),
        }
    }

    /// The adjoint lattice, carrying the dual weight |M| * w / |G|.
    ///
    /// Applying this twice returns to the original subgroup and weight.
    pub fn adjoint(&self) -> Self {
        let dual_weight =
            self.weight * Ratio::new(self.subgroup.order() as i64, self.group().order() as i64);
        Self {
            subgroup: adjoint_subgroup(&self.subgroup),
            weight: dual_weight,
        }
    }

    pub fn subgroup(&self) -> &PhaseSpaceSubgroup {
        &self.subgroup
    }

    pub fn group(&self) -> &FiniteLcaGroup {
        self.subgroup.group()
    }

    pub fn weight(&self) -> Ratio<i64> {
        self.weight
    }

    pub fn weight_f64(&self) -> f64 {
        (*self.weight.numer() as f64) / (*self.weight.denom() as f64)
    }

    pub fn order(&self) -> usize {
        self.subgroup.order()
    }

    pub fn size(&self) -> Ratio<i64> {
        self.subgroup.size()
    }
}
