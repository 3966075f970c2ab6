//! Deterministic experiment sweeps: enumerate subgroup lattices, draw seeded
//! atoms, run the theorem checks, and aggregate verdicts.
//!
//! Every atom is derived from the sweep seed through a per-instance mix, so
//! results are byte-identical across runs and independent of the parallel
//! schedule.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bimodule::MatrixModuleElement;
use crate::duality::{
    density_verdict, duality_check, idempotent_check, multiwindow_super_equivalence,
    wexler_raz_check, TheoremId, TheoremVerdict,
};
use crate::error::Result;
use crate::frame::{canonical_dual, frame_report};
use crate::group::FiniteLcaGroup;
use crate::phase::{enumerate_subgroups, Lattice};
use crate::signal::Signal;

/// Options steering a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Window shapes n, d range over 1..=max_nd.
    pub max_nd: usize,
    /// Random atoms per (subgroup, n, d) instance.
    pub random_atoms: usize,
    /// Also test the delta and constant presets.
    pub include_presets: bool,
    /// Relative spectral tolerance for the frame/Riesz decisions.
    pub tolerance: f64,
    /// Sweep seed; atoms are derived deterministically from it.
    pub seed: u64,
    /// Theorems to check.
    pub theorems: Vec<TheoremId>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            max_nd: 2,
            random_atoms: 20,
            include_presets: true,
            tolerance: crate::frame::DEFAULT_TOL,
            seed: 0,
            theorems: vec![
                TheoremId::Duality,
                TheoremId::WexlerRaz,
                TheoremId::Density,
                TheoremId::Idempotent,
                TheoremId::MultiwindowSuper,
            ],
        }
    }
}

/// Aggregate of one sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub verdicts: Vec<TheoremVerdict>,
    pub instances: usize,
    pub frames_found: usize,
    pub riesz_found: usize,
    pub dual_pairs_checked: usize,
}

impl SweepOutcome {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failures(&self) -> Vec<&TheoremVerdict> {
        self.verdicts.iter().filter(|v| !v.pass).collect()
    }
}

/// Per-theorem aggregation row for summary tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    pub theorem: TheoremId,
    pub instances: usize,
    pub agreements: usize,
    pub max_residual: f64,
}

pub fn summarize(verdicts: &[TheoremVerdict]) -> Vec<SummaryRow> {
    let order = [
        TheoremId::Duality,
        TheoremId::WexlerRaz,
        TheoremId::Density,
        TheoremId::Idempotent,
        TheoremId::IdempotentRange,
        TheoremId::MultiwindowSuper,
    ];
    order
        .iter()
        .filter_map(|&theorem| {
            let rows: Vec<&TheoremVerdict> =
                verdicts.iter().filter(|v| v.theorem == theorem).collect();
            if rows.is_empty() {
                return None;
            }
            Some(SummaryRow {
                theorem,
                instances: rows.len(),
                agreements: rows.iter().filter(|v| v.pass).count(),
                max_residual: rows.iter().map(|v| v.max_residual).fold(0.0, f64::max),
            })
        })
        .collect()
}

/// splitmix64, used to derive independent per-instance seeds.
fn mix(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn instance_seed(seed: u64, sub_idx: usize, n: usize, d: usize, atom_idx: usize) -> u64 {
    let mut s = mix(seed);
    s = mix(s ^ (sub_idx as u64).wrapping_mul(0x51_7C_C1_B7_27_22_0A_95));
    s = mix(s ^ ((n as u64) << 32 | d as u64));
    mix(s ^ (atom_idx as u64))
}

/// Atom with every entry a point mass at the group identity.
pub fn delta_atom(n: usize, d: usize, lattice: &Lattice) -> MatrixModuleElement {
    let mut out = MatrixModuleElement::zero(n, d, lattice.clone());
    for i in 0..n {
        for j in 0..d {
            *out.entry_mut(i, j) = Signal::delta_at_identity(lattice.group());
        }
    }
    out
}

/// Constant atom, normalized to unit ambient norm.
pub fn constant_atom(n: usize, d: usize, lattice: &Lattice) -> MatrixModuleElement {
    let glen = lattice.group().order();
    let v = 1.0 / ((glen * n * d) as f64).sqrt();
    let signal = Signal::new(
        lattice.group().clone(),
        vec![Complex64::new(v, 0.0); glen],
    )
    .expect("constant signal has the right length");
    let mut out = MatrixModuleElement::zero(n, d, lattice.clone());
    for i in 0..n {
        for j in 0..d {
            *out.entry_mut(i, j) = signal.clone();
        }
    }
    out
}

/// Atom with independent standard complex Gaussian entries, normalized to
/// unit ambient norm.
pub fn random_atom(
    rng: &mut impl rand::Rng,
    n: usize,
    d: usize,
    lattice: &Lattice,
) -> MatrixModuleElement {
    let glen = lattice.group().order();
    let mut out = MatrixModuleElement::zero(n, d, lattice.clone());
    for i in 0..n {
        for j in 0..d {
            let values = (0..glen)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(re, im)
                })
                .collect();
            *out.entry_mut(i, j) =
                Signal::new(lattice.group().clone(), values).expect("length matches");
        }
    }
    let norm = out.norm();
    if norm > 0.0 {
        out.scale(Complex64::new(1.0 / norm, 0.0))
    } else {
        out
    }
}

/// The labelled atom list for one (lattice, n, d) instance.
pub fn instance_atoms(
    lattice: &Lattice,
    n: usize,
    d: usize,
    sub_idx: usize,
    opts: &SweepOptions,
) -> Vec<(String, MatrixModuleElement)> {
    let mut atoms = Vec::new();
    if opts.include_presets {
        atoms.push(("delta".to_string(), delta_atom(n, d, lattice)));
        atoms.push(("constant".to_string(), constant_atom(n, d, lattice)));
    }
    for a in 0..opts.random_atoms {
        let seed = instance_seed(opts.seed, sub_idx, n, d, a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        atoms.push((format!("random-{a}"), random_atom(&mut rng, n, d, lattice)));
    }
    atoms
}

/// Verdicts for a single atom: duality and density always, and the
/// dual-pair checks whenever the atom generates a frame.
pub fn check_atom(
    atom: &MatrixModuleElement,
    sub_idx: usize,
    atom_idx: usize,
    opts: &SweepOptions,
) -> Result<AtomChecks> {
    let tol = opts.tolerance;
    let report = frame_report(atom, tol)?;
    let mut verdicts = Vec::new();
    let want = |t: TheoremId| opts.theorems.contains(&t);

    if want(TheoremId::Duality) {
        verdicts.push(duality_check(atom, tol)?);
    }
    if want(TheoremId::Density) {
        verdicts.push(density_verdict(atom, &report));
    }

    let mut dual_checked = false;
    if report.is_frame {
        let dual = canonical_dual(atom, tol)?;
        if want(TheoremId::WexlerRaz) {
            verdicts.push(wexler_raz_check(atom, &dual, tol)?);
        }
        if want(TheoremId::Idempotent) {
            verdicts.push(idempotent_check(atom, &dual, tol)?);
        }
        if want(TheoremId::IdempotentRange) {
            verdicts.push(crate::duality::idempotent_range_check(atom, &dual, tol)?);
        }
        if want(TheoremId::MultiwindowSuper) {
            let trials: Vec<MatrixModuleElement> = (0..3)
                .map(|t| {
                    let seed =
                        instance_seed(opts.seed ^ 0xABCD, sub_idx, atom.rows(), atom.cols(), atom_idx * 8 + t);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    random_atom(&mut rng, atom.rows(), atom.cols(), atom.lattice())
                })
                .collect();
            verdicts.push(multiwindow_super_equivalence(atom, &dual, &trials, tol)?);
        }
        dual_checked = true;
    }

    Ok(AtomChecks {
        is_frame: report.is_frame,
        is_riesz: report.is_riesz,
        dual_checked,
        verdicts,
    })
}

/// Result of checking one atom.
pub struct AtomChecks {
    pub is_frame: bool,
    pub is_riesz: bool,
    pub dual_checked: bool,
    pub verdicts: Vec<TheoremVerdict>,
}

/// Exhaustive sweep over all subgroups of the phase space of one group.
pub fn sweep_group(group: &FiniteLcaGroup, opts: &SweepOptions) -> Result<SweepOutcome> {
    let subgroups = enumerate_subgroups(group)?;
    let mut work = Vec::new();
    for (sub_idx, sub) in subgroups.iter().enumerate() {
        let lattice = Lattice::primal(sub.clone());
        for n in 1..=opts.max_nd {
            for d in 1..=opts.max_nd {
                for (atom_idx, (_, atom)) in
                    instance_atoms(&lattice, n, d, sub_idx, opts).into_iter().enumerate()
                {
                    work.push((sub_idx, atom_idx, atom));
                }
            }
        }
    }

    let results: Vec<Result<AtomChecks>> = work
        .par_iter()
        .map(|(sub_idx, atom_idx, atom)| check_atom(atom, *sub_idx, *atom_idx, opts))
        .collect();

    let mut outcome = SweepOutcome {
        verdicts: Vec::new(),
        instances: 0,
        frames_found: 0,
        riesz_found: 0,
        dual_pairs_checked: 0,
    };
    for res in results {
        let checks = res?;
        outcome.instances += 1;
        outcome.frames_found += checks.is_frame as usize;
        outcome.riesz_found += checks.is_riesz as usize;
        outcome.dual_pairs_checked += checks.dual_checked as usize;
        outcome.verdicts.extend(checks.verdicts);
    }
    Ok(outcome)
}
