//! Seeded random generators for measures, sets, groups and
//! equidecomposable pairs.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{enumerate_group, PermutationGroup};
use crate::instances::{FiniteSet, FiniteSpace, Measure};
use crate::rational::Rational;

pub type CaseRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> CaseRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a suite seed, a check number and a case number into one case seed.
pub fn case_seed(seed: u64, check: u64, case: u64) -> u64 {
    let mut z = seed ^ check.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ case.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A positive rational with small numerator and denominator.
pub fn positive_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(1..=12), rng.gen_range(1..=6))
}

pub fn rational(rng: &mut impl Rng) -> Rational {
    if rng.gen_ratio(1, 5) {
        Rational::zero()
    } else {
        positive_rational(rng)
    }
}

/// Each point carries mass with probability one half.
pub fn measure(space: &Arc<FiniteSpace>, rng: &mut impl Rng) -> Measure {
    let masses: Vec<(usize, Rational)> = (0..space.len())
        .filter_map(|x| rng.gen_bool(0.5).then(|| (x, positive_rational(rng))))
        .collect();
    Measure::from_masses(space, masses)
}

pub fn subset(space: &Arc<FiniteSpace>, rng: &mut impl Rng) -> FiniteSet {
    FiniteSet::from_indices(space, (0..space.len()).filter(|_| rng.gen_bool(0.5)))
}

/// `k` pairwise disjoint subsets: every point goes to one of the `k` sets
/// or to none.
pub fn disjoint_subsets(space: &Arc<FiniteSpace>, k: usize, rng: &mut impl Rng) -> Vec<FiniteSet> {
    let mut bins = vec![Vec::new(); k];
    for x in 0..space.len() {
        let slot = rng.gen_range(0..=k);
        if slot < k {
            bins[slot].push(x);
        }
    }
    bins.into_iter().map(|b| FiniteSet::from_indices(space, b)).collect()
}

/// A random permutation built from cycles of length at most `max_cycle`.
pub fn bounded_cycle_permutation(n: usize, max_cycle: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    let mut images: Vec<usize> = (0..n).collect();
    let mut rest = &points[..];
    while !rest.is_empty() {
        let len = rng.gen_range(1..=max_cycle.min(rest.len()));
        let (cycle, tail) = rest.split_at(len);
        for i in 0..len {
            images[cycle[i]] = cycle[(i + 1) % len];
        }
        rest = tail;
    }
    images
}

/// A random permutation group on `1..=max_points` points with at most
/// `max_order` elements. One or two generators of small cycle type are
/// drawn until the closure fits.
pub fn group(max_points: usize, max_order: usize, rng: &mut impl Rng) -> PermutationGroup {
    let n = rng.gen_range(1..=max_points);
    let space = FiniteSpace::indexed(n);
    loop {
        let k = rng.gen_range(1..=2);
        let gens: Vec<Vec<usize>> = (0..k).map(|_| bounded_cycle_permutation(n, 4, rng)).collect();
        if let Ok(g) = enumerate_group(&space, gens, max_order) {
            return g;
        }
    }
}

/// A measure that is invariant under `group`: constant on each orbit, with
/// some orbits null.
pub fn invariant_measure(group: &PermutationGroup, rng: &mut impl Rng) -> Measure {
    let mut masses = Vec::new();
    for orbit in group.orbits().orbits() {
        if rng.gen_ratio(3, 4) {
            let m = positive_rational(rng);
            masses.extend(orbit.iter().map(|&x| (x, m.clone())));
        }
    }
    Measure::from_masses(group.space(), masses)
}

/// Random pieces `c_γ` on a random subset of the group, returned with
/// `(Σ c_γ, Σ γ c_γ)`.
pub fn equidecomposable_pair(group: &PermutationGroup, rng: &mut impl Rng) -> (BTreeMap<usize, Measure>, Measure, Measure) {
    let space = group.space();
    let mut pieces = BTreeMap::new();
    let mut mu = Measure::zero(space);
    let mut nu = Measure::zero(space);
    for gamma in 0..group.order() {
        if rng.gen_bool(0.5) {
            let c = measure(space, rng);
            mu = mu.add(&c).expect("same space");
            nu = nu.add(&group.act_measure(gamma, &c).expect("same space")).expect("same space");
            pieces.insert(gamma, c);
        }
    }
    (pieces, mu, nu)
}
