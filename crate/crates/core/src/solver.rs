//! Shift-coupling solvers for finite measures and sets.
//!
//! [`tarski_iterate`] peels off `a_n ∧ γ_n b_n` along a round-robin schedule
//! of the group enumeration. [`transport_oracle`] builds a coupling
//! directly, orbit by orbit, and serves as the independent check.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::decomposition::Equidecomposition;
use crate::gca::GcaError;
use crate::group::PermutationGroup;
use crate::instances::{malg_quotient, same_space, FiniteSet, Measure};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("inputs live on different spaces")]
    SpaceMismatch,
    #[error("measures are not equivalent: they differ on orbit {:?}", .0.orbit)]
    NotEquivalent(Box<OrbitWitness>),
    #[error("base measure is moved by generator {generator}")]
    BaseNotInvariant { generator: usize },
    #[error("all positive orbits have matching counts; no witness exists")]
    NoWitness,
}

impl From<GcaError> for SolverError {
    fn from(_: GcaError) -> Self {
        SolverError::SpaceMismatch
    }
}

/// An orbit on which two measures disagree, with both evaluations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitWitness {
    pub orbit: Vec<usize>,
    pub mu_mass: Rational,
    pub nu_mass: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub witness: Option<OrbitWitness>,
}

fn check_spaces(group: &PermutationGroup, mu: &Measure, nu: &Measure) -> Result<(), SolverError> {
    if same_space(group.space(), mu.space()) && same_space(group.space(), nu.space()) {
        Ok(())
    } else {
        Err(SolverError::SpaceMismatch)
    }
}

/// Decides whether `mu` and `nu` agree on every invariant set. Invariant
/// sets are unions of orbits, so comparing orbit totals suffices; the
/// witness is the first disagreeing orbit.
pub fn check_equivalence(mu: &Measure, nu: &Measure, group: &PermutationGroup) -> Result<EquivalenceVerdict, SolverError> {
    check_spaces(group, mu, nu)?;
    let witness = group.orbits().orbits().iter().find_map(|orbit| {
        let (m, n) = (mu.eval(orbit), nu.eval(orbit));
        (m != n).then(|| OrbitWitness { orbit: orbit.clone(), mu_mass: m, nu_mass: n })
    });
    Ok(EquivalenceVerdict { equivalent: witness.is_none(), witness })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TarskiConfig {
    pub max_passes: usize,
    /// A pass removing at most this much mass (with residual left) stops
    /// the iteration.
    pub epsilon: Rational,
}

impl Default for TarskiConfig {
    fn default() -> Self {
        TarskiConfig { max_passes: 100, epsilon: Rational::zero() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationStep {
    pub n: usize,
    pub element: usize,
    /// `r_n = a_n ∧ γ_n b_n`.
    pub removed: Measure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub steps: Vec<IterationStep>,
    pub residual_a: Measure,
    pub residual_b: Measure,
    pub passes: usize,
    pub converged: bool,
}

/// Runs the peeling recursion
///
/// ```text
/// r_n     = a_n ∧ γ_n b_n
/// a_{n+1} = a_n − r_n
/// b_{n+1} = b_n − γ_n⁻¹ r_n
/// ```
///
/// with `γ_n` cycling through the group enumeration. Each `r_n` is added to
/// the piece of `δ = γ_n⁻¹`, so the result always satisfies
/// `left = mu − residual_a` and `right = nu − residual_b`.
pub fn tarski_iterate(
    mu: &Measure,
    nu: &Measure,
    group: &PermutationGroup,
    config: &TarskiConfig,
) -> Result<(Equidecomposition<Measure>, IterationTrace), SolverError> {
    check_spaces(group, mu, nu)?;
    assert!(config.max_passes >= 1, "max_passes must be positive");

    let mut a = mu.clone();
    let mut b = nu.clone();
    let mut pieces: BTreeMap<usize, Measure> = BTreeMap::new();
    let mut steps = Vec::new();
    let mut passes = 0;
    let mut converged = a.is_zero() && b.is_zero();

    while !converged && passes < config.max_passes {
        passes += 1;
        let mut removed_this_pass = Rational::zero();
        for gamma in 0..group.order() {
            let r = a.meet(&group.act_measure(gamma, &b)?);
            if !r.is_zero() {
                let delta = group.inverse_of(gamma);
                a = a.checked_sub(&r)?;
                b = b.checked_sub(&group.act_measure(delta, &r)?)?;
                removed_this_pass = &removed_this_pass + &r.total();
                let slot = pieces.entry(delta).or_insert_with(|| Measure::zero(mu.space()));
                *slot = slot.add(&r)?;
            }
            steps.push(IterationStep { n: steps.len(), element: gamma, removed: r });
            if a.is_zero() && b.is_zero() {
                converged = true;
                break;
            }
        }
        if !converged && removed_this_pass <= config.epsilon {
            break;
        }
    }

    let decomposition = Equidecomposition::assemble(group, &Measure::zero(mu.space()), pieces)?;
    let trace = IterationTrace { steps, residual_a: a, residual_b: b, passes, converged };
    Ok((decomposition, trace))
}

/// Builds a coupling directly. Within each orbit, the northwest-corner rule
/// matches source mass to target mass over points in canonical order; mass
/// moved from `x` to `y` goes to the least-index element sending `x` to `y`.
pub fn transport_oracle(mu: &Measure, nu: &Measure, group: &PermutationGroup) -> Result<Equidecomposition<Measure>, SolverError> {
    let verdict = check_equivalence(mu, nu, group)?;
    if let Some(witness) = verdict.witness {
        return Err(SolverError::NotEquivalent(Box::new(witness)));
    }
    let mut pieces: BTreeMap<usize, Measure> = BTreeMap::new();
    for orbit in group.orbits().orbits() {
        let supply: Vec<(usize, Rational)> =
            orbit.iter().map(|&x| (x, mu.mass(x))).filter(|(_, m)| m.is_positive()).collect();
        let demand: Vec<(usize, Rational)> =
            orbit.iter().map(|&y| (y, nu.mass(y))).filter(|(_, m)| m.is_positive()).collect();
        for (x, y, amount) in northwest_corner(supply, demand) {
            let delta = group.least_transporter(x, y).expect("points share an orbit");
            let slot = pieces.entry(delta).or_insert_with(|| Measure::zero(mu.space()));
            *slot = slot.add(&Measure::dirac(mu.space(), x, amount))?;
        }
    }
    Ok(Equidecomposition::assemble(group, &Measure::zero(mu.space()), pieces)?)
}

/// Greedy two-pointer coupling of equal-total supply and demand lists.
fn northwest_corner(supply: Vec<(usize, Rational)>, demand: Vec<(usize, Rational)>) -> Vec<(usize, usize, Rational)> {
    let mut flows = Vec::new();
    let mut supply = supply.into_iter().peekable();
    let mut demand = demand.into_iter().peekable();
    while let (Some((x, s)), Some((y, d))) = (supply.peek_mut(), demand.peek_mut()) {
        let amount = (*s).clone().min((*d).clone());
        flows.push((*x, *y, amount.clone()));
        *s = s.checked_sub(&amount).expect("amount is the minimum");
        *d = d.checked_sub(&amount).expect("amount is the minimum");
        if s.is_zero() {
            supply.next();
        }
        if d.is_zero() {
            demand.next();
        }
    }
    flows
}

/// Result of [`set_equidecompose`].
#[derive(Debug, Clone, PartialEq)]
pub enum SetOutcome {
    Decomposed(Equidecomposition<FiniteSet>),
    /// An invariant measure `≪ base` separating the two sets.
    Witness(Measure),
}

fn check_set_inputs(a: &FiniteSet, b: &FiniteSet, group: &PermutationGroup, base: &Measure) -> Result<(), SolverError> {
    let space = group.space();
    if same_space(space, a.space()) && same_space(space, b.space()) && same_space(space, base.space()) {
        Ok(())
    } else {
        Err(SolverError::SpaceMismatch)
    }
}

/// Per positive-mass orbit, the members of `a` and `b` that survive the
/// quotient by `base`-null sets.
fn positive_orbit_parts(a: &FiniteSet, b: &FiniteSet, group: &PermutationGroup, base: &Measure) -> Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let a = malg_quotient(a, base);
    let b = malg_quotient(b, base);
    group
        .orbits()
        .orbits()
        .iter()
        .filter(|orbit| base.eval(orbit.iter()).is_positive())
        .map(|orbit| {
            let in_a = orbit.iter().copied().filter(|x| a.members().contains(x)).collect();
            let in_b = orbit.iter().copied().filter(|x| b.members().contains(x)).collect();
            (orbit.clone(), in_a, in_b)
        })
        .collect()
}

/// Decomposes `a` into `b` in the measure algebra of `base`, or returns an
/// invariant measure on which they differ.
pub fn set_equidecompose(a: &FiniteSet, b: &FiniteSet, group: &PermutationGroup, base: &Measure) -> Result<SetOutcome, SolverError> {
    check_set_inputs(a, b, group, base)?;
    if let Some(generator) = group.first_generator_moving(base) {
        return Err(SolverError::BaseNotInvariant { generator });
    }
    let parts = positive_orbit_parts(a, b, group, base);
    if parts.iter().any(|(_, in_a, in_b)| in_a.len() != in_b.len()) {
        return invariant_measure_witness(a, b, group, base).map(SetOutcome::Witness);
    }
    let mut pieces: BTreeMap<usize, FiniteSet> = BTreeMap::new();
    for (_, in_a, in_b) in &parts {
        for (&x, &y) in in_a.iter().zip(in_b) {
            let delta = group.least_transporter(x, y).expect("points share an orbit");
            let slot = pieces.entry(delta).or_insert_with(|| FiniteSet::empty(a.space()));
            *slot = slot.union(&FiniteSet::from_indices(a.space(), [x]))?;
        }
    }
    Ok(SetOutcome::Decomposed(Equidecomposition::assemble(group, &FiniteSet::empty(a.space()), pieces)?))
}

/// `base` restricted to the first positive orbit whose intersections with
/// `a` and `b` have different sizes.
pub fn invariant_measure_witness(a: &FiniteSet, b: &FiniteSet, group: &PermutationGroup, base: &Measure) -> Result<Measure, SolverError> {
    check_set_inputs(a, b, group, base)?;
    positive_orbit_parts(a, b, group, base)
        .into_iter()
        .find(|(_, in_a, in_b)| in_a.len() != in_b.len())
        .map(|(orbit, _, _)| base.restrict(orbit.iter()))
        .ok_or(SolverError::NoWitness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::verify_decomposition;
    use crate::instances::FiniteSpace;

    fn r(n: u64, d: u64) -> Rational {
        Rational::new(n, d)
    }

    fn swap_fixing_two_three() -> PermutationGroup {
        PermutationGroup::generate(&FiniteSpace::indexed(4), vec![vec![1, 0, 2, 3]]).unwrap()
    }

    #[test]
    fn equivalence_examples() {
        let s = FiniteSpace::indexed(2);
        let g = PermutationGroup::generate(&s, vec![vec![1, 0]]).unwrap();
        let mu = Measure::from_masses(&s, [(0, r(3, 5)), (1, r(2, 5))]);
        let nu = Measure::from_masses(&s, [(0, r(2, 5)), (1, r(3, 5))]);
        assert!(check_equivalence(&mu, &nu, &g).unwrap().equivalent);
        assert!(check_equivalence(&mu, &mu, &g).unwrap().equivalent);

        let g4 = swap_fixing_two_three();
        let s4 = g4.space().clone();
        let verdict = check_equivalence(&Measure::dirac(&s4, 2, r(1, 1)), &Measure::dirac(&s4, 3, r(1, 1)), &g4).unwrap();
        assert!(!verdict.equivalent);
        assert_eq!(
            verdict.witness,
            Some(OrbitWitness { orbit: vec![2], mu_mass: r(1, 1), nu_mass: Rational::zero() })
        );
        assert_eq!(check_equivalence(&mu, &mu, &g4), Err(SolverError::SpaceMismatch));
    }

    #[test]
    fn swap_iteration_by_hand() {
        // Step 0 (id): r = μ ∧ ν = {0:2/5, 1:2/5}, leaving a = {0:1/5}, b = {1:1/5}.
        // Step 1 (swap): swap·b = {0:1/5} = a, so r = {0:1/5} goes to c_swap.
        let s = FiniteSpace::indexed(2);
        let g = PermutationGroup::generate(&s, vec![vec![1, 0]]).unwrap();
        let mu = Measure::from_masses(&s, [(0, r(3, 5)), (1, r(2, 5))]);
        let nu = Measure::from_masses(&s, [(0, r(2, 5)), (1, r(3, 5))]);
        let (d, trace) = tarski_iterate(&mu, &nu, &g, &TarskiConfig::default()).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.passes, 1);
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(d.piece(0), Some(&Measure::from_masses(&s, [(0, r(2, 5)), (1, r(2, 5))])));
        assert_eq!(d.piece(1), Some(&Measure::dirac(&s, 0, r(1, 5))));
        assert!(trace.residual_a.is_zero() && trace.residual_b.is_zero());
        assert!(verify_decomposition(&d, &mu, &nu).passed());
    }

    #[test]
    fn equal_measures_converge_at_first_step() {
        let s = FiniteSpace::indexed(3);
        let g = PermutationGroup::generate(&s, vec![vec![1, 2, 0]]).unwrap();
        let mu = Measure::from_masses(&s, [(0, r(1, 2)), (2, r(1, 7))]);
        let (d, trace) = tarski_iterate(&mu, &mu, &g, &TarskiConfig::default()).unwrap();
        assert!(trace.converged);
        assert_eq!((trace.passes, trace.steps.len()), (1, 1));
        assert_eq!(d.pieces().len(), 1);
        assert_eq!(d.piece(0), Some(&mu));
    }

    #[test]
    fn inequivalent_fixed_points_never_move() {
        let g = swap_fixing_two_three();
        let s = g.space().clone();
        let mu = Measure::dirac(&s, 2, r(1, 1));
        let nu = Measure::dirac(&s, 3, r(1, 1));
        let config = TarskiConfig { max_passes: 5, epsilon: Rational::zero() };
        let (d, trace) = tarski_iterate(&mu, &nu, &g, &config).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.residual_a, mu);
        assert_eq!(trace.residual_b, nu);
        assert!(d.pieces().is_empty());
        // zero progress in the first pass stops the loop
        assert_eq!(trace.passes, 1);
    }

    #[test]
    fn oracle_examples() {
        let s = FiniteSpace::indexed(3);
        let g = PermutationGroup::generate(&s, vec![vec![1, 2, 0]]).unwrap();
        let d0 = Measure::dirac(&s, 0, r(1, 1));
        let d2 = Measure::dirac(&s, 2, r(1, 1));
        let d = transport_oracle(&d0, &d2, &g).unwrap();
        // rot² is element 2 and is the least element sending 0 to 2
        assert_eq!(g.element(2).apply(0), 2);
        assert_eq!(d.pieces(), &BTreeMap::from([(2, d0.clone())]));
        assert!(verify_decomposition(&d, &d0, &d2).passed());

        let same = transport_oracle(&d0, &d0, &g).unwrap();
        assert_eq!(same.pieces(), &BTreeMap::from([(0, d0.clone())]));

        let g4 = swap_fixing_two_three();
        let s4 = g4.space().clone();
        let err = transport_oracle(&Measure::dirac(&s4, 2, r(1, 1)), &Measure::dirac(&s4, 3, r(1, 1)), &g4).unwrap_err();
        assert!(matches!(err, SolverError::NotEquivalent(w) if w.orbit == vec![2]));
    }

    #[test]
    fn northwest_corner_splits_mass() {
        let flows = northwest_corner(vec![(0, r(1, 2)), (1, r(1, 2))], vec![(0, r(1, 3)), (1, r(2, 3))]);
        assert_eq!(flows, vec![(0, 0, r(1, 3)), (0, 1, r(1, 6)), (1, 1, r(1, 2))]);
    }

    #[test]
    fn rotation_set_decomposition() {
        let s = FiniteSpace::indexed(4);
        let g = PermutationGroup::generate(&s, vec![vec![1, 2, 3, 0]]).unwrap();
        let base = Measure::from_masses(&s, (0..4).map(|x| (x, r(1, 4))));
        let a = FiniteSet::from_indices(&s, [0, 1]);
        let b = FiniteSet::from_indices(&s, [1, 2]);
        let SetOutcome::Decomposed(d) = set_equidecompose(&a, &b, &g, &base).unwrap() else {
            panic!("expected a decomposition");
        };
        assert!(verify_decomposition(&d, &a, &b).passed());
        assert_eq!(d.pieces(), &BTreeMap::from([(1, a.clone())]));

        let SetOutcome::Decomposed(same) = set_equidecompose(&a, &a, &g, &base).unwrap() else {
            panic!("expected a decomposition");
        };
        assert_eq!(same.pieces(), &BTreeMap::from([(0, a.clone())]));
    }

    #[test]
    fn set_witness_examples() {
        let g = swap_fixing_two_three();
        let s = g.space().clone();
        let base = Measure::from_masses(&s, (0..4).map(|x| (x, r(1, 4))));
        let a = FiniteSet::from_indices(&s, [2]);
        let b = FiniteSet::from_indices(&s, [3]);
        let expected = Measure::dirac(&s, 2, r(1, 4));
        assert_eq!(set_equidecompose(&a, &b, &g, &base).unwrap(), SetOutcome::Witness(expected.clone()));
        let w = invariant_measure_witness(&a, &b, &g, &base).unwrap();
        assert_eq!(w, expected);
        assert_eq!((w.eval_set(&a), w.eval_set(&b)), (r(1, 4), Rational::zero()));
        assert_eq!(invariant_measure_witness(&a, &a, &g, &base), Err(SolverError::NoWitness));

        let s2 = FiniteSpace::indexed(2);
        let trivial = PermutationGroup::trivial(&s2);
        let uniform = Measure::from_masses(&s2, [(0, r(1, 2)), (1, r(1, 2))]);
        let w = invariant_measure_witness(&FiniteSet::from_indices(&s2, [0]), &FiniteSet::from_indices(&s2, [1]), &trivial, &uniform).unwrap();
        assert_eq!(w, Measure::dirac(&s2, 0, r(1, 2)));
    }

    #[test]
    fn non_invariant_base_is_rejected() {
        let g = swap_fixing_two_three();
        let s = g.space().clone();
        let base = Measure::dirac(&s, 0, r(1, 1));
        let a = FiniteSet::from_indices(&s, [0]);
        assert_eq!(set_equidecompose(&a, &a, &g, &base), Err(SolverError::BaseNotInvariant { generator: 0 }));
    }

    #[test]
    fn null_points_are_ignored() {
        let s = FiniteSpace::indexed(4);
        let g = PermutationGroup::generate(&s, vec![vec![1, 0, 3, 2]]).unwrap();
        let base = Measure::from_masses(&s, [(0, r(1, 2)), (1, r(1, 2))]);
        let a = FiniteSet::from_indices(&s, [0, 2]);
        let b = FiniteSet::from_indices(&s, [1]);
        let SetOutcome::Decomposed(d) = set_equidecompose(&a, &b, &g, &base).unwrap() else {
            panic!("expected a decomposition");
        };
        assert!(verify_decomposition(&d, &malg_quotient(&a, &base).representative(), &b).passed());
    }
}
