//! Checks of the three hypotheses of the equidecomposition theorem for the
//! relation "equal total on every orbit" on measures, plus the action laws
//! the solvers rely on.

use rand::Rng;

use super::sample::{self, case_seed, rng_from_seed, CaseRng};
use super::{AxiomFailure, AxiomReport, CheckCount, Outcome};
use crate::group::PermutationGroup;
use crate::instances::Measure;
use crate::solver::check_equivalence;

/// `mu ~ nu`: equal mass on every orbit.
pub fn related(mu: &Measure, nu: &Measure, group: &PermutationGroup) -> bool {
    check_equivalence(mu, nu, group).map(|v| v.equivalent).unwrap_or(false)
}

fn run(report: &mut AxiomReport, index: u64, name: &str, check: impl Fn(&mut CaseRng) -> Outcome) {
    let mut count = CheckCount::default();
    for case in 0..report.cases as u64 {
        let seed = case_seed(report.seed, 100 + index, case);
        match check(&mut rng_from_seed(seed)) {
            Outcome::Pass => count.passed += 1,
            Outcome::Skip => count.skipped += 1,
            Outcome::Fail(counterexample) => {
                count.failed += 1;
                report.failures.push(AxiomFailure { axiom: name.to_string(), counterexample, case_seed: seed });
            }
        }
    }
    report.checks.insert(name.to_string(), count);
}

/// Samples the three theorem hypotheses and the action laws on `group`.
pub fn check_theorem_conditions(group: &PermutationGroup, seed: u64, n_cases: usize) -> AxiomReport {
    let mut report = AxiomReport::new("measure-action", seed, n_cases);
    let space = group.space();
    let order = group.order();

    run(&mut report, 0, "action_laws", |rng| {
        let m = sample::measure(space, rng);
        let (g, d) = (rng.gen_range(0..order), rng.gen_range(0..order));
        let act = |e: usize, x: &Measure| group.act_measure(e, x).expect("same space");
        let nested = act(g, &act(d, &m));
        let composed = act(group.compose(g, d), &m);
        if nested != composed {
            return Outcome::Fail(format!("γ(δm) = {nested:?} but (γδ)m = {composed:?} for γ = {g}, δ = {d}"));
        }
        if act(0, &m) != m {
            return Outcome::Fail(format!("identity moves {m:?}"));
        }
        let back = act(group.inverse_of(g), &act(g, &m));
        Outcome::check(back == m, || format!("γ⁻¹(γm) = {back:?} differs from m = {m:?} for γ = {g}"))
    });

    run(&mut report, 1, "condition1_equidecomposable_related", |rng| {
        let (pieces, mu, nu) = sample::equidecomposable_pair(group, rng);
        Outcome::check(related(&mu, &nu, group), || format!("pieces {pieces:?} give unrelated {mu:?}, {nu:?}"))
    });

    run(&mut report, 2, "condition2_cancellation", |rng| {
        let (_, a, b) = sample::equidecomposable_pair(group, rng);
        let (_, c, d) = sample::equidecomposable_pair(group, rng);
        let ac = a.add(&c).expect("same space");
        let bd = b.add(&d).expect("same space");
        if !related(&ac, &bd, group) {
            return Outcome::Fail(format!("a ~ b and c ~ d but a + c ≁ b + d: {ac:?}, {bd:?}"));
        }
        // contrapositive of condition 2: a ~ b, c ≁ d forces a + c ≁ b + d
        let c2 = sample::measure(space, rng);
        let d2 = sample::measure(space, rng);
        if related(&c2, &d2, group) {
            return Outcome::Pass;
        }
        let ac2 = a.add(&c2).expect("same space");
        let bd2 = b.add(&d2).expect("same space");
        Outcome::check(!related(&ac2, &bd2, group), || format!("a ~ b and a + c ~ b + d but c ≁ d: c = {c2:?}, d = {d2:?}"))
    });

    run(&mut report, 3, "condition3_orthogonal_residual", |rng| {
        let (_, a, b) = sample::equidecomposable_pair(group, rng);
        if a.is_zero() {
            return Outcome::check(b.is_zero(), || format!("0 ~ {b:?} with b nonzero"));
        }
        let touches = (0..order).any(|g| !a.meet(&group.act_measure(g, &b).expect("same space")).is_zero());
        Outcome::check(touches, || format!("a = {a:?} ~ b = {b:?} nonzero yet a ⊥ γb for every γ"))
    });

    report
}
