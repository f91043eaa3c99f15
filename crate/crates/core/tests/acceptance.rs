//! Acceptance run. Prints one PASS/FAIL line per criterion and fails the
//! test if any criterion fails.
//!
//! Every instance is drawn from `case_seed(SEED, criterion, i)`, so the
//! whole run is reproducible; criterion 7 repeats criteria 1 to 6 and
//! compares the produced documents byte for byte.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use shiftcouple::axioms::faults::run_fault_injection;
use shiftcouple::axioms::sample::{self, case_seed, rng_from_seed, CaseRng};
use shiftcouple::axioms::{run_axiom_suite, INSTANCE_NAMES};
use shiftcouple::cli::{self, EXIT_SUCCESS};
use shiftcouple::format::{MeasurePair, Payload, Problem, ProblemOptions};
use shiftcouple::instances::{malg_quotient, FiniteSet, FiniteSpace, Measure};
use shiftcouple::solver::{check_equivalence, set_equidecompose, tarski_iterate, transport_oracle, SetOutcome, TarskiConfig};
use shiftcouple::{verify_decomposition, PermutationGroup, Rational};

const SEED: u64 = 42;

struct Verdict {
    passed: bool,
    detail: String,
    /// Everything the criterion produced, for the determinism check.
    document: String,
}

impl Verdict {
    fn new(failures: Vec<String>, summary: String, document: String) -> Self {
        let passed = failures.is_empty();
        let detail = match failures.first() {
            None => summary,
            Some(first) => format!("{summary}; {} failure(s), first: {first}", failures.len()),
        };
        Verdict { passed, detail, document }
    }
}

fn instance_rng(criterion: u64, i: u64) -> CaseRng {
    rng_from_seed(case_seed(SEED, criterion, i))
}

fn measure_problem(group: &PermutationGroup, mu: Measure, nu: Measure) -> Problem {
    Problem {
        space: group.space().clone(),
        group: group.clone(),
        payload: Payload::Measures(MeasurePair { mu, nu }),
        options: ProblemOptions::default(),
    }
}

fn within(elapsed: Duration, budget: u64, failures: &mut Vec<String>) {
    if elapsed > Duration::from_secs(budget) {
        failures.push(format!("took {elapsed:.1?}, budget {budget} s"));
    }
}

fn criterion1() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut document = String::new();
    for name in INSTANCE_NAMES {
        let report = run_axiom_suite(name, SEED, 1000).expect("registered instance");
        if !report.passed() {
            failures.push(format!("{name}: {:?}", report.failed_checks()));
        }
        document += &serde_json::to_string(&report).unwrap();
    }
    within(start.elapsed(), 30, &mut failures);
    let suite_time = start.elapsed();
    let faults = run_fault_injection(SEED, 1000);
    for outcome in &faults {
        if !outcome.detected {
            failures.push(format!("fault {:?} not detected", outcome.fault));
        }
    }
    document += &serde_json::to_string(&faults).unwrap();
    let detected = faults.iter().filter(|f| f.detected).count();
    let summary = format!("6 instances x 1000 cases in {suite_time:.1?}, {detected}/5 faults detected");
    Verdict::new(failures, summary, document)
}

fn criterion2() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut document = String::new();
    let mut max_passes = 0;
    for i in 0..500 {
        let mut rng = instance_rng(2, i);
        let group = sample::group(20, 24, &mut rng);
        let (_, mu, nu) = sample::equidecomposable_pair(&group, &mut rng);
        if !check_equivalence(&mu, &nu, &group).unwrap().equivalent {
            failures.push(format!("instance {i}: constructed pair rejected"));
            continue;
        }
        let (d, trace) = tarski_iterate(&mu, &nu, &group, &TarskiConfig::default()).unwrap();
        max_passes = max_passes.max(trace.passes);
        if !trace.converged || !trace.residual_a.is_zero() || !trace.residual_b.is_zero() {
            failures.push(format!("instance {i}: not converged after {} passes", trace.passes));
        }
        if !verify_decomposition(&d, &mu, &nu).passed() {
            failures.push(format!("instance {i}: decomposition does not verify"));
        }
        let out = cli::cmd_couple(&measure_problem(&group, mu, nu), &TarskiConfig::default()).unwrap();
        document += &out.render();
    }
    within(start.elapsed(), 60, &mut failures);
    let summary = format!("500 instances, max {max_passes} pass(es), {:.1?}", start.elapsed());
    Verdict::new(failures, summary, document)
}

fn criterion3() -> Verdict {
    let mut failures = Vec::new();
    let mut document = String::new();
    for i in 0..500 {
        // same draws as criterion 2
        let mut rng = instance_rng(2, i);
        let group = sample::group(20, 24, &mut rng);
        let (_, mu, nu) = sample::equidecomposable_pair(&group, &mut rng);
        match transport_oracle(&mu, &nu, &group) {
            Ok(d) if verify_decomposition(&d, &mu, &nu).passed() => {}
            Ok(_) => failures.push(format!("equivalent instance {i}: oracle output does not verify")),
            Err(e) => failures.push(format!("equivalent instance {i}: oracle failed: {e}")),
        }
        document += &cli::cmd_oracle(&measure_problem(&group, mu, nu)).unwrap().render();
    }
    for i in 0..200 {
        let mut rng = instance_rng(3, i);
        let group = sample::group(20, 24, &mut rng);
        let (mu, nu) = loop {
            let (mu, nu) = (sample::measure(group.space(), &mut rng), sample::measure(group.space(), &mut rng));
            if !check_equivalence(&mu, &nu, &group).unwrap().equivalent {
                break (mu, nu);
            }
        };
        let Some(w) = check_equivalence(&mu, &nu, &group).unwrap().witness else {
            failures.push(format!("non-equivalent instance {i}: no witness"));
            continue;
        };
        let (_, trace) = tarski_iterate(&mu, &nu, &group, &TarskiConfig::default()).unwrap();
        let gap = w.mu_mass.abs_diff(&w.nu_mass);
        let residual = &trace.residual_a.eval(&w.orbit) + &trace.residual_b.eval(&w.orbit);
        if residual < gap {
            failures.push(format!("non-equivalent instance {i}: residual {residual} below gap {gap}"));
        }
        document += &cli::cmd_check(&measure_problem(&group, mu, nu)).unwrap().render();
    }
    Verdict::new(failures, "500 oracle decompositions verified, 200 witnesses bound the residual".into(), document)
}

fn criterion4() -> Verdict {
    let mut failures = Vec::new();
    let mut document = String::new();
    let (mut agreeing, mut subsets) = (0, 0u64);
    for i in 0..500 {
        let mut rng = instance_rng(4, i);
        let group = sample::group(12, 24, &mut rng);
        let (mu, nu) = match i % 3 {
            0 => {
                let (_, mu, nu) = sample::equidecomposable_pair(&group, &mut rng);
                (mu, nu)
            }
            // equivalent except for one extra point mass
            1 => {
                let (_, mu, nu) = sample::equidecomposable_pair(&group, &mut rng);
                let x = rng.gen_range(0..group.space().len());
                let extra = Measure::dirac(group.space(), x, sample::positive_rational(&mut rng));
                (mu.add(&extra).unwrap(), nu)
            }
            _ => (sample::measure(group.space(), &mut rng), sample::measure(group.space(), &mut rng)),
        };
        let orbits = group.orbits();
        let k = orbits.len();
        let all_agree = (0u64..1 << k).all(|mask| {
            let points: Vec<usize> = (0..k).filter(|j| mask >> j & 1 == 1).flat_map(|j| orbits.orbits()[j].clone()).collect();
            let s = FiniteSet::from_indices(group.space(), points);
            if !group.is_invariant_set(&s) {
                return false;
            }
            mu.eval_set(&s) == nu.eval_set(&s)
        });
        subsets += 1 << k;
        let verdict = check_equivalence(&mu, &nu, &group).unwrap().equivalent;
        agreeing += usize::from(verdict);
        if verdict != all_agree {
            failures.push(format!("instance {i}: per-orbit says {verdict}, exhaustive says {all_agree}"));
        }
        document += &format!("{i}:{verdict}\n");
    }
    let summary = format!("500 instances ({agreeing} equivalent), {subsets} invariant sets enumerated");
    Verdict::new(failures, summary, document)
}

fn transitive_group(n: usize, rng: &mut CaseRng) -> PermutationGroup {
    let space = FiniteSpace::indexed(n);
    let mut gens = vec![(0..n).map(|x| (x + 1) % n).collect::<Vec<usize>>()];
    if rng.gen_bool(0.5) {
        gens.push((0..n).map(|x| (n - x) % n).collect());
    }
    PermutationGroup::generate(&space, gens).unwrap()
}

/// `b` has the same count as `a` on each orbit with probability 3/5,
/// otherwise an arbitrary subset of the orbit.
fn partner_set(a: &FiniteSet, group: &PermutationGroup, rng: &mut CaseRng) -> FiniteSet {
    let mut members = Vec::new();
    for orbit in group.orbits().orbits() {
        let mut shuffled = orbit.clone();
        shuffled.shuffle(rng);
        let k = if rng.gen_bool(0.6) {
            orbit.iter().filter(|&&x| a.contains(x)).count()
        } else {
            rng.gen_range(0..=orbit.len())
        };
        members.extend_from_slice(&shuffled[..k]);
    }
    FiniteSet::from_indices(group.space(), members)
}

fn criterion5() -> Verdict {
    let mut failures = Vec::new();
    let mut document = String::new();
    let (mut decomposed, mut ergodic) = (0, 0);
    for i in 0..300 {
        let mut rng = instance_rng(5, i);
        let single_orbit = i % 3 == 0;
        let group = if single_orbit {
            let n = rng.gen_range(1..=8);
            transitive_group(n, &mut rng)
        } else {
            sample::group(8, 24, &mut rng)
        };
        let space = group.space();
        let base = if single_orbit {
            let m = sample::positive_rational(&mut rng);
            Measure::from_masses(space, (0..space.len()).map(|x| (x, m.clone())))
        } else {
            sample::invariant_measure(&group, &mut rng)
        };
        let a = sample::subset(space, &mut rng);
        let b = partner_set(&a, &group, &mut rng);

        let counts_match = group.orbits().orbits().iter().all(|o| {
            let null = base.eval(o).is_zero();
            null || o.iter().filter(|&&x| a.contains(x)).count() == o.iter().filter(|&&x| b.contains(x)).count()
        });
        let outcome = set_equidecompose(&a, &b, &group, &base).unwrap();
        let success = matches!(outcome, SetOutcome::Decomposed(_));
        if success != counts_match {
            failures.push(format!("instance {i}: decomposed = {success} but counts match = {counts_match}"));
        }
        if single_orbit {
            ergodic += 1;
            let equal_base = base.eval_set(&a) == base.eval_set(&b);
            if success != equal_base {
                failures.push(format!("ergodic instance {i}: decomposed = {success} but base(A) = base(B) is {equal_base}"));
            }
        }
        match &outcome {
            SetOutcome::Decomposed(d) => {
                decomposed += 1;
                let report = verify_decomposition(d, &malg_quotient(&a, &base).representative(), &malg_quotient(&b, &base).representative());
                if !report.passed() || !report.disjoint_ok {
                    failures.push(format!("instance {i}: set decomposition does not verify: {report:?}"));
                }
                document += &format!("{i}: {:?}\n", d.pieces());
            }
            SetOutcome::Witness(w) => {
                let invariant = (0..group.order()).all(|g| group.act_measure(g, w).unwrap() == *w);
                let continuous = w.masses().all(|(x, _)| base.mass(x).is_positive());
                let separates = w.eval_set(&a) != w.eval_set(&b);
                if !(invariant && continuous && separates) {
                    failures.push(format!(
                        "instance {i}: witness {w:?} invariant {invariant}, absolutely continuous {continuous}, separates {separates}"
                    ));
                }
                document += &format!("{i}: witness {w:?}\n");
            }
        }
    }
    let summary = format!("300 instances ({decomposed} decomposed, {} witnesses, {ergodic} single-orbit)", 300 - decomposed);
    Verdict::new(failures, summary, document)
}

fn criterion6() -> Verdict {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut failures = Vec::new();
    let mut document = String::new();
    for (command, problem, expected) in [
        ("couple", "swap", "swap.couple.json"),
        ("oracle", "rotation3", "rotation3.oracle.json"),
        ("check", "fixed_points", "fixed_points.check.json"),
        ("sets", "fixed_points_sets", "fixed_points_sets.sets.json"),
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_shiftcouple"))
            .arg(command)
            .arg(golden.join(format!("{problem}.problem.json")))
            .output()
            .expect("binary runs");
        let want = std::fs::read(golden.join(expected)).expect("golden file");
        if out.stdout != want {
            failures.push(format!("{command} {problem} differs from {expected}"));
        }
        document += &String::from_utf8_lossy(&out.stdout);
    }
    Verdict::new(failures, "4 golden documents".into(), document)
}

fn run_all() -> Vec<Verdict> {
    vec![criterion1(), criterion2(), criterion3(), criterion4(), criterion5(), criterion6()]
}

#[test]
fn acceptance() {
    let first = run_all();
    let second = run_all();
    let mut passed = true;
    for (i, v) in first.iter().enumerate() {
        println!("criterion {}: {} ({})", i + 1, if v.passed { "PASS" } else { "FAIL" }, v.detail);
        passed &= v.passed;
    }
    let differing: Vec<usize> = first.iter().zip(&second).enumerate().filter(|(_, (a, b))| a.document != b.document).map(|(i, _)| i + 1).collect();
    let bytes: usize = first.iter().map(|v| v.document.len()).sum();
    if differing.is_empty() {
        println!("criterion 7: PASS (criteria 1-6 repeated, {bytes} bytes identical)");
    } else {
        println!("criterion 7: FAIL (documents differ for criteria {differing:?})");
        passed = false;
    }
    assert_eq!(EXIT_SUCCESS, 0);
    assert!(passed, "acceptance criteria failed");
}

#[test]
fn witness_orbit_residual_is_exact_on_a_small_case() {
    let s = FiniteSpace::indexed(4);
    let g = PermutationGroup::generate(&s, vec![vec![1, 0, 2, 3]]).unwrap();
    let mu = Measure::from_masses(&s, [(0, Rational::new(1, 2)), (2, Rational::one())]);
    let nu = Measure::from_masses(&s, [(1, Rational::new(1, 2)), (3, Rational::one())]);
    let w = check_equivalence(&mu, &nu, &g).unwrap().witness.unwrap();
    assert_eq!(w.orbit, vec![2]);
    let (_, trace) = tarski_iterate(&mu, &nu, &g, &TarskiConfig::default()).unwrap();
    assert_eq!(trace.residual_a.eval(&w.orbit), Rational::one());
}
