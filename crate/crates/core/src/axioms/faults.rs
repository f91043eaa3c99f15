//! Deliberately broken instances. Each mutation must be caught by the
//! suite at the default seed; if one slips through, the suite has lost
//! its teeth.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::sample::{self, CaseRng};
use super::subjects::proportional_part;
use super::{check_theorem_conditions, run_suite_for, AxiomReport, AxiomSubject};
use crate::gca::{Gca, GcaError};
use crate::group::PermutationGroup;
use crate::instances::{DisjointSetGca, FiniteSet, FiniteSpace};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Measure addition keeps only the left operand's mass at point 0.
    DropMassInAdd,
    /// Measure addition writes explicit zero entries.
    SkipNormalization,
    /// The group's inverse table is rotated by one.
    WrongInverseTable,
    /// Set addition accepts overlapping operands (union).
    NonDisjointSetAdd,
    /// Proportional refinement divides by `a + b + 1`.
    WrongRefineDenominator,
}

pub const ALL_FAULTS: [Fault; 5] = [
    Fault::DropMassInAdd,
    Fault::SkipNormalization,
    Fault::WrongInverseTable,
    Fault::NonDisjointSetAdd,
    Fault::WrongRefineDenominator,
];

/// A measure stored as a raw map; equality is structural, zero entries
/// included.
#[derive(Clone, PartialEq, Eq)]
pub struct RawMeasure(BTreeMap<usize, Rational>);

impl fmt::Debug for RawMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl RawMeasure {
    fn mass(&self, x: usize) -> Rational {
        self.0.get(&x).cloned().unwrap_or_default()
    }

    fn normalized(map: BTreeMap<usize, Rational>) -> Self {
        RawMeasure(map.into_iter().filter(|(_, m)| m.is_positive()).collect())
    }
}

/// Measures on `0..points` with one injected fault.
#[derive(Debug, Clone)]
struct FaultyMeasureGca {
    points: usize,
    fault: Option<Fault>,
}

impl Gca for FaultyMeasureGca {
    type Elem = RawMeasure;

    fn name(&self) -> &str {
        "faulty-measure"
    }

    fn zero(&self) -> RawMeasure {
        RawMeasure(BTreeMap::new())
    }

    fn add(&self, a: &RawMeasure, b: &RawMeasure) -> Result<RawMeasure, GcaError> {
        let mut out = a.0.clone();
        for (x, m) in &b.0 {
            let slot = out.entry(*x).or_default();
            if self.fault == Some(Fault::DropMassInAdd) && *x == 0 && slot.is_positive() {
                continue;
            }
            *slot = &*slot + m;
        }
        if self.fault == Some(Fault::SkipNormalization) {
            for x in 0..self.points {
                out.entry(x).or_default();
            }
            return Ok(RawMeasure(out));
        }
        Ok(RawMeasure::normalized(out))
    }

    fn le(&self, a: &RawMeasure, b: &RawMeasure) -> bool {
        a.0.iter().all(|(x, m)| *m <= b.mass(*x))
    }

    fn meet(&self, a: &RawMeasure, b: &RawMeasure) -> RawMeasure {
        RawMeasure::normalized(a.0.iter().map(|(x, m)| (*x, m.min(&b.mass(*x)).clone())).collect())
    }

    fn subtract(&self, a: &RawMeasure, b: &RawMeasure) -> Result<RawMeasure, GcaError> {
        let mut out = a.0.clone();
        for (x, m) in &b.0 {
            let diff = a.mass(*x).checked_sub(m).ok_or(GcaError::NotComparable)?;
            out.insert(*x, diff);
        }
        Ok(RawMeasure::normalized(out))
    }
}

impl AxiomSubject for FaultyMeasureGca {
    fn sample(&self, rng: &mut CaseRng) -> RawMeasure {
        RawMeasure(
            (0..self.points)
                .filter_map(|x| rng.gen_bool(0.5).then(|| (x, sample::positive_rational(rng))))
                .collect(),
        )
    }

    fn shrink(&self, e: &RawMeasure) -> Vec<RawMeasure> {
        e.0.keys()
            .map(|x| RawMeasure(e.0.iter().filter(|(y, _)| *y != x).map(|(y, m)| (*y, m.clone())).collect()))
            .collect()
    }

    fn refine_unchecked(&self, a: &RawMeasure, b: &RawMeasure, cs: &[RawMeasure]) -> (Vec<RawMeasure>, Vec<RawMeasure>) {
        cs.iter()
            .map(|c| {
                let an: BTreeMap<usize, Rational> = c
                    .0
                    .iter()
                    .map(|(x, m)| {
                        let (ax, bx) = (a.mass(*x), b.mass(*x));
                        let part = if self.fault == Some(Fault::WrongRefineDenominator) {
                            proportional_part(m, &ax, &(&bx + &Rational::one()))
                        } else {
                            proportional_part(m, &ax, &bx)
                        };
                        (*x, part)
                    })
                    .collect();
                let bn = c.0.iter().map(|(x, m)| (*x, m.checked_sub(&an[x]).unwrap_or_default())).collect();
                (RawMeasure::normalized(an), RawMeasure::normalized(bn))
            })
            .unzip()
    }
}

/// Sets that accept overlapping sums while still claiming cancellation.
#[derive(Debug, Clone)]
struct UnionAsDisjoint(DisjointSetGca);

impl Gca for UnionAsDisjoint {
    type Elem = FiniteSet;

    fn name(&self) -> &str {
        "faulty-sets"
    }

    fn zero(&self) -> FiniteSet {
        self.0.zero()
    }

    fn add(&self, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, GcaError> {
        a.union(b)
    }

    fn le(&self, a: &FiniteSet, b: &FiniteSet) -> bool {
        self.0.le(a, b)
    }

    fn meet(&self, a: &FiniteSet, b: &FiniteSet) -> FiniteSet {
        self.0.meet(a, b)
    }

    fn subtract(&self, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, GcaError> {
        self.0.subtract(a, b)
    }
}

impl AxiomSubject for UnionAsDisjoint {
    fn sample(&self, rng: &mut CaseRng) -> FiniteSet {
        self.0.sample(rng)
    }

    fn sample_family(&self, k: usize, rng: &mut CaseRng) -> Vec<FiniteSet> {
        self.0.sample_family(k, rng)
    }

    fn shrink(&self, e: &FiniteSet) -> Vec<FiniteSet> {
        self.0.shrink(e)
    }

    fn refine_unchecked(&self, a: &FiniteSet, b: &FiniteSet, cs: &[FiniteSet]) -> (Vec<FiniteSet>, Vec<FiniteSet>) {
        self.0.refine_unchecked(a, b, cs)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FaultOutcome {
    pub fault: Fault,
    pub detected: bool,
    pub failed_checks: Vec<String>,
    #[serde(skip)]
    pub report: AxiomReport,
}

/// Runs the suite against one mutation.
pub fn run_fault(fault: Fault, seed: u64, n_cases: usize) -> FaultOutcome {
    let report = match fault {
        Fault::DropMassInAdd | Fault::SkipNormalization | Fault::WrongRefineDenominator => {
            run_suite_for(&FaultyMeasureGca { points: 5, fault: Some(fault) }, seed, n_cases)
        }
        Fault::NonDisjointSetAdd => run_suite_for(&UnionAsDisjoint(DisjointSetGca::new(&FiniteSpace::indexed(6))), seed, n_cases),
        Fault::WrongInverseTable => {
            let group = PermutationGroup::generate(&FiniteSpace::indexed(4), vec![vec![1, 2, 3, 0]]).expect("rotation");
            let mut inverse = group.inverse_table().to_vec();
            inverse.rotate_left(1);
            check_theorem_conditions(&group.with_inverse_table(inverse), seed, n_cases)
        }
    };
    FaultOutcome {
        fault,
        detected: !report.passed(),
        failed_checks: report.failed_checks().into_iter().map(String::from).collect(),
        report,
    }
}

pub fn run_fault_injection(seed: u64, n_cases: usize) -> Vec<FaultOutcome> {
    ALL_FAULTS.iter().map(|&f| run_fault(f, seed, n_cases)).collect()
}
