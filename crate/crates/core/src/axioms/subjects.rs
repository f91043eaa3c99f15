//! Instances under test: sampling, shrinking, and the constructive
//! refinement and remainder operations.

use rand::Rng;

use super::sample::{self, CaseRng};
use super::AxiomError;
use crate::gca::Gca;
use crate::instances::{
    DisjointSetGca, ExtNat, ExtNatGca, FiniteSet, MalgClass, MalgGca, Measure, MeasureGca, PowerSetCa, RationalGca,
};
use crate::rational::Rational;

/// A GCA the axiom suite knows how to exercise.
pub trait AxiomSubject: Gca {
    fn sample(&self, rng: &mut CaseRng) -> Self::Elem;

    /// `k` elements any sub-collection of which has a defined sum.
    fn sample_family(&self, k: usize, rng: &mut CaseRng) -> Vec<Self::Elem> {
        (0..k).map(|_| self.sample(rng)).collect()
    }

    /// Strictly simpler candidates, for counterexample minimization.
    fn shrink(&self, e: &Self::Elem) -> Vec<Self::Elem>;

    /// Given `a + b = Σ c_n`, families `(a_n), (b_n)` with `a = Σ a_n`,
    /// `b = Σ b_n` and `c_n = a_n + b_n`. The precondition is checked by
    /// [`refine`].
    fn refine_unchecked(&self, a: &Self::Elem, b: &Self::Elem, cs: &[Self::Elem]) -> (Vec<Self::Elem>, Vec<Self::Elem>);
}

/// Constructive refinement: splits each `c_n` into an `a`-part and a
/// `b`-part.
pub fn refine<G: AxiomSubject + ?Sized>(
    gca: &G,
    a: &G::Elem,
    b: &G::Elem,
    cs: &[G::Elem],
) -> Result<(Vec<G::Elem>, Vec<G::Elem>), AxiomError> {
    let lhs = gca.add(a, b).map_err(|_| AxiomError::PreconditionFailed)?;
    let rhs = gca.sum(cs).map_err(|_| AxiomError::PreconditionFailed)?;
    if lhs != rhs {
        return Err(AxiomError::PreconditionFailed);
    }
    Ok(gca.refine_unchecked(a, b, cs))
}

/// Limit of an eventually constant chain `a_n = b_n + a_{n+1}` whose
/// `b_n` vanish from `horizon` on. Returns `c = a_horizon` after checking
/// `a_n = c + Σ_{i≥n} b_i` for every `n <= horizon`.
pub fn remainder<G: Gca + ?Sized>(gca: &G, a_chain: &[G::Elem], b_chain: &[G::Elem], horizon: usize) -> Result<G::Elem, AxiomError> {
    if a_chain.len() <= horizon || b_chain.len() <= horizon {
        return Err(AxiomError::NotEventuallyConstant);
    }
    for n in 0..horizon {
        if gca.add(&b_chain[n], &a_chain[n + 1]).ok().as_ref() != Some(&a_chain[n]) {
            return Err(AxiomError::ChainBroken { link: n });
        }
    }
    let c = a_chain[horizon].clone();
    if b_chain[horizon..].iter().any(|b| !gca.is_zero(b)) || a_chain[horizon..].iter().any(|a| *a != c) {
        return Err(AxiomError::NotEventuallyConstant);
    }
    for n in 0..=horizon {
        let tail = gca.sum(&b_chain[n..horizon]);
        let rebuilt = tail.and_then(|t| gca.add(&c, &t));
        if rebuilt.ok().as_ref() != Some(&a_chain[n]) {
            return Err(AxiomError::ChainBroken { link: n });
        }
    }
    Ok(c)
}

/// Proportional split of one coordinate: `c·a/(a+b)`, or zero when
/// `a + b = 0`.
pub(crate) fn proportional_part(c: &Rational, a: &Rational, b: &Rational) -> Rational {
    match a.checked_div(&(a + b)) {
        Some(ratio) => c * &ratio,
        None => Rational::zero(),
    }
}

impl AxiomSubject for RationalGca {
    fn sample(&self, rng: &mut CaseRng) -> Rational {
        sample::rational(rng)
    }

    fn shrink(&self, e: &Rational) -> Vec<Rational> {
        if e.is_zero() {
            return Vec::new();
        }
        vec![Rational::zero(), e * &Rational::new(1, 2)]
    }

    fn refine_unchecked(&self, a: &Rational, b: &Rational, cs: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        cs.iter()
            .map(|c| {
                let an = proportional_part(c, a, b);
                let bn = c.checked_sub(&an).expect("part below whole");
                (an, bn)
            })
            .unzip()
    }
}

impl AxiomSubject for ExtNatGca {
    fn sample(&self, rng: &mut CaseRng) -> ExtNat {
        if rng.gen_ratio(1, 8) {
            ExtNat::Inf
        } else {
            ExtNat::Fin(rng.gen_range(0..=20))
        }
    }

    fn shrink(&self, e: &ExtNat) -> Vec<ExtNat> {
        match e {
            ExtNat::Fin(0) => Vec::new(),
            ExtNat::Fin(n) => vec![ExtNat::Fin(0), ExtNat::Fin(n / 2)],
            ExtNat::Inf => vec![ExtNat::Fin(0)],
        }
    }

    /// Finite `c_n` are filled greedily from `a`, then `b`. The first
    /// infinite `c_n` takes whatever remains of both; later infinite ones
    /// take `∞` from whichever side is infinite.
    fn refine_unchecked(&self, a: &ExtNat, b: &ExtNat, cs: &[ExtNat]) -> (Vec<ExtNat>, Vec<ExtNat>) {
        fn take(rem: &mut ExtNat, want: u64) -> u64 {
            match rem {
                ExtNat::Inf => want,
                ExtNat::Fin(r) => {
                    let got = want.min(*r);
                    *r -= got;
                    got
                }
            }
        }
        let mut rem_a = *a;
        let mut rem_b = *b;
        let mut a_parts = vec![ExtNat::Fin(0); cs.len()];
        let mut b_parts = vec![ExtNat::Fin(0); cs.len()];
        for (n, c) in cs.iter().enumerate() {
            if let ExtNat::Fin(want) = *c {
                let from_a = take(&mut rem_a, want);
                let from_b = take(&mut rem_b, want - from_a);
                a_parts[n] = ExtNat::Fin(from_a);
                b_parts[n] = ExtNat::Fin(from_b);
            }
        }
        let mut first_infinite = true;
        for (n, c) in cs.iter().enumerate() {
            if *c != ExtNat::Inf {
                continue;
            }
            if first_infinite {
                a_parts[n] = rem_a;
                b_parts[n] = rem_b;
                first_infinite = false;
            } else if *a == ExtNat::Inf {
                a_parts[n] = ExtNat::Inf;
            } else {
                b_parts[n] = ExtNat::Inf;
            }
        }
        (a_parts, b_parts)
    }
}

impl AxiomSubject for MeasureGca {
    fn sample(&self, rng: &mut CaseRng) -> Measure {
        sample::measure(&self.space, rng)
    }

    fn shrink(&self, e: &Measure) -> Vec<Measure> {
        let mut out = Vec::new();
        for (x, _) in e.masses() {
            out.push(Measure::from_masses(&self.space, e.masses().filter(|(y, _)| *y != x).map(|(y, m)| (y, m.clone()))));
        }
        for (x, _) in e.masses() {
            out.push(Measure::from_masses(
                &self.space,
                e.masses().map(|(y, m)| (y, if y == x { m * &Rational::new(1, 2) } else { m.clone() })),
            ));
        }
        out
    }

    fn refine_unchecked(&self, a: &Measure, b: &Measure, cs: &[Measure]) -> (Vec<Measure>, Vec<Measure>) {
        cs.iter()
            .map(|c| {
                let an = Measure::from_masses(&self.space, c.masses().map(|(x, m)| (x, proportional_part(m, &a.mass(x), &b.mass(x)))));
                let bn = c.checked_sub(&an).expect("part below whole");
                (an, bn)
            })
            .unzip()
    }
}

fn shrink_set(s: &FiniteSet) -> Vec<FiniteSet> {
    s.members()
        .iter()
        .map(|&x| FiniteSet::from_indices(s.space(), s.members().iter().copied().filter(|&y| y != x)))
        .collect()
}

fn refine_sets(a: &FiniteSet, b: &FiniteSet, cs: &[FiniteSet]) -> (Vec<FiniteSet>, Vec<FiniteSet>) {
    cs.iter()
        .map(|c| (a.intersection(c).expect("same space"), b.intersection(c).expect("same space")))
        .unzip()
}

impl AxiomSubject for PowerSetCa {
    fn sample(&self, rng: &mut CaseRng) -> FiniteSet {
        sample::subset(&self.space, rng)
    }

    fn shrink(&self, e: &FiniteSet) -> Vec<FiniteSet> {
        shrink_set(e)
    }

    fn refine_unchecked(&self, a: &FiniteSet, b: &FiniteSet, cs: &[FiniteSet]) -> (Vec<FiniteSet>, Vec<FiniteSet>) {
        refine_sets(a, b, cs)
    }
}

impl AxiomSubject for DisjointSetGca {
    fn sample(&self, rng: &mut CaseRng) -> FiniteSet {
        sample::subset(&self.space, rng)
    }

    fn sample_family(&self, k: usize, rng: &mut CaseRng) -> Vec<FiniteSet> {
        sample::disjoint_subsets(&self.space, k, rng)
    }

    fn shrink(&self, e: &FiniteSet) -> Vec<FiniteSet> {
        shrink_set(e)
    }

    fn refine_unchecked(&self, a: &FiniteSet, b: &FiniteSet, cs: &[FiniteSet]) -> (Vec<FiniteSet>, Vec<FiniteSet>) {
        refine_sets(a, b, cs)
    }
}

impl AxiomSubject for MalgGca {
    fn sample(&self, rng: &mut CaseRng) -> MalgClass {
        self.class_of(&sample::subset(self.base.space(), rng))
    }

    fn sample_family(&self, k: usize, rng: &mut CaseRng) -> Vec<MalgClass> {
        sample::disjoint_subsets(self.base.space(), k, rng).iter().map(|s| self.class_of(s)).collect()
    }

    fn shrink(&self, e: &MalgClass) -> Vec<MalgClass> {
        shrink_set(&e.representative()).iter().map(|s| self.class_of(s)).collect()
    }

    fn refine_unchecked(&self, a: &MalgClass, b: &MalgClass, cs: &[MalgClass]) -> (Vec<MalgClass>, Vec<MalgClass>) {
        let part = |x: &MalgClass, c: &MalgClass| self.meet(x, c);
        (cs.iter().map(|c| part(a, c)).collect(), cs.iter().map(|c| part(b, c)).collect())
    }
}
