//! Finite measures on a finite space.
//!
//! A measure is a finitely supported map from point indices to positive
//! rationals. Zero masses are never stored, so two measures are equal iff
//! their representations are equal. Measures form a cancellative CA under
//! pointwise addition, with pointwise minimum as the meet.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::sets::FiniteSet;
use super::space::{same_space, FiniteSpace};
use crate::gca::{Gca, GcaError};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct Measure {
    space: Arc<FiniteSpace>,
    mass: BTreeMap<usize, Rational>,
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, m)) in self.mass.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", self.space.label(*x), m)?;
        }
        f.write_str("}")
    }
}

impl Measure {
    pub fn zero(space: &Arc<FiniteSpace>) -> Self {
        Measure { space: Arc::clone(space), mass: BTreeMap::new() }
    }

    /// Builds a measure from `(point index, mass)` pairs. Repeated points
    /// accumulate. Panics if an index is outside the space.
    pub fn from_masses(space: &Arc<FiniteSpace>, masses: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut mass: BTreeMap<usize, Rational> = BTreeMap::new();
        for (x, m) in masses {
            assert!(x < space.len(), "point {x} outside a space of {} points", space.len());
            if m.is_positive() {
                let slot = mass.entry(x).or_default();
                *slot = &*slot + &m;
            }
        }
        Measure { space: Arc::clone(space), mass }
    }

    /// The point mass `weight * δ_x`.
    pub fn dirac(space: &Arc<FiniteSpace>, x: usize, weight: Rational) -> Self {
        Self::from_masses(space, [(x, weight)])
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn mass(&self, x: usize) -> Rational {
        self.mass.get(&x).cloned().unwrap_or_default()
    }

    pub fn masses(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.mass.iter().map(|(x, m)| (*x, m))
    }

    pub fn support(&self) -> FiniteSet {
        FiniteSet::from_indices(&self.space, self.mass.keys().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.mass.values().sum()
    }

    /// `μ(S)` for a set of point indices.
    pub fn eval<'a>(&self, points: impl IntoIterator<Item = &'a usize>) -> Rational {
        points.into_iter().map(|x| self.mass(*x)).sum()
    }

    pub fn eval_set(&self, s: &FiniteSet) -> Rational {
        self.eval(s.members())
    }

    /// The restriction `μ|_S`.
    pub fn restrict<'a>(&self, points: impl IntoIterator<Item = &'a usize>) -> Measure {
        Measure::from_masses(&self.space, points.into_iter().map(|x| (*x, self.mass(*x))))
    }

    fn check_space(&self, other: &Measure) -> Result<(), GcaError> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(GcaError::SpaceMismatch)
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Measure) -> Result<Measure, GcaError> {
        self.check_space(other)?;
        let mut mass = self.mass.clone();
        for (x, m) in &other.mass {
            let slot = mass.entry(*x).or_default();
            *slot = &*slot + m;
        }
        Ok(Measure { space: Arc::clone(&self.space), mass })
    }

    /// Pointwise comparison; false across spaces.
    pub fn le(&self, other: &Measure) -> bool {
        self.check_space(other).is_ok() && self.mass.iter().all(|(x, m)| *m <= other.mass(*x))
    }

    /// Pointwise minimum. Panics on a space mismatch.
    pub fn meet(&self, other: &Measure) -> Measure {
        self.check_space(other).expect("meet of measures on different spaces");
        let mass = self
            .mass
            .iter()
            .filter_map(|(x, m)| other.mass.get(x).map(|n| (*x, m.min(n).clone())))
            .collect();
        Measure { space: Arc::clone(&self.space), mass }
    }

    /// Pointwise difference `self - other`, defined when `other <= self`.
    pub fn checked_sub(&self, other: &Measure) -> Result<Measure, GcaError> {
        self.check_space(other)?;
        let mut mass = self.mass.clone();
        for (x, m) in &other.mass {
            let cur = mass.get(x).cloned().unwrap_or_default();
            let diff = cur.checked_sub(m).ok_or(GcaError::NotComparable)?;
            if diff.is_zero() {
                mass.remove(x);
            } else {
                mass.insert(*x, diff);
            }
        }
        Ok(Measure { space: Arc::clone(&self.space), mass })
    }

    pub fn is_orthogonal(&self, other: &Measure) -> bool {
        self.meet(other).is_zero()
    }
}

/// The CA of finite measures on one space.
#[derive(Debug, Clone)]
pub struct MeasureGca {
    pub space: Arc<FiniteSpace>,
}

impl MeasureGca {
    pub fn new(space: &Arc<FiniteSpace>) -> Self {
        MeasureGca { space: Arc::clone(space) }
    }
}

impl Gca for MeasureGca {
    type Elem = Measure;

    fn name(&self) -> &str {
        "measure"
    }

    fn zero(&self) -> Measure {
        Measure::zero(&self.space)
    }

    fn add(&self, a: &Measure, b: &Measure) -> Result<Measure, GcaError> {
        a.add(b)
    }

    fn le(&self, a: &Measure, b: &Measure) -> bool {
        a.le(b)
    }

    fn meet(&self, a: &Measure, b: &Measure) -> Measure {
        a.meet(b)
    }

    fn subtract(&self, a: &Measure, b: &Measure) -> Result<Measure, GcaError> {
        a.checked_sub(b)
    }

    fn is_zero(&self, a: &Measure) -> bool {
        a.is_zero()
    }
}

/// `μ + ν` on a shared space.
pub fn measure_add(mu: &Measure, nu: &Measure) -> Result<Measure, GcaError> {
    mu.add(nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> Rational {
        Rational::new(n, d)
    }

    fn xy() -> Arc<FiniteSpace> {
        FiniteSpace::new(["x", "y"]).unwrap()
    }

    #[test]
    fn add_examples() {
        let s = xy();
        let a = Measure::from_masses(&s, [(0, r(1, 2))]);
        let b = Measure::from_masses(&s, [(0, r(1, 2)), (1, r(1, 1))]);
        assert_eq!(measure_add(&a, &b).unwrap(), Measure::from_masses(&s, [(0, r(1, 1)), (1, r(1, 1))]));
        assert_eq!(measure_add(&a, &Measure::zero(&s)).unwrap(), a);
        let third = Measure::dirac(&s, 0, r(1, 3));
        let sixth = Measure::dirac(&s, 0, r(1, 6));
        assert_eq!(measure_add(&third, &sixth).unwrap(), Measure::dirac(&s, 0, r(1, 2)));
    }

    #[test]
    fn space_mismatch() {
        let a = Measure::dirac(&xy(), 0, r(1, 1));
        let b = Measure::dirac(&FiniteSpace::new(["x", "z"]).unwrap(), 0, r(1, 1));
        assert_eq!(a.add(&b), Err(GcaError::SpaceMismatch));
        assert!(!a.le(&b));
    }

    #[test]
    fn order_meet_subtract() {
        let s = xy();
        let g = MeasureGca::new(&s);
        let a = Measure::dirac(&s, 0, r(1, 2));
        let b = Measure::from_masses(&s, [(0, r(1, 3)), (1, r(1, 1))]);
        assert!(!g.le(&a, &b));

        let p = Measure::from_masses(&s, [(0, r(3, 5)), (1, r(2, 5))]);
        let q = Measure::from_masses(&s, [(0, r(2, 5)), (1, r(3, 5))]);
        let m = g.meet(&p, &q);
        assert_eq!(m, Measure::from_masses(&s, [(0, r(2, 5)), (1, r(2, 5))]));
        assert_eq!(g.subtract(&p, &m).unwrap(), Measure::dirac(&s, 0, r(1, 5)));
        assert_eq!(g.subtract(&m, &p), Err(GcaError::NotComparable));
    }

    #[test]
    fn orthogonality() {
        let s = xy();
        let g = MeasureGca::new(&s);
        let x = Measure::dirac(&s, 0, r(1, 1));
        let y = Measure::dirac(&s, 1, r(1, 1));
        assert!(g.is_orthogonal(&x, &y));
        let xy = Measure::from_masses(&s, [(0, r(1, 2)), (1, r(1, 1))]);
        assert!(!g.is_orthogonal(&x, &xy));
    }

    #[test]
    fn zero_masses_are_dropped() {
        let s = xy();
        let a = Measure::from_masses(&s, [(0, Rational::zero()), (1, r(1, 2))]);
        assert_eq!(a, Measure::dirac(&s, 1, r(1, 2)));
        assert_eq!(a.masses().count(), 1);
    }
}
