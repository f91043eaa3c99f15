//! The measure algebra of a finite measure space: sets modulo null sets,
//! under disjoint union. Null points are deleted when a class is built, so
//! equality of classes is structural.

use std::collections::BTreeSet;
use std::fmt;

use super::measure::Measure;
use super::sets::FiniteSet;
use super::space::same_space;
use crate::gca::{Gca, GcaError};

#[derive(Clone, PartialEq, Eq)]
pub struct MalgClass {
    base: Measure,
    members: BTreeSet<usize>,
}

impl fmt::Debug for MalgClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let space = self.base.space();
        write!(f, "[")?;
        f.debug_set().entries(self.members.iter().map(|x| space.label(*x))).finish()?;
        write!(f, "]")
    }
}

impl MalgClass {
    pub fn base(&self) -> &Measure {
        &self.base
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The canonical representative: the set of non-null members.
    pub fn representative(&self) -> FiniteSet {
        FiniteSet::from_indices(self.base.space(), self.members.iter().copied())
    }

    fn with_members(&self, members: BTreeSet<usize>) -> MalgClass {
        MalgClass { base: self.base.clone(), members }
    }

    fn check_base(&self, other: &MalgClass) -> Result<(), GcaError> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(GcaError::SpaceMismatch)
        }
    }
}

/// The class of `s` in `MALG(X, base)`. Panics on a space mismatch.
pub fn malg_quotient(s: &FiniteSet, base: &Measure) -> MalgClass {
    assert!(same_space(s.space(), base.space()), "set and base measure on different spaces");
    let members = s.members().iter().copied().filter(|x| base.mass(*x).is_positive()).collect();
    MalgClass { base: base.clone(), members }
}

#[derive(Debug, Clone)]
pub struct MalgGca {
    pub base: Measure,
}

impl MalgGca {
    pub fn new(base: &Measure) -> Self {
        MalgGca { base: base.clone() }
    }

    pub fn class_of(&self, s: &FiniteSet) -> MalgClass {
        malg_quotient(s, &self.base)
    }
}

impl Gca for MalgGca {
    type Elem = MalgClass;

    fn name(&self) -> &str {
        "malg"
    }

    fn zero(&self) -> MalgClass {
        MalgClass { base: self.base.clone(), members: BTreeSet::new() }
    }

    fn add(&self, a: &MalgClass, b: &MalgClass) -> Result<MalgClass, GcaError> {
        a.check_base(b)?;
        if !a.members.is_disjoint(&b.members) {
            return Err(GcaError::NotDisjoint);
        }
        Ok(a.with_members(a.members.union(&b.members).copied().collect()))
    }

    fn le(&self, a: &MalgClass, b: &MalgClass) -> bool {
        a.check_base(b).is_ok() && a.members.is_subset(&b.members)
    }

    fn meet(&self, a: &MalgClass, b: &MalgClass) -> MalgClass {
        a.check_base(b).expect("meet of classes over different bases");
        a.with_members(a.members.intersection(&b.members).copied().collect())
    }

    fn subtract(&self, a: &MalgClass, b: &MalgClass) -> Result<MalgClass, GcaError> {
        if !self.le(b, a) {
            return Err(GcaError::NotComparable);
        }
        Ok(a.with_members(a.members.difference(&b.members).copied().collect()))
    }
}
