//! Subsets of a finite space, as two different algebras.
//!
//! [`PowerSetCa`] is the power set under (total) union. [`DisjointSetGca`]
//! is the GCA of sets under disjoint union, where `a + b` is defined only
//! when `a ∩ b = ∅`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::measure::Measure;
use super::space::{same_space, FiniteSpace};
use crate::gca::{Gca, GcaError};

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteSet {
    space: Arc<FiniteSpace>,
    members: BTreeSet<usize>,
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter().map(|x| self.space.label(*x))).finish()
    }
}

impl FiniteSet {
    pub fn empty(space: &Arc<FiniteSpace>) -> Self {
        FiniteSet { space: Arc::clone(space), members: BTreeSet::new() }
    }

    pub fn full(space: &Arc<FiniteSpace>) -> Self {
        Self::from_indices(space, 0..space.len())
    }

    /// Panics if an index is outside the space.
    pub fn from_indices(space: &Arc<FiniteSpace>, members: impl IntoIterator<Item = usize>) -> Self {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&max) = members.last() {
            assert!(max < space.len(), "point {max} outside a space of {} points", space.len());
        }
        FiniteSet { space: Arc::clone(space), members }
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn check_space(&self, other: &FiniteSet) -> Result<(), GcaError> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(GcaError::SpaceMismatch)
        }
    }

    fn with_members(&self, members: BTreeSet<usize>) -> FiniteSet {
        FiniteSet { space: Arc::clone(&self.space), members }
    }

    pub fn union(&self, other: &FiniteSet) -> Result<FiniteSet, GcaError> {
        self.check_space(other)?;
        Ok(self.with_members(self.members.union(&other.members).copied().collect()))
    }

    pub fn intersection(&self, other: &FiniteSet) -> Result<FiniteSet, GcaError> {
        self.check_space(other)?;
        Ok(self.with_members(self.members.intersection(&other.members).copied().collect()))
    }

    pub fn difference(&self, other: &FiniteSet) -> Result<FiniteSet, GcaError> {
        self.check_space(other)?;
        Ok(self.with_members(self.members.difference(&other.members).copied().collect()))
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.check_space(other).is_ok() && self.members.is_subset(&other.members)
    }

    pub fn is_disjoint(&self, other: &FiniteSet) -> bool {
        self.members.is_disjoint(&other.members)
    }

    /// The indicator measure `1_S`.
    pub fn indicator(&self) -> Measure {
        Measure::from_masses(&self.space, self.members.iter().map(|x| (*x, crate::rational::Rational::one())))
    }
}

/// `a ⊔ b`, defined only for disjoint sets.
pub fn set_disjoint_add(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, GcaError> {
    a.check_space(b)?;
    if !a.is_disjoint(b) {
        return Err(GcaError::NotDisjoint);
    }
    a.union(b)
}

/// Splits `a = b ⊔ c` with `μ(b) = 0` and `ν(c) = 0` for orthogonal `μ, ν`.
///
/// Orthogonal finite measures have disjoint supports, so `μ` vanishes on
/// `b = a ∩ supp ν` and `ν` vanishes on `c = a \ supp ν`.
pub fn split_orthogonal(a: &FiniteSet, mu: &Measure, nu: &Measure) -> Result<(FiniteSet, FiniteSet), GcaError> {
    if !same_space(a.space(), mu.space()) || !same_space(a.space(), nu.space()) {
        return Err(GcaError::SpaceMismatch);
    }
    if !mu.is_orthogonal(nu) {
        return Err(GcaError::NotOrthogonal);
    }
    let nu_support = nu.support();
    Ok((a.intersection(&nu_support)?, a.difference(&nu_support)?))
}

/// The power set of a finite space as a CA under union. Not cancellative.
#[derive(Debug, Clone)]
pub struct PowerSetCa {
    pub space: Arc<FiniteSpace>,
}

impl PowerSetCa {
    pub fn new(space: &Arc<FiniteSpace>) -> Self {
        PowerSetCa { space: Arc::clone(space) }
    }
}

impl Gca for PowerSetCa {
    type Elem = FiniteSet;

    fn name(&self) -> &str {
        "powerset"
    }

    fn zero(&self) -> FiniteSet {
        FiniteSet::empty(&self.space)
    }

    fn add(&self, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, GcaError> {
        a.union(b)
    }

    fn le(&self, a: &FiniteSet, b: &FiniteSet) -> bool {
        a.is_subset(b)
    }

    fn meet(&self, a: &FiniteSet, b: &FiniteSet) -> FiniteSet {
        a.intersection(b).expect("meet of sets on different spaces")
    }

    /// `b ∪ c = a` pins `c` down only when `b` is empty.
    fn subtract(&self, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, GcaError> {
        if !b.is_subset(a) {
            return Err(GcaError::NotComparable);
        }
        if b.is_empty() {
            Ok(a.clone())
        } else {
            Err(GcaError::NonUniqueWitness)
        }
    }

    fn is_cancellative_instance(&self) -> bool {
        false
    }
}

/// Sets of a finite space under disjoint union.
#[derive(Debug, Clone)]
pub struct DisjointSetGca {
    pub space: Arc<FiniteSpace>,
}

impl DisjointSetGca {
    pub fn new(space: &Arc<FiniteSpace>) -> Self {
        DisjointSetGca { space: Arc::clone(space) }
    }
}

impl Gca for DisjointSetGca {
    type Elem = FiniteSet;

    fn name(&self) -> &str {
        "sets"
    }

    fn zero(&self) -> FiniteSet {
        FiniteSet::empty(&self.space)
    }

    fn add(&self, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, GcaError> {
        set_disjoint_add(a, b)
    }

    fn le(&self, a: &FiniteSet, b: &FiniteSet) -> bool {
        a.is_subset(b)
    }

    fn meet(&self, a: &FiniteSet, b: &FiniteSet) -> FiniteSet {
        a.intersection(b).expect("meet of sets on different spaces")
    }

    fn subtract(&self, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet, GcaError> {
        if !b.is_subset(a) {
            return Err(GcaError::NotComparable);
        }
        a.difference(b)
    }
}
