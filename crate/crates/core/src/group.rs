//! Finite permutation groups acting on finite spaces.
//!
//! Elements are enumerated in a pinned order: the identity first, then a
//! breadth-first closure in which each dequeued element `e` is extended by
//! `g ∘ e` for every generator `g` in input order, keeping first
//! discoveries. Every tie-break downstream uses this index.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::instances::{same_space, FiniteSet, FiniteSpace, Measure};
use crate::gca::GcaError;

pub const DEFAULT_GROUP_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator {generator} is not a permutation of 0..{degree}")]
    NotAPermutation { generator: usize, degree: usize },
    #[error("group has more than {cap} elements")]
    GroupTooLarge { cap: usize },
}

/// A permutation of `0..n`, stored as its image table: `self[x] = γx`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Validates an image table.
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return None;
            }
        }
        Some(Permutation(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Disjoint-cycle notation over point indices, e.g. `(0 1)(2 3 4)`;
    /// the identity is `()`.
    pub fn cycle_notation(&self) -> String {
        self.cycle_notation_with(|x| x.to_string())
    }

    /// Cycle notation with points rendered by `label`.
    pub fn cycle_notation_with(&self, label: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        let mut seen = vec![false; self.0.len()];
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.0[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.0[x];
            }
            let body: Vec<String> = cycle.iter().map(|&x| label(x)).collect();
            out.push('(');
            out.push_str(&body.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// A finite permutation group with its pinned element enumeration.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    space: Arc<FiniteSpace>,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    lookup: HashMap<Permutation, usize>,
    inverse: Vec<usize>,
}

impl PermutationGroup {
    /// Enumerates the group generated by `generators` with the default cap.
    pub fn generate(space: &Arc<FiniteSpace>, generators: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        enumerate_group(space, generators, DEFAULT_GROUP_CAP)
    }

    pub fn trivial(space: &Arc<FiniteSpace>) -> Self {
        enumerate_group(space, Vec::new(), 1).expect("trivial group")
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index of the inverse of element `i`.
    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    /// Index of the product `γ_i γ_j` (apply `γ_j` first).
    pub fn compose(&self, i: usize, j: usize) -> usize {
        let product = self.elements[i].after(&self.elements[j]);
        self.index_of(&product).expect("group is closed under composition")
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    /// Least-index element sending `x` to `y`, if any.
    pub fn least_transporter(&self, x: usize, y: usize) -> Option<usize> {
        self.elements.iter().position(|e| e.apply(x) == y)
    }

    /// Replaces the inverse table. Only for fault injection.
    pub(crate) fn with_inverse_table(mut self, inverse: Vec<usize>) -> Self {
        assert_eq!(inverse.len(), self.elements.len());
        self.inverse = inverse;
        self
    }

    /// Pushforward `(γμ)(A) = μ(γ⁻¹A)` by element `gamma`.
    pub fn act_measure(&self, gamma: usize, mu: &Measure) -> Result<Measure, GcaError> {
        if !same_space(&self.space, mu.space()) {
            return Err(GcaError::SpaceMismatch);
        }
        let g = &self.elements[gamma];
        Ok(Measure::from_masses(mu.space(), mu.masses().map(|(x, m)| (g.apply(x), m.clone()))))
    }

    /// Pointwise image `γS`.
    pub fn act_set(&self, gamma: usize, s: &FiniteSet) -> Result<FiniteSet, GcaError> {
        if !same_space(&self.space, s.space()) {
            return Err(GcaError::SpaceMismatch);
        }
        let g = &self.elements[gamma];
        Ok(FiniteSet::from_indices(s.space(), s.members().iter().map(|&x| g.apply(x))))
    }

    /// Orbits of the action, each sorted, ordered by least member.
    pub fn orbits(&self) -> OrbitPartition {
        let n = self.space.len();
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut orbit = vec![start];
            orbit_of[start] = id;
            let mut frontier = vec![start];
            while let Some(x) = frontier.pop() {
                for g in &self.generators {
                    let y = g.apply(x);
                    if orbit_of[y] == usize::MAX {
                        orbit_of[y] = id;
                        orbit.push(y);
                        frontier.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        OrbitPartition { orbits, orbit_of }
    }

    /// Whether `s` is a union of orbits. Checking generators suffices.
    pub fn is_invariant_set(&self, s: &FiniteSet) -> bool {
        self.generators
            .iter()
            .all(|g| s.members().iter().all(|&x| s.contains(g.apply(x))))
    }

    /// First generator (by input position) that moves `mu`, if any.
    pub fn first_generator_moving(&self, mu: &Measure) -> Option<usize> {
        self.generators.iter().position(|g| {
            let moved = Measure::from_masses(mu.space(), mu.masses().map(|(x, m)| (g.apply(x), m.clone())));
            moved != *mu
        })
    }
}

/// Breadth-first closure of `generators`, capped at `cap` elements.
pub fn enumerate_group(
    space: &Arc<FiniteSpace>,
    generators: Vec<Vec<usize>>,
    cap: usize,
) -> Result<PermutationGroup, GroupError> {
    let n = space.len();
    let generators: Vec<Permutation> = generators
        .into_iter()
        .enumerate()
        .map(|(i, images)| {
            if images.len() != n {
                return Err(GroupError::NotAPermutation { generator: i, degree: n });
            }
            Permutation::new(images).ok_or(GroupError::NotAPermutation { generator: i, degree: n })
        })
        .collect::<Result<_, _>>()?;

    let identity = Permutation::identity(n);
    let mut index: HashMap<Permutation, usize> = HashMap::from([(identity.clone(), 0)]);
    let mut elements = vec![identity];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &generators {
            let next = g.after(&elements[i]);
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() == cap {
                return Err(GroupError::GroupTooLarge { cap });
            }
            index.insert(next.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(next);
        }
    }
    let inverse = elements.iter().map(|e| index[&e.inverse()]).collect();
    Ok(PermutationGroup { space: Arc::clone(space), generators, elements, lookup: index, inverse })
}

/// The orbit partition of a finite action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

impl OrbitPartition {
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }
}
