//! Equidecompositions and their exact verifier.
//!
//! An equidecomposition of `a` into `b` is a family of pieces `c_δ`
//! indexed by group elements with `a = Σ_δ c_δ` and `b = Σ_δ δ·c_δ`. For
//! measures this is a shift-coupling written as one measure per group
//! element; for sets both sums must also be disjoint unions.

use std::collections::BTreeMap;

use crate::gca::GcaError;
use crate::group::PermutationGroup;
use crate::instances::{FiniteSet, Measure};

/// What can be cut into pieces and moved by the group.
pub trait Piece: Clone + PartialEq + std::fmt::Debug {
    fn empty_like(&self) -> Self;
    fn is_empty_piece(&self) -> bool;
    fn moved_by(&self, group: &PermutationGroup, gamma: usize) -> Result<Self, GcaError>;
    /// Accumulates `other` into `self`; returns false if the two overlapped
    /// where the sum must be disjoint.
    fn absorb(&mut self, other: &Self) -> bool;
    /// Least point at which `self` and `other` differ.
    fn first_difference(&self, other: &Self) -> Option<usize>;
}

impl Piece for Measure {
    fn empty_like(&self) -> Self {
        Measure::zero(self.space())
    }

    fn is_empty_piece(&self) -> bool {
        self.is_zero()
    }

    fn moved_by(&self, group: &PermutationGroup, gamma: usize) -> Result<Self, GcaError> {
        group.act_measure(gamma, self)
    }

    fn absorb(&mut self, other: &Self) -> bool {
        *self = self.add(other).expect("pieces share a space");
        true
    }

    fn first_difference(&self, other: &Self) -> Option<usize> {
        let points = self.masses().map(|(x, _)| x).chain(other.masses().map(|(x, _)| x));
        points.filter(|&x| self.mass(x) != other.mass(x)).min()
    }
}

impl Piece for FiniteSet {
    fn empty_like(&self) -> Self {
        FiniteSet::empty(self.space())
    }

    fn is_empty_piece(&self) -> bool {
        self.is_empty()
    }

    fn moved_by(&self, group: &PermutationGroup, gamma: usize) -> Result<Self, GcaError> {
        group.act_set(gamma, self)
    }

    fn absorb(&mut self, other: &Self) -> bool {
        let disjoint = self.is_disjoint(other);
        *self = self.union(other).expect("pieces share a space");
        disjoint
    }

    fn first_difference(&self, other: &Self) -> Option<usize> {
        self.members().symmetric_difference(other.members()).min().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A family of pieces keyed by group-element index, together with its two
/// reconstructions `left = Σ c_δ` and `right = Σ δ·c_δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equidecomposition<P: Piece> {
    pieces: BTreeMap<usize, P>,
    left: P,
    right: P,
    overlap: Option<(Side, usize)>,
}

impl<P: Piece> Equidecomposition<P> {
    /// Assembles pieces, dropping empty ones. `zero` fixes the ambient space
    /// when there are no pieces.
    pub fn assemble(group: &PermutationGroup, zero: &P, pieces: BTreeMap<usize, P>) -> Result<Self, GcaError> {
        let pieces: BTreeMap<usize, P> = pieces.into_iter().filter(|(_, p)| !p.is_empty_piece()).collect();
        let mut left = zero.empty_like();
        let mut right = zero.empty_like();
        let mut overlap = None;
        for (&delta, piece) in &pieces {
            let moved = piece.moved_by(group, delta)?;
            if !left.absorb(piece) && overlap.is_none() {
                overlap = Some((Side::Left, delta));
            }
            if !right.absorb(&moved) && overlap.is_none() {
                overlap = Some((Side::Right, delta));
            }
        }
        Ok(Equidecomposition { pieces, left, right, overlap })
    }

    pub fn pieces(&self) -> &BTreeMap<usize, P> {
        &self.pieces
    }

    pub fn piece(&self, delta: usize) -> Option<&P> {
        self.pieces.get(&delta)
    }

    pub fn left(&self) -> &P {
        &self.left
    }

    pub fn right(&self) -> &P {
        &self.right
    }
}

/// Outcome of [`verify_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub left_ok: bool,
    pub right_ok: bool,
    /// For set pieces: the piece sums on both sides were disjoint unions.
    pub disjoint_ok: bool,
    /// First failure: side and offending point (or, for an overlap, the
    /// group element whose piece overlapped an earlier one).
    pub first_failure: Option<Failure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Mismatch { side: Side, point: usize },
    Overlap { side: Side, element: usize },
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.left_ok && self.right_ok && self.disjoint_ok
    }
}

/// Checks `left = source` and `right = target` exactly.
pub fn verify_decomposition<P: Piece>(d: &Equidecomposition<P>, source: &P, target: &P) -> DecompositionReport {
    let left_diff = d.left.first_difference(source);
    let right_diff = d.right.first_difference(target);
    let first_failure = match (left_diff, right_diff, d.overlap) {
        (_, _, Some((side, element))) => Some(Failure::Overlap { side, element }),
        (Some(point), _, None) => Some(Failure::Mismatch { side: Side::Left, point }),
        (None, Some(point), None) => Some(Failure::Mismatch { side: Side::Right, point }),
        (None, None, None) => None,
    };
    DecompositionReport {
        left_ok: left_diff.is_none(),
        right_ok: right_diff.is_none(),
        disjoint_ok: d.overlap.is_none(),
        first_failure,
    }
}
