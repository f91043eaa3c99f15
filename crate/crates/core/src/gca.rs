//! The generalized cardinal algebra contract.
//!
//! A GCA is a set with a zero, a partial binary addition and a partial
//! countable sum. Only finitely supported families are summed here, so the
//! countable sum reduces to a left fold of the binary addition in index
//! order. The derived order, meets, orthogonality and witness subtraction
//! are dispatched to closed forms supplied by each instance.

use std::fmt::Debug;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GcaError {
    /// The partial addition is undefined on these operands.
    #[error("sum undefined: operands are not disjoint")]
    NotDisjoint,
    #[error("operands live on different spaces")]
    SpaceMismatch,
    #[error("subtrahend is not below the minuend")]
    NotComparable,
    #[error("difference is not unique for this instance")]
    NonUniqueWitness,
    #[error("measures are not orthogonal")]
    NotOrthogonal,
}

/// A generalized cardinal algebra with binary meets and decidable equality.
pub trait Gca {
    type Elem: Clone + PartialEq + Debug;

    /// Short registry name, used in reports.
    fn name(&self) -> &str;

    fn zero(&self) -> Self::Elem;

    /// The partial binary addition.
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, GcaError>;

    /// `a <= b` in the derived order (`a + c = b` for some `c`).
    fn le(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// The unique `c` with `b + c = a`.
    fn subtract(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, GcaError>;

    /// Whether the instance claims the cancellation law everywhere.
    fn is_cancellative_instance(&self) -> bool {
        true
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_orthogonal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.meet(a, b))
    }

    /// Sum of a finite sequence; the empty sequence sums to zero.
    fn sum<'a, I>(&self, items: I) -> Result<Self::Elem, GcaError>
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .try_fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    fn sum_family(&self, family: &FinitelySupportedFamily<Self::Elem>) -> Result<Self::Elem, GcaError> {
        self.sum(family.entries().iter().map(|(_, e)| e))
    }
}

/// A sequence `(a_n)_n` with only finitely many nonzero terms.
///
/// Entries are stored with strictly increasing indices and no entry is
/// the zero element; every omitted index denotes zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitelySupportedFamily<E> {
    entries: Vec<(usize, E)>,
}

impl<E: Clone + PartialEq + Debug> FinitelySupportedFamily<E> {
    pub fn empty() -> Self {
        FinitelySupportedFamily { entries: Vec::new() }
    }

    /// Builds the family `a_0, a_1, ...` from a finite prefix, dropping zeros.
    pub fn from_sequence<G>(gca: &G, terms: impl IntoIterator<Item = E>) -> Self
    where
        G: Gca<Elem = E> + ?Sized,
    {
        let entries = terms
            .into_iter()
            .enumerate()
            .filter(|(_, e)| !gca.is_zero(e))
            .collect();
        FinitelySupportedFamily { entries }
    }

    /// Builds a family from explicit `(index, term)` pairs in any order.
    /// Returns `None` on a repeated index.
    pub fn from_indexed<G>(gca: &G, terms: impl IntoIterator<Item = (usize, E)>) -> Option<Self>
    where
        G: Gca<Elem = E> + ?Sized,
    {
        let mut entries: Vec<(usize, E)> = terms.into_iter().filter(|(_, e)| !gca.is_zero(e)).collect();
        entries.sort_by_key(|(i, _)| *i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(FinitelySupportedFamily { entries })
    }

    pub fn entries(&self) -> &[(usize, E)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Option<&E> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// The family `(a_{n+1})_n`.
    pub fn tail(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(i, _)| *i >= 1)
            .map(|(i, e)| (i - 1, e.clone()))
            .collect();
        FinitelySupportedFamily { entries }
    }

    /// Reindexes by `n -> perm[n]`; `perm` must be injective on the support.
    pub fn permuted<G>(&self, gca: &G, perm: impl Fn(usize) -> usize) -> Option<Self>
    where
        G: Gca<Elem = E> + ?Sized,
    {
        Self::from_indexed(gca, self.entries.iter().map(|(i, e)| (perm(*i), e.clone())))
    }
}

/// Sampling check of the cancellation law at `a`: returns `false` iff some
/// probe `(b, c)` has `a + b = a + c` (both defined) but `b != c`.
pub fn is_cancellative<G: Gca + ?Sized>(gca: &G, a: &G::Elem, probes: &[(G::Elem, G::Elem)]) -> bool {
    probes.iter().all(|(b, c)| match (gca.add(a, b), gca.add(a, c)) {
        (Ok(ab), Ok(ac)) if ab == ac => b == c,
        _ => true,
    })
}

/// An element map between two GCAs, checked against the homomorphism laws
/// on sample inputs.
pub struct Homomorphism<'a, S: Gca, T: Gca> {
    pub source: &'a S,
    pub target: &'a T,
    map: Box<dyn Fn(&S::Elem) -> T::Elem + 'a>,
}

impl<'a, S: Gca, T: Gca> Homomorphism<'a, S, T> {
    pub fn new(source: &'a S, target: &'a T, map: impl Fn(&S::Elem) -> T::Elem + 'a) -> Self {
        Homomorphism { source, target, map: Box::new(map) }
    }

    pub fn apply(&self, a: &S::Elem) -> T::Elem {
        (self.map)(a)
    }

    pub fn preserves_zero(&self) -> bool {
        self.target.is_zero(&self.apply(&self.source.zero()))
    }

    /// `map(a + b) = map(a) + map(b)` whenever `a + b` is defined.
    pub fn preserves_add(&self, a: &S::Elem, b: &S::Elem) -> bool {
        match self.source.add(a, b) {
            Ok(ab) => self.target.add(&self.apply(a), &self.apply(b)).ok() == Some(self.apply(&ab)),
            Err(_) => true,
        }
    }

    /// The image of a defined sum is the sum of the images.
    pub fn preserves_sum(&self, family: &[S::Elem]) -> bool {
        match self.source.sum(family) {
            Ok(total) => {
                let images: Vec<T::Elem> = family.iter().map(|e| self.apply(e)).collect();
                self.target.sum(&images).ok() == Some(self.apply(&total))
            }
            Err(_) => true,
        }
    }
}
