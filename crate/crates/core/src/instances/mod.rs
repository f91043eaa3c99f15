//! Concrete generalized cardinal algebras.

mod extnat;
mod malg;
mod measure;
mod scalar;
mod sets;
mod space;

pub use extnat::{ExtNat, ExtNatGca};
pub use malg::{malg_quotient, MalgClass, MalgGca};
pub use measure::{measure_add, Measure, MeasureGca};
pub use scalar::RationalGca;
pub use sets::{set_disjoint_add, split_orthogonal, DisjointSetGca, FiniteSet, PowerSetCa};
pub use space::{FiniteSpace, SpaceError};

pub(crate) use space::same_space;
