//! Exact generalized cardinal algebras with finite group actions, and
//! solvers that build shift-couplings (equidecompositions) between finite
//! measures or certify that none exists.

pub mod axioms;
pub mod cli;
pub mod decomposition;
pub mod format;
pub mod gca;
pub mod group;
pub mod instances;
pub mod rational;
pub mod solver;

pub use decomposition::{verify_decomposition, DecompositionReport, Equidecomposition};
pub use gca::{FinitelySupportedFamily, Gca, GcaError, Homomorphism};
pub use group::{enumerate_group, PermutationGroup};
pub use rational::Rational;
