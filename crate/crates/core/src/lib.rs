//! Bounds on CP²-slicing numbers of knots.
//!
//! Lower bounds come from Donaldson-type lattice embedding obstructions,
//! their Diophantine specialisations for pretzel knots, and signature
//! function gates. Upper bounds come from explicit crossing-change rules and
//! from decompositions of Seifert matrices.

pub mod diophantine;
pub mod embedder;
pub mod error;
pub mod knotspec;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod plumbing;
pub mod report;
pub mod reproduce;
pub mod seifert;
pub mod upperbound;

pub use error::{Error, Result};
pub use lattice::{Definiteness, IntegralLattice, Sign};
