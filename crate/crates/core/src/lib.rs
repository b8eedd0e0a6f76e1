//! Exact computations with polynomial Lie algebroids.
//!
//! Algebroids are encoded as homological vector fields on weighted
//! graded-commutative polynomial algebras. Everything — de Rham and
//! deformation cohomology, pull-backs along coordinate submersions,
//! spectral pages, Morita-invariance checks, Bott complexes of linear
//! foliations — reduces to exact rank computations on finite
//! `(degree, weight)` blocks.

pub mod algebroid;
pub mod cli;
pub mod corpus;
pub mod graded;
pub mod linalg;
pub mod cohomology;
pub mod deformation;
pub mod dsl;
pub mod morphism;
pub mod pullback;
pub mod foliation;
