//! Exact-arithmetic machinery for Lattès map data and finite subdivision rules.
//!
//! The crate is organized around a small exact kernel and a pipeline that
//! turns a multiplier matrix into a certified combinatorial subdivision rule:
//!
//! - [`exact`] — rationals, quadratic extensions `x + y√m`, and the planar
//!   predicates everything else consumes.
//! - [`lattes`] — multiplier matrices, lattice parameters, coset
//!   representatives, and enumeration of rigid classes by degree.
//! - [`hexplane`] — the hexagon tiling, its dual triangulation, lattice
//!   embeddings onto edge midpoints, and edge path approximations of lines.
//! - [`fundom`] — fundamental domains (hexagonal, parallelogram, bundled
//!   templates), per-instance validity reports, and rule extraction.
//! - [`fsr`] — subdivision rules, cell complexes, iterated subdivision, and
//!   the expansion certificates (edge subdivision, pair-graph acyclicity,
//!   bounded valence, pruning and tree classification).
//! - [`quadratic`] — floating-point verification of the exceptional
//!   quadratic map with multiplier `(1+√-7)/2`.

pub mod exact;
pub mod fsr;
pub mod fundom;
pub mod hexplane;
pub mod lattes;
pub mod quadratic;
