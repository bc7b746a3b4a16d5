//! Exact arithmetic for singularities of toric germs.
//!
//! The library computes log discrepancies, minimal log discrepancies,
//! log canonical thresholds and weighted blow-up data for cyclic quotient
//! germs `A^d / Z_r(a_1,...,a_d)` carrying monomial R-ideals. Everything is
//! exact: rationals are arbitrary-precision, linear programs are solved by
//! an exact simplex, and search-based answers ship with a certificate
//! describing how they were confirmed.
//!
//! Module map:
//! - [`algebra`]: rationals, lattice vectors, cones, exact linear programs.
//! - [`ideals`]: monomial ideals, monomial R-ideals, weighted homogeneous
//!   polynomials, Newton polyhedra.
//! - [`valuations`]: toric germs and valuations, log discrepancies, mld,
//!   lc thresholds, singularity class predicates.
//! - [`blowup`]: weighted blow-ups, charts, weak transforms, regular towers.
//! - [`surface`]: surface-germ searches built on iterated point blow-ups.
//! - [`canonize`]: the iterative contraction loop that terminalizes a pair,
//!   with its certified bound ledger.
//! - [`classify`]: classification of crepant curve centres on weighted
//!   blow-ups of smooth threefold germs.

pub mod algebra;
pub mod blowup;
pub mod canonize;
pub mod classify;
pub mod ideals;
pub mod surface;
pub mod valuations;

pub use algebra::Rational;
