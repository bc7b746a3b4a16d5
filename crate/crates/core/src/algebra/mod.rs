//! Exact rational arithmetic, lattices, cones and linear programs.
//!
//! Every routine in this module is exact. Rationals are arbitrary precision,
//! linear systems are solved by fraction-free or rational elimination, and
//! the simplex solver uses Bland's rule so it terminates on every input.

mod cone;
mod lattice;
mod linalg;
mod lp;

pub use cone::{ConeMembership, SimplicialCone};
pub use lattice::{LatticeVector, QuotientLattice};
pub use linalg::{
    integer_determinant, invert_matrix, merge_congruences, smith_normal_form, solve_linear_system,
    Congruence, SmithDecomposition,
};
pub use lp::{LinearProgram, LpOutcome, Relation};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number used throughout the library.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("vectors have mismatched dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cone generators must be linearly independent")]
    DependentGenerators,
    #[error("quotient order must be positive, got {0}")]
    NonPositiveOrder(BigInt),
    #[error("the quotient acts with a pseudo-reflection: coordinate {0} is not primitive")]
    PseudoReflection(usize),
    #[error("expected a nonzero vector")]
    ZeroVector,
    #[error("vector has negative coordinates where none are allowed")]
    NegativeCoordinate,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("malformed rational literal {0:?}")]
    BadRationalLiteral(String),
}

/// Builds the rational `numer / denom`. Panics when `denom` is zero.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Builds the integer rational `n`.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Parses "p/q" or "p" into a rational. Whitespace around tokens is ignored.
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let bad = || AlgebraError::BadRationalLiteral(text.to_owned());
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .ok_or_else(bad)?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Renders a rational as "p" or "p/q" in lowest terms.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Serde adapter storing a [`Rational`] as its "p/q" string form.
pub mod rational_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(de)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` in "p/q" string form.
pub mod rational_vec_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(values.iter().map(|v| format_rational(v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(de)?;
        texts
            .into_iter()
            .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// True when the rational is a (possibly negative) integer.
pub fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

/// Floor of a rational as a big integer.
pub fn rational_floor(value: &Rational) -> BigInt {
    value.floor().to_integer()
}

/// Ceiling of a rational as a big integer.
pub fn rational_ceil(value: &Rational) -> BigInt {
    value.ceil().to_integer()
}

/// Absolute value helper for big integers.
pub fn big_abs(value: &BigInt) -> BigInt {
    value.abs()
}
