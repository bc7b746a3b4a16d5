//! Monomial ideals, monomial R-ideals and weighted homogeneous polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{
    format_rational, parse_rational, LatticeVector, LinearProgram, LpOutcome, Rational, Relation,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdealsError {
    #[error("a monomial ideal needs at least one generator")]
    ZeroIdeal,
    #[error("exponent vector has length {0}, expected {1}")]
    DimensionMismatch(usize, usize),
    #[error("exponents must be non-negative")]
    NegativeExponent,
    #[error("R-ideal exponents must be non-negative, got {0}")]
    NegativeFactorExponent(String),
    #[error("terms of weighted degree {0} and {1} in one homogeneous polynomial")]
    MixedDegrees(BigInt, BigInt),
    #[error("a polynomial needs at least one term")]
    EmptyPolynomial,
    #[error("substitution must have weighted degree {0}, got {1}")]
    BadSubstitutionDegree(BigInt, BigInt),
    #[error("polynomial weights differ")]
    MismatchedWeights,
    #[error("newton polygon data must be two dimensional, got dimension {0}")]
    NotPlanar(usize),
    #[error("the trivial ideal has no newton polygon threshold")]
    TrivialIdeal,
}

/// A monomial ideal given by its unique minimal generating monomials.
///
/// Generators are exponent vectors. The unit ideal is represented by the
/// single zero vector; the zero ideal is not representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    dim: usize,
    generators: Vec<Vec<BigInt>>,
}

impl MonomialIdeal {
    pub fn new(dim: usize, generators: Vec<Vec<BigInt>>) -> Result<Self, IdealsError> {
        if generators.is_empty() {
            return Err(IdealsError::ZeroIdeal);
        }
        for g in &generators {
            if g.len() != dim {
                return Err(IdealsError::DimensionMismatch(g.len(), dim));
            }
            if g.iter().any(|e| e.is_negative()) {
                return Err(IdealsError::NegativeExponent);
            }
        }
        Ok(MonomialIdeal {
            dim,
            generators: minimize(generators),
        })
    }

    pub fn from_u64(dim: usize, generators: &[&[u64]]) -> Result<Self, IdealsError> {
        MonomialIdeal::new(
            dim,
            generators
                .iter()
                .map(|g| g.iter().map(|&e| BigInt::from(e)).collect())
                .collect(),
        )
    }

    /// The unit ideal, generated by the monomial 1.
    pub fn trivial(dim: usize) -> Self {
        MonomialIdeal {
            dim,
            generators: vec![vec![BigInt::zero(); dim]],
        }
    }

    /// The maximal ideal of the origin.
    pub fn maximal(dim: usize) -> Self {
        // Reverse order so the generators are already in the canonical
        // sorted form that `new` produces.
        MonomialIdeal {
            dim,
            generators: (0..dim)
                .rev()
                .map(|i| {
                    (0..dim)
                        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    /// The principal ideal of a single monomial.
    pub fn principal(exponents: Vec<BigInt>) -> Result<Self, IdealsError> {
        let dim = exponents.len();
        MonomialIdeal::new(dim, vec![exponents])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].iter().all(|e| e.is_zero())
    }

    /// Order of vanishing along the toric valuation with weight vector `w`:
    /// the minimum of `<w, m>` over the generators.
    pub fn ord_along(&self, w: &LatticeVector) -> Rational {
        assert_eq!(w.dim(), self.dim, "dimension mismatch");
        self.generators
            .iter()
            .map(|g| w.pairing(g))
            .min()
            .expect("at least one generator")
    }

    pub fn product(&self, other: &MonomialIdeal) -> MonomialIdeal {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut gens = Vec::new();
        for a in &self.generators {
            for b in &other.generators {
                gens.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        MonomialIdeal {
            dim: self.dim,
            generators: minimize(gens),
        }
    }

    pub fn pow(&self, k: u64) -> MonomialIdeal {
        let mut out = MonomialIdeal::trivial(self.dim);
        for _ in 0..k {
            out = out.product(self);
        }
        out
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", monomial_string(g))?;
        }
        write!(f, ")")
    }
}

fn monomial_string(exponents: &[BigInt]) -> String {
    if exponents.iter().all(|e| e.is_zero()) {
        return "1".to_owned();
    }
    let mut out = String::new();
    for (i, e) in exponents.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        if !out.is_empty() {
            out.push('*');
        }
        out.push_str(&format!("x{}", i + 1));
        if !e.is_one() {
            out.push_str(&format!("^{e}"));
        }
    }
    out
}

/// Keeps only the divisibility-minimal exponent vectors, sorted and deduped.
fn minimize(mut gens: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    gens.sort();
    gens.dedup();
    let keep: Vec<bool> = gens
        .iter()
        .map(|g| {
            !gens
                .iter()
                .any(|h| h != g && h.iter().zip(g).all(|(a, b)| a <= b))
        })
        .collect();
    let mut out: Vec<Vec<BigInt>> = gens
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(g, _)| g)
        .collect();
    out.sort();
    out
}

/// A formal product of monomial ideals with non-negative rational exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRIdeal {
    dim: usize,
    factors: Vec<(MonomialIdeal, Rational)>,
}

impl MonomialRIdeal {
    pub fn new(
        dim: usize,
        factors: Vec<(MonomialIdeal, Rational)>,
    ) -> Result<Self, IdealsError> {
        for (ideal, exp) in &factors {
            if ideal.dim() != dim {
                return Err(IdealsError::DimensionMismatch(ideal.dim(), dim));
            }
            if exp.is_negative() {
                return Err(IdealsError::NegativeFactorExponent(format_rational(exp)));
            }
        }
        // A zero exponent means the factor is the structure sheaf; trivial
        // ideals contribute nothing either way.
        let factors = factors
            .into_iter()
            .filter(|(ideal, exp)| !exp.is_zero() && !ideal.is_trivial())
            .collect();
        Ok(MonomialRIdeal { dim, factors })
    }

    pub fn trivial(dim: usize) -> Self {
        MonomialRIdeal {
            dim,
            factors: Vec::new(),
        }
    }

    pub fn from_ideal(ideal: MonomialIdeal, exp: Rational) -> Result<Self, IdealsError> {
        let dim = ideal.dim();
        MonomialRIdeal::new(dim, vec![(ideal, exp)])
    }

    /// The divisor `sum_i delta_i {x_i = 0}` as a product of principal
    /// factors.
    pub fn coordinate_divisor(coefficients: &[Rational]) -> Result<Self, IdealsError> {
        let dim = coefficients.len();
        let mut factors = Vec::new();
        for (i, delta) in coefficients.iter().enumerate() {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::one();
            factors.push((MonomialIdeal::principal(e).expect("principal"), delta.clone()));
        }
        MonomialRIdeal::new(dim, factors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[(MonomialIdeal, Rational)] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn ord_along(&self, w: &LatticeVector) -> Rational {
        self.factors
            .iter()
            .map(|(ideal, exp)| ideal.ord_along(w) * exp)
            .sum()
    }

    pub fn product(&self, other: &MonomialRIdeal) -> MonomialRIdeal {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        MonomialRIdeal {
            dim: self.dim,
            factors,
        }
    }

    /// The formal power `self^t` for `t >= 0`.
    pub fn pow(&self, t: &Rational) -> Result<MonomialRIdeal, IdealsError> {
        if t.is_negative() {
            return Err(IdealsError::NegativeFactorExponent(format_rational(t)));
        }
        MonomialRIdeal::new(
            self.dim,
            self.factors
                .iter()
                .map(|(ideal, exp)| (ideal.clone(), exp * t))
                .collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct FactorDto {
    gens: Vec<Vec<u64>>,
    exp: String,
}

#[derive(Serialize, Deserialize)]
struct RIdealDto {
    dim: usize,
    factors: Vec<FactorDto>,
}

impl Serialize for MonomialRIdeal {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let factors = self
            .factors
            .iter()
            .map(|(ideal, exp)| {
                let gens = ideal
                    .generators()
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|e| {
                                e.to_u64().ok_or_else(|| {
                                    serde::ser::Error::custom("exponent too large for JSON")
                                })
                            })
                            .collect::<Result<Vec<u64>, S::Error>>()
                    })
                    .collect::<Result<Vec<_>, S::Error>>()?;
                Ok(FactorDto {
                    gens,
                    exp: format_rational(exp),
                })
            })
            .collect::<Result<Vec<_>, S::Error>>()?;
        RIdealDto {
            dim: self.dim,
            factors,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MonomialRIdeal {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let dto = RIdealDto::deserialize(de)?;
        let mut factors = Vec::new();
        for f in dto.factors {
            let ideal = MonomialIdeal::new(
                dto.dim,
                f.gens
                    .into_iter()
                    .map(|g| g.into_iter().map(BigInt::from).collect())
                    .collect(),
            )
            .map_err(D::Error::custom)?;
            let exp = parse_rational(&f.exp).map_err(D::Error::custom)?;
            factors.push((ideal, exp));
        }
        MonomialRIdeal::new(dto.dim, factors).map_err(D::Error::custom)
    }
}

/// Whether the point `target` lies in the `scale`-fold dilation of the
/// Newton polyhedron of the R-ideal.
///
/// The Newton polyhedron of a product is the weighted Minkowski sum of the
/// factors' polyhedra, each `conv(generators) + R_{>=0}^d`, so membership is
/// a small exact LP feasibility check.
pub fn newton_polyhedron_membership(
    ideal: &MonomialRIdeal,
    target: &[Rational],
    scale: &Rational,
) -> Result<bool, IdealsError> {
    if target.len() != ideal.dim() {
        return Err(IdealsError::DimensionMismatch(target.len(), ideal.dim()));
    }
    if scale.is_negative() {
        return Err(IdealsError::NegativeFactorExponent(format_rational(scale)));
    }
    let d = ideal.dim();
    // Variables: one mixing weight per generator of each factor.
    let counts: Vec<usize> = ideal
        .factors()
        .iter()
        .map(|(i, _)| i.generators().len())
        .collect();
    let total: usize = counts.iter().sum();
    let mut lp = LinearProgram::minimize(vec![Rational::zero(); total]);
    lp.set_all_nonnegative();
    // Mixing weights of factor j sum to scale * exp_j.
    let mut offset = 0;
    for (j, (_, exp)) in ideal.factors().iter().enumerate() {
        let mut row = vec![Rational::zero(); total];
        for k in 0..counts[j] {
            row[offset + k] = Rational::one();
        }
        lp.add_constraint(row, Relation::Eq, scale * exp).unwrap();
        offset += counts[j];
    }
    // The mixed point must sit coordinatewise below the target.
    for coord in 0..d {
        let mut row = vec![Rational::zero(); total];
        let mut offset = 0;
        for (ideal_j, _) in ideal.factors() {
            for (k, g) in ideal_j.generators().iter().enumerate() {
                row[offset + k] = Rational::from(g[coord].clone());
            }
            offset += ideal_j.generators().len();
        }
        lp.add_constraint(row, Relation::Le, target[coord].clone())
            .unwrap();
    }
    Ok(lp.solve() != LpOutcome::Infeasible)
}

/// Result of reading a log canonical threshold off a plane Newton polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygonLct {
    pub value: Rational,
    /// The polygon only bounds the threshold for Newton-nondegenerate
    /// equations; this flag records the standing hypothesis.
    pub assumes_nondegenerate: bool,
    /// Set when the support misses a pure power of some variable, in which
    /// case the curve germ can be non-isolated and the value must be read
    /// with care.
    pub non_isolated_warning: bool,
}

/// Log canonical threshold of a plane curve germ from its Newton polygon.
///
/// `support` collects the exponent vectors of the equation. The value is
/// `min(1, 1/t0)` where `(t0, t0)` is the first point of the diagonal inside
/// the polygon.
pub fn newton_polygon_lct(support: &MonomialIdeal) -> Result<NewtonPolygonLct, IdealsError> {
    if support.dim() != 2 {
        return Err(IdealsError::NotPlanar(support.dim()));
    }
    if support.is_trivial() {
        return Err(IdealsError::TrivialIdeal);
    }
    let gens = support.generators();
    let n = gens.len();
    // Variables: t, then one mixing weight per support monomial.
    let mut objective = vec![Rational::zero(); n + 1];
    objective[0] = Rational::one();
    let mut lp = LinearProgram::minimize(objective);
    lp.set_all_nonnegative();
    let mut row = vec![Rational::zero(); n + 1];
    for k in 0..n {
        row[k + 1] = Rational::one();
    }
    lp.add_constraint(row, Relation::Eq, Rational::one()).unwrap();
    for coord in 0..2 {
        let mut row = vec![Rational::zero(); n + 1];
        row[0] = -Rational::one();
        for (k, g) in gens.iter().enumerate() {
            row[k + 1] = Rational::from(g[coord].clone());
        }
        // mixed coordinate <= t.
        lp.add_constraint(row, Relation::Le, Rational::zero())
            .unwrap();
    }
    let LpOutcome::Optimal { value: t0, .. } = lp.solve() else {
        unreachable!("the diagonal always meets the polygon of a nonzero support");
    };
    let value = if t0 <= Rational::one() {
        Rational::one()
    } else {
        t0.recip()
    };
    let has_pure_x = gens.iter().any(|g| g[1].is_zero());
    let has_pure_y = gens.iter().any(|g| g[0].is_zero());
    Ok(NewtonPolygonLct {
        value,
        assumes_nondegenerate: true,
        non_isolated_warning: !(has_pure_x && has_pure_y),
    })
}

/// A weighted homogeneous polynomial: every term has the same weighted
/// degree with respect to fixed positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedHomPoly {
    weights: Vec<BigInt>,
    terms: BTreeMap<Vec<BigInt>, Rational>,
    degree: BigInt,
}

impl WeightedHomPoly {
    pub fn new(
        weights: Vec<BigInt>,
        terms: Vec<(Vec<BigInt>, Rational)>,
    ) -> Result<Self, IdealsError> {
        let dim = weights.len();
        let mut map: BTreeMap<Vec<BigInt>, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != dim {
                return Err(IdealsError::DimensionMismatch(e.len(), dim));
            }
            if e.iter().any(|x| x.is_negative()) {
                return Err(IdealsError::NegativeExponent);
            }
            if c.is_zero() {
                continue;
            }
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(IdealsError::EmptyPolynomial);
        }
        let mut degree: Option<BigInt> = None;
        for e in map.keys() {
            let d: BigInt = e.iter().zip(&weights).map(|(x, w)| x * w).sum();
            match &degree {
                None => degree = Some(d),
                Some(existing) if *existing != d => {
                    return Err(IdealsError::MixedDegrees(existing.clone(), d));
                }
                _ => {}
            }
        }
        Ok(WeightedHomPoly {
            weights,
            terms: map,
            degree: degree.expect("nonempty"),
        })
    }

    pub fn from_u64(
        weights: &[u64],
        terms: &[(&[u64], i64)],
    ) -> Result<Self, IdealsError> {
        WeightedHomPoly::new(
            weights.iter().map(|&w| BigInt::from(w)).collect(),
            terms
                .iter()
                .map(|(e, c)| {
                    (
                        e.iter().map(|&x| BigInt::from(x)).collect(),
                        Rational::from(BigInt::from(*c)),
                    )
                })
                .collect(),
        )
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn degree(&self) -> &BigInt {
        &self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<BigInt>, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[BigInt]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<Vec<BigInt>> {
        self.terms.keys().cloned().collect()
    }

    /// The support as a monomial ideal, for Newton polygon computations.
    pub fn support_ideal(&self) -> MonomialIdeal {
        MonomialIdeal::new(self.dim(), self.support()).expect("nonempty support")
    }

    /// Substitutes `x_i := h` where `h` is weighted homogeneous of degree
    /// `w_i` in the same weights, and returns the expanded polynomial,
    /// which is homogeneous of the same degree again.
    pub fn substitute(&self, i: usize, h: &WeightedHomPoly) -> Result<WeightedHomPoly, IdealsError> {
        if h.weights != self.weights {
            return Err(IdealsError::MismatchedWeights);
        }
        if h.degree != self.weights[i] {
            return Err(IdealsError::BadSubstitutionDegree(
                self.weights[i].clone(),
                h.degree.clone(),
            ));
        }
        let mut acc: BTreeMap<Vec<BigInt>, Rational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[i].to_u64().expect("substitution exponents stay small");
            // term = c * x^(e with e_i = 0) * h^k.
            let mut base = e.clone();
            base[i] = BigInt::zero();
            let mut partial: BTreeMap<Vec<BigInt>, Rational> = BTreeMap::new();
            partial.insert(base, c.clone());
            for _ in 0..k {
                partial = multiply_maps(&partial, &h.terms);
            }
            for (e2, c2) in partial {
                *acc.entry(e2).or_insert_with(Rational::zero) += c2;
            }
        }
        WeightedHomPoly::new(
            self.weights.clone(),
            acc.into_iter().collect(),
        )
    }

    /// Multiplies every coefficient by a nonzero rational.
    pub fn scale(&self, factor: &Rational) -> WeightedHomPoly {
        assert!(!factor.is_zero(), "scaling by zero clears the polynomial");
        WeightedHomPoly {
            weights: self.weights.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
            degree: self.degree.clone(),
        }
    }
}

fn multiply_maps(
    a: &BTreeMap<Vec<BigInt>, Rational>,
    b: &BTreeMap<Vec<BigInt>, Rational>,
) -> BTreeMap<Vec<BigInt>, Rational> {
    let mut out: BTreeMap<Vec<BigInt>, Rational> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<BigInt> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let c = ca * cb;
            let entry = out.entry(e).or_insert_with(Rational::zero);
            *entry += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl fmt::Display for WeightedHomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            if c.is_one() && !e.iter().all(|x| x.is_zero()) {
                write!(f, "{}", monomial_string(e))?;
            } else {
                write!(f, "{}*{}", format_rational(c), monomial_string(e))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    fn lv(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_integers(coords)
    }

    #[test]
    fn minimal_generators_drop_multiples() {
        let ideal = MonomialIdeal::from_u64(2, &[&[2, 0], &[2, 1], &[0, 3], &[1, 3]]).unwrap();
        assert_eq!(
            ideal.generators(),
            &[
                vec![BigInt::from(0), BigInt::from(3)],
                vec![BigInt::from(2), BigInt::from(0)],
            ]
        );
    }

    #[test]
    fn unit_monomial_makes_the_ideal_trivial() {
        let ideal = MonomialIdeal::from_u64(2, &[&[0, 0], &[1, 2]]).unwrap();
        assert!(ideal.is_trivial());
    }

    #[test]
    fn zero_ideal_is_rejected() {
        assert_eq!(
            MonomialIdeal::new(2, vec![]).unwrap_err(),
            IdealsError::ZeroIdeal
        );
    }

    #[test]
    fn ord_of_plane_cusp_ideal() {
        let ideal = MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(ideal.ord_along(&lv(&[3, 2])), rat_int(6));
        assert_eq!(ideal.ord_along(&lv(&[1, 1])), rat_int(2));
    }

    #[test]
    fn ord_of_r_ideal_mixes_factors() {
        // (x1)^1 * m^(1/2) against the weight (2,1,1).
        let principal = MonomialIdeal::from_u64(3, &[&[1, 0, 0]]).unwrap();
        let maximal = MonomialIdeal::maximal(3);
        let r_ideal = MonomialRIdeal::new(
            3,
            vec![(principal, rat_int(1)), (maximal, rat(1, 2))],
        )
        .unwrap();
        assert_eq!(r_ideal.ord_along(&lv(&[2, 1, 1])), rat(5, 2));
    }

    #[test]
    fn product_and_power() {
        let m = MonomialIdeal::maximal(2);
        let m2 = m.pow(2);
        assert_eq!(
            m2.generators(),
            &[
                vec![BigInt::from(0), BigInt::from(2)],
                vec![BigInt::from(1), BigInt::from(1)],
                vec![BigInt::from(2), BigInt::from(0)],
            ]
        );
        assert_eq!(m.pow(0), MonomialIdeal::trivial(2));
    }

    #[test]
    fn r_ideal_power_scales_exponents() {
        let cusp = MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]]).unwrap();
        let a = MonomialRIdeal::from_ideal(cusp, rat(5, 6)).unwrap();
        let b = a.pow(&rat(2, 5)).unwrap();
        assert_eq!(b.factors()[0].1, rat(1, 3));
    }

    #[test]
    fn zero_exponent_factors_vanish() {
        let m = MonomialIdeal::maximal(2);
        let r = MonomialRIdeal::new(2, vec![(m, rat_int(0))]).unwrap();
        assert!(r.is_trivial());
    }

    #[test]
    fn json_round_trip_matches_schema() {
        let cusp = MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]]).unwrap();
        let r = MonomialRIdeal::from_ideal(cusp, rat(5, 6)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"dim":2,"factors":[{"gens":[[0,3],[2,0]],"exp":"5/6"}]}"#
        );
        let back: MonomialRIdeal = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn json_rejects_negative_exponent_factor() {
        let text = r#"{"dim":2,"factors":[{"gens":[[1,0]],"exp":"-1/2"}]}"#;
        assert!(serde_json::from_str::<MonomialRIdeal>(text).is_err());
    }

    #[test]
    fn polyhedron_membership_of_maximal_ideal() {
        let m = MonomialRIdeal::from_ideal(MonomialIdeal::maximal(2), rat_int(1)).unwrap();
        let one = vec![rat_int(1), rat_int(1)];
        assert!(newton_polyhedron_membership(&m, &one, &rat_int(2)).unwrap());
        assert!(!newton_polyhedron_membership(&m, &one, &rat_int(3)).unwrap());
    }

    #[test]
    fn polygon_lct_of_cusp_node_and_conic() {
        let cusp = MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]]).unwrap();
        let got = newton_polygon_lct(&cusp).unwrap();
        assert_eq!(got.value, rat(5, 6));
        assert!(got.assumes_nondegenerate);
        assert!(!got.non_isolated_warning);

        let node = MonomialIdeal::from_u64(2, &[&[1, 1]]).unwrap();
        let got = newton_polygon_lct(&node).unwrap();
        assert_eq!(got.value, rat_int(1));
        assert!(got.non_isolated_warning, "xy has no pure powers");

        let conic = MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 2]]).unwrap();
        assert_eq!(newton_polygon_lct(&conic).unwrap().value, rat_int(1));
    }

    #[test]
    fn polygon_lct_flags_non_isolated_double_line() {
        let double_line = MonomialIdeal::from_u64(2, &[&[2, 0]]).unwrap();
        let got = newton_polygon_lct(&double_line).unwrap();
        assert_eq!(got.value, rat(1, 2));
        assert!(got.non_isolated_warning);
    }

    #[test]
    fn weighted_poly_validates_homogeneity() {
        let err = WeightedHomPoly::from_u64(&[2, 1, 1], &[(&[1, 0, 1], 1), (&[0, 2, 0], 1)])
            .unwrap_err();
        assert_eq!(err, IdealsError::MixedDegrees(BigInt::from(2), BigInt::from(3)));
    }

    #[test]
    fn substitution_cancels_the_stray_term() {
        // f = x1 x3 + x2^3 + x2^2 x3 with weights (2,1,1); x1 := x1 - x2^2
        // leaves x1 x3 + x2^3.
        let f = WeightedHomPoly::from_u64(
            &[2, 1, 1],
            &[(&[1, 0, 1], 1), (&[0, 3, 0], 1), (&[0, 2, 1], 1)],
        )
        .unwrap();
        let h = WeightedHomPoly::from_u64(&[2, 1, 1], &[(&[1, 0, 0], 1), (&[0, 2, 0], -1)])
            .unwrap();
        let g = f.substitute(0, &h).unwrap();
        let expected =
            WeightedHomPoly::from_u64(&[2, 1, 1], &[(&[1, 0, 1], 1), (&[0, 3, 0], 1)]).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn substitution_rejects_wrong_degree() {
        let f = WeightedHomPoly::from_u64(&[2, 1, 1], &[(&[1, 0, 1], 1)]).unwrap();
        let h = WeightedHomPoly::from_u64(&[2, 1, 1], &[(&[0, 1, 0], 1)]).unwrap();
        assert_eq!(
            f.substitute(0, &h).unwrap_err(),
            IdealsError::BadSubstitutionDegree(BigInt::from(2), BigInt::from(1))
        );
    }
}
