//! Lattice vectors and cyclic quotient overlattices of `Z^d`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{merge_congruences, Congruence};
use super::{AlgebraError, Rational};

/// A point of `Q^d`, usually a lattice point of some quotient lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector {
    #[serde(with = "super::rational_vec_string")]
    coords: Vec<Rational>,
}

impl LatticeVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        LatticeVector { coords }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        LatticeVector {
            coords: coords.iter().map(|&c| Rational::from(BigInt::from(c))).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector {
            coords: vec![Rational::zero(); dim],
        }
    }

    pub fn standard_basis(dim: usize, i: usize) -> Self {
        let mut coords = vec![Rational::zero(); dim];
        coords[i] = Rational::one();
        LatticeVector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Rational {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coords.iter().all(|c| !c.is_negative())
    }

    /// Sum of the coordinates. For a toric valuation on a germ whose
    /// canonical class is trivialized on coordinates this is the log
    /// discrepancy function.
    pub fn coordinate_sum(&self) -> Rational {
        self.coords.iter().sum()
    }

    /// Inner product with an exponent vector.
    pub fn pairing(&self, exponents: &[BigInt]) -> Rational {
        assert_eq!(self.coords.len(), exponents.len(), "dimension mismatch");
        self.coords
            .iter()
            .zip(exponents)
            .map(|(c, e)| c * Rational::from(e.clone()))
            .sum()
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        LatticeVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> LatticeVector {
        LatticeVector {
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    /// The coordinates as integers, when all of them are integral.
    pub fn as_integers(&self) -> Option<Vec<BigInt>> {
        self.coords
            .iter()
            .map(|c| c.denom().is_one().then(|| c.numer().clone()))
            .collect()
    }

    /// Clears denominators: returns `(m * self, m)` with minimal `m >= 1`.
    pub fn clear_denominators(&self) -> (Vec<BigInt>, BigInt) {
        let mut m = BigInt::one();
        for c in &self.coords {
            m = m.lcm(c.denom());
        }
        let scaled = self
            .coords
            .iter()
            .map(|c| (c * Rational::from(m.clone())).to_integer())
            .collect();
        (scaled, m)
    }
}

impl std::fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", super::format_rational(c))?;
        }
        write!(f, ")")
    }
}

/// The lattice `N = Z^d + Z * (1/r)(a_1,...,a_d)` of a cyclic quotient
/// `A^d / Z_r(a_1,...,a_d)`.
///
/// Stored data is normalized so that `r` is the true index of `Z^d` in `N`
/// and the action has no pseudo-reflection, that is, every standard basis
/// vector is primitive in `N`.
#[derive(Debug, Clone)]
pub struct QuotientLattice {
    dim: usize,
    order: BigInt,
    weights: Vec<BigInt>,
}

impl QuotientLattice {
    /// The plain lattice `Z^d`.
    pub fn standard(dim: usize) -> Self {
        QuotientLattice {
            dim,
            order: BigInt::one(),
            weights: vec![BigInt::zero(); dim],
        }
    }

    /// Builds `Z^d + Z * (1/r)(a_1,...,a_d)`.
    ///
    /// The pair `(r, a)` is reduced so that `r` equals the index of `Z^d`,
    /// and the construction fails when some coordinate hyperplane is fixed
    /// pointwise by part of the group, since such an action is not a
    /// quotient singularity datum in the usual sense.
    pub fn new(order: BigInt, weights: Vec<BigInt>) -> Result<Self, AlgebraError> {
        if order <= BigInt::zero() {
            return Err(AlgebraError::NonPositiveOrder(order));
        }
        let dim = weights.len();
        let mut weights: Vec<BigInt> = weights.iter().map(|w| w.mod_floor(&order)).collect();
        // The subgroup generated by (1/r)a has order r / gcd(r, a).
        let mut g = order.clone();
        for w in &weights {
            g = g.gcd(w);
        }
        let order = &order / &g;
        for w in weights.iter_mut() {
            *w = &*w / &g;
        }
        if order.is_one() {
            return Ok(QuotientLattice::standard(dim));
        }
        let lattice = QuotientLattice {
            dim,
            order,
            weights,
        };
        for i in 0..dim {
            // gcd of r with the weights away from i detects a subgroup fixing
            // the hyperplane x_i = 0.
            let mut h = lattice.order.clone();
            for (j, w) in lattice.weights.iter().enumerate() {
                if j != i {
                    h = h.gcd(w);
                }
            }
            if !h.is_one() {
                return Err(AlgebraError::PseudoReflection(i));
            }
        }
        Ok(lattice)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> &BigInt {
        &self.order
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn is_standard(&self) -> bool {
        self.order.is_one()
    }

    /// Lexicographically smallest weight vector among the generators of the
    /// same cyclic group. Two descriptions define one lattice exactly when
    /// these agree.
    pub fn canonical_weights(&self) -> Vec<BigInt> {
        let mut best: Option<Vec<BigInt>> = None;
        let mut k = BigInt::one();
        while k < self.order {
            if k.gcd(&self.order).is_one() {
                let candidate: Vec<BigInt> = self
                    .weights
                    .iter()
                    .map(|w| (w * &k).mod_floor(&self.order))
                    .collect();
                if best.as_ref().map(|b| candidate < *b).unwrap_or(true) {
                    best = Some(candidate);
                }
            }
            k += 1;
        }
        best.unwrap_or_else(|| vec![BigInt::zero(); self.dim])
    }

    /// Membership test for `v` together with the witness class `k` such that
    /// `r v = k (a_1,...,a_d) mod r Z^d`.
    pub fn membership_class(&self, v: &LatticeVector) -> Option<Congruence> {
        if v.dim() != self.dim {
            return None;
        }
        let mut numerators = Vec::with_capacity(self.dim);
        for c in v.coords() {
            let scaled = c * Rational::from(self.order.clone());
            if !scaled.denom().is_one() {
                return None;
            }
            numerators.push(scaled.to_integer());
        }
        // Solve k * a_i = u_i (mod r) for every i simultaneously.
        let mut class = Congruence::new(BigInt::zero(), BigInt::one());
        for (a, u) in self.weights.iter().zip(&numerators) {
            let g = a.gcd(&self.order);
            if !(u % &g).is_zero() {
                return None;
            }
            let m = &self.order / &g;
            if m.is_one() {
                continue;
            }
            let inv = super::linalg::modular_inverse(&(a / &g).mod_floor(&m), &m)?;
            let k = ((u / &g) * inv).mod_floor(&m);
            class = merge_congruences(&class, &Congruence::new(k, m))?;
        }
        Some(class)
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.membership_class(v).is_some()
    }

    /// The primitive generator of the ray through `v` inside this lattice.
    ///
    /// `v` may be any nonzero rational vector with non-negative coordinates;
    /// it does not need to lie in the lattice itself.
    pub fn primitive(&self, v: &LatticeVector) -> Result<LatticeVector, AlgebraError> {
        if v.dim() != self.dim {
            return Err(AlgebraError::DimensionMismatch(v.dim(), self.dim));
        }
        if v.is_zero() {
            return Err(AlgebraError::ZeroVector);
        }
        let (scaled, _) = v.clear_denominators();
        let mut g = BigInt::zero();
        for x in &scaled {
            g = g.gcd(x);
        }
        // t is the primitive integer vector on the ray.
        let t: Vec<BigInt> = scaled.iter().map(|x| x / &g).collect();
        let t_vec = LatticeVector::new(t.iter().map(|x| Rational::from(x.clone())).collect());
        // Candidates on the ray inside N are (c/r) t; c = r always works.
        let mut c = BigInt::one();
        while c <= self.order {
            let candidate = t_vec.scale(&Rational::new(c.clone(), self.order.clone()));
            if self.contains(&candidate) {
                return Ok(candidate);
            }
            c += 1;
        }
        unreachable!("c = r always yields an integer vector");
    }

    /// All lattice points with coordinates in `[0, b_1) x ... x [0, b_d)`,
    /// sorted lexicographically.
    ///
    /// The points are generated coset by coset, so the cost is proportional
    /// to the number of points returned, `r * b_1 * ... * b_d`.
    pub fn points_in_box(&self, bounds: &[BigInt]) -> Vec<LatticeVector> {
        assert_eq!(bounds.len(), self.dim, "dimension mismatch");
        if bounds.iter().any(|b| b <= &BigInt::zero()) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut k = BigInt::zero();
        while k < self.order {
            // Coset representative offsets in [0, r)^d.
            let offsets: Vec<BigInt> = self
                .weights
                .iter()
                .map(|a| (a * &k).mod_floor(&self.order))
                .collect();
            let mut m = vec![BigInt::zero(); self.dim];
            'coset: loop {
                out.push(LatticeVector::new(
                    (0..self.dim)
                        .map(|i| {
                            Rational::new(&offsets[i] + &m[i] * &self.order, self.order.clone())
                        })
                        .collect(),
                ));
                // Odometer increment over the integer box.
                let mut i = self.dim;
                loop {
                    if i == 0 {
                        break 'coset;
                    }
                    i -= 1;
                    m[i] += 1;
                    if m[i] < bounds[i] {
                        break;
                    }
                    m[i] = BigInt::zero();
                }
            }
            k += 1;
        }
        out.sort();
        out
    }
}

impl PartialEq for QuotientLattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.order == other.order
            && self.canonical_weights() == other.canonical_weights()
    }
}

impl Eq for QuotientLattice {}
