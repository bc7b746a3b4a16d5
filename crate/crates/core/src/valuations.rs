//! Toric germs, toric valuations and the certified mld engine.
//!
//! A germ is a cyclic quotient `A^d / Z_r(a_1,...,a_d)` described by its
//! lattice `N = Z^d + Z (1/r)(a_1,...,a_d)` with the positive orthant as
//! cone. A toric valuation is a primitive lattice vector `w` of the cone;
//! its log discrepancy is the coordinate sum `A(w)` and its centre is the
//! coordinate face where `w` is strictly positive.
//!
//! Minimal log discrepancies restrict to toric valuations. For monomial
//! R-ideals on toric germs this loses nothing, since log resolutions can be
//! chosen torically; that standing assumption is cross-checked elsewhere
//! against an independent surface oracle.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{
    AlgebraError, LatticeVector, LinearProgram, LpOutcome, QuotientLattice, Rational, Relation,
};
use crate::ideals::{IdealsError, MonomialRIdeal};

#[derive(Debug, Error, PartialEq)]
pub enum ValuationsError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Ideals(#[from] IdealsError),
    #[error("weight vector is not a valuation of this germ: {0}")]
    InvalidWeight(String),
    #[error("centre face indices must be nonempty and within 0..{dim}")]
    InvalidCentre { dim: usize },
    #[error("ideal lives in dimension {0}, germ in dimension {1}")]
    DimensionMismatch(usize, usize),
    #[error("the base pair is not log canonical: valuation {witness} has log discrepancy {value}")]
    BaseNotLc { witness: String, value: Rational },
    #[error("ideal must be m-primary for threshold descent")]
    NotMPrimary,
    #[error("target {target} exceeds the mld {mld} of the base pair")]
    TargetAboveMld { target: Rational, mld: Rational },
    #[error("threshold descent failed to settle after {0} steps")]
    DescentStalled(usize),
    #[error(
        "no exponent attains target {target}: the value is {value} at the lc \
         threshold {threshold} and minus infinity beyond"
    )]
    NoExponentForTarget {
        target: Rational,
        value: Rational,
        threshold: Rational,
    },
}

/// The germ of a cyclic quotient singularity `A^d / Z_r(a_1,...,a_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricGerm {
    lattice: QuotientLattice,
}

impl ToricGerm {
    /// The smooth germ of `A^d` at the origin.
    pub fn smooth(dim: usize) -> Self {
        ToricGerm {
            lattice: QuotientLattice::standard(dim),
        }
    }

    /// The quotient germ `A^d / Z_r(a_1,...,a_d)`.
    pub fn quotient(r: i64, weights: &[i64]) -> Result<Self, ValuationsError> {
        let lattice = QuotientLattice::new(
            BigInt::from(r),
            weights.iter().map(|&a| BigInt::from(a)).collect(),
        )?;
        Ok(ToricGerm { lattice })
    }

    pub fn from_lattice(lattice: QuotientLattice) -> Self {
        ToricGerm { lattice }
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// The index of the germ, the order of the quotient group.
    pub fn index(&self) -> &BigInt {
        self.lattice.order()
    }

    pub fn weights(&self) -> &[BigInt] {
        self.lattice.weights()
    }

    pub fn lattice(&self) -> &QuotientLattice {
        &self.lattice
    }

    pub fn is_smooth(&self) -> bool {
        self.lattice.is_standard()
    }

    /// The transverse germ along a coordinate face: the lattice of vectors
    /// supported on `support`, expressed in the face coordinates.
    ///
    /// Vectors of `N` vanishing off the face form `Z^s + Z (1/h) a'` where
    /// `h = gcd(r, a_j : j off the face)`; this is again well-formed because
    /// a pseudo-reflection of the slice would be one of the ambient germ.
    pub fn slice(&self, support: &BTreeSet<usize>) -> QuotientLattice {
        let r = self.lattice.order();
        let mut h = r.clone();
        for (j, a) in self.lattice.weights().iter().enumerate() {
            if !support.contains(&j) {
                h = h.gcd(a);
            }
        }
        let weights: Vec<BigInt> = support
            .iter()
            .map(|&j| self.lattice.weights()[j].mod_floor(&h))
            .collect();
        QuotientLattice::new(h, weights).expect("slices of well-formed germs are well-formed")
    }
}

impl fmt::Display for ToricGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_smooth() {
            write!(f, "A^{}", self.dim())
        } else {
            let ws: Vec<String> = self.weights().iter().map(|a| a.to_string()).collect();
            write!(f, "A^{}/Z_{}({})", self.dim(), self.index(), ws.join(","))
        }
    }
}

/// A toric valuation: a primitive lattice vector of the cone.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricValuation {
    germ: ToricGerm,
    weight: LatticeVector,
}

impl ToricValuation {
    /// Builds the valuation of the ray through `ray`, normalizing to the
    /// primitive lattice generator.
    pub fn new(germ: &ToricGerm, ray: &LatticeVector) -> Result<Self, ValuationsError> {
        if ray.dim() != germ.dim() {
            return Err(ValuationsError::DimensionMismatch(ray.dim(), germ.dim()));
        }
        if !ray.is_nonnegative() || ray.is_zero() {
            return Err(ValuationsError::InvalidWeight(ray.to_string()));
        }
        let weight = germ.lattice().primitive(ray)?;
        Ok(ToricValuation {
            germ: germ.clone(),
            weight,
        })
    }

    pub fn germ(&self) -> &ToricGerm {
        &self.germ
    }

    pub fn weight(&self) -> &LatticeVector {
        &self.weight
    }

    /// Indices where the weight is strictly positive; the centre of the
    /// valuation is the coordinate subspace where these vanish.
    pub fn support(&self) -> BTreeSet<usize> {
        self.weight
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    /// Exceptional means the centre has codimension at least two.
    pub fn is_exceptional(&self) -> bool {
        self.support().len() >= 2
    }
}

impl fmt::Display for ToricValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.weight)
    }
}

/// A torus-invariant centre: the coordinate subspace where the variables
/// indexed by `support` vanish. Valuations with this centre are the lattice
/// vectors strictly positive exactly on `support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentreFace {
    support: BTreeSet<usize>,
}

impl CentreFace {
    /// The closed point: every coordinate vanishes.
    pub fn origin(dim: usize) -> Self {
        CentreFace {
            support: (0..dim).collect(),
        }
    }

    /// The subspace `{x_i = 0 : i in indices}`.
    pub fn face(indices: &[usize], dim: usize) -> Result<Self, ValuationsError> {
        let support: BTreeSet<usize> = indices.iter().copied().collect();
        if support.is_empty() || support.iter().any(|&i| i >= dim) {
            return Err(ValuationsError::InvalidCentre { dim });
        }
        Ok(CentreFace { support })
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn is_origin(&self, dim: usize) -> bool {
        self.support.len() == dim
    }
}

/// The value of an mld: a rational, or minus infinity for a non-lc pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MldValue {
    Finite(Rational),
    MinusInfinity,
}

impl MldValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            MldValue::Finite(v) => Some(v),
            MldValue::MinusInfinity => None,
        }
    }

    pub fn is_minus_infinity(&self) -> bool {
        matches!(self, MldValue::MinusInfinity)
    }
}

impl fmt::Display for MldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MldValue::Finite(v) => write!(f, "{}", crate::algebra::format_rational(v)),
            MldValue::MinusInfinity => write!(f, "-inf"),
        }
    }
}

/// The result of an mld computation together with its certificate trail.
#[derive(Debug, Clone, PartialEq)]
pub struct MldReport {
    pub value: MldValue,
    /// A valuation attaining the value; for minus infinity, one with
    /// negative log discrepancy as evidence of non-lc.
    pub witness: Option<ToricValuation>,
    /// Exact minimum of the log discrepancy over the real cone cut out by
    /// `w_i >= 1/r` on the centre's support. Always a lower bound for the
    /// lattice minimum.
    pub lp_lower_bound: Rational,
    /// The box edge at which the search stopped.
    pub search_box_bound: u64,
    /// True when the value is provably the minimum: either it equals the LP
    /// bound, or it was stable across a doubling with the witness strictly
    /// inside the smaller box. Minus infinity outcomes are exact, hence
    /// certified.
    pub certified: bool,
}

impl MldReport {
    pub fn finite_value(&self) -> Option<&Rational> {
        self.value.finite()
    }

    pub fn expect_finite(&self) -> &Rational {
        self.value.finite().expect("expected a finite mld")
    }
}

/// Tuning knobs for the box search.
#[derive(Debug, Clone, Copy)]
pub struct MldOptions {
    /// First box edge to enumerate.
    pub initial_box: u64,
    /// Edge length after which the search stops with an uncertified report.
    pub box_limit: u64,
}

impl Default for MldOptions {
    fn default() -> Self {
        MldOptions {
            initial_box: 8,
            box_limit: 64,
        }
    }
}

/// Log discrepancy `A(w)` of a valuation over the bare germ: the coordinate
/// sum of the weight vector.
pub fn log_discrepancy(germ: &ToricGerm, valuation: &ToricValuation) -> Rational {
    debug_assert_eq!(germ, valuation.germ());
    valuation.weight().coordinate_sum()
}

/// Log discrepancy of a valuation with respect to a pair: the boundary is a
/// monomial R-ideal together with an R-divisor supported on the coordinate
/// hyperplanes.
///
/// `a = A(w) - ord_w(divisor) - ord_w(ideal)`.
pub fn a_log_discrepancy(
    germ: &ToricGerm,
    valuation: &ToricValuation,
    ideal: &MonomialRIdeal,
    divisor: &[Rational],
) -> Result<Rational, ValuationsError> {
    if ideal.dim() != germ.dim() {
        return Err(ValuationsError::DimensionMismatch(ideal.dim(), germ.dim()));
    }
    if !divisor.is_empty() && divisor.len() != germ.dim() {
        return Err(ValuationsError::DimensionMismatch(divisor.len(), germ.dim()));
    }
    let w = valuation.weight();
    let mut a = w.coordinate_sum();
    for (i, delta) in divisor.iter().enumerate() {
        a -= delta * w.coord(i);
    }
    a -= ideal.ord_along(w);
    Ok(a)
}

/// Restriction of the factors of an R-ideal to the coordinates in `support`,
/// as plain generator matrices paired with exponents.
fn slice_factors(
    ideal: &MonomialRIdeal,
    support: &BTreeSet<usize>,
) -> Vec<(Vec<Vec<BigInt>>, Rational)> {
    ideal
        .factors()
        .iter()
        .map(|(factor, exp)| {
            let gens: Vec<Vec<BigInt>> = factor
                .generators()
                .iter()
                .map(|g| support.iter().map(|&i| g[i].clone()).collect())
                .collect();
            (gens, exp.clone())
        })
        .collect()
}

/// Exact evaluation engine for one centre face: slice lattice plus the
/// restricted factor data.
struct FaceEngine {
    slice: QuotientLattice,
    factors: Vec<(Vec<Vec<BigInt>>, Rational)>,
}

impl FaceEngine {
    fn new(germ: &ToricGerm, ideal: &MonomialRIdeal, support: &BTreeSet<usize>) -> Self {
        FaceEngine {
            slice: germ.slice(support),
            factors: slice_factors(ideal, support),
        }
    }

    fn dim(&self) -> usize {
        self.slice.dim()
    }

    /// Log discrepancy of the scaled lattice point `n / h`.
    fn a_of_scaled(&self, n: &[BigInt]) -> Rational {
        let h = self.slice.order().clone();
        let mut total = Rational::new(n.iter().sum::<BigInt>(), h.clone());
        for (gens, exp) in &self.factors {
            let ord = gens
                .iter()
                .map(|g| g.iter().zip(n).map(|(e, x)| e * x).sum::<BigInt>())
                .min()
                .expect("nonempty generators");
            total -= exp * Rational::new(ord, h.clone());
        }
        total
    }

    /// Minimum of the log discrepancy over the real region, `simplex` picking
    /// between the closed unit simplex (lc test) and `u_i >= 1/h` (lower
    /// bound for the lattice search).
    fn real_minimum(&self, simplex: bool) -> (Rational, Vec<Rational>) {
        let s = self.dim();
        let k = self.factors.len();
        // Variables: u_1..u_s, then one order variable per factor.
        let mut objective = vec![Rational::one(); s];
        objective.extend(self.factors.iter().map(|(_, exp)| -exp.clone()));
        let mut lp = LinearProgram::minimize(objective);
        for i in 0..s {
            lp.set_nonnegative(i);
        }
        // Order variables stay below every generator pairing.
        for (j, (gens, _)) in self.factors.iter().enumerate() {
            for g in gens {
                let mut row = vec![Rational::zero(); s + k];
                for (i, e) in g.iter().enumerate() {
                    row[i] = -Rational::from(e.clone());
                }
                row[s + j] = Rational::one();
                lp.add_constraint(row, Relation::Le, Rational::zero())
                    .unwrap();
            }
        }
        if simplex {
            let mut row = vec![Rational::zero(); s + k];
            for cell in row.iter_mut().take(s) {
                *cell = Rational::one();
            }
            lp.add_constraint(row, Relation::Eq, Rational::one())
                .unwrap();
        } else {
            let h = self.slice.order().clone();
            for i in 0..s {
                let mut row = vec![Rational::zero(); s + k];
                row[i] = Rational::one();
                lp.add_constraint(row, Relation::Ge, Rational::new(BigInt::one(), h.clone()))
                    .unwrap();
            }
        }
        match lp.solve() {
            LpOutcome::Optimal { value, point } => (value, point[..s].to_vec()),
            // Factors with positive exponents can always be matched by their
            // order variables, and the u-region is nonempty, so the program
            // is feasible; it is bounded on the simplex by construction.
            outcome => unreachable!("face LP must be solvable, got {outcome:?}"),
        }
    }

    /// Least log discrepancy over lattice points with all scaled coordinates
    /// in `[1, h*bound]`, with the lexicographically least argmin.
    fn lattice_minimum(&self, bound: u64) -> (Rational, Vec<BigInt>) {
        let s = self.dim();
        let h = self.slice.order();
        let mut best: Option<(Rational, Vec<BigInt>)> = None;
        let mut k = BigInt::zero();
        while &k < h {
            let offsets: Vec<BigInt> = self
                .slice
                .weights()
                .iter()
                .map(|a| (a * &k).mod_floor(h))
                .collect();
            // n_i = offsets_i + h*m_i must lie in [1, h*bound].
            let lows: Vec<BigInt> = offsets
                .iter()
                .map(|o| if o.is_zero() { BigInt::one() } else { BigInt::zero() })
                .collect();
            let highs: Vec<BigInt> = offsets
                .iter()
                .map(|o| {
                    if o.is_zero() {
                        BigInt::from(bound)
                    } else {
                        BigInt::from(bound) - 1
                    }
                })
                .collect();
            if lows.iter().zip(&highs).any(|(l, hgh)| l > hgh) {
                k += 1;
                continue;
            }
            let mut m = lows.clone();
            'points: loop {
                let n: Vec<BigInt> = (0..s).map(|i| &offsets[i] + &m[i] * h).collect();
                let a = self.a_of_scaled(&n);
                let better = match &best {
                    None => true,
                    Some((bv, bn)) => a < *bv || (a == *bv && n < *bn),
                };
                if better {
                    best = Some((a, n));
                }
                let mut i = s;
                loop {
                    if i == 0 {
                        break 'points;
                    }
                    i -= 1;
                    m[i] += 1;
                    if m[i] <= highs[i] {
                        break;
                    }
                    m[i] = lows[i].clone();
                }
            }
            k += 1;
        }
        best.expect("the box [1, bound]^s always contains integer points")
    }

    /// Embeds slice coordinates back into the ambient germ.
    fn embed(&self, support: &BTreeSet<usize>, ambient_dim: usize, n: &[BigInt]) -> LatticeVector {
        let h = self.slice.order().clone();
        let mut coords = vec![Rational::zero(); ambient_dim];
        for (slot, &i) in support.iter().enumerate() {
            coords[i] = Rational::new(n[slot].clone(), h.clone());
        }
        LatticeVector::new(coords)
    }

    /// A lattice direction strictly inside the slice cone with negative log
    /// discrepancy, built by perturbing a negative vertex of the closed
    /// simplex towards the interior.
    fn negative_interior_point(&self, vertex: &[Rational], value: &Rational) -> Vec<BigInt> {
        let s = self.dim();
        debug_assert!(value.is_negative());
        // a(v + e*1) <= a(v) + e*s because orders only grow; e = -a(v)/(2s)
        // keeps the perturbation negative.
        let eps = -value / Rational::from(BigInt::from(2 * s as i64));
        let shifted: Vec<Rational> = vertex.iter().map(|c| c + &eps).collect();
        let point = LatticeVector::new(shifted);
        let (scaled, _) = point.clear_denominators();
        // Clear the slice order too so the direction is a lattice point.
        scaled
            .iter()
            .map(|x| x * self.slice.order())
            .collect()
    }
}

/// Minimal log discrepancy of `(germ, ideal)` along a torus-invariant
/// centre, with default search options.
pub fn mld(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
    centre: &CentreFace,
) -> Result<MldReport, ValuationsError> {
    mld_with_options(germ, ideal, centre, &MldOptions::default())
}

/// Minimal log discrepancy with explicit box-search options.
pub fn mld_with_options(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
    centre: &CentreFace,
    options: &MldOptions,
) -> Result<MldReport, ValuationsError> {
    if ideal.dim() != germ.dim() {
        return Err(ValuationsError::DimensionMismatch(ideal.dim(), germ.dim()));
    }
    let support = centre.support();
    if support.is_empty() || support.iter().any(|&i| i >= germ.dim()) {
        return Err(ValuationsError::InvalidCentre { dim: germ.dim() });
    }
    let engine = FaceEngine::new(germ, ideal, support);

    // Non-lc detection on the closed cone: a negative value anywhere forces
    // the mld along this centre to minus infinity.
    let (simplex_min, vertex) = engine.real_minimum(true);
    if simplex_min.is_negative() {
        let n = engine.negative_interior_point(&vertex, &simplex_min);
        let ray = engine.embed(support, germ.dim(), &n);
        let witness = ToricValuation::new(germ, &ray)?;
        let box_bound = n
            .iter()
            .map(|x| {
                Rational::new(x.clone(), engine.slice.order().clone())
                    .ceil()
                    .to_integer()
                    .to_u64()
                    .unwrap_or(u64::MAX)
            })
            .max()
            .unwrap_or(1)
            .max(1);
        return Ok(MldReport {
            value: MldValue::MinusInfinity,
            witness: Some(witness),
            lp_lower_bound: simplex_min,
            search_box_bound: box_bound,
            certified: true,
        });
    }

    let (lp_lower_bound, _) = engine.real_minimum(false);
    let mut bound = options.initial_box.max(1);
    let (mut value, mut argmin) = engine.lattice_minimum(bound);
    let mut certified = value == lp_lower_bound;
    while !certified {
        if bound >= options.box_limit {
            break;
        }
        let doubled = (bound * 2).min(options.box_limit);
        let (next_value, next_argmin) = engine.lattice_minimum(doubled);
        // Stable across a doubling with the witness strictly inside the
        // smaller box certifies the minimum for this search protocol.
        let interior = argmin
            .iter()
            .all(|x| Rational::new(x.clone(), engine.slice.order().clone()) < Rational::from(BigInt::from(bound)));
        if next_value == value && next_argmin == argmin && interior {
            certified = true;
            bound = doubled;
            break;
        }
        value = next_value;
        argmin = next_argmin;
        bound = doubled;
        certified = value == lp_lower_bound;
    }

    let ray = engine.embed(support, germ.dim(), &argmin);
    let witness = ToricValuation::new(germ, &ray)?;
    Ok(MldReport {
        value: MldValue::Finite(value),
        witness: Some(witness),
        lp_lower_bound,
        search_box_bound: bound,
        certified,
    })
}

/// Outcome of a threshold computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Threshold {
    Finite(Rational),
    Infinite,
}

impl Threshold {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Threshold::Finite(v) => Some(v),
            Threshold::Infinite => None,
        }
    }

    pub fn expect_finite(&self) -> &Rational {
        self.finite().expect("expected a finite threshold")
    }
}

/// Log canonical threshold of `b` with respect to the lc pair
/// `(germ, base)`: the largest `t` such that `(germ, base * b^t)` is lc.
///
/// Computed exactly as the minimum of `(A(w) - ord_w base) / ord_w b` over
/// the closed cone via one LP with order variables for both ideals; the
/// minimum over real weight vectors equals the minimum over valuations by
/// homogeneity of the ratio.
pub fn lc_threshold(
    germ: &ToricGerm,
    base: &MonomialRIdeal,
    b: &MonomialRIdeal,
) -> Result<Threshold, ValuationsError> {
    lc_threshold_witness(germ, base, b).map(|(t, _)| t)
}

/// Like [`lc_threshold`], but also returns a valuation attaining the
/// threshold: the optimal LP direction scaled to a lattice ray.  Its log
/// discrepancy against `base · b^t` is exactly zero at the threshold, which
/// certifies the value without any box search.  `None` only for an infinite
/// threshold.
pub fn lc_threshold_witness(
    germ: &ToricGerm,
    base: &MonomialRIdeal,
    b: &MonomialRIdeal,
) -> Result<(Threshold, Option<ToricValuation>), ValuationsError> {
    if base.dim() != germ.dim() || b.dim() != germ.dim() {
        return Err(ValuationsError::DimensionMismatch(base.dim(), germ.dim()));
    }
    let check = is_lc(germ, base)?;
    if let Some((witness, value)) = check.violator {
        return Err(ValuationsError::BaseNotLc {
            witness: witness.to_string(),
            value,
        });
    }
    if b.is_trivial() {
        return Ok((Threshold::Infinite, None));
    }
    let d = germ.dim();
    let all: BTreeSet<usize> = (0..d).collect();
    let base_factors = slice_factors(base, &all);
    let b_factors = slice_factors(b, &all);
    let kb = base_factors.len();
    let kc = b_factors.len();
    // Variables: u_1..u_d, base order vars, b order vars.
    let mut objective = vec![Rational::one(); d];
    objective.extend(base_factors.iter().map(|(_, exp)| -exp.clone()));
    objective.extend(std::iter::repeat(Rational::zero()).take(kc));
    let mut lp = LinearProgram::minimize(objective);
    for i in 0..d {
        lp.set_nonnegative(i);
    }
    let total = d + kb + kc;
    for (j, (gens, _)) in base_factors.iter().enumerate() {
        for g in gens {
            let mut row = vec![Rational::zero(); total];
            for (i, e) in g.iter().enumerate() {
                row[i] = -Rational::from(e.clone());
            }
            row[d + j] = Rational::one();
            lp.add_constraint(row, Relation::Le, Rational::zero())
                .unwrap();
        }
    }
    for (j, (gens, _)) in b_factors.iter().enumerate() {
        for g in gens {
            let mut row = vec![Rational::zero(); total];
            for (i, e) in g.iter().enumerate() {
                row[i] = -Rational::from(e.clone());
            }
            row[d + kb + j] = Rational::one();
            lp.add_constraint(row, Relation::Le, Rational::zero())
                .unwrap();
        }
    }
    // Normalize ord_w(b) = 1; with the order variables free to rise to the
    // true minima, requiring at least 1 is enough.
    let mut row = vec![Rational::zero(); total];
    for (j, (_, exp)) in b_factors.iter().enumerate() {
        row[d + kb + j] = exp.clone();
    }
    lp.add_constraint(row, Relation::Ge, Rational::one())
        .unwrap();
    match lp.solve() {
        LpOutcome::Optimal { value, point } => {
            // The weight block of the optimal point spans the tight ray; its
            // primitive lattice generator has log discrepancy exactly zero
            // against the threshold pair by homogeneity.
            let ray = LatticeVector::new(point[..d].to_vec());
            let witness = ToricValuation::new(germ, &ray)?;
            Ok((Threshold::Finite(value), Some(witness)))
        }
        outcome => unreachable!("threshold LP is feasible and bounded, got {outcome:?}"),
    }
}

/// Is the R-ideal m-primary: does it contain a pure power of each variable.
pub(crate) fn is_m_primary(ideal: &MonomialRIdeal) -> bool {
    if ideal.is_trivial() {
        return false;
    }
    let d = ideal.dim();
    // The product is m-primary iff each nontrivial factor is; factors are
    // nontrivial by construction.
    ideal.factors().iter().all(|(factor, _)| {
        (0..d).all(|i| {
            factor
                .generators()
                .iter()
                .any(|g| g.iter().enumerate().all(|(j, e)| j == i || e.is_zero()))
        })
    })
}

/// The exponent `t` with `mld_origin(germ, base * b^t) = a`, by exact
/// parametric descent on the active witness.
///
/// The map `t -> mld(base * b^t)` is concave, piecewise linear and
/// non-increasing; starting from the witness of `mld(base)` and repeatedly
/// solving `a_w(base) - t ord_w(b) = a` on the current witness walks down
/// finitely many linear pieces and stops exactly at the solution.
pub fn a_lc_threshold(
    germ: &ToricGerm,
    base: &MonomialRIdeal,
    b: &MonomialRIdeal,
    target: &Rational,
) -> Result<Rational, ValuationsError> {
    if !is_m_primary(b) {
        return Err(ValuationsError::NotMPrimary);
    }
    a_lc_threshold_unguarded(germ, base, b, target)
}

/// The descent itself, without the m-primary entry check. Callers that can
/// guarantee a solution exists (by continuity between the endpoints) may use
/// it on wider inputs; if the value skips the target — finite above it at the
/// lc threshold, minus infinity beyond — the descent reports that instead.
pub(crate) fn a_lc_threshold_unguarded(
    germ: &ToricGerm,
    base: &MonomialRIdeal,
    b: &MonomialRIdeal,
    target: &Rational,
) -> Result<Rational, ValuationsError> {
    let origin = CentreFace::origin(germ.dim());
    let base_report = mld(germ, base, &origin)?;
    let Some(base_mld) = base_report.finite_value() else {
        return Err(ValuationsError::BaseNotLc {
            witness: base_report
                .witness
                .as_ref()
                .map(|w| w.to_string())
                .unwrap_or_default(),
            value: base_report.lp_lower_bound.clone(),
        });
    };
    if base_mld < target {
        return Err(ValuationsError::TargetAboveMld {
            target: target.clone(),
            mld: base_mld.clone(),
        });
    }
    if base_mld == target {
        return Ok(Rational::zero());
    }
    let witness = base_report.witness.as_ref().expect("finite mld has witness");
    let mut t = solve_on_witness(germ, base, b, target, witness)?;
    // Above the lc threshold of the family every value is minus infinity, and
    // a witness line from that region can shrink t by arbitrarily little, so
    // the first such report jumps straight to the threshold, where the value
    // is finite again.  Below it each iteration lands on a new linear piece
    // of the lower envelope of witness lines, so the cap is only a safety
    // valve.
    const MAX_STEPS: usize = 64;
    let mut jumped = false;
    for _ in 0..MAX_STEPS {
        let pair = base.product(&b.pow(&t)?);
        let report = mld(germ, &pair, &origin)?;
        match report.value {
            MldValue::Finite(ref v) if v == target => return Ok(t),
            MldValue::Finite(ref v) if v > target => {
                // Witness lines sit above the envelope, so solving one always
                // lands at or below the target; a value above it is only ever
                // seen at the lc threshold, where the envelope skips from
                // this value straight to minus infinity.
                return Err(ValuationsError::NoExponentForTarget {
                    target: target.clone(),
                    value: v.clone(),
                    threshold: t,
                });
            }
            MldValue::Finite(_) => {
                // The witness shows the current t overshoots; its linear
                // equation gives the next, strictly smaller t.
                let w = report.witness.as_ref().expect("engine always returns a witness");
                let next = solve_on_witness(germ, base, b, target, w)?;
                debug_assert!(next < t, "descent must strictly decrease");
                t = next;
            }
            MldValue::MinusInfinity => {
                if jumped {
                    return Err(ValuationsError::DescentStalled(MAX_STEPS));
                }
                jumped = true;
                match lc_threshold(germ, base, b)? {
                    Threshold::Finite(t_lc) => t = t_lc,
                    // Trivial ideals never report minus infinity.
                    Threshold::Infinite => {
                        return Err(ValuationsError::DescentStalled(MAX_STEPS))
                    }
                }
            }
        }
    }
    Err(ValuationsError::DescentStalled(MAX_STEPS))
}

/// Solves `a_w(base) - t * ord_w(b) = target` for `t` on a fixed witness.
fn solve_on_witness(
    germ: &ToricGerm,
    base: &MonomialRIdeal,
    b: &MonomialRIdeal,
    target: &Rational,
    witness: &ToricValuation,
) -> Result<Rational, ValuationsError> {
    let a_base = a_log_discrepancy(germ, witness, base, &[])?;
    let ord_b = b.ord_along(witness.weight());
    // Nontrivial monomial ideals have positive order along any witness with
    // full support, which is the only kind the descent produces.
    debug_assert!(ord_b.is_positive(), "witness must see the ideal");
    Ok((a_base - target) / ord_b)
}

/// Result of a singularity class test; `violator` carries a valuation
/// breaking the condition together with its log discrepancy.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub holds: bool,
    pub violator: Option<(ToricValuation, Rational)>,
}

impl ClassReport {
    fn pass() -> Self {
        ClassReport {
            holds: true,
            violator: None,
        }
    }

    fn fail(witness: ToricValuation, value: Rational) -> Self {
        ClassReport {
            holds: false,
            violator: Some((witness, value)),
        }
    }
}

/// Log canonicity of the pair over the whole germ: every toric valuation,
/// exceptional or not, must have non-negative log discrepancy.
pub fn is_lc(germ: &ToricGerm, ideal: &MonomialRIdeal) -> Result<ClassReport, ValuationsError> {
    threshold_class(germ, ideal, &Rational::zero(), false)
}

/// Kawamata log terminality: strictly positive log discrepancies.
pub fn is_klt(germ: &ToricGerm, ideal: &MonomialRIdeal) -> Result<ClassReport, ValuationsError> {
    threshold_class(germ, ideal, &Rational::zero(), true)
}

/// Shared engine for lc and klt: compares the exact minimum over the closed
/// cone against zero. A minimizing vertex scales to an honest valuation, so
/// failure always has a witness.
fn threshold_class(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
    level: &Rational,
    strict: bool,
) -> Result<ClassReport, ValuationsError> {
    if ideal.dim() != germ.dim() {
        return Err(ValuationsError::DimensionMismatch(ideal.dim(), germ.dim()));
    }
    let all: BTreeSet<usize> = (0..germ.dim()).collect();
    let engine = FaceEngine::new(germ, ideal, &all);
    let (min, vertex) = engine.real_minimum(true);
    let ok = if strict { min > *level } else { min >= *level };
    if ok {
        return Ok(ClassReport::pass());
    }
    // Scale the minimizing vertex to a lattice witness; the log discrepancy
    // scales by the same positive factor, preserving the violation.
    let point = LatticeVector::new(vertex);
    let witness = ToricValuation::new(germ, &point)?;
    let value = a_log_discrepancy(germ, &witness, ideal, &[])?;
    Ok(ClassReport::fail(witness, value))
}

/// Canonicity: every exceptional toric valuation has log discrepancy at
/// least one. Exceptional means the support has size at least two, so the
/// test runs the face engine over every coordinate face of codimension at
/// least two.
pub fn is_canonical(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
) -> Result<ClassReport, ValuationsError> {
    exceptional_class(germ, ideal, false)
}

/// Terminality: strictly greater than one on every exceptional valuation.
pub fn is_terminal(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
) -> Result<ClassReport, ValuationsError> {
    exceptional_class(germ, ideal, true)
}

fn exceptional_class(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
    strict: bool,
) -> Result<ClassReport, ValuationsError> {
    if ideal.dim() != germ.dim() {
        return Err(ValuationsError::DimensionMismatch(ideal.dim(), germ.dim()));
    }
    let d = germ.dim();
    let one = Rational::one();
    for support in faces_of_codim_two_or_more(d) {
        let centre = CentreFace { support };
        let report = mld(germ, ideal, &centre)?;
        match report.value {
            MldValue::MinusInfinity => {
                let (witness, value) = minus_infinity_witness(germ, ideal, &report)?;
                return Ok(ClassReport::fail(witness, value));
            }
            MldValue::Finite(ref v) => {
                let ok = if strict { *v > one } else { *v >= one };
                if !ok {
                    let witness = report.witness.clone().expect("finite mld has witness");
                    return Ok(ClassReport::fail(witness, v.clone()));
                }
            }
        }
    }
    Ok(ClassReport::pass())
}

fn minus_infinity_witness(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
    report: &MldReport,
) -> Result<(ToricValuation, Rational), ValuationsError> {
    let witness = report
        .witness
        .clone()
        .expect("minus infinity reports carry a negative witness");
    let value = a_log_discrepancy(germ, &witness, ideal, &[])?;
    Ok((witness, value))
}

fn faces_of_codim_two_or_more(d: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << d) {
        if mask.count_ones() >= 2 {
            let support: BTreeSet<usize> =
                (0..d).filter(|i| mask & (1 << i) != 0).collect();
            out.push(support);
        }
    }
    // Deterministic order: larger supports last, lexicographic within size.
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};
    use crate::ideals::MonomialIdeal;

    fn smooth(d: usize) -> ToricGerm {
        ToricGerm::smooth(d)
    }

    fn r_ideal(ideal: MonomialIdeal, exp: Rational) -> MonomialRIdeal {
        MonomialRIdeal::from_ideal(ideal, exp).unwrap()
    }

    fn cusp() -> MonomialIdeal {
        MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]]).unwrap()
    }

    fn val(germ: &ToricGerm, coords: &[i64]) -> ToricValuation {
        ToricValuation::new(germ, &LatticeVector::from_integers(coords)).unwrap()
    }

    #[test]
    fn log_discrepancy_anchors() {
        let a3 = smooth(3);
        assert_eq!(log_discrepancy(&a3, &val(&a3, &[1, 1, 1])), rat_int(3));
        assert_eq!(log_discrepancy(&a3, &val(&a3, &[3, 4, 1])), rat_int(8));

        // 1/5(2, 3, 1): the barycentric lattice point has A = 1 + 1/5.
        let germ = ToricGerm::quotient(5, &[2, 3, 1]).unwrap();
        let w = ToricValuation::new(
            &germ,
            &LatticeVector::new(vec![rat(2, 5), rat(3, 5), rat(1, 5)]),
        )
        .unwrap();
        assert_eq!(log_discrepancy(&germ, &w), rat(6, 5));
    }

    #[test]
    fn pair_log_discrepancy_examples() {
        let a3 = smooth(3);
        let snc = r_ideal(
            MonomialIdeal::from_u64(3, &[&[1, 1, 1]]).unwrap(),
            rat_int(1),
        );
        let w = val(&a3, &[1, 1, 1]);
        assert_eq!(a_log_discrepancy(&a3, &w, &snc, &[]).unwrap(), rat_int(0));

        let a2 = smooth(2);
        let pair = r_ideal(cusp(), rat(5, 6));
        let w = val(&a2, &[3, 2]);
        assert_eq!(a_log_discrepancy(&a2, &w, &pair, &[]).unwrap(), rat_int(0));

        let m = r_ideal(MonomialIdeal::maximal(3), rat_int(1));
        let w = val(&a3, &[2, 1, 1]);
        assert_eq!(a_log_discrepancy(&a3, &w, &m, &[]).unwrap(), rat_int(3));
    }

    #[test]
    fn divisorial_part_subtracts_linearly() {
        let a2 = smooth(2);
        let w = val(&a2, &[3, 2]);
        let trivial = MonomialRIdeal::trivial(2);
        let delta = [rat(1, 2), rat(1, 3)];
        // 5 - 3/2 - 2/3 = 17/6.
        assert_eq!(
            a_log_discrepancy(&a2, &w, &trivial, &delta).unwrap(),
            rat(17, 6)
        );
    }

    #[test]
    fn mld_of_smooth_space_is_dimension() {
        let a3 = smooth(3);
        let report = mld(&a3, &MonomialRIdeal::trivial(3), &CentreFace::origin(3)).unwrap();
        assert_eq!(report.expect_finite(), &rat_int(3));
        assert!(report.certified);
        assert_eq!(
            report.witness.unwrap().weight(),
            &LatticeVector::from_integers(&[1, 1, 1])
        );
        assert_eq!(report.lp_lower_bound, rat_int(3));
    }

    #[test]
    fn mld_of_maximal_ideal_pair() {
        let a2 = smooth(2);
        let report = mld(
            &a2,
            &r_ideal(MonomialIdeal::maximal(2), rat_int(1)),
            &CentreFace::origin(2),
        )
        .unwrap();
        assert_eq!(report.expect_finite(), &rat_int(1));
        assert_eq!(
            report.witness.unwrap().weight(),
            &LatticeVector::from_integers(&[1, 1])
        );
        assert!(report.certified);
    }

    #[test]
    fn mld_detects_non_lc_with_negative_witness() {
        let a2 = smooth(2);
        let pair = r_ideal(
            MonomialIdeal::from_u64(2, &[&[1, 0]]).unwrap(),
            rat_int(2),
        );
        let report = mld(&a2, &pair, &CentreFace::origin(2)).unwrap();
        assert!(report.value.is_minus_infinity());
        assert!(report.certified);
        let witness = report.witness.unwrap();
        let a = a_log_discrepancy(&a2, &witness, &pair, &[]).unwrap();
        assert!(a.is_negative(), "witness must certify non-lc, got {a}");
    }

    #[test]
    fn mld_of_weighted_cusp_power() {
        let a3 = smooth(3);
        let ideal = MonomialIdeal::from_u64(3, &[&[2, 0, 0], &[0, 3, 0], &[0, 0, 6]]).unwrap();
        let report = mld(&a3, &r_ideal(ideal, rat(9, 10)), &CentreFace::origin(3)).unwrap();
        assert_eq!(report.expect_finite(), &rat(3, 5));
        assert_eq!(
            report.witness.unwrap().weight(),
            &LatticeVector::from_integers(&[3, 2, 1])
        );
        assert!(report.certified);
    }

    #[test]
    fn mld_along_a_curve_centre() {
        // A^3 along the x3 axis: transverse A^2, mld 2.
        let a3 = smooth(3);
        let centre = CentreFace::face(&[0, 1], 3).unwrap();
        let report = mld(&a3, &MonomialRIdeal::trivial(3), &centre).unwrap();
        assert_eq!(report.expect_finite(), &rat_int(2));
        assert_eq!(
            report.witness.unwrap().weight(),
            &LatticeVector::from_integers(&[1, 1, 0])
        );

        // 1/2(0,1,1) along its singular axis: transverse A_1, mld 1.
        let germ = ToricGerm::quotient(2, &[0, 1, 1]).unwrap();
        let centre = CentreFace::face(&[1, 2], 3).unwrap();
        let report = mld(&germ, &MonomialRIdeal::trivial(3), &centre).unwrap();
        assert_eq!(report.expect_finite(), &rat_int(1));
        assert_eq!(
            report.witness.unwrap().weight(),
            &LatticeVector::new(vec![rat_int(0), rat(1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn lc_threshold_anchors() {
        let a2 = smooth(2);
        let trivial = MonomialRIdeal::trivial(2);
        let m = r_ideal(MonomialIdeal::maximal(2), rat_int(1));
        assert_eq!(
            lc_threshold(&a2, &trivial, &m).unwrap(),
            Threshold::Finite(rat_int(2))
        );
        let cusp_ideal = r_ideal(cusp(), rat_int(1));
        assert_eq!(
            lc_threshold(&a2, &trivial, &cusp_ideal).unwrap(),
            Threshold::Finite(rat(5, 6))
        );
        let principal = r_ideal(
            MonomialIdeal::from_u64(2, &[&[1, 0]]).unwrap(),
            rat_int(1),
        );
        assert_eq!(
            lc_threshold(&a2, &trivial, &principal).unwrap(),
            Threshold::Finite(rat_int(1))
        );
        assert_eq!(
            lc_threshold(&a2, &trivial, &trivial).unwrap(),
            Threshold::Infinite
        );
    }

    #[test]
    fn lc_threshold_rejects_non_lc_base() {
        let a2 = smooth(2);
        let bad = r_ideal(MonomialIdeal::from_u64(2, &[&[1, 0]]).unwrap(), rat_int(2));
        let m = r_ideal(MonomialIdeal::maximal(2), rat_int(1));
        let err = lc_threshold(&a2, &bad, &m).unwrap_err();
        assert!(matches!(err, ValuationsError::BaseNotLc { .. }));
    }

    #[test]
    fn a_lc_threshold_examples() {
        let a3 = smooth(3);
        let trivial = MonomialRIdeal::trivial(3);
        let m = r_ideal(MonomialIdeal::maximal(3), rat_int(1));
        assert_eq!(
            a_lc_threshold(&a3, &trivial, &m, &rat_int(1)).unwrap(),
            rat_int(2)
        );
        assert_eq!(
            a_lc_threshold(&a3, &trivial, &m, &rat_int(3)).unwrap(),
            rat_int(0)
        );
        // Canonical threshold of (x^2, y^3, z^6).
        let ideal = MonomialIdeal::from_u64(3, &[&[2, 0, 0], &[0, 3, 0], &[0, 0, 6]]).unwrap();
        let b = r_ideal(ideal, rat_int(1));
        assert_eq!(
            a_lc_threshold(&a3, &trivial, &b, &rat_int(1)).unwrap(),
            rat(5, 6)
        );
    }

    #[test]
    fn a_lc_threshold_validates_inputs() {
        let a2 = smooth(2);
        let trivial = MonomialRIdeal::trivial(2);
        let not_primary = r_ideal(MonomialIdeal::from_u64(2, &[&[1, 0]]).unwrap(), rat_int(1));
        assert_eq!(
            a_lc_threshold(&a2, &trivial, &not_primary, &rat_int(1)).unwrap_err(),
            ValuationsError::NotMPrimary
        );
        let m = r_ideal(MonomialIdeal::maximal(2), rat_int(1));
        assert!(matches!(
            a_lc_threshold(&a2, &trivial, &m, &rat_int(3)).unwrap_err(),
            ValuationsError::TargetAboveMld { .. }
        ));
    }

    #[test]
    fn class_predicates_on_squared_maximal_ideal() {
        let a3 = smooth(3);
        let m2 = r_ideal(MonomialIdeal::maximal(3), rat_int(2));
        assert!(is_canonical(&a3, &m2).unwrap().holds);
        let terminal = is_terminal(&a3, &m2).unwrap();
        assert!(!terminal.holds);
        let (witness, value) = terminal.violator.unwrap();
        assert_eq!(value, rat_int(1));
        assert_eq!(witness.weight(), &LatticeVector::from_integers(&[1, 1, 1]));
        assert!(is_terminal(&a3, &MonomialRIdeal::trivial(3)).unwrap().holds);
    }

    #[test]
    fn class_predicates_on_cusp_powers() {
        let a2 = smooth(2);
        // 5/6 is the lc threshold: lc but not klt.
        let at_threshold = r_ideal(cusp(), rat(5, 6));
        assert!(is_lc(&a2, &at_threshold).unwrap().holds);
        let klt = is_klt(&a2, &at_threshold).unwrap();
        assert!(!klt.holds);
        let (witness, value) = klt.violator.unwrap();
        assert_eq!(value, rat_int(0));
        assert_eq!(witness.weight(), &LatticeVector::from_integers(&[3, 2]));

        // Beyond the threshold: not lc, witness strictly negative.
        let beyond = r_ideal(cusp(), rat(11, 12));
        let lc = is_lc(&a2, &beyond).unwrap();
        assert!(!lc.holds);
        let (witness, value) = lc.violator.unwrap();
        assert_eq!(witness.weight(), &LatticeVector::from_integers(&[3, 2]));
        assert_eq!(value, rat(-1, 2));

        // 3/4: klt but not canonical, the first blow-up has a = 1/2.
        let klt_power = r_ideal(cusp(), rat(3, 4));
        assert!(is_klt(&a2, &klt_power).unwrap().holds);
        let canonical = is_canonical(&a2, &klt_power).unwrap();
        assert!(!canonical.holds);
        let (witness, value) = canonical.violator.unwrap();
        assert_eq!(witness.weight(), &LatticeVector::from_integers(&[1, 1]));
        assert_eq!(value, rat(1, 2));

        // 1/2: canonical but not terminal.
        let half = r_ideal(cusp(), rat(1, 2));
        assert!(is_canonical(&a2, &half).unwrap().holds);
        assert!(!is_terminal(&a2, &half).unwrap().holds);
    }

    #[test]
    fn terminal_quotient_point() {
        // 1/2(1,1,1) is terminal: the barycentre has a = 3/2 > 1.
        let germ = ToricGerm::quotient(2, &[1, 1, 1]).unwrap();
        let trivial = MonomialRIdeal::trivial(3);
        assert!(is_terminal(&germ, &trivial).unwrap().holds);
        let report = mld(&germ, &trivial, &CentreFace::origin(3)).unwrap();
        assert_eq!(report.expect_finite(), &rat(3, 2));

        // 1/2(0,1,1) is canonical but not terminal: singular along an axis.
        let germ = ToricGerm::quotient(2, &[0, 1, 1]).unwrap();
        assert!(is_canonical(&germ, &trivial).unwrap().holds);
        let term = is_terminal(&germ, &trivial).unwrap();
        assert!(!term.holds);
        let (witness, value) = term.violator.unwrap();
        assert_eq!(value, rat_int(1));
        assert_eq!(
            witness.weight(),
            &LatticeVector::new(vec![rat_int(0), rat(1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn homogeneity_scaling_of_log_discrepancy() {
        let a2 = smooth(2);
        let pair = r_ideal(cusp(), rat(1, 2));
        let w = val(&a2, &[3, 2]);
        let a1 = a_log_discrepancy(&a2, &w, &pair, &[]).unwrap();
        // The double of the weight is not primitive; evaluate directly.
        let double = LatticeVector::from_integers(&[6, 4]);
        let a2v = double.coordinate_sum() - pair.ord_along(&double);
        assert_eq!(a2v, rat_int(2) * a1);
    }

    #[test]
    fn centre_validation() {
        let a2 = smooth(2);
        assert!(CentreFace::face(&[0, 5], 2).is_err());
        assert!(CentreFace::face(&[], 2).is_err());
        let bad_dim = MonomialRIdeal::trivial(3);
        assert!(mld(&a2, &bad_dim, &CentreFace::origin(2)).is_err());
    }
}
