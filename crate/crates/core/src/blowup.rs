//! Weighted blow-ups of toric germs.
//!
//! The blow-up at a weight vector `w` is the star subdivision of the
//! positive orthant at `w`. Each chart replaces one cone generator by `w`
//! and is presented intrinsically as a cyclic quotient germ by computing
//! the quotient of the germ lattice by the chart cone's generator lattice.
//! On charts, monomials transform by pairing with the new cone basis; the
//! weak transform subtracts the full exceptional multiplicity.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use thiserror::Error;

use crate::algebra::{
    invert_matrix, is_integer, smith_normal_form, AlgebraError, ConeMembership, LatticeVector,
    QuotientLattice, Rational, SimplicialCone,
};
use crate::ideals::{IdealsError, MonomialIdeal, MonomialRIdeal};
use crate::valuations::{a_log_discrepancy, ToricGerm, ToricValuation, ValuationsError};

#[derive(Debug, Error, PartialEq)]
pub enum BlowupError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Ideals(#[from] IdealsError),
    #[error(transparent)]
    Valuations(#[from] ValuationsError),
    #[error("blow-up centres must be the origin or an invariant curve on a threefold, got support of size {0} in dimension {1}")]
    UnsupportedCentre(usize, usize),
    #[error("chart quotient group is not cyclic; invariant factors {0:?}")]
    NonCyclicChart(Vec<BigInt>),
    #[error("generator {0} transforms to a non-integral exponent in chart {1}")]
    NonIntegralTransform(String, usize),
    #[error("towers require a smooth germ and a weight supported on at least two coordinates")]
    UnsupportedTower,
    #[error("tower walk failed to terminate within {0} steps")]
    TowerOverflow(usize),
    #[error("shape not supported: {0}")]
    UnsupportedShape(String),
    #[error("no chart with coordinate {0}")]
    NoSuchChart(usize),
}

/// The exceptional locus descriptor: the weighted projective space
/// `P(b_1,...,b_d)` of the cleared integral weight tuple, or a bundle of
/// weighted projective lines for a curve centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalLocus {
    pub weights: Vec<BigInt>,
    pub fibred: bool,
}

impl fmt::Display for ExceptionalLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(|b| b.to_string()).collect();
        if self.fibred {
            write!(f, "P({})-bundle", ws.join(","))
        } else {
            write!(f, "P({})", ws.join(","))
        }
    }
}

/// One affine chart of a weighted blow-up. The chart's `coordinate` slot is
/// the exceptional direction; every other slot is the strict transform of
/// the source coordinate with the same index.
#[derive(Debug, Clone)]
pub struct Chart {
    coordinate: usize,
    germ: ToricGerm,
    cone: SimplicialCone,
}

impl Chart {
    pub fn coordinate(&self) -> usize {
        self.coordinate
    }

    pub fn germ(&self) -> &ToricGerm {
        &self.germ
    }

    pub fn cone(&self) -> &SimplicialCone {
        &self.cone
    }

    /// Coordinates of an ambient lattice vector in the chart basis, or None
    /// when the vector lies outside the chart cone.
    pub fn coefficients(&self, u: &LatticeVector) -> Result<Option<Vec<Rational>>, BlowupError> {
        match self.cone.membership(u)? {
            ConeMembership::Interior { coefficients }
            | ConeMembership::Boundary { coefficients, .. } => Ok(Some(coefficients)),
            ConeMembership::Outside => Ok(None),
        }
    }
}

/// A weighted blow-up: the star subdivision of the orthant at `weight`.
#[derive(Debug, Clone)]
pub struct WeightedBlowup {
    source: ToricGerm,
    weight: ToricValuation,
    charts: Vec<Chart>,
    exceptional: ExceptionalLocus,
}

impl WeightedBlowup {
    pub fn source(&self) -> &ToricGerm {
        &self.source
    }

    pub fn weight(&self) -> &ToricValuation {
        &self.weight
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, coordinate: usize) -> Result<&Chart, BlowupError> {
        self.charts
            .iter()
            .find(|c| c.coordinate == coordinate)
            .ok_or(BlowupError::NoSuchChart(coordinate))
    }

    pub fn exceptional(&self) -> &ExceptionalLocus {
        &self.exceptional
    }
}

/// Builds the weighted blow-up of `germ` at the valuation `w`. Point
/// centres need strictly positive weights; on threefolds a weight supported
/// on two coordinates blows up the invariant curve where those vanish.
pub fn weighted_blowup(
    germ: &ToricGerm,
    w: &ToricValuation,
) -> Result<WeightedBlowup, BlowupError> {
    let d = germ.dim();
    let support = w.support();
    let point_centre = support.len() == d;
    let curve_centre = d == 3 && support.len() == 2;
    if !point_centre && !curve_centre {
        return Err(BlowupError::UnsupportedCentre(support.len(), d));
    }
    let mut charts = Vec::new();
    for &i in &support {
        charts.push(build_chart(germ, w.weight(), i)?);
    }
    let (weights, _) = w.weight().clear_denominators();
    Ok(WeightedBlowup {
        source: germ.clone(),
        weight: w.clone(),
        charts,
        exceptional: ExceptionalLocus {
            weights,
            fibred: curve_centre,
        },
    })
}

/// Presents the chart at coordinate `i` as a cyclic quotient: the quotient
/// of the germ lattice by the span of the chart cone's generators.
fn build_chart(germ: &ToricGerm, w: &LatticeVector, i: usize) -> Result<Chart, BlowupError> {
    let d = germ.dim();
    let generators: Vec<LatticeVector> = (0..d)
        .map(|j| {
            if j == i {
                w.clone()
            } else {
                LatticeVector::standard_basis(d, j)
            }
        })
        .collect();
    let cone = SimplicialCone::new(generators.clone())?;

    // Lattice of chart coordinates: images of the germ lattice generators
    // under the inverse cone basis.
    let g_rows: Vec<Vec<Rational>> = (0..d)
        .map(|row| (0..d).map(|col| generators[col].coord(row).clone()).collect())
        .collect();
    let g_inv = invert_matrix(&g_rows)?;
    let mut lattice_gens: Vec<Vec<Rational>> = (0..d)
        .map(|col| (0..d).map(|row| g_inv[row][col].clone()).collect())
        .collect();
    let r = germ.index().clone();
    if !r.is_one() {
        let extra: Vec<Rational> = (0..d)
            .map(|row| {
                (0..d)
                    .map(|col| {
                        &g_inv[row][col]
                            * Rational::new(germ.weights()[col].clone(), r.clone())
                    })
                    .sum()
            })
            .collect();
        lattice_gens.push(extra);
    }

    // Scale to an integer generator matrix and extract a lattice basis.
    let q = lattice_gens
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let w_rows: Vec<Vec<BigInt>> = (0..d)
        .map(|row| {
            lattice_gens
                .iter()
                .map(|gen| {
                    let scaled = &gen[row] * Rational::from(q.clone());
                    debug_assert!(is_integer(&scaled));
                    scaled.to_integer()
                })
                .collect()
        })
        .collect();
    let snf = smith_normal_form(&w_rows)?;
    let u_rows: Vec<Vec<Rational>> = snf
        .u
        .iter()
        .map(|row| row.iter().map(|x| Rational::from(x.clone())).collect())
        .collect();
    let u_inv = invert_matrix(&u_rows)?;
    // Basis of the chart lattice: columns d_k * (U^-1 e_k) / q.
    let basis_rows: Vec<Vec<Rational>> = (0..d)
        .map(|row| {
            (0..d)
                .map(|col| {
                    &u_inv[row][col] * Rational::new(snf.d[col][col].clone(), q.clone())
                })
                .collect()
        })
        .collect();

    // The standard lattice sits inside the chart lattice; its coordinates
    // in the chart basis form the integer presentation matrix.
    let c_rational = invert_matrix(&basis_rows)?;
    let c_rows: Vec<Vec<BigInt>> = c_rational
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    debug_assert!(is_integer(x), "presentation matrix must be integral");
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    let snf2 = smith_normal_form(&c_rows)?;
    let factors: Vec<BigInt> = (0..d).map(|k| snf2.d[k][k].clone()).collect();
    let nontrivial: Vec<BigInt> = factors.iter().filter(|f| !f.is_one()).cloned().collect();
    if nontrivial.len() > 1 {
        return Err(BlowupError::NonCyclicChart(factors));
    }
    let order: BigInt = factors.iter().product();
    let germ_out = if order.is_one() {
        ToricGerm::smooth(d)
    } else {
        // Generator of the cyclic quotient: the last invariant-factor basis
        // vector pulled back through both changes of basis.
        let u2_rows: Vec<Vec<Rational>> = snf2
            .u
            .iter()
            .map(|row| row.iter().map(|x| Rational::from(x.clone())).collect())
            .collect();
        let u2_inv = invert_matrix(&u2_rows)?;
        let x0: Vec<Rational> = (0..d).map(|row| u2_inv[row][d - 1].clone()).collect();
        let weights: Vec<BigInt> = (0..d)
            .map(|row| {
                let coord: Rational = (0..d)
                    .map(|col| &basis_rows[row][col] * &x0[col])
                    .sum();
                let scaled = coord * Rational::from(order.clone());
                debug_assert!(is_integer(&scaled), "generator must have denominator R");
                scaled.to_integer().mod_floor(&order)
            })
            .collect();
        ToricGerm::from_lattice(QuotientLattice::new(order, weights)?)
    };
    Ok(Chart {
        coordinate: i,
        germ: germ_out,
        cone,
    })
}

/// Weak transform of a monomial ideal in one chart: exponents pair with the
/// chart cone basis and the exceptional slot drops the full multiplicity
/// `ord_E`.
pub fn weak_transform(
    bl: &WeightedBlowup,
    ideal: &MonomialIdeal,
    coordinate: usize,
) -> Result<MonomialIdeal, BlowupError> {
    let d = bl.source.dim();
    if ideal.dim() != d {
        return Err(BlowupError::Ideals(IdealsError::DimensionMismatch(
            ideal.dim(),
            d,
        )));
    }
    bl.chart(coordinate)?;
    let w = bl.weight.weight();
    let ord_e = ideal.ord_along(w);
    let mut gens = Vec::new();
    for m in ideal.generators() {
        let pairing = w.pairing(m);
        let slot = &pairing - &ord_e;
        if !is_integer(&slot) {
            return Err(BlowupError::NonIntegralTransform(
                format!("{m:?}"),
                coordinate,
            ));
        }
        let mut exps: Vec<BigInt> = m.to_vec();
        exps[coordinate] = slot.to_integer();
        gens.push(exps);
    }
    Ok(MonomialIdeal::new(d, gens)?)
}

/// The crepant pull-back of a pair to one chart: the chart germ, the
/// boundary coefficients on the chart's coordinate divisors, and the weak
/// transform of the R-ideal.
#[derive(Debug, Clone)]
pub struct PullbackTriple {
    pub coordinate: usize,
    pub germ: ToricGerm,
    /// Coefficient per chart coordinate: the source coefficient on strict
    /// transforms, `1 - a_E(source pair)` on the exceptional slot.
    pub boundary: Vec<Rational>,
    pub weak: MonomialRIdeal,
}

/// Pulls the pair `(germ, divisor, ideal)` back to every chart. Crepancy
/// holds exactly: for a chart vector `u` with chart coordinates `l`,
/// `sum l_j (1 - boundary_j) - ord_l(weak) = a_u(source pair)`.
pub fn pull_back(
    bl: &WeightedBlowup,
    ideal: &MonomialRIdeal,
    divisor: &[Rational],
) -> Result<Vec<PullbackTriple>, BlowupError> {
    let d = bl.source.dim();
    if ideal.dim() != d {
        return Err(BlowupError::Ideals(IdealsError::DimensionMismatch(
            ideal.dim(),
            d,
        )));
    }
    if !divisor.is_empty() && divisor.len() != d {
        return Err(BlowupError::Valuations(ValuationsError::DimensionMismatch(
            divisor.len(),
            d,
        )));
    }
    let a_e = a_log_discrepancy(&bl.source, &bl.weight, ideal, divisor)?;
    let exceptional_coeff = Rational::one() - a_e;
    let mut out = Vec::new();
    for chart in &bl.charts {
        let mut factors = Vec::new();
        for (factor, exp) in ideal.factors() {
            let weak = weak_transform(bl, factor, chart.coordinate)?;
            if !weak.is_trivial() {
                factors.push((weak, exp.clone()));
            }
        }
        let weak = if factors.is_empty() {
            MonomialRIdeal::trivial(d)
        } else {
            MonomialRIdeal::new(d, factors)?
        };
        let mut boundary: Vec<Rational> = if divisor.is_empty() {
            vec![Rational::zero(); d]
        } else {
            divisor.to_vec()
        };
        boundary[chart.coordinate] = exceptional_coeff.clone();
        out.push(PullbackTriple {
            coordinate: chart.coordinate,
            germ: chart.germ.clone(),
            boundary,
            weak,
        });
    }
    Ok(out)
}

/// One step of a regular tower.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerStep {
    /// Dimension of the centre blown up at this step.
    pub centre_dim: usize,
    /// The exceptional valuation, in the coordinates of the original germ.
    pub valuation: LatticeVector,
    /// Log discrepancy of the valuation over the original pair.
    pub a_value: Rational,
    /// Order of the current weak transform along the centre.
    pub centre_order: Rational,
}

/// A regular tower: the canonical sequence of smooth blow-ups reaching a
/// fixed weight. Each step blows up the stratum where the previous
/// exceptional divisors and coordinate hyperplanes carrying the weight
/// meet, until the weight itself appears as an exceptional valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerRecord {
    pub steps: Vec<TowerStep>,
}

impl TowerRecord {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Tower vectors as integer matrices.
    pub fn vectors(&self) -> Vec<Vec<BigInt>> {
        self.steps
            .iter()
            .map(|s| {
                s.valuation
                    .as_integers()
                    .expect("tower vectors over smooth germs are integral")
            })
            .collect()
    }

    pub fn centre_orders_non_increasing(&self) -> bool {
        self.steps
            .windows(2)
            .all(|pair| pair[0].centre_order >= pair[1].centre_order)
    }

    /// Gate: when the point order starts at most 1, the a-profile must be
    /// non-decreasing and at least 1 throughout.
    pub fn satisfies_nondecreasing_gate(&self) -> Option<bool> {
        let first = &self.steps.first()?.centre_order;
        if first > &Rational::one() {
            return None;
        }
        let one = Rational::one();
        let monotone = self
            .steps
            .windows(2)
            .all(|pair| pair[0].a_value <= pair[1].a_value);
        let floor = self.steps.iter().all(|s| s.a_value >= one);
        Some(monotone && floor)
    }

    /// Gate: when the point order starts strictly below 1, the a-profile
    /// must be strictly increasing and strictly above 1.
    pub fn satisfies_increasing_gate(&self) -> Option<bool> {
        let first = &self.steps.first()?.centre_order;
        if first >= &Rational::one() {
            return None;
        }
        let one = Rational::one();
        let monotone = self
            .steps
            .windows(2)
            .all(|pair| pair[0].a_value < pair[1].a_value);
        let floor = self.steps.iter().all(|s| s.a_value > one);
        Some(monotone && floor)
    }
}

/// The regular tower for a weight over a smooth germ, tracking only the
/// discrepancies of the bare space.
pub fn regular_tower(germ: &ToricGerm, w: &ToricValuation) -> Result<TowerRecord, BlowupError> {
    tower_discrepancy_profile(germ, w, &MonomialRIdeal::trivial(germ.dim()))
}

/// The regular tower enriched with the log discrepancies of `(germ, ideal)`
/// along each step's exceptional valuation and the order of the running
/// weak transform along each centre.
pub fn tower_discrepancy_profile(
    germ: &ToricGerm,
    w: &ToricValuation,
    ideal: &MonomialRIdeal,
) -> Result<TowerRecord, BlowupError> {
    let d = germ.dim();
    if !germ.is_smooth() || w.support().len() < 2 {
        return Err(BlowupError::UnsupportedTower);
    }
    if ideal.dim() != d {
        return Err(BlowupError::Ideals(IdealsError::DimensionMismatch(
            ideal.dim(),
            d,
        )));
    }
    let target = w.weight().clone();
    let mut basis: Vec<LatticeVector> = (0..d).map(|j| LatticeVector::standard_basis(d, j)).collect();
    // Weak transform exponents in the running chart coordinates, one matrix
    // per R-ideal factor.
    let mut weak: Vec<(Vec<Vec<BigInt>>, Rational)> = ideal
        .factors()
        .iter()
        .map(|(f, e)| (f.generators().to_vec(), e.clone()))
        .collect();
    let mut steps = Vec::new();
    const CAP: usize = 10_000;
    for _ in 0..CAP {
        let cone = SimplicialCone::new(basis.clone())?;
        let coefficients = match cone.membership(&target)? {
            ConeMembership::Interior { coefficients }
            | ConeMembership::Boundary { coefficients, .. } => coefficients,
            ConeMembership::Outside => unreachable!("subdivision always keeps the weight"),
        };
        let j_set: Vec<usize> = coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_positive())
            .map(|(j, _)| j)
            .collect();
        // The next exceptional valuation is the barycentric sum over the
        // carrying face.
        let mut v = LatticeVector::zero(d);
        for &j in &j_set {
            v = v.add(&basis[j]);
        }
        // Order of the running weak transform along the centre, and the
        // per-factor drops for the next transform.
        let mut centre_order = Rational::zero();
        let mut drops = Vec::new();
        for (gens, exp) in &weak {
            let ord: BigInt = gens
                .iter()
                .map(|m| j_set.iter().map(|&j| m[j].clone()).sum::<BigInt>())
                .min()
                .expect("factors keep at least one generator");
            centre_order += exp * Rational::from(ord.clone());
            drops.push(ord);
        }
        let a_value = v.coordinate_sum() - ideal.ord_along(&v);
        steps.push(TowerStep {
            centre_dim: d - j_set.len(),
            valuation: v.clone(),
            a_value,
            centre_order,
        });
        if v == target {
            return Ok(TowerRecord { steps });
        }
        // Descend into the child chart containing the weight: replace the
        // generator with the least coefficient, lex-first on ties.
        let k = *j_set
            .iter()
            .min_by(|&&a, &&b| coefficients[a].cmp(&coefficients[b]).then(a.cmp(&b)))
            .expect("carrying face is nonempty");
        for ((gens, _), drop) in weak.iter_mut().zip(&drops) {
            for m in gens.iter_mut() {
                let total: BigInt = j_set.iter().map(|&j| m[j].clone()).sum();
                m[k] = total - drop;
            }
        }
        basis[k] = v;
    }
    Err(BlowupError::TowerOverflow(CAP))
}

/// A component of the different on the exceptional locus.
#[derive(Debug, Clone, PartialEq)]
pub enum DifferentLocus {
    /// The invariant point sitting in the chart at this coordinate.
    ChartPoint(usize),
    /// The invariant line of the threefold (w1, w2, 1) shape.
    Line,
}

impl fmt::Display for DifferentLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DifferentLocus::ChartPoint(i) => write!(f, "point in chart {i}"),
            DifferentLocus::Line => write!(f, "line"),
        }
    }
}

/// The different of the exceptional divisor inside the blown-up space:
/// adjunction corrections from the quotient points it passes through.
///
/// Supported shapes: a surface blow-up at `(w1, w2)` over a smooth germ,
/// where the two invariant points contribute `1 - 1/w_i`; and the threefold
/// blow-up at `(w1, w2, 1)` over a smooth germ, where the invariant line
/// carries `1 - 1/gcd(w1, w2)`.
pub fn different_on_exceptional(
    bl: &WeightedBlowup,
) -> Result<Vec<(DifferentLocus, Rational)>, BlowupError> {
    if !bl.source.is_smooth() {
        return Err(BlowupError::UnsupportedShape(
            "different requires a smooth source".into(),
        ));
    }
    let weights = &bl.exceptional.weights;
    match bl.source.dim() {
        2 => {
            let mut out = Vec::new();
            for chart in &bl.charts {
                let r = chart.germ.index().clone();
                let coeff = Rational::one() - Rational::new(BigInt::one(), r);
                out.push((DifferentLocus::ChartPoint(chart.coordinate), coeff));
            }
            Ok(out)
        }
        3 if weights.len() == 3 && weights[2].is_one() && !bl.exceptional.fibred => {
            let g = weights[0].gcd(&weights[1]);
            let coeff = Rational::one() - Rational::new(BigInt::one(), g);
            Ok(vec![(DifferentLocus::Line, coeff)])
        }
        _ => Err(BlowupError::UnsupportedShape(format!(
            "different not defined for this shape: dim {}, weights {:?}",
            bl.source.dim(),
            weights
        ))),
    }
}

/// Closed-form intersection numbers for the two shapes in use.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionTable {
    /// Surface shape: `-F^2 = 1/(w1 w2)`.
    pub minus_f_squared: Option<Rational>,
    /// Threefold shape: `F^3 = 1/(w1 w2)`.
    pub f_cubed: Option<Rational>,
    /// Surface shape: intersections of F with the strict transforms of the
    /// two axes, `[1/w2, 1/w1]`.
    pub f_dot_axes: Vec<Rational>,
    /// A curve of weighted degree d on the exceptional meets -F in
    /// `d * curve_unit`; the unit is `1/(w1 w2)`.
    pub curve_unit: Rational,
}

/// Intersection numbers for a surface blow-up `(w1, w2)` or the threefold
/// exceptional `P(w1, w2, 1)`. The weights of the surface case must be
/// coprime, which primitivity already enforces over a smooth germ.
pub fn intersection_numbers(bl: &WeightedBlowup) -> Result<IntersectionTable, BlowupError> {
    if !bl.source.is_smooth() {
        return Err(BlowupError::UnsupportedShape(
            "intersection tables require a smooth source".into(),
        ));
    }
    let weights = &bl.exceptional.weights;
    match bl.source.dim() {
        2 => {
            let w1 = &weights[0];
            let w2 = &weights[1];
            if !w1.gcd(w2).is_one() {
                return Err(BlowupError::UnsupportedShape(
                    "surface weights must be coprime".into(),
                ));
            }
            let unit = Rational::new(BigInt::one(), w1 * w2);
            Ok(IntersectionTable {
                minus_f_squared: Some(unit.clone()),
                f_cubed: None,
                f_dot_axes: vec![
                    Rational::new(BigInt::one(), w2.clone()),
                    Rational::new(BigInt::one(), w1.clone()),
                ],
                curve_unit: unit,
            })
        }
        3 if weights.len() == 3 && weights[2].is_one() && !bl.exceptional.fibred => {
            let unit = Rational::new(BigInt::one(), &weights[0] * &weights[1]);
            Ok(IntersectionTable {
                minus_f_squared: None,
                f_cubed: Some(unit.clone()),
                f_dot_axes: Vec::new(),
                curve_unit: unit,
            })
        }
        _ => Err(BlowupError::UnsupportedShape(format!(
            "intersection table not defined for dim {} weights {:?}",
            bl.source.dim(),
            weights
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    fn smooth_val(germ: &ToricGerm, coords: &[i64]) -> ToricValuation {
        ToricValuation::new(germ, &LatticeVector::from_integers(coords)).unwrap()
    }

    fn cusp_r(exp: Rational) -> MonomialRIdeal {
        MonomialRIdeal::from_ideal(
            MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]]).unwrap(),
            exp,
        )
        .unwrap()
    }

    /// Direct chart-side log discrepancy at possibly non-primitive chart
    /// coordinates.
    fn chart_a_value(triple: &PullbackTriple, l: &LatticeVector) -> Rational {
        let mut a = l.coordinate_sum();
        for (i, beta) in triple.boundary.iter().enumerate() {
            a -= beta * l.coord(i);
        }
        a - triple.weak.ord_along(l)
    }

    #[test]
    fn ordinary_blowup_has_smooth_charts() {
        let a2 = ToricGerm::smooth(2);
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[1, 1])).unwrap();
        assert_eq!(bl.charts().len(), 2);
        for chart in bl.charts() {
            assert!(chart.germ().is_smooth());
        }
        assert_eq!(bl.exceptional().to_string(), "P(1,1)");
    }

    #[test]
    fn weighted_chart_indices_follow_the_weights() {
        let a3 = ToricGerm::smooth(3);
        let bl = weighted_blowup(&a3, &smooth_val(&a3, &[3, 2, 1])).unwrap();
        assert_eq!(bl.chart(0).unwrap().germ().index(), &BigInt::from(3));
        assert_eq!(bl.chart(1).unwrap().germ().index(), &BigInt::from(2));
        assert!(bl.chart(2).unwrap().germ().is_smooth());
        assert_eq!(bl.exceptional().to_string(), "P(3,2,1)");
    }

    #[test]
    fn surface_chart_quotients_are_the_classical_ones() {
        // (3,2) blow-up of A^2: charts 1/3(1,1)-type and 1/2(1,1)-type.
        let a2 = ToricGerm::smooth(2);
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[3, 2])).unwrap();
        assert_eq!(bl.chart(0).unwrap().germ().index(), &BigInt::from(3));
        assert_eq!(bl.chart(1).unwrap().germ().index(), &BigInt::from(2));
    }

    #[test]
    fn quotient_point_chart_of_its_barycentric_weight() {
        // 1/7(3,4,1) blown up at (3/7,4/7,1/7): chart indices 3, 4, smooth.
        let germ = ToricGerm::quotient(7, &[3, 4, 1]).unwrap();
        let w = ToricValuation::new(
            &germ,
            &LatticeVector::new(vec![rat(3, 7), rat(4, 7), rat(1, 7)]),
        )
        .unwrap();
        let bl = weighted_blowup(&germ, &w).unwrap();
        assert_eq!(bl.chart(0).unwrap().germ().index(), &BigInt::from(3));
        assert_eq!(bl.chart(1).unwrap().germ().index(), &BigInt::from(4));
        assert!(bl.chart(2).unwrap().germ().is_smooth());
    }

    #[test]
    fn weak_transform_removes_full_multiplicity() {
        let a2 = ToricGerm::smooth(2);
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[1, 1])).unwrap();
        let principal = MonomialIdeal::from_u64(2, &[&[1, 0]]).unwrap();
        // The strict transform of {x = 0} misses the x-chart and is the
        // zero set of the surviving coordinate in the y-chart.
        let in_x = weak_transform(&bl, &principal, 0).unwrap();
        assert!(in_x.is_trivial());
        let in_y = weak_transform(&bl, &principal, 1).unwrap();
        assert_eq!(in_y.generators(), &[vec![BigInt::one(), BigInt::zero()]]);

        // Blowing up with the cusp's own weights resolves it: both weak
        // transforms become trivial.
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[3, 2])).unwrap();
        let cusp = MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]]).unwrap();
        assert!(weak_transform(&bl, &cusp, 0).unwrap().is_trivial());
        assert!(weak_transform(&bl, &cusp, 1).unwrap().is_trivial());

        let a3 = ToricGerm::smooth(3);
        let bl = weighted_blowup(&a3, &smooth_val(&a3, &[1, 1, 1])).unwrap();
        let m = MonomialIdeal::maximal(3);
        for i in 0..3 {
            assert!(weak_transform(&bl, &m, i).unwrap().is_trivial());
        }
    }

    #[test]
    fn pullback_boundary_coefficient_is_one_minus_a() {
        let a2 = ToricGerm::smooth(2);
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[1, 1])).unwrap();
        let principal = MonomialRIdeal::from_ideal(
            MonomialIdeal::from_u64(2, &[&[1, 0]]).unwrap(),
            rat_int(1),
        )
        .unwrap();
        let triples = pull_back(&bl, &principal, &[]).unwrap();
        // a_E = 2 - 1 = 1, so the exceptional coefficient vanishes.
        for triple in &triples {
            assert_eq!(triple.boundary[triple.coordinate], rat_int(0));
        }
    }

    #[test]
    fn pullbacks_are_crepant() {
        // Surface with boundary divisor and a fractional cusp power.
        let a2 = ToricGerm::smooth(2);
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[3, 2])).unwrap();
        let ideal = cusp_r(rat(1, 2));
        let divisor = [rat(1, 3), rat_int(0)];
        let triples = pull_back(&bl, &ideal, &divisor).unwrap();
        for triple in &triples {
            let chart = bl.chart(triple.coordinate).unwrap();
            for s in 1..4i64 {
                for t in 0..4i64 {
                    // Sample u = s*g_i + t*g_j inside the chart cone.
                    let mut u = chart.cone().generator(triple.coordinate).scale(&rat_int(s));
                    let other = (1 - triple.coordinate).max(0);
                    u = u.add(&chart.cone().generator(other).scale(&rat_int(t)));
                    let l = chart.coefficients(&u).unwrap().expect("inside by construction");
                    let chart_side = chart_a_value(triple, &LatticeVector::new(l));
                    let source_side = u.coordinate_sum()
                        - divisor
                            .iter()
                            .enumerate()
                            .map(|(i, dlt)| dlt * u.coord(i))
                            .sum::<Rational>()
                        - ideal.ord_along(&u);
                    assert_eq!(chart_side, source_side);
                }
            }
        }
    }

    #[test]
    fn kawamata_chart_pullback_is_crepant() {
        let germ = ToricGerm::quotient(7, &[3, 4, 1]).unwrap();
        let w = ToricValuation::new(
            &germ,
            &LatticeVector::new(vec![rat(3, 7), rat(4, 7), rat(1, 7)]),
        )
        .unwrap();
        let bl = weighted_blowup(&germ, &w).unwrap();
        let ideal = MonomialRIdeal::trivial(3);
        let triples = pull_back(&bl, &ideal, &[]).unwrap();
        for triple in &triples {
            let chart = bl.chart(triple.coordinate).unwrap();
            // Sample sums of cone generators; all lie in the germ lattice.
            for a in 0..3i64 {
                for b in 1..3i64 {
                    let u = chart
                        .cone()
                        .generator(0)
                        .scale(&rat_int(a))
                        .add(&chart.cone().generator(1).scale(&rat_int(b)))
                        .add(&chart.cone().generator(2));
                    let l = chart.coefficients(&u).unwrap().unwrap();
                    let chart_side = chart_a_value(triple, &LatticeVector::new(l));
                    assert_eq!(chart_side, u.coordinate_sum());
                }
            }
        }
    }

    #[test]
    fn towers_match_hand_executions() {
        let a2 = ToricGerm::smooth(2);
        let trivial = MonomialRIdeal::trivial(2);

        let t = regular_tower(&a2, &smooth_val(&a2, &[1, 1])).unwrap();
        assert_eq!(t.vectors(), vec![vec![BigInt::one(), BigInt::one()]]);

        let t = regular_tower(&a2, &smooth_val(&a2, &[2, 1])).unwrap();
        assert_eq!(
            t.vectors(),
            vec![
                vec![BigInt::one(), BigInt::one()],
                vec![BigInt::from(2), BigInt::one()],
            ]
        );

        let t = regular_tower(&a2, &smooth_val(&a2, &[3, 2])).unwrap();
        assert_eq!(
            t.vectors(),
            vec![
                vec![BigInt::one(), BigInt::one()],
                vec![BigInt::from(2), BigInt::one()],
                vec![BigInt::from(3), BigInt::from(2)],
            ]
        );
        // Discrepancy profile of the bare plane: (2, 3, 5).
        let profile: Vec<Rational> = t.steps.iter().map(|s| s.a_value.clone()).collect();
        assert_eq!(profile, vec![rat_int(2), rat_int(3), rat_int(5)]);
        let _ = trivial;

        let a3 = ToricGerm::smooth(3);
        let t = regular_tower(&a3, &smooth_val(&a3, &[3, 2, 1])).unwrap();
        assert_eq!(
            t.vectors(),
            vec![
                vec![BigInt::one(), BigInt::one(), BigInt::one()],
                vec![BigInt::from(2), BigInt::from(2), BigInt::one()],
                vec![BigInt::from(3), BigInt::from(2), BigInt::one()],
            ]
        );
    }

    #[test]
    fn tower_rejects_coordinate_weights() {
        let a2 = ToricGerm::smooth(2);
        let err = regular_tower(&a2, &smooth_val(&a2, &[1, 0])).unwrap_err();
        assert_eq!(err, BlowupError::UnsupportedTower);
    }

    #[test]
    fn tower_profile_gates() {
        let a2 = ToricGerm::smooth(2);
        // ord_P = 1: non-decreasing profile (1, 2).
        let m = MonomialRIdeal::from_ideal(MonomialIdeal::maximal(2), rat_int(1)).unwrap();
        let t = tower_discrepancy_profile(&a2, &smooth_val(&a2, &[2, 1]), &m).unwrap();
        let profile: Vec<Rational> = t.steps.iter().map(|s| s.a_value.clone()).collect();
        assert_eq!(profile, vec![rat_int(1), rat_int(2)]);
        assert_eq!(t.satisfies_nondecreasing_gate(), Some(true));
        assert_eq!(t.satisfies_increasing_gate(), None);
        assert!(t.centre_orders_non_increasing());

        // ord_P = 2 > 1: hypotheses fail, gates are not asserted.
        let c = cusp_r(rat_int(1));
        let t = tower_discrepancy_profile(&a2, &smooth_val(&a2, &[3, 2]), &c).unwrap();
        assert_eq!(t.satisfies_nondecreasing_gate(), None);
        assert_eq!(t.satisfies_increasing_gate(), None);
        assert!(t.centre_orders_non_increasing());
        let orders: Vec<Rational> = t.steps.iter().map(|s| s.centre_order.clone()).collect();
        assert_eq!(orders, vec![rat_int(2), rat_int(1), rat_int(1)]);

        // ord_P = 1/2 < 1: strictly increasing profile above 1.
        let half = cusp_r(rat(1, 4));
        let t = tower_discrepancy_profile(&a2, &smooth_val(&a2, &[3, 2]), &half).unwrap();
        assert_eq!(t.satisfies_increasing_gate(), Some(true));
    }

    #[test]
    fn different_shapes() {
        let a2 = ToricGerm::smooth(2);
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[3, 2])).unwrap();
        let different = different_on_exceptional(&bl).unwrap();
        assert_eq!(
            different,
            vec![
                (DifferentLocus::ChartPoint(0), rat(2, 3)),
                (DifferentLocus::ChartPoint(1), rat(1, 2)),
            ]
        );

        let a3 = ToricGerm::smooth(3);
        let bl = weighted_blowup(&a3, &smooth_val(&a3, &[2, 1, 1])).unwrap();
        assert_eq!(
            different_on_exceptional(&bl).unwrap(),
            vec![(DifferentLocus::Line, rat_int(0))]
        );

        let bl = weighted_blowup(&a3, &smooth_val(&a3, &[4, 2, 1])).unwrap();
        assert_eq!(
            different_on_exceptional(&bl).unwrap(),
            vec![(DifferentLocus::Line, rat(1, 2))]
        );
    }

    #[test]
    fn intersection_tables() {
        let a2 = ToricGerm::smooth(2);
        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[2, 1])).unwrap();
        let table = intersection_numbers(&bl).unwrap();
        assert_eq!(table.minus_f_squared, Some(rat(1, 2)));
        assert_eq!(table.f_dot_axes, vec![rat_int(1), rat(1, 2)]);

        let bl = weighted_blowup(&a2, &smooth_val(&a2, &[1, 1])).unwrap();
        assert_eq!(
            intersection_numbers(&bl).unwrap().minus_f_squared,
            Some(rat_int(1))
        );

        let a3 = ToricGerm::smooth(3);
        let bl = weighted_blowup(&a3, &smooth_val(&a3, &[3, 2, 1])).unwrap();
        let table = intersection_numbers(&bl).unwrap();
        assert_eq!(table.f_cubed, Some(rat(1, 6)));
        // A curve of weighted degree w1 + w2 meets -F in (w1+w2)/(w1 w2).
        assert_eq!(rat_int(5) * &table.curve_unit, rat(5, 6));
    }

    #[test]
    fn adjunction_identity_on_the_surface_shape() {
        // ((w1 + w2 - 1) + b - t*w1) * (-F^2) = 1/w1 + (1-t)/w2 - (1-b)/(w1 w2)
        // holds identically once -F^2 = 1/(w1 w2).
        let samples = [
            (2i64, 1i64, rat(1, 3), rat(1, 2)),
            (3, 2, rat(2, 5), rat(1, 2)),
            (5, 3, rat_int(0), rat(1, 4)),
            (7, 4, rat(5, 7), rat(2, 3)),
        ];
        let a2 = ToricGerm::smooth(2);
        for (w1, w2, b, t) in samples {
            let bl = weighted_blowup(&a2, &smooth_val(&a2, &[w1, w2])).unwrap();
            let table = intersection_numbers(&bl).unwrap();
            let f2 = table.minus_f_squared.unwrap();
            let lhs = (rat_int(w1 + w2 - 1) + &b - &t * rat_int(w1)) * &f2;
            let rhs = rat(1, w1) + (rat_int(1) - &t) / rat_int(w2)
                - (rat_int(1) - &b) / rat_int(w1 * w2);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn curve_centre_charts_on_a_threefold() {
        // Blowing up the invariant curve {x0 = x1 = 0} with weights (2, 1).
        let a3 = ToricGerm::smooth(3);
        let w = smooth_val(&a3, &[2, 1, 0]);
        let bl = weighted_blowup(&a3, &w).unwrap();
        assert_eq!(bl.charts().len(), 2);
        assert_eq!(bl.chart(0).unwrap().germ().index(), &BigInt::from(2));
        assert!(bl.chart(1).unwrap().germ().is_smooth());
        assert!(bl.exceptional().fibred);

        // Crepancy along the curve blow-up.
        let ideal = MonomialRIdeal::from_ideal(
            MonomialIdeal::from_u64(3, &[&[2, 0, 0], &[0, 1, 1]]).unwrap(),
            rat(2, 3),
        )
        .unwrap();
        let triples = pull_back(&bl, &ideal, &[]).unwrap();
        for triple in &triples {
            let chart = bl.chart(triple.coordinate).unwrap();
            let u = chart
                .cone()
                .generator(0)
                .add(&chart.cone().generator(1))
                .add(&chart.cone().generator(2).scale(&rat_int(2)));
            let l = chart.coefficients(&u).unwrap().unwrap();
            let chart_side = chart_a_value(triple, &LatticeVector::new(l));
            let source_side = u.coordinate_sum() - ideal.ord_along(&u);
            assert_eq!(chart_side, source_side);
        }
    }

    #[test]
    fn point_centre_requires_full_support() {
        let a3 = ToricGerm::smooth(3);
        let w = smooth_val(&a3, &[1, 0, 0]);
        assert!(matches!(
            weighted_blowup(&a3, &w),
            Err(BlowupError::UnsupportedCentre(1, 3))
        ));
    }
}
