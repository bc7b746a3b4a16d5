//! Classifier for the centre of a crepant divisor on the weighted blow-up
//! of the smooth threefold germ with weights (w1, w2, 1), w1 >= w2.
//!
//! A divisor computing minimal log discrepancy 1 with order 1 on the
//! maximal ideal has its centre on the exceptional surface P(w1, w2, 1) of
//! such a blow-up, and the centre is either the whole surface or an
//! irreducible curve of weighted degree at most w1 + w2 avoiding the
//! coordinate loci. `classify_curve` normalizes the curve equation over the
//! rationals by the two allowed moves, rescaling and replacing a parameter
//! x_i by a weighted form of the same degree, and lands in one of two
//! normal forms:
//!
//!  - `x1*x3^p + x2^q` with `w1 + p = q*w2 <= w1 + w2`, or
//!  - `x1*x2 + x3^(w1+w2)`.
//!
//! Every substitution is performed exactly and recorded, so classifying an
//! emitted normal form returns the same case with no substitutions. Inputs
//! sitting on an excluded locus, or whose forced coefficient vanishes so
//! that the normalization splits off a parameter factor, are rejected with
//! a structured error.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{format_rational, Rational};
use crate::ideals::{IdealsError, MonomialIdeal, MonomialRIdeal, WeightedHomPoly};
use crate::valuations::{
    lc_threshold, mld, CentreFace, Threshold, ToricGerm, ValuationsError,
};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Ideals(#[from] IdealsError),
    #[error(transparent)]
    Valuations(#[from] ValuationsError),
    #[error("weights must satisfy w1 >= w2 >= 1, got ({0}, {1})")]
    BadWeights(u64, u64),
    #[error("polynomial weights {0:?} do not match (w1, w2, 1)")]
    MismatchedPolyWeights(Vec<String>),
    #[error("weights ({0}, {1}) are not coprime")]
    NotCoprime(u64, u64),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("weighted degree {degree} exceeds the bound w1 + w2 = {bound}")]
    DegreeTooLarge { degree: BigInt, bound: u64 },
    #[error("the curve sits on the excluded locus {0}")]
    ExcludedLocus(String),
    #[error("no monomial of the equation involves x1")]
    NoUnitMonomial,
    #[error("normal form is reducible: {0}")]
    ReducibleNormalForm(String),
    #[error("quadratic part is not split: {0}")]
    QuadraticPartNotSplit(String),
}

/// The two curve normal forms, and the case where the centre is the whole
/// exceptional surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrepantTag {
    ExceptionalDivisor,
    /// `x1*x3^p + x2^q` with `w1 + p = q*w2 <= w1 + w2`.
    HypersurfaceCurve { p: u64, q: u64 },
    /// `x1*x2 + x3^(w1+w2)`.
    SaturatedCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrepantCase {
    pub tag: CrepantTag,
    /// (w1, w2) with w1 >= w2.
    pub weights: (u64, u64),
    /// Normalizations applied, in order: rescalings of the equation and
    /// parameter replacements, each stating the new datum in the old one.
    pub substitutions: Vec<String>,
    /// The emitted normal form; absent for the divisor case.
    pub normal_form: Option<WeightedHomPoly>,
}

impl CrepantCase {
    /// The case where the tracked divisor is the exceptional surface of the
    /// blow-up itself, carrying no curve datum.
    pub fn exceptional_divisor(w1: u64, w2: u64) -> Result<Self, ClassifyError> {
        check_weights(w1, w2)?;
        Ok(CrepantCase {
            tag: CrepantTag::ExceptionalDivisor,
            weights: (w1, w2),
            substitutions: Vec::new(),
            normal_form: None,
        })
    }
}

fn check_weights(w1: u64, w2: u64) -> Result<(), ClassifyError> {
    if w2 < 1 || w1 < w2 {
        return Err(ClassifyError::BadWeights(w1, w2));
    }
    Ok(())
}

fn monomial(e: [u64; 3]) -> String {
    let mut out = String::new();
    for (i, k) in e.iter().enumerate() {
        if *k == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push('*');
        }
        out.push_str(&format!("x{}", i + 1));
        if *k > 1 {
            out.push_str(&format!("^{k}"));
        }
    }
    if out.is_empty() {
        "1".into()
    } else {
        out
    }
}

/// Formats a sum of coefficient-monomial terms, skipping zeros.
fn expression(terms: &[(Rational, [u64; 3])]) -> String {
    let mut out = String::new();
    for (c, e) in terms {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if mag.is_one() {
            out.push_str(&monomial(*e));
        } else {
            let coeff = if mag.denom().is_one() {
                format_rational(&mag)
            } else {
                format!("({})", format_rational(&mag))
            };
            out.push_str(&format!("{}*{}", coeff, monomial(*e)));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn scale_record(factor: &Rational) -> String {
    let inv = factor.recip();
    if inv.denom().is_one() {
        format!("f -> {}*f", format_rational(&inv))
    } else {
        format!("f -> ({})*f", format_rational(&inv))
    }
}

/// Record for a parameter replacement `x_i -> (1/scale)*(expression)`.
fn parameter_record(index: usize, scale: &Rational, terms: &[(Rational, [u64; 3])]) -> String {
    let inner = expression(terms);
    if scale.is_one() {
        format!("x{} -> {}", index + 1, inner)
    } else {
        format!(
            "x{} -> ({})*({})",
            index + 1,
            format_rational(&scale.recip()),
            inner
        )
    }
}

fn build_poly(
    weights: &[BigInt],
    terms: Vec<(Rational, [u64; 3])>,
) -> Result<WeightedHomPoly, IdealsError> {
    WeightedHomPoly::new(
        weights.to_vec(),
        terms
            .into_iter()
            .map(|(c, e)| (e.iter().map(|&k| BigInt::from(k)).collect(), c))
            .collect(),
    )
}

fn coeff(f: &WeightedHomPoly, e: [u64; 3]) -> Rational {
    let exp: Vec<BigInt> = e.iter().map(|&k| BigInt::from(k)).collect();
    f.coefficient(&exp)
}

/// Normalizes an equation whose only x1-monomial is `x1*x3^p` into
/// `x1*x3^p + x2^q`, recording the rescalings and the x1 replacement.
fn hypersurface_form(
    w1: u64,
    w2: u64,
    f: &WeightedHomPoly,
    mut subs: Vec<String>,
) -> Result<CrepantCase, ClassifyError> {
    let weights = f.weights().to_vec();
    let d = f.degree().to_u64().expect("degree at most w1 + w2");
    let p = d - w1;
    debug_assert!(p >= 1 && p <= w2);
    if d % w2 != 0 {
        // Every admissible monomial would then carry x3, so the input was
        // already divisible by x3 and rejected earlier.
        return Err(ClassifyError::ExcludedLocus("x3".into()));
    }
    let q = d / w2;
    let mut g = f.clone();
    let c = coeff(&g, [1, 0, p]);
    debug_assert!(!c.is_zero(), "the single x1-monomial is present");
    if !c.is_one() {
        subs.push(scale_record(&c));
        g = g.scale(&c.recip());
    }
    let lambdas: Vec<Rational> = (0..=q).map(|i| coeff(&g, [0, i, d - i * w2])).collect();
    let lam_q = lambdas[q as usize].clone();
    if lam_q.is_zero() {
        return Err(ClassifyError::ReducibleNormalForm(format!(
            "the coefficient of x2^{q} is forced to vanish, so x3 divides the equation"
        )));
    }
    let tail_nonzero = lambdas[..q as usize].iter().any(|l| !l.is_zero());
    if tail_nonzero || !lam_q.is_one() {
        if !lam_q.is_one() {
            subs.push(scale_record(&lam_q));
            g = g.scale(&lam_q.recip());
        }
        // New first parameter (1/lam_q)*(x1 + sum of the tail), i.e. the old
        // x1 equals lam_q*x1 minus the tail.
        let mut record_terms = vec![(Rational::one(), [1, 0, 0])];
        let mut h_terms = vec![(lam_q.clone(), [1, 0, 0])];
        for (i, l) in lambdas[..q as usize].iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let e = [0, i as u64, w1 - (i as u64) * w2];
            record_terms.push((l.clone(), e));
            h_terms.push((-l.clone(), e));
        }
        subs.push(parameter_record(0, &lam_q, &record_terms));
        let h = build_poly(&weights, h_terms)?;
        g = g.substitute(0, &h)?;
    }
    let expected = build_poly(
        &weights,
        vec![(Rational::one(), [1, 0, p]), (Rational::one(), [0, q, 0])],
    )?;
    assert_eq!(g, expected, "normalization lands on the normal form");
    debug_assert!(w1 + p == q * w2 && q * w2 <= w1 + w2);
    Ok(CrepantCase {
        tag: CrepantTag::HypersurfaceCurve { p, q },
        weights: (w1, w2),
        substitutions: subs,
        normal_form: Some(g),
    })
}

/// Normalizes an equation of top degree containing `x1*x2` into
/// `x1*x2 + x3^(w1+w2)`.
fn saturated_form(
    w1: u64,
    w2: u64,
    f: &WeightedHomPoly,
    mut subs: Vec<String>,
) -> Result<CrepantCase, ClassifyError> {
    let weights = f.weights().to_vec();
    let d = w1 + w2;
    let mut g = f.clone();
    let alpha = coeff(&g, [1, 1, 0]);
    debug_assert!(!alpha.is_zero());
    if !alpha.is_one() {
        subs.push(scale_record(&alpha));
        g = g.scale(&alpha.recip());
    }
    let beta = coeff(&g, [1, 0, w2]);
    if !beta.is_zero() {
        // New second parameter x2 + beta*x3^w2.
        subs.push(parameter_record(
            1,
            &Rational::one(),
            &[(Rational::one(), [0, 1, 0]), (beta.clone(), [0, 0, w2])],
        ));
        let h = build_poly(
            &weights,
            vec![(Rational::one(), [0, 1, 0]), (-beta.clone(), [0, 0, w2])],
        )?;
        g = g.substitute(1, &h)?;
    }
    debug_assert!(coeff(&g, [1, 0, w2]).is_zero());
    let q = w1 / w2 + 1;
    let lambdas: Vec<Rational> = (0..=q).map(|i| coeff(&g, [0, i, d - i * w2])).collect();
    let lam_0 = lambdas[0].clone();
    if lam_0.is_zero() {
        return Err(ClassifyError::ReducibleNormalForm(
            "the pure x3 coefficient is forced to vanish, so the second parameter divides the \
             equation"
                .into(),
        ));
    }
    let tail_nonzero = lambdas[1..].iter().any(|l| !l.is_zero());
    if tail_nonzero || !lam_0.is_one() {
        if !lam_0.is_one() {
            subs.push(scale_record(&lam_0));
            g = g.scale(&lam_0.recip());
        }
        let mut record_terms = vec![(Rational::one(), [1, 0, 0])];
        let mut h_terms = vec![(lam_0.clone(), [1, 0, 0])];
        for (i, l) in lambdas.iter().enumerate().skip(1) {
            if l.is_zero() {
                continue;
            }
            let e = [0, i as u64 - 1, d - (i as u64) * w2];
            record_terms.push((l.clone(), e));
            h_terms.push((-l.clone(), e));
        }
        subs.push(parameter_record(0, &lam_0, &record_terms));
        let h = build_poly(&weights, h_terms)?;
        g = g.substitute(0, &h)?;
    }
    let expected = build_poly(
        &weights,
        vec![(Rational::one(), [1, 1, 0]), (Rational::one(), [0, 0, d])],
    )?;
    assert_eq!(g, expected, "normalization lands on the normal form");
    Ok(CrepantCase {
        tag: CrepantTag::SaturatedCurve,
        weights: (w1, w2),
        substitutions: subs,
        normal_form: Some(g),
    })
}

/// The equal-weights case w1 = w2 = w of top degree 2w: the part free of x3
/// is a binary quadratic form, and only the two split shapes x1*x2 and x2^2
/// are normalized; anything needing a general linear change is rejected.
fn quadratic_form(
    w: u64,
    f: &WeightedHomPoly,
    mut subs: Vec<String>,
) -> Result<CrepantCase, ClassifyError> {
    let weights = f.weights().to_vec();
    let a = coeff(f, [2, 0, 0]);
    let b = coeff(f, [1, 1, 0]);
    let c = coeff(f, [0, 2, 0]);
    if !a.is_zero() {
        return Err(ClassifyError::QuadraticPartNotSplit(
            "the x1^2 monomial appears; a linear change beyond the handled shapes is needed"
                .into(),
        ));
    }
    if !b.is_zero() {
        let mut g = f.clone();
        if !c.is_zero() {
            // Absorb the x2^2 term: new first parameter b*x1 + c*x2.
            subs.push(parameter_record(
                0,
                &Rational::one(),
                &[(b.clone(), [1, 0, 0]), (c.clone(), [0, 1, 0])],
            ));
            let h = build_poly(
                &weights,
                vec![(b.recip(), [1, 0, 0]), (-&c / &b, [0, 1, 0])],
            )?;
            g = g.substitute(0, &h)?;
        }
        let bb = coeff(&g, [1, 1, 0]);
        if !bb.is_one() {
            subs.push(scale_record(&bb));
            g = g.scale(&bb.recip());
        }
        debug_assert!(coeff(&g, [0, 2, 0]).is_zero());
        // g = x1*x2 + l2*x1*x3^w + l1*x2*x3^w + e3*x3^(2w); it factors as
        // (x1 + l1*x3^w)(x2 + l2*x3^w) + l3*x3^(2w) with l3 = e3 - l1*l2.
        let l2 = coeff(&g, [1, 0, w]);
        let l1 = coeff(&g, [0, 1, w]);
        let e3 = coeff(&g, [0, 0, 2 * w]);
        let l3 = &e3 - &l1 * &l2;
        if l3.is_zero() {
            return Err(ClassifyError::ReducibleNormalForm(
                "the equation is the product of two parameter forms".into(),
            ));
        }
        if !l2.is_zero() {
            subs.push(parameter_record(
                1,
                &Rational::one(),
                &[(Rational::one(), [0, 1, 0]), (l2.clone(), [0, 0, w])],
            ));
            let h = build_poly(
                &weights,
                vec![(Rational::one(), [0, 1, 0]), (-l2.clone(), [0, 0, w])],
            )?;
            g = g.substitute(1, &h)?;
        }
        if !l1.is_zero() || !l3.is_one() {
            if !l3.is_one() {
                subs.push(scale_record(&l3));
                g = g.scale(&l3.recip());
            }
            let mut record_terms = vec![(Rational::one(), [1, 0, 0])];
            let mut h_terms = vec![(l3.clone(), [1, 0, 0])];
            if !l1.is_zero() {
                record_terms.push((l1.clone(), [0, 0, w]));
                h_terms.push((-l1.clone(), [0, 0, w]));
            }
            subs.push(parameter_record(0, &l3, &record_terms));
            let h = build_poly(&weights, h_terms)?;
            g = g.substitute(0, &h)?;
        }
        let expected = build_poly(
            &weights,
            vec![(Rational::one(), [1, 1, 0]), (Rational::one(), [0, 0, 2 * w])],
        )?;
        assert_eq!(g, expected, "normalization lands on the normal form");
        return Ok(CrepantCase {
            tag: CrepantTag::SaturatedCurve,
            weights: (w, w),
            substitutions: subs,
            normal_form: Some(g),
        });
    }
    if !c.is_zero() {
        // g = c*x2^2 + ...; after rescaling, the new first parameter is
        // l1*x1 + l2*x2 + l3*x3^w where l1 is the x1*x3^w coefficient.
        let mut g = f.clone();
        if !c.is_one() {
            subs.push(scale_record(&c));
            g = g.scale(&c.recip());
        }
        let l1 = coeff(&g, [1, 0, w]);
        debug_assert!(!l1.is_zero(), "an x1 monomial exists and only x1*x3^w remains");
        let l2 = coeff(&g, [0, 1, w]);
        let l3 = coeff(&g, [0, 0, 2 * w]);
        if !l1.is_one() || !l2.is_zero() || !l3.is_zero() {
            subs.push(parameter_record(
                0,
                &Rational::one(),
                &[
                    (l1.clone(), [1, 0, 0]),
                    (l2.clone(), [0, 1, 0]),
                    (l3.clone(), [0, 0, w]),
                ],
            ));
            let h = build_poly(
                &weights,
                vec![
                    (l1.recip(), [1, 0, 0]),
                    (-&l2 / &l1, [0, 1, 0]),
                    (-&l3 / &l1, [0, 0, w]),
                ],
            )?;
            g = g.substitute(0, &h)?;
        }
        let expected = build_poly(
            &weights,
            vec![(Rational::one(), [1, 0, w]), (Rational::one(), [0, 2, 0])],
        )?;
        assert_eq!(g, expected, "normalization lands on the normal form");
        return Ok(CrepantCase {
            tag: CrepantTag::HypersurfaceCurve { p: w, q: 2 },
            weights: (w, w),
            substitutions: subs,
            normal_form: Some(g),
        });
    }
    // A vanishing quadratic part means x3 divided the input.
    Err(ClassifyError::ExcludedLocus("x3".into()))
}

/// Classifies the curve cut on the exceptional surface P(w1, w2, 1) by a
/// weighted homogeneous equation, normalizing it onto `x1*x3^p + x2^q` or
/// `x1*x2 + x3^(w1+w2)` with every substitution recorded.
///
/// The equation must not be divisible by x3 or be one of the parameter
/// forms in x1 or x2, and its weighted degree is at most w1 + w2; a forced
/// coefficient vanishing en route means the input was reducible.
pub fn classify_curve(
    w1: u64,
    w2: u64,
    f: &WeightedHomPoly,
) -> Result<CrepantCase, ClassifyError> {
    check_weights(w1, w2)?;
    let expected_weights = [BigInt::from(w1), BigInt::from(w2), BigInt::one()];
    if f.weights() != expected_weights {
        return Err(ClassifyError::MismatchedPolyWeights(
            f.weights().iter().map(|w| w.to_string()).collect(),
        ));
    }
    if *f.degree() > BigInt::from(w1 + w2) {
        return Err(ClassifyError::DegreeTooLarge {
            degree: f.degree().clone(),
            bound: w1 + w2,
        });
    }
    let d = f.degree().to_u64().expect("degree fits");
    if f.terms().all(|(e, _)| e[2].is_positive()) {
        return Err(ClassifyError::ExcludedLocus("x3".into()));
    }
    let has_x1 = f.terms().any(|(e, _)| e[0].is_positive());
    if !has_x1 {
        if d == w2 {
            return Err(ClassifyError::ExcludedLocus("u2".into()));
        }
        return Err(ClassifyError::NoUnitMonomial);
    }
    if d == w1 {
        return Err(ClassifyError::ExcludedLocus("u1".into()));
    }
    let subs = Vec::new();
    if d < w1 + w2 {
        return hypersurface_form(w1, w2, f, subs);
    }
    if w1 > w2 {
        if coeff(f, [1, 1, 0]).is_zero() {
            return hypersurface_form(w1, w2, f, subs);
        }
        return saturated_form(w1, w2, f, subs);
    }
    quadratic_form(w1, f, subs)
}

/// Feasibility data for the weight chain `(1-t)*w1 <= w2 <= t*w1` that a
/// divisor computing log canonical threshold `t` of a degenerate fibre must
/// satisfy, for coprime weights derived from its orders. The chain is empty
/// for every pair when t < 1/2, and at t = 1/2 the only coprime solution is
/// (2, 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfLemmaVerdict {
    /// The intersection-bound value 1/w1 + (1-t)/w2 - (1-b)/(w1*w2).
    pub step_one_value: Rational,
    /// `(1-t)*w1 <= w2`.
    pub lower_holds: bool,
    /// `w2 <= t*w1`.
    pub upper_holds: bool,
    pub chain_holds: bool,
    /// No pair of positive weights satisfies the chain for this t.
    pub infeasible_for_all: bool,
    /// At t = 1/2 the chain forces this pair.
    pub forced_pair: Option<(u64, u64)>,
}

/// Evaluates the inequality chain and the intersection bound exactly for
/// coprime weights w1 >= w2, a threshold value t > 0, and a boundary
/// multiplicity b in [0, 1).
pub fn half_lemma_check(
    w1: u64,
    w2: u64,
    t: &Rational,
    b: &Rational,
) -> Result<HalfLemmaVerdict, ClassifyError> {
    check_weights(w1, w2)?;
    if w1.gcd(&w2) != 1 {
        return Err(ClassifyError::NotCoprime(w1, w2));
    }
    if !t.is_positive() {
        return Err(ClassifyError::BadParameter(format!(
            "t must be positive, got {}",
            format_rational(t)
        )));
    }
    if b.is_negative() || *b >= Rational::one() {
        return Err(ClassifyError::BadParameter(format!(
            "b must lie in [0, 1), got {}",
            format_rational(b)
        )));
    }
    let one = Rational::one();
    let rw1 = Rational::from(BigInt::from(w1));
    let rw2 = Rational::from(BigInt::from(w2));
    let step_one_value =
        rw1.recip() + (&one - t) / &rw2 - (&one - b) / (&rw1 * &rw2);
    // The same value written as a single fraction over w1*w2.
    let repacked = (&rw1 + &rw2 - &one + b - t * &rw1) / (&rw1 * &rw2);
    assert_eq!(step_one_value, repacked, "the two expansions agree");
    let lower_holds = (&one - t) * &rw1 <= rw2;
    let upper_holds = rw2 <= t * &rw1;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    Ok(HalfLemmaVerdict {
        step_one_value,
        lower_holds,
        upper_holds,
        chain_holds: lower_holds && upper_holds,
        infeasible_for_all: *t < half,
        forced_pair: if *t == half { Some((2, 1)) } else { None },
    })
}

/// Per-point certificate for the log canonicity of the pair given by the
/// saturated curve plus the line x3 = 0 on P(w1, w2, 1).
///
/// A common factor of the weights rescales x3 and reduces the whole
/// configuration to the coprime pair, which is recorded. At each of the two
/// torus-fixed points on the line, the curve and the line become the two
/// coordinate axes of a cyclic quotient surface germ after an equivariant
/// parameter shift, so the local threshold is exactly 1 and the local mld
/// of the boundary pair is exactly 0; the third fixed point misses the
/// boundary entirely. Along the line, the restricted pair has total degree
/// zero and the two points carry coefficient one in the restriction.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturatedLcCertificate {
    pub reduced_weights: (u64, u64),
    pub common_factor: u64,
    /// Origin mld of the local boundary pair at the three fixed points.
    pub corner_mlds: [Rational; 3],
    /// Local threshold of the boundary at the two points on the line.
    pub corner_lcts: [Rational; 2],
    /// Degree of the restriction of the full pair to the line.
    pub adjunction_degree: Rational,
    /// Coefficients of the two points in the restricted boundary.
    pub point_coefficients: [Rational; 2],
    pub holds: bool,
}

/// Builds the certificate for the saturated case on P(w1, w2, 1).
pub fn saturated_lc_certificate(
    w1: u64,
    w2: u64,
) -> Result<SaturatedLcCertificate, ClassifyError> {
    check_weights(w1, w2)?;
    let g = w1.gcd(&w2);
    let (r1, r2) = (w1 / g, w2 / g);
    // The x3 parameter shift folding the curve onto a coordinate axis is
    // equivariant exactly because the curve degree reduces to the weight.
    debug_assert!((r1 + r2) % r1 == r2 % r1 && (r1 + r2) % r2 == r1 % r2);

    let corner_germ = |r: u64, a: u64| -> Result<ToricGerm, ClassifyError> {
        if r == 1 {
            Ok(ToricGerm::smooth(2))
        } else {
            Ok(ToricGerm::quotient(r as i64, &[(a % r) as i64, 1])?)
        }
    };
    let germ1 = corner_germ(r1, r2)?;
    let germ2 = corner_germ(r2, r1)?;
    let germ3 = ToricGerm::smooth(2);

    let one = Rational::one();
    let axes = MonomialRIdeal::coordinate_divisor(&[one.clone(), one.clone()])?;
    let origin = CentreFace::origin(2);
    let mld_at = |germ: &ToricGerm, pair: &MonomialRIdeal| -> Result<Rational, ClassifyError> {
        let report = mld(germ, pair, &origin)?;
        Ok(report
            .finite_value()
            .expect("boundary pairs here are log canonical")
            .clone())
    };
    let corner_mlds = [
        mld_at(&germ1, &axes)?,
        mld_at(&germ2, &axes)?,
        mld_at(&germ3, &MonomialRIdeal::trivial(2))?,
    ];

    let boundary = MonomialRIdeal::from_ideal(
        MonomialIdeal::from_u64(2, &[&[1, 1]])?,
        Rational::one(),
    )?;
    let trivial = MonomialRIdeal::trivial(2);
    let lct_at = |germ: &ToricGerm| -> Result<Rational, ClassifyError> {
        match lc_threshold(germ, &trivial, &boundary)? {
            Threshold::Finite(v) => Ok(v),
            Threshold::Infinite => unreachable!("the boundary ideal is nontrivial"),
        }
    };
    let corner_lcts = [lct_at(&germ1)?, lct_at(&germ2)?];

    let rw1 = Rational::from(BigInt::from(r1));
    let rw2 = Rational::from(BigInt::from(r2));
    let line_sq = (&rw1 * &rw2).recip();
    // Degrees on the reduced surface: canonical -(r1+r2+1), curve r1+r2,
    // line 1; the restriction of the full pair to the line has degree zero.
    let adjunction_degree =
        (Rational::from(BigInt::from(r1 + r2)) + &one - Rational::from(BigInt::from(r1 + r2 + 1)))
            * &line_sq;
    // Local curve-line intersections at the two points sum to the global one.
    let local = [rw1.recip(), rw2.recip()];
    assert_eq!(
        &local[0] + &local[1],
        Rational::from(BigInt::from(r1 + r2)) * &line_sq,
        "local intersections assemble the global number"
    );
    let point_coefficients = [
        &one - rw1.recip() + &local[0],
        &one - rw2.recip() + &local[1],
    ];
    // The line coefficient itself assembles from the generic stabilizer.
    let gr = Rational::from(BigInt::from(g));
    assert_eq!(&one - gr.recip() + gr.recip(), one);

    let zero = Rational::zero();
    let holds = corner_mlds[0] == zero
        && corner_mlds[1] == zero
        && corner_mlds[2] == Rational::from(BigInt::from(2))
        && corner_lcts == [one.clone(), one.clone()]
        && adjunction_degree.is_zero()
        && point_coefficients == [one.clone(), one];
    Ok(SaturatedLcCertificate {
        reduced_weights: (r1, r2),
        common_factor: g,
        corner_mlds,
        corner_lcts,
        adjunction_degree,
        point_coefficients,
        holds,
    })
}

/// Whether the saturated-curve-plus-line pair on P(w1, w2, 1) is log
/// canonical, by the per-point certificates.
pub fn verify_saturated_lc(w1: u64, w2: u64) -> Result<bool, ClassifyError> {
    Ok(saturated_lc_certificate(w1, w2)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    fn poly(w1: u64, w2: u64, terms: &[(&[u64], i64)]) -> WeightedHomPoly {
        WeightedHomPoly::from_u64(&[w1, w2, 1], terms).unwrap()
    }

    #[test]
    fn hypersurface_normal_form_is_detected() {
        let f = poly(2, 1, &[(&[1, 0, 1], 1), (&[0, 3, 0], 1)]);
        let case = classify_curve(2, 1, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::HypersurfaceCurve { p: 1, q: 3 });
        assert!(case.substitutions.is_empty());
        assert_eq!(case.normal_form.as_ref(), Some(&f));
    }

    #[test]
    fn saturated_normal_form_is_detected() {
        let f = poly(3, 2, &[(&[1, 1, 0], 1), (&[0, 0, 5], 1)]);
        let case = classify_curve(3, 2, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::SaturatedCurve);
        assert!(case.substitutions.is_empty());
    }

    #[test]
    fn tail_terms_are_absorbed_into_the_first_parameter() {
        let f = poly(2, 1, &[(&[1, 0, 1], 1), (&[0, 3, 0], 1), (&[0, 2, 1], 1)]);
        let case = classify_curve(2, 1, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::HypersurfaceCurve { p: 1, q: 3 });
        assert_eq!(case.substitutions, vec!["x1 -> x1 + x2^2".to_string()]);
        let normal = case.normal_form.unwrap();
        assert_eq!(
            normal,
            poly(2, 1, &[(&[1, 0, 1], 1), (&[0, 3, 0], 1)])
        );
        // Classifying the emitted form again is substitution-free.
        let again = classify_curve(2, 1, &normal).unwrap();
        assert_eq!(again.tag, CrepantTag::HypersurfaceCurve { p: 1, q: 3 });
        assert!(again.substitutions.is_empty());
    }

    #[test]
    fn interior_degrees_classify_without_the_top_degree_split() {
        let f = poly(3, 2, &[(&[1, 0, 1], 1), (&[0, 2, 0], 1)]);
        let case = classify_curve(3, 2, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::HypersurfaceCurve { p: 1, q: 2 });
    }

    #[test]
    fn forced_vanishing_coefficients_are_reducible() {
        let f = poly(2, 1, &[(&[1, 1, 0], 1), (&[0, 2, 1], 1)]);
        match classify_curve(2, 1, &f).unwrap_err() {
            ClassifyError::ReducibleNormalForm(_) => {}
            other => panic!("expected reducibility, got {other:?}"),
        }
        // (x1 + x3)(x2 + x3) expanded.
        let f = poly(
            1,
            1,
            &[(&[1, 1, 0], 1), (&[1, 0, 1], 1), (&[0, 1, 1], 1), (&[0, 0, 2], 1)],
        );
        match classify_curve(1, 1, &f).unwrap_err() {
            ClassifyError::ReducibleNormalForm(_) => {}
            other => panic!("expected reducibility, got {other:?}"),
        }
    }

    #[test]
    fn excluded_loci_and_degrees_are_rejected() {
        let f = poly(2, 1, &[(&[1, 0, 1], 1), (&[0, 1, 2], 1)]);
        assert_eq!(
            classify_curve(2, 1, &f).unwrap_err(),
            ClassifyError::ExcludedLocus("x3".into())
        );
        let f = poly(2, 1, &[(&[1, 0, 0], 1), (&[0, 2, 0], 1)]);
        assert_eq!(
            classify_curve(2, 1, &f).unwrap_err(),
            ClassifyError::ExcludedLocus("u1".into())
        );
        let f = poly(2, 1, &[(&[0, 1, 0], 1), (&[0, 0, 1], 3)]);
        assert_eq!(
            classify_curve(2, 1, &f).unwrap_err(),
            ClassifyError::ExcludedLocus("u2".into())
        );
        let f = poly(2, 1, &[(&[0, 3, 0], 1), (&[0, 0, 3], 1)]);
        assert_eq!(
            classify_curve(2, 1, &f).unwrap_err(),
            ClassifyError::NoUnitMonomial
        );
        let f = poly(2, 1, &[(&[2, 0, 0], 1)]);
        assert_eq!(
            classify_curve(2, 1, &f).unwrap_err(),
            ClassifyError::DegreeTooLarge {
                degree: BigInt::from(4),
                bound: 3
            }
        );
    }

    #[test]
    fn equal_weights_split_into_the_two_quadratic_branches() {
        let f = poly(1, 1, &[(&[1, 1, 0], 1), (&[0, 0, 2], 1)]);
        let case = classify_curve(1, 1, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::SaturatedCurve);
        assert!(case.substitutions.is_empty());

        let f = poly(1, 1, &[(&[1, 1, 0], 1), (&[1, 0, 1], 1), (&[0, 0, 2], 1)]);
        let case = classify_curve(1, 1, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::SaturatedCurve);
        assert_eq!(case.substitutions, vec!["x2 -> x2 + x3".to_string()]);

        let f = poly(1, 1, &[(&[1, 1, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]);
        let case = classify_curve(1, 1, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::SaturatedCurve);
        assert_eq!(case.substitutions, vec!["x1 -> x1 + x2".to_string()]);

        let f = poly(
            2,
            2,
            &[(&[0, 2, 0], 1), (&[1, 0, 2], 1), (&[0, 1, 2], 1), (&[0, 0, 4], 1)],
        );
        let case = classify_curve(2, 2, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::HypersurfaceCurve { p: 2, q: 2 });
        assert_eq!(
            case.substitutions,
            vec!["x1 -> x1 + x2 + x3^2".to_string()]
        );
        assert_eq!(
            case.normal_form.unwrap(),
            poly(2, 2, &[(&[1, 0, 2], 1), (&[0, 2, 0], 1)])
        );

        let f = poly(2, 2, &[(&[2, 0, 0], 1), (&[0, 0, 4], 1)]);
        match classify_curve(2, 2, &f).unwrap_err() {
            ClassifyError::QuadraticPartNotSplit(_) => {}
            other => panic!("expected the quadratic rejection, got {other:?}"),
        }
    }

    #[test]
    fn rescalings_are_recorded() {
        let f = poly(2, 1, &[(&[1, 0, 1], 3), (&[0, 3, 0], 6)]);
        let case = classify_curve(2, 1, &f).unwrap();
        assert_eq!(case.tag, CrepantTag::HypersurfaceCurve { p: 1, q: 3 });
        assert_eq!(
            case.substitutions,
            vec![
                "f -> (1/3)*f".to_string(),
                "f -> (1/2)*f".to_string(),
                "x1 -> (1/2)*(x1)".to_string(),
            ]
        );
    }

    #[test]
    fn normal_form_constraint_holds_across_admissible_weights() {
        for w1 in 1..=6u64 {
            for w2 in 1..=w1 {
                for p in 1..=w2 {
                    if (w1 + p) % w2 != 0 {
                        continue;
                    }
                    let q = (w1 + p) / w2;
                    let f = poly(w1, w2, &[(&[1, 0, p], 1), (&[0, q, 0], 1)]);
                    let case = classify_curve(w1, w2, &f).unwrap();
                    assert_eq!(case.tag, CrepantTag::HypersurfaceCurve { p, q });
                    assert!(case.substitutions.is_empty());
                    assert!(w1 + p == q * w2 && q * w2 <= w1 + w2);
                }
            }
        }
    }

    #[test]
    fn half_chain_examples() {
        let v = half_lemma_check(2, 1, &rat(1, 2), &rat(1, 2)).unwrap();
        assert!(v.chain_holds);
        assert_eq!(v.forced_pair, Some((2, 1)));
        assert!(!v.infeasible_for_all);
        assert_eq!(v.step_one_value, rat(3, 4));

        let v = half_lemma_check(3, 1, &rat(1, 2), &rat_int(0)).unwrap();
        assert!(!v.chain_holds);
        assert_eq!(v.forced_pair, Some((2, 1)));

        let v = half_lemma_check(3, 2, &rat(1, 3), &rat_int(0)).unwrap();
        assert!(v.infeasible_for_all);
        assert!(!v.chain_holds);

        let v = half_lemma_check(5, 3, &rat_int(1), &rat(1, 2)).unwrap();
        assert!(v.chain_holds);
        assert_eq!(v.forced_pair, None);

        assert_eq!(
            half_lemma_check(4, 2, &rat(1, 2), &rat_int(0)).unwrap_err(),
            ClassifyError::NotCoprime(4, 2)
        );
    }

    #[test]
    fn half_chain_is_empty_below_one_half_and_pins_two_one_at_it() {
        let half = rat(1, 2);
        for w1 in 1..=12u64 {
            for w2 in 1..=w1 {
                if w1.gcd(&w2) != 1 {
                    continue;
                }
                let v = half_lemma_check(w1, w2, &rat(2, 5), &rat_int(0)).unwrap();
                assert!(!v.chain_holds, "({w1},{w2}) admits no divisor at t=2/5");
                let v = half_lemma_check(w1, w2, &half, &rat_int(0)).unwrap();
                assert_eq!(v.chain_holds, (w1, w2) == (2, 1));
            }
        }
    }

    #[test]
    fn saturated_pairs_are_log_canonical() {
        for (w1, w2) in [(2, 1), (1, 1), (3, 2)] {
            let cert = saturated_lc_certificate(w1, w2).unwrap();
            assert!(cert.holds, "({w1},{w2})");
            assert_eq!(cert.corner_mlds[0], rat_int(0));
            assert_eq!(cert.corner_lcts, [rat_int(1), rat_int(1)]);
            assert_eq!(cert.adjunction_degree, rat_int(0));
            assert_eq!(cert.point_coefficients, [rat_int(1), rat_int(1)]);
        }
        for w1 in 1..=5u64 {
            for w2 in 1..=w1 {
                if w1.gcd(&w2) == 1 {
                    assert!(verify_saturated_lc(w1, w2).unwrap());
                }
            }
        }
        let cert = saturated_lc_certificate(4, 2).unwrap();
        assert_eq!(cert.common_factor, 2);
        assert_eq!(cert.reduced_weights, (2, 1));
        assert!(cert.holds);
    }

    #[test]
    fn divisor_case_carries_no_curve_datum() {
        let case = CrepantCase::exceptional_divisor(3, 2).unwrap();
        assert_eq!(case.tag, CrepantTag::ExceptionalDivisor);
        assert!(case.normal_form.is_none());
        assert_eq!(
            CrepantCase::exceptional_divisor(2, 3).unwrap_err(),
            ClassifyError::BadWeights(2, 3)
        );
    }
}
