//! Construction of canonical pairs over the smooth threefold germ by
//! iterated crepant divisorial extractions, with a full trace and a
//! recomputed bound ledger.
//!
//! The driver loop, numbered so the termination tags below can refer to
//! their stopping rule:
//!
//!  1. start with the input germ as the current model;
//!  2. the current model has terminal quotient singularities;
//!  3. if the centre of the tracked computing valuation on the current
//!     model is positive dimensional, output the model (`Process3`);
//!  4. otherwise the centre is a point; take its local index r, the weak
//!     transform of the r-th power of the input ideal, and the pair given
//!     by its (q/r)-th power;
//!  5. at a smooth point whose pair has origin mld at least 1, output
//!     (`Process5`);
//!  6. at a smooth point whose pair has origin mld below 1, go to 9;
//!  7. at a singular point whose pair has origin mld above 1, output
//!     (`Process7`);
//!  8. at a singular point whose pair has origin mld at most 1, go to 9;
//!  9. solve for the exponent q_i at which the origin mld is exactly 1,
//!     extract a divisor computing it by a weighted blow-up all of whose
//!     charts are terminal, descend into the chart holding the tracked
//!     valuation, and return to 2.
//!
//! At a smooth point the extraction weight has the shape (w1, w2, 1) up to
//! permutation with w1, w2 coprime; at a singular point it is the unique
//! interior point of the fundamental box with coordinate sum 1 + 1/r. Both
//! searches are exact, and failure to find a qualifying weight is reported
//! as a structured error carrying the computing valuations found.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{format_rational, LatticeVector, Rational};
use crate::blowup::{weighted_blowup, BlowupError};
use crate::ideals::{IdealsError, MonomialIdeal, MonomialRIdeal};
use crate::valuations::{
    a_lc_threshold_unguarded, a_log_discrepancy, mld, CentreFace, MldValue, ToricGerm,
    ToricValuation, ValuationsError,
};

#[derive(Debug, Error, PartialEq)]
pub enum CanonizeError {
    #[error(transparent)]
    Valuations(#[from] ValuationsError),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error(transparent)]
    Ideals(#[from] IdealsError),
    #[error("the construction needs a 3-dimensional ideal, got dimension {0}")]
    WrongDimension(usize),
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(String),
    #[error("gap must be positive, got {0}")]
    NonPositiveGap(String),
    #[error("gap {0} is too small for an exact ledger (recurrence depth over a million)")]
    GapTooSmall(String),
    #[error("pair is not log canonical: valuation {witness} has log discrepancy {value}")]
    NotLogCanonical { witness: String, value: String },
    #[error(
        "no computing valuation of extraction shape with terminal charts at step {step}; \
         computing valuations found: {computing:?}"
    )]
    NoContraction { step: usize, computing: Vec<String> },
    #[error("weak transform power is not an ideal on the model at step {0}")]
    StateNotIdeal(usize),
    #[error("internal consistency check failed: {0}")]
    InvariantViolated(String),
    #[error("no termination after {0} extractions")]
    NonTermination(usize),
}

/// Which rule of the driver loop ended the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The tracked valuation's centre became positive dimensional.
    Process3,
    /// Smooth point whose pair has origin mld at least 1.
    Process5,
    /// Singular point whose pair has origin mld above 1.
    Process7,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Process3 => write!(f, "Process3"),
            Termination::Process5 => write!(f, "Process5"),
            Termination::Process7 => write!(f, "Process7"),
        }
    }
}

/// One extraction step of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonizeStep {
    /// The model germ at the centre point before this extraction.
    pub germ: ToricGerm,
    /// Local index r of the point.
    pub index: BigInt,
    /// Weak transform of the r-th power of the input, in chart exponents.
    /// Generated by the scaled exponent set; all computations use only its
    /// order function, which matches the honest power.
    pub weak_ideal: MonomialIdeal,
    /// The exponent at which the origin mld of the local pair is exactly 1.
    pub q_i: Rational,
    /// Extraction weight on the current germ.
    pub chart_weight: LatticeVector,
    /// The same valuation in the coordinates of the input germ.
    pub global_weight: LatticeVector,
    /// Its log discrepancy over the input pair at exponent q.
    pub a_original: Rational,
    /// Boundary coefficients on the chart coordinates before this step.
    /// Lies in [0, 1) coordinatewise when the input mld is positive.
    pub delta: Vec<Rational>,
    /// Order of the reduced old-exceptional divisor along the weight.
    pub exceptional_order: Rational,
}

/// Full record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonizeTrace {
    pub ideal: MonomialIdeal,
    pub q: Rational,
    /// Origin mld of the input pair.
    pub initial_mld: Rational,
    /// The tracked computing valuation, in input coordinates.
    pub tracked: LatticeVector,
    pub steps: Vec<CanonizeStep>,
    pub termination: Termination,
    /// The chart germ of the final model at the tracked valuation's centre.
    pub output_germ: ToricGerm,
    /// The weak-transform pair on the output germ, normalized to exponent
    /// one on the input scale.
    pub output_ideal: MonomialRIdeal,
    /// Centre of the tracked valuation on the output germ.
    pub output_centre: CentreFace,
    /// Boundary coefficients on the output chart coordinates.
    pub output_delta: Vec<Rational>,
    /// The mld of the boundary-decorated output pair along the centre,
    /// re-verified to equal `initial_mld`.
    pub preserved_mld: Rational,
}

/// Constants recomputed from a trace, with the observations they bound.
///
/// `epsilon` is supplied by the caller as the assumed uniform gap q_i <= q -
/// epsilon at smooth points; the recurrence constants depend only on it and
/// q. `empirical_gap` reports the observed minimum of q - q_i over smooth
/// points so the assumption can be validated after the fact.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundLedger {
    pub epsilon: Rational,
    /// Bound on every local index in the run.
    pub r_bound: Rational,
    /// Bound on the log discrepancy over the input germ of every extracted
    /// divisor, from the recurrence c_{j+1} = 2 + (c_j - 1) n.
    pub c_bound: Rational,
    /// Bound on the log discrepancy of some divisor computing the input
    /// mld, valid when that mld is positive.
    pub l_bound: Rational,
    /// Observed minimum of q - q_i over smooth-point steps.
    pub empirical_gap: Option<Rational>,
    /// Largest local index seen.
    pub observed_index: BigInt,
    /// Largest log discrepancy over the input germ among extracted divisors.
    pub observed_discrepancy: Rational,
    /// Observations lie within the recomputed bounds.
    pub sound: bool,
}

impl BoundLedger {
    pub fn from_trace(trace: &CanonizeTrace, epsilon: &Rational) -> Result<Self, CanonizeError> {
        if !epsilon.is_positive() {
            return Err(CanonizeError::NonPositiveGap(format_rational(epsilon)));
        }
        let q = &trace.q;
        let one = Rational::one();
        // Smallest positive integer clearing the exponent's denominator.
        let n = Rational::from(q.denom().clone());
        let ratio = q / epsilon;
        let c0 = ceil_rational(&ratio).max(BigInt::one());
        let r_bound_int = (&c0 - BigInt::from(2)).max(BigInt::one());
        let depth = r_bound_int
            .to_u64()
            .filter(|d| *d <= 1_000_000)
            .ok_or_else(|| CanonizeError::GapTooSmall(format_rational(epsilon)))?;
        let mut c = Rational::from(c0);
        for _ in 0..depth {
            c = Rational::from(BigInt::from(2)) + (&c - &one) * &n;
        }
        let c_bound = c;
        let r_bound = Rational::from(r_bound_int);

        // Surrogates observed from the trace: the two-dimensional constant
        // is replaced by the recurrence bound, and the multiplicity bound by
        // the largest order of the maximal ideal along a recorded valuation.
        let l_prime = c_bound.clone();
        let mut b = min_coordinate(&trace.tracked);
        for step in &trace.steps {
            let m = min_coordinate(&step.global_weight);
            if m > b {
                b = m;
            }
        }
        let b = b.max(one.clone());
        let eta = reciprocal_gap(q);
        let growth = &one + q / &eta;
        let l_bound = [
            c_bound.clone(),
            &l_prime + (&c_bound - &one) * &b,
            &growth * (Rational::from(BigInt::from(3)) + &b) - q / &eta
                + (&c_bound - &one) * &b,
        ]
        .into_iter()
        .max()
        .expect("three candidates");

        let mut empirical_gap: Option<Rational> = None;
        let mut observed_index = BigInt::one();
        let mut observed_discrepancy = one.clone();
        for step in &trace.steps {
            if step.germ.is_smooth() {
                let gap = q - &step.q_i;
                if empirical_gap.as_ref().map(|g| gap < *g).unwrap_or(true) {
                    empirical_gap = Some(gap);
                }
            }
            if step.index > observed_index {
                observed_index = step.index.clone();
            }
            let a = step.global_weight.coordinate_sum();
            if a > observed_discrepancy {
                observed_discrepancy = a;
            }
        }
        if trace.output_germ.index() > &observed_index {
            observed_index = trace.output_germ.index().clone();
        }
        let sound = Rational::from(observed_index.clone()) <= r_bound
            && observed_discrepancy <= c_bound;
        Ok(BoundLedger {
            epsilon: epsilon.clone(),
            r_bound,
            c_bound,
            l_bound,
            empirical_gap,
            observed_index,
            observed_discrepancy,
            sound,
        })
    }
}

fn ceil_rational(x: &Rational) -> BigInt {
    let floor = x.floor().to_integer();
    if &Rational::from(floor.clone()) == x {
        floor
    } else {
        floor + 1
    }
}

fn min_coordinate(v: &LatticeVector) -> Rational {
    v.coords()
        .iter()
        .min()
        .cloned()
        .unwrap_or_else(Rational::zero)
}

/// Largest eta such that no reciprocal of a positive integer lies strictly
/// between q and q + eta.
fn reciprocal_gap(q: &Rational) -> Rational {
    if *q >= Rational::one() {
        return Rational::one();
    }
    let inv = Rational::one() / q;
    let a_star = if inv.denom().is_one() {
        inv.to_integer() - 1
    } else {
        inv.to_integer()
    };
    Rational::new(BigInt::one(), a_star) - q
}

/// Checks of the run's step data against the input pair, each exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    /// Steps i > 0 with q_i below the previous exponent.
    pub monotone_violations: Vec<usize>,
    /// Steps whose weight has log discrepancy above 1 over the input pair
    /// at its own exponent q_i.
    pub crepant_bound_violations: Vec<usize>,
    /// Steps whose weight has log discrepancy at least 1 over the input
    /// pair at exponent q.
    pub strict_bound_violations: Vec<usize>,
    /// Steps with q_i != q whose weight has log discrepancy over the bare
    /// germ above q/(q - q_i).
    pub ratio_bound_violations: Vec<usize>,
}

impl LemmaReport {
    pub fn pass(&self) -> bool {
        self.monotone_violations.is_empty()
            && self.crepant_bound_violations.is_empty()
            && self.strict_bound_violations.is_empty()
            && self.ratio_bound_violations.is_empty()
    }
}

/// Recomputes the four step-data properties of a run from the input pair
/// and the recorded global weights alone.
pub fn verify_algorithm_lemmas(trace: &CanonizeTrace) -> LemmaReport {
    let one = Rational::one();
    let mut report = LemmaReport {
        monotone_violations: Vec::new(),
        crepant_bound_violations: Vec::new(),
        strict_bound_violations: Vec::new(),
        ratio_bound_violations: Vec::new(),
    };
    for (i, step) in trace.steps.iter().enumerate() {
        if i > 0 && step.q_i < trace.steps[i - 1].q_i {
            report.monotone_violations.push(i);
        }
        let a_germ = step.global_weight.coordinate_sum();
        let ord = trace.ideal.ord_along(&step.global_weight);
        if &a_germ - &step.q_i * &ord > one {
            report.crepant_bound_violations.push(i);
        }
        if &a_germ - &trace.q * &ord >= one {
            report.strict_bound_violations.push(i);
        }
        if step.q_i != trace.q {
            let cap = &trace.q / (&trace.q - &step.q_i);
            if a_germ > cap {
                report.ratio_bound_violations.push(i);
            }
        }
    }
    report
}

/// No nontrivial point of the fundamental box has coordinate sum at most 1.
fn is_terminal_germ(germ: &ToricGerm) -> bool {
    if germ.is_smooth() {
        return true;
    }
    let bounds = vec![BigInt::one(); germ.dim()];
    germ.lattice()
        .points_in_box(&bounds)
        .into_iter()
        .all(|p| p.is_zero() || p.coordinate_sum() > Rational::one())
}

/// The unique interior fundamental-box point with coordinate sum 1 + 1/r,
/// which is the weight of the only divisorial extraction from a terminal
/// quotient point.
fn kawamata_weight(germ: &ToricGerm) -> Option<LatticeVector> {
    let target = Rational::one() + Rational::new(BigInt::one(), germ.index().clone());
    let bounds = vec![BigInt::one(); germ.dim()];
    germ.lattice()
        .points_in_box(&bounds)
        .into_iter()
        .find(|p| !p.is_zero() && p.coordinate_sum() == target)
}

fn dot(v: &LatticeVector, m: &[Rational]) -> Rational {
    v.coords().iter().zip(m).map(|(a, b)| a * b).sum()
}

fn ord_state(weak: &[Vec<Rational>], v: &LatticeVector) -> Rational {
    weak.iter()
        .map(|m| dot(v, m))
        .min()
        .unwrap_or_else(Rational::zero)
}

/// The state scaled by an integer, as an honest monomial ideal on the germ:
/// exponents must become integral and invariant under the group action.
fn state_ideal(
    germ: &ToricGerm,
    weak: &[Vec<Rational>],
    scale: &BigInt,
    step: usize,
) -> Result<MonomialIdeal, CanonizeError> {
    let factor = Rational::from(scale.clone());
    let mut gens = Vec::with_capacity(weak.len());
    for m in weak {
        let mut row = Vec::with_capacity(m.len());
        for c in m {
            let scaled = c * &factor;
            if !scaled.denom().is_one() {
                return Err(CanonizeError::StateNotIdeal(step));
            }
            row.push(scaled.to_integer());
        }
        gens.push(row);
    }
    let r = germ.index();
    if !r.is_one() {
        for row in &gens {
            let mut pairing = BigInt::zero();
            for (e, a) in row.iter().zip(germ.weights()) {
                pairing += e * a;
            }
            if !(&pairing % r).is_zero() {
                return Err(CanonizeError::StateNotIdeal(step));
            }
        }
    }
    Ok(MonomialIdeal::new(germ.dim(), gens)?)
}

/// The state as an R-ideal with the smallest valid integral scale.
fn state_r_ideal(
    germ: &ToricGerm,
    weak: &[Vec<Rational>],
    step: usize,
) -> Result<MonomialRIdeal, CanonizeError> {
    let mut base = BigInt::one();
    for m in weak {
        for c in m {
            base = base.lcm(c.denom());
        }
    }
    let r = germ.index().clone();
    let mut k = BigInt::one();
    while k <= r {
        let scale = &base * &k;
        if let Ok(ideal) = state_ideal(germ, weak, &scale, step) {
            return Ok(MonomialRIdeal::from_ideal(
                ideal,
                Rational::new(BigInt::one(), scale),
            )?);
        }
        k += 1;
    }
    Err(CanonizeError::StateNotIdeal(step))
}

/// Lexicographically smallest weight of shape (w1, w2, 1) up to coordinate
/// permutation, coprime in its two non-unit entries, computing mld 1 of the
/// pair and inducing a blow-up with terminal charts.
fn choose_smooth_contraction(
    germ: &ToricGerm,
    pair: &MonomialRIdeal,
    bound: u64,
    step: usize,
) -> Result<ToricValuation, CanonizeError> {
    let one = Rational::one();
    let mut computing = Vec::new();
    for w1 in 1..=bound {
        for w2 in 1..=bound {
            for w3 in 1..=bound {
                let v = LatticeVector::from_integers(&[w1 as i64, w2 as i64, w3 as i64]);
                let a = v.coordinate_sum() - pair.ord_along(&v);
                if a != one {
                    continue;
                }
                if w1.gcd(&w2).gcd(&w3) == 1 && computing.len() < 32 {
                    computing.push(v.to_string());
                }
                let shaped = (w1 == 1 && w2.gcd(&w3) == 1)
                    || (w2 == 1 && w1.gcd(&w3) == 1)
                    || (w3 == 1 && w1.gcd(&w2) == 1);
                if !shaped {
                    continue;
                }
                let val = ToricValuation::new(germ, &v)?;
                let bl = weighted_blowup(germ, &val)?;
                if bl.charts().iter().all(|c| is_terminal_germ(c.germ())) {
                    return Ok(val);
                }
            }
        }
    }
    Err(CanonizeError::NoContraction { step, computing })
}

/// Runs the driver loop on `(A^3, ideal^q)` and returns the trace together
/// with the ledger recomputed at the supplied gap.
pub fn canonize(
    ideal: &MonomialIdeal,
    q: &Rational,
    epsilon: &Rational,
) -> Result<(CanonizeTrace, BoundLedger), CanonizeError> {
    if ideal.dim() != 3 {
        return Err(CanonizeError::WrongDimension(ideal.dim()));
    }
    if !q.is_positive() {
        return Err(CanonizeError::NonPositiveExponent(format_rational(q)));
    }
    if !epsilon.is_positive() {
        return Err(CanonizeError::NonPositiveGap(format_rational(epsilon)));
    }
    let one = Rational::one();
    let germ0 = ToricGerm::smooth(3);
    let origin = CentreFace::origin(3);
    let input_pair = MonomialRIdeal::from_ideal(ideal.clone(), q.clone())?;
    let input_report = mld(&germ0, &input_pair, &origin)?;
    let tracked_val = input_report
        .witness
        .clone()
        .expect("origin mld always carries a witness");
    let initial_mld = match &input_report.value {
        MldValue::Finite(v) => v.clone(),
        MldValue::MinusInfinity => {
            let value = a_log_discrepancy(&germ0, &tracked_val, &input_pair, &[])?;
            return Err(CanonizeError::NotLogCanonical {
                witness: tracked_val.to_string(),
                value: format_rational(&value),
            });
        }
    };

    // Running state: the current chart germ, the tracked valuation and the
    // weak transform of the input in chart coordinates, the boundary, which
    // chart coordinates are old-exceptional, and the frame mapping chart
    // coordinates back to input coordinates.
    let mut germ = germ0.clone();
    let mut e_local = tracked_val.weight().clone();
    let mut weak: Vec<Vec<Rational>> = ideal
        .generators()
        .iter()
        .map(|g| g.iter().map(|e| Rational::from(e.clone())).collect())
        .collect();
    let mut delta = vec![Rational::zero(); 3];
    let mut s_flags = [false; 3];
    let mut frame: Vec<LatticeVector> =
        (0..3).map(|i| LatticeVector::standard_basis(3, i)).collect();
    let mut steps: Vec<CanonizeStep> = Vec::new();

    const CAP: usize = 128;
    let mut outcome: Option<(Termination, CentreFace)> = None;
    for step_no in 0..CAP {
        let r = germ.index().clone();
        let b_ideal = state_ideal(&germ, &weak, &r, step_no)?;
        let exponent = q / Rational::from(r.clone());
        let pair_q = MonomialRIdeal::from_ideal(b_ideal.clone(), exponent)?;
        let local = mld(&germ, &pair_q, &origin)?;
        let Some(m_local) = local.finite_value() else {
            return Err(CanonizeError::InvariantViolated(format!(
                "local pair lost log canonicity at step {step_no}"
            )));
        };
        let smooth = germ.is_smooth();
        if smooth && *m_local >= one {
            outcome = Some((Termination::Process5, CentreFace::origin(3)));
            break;
        }
        if !smooth && *m_local > one {
            outcome = Some((Termination::Process7, CentreFace::origin(3)));
            break;
        }

        // Step 9: the exponent with local mld 1, then the extraction.
        let b_r = MonomialRIdeal::from_ideal(
            b_ideal.clone(),
            Rational::new(BigInt::one(), r.clone()),
        )?;
        let q_i = a_lc_threshold_unguarded(&germ, &MonomialRIdeal::trivial(3), &b_r, &one)?;
        debug_assert!(q_i.is_positive(), "the solved exponent is positive");
        let pair_qi = b_r.pow(&q_i)?;
        let f_val = if smooth {
            let check = mld(&germ, &pair_qi, &origin)?;
            if check.finite_value() != Some(&one) {
                return Err(CanonizeError::InvariantViolated(format!(
                    "solved exponent does not give mld 1 at step {step_no}"
                )));
            }
            let bound = check.search_box_bound.max(12);
            choose_smooth_contraction(&germ, &pair_qi, bound, step_no)?
        } else {
            let Some(kw) = kawamata_weight(&germ) else {
                return Err(CanonizeError::NoContraction {
                    step: step_no,
                    computing: Vec::new(),
                });
            };
            let val = ToricValuation::new(&germ, &kw)?;
            let a = kw.coordinate_sum() - pair_qi.ord_along(&kw);
            if a != one {
                return Err(CanonizeError::NoContraction {
                    step: step_no,
                    computing: vec![format!("{} with log discrepancy {}", kw, format_rational(&a))],
                });
            }
            let bl = weighted_blowup(&germ, &val)?;
            if !bl.charts().iter().all(|c| is_terminal_germ(c.germ())) {
                return Err(CanonizeError::NoContraction {
                    step: step_no,
                    computing: vec![kw.to_string()],
                });
            }
            val
        };

        // Log discrepancy of the extracted divisor over the input pair,
        // computed on the chart through the boundary and re-derived in
        // input coordinates; the two must agree exactly.
        let fw = f_val.weight().clone();
        let mut global_f = LatticeVector::zero(3);
        for j in 0..3 {
            global_f = global_f.add(&frame[j].scale(fw.coord(j)));
        }
        let a_chart = fw.coordinate_sum()
            - dot(&fw, &delta)
            - q * ord_state(&weak, &fw);
        let a_input = global_f.coordinate_sum() - q * ideal.ord_along(&global_f);
        if a_chart != a_input {
            return Err(CanonizeError::InvariantViolated(format!(
                "crepant values diverge at step {step_no}: chart {} vs input {}",
                format_rational(&a_chart),
                format_rational(&a_input)
            )));
        }
        let exceptional_order: Rational = fw
            .coords()
            .iter()
            .zip(&s_flags)
            .filter(|(_, flag)| **flag)
            .map(|(c, _)| c.clone())
            .sum();
        steps.push(CanonizeStep {
            germ: germ.clone(),
            index: r.clone(),
            weak_ideal: b_ideal,
            q_i,
            chart_weight: fw.clone(),
            global_weight: global_f.clone(),
            a_original: a_input.clone(),
            delta: delta.clone(),
            exceptional_order,
        });

        // Descend into the chart holding the tracked valuation.
        let bl = weighted_blowup(&germ, &f_val)?;
        let mut full: Option<(usize, Vec<Rational>)> = None;
        let mut partial: Option<(usize, Vec<Rational>)> = None;
        for chart in bl.charts() {
            if let Some(lam) = chart.coefficients(&e_local)? {
                if lam.iter().all(|c| c.is_positive()) {
                    full = Some((chart.coordinate(), lam));
                    break;
                }
                if partial.is_none() {
                    partial = Some((chart.coordinate(), lam));
                }
            }
        }
        let (k, lam, interior) = match (full, partial) {
            (Some((k, lam)), _) => (k, lam, true),
            (None, Some((k, lam))) => (k, lam, false),
            (None, None) => {
                return Err(CanonizeError::InvariantViolated(format!(
                    "tracked valuation left the blow-up fan at step {step_no}"
                )))
            }
        };
        let drop_ord = ord_state(&weak, &fw);
        for m in weak.iter_mut() {
            let total = dot(&fw, m);
            m[k] = total - &drop_ord;
        }
        delta[k] = &one - &a_input;
        s_flags[k] = true;
        frame[k] = global_f;
        e_local = LatticeVector::new(lam.clone());
        germ = bl.chart(k)?.germ().clone();
        if !interior {
            let support: Vec<usize> = lam
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_positive())
                .map(|(j, _)| j)
                .collect();
            outcome = Some((Termination::Process3, CentreFace::face(&support, 3)?));
            break;
        }
    }
    let Some((termination, output_centre)) = outcome else {
        return Err(CanonizeError::NonTermination(CAP));
    };

    let output_ideal = state_r_ideal(&germ, &weak, steps.len())?;
    let folded = output_ideal
        .pow(q)?
        .product(&MonomialRIdeal::coordinate_divisor(&delta)?);
    let check = mld(&germ, &folded, &output_centre)?;
    let preserved_mld = match check.finite_value() {
        Some(v) if *v == initial_mld => v.clone(),
        other => {
            return Err(CanonizeError::InvariantViolated(format!(
                "output pair has mld {:?} along the centre, input pair had {}",
                other.map(format_rational),
                format_rational(&initial_mld)
            )))
        }
    };

    let trace = CanonizeTrace {
        ideal: ideal.clone(),
        q: q.clone(),
        initial_mld,
        tracked: tracked_val.weight().clone(),
        steps,
        termination,
        output_germ: germ,
        output_ideal,
        output_centre,
        output_delta: delta,
        preserved_mld,
    };
    let ledger = BoundLedger::from_trace(&trace, epsilon)?;
    Ok((trace, ledger))
}
