//! The dimension-2 engine: finding a weighted blow-up whose exceptional
//! divisor computes the mld, and the step-by-step blow-up procedure that
//! reaches a computing divisor through ordinary point blow-ups.
//!
//! Both run on monomial R-ideals over the smooth surface germ and serve as
//! the independent oracle for curve centres on threefolds.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{LatticeVector, Rational};
use crate::ideals::{IdealsError, MonomialIdeal, MonomialRIdeal};
use crate::valuations::{
    is_m_primary, lc_threshold, mld, CentreFace, MldReport, MldValue, Threshold, ToricGerm,
    ValuationsError,
};

#[derive(Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error(transparent)]
    Valuations(#[from] ValuationsError),
    #[error(transparent)]
    Ideals(#[from] IdealsError),
    #[error("surface operations need a 2-dimensional ideal, got dimension {0}")]
    WrongDimension(usize),
    #[error("ideal must be m-primary or a product of principal monomials")]
    UnsupportedIdeal,
    #[error("mld persists at both chart origins after step {0}")]
    AmbiguousDescent(usize),
    #[error("no chart origin kept the mld after step {0}")]
    LostWitness(usize),
    #[error("blow-up sequence exceeded {0} steps")]
    SequenceOverflow(usize),
}

/// Weights of a weighted blow-up of the plane whose exceptional divisor
/// computes the mld of the pair at the origin, together with the full
/// report. Non-lc pairs return the report with its negative witness; the
/// weights are then the witness's.
pub fn computing_wblowup_search(
    ideal: &MonomialRIdeal,
) -> Result<((BigInt, BigInt), MldReport), SurfaceError> {
    if ideal.dim() != 2 {
        return Err(SurfaceError::WrongDimension(ideal.dim()));
    }
    if !ideal.is_trivial() && !is_m_primary(ideal) && !all_principal(ideal) {
        return Err(SurfaceError::UnsupportedIdeal);
    }
    let germ = ToricGerm::smooth(2);
    let report = mld(&germ, ideal, &CentreFace::origin(2))?;
    let witness = report
        .witness
        .as_ref()
        .expect("origin mld always has a witness");
    let (coords, _) = witness.weight().clear_denominators();
    Ok(((coords[0].clone(), coords[1].clone()), report))
}

fn all_principal(ideal: &MonomialRIdeal) -> bool {
    ideal
        .factors()
        .iter()
        .all(|(factor, _)| factor.generators().len() == 1)
}

/// One step of the blow-up sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceStep {
    /// Exceptional valuation of this step, in original coordinates.
    pub valuation: LatticeVector,
    /// Its log discrepancy over the (rescaled) pair.
    pub a_value: Rational,
    /// Which chart origin the walk descended into, None on the final step.
    pub chart_choice: Option<usize>,
}

/// The blow-up sequence: repeated origin blow-ups reaching a divisor that
/// computes the mld of the pair at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSequence {
    /// Exponent applied to a non-lc input to bring it to the lc threshold.
    pub rescale: Option<Rational>,
    /// The mld being chased, of the rescaled pair when a rescale applied.
    pub target: Rational,
    pub steps: Vec<SequenceStep>,
}

impl BlowupSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_valuation(&self) -> &LatticeVector {
        &self
            .steps
            .last()
            .expect("sequences have at least one step")
            .valuation
    }

    /// Step vectors as integer pairs.
    pub fn vectors(&self) -> Vec<Vec<BigInt>> {
        self.steps
            .iter()
            .map(|s| {
                s.valuation
                    .as_integers()
                    .expect("sequence vectors are integral")
            })
            .collect()
    }
}

/// Runs the blow-up sequence for a pair on the smooth surface germ.
///
/// Non-lc inputs are first rescaled by their lc threshold. Each round blows
/// up the current point; if the exceptional valuation's log discrepancy
/// equals the mld, the divisor computes it and the walk stops. Otherwise
/// the mld survives at exactly one of the two torus-fixed points of the
/// exceptional curve, and the walk descends there.
pub fn blowup_sequence(ideal: &MonomialRIdeal) -> Result<BlowupSequence, SurfaceError> {
    if ideal.dim() != 2 {
        return Err(SurfaceError::WrongDimension(ideal.dim()));
    }
    let germ = ToricGerm::smooth(2);
    let origin = CentreFace::origin(2);
    let trivial = MonomialRIdeal::trivial(2);

    let mut rescale = None;
    let mut working = ideal.clone();
    let lc = crate::valuations::is_lc(&germ, ideal)?;
    if !lc.holds {
        match lc_threshold(&germ, &trivial, ideal)? {
            Threshold::Finite(t) => {
                working = ideal.pow(&t)?;
                rescale = Some(t);
            }
            Threshold::Infinite => unreachable!("non-lc ideals are nontrivial"),
        }
    }
    let report = mld(&germ, &working, &origin)?;
    let target = match report.value {
        MldValue::Finite(v) => v,
        MldValue::MinusInfinity => {
            unreachable!("rescaled pairs are lc, so the origin mld is finite")
        }
    };

    // Ambient walk: current cone basis over the original germ, plus the
    // chart-local weak transform and boundary for the persistence probes.
    let mut basis = [
        LatticeVector::standard_basis(2, 0),
        LatticeVector::standard_basis(2, 1),
    ];
    let mut weak: Vec<(Vec<Vec<BigInt>>, Rational)> = working
        .factors()
        .iter()
        .map(|(f, e)| (f.generators().to_vec(), e.clone()))
        .collect();
    let mut boundary = [Rational::zero(), Rational::zero()];
    let mut steps: Vec<SequenceStep> = Vec::new();
    const CAP: usize = 512;
    for step in 0..CAP {
        let v = basis[0].add(&basis[1]);
        let a_v = v.coordinate_sum() - working.ord_along(&v);
        if a_v == target {
            steps.push(SequenceStep {
                valuation: v,
                a_value: a_v,
                chart_choice: None,
            });
            return Ok(BlowupSequence {
                rescale,
                target,
                steps,
            });
        }
        // Weak transform data after this blow-up: per factor, the drop is
        // the total order of its generators at the current point.
        let drops: Vec<BigInt> = weak
            .iter()
            .map(|(gens, _)| {
                gens.iter()
                    .map(|m| &m[0] + &m[1])
                    .min()
                    .expect("factors keep at least one generator")
            })
            .collect();
        let exceptional_coeff = Rational::one() - &a_v;
        let mut surviving = Vec::new();
        let mut candidates = Vec::new();
        for k in 0..2usize {
            let mut next_weak = Vec::new();
            for ((gens, exp), drop) in weak.iter().zip(&drops) {
                let gens_next: Vec<Vec<BigInt>> = gens
                    .iter()
                    .map(|m| {
                        let mut out = m.clone();
                        out[k] = &m[0] + &m[1] - drop;
                        out
                    })
                    .collect();
                next_weak.push((gens_next, exp.clone()));
            }
            let mut next_boundary = boundary.clone();
            next_boundary[k] = exceptional_coeff.clone();
            let folded = fold(&next_weak, &next_boundary)?;
            let local = mld(&germ, &folded, &origin)?;
            if local.finite_value() == Some(&target) {
                surviving.push(k);
            }
            candidates.push((next_weak, next_boundary));
        }
        let k = match surviving.as_slice() {
            [k] => *k,
            [] => return Err(SurfaceError::LostWitness(step)),
            _ => return Err(SurfaceError::AmbiguousDescent(step)),
        };
        steps.push(SequenceStep {
            valuation: v.clone(),
            a_value: a_v,
            chart_choice: Some(k),
        });
        let (next_weak, next_boundary) = candidates.swap_remove(k);
        weak = next_weak;
        boundary = next_boundary;
        basis[k] = v;
    }
    Err(SurfaceError::SequenceOverflow(CAP))
}

/// Folds chart-local weak transform factors and boundary coefficients into
/// a single R-ideal for the local mld probe.
fn fold(
    weak: &[(Vec<Vec<BigInt>>, Rational)],
    boundary: &[Rational; 2],
) -> Result<MonomialRIdeal, SurfaceError> {
    let mut factors = Vec::new();
    for (gens, exp) in weak {
        let ideal = MonomialIdeal::new(2, gens.clone())?;
        if !ideal.is_trivial() {
            factors.push((ideal, exp.clone()));
        }
    }
    let base = if factors.is_empty() {
        MonomialRIdeal::trivial(2)
    } else {
        MonomialRIdeal::new(2, factors)?
    };
    Ok(base.product(&MonomialRIdeal::coordinate_divisor(boundary)?))
}
