//! The named checks behind `verify-suite`.
//!
//! Every check is deterministic in (seed, count) and reports how many
//! assertions it ran and how many failed. Checks never abort on a bad
//! instance: engine errors on corpus instances count as violations so a
//! regression surfaces in the manifest instead of a crash.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mldkit::algebra::{rat, rat_int, LatticeVector, Rational};
use mldkit::blowup::{
    different_on_exceptional, regular_tower, tower_discrepancy_profile, weighted_blowup,
    DifferentLocus,
};
use mldkit::canonize::{canonize, verify_algorithm_lemmas, Termination};
use mldkit::classify::{classify_curve, half_lemma_check, verify_saturated_lc, CrepantTag};
use mldkit::ideals::{newton_polyhedron_membership, MonomialIdeal, MonomialRIdeal, WeightedHomPoly};
use mldkit::valuations::{
    a_log_discrepancy, is_lc, lc_threshold, lc_threshold_witness, log_discrepancy, mld,
    mld_with_options, CentreFace, MldOptions, MldValue, Threshold, ToricGerm, ToricValuation,
    ValuationsError,
};

use crate::io::{self, AppError};

/// Manifest order is fixed; the suite output must be byte-identical across
/// runs with the same seed and count.
pub const CHECK_NAMES: [&str; 12] = [
    "anchors",
    "mld-box-oracle",
    "lct-consistency",
    "tower-gates",
    "mld-convexity",
    "canonize-lemmas",
    "half-dichotomy",
    "fractional-multiplier",
    "classifier-constraint",
    "tower-continued-fraction",
    "determinism",
    "schema-structure",
];

const MAX_NOTES: usize = 8;

pub struct CheckOutcome {
    pub name: &'static str,
    pub instances: u64,
    pub violations: u64,
    pub notes: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            instances: 0,
            violations: 0,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations += 1;
            if self.notes.len() < MAX_NOTES {
                self.notes.push(note());
            }
        }
    }

    fn violation(&mut self, note: String) {
        self.check(false, || note);
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

// ---- corpus generators ----

/// Half smooth, half cyclic quotient with index up to 7 and last weight 1.
fn random_germ(rng: &mut ChaCha8Rng, dim: usize) -> ToricGerm {
    if rng.gen_bool(0.5) {
        return ToricGerm::smooth(dim);
    }
    loop {
        let r = rng.gen_range(2..=7i64);
        let mut weights = vec![1i64; dim];
        for w in weights.iter_mut().take(dim - 1) {
            *w = rng.gen_range(1..r);
        }
        // Pseudo-reflection data is rejected by the lattice; retry.
        if let Ok(germ) = ToricGerm::quotient(r, &weights) {
            return germ;
        }
    }
}

fn random_generators(
    rng: &mut ChaCha8Rng,
    dim: usize,
    count: usize,
    max_entry: u64,
) -> Vec<Vec<BigInt>> {
    let mut gens = Vec::new();
    for _ in 0..count {
        loop {
            let e: Vec<BigInt> = (0..dim)
                .map(|_| BigInt::from(rng.gen_range(0..=max_entry)))
                .collect();
            if e.iter().any(|x| x.is_positive()) {
                gens.push(e);
                break;
            }
        }
    }
    gens
}

/// Up to three factors, generator entries at most 6, exponent denominators
/// at most 12. With `m_primary`, every factor gains a pure power on each
/// axis so the cosupport is the origin.
fn random_rideal(rng: &mut ChaCha8Rng, dim: usize, m_primary: bool) -> MonomialRIdeal {
    let factor_count = rng.gen_range(1..=3usize);
    let mut factors = Vec::new();
    for _ in 0..factor_count {
        let gen_count = rng.gen_range(1..=3usize);
        let mut gens = random_generators(rng, dim, gen_count, 6);
        if m_primary {
            for i in 0..dim {
                let mut e = vec![BigInt::zero(); dim];
                e[i] = BigInt::from(rng.gen_range(1..=6u64));
                gens.push(e);
            }
        }
        let ideal = MonomialIdeal::new(dim, gens).expect("corpus generators are valid");
        let den = rng.gen_range(1..=12u64);
        let num = rng.gen_range(1..=(2 * den).min(24));
        factors.push((ideal, rat(num as i64, den as i64)));
    }
    MonomialRIdeal::new(dim, factors).expect("corpus factors are valid")
}

/// A cosupport-at-origin plain ideal in three variables: pure powers up to 4
/// on each axis plus up to two mixed generators.
fn random_canonize_ideal(rng: &mut ChaCha8Rng) -> MonomialIdeal {
    let mut gens = Vec::new();
    for i in 0..3 {
        let mut e = vec![BigInt::zero(); 3];
        e[i] = BigInt::from(rng.gen_range(1..=4u64));
        gens.push(e);
    }
    let mixed_count = rng.gen_range(0..=2usize);
    gens.extend(random_generators(rng, 3, mixed_count, 4));
    MonomialIdeal::new(3, gens).expect("corpus generators are valid")
}

// ---- shared helpers ----

fn wide_options() -> MldOptions {
    MldOptions {
        initial_box: 8,
        box_limit: 1024,
    }
}

/// Minimum of the mld over every nonempty coordinate face, the germ-wide
/// reading: zero exactly at the lc threshold, minus infinity beyond it.
fn germwide_mld(
    germ: &ToricGerm,
    ideal: &MonomialRIdeal,
) -> Result<(MldValue, bool), ValuationsError> {
    let d = germ.dim();
    let mut best: Option<Rational> = None;
    let mut certified = true;
    for mask in 1u32..(1 << d) {
        let indices: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let face = CentreFace::face(&indices, d)?;
        let report = mld_with_options(germ, ideal, &face, &wide_options())?;
        certified &= report.certified;
        match report.value {
            MldValue::MinusInfinity => return Ok((MldValue::MinusInfinity, certified)),
            MldValue::Finite(v) => {
                best = Some(match best {
                    Some(b) if b <= v => b,
                    _ => v,
                });
            }
        }
    }
    Ok((MldValue::Finite(best.expect("at least one face")), certified))
}

fn finite(v: i64) -> MldValue {
    MldValue::Finite(rat_int(v))
}

fn ones(dim: usize) -> Vec<Rational> {
    vec![Rational::one(); dim]
}

fn ideal_of(dim: usize, gens: &[&[u64]], exp: Rational) -> MonomialRIdeal {
    MonomialRIdeal::from_ideal(
        MonomialIdeal::from_u64(dim, gens).expect("fixed generators"),
        exp,
    )
    .expect("fixed exponent")
}

// ---- the independent box oracle ----

/// Brute-force evaluator over the covering lattice in scaled integer
/// arithmetic: a point `n` stands for `n / r`, and values are returned
/// scaled by `r * lden` so every comparison stays in i128.
struct ScaledEvaluator {
    dim: usize,
    r: i128,
    weights: Vec<i128>,
    lden: i128,
    factors: Vec<(i128, Vec<Vec<i128>>)>,
}

impl ScaledEvaluator {
    fn new(germ: &ToricGerm, ideal: &MonomialRIdeal) -> Result<Self, String> {
        let to128 = |x: &BigInt, what: &str| x.to_i128().ok_or(format!("{what} exceeds i128"));
        let r = to128(germ.index(), "index")?;
        let weights = if germ.is_smooth() {
            vec![0; germ.dim()]
        } else {
            germ.weights()
                .iter()
                .map(|w| to128(w, "weight"))
                .collect::<Result<_, _>>()?
        };
        let mut lden: i128 = 1;
        for (_, exp) in ideal.factors() {
            let den = to128(exp.denom(), "denominator")?;
            lden = lden.lcm(&den);
        }
        let mut factors = Vec::new();
        for (factor, exp) in ideal.factors() {
            let num = to128(exp.numer(), "numerator")?;
            let den = to128(exp.denom(), "denominator")?;
            let gens = factor
                .generators()
                .iter()
                .map(|g| g.iter().map(|e| to128(e, "exponent")).collect())
                .collect::<Result<_, _>>()?;
            factors.push((num * (lden / den), gens));
        }
        Ok(ScaledEvaluator {
            dim: germ.dim(),
            r,
            weights,
            lden,
            factors,
        })
    }

    /// `value(n/r) * r * lden` for a scaled point `n`.
    fn value(&self, n: &[i128]) -> i128 {
        let mut v = self.lden * n.iter().sum::<i128>();
        for (coeff, gens) in &self.factors {
            let ord = gens
                .iter()
                .map(|g| g.iter().zip(n).map(|(a, b)| a * b).sum::<i128>())
                .min()
                .expect("factors are nontrivial");
            v -= coeff * ord;
        }
        v
    }

    /// Minimum of the scaled value over every lattice point with scaled
    /// coordinates in `[1, r*bound]`. The lattice is the union over residue
    /// classes `k` of `k*weights + r*Z^d`, so each class is enumerated as an
    /// integer box.
    fn box_minimum(&self, bound: u64) -> Option<i128> {
        let mut best: Option<i128> = None;
        let top = self.r * bound as i128;
        for k in 0..self.r {
            let offsets: Vec<i128> = self
                .weights
                .iter()
                .map(|a| (a * k).rem_euclid(self.r))
                .collect();
            // n_i = offsets_i + r*m_i must lie in [1, top].
            let lows: Vec<i128> = offsets.iter().map(|o| i128::from(*o == 0)).collect();
            let highs: Vec<i128> = offsets.iter().map(|o| (top - o) / self.r).collect();
            if lows.iter().zip(&highs).any(|(l, h)| l > h) {
                continue;
            }
            let mut m = lows.clone();
            loop {
                let n: Vec<i128> = (0..self.dim)
                    .map(|i| offsets[i] + m[i] * self.r)
                    .collect();
                let v = self.value(&n);
                if best.map_or(true, |b| v < b) {
                    best = Some(v);
                }
                let mut i = 0;
                while i < self.dim {
                    m[i] += 1;
                    if m[i] <= highs[i] {
                        break;
                    }
                    m[i] = lows[i];
                    i += 1;
                }
                if i == self.dim {
                    break;
                }
            }
        }
        best
    }

    /// The scaled coordinates of a valuation weight, if integral over r.
    fn scaled_point(&self, w: &LatticeVector) -> Option<Vec<i128>> {
        w.coords()
            .iter()
            .map(|c| {
                let scaled = c * Rational::from(BigInt::from(self.r));
                if scaled.denom().is_one() {
                    scaled.numer().to_i128()
                } else {
                    None
                }
            })
            .collect()
    }

    fn is_lattice_point(&self, n: &[i128]) -> bool {
        (0..self.r).any(|k| {
            n.iter()
                .zip(&self.weights)
                .all(|(ni, ai)| (ni - k * ai).rem_euclid(self.r) == 0)
        })
    }
}

// ---- check 1: anchors ----

fn check_anchors() -> CheckOutcome {
    let mut out = CheckOutcome::new("anchors");
    let origin3 = CentreFace::origin(3);
    let trivial3 = MonomialRIdeal::trivial(3);

    match mld(&ToricGerm::smooth(3), &trivial3, &origin3) {
        Ok(report) => out.check(
            report.value == finite(3) && report.certified,
            || format!("smooth threefold point: {}", report.value),
        ),
        Err(e) => out.violation(format!("smooth threefold point: {e}")),
    }

    // Cyclic quotients 1/r(b, r-b, 1): the barycentric lattice point
    // (b, r-b, 1)/r has log discrepancy 1 + 1/r and computes the mld.
    for r in 2..=7i64 {
        for b in 1..r {
            if b.gcd(&r) != 1 {
                continue;
            }
            let expected = Rational::one() + rat(1, r);
            let instance = (|| -> Result<(Rational, MldValue, bool), AppError> {
                let germ = ToricGerm::quotient(r, &[b, r - b, 1])?;
                let ray = LatticeVector::new(vec![rat(b, r), rat(r - b, r), rat(1, r)]);
                let val = ToricValuation::new(&germ, &ray)?;
                let a = log_discrepancy(&germ, &val);
                let report = mld(&germ, &trivial3, &origin3)?;
                Ok((a, report.value, report.certified))
            })();
            match instance {
                Ok((a, value, certified)) => {
                    out.check(a == expected, || {
                        format!("1/{r}({b},{},1) weight discrepancy", r - b)
                    });
                    out.check(value == MldValue::Finite(expected.clone()) && certified, || {
                        format!("1/{r}({b},{},1) mld: {value}", r - b)
                    });
                }
                Err(e) => out.violation(format!("1/{r}({b},?,1): {e:?}")),
            }
        }
    }

    // Different of a (r,1) surface blow-up: coefficient 1 - 1/r at the
    // singular chart point, 0 at the smooth one.
    let g2 = ToricGerm::smooth(2);
    for r in 1..=7i64 {
        let instance = (|| -> Result<(), String> {
            let w = ToricValuation::new(&g2, &LatticeVector::from_integers(&[r, 1]))
                .map_err(|e| e.to_string())?;
            let bl = weighted_blowup(&g2, &w).map_err(|e| e.to_string())?;
            let different = different_on_exceptional(&bl).map_err(|e| e.to_string())?;
            let expect = [
                (DifferentLocus::ChartPoint(0), Rational::one() - rat(1, r)),
                (DifferentLocus::ChartPoint(1), Rational::zero()),
            ];
            for (locus, coeff) in expect {
                if !different.iter().any(|(l, c)| *l == locus && *c == coeff) {
                    return Err(format!("missing {locus} with coefficient {coeff}"));
                }
            }
            Ok(())
        })();
        match instance {
            Ok(()) => out.check(true, String::new),
            Err(e) => out.violation(format!("surface different (r={r}): {e}")),
        }
    }

    // Different of a (r,r,1) threefold blow-up: 1 - 1/r along the line.
    let g3 = ToricGerm::smooth(3);
    for r in 2..=7i64 {
        let instance = (|| -> Result<bool, String> {
            let w = ToricValuation::new(&g3, &LatticeVector::from_integers(&[r, r, 1]))
                .map_err(|e| e.to_string())?;
            let bl = weighted_blowup(&g3, &w).map_err(|e| e.to_string())?;
            let different = different_on_exceptional(&bl).map_err(|e| e.to_string())?;
            let coeff = Rational::one() - rat(1, r);
            Ok(different
                .iter()
                .any(|(l, c)| matches!(l, DifferentLocus::Line) && *c == coeff))
        })();
        match instance {
            Ok(found) => out.check(found, || format!("threefold different (r={r})")),
            Err(e) => out.violation(format!("threefold different (r={r}): {e}")),
        }
    }

    out
}

// ---- check 2: mld-box-oracle ----

fn check_box_oracle(seed: u64, count: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("mld-box-oracle");
    let mut rng = rng_for(seed, 2);
    for i in 0..count {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = random_germ(&mut rng, dim);
        let ideal = random_rideal(&mut rng, dim, false);
        let origin = CentreFace::origin(dim);
        let report = match mld_with_options(&germ, &ideal, &origin, &wide_options()) {
            Ok(r) => r,
            Err(e) => {
                out.violation(format!("instance {i}: {e}"));
                continue;
            }
        };
        if !report.certified {
            out.violation(format!("instance {i}: uncertified at box {}", report.search_box_bound));
            continue;
        }
        let evaluator = match ScaledEvaluator::new(&germ, &ideal) {
            Ok(e) => e,
            Err(msg) => {
                out.violation(format!("instance {i}: {msg}"));
                continue;
            }
        };
        match &report.value {
            MldValue::MinusInfinity => {
                // A single lattice point of negative log discrepancy inside
                // the box is already the brute-force conclusion: values scale
                // linearly along rays, so the box minimum is negative if and
                // only if such a point exists. Re-evaluate the reported
                // witness in independent arithmetic instead of scanning what
                // may be a very large box.
                let top = evaluator.r * 2 * report.search_box_bound as i128;
                let witness_ok = report
                    .witness
                    .as_ref()
                    .and_then(|w| evaluator.scaled_point(w.weight()))
                    .map(|n| {
                        evaluator.is_lattice_point(&n)
                            && n.iter().all(|c| (1..=top).contains(c))
                            && evaluator.value(&n) < 0
                    })
                    .unwrap_or(false);
                out.check(witness_ok, || {
                    format!("instance {i}: negative witness fails re-evaluation")
                });
            }
            MldValue::Finite(v) => {
                let budget: u128 = 40_000_000;
                let points =
                    (2 * report.search_box_bound as u128).pow(dim as u32) * evaluator.r as u128;
                if points > budget {
                    out.violation(format!(
                        "instance {i}: oracle box of {points} points exceeds the scan budget"
                    ));
                    continue;
                }
                let Some(min) = evaluator.box_minimum(2 * report.search_box_bound) else {
                    out.violation(format!("instance {i}: empty oracle box"));
                    continue;
                };
                let oracle = Rational::new(
                    BigInt::from(min),
                    BigInt::from(evaluator.r * evaluator.lden),
                );
                out.check(oracle == *v, || {
                    format!("instance {i}: engine {v} oracle {oracle}")
                });
            }
        }
    }
    out
}

// ---- check 3: lct-consistency ----

fn check_lct_consistency(seed: u64, count: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("lct-consistency");
    let mut rng = rng_for(seed, 3);
    let bump = rat(1, 1000);
    for i in 0..count {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = random_germ(&mut rng, dim);
        let trivial = MonomialRIdeal::trivial(dim);
        let use_trivial_base = rng.gen_bool(0.25);
        let raw = random_rideal(&mut rng, dim, false);
        let b = random_rideal(&mut rng, dim, false);
        let instance = (|| -> Result<Vec<String>, AppError> {
            let base = if use_trivial_base {
                trivial.clone()
            } else {
                // Halfway to its own threshold, so the base pair is klt.
                match lc_threshold(&germ, &trivial, &raw)? {
                    Threshold::Finite(t0) if t0.is_positive() => raw.pow(&(t0 / rat_int(2)))?,
                    _ => trivial.clone(),
                }
            };
            let (t, witness) = match lc_threshold_witness(&germ, &base, &b)? {
                (Threshold::Finite(t), Some(w)) => (t, w),
                _ => {
                    return Ok(vec!["threshold is infinite on a proper ideal".into()]);
                }
            };
            let mut bad = Vec::new();
            let at = if t.is_positive() {
                base.product(&b.pow(&t)?)
            } else {
                base.clone()
            };
            let above = base.product(&b.pow(&(&t + &bump))?);
            // One in the t-dilation of the Newton polyhedron, out at t + 1/1000.
            if !newton_polyhedron_membership(&at, &ones(dim), &Rational::one())? {
                bad.push(format!("1 leaves the polyhedron at t = {t}"));
            }
            if newton_polyhedron_membership(&above, &ones(dim), &Rational::one())? {
                bad.push("1 stays in the polyhedron above the threshold".into());
            }
            // Exact statements of "mld 0 at the threshold": the pair is lc,
            // and the threshold ray attains log discrepancy zero.  The ray
            // can sit far outside any search box, so the box engine is only
            // held to soundness here: nothing negative at the threshold.
            if !is_lc(&germ, &at)?.holds {
                bad.push("pair is not lc at its own threshold".into());
            }
            let a_w = a_log_discrepancy(&germ, &witness, &at, &[])?;
            if !a_w.is_zero() {
                bad.push(format!("threshold witness has log discrepancy {a_w}"));
            }
            let (value_at, _) = germwide_mld(&germ, &at)?;
            match &value_at {
                MldValue::Finite(v) if !v.is_negative() => {}
                _ => bad.push(format!("engine reports {value_at} at the threshold")),
            }
            if is_lc(&germ, &above)?.holds {
                bad.push("pair stays lc above its threshold".into());
            }
            let (value_above, _) = germwide_mld(&germ, &above)?;
            if value_above != MldValue::MinusInfinity {
                bad.push(format!("mld above the threshold is {value_above}"));
            }
            Ok(bad)
        })();
        match instance {
            Ok(bad) if bad.is_empty() => out.check(true, String::new),
            Ok(bad) => out.violation(format!("instance {i}: {}", bad.join("; "))),
            Err(e) => out.violation(format!("instance {i}: {e:?}")),
        }
    }
    out
}

// ---- check 4: tower-gates ----

fn check_tower_gates(seed: u64, count: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("tower-gates");
    let mut rng = rng_for(seed, 4);
    for i in 0..count {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = ToricGerm::smooth(dim);
        let origin = CentreFace::origin(dim);
        let weight: Vec<i64> = (0..dim).map(|_| rng.gen_range(1..=6)).collect();
        let raw = random_rideal(&mut rng, dim, false);
        let point_order = raw.ord_along(&LatticeVector::from_integers(&vec![1; dim]));
        let instance = (|| -> Result<Vec<String>, AppError> {
            let w = ToricValuation::new(&germ, &LatticeVector::from_integers(&weight))?;
            let mut bad = Vec::new();
            for (label, target_order) in [("unit", rat_int(1)), ("half", rat(1, 2))] {
                let ideal = raw.pow(&(&target_order / &point_order))?;
                let profile = tower_discrepancy_profile(&germ, &w, &ideal)?;
                if profile.satisfies_nondecreasing_gate() != Some(true) {
                    bad.push(format!("{label}: non-decreasing gate fails"));
                }
                if target_order < Rational::one()
                    && profile.satisfies_increasing_gate() != Some(true)
                {
                    bad.push(format!("{label}: strictly increasing gate fails"));
                }
                // A pair of point order at most one has its mld computed by
                // the first blow-up of the tower.
                let report = mld_with_options(&germ, &ideal, &origin, &wide_options())?;
                let first = profile.steps.first().map(|s| s.a_value.clone());
                if report.finite_value() != first.as_ref() {
                    bad.push(format!(
                        "{label}: first step {:?} vs mld {}",
                        first, report.value
                    ));
                }
            }
            Ok(bad)
        })();
        match instance {
            Ok(bad) if bad.is_empty() => out.check(true, String::new),
            Ok(bad) => out.violation(format!("instance {i}: {}", bad.join("; "))),
            Err(e) => out.violation(format!("instance {i}: {e:?}")),
        }
    }
    out
}

// ---- check 5: mld-convexity ----

fn check_convexity(seed: u64, count: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("mld-convexity");
    let mut rng = rng_for(seed, 5);
    for i in 0..count {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = random_germ(&mut rng, dim);
        let origin = CentreFace::origin(dim);
        let a1 = random_rideal(&mut rng, dim, false);
        let a2 = random_rideal(&mut rng, dim, false);
        let instance = (|| -> Result<Vec<String>, AppError> {
            let m1 = mld_with_options(&germ, &a1, &origin, &wide_options())?;
            let m2 = mld_with_options(&germ, &a2, &origin, &wide_options())?;
            let mut bad = Vec::new();
            for t in [rat(1, 4), rat(1, 2), rat(3, 4)] {
                let s = Rational::one() - &t;
                let mix = a1.pow(&t)?.product(&a2.pow(&s)?);
                let m = mld_with_options(&germ, &mix, &origin, &wide_options())?;
                let (Some(v1), Some(v2)) = (m1.finite_value(), m2.finite_value()) else {
                    // A minus-infinity endpoint puts no bound on the mixture.
                    continue;
                };
                let floor = &t * v1 + &s * v2;
                match m.finite_value() {
                    Some(v) if *v >= floor => {}
                    Some(v) => bad.push(format!("t = {t}: {v} < {floor}")),
                    None => bad.push(format!("t = {t}: mixture is -inf, floor {floor}")),
                }
            }
            Ok(bad)
        })();
        match instance {
            Ok(bad) if bad.is_empty() => out.check(true, String::new),
            Ok(bad) => out.violation(format!("instance {i}: {}", bad.join("; "))),
            Err(e) => out.violation(format!("instance {i}: {e:?}")),
        }
    }
    out
}

// ---- check 6: canonize-lemmas ----

fn check_canonize(seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("canonize-lemmas");
    let mut rng = rng_for(seed, 6);
    let germ3 = ToricGerm::smooth(3);
    let trivial3 = MonomialRIdeal::trivial(3);
    let origin3 = CentreFace::origin(3);
    for i in 0..50 {
        let ideal = random_canonize_ideal(&mut rng);
        let scale = [rat(1, 2), rat(3, 4), rat_int(1)][rng.gen_range(0..3usize)].clone();
        let instance = (|| -> Result<Vec<String>, AppError> {
            let pair = MonomialRIdeal::from_ideal(ideal.clone(), Rational::one())?;
            let lct = match lc_threshold(&germ3, &trivial3, &pair)? {
                Threshold::Finite(t) => t,
                Threshold::Infinite => return Ok(vec!["threshold is infinite".into()]),
            };
            let q = &scale * &lct;
            let epsilon = &q / rat_int(20);
            let (trace, ledger) = canonize(&ideal, &q, &epsilon)?;
            let mut bad = Vec::new();
            let lemmas = verify_algorithm_lemmas(&trace);
            if !lemmas.pass() {
                bad.push(format!(
                    "lemma report fails: {:?}/{:?}/{:?}/{:?}",
                    lemmas.monotone_violations,
                    lemmas.crepant_bound_violations,
                    lemmas.strict_bound_violations,
                    lemmas.ratio_bound_violations
                ));
            }
            if !ledger.sound {
                bad.push("bound ledger is unsound".into());
            }
            // Re-verify the crepant equality from the trace alone: fold the
            // output ideal and boundary back into one pair and recompute.
            let folded = trace
                .output_ideal
                .pow(&trace.q)?
                .product(&MonomialRIdeal::coordinate_divisor(&trace.output_delta)?);
            let report =
                mld_with_options(&trace.output_germ, &folded, &trace.output_centre, &wide_options())?;
            if report.finite_value() != Some(&trace.initial_mld) {
                bad.push(format!(
                    "output pair mld {} vs input {}",
                    report.value, trace.initial_mld
                ));
            }
            if trace.termination == Termination::Process5 {
                // Canonicity is claimed for the transformed ideal alone; the
                // boundary enters only the crepant bookkeeping above.
                let bare = trace.output_ideal.pow(&trace.q)?;
                let at_origin =
                    mld_with_options(&trace.output_germ, &bare, &origin3, &wide_options())?;
                match at_origin.finite_value() {
                    Some(v) if *v >= Rational::one() => {}
                    _ => bad.push(format!("canonical output has mld {}", at_origin.value)),
                }
            }
            Ok(bad)
        })();
        match instance {
            Ok(bad) if bad.is_empty() => out.check(true, String::new),
            Ok(bad) => out.violation(format!("instance {i}: {}", bad.join("; "))),
            Err(e) => out.violation(format!("instance {i}: {e}")),
        }
    }
    out
}

// ---- check 7: half-dichotomy ----

struct DichotomyInstance {
    label: &'static str,
    germ: ToricGerm,
    ideal: MonomialRIdeal,
    /// A face whose mld vanishes, the one-dimensional lc centre.
    centre_face: Vec<usize>,
}

fn check_half_dichotomy() -> CheckOutcome {
    let mut out = CheckOutcome::new("half-dichotomy");
    let g3 = ToricGerm::smooth(3);
    let origin = CentreFace::origin(3);
    let half = rat(1, 2);
    let maximal =
        MonomialRIdeal::from_ideal(MonomialIdeal::maximal(3), Rational::one()).expect("maximal");

    let instances = vec![
        DichotomyInstance {
            label: "(x,y)^2",
            germ: g3.clone(),
            ideal: ideal_of(3, &[&[2, 0, 0], &[1, 1, 0], &[0, 2, 0]], rat_int(1)),
            centre_face: vec![0, 1],
        },
        DichotomyInstance {
            label: "(x^2,y^2)",
            germ: g3.clone(),
            ideal: ideal_of(3, &[&[2, 0, 0], &[0, 2, 0]], rat_int(1)),
            centre_face: vec![0, 1],
        },
        DichotomyInstance {
            label: "(y,z)^2",
            germ: g3.clone(),
            ideal: ideal_of(3, &[&[0, 2, 0], &[0, 1, 1], &[0, 0, 2]], rat_int(1)),
            centre_face: vec![1, 2],
        },
        DichotomyInstance {
            label: "(x,y)^2 on 1/2(1,1,0)",
            germ: ToricGerm::quotient(2, &[1, 1, 0]).expect("valid quotient"),
            ideal: ideal_of(3, &[&[2, 0, 0], &[1, 1, 0], &[0, 2, 0]], rat_int(1)),
            centre_face: vec![0, 1],
        },
    ];

    for inst in &instances {
        let result = (|| -> Result<Vec<String>, AppError> {
            let mut bad = Vec::new();
            // Premises: the point mld is 1 and the face is a 1-dimensional
            // lc centre.
            let base = mld_with_options(&inst.germ, &inst.ideal, &origin, &wide_options())?;
            if base.value != finite(1) {
                bad.push(format!("point mld {}", base.value));
            }
            let face = CentreFace::face(&inst.centre_face, 3)?;
            let on_face = mld_with_options(&inst.germ, &inst.ideal, &face, &wide_options())?;
            if on_face.value != finite(0) {
                bad.push(format!("centre face mld {}", on_face.value));
            }
            // Exactly one branch: the multiplier family drops at slope two,
            // or it stays positive at one half.
            let value_at = |s: &Rational| -> Result<MldValue, AppError> {
                let composite = inst.ideal.product(&maximal.pow(s)?);
                Ok(mld_with_options(&inst.germ, &composite, &origin, &wide_options())?.value)
            };
            let mut slope_two = true;
            for s in [rat(1, 4), rat(1, 2)] {
                let expected = Rational::one() - rat_int(2) * &s;
                slope_two &= value_at(&s)? == MldValue::Finite(expected);
            }
            let positive_at_half = match value_at(&half)? {
                MldValue::Finite(v) => v.is_positive(),
                MldValue::MinusInfinity => false,
            };
            if slope_two == positive_at_half {
                bad.push(format!(
                    "branches not exclusive: slope-two {slope_two}, positive at half {positive_at_half}"
                ));
            }
            Ok(bad)
        })();
        match result {
            Ok(bad) if bad.is_empty() => out.check(true, String::new),
            Ok(bad) => out.violation(format!("{}: {}", inst.label, bad.join("; "))),
            Err(e) => out.violation(format!("{}: {e:?}", inst.label)),
        }
    }

    // The slope-two value law itself, on pairs whose computing weight has
    // multiplier order two: mld drops as 1 - 2s.
    for (label, gens) in [
        ("(x^3,y^2,z^3)", [[3u64, 0, 0], [0, 2, 0], [0, 0, 3]]),
        ("(z^3,y^2,x^3)", [[0, 0, 3], [0, 2, 0], [3, 0, 0]]),
    ] {
        let slices: Vec<&[u64]> = gens.iter().map(|g| g.as_slice()).collect();
        let ideal = ideal_of(3, &slices, rat_int(1));
        for s in [rat_int(0), rat(1, 4), rat(1, 2)] {
            let expected = Rational::one() - rat_int(2) * &s;
            let result = (|| -> Result<MldValue, AppError> {
                let composite = if s.is_zero() {
                    ideal.clone()
                } else {
                    ideal.product(&maximal.pow(&s)?)
                };
                Ok(mld_with_options(&g3, &composite, &origin, &wide_options())?.value)
            })();
            match result {
                Ok(value) => out.check(value == MldValue::Finite(expected.clone()), || {
                    format!("{label} at s = {s}: {value} vs {expected}")
                }),
                Err(e) => out.violation(format!("{label} at s = {s}: {e:?}")),
            }
        }
    }

    // Weight-pair side: no divisor satisfies the chain below one half, and
    // at exactly one half the only admissible pair is (2,1).
    for w1 in 1..=12u64 {
        for w2 in 1..=w1 {
            if w1.gcd(&w2) != 1 {
                continue;
            }
            match half_lemma_check(w1, w2, &rat(2, 5), &Rational::zero()) {
                Ok(v) => out.check(!v.chain_holds, || format!("({w1},{w2}) admits t = 2/5")),
                Err(e) => out.violation(format!("({w1},{w2}) at 2/5: {e}")),
            }
            match half_lemma_check(w1, w2, &half, &Rational::zero()) {
                Ok(v) => {
                    out.check(v.chain_holds == ((w1, w2) == (2, 1)), || {
                        format!("({w1},{w2}) chain at 1/2: {}", v.chain_holds)
                    });
                    out.check(v.forced_pair == Some((2, 1)), || {
                        format!("({w1},{w2}) forced pair {:?}", v.forced_pair)
                    });
                }
                Err(e) => out.violation(format!("({w1},{w2}) at 1/2: {e}")),
            }
        }
    }

    out
}

// ---- check 8: fractional-multiplier ----

fn check_fractional_multiplier() -> CheckOutcome {
    let mut out = CheckOutcome::new("fractional-multiplier");
    let g3 = ToricGerm::smooth(3);
    let origin = CentreFace::origin(3);
    let maximal =
        MonomialRIdeal::from_ideal(MonomialIdeal::maximal(3), Rational::one()).expect("maximal");
    let xy = || MonomialIdeal::from_u64(3, &[&[1, 0, 0], &[0, 1, 0]]).expect("plane pair");

    // (ideal, q, admissible n): n*q integral in every case.
    let cases: Vec<(&str, MonomialRIdeal, Rational, Vec<i64>)> = vec![
        (
            "(x,y)^2",
            MonomialRIdeal::from_ideal(xy().pow(2), Rational::one()).expect("ideal"),
            rat_int(1),
            vec![2, 3, 4],
        ),
        (
            "(x,y)^4 at q = 1/2",
            MonomialRIdeal::from_ideal(xy().pow(4), Rational::one()).expect("ideal"),
            rat(1, 2),
            vec![2, 4],
        ),
        (
            "m^2",
            MonomialRIdeal::from_ideal(MonomialIdeal::maximal(3).pow(2), Rational::one())
                .expect("ideal"),
            rat_int(1),
            vec![2, 3, 4],
        ),
        (
            "(x,y)^(2/3) at q = 3",
            MonomialRIdeal::from_ideal(xy(), rat(2, 3)).expect("ideal"),
            rat_int(3),
            vec![2, 3, 4],
        ),
    ];

    for (label, ideal, q, ns) in cases {
        let result = (|| -> Result<Vec<String>, AppError> {
            let mut bad = Vec::new();
            let powered = ideal.pow(&q)?;
            let base = mld_with_options(&g3, &powered, &origin, &wide_options())?;
            if base.value != finite(1) {
                bad.push(format!("base mld {}", base.value));
            }
            let at_half =
                mld_with_options(&g3, &powered.product(&maximal.pow(&rat(1, 2))?), &origin, &wide_options())?;
            match at_half.finite_value() {
                Some(v) if v.is_positive() => {}
                _ => bad.push(format!("half multiplier mld {}", at_half.value)),
            }
            let witness = base.witness.clone().expect("finite mld carries a witness");
            for n in ns {
                let expected = Rational::one() - rat(1, n);
                let composite = powered.product(&maximal.pow(&rat(1, n))?);
                let report = mld_with_options(&g3, &composite, &origin, &wide_options())?;
                if report.value != MldValue::Finite(expected.clone()) {
                    bad.push(format!("n = {n}: mld {}", report.value));
                }
                // The base witness attains the composite mld as well.
                let shared = a_log_discrepancy(&g3, &witness, &composite, &[])?;
                if shared != expected {
                    bad.push(format!("n = {n}: witness value {shared}"));
                }
            }
            Ok(bad)
        })();
        match result {
            Ok(bad) if bad.is_empty() => out.check(true, String::new),
            Ok(bad) => out.violation(format!("{label}: {}", bad.join("; "))),
            Err(e) => out.violation(format!("{label}: {e:?}")),
        }
    }
    out
}

// ---- check 9: classifier-constraint ----

fn poly3(w1: u64, w2: u64, terms: Vec<(Rational, [u64; 3])>) -> Result<WeightedHomPoly, AppError> {
    Ok(WeightedHomPoly::new(
        vec![BigInt::from(w1), BigInt::from(w2), BigInt::one()],
        terms
            .into_iter()
            .map(|(c, e)| (e.iter().map(|&x| BigInt::from(x)).collect(), c))
            .collect(),
    )?)
}

/// A random admissible coordinate change: rescaling, a shift of the second
/// parameter by the degree-w2 monomial, or a general degree-w1 change of the
/// first parameter. The second parameter never absorbs the first.
fn scramble(
    rng: &mut ChaCha8Rng,
    w1: u64,
    w2: u64,
    f: &WeightedHomPoly,
) -> Result<WeightedHomPoly, AppError> {
    let mut g = f.clone();
    let nonzero = |rng: &mut ChaCha8Rng| -> Rational {
        loop {
            let c = rat(rng.gen_range(-3..=3i64), rng.gen_range(1..=3i64));
            if !c.is_zero() {
                return c;
            }
        }
    };
    for _ in 0..rng.gen_range(1..=3usize) {
        match rng.gen_range(0..3u8) {
            0 => g = g.scale(&nonzero(rng)),
            1 => {
                let beta = rat(rng.gen_range(-2..=2i64), 1);
                let h = poly3(
                    w1,
                    w2,
                    vec![(Rational::one(), [0, 1, 0]), (beta, [0, 0, w2])],
                )?;
                g = g.substitute(1, &h)?;
            }
            _ => {
                let mut terms = vec![(nonzero(rng), [1, 0, 0])];
                for a in 0..=(w1 / w2) {
                    if rng.gen_bool(0.5) {
                        let lam = rat(rng.gen_range(-2..=2i64), 1);
                        if !lam.is_zero() {
                            terms.push((lam, [0, a, w1 - a * w2]));
                        }
                    }
                }
                let h = poly3(w1, w2, terms)?;
                g = g.substitute(0, &h)?;
            }
        }
    }
    Ok(g)
}

fn check_classifier(seed: u64, count: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("classifier-constraint");
    let mut rng = rng_for(seed, 9);
    let cases = count.max(100);
    for i in 0..cases {
        // Strictly ordered coprime weights keep the input off the
        // equal-weight quadratic shapes the classifier treats separately.
        let (w1, w2) = loop {
            let w2 = rng.gen_range(1..=4u64);
            let w1 = rng.gen_range(w2 + 1..=7u64);
            if w1.gcd(&w2) == 1 {
                break (w1, w2);
            }
        };
        let saturated = rng.gen_bool(0.5);
        let instance = (|| -> Result<Vec<String>, AppError> {
            let mut bad = Vec::new();
            if saturated {
                let d = w1 + w2;
                let start = poly3(
                    w1,
                    w2,
                    vec![(Rational::one(), [1, 1, 0]), (Rational::one(), [0, 0, d])],
                )?;
                let input = scramble(&mut rng, w1, w2, &start)?;
                let case = classify_curve(w1, w2, &input)?;
                if case.tag != CrepantTag::SaturatedCurve {
                    bad.push(format!("tag {:?}", case.tag));
                } else if case.normal_form.as_ref() != Some(&start) {
                    bad.push("normal form drifted".into());
                }
            } else {
                // The unique p in 1..=w2 with w2 dividing w1 + p.
                let p = w2 - w1 % w2;
                let q = (w1 + p) / w2;
                let start = poly3(
                    w1,
                    w2,
                    vec![(Rational::one(), [1, 0, p]), (Rational::one(), [0, q, 0])],
                )?;
                let input = scramble(&mut rng, w1, w2, &start)?;
                let case = classify_curve(w1, w2, &input)?;
                match case.tag {
                    CrepantTag::HypersurfaceCurve { p: cp, q: cq } => {
                        if (cp, cq) != (p, q) {
                            bad.push(format!("curve data ({cp},{cq}) vs ({p},{q})"));
                        }
                        if w1 + cp != cq * w2 || cq * w2 > w1 + w2 {
                            bad.push(format!("degree constraint fails at ({cp},{cq})"));
                        }
                        if case.normal_form.as_ref() != Some(&start) {
                            bad.push("normal form drifted".into());
                        }
                    }
                    other => bad.push(format!("tag {other:?}")),
                }
            }
            Ok(bad)
        })();
        match instance {
            Ok(bad) if bad.is_empty() => out.check(true, String::new),
            Ok(bad) => out.violation(format!("case {i} (w = ({w1},{w2})): {}", bad.join("; "))),
            Err(e) => out.violation(format!("case {i} (w = ({w1},{w2})): {e:?}")),
        }
    }

    // The saturated pair on the weighted plane is log canonical for every
    // coprime weight pair up to 8.
    for w1 in 1..=8u64 {
        for w2 in 1..=w1 {
            if w1.gcd(&w2) != 1 {
                continue;
            }
            match verify_saturated_lc(w1, w2) {
                Ok(holds) => out.check(holds, || format!("({w1},{w2}) not certified lc")),
                Err(e) => out.violation(format!("({w1},{w2}): {e}")),
            }
        }
    }
    out
}

// ---- check 10: tower-continued-fraction ----

fn continued_fraction_sum(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    let mut sum = 0;
    while y > 0 {
        sum += x / y;
        let r = x % y;
        x = y;
        y = r;
    }
    sum
}

fn check_tower_continued_fraction() -> CheckOutcome {
    let mut out = CheckOutcome::new("tower-continued-fraction");
    let germ = ToricGerm::smooth(2);
    for w1 in 1..=12u64 {
        for w2 in 1..=w1 {
            if w1.gcd(&w2) != 1 {
                continue;
            }
            let expected = continued_fraction_sum(w1, w2);
            let result = (|| -> Result<u64, AppError> {
                let w = ToricValuation::new(
                    &germ,
                    &LatticeVector::from_integers(&[w1 as i64, w2 as i64]),
                )?;
                Ok(regular_tower(&germ, &w)?.len() as u64)
            })();
            match result {
                Ok(len) => out.check(len == expected, || {
                    format!("({w1},{w2}): length {len} vs quotient sum {expected}")
                }),
                Err(e) => out.violation(format!("({w1},{w2}): {e:?}")),
            }
        }
    }

    let frozen = (|| -> Result<(Vec<Vec<BigInt>>, String), AppError> {
        let w = ToricValuation::new(&germ, &LatticeVector::from_integers(&[3, 2]))?;
        let tower = regular_tower(&germ, &w)?;
        let vectors = tower.vectors();
        let report = serde_json::to_string(&json!({ "tower": io::tower_value(&vectors) }))?;
        Ok((vectors, report))
    })();
    match frozen {
        Ok((vectors, report)) => {
            let expected: Vec<Vec<BigInt>> = [[1, 1], [2, 1], [3, 2]]
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            out.check(vectors == expected, || format!("tower of (3,2): {vectors:?}"));
            out.check(
                report == r#"{"tower":[[1,1],[2,1],[3,2]]}"#,
                || format!("report bytes: {report}"),
            );
        }
        Err(e) => out.violation(format!("tower of (3,2): {e:?}")),
    }
    out
}

// ---- check 11: determinism ----

/// A fingerprint of serialized reports over a corpus slice; two passes with
/// the same seed must agree byte for byte.
fn report_fingerprint(seed: u64, count: u64) -> Result<String, AppError> {
    let mut rng = rng_for(seed, 11);
    let mut buffer = String::new();
    for _ in 0..count.clamp(1, 40) {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = random_germ(&mut rng, dim);
        let ideal = random_rideal(&mut rng, dim, false);
        let report = mld_with_options(
            &germ,
            &ideal,
            &CentreFace::origin(dim),
            &wide_options(),
        )?;
        buffer.push_str(&serde_json::to_string(&io::mld_report_value(&report))?);
        buffer.push('\n');
        let threshold = lc_threshold(&germ, &MonomialRIdeal::trivial(dim), &ideal)?;
        buffer.push_str(&serde_json::to_string(&io::threshold_value(&threshold))?);
        buffer.push('\n');
        buffer.push_str(&serde_json::to_string(&serde_json::to_value(&ideal)?)?);
        buffer.push('\n');
    }
    Ok(buffer)
}

fn check_determinism(seed: u64, count: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("determinism");
    match (report_fingerprint(seed, count), report_fingerprint(seed, count)) {
        (Ok(a), Ok(b)) => out.check(a == b, || "replayed reports differ".into()),
        (Err(e), _) | (_, Err(e)) => out.violation(format!("fingerprint failed: {e:?}")),
    }
    out
}

// ---- check 12: schema-structure ----

fn check_schema_structure() -> CheckOutcome {
    let mut out = CheckOutcome::new("schema-structure");

    let built = (|| -> Result<Vec<(&'static str, Value)>, AppError> {
        let g3 = ToricGerm::smooth(3);
        let origin = CentreFace::origin(3);
        let maximal = MonomialRIdeal::from_ideal(MonomialIdeal::maximal(3), Rational::one())?;
        let mut reports = Vec::new();

        let mld_report = mld(&g3, &maximal, &origin)?;
        let mld_value = io::mld_report_value(&mld_report);
        reports.push(("mld", mld_value.clone()));

        // The worked example: the maximal ideal on the smooth threefold.
        out.check(
            serde_json::to_string(&mld_value)?
                == r#"{"value":"2","witness":[1,1,1],"certified":true}"#,
            || format!("mld report bytes: {mld_value}"),
        );

        let threshold = lc_threshold(&g3, &MonomialRIdeal::trivial(3), &maximal)?;
        reports.push(("threshold", io::threshold_value(&threshold)));

        let w = ToricValuation::new(&g3, &LatticeVector::from_integers(&[2, 1, 1]))?;
        let bl = weighted_blowup(&g3, &w)?;
        reports.push(("blowup", io::blowup_value(&bl)));

        let g2 = ToricGerm::smooth(2);
        let w2 = ToricValuation::new(&g2, &LatticeVector::from_integers(&[3, 2]))?;
        let tower = regular_tower(&g2, &w2)?;
        reports.push(("tower", json!({ "tower": io::tower_value(&tower.vectors()) })));

        let surface_ideal = MonomialRIdeal::from_ideal(
            MonomialIdeal::from_u64(2, &[&[2, 0], &[0, 3]])?,
            Rational::one(),
        )?;
        let (weights, report) = mldkit::surface::computing_wblowup_search(&surface_ideal)?;
        let sequence = mldkit::surface::blowup_sequence(&surface_ideal)?;
        reports.push((
            "surface-mld",
            json!({
                "weights": [io::bigint_value(&weights.0), io::bigint_value(&weights.1)],
                "value": report.value.to_string(),
                "witness": report.witness.as_ref().map(|w| io::coords_value(w.weight().coords())),
                "certified": report.certified,
                "sequence": io::sequence_value(&sequence),
            }),
        ));

        let cusp = MonomialIdeal::from_u64(3, &[&[2, 0, 0], &[0, 3, 0], &[0, 0, 6]])?;
        let (trace, ledger) = canonize(&cusp, &rat(9, 10), &rat(1, 15))?;
        let lemmas = verify_algorithm_lemmas(&trace);
        reports.push(("canonize", io::canonize_report_value(&trace, &ledger, &lemmas)));

        let f = WeightedHomPoly::from_u64(&[2, 1, 1], &[(&[1, 0, 1], 1), (&[0, 3, 0], 1)])?;
        let case = classify_curve(2, 1, &f)?;
        reports.push(("classify", io::classify_value(&case)));

        reports.push((
            "error",
            json!({ "error": { "domain": "valuations", "message": "sample" } }),
        ));
        Ok(reports)
    })();

    match built {
        Ok(reports) => {
            for (kind, report) in reports {
                let bad = io::validate_report(kind, &report);
                out.check(bad.is_empty(), || format!("{kind}: {}", bad.join("; ")));
                // Round trip through bytes.
                let text = serde_json::to_string(&report).expect("serializable");
                let back: Result<Value, _> = serde_json::from_str(&text);
                out.check(matches!(&back, Ok(b) if *b == report), || {
                    format!("{kind}: reparse drifts")
                });
            }
        }
        Err(e) => out.violation(format!("report construction failed: {e:?}")),
    }

    // Input schema round trip on the published R-ideal shape; generators are
    // stored sorted, so the canonical text lists them in sorted order.
    let text = r#"{"dim":3,"factors":[{"gens":[[0,0,1],[0,1,0],[1,0,0]],"exp":"1"}]}"#;
    match serde_json::from_str::<MonomialRIdeal>(text) {
        Ok(ideal) => match serde_json::to_string(&ideal) {
            Ok(bytes) => out.check(bytes == text, || format!("ideal round trip: {bytes}")),
            Err(e) => out.violation(format!("ideal serialize: {e}")),
        },
        Err(e) => out.violation(format!("ideal parse: {e}")),
    }
    out
}

// ---- driver ----

pub fn run_check(name: &str, seed: u64, count: u64) -> Result<CheckOutcome, AppError> {
    match name {
        "anchors" => Ok(check_anchors()),
        "mld-box-oracle" => Ok(check_box_oracle(seed, count)),
        "lct-consistency" => Ok(check_lct_consistency(seed, count)),
        "tower-gates" => Ok(check_tower_gates(seed, count)),
        "mld-convexity" => Ok(check_convexity(seed, count)),
        "canonize-lemmas" => Ok(check_canonize(seed)),
        "half-dichotomy" => Ok(check_half_dichotomy()),
        "fractional-multiplier" => Ok(check_fractional_multiplier()),
        "classifier-constraint" => Ok(check_classifier(seed, count)),
        "tower-continued-fraction" => Ok(check_tower_continued_fraction()),
        "determinism" => Ok(check_determinism(seed, count)),
        "schema-structure" => Ok(check_schema_structure()),
        other => Err(AppError::usage(format!(
            "unknown check '{other}'; expected one of {}",
            CHECK_NAMES.join(", ")
        ))),
    }
}

pub fn run_suite(seed: u64, count: u64, only: Option<&str>) -> Result<Value, AppError> {
    if let Some(name) = only {
        if !CHECK_NAMES.contains(&name) {
            return Err(AppError::usage(format!(
                "unknown check '{name}'; expected one of {}",
                CHECK_NAMES.join(", ")
            )));
        }
    }
    let mut checks = Vec::new();
    let mut total_violations = 0u64;
    for name in CHECK_NAMES {
        if only.is_some_and(|o| o != name) {
            continue;
        }
        let outcome = run_check(name, seed, count)?;
        total_violations += outcome.violations;
        checks.push(json!({
            "name": outcome.name,
            "instances": outcome.instances,
            "violations": outcome.violations,
            "pass": outcome.pass(),
            "notes": outcome.notes,
        }));
    }
    Ok(json!({
        "seed": seed,
        "count": count,
        "checks": checks,
        "violations": total_violations,
        "pass": total_violations == 0,
    }))
}
