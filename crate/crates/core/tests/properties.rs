//! Integration properties of the public API: engine values against direct
//! box enumeration, threshold consistency across three formulations, the
//! descent equation, convexity, towers, and the canonize driver.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mldkit::algebra::{rat, rat_int, LatticeVector, Rational};
use mldkit::blowup::regular_tower;
use mldkit::canonize::{canonize, verify_algorithm_lemmas, Termination};
use mldkit::ideals::{newton_polyhedron_membership, MonomialIdeal, MonomialRIdeal};
use mldkit::valuations::{
    a_lc_threshold, a_log_discrepancy, is_lc, lc_threshold_witness, mld, mld_with_options,
    CentreFace, MldOptions, MldValue, Threshold, ToricGerm, ToricValuation,
};

fn wide() -> MldOptions {
    MldOptions {
        initial_box: 8,
        box_limit: 1024,
    }
}

/// A small random monomial ideal with nonzero generators.
fn random_ideal(rng: &mut ChaCha8Rng, dim: usize, max_entry: u64) -> MonomialIdeal {
    loop {
        let gens: Vec<Vec<u64>> = (0..rng.gen_range(1..=4))
            .map(|_| (0..dim).map(|_| rng.gen_range(0..=max_entry)).collect())
            .collect();
        if gens.iter().all(|g| g.iter().any(|&e| e > 0)) {
            let slices: Vec<&[u64]> = gens.iter().map(|g| g.as_slice()).collect();
            return MonomialIdeal::from_u64(dim, &slices).unwrap();
        }
    }
}

/// A product of one or two such ideals with small fractional exponents.
fn random_rideal(rng: &mut ChaCha8Rng, dim: usize) -> MonomialRIdeal {
    let mut pair = MonomialRIdeal::trivial(dim);
    for _ in 0..rng.gen_range(1..=2) {
        let exp = rat(rng.gen_range(1..=3), rng.gen_range(1..=4));
        let factor = MonomialRIdeal::from_ideal(random_ideal(rng, dim, 4), exp).unwrap();
        pair = pair.product(&factor);
    }
    pair
}

/// A product of factors that each contain a pure power of every coordinate,
/// so the whole pair is m-primary.
fn random_m_primary_rideal(rng: &mut ChaCha8Rng, dim: usize) -> MonomialRIdeal {
    let mut pair = MonomialRIdeal::trivial(dim);
    for _ in 0..rng.gen_range(1..=2) {
        let mut gens: Vec<Vec<u64>> = (0..dim)
            .map(|i| {
                let mut g = vec![0u64; dim];
                g[i] = rng.gen_range(2..=5);
                g
            })
            .collect();
        for _ in 0..rng.gen_range(0..=2) {
            gens.push((0..dim).map(|_| rng.gen_range(0..=4)).collect());
        }
        let slices: Vec<&[u64]> = gens.iter().map(|g| g.as_slice()).collect();
        let exp = rat(rng.gen_range(1..=3), rng.gen_range(1..=4));
        let factor =
            MonomialRIdeal::from_ideal(MonomialIdeal::from_u64(dim, &slices).unwrap(), exp)
                .unwrap();
        pair = pair.product(&factor);
    }
    pair
}

/// Direct evaluation of the log discrepancy of the weight `w` against the
/// pair, from public arithmetic only.
fn direct_value(pair: &MonomialRIdeal, w: &LatticeVector) -> Rational {
    w.coordinate_sum() - pair.ord_along(w)
}

/// Every lattice point of `[1, bound]^dim`, visited through an odometer.
fn for_each_box_point(dim: usize, bound: u64, mut f: impl FnMut(&LatticeVector)) {
    let mut coords = vec![1i64; dim];
    loop {
        f(&LatticeVector::from_integers(&coords));
        let mut i = 0;
        loop {
            if i == dim {
                return;
            }
            coords[i] += 1;
            if coords[i] as u64 <= bound {
                break;
            }
            coords[i] = 1;
            i += 1;
        }
    }
}

/// The engine's origin mld on smooth germs equals the minimum over the box
/// it certifies, recomputed here by direct enumeration; minus-infinity
/// verdicts carry an explicitly negative witness.
#[test]
fn box_oracle_agrees_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let mut finite = 0;
    let mut negative = 0;
    for _ in 0..48 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = ToricGerm::smooth(dim);
        let pair = random_rideal(&mut rng, dim);
        let report = mld_with_options(&germ, &pair, &CentreFace::origin(dim), &wide()).unwrap();
        match &report.value {
            MldValue::Finite(v) => {
                assert!(report.certified, "small instances certify: {pair:?}");
                let bound = 2 * report.search_box_bound;
                if bound.pow(dim as u32) > 400_000 {
                    continue;
                }
                let mut min: Option<Rational> = None;
                for_each_box_point(dim, bound, |w| {
                    let val = direct_value(&pair, w);
                    if min.as_ref().is_none_or(|m| val < *m) {
                        min = Some(val);
                    }
                });
                assert_eq!(min.as_ref(), Some(v), "engine disagrees with box scan");
                finite += 1;
            }
            MldValue::MinusInfinity => {
                let w = report.witness.as_ref().expect("negative verdicts carry a witness");
                assert!(
                    direct_value(&pair, w.weight()).is_negative(),
                    "witness fails to certify minus infinity"
                );
                negative += 1;
            }
        }
    }
    assert!(finite >= 10 && negative >= 5, "corpus too lopsided: {finite}/{negative}");
}

/// The threshold by linear programming, by polyhedron dilation membership,
/// and by the witness ray all tell the same story.
#[test]
fn threshold_witness_attains_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEE);
    let bump = rat(1, 1000);
    let mut checked = 0;
    for _ in 0..32 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = ToricGerm::smooth(dim);
        let pair = random_rideal(&mut rng, dim);
        let trivial = MonomialRIdeal::trivial(dim);
        let (Threshold::Finite(t), Some(witness)) =
            lc_threshold_witness(&germ, &trivial, &pair).unwrap()
        else {
            continue;
        };
        let at = pair.pow(&t).unwrap();
        let above = pair.pow(&(&t + &bump)).unwrap();
        let ones = vec![Rational::one(); dim];
        assert!(newton_polyhedron_membership(&at, &ones, &Rational::one()).unwrap());
        assert!(!newton_polyhedron_membership(&above, &ones, &Rational::one()).unwrap());
        assert!(is_lc(&germ, &at).unwrap().holds);
        assert!(!is_lc(&germ, &above).unwrap().holds);
        let a_w = a_log_discrepancy(&germ, &witness, &at, &[]).unwrap();
        assert!(a_w.is_zero(), "threshold ray has discrepancy {a_w}");
        checked += 1;
    }
    assert!(checked >= 24, "only {checked} thresholds were finite");
}

/// The exponent the descent returns solves its defining equation exactly.
#[test]
fn descent_solves_target_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_5E47);
    let one = Rational::one();
    for _ in 0..32 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = ToricGerm::smooth(dim);
        let origin = CentreFace::origin(dim);
        let trivial = MonomialRIdeal::trivial(dim);
        let b = random_m_primary_rideal(&mut rng, dim);
        let base_mld = mld(&germ, &trivial, &origin).unwrap();
        assert_eq!(base_mld.finite_value(), Some(&rat_int(dim as i64)));
        let t = a_lc_threshold(&germ, &trivial, &b, &one).unwrap();
        assert!(t.is_positive());
        let solved = mld_with_options(&germ, &b.pow(&t).unwrap(), &origin, &wide()).unwrap();
        assert_eq!(solved.finite_value(), Some(&one), "descent missed its target");
    }
}

/// Fixed instance whose descent starts above the lc threshold: the first
/// probes report minus infinity, and the answer is still exact.
#[test]
fn descent_crosses_the_lc_threshold() {
    let germ = ToricGerm::smooth(3);
    let trivial = MonomialRIdeal::trivial(3);
    let ideal = MonomialIdeal::from_u64(3, &[&[1, 0, 0], &[0, 4, 0], &[0, 0, 3]]).unwrap();
    let b = MonomialRIdeal::from_ideal(ideal, Rational::one()).unwrap();
    let t = a_lc_threshold(&germ, &trivial, &b, &Rational::one()).unwrap();
    assert_eq!(t, rat(4, 3));
    let report = mld(&germ, &b.pow(&t).unwrap(), &CentreFace::origin(3)).unwrap();
    assert_eq!(report.finite_value(), Some(&Rational::one()));
    assert_eq!(
        report.witness.unwrap().weight(),
        &LatticeVector::from_integers(&[3, 1, 1])
    );
}

/// mld of an exponent mixture dominates the mixture of the mlds.
#[test]
fn mld_is_convex_along_mixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let half = rat(1, 2);
    let mut checked = 0;
    for _ in 0..32 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let germ = ToricGerm::smooth(dim);
        let origin = CentreFace::origin(dim);
        let a1 = rescale_to_klt(&germ, random_rideal(&mut rng, dim));
        let a2 = rescale_to_klt(&germ, random_rideal(&mut rng, dim));
        let r1 = mld_with_options(&germ, &a1, &origin, &wide()).unwrap();
        let r2 = mld_with_options(&germ, &a2, &origin, &wide()).unwrap();
        let (Some(v1), Some(v2)) = (r1.finite_value(), r2.finite_value()) else {
            continue;
        };
        let mixture = a1.pow(&half).unwrap().product(&a2.pow(&half).unwrap());
        let rm = mld_with_options(&germ, &mixture, &origin, &wide()).unwrap();
        let vm = rm
            .finite_value()
            .expect("a mixture of lc pairs stays lc");
        assert!(
            vm >= &(&half * v1 + &half * v2),
            "convexity fails: {vm} < ({v1} + {v2})/2"
        );
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} mixtures had finite endpoints");
}

/// Scales the pair halfway below its own threshold, so its mld is finite.
fn rescale_to_klt(germ: &ToricGerm, pair: MonomialRIdeal) -> MonomialRIdeal {
    let trivial = MonomialRIdeal::trivial(pair.dim());
    match mldkit::valuations::lc_threshold(germ, &trivial, &pair).unwrap() {
        Threshold::Finite(t) => pair.pow(&(&t / rat_int(2))).unwrap(),
        Threshold::Infinite => pair,
    }
}

fn continued_fraction_digit_sum(mut a: u64, mut b: u64) -> u64 {
    let mut sum = 0;
    while b > 0 {
        sum += a / b;
        let r = a % b;
        a = b;
        b = r;
    }
    sum
}

/// Tower length equals the continued-fraction digit sum of the weight ratio,
/// and the worked (3,2) tower is reproduced vector by vector.
#[test]
fn tower_length_is_continued_fraction_digit_sum() {
    let germ = ToricGerm::smooth(2);
    for w1 in 1..=12u64 {
        for w2 in 1..=w1 {
            if num_integer::gcd(w1, w2) != 1 {
                continue;
            }
            let w = ToricValuation::new(
                &germ,
                &LatticeVector::from_integers(&[w1 as i64, w2 as i64]),
            )
            .unwrap();
            let tower = regular_tower(&germ, &w).unwrap();
            assert_eq!(
                tower.vectors().len() as u64,
                continued_fraction_digit_sum(w1, w2),
                "tower length breaks at ({w1},{w2})"
            );
        }
    }
    let w = ToricValuation::new(&germ, &LatticeVector::from_integers(&[3, 2])).unwrap();
    let expected: Vec<Vec<BigInt>> = [[1, 1], [2, 1], [3, 2]]
        .iter()
        .map(|v| v.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    assert_eq!(regular_tower(&germ, &w).unwrap().vectors(), expected);
}

/// The driver on the descent-stressing instance: exponent at the lc
/// threshold, one extraction, canonical output with the mld preserved.
#[test]
fn canonize_settles_the_threshold_instance() {
    let ideal = MonomialIdeal::from_u64(3, &[&[1, 0, 0], &[0, 4, 0], &[0, 0, 3]]).unwrap();
    let q = rat(19, 12);
    let epsilon = &q / rat_int(20);
    let (trace, ledger) = canonize(&ideal, &q, &epsilon).unwrap();
    assert_eq!(trace.termination, Termination::Process5);
    assert_eq!(trace.steps.len(), 1);
    assert_eq!(trace.initial_mld, Rational::zero());
    assert_eq!(trace.preserved_mld, trace.initial_mld);
    assert!(ledger.sound);
    assert!(verify_algorithm_lemmas(&trace).pass());

    // The canonical claim holds for the transformed ideal alone.
    let bare = trace.output_ideal.pow(&q).unwrap();
    let origin = CentreFace::origin(3);
    let report = mld_with_options(&trace.output_germ, &bare, &origin, &wide()).unwrap();
    assert!(report.finite_value().is_some_and(|v| *v >= Rational::one()));
}

/// Already-canonical inputs terminate with an empty trace.
#[test]
fn canonize_accepts_canonical_input_immediately() {
    let ideal = MonomialIdeal::from_u64(3, &[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]).unwrap();
    let q = rat(1, 2);
    let (trace, ledger) = canonize(&ideal, &q, &rat(1, 40)).unwrap();
    assert_eq!(trace.termination, Termination::Process5);
    assert!(trace.steps.is_empty());
    assert_eq!(trace.initial_mld, rat_int(2));
    assert!(ledger.sound);
}
