use super::*;
use crate::eds::{d_n_exact, division_value, ApparitionTable};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// `x_n = x_1 - W_{n-1} W_{n+1} / W_n^2` in floating point, from exact
/// division values.
fn x_from_division_values(f: &CurveFixture, n: u64) -> f64 {
    let w = |k: u64| division_value(f, k).unwrap();
    let num: BigInt = w(n - 1) * w(n + 1);
    let den: BigInt = w(n) * w(n);
    let shift = num.bits().max(den.bits()).saturating_sub(60);
    let to_f = |v: &BigInt| {
        let s = (v.abs() >> shift).to_u64().unwrap() as f64;
        if v.is_negative() {
            -s
        } else {
            s
        }
    };
    3.0 - to_f(&num) / to_f(&den)
}

fn trial_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

const MODEL: ModelCongruence = ModelCongruence { p: 7, q: 11, m: 6468 };

#[test]
fn discrete_terms_match_direct_checks() {
    let f = CurveFixture::standard();
    let mut st = SequenceState::new(&f, SeqConditions::discrete()).unwrap();
    st.build(4).unwrap();
    assert_eq!(st.ells(), [17, 19, 31, 337]);
    let table = ApparitionTable::build(&f, 10_000).unwrap();
    let cfg = EdsConfig::default();
    let mut prev = 13;
    for cert in &st.chosen {
        let (i, ell) = (cert.index, cert.ell);
        assert_eq!(cert.conditions.len(), 8);
        assert!(trial_prime(ell) && ell > prev);
        assert_eq!((ell - 1) % factorial(i as u64).unwrap(), 0);
        assert!(x_from_division_values(&f, ell - 1).abs() > i as f64);
        if ell <= 60 {
            assert!(!d_n_exact(&f, ell, &cfg).unwrap().is_one());
        }
        // mu over the checkpoints up to 10^4 from apparition indices.
        let support: Vec<u64> = table.indices.iter().filter(|(_, &m)| ell % m == 0).map(|(&p, _)| p).collect();
        for x in [10u64, 100, 1000, 10_000] {
            let c = support.iter().filter(|&&p| p <= x).count() as f64;
            assert!(c / prime_sieve(x).len() as f64 <= 0.5f64.powi(i as i32));
        }
        // Every smaller admissible candidate is rejected by some condition.
        let modulus = factorial(i as u64).unwrap();
        for cand in (prev + 1..ell).filter(|&c| trial_prime(c) && c % modulus == 1 % modulus) {
            let big_x = x_from_division_values(&f, cand - 1).abs() > i as f64;
            let prior = &st.ells()[..i - 1];
            let rejected = Condition::for_variant(&Variant::Discrete)
                .iter()
                .any(|&c| st.evaluate(c, i, cand, prior).unwrap().is_failed());
            assert!(rejected, "candidate {cand} for index {i}");
            if !big_x {
                assert!(st.evaluate(Condition::ArchimedeanLarge, i, cand, prior).unwrap().is_failed());
            }
        }
        prev = ell;
    }
    assert!(st.replay().unwrap().is_empty());
    let last = &st.chosen[3];
    assert!(matches!(last.status(Condition::PairPrimitiveLarge), Some(ConditionStatus::Skipped(_))));
}

#[test]
fn model_terms_match_exhaustive_scan() {
    let f = CurveFixture::standard();
    let mut st = SequenceState::new(&f, SeqConditions::model(MODEL)).unwrap();
    st.build(4).unwrap();
    let mut expected = Vec::new();
    let mut last = 13u64;
    for i in 1..=4u32 {
        let mut k = last / MODEL.m + 1;
        let ell = loop {
            let ell = 1 + MODEL.m * k;
            let mut t = k;
            let mut e = 0;
            while t % 7 == 0 {
                t /= 7;
                e += 1;
            }
            if ell > last && e == i && (k % 11 == 0) == b_member(i as u64) && trial_prime(ell) {
                break ell;
            }
            k += 1;
        };
        expected.push(ell);
        last = ell;
    }
    assert_eq!(st.ells(), expected);
    assert_eq!(expected, [135_829, 2_535_457, 244_037_641, 264_004_357]);
    for cert in &st.chosen {
        for c in [Condition::MuSmall, Condition::PairPrimitiveLarge, Condition::ExceptionalPrimitiveLarge] {
            assert_eq!(cert.status(c), Some(&ConditionStatus::Skipped("disabled by configuration".into())));
        }
        let t = (cert.ell - 1) / MODEL.m;
        assert_eq!(val_u64(t, 7) as usize, cert.index);
    }
    assert!(st.replay().unwrap().is_empty());
}

#[test]
fn witness_residue_satisfies_model_congruences() {
    // 3 lies in B, 2 does not.
    let a = 1 + 7u64.pow(3) * 11 * MODEL.m;
    for c in [Condition::ModelModulus, Condition::ModelPPower, Condition::ModelQIndex] {
        assert!(matches!(model_condition(c, MODEL, 3, a), ConditionStatus::Passed(_)));
    }
    let b = 1 + 7u64.pow(2) * MODEL.m;
    assert!(matches!(model_condition(Condition::ModelPPower, MODEL, 2, b), ConditionStatus::Passed(_)));
    assert!(model_condition(Condition::ModelPPower, MODEL, 3, b).is_failed());
    assert!(model_condition(Condition::ModelQIndex, MODEL, 3, b).is_failed());
}

#[test]
fn condition_arithmetic() {
    assert_eq!(factorial(4), Some(24));
    assert_eq!(factorial(21), None);
    let f = CurveFixture::standard();
    let st = SequenceState::new(&f, SeqConditions::discrete()).unwrap();
    assert!(st.evaluate(Condition::FactorialCongruence, 4, 73, &[]).unwrap() == ConditionStatus::Passed("73 = 1 mod 24".into()));
    assert!(st.evaluate(Condition::FactorialCongruence, 4, 37, &[]).unwrap().is_failed());
    assert!(st.evaluate(Condition::Increasing, 2, 17, &[19]).unwrap().is_failed());
    let rp = RealPeriod::new(&f.curve, 1e-12);
    for i in 2..10 {
        assert!(rp.abs_x_exceeds((i + 1) as f64).near_zero.0 < rp.abs_x_exceeds(i as f64).near_zero.0);
    }
    assert!(SequenceState::new(&f, SeqConditions::model(ModelCongruence { p: 7, q: 7, m: 49 })).is_err());
}

#[test]
fn mu_examples() {
    let f = CurveFixture::standard();
    assert_eq!(mu_ell(&f, 2, &[10, 100, 1000]).unwrap(), 0.25);
    // No prime below 10 has apparition index 17.
    assert_eq!(mu_ell(&f, 17, &[10]).unwrap(), 0.0);
    let low = mu_ell(&f, 7, &[10]).unwrap();
    assert_eq!(low, 0.25);
    assert!(mu_ell(&f, 7, &[10, 1000]).unwrap() >= low);
}

fn three_terms() -> SequenceState {
    let f = CurveFixture::standard();
    let mut st = SequenceState::new(&f, SeqConditions::discrete()).unwrap();
    st.build(3).unwrap();
    st
}

#[test]
fn t_sets() {
    let st = three_terms();
    let o = TsetOracle::new(&st, 1_000_000);
    assert_eq!(o.t1_member(2).unwrap(), Membership::In);
    assert_eq!(o.t1_member(3).unwrap(), Membership::In);
    assert_eq!(o.t2_member(2).unwrap(), Membership::Out);
    // m_5 = 2: 5 is p_2 and 2 is not a term.
    assert_eq!(o.t1_member(5).unwrap(), Membership::Out);
    assert_eq!(o.t2_member(5).unwrap(), Membership::In);
    // 101 | d_17.
    assert_eq!(o.t1_member(101).unwrap(), Membership::In);
    assert_eq!(o.t1_member(1_000_003).unwrap(), Membership::Unknown);
    assert_eq!(o.t2_member(1_000_003).unwrap(), Membership::Unknown);
    let mut decided = 0;
    for p in prime_sieve(3000) {
        let (a, b) = (o.t1_member(p).unwrap(), o.t2_member(p).unwrap());
        assert!(!(a == Membership::In && b == Membership::In), "p = {p}");
        if a != Membership::Unknown && b != Membership::Unknown {
            decided += 1;
        }
        // T1 membership is apparition-index membership in the sequence.
        if f_good(&st, p) {
            let m = st.fixture().order_mod_p(p).unwrap();
            assert_eq!(a == Membership::In, st.ells().contains(&m), "p = {p}");
        }
    }
    assert!(decided > 100);
}

fn f_good(st: &SequenceState, p: u64) -> bool {
    st.fixture().is_good(p)
}

#[test]
fn t2_largest_prime_matches_factorization() {
    // p_7 is the largest prime of d_7; 7 is not a term of the built sequence.
    let st = three_terms();
    let o = TsetOracle::new(&st, 1_000_000);
    let cfg = EdsConfig::default();
    let d7 = d_n_exact(st.fixture(), 7, &cfg).unwrap();
    let pe = crate::eds::p_ell(st.fixture(), 7, &cfg).unwrap();
    assert!(pe.complete);
    let p7 = pe.prime.to_u64().unwrap();
    if p7 <= 1_000_000 {
        assert_eq!(o.t2_member(p7).unwrap(), Membership::In);
    }
    for p in prime_sieve(1000).into_iter().filter(|&p| (&d7 % p).is_zero() && p != p7) {
        assert_eq!(o.t2_member(p).unwrap(), Membership::Out, "p = {p}");
    }
}

#[test]
fn integer_points() {
    let st = three_terms();
    let o = TsetOracle::new(&st, 1_000_000);
    let r = integer_points_check(&o, 17 * 19).unwrap();
    assert!(r.consistent(), "{:?} {:?}", r.violations, r.overlaps);
    assert!(matches!(r.status(1), Some(PointStatus::Integral(_))));
    assert!(matches!(r.status(17), Some(PointStatus::Integral(_))));
    assert!(matches!(
        r.status(17 * 19),
        Some(PointStatus::NotIntegral(Witness::SequencePair { ell_i: 19, ell_j: 17, .. }))
    ));
    match r.status(2) {
        Some(PointStatus::NotIntegral(Witness::LargestOfPower { ell: 2, a: 1, prime })) => {
            assert_eq!(prime.as_ref().and_then(|p| p.to_u64()), Some(5));
        }
        other => panic!("{other:?}"),
    }
    let integral: Vec<u64> = r
        .points
        .iter()
        .filter(|(_, s)| matches!(s, PointStatus::Integral(_)))
        .map(|(n, _)| *n)
        .collect();
    assert_eq!(integral, [1, 17, 19, 31]);
}

#[test]
fn weyl_examples() {
    let r = weyl_equidistribution(Alpha::Rational(1, 2), 1, 10_000, 10);
    assert!(r.degenerate);
    // Only ell = 2 gives an odd ell - 1.
    assert_eq!(r.histogram[0], r.samples - 1);
    let r = weyl_equidistribution(Alpha::Real(core::f64::consts::SQRT_2 - 1.0), 6, 200_000, 10);
    assert!(!r.insufficient_data);
    assert!(r.max_deviation < 0.05 && r.weyl_sum < 0.05, "{r:?}");
    assert!(weyl_equidistribution(Alpha::Real(0.3), 6, 100, 10).insufficient_data);
}

#[test]
fn omega_examples() {
    assert_eq!(omega(6), 2);
    assert_eq!(omega(1), 0);
    assert_eq!(omega(7), 1);
    let f = CurveFixture::standard();
    assert_eq!(omega_statistics(&f, 1, 5000).unwrap().density, 0.0);
    let prof = omega_profile(&f, &[1000, 5000], &[2]).unwrap();
    // Direct recount at 1000.
    let good: Vec<u64> = prime_sieve(1000).into_iter().filter(|&p| f.is_good(p)).collect();
    let below = good.iter().filter(|&&p| omega(f.curve.count_points(p).unwrap()) < 2).count();
    assert_eq!((prof[0].good_primes, prof[0].below), (good.len(), below));
}
