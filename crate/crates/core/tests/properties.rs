use dioph_core::arith::{padic_valuation, split_prime_power, Valuation};
use dioph_core::curve::CurveFixture;
use dioph_core::eds::{apparition_index, d_n, d_sequence_exact, EdsConfig};
use dioph_core::zstruct::{b_member, b_value, BGen};
use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;

fn fixture() -> &'static CurveFixture {
    use std::sync::OnceLock;
    static F: OnceLock<CurveFixture> = OnceLock::new();
    F.get_or_init(CurveFixture::standard)
}

fn denominators() -> &'static [BigUint] {
    use std::sync::OnceLock;
    static D: OnceLock<Vec<BigUint>> = OnceLock::new();
    D.get_or_init(|| d_sequence_exact(fixture(), 60, &EdsConfig::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_additive(m in -25i64..=25, n in -25i64..=25) {
        let f = fixture();
        let sum = f.curve.add(&f.multiple(m), &f.multiple(n)).unwrap();
        prop_assert_eq!(sum, f.multiple(m + n));
    }

    #[test]
    fn multiples_stay_on_the_curve(n in -40i64..=40) {
        let f = fixture();
        prop_assert!(f.curve.contains(&f.multiple(n)));
    }

    #[test]
    fn denominators_divide_along_divisibility(m in 1u64..=20, k in 1u64..=3) {
        let d = denominators();
        let n = m * k;
        prop_assert!((&d[n as usize - 1] % &d[m as usize - 1]).is_zero());
    }

    #[test]
    fn mod_prime_powers_match_exact(n in 1u64..=60, pi in 0usize..4, k in 3u32..=8) {
        let p = [5u64, 7, 11, 13][pi];
        let f = fixture();
        let x = f.multiple(n as i64);
        let exact = padic_valuation(x.x().unwrap(), p).unwrap();
        if let Ok(v) = f.ord_x(n, p, k) {
            prop_assert_eq!(Valuation::Finite(v), exact);
        }
    }

    #[test]
    fn b_generator_agrees_with_membership(x in 1u64..5_000_000) {
        prop_assert_eq!(BGen::new().contains(x), b_member(x));
    }
}

#[test]
fn prime_divides_exactly_at_multiples_of_its_apparition_index() {
    let f = fixture();
    let d = denominators();
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        let m = apparition_index(f, p).unwrap();
        for n in 1..=60u64 {
            let divides = split_prime_power(&d[n as usize - 1], p).0 > 0;
            assert_eq!(divides, n % m == 0, "p = {p}, n = {n}");
        }
    }
}

#[test]
fn division_values_agree_with_exact_denominators() {
    let f = fixture();
    let cfg = EdsConfig::default();
    for n in 1..=60u64 {
        assert_eq!(d_n(f, n, &cfg).unwrap(), denominators()[n as usize - 1], "n = {n}");
    }
}

#[test]
fn b_values() {
    assert_eq!((1..=5).map(|n| b_value(n).unwrap()).collect::<Vec<_>>(), [3, 8, 17, 32, 57]);
}
