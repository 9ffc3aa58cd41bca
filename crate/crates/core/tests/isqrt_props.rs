use num_bigint::BigUint;
use proptest::prelude::*;
use sqrt2_collatz::isqrt::{floor_div_sqrt2_u64, floor_sqrt2, floor_sqrt2_u64, isqrt, isqrt_u64};

#[test]
fn isqrt_contract_exhaustive() {
    for x in 0..=1_000_000u64 {
        let r = isqrt_u64(x);
        assert!(r * r <= x && (r + 1) * (r + 1) > x, "x={x}");
    }
    for x in (0..=1_000_000u64).step_by(997) {
        assert_eq!(isqrt(&BigUint::from(x)), BigUint::from(isqrt_u64(x)));
    }
}

#[test]
fn isqrt_near_u64_limit() {
    for x in [u64::MAX, u64::MAX - 1, 1 << 62, 4294967295 * 4294967295] {
        let r = isqrt_u64(x) as u128;
        assert!(r * r <= x as u128 && (r + 1) * (r + 1) > x as u128);
    }
}

proptest! {
    #[test]
    fn isqrt_contract_big(words in proptest::collection::vec(any::<u32>(), 1..40)) {
        let x = BigUint::new(words);
        let r = isqrt(&x);
        prop_assert!(&r * &r <= x);
        let r1 = &r + 1u32;
        prop_assert!(&r1 * &r1 > x);
    }

    #[test]
    fn floor_sqrt2_matches_isqrt(words in proptest::collection::vec(any::<u32>(), 1..60)) {
        let m = BigUint::new(words);
        let two_m2 = &m * &m * 2u32;
        prop_assert_eq!(floor_sqrt2(&m), isqrt(&two_m2));
    }

    #[test]
    fn u64_kernels_match_big(m in 0u64..(1 << 62)) {
        let big = BigUint::from(m);
        prop_assert_eq!(BigUint::from(floor_sqrt2_u64(m)), isqrt(&(&big * &big * 2u32)));
        prop_assert_eq!(BigUint::from(floor_div_sqrt2_u64(m)), isqrt(&(&big * &big / 2u32)));
    }
}
