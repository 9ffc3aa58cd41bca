//! Integer square roots and exact floors of multiples of √2.
//!
//! Everything here is exact: no floating value ever decides a result. The
//! `f64` square root is only used to seed iterations whose output is then
//! corrected against exact integer squares.

use std::cell::RefCell;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `⌊√x⌋` by Newton iteration.
///
/// The seed comes from the top bits of `x` and is rounded up so the iteration
/// starts above the root and decreases monotonically. A final correction loop
/// enforces `s² ≤ x < (s+1)²`.
pub fn isqrt(x: &BigUint) -> BigUint {
    if x.is_zero() {
        return BigUint::zero();
    }
    if let Some(small) = x.to_u128() {
        return BigUint::from(isqrt_u128(small));
    }

    let bits = x.bits();
    // keep an even shift so that the top part's root scales by exactly 2^(shift/2)
    let shift = (bits - 64 + 1) & !1;
    let top = (x >> shift).to_u64().expect("top part fits in 64 bits");
    let mut s = (BigUint::from(isqrt_u64(top) + 1)) << (shift / 2);

    loop {
        let next = (&s + x / &s) >> 1u32;
        if next >= s {
            break;
        }
        s = next;
    }

    while &s * &s > *x {
        s -= 1u32;
    }
    while {
        let t = &s + 1u32;
        &t * &t <= *x
    } {
        s += 1u32;
    }
    s
}

pub fn isqrt_u64(x: u64) -> u64 {
    isqrt_u128(x as u128) as u64
}

pub fn isqrt_u128(x: u128) -> u128 {
    if x == 0 {
        return 0;
    }
    let mut s = (x as f64).sqrt() as u128;
    // the float guess can be off by a few units for large x
    while s.checked_mul(s).map_or(true, |sq| sq > x) {
        s -= 1;
    }
    while (s + 1).checked_mul(s + 1).is_some_and(|sq| sq <= x) {
        s += 1;
    }
    s
}

/// `⌊m√2⌋` for `m < 2^63`.
pub fn floor_sqrt2_u64(m: u64) -> u64 {
    let m = m as u128;
    isqrt_u128(2 * m * m) as u64
}

/// `⌊m/√2⌋`, i.e. `isqrt(⌊m²/2⌋)`.
pub fn floor_div_sqrt2_u64(m: u64) -> u64 {
    let m = m as u128;
    isqrt_u128(m * m / 2) as u64
}

const BUCKET_BITS: u64 = 512;

/// Truncations of √2 to `P` fractional bits, `P` a multiple of [`BUCKET_BITS`].
struct Sqrt2Table {
    master: BigUint,
    master_bits: u64,
    buckets: Vec<Option<BigUint>>,
}

impl Sqrt2Table {
    fn new() -> Self {
        Self {
            master: BigUint::zero(),
            master_bits: 0,
            buckets: Vec::new(),
        }
    }

    /// `⌊√2 · 2^P⌋` with `P ≥ min_bits`; returns `(P, value)`.
    fn get(&mut self, min_bits: u64) -> (u64, &BigUint) {
        let idx = min_bits.div_ceil(BUCKET_BITS).max(1) as usize;
        let p = idx as u64 * BUCKET_BITS;
        if self.buckets.len() <= idx {
            self.buckets.resize(idx + 1, None);
        }
        if self.buckets[idx].is_none() {
            if self.master_bits < p {
                let bits = p.max(self.master_bits * 2);
                self.master = isqrt(&(BigUint::from(2u32) << (2 * bits)));
                self.master_bits = bits;
            }
            self.buckets[idx] = Some(&self.master >> (self.master_bits - p));
        }
        (p, self.buckets[idx].as_ref().expect("bucket filled above"))
    }
}

thread_local! {
    static SQRT2: RefCell<Sqrt2Table> = RefCell::new(Sqrt2Table::new());
}

/// `⌊m√2⌋` for arbitrary `m`, equal to `isqrt(2m²)`.
///
/// Multiplies by a cached truncation `S = ⌊√2·2^P⌋` with `P ≥ bits(m) + 64`.
/// Then `m·S/2^P` lies in `(m√2 − 2^-64, m√2]`, so the floor can only be one
/// too small, and only when the fractional part's top word is all ones. That
/// rare case is settled by comparing exact squares.
pub fn floor_sqrt2(m: &BigUint) -> BigUint {
    if let Some(small) = m.to_u64() {
        if small < 1 << 63 {
            return BigUint::from(floor_sqrt2_u64(small));
        }
    }
    let (candidate, ambiguous) = SQRT2.with(|table| {
        let mut table = table.borrow_mut();
        let (p, s) = table.get(m.bits() + 64);
        let product = m * s;
        let top_frac_word = product
            .iter_u64_digits()
            .nth((p / 64 - 1) as usize)
            .unwrap_or(0);
        (product >> p, top_frac_word == u64::MAX)
    });
    if ambiguous {
        let twice_sq = (m * m) << 1u32;
        let next = &candidate + BigUint::one();
        if &next * &next <= twice_sq {
            return next;
        }
    }
    candidate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(isqrt(&BigUint::zero()), BigUint::zero());
        assert_eq!(isqrt(&BigUint::from(10658u32)), BigUint::from(103u32));
        assert_eq!(isqrt_u128(u128::MAX), u64::MAX as u128);
        assert_eq!(isqrt_u64(u64::MAX), u32::MAX as u64);
    }

    #[test]
    fn exhaustive_to_a_million() {
        for x in 0u64..=1_000_000 {
            let s = isqrt_u64(x);
            assert!(s * s <= x && (s + 1) * (s + 1) > x, "isqrt({x}) = {s}");
        }
    }

    #[test]
    fn big_perfect_squares_and_neighbours() {
        let base = BigUint::from(3u32).pow(200);
        let sq = &base * &base;
        assert_eq!(isqrt(&sq), base);
        assert_eq!(isqrt(&(&sq - 1u32)), &base - 1u32);
        assert_eq!(isqrt(&(&sq + 1u32)), base);
    }

    #[test]
    fn floor_sqrt2_matches_newton() {
        let mut m = BigUint::from(73u32);
        for _ in 0..3000 {
            let expected = isqrt(&((&m * &m) << 1u32));
            assert_eq!(floor_sqrt2(&m), expected);
            m = &m * 7u32 + 3u32;
            if m.bits() > 4000 {
                m >>= 3900u32;
            }
        }
    }

    #[test]
    fn halving_bound() {
        for m in 0u64..5000 {
            let f = floor_div_sqrt2_u64(m);
            // f ≤ m/√2 < f + 1
            assert!(2 * f * f <= m * m && 2 * (f + 1) * (f + 1) > m * m);
        }
    }
}
