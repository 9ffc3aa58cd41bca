//! The map `f(n) = ⌊n/√2⌋` (n even), `⌊n√2⌋` (n odd), the generic family
//! `f_α`, orbits and their parity statistics.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::isqrt::{floor_sqrt2, isqrt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("alpha has a zero denominator")]
    NonRepresentable,
    #[error("alpha must be positive")]
    InvalidAlpha,
    #[error("iterate {step} is zero, its logarithm is undefined")]
    ZeroValue { step: u64 },
    #[error("f({r}) = 0, the borderline product vanishes")]
    ZeroTerm { r: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// One exact iterate `f^r(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigOrbitState {
    pub value: BigUint,
    pub step: u64,
}

impl BigOrbitState {
    pub fn new(value: BigUint) -> Self {
        Self { value, step: 0 }
    }

    pub fn advance(&self) -> Self {
        Self {
            value: step(&self.value),
            step: self.step + 1,
        }
    }

    pub fn is_even(&self) -> bool {
        self.value.is_even()
    }
}

/// Exact map on arbitrary-precision integers.
pub fn step(n: &BigUint) -> BigUint {
    if n.is_even() {
        floor_sqrt2(&(n >> 1u32))
    } else {
        floor_sqrt2(n)
    }
}

/// Same map on machine words, valid for `n < 2^63`.
pub fn step_u64(n: u64) -> u64 {
    debug_assert!(n < 1 << 63);
    if n % 2 == 0 {
        crate::isqrt::floor_sqrt2_u64(n / 2)
    } else {
        crate::isqrt::floor_sqrt2_u64(n)
    }
}

/// `f^r(n)`.
pub fn iterate(n: &BigUint, r: u64) -> BigUint {
    let mut value = n.clone();
    for _ in 0..r {
        value = step(&value);
    }
    value
}

/// Which parity gets multiplied by α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// `⌊nα⌋` for even n, `⌊n/α⌋` for odd n.
    #[default]
    EvenTimesAlpha,
    /// `⌊n/α⌋` for even n, `⌊nα⌋` for odd n (the convention of [`step`]).
    OddTimesAlpha,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Alpha {
    /// √2 with the exact integer kernel; always uses the [`step`] convention.
    Sqrt2,
    Rational(BigRational),
    /// Positive square root of a positive rational.
    Sqrt(BigRational),
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Sqrt2 => write!(f, "sqrt(2) [exact]"),
            Alpha::Rational(q) => write!(f, "{q}"),
            Alpha::Sqrt(q) => write!(f, "sqrt({q})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapConfig {
    pub alpha: Alpha,
    /// Starting precision for interval floors; doubled on ambiguity.
    pub precision_bits: u32,
    pub branch: Branch,
}

impl MapConfig {
    pub const DEFAULT_PRECISION: u32 = 64;

    /// Exact mode: √2 evaluated through integer square roots.
    pub fn sqrt2() -> Self {
        Self {
            alpha: Alpha::Sqrt2,
            precision_bits: Self::DEFAULT_PRECISION,
            branch: Branch::OddTimesAlpha,
        }
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, MapError> {
        let q = checked_ratio(num.into(), den.into())?;
        Ok(Self::generic(Alpha::Rational(q)))
    }

    /// `α = √(num/den)`, collapsed to a rational when the root is exact.
    pub fn sqrt_of(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, MapError> {
        let q = checked_ratio(num.into(), den.into())?;
        let (n, d) = (q.numer().to_biguint(), q.denom().to_biguint());
        let (n, d) = (n.expect("positive"), d.expect("positive"));
        let (rn, rd) = (isqrt(&n), isqrt(&d));
        if &rn * &rn == n && &rd * &rd == d {
            return Ok(Self::generic(Alpha::Rational(BigRational::new(
                rn.into(),
                rd.into(),
            ))));
        }
        Ok(Self::generic(Alpha::Sqrt(q)))
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits.max(1);
        self
    }

    pub fn is_exact(&self) -> bool {
        self.alpha == Alpha::Sqrt2
    }

    fn generic(alpha: Alpha) -> Self {
        Self {
            alpha,
            precision_bits: Self::DEFAULT_PRECISION,
            branch: Branch::EvenTimesAlpha,
        }
    }

    /// Rational bounds `lo ≤ α ≤ hi` with width about `2^-bits`.
    fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        match &self.alpha {
            Alpha::Rational(q) => (q.clone(), q.clone()),
            Alpha::Sqrt2 => sqrt_enclosure(&BigRational::from_integer(2.into()), bits),
            Alpha::Sqrt(q) => sqrt_enclosure(q, bits),
        }
    }
}

fn checked_ratio(num: BigInt, den: BigInt) -> Result<BigRational, MapError> {
    if den.is_zero() {
        return Err(MapError::NonRepresentable);
    }
    let q = BigRational::new(num, den);
    if !q.is_positive() {
        return Err(MapError::InvalidAlpha);
    }
    Ok(q)
}

/// √(a/b) = √(ab)/b, enclosed by `⌊√(ab·4^p)⌋ / (2^p b)` and the next unit.
fn sqrt_enclosure(q: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let ab = (q.numer() * q.denom()).to_biguint().expect("positive");
    let s = isqrt(&(ab << (2 * bits as u64)));
    let scale = BigInt::from(q.denom().clone()) << bits as u64;
    let lo = BigRational::new(s.clone().into(), scale.clone());
    let hi = BigRational::new((s + 1u32).into(), scale);
    (lo, hi)
}

/// `f_α(n)` with floors settled by interval arithmetic.
///
/// Irrational α is enclosed at `cfg.precision_bits`; while the floor of the
/// enclosure's endpoints disagree the precision doubles. Rational α is exact
/// from the start.
pub fn step_alpha(n: &BigUint, cfg: &MapConfig) -> BigUint {
    if cfg.is_exact() {
        return step(n);
    }
    if n.is_zero() {
        return BigUint::zero();
    }
    let multiply = match cfg.branch {
        Branch::EvenTimesAlpha => n.is_even(),
        Branch::OddTimesAlpha => n.is_odd(),
    };
    let nq = BigRational::from_integer(BigInt::from(n.clone()));
    let mut bits = cfg.precision_bits.max(1);
    loop {
        let (lo, hi) = cfg.enclosure(bits);
        let (a, b) = if multiply {
            (&nq * &lo, &nq * &hi)
        } else {
            (&nq / &hi, &nq / &lo)
        };
        let (fa, fb) = (a.floor(), b.floor());
        if fa == fb {
            return fa.to_integer().to_biguint().expect("nonnegative floor");
        }
        bits = bits.checked_mul(2).expect("precision overflow");
    }
}

/// Natural log of a positive big integer from its bit length and top word.
pub fn ln_big(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("fits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parity counts over the first `m` iterates `f^0(n) … f^(m-1)(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitStats {
    pub even_count: u64,
    pub odd_count: u64,
    pub m: u64,
    /// `ln f^(m-1)(n)`, or `-inf` when that iterate is zero.
    pub log_value: f64,
}

impl OrbitStats {
    pub fn p0(&self) -> f64 {
        self.even_count as f64 / self.m as f64
    }

    pub fn p1(&self) -> f64 {
        self.odd_count as f64 / self.m as f64
    }

    /// `p0` as an exact decimal string with `digits` places.
    ///
    /// Exact when `m` divides `10^digits`, e.g. `m = 10^ℓ` and `digits = ℓ`.
    pub fn p0_decimal(&self, digits: u32) -> String {
        decimal_ratio(self.even_count, self.m, digits)
    }

    pub fn p1_decimal(&self, digits: u32) -> String {
        decimal_ratio(self.odd_count, self.m, digits)
    }
}

/// `num/den` rounded half-up to `digits` decimal places.
pub fn decimal_ratio(num: u64, den: u64, digits: u32) -> String {
    let scale = BigUint::from(10u32).pow(digits);
    let scaled = (BigUint::from(num) * &scale * 2u32 + den) / (BigUint::from(den) * 2u32);
    let (int, frac) = scaled.div_rem(&scale);
    if digits == 0 {
        return int.to_string();
    }
    format!("{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

/// Iterator over `f^0(n), f^1(n), …`.
#[derive(Debug, Clone)]
pub struct Orbit {
    next: Option<BigOrbitState>,
}

impl Orbit {
    pub fn new(n: BigUint) -> Self {
        Self {
            next: Some(BigOrbitState::new(n)),
        }
    }
}

impl Iterator for Orbit {
    type Item = BigOrbitState;

    fn next(&mut self) -> Option<BigOrbitState> {
        let current = self.next.take()?;
        self.next = Some(current.advance());
        Some(current)
    }
}

/// Streaming statistics, keeping only the current iterate.
pub fn orbit_stats(n: &BigUint, m: u64) -> Result<OrbitStats, MapError> {
    orbit_stats_with(n, m, |_| {})
}

/// Like [`orbit_stats`], calling `observe` with every visited state.
pub fn orbit_stats_with(
    n: &BigUint,
    m: u64,
    mut observe: impl FnMut(&BigOrbitState),
) -> Result<OrbitStats, MapError> {
    if m == 0 {
        return Err(MapError::InvalidArgument("window length must be at least 1"));
    }
    let mut even = 0u64;
    let mut state = BigOrbitState::new(n.clone());
    loop {
        observe(&state);
        if state.is_even() {
            even += 1;
        }
        if state.step + 1 == m {
            break;
        }
        state = state.advance();
    }
    let log_value = if state.value.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_big(&state.value)
    };
    Ok(OrbitStats {
        even_count: even,
        odd_count: m - even,
        m,
        log_value,
    })
}

/// The first `m` iterates together with their statistics.
pub fn orbit(n: &BigUint, m: u64) -> Result<(Vec<BigOrbitState>, OrbitStats), MapError> {
    let mut states = Vec::with_capacity(m.min(1 << 20) as usize);
    let stats = orbit_stats_with(n, m, |s| states.push(s.clone()))?;
    Ok((states, stats))
}

/// `(f^r(n))^(1/r)`, evaluated as `exp(ln f^r(n) / r)`.
pub fn growth_estimate(n: &BigUint, r: u64) -> Result<f64, MapError> {
    if r == 0 {
        return Err(MapError::InvalidArgument("step count must be at least 1"));
    }
    let value = iterate(n, r);
    growth_of(&value, r)
}

pub fn growth_of(value: &BigUint, r: u64) -> Result<f64, MapError> {
    if value.is_zero() {
        return Err(MapError::ZeroValue { step: r });
    }
    Ok((ln_big(value) / r as f64).exp())
}

/// `(f^r(n))^(1/r)` for every `r` in `from..=to`, from a single orbit pass.
pub fn growth_series(n: &BigUint, from: u64, to: u64) -> Result<Vec<(u64, f64)>, MapError> {
    if from == 0 || from > to {
        return Err(MapError::InvalidArgument("need 1 <= from <= to"));
    }
    let mut out = Vec::with_capacity((to - from + 1) as usize);
    let mut value = n.clone();
    for r in 1..=to {
        value = step(&value);
        if r >= from {
            out.push((r, growth_of(&value, r)?));
        }
    }
    Ok(out)
}

/// `p0(m)` for every `m` in `from..=to`, from a single orbit pass.
pub fn p0_series(n: &BigUint, from: u64, to: u64) -> Result<Vec<(u64, f64)>, MapError> {
    if from == 0 || from > to {
        return Err(MapError::InvalidArgument("need 1 <= from <= to"));
    }
    let mut out = Vec::with_capacity((to - from + 1) as usize);
    let mut even = 0u64;
    let mut value = n.clone();
    for m in 1..=to {
        if value.is_even() {
            even += 1;
        }
        if m >= from {
            out.push((m, even as f64 / m as f64));
        }
        value = step(&value);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BorderlineReport {
    pub n_max: u64,
    /// `(∏_{r=1}^{n_max} f(r)/r)^(1/n_max)`.
    pub value: f64,
    /// False when the finite product already exceeds 1.
    pub collatz_like: bool,
}

/// Geometric-mean growth of `f` over `1..=n_max`, in log space.
pub fn borderline_check_with(
    n_max: u64,
    f: impl Fn(u64) -> BigUint,
) -> Result<BorderlineReport, MapError> {
    if n_max < 2 {
        return Err(MapError::InvalidArgument("n_max must be at least 2"));
    }
    let mut log_sum = 0.0f64;
    for r in 1..=n_max {
        let fr = f(r);
        if fr.is_zero() {
            return Err(MapError::ZeroTerm { r });
        }
        log_sum += ln_big(&fr) - (r as f64).ln();
    }
    let value = (log_sum / n_max as f64).exp();
    Ok(BorderlineReport {
        n_max,
        value,
        collatz_like: value <= 1.0 + 1e-12,
    })
}

pub fn borderline_check(cfg: &MapConfig, n_max: u64) -> Result<BorderlineReport, MapError> {
    borderline_check_with(n_max, |r| step_alpha(&BigUint::from(r), cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn listed_orbit_of_73() {
        let expected = [
            73u64, 103, 145, 205, 289, 408, 288, 203, 287, 405, 572, 404, 285, 403, 569, 804, 568,
            401,
        ];
        let values: Vec<_> = Orbit::new(big(73)).take(18).map(|s| s.value).collect();
        assert_eq!(values, expected.map(big));
    }

    #[test]
    fn fixed_points() {
        assert_eq!(step(&big(0)), big(0));
        assert_eq!(step(&big(1)), big(1));
        assert_eq!(step(&big(408)), big(288));
    }

    #[test]
    fn rational_alpha() {
        let two = MapConfig::rational(2, 1).unwrap();
        assert_eq!(step_alpha(&big(4), &two), big(8));
        assert_eq!(step_alpha(&big(5), &two), big(2));
        assert_eq!(MapConfig::rational(1, 0), Err(MapError::NonRepresentable));
        assert_eq!(MapConfig::rational(-1, 2), Err(MapError::InvalidAlpha));
    }

    #[test]
    fn perfect_square_roots_collapse() {
        let cfg = MapConfig::sqrt_of(9, 4).unwrap();
        assert_eq!(
            cfg.alpha,
            Alpha::Rational(BigRational::new(3.into(), 2.into()))
        );
    }

    #[test]
    fn generic_sqrt2_agrees_with_exact_kernel() {
        let odd_branch = MapConfig::sqrt_of(2, 1)
            .unwrap()
            .with_branch(Branch::OddTimesAlpha)
            .with_precision(4);
        // f_α with α = 1/√2 under the even-times-α convention is the same map
        let half = MapConfig::sqrt_of(1, 2).unwrap();
        for n in 0..=2000u64 {
            let exact = step(&big(n));
            assert_eq!(step_alpha(&big(n), &odd_branch), exact, "n={n}");
            assert_eq!(step_alpha(&big(n), &half), exact, "n={n}");
        }
        // even-times-α with α = √2 is the other convention
        let eq2 = MapConfig::sqrt_of(2, 1).unwrap();
        assert_eq!(step_alpha(&big(73), &eq2), big(51));
        assert_eq!(step_alpha(&big(72), &eq2), big(101));
    }

    #[test]
    fn small_window_stats() {
        let stats = orbit_stats(&big(73), 10).unwrap();
        assert_eq!((stats.even_count, stats.odd_count), (2, 8));
        assert_eq!(stats.p0_decimal(1), "0.2");
        assert!(orbit_stats(&big(73), 0).is_err());
    }

    #[test]
    fn growth_of_fixed_point_and_zero() {
        assert_eq!(growth_estimate(&big(1), 50).unwrap(), 1.0);
        assert_eq!(growth_estimate(&big(0), 5), Err(MapError::ZeroValue { step: 5 }));
    }

    #[test]
    fn ln_big_is_accurate() {
        let n = BigUint::from(10u32).pow(300) * 3u32;
        let expected = 3f64.ln() + 300.0 * 10f64.ln();
        assert!((ln_big(&n) - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(decimal_ratio(4700, 10_000, 4), "0.4700");
        assert_eq!(decimal_ratio(1, 3, 3), "0.333");
        assert_eq!(decimal_ratio(2, 3, 3), "0.667");
    }

    #[test]
    fn borderline_small_product() {
        // f(1..10) = 1,1,4,2,7,4,9,5,12,7 so the product over 10! is 7/30
        let report = borderline_check(&MapConfig::sqrt2(), 10).unwrap();
        let expected = (7.0f64 / 30.0).powf(0.1);
        assert!((report.value - expected).abs() < 1e-14);
        assert!(report.collatz_like);
    }

    #[test]
    fn borderline_zero_term() {
        let four = MapConfig::rational(4, 1).unwrap();
        assert_eq!(borderline_check(&four, 100), Err(MapError::ZeroTerm { r: 1 }));
    }

    #[test]
    fn doubling_map_is_not_collatz_like() {
        let report = borderline_check_with(100, |r| big(2 * r)).unwrap();
        assert!((report.value - 2.0).abs() < 1e-12);
        assert!(!report.collatz_like);
    }
}
