//! Second-order parity model of orbits and its exact `Q(√2)` probabilities.
//!
//! A state is the parity pair `(f^(r-1)(n), f^r(n))`. The kernel gives the
//! probability that the next iterate is odd:
//!
//! | previous, current | P(next odd) |
//! |-------------------|-------------|
//! | even, even        | 1/2         |
//! | even, odd         | √2/2        |
//! | odd, even         | 0           |
//! | odd, odd          | √2/2        |

use std::str::FromStr;

use dashu_float::DBig;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::qsqrt2::QSqrt2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParityError {
    #[error("r = {r} is outside the enumerable range 2..=25; use markov_pr")]
    OutOfRange { r: u32 },
    #[error("stationary balance equations are singular")]
    SingularSystem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityState {
    EvenEven,
    EvenOdd,
    OddEven,
    OddOdd,
}

impl ParityState {
    pub const ALL: [ParityState; 4] = [
        ParityState::EvenEven,
        ParityState::EvenOdd,
        ParityState::OddEven,
        ParityState::OddOdd,
    ];

    pub fn from_bits(previous_odd: bool, current_odd: bool) -> Self {
        match (previous_odd, current_odd) {
            (false, false) => ParityState::EvenEven,
            (false, true) => ParityState::EvenOdd,
            (true, false) => ParityState::OddEven,
            (true, true) => ParityState::OddOdd,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn current_odd(self) -> bool {
        matches!(self, ParityState::EvenOdd | ParityState::OddOdd)
    }

    /// State after appending `next_odd`.
    pub fn shift(self, next_odd: bool) -> Self {
        Self::from_bits(self.current_odd(), next_odd)
    }

    pub fn label(self) -> &'static str {
        match self {
            ParityState::EvenEven => "EE",
            ParityState::EvenOdd => "EO",
            ParityState::OddEven => "OE",
            ParityState::OddOdd => "OO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityKernel {
    /// P(next odd | state), indexed by [`ParityState::index`].
    pub odd_given: [QSqrt2; 4],
}

impl Default for ParityKernel {
    fn default() -> Self {
        let half = QSqrt2::from_ratios((1, 2), (0, 1));
        let half_sqrt2 = QSqrt2::from_ratios((0, 1), (1, 2));
        Self {
            odd_given: [half, half_sqrt2.clone(), QSqrt2::zero(), half_sqrt2],
        }
    }
}

impl ParityKernel {
    /// Probability of moving from `from` to `to`; zero unless `to` starts with
    /// the current parity of `from`.
    pub fn transition(&self, from: ParityState, to: ParityState) -> QSqrt2 {
        let p_odd = &self.odd_given[from.index()];
        if from.shift(true) == to {
            p_odd.clone()
        } else if from.shift(false) == to {
            &QSqrt2::one() - p_odd
        } else {
            QSqrt2::zero()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityDistribution {
    pub weights: [QSqrt2; 4],
}

impl ParityDistribution {
    /// Each of the four parity pairs with weight 1/4.
    pub fn uniform() -> Self {
        let quarter = QSqrt2::from_ratios((1, 4), (0, 1));
        Self {
            weights: std::array::from_fn(|_| quarter.clone()),
        }
    }

    pub fn total(&self) -> QSqrt2 {
        self.weights.iter().cloned().sum()
    }

    /// Probability that the current iterate is odd.
    pub fn odd(&self) -> QSqrt2 {
        &self.weights[ParityState::EvenOdd.index()] + &self.weights[ParityState::OddOdd.index()]
    }

    pub fn advance(&self, kernel: &ParityKernel) -> Self {
        let mut next: [QSqrt2; 4] = std::array::from_fn(|_| QSqrt2::zero());
        for from in ParityState::ALL {
            let w = &self.weights[from.index()];
            let p_odd = &kernel.odd_given[from.index()];
            let to_odd = from.shift(true).index();
            let to_even = from.shift(false).index();
            next[to_odd] = &next[to_odd] + &(w * p_odd);
            next[to_even] = &next[to_even] + &(w * &(&QSqrt2::one() - p_odd));
        }
        Self { weights: next }
    }
}

/// Per-window factor of the appendix code, scaled by 2 so that it lies in
/// `Z[√2]`: `(x, y)` stands for `(x + y√2)/2`. `None` is the zero factor that
/// ends a path.
fn window_factor(window: u32) -> Option<(i64, i64)> {
    // window bits: l[j] | l[j+1] << 1 | l[j+2] << 2
    match (window & 1, (window >> 1) & 1, (window >> 2) & 1) {
        (0, 0, 0) | (0, 0, 1) => Some((1, 0)), // 1/2
        (0, 1, 0) | (1, 1, 0) => Some((2, -1)), // 1 - √2/2
        (0, 1, 1) | (1, 1, 1) => Some((0, 1)), // √2/2
        (1, 0, 0) => Some((2, 0)),              // 1
        _ => None,                              // [1,0,1]: odd, even, odd never happens
    }
}

/// Exhaustive enumeration of parity strings, following the appendix code.
///
/// For `r` the strings have length `n = r + 1`, given by the little-endian
/// binary digits of `i ∈ [0, 2^n)`. Only strings whose last digit is 1 (odd)
/// count. Each contributes `1/4` times the product of its window factors.
/// The appendix's `sq2(n)` is `p_(n-1)`. Cost is `2^(r+1)` paths.
pub fn appendix_enumeration(r: u32) -> Result<QSqrt2, ParityError> {
    if !(2..=25).contains(&r) {
        return Err(ParityError::OutOfRange { r });
    }
    let n = r + 1;
    let windows = n - 2;
    // the strings with top digit 1 are exactly i in [2^(n-1), 2^n)
    let (sum_a, sum_b) = ((1u64 << (n - 1))..(1u64 << n))
        .into_par_iter()
        .fold(
            || (0i128, 0i128),
            |(acc_a, acc_b), i| {
                let mut x = 1i64;
                let mut y = 0i64;
                for j in 0..windows {
                    match window_factor(((i >> j) & 0b111) as u32) {
                        Some((p, q)) => {
                            let nx = x * p + 2 * y * q;
                            let ny = x * q + y * p;
                            x = nx;
                            y = ny;
                        }
                        None => return (acc_a, acc_b),
                    }
                }
                (acc_a + x as i128, acc_b + y as i128)
            },
        )
        .reduce(|| (0, 0), |l, r| (l.0 + r.0, l.1 + r.1));

    // undo the 2^windows scaling and apply the initial 1/4
    let den = num_bigint::BigInt::from(1u8) << (windows + 2) as usize;
    let ratio = |v: i128| BigRational::new(v.into(), den.clone());
    Ok(QSqrt2::new(ratio(sum_a), ratio(sum_b)))
}

/// `p_r` by iterating the kernel from the uniform distribution over pairs,
/// exact and linear in `r`. `p_0 = p_1 = 1/2`.
pub fn markov_pr(r: u32) -> QSqrt2 {
    markov_series(r).pop().expect("series has r + 1 entries")
}

/// `[p_0, p_1, …, p_r]`.
pub fn markov_series(r: u32) -> Vec<QSqrt2> {
    let kernel = ParityKernel::default();
    let mut dist = ParityDistribution::uniform();
    let half = QSqrt2::from_ratios((1, 2), (0, 1));
    let mut out = vec![half];
    if r == 0 {
        return out;
    }
    out.push(dist.odd());
    for _ in 1..r {
        dist = dist.advance(&kernel);
        out.push(dist.odd());
    }
    out
}

/// Solves `π = πT`, `Σπ = 1` exactly by Gaussian elimination over `Q(√2)`.
pub fn stationary(kernel: &ParityKernel) -> Result<ParityDistribution, ParityError> {
    // rows: balance equations for states 0..3, the last replaced by normalization
    let mut m: Vec<Vec<QSqrt2>> = (0..4)
        .map(|to| {
            let mut row: Vec<QSqrt2> = ParityState::ALL
                .iter()
                .map(|&from| kernel.transition(from, ParityState::ALL[to]))
                .collect();
            row[to] = &row[to] - &QSqrt2::one();
            row.push(QSqrt2::zero());
            row
        })
        .collect();
    m[3] = vec![
        QSqrt2::one(),
        QSqrt2::one(),
        QSqrt2::one(),
        QSqrt2::one(),
        QSqrt2::one(),
    ];

    for col in 0..4 {
        let pivot = (col..4)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(ParityError::SingularSystem)?;
        m.swap(col, pivot);
        let inv = m[col][col].inverse().ok_or(ParityError::SingularSystem)?;
        for k in col..5 {
            m[col][k] = &m[col][k] * &inv;
        }
        for row in 0..4 {
            if row != col && !m[row][col].is_zero() {
                let factor = m[row][col].clone();
                for k in col..5 {
                    let sub = &factor * &m[col][k];
                    m[row][k] = &m[row][k] - &sub;
                }
            }
        }
    }
    Ok(ParityDistribution {
        weights: std::array::from_fn(|i| m[i][4].clone()),
    })
}

/// Stationary probability of odd for the default kernel.
pub fn stationary_odd() -> Result<QSqrt2, ParityError> {
    Ok(stationary(&ParityKernel::default())?.odd())
}

/// `1 − p_∞`, the limiting even frequency.
pub fn alpha_const() -> Result<QSqrt2, ParityError> {
    Ok(&QSqrt2::one() - &stationary_odd()?)
}

/// `1/2 − α`, so that the growth constant is `δ = 2^(1/2 − α)`.
pub fn delta_exponent() -> Result<QSqrt2, ParityError> {
    let half = QSqrt2::from_ratios((1, 2), (0, 1));
    Ok(&half - &alpha_const()?)
}

#[derive(Debug, Clone)]
pub struct ConstantsReport {
    pub stationary_odd: QSqrt2,
    pub alpha: QSqrt2,
    pub delta_exponent: QSqrt2,
    pub alpha_value: DBig,
    pub delta_value: DBig,
    /// `δ² · 4^α = 2` holds to 40 digits.
    pub identity_check: bool,
    /// `√2^(1 − 2·0.465)`, from the empirical even frequency of one orbit.
    pub empirical_delta: DBig,
}

pub const EMPIRICAL_ALPHA: &str = "0.465";

/// α and δ to `digits` significant digits, plus the identity check.
pub fn constants_report(digits: usize) -> Result<ConstantsReport, ParityError> {
    let p = digits + 20;
    let stationary_odd = stationary_odd()?;
    let alpha = alpha_const()?;
    let exponent = delta_exponent()?;

    let two = DBig::from(2u8).with_precision(p).value();
    let ln2 = two.ln();
    let alpha_value = alpha.to_dbig(p);
    let delta_value = (exponent.to_dbig(p) * ln2.clone()).exp();

    // δ² · 4^α = exp(2 ln δ + 2α ln 2)
    let four_alpha = (alpha_value.clone() * ln2.clone() * DBig::from(2u8)).exp();
    let lhs = delta_value.clone() * delta_value.clone() * four_alpha;
    let tolerance = DBig::from_str("1e-40").expect("literal");
    let diff = lhs - two.clone();
    let identity_check = diff <= tolerance && diff >= -tolerance.clone();

    let empirical = DBig::from_str(EMPIRICAL_ALPHA)
        .expect("literal")
        .with_precision(p)
        .value();
    let empirical_exponent = DBig::from(1u8) - DBig::from(2u8) * empirical;
    let empirical_delta = (empirical_exponent * two.sqrt().ln()).exp();

    Ok(ConstantsReport {
        stationary_odd,
        alpha,
        delta_exponent: exponent,
        alpha_value: alpha_value.with_precision(digits).value(),
        delta_value: delta_value.with_precision(digits).value(),
        identity_check,
        empirical_delta: empirical_delta.with_precision(digits).value(),
    })
}
