//! Exact arithmetic in `Q(√2)`: numbers `a + b√2` with rational `a`, `b`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_float::DBig;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::isqrt::isqrt;

/// `a + b√2`. Since √2 is irrational the pair `(a, b)` is unique, so derived
/// equality is numeric equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn from_ratios(a: (i64, i64), b: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(a.0.into(), a.1.into()),
            BigRational::new(b.0.into(), b.1.into()),
        )
    }

    pub fn from_integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn rational(a: BigRational) -> Self {
        Self::new(a, BigRational::zero())
    }

    pub fn sqrt2() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -&self.b)
    }

    /// `a² − 2b²`, nonzero unless `self` is zero.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(2.into()) * &self.b * &self.b
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conjugate();
        Some(Self::new(c.a / &n, c.b / n))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    pub fn signum(&self) -> i32 {
        // compare a with -b√2 through squares
        let (a, b) = (&self.a, &self.b);
        match (a.sign_num(), b.sign_num()) {
            (0, 0) => 0,
            (sa, 0) => sa,
            (0, sb) => sb,
            (sa, sb) if sa == sb => sa,
            (sa, _) => {
                let a2 = a * a;
                let b2 = BigRational::from_integer(2.into()) * b * b;
                if a2 > b2 {
                    sa
                } else {
                    -sa
                }
            }
        }
    }

    /// `⌊self · 10^digits + 1/2⌋`, computed exactly.
    pub fn scaled_round(&self, digits: u32) -> BigInt {
        let scale = BigInt::from(10u32).pow(digits);
        let l = self.a.denom().lcm(self.b.denom());
        let big_a = self.a.numer() * (&l / self.a.denom()) * &scale;
        let big_b = self.b.numer() * (&l / self.b.denom()) * &scale;
        // (A + B√2)/L + 1/2 = (2A + L + 2B√2) / 2L
        let c = BigInt::from(2) * big_a + &l;
        let root = BigInt::from(isqrt(&(&big_b * &big_b * 8u32).magnitude().clone()));
        let floor_2b_sqrt2 = match big_b.sign() {
            Sign::NoSign => BigInt::zero(),
            Sign::Plus => root,
            Sign::Minus => -(root + BigInt::one()),
        };
        (c + floor_2b_sqrt2).div_floor(&(BigInt::from(2) * l))
    }

    /// Decimal expansion rounded half-up to `digits` places.
    pub fn to_decimal(&self, digits: u32) -> String {
        let n = self.scaled_round(digits);
        let negative = n.is_negative();
        let s = n.abs().to_string();
        let d = digits as usize;
        let padded = format!("{s:0>width$}", width = d + 1);
        let (int, frac) = padded.split_at(padded.len() - d);
        let sign = if negative { "-" } else { "" };
        if d == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(20).parse().expect("decimal string parses")
    }

    /// Value as a decimal float with `digits` significant digits.
    pub fn to_dbig(&self, digits: usize) -> DBig {
        let guard = digits + 10;
        let two = DBig::from(2u8).with_precision(guard).value();
        ratio_to_dbig(&self.a, guard) + ratio_to_dbig(&self.b, guard) * two.sqrt()
    }

    /// Rendering used by the Sage appendix: `b*sqrt(2) + a`.
    pub fn sage_form(&self) -> String {
        if self.b.is_zero() {
            return self.a.to_string();
        }
        let head = sqrt_term(&self.b);
        if self.a.is_zero() {
            return head;
        }
        let (op, mag) = if self.a.is_negative() {
            ("-", -&self.a)
        } else {
            ("+", self.a.clone())
        };
        format!("{head} {op} {mag}")
    }
}

fn ratio_to_dbig(q: &BigRational, precision: usize) -> DBig {
    let parse = |n: &BigInt| {
        DBig::from_str(&n.to_string())
            .expect("integer literal")
            .with_precision(precision)
            .value()
    };
    parse(q.numer()) / parse(q.denom())
}

fn sqrt_term(b: &BigRational) -> String {
    if b.is_one() {
        "sqrt(2)".into()
    } else if (-b).is_one() {
        "-sqrt(2)".into()
    } else {
        format!("{b}*sqrt(2)")
    }
}

trait SignNum {
    fn sign_num(&self) -> i32;
}

impl SignNum for BigRational {
    fn sign_num(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// `a + b*sqrt(2)`, dropping zero parts.
impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}", sqrt_term(&self.b));
        }
        if self.b.is_negative() {
            write!(f, "{} - {}", self.a, sqrt_term(&-&self.b))
        } else {
            write!(f, "{} + {}", self.a, sqrt_term(&self.b))
        }
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(2.into());
        QSqrt2::new(
            &self.a * &rhs.a + two * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Div for &QSqrt2 {
    type Output = QSqrt2;
    fn div(self, rhs: &QSqrt2) -> QSqrt2 {
        self * &rhs.inverse().expect("division by zero in Q(sqrt 2)")
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-&self.a, -&self.b)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for QSqrt2 {
            type Output = QSqrt2;
            fn $method(self, rhs: QSqrt2) -> QSqrt2 {
                (&self).$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -&self
    }
}

impl std::iter::Sum for QSqrt2 {
    fn sum<I: Iterator<Item = QSqrt2>>(iter: I) -> QSqrt2 {
        iter.fold(QSqrt2::zero(), |acc, x| &acc + &x)
    }
}

pub fn qadd(x: &QSqrt2, y: &QSqrt2) -> QSqrt2 {
    x + y
}

pub fn qmul(x: &QSqrt2, y: &QSqrt2) -> QSqrt2 {
    x * y
}

/// Decimal value with at least 50 correct digits after the point.
pub fn qeval(x: &QSqrt2) -> String {
    x.to_decimal(50)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squared() {
        let r = QSqrt2::sqrt2();
        assert_eq!(&r * &r, QSqrt2::from_integer(2));
    }

    #[test]
    fn conjugate_sum() {
        let x = QSqrt2::from_ratios((1, 1), (1, 1));
        let y = QSqrt2::from_ratios((1, 1), (-1, 1));
        assert_eq!(qadd(&x, &y), QSqrt2::from_integer(2));
    }

    #[test]
    fn appendix_first_row_decimal() {
        let p2 = QSqrt2::from_ratios((1, 8), (1, 4));
        assert!(qeval(&p2).starts_with("0.478553390593273762200422181052424519642417968844"));
        assert_eq!(p2.to_decimal(15), "0.478553390593274");
    }

    #[test]
    fn negative_values_round_correctly() {
        let x = QSqrt2::from_ratios((1, 1), (-1, 1)); // 1 - √2 ≈ -0.41421356
        assert_eq!(x.to_decimal(4), "-0.4142");
        assert_eq!(x.signum(), -1);
        let y = QSqrt2::from_ratios((-3, 1), (3, 1)); // ≈ 1.2426
        assert_eq!(y.to_decimal(2), "1.24");
        assert_eq!(y.signum(), 1);
    }

    #[test]
    fn inverse_and_division() {
        let x = QSqrt2::from_ratios((3, 2), (-5, 7));
        assert_eq!(&x * &x.inverse().unwrap(), QSqrt2::one());
        assert!(QSqrt2::zero().inverse().is_none());
        assert_eq!(&(&x / &x) - &QSqrt2::one(), QSqrt2::zero());
    }

    #[test]
    fn rendering() {
        let x = QSqrt2::from_ratios((7, 16), (1, 16));
        assert_eq!(x.to_string(), "7/16 + 1/16*sqrt(2)");
        assert_eq!(x.sage_form(), "1/16*sqrt(2) + 7/16");
        let y = QSqrt2::from_ratios((15, 23), (-3, 23));
        assert_eq!(y.to_string(), "15/23 - 3/23*sqrt(2)");
        assert_eq!(QSqrt2::sqrt2().to_string(), "sqrt(2)");
    }

    #[test]
    fn dbig_agrees_with_exact_decimal() {
        let x = QSqrt2::from_ratios((8, 23), (3, 23));
        let d = x.to_dbig(50).to_string();
        assert!(d.starts_with(&x.to_decimal(40)[..40]), "{d}");
    }
}
