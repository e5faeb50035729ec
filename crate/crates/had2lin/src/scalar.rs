//! Numeric traits shared by the flow and linear-programming layers.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// An ordered field element: exact rationals or IEEE floats.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for Rational {}

/// Integer capacities for the augmenting-path core.
pub trait FlowInt: Clone + Debug + Ord + Zero + One + AddAssign + SubAssign + Send + Sync {
    fn to_bigint(&self) -> BigInt;
}

impl FlowInt for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl FlowInt for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl FlowInt for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()))
}

/// Scales nonnegative rationals by their common denominator. Returns the
/// integers as `i128` when their sum fits comfortably, else as `BigInt`.
pub fn scale_to_integers(values: &[Rational]) -> (ScaledInts, BigInt) {
    let d = common_denominator(values);
    let ints: Vec<BigInt> = values.iter().map(|v| v.numer() * (&d / v.denom())).collect();
    let total: BigInt = ints.iter().sum();
    let small = total.bits() < 120;
    let scaled = if small {
        ScaledInts::Small(ints.iter().map(|v| v.to_i128().expect("checked width")).collect())
    } else {
        ScaledInts::Big(ints)
    };
    (scaled, d)
}

pub enum ScaledInts {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::parse_bytes(n.trim().as_bytes(), 10)?;
            let d = BigInt::parse_bytes(d.trim().as_bytes(), 10)?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => BigInt::parse_bytes(s.as_bytes(), 10).map(Rational::from_integer),
    }
}

/// Decimal string of `v` rounded up (towards +∞) to `places` digits.
pub fn decimal_round_up(v: &Rational, places: u32) -> String {
    let scale = BigInt::from(10).pow(places);
    let scaled = v * Rational::from_integer(scale.clone());
    let up = scaled.ceil().to_integer();
    format_fixed(&up, &scale, places)
}

/// Decimal string of `v` rounded to nearest (ties away from zero).
pub fn decimal_round(v: &Rational, places: u32) -> String {
    let scale = BigInt::from(10).pow(places);
    let scaled = v * Rational::from_integer(scale.clone());
    format_fixed(&scaled.round().to_integer(), &scale, places)
}

fn format_fixed(n: &BigInt, scale: &BigInt, places: u32) -> String {
    let sign = if n.is_negative() { "-" } else { "" };
    let n = n.abs();
    let (q, r) = n.div_rem(scale);
    if places == 0 {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{:0w$}", r, w = places as usize)
    }
}

pub fn to_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
