//! Scalar abstraction shared by every algorithm in the crate.
//!
//! Identities are checked with exact rationals; searches and sampling run in
//! `f64`. Both implement [`Scalar`], so the same permanent and subpermanent
//! code serves both modes.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    Float64,
    ExactRational,
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarMode::Float64 => f.write_str("float64"),
            ScalarMode::ExactRational => f.write_str("exact_rational"),
        }
    }
}

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    const MODE: ScalarMode;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts an `f64`. For rationals the conversion is exact (every finite
    /// double is a dyadic rational). Panics on non-finite input.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn to_rational(&self) -> Rational;

    fn from_rational(r: &Rational) -> Self;

    /// Tolerance for membership checks guarding an operation's domain:
    /// `1e-9` in float mode, exactly zero in exact mode.
    fn domain_tol() -> Self;

    /// Entries strictly above this value count as positive when classifying
    /// a support pattern: `1e-12` in float mode, zero in exact mode.
    fn support_threshold() -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn from_usize(v: usize) -> Self {
        Self::from_ratio(v as i64, 1)
    }

    fn is_exact() -> bool {
        Self::MODE == ScalarMode::ExactRational
    }

    fn powu(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    /// Text rendering used in reports: `p/q` for rationals, shortest
    /// round-trip decimal for floats.
    fn render(&self) -> String {
        format!("{self}")
    }

    /// JSON form: a number in float mode, a `"p/q"` string in exact mode.
    fn to_json(&self) -> serde_json::Value {
        match Self::MODE {
            ScalarMode::Float64 => serde_json::json!(self.to_f64()),
            ScalarMode::ExactRational => serde_json::json!(self.render()),
        }
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float64;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("non-finite float cannot be lifted to a rational")
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn domain_tol() -> Self {
        1e-9
    }

    fn support_threshold() -> Self {
        1e-12
    }

    fn render(&self) -> String {
        format!("{self:?}")
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::ExactRational;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("non-finite float cannot be lifted to a rational")
    }

    fn to_f64(&self) -> f64 {
        // Ratio::to_f64 handles huge numerators/denominators without overflow.
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn domain_tol() -> Self {
        Rational::zero()
    }

    fn support_threshold() -> Self {
        Rational::zero()
    }
}

/// `n!` as a scalar.
pub fn factorial<S: Scalar>(n: usize) -> S {
    (1..=n).fold(S::one(), |acc, k| acc * S::from_usize(k))
}

/// Binomial coefficient `C(n, k)` as a scalar (zero when `k > n`).
pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    S::from_rational(&Rational::from_integer(acc))
}

/// Parses a scalar literal exactly: integers, `p/q`, and decimals with an
/// optional exponent (`0.25`, `-1.5e-3`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str_radix(&joined, 10).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Convenience constructor for rationals in tests and tables.
pub fn rat(num: i64, den: i64) -> Rational {
    <Rational as Scalar>::from_ratio(num, den)
}
