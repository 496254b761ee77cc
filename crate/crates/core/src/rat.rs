//! Exact rationals on the unit interval and the truncated connectives of
//! continuous logic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Unbounded exact rational, used wherever a value may leave `[0,1]`
/// (multipliers, modulus coefficients, intermediate sums).
pub type Rational = BigRational;

/// Builds a rational from small integers. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^-k` as an exact rational.
pub fn pow2_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `p/q`, `p` or `-p/q` into an unbounded rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::parse(0, format!("invalid rational `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    if num.is_empty() || den.is_empty() {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() || den.is_negative() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text of an unbounded rational: `p/q`, or `p` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An exact rational in `[0,1]`, always held in reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat01(Rational);

impl Default for Rat01 {
    fn default() -> Self {
        Rat01::zero()
    }
}

impl Rat01 {
    pub fn zero() -> Self {
        Rat01(Rational::zero())
    }

    pub fn one() -> Self {
        Rat01(Rational::one())
    }

    /// `num/den`, rejecting values outside `[0,1]` and zero denominators.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::usage("zero denominator"));
        }
        Self::from_rational(ratio(num, den))
    }

    /// Shorthand for literals known to be in range. Panics otherwise.
    pub fn of(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("rational literal outside [0,1]")
    }

    pub fn from_rational(r: Rational) -> Result<Self> {
        if r.is_negative() || r > Rational::one() {
            return Err(Error::usage(format!("{} is outside [0,1]", format_rational(&r))));
        }
        Ok(Rat01(r))
    }

    /// Clamps an arbitrary rational into `[0,1]`.
    pub fn clamp(r: Rational) -> Self {
        if r.is_negative() {
            Self::zero()
        } else if r > Rational::one() {
            Self::one()
        } else {
            Rat01(r)
        }
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn neg(&self) -> Self {
        Rat01(Rational::one() - &self.0)
    }

    pub fn half(&self) -> Self {
        Rat01(&self.0 / Rational::from_integer(BigInt::from(2)))
    }

    /// Truncated subtraction `max(x - y, 0)`.
    pub fn tsub(&self, other: &Self) -> Self {
        Self::clamp(&self.0 - &other.0)
    }

    /// Truncated addition `min(x + y, 1)`.
    pub fn tadd(&self, other: &Self) -> Self {
        Self::clamp(&self.0 + &other.0)
    }

    /// Truncated product `min(q * x, 1)` for a positive rational `q`.
    pub fn tmul(&self, q: &Rational) -> Self {
        Self::clamp(q * &self.0)
    }

    pub fn absdiff(&self, other: &Self) -> Self {
        Rat01((&self.0 - &other.0).abs())
    }

    pub fn min_with(&self, other: &Self) -> Self {
        std::cmp::min(self, other).clone()
    }

    pub fn max_with(&self, other: &Self) -> Self {
        std::cmp::max(self, other).clone()
    }
}

impl fmt::Display for Rat01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Debug for Rat01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat01({self})")
    }
}

impl FromStr for Rat01 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_rational(s)?;
        Rat01::from_rational(r).map_err(|e| match e {
            Error::Usage(msg) => Error::parse(0, msg),
            other => other,
        })
    }
}

/// The connectives of continuous logic, including the truncated product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Connective {
    Neg,
    Half,
    TSub,
    TAdd,
    TMul(Rational),
    Min,
    Max,
    AbsDiff,
}

impl Connective {
    pub fn arity(&self) -> usize {
        match self {
            Connective::Neg | Connective::Half | Connective::TMul(_) => 1,
            _ => 2,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Connective::Neg => "neg",
            Connective::Half => "half",
            Connective::TSub => "tsub",
            Connective::TAdd => "tadd",
            Connective::TMul(_) => "tmul",
            Connective::Min => "min",
            Connective::Max => "max",
            Connective::AbsDiff => "absdiff",
        }
    }
}

/// Applies a connective to exact arguments.
pub fn connective_eval(kind: &Connective, args: &[Rat01]) -> Result<Rat01> {
    if args.len() != kind.arity() {
        return Err(Error::usage(format!(
            "{} expects {} argument(s), got {}",
            kind.keyword(),
            kind.arity(),
            args.len()
        )));
    }
    Ok(match kind {
        Connective::Neg => args[0].neg(),
        Connective::Half => args[0].half(),
        Connective::TMul(q) => {
            if !q.is_positive() {
                return Err(Error::usage("tmul multiplier must be positive"));
            }
            args[0].tmul(q)
        }
        Connective::TSub => args[0].tsub(&args[1]),
        Connective::TAdd => args[0].tadd(&args[1]),
        Connective::Min => args[0].min_with(&args[1]),
        Connective::Max => args[0].max_with(&args[1]),
        Connective::AbsDiff => args[0].absdiff(&args[1]),
    })
}
