//! Arbitrary-precision reals with explicit precision metadata.
//!
//! A [`BigReal`] records the number of decimal digits the caller asked for.
//! Every operation runs with [`GUARD_DIGITS`] extra digits of mantissa, so a
//! value reported at `d` digits is carried internally at `d + GUARD_DIGITS`.
//! Binary operations take the smaller precision of their operands.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Extra decimal digits carried by every kernel beyond the reported precision.
pub const GUARD_DIGITS: u32 = 15;
/// Smallest supported working precision.
pub const MIN_DIGITS: u32 = 20;

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Mantissa bits used for a value reported at `digits` decimal digits.
pub fn bits_for(digits: u32) -> usize {
    (((digits + GUARD_DIGITS) as f64) * LOG2_10).ceil() as usize + 8
}

#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    digits: u32,
}

impl BigReal {
    fn wrap(value: BigFloat, digits: u32) -> Self {
        debug_assert!(!value.is_nan(), "BigReal operation produced NaN");
        BigReal { value, digits }
    }

    fn p(&self) -> usize {
        bits_for(self.digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Re-labels the value with a new precision, rounding the mantissa if it shrinks.
    pub fn with_digits(&self, digits: u32) -> Self {
        let mut value = self.value.clone();
        if digits < self.digits {
            let _ = value.set_precision(bits_for(digits), RM);
        }
        BigReal { value, digits }
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_i64(0, digits)
    }

    pub fn one(digits: u32) -> Self {
        Self::from_i64(1, digits)
    }

    pub fn from_i64(n: i64, digits: u32) -> Self {
        let mag = BigFloat::from_u64(n.unsigned_abs(), bits_for(digits));
        let value = if n < 0 { mag.neg() } else { mag };
        Self::wrap(value, digits)
    }

    /// Exact for values representable in binary64.
    pub fn from_f64(x: f64, digits: u32) -> Self {
        Self::wrap(BigFloat::from_f64(x, bits_for(digits)), digits)
    }

    pub fn from_bigint(n: &BigInt, digits: u32) -> Self {
        if n.is_zero() {
            return Self::zero(digits);
        }
        let words = n.magnitude().to_u64_digits();
        let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
        let exp = (64 * words.len()) as i32;
        let mut value = BigFloat::from_words(&words, sign, exp);
        let _ = value.set_precision(bits_for(digits).max(64 * words.len()), RM);
        Self::wrap(value, digits)
    }

    pub fn from_bigrational(r: &BigRational, digits: u32) -> Self {
        let num = Self::from_bigint(r.numer(), digits);
        if r.denom().is_one() {
            return num;
        }
        let den = Self::from_bigint(r.denom(), digits);
        &num / &den
    }

    pub fn from_ratio(r: Ratio<i64>, digits: u32) -> Self {
        let num = Self::from_i64(*r.numer(), digits);
        if *r.denom() == 1 {
            return num;
        }
        &num / &Self::from_i64(*r.denom(), digits)
    }

    /// Parses a decimal literal such as `-1.25e-3` (exactly, then rounded).
    pub fn parse_decimal(s: &str, digits: u32) -> Result<Self> {
        let r = parse_decimal_exact(s)?;
        Ok(Self::from_bigrational(&r, digits))
    }

    pub fn pi(digits: u32) -> Self {
        let value = with_consts(|cc| cc.pi(bits_for(digits), RM));
        Self::wrap(value, digits)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative() && !self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_positive() && !self.value.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.digits)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.reciprocal(self.p(), RM), self.digits)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.p(), RM), self.digits)
    }

    pub fn exp(&self) -> Self {
        let p = self.p();
        let value = with_consts(|cc| self.value.exp(p, RM, cc));
        Self::wrap(value, self.digits)
    }

    pub fn ln(&self) -> Self {
        let p = self.p();
        let value = with_consts(|cc| self.value.ln(p, RM, cc));
        Self::wrap(value, self.digits)
    }

    pub fn powi(&self, n: i64) -> Self {
        let pos = self.value.powi(n.unsigned_abs() as usize, self.p(), RM);
        let out = Self::wrap(pos, self.digits);
        if n < 0 {
            out.recip()
        } else {
            out
        }
    }

    /// `self^e` for a rational exponent; principal real branch, requires `self > 0`
    /// unless `e` is an integer.
    pub fn pow_ratio(&self, e: Ratio<i64>) -> Self {
        if e.is_integer() {
            return self.powi(*e.numer());
        }
        debug_assert!(self.is_positive(), "fractional power of a non-positive value");
        (&self.ln() * &Self::from_ratio(e, self.digits)).exp()
    }

    /// Principal positive `n`-th root of a positive value.
    pub fn root(&self, n: i64) -> Self {
        self.pow_ratio(Ratio::new(1, n))
    }

    pub fn min_digits(&self, other: &Self) -> u32 {
        self.digits.min(other.digits)
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.to_bigrational();
        r.to_f64().unwrap_or(f64::NAN)
    }

    /// Approximate `log10 |self|`; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (words, _, _, e, _) = self.value.as_raw_parts().expect("finite BigReal");
        let top = *words.last().unwrap_or(&0) as f64 / 2f64.powi(64);
        top.log10() + (e as f64) * std::f64::consts::LOG10_2
    }

    /// True when `|self| < 10^exp10`.
    pub fn abs_lt_pow10(&self, exp10: i64) -> bool {
        if self.is_zero() {
            return true;
        }
        let approx = self.log10_abs();
        if approx < exp10 as f64 - 1.0 {
            return true;
        }
        if approx > exp10 as f64 + 1.0 {
            return false;
        }
        self.to_bigrational().abs() < pow10_ratio(exp10)
    }

    /// Exact value of the stored binary mantissa.
    pub fn to_bigrational(&self) -> BigRational {
        let Some((words, _, sign, e, _)) = self.value.as_raw_parts() else {
            return BigRational::zero();
        };
        let m = BigInt::from(BigUint::new(
            words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect(),
        ));
        if m.is_zero() {
            return BigRational::zero();
        }
        let shift = e as i64 - 64 * words.len() as i64;
        let mut r = if shift >= 0 {
            BigRational::from_integer(m << (shift as usize))
        } else {
            BigRational::new(m, BigInt::one() << ((-shift) as usize))
        };
        if sign == Sign::Neg {
            r = -r;
        }
        r
    }

    /// Nearest integer.
    pub fn round_to_bigint(&self) -> BigInt {
        round_ratio(&self.to_bigrational())
    }

    /// Scientific notation with `sig` significant digits, e.g. `4.1e-53`.
    pub fn to_sci_string(&self, sig: usize) -> String {
        let r = self.to_bigrational();
        if r.is_zero() {
            return "0".to_string();
        }
        let (mantissa, e10) = decimal_digits(&r, sig);
        let sign = if r.is_negative() { "-" } else { "" };
        let (head, tail) = mantissa.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }

    /// Positional notation with `sig` significant digits when the magnitude is
    /// moderate, scientific otherwise.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        let r = self.to_bigrational();
        if r.is_zero() {
            return "0".to_string();
        }
        let (mantissa, e10) = decimal_digits(&r, sig);
        if !(-6..(sig as i64)).contains(&e10) {
            return self.to_sci_string(sig);
        }
        let sign = if r.is_negative() { "-" } else { "" };
        let body = if e10 < 0 {
            format!("0.{}{}", "0".repeat((-e10 - 1) as usize), mantissa)
        } else {
            let split = (e10 + 1) as usize;
            if mantissa.len() <= split {
                format!("{mantissa}{}", "0".repeat(split - mantissa.len()))
            } else {
                let (int, frac) = mantissa.split_at(split);
                format!("{int}.{frac}")
            }
        };
        format!("{sign}{body}")
    }
}

fn pow10_ratio(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

pub(crate) fn round_ratio(r: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let (q, _) = (r.numer() * &two + r.denom()).div_mod_floor(&(r.denom() * &two));
    q
}

/// Returns `(digits, e10)` with `|r| ≈ 0.d1d2… × 10^(e10+1)`, i.e. `d1.d2… × 10^e10`.
fn decimal_digits(r: &BigRational, sig: usize) -> (String, i64) {
    let a = r.abs();
    let approx = a.numer().bits() as f64 * std::f64::consts::LOG10_2
        - a.denom().bits() as f64 * std::f64::consts::LOG10_2;
    let mut e10 = approx.floor() as i64;
    loop {
        let scaled = &a * pow10_ratio(sig as i64 - 1 - e10);
        let n = round_ratio(&scaled);
        let s = n.to_string();
        if s.len() > sig {
            e10 += 1;
            continue;
        }
        if s.len() < sig {
            e10 -= 1;
            continue;
        }
        return (s.trim_end_matches('0').to_string(), e10);
    }
}

/// Exact rational value of a decimal literal (`123`, `-0.5`, `1.5e-3`) or a
/// fraction `p/q`.
pub fn parse_decimal_exact(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed number `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let mut r = BigRational::from_integer(digits) * pow10_ratio(exp - frac.len() as i64);
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Number of significant decimal digits in a decimal literal; `None` for fractions.
pub fn literal_significant_digits(s: &str) -> Option<u32> {
    if s.contains('/') {
        return None;
    }
    let mant = s.split(['e', 'E']).next().unwrap_or("");
    let d: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let d = d.trim_start_matches('0');
    Some(d.len() as u32)
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {} digits)", self.to_sci_string(20), self.digits)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(self.digits as usize))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let digits = self.min_digits(rhs);
                BigReal::wrap(self.value.$op(&rhs.value, bits_for(digits), RM), digits)
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.value.clone().neg(), self.digits)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}
