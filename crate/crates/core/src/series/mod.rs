//! Truncated Laurent–Puiseux series with exact rational coefficients.
//!
//! A series lives on the exponent grid `(1/N)·ℤ` and is known exactly for every
//! exponent strictly below its truncation bound `hi/N`. Coefficients at or
//! beyond the bound are unknown, and no operation ever reads them.

mod qseries;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use qseries::{
    a_product_series, a_series, eta5_series, eta_series, h5_series, modulus_root_exp_form,
    modulus_series, parse_rat, theta_series, ThetaSpec,
};

/// Small exact rationals used for exponents and theta parameters.
pub type Rat = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    denom: i64,
    hi: i64,
    coeffs: BTreeMap<i64, BigRational>,
}

fn ceil_to_grid(bound: Rat, denom: i64) -> i64 {
    (bound * denom).ceil().to_integer()
}

impl PuiseuxSeries {
    /// Builds a series from grid-indexed terms. Terms at or beyond `hi` are dropped.
    pub fn from_terms<I>(denom: i64, terms: I, hi: i64) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        assert!(denom >= 1, "grid denominator must be positive");
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (k, c) in terms {
            if k >= hi {
                continue;
            }
            *coeffs.entry(k).or_insert_with(BigRational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        let mut s = PuiseuxSeries { denom, hi, coeffs };
        s.normalize();
        s
    }

    pub fn zero(bound: Rat) -> Self {
        let denom = *bound.denom();
        Self::from_terms(denom, [], ceil_to_grid(bound, denom))
    }

    pub fn constant(c: BigRational, bound: Rat) -> Self {
        Self::monomial(c, Rat::zero(), bound)
    }

    pub fn one(bound: Rat) -> Self {
        Self::constant(BigRational::one(), bound)
    }

    /// `c·q^exp`, known below `bound`.
    pub fn monomial(c: BigRational, exp: Rat, bound: Rat) -> Self {
        let denom = exp.denom().lcm(bound.denom());
        let k = (exp * denom).to_integer();
        Self::from_terms(denom, [(k, c)], ceil_to_grid(bound, denom))
    }

    /// Integer polynomial `Σ c_i q^i` known below `bound`.
    pub fn from_i64_coeffs(coeffs: &[i64], bound: Rat) -> Self {
        let denom = *bound.denom();
        Self::from_terms(
            denom,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as i64 * denom, BigRational::from_integer(c.into()))),
            ceil_to_grid(bound, denom),
        )
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Exclusive truncation bound in grid units.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Lowest grid index that may carry a nonzero coefficient.
    pub fn lo(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.hi)
    }

    /// Exclusive truncation bound as an exponent.
    pub fn bound(&self) -> Rat {
        Rat::new(self.hi, self.denom)
    }

    /// Exponent of the leading nonzero term.
    pub fn valuation(&self) -> Option<Rat> {
        self.coeffs.keys().next().map(|&k| Rat::new(k, self.denom))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `q^exp`; `None` if `exp` is at or beyond the bound.
    pub fn coeff(&self, exp: Rat) -> Option<BigRational> {
        if exp >= self.bound() {
            return None;
        }
        let scaled = exp * self.denom;
        if !scaled.is_integer() {
            return Some(BigRational::zero());
        }
        Some(
            self.coeffs
                .get(&scaled.to_integer())
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    /// Nonzero terms as `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rat, &BigRational)> + '_ {
        self.coeffs.iter().map(move |(&k, c)| (Rat::new(k, self.denom), c))
    }

    /// Nonzero terms keyed by grid index.
    pub fn grid_terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    fn normalize(&mut self) {
        let g = self
            .coeffs
            .keys()
            .fold(self.denom.gcd(&self.hi), |g, &k| g.gcd(&k));
        if g > 1 {
            self.denom /= g;
            self.hi /= g;
            self.coeffs = std::mem::take(&mut self.coeffs)
                .into_iter()
                .map(|(k, c)| (k / g, c))
                .collect();
        }
    }

    /// Same series on the finer grid `denom` (a multiple of the current one).
    fn rebased(&self, denom: i64) -> (i64, BTreeMap<i64, BigRational>) {
        assert_eq!(denom % self.denom, 0, "rebase target must refine the grid");
        let f = denom / self.denom;
        if f == 1 {
            return (self.hi, self.coeffs.clone());
        }
        (
            self.hi * f,
            self.coeffs.iter().map(|(&k, c)| (k * f, c.clone())).collect(),
        )
    }

    /// Drops everything at or beyond `bound` (rounded up to the grid).
    pub fn truncate(&self, bound: Rat) -> Self {
        let hi = self.hi.min(ceil_to_grid(bound, self.denom));
        Self::from_terms(
            self.denom,
            self.coeffs.range(..hi).map(|(&k, c)| (k, c.clone())),
            hi,
        )
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            denom: self.denom,
            hi: self.hi,
            coeffs: self.coeffs.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_terms(
            self.denom,
            self.coeffs.iter().map(|(&k, v)| (k, v * c)),
            self.hi,
        )
    }

    pub fn add_scalar(&self, c: &BigRational) -> Self {
        self.add(&Self::constant(c.clone(), self.bound()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let denom = self.denom.lcm(&other.denom);
        let (ha, mut a) = self.rebased(denom);
        let (hb, b) = other.rebased(denom);
        for (k, c) in b {
            *a.entry(k).or_insert_with(BigRational::zero) += c;
        }
        Self::from_terms(denom, a, ha.min(hb))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplies by `c·q^exp`.
    pub fn mul_monomial(&self, c: &BigRational, exp: Rat) -> Self {
        let denom = self.denom.lcm(exp.denom());
        let shift = (exp * denom).to_integer();
        let (hi, coeffs) = self.rebased(denom);
        Self::from_terms(
            denom,
            coeffs.into_iter().map(|(k, v)| (k + shift, v * c)),
            hi + shift,
        )
    }

    /// Shifts every exponent by `exp`.
    pub fn shift(&self, exp: Rat) -> Self {
        self.mul_monomial(&BigRational::one(), exp)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let denom = self.denom.lcm(&other.denom);
        let (ha, a) = self.rebased(denom);
        let (hb, b) = other.rebased(denom);
        let va = a.keys().next().copied().unwrap_or(ha);
        let vb = b.keys().next().copied().unwrap_or(hb);
        let hi = (ha + vb).min(hb + va);
        if a.is_empty() || b.is_empty() || va + vb >= hi {
            return Self::from_terms(denom, [], hi);
        }
        let (ia, da) = integer_parts(&a);
        let (ib, db) = integer_parts(&b);
        let base = va + vb;
        let mut acc = vec![BigInt::zero(); (hi - base) as usize];
        for (ka, ca) in &ia {
            if ka + vb >= hi {
                break;
            }
            for (kb, cb) in &ib {
                let k = ka + kb;
                if k >= hi {
                    break;
                }
                acc[(k - base) as usize] += ca * cb;
            }
        }
        let den = da * db;
        Self::from_terms(
            denom,
            acc.into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (base + i as i64, BigRational::new(c, den.clone()))),
            hi,
        )
    }

    /// Integer power. A negative exponent inverts first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.invert_unit()?.pow(-e);
        }
        if e == 0 {
            let rel = self.hi - self.lo();
            return Ok(Self::one(Rat::new(rel.max(0), self.denom)));
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut n = e as u64;
        while n > 0 {
            if n & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result.expect("positive exponent"))
    }

    /// Splits off the leading term: returns `(lo, c, g, t)` with
    /// `self = c·q^(lo/N)·Σ t_j q^(j·g/N)`, `t_0 = 1`, `t` dense in steps of `g`.
    fn unit_decomposition(&self) -> Option<(i64, BigRational, i64, Vec<BigRational>)> {
        let lo = *self.coeffs.keys().next()?;
        let c = self.coeffs[&lo].clone();
        let g = self
            .coeffs
            .keys()
            .fold(0i64, |g, &k| g.gcd(&(k - lo)));
        let g = if g == 0 { (self.hi - lo).max(1) } else { g };
        let steps = (self.hi - lo + g - 1) / g;
        let mut t = vec![BigRational::zero(); steps.max(1) as usize];
        for (&k, v) in &self.coeffs {
            t[((k - lo) / g) as usize] = v / &c;
        }
        Some((lo, c, g, t))
    }

    /// Multiplicative inverse of a series with nonzero leading coefficient.
    pub fn invert_unit(&self) -> Result<Self> {
        let (lo, c, g, t) = self
            .unit_decomposition()
            .ok_or_else(|| Error::domain("cannot invert a series that is zero to its bound"))?;
        let rel = self.hi - lo;
        let nz: Vec<(usize, &BigRational)> = t
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let mut d: Vec<BigRational> = Vec::with_capacity(t.len());
        d.push(BigRational::one());
        for n in 1..t.len() {
            let mut acc = BigRational::zero();
            for &(j, tj) in &nz {
                if j > n {
                    break;
                }
                if !d[n - j].is_zero() {
                    acc -= tj * &d[n - j];
                }
            }
            d.push(acc);
        }
        let inv_c = c.recip();
        Ok(Self::from_terms(
            self.denom,
            d.into_iter()
                .enumerate()
                .map(|(n, v)| (-lo + n as i64 * g, v * &inv_c)),
            -lo + rel,
        ))
    }

    /// `exp(u)` for `u` with strictly positive valuation.
    pub fn exp_series(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::one(self.bound()));
        }
        if self.lo() <= 0 {
            return Err(Error::domain(
                "exp_series needs a strictly positive valuation (no constant term)",
            ));
        }
        let g = self.coeffs.keys().fold(0i64, |g, &k| g.gcd(&k));
        let steps = ((self.hi + g - 1) / g) as usize;
        let u: Vec<(usize, &BigRational)> = self
            .coeffs
            .iter()
            .map(|(&k, v)| ((k / g) as usize, v))
            .collect();
        let mut e: Vec<BigRational> = Vec::with_capacity(steps);
        e.push(BigRational::one());
        for n in 1..steps {
            let mut acc = BigRational::zero();
            for &(j, uj) in &u {
                if j > n {
                    break;
                }
                if !e[n - j].is_zero() {
                    acc += uj * &e[n - j] * BigRational::from_integer(BigInt::from(j));
                }
            }
            e.push(acc / BigRational::from_integer(BigInt::from(n)));
        }
        Ok(Self::from_terms(
            self.denom,
            e.into_iter().enumerate().map(|(n, v)| (n as i64 * g, v)),
            self.hi,
        ))
    }

    /// Square root with positive leading coefficient. The leading coefficient
    /// must be the square of a rational.
    pub fn sqrt_series(&self) -> Result<Self> {
        let (lo, c, g, t) = self
            .unit_decomposition()
            .ok_or_else(|| Error::domain("cannot take the square root of a zero series"))?;
        let root_c = rational_sqrt(&c).ok_or_else(|| {
            Error::domain(format!("leading coefficient {c} is not the square of a rational"))
        })?;
        let rel = self.hi - lo;
        let two = BigRational::from_integer(BigInt::from(2));
        let mut s: Vec<BigRational> = Vec::with_capacity(t.len());
        s.push(BigRational::one());
        for n in 1..t.len() {
            let mut acc = t[n].clone();
            for k in 1..n {
                if !s[k].is_zero() && !s[n - k].is_zero() {
                    acc -= &s[k] * &s[n - k];
                }
            }
            s.push(acc / &two);
        }
        // Result grid 2N: leading key lo, step 2g, bound lo + 2·rel.
        Ok(Self::from_terms(
            2 * self.denom,
            s.into_iter()
                .enumerate()
                .map(|(n, v)| (lo + 2 * g * n as i64, v * &root_c)),
            lo + 2 * rel,
        ))
    }

    /// Substitutes `q → q^s` for rational `s > 0`.
    pub fn rescale(&self, s: Rat) -> Self {
        assert!(s > Rat::zero(), "rescale factor must be positive");
        let (num, den) = (*s.numer(), *s.denom());
        Self::from_terms(
            self.denom * den,
            self.coeffs.iter().map(|(&k, c)| (k * num, c.clone())),
            self.hi * num,
        )
    }

    /// True when both series agree on every exponent below the smaller bound.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let bound = self.bound().min(other.bound());
        self.sub(other).truncate(bound).is_zero()
    }

    /// Exponent of the first nonzero coefficient, if any below the bound.
    pub fn first_nonzero(&self) -> Option<Rat> {
        self.valuation()
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            denom: self.denom,
            terms: self
                .coeffs
                .iter()
                .map(|(&k, c)| (k, c.to_string()))
                .collect(),
            hi: self.hi,
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        if j.denom < 1 {
            return Err(Error::Parse("series denom must be positive".into()));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for (k, c) in &j.terms {
            let v: BigRational = c
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))?;
            if *k >= j.hi {
                return Err(Error::Parse(format!("term {k} at or beyond bound {}", j.hi)));
            }
            terms.push((*k, v));
        }
        Ok(Self::from_terms(j.denom, terms, j.hi))
    }
}

/// Wire form of a series: `{"denom": N, "terms": [[k, "num/den"], …], "hi": bound}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub denom: i64,
    pub terms: Vec<(i64, String)>,
    pub hi: i64,
}

fn integer_parts(m: &BTreeMap<i64, BigRational>) -> (Vec<(i64, BigInt)>, BigInt) {
    let den = m
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let v = m
        .iter()
        .map(|(&k, c)| (k, c.numer() * (&den / c.denom())))
        .collect();
    (v, den)
}

pub(crate) fn rational_sqrt(c: &BigRational) -> Option<BigRational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    if &(&n * &n) == c.numer() && &(&d * &d) == c.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn fmt_exp(e: Rat) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("({e})")
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "q".to_string()
            } else {
                format!("q^{}", fmt_exp(e))
            };
            match (mag.is_one(), mono.is_empty()) {
                (true, true) => f.write_str("1")?,
                (true, false) => f.write_str(&mono)?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", fmt_exp(self.bound()))
    }
}
