//! Recognizing algebraic numbers from high-precision values by lattice
//! reduction, and rationals by continued fractions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::numeric::tolerance_exp;

/// Integer polynomial `c₀ + c₁x + … + c_d x^d` with content 1 and `c_d > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Normalizes: strips leading zeros, divides by the content, makes `c_d > 0`.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::domain("the zero polynomial has no roots to recognize"));
        }
        let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let flip = coeffs.last().expect("nonempty").is_negative();
        for c in coeffs.iter_mut() {
            *c /= &g;
            if flip {
                *c = -&*c;
            }
        }
        Ok(IntPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigReal) -> BigReal {
        let d = x.digits();
        let mut acc = BigReal::zero(d);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &BigReal::from_bigint(c, d);
        }
        acc
    }

    /// `|P(x)|` divided by the largest `|c_i x^i|`, so large roots are not penalized.
    pub fn relative_residual(&self, x: &BigReal) -> BigReal {
        let d = x.digits();
        let mut scale = BigReal::zero(d);
        let mut pw = BigReal::one(d);
        for c in &self.coeffs {
            let t = (&BigReal::from_bigint(c, d) * &pw).abs();
            if t > scale {
                scale = t;
            }
            pw = &pw * x;
        }
        let value = self.eval(x).abs();
        if scale.is_zero() {
            value
        } else {
            &value / &scale
        }
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Whether `self` divides `other` over the rationals.
    pub fn divides(&self, other: &IntPoly) -> bool {
        if self.degree() > other.degree() {
            return false;
        }
        let to_q = |v: &[BigInt]| -> Vec<BigRational> {
            v.iter().cloned().map(BigRational::from_integer).collect()
        };
        let mut rem = to_q(&other.coeffs);
        let div = to_q(&self.coeffs);
        let lead = div.last().expect("nonzero").clone();
        let dd = div.len() - 1;
        while rem.len() > dd {
            let f = rem.last().expect("nonempty").clone() / &lead;
            let shift = rem.len() - 1 - dd;
            for (i, c) in div.iter().enumerate() {
                rem[shift + i] -= &f * c;
            }
            rem.pop();
        }
        rem.iter().all(|c| c.is_zero())
    }

    pub fn to_json(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let mono = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            let sep = match (first, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// Something that can produce the target value at any requested precision.
pub trait RealSource {
    fn value(&self, digits: u32) -> Result<BigReal>;
}

impl<F> RealSource for F
where
    F: Fn(u32) -> Result<BigReal>,
{
    fn value(&self, digits: u32) -> Result<BigReal> {
        self(digits)
    }
}

/// A fixed value; requests beyond its precision get what is available.
pub struct FixedReal(pub BigReal);

impl RealSource for FixedReal {
    fn value(&self, digits: u32) -> Result<BigReal> {
        Ok(self.0.with_digits(digits.min(self.0.digits())))
    }
}

/// A certified polynomial and its evidence.
#[derive(Clone, Debug)]
pub struct Recognition {
    pub poly: IntPoly,
    pub digits: u32,
    /// Relative residual at `digits`.
    pub residual: BigReal,
    /// Relative residual at `2·digits`.
    pub recert_residual: BigReal,
    pub warnings: Vec<String>,
}

const LLL_DELTA: (i64, i64) = (99, 100);

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Nearest integer to `n / d` for `d > 0`.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

/// LLL reduction (δ = 0.99) of the rows of `basis`, which must be linearly
/// independent. All Gram–Schmidt data is kept as exact integers.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let (dn, dd) = (BigInt::from(LLL_DELTA.0), BigInt::from(LLL_DELTA.1));
    // d[i + 1] is the Gram determinant of the first i + 1 rows; d[0] = 1.
    let mut d: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut lam: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = dot(&basis[0], &basis[0]);
    let mut k = 1;
    let mut kmax = 0;

    fn reduce(k: usize, l: usize, basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt]) {
        let dl = &d[l + 1];
        if (&lam[k][l] * BigInt::from(2)).abs() > *dl {
            let q = round_div(&lam[k][l], dl);
            let (lo, hi) = basis.split_at_mut(k);
            for (x, y) in hi[0].iter_mut().zip(&lo[l]) {
                *x -= &q * y;
            }
            lam[k][l] -= &q * dl;
            for i in 0..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    }

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&basis[k], &basis[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k + 1] = u;
                }
            }
        }
        reduce(k, k - 1, basis, &mut lam, &d);
        let l = &lam[k][k - 1];
        let swap = &dd * &d[k + 1] * &d[k - 1] < &dn * &d[k] * &d[k] - &dd * l * l;
        if swap {
            basis.swap(k, k - 1);
            let (top, bottom) = lam.split_at_mut(k);
            for j in 0..k - 1 {
                std::mem::swap(&mut top[k - 1][j], &mut bottom[0][j]);
            }
            let l = lam[k][k - 1].clone();
            let b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
                lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k + 1];
            }
            d[k] = b;
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(k, l, basis, &mut lam, &d);
            }
            k += 1;
        }
    }
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Shortest-vector candidate of degree `d` from the lattice `(e_i, round(C·x^i))`.
fn lattice_candidate(x: &BigReal, d: usize, scale_digits: u32) -> Option<IntPoly> {
    let digits = x.digits();
    let c = BigReal::from_bigint(&pow10(scale_digits), digits);
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(d + 1);
    let mut pw = BigReal::one(digits);
    for i in 0..=d {
        let mut row = vec![BigInt::zero(); d + 2];
        row[i] = BigInt::one();
        row[d + 1] = (&c * &pw).round_to_bigint();
        basis.push(row);
        pw = &pw * x;
    }
    lll_reduce(&mut basis);
    // Shortest full vector: small coefficients and a small scaled residual.
    basis
        .iter()
        .filter(|row| row[1..=d].iter().any(|c| !c.is_zero()))
        .min_by_key(|row| row.iter().map(|c| c * c).sum::<BigInt>())
        .and_then(|row| IntPoly::new(row[..=d].to_vec()).ok())
}

/// Finds the lowest-degree integer polynomial, up to `d_max`, that vanishes at
/// the source value to well beyond what its size explains, and that still
/// vanishes when re-evaluated at twice the precision.
pub fn recognize(source: &dyn RealSource, d_max: usize, digits: u32) -> Result<Recognition> {
    let mut warnings = Vec::new();
    let budget = 20 * (d_max as u32 + 1);
    if digits < budget {
        warnings.push(format!(
            "{digits} digits is below the usual budget of {budget} for degree {d_max}; results need the re-certification margin"
        ));
    }
    let x = source.value(digits)?;
    let digits = x.digits();
    let thresh = -((digits as f64 * 0.6).floor() as i64);
    let bit_cap = (digits as f64 * 0.3 * std::f64::consts::LOG2_10).floor() as u64;
    let mut last_reason = String::from("no candidate found");
    for d in 1..=d_max {
        let Some(p) = lattice_candidate(&x, d, digits.saturating_sub(5)) else {
            continue;
        };
        if p.max_coeff_bits() > bit_cap {
            last_reason = format!("degree {d}: coefficients exceed the {bit_cap}-bit cap");
            continue;
        }
        let residual = p.relative_residual(&x);
        if !residual.abs_lt_pow10(thresh) {
            last_reason = format!("degree {d}: residual {} above 1e{thresh}", residual.to_sci_string(2));
            continue;
        }
        let x2 = source.value(2 * digits)?;
        let thresh2 = -((x2.digits() as f64 * 0.6).floor() as i64);
        let recert = p.relative_residual(&x2);
        if !recert.abs_lt_pow10(thresh2) {
            last_reason = format!(
                "degree {d}: candidate {p} failed re-certification at {} digits",
                x2.digits()
            );
            continue;
        }
        return Ok(Recognition {
            poly: p,
            digits,
            residual,
            recert_residual: recert,
            warnings,
        });
    }
    Err(Error::NotFound(format!(
        "no polynomial of degree <= {d_max} certified at {digits} digits ({last_reason})"
    )))
}

/// Continued-fraction convergents of an exact rational.
fn convergents(x: &BigRational) -> Vec<BigRational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    loop {
        let a = rest.floor().to_integer();
        let h = &a * &h1 + &h0;
        let k = &a * &k1 + &k0;
        out.push(BigRational::new(h.clone(), k.clone()));
        h0 = std::mem::replace(&mut h1, h);
        k0 = std::mem::replace(&mut k1, k);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() || out.len() > 4000 {
            break;
        }
        rest = frac.recip();
    }
    out
}

/// The first continued-fraction convergent with denominator at most
/// `den_bound` that matches `x` to `10^(−digits+10)`. A convergent must also
/// match far better than its denominator alone explains (`|x − p/q|·q² < 10⁻³`),
/// so irrationals at modest precision are not reported as rationals.
pub fn recognize_rational(x: &BigReal, digits: u32, den_bound: &BigInt) -> Result<BigRational> {
    let x = x.with_digits(digits.min(x.digits()));
    let exact = x.to_bigrational();
    let tol = tolerance_exp(x.digits());
    for c in convergents(&exact) {
        if c.denom() > den_bound {
            break;
        }
        let diff = BigReal::from_bigrational(&(&exact - &c), x.digits());
        let q2 = BigReal::from_bigint(&(c.denom() * c.denom()), x.digits());
        if diff.abs_lt_pow10(tol) && (&diff * &q2).abs_lt_pow10(-3) {
            return Ok(c);
        }
    }
    Err(Error::NotFound(format!(
        "no rational with denominator <= {den_bound} matches to 1e{tol}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Rat;

    fn fixed(s: &str, digits: u32) -> FixedReal {
        FixedReal(BigReal::parse_decimal(s, digits).unwrap())
    }

    #[test]
    fn poly_normalization_and_display() {
        let p = IntPoly::from_i64(&[2, 0, -4, 0]).unwrap();
        assert_eq!(p.coeffs(), &[BigInt::from(-1), BigInt::zero(), BigInt::from(2)]);
        assert_eq!(p.to_string(), "2*x^2 - 1");
        assert_eq!(IntPoly::from_i64(&[-8, 1]).unwrap().to_string(), "x - 8");
        assert!(IntPoly::from_i64(&[0, 0]).is_err());
    }

    #[test]
    fn divisibility() {
        let p = IntPoly::from_i64(&[-2, 0, 1]).unwrap();
        let q = IntPoly::from_i64(&[4, 0, -4, 0, 1]).unwrap(); // (x²−2)²
        assert!(p.divides(&q));
        assert!(!q.divides(&p));
        assert!(!IntPoly::from_i64(&[-3, 0, 1]).unwrap().divides(&q));
    }

    #[test]
    fn lll_finds_short_vector() {
        let mut b: Vec<Vec<BigInt>> = [[1, 1, 1], [-1, 0, 2], [3, 5, 6]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        lll_reduce(&mut b);
        let norms: Vec<i64> = b
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x * x).unwrap()).sum())
            .collect();
        assert!(norms[0] <= 3, "{b:?}");
    }

    #[test]
    fn recognizes_integer() {
        let r = recognize(&fixed("8.000000000000000000000000000000000000000000000000000000000000", 60), 4, 30).unwrap();
        assert_eq!(r.poly, IntPoly::from_i64(&[-8, 1]).unwrap());
    }

    #[test]
    fn recognizes_sixth_root_of_two() {
        let src = |d: u32| Ok(BigReal::from_i64(2, d).root(6));
        let r = recognize(&src, 6, 80).unwrap();
        assert_eq!(r.poly, IntPoly::from_i64(&[-2, 0, 0, 0, 0, 0, 1]).unwrap());
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn recognizes_landen_value() {
        let src = |d: u32| {
            let two = BigReal::from_i64(2, d);
            Ok(&BigReal::from_i64(3, d) - &(&two * &two.sqrt()))
        };
        let r = recognize(&src, 4, 60).unwrap();
        assert_eq!(r.poly, IntPoly::from_i64(&[1, -6, 1]).unwrap());
    }

    #[test]
    fn pi_is_not_algebraic_of_low_degree() {
        let src = |d: u32| Ok(BigReal::pi(d));
        assert!(matches!(recognize(&src, 4, 60), Err(Error::NotFound(_))));
    }

    #[test]
    fn rationals() {
        let half = BigReal::from_ratio(Rat::new(1, 2), 40);
        let big = BigInt::from(1_000_000);
        assert_eq!(recognize_rational(&half, 40, &big).unwrap(), BigRational::new(1.into(), 2.into()));
        let pi = BigReal::pi(60);
        assert!(recognize_rational(&pi, 60, &big).is_err());
        let bound = BigInt::from(1_000_000_000u64);
        for d in [20, 40, 80] {
            let r2 = BigReal::from_i64(2, d).sqrt();
            assert!(recognize_rational(&r2, d, &bound).is_err(), "digits {d}");
        }
    }
}
