//! Constructors for the q-series used throughout the workbench: the eta
//! product, bilateral theta sums, theta quotients `A(a,p;q)`, the squared
//! elliptic modulus `m(q)`, and the quintic auxiliaries `h5` / `eta5`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ceil_to_grid, PuiseuxSeries, Rat};
use crate::error::{Error, Result};

/// Parameters `(a, p)` of a theta quotient together with its prefactor exponent
/// `delta = p/12 - a/2 + a²/(2p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ThetaSpecRaw", into = "ThetaSpecRaw")]
pub struct ThetaSpec {
    a: Rat,
    p: Rat,
    delta: Rat,
}

impl ThetaSpec {
    pub fn new(a: Rat, p: Rat) -> Result<Self> {
        if p <= Rat::zero() {
            return Err(Error::domain(format!("theta quotient needs p > 0, got {p}")));
        }
        Ok(ThetaSpec {
            a,
            p,
            delta: Self::prefactor_exponent(a, p),
        })
    }

    pub fn from_ints(a: i64, p: i64) -> Result<Self> {
        Self::new(Rat::from_integer(a), Rat::from_integer(p))
    }

    pub fn prefactor_exponent(a: Rat, p: Rat) -> Rat {
        p / 12 - a / 2 + a * a / (p * 2)
    }

    pub fn a(&self) -> Rat {
        self.a
    }

    pub fn p(&self) -> Rat {
        self.p
    }

    pub fn delta(&self) -> Rat {
        self.delta
    }

    /// Exponent of the leading term of `A(a,p;q)`.
    pub fn leading_exponent(&self) -> Rat {
        let (ta, tb) = self.theta_params();
        self.delta + theta_min_exponent(ta, tb)
    }

    /// Theta parameters `(p/2, p/2 - a)` of the numerator sum.
    pub fn theta_params(&self) -> (Rat, Rat) {
        let half = self.p / 2;
        (half, half - self.a)
    }
}

#[derive(Serialize, Deserialize)]
struct ThetaSpecRaw {
    a: String,
    p: String,
}

impl TryFrom<ThetaSpecRaw> for ThetaSpec {
    type Error = Error;
    fn try_from(raw: ThetaSpecRaw) -> Result<Self> {
        ThetaSpec::new(parse_rat(&raw.a)?, parse_rat(&raw.p)?)
    }
}

impl From<ThetaSpec> for ThetaSpecRaw {
    fn from(s: ThetaSpec) -> Self {
        ThetaSpecRaw {
            a: s.a.to_string(),
            p: s.p.to_string(),
        }
    }
}

/// Parses `"n"`, `"n/d"` or a terminating decimal such as `"0.5"` into a small rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let r = crate::bigreal::parse_decimal_exact(s)?;
    let conv = |b: &BigInt| -> Result<i64> {
        i64::try_from(b).map_err(|_| Error::Parse(format!("rational `{s}` out of range")))
    };
    Ok(Rat::new(conv(r.numer())?, conv(r.denom())?))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `∏_{n≥1} (1 - q^{n·scale})`, known below `q^order`, via the pentagonal number theorem.
pub fn eta_series(scale: Rat, order: Rat) -> PuiseuxSeries {
    assert!(scale > Rat::zero(), "eta scale must be positive");
    let denom = *scale.denom();
    let step = *scale.numer();
    let hi = ceil_to_grid(order, denom);
    let mut terms = Vec::new();
    for k in 0i64.. {
        let mut any = false;
        for j in [k, -k] {
            let e = step * (j * (3 * j - 1) / 2);
            if e < hi {
                any = true;
                let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
                terms.push((e, int(sign)));
            }
            if k == 0 {
                break;
            }
        }
        if !any {
            break;
        }
    }
    PuiseuxSeries::from_terms(denom, terms, hi)
}

/// Bilateral sum `Σ_{n∈ℤ} (-1)^n q^{a n² + b n}` with every term below `q^order`.
pub fn theta_series(a: Rat, b: Rat, order: Rat) -> Result<PuiseuxSeries> {
    if a <= Rat::zero() {
        return Err(Error::domain(format!("theta_series needs a > 0, got a = {a}")));
    }
    let denom = a.denom().lcm(b.denom()).lcm(order.denom());
    let hi = ceil_to_grid(order, denom);
    let ai = (a * denom).to_integer();
    let bi = (b * denom).to_integer();
    let expo = |n: i64| ai * n * n + bi * n;
    // The exponent is a parabola with vertex at -b/(2a).
    let vertex = (-b / (a * 2)).round().to_integer();
    let mut terms = Vec::new();
    let mut push = |n: i64| {
        let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
        terms.push((expo(n), int(sign)));
    };
    let mut n = vertex;
    while expo(n) < hi || n <= vertex {
        if expo(n) < hi {
            push(n);
        }
        n += 1;
    }
    let mut n = vertex - 1;
    while expo(n) < hi || n >= vertex {
        if expo(n) < hi {
            push(n);
        }
        n -= 1;
    }
    Ok(PuiseuxSeries::from_terms(denom, terms, hi))
}

/// Smallest value of `a n² + b n` over the integers.
fn theta_min_exponent(a: Rat, b: Rat) -> Rat {
    let v = (-b / (a * 2)).floor().to_integer();
    [v - 1, v, v + 1, v + 2]
        .into_iter()
        .map(|n| a * n * n + b * n)
        .min()
        .expect("nonempty")
}

/// `A(a,p;q) = q^δ · η(q^p)^{-1} · θ(p/2, p/2 - a; q)`, known below `q^order`.
pub fn a_series(spec: &ThetaSpec, order: Rat) -> Result<PuiseuxSeries> {
    let (ta, tb) = spec.theta_params();
    let inner = order - spec.delta();
    let vtheta = theta_min_exponent(ta, tb);
    let theta = theta_series(ta, tb, inner)?;
    let eta = eta_series(spec.p(), inner - vtheta);
    let quotient = theta.mul(&eta.invert_unit()?);
    Ok(quotient.shift(spec.delta()).truncate(order))
}

/// Product form `q^δ ∏_{n≥0} (1 - q^{np+a})(1 - q^{np+p-a})`, known below `q^order`.
///
/// Finitely many factors may carry non-positive exponents; those are applied
/// as exact Laurent binomials. A factor `1 - q^0` makes the product vanish and
/// is rejected.
pub fn a_product_series(spec: &ThetaSpec, order: Rat) -> Result<PuiseuxSeries> {
    let (a, p) = (spec.a(), spec.p());
    let mut negative: Vec<Rat> = Vec::new();
    for start in [a, p - a] {
        let mut e = start;
        while e <= Rat::zero() {
            if e.is_zero() {
                return Err(Error::domain(format!(
                    "product form of A({a},{p}) contains the factor 1 - q^0"
                )));
            }
            negative.push(e);
            e += p;
        }
    }
    let neg_sum: Rat = negative.iter().copied().sum();
    let work = order - spec.delta() - neg_sum;

    let denom = a.denom().lcm(p.denom()).lcm(work.denom());
    let hi = ceil_to_grid(work, denom).max(0);
    let mut dense = vec![BigInt::zero(); hi as usize];
    if hi > 0 {
        dense[0] = BigInt::one();
    }
    for start in [a, p - a] {
        let mut e = start;
        while e <= Rat::zero() {
            e += p;
        }
        loop {
            let k = (e * denom).to_integer();
            if k >= hi {
                break;
            }
            for idx in (k as usize..hi as usize).rev() {
                let prev = dense[idx - k as usize].clone();
                dense[idx] -= prev;
            }
            e += p;
        }
    }
    let mut out = PuiseuxSeries::from_terms(
        denom,
        dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64, BigRational::from_integer(c))),
        hi,
    );
    for e in negative {
        let far = out.bound() - e + Rat::one();
        let binomial = PuiseuxSeries::one(far).sub(&PuiseuxSeries::monomial(int(1), e, far));
        out = out.mul(&binomial);
    }
    Ok(out.shift(spec.delta()).truncate(order))
}

/// Squared elliptic modulus `m(q) = k²` as an exact q-series, from the theta quotient
/// `16 q (Σ_{n≥0} q^{n²+n})⁴ / (Σ_{n∈ℤ} q^{n²})⁴`.
pub fn modulus_series(order: Rat) -> PuiseuxSeries {
    let psi = half_theta2(order);
    let theta3 = theta3_series(order);
    let ratio = psi
        .pow(4)
        .expect("positive power")
        .mul(&theta3.pow(-4).expect("theta3 is a unit"));
    ratio.mul_monomial(&int(16), Rat::one()).truncate(order)
}

/// `Σ_{n≥0} q^{n(n+1)}` below `q^order`.
fn half_theta2(order: Rat) -> PuiseuxSeries {
    let hi = ceil_to_grid(order, 1);
    let terms = (0i64..)
        .map(|n| n * (n + 1))
        .take_while(|&e| e < hi)
        .map(|e| (e, int(1)));
    PuiseuxSeries::from_terms(1, terms.collect::<Vec<_>>(), hi)
}

/// `Σ_{n∈ℤ} q^{n²}` below `q^order`.
fn theta3_series(order: Rat) -> PuiseuxSeries {
    let hi = ceil_to_grid(order, 1);
    let mut terms = vec![(0, int(1))];
    for n in 1i64.. {
        if n * n >= hi {
            break;
        }
        terms.push((n * n, int(2)));
    }
    PuiseuxSeries::from_terms(1, terms, hi)
}

/// The modulus `k = √m(q)` through the exponential expansion
/// `4 q^{1/2} exp(-4 Σ_{n≥1} q^n Σ_{d|n} (-1)^{d+n/d} / d)`.
pub fn modulus_root_exp_form(order: Rat) -> PuiseuxSeries {
    let half = Rat::new(1, 2);
    let inner_bound = order - half;
    let hi = ceil_to_grid(inner_bound, 1);
    let mut terms = Vec::new();
    for n in 1..hi.max(1) {
        let mut s = BigRational::zero();
        for d in 1..=n {
            if n % d == 0 {
                let sign = if (d + n / d) % 2 == 0 { 1 } else { -1 };
                s += BigRational::new(BigInt::from(sign), BigInt::from(d));
            }
        }
        terms.push((n, s * int(-4)));
    }
    let exponent = PuiseuxSeries::from_terms(1, terms, hi);
    exponent
        .exp_series()
        .expect("positive valuation")
        .mul_monomial(&int(4), half)
        .truncate(order)
}

/// `h5(q) = η(q^{1/5}) / (q^{1/5} η(q^5))`, known below `q^order`.
pub fn h5_series(order: Rat) -> PuiseuxSeries {
    let fifth = Rat::new(1, 5);
    let work = order + fifth;
    let num = eta_series(fifth, work);
    let den = eta_series(Rat::from_integer(5), work);
    num.mul(&den.invert_unit().expect("eta is a unit"))
        .shift(-fifth)
        .truncate(order)
}

/// `eta5 = ½(-1 - h5 + √(5 + 2h5 + h5²))`, known below `q^order`.
///
/// The radicand has leading term `q^{-2/5}` with coefficient 1, so the square
/// root is taken after factoring out that monomial.
pub fn eta5_series(order: Rat) -> PuiseuxSeries {
    let h = h5_series(order);
    let radicand = h
        .mul(&h)
        .add(&h.scale(&int(2)))
        .add_scalar(&int(5));
    let root = radicand.sqrt_series().expect("leading coefficient is 1");
    root.sub(&h)
        .add_scalar(&int(-1))
        .scale(&BigRational::new(1.into(), 2.into()))
        .truncate(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn ints(s: &PuiseuxSeries, upto: i64) -> Vec<i64> {
        (0..upto)
            .map(|e| {
                let c = s.coeff(r(e, 1)).expect("within bound");
                i64::try_from(c.to_integer()).unwrap()
            })
            .collect()
    }

    /// Direct expansion of `∏_{n≥1}(1 - q^n)` by repeated binomial multiplication.
    fn eta_by_product(n_terms: usize) -> Vec<i64> {
        let mut c = vec![0i64; n_terms];
        c[0] = 1;
        for k in 1..n_terms {
            for i in (k..n_terms).rev() {
                c[i] -= c[i - k];
            }
        }
        c
    }

    #[test]
    fn eta_matches_direct_product() {
        let s = eta_series(r(1, 1), r(60, 1));
        assert_eq!(ints(&s, 60), eta_by_product(60));
        assert_eq!(&ints(&s, 13), &[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn eta_scale_is_a_rescale() {
        let direct = eta_series(r(4, 1), r(120, 1));
        let rescaled = eta_series(r(1, 1), r(30, 1)).rescale(r(4, 1));
        assert_eq!(direct, rescaled);
        assert_eq!(direct.coeff(r(4, 1)), Some(int(-1)));
        assert_eq!(direct.coeff(r(8, 1)), Some(int(-1)));
        assert_eq!(direct.coeff(r(20, 1)), Some(int(1)));
    }

    #[test]
    fn eta_below_first_factor_is_one() {
        let s = eta_series(r(5, 1), r(3, 1));
        assert_eq!(s.num_terms(), 1);
        assert_eq!(s.coeff(r(0, 1)), Some(int(1)));
    }

    #[test]
    fn inverse_eta4_leading_terms() {
        // Long division oracle: 1/∏(1 - x^n) is the partition generating function.
        let inv = eta_series(r(4, 1), r(40, 1)).invert_unit().unwrap();
        let partitions = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30];
        for (i, p) in partitions.iter().enumerate() {
            assert_eq!(inv.coeff(r(4 * i as i64, 1)), Some(int(*p)));
            assert_eq!(inv.coeff(r(4 * i as i64 + 1, 1)), Some(int(0)));
        }
    }

    #[test]
    fn theta_2_1_direct_sum() {
        let s = theta_series(r(2, 1), r(1, 1), r(40, 1)).unwrap();
        // Oracle: brute-force summation over |n| ≤ 10.
        let mut want = vec![0i64; 40];
        for n in -10i64..=10 {
            let e = 2 * n * n + n;
            if e < 40 {
                want[e as usize] += if n % 2 == 0 { 1 } else { -1 };
            }
        }
        assert_eq!(ints(&s, 40), want);
        assert_eq!(&ints(&s, 11)[..], &[1, -1, 0, -1, 0, 0, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn theta_with_negative_exponents() {
        let s = theta_series(r(3, 1), r(-5, 1), r(20, 1)).unwrap();
        assert_eq!(s.valuation(), Some(r(-2, 1)));
        assert_eq!(s.coeff(r(-2, 1)), Some(int(-1)));
    }

    #[test]
    fn theta_rejects_nonpositive_a() {
        assert!(theta_series(r(0, 1), r(1, 1), r(10, 1)).is_err());
        assert!(theta_series(r(-1, 1), r(1, 1), r(10, 1)).is_err());
    }

    #[test]
    fn theta_rescale_family() {
        let a = theta_series(r(2, 1), r(1, 1), r(60, 1)).unwrap().rescale(r(1, 2));
        let b = theta_series(r(1, 1), r(1, 2), r(30, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn a14_leading_term_and_product() {
        let spec = ThetaSpec::from_ints(1, 4).unwrap();
        assert_eq!(spec.delta(), r(-1, 24));
        let s = a_series(&spec, r(60, 1)).unwrap();
        assert_eq!(s.valuation(), Some(r(-1, 24)));
        assert_eq!(s.coeff(r(-1, 24)), Some(int(1)));
        // (1-q)(1-q^3)(1-q^5)… expanded independently.
        let mut want = vec![0i64; 60];
        want[0] = 1;
        for k in (1..60).step_by(2) {
            for i in (k..60).rev() {
                want[i] -= want[i - k];
            }
        }
        for (i, w) in want.iter().enumerate() {
            assert_eq!(s.coeff(r(i as i64, 1) - r(1, 24)), Some(int(*w)), "q^{i}");
        }
    }

    #[test]
    fn a86_leading_exponent() {
        let spec = ThetaSpec::from_ints(8, 6).unwrap();
        assert_eq!(spec.delta(), r(11, 6));
        let s = a_series(&spec, r(30, 1)).unwrap();
        assert_eq!(s.valuation(), Some(r(-1, 6)));
    }

    #[test]
    fn a_half_four_grid() {
        let spec = ThetaSpec::new(r(1, 2), r(4, 1)).unwrap();
        assert_eq!(spec.delta(), r(11, 96));
        let s = a_series(&spec, r(30, 1)).unwrap();
        assert_eq!(96 % s.denom(), 0);
    }

    #[test]
    fn product_form_matches_theta_eta_form() {
        for (a, p) in [(r(1, 1), r(4, 1)), (r(-1, 1), r(6, 1)), (r(1, 2), r(2, 1)), (r(8, 1), r(6, 1))] {
            let spec = ThetaSpec::new(a, p).unwrap();
            let x = a_series(&spec, r(50, 1)).unwrap();
            let y = a_product_series(&spec, r(50, 1)).unwrap();
            assert_eq!(x, y, "A({a},{p})");
        }
    }

    #[test]
    fn modulus_leading_coefficients() {
        let m = modulus_series(r(8, 1));
        let want = [0, 16, -128, 704, -3072, 11488, -38400, 117632];
        assert_eq!(ints(&m, 8), want);
    }

    #[test]
    fn modulus_root_forms_agree() {
        let m = modulus_series(r(40, 1));
        let root = m.sqrt_series().unwrap();
        assert_eq!(root.valuation(), Some(r(1, 2)));
        assert_eq!(root.coeff(r(1, 2)), Some(int(4)));
        assert!(root.agrees_with(&modulus_root_exp_form(r(40, 1))));
    }

    #[test]
    fn h5_and_eta5() {
        let h = h5_series(r(10, 1));
        assert_eq!(h.valuation(), Some(r(-1, 5)));
        assert_eq!(h.coeff(r(-1, 5)), Some(int(1)));
        let e = eta5_series(r(10, 1));
        assert_eq!(e.valuation(), Some(r(1, 5)));
        // Quadratic-root contract: e² + (1+h)e - 1 = 0.
        let one_h = h.add_scalar(&int(1));
        let lhs = e.mul(&e).add(&one_h.mul(&e)).add_scalar(&int(-1));
        assert!(lhs.is_zero());
        assert!(lhs.bound() >= r(9, 1), "{} {} {}", h.bound(), e.bound(), lhs.bound());
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rat("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rat("-3").unwrap(), r(-3, 1));
        assert_eq!(parse_rat("0.25").unwrap(), r(1, 4));
        assert!(parse_rat("x").is_err());
    }
}
