//! High-precision evaluation: AGM, complete elliptic integrals, nome/modulus
//! conversion, and direct summation of theta, eta and theta-quotient values.

use num_traits::Zero;

use crate::bigreal::{BigReal, GUARD_DIGITS, MIN_DIGITS};
use crate::error::{Error, Result};
use crate::series::{PuiseuxSeries, Rat, ThetaSpec};

/// Residual tolerance `10^(-digits+10)` used for self-checks at `digits`.
pub fn tolerance_exp(digits: u32) -> i64 {
    -(digits as i64) + 10
}

/// Arithmetic-geometric mean and the number of iterations it took.
pub fn agm(a: &BigReal, b: &BigReal) -> (BigReal, usize) {
    let digits = a.min_digits(b);
    let stop = -((digits + GUARD_DIGITS) as i64);
    let half = BigReal::from_ratio(Rat::new(1, 2), digits);
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut iterations = 0;
    while iterations < 200 {
        let diff = (&a - &b).abs();
        if diff.is_zero() || (&diff / &a).abs_lt_pow10(stop) {
            break;
        }
        let next_a = &(&a + &b) * &half;
        b = (&a * &b).sqrt();
        a = next_a;
        iterations += 1;
    }
    (a, iterations)
}

fn check_unit_interval(x: &BigReal, what: &str) -> Result<()> {
    let one = BigReal::one(x.digits());
    if x.is_negative() || *x >= one {
        return Err(Error::domain(format!("{what} needs 0 <= x < 1, got {}", x.to_sci_string(12))));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind `K(x) = π / (2·AGM(1, √(1−x²)))`.
pub fn ellipk(x: &BigReal) -> Result<BigReal> {
    check_unit_interval(x, "ellipk")?;
    let d = x.digits();
    let one = BigReal::one(d);
    let kp = (&one - &(x * x)).sqrt();
    let (m, _) = agm(&one, &kp);
    Ok(&BigReal::pi(d) / &(&m * &BigReal::from_i64(2, d)))
}

/// `K(√(1−x²)) = π / (2·AGM(1, x))`, computed without forming `√(1−x²)`.
pub fn ellipk_complement(x: &BigReal) -> Result<BigReal> {
    if !x.is_positive() || *x > BigReal::one(x.digits()) {
        return Err(Error::domain(format!(
            "complementary integral needs 0 < x <= 1, got {}",
            x.to_sci_string(12)
        )));
    }
    let d = x.digits();
    let (m, _) = agm(&BigReal::one(d), x);
    Ok(&BigReal::pi(d) / &(&m * &BigReal::from_i64(2, d)))
}

/// Inverse of the singular modulus: `k_i(x) = (K(√(1−x²)) / K(x))²`.
pub fn inverse_modulus(x: &BigReal) -> Result<BigReal> {
    if !x.is_positive() {
        return Err(Error::domain(format!(
            "inverse_modulus needs 0 < x < 1, got {}",
            x.to_sci_string(12)
        )));
    }
    check_unit_interval(x, "inverse_modulus")?;
    let d = x.digits();
    let one = BigReal::one(d);
    let xp = (&one - &(x * x)).sqrt();
    let (m_x, _) = agm(&one, x);
    let (m_xp, _) = agm(&one, &xp);
    let ratio = &m_xp / &m_x;
    Ok(&ratio * &ratio)
}

/// A nome together with its modulus pair.
#[derive(Clone, Debug)]
pub struct EvalPoint {
    pub r: BigReal,
    /// Exact value of `r` when it was given as a rational.
    pub r_exact: Option<Rat>,
    pub q: BigReal,
    pub k: BigReal,
    pub kprime: BigReal,
}

impl EvalPoint {
    /// `ln q = -π√r`, handy for rational powers of the nome.
    pub fn ln_q(&self) -> BigReal {
        -&(&BigReal::pi(self.q.digits()) * &self.r.sqrt())
    }

    /// `q^e` for a rational exponent.
    pub fn q_pow(&self, e: Rat) -> BigReal {
        (&self.ln_q() * &BigReal::from_ratio(e, self.q.digits())).exp()
    }

    pub fn digits(&self) -> u32 {
        self.q.digits()
    }

    /// `k²`, the value of `m(q)`.
    pub fn m(&self) -> BigReal {
        &self.k * &self.k
    }

    pub fn label(&self) -> String {
        match self.r_exact {
            Some(r) => r.to_string(),
            None => self.r.to_decimal_string(12),
        }
    }
}

/// The nome `q = e^{-π√r}`.
pub fn nome(r: &BigReal) -> Result<BigReal> {
    if !r.is_positive() {
        return Err(Error::domain(format!("nome needs r > 0, got {}", r.to_sci_string(12))));
    }
    Ok((-&(&BigReal::pi(r.digits()) * &r.sqrt())).exp())
}

/// `(k, k')` from the nome through the theta quotients `k = θ₂²/θ₃²`, `k' = θ₄²/θ₃²`.
pub fn modulus_from_nome(q: &BigReal) -> Result<(BigReal, BigReal)> {
    check_open_unit(q)?;
    let d = q.digits();
    let one = BigReal::one(d);
    let two = BigReal::from_i64(2, d);
    let ln_q = q.ln();
    let stop = -((d + GUARD_DIGITS) as i64);
    // θ₂ = 2 q^{1/4} Σ_{n≥0} q^{n(n+1)}, θ₃ = 1 + 2Σ q^{n²}, θ₄ = 1 + 2Σ (-1)^n q^{n²}.
    let mut psi = BigReal::zero(d);
    for n in 0i64.. {
        let term = (&ln_q * &BigReal::from_i64(n * (n + 1), d)).exp();
        let small = term.abs_lt_pow10(stop);
        psi = &psi + &term;
        if small {
            break;
        }
    }
    let mut t3 = one.clone();
    let mut t4 = one.clone();
    for n in 1i64.. {
        let term = &(&ln_q * &BigReal::from_i64(n * n, d)).exp() * &two;
        let small = term.abs_lt_pow10(stop);
        t3 = &t3 + &term;
        t4 = if n % 2 == 0 { &t4 + &term } else { &t4 - &term };
        if small {
            break;
        }
    }
    let quarter = (&ln_q * &BigReal::from_ratio(Rat::new(1, 4), d)).exp();
    let t2 = &(&two * &quarter) * &psi;
    let t3sq = &t3 * &t3;
    Ok((&(&t2 * &t2) / &t3sq, &(&t4 * &t4) / &t3sq))
}

fn check_open_unit(q: &BigReal) -> Result<()> {
    if !q.is_positive() || *q >= BigReal::one(q.digits()) {
        return Err(Error::domain(format!("nome must satisfy 0 < q < 1, got {}", q.to_sci_string(12))));
    }
    Ok(())
}

/// The singular modulus `k_r` at a rational `r`, certified against the defining period ratio.
pub fn singular_modulus(r: Rat, digits: u32) -> Result<EvalPoint> {
    if r <= Rat::zero() {
        return Err(Error::domain(format!("singular_modulus needs r > 0, got {r}")));
    }
    let mut pt = singular_modulus_real(&BigReal::from_ratio(r, digits))?;
    pt.r_exact = Some(r);
    Ok(pt)
}

/// The singular modulus at a real `r > 0`.
pub fn singular_modulus_real(r: &BigReal) -> Result<EvalPoint> {
    let digits = r.digits();
    if digits < MIN_DIGITS {
        return Err(Error::domain(format!("precision must be at least {MIN_DIGITS} digits")));
    }
    let q = nome(r)?;
    let (k, kprime) = modulus_from_nome(&q)?;
    let pt = EvalPoint {
        r: r.clone(),
        r_exact: None,
        q,
        k,
        kprime,
    };
    certify(&pt)?;
    Ok(pt)
}

/// Checks `K(k')/K(k) = √r` and `k² + k'² = 1` at the point's precision.
fn certify(pt: &EvalPoint) -> Result<()> {
    let d = pt.digits();
    let tol = tolerance_exp(d);
    let one = BigReal::one(d);
    let pythag = &(&(&pt.k * &pt.k) + &(&pt.kprime * &pt.kprime)) - &one;
    if !pythag.abs_lt_pow10(tol) {
        return Err(Error::InternalConsistency(format!(
            "k² + k'² - 1 = {} at r = {}",
            pythag.to_sci_string(3),
            pt.label()
        )));
    }
    // K(k') / K(k) = AGM(1, k') / AGM(1, k)
    let (a_k, _) = agm(&one, &pt.k);
    let (a_kp, _) = agm(&one, &pt.kprime);
    let ratio = &a_kp / &a_k;
    let residual = &ratio - &pt.r.sqrt();
    let scaled = &residual / &pt.r.sqrt();
    if !scaled.abs_lt_pow10(tol) {
        return Err(Error::InternalConsistency(format!(
            "period ratio residual {} at r = {}",
            residual.to_sci_string(3),
            pt.label()
        )));
    }
    Ok(())
}

/// Number of terms needed on each side so that `a n² − |b| n` exceeds the
/// exponent at which `q^e` drops below `10^(−digits−guard)`.
fn theta_cutoff(a: f64, b: f64, q: &BigReal) -> i64 {
    let d = (q.digits() + GUARD_DIGITS) as f64;
    let limit = d / -q.log10_abs();
    let mut n = (b.abs() / (2.0 * a)).ceil() as i64;
    while a * (n * n) as f64 - b.abs() * n as f64 <= limit {
        n += 1;
    }
    n + 1
}

fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `Σ_{n∈ℤ} (±1)^n q^{a n² + b n}`; alternating when `alternating` is set.
pub fn theta_sum(a: Rat, b: Rat, q: &BigReal, digits: u32, alternating: bool) -> Result<BigReal> {
    if a <= Rat::zero() {
        return Err(Error::domain(format!("theta sum needs a > 0, got {a}")));
    }
    check_open_unit(q)?;
    let q = q.with_digits(digits.min(q.digits()));
    let d = q.digits();
    let ln_q = q.ln();
    let n0 = theta_cutoff(rat_f64(a), rat_f64(b), &q);
    let mut acc = BigReal::zero(d);
    for n in -n0..=n0 {
        let e = a * n * n + b * n;
        let term = (&ln_q * &BigReal::from_ratio(e, d)).exp();
        acc = if alternating && n.rem_euclid(2) == 1 { &acc - &term } else { &acc + &term };
    }
    Ok(acc)
}

/// `θ(a,b;q) = Σ (−1)^n q^{a n² + b n}`.
pub fn eval_theta(a: Rat, b: Rat, q: &BigReal, digits: u32) -> Result<BigReal> {
    theta_sum(a, b, q, digits, true)
}

/// `∏_{n≥1} (1 − q^{pn})` via the pentagonal number theorem.
pub fn eval_eta(p: Rat, q: &BigReal, digits: u32) -> Result<BigReal> {
    if p <= Rat::zero() {
        return Err(Error::domain(format!("eta scale must be positive, got {p}")));
    }
    check_open_unit(q)?;
    let q = q.with_digits(digits.min(q.digits()));
    let d = q.digits();
    let ln_qp = &q.ln() * &BigReal::from_ratio(p, d);
    let stop = -((d + GUARD_DIGITS) as i64);
    let mut acc = BigReal::one(d);
    for k in 1i64.. {
        let mut small = true;
        for j in [k, -k] {
            let e = j * (3 * j - 1) / 2;
            let term = (&ln_qp * &BigReal::from_i64(e, d)).exp();
            small &= term.abs_lt_pow10(stop);
            acc = if k % 2 == 1 { &acc - &term } else { &acc + &term };
        }
        if small {
            break;
        }
    }
    Ok(acc)
}

/// `A(a,p;q) = q^δ θ(p/2, p/2 − a; q) / η(q^p)`.
pub fn eval_a(spec: &ThetaSpec, q: &BigReal, digits: u32) -> Result<BigReal> {
    let (ta, tb) = spec.theta_params();
    let theta = eval_theta(ta, tb, q, digits)?;
    let eta = eval_eta(spec.p(), q, digits)?;
    let d = theta.digits();
    let pref = (&q.with_digits(d).ln() * &BigReal::from_ratio(spec.delta(), d)).exp();
    Ok(&(&pref * &theta) / &eta)
}

/// `h5(q) = η(q^{1/5}) / (q^{1/5} η(q⁵))`.
pub fn eval_h5(q: &BigReal, digits: u32) -> Result<BigReal> {
    let num = eval_eta(Rat::new(1, 5), q, digits)?;
    let den = eval_eta(Rat::from_integer(5), q, digits)?;
    let d = num.digits();
    let fifth = (&q.with_digits(d).ln() * &BigReal::from_ratio(Rat::new(1, 5), d)).exp();
    Ok(&num / &(&fifth * &den))
}

/// `eta5(q) = ½(−1 − h5 + √(5 + 2h5 + h5²))`.
pub fn eval_eta5(q: &BigReal, digits: u32) -> Result<BigReal> {
    let h = eval_h5(q, digits)?;
    let d = h.digits();
    let one = BigReal::one(d);
    let radicand = &(&(&h * &h) + &(&h * &BigReal::from_i64(2, d))) + &BigReal::from_i64(5, d);
    let twice = &(&radicand.sqrt() - &h) - &one;
    Ok(&twice / &BigReal::from_i64(2, d))
}

/// Value of a truncated series at a numeric nome.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: BigReal,
    /// Heuristic size of the dropped tail: largest retained coefficient times `q^bound`.
    pub tail_estimate: BigReal,
    /// Set when the tail estimate is not below the tolerance `10^(−digits+10)`.
    pub low_confidence: bool,
}

/// `Σ c·q^e` over the retained terms of `u`.
pub fn real_eval_series(u: &PuiseuxSeries, q: &BigReal, digits: u32) -> Result<SeriesValue> {
    check_open_unit(q)?;
    let q = q.with_digits(digits.min(q.digits()));
    let d = q.digits();
    let n = u.denom();
    let ln_step = &q.ln() * &BigReal::from_ratio(Rat::new(1, n), d);
    let step = ln_step.exp();
    let mut acc = BigReal::zero(d);
    let mut prev: Option<(i64, BigReal)> = None;
    let mut last_mag = BigReal::zero(d);
    for (k, c) in u.grid_terms() {
        let pw = match &prev {
            None => (&ln_step * &BigReal::from_i64(k, d)).exp(),
            Some((pk, pp)) => pp * &step.powi(k - pk),
        };
        let cv = BigReal::from_bigrational(c, d);
        acc = &acc + &(&cv * &pw);
        let mag = cv.abs();
        if mag > last_mag {
            last_mag = mag;
        }
        prev = Some((k, pw));
    }
    let tail = &last_mag * &(&ln_step * &BigReal::from_i64(u.hi(), d)).exp();
    let low = !tail.abs_lt_pow10(tolerance_exp(d));
    Ok(SeriesValue {
        value: acc,
        tail_estimate: tail,
        low_confidence: low,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{a_series, eta_series, modulus_series, theta_series};

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn close(x: &BigReal, y: &BigReal, exp10: i64) -> bool {
        (x - y).abs_lt_pow10(exp10)
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        let k = ellipk(&BigReal::zero(50)).unwrap();
        let half_pi = &BigReal::pi(50) / &BigReal::from_i64(2, 50);
        assert!(close(&k, &half_pi, -50));
    }

    #[test]
    fn k_at_inverse_sqrt2() {
        let x = BigReal::from_ratio(r(1, 2), 50).sqrt();
        let k = ellipk(&x).unwrap();
        let want = BigReal::parse_decimal("1.854074677301371918433850347195260046217598823521766905585928045056", 50).unwrap();
        assert!(close(&k, &want, -50));
    }

    #[test]
    fn k_is_increasing_and_rejects_domain() {
        let a = ellipk(&BigReal::parse_decimal("0.3", 30).unwrap()).unwrap();
        let b = ellipk(&BigReal::parse_decimal("0.6", 30).unwrap()).unwrap();
        assert!(a < b);
        assert!(ellipk(&BigReal::one(30)).is_err());
        assert!(ellipk(&BigReal::from_i64(-1, 30)).is_err());
    }

    #[test]
    fn singular_modulus_small_r() {
        let p1 = singular_modulus(r(1, 1), 50).unwrap();
        let inv_sqrt2 = BigReal::from_ratio(r(1, 2), 50).sqrt();
        assert!(close(&p1.k, &inv_sqrt2, -50));
        assert!(close(&p1.k, &p1.kprime, -50));

        let p4 = singular_modulus(r(4, 1), 50).unwrap();
        let two = BigReal::from_i64(2, 50);
        let want = &BigReal::from_i64(3, 50) - &(&two * &two.sqrt());
        assert!(close(&p4.k, &want, -50));
    }

    #[test]
    fn inverse_modulus_pairs() {
        let inv_sqrt2 = BigReal::from_ratio(r(1, 2), 50).sqrt();
        assert!(close(&inverse_modulus(&inv_sqrt2).unwrap(), &BigReal::one(50), -50));

        let p2 = singular_modulus(r(2, 1), 50).unwrap();
        assert!(close(&inverse_modulus(&p2.k).unwrap(), &BigReal::from_i64(2, 50), -48));

        let x = BigReal::parse_decimal("0.3", 50).unwrap();
        let rr = inverse_modulus(&x).unwrap();
        let back = singular_modulus_real(&rr).unwrap();
        assert!(close(&back.k, &x, -48));

        assert!(inverse_modulus(&BigReal::zero(30)).is_err());
    }

    #[test]
    fn theta_direct_value() {
        let q = nome(&BigReal::one(40)).unwrap();
        let v = eval_theta(r(2, 1), r(1, 1), &q, 40).unwrap();
        // Oracle: explicit summation over |n| ≤ 10.
        let ln_q = q.ln();
        let mut want = BigReal::zero(40);
        for n in -10i64..=10 {
            let t = (&ln_q * &BigReal::from_i64(2 * n * n + n, 40)).exp();
            want = if n % 2 == 0 { &want + &t } else { &want - &t };
        }
        assert!(close(&v, &want, -40));
        assert!((v.to_f64() - 0.956_705_388_731_092_3).abs() < 1e-15);
    }

    #[test]
    fn a14_at_r1_is_eighth_root_of_two() {
        let q = nome(&BigReal::one(50)).unwrap();
        let spec = ThetaSpec::from_ints(1, 4).unwrap();
        let v = eval_a(&spec, &q, 50).unwrap();
        let want = BigReal::from_i64(2, 50).root(8);
        assert!(close(&v, &want, -50));
    }

    #[test]
    fn eta_rescale_consistency() {
        let q = nome(&BigReal::from_i64(2, 40)).unwrap();
        let a = eval_eta(r(4, 1), &q, 40).unwrap();
        let b = eval_eta(r(1, 1), &q.powi(4), 40).unwrap();
        assert!(close(&a, &b, -40));
    }

    #[test]
    fn nome_domain_errors() {
        assert!(eval_theta(r(1, 1), r(0, 1), &BigReal::one(30), 30).is_err());
        assert!(eval_eta(r(1, 1), &BigReal::zero(30), 30).is_err());
        assert!(eval_theta(r(0, 1), r(0, 1), &BigReal::parse_decimal("0.5", 30).unwrap(), 30).is_err());
    }

    #[test]
    fn series_two_path_agreement() {
        for rv in [1, 2, 3] {
            let pt = singular_modulus(r(rv, 1), 40).unwrap();
            let order = r(200, 1);
            let cases: Vec<(PuiseuxSeries, BigReal)> = vec![
                (
                    theta_series(r(2, 1), r(1, 1), order).unwrap(),
                    eval_theta(r(2, 1), r(1, 1), &pt.q, 40).unwrap(),
                ),
                (eta_series(r(4, 1), order), eval_eta(r(4, 1), &pt.q, 40).unwrap()),
                (
                    a_series(&ThetaSpec::from_ints(1, 4).unwrap(), order).unwrap(),
                    eval_a(&ThetaSpec::from_ints(1, 4).unwrap(), &pt.q, 40).unwrap(),
                ),
                (modulus_series(order), pt.m()),
            ];
            for (s, direct) in cases {
                let v = real_eval_series(&s, &pt.q, 40).unwrap();
                assert!(!v.low_confidence);
                assert!(close(&v.value, &direct, tolerance_exp(40)), "r={rv} {s}");
            }
        }
    }

    #[test]
    fn series_eval_flags_short_truncation() {
        let q = nome(&BigReal::one(40)).unwrap();
        let s = modulus_series(r(5, 1));
        assert!(real_eval_series(&s, &q, 40).unwrap().low_confidence);
        let one = PuiseuxSeries::one(r(1000, 1));
        let v = real_eval_series(&one, &q, 40).unwrap();
        assert!(close(&v.value, &BigReal::one(40), -40));
        assert!(!v.low_confidence);
    }

    #[test]
    fn eta5_two_path() {
        let q = nome(&BigReal::one(40)).unwrap();
        let s = crate::series::eta5_series(r(60, 1));
        let v = real_eval_series(&s, &q, 40).unwrap();
        assert!(close(&v.value, &eval_eta5(&q, 40).unwrap(), -30));
    }

    #[test]
    fn agm_iterations_are_logarithmic() {
        for x in ["0.001", "0.3", "0.999999"] {
            let b = BigReal::parse_decimal(x, 200).unwrap();
            let (_, it) = agm(&BigReal::one(200), &b);
            assert!(it <= 2 * 8 + 10, "{x}: {it}");
        }
    }

    #[test]
    fn precision_doubling_agrees() {
        let lo = singular_modulus(r(3, 1), 40).unwrap();
        let hi = singular_modulus(r(3, 1), 80).unwrap();
        assert!(close(&lo.k, &hi.k.with_digits(40), -40));
    }
}
