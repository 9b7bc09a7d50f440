//! Hand-written evaluators for the closed-form identities: each returns the
//! two sides at one evaluation point.

use crate::bigreal::BigReal;
use crate::error::Result;
use crate::modular::{modular_eq2_a14, SingularChain};
use crate::numeric::{ellipk, eval_a, eval_eta, eval_theta, theta_sum, EvalPoint};
use crate::series::{Rat, ThetaSpec};

pub(crate) type Sides = (BigReal, BigReal);

fn int(n: i64, d: u32) -> BigReal {
    BigReal::from_i64(n, d)
}

fn frac(n: i64, m: i64) -> Rat {
    Rat::new(n, m)
}

/// `Σ q^{n² + 2sn} = q^{−s²} √(2K/π)`.
pub(crate) fn even_shift(s: i64, pt: &EvalPoint) -> Result<Sides> {
    let d = pt.digits();
    let lhs = theta_sum(Rat::from_integer(1), Rat::from_integer(2 * s), &pt.q, d, false)?;
    let k_int = ellipk(&pt.k)?;
    let root = (&(&int(2, d) * &k_int) / &BigReal::pi(d)).sqrt();
    Ok((lhs, &pt.q_pow(Rat::from_integer(-s * s)) * &root))
}

/// `Σ q^{n² + (2s+1)n}` against the moduli-chain closed form.
pub(crate) fn odd_shift(s: i64, pt: &EvalPoint) -> Result<Sides> {
    let d = pt.digits();
    let m = 2 * s + 1;
    let lhs = theta_sum(Rat::from_integer(1), Rat::from_integer(m), &pt.q, d, false)?;
    let c = SingularChain::new(&pt.k)?;
    let prod = &(&c.k11 * &c.k12) * &c.k21;
    let k_int = ellipk(&c.k11)?;
    let rhs = &(&(&int(2, d).pow_ratio(frac(5, 6)) * &pt.q_pow(frac(-m * m, 4)))
        * &(&prod.pow_ratio(frac(1, 6)) / &c.k22.pow_ratio(frac(1, 3))))
        * &(&k_int / &BigReal::pi(d)).sqrt();
    Ok((lhs, rhs))
}

/// `η(q)⁸` against `2^{8/3} π⁻⁴ q^{−1/3} k^{2/3} k'^{8/3} K⁴`.
pub(crate) fn eta8(pt: &EvalPoint) -> Result<Sides> {
    let d = pt.digits();
    let lhs = eval_eta(Rat::from_integer(1), &pt.q, d)?.powi(8);
    let k_int = ellipk(&pt.k)?;
    let rhs = &(&(&int(2, d).pow_ratio(frac(8, 3)) / &BigReal::pi(d).powi(4)) * &pt.q_pow(frac(-1, 3)))
        * &(&(&pt.k.pow_ratio(frac(2, 3)) * &pt.kprime.pow_ratio(frac(8, 3))) * &k_int.powi(4));
    Ok((lhs, rhs))
}

fn a14(pt: &EvalPoint) -> Result<BigReal> {
    eval_a(&ThetaSpec::from_ints(1, 4)?, &pt.q, pt.digits())
}

/// `16(1 − k²)^e / k²` with `e = 1` (printed) or `e = 2` (corrected).
fn a14_power24_rhs(pt: &EvalPoint, e: i64) -> BigReal {
    let d = pt.digits();
    let m = pt.m();
    &(&int(16, d) * &(&int(1, d) - &m).powi(e)) / &m
}

pub(crate) fn a14_pow24(e: i64, pt: &EvalPoint) -> Result<Sides> {
    Ok((a14(pt)?.powi(24), a14_power24_rhs(pt, e)))
}

pub(crate) fn a14_root(e: i64, pt: &EvalPoint) -> Result<Sides> {
    Ok((a14(pt)?, a14_power24_rhs(pt, e).root(24)))
}

/// `θ(2,1;q)` against `q^{1/24} η(q⁴) (4(1−k²)/k)^{1/12}`.
pub(crate) fn theta_2_1(pt: &EvalPoint) -> Result<Sides> {
    let d = pt.digits();
    let lhs = eval_theta(Rat::from_integer(2), Rat::from_integer(1), &pt.q, d)?;
    let inner = &(&int(4, d) * &(&int(1, d) - &pt.m())) / &pt.k;
    let rhs = &(&pt.q_pow(frac(1, 24)) * &eval_eta(Rat::from_integer(4), &pt.q, d)?) * &inner.root(12);
    Ok((lhs, rhs))
}

/// `A(1/2,2;q)` against `(4(1−k)⁴ / (k(1+k)²))^{1/24}`.
pub(crate) fn a_half_two(pt: &EvalPoint) -> Result<Sides> {
    let d = pt.digits();
    let lhs = eval_a(&ThetaSpec::new(frac(1, 2), Rat::from_integer(2))?, &pt.q, d)?;
    let one = int(1, d);
    let inner = &(&int(4, d) * &(&one - &pt.k).powi(4)) / &(&pt.k * &(&one + &pt.k).powi(2));
    Ok((lhs, inner.root(24)))
}

/// `θ(2,3/2;q)` against its 48th-root closed form.
pub(crate) fn theta_2_3half(pt: &EvalPoint) -> Result<Sides> {
    let d = pt.digits();
    let k = &pt.k;
    let one = int(1, d);
    let lhs = eval_theta(Rat::from_integer(2), frac(3, 2), &pt.q, d)?;
    let one_k = &one + k;
    let w = &(&int(2, d) + k) - &(&int(2, d) * &one_k.sqrt());
    let num = &(&int(4, d) * &(&one - k).powi(4)) * &w.powi(12);
    let den = &k.powi(13) * &one_k.powi(2);
    let rhs = &(&pt.q_pow(frac(-11, 96)) * &eval_eta(Rat::from_integer(4), &pt.q, d)?) * &(&num / &den).root(48);
    Ok((lhs, rhs))
}

/// `16u⁸ + u¹⁶v⁸ − v¹⁶` at `u = A(1,4;q)`, `v = A(1,4;q²)`; the right side is 0.
pub(crate) fn modular_eq2(pt: &EvalPoint) -> Result<Sides> {
    let d = pt.digits();
    let spec = ThetaSpec::from_ints(1, 4)?;
    let u = eval_a(&spec, &pt.q, d)?;
    let v = eval_a(&spec, &pt.q.powi(2), d)?;
    Ok((modular_eq2_a14(&u, &v), BigReal::zero(d)))
}

/// Residual of `(5M − 1)⁵(1 − M) − 256·m(1−m)·M` for a multiplier value `M`.
pub(crate) fn multiplier_residual(mult: &BigReal, pt: &EvalPoint) -> BigReal {
    let d = pt.digits();
    let one = int(1, d);
    let m = pt.m();
    let lhs = &(&(&int(5, d) * mult) - &one).powi(5) * &(&one - mult);
    let rhs = &(&(&int(256, d) * &m) * &(&one - &m)) * mult;
    (&lhs - &rhs).abs()
}

/// `θ3(q)` as the plain sum `Σ q^{n²}`.
pub(crate) fn theta3(q: &BigReal, d: u32) -> Result<BigReal> {
    theta_sum(Rat::from_integer(1), Rat::from_integer(0), q, d, false)
}
