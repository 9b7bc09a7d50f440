//! Degree-n modulus maps, the Landen step, and the degree-2 modular equation
//! of `A(1,4;q)`.

use crate::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::numeric::{inverse_modulus, singular_modulus_real};

fn check_unit_interval(x: &BigReal, what: &str) -> Result<()> {
    if !x.is_positive() || x >= &BigReal::one(x.digits()) {
        return Err(Error::domain(format!("{what} needs 0 < x < 1, got {}", x.to_sci_string(6))));
    }
    Ok(())
}

/// `S_n(x) = k` at `r = n²·k_i(x)`.
pub fn s_n(x: &BigReal, n: u32, digits: u32) -> Result<BigReal> {
    if n == 0 {
        return Err(Error::domain("S_n needs n >= 1"));
    }
    let x = x.with_digits(digits);
    check_unit_interval(&x, "S_n")?;
    let r = inverse_modulus(&x)?;
    let n2 = BigReal::from_i64((n as i64) * (n as i64), digits);
    Ok(singular_modulus_real(&(&n2 * &r))?.k)
}

/// `(1 − k')/(1 + k')` with `k' = √(1 − k²)`: the modulus at `4r` from the one at `r`.
pub fn landen_k4(k: &BigReal) -> Result<BigReal> {
    check_unit_interval(k, "landen_k4")?;
    let one = BigReal::one(k.digits());
    let kp = (&one - &(k * k)).sqrt();
    // 1 − k' loses digits for small k; k²/(1 + k') is the same number.
    let num = &(k * k) / &(&one + &kp);
    Ok(&num / &(&one + &kp))
}

/// Positive root `v` of `16u⁸ + u¹⁶v⁸ − v¹⁶ = 0`, i.e. `A(1,4;q²)` from `A(1,4;q)`.
pub fn p2_a14(w: &BigReal) -> Result<BigReal> {
    if !w.is_positive() {
        return Err(Error::domain("p2_a14 needs w > 0"));
    }
    let d = w.digits();
    let w4 = w.powi(4);
    let w16 = w4.powi(4);
    let inner = (&BigReal::from_i64(64, d) + &w4.powi(6)).sqrt();
    let s = &w16 + &(&w4 * &inner);
    Ok(&s.root(8) / &BigReal::from_i64(2, d).root(8))
}

/// `16u⁸ + u¹⁶v⁸ − v¹⁶`.
pub fn modular_eq2_a14(u: &BigReal, v: &BigReal) -> BigReal {
    let u8 = u.powi(8);
    let v8 = v.powi(8);
    let sixteen = BigReal::from_i64(16, u.min_digits(v));
    &(&(&sixteen * &u8) + &(&(&u8 * &u8) * &v8)) - &(&v8 * &v8)
}

/// `(4(1 − x²)/x)^{1/12}`, the algebraic function giving `A(1,4;q)` from `k`.
pub fn q_a14(x: &BigReal) -> BigReal {
    let one = BigReal::one(x.digits());
    let four = BigReal::from_i64(4, x.digits());
    (&(&four * &(&one - &(x * x))) / x).root(12)
}

/// `|Q(S₂(x)) − P₂(Q(x))|`, with `Q` as in [`q_a14`].
pub fn check_theorem3_instance(x: &BigReal, digits: u32) -> Result<BigReal> {
    let x = x.with_digits(digits);
    check_unit_interval(&x, "theorem 3 instance")?;
    let lhs = q_a14(&s_n(&x, 2, digits)?);
    let rhs = p2_a14(&q_a14(&x))?;
    Ok((&lhs - &rhs).abs())
}

/// The moduli chain behind the odd-shift theta sum.
#[derive(Clone, Debug)]
pub struct SingularChain {
    pub k11: BigReal,
    pub k12: BigReal,
    pub k21: BigReal,
    pub k22: BigReal,
}

impl SingularChain {
    pub fn new(k: &BigReal) -> Result<Self> {
        check_unit_interval(k, "singular chain")?;
        let one = BigReal::one(k.digits());
        let two = BigReal::from_i64(2, k.digits());
        let k2 = k * k;
        let k12 = (&one - &k2).sqrt();
        let k21 = &(&(&two - &k2) - &(&two * &k12)) / &k2;
        let k22 = (&one - &(&k21 * &k21)).sqrt();
        Ok(SingularChain {
            k11: k.clone(),
            k12,
            k21,
            k22,
        })
    }
}
