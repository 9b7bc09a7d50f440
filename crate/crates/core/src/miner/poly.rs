use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::series::PuiseuxSeries;

/// Integer polynomial `P(u, v) = Σ c_ij u^i v^j` in normalized form: no zero
/// terms, content 1, and the term with the smallest `(i, j)` positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BivarIntPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivarIntPoly {
    /// Builds and normalizes. Duplicate monomials are summed.
    pub fn new(terms: impl IntoIterator<Item = (u32, u32, BigInt)>) -> Result<Self> {
        let mut map: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for (i, j, c) in terms {
            *map.entry((i, j)).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(Error::domain("the zero polynomial is not a relation"));
        }
        let content = map.values().fold(BigInt::zero(), |g, c| g.gcd(c));
        let first_negative = map.values().next().is_some_and(|c| c.is_negative());
        for c in map.values_mut() {
            *c /= &content;
            if first_negative {
                *c = -&*c;
            }
        }
        Ok(BivarIntPoly { terms: map })
    }

    pub fn from_i64(terms: &[(u32, u32, i64)]) -> Result<Self> {
        Self::new(terms.iter().map(|&(i, j, c)| (i, j, BigInt::from(c))))
    }

    /// Terms in increasing `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> + '_ {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn degree_u(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_v(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Ordering key used to pick among kernel vectors.
    pub(crate) fn selection_key(&self) -> (u32, usize, Vec<(u32, u32, BigInt)>) {
        (
            self.total_degree(),
            self.num_terms(),
            self.terms().map(|(i, j, c)| (i, j, c.clone())).collect(),
        )
    }

    /// `P(c·u, v)` renormalized; used to relate relations for rescaled inputs.
    pub fn substitute_scaled_u(&self, c: &BigRational) -> Result<Self> {
        let scaled: Vec<(u32, u32, BigRational)> = self
            .terms()
            .map(|(i, j, k)| (i, j, BigRational::from_integer(k.clone()) * pow_rat(c, i)))
            .collect();
        let den = scaled
            .iter()
            .fold(BigInt::one(), |l, (_, _, x)| l.lcm(x.denom()));
        Self::new(
            scaled
                .into_iter()
                .map(|(i, j, x)| (i, j, (x * BigRational::from_integer(den.clone())).to_integer())),
        )
    }

    pub fn eval_real(&self, u: &BigReal, v: &BigReal) -> BigReal {
        let d = u.min_digits(v);
        let mut acc = BigReal::zero(d);
        for (i, j, c) in self.terms() {
            let t = &(&BigReal::from_bigint(c, d) * &u.powi(i as i64)) * &v.powi(j as i64);
            acc = &acc + &t;
        }
        acc
    }

    /// `P(u, v)` as a series, reusing powers of `u` and `v`.
    pub fn eval_series(&self, u: &PuiseuxSeries, v: &PuiseuxSeries) -> PuiseuxSeries {
        let upow = powers(u, self.degree_u());
        let vpow = powers(v, self.degree_v());
        let mut acc: Option<PuiseuxSeries> = None;
        let mut constant = BigInt::zero();
        for (i, j, c) in self.terms() {
            let Some(t) = monomial(&upow, &vpow, i, j) else {
                constant = c.clone();
                continue;
            };
            let t = t.scale(&BigRational::from_integer(c.clone()));
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t),
            });
        }
        match acc {
            Some(a) => a.add_scalar(&BigRational::from_integer(constant)),
            None => PuiseuxSeries::constant(BigRational::from_integer(constant), u.bound().max(v.bound())),
        }
    }

    pub fn to_json(&self) -> Vec<(u32, u32, String)> {
        self.terms().map(|(i, j, c)| (i, j, c.to_string())).collect()
    }

    pub fn from_json(terms: &[(u32, u32, String)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(i, j, c)| {
                c.parse::<BigInt>()
                    .map(|c| (*i, *j, c))
                    .map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }
}

fn pow_rat(c: &BigRational, e: u32) -> BigRational {
    num_traits::pow(c.clone(), e as usize)
}

/// `[x, x², …, x^n]` with index `k` holding `x^k`; index 0 is unused.
pub(crate) fn powers(x: &PuiseuxSeries, n: u32) -> Vec<PuiseuxSeries> {
    let mut out = vec![PuiseuxSeries::zero(x.bound())];
    for k in 1..=n as usize {
        let next = if k == 1 { x.clone() } else { out[k - 1].mul(x) };
        out.push(next);
    }
    out
}

/// `u^i v^j` from precomputed powers; `None` for the constant monomial.
pub(crate) fn monomial(
    upow: &[PuiseuxSeries],
    vpow: &[PuiseuxSeries],
    i: u32,
    j: u32,
) -> Option<PuiseuxSeries> {
    match (i, j) {
        (0, 0) => None,
        (i, 0) => Some(upow[i as usize].clone()),
        (0, j) => Some(vpow[j as usize].clone()),
        (i, j) => Some(upow[i as usize].mul(&vpow[j as usize])),
    }
}

impl fmt::Display for BivarIntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<_> = self.terms.iter().collect();
        keys.sort_by(|a, b| b.0.cmp(a.0));
        for (n, (&(i, j), c)) in keys.into_iter().enumerate() {
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (i, 0) => var("u", i),
                (0, j) => var("v", j),
                (i, j) => format!("{}*{}", var("u", i), var("v", j)),
            };
            let mag = c.abs();
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            match (n, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn var(name: &str, e: u32) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Rat;

    #[test]
    fn normalization() {
        let p = BivarIntPoly::from_i64(&[(2, 1, -2), (0, 1, -32), (0, 0, 32), (1, 1, 0)]).unwrap();
        assert_eq!(p.coeff(0, 0), BigInt::from(16));
        assert_eq!(p.coeff(2, 1), BigInt::from(-1));
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.to_string(), "-u^2*v - 16*v + 16");
        assert!(BivarIntPoly::from_i64(&[(1, 1, 0)]).is_err());
    }

    #[test]
    fn sign_is_fixed_by_first_term() {
        let a = BivarIntPoly::from_i64(&[(0, 1, -1), (4, 3, 1)]).unwrap();
        let b = BivarIntPoly::from_i64(&[(0, 1, 1), (4, 3, -1)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scaled_substitution() {
        // P(u,v) = u - 2v; P(3u, v) = 3u - 2v.
        let p = BivarIntPoly::from_i64(&[(1, 0, 1), (0, 1, -2)]).unwrap();
        let q = p.substitute_scaled_u(&BigRational::from_integer(3.into())).unwrap();
        assert_eq!(q, BivarIntPoly::from_i64(&[(1, 0, 3), (0, 1, -2)]).unwrap());
        let half = BigRational::new(1.into(), 2.into());
        let h = p.substitute_scaled_u(&half).unwrap();
        assert_eq!(h, BivarIntPoly::from_i64(&[(1, 0, 1), (0, 1, -4)]).unwrap());
    }

    #[test]
    fn real_and_series_evaluation() {
        let p = BivarIntPoly::from_i64(&[(2, 0, 1), (0, 1, -1)]).unwrap();
        let u = BigReal::from_i64(3, 30);
        let v = BigReal::from_i64(9, 30);
        assert!(p.eval_real(&u, &v).is_zero());
        let bound = Rat::from_integer(10);
        let us = PuiseuxSeries::from_i64_coeffs(&[1, 1], bound);
        let vs = PuiseuxSeries::from_i64_coeffs(&[1, 2, 1], bound);
        assert!(p.eval_series(&us, &vs).is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let p = BivarIntPoly::from_i64(&[(4, 1, -1), (2, 1, -64), (0, 2, 256), (0, 1, -512), (0, 0, 256)])
            .unwrap();
        assert_eq!(BivarIntPoly::from_json(&p.to_json()).unwrap(), p);
    }
}
