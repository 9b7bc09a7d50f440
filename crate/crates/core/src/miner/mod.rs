//! Mining integer relations `P(u, v) = 0` between two exact series by
//! interpolation: the coefficients of `u^i v^j` below a truncation order form
//! a matrix whose kernel holds the candidate polynomials.

mod binding;
pub mod linalg;
mod poly;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bigreal::BigReal;
use crate::error::{Error, Result};
use crate::numeric::singular_modulus;
use crate::series::{PuiseuxSeries, Rat};

pub use binding::{UBinding, VBinding};
pub use linalg::{exact_nullspace, IntMatrix};
pub use poly::BivarIntPoly;

use binding::UBindingJson;
use linalg::{in_kernel, kernel_from_echelon, rank_mod_p, rref_rows};
use poly::{monomial, powers};

/// Grid orders of extra agreement demanded beyond the matrix rows.
pub const VALIDATION_GUARD: i64 = 25;

/// Coefficient matrix of the monomials `u^i v^j`, `0 ≤ i, j ≤ s`.
#[derive(Clone, Debug)]
pub struct CoeffMatrix {
    /// Integer rows; each row of the rational matrix is scaled by its common denominator.
    pub rows: IntMatrix,
    /// Exponent of the first row.
    pub base: Rat,
    /// Rows are spaced by `1/denom`.
    pub denom: i64,
    pub s: u32,
}

fn col_index(s: u32, i: u32, j: u32) -> usize {
    (i * (s + 1) + j) as usize
}

fn col_monomial(s: u32, idx: usize) -> (u32, u32) {
    let w = (s + 1) as usize;
    ((idx / w) as u32, (idx % w) as u32)
}

/// Products `u^i v^j` computed once and reused across degrees.
struct ProductTable<'a> {
    u: &'a PuiseuxSeries,
    v: &'a PuiseuxSeries,
    upow: Vec<PuiseuxSeries>,
    vpow: Vec<PuiseuxSeries>,
    cache: HashMap<(u32, u32), PuiseuxSeries>,
    denom: i64,
    alpha: Rat,
    beta: Rat,
}

impl<'a> ProductTable<'a> {
    fn new(u: &'a PuiseuxSeries, v: &'a PuiseuxSeries) -> Result<Self> {
        let alpha = u
            .valuation()
            .ok_or_else(|| Error::domain("u is zero to its truncation bound"))?;
        let beta = v
            .valuation()
            .ok_or_else(|| Error::domain("v is zero to its truncation bound"))?;
        Ok(ProductTable {
            u,
            v,
            upow: powers(u, 0),
            vpow: powers(v, 0),
            cache: HashMap::new(),
            denom: u.denom().lcm(&v.denom()),
            alpha,
            beta,
        })
    }

    fn ensure(&mut self, s: u32) {
        while self.upow.len() <= s as usize {
            let k = self.upow.len();
            let next = if k == 1 { self.u.clone() } else { self.upow[k - 1].mul(self.u) };
            self.upow.push(next);
        }
        while self.vpow.len() <= s as usize {
            let k = self.vpow.len();
            let next = if k == 1 { self.v.clone() } else { self.vpow[k - 1].mul(self.v) };
            self.vpow.push(next);
        }
    }

    fn product(&mut self, i: u32, j: u32) -> Option<&PuiseuxSeries> {
        if (i, j) == (0, 0) {
            return None;
        }
        if !self.cache.contains_key(&(i, j)) {
            self.ensure(i.max(j));
            let p = monomial(&self.upow, &self.vpow, i, j).expect("not constant");
            self.cache.insert((i, j), p);
        }
        self.cache.get(&(i, j))
    }

    /// Lowest exponent among `u^i v^j`, `0 ≤ i, j ≤ s`.
    fn base(&self, s: u32) -> Rat {
        let s = Rat::from_integer(s as i64);
        s * self.alpha.min(Rat::zero()) + s * self.beta.min(Rat::zero())
    }

    /// Rows available for degree `s`: every product must be known on each row.
    fn available_rows(&mut self, s: u32) -> (i64, Rat) {
        let base = self.base(s);
        let mut bound: Option<Rat> = None;
        for i in 0..=s {
            for j in 0..=s {
                if let Some(p) = self.product(i, j) {
                    let b = p.bound();
                    bound = Some(bound.map_or(b, |x: Rat| x.min(b)));
                }
            }
        }
        let bound = bound.unwrap_or(base);
        let rows = ((bound - base) * self.denom).ceil().to_integer().max(0);
        (rows, bound)
    }

    fn matrix(&mut self, s: u32, rows: i64) -> Result<CoeffMatrix> {
        let (avail, bound) = self.available_rows(s);
        let base = self.base(s);
        let denom = self.denom;
        if rows > avail {
            return Err(Error::InsufficientOrder {
                required: (base + Rat::new(rows, denom)).to_string(),
                available: bound.to_string(),
            });
        }
        let cols = ((s + 1) * (s + 1)) as usize;
        let mut m = vec![vec![num_rational::BigRational::zero(); cols]; rows as usize];
        let top = base + Rat::new(rows, denom);
        if base <= Rat::zero() && Rat::zero() < top {
            let r = (-base * denom).to_integer() as usize;
            m[r][0] = num_rational::BigRational::one();
        }
        for i in 0..=s {
            for j in 0..=s {
                let Some(p) = self.product(i, j) else { continue };
                let col = col_index(s, i, j);
                for (e, c) in p.terms() {
                    if e >= top {
                        break;
                    }
                    let r = ((e - base) * denom).to_integer() as usize;
                    m[r][col] = c.clone();
                }
            }
        }
        let rows = m
            .into_iter()
            .map(|row| {
                let den = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                row.into_iter()
                    .map(|x| (x * num_rational::BigRational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        Ok(CoeffMatrix { rows, base, denom, s })
    }
}

/// Matrix of coefficients of `u^i v^j` on `rows` grid exponents from the lowest one upward.
pub fn build_coeff_matrix(u: &PuiseuxSeries, v: &PuiseuxSeries, s: u32, rows: i64) -> Result<CoeffMatrix> {
    ProductTable::new(u, v)?.matrix(s, rows)
}

/// Rank observed for one matrix during mining.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankInfo {
    pub s: u32,
    pub rows: i64,
    pub cols: usize,
    pub rank: usize,
}

/// Result of mining on explicit series.
#[derive(Clone, Debug)]
pub struct MineOutcome {
    pub poly: BivarIntPoly,
    pub degree: u32,
    pub rows_used: i64,
    /// Grid rows, counted from the lowest monomial exponent of `P`, on which `P(u,v)` vanishes.
    pub validated_grid_order: i64,
    pub kernel_basis: Vec<BivarIntPoly>,
    pub rank_profile: Vec<RankInfo>,
}

fn nominal_rows(s: u32) -> i64 {
    let c = (s as i64 + 1).pow(2);
    c + 10
}

/// Checks `P(u, v) = 0` on all available data. Returns the validated grid order,
/// or the first exponent at which it fails.
pub fn series_residual_order(poly: &BivarIntPoly, u: &PuiseuxSeries, v: &PuiseuxSeries) -> std::result::Result<i64, Rat> {
    let value = poly.eval_series(u, v);
    if let Some(e) = value.first_nonzero() {
        return Err(e);
    }
    let alpha = u.valuation().unwrap_or(Rat::zero());
    let beta = v.valuation().unwrap_or(Rat::zero());
    let lowest = poly
        .terms()
        .map(|(i, j, _)| alpha * i as i64 + beta * j as i64)
        .min()
        .unwrap_or(Rat::zero());
    let denom = u.denom().lcm(&v.denom());
    Ok(((value.bound() - lowest) * denom).floor().to_integer())
}

/// Finds the first degree `s ≤ s_max` with a nonzero kernel and returns the
/// selected, normalized relation after checking it on all available data.
pub fn mine_series(u: &PuiseuxSeries, v: &PuiseuxSeries, s_max: u32) -> Result<MineOutcome> {
    let mut table = ProductTable::new(u, v)?;
    let mut profile = Vec::new();
    for s in 1..=s_max {
        let cols = ((s + 1) * (s + 1)) as usize;
        let (avail, _) = table.available_rows(s);
        let mut rows = nominal_rows(s);
        if rows > avail {
            // Produces the InsufficientOrder error naming the required order.
            table.matrix(s, rows)?;
        }
        loop {
            let m = table.matrix(s, rows)?;
            let (rank, pivot_rows) = rank_mod_p(&m.rows);
            profile.push(RankInfo { s, rows, cols, rank });
            if rank == cols {
                break;
            }
            let basis = kernel_basis(&m.rows, &pivot_rows);
            if basis.is_empty() {
                break;
            }
            let (poly, polys) = select(&basis, s)?;
            match series_residual_order(&poly, u, v) {
                Ok(order) if order > rows => {
                    return Ok(MineOutcome {
                        poly,
                        degree: s,
                        rows_used: rows,
                        validated_grid_order: order,
                        kernel_basis: polys,
                        rank_profile: profile,
                    });
                }
                _ => {}
            }
            rows += cols as i64;
            if rows > avail {
                break;
            }
        }
    }
    let ranks: Vec<String> = profile
        .iter()
        .map(|r| format!("s={} rows={} rank {}/{}", r.s, r.rows, r.rank, r.cols))
        .collect();
    Err(Error::NotFound(format!(
        "no relation up to s = {s_max} ({})",
        ranks.join(", ")
    )))
}

/// Exact kernel, using the rows found independent mod p and falling back to
/// the full matrix when the prime was unlucky.
fn kernel_basis(m: &IntMatrix, pivot_rows: &[usize]) -> Vec<Vec<BigInt>> {
    let cols = m[0].len();
    let mut sub: IntMatrix = pivot_rows.iter().map(|&r| m[r].clone()).collect();
    let pivots = linalg::bareiss_echelon(&mut sub);
    let basis = kernel_from_echelon(&sub, &pivots, cols);
    if basis.iter().all(|b| in_kernel(m, b)) {
        basis
    } else {
        exact_nullspace(m)
    }
}

/// Reduces the kernel basis with high-degree monomials eliminated first and
/// picks the vector with least (total degree, term count, lex order).
fn select(basis: &[Vec<BigInt>], s: u32) -> Result<(BivarIntPoly, Vec<BivarIntPoly>)> {
    let cols = basis[0].len();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by_key(|&c| {
        let (i, j) = col_monomial(s, c);
        (std::cmp::Reverse(i + j), std::cmp::Reverse(i), j)
    });
    let permuted: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|b| order.iter().map(|&c| b[c].clone()).collect())
        .collect();
    let reduced = rref_rows(&permuted);
    let mut polys = Vec::with_capacity(reduced.len());
    for row in reduced {
        let terms = row
            .into_iter()
            .zip(&order)
            .map(|(c, &col)| {
                let (i, j) = col_monomial(s, col);
                (i, j, c)
            });
        polys.push(BivarIntPoly::new(terms)?);
    }
    let best = polys
        .iter()
        .min_by_key(|p| p.selection_key())
        .cloned()
        .expect("nonempty basis");
    Ok((best, polys))
}

/// One numeric spot check of a relation.
#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub r: Rat,
    pub digits: u32,
    pub residual: BigReal,
}

/// A relation `P(u, v) = 0` together with what it was checked against.
#[derive(Clone, Debug)]
pub struct MinedRelation {
    pub u: UBinding,
    pub v: VBinding,
    pub poly: BivarIntPoly,
    pub degree: u32,
    /// Truncation order of the series the relation was last checked on.
    pub order: Rat,
    pub validated_grid_order: i64,
    pub numeric_checks: Vec<NumericCheck>,
}

/// Mines `P(u, v)` for bound variables from series known below `q^order`, then validates.
pub fn mine(
    u: UBinding,
    v: VBinding,
    s_max: u32,
    order: Rat,
    points: &[Rat],
    digits: u32,
) -> Result<MinedRelation> {
    let us = u.series(order)?;
    let vs = v.series(order)?;
    let out = mine_series(&us, &vs, s_max)?;
    let rel = MinedRelation {
        u,
        v,
        poly: out.poly,
        degree: out.degree,
        order,
        validated_grid_order: out.validated_grid_order,
        numeric_checks: vec![],
    };
    validate(rel, VALIDATION_GUARD, points, digits)
}

/// Re-expands both series `extra_orders` further and checks `P(u,v)` vanishes
/// there, then checks `|P(u,v)| < 10^(−digits/2)` at each `r`.
pub fn validate(mut rel: MinedRelation, extra_orders: i64, points: &[Rat], digits: u32) -> Result<MinedRelation> {
    let order = rel.order + Rat::from_integer(extra_orders);
    let us = rel.u.series(order)?;
    let vs = rel.v.series(order)?;
    match series_residual_order(&rel.poly, &us, &vs) {
        Ok(n) => {
            rel.validated_grid_order = n;
            rel.order = order;
        }
        Err(e) => {
            return Err(Error::ValidationFailed(format!(
                "P(u,v) has a nonzero q^{e} coefficient ({} vs {})",
                rel.u, rel.v
            )))
        }
    }
    let limit = -(digits as i64) / 2;
    rel.numeric_checks.clear();
    for &r in points {
        let pt = singular_modulus(r, digits)?;
        let residual = rel.poly.eval_real(&rel.u.eval(&pt)?, &rel.v.eval(&pt)?).abs();
        if !residual.abs_lt_pow10(limit) {
            return Err(Error::ValidationFailed(format!(
                "|P(u,v)| = {} at r = {r}",
                residual.to_sci_string(3)
            )));
        }
        rel.numeric_checks.push(NumericCheck { r, digits, residual });
    }
    Ok(rel)
}

#[derive(Serialize, Deserialize)]
struct NumericCheckJson {
    r: String,
    digits: u32,
    residual: String,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RelationJson {
    u: UBindingJson,
    v: VBinding,
    poly: Vec<(u32, u32, String)>,
    #[serde(default)]
    degree: u32,
    #[serde(default)]
    order: Option<String>,
    validated_grid_order: i64,
    #[serde(default)]
    numeric_checks: Vec<NumericCheckJson>,
}

impl MinedRelation {
    pub fn to_json_value(&self) -> serde_json::Value {
        let j = RelationJson {
            u: UBindingJson::from(&self.u),
            v: self.v,
            poly: self.poly.to_json(),
            degree: self.degree,
            order: Some(self.order.to_string()),
            validated_grid_order: self.validated_grid_order,
            numeric_checks: self
                .numeric_checks
                .iter()
                .map(|c| NumericCheckJson {
                    r: c.r.to_string(),
                    digits: c.digits,
                    residual: c.residual.to_sci_string(2),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("relation serializes")
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let j: RelationJson = serde_json::from_value(v)?;
        let poly = BivarIntPoly::from_json(&j.poly)?;
        let degree = if j.degree == 0 { poly.degree_u().max(poly.degree_v()) } else { j.degree };
        let numeric_checks = j
            .numeric_checks
            .iter()
            .map(|c| {
                let r = crate::series::parse_rat(&c.r)?;
                let residual = BigReal::parse_decimal(&c.residual, c.digits.max(crate::bigreal::MIN_DIGITS))?;
                Ok(NumericCheck { r, digits: c.digits, residual })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MinedRelation {
            u: UBinding::try_from(j.u)?,
            v: j.v,
            poly,
            degree,
            order: match j.order {
                Some(o) => crate::series::parse_rat(&o)?,
                None => Rat::zero(),
            },
            validated_grid_order: j.validated_grid_order,
            numeric_checks,
        })
    }
}
