//! Exact kernel computation for integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Dense integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

const P61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce(x: &BigInt) -> u64 {
    let m = BigInt::from(P61);
    x.mod_floor(&m).to_u64().expect("residue fits")
}

/// Rank modulo the prime `2^61 − 1`, together with the rows chosen as pivots.
/// The mod-p rank never exceeds the rank over the rationals.
pub fn rank_mod_p(m: &IntMatrix) -> (usize, Vec<usize>) {
    let rows = m.len();
    if rows == 0 {
        return (0, vec![]);
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(reduce).collect()).collect();
    let mut origin: Vec<usize> = (0..rows).collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        origin.swap(rank, piv);
        let inv = powmod(a[rank][col], P61 - 2);
        let pivot_row: Vec<u64> = a[rank].iter().map(|&x| mulmod(x, inv)).collect();
        for r in rank + 1..rows {
            let f = a[r][col];
            if f == 0 {
                continue;
            }
            for c in col..cols {
                let sub = mulmod(f, pivot_row[c]);
                a[r][c] = (a[r][c] + P61 - sub) % P61;
            }
        }
        a[rank] = pivot_row;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut chosen = origin[..rank].to_vec();
    chosen.sort_unstable();
    (rank, chosen)
}

/// Fraction-free (Bareiss) row echelon form in place. Returns the pivot columns.
pub fn bareiss_echelon(m: &mut IntMatrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        // Smallest nonzero entry keeps intermediate growth down.
        let Some(piv) = (row..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].bits())
        else {
            continue;
        };
        m.swap(row, piv);
        let (top, rest) = m.split_at_mut(row + 1);
        let p = &top[row];
        for r in rest.iter_mut() {
            let f = std::mem::take(&mut r[col]);
            for c in col + 1..cols {
                let v = &p[col] * &r[c] - &f * &p[c];
                r[c] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = top[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

/// Basis of the right kernel, each vector scaled to coprime integers.
pub fn exact_nullspace(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut e = m.clone();
    let pivots = bareiss_echelon(&mut e);
    kernel_from_echelon(&e, &pivots, cols)
}

pub(crate) fn kernel_from_echelon(e: &IntMatrix, pivots: &[usize], cols: usize) -> Vec<Vec<BigInt>> {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![BigRational::zero(); cols];
        x[f] = BigRational::one();
        for (k, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = BigRational::zero();
            for c in pc + 1..cols {
                if !e[k][c].is_zero() && !x[c].is_zero() {
                    acc += &x[c] * BigRational::from_integer(e[k][c].clone());
                }
            }
            x[pc] = -acc / BigRational::from_integer(e[k][pc].clone());
        }
        basis.push(primitive(&x));
    }
    basis
}

/// Scales a rational vector to coprime integers.
pub fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let den = x.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let ints: Vec<BigInt> = x
        .iter()
        .map(|v| (v * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

/// Reduced row echelon form of a set of vectors over the rationals; rows come
/// back as coprime integer vectors.
pub fn rref_rows(vectors: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(cols) = vectors.first().map(|v| v.len()) else {
        return vec![];
    };
    let mut a: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, piv);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    let sub = &f * &a[row][c];
                    a[r][c] -= sub;
                }
            }
        }
        row += 1;
        if row == a.len() {
            break;
        }
    }
    a.iter().map(|r| primitive(r)).filter(|v| v.iter().any(|x| !x.is_zero())).collect()
}

/// `m · x == 0` exactly.
pub fn in_kernel(m: &IntMatrix, x: &[BigInt]) -> bool {
    m.iter().all(|row| {
        row.iter()
            .zip(x)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(BigInt::zero(), |s, (a, b)| s + a * b)
            .is_zero()
    })
}
