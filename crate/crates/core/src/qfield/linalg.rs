//! Exact linear algebra: Gaussian elimination over a field, fraction-free
//! (Bareiss) elimination over `Z[vars]`, and nullspaces modulo a prime.

use std::fmt::Debug;

use super::modular::{inv_mod, mul_mod, sub_mod, Fp};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Minimal field interface for [`solve_linear`].
pub trait Field: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn f_add(&self, rhs: &Self) -> Self;
    fn f_sub(&self, rhs: &Self) -> Self;
    fn f_mul(&self, rhs: &Self) -> Self;
    fn f_inv(&self) -> Option<Self>;
}

impl Field for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::zero()
    }
    fn one_like(&self) -> Self {
        RatFunc::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn f_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn f_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn f_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp::zero(self.modulus())
    }
    fn one_like(&self) -> Self {
        Fp::one(self.modulus())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn f_sub(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn f_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn f_inv(&self) -> Option<Self> {
        self.inv()
    }
}

fn check_square<T>(m: &[Vec<T>]) -> Result<usize> {
    let n = m.len();
    if let Some(row) = m.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "expected a square {n}x{n} matrix, found a row of length {}",
            row.len()
        )));
    }
    Ok(n)
}

/// Solves `m x = rhs` over a field by Gaussian elimination.
///
/// The result is substituted back before returning; a singular matrix yields
/// [`Error::SingularSystem`] with the rank that was found.
pub fn solve_linear<F: Field>(m: &[Vec<F>], rhs: &[F]) -> Result<Vec<F>> {
    let n = check_square(m)?;
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!("rhs has length {}, expected {n}", rhs.len())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Vec<Vec<F>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();

    let mut rank = 0;
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero_elem()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][col].f_inv().expect("nonzero pivot is invertible");
        for x in a[rank].iter_mut().skip(col) {
            *x = x.f_mul(&inv);
        }
        let pivot_row = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero_elem() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *x = x.f_sub(&f.f_mul(y));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < n {
        return Err(Error::SingularSystem { rank, size: n });
    }
    let x: Vec<F> = (0..n).map(|r| a[r][n].clone()).collect();

    for (row, b) in m.iter().zip(rhs) {
        let mut acc = b.zero_like();
        for (c, xv) in row.iter().zip(&x) {
            acc = acc.f_add(&c.f_mul(xv));
        }
        if &acc != b {
            return Err(Error::Internal("solve_linear substitution check failed".into()));
        }
    }
    Ok(x)
}

/// Forward Bareiss elimination in place on an `n x (n + extra)` matrix.
///
/// Returns `(sign, pivot_count)`; on full rank `m[n-1][n-1]` is `sign * det`
/// of the leading square block.
fn bareiss_forward(m: &mut [Vec<Poly>], n: usize) -> (i32, usize) {
    let width = m.first().map_or(0, |r| r.len());
    let mut sign = 1;
    let mut prev = Poly::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return (sign, k);
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..width {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    (sign, n)
}

/// Determinant by fraction-free elimination; every intermediate division is
/// exact and checked.
pub fn det_fraction_free(m: &[Vec<Poly>]) -> Result<Poly> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(Poly::one());
    }
    let mut a = m.to_vec();
    let (sign, rank) = bareiss_forward(&mut a, n);
    if rank < n {
        return Ok(Poly::zero());
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { -d } else { d })
}

/// Fraction-free solution of `m x = rhs` over `Z[vars]`.
///
/// Returns numerators `y` and a common denominator `d` with `x = y / d`, after
/// verifying `m y = d rhs` exactly.
pub fn solve_fraction_free(m: &[Vec<Poly>], rhs: &[Poly]) -> Result<(Vec<Poly>, Poly)> {
    let n = check_square(m)?;
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!("rhs has length {}, expected {n}", rhs.len())));
    }
    if n == 0 {
        return Ok((Vec::new(), Poly::one()));
    }
    let mut a: Vec<Vec<Poly>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (_, rank) = bareiss_forward(&mut a, n);
    if rank < n {
        let rank = rank_fraction_free(m);
        return Err(Error::SingularSystem { rank, size: n });
    }
    let d = a[n - 1][n - 1].clone();
    let mut y = vec![Poly::zero(); n];
    for i in (0..n).rev() {
        let mut acc = &d * &a[i][n];
        for j in i + 1..n {
            acc = &acc - &(&a[i][j] * &y[j]);
        }
        y[i] = acc
            .div_exact(&a[i][i])
            .ok_or_else(|| Error::Internal("fraction-free back substitution is not exact".into()))?;
    }
    for (row, b) in m.iter().zip(rhs) {
        let mut acc = Poly::zero();
        for (c, yv) in row.iter().zip(&y) {
            acc = &acc + &(c * yv);
        }
        if acc != b * &d {
            return Err(Error::Internal("fraction-free substitution check failed".into()));
        }
    }
    Ok((y, d))
}

/// Rank of a polynomial matrix via fraction-free elimination with column skipping.
pub fn rank_fraction_free(m: &[Vec<Poly>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.to_vec();
    let mut prev = Poly::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let t = &(&a[rank][col] * &a[i][j]) - &(&a[i][col] * &a[rank][j]);
                a[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][col] = Poly::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Reduced row echelon form modulo `p`, in place. Returns the pivot columns.
pub fn rref_mod(a: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = inv_mod(a[r][c], p).expect("nonzero pivot");
        for x in a[r][c..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x = sub_mod(*x, mul_mod(f, *pv, p), p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right nullspace modulo `p`, itself in reduced echelon form
/// (each basis vector has a leading 1 and the basis is canonical for the
/// subspace and the column order).
pub fn nullspace_mod(a: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = a.to_vec();
    let pivots = rref_mod(&mut m, p);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Vec<u64>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = super::modular::neg_mod(m[row][f], p);
            }
            v
        })
        .collect();
    rref_mod(&mut basis, p);
    basis.retain(|v| v.iter().any(|&x| x != 0));
    basis
}
