//! Polynomial gcd over `Z[q, xn, xj, xi]`.
//!
//! Univariate pairs go through the modular dense kernel. Everything else uses
//! content/primitive-part recursion on the highest variable with a primitive
//! pseudo-remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::dense;
use super::modular::{default_primes, inv_mod, mul_mod, sub_mod, PrimePoint};
use super::poly::{Monomial, Poly, Support, Var};
use crate::error::{Error, Result};

/// Gcd normalized to a positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdUndefined);
    }
    Ok(gcd_unchecked(a, b))
}

pub(crate) fn gcd_unchecked(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone().normalize_sign();
    }
    if b.is_zero() {
        return a.clone().normalize_sign();
    }
    if a == b {
        return a.clone().normalize_sign();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    let v = match (a.support(), b.support()) {
        (Support::Univariate(v), Support::Univariate(w)) if v == w => Some(v),
        _ => None,
    };
    if let Some(v) = v {
        return Poly::from_dense(v, &dense::gcd(&a.to_dense(v), &b.to_dense(v)));
    }
    if let Some(g) = heuristic_gcd(a, b) {
        return g.normalize_sign();
    }
    gcd_recursive(a, b).normalize_sign()
}

const HEURISTIC_TRIES: usize = 6;

fn max_norm(p: &Poly) -> BigInt {
    p.terms().map(|(_, c)| c.abs()).max().unwrap_or_default()
}

/// `p` with `v = x`.
fn eval_at(p: &Poly, v: Var, x: &BigInt) -> Poly {
    let deg = p.degree_in(v) as usize;
    let mut pows = vec![BigInt::one(); deg + 1];
    for k in 1..=deg {
        pows[k] = &pows[k - 1] * x;
    }
    Poly::from_terms(p.terms().map(|(m, c)| {
        let mut e = m.0;
        let k = std::mem::take(&mut e[v.index()]) as usize;
        (Monomial(e), c * &pows[k])
    }))
}

/// Inverse of [`eval_at`] on polynomials with small coefficients: reads the
/// coefficients of `h` as balanced base-`x` expansions.
fn interpolate(mut h: Poly, v: Var, x: &BigInt) -> Poly {
    let half = x / 2;
    let mut out = Vec::new();
    let mut k = 0u32;
    while !h.is_zero() {
        let digit = Poly::from_terms(h.terms().map(|(m, c)| {
            let mut r = c.mod_floor(x);
            if r > half {
                r -= x;
            }
            (*m, r)
        }));
        for (m, c) in digit.terms() {
            out.push((m.mul(&Monomial::var(v, k)), c.clone()));
        }
        h = (&h - &digit).div_integer(x).expect("digits were removed");
        k += 1;
    }
    Poly::from_terms(out)
}

/// Heuristic gcd: evaluate the main variable at a large integer, take the gcd
/// of the images and read it back in base `x`. A candidate is returned only
/// after it divides both inputs, which for `x` above twice the smaller
/// coefficient norm makes it the gcd.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let v = a.main_var().max(b.main_var())?;
    let (ca, cb) = (a.content(), b.content());
    let cont = ca.gcd(&cb);
    let f = a.div_integer(&ca)?;
    let g = b.div_integer(&cb)?;
    let (nf, ng) = (max_norm(&f), max_norm(&g));
    let bound: BigInt = BigInt::from(2) * nf.clone().min(ng.clone()) + BigInt::from(29);
    let lc = |p: &Poly| p.leading_coeff().abs();
    let mut x = bound
        .clone()
        .min(BigInt::from(99) * bound.sqrt())
        .max(BigInt::from(2) * (&nf / lc(&f)).min(&ng / lc(&g)) + 4);
    for _ in 0..HEURISTIC_TRIES {
        let (ff, gg) = (eval_at(&f, v, &x), eval_at(&g, v, &x));
        if !ff.is_zero() && !gg.is_zero() {
            let h = gcd_unchecked(&ff, &gg);
            let h = interpolate(h, v, &x);
            if !h.is_zero() {
                let h = h.div_integer(&h.content()).expect("content divides");
                if f.div_exact(&h).is_some() && g.div_exact(&h).is_some() {
                    return Some(h.scale(&cont));
                }
            }
        }
        x = BigInt::from(73794) * &x * x.sqrt().sqrt() / 27011;
    }
    None
}

/// Coefficients of `p` as a polynomial in `v`, indexed by degree.
fn to_univariate(p: &Poly, v: Var) -> Vec<Poly> {
    let deg = p.degree_in(v) as usize;
    let mut parts: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); deg + 1];
    for (m, c) in p.terms() {
        let mut e = m.0;
        let k = e[v.index()] as usize;
        e[v.index()] = 0;
        parts[k].push((Monomial(e), c.clone()));
    }
    parts.into_iter().map(Poly::from_terms).collect()
}

fn from_univariate(coeffs: &[Poly], v: Var) -> Poly {
    let mut out = Poly::zero();
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            out = &out + &c.mul_monomial(&Monomial::var(v, k as u32));
        }
    }
    out
}

fn content_of(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = gcd_unchecked(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn primitive(mut v: Vec<Poly>) -> Vec<Poly> {
    trim(&mut v);
    let c = content_of(&v);
    if c.is_one() || c.is_zero() {
        return v;
    }
    v.iter()
        .map(|x| x.div_exact(&c).expect("content divides every coefficient"))
        .collect()
}

/// Pseudo-remainder of `a` by `b` in the main variable.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r = a.to_vec();
    trim(&mut r);
    let e = b.len() - 1;
    let lcb = &b[e];
    while r.len() > e && !r.is_empty() {
        let m = r.len() - 1;
        let lr = r[m].clone();
        for x in r.iter_mut() {
            *x = &*x * lcb;
        }
        for (k, bk) in b.iter().enumerate() {
            if !bk.is_zero() {
                r[k + m - e] = &r[k + m - e] - &(&lr * bk);
            }
        }
        debug_assert!(r[m].is_zero());
        trim(&mut r);
    }
    r
}

fn gcd_recursive(a: &Poly, b: &Poly) -> Poly {
    let v = a.main_var().max(b.main_var()).expect("non-constant input");
    if !a.uses(v) {
        return gcd_unchecked(a, &content_of(&to_univariate(b, v)));
    }
    if !b.uses(v) {
        return gcd_unchecked(&content_of(&to_univariate(a, v)), b);
    }
    let ua = to_univariate(a, v);
    let ub = to_univariate(b, v);
    let ca = content_of(&ua);
    let cb = content_of(&ub);
    let cont = gcd_unchecked(&ca, &cb);
    let mut x = primitive(ua);
    let mut y = primitive(ub);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    // an image gcd bounds the degree of the true one from above
    match image_gcd_degree(&x, &y) {
        Some(0) => return cont,
        Some(d) if d + 1 == y.len() => {
            let (px, py) = (from_univariate(&x, v), from_univariate(&y, v));
            if px.div_exact(&py).is_some() {
                return &cont * &py;
            }
        }
        _ => {}
    }
    while y.len() > 1 {
        let r = primitive(prem(&x, &y));
        x = y;
        y = r;
        if y.is_empty() {
            break;
        }
    }
    let g = if y.is_empty() { x } else { vec![Poly::one()] };
    let g = from_univariate(&g, v);
    &cont * &g
}

/// Degree of `gcd(x, y)` at a pseudo-random point modulo a word prime, for
/// the first point where neither leading coefficient vanishes.
fn image_gcd_degree(x: &[Poly], y: &[Poly]) -> Option<usize> {
    let p = default_primes(1)[0];
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state % p
    };
    for _ in 0..4 {
        let Ok(pt) = PrimePoint::new(p, next()) else { continue };
        let pt = pt.with(Var::Xn, next()).with(Var::Xj, next()).with(Var::Xi, next());
        let eval = |cs: &[Poly]| -> Option<Vec<u64>> { cs.iter().map(|c| c.eval(&pt).ok().map(|f| f.value())).collect() };
        let (Some(a), Some(b)) = (eval(x), eval(y)) else { return None };
        if a.last().is_some_and(|&c| c != 0) && b.last().is_some_and(|&c| c != 0) {
            return Some(gcd_degree_mod(a, b, p));
        }
    }
    None
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    let strip = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    strip(&mut a);
    strip(&mut b);
    while !b.is_empty() {
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let f = mul_mod(*a.last().expect("nonempty"), inv_mod(*b.last().expect("nonempty"), p).expect("unit"), p);
            for (k, &bk) in b.iter().enumerate() {
                a[k + shift] = sub_mod(a[k + shift], mul_mod(f, bk, p), p);
            }
            strip(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}
