//! Word-sized prime fields: residue arithmetic, prime generation and
//! evaluation points.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::poly::{Var, NVARS};
use crate::error::{Error, Result};

/// Default guard on the multiplicative order of the image of `q`.
pub const DEFAULT_ORDER_BOUND: u64 = 64;

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

#[inline]
pub fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

/// `base^exp` for a signed exponent; negative powers use the inverse.
pub fn pow_mod_signed(base: u64, exp: i64, p: u64) -> Option<u64> {
    if exp >= 0 {
        Some(pow_mod(base, exp as u64, p))
    } else {
        inv_mod(base, p).map(|b| pow_mod(b, exp.unsigned_abs(), p))
    }
}

/// Reduces an arbitrary-precision integer into `[0, p)`.
pub fn reduce(x: &BigInt, p: u64) -> u64 {
    if let Some(small) = x.to_i64() {
        return (small as i128).rem_euclid(p as i128) as u64;
    }
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in a word")
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &s in &SMALL {
        if n.is_multiple_of(s) {
            return n == s;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^62` in decreasing order.
pub fn word_primes() -> impl Iterator<Item = u64> {
    let mut candidate = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while candidate > 2 {
            let c = candidate;
            candidate -= 2;
            if is_prime(c) {
                return Some(c);
            }
        }
        None
    })
}

/// The first `count` primes below `2^62`.
pub fn default_primes(count: usize) -> Vec<u64> {
    word_primes().take(count).collect()
}

/// Multiplicative order of `q` is larger than `bound` (and `q` is a unit).
pub fn order_exceeds(q: u64, bound: u64, p: u64) -> bool {
    if q.is_multiple_of(p) {
        return false;
    }
    let mut acc = 1u64;
    for _ in 1..=bound {
        acc = mul_mod(acc, q, p);
        if acc == 1 {
            return false;
        }
    }
    true
}

/// An element of the prime field `Z/pZ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: u64, modulus: u64) -> Self {
        Self {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_bigint(x: &BigInt, modulus: u64) -> Self {
        Self::new(reduce(x, modulus), modulus)
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Self::new(1, modulus)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::new(add_mod(self.value, rhs.value, self.modulus), self.modulus)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::new(sub_mod(self.value, rhs.value, self.modulus), self.modulus)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::new(mul_mod(self.value, rhs.value, self.modulus), self.modulus)
    }

    pub fn neg(&self) -> Self {
        Self::new(neg_mod(self.value, self.modulus), self.modulus)
    }

    pub fn inv(&self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|v| Self::new(v, self.modulus))
    }

    pub fn pow(&self, exp: u64) -> Self {
        Self::new(pow_mod(self.value, exp, self.modulus), self.modulus)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A prime together with residues for the variables `q, xn, xj, xi`.
///
/// The image of `q` is never zero and never a root of unity of order at most
/// the configured bound, so that no `q`-bracket `1 - q^k` with small `k`
/// collapses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePoint {
    prime: u64,
    values: [Option<u64>; NVARS],
}

impl PrimePoint {
    pub fn new(prime: u64, q: u64) -> Result<Self> {
        Self::with_order_bound(prime, q, DEFAULT_ORDER_BOUND)
    }

    pub fn with_order_bound(prime: u64, q: u64, bound: u64) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::BadEvaluationPoint(format!("{prime} is not prime")));
        }
        let q = q % prime;
        if q == 0 {
            return Err(Error::BadEvaluationPoint("q = 0".into()));
        }
        // tiny primes cannot satisfy the guard at all; only the unit check applies
        if prime > bound + 1 && !order_exceeds(q, bound, prime) {
            return Err(Error::BadEvaluationPoint(format!(
                "q = {q} has multiplicative order at most {bound} mod {prime}"
            )));
        }
        let mut values = [None; NVARS];
        values[Var::Q.index()] = Some(q);
        Ok(Self { prime, values })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn q(&self) -> u64 {
        self.values[Var::Q.index()].expect("q is always assigned")
    }

    pub fn get(&self, var: Var) -> Option<u64> {
        self.values[var.index()]
    }

    /// Assigns an explicit residue to a variable.
    pub fn with(mut self, var: Var, residue: u64) -> Self {
        self.values[var.index()] = Some(residue % self.prime);
        self
    }

    /// Specializes `xn = q^n`, `xj = q^j`, `xi = q^i`.
    pub fn at_index(&self, n: i64, j: i64, i: i64) -> Self {
        let q = self.q();
        let p = self.prime;
        let pw = |e: i64| pow_mod_signed(q, e, p).expect("q is a unit");
        let mut out = self.clone();
        out.values[Var::Xn.index()] = Some(pw(n));
        out.values[Var::Xj.index()] = Some(pw(j));
        out.values[Var::Xi.index()] = Some(pw(i));
        out
    }

    pub fn fp(&self, v: u64) -> Fp {
        Fp::new(v, self.prime)
    }

    /// `count` points with distinct admissible `q`, drawn from `seed`.
    pub fn sample(prime: u64, count: usize, seed: u64) -> Vec<PrimePoint> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ prime.rotate_left(17));
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let q = rng.gen_range(2..prime);
            if seen.insert(q) {
                if let Ok(pt) = PrimePoint::new(prime, q) {
                    out.push(pt);
                }
            }
        }
        out
    }
}
