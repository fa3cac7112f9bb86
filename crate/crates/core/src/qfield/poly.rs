//! Sparse polynomials with integer coefficients in `q`, `xn = q^n`,
//! `xj = q^j` and `xi = q^i`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dense;
use super::modular::{mul_mod, pow_mod_signed, reduce, Fp, PrimePoint};
use crate::error::{Error, Result};

pub const NVARS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    Xn,
    Xj,
    Xi,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::Q, Var::Xn, Var::Xj, Var::Xi];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::Xn => "xn",
            Var::Xj => "xj",
            Var::Xi => "xi",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }
}

/// Exponent vector over `(q, xn, xj, xi)`.
///
/// Ordered graded-lexicographically with `q < xn < xj < xi`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(pub [u32; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var, e: u32) -> Self {
        let mut m = [0; NVARS];
        m[v.index()] = e;
        Monomial(m)
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0) {
            *a += b;
        }
        Monomial(m)
    }

    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0) {
            *a = a.checked_sub(b)?;
        }
        Some(Monomial(m))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which variables a polynomial actually depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Constant,
    Univariate(Var),
    Multivariate,
}

/// Canonical sparse polynomial: no zero coefficients stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, Monomial::ONE)
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(1, Monomial::var(v, 1))
    }

    pub fn q() -> Self {
        Self::var(Var::Q)
    }

    /// `q^e`
    pub fn q_pow(e: u32) -> Self {
        Self::monomial(1, Monomial::var(Var::Q, e))
    }

    /// `1 - q^e`
    pub fn q_bracket(e: u32) -> Self {
        Self::one() - Self::q_pow(e)
    }

    pub fn monomial(c: impl Into<BigInt>, m: Monomial) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(iter: I) -> Self {
        let mut terms: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in iter {
            *terms.entry(m).or_default() += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    /// Builds a polynomial in one variable from coefficients indexed by exponent.
    pub fn from_dense(v: Var, coeffs: &[BigInt]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Monomial::var(v, e as u32), c.clone()))
            .collect();
        Self { terms }
    }

    /// Polynomial in `q` from small integer coefficients (lowest degree first).
    pub fn from_q_coeffs(coeffs: &[i64]) -> Self {
        let c: Vec<BigInt> = coeffs.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_dense(Var::Q, &c)
    }

    pub fn to_dense(&self, v: Var) -> Vec<BigInt> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![BigInt::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            debug_assert!(Var::ALL.iter().all(|&w| w == v || m.exp(w) == 0));
            out[m.exp(v) as usize] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<&BigInt> {
        match self.terms.len() {
            0 => None,
            1 => self.terms.get(&Monomial::ONE),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || self.as_constant().is_some()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Leading term under the graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn uses(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn support(&self) -> Support {
        let used: Vec<Var> = Var::ALL.into_iter().filter(|&v| self.uses(v)).collect();
        match used.as_slice() {
            [] => Support::Constant,
            [v] => Support::Univariate(*v),
            _ => Support::Multivariate,
        }
    }

    /// Highest variable (in `q < xn < xj < xi`) present.
    pub fn main_var(&self) -> Option<Var> {
        Var::ALL.into_iter().rev().find(|&v| self.uses(v))
    }

    /// Positive gcd of all coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    /// Divides every coefficient by an integer that is known to divide them.
    pub fn div_integer(&self, c: &BigInt) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, x) in &self.terms {
            let (qt, r) = x.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.insert(*m, qt);
        }
        Some(Self { terms })
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    /// Multiplies by `-1` if needed so that the leading coefficient is positive.
    pub fn normalize_sign(self) -> Self {
        if self.leading().is_some_and(|(_, c)| c.is_negative()) {
            -self
        } else {
            self
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Both operands depend on at most the same single variable.
    fn shared_univariate(&self, other: &Poly) -> Option<Var> {
        match (self.support(), other.support()) {
            (Support::Constant, Support::Constant) => Some(Var::Q),
            (Support::Univariate(v), Support::Constant) | (Support::Constant, Support::Univariate(v)) => Some(v),
            (Support::Univariate(v), Support::Univariate(w)) if v == w => Some(v),
            _ => None,
        }
    }

    /// Exact quotient, or `None` if `d` does not divide `self` in `Z[vars]`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return self.div_integer(c);
        }
        if let Some(v) = self.shared_univariate(d) {
            return dense::div_exact(&self.to_dense(v), &d.to_dense(v)).map(|c| Poly::from_dense(v, &c));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (*m, c.clone()))?;
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            let m = rm.div(&dm)?;
            let (c, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            rem = &rem - &d.mul_monomial(&m).scale(&c);
            quot.insert(m, c);
        }
        Some(Poly { terms: quot })
    }

    /// Substitutes `v -> q^k * v`, the action of a shift on coefficients.
    pub fn shift_var(&self, v: Var, k: u32) -> Poly {
        if k == 0 || v == Var::Q {
            return self.clone();
        }
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut e = m.0;
            e[Var::Q.index()] += k * m.exp(v);
            (Monomial(e), c.clone())
        }))
    }

    /// Renames variable `from` to `to` (e.g. `xj -> xn` on the diagonal).
    pub fn substitute_var(&self, from: Var, to: Var) -> Poly {
        if from == to {
            return self.clone();
        }
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut e = m.0;
            e[to.index()] += e[from.index()];
            e[from.index()] = 0;
            (Monomial(e), c.clone())
        }))
    }

    /// Specializes `xn = q^n, xj = q^j, xi = q^i`.
    ///
    /// Returns `(p, s)` with the specialization equal to `p / q^s`, so negative
    /// indices produce a Laurent shift instead of an error.
    pub fn instantiate(&self, n: i64, j: i64, i: i64) -> (Poly, u64) {
        let expo = |m: &Monomial| -> i64 {
            m.exp(Var::Q) as i64 + n * m.exp(Var::Xn) as i64 + j * m.exp(Var::Xj) as i64 + i * m.exp(Var::Xi) as i64
        };
        let min = self.terms.keys().map(expo).min().unwrap_or(0).min(0);
        let p = Poly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::var(Var::Q, (expo(m) - min) as u32), c.clone())),
        );
        (p, (-min) as u64)
    }

    /// Image modulo the point's prime. Fails if a used variable is unassigned.
    pub fn eval(&self, pt: &PrimePoint) -> Result<Fp> {
        let p = pt.prime();
        let mut vals = [0u64; NVARS];
        for v in Var::ALL {
            if self.uses(v) {
                vals[v.index()] = pt.get(v).ok_or_else(|| {
                    Error::BadEvaluationPoint(format!("variable {} is unassigned", v.name()))
                })?;
            }
        }
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = reduce(c, p);
            for v in Var::ALL {
                let e = m.exp(v);
                if e > 0 {
                    t = mul_mod(t, pow_mod_signed(vals[v.index()], e as i64, p).unwrap_or(0), p);
                }
            }
            acc = super::modular::add_mod(acc, t, p);
        }
        Ok(Fp::new(acc, p))
    }

    /// Value at `q = 1` for a polynomial in `q` alone (sum of coefficients).
    pub fn at_one(&self) -> BigInt {
        self.terms.values().sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut out, other) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &other.terms {
            let e = out.terms.entry(*m).or_default();
            *e += c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            let e = out.terms.entry(*m).or_default();
            *e -= c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(c);
        }
        if let Some(v) = self.shared_univariate(rhs) {
            return Poly::from_dense(v, &dense::mul(&self.to_dense(v), &rhs.to_dense(v)));
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::constant(c)
    }
}

impl From<BigInt> for Poly {
    fn from(c: BigInt) -> Self {
        Poly::constant(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || m.is_one() {
                factors.push(mag.to_string());
            }
            for v in Var::ALL {
                match m.exp(v) {
                    0 => {}
                    1 => factors.push(v.name().to_string()),
                    e => factors.push(format!("{}^{}", v.name(), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Poly {
        Poly::q()
    }

    #[test]
    fn difference_of_squares() {
        let a = &q() + &Poly::one();
        let b = &q() - &Poly::one();
        assert_eq!(&a * &b, Poly::from_q_coeffs(&[-1, 0, 1]));
    }

    #[test]
    fn additive_identity_and_square() {
        let a = &q() + &Poly::one();
        assert_eq!(&a + &Poly::zero(), a);
        assert_eq!(a.pow(2), Poly::from_q_coeffs(&[1, 2, 1]));
    }

    #[test]
    fn grlex_leading_term() {
        let xn = Poly::var(Var::Xn);
        let xj = Poly::var(Var::Xj);
        // q^2 and q*xn have degree 2; q*xn is larger since xn > q
        let p = &(&q() * &q()) + &(&q() * &xn);
        assert_eq!(p.leading().unwrap().0, &Monomial([1, 1, 0, 0]));
        let p2 = &xn + &xj;
        assert_eq!(p2.leading().unwrap().0, &Monomial([0, 0, 1, 0]));
    }

    #[test]
    fn multivariate_exact_division() {
        let xn = Poly::var(Var::Xn);
        let a = &(&q() * &xn) - &Poly::one();
        let b = &xn + &Poly::from_q_coeffs(&[2, 0, 1]);
        let p = &a * &b;
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert_eq!(p.div_exact(&b).unwrap(), a);
        assert!((&p + &Poly::one()).div_exact(&a).is_none());
    }

    #[test]
    fn shift_and_instantiate() {
        let xn = Poly::var(Var::Xn);
        // xn -> q xn
        assert_eq!(xn.shift_var(Var::Xn, 1), &q() * &xn);
        // xn at n = -2 is q^-2
        let (p, s) = xn.instantiate(-2, 0, 0);
        assert_eq!((p, s), (Poly::one(), 2));
        let (p, s) = (&xn + &Poly::one()).instantiate(3, 0, 0);
        assert_eq!((p, s), (Poly::from_q_coeffs(&[1, 0, 0, 1]), 0));
    }

    #[test]
    fn display() {
        let p = Poly::from_q_coeffs(&[-1, 0, 3]);
        assert_eq!(p.to_string(), "3*q^2 - 1");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
