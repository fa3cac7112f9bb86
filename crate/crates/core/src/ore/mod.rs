//! Shift operators over `Q(q, q^n, q^j, q^i)`.
//!
//! An operator is a finite sum `sum c_u S_n^a S_j^b S_i^c` plus an optional
//! inhomogeneous term `p0`. Shifts twist coefficients:
//!
//! ```text
//! S_n f(q, xn, xj, xi) = f(q, q xn, xj, xi) S_n
//! ```
//!
//! Applied to a sequence `T`, `L(T)(p) = sum_u c_u(p) T(p + u) + p0(p)`.
//! Products compose these affine maps, so `A * B` means "apply B, then A".

mod division;
pub mod fixtures;
mod json;
mod table;
mod telescoping;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::qfield::{Poly, RatFunc, Var};

pub use division::{
    certify_constant_diagonal, homogenize, is_left_multiple, right_divide, substitute_diagonal, DiagonalCertificate,
};
pub use table::{annihilates, annihilates_with, apply, AnnihilationReport, SequenceTable, TableMode, Value};
pub use telescoping::{verify_telescoping, TelescopeReport, TelescopingCertificate};

pub const DEFAULT_MIN_ADMISSIBLE: usize = 25;

/// A lattice point `(n, j, i)`; two-index data uses `i = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub n: i64,
    pub j: i64,
    #[serde(default)]
    pub i: i64,
}

impl Point {
    pub fn new(n: i64, j: i64, i: i64) -> Self {
        Self { n, j, i }
    }

    pub fn nj(n: i64, j: i64) -> Self {
        Self { n, j, i: 0 }
    }

    pub fn shifted(self, s: Shift) -> Self {
        Self {
            n: self.n + s.n as i64,
            j: self.j + s.j as i64,
            i: self.i + s.i as i64,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.i == 0 {
            write!(f, "(n={}, j={})", self.n, self.j)
        } else {
            write!(f, "(n={}, j={}, i={})", self.n, self.j, self.i)
        }
    }
}

/// Exponents of `S_n^n S_j^j S_i^i`. Ordered by `n`, then `j`, then `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shift {
    pub n: u32,
    pub j: u32,
    pub i: u32,
}

impl Shift {
    pub const ZERO: Shift = Shift { n: 0, j: 0, i: 0 };

    pub fn new(n: u32, j: u32, i: u32) -> Self {
        Self { n, j, i }
    }

    pub fn nj(n: u32, j: u32) -> Self {
        Self { n, j, i: 0 }
    }

    fn plus(self, o: Shift) -> Shift {
        Shift {
            n: self.n + o.n,
            j: self.j + o.j,
            i: self.i + o.i,
        }
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("Sn", self.n), ("Sj", self.j), ("Si", self.i)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Applies the shift `u` to the coefficient `f`: `xn -> q^a xn` and so on.
pub fn shift_coeff(f: &RatFunc, u: Shift) -> RatFunc {
    if u == Shift::ZERO {
        return f.clone();
    }
    let sh = |p: &Poly| p.shift_var(Var::Xn, u.n).shift_var(Var::Xj, u.j).shift_var(Var::Xi, u.i);
    RatFunc::new(sh(f.num()), sh(f.den())).expect("shifts keep denominators nonzero")
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct OreOperator {
    terms: BTreeMap<Shift, RatFunc>,
    inhomogeneous: Option<RatFunc>,
}

impl OreOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(Shift::ZERO, RatFunc::one())
    }

    pub fn term(s: Shift, c: RatFunc) -> Self {
        Self::from_terms([(s, c)], None)
    }

    /// `S_n^a S_j^b` with coefficient 1.
    pub fn shift(a: u32, b: u32) -> Self {
        Self::term(Shift::nj(a, b), RatFunc::one())
    }

    pub fn constant(c: RatFunc) -> Self {
        Self::term(Shift::ZERO, c)
    }

    /// Sums repeated shifts and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Shift, RatFunc)>, inhomogeneous: Option<RatFunc>) -> Self {
        let mut map: BTreeMap<Shift, RatFunc> = BTreeMap::new();
        for (s, c) in terms {
            let e = map.entry(s).or_insert_with(RatFunc::zero);
            *e = &*e + &c;
        }
        map.retain(|_, c| !c.is_zero());
        Self {
            terms: map,
            inhomogeneous: inhomogeneous.filter(|p| !p.is_zero()),
        }
    }

    /// Univariate operator `sum_k coeffs[k] S_n^k`.
    pub fn from_sn_coeffs(coeffs: &[RatFunc]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(k, c)| (Shift::nj(k as u32, 0), c.clone())), None)
    }

    pub fn with_inhomogeneous(mut self, p0: Option<RatFunc>) -> Self {
        self.inhomogeneous = p0.filter(|p| !p.is_zero());
        self
    }

    pub fn terms(&self) -> &BTreeMap<Shift, RatFunc> {
        &self.terms
    }

    pub fn coeff(&self, s: Shift) -> RatFunc {
        self.terms.get(&s).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn inhomogeneous(&self) -> Option<&RatFunc> {
        self.inhomogeneous.as_ref()
    }

    pub fn homogeneous_part(&self) -> OreOperator {
        Self {
            terms: self.terms.clone(),
            inhomogeneous: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.inhomogeneous.is_none()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.inhomogeneous.is_none()
    }

    /// Largest shift and its coefficient.
    pub fn leading(&self) -> Option<(Shift, &RatFunc)> {
        self.terms.iter().next_back().map(|(s, c)| (*s, c))
    }

    /// Only `S_n` shifts and no inhomogeneous term.
    pub fn is_univariate(&self) -> bool {
        self.inhomogeneous.is_none() && self.terms.keys().all(|s| s.j == 0 && s.i == 0)
    }

    /// Highest power of `S_n`; `None` for the zero operator.
    pub fn order_n(&self) -> Option<u32> {
        self.terms.keys().map(|s| s.n).max()
    }

    pub fn max_shift(&self) -> Shift {
        Shift {
            n: self.terms.keys().map(|s| s.n).max().unwrap_or(0),
            j: self.terms.keys().map(|s| s.j).max().unwrap_or(0),
            i: self.terms.keys().map(|s| s.i).max().unwrap_or(0),
        }
    }

    pub fn uses_var(&self, v: Var) -> bool {
        self.terms.values().chain(self.inhomogeneous.iter()).any(|c| c.uses(v))
    }

    /// Left multiplication by a coefficient: `f * L`.
    pub fn scale_left(&self, f: &RatFunc) -> OreOperator {
        Self::from_terms(
            self.terms.iter().map(|(s, c)| (*s, f * c)),
            self.inhomogeneous.as_ref().map(|p| f * p),
        )
    }

    /// Maps every coefficient, including the inhomogeneous term.
    pub fn map_coeffs(&self, mut f: impl FnMut(&RatFunc) -> RatFunc) -> OreOperator {
        let terms: Vec<(Shift, RatFunc)> = self.terms.iter().map(|(s, c)| (*s, f(c))).collect();
        Self::from_terms(terms, self.inhomogeneous.as_ref().map(f))
    }

    /// Composition `self * rhs`. The inhomogeneous term of the product is
    /// `sum_u a_u sigma^u(b0) + a0`; left distributivity therefore only holds
    /// for homogeneous `self`.
    pub fn op_multiply(&self, rhs: &OreOperator) -> OreOperator {
        let mut terms: Vec<(Shift, RatFunc)> = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        let mut p0 = self.inhomogeneous.clone().unwrap_or_else(RatFunc::zero);
        for (&u, a) in &self.terms {
            for (&v, b) in &rhs.terms {
                terms.push((u.plus(v), a * &shift_coeff(b, u)));
            }
            if let Some(b0) = &rhs.inhomogeneous {
                p0 = &p0 + &(a * &shift_coeff(b0, u));
            }
        }
        Self::from_terms(terms, Some(p0))
    }
}

impl Add for &OreOperator {
    type Output = OreOperator;
    fn add(self, rhs: &OreOperator) -> OreOperator {
        let p0 = match (&self.inhomogeneous, &rhs.inhomogeneous) {
            (None, None) => None,
            (a, b) => Some(&a.clone().unwrap_or_default() + &b.clone().unwrap_or_default()),
        };
        OreOperator::from_terms(self.terms.iter().chain(&rhs.terms).map(|(s, c)| (*s, c.clone())), p0)
    }
}

impl Neg for &OreOperator {
    type Output = OreOperator;
    fn neg(self) -> OreOperator {
        self.map_coeffs(|c| -c)
    }
}

impl Sub for &OreOperator {
    type Output = OreOperator;
    fn sub(self, rhs: &OreOperator) -> OreOperator {
        self + &(-rhs)
    }
}

impl Mul for &OreOperator {
    type Output = OreOperator;
    fn mul(self, rhs: &OreOperator) -> OreOperator {
        self.op_multiply(rhs)
    }
}

impl fmt::Display for OreOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*{s}")?;
        }
        if let Some(p0) = &self.inhomogeneous {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "[{p0}]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for OreOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xn() -> RatFunc {
        RatFunc::from_poly(Poly::var(Var::Xn))
    }

    #[test]
    fn commutation_rule() {
        let sn = OreOperator::shift(1, 0);
        let prod = &sn * &OreOperator::constant(xn());
        let qxn = RatFunc::from_poly(&Poly::q() * &Poly::var(Var::Xn));
        assert_eq!(prod, OreOperator::term(Shift::nj(1, 0), qxn));
        let sj = OreOperator::shift(0, 2);
        let xj = RatFunc::from_poly(Poly::var(Var::Xj));
        let q2xj = RatFunc::from_poly(&Poly::q_pow(2) * &Poly::var(Var::Xj));
        assert_eq!(&sj * &OreOperator::constant(xj), OreOperator::term(Shift::nj(0, 2), q2xj));
    }

    #[test]
    fn small_products() {
        let one = OreOperator::one();
        let sn = OreOperator::shift(1, 0);
        let p = &(&sn + &one) * &(&sn - &one);
        assert_eq!(p, &OreOperator::shift(2, 0) - &one);
        let a = &(&sn * &OreOperator::constant(xn())) + &one;
        assert_eq!(&a * &one, a);
        assert_eq!(&one * &a, a);
    }

    #[test]
    fn affine_composition() {
        // B(T) = T + 1, A(T) = Sn T; A(B(T)) = T(n+1) + 1
        let b = OreOperator::one().with_inhomogeneous(Some(RatFunc::one()));
        let a = OreOperator::shift(1, 0);
        let ab = &a * &b;
        assert_eq!(ab.coeff(Shift::nj(1, 0)), RatFunc::one());
        assert_eq!(ab.inhomogeneous(), Some(&RatFunc::one()));
        // B(A(T)) = T(n+1) + 1 as well, but B's constant is not shifted
        let ba = &b * &a;
        assert_eq!(ba, ab);
        let c = OreOperator::one().with_inhomogeneous(Some(xn()));
        let sc = &a * &c;
        let qxn = RatFunc::from_poly(&Poly::q() * &Poly::var(Var::Xn));
        assert_eq!(sc.inhomogeneous(), Some(&qxn));
    }

    #[test]
    fn zero_terms_dropped() {
        let a = OreOperator::shift(1, 0);
        assert!((&a - &a).is_zero());
        assert_eq!(a.leading().unwrap().0, Shift::nj(1, 0));
        assert!(a.is_univariate());
        assert!(!OreOperator::shift(1, 1).is_univariate());
        assert_eq!(format!("{}", &a - &OreOperator::one()), "(1)*Sn + (-1)*1");
    }
}
