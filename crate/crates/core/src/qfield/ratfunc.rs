use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;

use super::gcd::gcd_unchecked;
use super::modular::{Fp, PrimePoint};
use super::poly::{Poly, Var};
use crate::error::{Error, Result};

/// Quotient of two polynomials in canonical form: `gcd(num, den) = 1` and the
/// leading coefficient of `den` (graded-lex) is positive. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        if den.is_one() {
            return Ok(Self { num, den });
        }
        let g = gcd_unchecked(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Ok(Self::signed(num, den))
    }

    /// Assumes `gcd(num, den) = 1`; fixes the sign only.
    fn signed(num: Poly, den: Poly) -> Self {
        if den.leading_coeff() < BigInt::from(0) {
            Self { num: -num, den: -den }
        } else {
            Self { num, den }
        }
    }

    pub fn zero() -> Self {
        Self {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// `Some` if the denominator is 1.
    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn uses(&self, v: Var) -> bool {
        self.num.uses(v) || self.den.uses(v)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::signed(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::signed(self.num.pow(e), self.den.pow(e))
    }

    /// Substitutes `v -> q^k v` in numerator and denominator.
    pub fn shift_var(&self, v: Var, k: u32) -> Self {
        if k == 0 || !self.uses(v) {
            return self.clone();
        }
        // not an automorphism of Z[q, x]: powers of q can become common factors
        Self::new(self.num.shift_var(v, k), self.den.shift_var(v, k)).expect("shift keeps the denominator nonzero")
    }

    pub fn substitute_var(&self, from: Var, to: Var) -> Self {
        if !self.uses(from) {
            return self.clone();
        }
        Self::new(self.num.substitute_var(from, to), self.den.substitute_var(from, to))
            .expect("renaming never zeroes a nonzero denominator")
    }

    /// Specializes `xn = q^n, xj = q^j, xi = q^i`, leaving a function of `q`.
    pub fn instantiate(&self, n: i64, j: i64, i: i64) -> Result<Self> {
        let (pn, sn) = self.num.instantiate(n, j, i);
        let (pd, sd) = self.den.instantiate(n, j, i);
        if pd.is_zero() {
            return Err(Error::BadEvaluationPoint(format!(
                "denominator {} vanishes at (n, j, i) = ({n}, {j}, {i})",
                self.den
            )));
        }
        // pn / q^sn  divided by  pd / q^sd
        let (pn, pd) = if sn >= sd {
            (pn, pd.mul_monomial(&super::poly::Monomial::var(Var::Q, (sn - sd) as u32)))
        } else {
            (pn.mul_monomial(&super::poly::Monomial::var(Var::Q, (sd - sn) as u32)), pd)
        };
        Self::new(pn, pd)
    }

    /// Image modulo a prime; errors if the denominator vanishes there.
    pub fn eval(&self, pt: &PrimePoint) -> Result<Fp> {
        let n = self.num.eval(pt)?;
        let d = self.den.eval(pt)?;
        let inv = d
            .inv()
            .ok_or_else(|| Error::BadEvaluationPoint(format!("denominator {} vanishes", self.den)))?;
        Ok(n.mul(&inv))
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero denominator");
        }
        // Henrici: only the gcd of the denominators can be shared with the sum
        let g = gcd_unchecked(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFunc::signed(num, &self.den * &rhs.den);
        }
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g).expect("gcd divides");
        let t = &(&self.num * &d2) + &(&rhs.num * &d1);
        if t.is_zero() {
            return RatFunc::zero();
        }
        let g2 = gcd_unchecked(&t, &g);
        let (t, g) = if g2.is_one() {
            (t, g)
        } else {
            (t.div_exact(&g2).expect("gcd divides"), g.div_exact(&g2).expect("gcd divides"))
        };
        RatFunc::signed(t, &(&d1 * &d2) * &g)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        let g1 = gcd_unchecked(&self.num, &rhs.den);
        let g2 = gcd_unchecked(&rhs.num, &self.den);
        let cut = |p: &Poly, g: &Poly| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).expect("gcd divides")
            }
        };
        let num = &cut(&self.num, &g1) * &cut(&rhs.num, &g2);
        let den = &cut(&self.den, &g2) * &cut(&rhs.den, &g1);
        RatFunc::signed(num, den)
    }
}

/// Panics on division by zero; use [`RatFunc::checked_div`] otherwise.
impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                (&self).$method(rhs)
            }
        }
        impl $tr<RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: Poly, d: Poly) -> RatFunc {
        RatFunc::new(n, d).unwrap()
    }

    #[test]
    fn cancels_common_factor() {
        let r = rf(Poly::from_q_coeffs(&[-1, 0, 1]), Poly::from_q_coeffs(&[-1, 1]));
        assert_eq!(r, RatFunc::from_poly(Poly::from_q_coeffs(&[1, 1])));
        let x = Poly::from_q_coeffs(&[3, 0, 7]);
        assert!(rf(x.clone(), x).is_one());
    }

    #[test]
    fn sum_of_reciprocals() {
        // 1/(1-q) + 1/(1+q) = 2/(1-q^2)
        let a = rf(Poly::one(), Poly::from_q_coeffs(&[1, -1]));
        let b = rf(Poly::one(), Poly::from_q_coeffs(&[1, 1]));
        let expected = rf(Poly::constant(2), Poly::from_q_coeffs(&[1, 0, -1]));
        assert_eq!(&a + &b, expected);
        // canonical sign: positive leading denominator coefficient
        assert_eq!(expected.den(), &Poly::from_q_coeffs(&[-1, 0, 1]));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(RatFunc::new(Poly::one(), Poly::zero()), Err(Error::DivisionByZero));
        assert_eq!(RatFunc::one().checked_div(&RatFunc::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn instantiate_negative_index() {
        let xn = Poly::var(Var::Xn);
        let r = rf(&xn + &Poly::one(), xn.clone());
        // (q^-1 + 1) / q^-1 = 1 + q
        assert_eq!(r.instantiate(-1, 0, 0).unwrap(), RatFunc::from_poly(Poly::from_q_coeffs(&[1, 1])));
        let bad = rf(Poly::one(), &xn - &Poly::q());
        assert!(bad.instantiate(1, 0, 0).is_err());
    }
}
