//! q-binomials, q-Pochhammer symbols and the product formulas
//!
//! ```text
//! rhs(n) = prod_{1 <= i <= j <= k <= n} (1 - q^(i+j+k-1)) / (1 - q^(i+j+k-2))
//! b(n)   = rhs(n)^2
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::qfield::{Poly, RatFunc};

/// Multiplies out `prod (1 - q^e)^mult` for a multiset of exponents.
fn bracket_product(exps: &BTreeMap<u32, i64>) -> Poly {
    let mut acc = Poly::one();
    for (&e, &mult) in exps {
        debug_assert!(mult >= 0);
        let factor = Poly::q_bracket(e);
        for _ in 0..mult {
            acc = &acc * &factor;
        }
    }
    acc
}

/// `prod (1 - q^a) / prod (1 - q^b)` where the quotient is known to be a
/// polynomial. Common brackets are cancelled first, then the rest is divided
/// exactly.
fn bracket_quotient(num: impl IntoIterator<Item = u32>, den: impl IntoIterator<Item = u32>) -> Poly {
    let mut count: BTreeMap<u32, i64> = BTreeMap::new();
    for e in num {
        *count.entry(e).or_default() += 1;
    }
    for e in den {
        *count.entry(e).or_default() -= 1;
    }
    let top: BTreeMap<u32, i64> = count.iter().filter(|(_, &c)| c > 0).map(|(&e, &c)| (e, c)).collect();
    let bottom: BTreeMap<u32, i64> = count.iter().filter(|(_, &c)| c < 0).map(|(&e, &c)| (e, -c)).collect();
    let top = bracket_product(&top);
    if bottom.is_empty() {
        return top;
    }
    top.div_exact(&bracket_product(&bottom))
        .expect("bracket quotient is a polynomial")
}

/// Gaussian binomial coefficient; zero outside `0 <= k <= n`.
pub fn q_binomial(n: i64, k: i64) -> Poly {
    if k < 0 || k > n {
        return Poly::zero();
    }
    let k = k.min(n - k);
    let num = (0..k).map(|t| (n - t) as u32);
    let den = (1..=k).map(|t| t as u32);
    bracket_quotient(num, den)
}

/// `(q^base; q^step)_count = prod_{t < count} (1 - q^(base + t*step))`.
pub fn q_pochhammer(base_exp: i64, step_exp: i64, count: u32) -> Result<Poly> {
    let mut acc = Poly::one();
    for t in 0..count as i64 {
        let e = base_exp + t * step_exp;
        if e < 0 {
            return Err(Error::Invalid(format!("negative exponent {e} in q-Pochhammer symbol")));
        }
        if e == 0 {
            return Ok(Poly::zero());
        }
        acc = &acc * &Poly::q_bracket(e as u32);
    }
    Ok(acc)
}

fn sorted_triples(n: u32) -> impl Iterator<Item = (u32, u32, u32)> {
    (1..=n).flat_map(move |i| (i..=n).flat_map(move |j| (j..=n).map(move |k| (i, j, k))))
}

/// Orbit-counting product for totally symmetric plane partitions in `[0, n]^3`.
pub fn theorem_rhs(n: u32) -> Poly {
    bracket_quotient(
        sorted_triples(n).map(|(i, j, k)| i + j + k - 1),
        sorted_triples(n).map(|(i, j, k)| i + j + k - 2),
    )
}

/// `theorem_rhs(n)` at `q = 1`, without expanding the polynomial. Every
/// bracket `[m]` becomes `m`; exponents are netted per prime.
pub fn theorem_rhs_at_one(n: u32) -> BigInt {
    let mut exps: BTreeMap<u64, i64> = BTreeMap::new();
    let mut add = |mut m: u64, sign: i64| {
        let mut f = 2;
        while f * f <= m {
            while m.is_multiple_of(f) {
                *exps.entry(f).or_default() += sign;
                m /= f;
            }
            f += 1;
        }
        if m > 1 {
            *exps.entry(m).or_default() += sign;
        }
    };
    for (i, j, k) in sorted_triples(n) {
        let s = u64::from(i + j + k);
        add(s - 1, 1);
        add(s - 2, -1);
    }
    exps.into_iter().fold(BigInt::one(), |acc, (p, e)| {
        debug_assert!(e >= 0, "product is an integer");
        acc * BigInt::from(p).pow(e.max(0) as u32)
    })
}

/// `b_n = theorem_rhs(n)^2`, the conjectured Okada determinant.
pub fn b_value(n: u32) -> Poly {
    theorem_rhs(n).pow(2)
}

/// `b_n / b_{n-1}` in q-Pochhammer form `(q^{2n}; q)_n^2 / (q^n; q^2)_n^2`,
/// cross-checked against the quotient of the two product values.
pub fn b_ratio(n: u32) -> Result<RatFunc> {
    if n == 0 {
        return Err(Error::Invalid("b_ratio needs n >= 1".into()));
    }
    let ratio = b_ratio_pochhammer(n)?;
    let direct = RatFunc::new(b_value(n), b_value(n - 1))?;
    if ratio != direct {
        return Err(Error::Internal(format!(
            "Pochhammer form of b_{n}/b_{} disagrees with the product formula",
            n - 1
        )));
    }
    Ok(ratio)
}

/// The Pochhammer form alone, without the product-formula cross-check.
pub fn b_ratio_pochhammer(n: u32) -> Result<RatFunc> {
    let top = q_pochhammer(2 * n as i64, 1, n)?.pow(2);
    let bottom = q_pochhammer(n as i64, 2, n)?.pow(2);
    RatFunc::new(top, bottom)
}

/// Which of the two product formulas a [`QProductFormula`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    TheoremRhs,
    BValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QProductFormula {
    pub n: u32,
    pub kind: ProductKind,
    pub value: RatFunc,
}

impl QProductFormula {
    pub fn new(n: u32, kind: ProductKind) -> Self {
        let value = match kind {
            ProductKind::TheoremRhs => theorem_rhs(n),
            ProductKind::BValue => b_value(n),
        };
        Self {
            n,
            kind,
            value: RatFunc::from_poly(value),
        }
    }

    /// Value at `q = 1`, a positive integer.
    pub fn at_one(&self) -> num_bigint::BigInt {
        self.value.num().at_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn qp(c: &[i64]) -> Poly {
        Poly::from_q_coeffs(c)
    }

    #[test]
    fn value_at_one_without_expanding() {
        for n in 0..7 {
            assert_eq!(theorem_rhs_at_one(n), theorem_rhs(n).at_one());
        }
        assert_eq!(theorem_rhs_at_one(5), BigInt::from(352));
    }

    #[test]
    fn binomial_examples() {
        for n in 0..6 {
            assert_eq!(q_binomial(n, 0), Poly::one());
        }
        assert_eq!(q_binomial(2, 1), qp(&[1, 1]));
        assert_eq!(q_binomial(4, 2), qp(&[1, 1, 2, 1, 1]));
        assert!(q_binomial(3, 4).is_zero());
        assert!(q_binomial(3, -1).is_zero());
        assert!(q_binomial(-2, 1).is_zero());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(q_pochhammer(5, 3, 0).unwrap(), Poly::one());
        assert_eq!(q_pochhammer(1, 1, 2).unwrap(), &qp(&[1, -1]) * &qp(&[1, 0, -1]));
        // (q^2;q)_1^2 / (q;q^2)_1^2 = (1+q)^2
        assert_eq!(b_ratio_pochhammer(1).unwrap(), RatFunc::from_poly(qp(&[1, 2, 1])));
    }

    #[test]
    fn product_formulas() {
        assert_eq!(theorem_rhs(0), Poly::one());
        assert_eq!(theorem_rhs(1), qp(&[1, 1]));
        assert_eq!(theorem_rhs(2), qp(&[1, 1, 1, 1, 1]));
        assert_eq!(b_value(0), Poly::one());
        assert_eq!(b_value(1), qp(&[1, 2, 1]));
        assert_eq!(b_value(2), qp(&[1, 1, 1, 1, 1]).pow(2));
    }

    #[test]
    fn counts_at_one() {
        let expected = [1u64, 2, 5, 16, 66, 352, 2431];
        for (n, &e) in expected.iter().enumerate() {
            let f = QProductFormula::new(n as u32, ProductKind::TheoremRhs);
            assert_eq!(f.at_one(), BigInt::from(e));
            assert!(f.value.as_poly().is_some());
        }
    }

    #[test]
    fn ratio_both_ways() {
        assert_eq!(b_ratio(1).unwrap(), RatFunc::from_poly(qp(&[1, 2, 1])));
        let two = b_ratio(2).unwrap();
        assert_eq!(two, RatFunc::new(b_value(2), b_value(1)).unwrap());
        assert!(b_ratio(0).is_err());
    }

    #[test]
    fn pascal_symmetry_and_specialization() {
        for n in 1..=20i64 {
            for k in 0..=n {
                let pascal = &q_binomial(n - 1, k - 1) + &(&Poly::q_pow(k as u32) * &q_binomial(n - 1, k));
                assert_eq!(q_binomial(n, k), pascal, "pascal at ({n},{k})");
                assert_eq!(q_binomial(n, k), q_binomial(n, n - k));
                let ordinary = num_integer::binomial(BigInt::from(n), BigInt::from(k));
                assert_eq!(q_binomial(n, k).at_one(), ordinary);
            }
        }
    }

    #[test]
    fn b_is_square_and_ratio_matches() {
        for n in 1..=8 {
            assert_eq!(b_value(n), theorem_rhs(n).pow(2));
            assert_eq!(
                b_ratio_pochhammer(n).unwrap(),
                RatFunc::new(b_value(n), b_value(n - 1)).unwrap(),
                "n = {n}"
            );
        }
    }
}
