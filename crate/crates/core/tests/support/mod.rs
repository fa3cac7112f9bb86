#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use qtspp_core::ore::fixtures::{random_univariate, rng};
use qtspp_core::ore::{right_divide, OreOperator};
use qtspp_core::qfield::modular::default_primes;
use qtspp_core::qfield::{gcd, Monomial, Poly, PrimePoint, RatFunc, Var};

pub fn poly_with(max_terms: usize, max_exp: u32, coeff: i64) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (
            (0..=max_exp, 0..=max_exp, 0..=max_exp.min(2), 0..=1u32),
            -coeff..=coeff,
        ),
        0..=max_terms,
    )
    .prop_map(|ts| {
        Poly::from_terms(
            ts.into_iter()
                .map(|((a, b, c, d), k)| (Monomial([a, b, c, d]), BigInt::from(k))),
        )
    })
}

pub fn poly() -> impl Strategy<Value = Poly> {
    poly_with(5, 3, 20)
}

pub fn nonzero_poly() -> impl Strategy<Value = Poly> {
    poly_with(4, 2, 9).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly_with(3, 2, 9), nonzero_poly()).prop_map(|(n, d)| RatFunc::new(n, d).expect("nonzero den"))
}

/// Prime point with every variable assigned.
pub fn prime_point() -> impl Strategy<Value = PrimePoint> {
    (2u64..1_000_000, any::<u64>(), any::<u64>(), any::<u64>()).prop_map(|(q, a, b, c)| {
        let p = default_primes(1)[0];
        PrimePoint::new(p, q)
            .expect("small q has large order")
            .with(Var::Xn, a)
            .with(Var::Xj, b)
            .with(Var::Xi, c)
    })
}

pub fn poly_ring_laws(a: &Poly, b: &Poly, c: &Poly) -> Result<(), TestCaseError> {
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + &Poly::zero(), a.clone());
    prop_assert_eq!(a * &Poly::one(), a.clone());
    prop_assert!((a - &a.clone()).is_zero());
    prop_assert_eq!(&(a - b) + b, a.clone());
    Ok(())
}

pub fn ratfunc_field_laws(x: &RatFunc, y: &RatFunc, z: &RatFunc) -> Result<(), TestCaseError> {
    prop_assert_eq!(x + y, y + x);
    prop_assert_eq!(x * y, y * x);
    prop_assert_eq!(&(x + y) + z, x + &(y + z));
    prop_assert_eq!(&(x * y) * z, x * &(y * z));
    prop_assert_eq!(x * &(y + z), &(x * y) + &(x * z));
    if !y.is_zero() {
        prop_assert_eq!(&(x / y) * y, x.clone());
    }
    Ok(())
}

/// Scaling numerator and denominator by a common factor changes nothing, and
/// the stored form has coprime parts with a positive leading denominator.
pub fn canonical_form(n: &Poly, d: &Poly, g: &Poly) -> Result<(), TestCaseError> {
    let r = RatFunc::new(n.clone(), d.clone()).unwrap();
    let scaled = RatFunc::new(n * g, d * g).unwrap();
    prop_assert_eq!(&r, &scaled);
    let h = gcd(r.num(), r.den()).unwrap();
    prop_assert!(h.is_one(), "gcd of parts is {}", h);
    prop_assert!(r.den().leading_coeff() > BigInt::from(0));
    Ok(())
}

pub fn gcd_laws(a: &Poly, b: &Poly, c: &Poly) -> Result<(), TestCaseError> {
    if a.is_zero() && b.is_zero() {
        prop_assert!(gcd(a, b).is_err());
        return Ok(());
    }
    let g = gcd(a, b).unwrap();
    prop_assert!(a.div_exact(&g).is_some(), "gcd does not divide a");
    prop_assert!(b.div_exact(&g).is_some(), "gcd does not divide b");
    let (a1, b1) = (a.div_exact(&g).unwrap(), b.div_exact(&g).unwrap());
    if !(a1.is_zero() && b1.is_zero()) {
        prop_assert!(gcd(&a1, &b1).unwrap().is_one());
    }
    prop_assert_eq!(gcd(b, a).unwrap(), g.clone());
    if !c.is_zero() {
        prop_assert_eq!(gcd(&(a * c), &(b * c)).unwrap(), (&g * c).normalize_sign());
    }
    Ok(())
}

pub fn eval_homomorphism(a: &Poly, b: &Poly, x: &RatFunc, y: &RatFunc, pt: &PrimePoint) -> Result<(), TestCaseError> {
    let (ea, eb) = (a.eval(pt).unwrap(), b.eval(pt).unwrap());
    prop_assert_eq!((a + b).eval(pt).unwrap(), ea.add(&eb));
    prop_assert_eq!((a * b).eval(pt).unwrap(), ea.mul(&eb));
    prop_assert_eq!((a - b).eval(pt).unwrap(), ea.sub(&eb));
    if let (Ok(ex), Ok(ey)) = (x.eval(pt), y.eval(pt)) {
        prop_assert_eq!((x * y).eval(pt).unwrap(), ex.mul(&ey));
        prop_assert_eq!((x + y).eval(pt).unwrap(), ex.add(&ey));
    }
    Ok(())
}

/// Random univariate operators from a seed.
pub fn division_pair(seed: u64) -> (OreOperator, OreOperator) {
    let mut r = rng(seed);
    use rand::Rng;
    let (oa, ob) = (r.gen_range(0..=4), r.gen_range(0..=2));
    (random_univariate(&mut r, oa, 2), random_univariate(&mut r, ob, 2))
}

pub fn division_recombines(a: &OreOperator, b: &OreOperator) -> Result<(), TestCaseError> {
    let (q, rem) = right_divide(a, b).unwrap();
    prop_assert_eq!(&(&q * b) + &rem, a.clone());
    let ob = b.order_n().unwrap();
    prop_assert!(rem.order_n().is_none_or(|r| r < ob), "remainder order too high");
    Ok(())
}
