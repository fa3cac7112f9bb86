//! Univariate skew division, diagonal substitution and the constant-diagonal
//! argument built on them.

use super::table::{annihilates_with, SequenceTable, Value};
use super::{shift_coeff, OreOperator, Point, Shift};
use crate::error::{Error, Result};
use crate::qfield::{RatFunc, Var};

/// `j -> n` on a diagonal-shaped operator: `S_n^k S_j^k -> S_n^k` and
/// `xj -> xn` in every coefficient.
pub fn substitute_diagonal(a: &OreOperator) -> Result<OreOperator> {
    if let Some(s) = a.terms().keys().find(|s| s.n != s.j) {
        return Err(Error::NotDiagonal).inspect_err(|_| log::debug!("term {s} is not a pure diagonal shift"));
    }
    let sub = |c: &RatFunc| c.substitute_var(Var::Xj, Var::Xn);
    Ok(OreOperator::from_terms(
        a.terms().iter().map(|(s, c)| (Shift::new(s.n, 0, s.i), sub(c))),
        a.inhomogeneous().map(sub),
    ))
}

fn require_univariate(a: &OreOperator, what: &str) -> Result<()> {
    if a.is_univariate() {
        Ok(())
    } else {
        Err(Error::NotUnivariate(format!("{what} must use S_n only and be homogeneous")))
    }
}

/// Skew Euclidean division `a = q * b + r` with `ord(r) < ord(b)`.
pub fn right_divide(a: &OreOperator, b: &OreOperator) -> Result<(OreOperator, OreOperator)> {
    require_univariate(a, "dividend")?;
    require_univariate(b, "divisor")?;
    let Some((lead, be)) = b.leading() else {
        return Err(Error::DivisionByZero);
    };
    let e = lead.n;
    let mut quot = OreOperator::zero();
    let mut rem = a.clone();
    while let Some(m) = rem.order_n().filter(|&m| m >= e) {
        let k = Shift::nj(m - e, 0);
        let c = &rem.coeff(Shift::nj(m, 0)) / &shift_coeff(be, k);
        let t = OreOperator::term(k, c);
        rem = &rem - &(&t * b);
        debug_assert!(rem.order_n().is_none_or(|r| r < m));
        quot = &quot + &t;
    }
    Ok((quot, rem))
}

/// True iff `b` divides `a` from the right.
pub fn is_left_multiple(a: &OreOperator, b: &OreOperator) -> Result<bool> {
    Ok(right_divide(a, b)?.1.is_zero())
}

/// For `L = L_h + p0` returns `(S_n - 1) p0^(-1) L_h`, which annihilates every
/// solution of `L = 0`. Homogeneous input comes back unchanged.
pub fn homogenize(l: &OreOperator) -> Result<OreOperator> {
    let h = l.homogeneous_part();
    require_univariate(&h, "operator")?;
    let Some(p0) = l.inhomogeneous() else {
        return Ok(h);
    };
    let m = h.scale_left(&p0.inv()?);
    Ok(&(&OreOperator::shift(1, 0) - &OreOperator::one()) * &m)
}

/// Outcome of [`certify_constant_diagonal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalCertificate {
    /// Homogenized univariate operator.
    pub operator: OreOperator,
    /// `operator = quotient * (S_n - 1)` when `right_factor` holds.
    pub quotient: OreOperator,
    pub right_factor: bool,
    pub annihilates_table: bool,
    /// Initial values the recurrence needs, `order - lowest shift`.
    pub required_initial: usize,
    pub initial_checked: usize,
    pub initial_ok: bool,
    /// Leading coefficient defined and nonzero at every induction step.
    pub leading_ok: bool,
    pub window: (i64, i64),
    pub concluded: bool,
}

fn is_one(v: &Value) -> bool {
    match v {
        Value::Exact(r) => r.is_one(),
        Value::Mod(x) => x.value() == 1,
    }
}

/// The constant-diagonal argument. `op` is a univariate recurrence for the
/// diagonal (possibly inhomogeneous) and `diag` the diagonal values indexed
/// `(n, 0)`. If the homogenized operator has `S_n - 1` as a right factor, the
/// first `initial` values are 1 and the leading coefficient never vanishes on
/// the window, then `diag - 1` solves the recurrence with zero initial values
/// and is zero on the whole window.
pub fn certify_constant_diagonal(op: &OreOperator, diag: &SequenceTable, initial: usize) -> Result<DiagonalCertificate> {
    let h = homogenize(op)?;
    let (quotient, rem) = right_divide(&h, &(&OreOperator::shift(1, 0) - &OreOperator::one()))?;
    let (Some(top), Some(low)) = (h.order_n(), h.terms().keys().map(|s| s.n).min()) else {
        return Err(Error::Invalid("the zero operator certifies nothing".into()));
    };
    let required = (top - low) as usize;
    if initial < required {
        return Err(Error::InsufficientData {
            needed: required,
            available: initial,
            detail: format!("a recurrence of order {top} with lowest shift {low} needs {required} initial values"),
        });
    }
    let ns: Vec<i64> = diag.points().iter().filter(|p| p.j == 0 && p.i == 0).map(|p| p.n).collect();
    let (Some(&lo), Some(&hi)) = (ns.first(), ns.last()) else {
        return Err(Error::NoAdmissiblePoints { found: 0, required: 1 });
    };
    if (ns.len() as i64) != hi - lo + 1 {
        return Err(Error::Invalid("diagonal table must cover a contiguous range of n".into()));
    }
    let at = |n: i64| Point::nj(n, 0);
    let initial_ok = (lo..lo + initial as i64).all(|n| diag.get(&at(n)).is_some_and(|v| is_one(&v)));
    let lead = h.coeff(Shift::nj(top, 0));
    let first = lo - low as i64;
    let leading_ok = (first..=hi - top as i64).all(|m| {
        let defined = h.terms().values().all(|c| c.instantiate(m, 0, 0).is_ok());
        defined && lead.instantiate(m, 0, 0).is_ok_and(|v| !v.is_zero())
    });
    let annihilates_table = annihilates_with(&h, diag, 1)?.holds();
    let right_factor = rem.is_zero();
    Ok(DiagonalCertificate {
        concluded: right_factor && annihilates_table && initial_ok && leading_ok,
        operator: h,
        quotient,
        right_factor,
        annihilates_table,
        required_initial: required,
        initial_checked: initial,
        initial_ok,
        leading_ok,
        window: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::Poly;

    fn rf(p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }

    fn sn(k: u32) -> OreOperator {
        OreOperator::shift(k, 0)
    }

    #[test]
    fn division_examples() {
        let one = OreOperator::one();
        let (q, r) = right_divide(&(&sn(2) - &one), &(&sn(1) - &one)).unwrap();
        assert_eq!(q, &sn(1) + &one);
        assert!(r.is_zero());
        let (_, r) = right_divide(&(&sn(1) - &OreOperator::constant(rf(Poly::q()))), &(&sn(1) - &one)).unwrap();
        assert!(!r.is_zero());
        assert!(right_divide(&sn(1), &OreOperator::zero()).is_err());
        assert!(right_divide(&OreOperator::shift(1, 1), &sn(1)).is_err());
    }

    #[test]
    fn twisted_division_recombines() {
        let xn = rf(Poly::var(Var::Xn));
        let b = &OreOperator::term(Shift::nj(1, 0), xn.clone()) - &OreOperator::constant(rf(Poly::q()));
        let a = &(&sn(2) * &OreOperator::constant(xn.clone())) + &OreOperator::constant(rf(Poly::from_q_coeffs(&[1, 1])));
        let (q, r) = right_divide(&a, &b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.order_n().is_none_or(|o| o < 1));
        let multiple = &(&sn(1) + &OreOperator::constant(xn)) * &b;
        assert!(is_left_multiple(&multiple, &b).unwrap());
        assert!(!is_left_multiple(&b, &multiple).unwrap());
    }

    #[test]
    fn diagonal_substitution_examples() {
        let xj = rf(Poly::var(Var::Xj));
        let xn = rf(Poly::var(Var::Xn));
        let p = |x: &RatFunc| x * &rf(Poly::from_q_coeffs(&[1, 1]));
        let a = &OreOperator::term(Shift::nj(1, 1), p(&xj)) - &OreOperator::constant(p(&xn));
        let expected = &OreOperator::term(Shift::nj(1, 0), p(&xn)) - &OreOperator::constant(p(&xn));
        assert_eq!(substitute_diagonal(&a).unwrap(), expected);
        let b = &OreOperator::shift(2, 2) - &OreOperator::one();
        assert_eq!(substitute_diagonal(&b).unwrap(), &sn(2) - &OreOperator::one());
        assert_eq!(substitute_diagonal(&OreOperator::shift(1, 0)), Err(Error::NotDiagonal));
    }

    #[test]
    fn homogenized_recurrence() {
        // T(n+1) - 1 = 0, i.e. S_n with p0 = -1
        let l = sn(1).with_inhomogeneous(Some(RatFunc::from_int(-1)));
        let h = homogenize(&l).unwrap();
        assert_eq!(h, &sn(1) - &sn(2));
        assert!(is_left_multiple(&h, &(&sn(1) - &OreOperator::one())).unwrap());
    }

    #[test]
    fn constant_diagonal_certificate() {
        let ones = SequenceTable::from_fn_exact((1..=20).map(|n| Point::nj(n, 0)), |_| RatFunc::one());
        let l = sn(1).with_inhomogeneous(Some(RatFunc::from_int(-1)));
        let cert = certify_constant_diagonal(&l, &ones, 7).unwrap();
        assert!(cert.concluded, "{cert:?}");
        assert_eq!(cert.required_initial, 1);
        assert_eq!(cert.window, (1, 20));
        // a table that is 1 only at the start is caught by the annihilation check
        let bent = SequenceTable::from_fn_exact((1..=20).map(|n| Point::nj(n, 0)), |p| {
            RatFunc::from_int(if p.n < 10 { 1 } else { 2 })
        });
        assert!(!certify_constant_diagonal(&l, &bent, 7).unwrap().concluded);
        let too_few = certify_constant_diagonal(&(&sn(3) - &OreOperator::one()), &ones, 2);
        assert!(matches!(too_few, Err(Error::InsufficientData { needed: 3, .. })));
    }
}
