//! Creative-telescoping certificates.
//!
//! A certificate for a summand `F(n, j, i)` is a pair `(P, C)` where `P` acts
//! on `n` and `i` only and `t = C(F)` is a combination of shifts of `F`, with
//!
//! ```text
//! P(F)(n, j, i) = t(n, j+1, i) - t(n, j, i)      for all j.
//! ```
//!
//! Summing over `j` then gives `P(sum_j F) = 0`.

use std::collections::BTreeSet;

use super::table::{coeff_times, value_add, value_sub, zero_value, SequenceTable, TableMode, Value};
use super::{OreOperator, Point, Shift};
use crate::error::{Error, Result};
use crate::qfield::Var;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopingCertificate {
    operator: OreOperator,
    certificate: OreOperator,
}

impl TelescopingCertificate {
    /// `operator` must be homogeneous, free of `S_j` and free of `xj`.
    pub fn new(operator: OreOperator, certificate: OreOperator) -> Result<Self> {
        if !operator.is_homogeneous() {
            return Err(Error::Invalid("the telescoper must be homogeneous".into()));
        }
        if operator.terms().keys().any(|s| s.j != 0) {
            return Err(Error::Invalid("the telescoper must not shift j".into()));
        }
        if operator.uses_var(Var::Xj) {
            return Err(Error::Invalid("telescoper coefficients must not depend on q^j".into()));
        }
        Ok(Self { operator, certificate })
    }

    pub fn operator(&self) -> &OreOperator {
        &self.operator
    }

    pub fn certificate(&self) -> &OreOperator {
        &self.certificate
    }

    pub fn into_parts(self) -> (OreOperator, OreOperator) {
        (self.operator, self.certificate)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopeReport {
    /// `(n, i)` pairs at which the relation was checked.
    pub rows_checked: usize,
    pub points_checked: usize,
    pub pointwise_ok: bool,
    /// `t` vanishes just outside the window.
    pub boundary_ok: bool,
    /// `sum_j P(F)` vanishes on every checked row.
    pub sum_ok: bool,
    pub first_failure: Option<Point>,
}

impl TelescopeReport {
    pub fn verified(&self) -> bool {
        self.rows_checked > 0 && self.pointwise_ok && self.boundary_ok && self.sum_ok
    }
}

struct Summand<'a> {
    table: &'a SequenceTable,
    window: (i64, i64),
    mode: TableMode,
}

impl Summand<'_> {
    /// `F` at `p`, zero outside the window.
    fn get(&self, p: Point) -> Result<Value> {
        if p.j < self.window.0 || p.j > self.window.1 {
            return Ok(zero_value(&self.mode));
        }
        self.table.get(&p).ok_or(Error::MissingPoint(p))
    }

    /// `sum_u c_u(at) F(at + u) + c0(at)`; terms whose `F` value is zero are
    /// skipped without evaluating their coefficient.
    fn apply(&self, op: &OreOperator, at: Point) -> Result<Value> {
        let mut acc = zero_value(&self.mode);
        for (&u, c) in op.terms() {
            let v = self.get(at.shifted(u))?;
            if !v.is_zero() {
                acc = value_add(&acc, &coeff_times(c, at, &v, &self.mode)?)?;
            }
        }
        if let Some(c0) = op.inhomogeneous() {
            let one = match &self.mode {
                TableMode::Exact => Value::Exact(crate::qfield::RatFunc::one()),
                TableMode::Modular(pt) => Value::Mod(pt.fp(1)),
            };
            acc = value_add(&acc, &coeff_times(c0, at, &one, &self.mode)?)?;
        }
        Ok(acc)
    }
}

/// Checks a certificate against a summand table that is treated as zero for
/// `j` outside `window`. Every `(n, i)` row whose required rows are complete on
/// the window is checked for `j` in `[lo - B - 1, hi]`, `B` the largest `j`
/// shift in the certificate; outside that range both sides vanish.
pub fn verify_telescoping(
    cert: &TelescopingCertificate,
    f: &SequenceTable,
    window: (i64, i64),
) -> Result<TelescopeReport> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::Invalid(format!("empty window [{lo}, {hi}]")));
    }
    let rows: BTreeSet<(i64, i64)> = f.points().iter().map(|p| (p.n, p.i)).collect();
    let complete: BTreeSet<(i64, i64)> = rows
        .iter()
        .copied()
        .filter(|&(n, i)| (lo..=hi).all(|j| f.contains(&Point::new(n, j, i))))
        .collect();
    let needed: BTreeSet<(u32, u32)> = cert
        .operator
        .terms()
        .keys()
        .chain(cert.certificate.terms().keys())
        .map(|s| (s.n, s.i))
        .collect();
    let bases: BTreeSet<(i64, i64)> = if needed.is_empty() {
        complete.clone()
    } else {
        complete
            .iter()
            .flat_map(|&(n, i)| needed.iter().map(move |&(a, c)| (n - a as i64, i - c as i64)))
            .filter(|&(n, i)| needed.iter().all(|&(a, c)| complete.contains(&(n + a as i64, i + c as i64))))
            .collect()
    };
    if bases.is_empty() {
        return Err(Error::NoAdmissiblePoints { found: 0, required: 1 });
    }
    let summand = Summand {
        table: f,
        window,
        mode: f.mode(),
    };
    let b = cert.certificate.terms().keys().map(|s| s.j).max().unwrap_or(0) as i64;
    let j_lo = lo - b - 1;
    let mut report = TelescopeReport {
        rows_checked: bases.len(),
        points_checked: 0,
        pointwise_ok: true,
        boundary_ok: true,
        sum_ok: true,
        first_failure: None,
    };
    let shift_j = Shift::nj(0, 1);
    for &(n, i) in &bases {
        let mut t_prev = summand.apply(&cert.certificate, Point::new(n, j_lo, i))?;
        if !t_prev.is_zero() {
            report.boundary_ok = false;
            report.first_failure.get_or_insert(Point::new(n, j_lo, i));
        }
        let mut lhs_sum = zero_value(&summand.mode);
        for j in j_lo..=hi {
            let at = Point::new(n, j, i);
            let lhs = summand.apply(&cert.operator, at)?;
            let t_next = summand.apply(&cert.certificate, at.shifted(shift_j))?;
            let rhs = value_sub(&t_next, &t_prev)?;
            report.points_checked += 1;
            if lhs != rhs {
                report.pointwise_ok = false;
                report.first_failure.get_or_insert(at);
            }
            lhs_sum = value_add(&lhs_sum, &lhs)?;
            t_prev = t_next;
        }
        // t_prev is now t(hi + 1)
        if !t_prev.is_zero() {
            report.boundary_ok = false;
            report.first_failure.get_or_insert(Point::new(n, hi + 1, i));
        }
        if !lhs_sum.is_zero() {
            report.sum_ok = false;
            report.first_failure.get_or_insert(Point::new(n, j_lo, i));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::RatFunc;

    fn table(f: impl Fn(i64, i64) -> i64) -> SequenceTable {
        SequenceTable::from_fn_exact(
            (0..5).flat_map(|n| (0..=4).map(move |j| Point::nj(n, j))),
            |p| RatFunc::from_int(f(p.n, p.j)),
        )
    }

    #[test]
    fn zero_pair_always_verifies() {
        let cert = TelescopingCertificate::new(OreOperator::zero(), OreOperator::zero()).unwrap();
        let r = verify_telescoping(&cert, &table(|n, j| n * j + 1), (0, 4)).unwrap();
        assert!(r.verified());
        assert_eq!(r.rows_checked, 5);
    }

    #[test]
    fn identity_operator_with_prefix_sum_certificate() {
        // F(n, j) = [j <= n] does not sum to zero
        let f = table(|n, j| (j <= n) as i64);
        let bogus = TelescopingCertificate::new(OreOperator::one(), OreOperator::zero()).unwrap();
        let r = verify_telescoping(&bogus, &f, (0, 4)).unwrap();
        assert!(!r.pointwise_ok);
        assert!(!r.verified());
    }

    #[test]
    fn difference_of_rows() {
        // F(n, j) = g(j+1) - g(j) sums to zero, yet P = 1 with t = 0 is not a
        // valid certificate pointwise
        let g = |j: i64| if (1..=3).contains(&j) { j * j } else { 0 };
        let f = table(|_, j| g(j + 1) - g(j));
        let wrong = TelescopingCertificate::new(OreOperator::one(), OreOperator::zero()).unwrap();
        let r = verify_telescoping(&wrong, &f, (0, 4)).unwrap();
        assert!(r.sum_ok);
        assert!(!r.pointwise_ok);
    }

    #[test]
    fn shape_rules() {
        assert!(TelescopingCertificate::new(OreOperator::shift(0, 1), OreOperator::zero()).is_err());
        let with_xj = OreOperator::constant(RatFunc::from_poly(crate::qfield::Poly::var(Var::Xj)));
        assert!(TelescopingCertificate::new(with_xj, OreOperator::zero()).is_err());
        let cert = TelescopingCertificate::new(&OreOperator::shift(9, 0) + &OreOperator::one(), OreOperator::zero()).unwrap();
        assert!(matches!(
            verify_telescoping(&cert, &table(|_, _| 1), (0, 4)),
            Err(Error::NoAdmissiblePoints { .. })
        ));
    }
}
