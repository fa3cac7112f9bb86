//! The Okada matrix, its determinant, the normalized cofactors and the
//! identities they satisfy.
//!
//! ```text
//! a(i,j) = q^(i+j-1) (qbinom(i+j-2, i-1) + q qbinom(i+j-1, i)) + (1+q^i) [i=j] - [i=j+1]
//!
//!   c(n,n) = 1                                   (one)
//!   sum_j c(n,j) a(i,j) = 0,       1 <= i < n    (two)
//!   sum_j c(n,j) a(n,j) = b(n) / b(n-1)          (three)
//! ```
//!
//! The primed forms split the delta terms off the sums; see [`summand_prime`].

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcomb::{b_ratio, b_value, q_binomial};
use crate::qfield::modular::default_primes;
use crate::qfield::{det_fraction_free, solve_fraction_free, solve_linear, Fp, Poly, PrimePoint, RatFunc};

pub const DEFAULT_DET_LIMIT: u32 = 12;
pub const DEFAULT_IDENTITY_LIMIT: u32 = 12;

pub fn a_entry(i: u32, j: u32) -> Poly {
    assert!(i >= 1 && j >= 1, "a_entry is indexed from 1");
    let (i64_, j64) = (i as i64, j as i64);
    let inner = &q_binomial(i64_ + j64 - 2, i64_ - 1) + &(&Poly::q() * &q_binomial(i64_ + j64 - 1, i64_));
    let mut a = &Poly::q_pow(i + j - 1) * &inner;
    if i == j {
        a = &a + &(&Poly::one() + &Poly::q_pow(i));
    }
    if i == j + 1 {
        a = &a - &Poly::one();
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OkadaMatrix {
    n: u32,
    entries: Vec<Vec<Poly>>,
}

impl OkadaMatrix {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("the Okada matrix needs n >= 1".into()));
        }
        let entries = (1..=n).map(|i| (1..=n).map(|j| a_entry(i, j)).collect()).collect();
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    /// 1-based access.
    pub fn get(&self, i: u32, j: u32) -> &Poly {
        &self.entries[i as usize - 1][j as usize - 1]
    }

    pub fn det(&self) -> Poly {
        det_fraction_free(&self.entries).expect("square by construction")
    }

    /// Rows `1..n-1` of the matrix with the unit row `(0, .., 0, 1)` appended.
    pub fn bordered(&self) -> Vec<Vec<Poly>> {
        let n = self.n as usize;
        let mut m: Vec<Vec<Poly>> = self.entries[..n - 1].to_vec();
        let mut unit = vec![Poly::zero(); n];
        unit[n - 1] = Poly::one();
        m.push(unit);
        m
    }
}

/// Which of the identities a report is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    One,
    Two,
    TwoPrime,
    Three,
    ThreePrime,
}

impl Identity {
    pub const ALL: [Identity; 5] = [Identity::One, Identity::Two, Identity::Three, Identity::TwoPrime, Identity::ThreePrime];

    pub fn needs_row(self) -> bool {
        matches!(self, Identity::Two | Identity::TwoPrime)
    }

    pub fn label(self) -> &'static str {
        match self {
            Identity::One => "1",
            Identity::Two => "2",
            Identity::TwoPrime => "2p",
            Identity::Three => "3",
            Identity::ThreePrime => "3p",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "one" => Ok(Identity::One),
            "2" | "two" => Ok(Identity::Two),
            "2p" | "2'" | "two_prime" => Ok(Identity::TwoPrime),
            "3" | "three" => Ok(Identity::Three),
            "3p" | "3'" | "three_prime" => Ok(Identity::ThreePrime),
            other => Err(Error::Invalid(format!("unknown identity {other:?}; expected 1, 2, 2p, 3 or 3p"))),
        }
    }
}

/// Outcome of one exact identity or determinant check. `verified` holds
/// exactly when `lhs == rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub n: u32,
    pub identity: Option<Identity>,
    pub i: Option<u32>,
    pub verified: bool,
    pub lhs: RatFunc,
    pub rhs: RatFunc,
}

impl IdentityReport {
    fn new(n: u32, identity: Option<Identity>, i: Option<u32>, lhs: RatFunc, rhs: RatFunc) -> Self {
        Self {
            n,
            identity,
            i,
            verified: lhs == rhs,
            lhs,
            rhs,
        }
    }

    /// Short name such as `2(i=3)` or `det`.
    pub fn label(&self) -> String {
        match (self.identity, self.i) {
            (None, _) => "det".into(),
            (Some(id), Some(i)) => format!("{id}(i={i})"),
            (Some(id), None) => id.to_string(),
        }
    }
}

fn check_limit(n: u32, limit: u32, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid(format!("{what} needs n >= 1")));
    }
    if n > limit {
        return Err(Error::Invalid(format!("{what} limited to n <= {limit}, got n = {n}")));
    }
    Ok(())
}

pub fn verify_determinant(n: u32) -> Result<IdentityReport> {
    verify_determinant_with_limit(n, DEFAULT_DET_LIMIT)
}

/// Compares the fraction-free determinant with `b_n`. A mismatch is reported
/// through `verified`, not as an error.
pub fn verify_determinant_with_limit(n: u32, limit: u32) -> Result<IdentityReport> {
    check_limit(n, limit, "determinant check")?;
    let det = OkadaMatrix::new(n)?.det();
    Ok(IdentityReport::new(
        n,
        None,
        None,
        RatFunc::from_poly(det),
        RatFunc::from_poly(b_value(n)),
    ))
}

/// Solution of the bordered system, kept both as canonical rational functions
/// and as numerators over one common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CofactorVector {
    n: u32,
    c: Vec<RatFunc>,
    nums: Vec<Poly>,
    den: Poly,
}

impl CofactorVector {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `c[1..=n]` as a slice indexed from 0.
    pub fn values(&self) -> &[RatFunc] {
        &self.c
    }

    /// `c(n,j)`, zero for `j <= 0` and `j > n`.
    pub fn get(&self, j: i64) -> RatFunc {
        if j < 1 || j > self.n as i64 {
            RatFunc::zero()
        } else {
            self.c[j as usize - 1].clone()
        }
    }

    /// Numerator of `c(n,j)` over [`Self::common_den`], zero outside `1..=n`.
    pub fn common_num(&self, j: i64) -> Poly {
        if j < 1 || j > self.n as i64 {
            Poly::zero()
        } else {
            self.nums[j as usize - 1].clone()
        }
    }

    pub fn common_den(&self) -> &Poly {
        &self.den
    }
}

pub fn solve_cofactors(n: u32) -> Result<CofactorVector> {
    let m = OkadaMatrix::new(n)?;
    let mut rhs = vec![Poly::zero(); n as usize];
    rhs[n as usize - 1] = Poly::one();
    let (nums, den) = solve_fraction_free(&m.bordered(), &rhs)?;
    let c = nums
        .iter()
        .map(|y| RatFunc::new(y.clone(), den.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CofactorVector { n, c, nums, den })
}

/// `q^(i+j-1) (q^(i+j) + q^i - q - 1) qbinom(i+j-2, i-1)`, the polynomial part
/// of the primed summand before dividing by `q^i - 1`.
fn prime_weight(i: u32, j: u32) -> Poly {
    let bracket = &(&(&Poly::q_pow(i + j) + &Poly::q_pow(i)) - &Poly::q()) - &Poly::one();
    &(&Poly::q_pow(i + j - 1) * &bracket) * &q_binomial((i + j) as i64 - 2, i as i64 - 1)
}

/// The summand of the primed identities,
/// `q^(i+j-1) (q^(i+j) + q^i - q - 1) / (q^i - 1) * qbinom(i+j-2, i-1) * c(n,j)`.
///
/// Zero for `j <= 0` (the q-binomial vanishes) and for `j > n`.
pub fn summand_prime(n: u32, i: u32, j: i64, c: &CofactorVector) -> RatFunc {
    assert!(i >= 1, "summand_prime needs i >= 1");
    if j < 1 || j > n as i64 {
        return RatFunc::zero();
    }
    let w = RatFunc::new(prime_weight(i, j as u32), &Poly::q_pow(i) - &Poly::one()).expect("q^i - 1 is nonzero");
    &w * &c.get(j)
}

fn row_for(n: u32, which: Identity, i: Option<u32>) -> Result<Option<u32>> {
    if !which.needs_row() {
        return Ok(None);
    }
    match i {
        Some(i) if i >= 1 && i < n => Ok(Some(i)),
        Some(i) => Err(Error::Invalid(format!("identity {which} needs 1 <= i < n, got i = {i}, n = {n}"))),
        None => Err(Error::Invalid(format!("identity {which} needs a row index i"))),
    }
}

/// `sum_j y_j a(i,j)` over the common denominator.
fn row_sum(c: &CofactorVector, i: u32) -> Poly {
    (1..=c.n).fold(Poly::zero(), |acc, j| &acc + &(&c.common_num(j as i64) * &a_entry(i, j)))
}

/// `sum_j y_j w(i,j)`; the matching denominator is `(q^i - 1) d`.
fn prime_sum(c: &CofactorVector, i: u32) -> Poly {
    (1..=c.n).fold(Poly::zero(), |acc, j| &acc + &(&c.common_num(j as i64) * &prime_weight(i, j)))
}

fn exact_sides(c: &CofactorVector, which: Identity, i: Option<u32>) -> Result<(RatFunc, RatFunc)> {
    let n = c.n;
    let d = c.common_den();
    Ok(match which {
        Identity::One => (c.get(n as i64), RatFunc::one()),
        Identity::Two => (RatFunc::new(row_sum(c, i.unwrap()), d.clone())?, RatFunc::zero()),
        Identity::Three => (
            RatFunc::new(row_sum(c, n), d.clone())?,
            RatFunc::new(b_value(n), b_value(n - 1))?,
        ),
        Identity::TwoPrime => {
            let i = i.unwrap();
            let qi1 = &Poly::q_pow(i) - &Poly::one();
            let lhs = RatFunc::new(prime_sum(c, i), &qi1 * d)?;
            let rhs_num = &c.common_num(i as i64 - 1) - &(&(&Poly::q_pow(i) + &Poly::one()) * &c.common_num(i as i64));
            (lhs, RatFunc::new(rhs_num, d.clone())?)
        }
        Identity::ThreePrime => {
            let qn1 = &Poly::q_pow(n) - &Poly::one();
            // ((1 + q^n) d - y_{n-1}) (q^n - 1) + sum_j y_j w(n,j), over (q^n - 1) d
            let head = &(&(&Poly::one() + &Poly::q_pow(n)) * d) - &c.common_num(n as i64 - 1);
            let num = &(&head * &qn1) + &prime_sum(c, n);
            (RatFunc::new(num, &qn1 * d)?, b_ratio(n)?)
        }
    })
}

pub fn check_identity(n: u32, which: Identity, i: Option<u32>) -> Result<IdentityReport> {
    check_identity_with_limit(n, which, i, DEFAULT_IDENTITY_LIMIT)
}

pub fn check_identity_with_limit(n: u32, which: Identity, i: Option<u32>, limit: u32) -> Result<IdentityReport> {
    check_limit(n, limit, "identity check")?;
    let i = row_for(n, which, i)?;
    let c = solve_cofactors(n)?;
    check_identity_on(&c, which, i)
}

/// Runs one identity against an already computed cofactor vector.
pub fn check_identity_on(c: &CofactorVector, which: Identity, i: Option<u32>) -> Result<IdentityReport> {
    let i = row_for(c.n, which, i)?;
    let (lhs, rhs) = exact_sides(c, which, i)?;
    Ok(IdentityReport::new(c.n, Some(which), i, lhs, rhs))
}

/// Primed identities only; rejects the unprimed ones.
pub fn check_identity_prime(n: u32, which: Identity, i: Option<u32>) -> Result<IdentityReport> {
    if !matches!(which, Identity::TwoPrime | Identity::ThreePrime) {
        return Err(Error::Invalid(format!("{which} is not a primed identity")));
    }
    check_identity(n, which, i)
}

/// Modular pre-screen settings: at each prime, `points` random images of `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prescreen {
    pub primes: Vec<u64>,
    pub points: usize,
    pub seed: u64,
}

impl Default for Prescreen {
    fn default() -> Self {
        Self {
            primes: default_primes(2),
            points: 2,
            seed: 0,
        }
    }
}

impl Prescreen {
    pub fn prime_points(&self) -> Result<Vec<PrimePoint>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::new();
        for &p in &self.primes {
            let mut made = 0;
            let mut tries = 0;
            while made < self.points {
                tries += 1;
                if tries > 100 * self.points.max(1) {
                    return Err(Error::BadEvaluationPoint(format!("no usable q image modulo {p}")));
                }
                if let Ok(pt) = PrimePoint::new(p, rng.gen_range(2..p)) {
                    out.push(pt);
                    made += 1;
                }
            }
        }
        Ok(out)
    }
}

/// Both sides of an identity modulo a prime, computed from a modular solve of
/// the bordered system. `None` when the point is unlucky (a denominator or the
/// system degenerates there).
pub fn modular_sides(n: u32, which: Identity, i: Option<u32>, pt: &PrimePoint) -> Result<Option<(Fp, Fp)>> {
    let i = row_for(n, which, i)?;
    let p = pt.prime();
    let ev = |x: &Poly| x.eval(pt).expect("univariate in q");
    let nn = n as usize;
    let mut m: Vec<Vec<Fp>> = (1..n).map(|r| (1..=n).map(|s| ev(&a_entry(r, s))).collect()).collect();
    let mut unit = vec![Fp::zero(p); nn];
    unit[nn - 1] = Fp::one(p);
    m.push(unit);
    let mut rhs = vec![Fp::zero(p); nn];
    rhs[nn - 1] = Fp::one(p);
    let c = match solve_linear(&m, &rhs) {
        Ok(c) => c,
        Err(Error::SingularSystem { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let cj = |j: i64| {
        if j < 1 || j > n as i64 {
            Fp::zero(p)
        } else {
            c[j as usize - 1]
        }
    };
    let qpow = |e: u32| pt.fp(pt.q()).pow(e as u64);
    let one = Fp::one(p);
    let weighted = |row: u32| -> Option<Fp> {
        let inv = qpow(row).sub(&one).inv()?;
        let s = (1..=n).fold(Fp::zero(p), |acc, j| acc.add(&ev(&prime_weight(row, j)).mul(&cj(j as i64))));
        Some(s.mul(&inv))
    };
    let ratio = |r: RatFunc| r.eval(pt).ok();
    let sides = match which {
        Identity::One => Some((cj(n as i64), one)),
        Identity::Two | Identity::Three => {
            let row = i.unwrap_or(n);
            let s = (1..=n).fold(Fp::zero(p), |acc, j| acc.add(&ev(&a_entry(row, j)).mul(&cj(j as i64))));
            let rhs = if which == Identity::Two {
                Some(Fp::zero(p))
            } else {
                ratio(RatFunc::new(b_value(n), b_value(n - 1))?)
            };
            rhs.map(|r| (s, r))
        }
        Identity::TwoPrime => {
            let i = i.unwrap();
            let rhs = cj(i as i64 - 1).sub(&qpow(i).add(&one).mul(&cj(i as i64)));
            weighted(i).map(|l| (l, rhs))
        }
        Identity::ThreePrime => {
            let head = one.add(&qpow(n)).sub(&cj(n as i64 - 1));
            match (weighted(n), ratio(b_ratio(n)?)) {
                (Some(w), Some(r)) => Some((head.add(&w), r)),
                _ => None,
            }
        }
    };
    Ok(sides)
}

/// `Some(false)` as soon as one point disagrees, `Some(true)` if every usable
/// point agrees, `None` if no point was usable.
pub fn prescreen_identity(n: u32, which: Identity, i: Option<u32>, points: &[PrimePoint]) -> Result<Option<bool>> {
    let mut used = 0;
    for pt in points {
        match modular_sides(n, which, i, pt)? {
            Some((l, r)) if l != r => return Ok(Some(false)),
            Some(_) => used += 1,
            None => {}
        }
    }
    Ok((used > 0).then_some(true))
}

/// Every identity at `n`: (1), (2) for each row, (3), (2') for each row, (3').
pub fn identity_plan(n: u32) -> Vec<(Identity, Option<u32>)> {
    let mut plan = vec![(Identity::One, None)];
    plan.extend((1..n).map(|i| (Identity::Two, Some(i))));
    plan.push((Identity::Three, None));
    plan.extend((1..n).map(|i| (Identity::TwoPrime, Some(i))));
    plan.push((Identity::ThreePrime, None));
    plan
}

/// Exact checks for a batch of identities at one `n`, sharing one cofactor
/// solve. With a pre-screen, every item is first checked modulo the primes;
/// on the first modular failure only that item is checked exactly and its
/// report is returned alone.
pub fn check_batch(
    n: u32,
    plan: &[(Identity, Option<u32>)],
    limit: u32,
    prescreen: Option<&Prescreen>,
) -> Result<Vec<IdentityReport>> {
    check_limit(n, limit, "identity check")?;
    for &(which, i) in plan {
        row_for(n, which, i)?;
    }
    let mut plan: Vec<(Identity, Option<u32>)> = plan.to_vec();
    if let Some(ps) = prescreen {
        let points = ps.prime_points()?;
        for &(which, i) in &plan {
            if prescreen_identity(n, which, i, &points)? == Some(false) {
                log::warn!("n = {n}: identity {which} failed the modular pre-screen");
                plan = vec![(which, i)];
                break;
            }
        }
    }
    let c = solve_cofactors(n)?;
    plan.iter().map(|&(which, i)| check_identity_on(&c, which, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(c: &[i64]) -> Poly {
        Poly::from_q_coeffs(c)
    }

    fn c21() -> RatFunc {
        // -q^2 (1 + q + q^2) / (1 + q)^2
        RatFunc::new(qp(&[0, 0, -1, -1, -1]), qp(&[1, 2, 1])).unwrap()
    }

    #[test]
    fn entries() {
        assert_eq!(a_entry(1, 1), qp(&[1, 2, 1]));
        assert_eq!(a_entry(1, 2), qp(&[0, 0, 1, 1, 1]));
        assert_eq!(a_entry(2, 1), qp(&[-1, 0, 1, 1]));
        let m = OkadaMatrix::new(3).unwrap();
        assert_eq!(m.get(3, 2), &a_entry(3, 2));
        assert!(OkadaMatrix::new(0).is_err());
    }

    #[test]
    fn small_determinants() {
        for n in 1..=4 {
            let r = verify_determinant(n).unwrap();
            assert!(r.verified, "n = {n}");
        }
        let two = OkadaMatrix::new(2).unwrap();
        let by_hand = &(&a_entry(1, 1) * &a_entry(2, 2)) - &(&a_entry(1, 2) * &a_entry(2, 1));
        assert_eq!(two.det(), by_hand);
        assert_eq!(by_hand, b_value(2));
        assert!(verify_determinant(0).is_err());
        assert!(verify_determinant(13).is_err());
    }

    #[test]
    fn cofactors_small() {
        let one = solve_cofactors(1).unwrap();
        assert_eq!(one.values(), &[RatFunc::one()]);
        let two = solve_cofactors(2).unwrap();
        assert_eq!(two.values(), &[c21(), RatFunc::one()]);
        assert!(two.get(0).is_zero());
        assert!(two.get(3).is_zero());
        let three = solve_cofactors(3).unwrap();
        for i in 1..3 {
            assert!(check_identity_on(&three, Identity::Two, Some(i)).unwrap().verified);
        }
    }

    #[test]
    fn summand_examples() {
        let c1 = solve_cofactors(1).unwrap();
        assert!(summand_prime(1, 1, 0, &c1).is_zero());
        assert!(summand_prime(1, 1, 2, &c1).is_zero());
        assert_eq!(summand_prime(1, 1, 1, &c1), RatFunc::from_poly(qp(&[0, 1, 1])));
    }

    #[test]
    fn identity_examples() {
        assert!(check_identity(1, Identity::One, None).unwrap().verified);
        let three = check_identity(2, Identity::Three, None).unwrap();
        assert!(three.verified);
        let c = solve_cofactors(2).unwrap();
        let by_hand = &(&c21() * &RatFunc::from_poly(a_entry(2, 1))) + &RatFunc::from_poly(a_entry(2, 2));
        assert_eq!(three.lhs, by_hand);
        assert_eq!(three.rhs, by_hand);
        assert_eq!(c.get(1), c21());
        assert!(check_identity(3, Identity::Two, Some(1)).unwrap().verified);
        let tp = check_identity_prime(1, Identity::ThreePrime, None).unwrap();
        assert!(tp.verified);
        assert_eq!(tp.rhs, RatFunc::from_poly(qp(&[1, 2, 1])));
        assert!(check_identity_prime(2, Identity::ThreePrime, None).unwrap().verified);
        assert!(check_identity_prime(3, Identity::TwoPrime, Some(2)).unwrap().verified);
    }

    #[test]
    fn bad_rows_are_rejected() {
        assert!(check_identity(3, Identity::Two, None).is_err());
        assert!(check_identity(3, Identity::Two, Some(3)).is_err());
        assert!(check_identity(1, Identity::TwoPrime, Some(1)).is_err());
        assert!(check_identity_prime(3, Identity::Two, Some(1)).is_err());
    }

    #[test]
    fn primed_sums_match_summands() {
        for n in 1..=5u32 {
            let c = solve_cofactors(n).unwrap();
            for i in 1..=n {
                let direct = (-1..=n as i64 + 1).fold(RatFunc::zero(), |acc, j| &acc + &summand_prime(n, i, j, &c));
                let common = RatFunc::new(prime_sum(&c, i), &(&Poly::q_pow(i) - &Poly::one()) * c.common_den()).unwrap();
                assert_eq!(direct, common, "n = {n}, i = {i}");
            }
        }
    }

    #[test]
    fn modular_screen_agrees() {
        let ps = Prescreen::default();
        let points = ps.prime_points().unwrap();
        for n in 1..=6 {
            for (which, i) in identity_plan(n) {
                assert_eq!(prescreen_identity(n, which, i, &points).unwrap(), Some(true), "n = {n} {which} {i:?}");
            }
        }
        let reports = check_batch(4, &identity_plan(4), DEFAULT_IDENTITY_LIMIT, Some(&ps)).unwrap();
        assert_eq!(reports.len(), identity_plan(4).len());
        assert!(reports.iter().all(|r| r.verified));
    }

    #[test]
    fn identity_names_parse() {
        for id in Identity::ALL {
            assert_eq!(id.label().parse::<Identity>().unwrap(), id);
        }
        assert!("4".parse::<Identity>().is_err());
    }
}
