//! Seeded random operators and tables with known answers: solution tables of
//! planted recurrences and self-consistent telescoping pairs.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::table::{coeff_times, value_add, value_sub, zero_value, SequenceTable, TableMode, Value};
use super::{OreOperator, Point, Shift, TelescopingCertificate};
use crate::error::{Error, Result};
use crate::qfield::{Monomial, Poly, PrimePoint, RatFunc, Var};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial with at most `terms` terms, exponents bounded per
/// variable by `degs` (indexed like [`Var`]), coefficients in `[-c, c]`.
pub fn random_poly<R: Rng>(r: &mut R, degs: [u32; 4], terms: usize, c: i64) -> Poly {
    Poly::from_terms((0..terms).map(|_| {
        let mut e = [0u32; 4];
        for (k, d) in degs.iter().enumerate() {
            e[k] = r.gen_range(0..=*d);
        }
        (Monomial(e), BigInt::from(r.gen_range(-c..=c)))
    }))
}

pub fn random_nonzero_poly<R: Rng>(r: &mut R, degs: [u32; 4], terms: usize, c: i64) -> Poly {
    loop {
        let p = random_poly(r, degs, terms.max(1), c.max(1));
        if !p.is_zero() {
            return p;
        }
    }
}

/// Polynomial whose exponents reach every bound in `degs` (up to sign the
/// bound is attained by one term), so degree bounds are tight.
pub fn random_tight_poly<R: Rng>(r: &mut R, degs: [u32; 4], terms: usize, c: i64) -> Poly {
    let lead = Poly::monomial(if r.gen_bool(0.5) { 1 } else { -1 } * r.gen_range(1..=c.max(1)), Monomial(degs));
    let rest = random_poly(r, degs, terms.saturating_sub(1), c);
    let p = &lead + &rest;
    if p.degree_in(Var::Q) == degs[0] && p.degree_in(Var::Xn) == degs[1] && p.degree_in(Var::Xj) == degs[2] {
        p
    } else {
        lead
    }
}

/// Random rational function in `q, xn` with a denominator that is sometimes 1.
pub fn random_ratfunc_qn<R: Rng>(r: &mut R, deg: u32) -> RatFunc {
    let num = random_poly(r, [deg, deg, 0, 0], 3, 4);
    let den = if r.gen_bool(0.5) {
        Poly::one()
    } else {
        random_nonzero_poly(r, [deg, 1, 0, 0], 2, 3)
    };
    RatFunc::new(num, den).expect("nonzero denominator")
}

/// Random univariate operator in `S_n` of the given order with coefficients in
/// `Q(q, xn)`; the leading coefficient is nonzero.
pub fn random_univariate<R: Rng>(r: &mut R, order: u32, deg: u32) -> OreOperator {
    let mut coeffs: Vec<RatFunc> = (0..=order).map(|_| random_ratfunc_qn(r, deg)).collect();
    while coeffs[order as usize].is_zero() {
        coeffs[order as usize] = random_ratfunc_qn(r, deg);
    }
    OreOperator::from_sn_coeffs(&coeffs)
}

/// Random two-shift operator with polynomial coefficients: a nonempty subset
/// of `stencil` of size at least two, per-variable degrees at most `max_deg`.
pub fn random_planted<R: Rng>(r: &mut R, stencil: &[Shift], max_deg: u32) -> (OreOperator, [u32; 3]) {
    let mut shifts = stencil.to_vec();
    shifts.shuffle(r);
    let k = r.gen_range(2.min(shifts.len())..=shifts.len());
    shifts.truncate(k);
    let degs = [r.gen_range(0..=max_deg), r.gen_range(0..=max_deg), r.gen_range(0..=max_deg)];
    let full = [degs[0], degs[1], degs[2], 0];
    let top = *shifts.iter().max().expect("nonempty");
    let mut terms = Vec::new();
    for &s in &shifts {
        let p = if s == top {
            random_tight_poly(r, full, 4, 5)
        } else {
            random_nonzero_poly(r, full, 4, 5)
        };
        terms.push((s, RatFunc::from_poly(p)));
    }
    let op = OreOperator::from_terms(terms, None);
    let actual = [
        max_degree(&op, Var::Q),
        max_degree(&op, Var::Xn),
        max_degree(&op, Var::Xj),
    ];
    (op, actual)
}

fn max_degree(op: &OreOperator, v: Var) -> u32 {
    op.terms().values().map(|c| c.num().degree_in(v)).max().unwrap_or(0)
}

fn one_value(mode: &TableMode) -> Value {
    match mode {
        TableMode::Exact => Value::Exact(RatFunc::one()),
        TableMode::Modular(pt) => Value::Mod(pt.fp(1)),
    }
}

fn div_value(a: &Value, b: &Value, at: Point) -> Result<Value> {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x.checked_div(y).map_err(|_| Error::SingularCoefficient(at))?)),
        (Value::Mod(x), Value::Mod(y)) => Ok(Value::Mod(x.mul(&y.inv().ok_or(Error::SingularCoefficient(at))?))),
        _ => Err(Error::ModeMismatch),
    }
}

fn value_of(r: &RatFunc, mode: &TableMode) -> Result<Value> {
    match mode {
        TableMode::Exact => Ok(Value::Exact(r.clone())),
        TableMode::Modular(pt) => Ok(Value::Mod(r.eval(pt)?)),
    }
}

/// Table on `[n_lo, n_hi] x [j_lo, j_hi]` satisfying `op` at every base point
/// whose shifts all land in the window. Entries are filled row by row; an
/// entry is solved from the recurrence when all its sources are present and
/// drawn from `init` otherwise. Modular mode computes the image of the exact
/// table directly.
pub fn solution_table(
    op: &OreOperator,
    n_range: (i64, i64),
    j_range: (i64, i64),
    mode: &TableMode,
    mut init: impl FnMut(Point) -> RatFunc,
) -> Result<SequenceTable> {
    let Some((lead, lc)) = op.leading() else {
        return Err(Error::Invalid("cannot plant the zero operator".into()));
    };
    if op.terms().keys().any(|s| s.i != 0) {
        return Err(Error::Invalid("planted operators act on (n, j) only".into()));
    }
    let mut t = match mode {
        TableMode::Exact => SequenceTable::exact(),
        TableMode::Modular(pt) => SequenceTable::modular(pt.clone()),
    };
    let rest: Vec<(Shift, &RatFunc)> = op.terms().iter().filter(|(s, _)| **s != lead).map(|(s, c)| (*s, c)).collect();
    for n in n_range.0..=n_range.1 {
        for j in j_range.0..=j_range.1 {
            let at = Point::nj(n, j);
            let base = Point::nj(n - lead.n as i64, j - lead.j as i64);
            let in_window = |p: Point| p.n >= n_range.0 && p.j >= j_range.0 && p.j <= j_range.1;
            let solvable = in_window(base) && rest.iter().all(|(u, _)| t.contains(&base.shifted(*u)));
            let v = if solvable {
                let mut acc = zero_value(mode);
                for (u, c) in &rest {
                    let v = t.get(&base.shifted(*u)).expect("checked above");
                    acc = value_add(&acc, &coeff_times(c, base, &v, mode)?)?;
                }
                if let Some(p0) = op.inhomogeneous() {
                    acc = value_add(&acc, &coeff_times(p0, base, &one_value(mode), mode)?)?;
                }
                let lead_at = coeff_times(lc, base, &one_value(mode), mode)?;
                let neg = value_sub(&zero_value(mode), &acc)?;
                div_value(&neg, &lead_at, base)?
            } else {
                value_of(&init(at), mode)?
            };
            t.insert(at, v)?;
        }
    }
    Ok(t)
}

/// Modular images of one exact solution table of `op` on the square
/// `window x window`: `per_prime` images of `q` at each prime. The initial
/// values are polynomials in `q` drawn from `seed` and the point.
pub fn planted_images(
    op: &OreOperator,
    primes: &[u64],
    per_prime: usize,
    window: (i64, i64),
    seed: u64,
) -> Result<Vec<SequenceTable>> {
    let init = |at: Point| {
        let mut r = rng(seed.wrapping_mul(0x100_0000_01b3) ^ ((at.n as u64) << 32 | at.j as u32 as u64));
        RatFunc::from_poly(random_nonzero_poly(&mut r, [2, 0, 0, 0], 3, 9))
    };
    let mut out = Vec::new();
    for &p in primes {
        for pt in PrimePoint::sample(p, per_prime, seed) {
            out.push(solution_table(op, window, window, &TableMode::Modular(pt), init)?);
        }
    }
    Ok(out)
}

/// A valid telescoping pair together with a summand table it certifies.
#[derive(Clone, Debug)]
pub struct TelescopingFixture {
    pub cert: TelescopingCertificate,
    pub table: SequenceTable,
    pub window: (i64, i64),
}

/// Builds `(P, C)` at random, then builds `F` row by row in `n` so that the
/// telescoping relation holds. `P` has a single top term `S_n^N` with a unit
/// monomial coefficient and `C` only shifts `n` by less than `N`, so each new
/// row is solved from earlier ones. The support in `j` grows to the left by
/// `B + 1` per row and the returned window covers all of it.
pub fn telescoping_fixture(seed: u64, mode: &TableMode) -> Result<TelescopingFixture> {
    let mut r = rng(seed);
    let top_n: u32 = r.gen_range(1..=2);
    let lead_coeff = {
        let sign = if r.gen_bool(0.5) { 1 } else { -1 };
        let e = [r.gen_range(0..=2), r.gen_range(0..=1), 0, r.gen_range(0..=1)];
        RatFunc::from_poly(Poly::monomial(sign * r.gen_range(1..=3), Monomial(e)))
    };
    // the unshifted term keeps rows below the constructed ones out of the check
    let mut p_terms = vec![
        (Shift::new(top_n, 0, 0), lead_coeff.clone()),
        (Shift::ZERO, RatFunc::from_poly(random_nonzero_poly(&mut r, [2, 1, 0, 1], 3, 4))),
    ];
    for _ in 0..r.gen_range(0..=2) {
        let n = r.gen_range(0..top_n);
        let s = Shift::new(n, 0, if n == 0 { 1 } else { r.gen_range(0..=1) });
        p_terms.push((s, RatFunc::from_poly(random_nonzero_poly(&mut r, [2, 1, 0, 1], 3, 4))));
    }
    let p = OreOperator::from_terms(p_terms, None);
    let mut c_terms = Vec::new();
    for _ in 0..r.gen_range(1..=3) {
        let s = Shift::new(r.gen_range(0..top_n), r.gen_range(0..=1), r.gen_range(0..=1));
        c_terms.push((s, RatFunc::from_poly(random_nonzero_poly(&mut r, [2, 1, 1, 1], 3, 4))));
    }
    let c = OreOperator::from_terms(c_terms, None);
    if p.coeff(Shift::new(top_n, 0, 0)) != lead_coeff {
        return Err(Error::Internal("top term of the telescoper was merged".into()));
    }
    let cert = TelescopingCertificate::new(p, c)?;
    let (p, c) = (cert.operator().clone(), cert.certificate().clone());
    let b = c.terms().keys().map(|s| s.j).max().unwrap_or(0) as i64;
    let di = p.terms().keys().chain(c.terms().keys()).map(|s| s.i).max().unwrap_or(0) as i64;

    let rows = top_n as i64 + 3;
    let i0: i64 = 3 + 3 * di;
    let i_max = |n: i64| if n < top_n as i64 { i0 } else { i0 - di * (n - top_n as i64 + 1) };
    let (mut lo, hi) = (1i64, 4i64);
    let final_lo = lo - (rows - top_n as i64) * (b + 1);
    let window = (final_lo, hi);

    let mut table = match mode {
        TableMode::Exact => SequenceTable::exact(),
        TableMode::Modular(pt) => SequenceTable::modular(pt.clone()),
    };
    let zero = zero_value(mode);
    for n in 0..top_n as i64 {
        for i in 0..=i_max(n) {
            for j in window.0..=window.1 {
                let v = if (lo..=hi).contains(&j) {
                    value_of(&RatFunc::from_poly(random_nonzero_poly(&mut r, [1, 0, 0, 0], 2, 9)), mode)?
                } else {
                    zero.clone()
                };
                table.insert(Point::new(n, j, i), v)?;
            }
        }
    }
    let top = Shift::new(top_n, 0, 0);
    let get = |t: &SequenceTable, p: Point| -> Value {
        if p.j < window.0 || p.j > window.1 {
            zero_value(mode)
        } else {
            t.get(&p).expect("row already built")
        }
    };
    for base_n in 0..rows - top_n as i64 {
        let n = base_n + top_n as i64;
        for i in 0..=i_max(n) {
            for j in window.0..=window.1 {
                let at = Point::new(base_n, j, i);
                let t_at = |t: &SequenceTable, jj: i64| -> Result<Value> {
                    let at = Point::new(base_n, jj, i);
                    let mut acc = zero_value(mode);
                    for (&u, cu) in c.terms() {
                        let v = get(t, at.shifted(u));
                        if !v.is_zero() {
                            acc = value_add(&acc, &coeff_times(cu, at, &v, mode)?)?;
                        }
                    }
                    Ok(acc)
                };
                let mut acc = value_sub(&t_at(&table, j + 1)?, &t_at(&table, j)?)?;
                for (&u, pu) in p.terms() {
                    if u == top {
                        continue;
                    }
                    let v = get(&table, at.shifted(u));
                    if !v.is_zero() {
                        acc = value_sub(&acc, &coeff_times(pu, at, &v, mode)?)?;
                    }
                }
                let lead = coeff_times(&lead_coeff, at, &one_value(mode), mode)?;
                let v = div_value(&acc, &lead, at)?;
                table.insert(Point::new(n, j, i), v)?;
            }
        }
        lo -= b + 1;
    }
    debug_assert_eq!(lo, final_lo);
    Ok(TelescopingFixture { cert, table, window })
}

/// Adds 1 to one coefficient of the telescoper or the certificate.
pub fn mutate(cert: &TelescopingCertificate, seed: u64) -> TelescopingCertificate {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (p, c) = (cert.operator(), cert.certificate());
    let total = p.terms().len() + c.terms().len();
    let k = r.gen_range(0..total);
    let bump = |op: &OreOperator, idx: usize| -> OreOperator {
        let (&s, coeff) = op.terms().iter().nth(idx).expect("index in range");
        let terms: Vec<(Shift, RatFunc)> = op
            .terms()
            .iter()
            .map(|(&u, cu)| (u, if u == s { cu + &RatFunc::one() } else { cu.clone() }))
            .collect();
        debug_assert!(!(coeff + &RatFunc::one()).is_zero() || terms.len() > 1);
        OreOperator::from_terms(terms, op.inhomogeneous().cloned())
    };
    let (p2, c2) = if k < p.terms().len() {
        (bump(p, k), c.clone())
    } else {
        (p.clone(), bump(c, k - p.terms().len()))
    };
    TelescopingCertificate::new(p2, c2).expect("mutation keeps the telescoper shape")
}

/// A prime point for fixtures, drawn from the seed.
pub fn fixture_point(prime: u64, seed: u64) -> PrimePoint {
    let mut r = rng(seed);
    loop {
        if let Ok(pt) = PrimePoint::new(prime, r.gen_range(2..prime)) {
            return pt;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{annihilates_with, verify_telescoping};
    use super::*;
    use crate::qfield::modular::default_primes;

    #[test]
    fn planted_tables_are_annihilated() {
        let pt = fixture_point(default_primes(1)[0], 5);
        let stencil = [Shift::nj(0, 0), Shift::nj(1, 0), Shift::nj(0, 1), Shift::nj(1, 1)];
        for seed in 0..10 {
            let mut r = rng(seed);
            let (op, _) = random_planted(&mut r, &stencil, 2);
            let mut init_rng = rng(seed + 100);
            let mut init = |_p: Point| RatFunc::from_poly(random_nonzero_poly(&mut init_rng, [2, 0, 0, 0], 3, 9));
            let t = solution_table(&op, (0, 7), (0, 7), &TableMode::Modular(pt.clone()), &mut init).unwrap();
            assert!(annihilates_with(&op, &t, 10).unwrap().holds(), "seed {seed}: {op}");
        }
    }

    #[test]
    fn exact_and_modular_planting_agree() {
        let pt = fixture_point(default_primes(1)[0], 9);
        let stencil = [Shift::nj(0, 0), Shift::nj(1, 0), Shift::nj(1, 1)];
        let mut r = rng(3);
        let (op, _) = random_planted(&mut r, &stencil, 1);
        let mk = |mode: &TableMode| {
            let mut init_rng = rng(77);
            solution_table(&op, (0, 3), (0, 3), mode, |_| {
                RatFunc::from_poly(random_nonzero_poly(&mut init_rng, [1, 0, 0, 0], 2, 5))
            })
            .unwrap()
        };
        let exact = mk(&TableMode::Exact);
        let img = mk(&TableMode::Modular(pt.clone()));
        assert_eq!(exact.project(&pt).unwrap(), img);
    }

    #[test]
    fn fixtures_verify_and_mutations_fail() {
        let pt = fixture_point(default_primes(1)[0], 1);
        for seed in 0..8 {
            let fx = telescoping_fixture(seed, &TableMode::Modular(pt.clone())).unwrap();
            let ok = verify_telescoping(&fx.cert, &fx.table, fx.window).unwrap();
            assert!(ok.verified(), "seed {seed}: {ok:?}");
            let bad = mutate(&fx.cert, seed);
            assert!(!verify_telescoping(&bad, &fx.table, fx.window).unwrap().verified(), "seed {seed}");
        }
        let exact = telescoping_fixture(42, &TableMode::Exact).unwrap();
        assert!(verify_telescoping(&exact.cert, &exact.table, exact.window).unwrap().verified());
    }
}
