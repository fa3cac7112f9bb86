//! Guessing recurrences from a finite table.
//!
//! The unknowns are rational constants `u[s, m]`, one per stencil shift `s`
//! (plus an optional inhomogeneous slot) and per monomial `m = q^a xn^b xj^c`
//! within the degree bounds. Each table point `p` whose shifts are all present
//! gives one linear equation
//!
//! ```text
//! sum_s sum_m u[s, m] m(p) T(p + s) + sum_m u[0, m] m(p) = 0
//! ```
//!
//! Equations are taken modulo word primes at several images of `q` (one image
//! cannot tell `q^a` from a constant), the nullspace is cut down by held-out
//! points, and survivors are lifted back to the rationals by Chinese
//! remaindering and rational reconstruction.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::okada::solve_cofactors;
use crate::ore::{annihilates_with, apply, OreOperator, Point, SequenceTable, Shift};
use crate::qfield::linalg::{nullspace_mod, rref_mod};
use crate::qfield::modular::{add_mod, default_primes, mul_mod, pow_mod_signed, reduce, word_primes};
use crate::qfield::{Monomial, Poly, PrimePoint, RatFunc};

pub const DEFAULT_OVERSAMPLE: usize = 20;
pub const DEFAULT_HOLDOUT: usize = 50;
pub const DEFAULT_DIMENSION_CAP: usize = 16;
pub const MAX_LIFT_PRIMES: usize = 6;
const MAX_IMAGES: usize = 64;

/// Shape of the operators searched for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzStructure {
    /// Shifts `(a, b)` standing for `S_n^a S_j^b`.
    pub stencil: Vec<(u32, u32)>,
    #[serde(default)]
    pub inhomogeneous: bool,
    /// Largest exponents of `q`, `xn`, `xj` in a coefficient.
    pub degrees: [u32; 3],
}

impl AnsatzStructure {
    pub fn new(stencil: impl IntoIterator<Item = (u32, u32)>, degrees: [u32; 3], inhomogeneous: bool) -> Result<Self> {
        let set: BTreeSet<(u32, u32)> = stencil.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Invalid("empty stencil".into()));
        }
        Ok(Self {
            stencil: set.into_iter().collect(),
            inhomogeneous,
            degrees,
        })
    }

    fn validated(&self) -> Result<Self> {
        Self::new(self.stencil.iter().copied(), self.degrees, self.inhomogeneous)
    }

    pub fn shifts(&self) -> Vec<Shift> {
        self.stencil.iter().map(|&(a, b)| Shift::nj(a, b)).collect()
    }

    /// Slots in column order: shifts from the highest down, then the
    /// inhomogeneous slot (`None`).
    fn slots(&self) -> Vec<Option<Shift>> {
        let mut s: Vec<Option<Shift>> = self.shifts().into_iter().rev().map(Some).collect();
        if self.inhomogeneous {
            s.push(None);
        }
        s
    }

    /// Coefficient monomials, highest first.
    pub fn monomials(&self) -> Vec<Monomial> {
        let [dq, dn, dj] = self.degrees;
        let mut out: Vec<Monomial> = (0..=dq)
            .flat_map(|a| (0..=dn).flat_map(move |b| (0..=dj).map(move |c| Monomial([a, b, c, 0]))))
            .collect();
        out.sort_unstable_by(|x, y| y.cmp(x));
        out
    }

    pub fn unknowns(&self) -> usize {
        let [dq, dn, dj] = self.degrees;
        let per = ((dq + 1) * (dn + 1) * (dj + 1)) as usize;
        per * (self.stencil.len() + self.inhomogeneous as usize)
    }

    /// Drops degrees that the points cannot resolve: `xn` when `n` is
    /// constant, `xj` when `j` is constant or `j - n` is.
    fn clamped_to(&self, points: &[Point]) -> Self {
        let constant = |f: &dyn Fn(&Point) -> i64| points.windows(2).all(|w| f(&w[0]) == f(&w[1]));
        let mut s = self.clone();
        if constant(&|p| p.n) {
            s.degrees[1] = 0;
        }
        if constant(&|p| p.j) || constant(&|p| p.j - p.n) {
            s.degrees[2] = 0;
        }
        s
    }

    /// Operator with the given coefficient vector, in column order.
    pub fn operator(&self, v: &[BigInt]) -> OreOperator {
        let monos = self.monomials();
        let mut terms = Vec::new();
        let mut inhom = None;
        for (k, slot) in self.slots().into_iter().enumerate() {
            let chunk = &v[k * monos.len()..(k + 1) * monos.len()];
            let poly = Poly::from_terms(monos.iter().zip(chunk).map(|(m, c)| (*m, c.clone())));
            match slot {
                Some(s) => terms.push((s, RatFunc::from_poly(poly))),
                None if !poly.is_zero() => inhom = Some(RatFunc::from_poly(poly)),
                None => {}
            }
        }
        OreOperator::from_terms(terms, inhom)
    }

    /// Coefficient vector of an operator that fits the ansatz, `None` if it
    /// does not (a shift outside the stencil, a denominator or a degree too high).
    pub fn vector_of(&self, op: &OreOperator) -> Option<Vec<BigInt>> {
        let monos = self.monomials();
        let slots = self.slots();
        let mut v = vec![BigInt::zero(); slots.len() * monos.len()];
        let mut place = |k: usize, c: &RatFunc| -> Option<()> {
            let p = c.as_poly()?;
            for (m, x) in p.terms() {
                let idx = monos.iter().position(|mm| mm == m)?;
                v[k * monos.len() + idx] = x.clone();
            }
            Some(())
        };
        for (&s, c) in op.terms() {
            let k = slots.iter().position(|x| *x == Some(s))?;
            place(k, c)?;
        }
        if let Some(c) = op.inhomogeneous() {
            let k = slots.iter().position(|x| x.is_none())?;
            place(k, c)?;
        }
        Some(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuessStatus {
    Validated,
    Refuted,
    Underdetermined,
}

impl std::fmt::Display for GuessStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GuessStatus::Validated => "validated",
            GuessStatus::Refuted => "refuted",
            GuessStatus::Underdetermined => "underdetermined",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessConfig {
    /// Training equations beyond the number of unknowns.
    pub oversample: usize,
    /// Points held out for validation; fewer are used when the table is small.
    pub holdout: usize,
    pub primes: Vec<u64>,
    pub seed: u64,
    pub dimension_cap: usize,
    /// Images of `q` per prime; chosen from the data when `None`.
    pub images: Option<usize>,
    pub lift: bool,
    /// Points checked in exact arithmetic after lifting.
    pub exact_check: usize,
}

impl Default for GuessConfig {
    fn default() -> Self {
        Self {
            oversample: DEFAULT_OVERSAMPLE,
            holdout: DEFAULT_HOLDOUT,
            primes: default_primes(2),
            seed: 0,
            dimension_cap: DEFAULT_DIMENSION_CAP,
            images: None,
            lift: true,
            exact_check: 12,
        }
    }
}

/// Basis vector of the validated space modulo one prime, in column order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularCandidate {
    pub prime: u64,
    pub values: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessCounts {
    pub unknowns: usize,
    pub training_points: usize,
    pub validation_points: usize,
    pub images_per_prime: usize,
    pub training_equations: usize,
    /// Nullspace dimension from the training equations alone.
    pub nullspace_dimension: usize,
    /// Dimension left after the held-out points.
    pub validated_dimension: usize,
    pub exact_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessReport {
    pub status: GuessStatus,
    /// The structure actually used, after clamping unresolvable degrees.
    pub structure: AnsatzStructure,
    /// Lifted operators with integer polynomial coefficients.
    pub operators: Vec<OreOperator>,
    pub candidates: Vec<ModularCandidate>,
    pub counts: GuessCounts,
    pub primes: Vec<u64>,
    pub lifted: bool,
    pub training: Vec<Point>,
}

impl GuessReport {
    pub fn training_points(&self) -> usize {
        self.counts.training_points
    }

    pub fn validation_points(&self) -> usize {
        self.counts.validation_points
    }

    pub fn primes_used(&self) -> &[u64] {
        &self.primes
    }
}

/// Where [`build_table`] takes its values from.
pub enum TableSource<'a> {
    /// `c(n, j)` for `1 <= j <= n`.
    Cofactors,
    /// `c(n, n)`, stored at `(n, n)`.
    Diagonal,
    Custom {
        j_range: (i64, i64),
        f: &'a dyn Fn(Point) -> RatFunc,
    },
}

pub fn build_table(n_range: (i64, i64), source: &TableSource) -> Result<SequenceTable> {
    let mut t = SequenceTable::exact();
    match source {
        TableSource::Cofactors | TableSource::Diagonal => {
            if n_range.0 < 1 {
                return Err(Error::Invalid(format!("cofactors need n >= 1, got {}", n_range.0)));
            }
            for n in n_range.0..=n_range.1 {
                let c = solve_cofactors(n as u32)?;
                if matches!(source, TableSource::Diagonal) {
                    t.insert_exact(Point::nj(n, n), c.get(n))?;
                } else {
                    for j in 1..=n {
                        t.insert_exact(Point::nj(n, j), c.get(j))?;
                    }
                }
            }
        }
        TableSource::Custom { j_range, f } => {
            for n in n_range.0..=n_range.1 {
                for j in j_range.0..=j_range.1 {
                    let p = Point::nj(n, j);
                    t.insert_exact(p, f(p))?;
                }
            }
        }
    }
    Ok(t)
}

/// Image residues for one table: `m(p) T(p + s)` for every column.
fn equation(structure: &AnsatzStructure, t: &SequenceTable, at: Point) -> Vec<u64> {
    let pt = t.prime_point().expect("modular image");
    let (p, q) = (pt.prime(), pt.q());
    let monos = structure.monomials();
    let mono_vals: Vec<u64> = monos
        .iter()
        .map(|m| {
            let [a, b, c, _] = m.0;
            pow_mod_signed(q, a as i64 + b as i64 * at.n + c as i64 * at.j, p).expect("q is a unit")
        })
        .collect();
    let mut row = Vec::with_capacity(monos.len() * (structure.stencil.len() + 1));
    for slot in structure.slots() {
        let v = match slot {
            Some(s) => t.get_mod(&at.shifted(s)).expect("base point"),
            None => 1,
        };
        row.extend(mono_vals.iter().map(|&m| mul_mod(m, v, p)));
    }
    row
}

fn dot(a: &[u64], b: &[u64], p: u64) -> u64 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| add_mod(acc, mul_mod(x, y, p), p))
}

/// Canonical reduced basis of the span of `vs`.
fn canonical(mut vs: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    rref_mod(&mut vs, p);
    vs.retain(|v| v.iter().any(|&x| x != 0));
    vs
}

fn pivots(basis: &[Vec<u64>]) -> Vec<usize> {
    basis.iter().map(|v| v.iter().position(|&x| x != 0).unwrap_or(v.len())).collect()
}

/// Result at one prime.
#[derive(Clone, Debug)]
struct PrimeSolve {
    prime: u64,
    nullity: usize,
    basis: Vec<Vec<u64>>,
    equations: usize,
}

fn solve_at_prime(
    structure: &AnsatzStructure,
    images: &[&SequenceTable],
    training: &[Point],
    holdout: &[Point],
) -> PrimeSolve {
    let prime = images[0].prime_point().expect("modular").prime();
    let cols = structure.unknowns();
    let mut rows = Vec::new();
    for t in images {
        for &at in training {
            if has_point(structure, t, at) {
                rows.push(equation(structure, t, at));
            }
        }
    }
    let equations = rows.len();
    let basis = nullspace_mod(&rows, cols, prime);
    let nullity = basis.len();
    let basis = filter_holdout(structure, images, holdout, basis, prime);
    PrimeSolve {
        prime,
        nullity,
        basis,
        equations,
    }
}

fn has_point(structure: &AnsatzStructure, t: &SequenceTable, at: Point) -> bool {
    structure.shifts().iter().all(|&s| t.contains(&at.shifted(s)))
}

/// Largest subspace of `basis` whose vectors satisfy every held-out equation.
fn filter_holdout(
    structure: &AnsatzStructure,
    images: &[&SequenceTable],
    holdout: &[Point],
    basis: Vec<Vec<u64>>,
    p: u64,
) -> Vec<Vec<u64>> {
    if basis.is_empty() {
        return basis;
    }
    let mut h = Vec::new();
    for t in images {
        for &at in holdout {
            if has_point(structure, t, at) {
                let e = equation(structure, t, at);
                h.push(basis.iter().map(|b| dot(&e, b, p)).collect::<Vec<u64>>());
            }
        }
    }
    let combos = nullspace_mod(&h, basis.len(), p);
    let cols = basis[0].len();
    let survivors = combos
        .iter()
        .map(|w| {
            let mut v = vec![0u64; cols];
            for (c, b) in w.iter().zip(&basis) {
                if *c != 0 {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = add_mod(*x, mul_mod(*c, *y, p), p);
                    }
                }
            }
            v
        })
        .collect();
    canonical(survivors, p)
}

/// `(x, m)` with `x` the CRT combination of the residues.
fn crt(residues: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for &(r, p) in residues {
        let pb = BigInt::from(p);
        // x + m * k = r (mod p)
        let mm = reduce(&m, p);
        let inv = crate::qfield::modular::inv_mod(mm, p).expect("distinct primes");
        let diff = crate::qfield::modular::sub_mod(r, reduce(&x, p), p);
        let k = mul_mod(diff, inv, p);
        x += &m * BigInt::from(k);
        m *= pb;
    }
    (x, m)
}

/// `a / b` with `a = b x (mod m)` and `|a|, b <= sqrt(m / 2)`.
pub fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (quot, rem) = r0.div_rem(&r1);
        r0 = std::mem::replace(&mut r1, rem);
        let t2 = &t0 - &quot * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// Integer vectors from bases that agree across primes.
fn lift(solves: &[&PrimeSolve]) -> Option<Vec<Vec<BigInt>>> {
    let dim = solves[0].basis.len();
    let cols = solves[0].basis.first().map_or(0, |v| v.len());
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut nums = Vec::with_capacity(cols);
        let mut den_lcm = BigInt::one();
        for c in 0..cols {
            let res: Vec<(u64, u64)> = solves.iter().map(|s| (s.basis[k][c], s.prime)).collect();
            let (x, m) = crt(&res);
            let (a, b) = rational_reconstruct(&x, &m)?;
            den_lcm = den_lcm.lcm(&b);
            nums.push((a, b));
        }
        let mut v: Vec<BigInt> = nums.into_iter().map(|(a, b)| a * (&den_lcm / b)).collect();
        let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in v.iter_mut() {
                *x /= &g;
            }
        }
        out.push(v);
    }
    Some(out)
}

fn residual_mod(structure: &AnsatzStructure, v: &[u64], t: &SequenceTable, at: Point) -> u64 {
    let p = t.prime_point().expect("modular").prime();
    dot(&equation(structure, t, at), v, p)
}

struct Plan {
    structure: AnsatzStructure,
    training: Vec<Point>,
    holdout: Vec<Point>,
}

/// Splits the base points into training and held-out sets.
fn plan(structure: &AnsatzStructure, domain: &[SequenceTable], config: &GuessConfig) -> Result<Plan> {
    let structure = structure.validated()?;
    let shifts = structure.shifts();
    let mut all: BTreeSet<Point> = BTreeSet::new();
    for t in domain {
        all.extend(t.base_points(&shifts));
    }
    let mut points: Vec<Point> = all.into_iter().collect();
    let structure = structure.clamped_to(&points);
    let total = points.len();
    let holdout = config.holdout.min(total / 3);
    if holdout == 0 {
        return Err(Error::InsufficientData {
            needed: 3,
            available: total,
            detail: format!("the stencil fits at {total} points; at least 3 are needed to hold any out"),
        });
    }
    points.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let held = points.split_off(total - holdout);
    points.sort_unstable();
    let mut held = held;
    held.sort_unstable();
    Ok(Plan {
        structure,
        training: points,
        holdout: held,
    })
}

/// Default number of `q` images per prime for a `q`-degree bound. Fewer than
/// `2 dq + 1` images let an operator agree with a multiple of the true one at
/// every sampled `q` without being one.
pub fn default_images(dq: u32) -> usize {
    2 * dq as usize + 2
}

fn insufficient(structure: &AnsatzStructure, config: &GuessConfig, images: usize, training: usize) -> Error {
    let needed = structure.unknowns() + config.oversample;
    Error::InsufficientData {
        needed,
        available: images * training,
        detail: format!(
            "{} unknowns plus {} oversampling need {} training points per q-image at {} images, have {}",
            structure.unknowns(),
            config.oversample,
            needed.div_ceil(images.max(1)),
            images,
            training
        ),
    }
}

/// Guesses from an exact table: projects it at several images of `q` per
/// prime, and re-checks lifted operators exactly on a small sub-window.
/// A modular table is passed to [`guess_images`] unchanged.
pub fn guess_operators(t: &SequenceTable, structure: &AnsatzStructure, config: &GuessConfig) -> Result<GuessReport> {
    if t.prime_point().is_some() {
        return guess_images(std::slice::from_ref(t), structure, config);
    }
    if config.primes.is_empty() {
        return Err(Error::Invalid("no primes configured".into()));
    }
    let pl = plan(structure, std::slice::from_ref(t), config)?;
    let s = &pl.structure;
    let train = pl.training.len();
    let needed = s.unknowns() + config.oversample;
    let k = config
        .images
        .unwrap_or_else(|| default_images(s.degrees[0]).max(needed.div_ceil(train.max(1))));
    if k > MAX_IMAGES || k * train < needed {
        return Err(insufficient(s, config, k.min(MAX_IMAGES), train));
    }
    let project = |prime: u64| -> Result<Vec<SequenceTable>> {
        PrimePoint::sample(prime, k, config.seed).iter().map(|pt| t.project(pt)).collect()
    };
    let mut images = BTreeMap::new();
    for &p in &config.primes {
        images.insert(p, project(p)?);
    }
    let mut extra = word_primes().filter(|p| !config.primes.contains(p));
    run(&pl, images, Some(t), config, &mut || {
        let p = extra.next()?;
        project(p).ok().map(|imgs| (p, imgs))
    })
}

/// Guesses from modular images. Images are grouped by prime; every prime
/// needs more distinct `q` residues than the `q`-degree bound.
pub fn guess_images(images: &[SequenceTable], structure: &AnsatzStructure, config: &GuessConfig) -> Result<GuessReport> {
    let mut by_prime: BTreeMap<u64, Vec<SequenceTable>> = BTreeMap::new();
    for t in images {
        let pt = t.prime_point().ok_or(Error::ModeMismatch)?;
        by_prime.entry(pt.prime()).or_default().push(t.clone());
    }
    if by_prime.is_empty() {
        return Err(Error::Invalid("no images given".into()));
    }
    let pl = plan(structure, images, config)?;
    let s = &pl.structure;
    for (p, imgs) in &by_prime {
        let qs: BTreeSet<u64> = imgs.iter().map(|t| t.prime_point().expect("modular").q()).collect();
        if qs.len() <= s.degrees[0] as usize {
            return Err(Error::InsufficientData {
                needed: s.degrees[0] as usize + 1,
                available: qs.len(),
                detail: format!("q-degree {} needs more distinct q images at prime {p}", s.degrees[0]),
            });
        }
        if imgs.len() * pl.training.len() < s.unknowns() + config.oversample {
            return Err(insufficient(s, config, imgs.len(), pl.training.len()));
        }
    }
    run(&pl, by_prime, None, config, &mut || None)
}

fn run(
    pl: &Plan,
    mut images: BTreeMap<u64, Vec<SequenceTable>>,
    exact: Option<&SequenceTable>,
    config: &GuessConfig,
    more: &mut dyn FnMut() -> Option<(u64, Vec<SequenceTable>)>,
) -> Result<GuessReport> {
    let s = &pl.structure;
    let solve_all = |imgs: &BTreeMap<u64, Vec<SequenceTable>>| -> Vec<PrimeSolve> {
        std::thread::scope(|scope| {
            let handles: Vec<_> = imgs
                .values()
                .map(|ts| {
                    scope.spawn(move || {
                        let refs: Vec<&SequenceTable> = ts.iter().collect();
                        solve_at_prime(s, &refs, &pl.training, &pl.holdout)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
        })
    };
    let mut solves = solve_all(&images);
    let images_per_prime = images.values().map(|v| v.len()).min().unwrap_or(0);
    let mut counts = GuessCounts {
        unknowns: s.unknowns(),
        training_points: pl.training.len(),
        validation_points: pl.holdout.len(),
        images_per_prime,
        training_equations: solves.iter().map(|x| x.equations).min().unwrap_or(0),
        nullspace_dimension: 0,
        validated_dimension: 0,
        exact_checked: 0,
    };
    // an unlucky prime can only enlarge the space, so the smallest one is the reference
    let reference = solves
        .iter()
        .min_by_key(|x| (x.basis.len(), x.nullity))
        .cloned()
        .expect("at least one prime");
    let agree = |x: &PrimeSolve| x.basis.len() == reference.basis.len() && pivots(&x.basis) == pivots(&reference.basis);
    for x in solves.iter().filter(|x| !agree(x)) {
        log::warn!("prime {} disagrees with {}; dropped", x.prime, reference.prime);
    }
    solves.retain(|x| agree(x));
    counts.nullspace_dimension = reference.nullity;
    counts.validated_dimension = reference.basis.len();
    let mut report = GuessReport {
        status: GuessStatus::Refuted,
        structure: s.clone(),
        operators: Vec::new(),
        candidates: reference
            .basis
            .iter()
            .map(|v| ModularCandidate {
                prime: reference.prime,
                values: v.clone(),
            })
            .collect(),
        counts,
        primes: solves.iter().map(|x| x.prime).collect(),
        lifted: false,
        training: pl.training.clone(),
    };
    if reference.basis.is_empty() {
        return Ok(report);
    }
    if reference.basis.len() > config.dimension_cap {
        report.status = GuessStatus::Underdetermined;
        report.candidates.clear();
        return Ok(report);
    }
    report.status = GuessStatus::Validated;
    if !config.lift {
        return Ok(report);
    }
    let lifted = loop {
        let refs: Vec<&PrimeSolve> = solves.iter().collect();
        if let Some(v) = lift(&refs) {
            let ops: Vec<OreOperator> = v.iter().map(|x| s.operator(x)).collect();
            if lift_holds(s, &ops, &images, &pl.training, &pl.holdout) {
                break Some(ops);
            }
        }
        if solves.len() >= MAX_LIFT_PRIMES {
            break None;
        }
        let Some((p, imgs)) = more() else { break None };
        let refs: Vec<&SequenceTable> = imgs.iter().collect();
        let x = solve_at_prime(s, &refs, &pl.training, &pl.holdout);
        images.insert(p, imgs);
        if agree(&x) {
            solves.push(x);
            report.primes.push(p);
        }
    };
    let Some(ops) = lifted else {
        log::info!("rational reconstruction did not stabilize; keeping modular candidates");
        return Ok(report);
    };
    report.lifted = true;
    let mut ops = ops;
    if let Some(t) = exact {
        let window: Vec<Point> = pl.training.iter().chain(&pl.holdout).copied().collect::<BTreeSet<_>>().into_iter().take(config.exact_check).collect();
        let mut checked = 0;
        ops.retain(|op| {
            let mut ok = true;
            for &at in &window {
                match apply(op, t, at) {
                    Ok(v) if v.is_zero() => checked += 1,
                    Ok(_) => ok = false,
                    Err(Error::SingularCoefficient(_)) => {}
                    Err(_) => ok = false,
                }
            }
            ok
        });
        report.counts.exact_checked = checked;
        if ops.is_empty() {
            report.status = GuessStatus::Refuted;
        }
    }
    report.operators = ops;
    Ok(report)
}

/// Lifted operators must vanish at every training and held-out point of
/// every image.
fn lift_holds(
    s: &AnsatzStructure,
    ops: &[OreOperator],
    images: &BTreeMap<u64, Vec<SequenceTable>>,
    training: &[Point],
    holdout: &[Point],
) -> bool {
    ops.iter().all(|op| {
        let Some(v) = s.vector_of(op) else { return false };
        images.iter().all(|(&p, ts)| {
            let vm: Vec<u64> = v.iter().map(|x| reduce(x, p)).collect();
            ts.iter().all(|t| {
                training
                    .iter()
                    .chain(holdout)
                    .filter(|&&at| has_point(s, t, at))
                    .all(|&at| residual_mod(s, &vm, t, at) == 0)
            })
        })
    })
}

/// Keeps the operators of `r` that annihilate `t2`. Modular candidates are
/// checked instead when nothing was lifted; they need `t2` at their prime or
/// exact.
pub fn revalidate(r: &GuessReport, t2: &SequenceTable) -> GuessReport {
    let mut out = r.clone();
    if r.status == GuessStatus::Underdetermined {
        return out;
    }
    let train: BTreeSet<&Point> = r.training.iter().collect();
    let shifts = r.structure.shifts();
    let base = t2.base_points(&shifts);
    if base.iter().any(|p| train.contains(p)) {
        log::warn!("revalidation table overlaps the training points");
    }
    out.counts.validation_points += base.len();
    if r.lifted {
        out.operators.retain(|op| annihilates_with(op, t2, 1).is_ok_and(|a| a.holds()));
        out.candidates.retain(|c| {
            let op_ok = !out.operators.is_empty();
            op_ok || c.values.is_empty()
        });
        if out.operators.is_empty() {
            out.candidates.clear();
        }
    } else {
        let s = &r.structure;
        out.candidates.retain(|c| {
            let img = match t2.prime_point() {
                Some(pt) if pt.prime() == c.prime => t2.clone(),
                Some(_) => return false,
                None => match PrimePoint::sample(c.prime, 1, 0x5eed).first().map(|pt| t2.project(pt)) {
                    Some(Ok(t)) => t,
                    _ => return false,
                },
            };
            img.base_points(&shifts).iter().all(|&at| residual_mod(s, &c.values, &img, at) == 0)
        });
    }
    let survivors = if r.lifted { out.operators.len() } else { out.candidates.len() };
    out.counts.validated_dimension = survivors;
    out.status = if survivors > 0 { GuessStatus::Validated } else { GuessStatus::Refuted };
    out
}

/// One structure tried by [`escalate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationStep {
    pub degrees: [u32; 3],
    pub unknowns: usize,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationReport {
    pub steps: Vec<EscalationStep>,
    pub report: Option<GuessReport>,
}

/// Tries degree bounds in order of total degree, each at most `max_degree`
/// and with at most `budget` unknowns, until one validates.
pub fn escalate(
    t: &SequenceTable,
    stencil: &[(u32, u32)],
    inhomogeneous: bool,
    max_degree: u32,
    budget: usize,
    config: &GuessConfig,
) -> Result<EscalationReport> {
    let mut steps = Vec::new();
    for total in 0..=3 * max_degree {
        for dq in 0..=max_degree.min(total) {
            for dn in 0..=max_degree.min(total - dq) {
                let dj = total - dq - dn;
                if dj > max_degree {
                    continue;
                }
                let s = AnsatzStructure::new(stencil.iter().copied(), [dq, dn, dj], inhomogeneous)?;
                if s.unknowns() > budget {
                    continue;
                }
                let outcome = match guess_operators(t, &s, config) {
                    Ok(r) if r.status == GuessStatus::Validated && r.structure.degrees == s.degrees => {
                        steps.push(EscalationStep {
                            degrees: s.degrees,
                            unknowns: s.unknowns(),
                            outcome: "validated".into(),
                        });
                        return Ok(EscalationReport { steps, report: Some(r) });
                    }
                    // a clamped structure repeats a smaller one
                    Ok(r) if r.structure.degrees != s.degrees => "clamped".to_string(),
                    Ok(r) => r.status.to_string(),
                    Err(e @ Error::InsufficientData { .. }) => e.to_string(),
                    Err(e) => return Err(e),
                };
                steps.push(EscalationStep {
                    degrees: s.degrees,
                    unknowns: s.unknowns(),
                    outcome,
                });
            }
        }
    }
    Ok(EscalationReport { steps, report: None })
}
