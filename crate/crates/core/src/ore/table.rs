//! Finite sequence tables and operator application.

use std::collections::{BTreeMap, BTreeSet};

use super::{OreOperator, Point, Shift, DEFAULT_MIN_ADMISSIBLE};
use crate::error::{Error, Result};
use crate::qfield::{Fp, PrimePoint, RatFunc, Var};

/// A table entry or an operator value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(RatFunc),
    Mod(Fp),
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Mod(x) => x.is_zero(),
        }
    }

    pub fn as_exact(&self) -> Option<&RatFunc> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Mod(_) => None,
        }
    }

    pub fn as_mod(&self) -> Option<Fp> {
        match self {
            Value::Mod(x) => Some(*x),
            Value::Exact(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableMode {
    Exact,
    Modular(PrimePoint),
}

/// Values on a finite set of points, either in `Q(q)` or modulo a prime at a
/// fixed image of `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceTable {
    Exact(BTreeMap<Point, RatFunc>),
    Modular { point: PrimePoint, values: BTreeMap<Point, u64> },
}

impl SequenceTable {
    pub fn exact() -> Self {
        SequenceTable::Exact(BTreeMap::new())
    }

    pub fn modular(point: PrimePoint) -> Self {
        SequenceTable::Modular {
            point,
            values: BTreeMap::new(),
        }
    }

    pub fn from_fn_exact(points: impl IntoIterator<Item = Point>, mut f: impl FnMut(Point) -> RatFunc) -> Self {
        SequenceTable::Exact(points.into_iter().map(|p| (p, f(p))).collect())
    }

    pub fn mode(&self) -> TableMode {
        match self {
            SequenceTable::Exact(_) => TableMode::Exact,
            SequenceTable::Modular { point, .. } => TableMode::Modular(point.clone()),
        }
    }

    pub fn prime_point(&self) -> Option<&PrimePoint> {
        match self {
            SequenceTable::Exact(_) => None,
            SequenceTable::Modular { point, .. } => Some(point),
        }
    }

    pub fn insert_exact(&mut self, p: Point, v: RatFunc) -> Result<()> {
        match self {
            SequenceTable::Exact(m) => {
                m.insert(p, v);
                Ok(())
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn insert_mod(&mut self, p: Point, v: u64) -> Result<()> {
        match self {
            SequenceTable::Modular { point, values } => {
                values.insert(p, v % point.prime());
                Ok(())
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn insert(&mut self, p: Point, v: Value) -> Result<()> {
        match v {
            Value::Exact(r) => self.insert_exact(p, r),
            Value::Mod(x) => {
                if self.prime_point().map(|pt| pt.prime()) != Some(x.modulus()) {
                    return Err(Error::ModeMismatch);
                }
                self.insert_mod(p, x.value())
            }
        }
    }

    pub fn get(&self, p: &Point) -> Option<Value> {
        match self {
            SequenceTable::Exact(m) => m.get(p).cloned().map(Value::Exact),
            SequenceTable::Modular { point, values } => values.get(p).map(|&v| Value::Mod(point.fp(v))),
        }
    }

    pub fn get_exact(&self, p: &Point) -> Option<&RatFunc> {
        match self {
            SequenceTable::Exact(m) => m.get(p),
            _ => None,
        }
    }

    pub fn get_mod(&self, p: &Point) -> Option<u64> {
        match self {
            SequenceTable::Modular { values, .. } => values.get(p).copied(),
            _ => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            SequenceTable::Exact(m) => m.contains_key(p),
            SequenceTable::Modular { values, .. } => values.contains_key(p),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        match self {
            SequenceTable::Exact(m) => m.keys().copied().collect(),
            SequenceTable::Modular { values, .. } => values.keys().copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SequenceTable::Exact(m) => m.len(),
            SequenceTable::Modular { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Image of an exact table at `pt`. Points whose value has a vanishing
    /// denominator there are left out.
    pub fn project(&self, pt: &PrimePoint) -> Result<SequenceTable> {
        match self {
            SequenceTable::Exact(m) => {
                let mut values = BTreeMap::new();
                for (p, r) in m {
                    let at = if r.uses(Var::Xn) || r.uses(Var::Xj) || r.uses(Var::Xi) {
                        pt.at_index(p.n, p.j, p.i)
                    } else {
                        pt.clone()
                    };
                    match r.eval(&at) {
                        Ok(x) => {
                            values.insert(*p, x.value());
                        }
                        Err(Error::BadEvaluationPoint(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok(SequenceTable::Modular {
                    point: pt.clone(),
                    values,
                })
            }
            SequenceTable::Modular { point, .. } if point == pt => Ok(self.clone()),
            SequenceTable::Modular { .. } => Err(Error::ModeMismatch),
        }
    }

    /// Keeps the points accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Point) -> bool) -> SequenceTable {
        match self {
            SequenceTable::Exact(m) => SequenceTable::Exact(m.iter().filter(|(p, _)| keep(p)).map(|(p, v)| (*p, v.clone())).collect()),
            SequenceTable::Modular { point, values } => SequenceTable::Modular {
                point: point.clone(),
                values: values.iter().filter(|(p, _)| keep(p)).map(|(p, v)| (*p, *v)).collect(),
            },
        }
    }

    /// The diagonal `j = n`, re-indexed as `(n, 0, i)`.
    pub fn diagonal(&self) -> SequenceTable {
        let moved = |p: &Point| Point::new(p.n, 0, p.i);
        match self {
            SequenceTable::Exact(m) => {
                SequenceTable::Exact(m.iter().filter(|(p, _)| p.n == p.j).map(|(p, v)| (moved(p), v.clone())).collect())
            }
            SequenceTable::Modular { point, values } => SequenceTable::Modular {
                point: point.clone(),
                values: values.iter().filter(|(p, _)| p.n == p.j).map(|(p, v)| (moved(p), *v)).collect(),
            },
        }
    }

    /// Base points at which every shift in `shifts` lands inside the table.
    pub fn base_points(&self, shifts: &[Shift]) -> Vec<Point> {
        let domain = self.points();
        let Some(&first) = shifts.first() else {
            return domain;
        };
        let set: BTreeSet<Point> = domain.iter().copied().collect();
        let mut out: Vec<Point> = domain
            .iter()
            .map(|d| Point::new(d.n - first.n as i64, d.j - first.j as i64, d.i - first.i as i64))
            .filter(|b| shifts.iter().all(|&u| set.contains(&b.shifted(u))))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn singular(at: Point) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::BadEvaluationPoint(_) => Error::SingularCoefficient(at),
        e => e,
    }
}

/// Coefficient at a point, in the table's mode.
fn coeff_value(c: &RatFunc, at: Point, mode: &TableMode) -> Result<Value> {
    match mode {
        TableMode::Exact => Ok(Value::Exact(c.instantiate(at.n, at.j, at.i).map_err(singular(at))?)),
        TableMode::Modular(pt) => Ok(Value::Mod(c.eval(&pt.at_index(at.n, at.j, at.i)).map_err(singular(at))?)),
    }
}

fn mul(a: &Value, b: &Value) -> Result<Value> {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x * y)),
        (Value::Mod(x), Value::Mod(y)) => Ok(Value::Mod(x.mul(y))),
        _ => Err(Error::ModeMismatch),
    }
}

fn add(a: &Value, b: &Value) -> Result<Value> {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x + y)),
        (Value::Mod(x), Value::Mod(y)) => Ok(Value::Mod(x.add(y))),
        _ => Err(Error::ModeMismatch),
    }
}

pub(crate) fn zero_value(mode: &TableMode) -> Value {
    match mode {
        TableMode::Exact => Value::Exact(RatFunc::zero()),
        TableMode::Modular(pt) => Value::Mod(Fp::zero(pt.prime())),
    }
}

pub(crate) fn value_add(a: &Value, b: &Value) -> Result<Value> {
    add(a, b)
}

pub(crate) fn value_sub(a: &Value, b: &Value) -> Result<Value> {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x - y)),
        (Value::Mod(x), Value::Mod(y)) => Ok(Value::Mod(x.sub(y))),
        _ => Err(Error::ModeMismatch),
    }
}

pub(crate) fn coeff_times(c: &RatFunc, at: Point, v: &Value, mode: &TableMode) -> Result<Value> {
    mul(&coeff_value(c, at, mode)?, v)
}

/// `sum_u c_u(at) T(at + u) + p0(at)`.
pub fn apply(a: &OreOperator, t: &SequenceTable, at: Point) -> Result<Value> {
    let mode = t.mode();
    let mut acc = zero_value(&mode);
    for (&u, c) in a.terms() {
        let p = at.shifted(u);
        let v = t.get(&p).ok_or(Error::MissingPoint(p))?;
        acc = add(&acc, &coeff_times(c, at, &v, &mode)?)?;
    }
    if let Some(p0) = a.inhomogeneous() {
        acc = add(&acc, &coeff_value(p0, at, &mode)?)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilationReport {
    /// Points where the operator was applied and its leading coefficient is nonzero.
    pub admissible: usize,
    /// Points skipped because a coefficient was singular or the leading one vanished.
    pub inadmissible: Vec<Point>,
    /// Points with a nonzero residual.
    pub failures: Vec<Point>,
}

impl AnnihilationReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Applies `a` at every base point of `t`. Errors when fewer than
/// `min_admissible` points are admissible and no failure was seen.
pub fn annihilates_with(a: &OreOperator, t: &SequenceTable, min_admissible: usize) -> Result<AnnihilationReport> {
    let mode = t.mode();
    let shifts: Vec<Shift> = a.terms().keys().copied().collect();
    let lead = a.leading().map(|(_, c)| c.clone());
    let mut report = AnnihilationReport {
        admissible: 0,
        inadmissible: Vec::new(),
        failures: Vec::new(),
    };
    for at in t.base_points(&shifts) {
        let value = match apply(a, t, at) {
            Ok(v) => v,
            Err(Error::SingularCoefficient(_)) => {
                report.inadmissible.push(at);
                continue;
            }
            Err(e) => return Err(e),
        };
        if !value.is_zero() {
            report.failures.push(at);
            continue;
        }
        let lead_vanishes = match &lead {
            Some(c) => coeff_value(c, at, &mode)?.is_zero(),
            None => false,
        };
        if lead_vanishes {
            report.inadmissible.push(at);
        } else {
            report.admissible += 1;
        }
    }
    if report.failures.is_empty() && report.admissible < min_admissible.max(1) {
        return Err(Error::NoAdmissiblePoints {
            found: report.admissible,
            required: min_admissible.max(1),
        });
    }
    Ok(report)
}

/// True iff `a` vanishes at every admissible point; needs at least
/// [`DEFAULT_MIN_ADMISSIBLE`] of them.
pub fn annihilates(a: &OreOperator, t: &SequenceTable) -> Result<bool> {
    Ok(annihilates_with(a, t, DEFAULT_MIN_ADMISSIBLE)?.holds())
}
