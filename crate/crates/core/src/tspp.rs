//! Totally symmetric plane partitions by brute force.
//!
//! A TSPP inside `[1, n]^3` is a union of `S3`-orbits of cells, so it is fixed
//! by its set of sorted representatives `i <= j <= k`. Those sets are exactly
//! the order ideals of the sorted triples under the componentwise order, which
//! is what [`enumerate_tspp`] walks.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::qcomb::theorem_rhs_at_one;
use crate::qfield::Poly;

pub type Cell = (u32, u32, u32);

pub const DEFAULT_ENUM_LIMIT: u32 = 6;

fn sort3((a, b, c): Cell) -> Cell {
    let mut v = [a, b, c];
    v.sort_unstable();
    (v[0], v[1], v[2])
}

/// Distinct coordinate permutations of a cell.
pub fn orbit_of(c: Cell) -> Vec<Cell> {
    let (a, b, d) = c;
    let mut out: Vec<Cell> = vec![(a, b, d), (a, d, b), (b, a, d), (b, d, a), (d, a, b), (d, b, a)];
    out.sort_unstable();
    out.dedup();
    out
}

/// Weakly decreasing array of positive integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanePartition {
    rows: Vec<Vec<u32>>,
}

impl PlanePartition {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        for (r, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::Invalid(format!("row {r} is empty")));
            }
            if row.contains(&0) {
                return Err(Error::Invalid(format!("row {r} has a zero entry")));
            }
            if row.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::Invalid(format!("row {r} is not weakly decreasing")));
            }
            if r > 0 {
                let above = &rows[r - 1];
                if row.len() > above.len() || row.iter().zip(above).any(|(x, y)| x > y) {
                    return Err(Error::Invalid(format!("column condition fails between rows {} and {r}", r - 1)));
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn size(&self) -> u64 {
        self.rows.iter().flatten().map(|&x| x as u64).sum()
    }

    pub fn largest_part(&self) -> u32 {
        self.rows.first().and_then(|r| r.first()).copied().unwrap_or(0)
    }

    pub fn to_diagram(&self) -> CellDiagram {
        let mut cells = BTreeSet::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &h) in row.iter().enumerate() {
                for k in 1..=h {
                    cells.insert((i as u32 + 1, j as u32 + 1, k));
                }
            }
        }
        CellDiagram { cells }
    }

    pub fn from_diagram(d: &CellDiagram) -> Self {
        let mut heights: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for &(i, j, k) in &d.cells {
            let h = heights.entry((i, j)).or_default();
            *h = (*h).max(k);
        }
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for ((i, j), h) in heights {
            let (i, j) = (i as usize - 1, j as usize - 1);
            if rows.len() <= i {
                rows.resize(i + 1, Vec::new());
            }
            if rows[i].len() <= j {
                rows[i].resize(j + 1, 0);
            }
            rows[i][j] = h;
        }
        Self { rows }
    }
}

/// A finite set of unit cubes, indexed from 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellDiagram {
    cells: BTreeSet<Cell>,
}

impl CellDiagram {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a diagram, rejecting sets that are not downward closed.
    pub fn new(cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let cells: BTreeSet<Cell> = cells.into_iter().collect();
        if cells.iter().any(|&(i, j, k)| i == 0 || j == 0 || k == 0) {
            return Err(Error::Invalid("cell coordinates start at 1".into()));
        }
        let d = Self { cells };
        if !d.is_downward_closed() {
            return Err(Error::Invalid("cell set is not downward closed".into()));
        }
        Ok(d)
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Checking the three unit steps down from every cell suffices.
    pub fn is_downward_closed(&self) -> bool {
        self.cells.iter().all(|&(i, j, k)| {
            (i == 1 || self.cells.contains(&(i - 1, j, k)))
                && (j == 1 || self.cells.contains(&(i, j - 1, k)))
                && (k == 1 || self.cells.contains(&(i, j, k - 1)))
        })
    }

    pub fn is_totally_symmetric(&self) -> bool {
        self.cells
            .iter()
            .all(|&c| orbit_of(c).iter().all(|p| self.cells.contains(p)))
    }

    pub fn orbits(&self) -> Result<OrbitSet> {
        if !self.is_totally_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let mut orbits: BTreeMap<Cell, Vec<Cell>> = BTreeMap::new();
        for &c in &self.cells {
            orbits.entry(sort3(c)).or_default().push(c);
        }
        Ok(OrbitSet { orbits })
    }

    pub fn orbit_count(&self) -> Result<usize> {
        Ok(self.orbits()?.len())
    }
}

/// The cells of a symmetric diagram grouped by sorted representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSet {
    orbits: BTreeMap<Cell, Vec<Cell>>,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cell, &[Cell])> {
        self.orbits.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.values().map(Vec::len).collect()
    }
}

/// Sorted triples of `[1, n]^3` listed by coordinate sum, which is a linear
/// extension of the componentwise order.
fn sorted_triples(n: u32) -> Vec<Cell> {
    let mut v: Vec<Cell> = (1..=n)
        .flat_map(|i| (i..=n).flat_map(move |j| (j..=n).map(move |k| (i, j, k))))
        .collect();
    v.sort_by_key(|&(i, j, k)| (i + j + k, i, j, k));
    v
}

/// Lower covers in the quotient order: decrement one coordinate and re-sort.
fn lower_covers((a, b, c): Cell) -> Vec<Cell> {
    let mut out: Vec<Cell> = [(a - 1, b, c), (a, b - 1, c), (a, b, c - 1)]
        .into_iter()
        .filter(|&(x, y, z)| x >= 1 && y >= 1 && z >= 1)
        .map(sort3)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Depth-first walk over order ideals of the sorted triples. Each element is
/// decided in linear-extension order and may only be taken when all its lower
/// covers were taken, so every ideal is reached by exactly one path and no
/// branch dead-ends.
pub struct TsppIter {
    order: Vec<Cell>,
    covers: Vec<Vec<usize>>,
    stack: Vec<(usize, Vec<bool>)>,
}

impl TsppIter {
    fn new(n: u32) -> Self {
        let order = sorted_triples(n);
        let index: BTreeMap<Cell, usize> = order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let covers = order
            .iter()
            .map(|&c| lower_covers(c).iter().map(|l| index[l]).collect())
            .collect();
        let stack = vec![(0, vec![false; order.len()])];
        Self { order, covers, stack }
    }

    fn diagram(&self, taken: &[bool]) -> CellDiagram {
        let cells = self
            .order
            .iter()
            .zip(taken)
            .filter(|(_, &t)| t)
            .flat_map(|(&c, _)| orbit_of(c))
            .collect();
        CellDiagram { cells }
    }
}

impl Iterator for TsppIter {
    type Item = CellDiagram;

    fn next(&mut self) -> Option<CellDiagram> {
        while let Some((pos, taken)) = self.stack.pop() {
            if pos == self.order.len() {
                return Some(self.diagram(&taken));
            }
            if self.covers[pos].iter().all(|&l| taken[l]) {
                let mut with = taken.clone();
                with[pos] = true;
                self.stack.push((pos + 1, with));
            }
            self.stack.push((pos + 1, taken));
        }
        None
    }
}

/// All TSPPs with largest part at most `n`, subject to [`DEFAULT_ENUM_LIMIT`].
pub fn enumerate_tspp(n: u32) -> Result<TsppIter> {
    enumerate_tspp_with_limit(n, DEFAULT_ENUM_LIMIT)
}

pub fn enumerate_tspp_with_limit(n: u32, limit: u32) -> Result<TsppIter> {
    if n > limit {
        return Err(Error::EnumerationTooLarge {
            n,
            limit,
            predicted: theorem_rhs_at_one(n).to_string(),
        });
    }
    Ok(TsppIter::new(n))
}

/// `sum q^(number of orbits)` over all TSPPs in `[1, n]^3`.
pub fn generating_polynomial(n: u32) -> Result<Poly> {
    generating_polynomial_with_limit(n, DEFAULT_ENUM_LIMIT)
}

pub fn generating_polynomial_with_limit(n: u32, limit: u32) -> Result<Poly> {
    let mut hist: BTreeMap<u32, i64> = BTreeMap::new();
    for d in enumerate_tspp_with_limit(n, limit)? {
        *hist.entry(d.orbit_count()? as u32).or_default() += 1;
    }
    let top = hist.keys().next_back().copied().unwrap_or(0) as usize;
    let mut coeffs = vec![0i64; top + 1];
    for (e, c) in hist {
        coeffs[e as usize] = c;
    }
    Ok(Poly::from_q_coeffs(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every downward-closed subset of `[1, n]^3`, via plane partitions in an
    /// `n x n` box with parts at most `n`.
    fn all_boxed_diagrams(n: u32) -> Vec<CellDiagram> {
        let cells = (n * n) as usize;
        let mut out = Vec::new();
        let mut heights = vec![0u32; cells];
        loop {
            let ok = (0..n as usize).all(|i| {
                (0..n as usize).all(|j| {
                    let h = heights[i * n as usize + j];
                    (j == 0 || heights[i * n as usize + j - 1] >= h) && (i == 0 || heights[(i - 1) * n as usize + j] >= h)
                })
            });
            if ok {
                let mut set = BTreeSet::new();
                for i in 0..n {
                    for j in 0..n {
                        for k in 1..=heights[(i * n + j) as usize] {
                            set.insert((i + 1, j + 1, k));
                        }
                    }
                }
                out.push(CellDiagram { cells: set });
            }
            let mut t = 0;
            loop {
                if t == cells {
                    return out;
                }
                if heights[t] < n {
                    heights[t] += 1;
                    break;
                }
                heights[t] = 0;
                t += 1;
            }
        }
    }

    #[test]
    fn symmetry_examples() {
        assert!(CellDiagram::empty().is_totally_symmetric());
        assert!(CellDiagram::new([(1, 1, 1)]).unwrap().is_totally_symmetric());
        let d = CellDiagram::new([(1, 1, 1), (1, 1, 2)]).unwrap();
        assert!(!d.is_totally_symmetric());
        assert_eq!(d.orbit_count(), Err(Error::NotSymmetric));
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(CellDiagram::empty().orbit_count().unwrap(), 0);
        let cube = CellDiagram::new((1..=2).flat_map(|i| (1..=2).flat_map(move |j| (1..=2).map(move |k| (i, j, k))))).unwrap();
        assert_eq!(cube.orbit_count().unwrap(), 4);
        // the smallest TSPP holding (2,4,6) is the down-closure of its orbit
        let mut cells = BTreeSet::new();
        for (a, b, c) in orbit_of((2, 4, 6)) {
            for i in 1..=a {
                for j in 1..=b {
                    for k in 1..=c {
                        cells.insert((i, j, k));
                    }
                }
            }
        }
        let d = CellDiagram::new(cells).unwrap();
        let orbits = d.orbits().unwrap();
        let (_, members) = orbits.iter().find(|(rep, _)| **rep == (2, 4, 6)).unwrap();
        assert_eq!(members.len(), 6);
        assert_eq!(orbit_of((2, 4, 6)).len(), 6);
    }

    #[test]
    fn small_enumerations() {
        let zero: Vec<_> = enumerate_tspp(0).unwrap().collect();
        assert_eq!(zero, vec![CellDiagram::empty()]);
        let one: Vec<_> = enumerate_tspp(1).unwrap().collect();
        assert_eq!(one.len(), 2);
        let mut counts: Vec<usize> = enumerate_tspp(2).unwrap().map(|d| d.orbit_count().unwrap()).collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![0, 1, 2, 3, 4]);
        assert_eq!(generating_polynomial(1).unwrap(), Poly::from_q_coeffs(&[1, 1]));
        assert_eq!(generating_polynomial(2).unwrap(), Poly::from_q_coeffs(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn limit_reports_prediction() {
        match enumerate_tspp(7) {
            Err(Error::EnumerationTooLarge { n: 7, limit: 6, predicted }) => assert_eq!(predicted, "21760"),
            other => panic!("unexpected {:?}", other.map(|_| ())),
        }
        assert!(enumerate_tspp_with_limit(7, 7).is_ok());
    }

    #[test]
    fn agrees_with_brute_force_on_the_cube() {
        for n in 0..=3 {
            let brute: BTreeSet<CellDiagram> = all_boxed_diagrams(n)
                .into_iter()
                .filter(CellDiagram::is_totally_symmetric)
                .collect();
            let walked: Vec<CellDiagram> = enumerate_tspp(n).unwrap().collect();
            let walked_set: BTreeSet<CellDiagram> = walked.iter().cloned().collect();
            assert_eq!(walked.len(), walked_set.len(), "duplicates at n = {n}");
            assert_eq!(walked_set, brute, "n = {n}");
        }
    }

    #[test]
    fn quotient_order_ideals_match_cube_ideals() {
        for n in 1..=3 {
            let triples = sorted_triples(n);
            for mask in 0u32..(1 << triples.len()) {
                let chosen: BTreeSet<Cell> =
                    triples.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c).collect();
                let quotient_closed = chosen.iter().all(|&b| {
                    triples
                        .iter()
                        .filter(|a| a.0 <= b.0 && a.1 <= b.1 && a.2 <= b.2)
                        .all(|a| chosen.contains(a))
                });
                let union = CellDiagram {
                    cells: chosen.iter().flat_map(|&c| orbit_of(c)).collect(),
                };
                assert_eq!(quotient_closed, union.is_downward_closed(), "n = {n}, mask = {mask:b}");
            }
        }
    }

    #[test]
    fn orbit_sizes_and_cell_totals() {
        for n in 0..=5 {
            for d in enumerate_tspp(n).unwrap() {
                assert!(d.is_downward_closed());
                let orbits = d.orbits().unwrap();
                for (rep, members) in orbits.iter() {
                    let expected = match (rep.0 == rep.1, rep.1 == rep.2) {
                        (true, true) => 1,
                        (false, false) => 6,
                        _ => 3,
                    };
                    assert_eq!(members.len(), expected);
                }
                assert!(orbits.sizes().iter().all(|s| [1, 3, 6].contains(s)));
                assert_eq!(orbits.sizes().iter().sum::<usize>(), d.len());
            }
        }
    }

    #[test]
    fn plane_partition_round_trip() {
        let pp = PlanePartition::new(vec![vec![3, 2, 1], vec![2, 1], vec![1]]).unwrap();
        let d = pp.to_diagram();
        assert!(d.is_downward_closed());
        assert!(d.is_totally_symmetric());
        assert_eq!(d.len() as u64, pp.size());
        assert_eq!(PlanePartition::from_diagram(&d), pp);
        assert_eq!(pp.largest_part(), 3);
        assert!(PlanePartition::new(vec![vec![1, 2]]).is_err());
        assert!(PlanePartition::new(vec![vec![1], vec![2]]).is_err());
        for d in enumerate_tspp(3).unwrap() {
            let pp = PlanePartition::from_diagram(&d);
            assert_eq!(pp.to_diagram(), d);
            assert!(pp.largest_part() <= 3);
        }
    }
}
