//! Sparse linear algebra over GF(2): ranks, bigraded homology of level
//! complexes, and the rank of the map induced by a subcomplex inclusion.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{FilteredComplex, LevelComplex};
use crate::error::{Error, Result};

/// Matrices at or below this many bits are ranked by dense elimination.
const DENSE_RANK_BITS: usize = 1 << 28;

/// A sparse matrix over GF(2), stored column-major with sorted row indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseGF2Matrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<u32>>,
}

/// Symmetric difference of two sorted index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl SparseGF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseGF2Matrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Builds a matrix from a set of `(row, col)` positions; repeated pairs
    /// are collapsed. Panics on out-of-range indices.
    pub fn from_entries(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for (r, c) in entries {
            assert!(r < rows && c < cols, "entry ({r}, {c}) outside {rows}x{cols}");
            columns[c].push(r as u32);
        }
        for col in &mut columns {
            col.sort_unstable();
            col.dedup();
        }
        SparseGF2Matrix { rows, cols, columns }
    }

    /// Columns must already be strictly increasing lists of row indices.
    pub fn from_sorted_columns(rows: usize, columns: Vec<Vec<u32>>) -> Self {
        debug_assert!(columns
            .iter()
            .all(|c| c.windows(2).all(|w| w[0] < w[1]) && c.last().is_none_or(|&r| (r as usize) < rows)));
        SparseGF2Matrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[u32] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.columns[c].binary_search(&(r as u32)).is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// All nonzero positions as `(row, col)`, column by column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&r| (r as usize, c)))
    }

    pub fn transpose(&self) -> SparseGF2Matrix {
        SparseGF2Matrix::from_entries(self.cols, self.rows, self.entries().map(|(r, c)| (c, r)))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseGF2Matrix) -> SparseGF2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let columns = other
            .columns
            .par_iter()
            .map(|col| {
                let mut acc: Vec<u32> = Vec::new();
                for &k in col {
                    acc.extend_from_slice(&self.columns[k as usize]);
                }
                acc.sort_unstable();
                let mut out = Vec::with_capacity(acc.len());
                let mut i = 0;
                while i < acc.len() {
                    let mut j = i;
                    while j < acc.len() && acc[j] == acc[i] {
                        j += 1;
                    }
                    if (j - i) % 2 == 1 {
                        out.push(acc[i]);
                    }
                    i = j;
                }
                out
            })
            .collect();
        SparseGF2Matrix::from_sorted_columns(self.rows, columns)
    }

    /// The submatrix on the given rows and columns, re-indexed in the order
    /// the indices are listed.
    pub fn select(&self, row_idx: &[u32], col_idx: &[u32]) -> SparseGF2Matrix {
        let mut local = vec![u32::MAX; self.rows];
        for (k, &r) in row_idx.iter().enumerate() {
            local[r as usize] = k as u32;
        }
        let columns = col_idx
            .iter()
            .map(|&c| {
                let mut col: Vec<u32> = self.columns[c as usize]
                    .iter()
                    .map(|&r| local[r as usize])
                    .filter(|&k| k != u32::MAX)
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        SparseGF2Matrix::from_sorted_columns(row_idx.len(), columns)
    }

    /// Rank over GF(2). Small matrices use bit-packed dense elimination,
    /// large ones sparse column reduction.
    pub fn rank(&self) -> usize {
        if self.rows.saturating_mul(self.cols) <= DENSE_RANK_BITS {
            self.rank_dense()
        } else {
            self.rank_sparse()
        }
    }

    /// Gaussian elimination on bit-packed rows, sparsest rows first so the
    /// densest rows are pivoted last.
    pub fn rank_dense(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let words = self.cols.div_ceil(64);
        let mut bits = vec![0u64; self.rows * words];
        for (r, c) in self.entries() {
            bits[r * words + c / 64] |= 1 << (c % 64);
        }
        let mut rows: Vec<Vec<u64>> = bits.chunks(words).map(<[u64]>::to_vec).collect();
        rows.retain(|row| row.iter().any(|&w| w != 0));
        rows.sort_by_key(|row| row.iter().map(|w| w.count_ones()).sum::<u32>());
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, b) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..rows.len()).find(|&i| rows[i][w] & b != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let (done, rest) = rows.split_at_mut(rank + 1);
            let pivot = &done[rank];
            rest.par_iter_mut().for_each(|row| {
                if row[w] & b != 0 {
                    for (x, y) in row[w..].iter_mut().zip(&pivot[w..]) {
                        *x ^= *y;
                    }
                }
            });
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Rank by sparse column reduction.
    pub fn rank_sparse(&self) -> usize {
        self.pivot_rows().len()
    }

    /// Reduces columns left to right, adding earlier reduced columns until
    /// each column's largest row index is unique. Returns the largest row
    /// index ("low") of every nonzero reduced column. These lows are distinct
    /// and, for every `k`, the number of lows below `k` is the dimension of
    /// the intersection of the column space with the span of rows `0..k`.
    pub fn pivot_rows(&self) -> Vec<u32> {
        let mut owner: Vec<u32> = vec![u32::MAX; self.rows];
        let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(self.cols);
        let mut lows = Vec::new();
        for col in &self.columns {
            let mut cur = col.clone();
            while let Some(&low) = cur.last() {
                let o = owner[low as usize];
                if o == u32::MAX {
                    owner[low as usize] = reduced.len() as u32;
                    lows.push(low);
                    break;
                }
                cur = xor_sorted(&cur, &reduced[o as usize]);
            }
            reduced.push(cur);
        }
        lows
    }
}

/// Homology ranks indexed by doubled `(maslov2, alex2)` gradings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedRanks(BTreeMap<(i32, i32), u64>);

#[derive(Serialize, Deserialize)]
struct RankEntry {
    maslov2: i32,
    alex2: i32,
    rank: u64,
}

impl Serialize for BigradedRanks {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<RankEntry> = self
            .iter()
            .map(|((maslov2, alex2), rank)| RankEntry { maslov2, alex2, rank })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BigradedRanks {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<RankEntry>::deserialize(d)?;
        let mut out = BigradedRanks::new();
        for e in v {
            out.add(e.maslov2, e.alex2, e.rank);
        }
        Ok(out)
    }
}

impl FromIterator<((i32, i32), u64)> for BigradedRanks {
    fn from_iter<I: IntoIterator<Item = ((i32, i32), u64)>>(iter: I) -> Self {
        let mut out = BigradedRanks::new();
        for ((m, a), r) in iter {
            out.add(m, a, r);
        }
        out
    }
}

impl BigradedRanks {
    pub fn new() -> Self {
        BigradedRanks(BTreeMap::new())
    }

    /// Adds `rank` at `(maslov2, alex2)`; zero ranks are not stored.
    pub fn add(&mut self, maslov2: i32, alex2: i32, rank: u64) {
        if rank > 0 {
            *self.0.entry((maslov2, alex2)).or_insert(0) += rank;
        }
    }

    pub fn get(&self, maslov2: i32, alex2: i32) -> u64 {
        self.0.get(&(maslov2, alex2)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i32, i32), u64)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn min_alex2(&self) -> Option<i32> {
        self.0.keys().map(|&(_, a)| a).min()
    }

    pub fn max_alex2(&self) -> Option<i32> {
        self.0.keys().map(|&(_, a)| a).max()
    }

    /// Ranks in one Alexander grading, keyed by `maslov2`.
    pub fn at_level(&self, alex2: i32) -> BTreeMap<i32, u64> {
        self.iter().filter(|&((_, a), _)| a == alex2).map(|((m, _), r)| (m, r)).collect()
    }

    pub fn shifted(&self, dm2: i32, da2: i32) -> BigradedRanks {
        self.iter().map(|((m, a), r)| ((m + dm2, a + da2), r)).collect()
    }

    /// Multiplies the rank generating function by `(1 + m t)^factors`, where
    /// each factor contributes a copy shifted by `(-1, -1)` (doubled: `(-2, -2)`).
    pub fn inflate(&self, factors: usize) -> BigradedRanks {
        let mut cur = self.clone();
        for _ in 0..factors {
            let mut next = cur.clone();
            for ((m, a), r) in cur.iter() {
                next.add(m - 2, a - 2, r);
            }
            cur = next;
        }
        cur
    }
}

/// Exact division of the rank generating function by `(1 + m t)^factors`.
pub fn deflate_to_hat(tilde: &BigradedRanks, factors: usize) -> Result<BigradedRanks> {
    let mut cur = tilde.clone();
    for _ in 0..factors {
        // Q(m, a) = P(m, a) - Q(m + 2, a + 2), solved from the top level down.
        let mut keys: Vec<(i32, i32)> = cur.0.keys().copied().collect();
        keys.sort_by_key(|&(m, a)| (std::cmp::Reverse(a), std::cmp::Reverse(m)));
        let mut q: BTreeMap<(i32, i32), u64> = BTreeMap::new();
        for (m, a) in keys {
            let p = cur.get(m, a);
            let above = q.get(&(m + 2, a + 2)).copied().unwrap_or(0);
            let v = p.checked_sub(above).ok_or(Error::NotDivisible(factors))?;
            if v > 0 {
                q.insert((m, a), v);
            }
        }
        let quotient = BigradedRanks(q);
        if quotient.inflate(1) != cur {
            return Err(Error::NotDivisible(factors));
        }
        cur = quotient;
    }
    Ok(cur)
}

/// Contiguous index ranges of equal `maslov2` in a Maslov-sorted level.
fn maslov_runs(level: &LevelComplex) -> Vec<(i32, std::ops::Range<usize>)> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=level.gens.len() {
        if i == level.gens.len() || level.gens[i].maslov2 != level.gens[start].maslov2 {
            runs.push((level.gens[start].maslov2, start..i));
            start = i;
        }
    }
    runs
}

fn level_homology(level: &LevelComplex) -> Result<BigradedRanks> {
    level.check()?;
    let runs = maslov_runs(level);
    let range_of = |m: i32| runs.iter().find(|(mm, _)| *mm == m).map(|(_, r)| r.clone());
    let to_idx = |r: std::ops::Range<usize>| (r.start as u32..r.end as u32).collect::<Vec<u32>>();
    // rank of the block from maslov2 = m + 2 into m
    let mut rank_into: BTreeMap<i32, usize> = BTreeMap::new();
    for (m, rows) in &runs {
        if let Some(cols) = range_of(m + 2) {
            let block = level.boundary.select(&to_idx(rows.clone()), &to_idx(cols));
            rank_into.insert(*m, block.rank());
        }
    }
    let mut out = BigradedRanks::new();
    for (m, rows) in &runs {
        let into = rank_into.get(m).copied().unwrap_or(0);
        let out_of = rank_into.get(&(m - 2)).copied().unwrap_or(0);
        let dim = rows.len();
        let h = dim
            .checked_sub(into + out_of)
            .ok_or_else(|| Error::InconsistentComplex("image exceeds kernel".into()))?;
        out.add(*m, level.level_alex2, h as u64);
    }
    Ok(out)
}

/// Bigraded homology of a collection of level complexes, levels in parallel.
pub fn homology_ranks(complexes: &[LevelComplex]) -> Result<BigradedRanks> {
    let parts: Vec<Result<BigradedRanks>> = complexes.par_iter().map(level_homology).collect();
    let mut out = BigradedRanks::new();
    for part in parts {
        for ((m, a), r) in part?.iter() {
            out.add(m, a, r);
        }
    }
    Ok(out)
}

/// The pair (generators with `alex2 <= cutoff_alex2`, whole complex) of a
/// filtered complex. The sub-collection is a subcomplex because the
/// filtered differential never raises the Alexander grading.
#[derive(Clone, Copy, Debug)]
pub struct TwoStepFiltration<'a> {
    pub full: &'a FilteredComplex,
    pub cutoff_alex2: i32,
}

impl<'a> TwoStepFiltration<'a> {
    pub fn new(full: &'a FilteredComplex, cutoff_alex2: i32) -> Self {
        TwoStepFiltration { full, cutoff_alex2 }
    }

    pub fn in_sub(&self, idx: usize) -> bool {
        self.full.gens()[idx].alex2 <= self.cutoff_alex2
    }

    pub fn sub_size(&self) -> usize {
        self.full.gens().iter().filter(|x| x.alex2 <= self.cutoff_alex2).count()
    }

    /// Checks that the boundary of every sub generator stays in the sub.
    pub fn check(&self) -> Result<()> {
        for i in 0..self.full.gens().len() {
            if self.in_sub(i) && self.full.boundary_of(i).iter().any(|&r| !self.in_sub(r as usize)) {
                return Err(Error::InconsistentComplex(
                    "subcomplex is not closed under the boundary".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Rank of the map on homology induced by the inclusion of the sub.
///
/// Per Maslov grading `M`, the image of `H_M(S)` in `H_M(C)` is
/// `Z_M(S) / (S_M ∩ im ∂_C)`. The first term comes from the small
/// restricted boundary; the second is the number of reduced columns of
/// `∂_C: C_{M+1} -> C_M` whose lowest row lies in `S_M`, with rows in
/// filtration order so that `S_M` is a prefix.
pub fn induced_map_rank(f: &TwoStepFiltration<'_>) -> Result<u64> {
    let fc = f.full;
    let mut sub_by_maslov: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
    for (i, x) in fc.gens().iter().enumerate() {
        if x.alex2 <= f.cutoff_alex2 {
            sub_by_maslov.entry(x.maslov2).or_default().push(i as u32);
        }
    }
    let mut total = 0u64;
    for (&m, sub) in &sub_by_maslov {
        let below = sub_by_maslov.get(&(m - 2)).cloned().unwrap_or_default();
        let mut local = std::collections::HashMap::with_capacity(below.len());
        for (k, &r) in below.iter().enumerate() {
            local.insert(r, k as u32);
        }
        let mut columns = Vec::with_capacity(sub.len());
        for &c in sub {
            let mut col = Vec::new();
            for r in fc.boundary_of(c as usize) {
                match local.get(&r) {
                    Some(&k) => col.push(k),
                    None => {
                        return Err(Error::InconsistentComplex(
                            "subcomplex is not closed under the boundary".into(),
                        ))
                    }
                }
            }
            col.sort_unstable();
            columns.push(col);
        }
        let restricted = SparseGF2Matrix::from_sorted_columns(below.len(), columns);
        let cycles = sub.len() - restricted.rank();
        if cycles == 0 {
            continue;
        }
        let (rows, _, block) = fc.boundary_block(m + 2);
        debug_assert!(rows.iter().zip(sub).all(|(a, b)| a == b));
        let killed = block.pivot_rows().iter().filter(|&&low| (low as usize) < sub.len()).count();
        total += (cycles - killed) as u64;
    }
    Ok(total)
}

/// Total homology of a filtered complex, ignoring the filtration.
pub fn filtered_homology_total(fc: &FilteredComplex) -> u64 {
    let mut maslovs: Vec<i32> = fc.gens().iter().map(|x| x.maslov2).collect();
    maslovs.sort_unstable();
    maslovs.dedup();
    let ranks: BTreeMap<i32, usize> = maslovs
        .par_iter()
        .map(|&m| (m, fc.boundary_block(m).2.rank()))
        .collect();
    maslovs
        .iter()
        .map(|&m| {
            let dim = fc.gens().iter().filter(|x| x.maslov2 == m).count();
            (dim - ranks[&m] - ranks.get(&(m + 2)).copied().unwrap_or(0)) as u64
        })
        .sum()
}
