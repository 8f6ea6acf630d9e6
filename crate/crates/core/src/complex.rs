//! Grid states, their absolute gradings, and the empty-rectangle boundary.
//!
//! A generator is a permutation `perm` of `0..n`: the point in column `i`
//! sits on the lattice point `(i, perm[i])` of the torus. Gradings are kept
//! doubled (`maslov2 = 2M`, `alex2 = 2A`) so that half-integral link
//! Alexander gradings stay integral.
//!
//! The Maslov grading is the `M_O` grading of the grid, normalized so that
//! the complex counting rectangles which avoid the O markings has homology
//! `(F_(0) + F_(-1))^(n-1)`. The Alexander grading is
//! `A = (M_O - M_X)/2 - (n - l)/2`. Both are linear in the positions of the
//! generator points up to the quadratic `I(x, x)` term, which is what makes
//! the level enumeration a branch-and-bound over an assignment problem.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::SparseGF2Matrix;
use crate::grid::{link_components, ValidatedGrid, MAX_GRID_SIZE};

/// Default guard on the number of generators materialized at once.
pub const DEFAULT_MAX_GENERATORS: u64 = 100_000_000;

/// A permutation of `0..len`, stored inline.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    len: u8,
    rows: [u8; MAX_GRID_SIZE],
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        let mut rows = [0u8; MAX_GRID_SIZE];
        for (i, r) in rows.iter_mut().enumerate().take(n) {
            *r = i as u8;
        }
        Perm { len: n as u8, rows }
    }

    /// Panics unless `rows` is a permutation of `0..rows.len()` with at most
    /// [`MAX_GRID_SIZE`] entries.
    pub fn from_slice(rows: &[usize]) -> Perm {
        let n = rows.len();
        assert!(n <= MAX_GRID_SIZE, "permutation too long");
        let mut seen = 0u32;
        let mut out = [0u8; MAX_GRID_SIZE];
        for (i, &r) in rows.iter().enumerate() {
            assert!(r < n && seen & (1 << r) == 0, "not a permutation: {rows:?}");
            seen |= 1 << r;
            out[i] = r as u8;
        }
        Perm {
            len: n as u8,
            rows: out,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.rows[..self.len()]
    }

    pub fn row(&self, col: usize) -> usize {
        self.rows[col] as usize
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.as_slice().iter().map(|&r| r as usize).collect()
    }

    /// The permutation with the rows of columns `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Perm {
        let mut p = *self;
        p.rows.swap(i, j);
        p
    }

    /// Lexicographic rank among all permutations of the same length.
    pub fn lex_rank(&self) -> u64 {
        let n = self.len();
        let mut rank = 0u64;
        for i in 0..n {
            let smaller_later = (i + 1..n).filter(|&j| self.rows[j] < self.rows[i]).count() as u64;
            rank = rank * (n - i) as u64 + smaller_later;
        }
        rank
    }

    /// Number of pairs `i < j` with `perm[i] < perm[j]`.
    fn ascending_pairs(&self) -> i32 {
        let n = self.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.rows[i] < self.rows[j] {
                    count += 1;
                }
            }
        }
        count
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<usize>::deserialize(d)?;
        let n = rows.len();
        let mut sorted = rows.clone();
        sorted.sort_unstable();
        if n > MAX_GRID_SIZE || sorted != (0..n).collect::<Vec<_>>() {
            return Err(serde::de::Error::custom("not a permutation"));
        }
        Ok(Perm::from_slice(&rows))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridGenerator {
    pub perm: Perm,
    pub maslov2: i32,
    pub alex2: i32,
}

fn count_pairs_below_left(a: &[(usize, usize)], b: &[(usize, usize)]) -> i32 {
    // Markings sit at cell centres; comparing cell indices is the same test.
    let mut count = 0;
    for &(ac, ar) in a {
        for &(bc, br) in b {
            if ac < bc && ar < br {
                count += 1;
            }
        }
    }
    count
}

/// Precomputed per-cell weights for the absolute gradings of one grid.
#[derive(Clone, Debug)]
pub struct Gradings {
    n: usize,
    components: usize,
    /// `alex_weight[col * n + row]`: contribution of a point at `(col, row)`
    /// to `alex2`.
    alex_weight: Vec<i32>,
    /// Number of O markings north-east or south-west of the lattice point.
    o_weight: Vec<i32>,
    alex_const: i32,
    maslov_const: i32,
}

impl Gradings {
    pub fn new(g: &ValidatedGrid) -> Gradings {
        let n = g.size();
        let l = link_components(g);
        let os: Vec<(usize, usize)> = (0..n).map(|r| (g.o_cols()[r], r)).collect();
        let xs: Vec<(usize, usize)> = (0..n).map(|r| (g.x_cols()[r], r)).collect();
        // A marking in cell (c, r) has centre (c + 1/2, r + 1/2); it lies
        // north-east of the lattice point (i, j) iff c >= i and r >= j, and
        // south-west iff c < i and r < j.
        let around = |marks: &[(usize, usize)], i: usize, j: usize| -> i32 {
            marks
                .iter()
                .filter(|&&(c, r)| (c >= i && r >= j) || (c < i && r < j))
                .count() as i32
        };
        let mut alex_weight = vec![0; n * n];
        let mut o_weight = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let wo = around(&os, i, j);
                let wx = around(&xs, i, j);
                alex_weight[i * n + j] = wx - wo;
                o_weight[i * n + j] = wo;
            }
        }
        let i_oo = count_pairs_below_left(&os, &os);
        let i_xx = count_pairs_below_left(&xs, &xs);
        Gradings {
            n,
            components: l,
            alex_weight,
            o_weight,
            alex_const: i_oo - i_xx - (n as i32 - l as i32),
            maslov_const: 2 * i_oo + 2,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn alex_weight(&self, col: usize, row: usize) -> i32 {
        self.alex_weight[col * self.n + row]
    }

    pub fn alex2(&self, perm: &Perm) -> i32 {
        self.alex_const
            + (0..self.n)
                .map(|i| self.alex_weight(i, perm.row(i)))
                .sum::<i32>()
    }

    pub fn maslov2(&self, perm: &Perm) -> i32 {
        let wo: i32 = (0..self.n).map(|i| self.o_weight[i * self.n + perm.row(i)]).sum();
        2 * perm.ascending_pairs() - 2 * wo + self.maslov_const
    }

    pub fn grade(&self, perm: Perm) -> GridGenerator {
        GridGenerator {
            perm,
            maslov2: self.maslov2(&perm),
            alex2: self.alex2(&perm),
        }
    }

    fn column_extremes(&self, col: usize, unused: u32) -> (i32, i32) {
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for row in 0..self.n {
            if unused & (1 << row) != 0 {
                let w = self.alex_weight(col, row);
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
        (lo, hi)
    }

    /// Bounds on the remaining weight sum when columns `col..n` are still to
    /// be assigned from the rows in `unused`.
    fn remaining_bounds(&self, col: usize, unused: u32) -> (i32, i32) {
        (col..self.n).fold((0, 0), |(lo, hi), c| {
            let (a, b) = self.column_extremes(c, unused);
            (lo + a, hi + b)
        })
    }
}

/// Doubled `(maslov2, alex2)` gradings of the generator `perm`.
pub fn gradings(g: &ValidatedGrid, perm: &[usize]) -> (i32, i32) {
    let gr = Gradings::new(g);
    let p = Perm::from_slice(perm);
    (gr.maslov2(&p), gr.alex2(&p))
}

fn full_mask(n: usize) -> u32 {
    (1u32 << n) - 1
}

/// Smallest and largest `alex2` over all generators, by branch-and-bound.
pub fn alexander_range(g: &ValidatedGrid) -> (i32, i32) {
    let gr = Gradings::new(g);
    let lo = extreme_weight(&gr, false);
    let hi = extreme_weight(&gr, true);
    (gr.alex_const + lo, gr.alex_const + hi)
}

fn extreme_weight(gr: &Gradings, maximize: bool) -> i32 {
    fn dfs(gr: &Gradings, col: usize, unused: u32, acc: i32, best: &mut i32, sign: i32) {
        if col == gr.n {
            *best = (*best).max(sign * acc);
            return;
        }
        let (lo, hi) = gr.remaining_bounds(col, unused);
        let optimistic = if sign > 0 { acc + hi } else { -(acc + lo) };
        if optimistic <= *best {
            return;
        }
        let mut rows: Vec<usize> = (0..gr.n).filter(|&r| unused & (1 << r) != 0).collect();
        rows.sort_by_key(|&r| -sign * gr.alex_weight(col, r));
        for r in rows {
            dfs(gr, col + 1, unused & !(1 << r), acc + gr.alex_weight(col, r), best, sign);
        }
    }
    let sign = if maximize { 1 } else { -1 };
    let mut best = i32::MIN;
    dfs(gr, 0, full_mask(gr.n), 0, &mut best, sign);
    sign * best
}

struct LevelSearch<'a> {
    gr: &'a Gradings,
    target: i32,
    limit: u64,
    found: &'a AtomicU64,
}

impl LevelSearch<'_> {
    fn dfs(&self, col: usize, unused: u32, acc: i32, rows: &mut [u8; MAX_GRID_SIZE], out: &mut Vec<Perm>) -> Result<()> {
        let n = self.gr.n;
        if col == n {
            if acc == self.target {
                let seen = self.found.fetch_add(1, Ordering::Relaxed) + 1;
                if seen > self.limit {
                    return Err(Error::ResourceBound {
                        needed: seen,
                        limit: self.limit,
                    });
                }
                out.push(Perm {
                    len: n as u8,
                    rows: *rows,
                });
            }
            return Ok(());
        }
        let (lo, hi) = self.gr.remaining_bounds(col, unused);
        if acc + lo > self.target || acc + hi < self.target {
            return Ok(());
        }
        for r in 0..n {
            if unused & (1 << r) != 0 {
                rows[col] = r as u8;
                self.dfs(col + 1, unused & !(1 << r), acc + self.gr.alex_weight(col, r), rows, out)?;
            }
        }
        Ok(())
    }
}

/// All generators with the given doubled Alexander grading, sorted by
/// `maslov2` and then lexicographically by permutation. An empty level is
/// returned as an empty list.
pub fn generators_in_level(g: &ValidatedGrid, alex2: i32, max_generators: u64) -> Result<Vec<GridGenerator>> {
    let gr = Gradings::new(g);
    generators_in_level_with(&gr, alex2, max_generators)
}

pub(crate) fn generators_in_level_with(gr: &Gradings, alex2: i32, max_generators: u64) -> Result<Vec<GridGenerator>> {
    let n = gr.n;
    let found = AtomicU64::new(0);
    let search = LevelSearch {
        gr,
        target: alex2 - gr.alex_const,
        limit: max_generators,
        found: &found,
    };
    let chunks: Vec<Result<Vec<Perm>>> = (0..n)
        .into_par_iter()
        .map(|r0| {
            let mut rows = [0u8; MAX_GRID_SIZE];
            rows[0] = r0 as u8;
            let mut out = Vec::new();
            search.dfs(1, full_mask(n) & !(1 << r0), gr.alex_weight(0, r0), &mut rows, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut gens = Vec::new();
    for chunk in chunks {
        gens.extend(chunk?.into_iter().map(|p| gr.grade(p)));
    }
    gens.par_sort_unstable_by_key(|x| (x.maslov2, x.perm));
    Ok(gens)
}

/// Rectangle geometry of a grid: the rows of the markings in each column.
#[derive(Clone, Debug)]
pub(crate) struct Rectangles {
    n: usize,
    o_row: [u8; MAX_GRID_SIZE],
    x_row: [u8; MAX_GRID_SIZE],
}

impl Rectangles {
    pub(crate) fn new(g: &ValidatedGrid) -> Rectangles {
        let mut o_row = [0u8; MAX_GRID_SIZE];
        let mut x_row = [0u8; MAX_GRID_SIZE];
        for c in 0..g.size() {
            o_row[c] = g.o_rows()[c] as u8;
            x_row[c] = g.x_rows()[c] as u8;
        }
        Rectangles {
            n: g.size(),
            o_row,
            x_row,
        }
    }

    /// Number of X markings in the rectangle with lower-left corner
    /// `(start, bottom)`, `width` cells wide and reaching up to row `top`
    /// (cyclically), or `None` if it contains an O, a generator point in its
    /// interior, or (when `allow_x` is false) an X.
    #[inline]
    fn scan(&self, perm: &Perm, start: usize, width: usize, bottom: usize, top: usize, allow_x: bool) -> Option<u32> {
        let n = self.n;
        let height = (top + n - bottom) % n;
        let mut xs = 0;
        for t in 0..width {
            let c = (start + t) % n;
            if t > 0 {
                let d = (perm.row(c) + n - bottom) % n;
                if d > 0 && d < height {
                    return None;
                }
            }
            if (self.o_row[c] as usize + n - bottom) % n < height {
                return None;
            }
            if (self.x_row[c] as usize + n - bottom) % n < height {
                if !allow_x {
                    return None;
                }
                xs += 1;
            }
        }
        Some(xs)
    }

    /// Calls `f(i, j, x_count)` once per empty rectangle out of `perm`; the
    /// target generator is `perm.swapped(i, j)`. Both rectangles spanned by
    /// each pair of columns are examined, since the torus wraps.
    #[inline]
    pub(crate) fn for_each(&self, perm: &Perm, allow_x: bool, mut f: impl FnMut(usize, usize, u32)) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let (ri, rj) = (perm.row(i), perm.row(j));
                if let Some(xs) = self.scan(perm, i, j - i, ri, rj, allow_x) {
                    f(i, j, xs);
                }
                if let Some(xs) = self.scan(perm, j, n - (j - i), rj, ri, allow_x) {
                    f(i, j, xs);
                }
            }
        }
    }

    /// Targets of `perm` under the boundary, reduced mod 2.
    pub(crate) fn boundary_targets(&self, perm: &Perm, allow_x: bool) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        self.for_each(perm, allow_x, |i, j, _| {
            let y = perm.swapped(i, j);
            match out.iter().position(|p| *p == y) {
                Some(k) => {
                    out.swap_remove(k);
                }
                None => out.push(y),
            }
        });
        out
    }
}

/// The Alexander-homogeneous part of the tilde complex at one level: the
/// boundary counts rectangles containing no markings at all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelComplex {
    pub level_alex2: i32,
    pub gens: Vec<GridGenerator>,
    /// Column `c` holds the boundary of `gens[c]`; rows index `gens` too.
    pub boundary: SparseGF2Matrix,
}

impl LevelComplex {
    /// Checks the structural invariants: all generators at this level,
    /// sorted by Maslov grading, every entry dropping `maslov2` by 2, and
    /// `d^2 = 0`.
    pub fn check(&self) -> Result<()> {
        let n = self.gens.len();
        if self.boundary.rows() != n || self.boundary.cols() != n {
            return Err(Error::InconsistentComplex(format!(
                "{}x{} boundary for {n} generators",
                self.boundary.rows(),
                self.boundary.cols()
            )));
        }
        if let Some(x) = self.gens.iter().find(|x| x.alex2 != self.level_alex2) {
            return Err(Error::InconsistentComplex(format!(
                "generator {:?} has alex2 {} at level {}",
                x.perm, x.alex2, self.level_alex2
            )));
        }
        if self.gens.windows(2).any(|w| w[0].maslov2 > w[1].maslov2) {
            return Err(Error::InconsistentComplex("generators not sorted by Maslov grading".into()));
        }
        for (r, c) in self.boundary.entries() {
            if self.gens[c].maslov2 - self.gens[r].maslov2 != 2 {
                return Err(Error::InconsistentComplex(format!(
                    "entry {:?} -> {:?} does not drop the Maslov grading by one",
                    self.gens[c].perm, self.gens[r].perm
                )));
            }
        }
        if !self.boundary.mul(&self.boundary).is_zero() {
            return Err(Error::InconsistentComplex(format!(
                "d^2 != 0 at level {}",
                self.level_alex2
            )));
        }
        Ok(())
    }
}

/// The level complex at `alex2`, with the canonical generator order of
/// [`generators_in_level`].
pub fn boundary_at_level(g: &ValidatedGrid, alex2: i32, max_generators: u64) -> Result<LevelComplex> {
    let gr = Gradings::new(g);
    let gens = generators_in_level_with(&gr, alex2, max_generators)?;
    Ok(level_complex_from(g, alex2, gens))
}

pub(crate) fn level_complex_from(g: &ValidatedGrid, alex2: i32, gens: Vec<GridGenerator>) -> LevelComplex {
    let rects = Rectangles::new(g);
    let index: HashMap<Perm, u32> = gens.iter().enumerate().map(|(i, x)| (x.perm, i as u32)).collect();
    let columns: Vec<Vec<u32>> = gens
        .par_iter()
        .map(|x| {
            let mut col: Vec<u32> = rects
                .boundary_targets(&x.perm, false)
                .iter()
                .map(|y| index[y])
                .collect();
            col.sort_unstable();
            col
        })
        .collect();
    let boundary = SparseGF2Matrix::from_sorted_columns(gens.len(), columns);
    LevelComplex {
        level_alex2: alex2,
        gens,
        boundary,
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn all_permutations(n: usize) -> Vec<Perm> {
    fn rec(n: usize, col: usize, unused: u32, rows: &mut [u8; MAX_GRID_SIZE], out: &mut Vec<Perm>) {
        if col == n {
            out.push(Perm { len: n as u8, rows: *rows });
            return;
        }
        for r in 0..n {
            if unused & (1 << r) != 0 {
                rows[col] = r as u8;
                rec(n, col + 1, unused & !(1 << r), rows, out);
            }
        }
    }
    (0..n)
        .into_par_iter()
        .flat_map_iter(|r0| {
            let mut rows = [0u8; MAX_GRID_SIZE];
            rows[0] = r0 as u8;
            let mut out = Vec::new();
            rec(n, 1, full_mask(n) & !(1 << r0), &mut rows, &mut out);
            out
        })
        .collect()
}

/// Every generator of a grid, graded, in lexicographic permutation order.
pub fn all_generators(g: &ValidatedGrid, max_generators: u64) -> Result<Vec<GridGenerator>> {
    let n = g.size();
    let total = factorial(n);
    if total > max_generators {
        return Err(Error::ResourceBound {
            needed: total,
            limit: max_generators,
        });
    }
    let gr = Gradings::new(g);
    Ok(all_permutations(n).into_par_iter().map(|p| gr.grade(p)).collect())
}

/// The whole tilde complex with the Alexander-filtered differential: it
/// counts rectangles that avoid the O markings but may contain X markings,
/// so it never raises the Alexander grading.
///
/// Generators are kept in filtration order `(alex2, maslov2, perm)`, so the
/// generators at or below any cutoff form a prefix of every Maslov slice.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    grid: ValidatedGrid,
    gens: Vec<GridGenerator>,
    /// Position in `gens` of the permutation with a given lexicographic rank.
    position: Vec<u32>,
    rects: Rectangles,
}

impl FilteredComplex {
    pub fn build(g: &ValidatedGrid, max_generators: u64) -> Result<FilteredComplex> {
        let mut gens = all_generators(g, max_generators)?;
        gens.par_sort_unstable_by_key(|x| (x.alex2, x.maslov2, x.perm));
        let mut position = vec![0u32; gens.len()];
        for (i, x) in gens.iter().enumerate() {
            position[x.perm.lex_rank() as usize] = i as u32;
        }
        Ok(FilteredComplex {
            grid: g.clone(),
            rects: Rectangles::new(g),
            gens,
            position,
        })
    }

    pub fn grid(&self) -> &ValidatedGrid {
        &self.grid
    }

    pub fn gens(&self) -> &[GridGenerator] {
        &self.gens
    }

    pub fn index_of(&self, perm: &Perm) -> usize {
        self.position[perm.lex_rank() as usize] as usize
    }

    /// Boundary of generator `idx`, as sorted generator indices.
    pub fn boundary_of(&self, idx: usize) -> Vec<u32> {
        let mut col: Vec<u32> = self
            .rects
            .boundary_targets(&self.gens[idx].perm, true)
            .iter()
            .map(|y| self.position[y.lex_rank() as usize])
            .collect();
        col.sort_unstable();
        col
    }

    /// Indices of the generators in one Maslov grading, in filtration order.
    pub fn maslov_slice(&self, maslov2: i32) -> Vec<u32> {
        (0..self.gens.len() as u32)
            .filter(|&i| self.gens[i as usize].maslov2 == maslov2)
            .collect()
    }

    /// The full boundary matrix over all generators. Intended for small
    /// grids and tests.
    pub fn boundary_matrix(&self) -> SparseGF2Matrix {
        let cols: Vec<Vec<u32>> = (0..self.gens.len()).into_par_iter().map(|i| self.boundary_of(i)).collect();
        SparseGF2Matrix::from_sorted_columns(self.gens.len(), cols)
    }

    /// The block of the boundary from Maslov grading `maslov2` to
    /// `maslov2 - 2`: returns (row generators, column generators, matrix),
    /// both generator lists in filtration order.
    pub fn boundary_block(&self, maslov2: i32) -> (Vec<u32>, Vec<u32>, SparseGF2Matrix) {
        let cols = self.maslov_slice(maslov2);
        let rows = self.maslov_slice(maslov2 - 2);
        let mut local = vec![u32::MAX; self.gens.len()];
        for (k, &r) in rows.iter().enumerate() {
            local[r as usize] = k as u32;
        }
        let columns: Vec<Vec<u32>> = cols
            .par_iter()
            .map(|&c| {
                let mut col: Vec<u32> = self
                    .boundary_of(c as usize)
                    .into_iter()
                    .map(|r| {
                        let k = local[r as usize];
                        debug_assert!(k != u32::MAX, "boundary must drop maslov2 by 2");
                        k
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        let m = SparseGF2Matrix::from_sorted_columns(rows.len(), columns);
        (rows, cols, m)
    }
}
