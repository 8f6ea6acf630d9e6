//! Brute-force reference computations, written from the definitions and
//! sharing no code with the library beyond the grid type.
//!
//! Gradings come from the planar J pairing with doubled coordinates
//! (lattice points even, marking centres odd). Rectangles are found by
//! walking the torus cell by cell. Ranks use dense elimination over u64
//! words. The induced map rank comes from the long exact sequence of the
//! pair, `2 rank i = dim H(S) + dim H(C) - dim H(C/S)`.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use hfk_core::grid::ValidatedGrid;

pub type Ranks = BTreeMap<(i32, i32), u64>;

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Number of link components, by following the strand from marking to
/// marking.
pub fn components(g: &ValidatedGrid) -> usize {
    let n = g.size();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut row = start;
        while !seen[row] {
            seen[row] = true;
            // horizontal segment ends at the X of this row, then the
            // vertical segment in that column runs to its O
            let col = g.x_cols()[row];
            row = (0..n).find(|&r| g.o_cols()[r] == col).unwrap();
        }
    }
    count
}

fn i_count(a: &[(i64, i64)], b: &[(i64, i64)]) -> i64 {
    let mut k = 0;
    for p in a {
        for q in b {
            if p.0 < q.0 && p.1 < q.1 {
                k += 1;
            }
        }
    }
    k
}

/// Twice the J pairing.
fn j2(a: &[(i64, i64)], b: &[(i64, i64)]) -> i64 {
    i_count(a, b) + i_count(b, a)
}

fn markings(cols: &[usize]) -> Vec<(i64, i64)> {
    cols.iter()
        .enumerate()
        .map(|(r, &c)| (2 * c as i64 + 1, 2 * r as i64 + 1))
        .collect()
}

/// `(maslov2, alex2)` from `M_S(x) = J(x - S, x - S) + 1`.
pub fn gradings(g: &ValidatedGrid, perm: &[usize]) -> (i32, i32) {
    let n = g.size() as i64;
    let l = components(g) as i64;
    let x: Vec<(i64, i64)> = perm.iter().enumerate().map(|(i, &r)| (2 * i as i64, 2 * r as i64)).collect();
    let o = markings(g.o_cols());
    let xm = markings(g.x_cols());
    // J is bilinear; 2J(x - S, x - S) = 2J(x,x) - 4J(x,S) + 2J(S,S)
    let m = |s: &[(i64, i64)]| -> i64 {
        let twice = j2(&x, &x) - 2 * j2(&x, s) + j2(s, s);
        assert_eq!(twice % 2, 0);
        twice / 2 + 1
    };
    let (mo, mx) = (m(&o), m(&xm));
    ((2 * mo) as i32, (mo - mx - (n - l)) as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x_count: usize,
    pub o_count: usize,
    pub points_inside: usize,
}

/// All rectangles from `x` to `y` on the torus (0, 1 or 2 of them).
pub fn rectangles(g: &ValidatedGrid, x: &[usize], y: &[usize]) -> Vec<Rect> {
    let n = x.len();
    let diff: Vec<usize> = (0..n).filter(|&i| x[i] != y[i]).collect();
    if diff.len() != 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (a, b) in [(diff[0], diff[1]), (diff[1], diff[0])] {
        // lower-left corner (a, x[a]), upper-right corner (b, x[b])
        let mut cols = Vec::new();
        let mut c = a;
        while c != b {
            cols.push(c);
            c = (c + 1) % n;
        }
        let mut rows = Vec::new();
        let mut r = x[a];
        while r != x[b] {
            rows.push(r);
            r = (r + 1) % n;
        }
        let in_cells = |col: usize, row: usize| cols.contains(&col) && rows.contains(&row);
        let x_count = (0..n).filter(|&row| in_cells(g.x_cols()[row], row)).count();
        let o_count = (0..n).filter(|&row| in_cells(g.o_cols()[row], row)).count();
        // lattice point (c, x[c]) is interior if it is a corner of four
        // cells of the rectangle
        let points_inside = (0..n)
            .filter(|&c| c != a && cols.contains(&c) && x[c] != x[a] && rows.contains(&x[c]))
            .count();
        out.push(Rect {
            x_count,
            o_count,
            points_inside,
        });
    }
    out
}

/// Generators with gradings, in the order of [`permutations`].
pub fn generators(g: &ValidatedGrid) -> Vec<(Vec<usize>, i32, i32)> {
    permutations(g.size())
        .into_iter()
        .map(|p| {
            let (m, a) = gradings(g, &p);
            (p, m, a)
        })
        .collect()
}

/// Boundary as a list of targets per generator: counts rectangles with no
/// interior points and no O, and with no X unless `allow_x`.
pub fn boundary(g: &ValidatedGrid, gens: &[(Vec<usize>, i32, i32)], allow_x: bool) -> Vec<Vec<usize>> {
    let index: HashMap<&[usize], usize> = gens.iter().enumerate().map(|(i, x)| (x.0.as_slice(), i)).collect();
    let n = g.size();
    gens.iter()
        .map(|(x, _, _)| {
            let mut targets = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let mut y = x.clone();
                    y.swap(i, j);
                    let count = rectangles(g, x, &y)
                        .iter()
                        .filter(|r| r.points_inside == 0 && r.o_count == 0 && (allow_x || r.x_count == 0))
                        .count();
                    if count % 2 == 1 {
                        targets.push(index[y.as_slice()]);
                    }
                }
            }
            targets.sort_unstable();
            targets
        })
        .collect()
}

/// Rank over GF(2) of a dense matrix given as rows of column indices.
pub fn rank(rows: &[Vec<usize>], cols: usize) -> usize {
    let words = cols.div_ceil(64).max(1);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![0u64; words];
            for &c in r {
                v[c / 64] ^= 1 << (c % 64);
            }
            v
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..m.len()).find(|&i| m[i][w] & bit != 0) else { continue };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[w] & bit != 0 {
                for k in 0..words {
                    row[k] ^= pivot[k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Homology ranks by `(maslov2, alex2)` of the complex on the generators in
/// `subset`, with the boundary restricted (quotient boundary if the subset
/// is a quotient). Bigrading by Alexander is only meaningful when the
/// boundary preserves it; otherwise pass `by_alex = false`.
pub fn homology(
    gens: &[(Vec<usize>, i32, i32)],
    d: &[Vec<usize>],
    subset: &[usize],
    by_alex: bool,
) -> Ranks {
    let key = |i: usize| (gens[i].1, if by_alex { gens[i].2 } else { 0 });
    let mut groups: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
    for &i in subset {
        groups.entry(key(i)).or_default().push(i);
    }
    let position: HashMap<usize, usize> = groups
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(k, &i)| (i, k)))
        .collect();
    let in_subset: std::collections::HashSet<usize> = subset.iter().copied().collect();
    // rank of d out of each group
    let mut rank_out: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for (&k, members) in &groups {
        let target_key = (k.0 - 2, k.1);
        let target_size = groups.get(&target_key).map_or(0, |v| v.len());
        let rows: Vec<Vec<usize>> = members
            .iter()
            .map(|&i| {
                d[i].iter()
                    .filter(|t| in_subset.contains(t))
                    .map(|&t| {
                        assert_eq!(key(t), target_key, "boundary does not respect the bigrading");
                        position[&t]
                    })
                    .collect()
            })
            .collect();
        rank_out.insert(k, rank(&rows, target_size));
    }
    let mut out = Ranks::new();
    for (&k, members) in &groups {
        let out_rank = rank_out[&k];
        let in_rank = rank_out.get(&(k.0 + 2, k.1)).copied().unwrap_or(0);
        let h = members.len() - out_rank - in_rank;
        if h > 0 {
            out.insert(k, h as u64);
        }
    }
    out
}

/// Tilde homology from the associated graded complex.
pub fn tilde(g: &ValidatedGrid) -> Ranks {
    let gens = generators(g);
    let d = boundary(g, &gens, false);
    let all: Vec<usize> = (0..gens.len()).collect();
    homology(&gens, &d, &all, true)
}

/// Divides a rank generating function by `(1 + m t)^k`, `m t` having
/// doubled degree `(-2, -2)`.
pub fn divide_out(ranks: &Ranks, k: usize) -> Option<Ranks> {
    let mut cur: BTreeMap<(i32, i32), i64> = ranks.iter().map(|(&k, &v)| (k, v as i64)).collect();
    for _ in 0..k {
        let mut q: BTreeMap<(i32, i32), i64> = BTreeMap::new();
        let mut rem = cur.clone();
        // repeatedly peel the highest term
        while let Some((&(m, a), &c)) = rem.iter().max_by_key(|(&(m, a), _)| (a, m)) {
            if c < 0 {
                return None;
            }
            *q.entry((m, a)).or_default() += c;
            for key in [(m, a), (m - 2, a - 2)] {
                let e = rem.entry(key).or_default();
                *e -= c;
                if *e == 0 {
                    rem.remove(&key);
                }
            }
        }
        q.retain(|_, v| *v != 0);
        cur = q;
    }
    Some(cur.into_iter().map(|(k, v)| (k, v as u64)).collect())
}

pub fn hat(g: &ValidatedGrid) -> Ranks {
    let k = g.size() - components(g);
    divide_out(&tilde(g), k).expect("tilde homology not divisible")
}

/// Rank of `H(S) -> H(C)` for `S` the generators with `alex2 <= cutoff`
/// under the filtered boundary.
pub fn induced_rank(g: &ValidatedGrid, cutoff_alex2: i32) -> u64 {
    let gens = generators(g);
    let d = boundary(g, &gens, true);
    let all: Vec<usize> = (0..gens.len()).collect();
    let sub: Vec<usize> = all.iter().copied().filter(|&i| gens[i].2 <= cutoff_alex2).collect();
    let quo: Vec<usize> = all.iter().copied().filter(|&i| gens[i].2 > cutoff_alex2).collect();
    let dim = |r: Ranks| r.values().sum::<u64>();
    let hs = dim(homology(&gens, &d, &sub, false));
    let hc = dim(homology(&gens, &d, &all, false));
    let hq = dim(homology(&gens, &d, &quo, false));
    let twice = hs + hc - hq;
    assert_eq!(twice % 2, 0);
    twice / 2
}

/// Total homology of the filtered complex.
pub fn filtered_total(g: &ValidatedGrid) -> u64 {
    let gens = generators(g);
    let d = boundary(g, &gens, true);
    let all: Vec<usize> = (0..gens.len()).collect();
    homology(&gens, &d, &all, false).values().sum()
}

/// Alexander polynomial as `exponent -> coefficient`, symmetric with
/// value 1 at `t = 1`. Knots only.
pub fn alexander(g: &ValidatedGrid) -> BTreeMap<i32, i64> {
    assert_eq!(components(g), 1);
    let mut sum: BTreeMap<i32, i64> = BTreeMap::new();
    for (_, m2, a2) in generators(g) {
        assert_eq!(a2 % 2, 0);
        *sum.entry(a2 / 2).or_default() += if (m2 / 2) % 2 == 0 { 1 } else { -1 };
    }
    // divide by (1 - t^-1), n - 1 times: q_e = s_e + q_(e+1) from the top
    for _ in 1..g.size() {
        sum.retain(|_, v| *v != 0);
        let (lo, hi) = (*sum.keys().next().unwrap(), *sum.keys().next_back().unwrap());
        let mut q: BTreeMap<i32, i64> = BTreeMap::new();
        let mut carry = 0;
        for e in (lo..=hi).rev() {
            carry += sum.get(&e).copied().unwrap_or(0);
            if e > lo {
                q.insert(e, carry);
            }
        }
        assert_eq!(carry, 0, "not divisible by 1 - t^-1");
        sum = q;
    }
    sum.retain(|_, v| *v != 0);
    let (lo, hi) = (*sum.keys().next().unwrap(), *sum.keys().next_back().unwrap());
    let sign = if sum.values().sum::<i64>() < 0 { -1 } else { 1 };
    sum.into_iter().map(|(e, c)| (e - (lo + hi) / 2, sign * c)).collect()
}
