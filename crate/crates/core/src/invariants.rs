//! Link invariants read off the homology: extremal groups, genus, the two
//! tau extremality tests and the Alexander polynomial.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{
    alexander_range, all_generators, boundary_at_level, FilteredComplex, LevelComplex,
};
use crate::error::{Error, Result};
use crate::gf2::{deflate_to_hat, homology_ranks, induced_map_rank, BigradedRanks, TwoStepFiltration};
use crate::grid::{link_components, mirror, ValidatedGrid};
use crate::poly::{LaurentPoly, Var};

/// Hat homology in the lowest Alexander grading where it is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalGroup {
    pub alex2_bottom: i32,
    /// Ranks by doubled Maslov grading, variable `m`.
    pub poincare: LaurentPoly,
}

/// Hat homology in the highest Alexander grading where it is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopGroup {
    pub alex2_top: i32,
    /// Ranks by doubled Maslov grading, variable `m`.
    pub poincare: LaurentPoly,
}

impl ExtremalGroup {
    pub fn rank(&self) -> u64 {
        self.poincare.eval_at_one() as u64
    }

    /// Sum of `(-1)^M` times the ranks.
    pub fn euler_characteristic(&self) -> i64 {
        signed_sum(&self.poincare)
    }
}

impl TopGroup {
    pub fn rank(&self) -> u64 {
        self.poincare.eval_at_one() as u64
    }

    pub fn euler_characteristic(&self) -> i64 {
        signed_sum(&self.poincare)
    }
}

fn signed_sum(p: &LaurentPoly) -> i64 {
    p.terms()
        .map(|(m2, r)| if (m2 / 2).rem_euclid(2) == 0 { r } else { -r })
        .sum()
}

/// Full tilde homology together with the size of every Alexander level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TildeHomology {
    pub ranks: BigradedRanks,
    pub level_sizes: BTreeMap<i32, u64>,
}

fn extra_basepoints(g: &ValidatedGrid) -> usize {
    g.size() - link_components(g)
}

fn nonempty_levels(g: &ValidatedGrid) -> Vec<i32> {
    let (lo, hi) = alexander_range(g);
    (lo..=hi).step_by(2).collect()
}

fn level_ranks(level: &LevelComplex) -> Result<BigradedRanks> {
    homology_ranks(std::slice::from_ref(level))
}

/// Tilde homology at every Alexander level, levels in parallel.
pub fn tilde_homology(g: &ValidatedGrid, max_generators: u64) -> Result<TildeHomology> {
    let levels = nonempty_levels(g);
    let parts: Vec<Result<(i32, u64, BigradedRanks)>> = levels
        .par_iter()
        .map(|&a| {
            let lc = boundary_at_level(g, a, max_generators)?;
            Ok((a, lc.gens.len() as u64, level_ranks(&lc)?))
        })
        .collect();
    let mut ranks = BigradedRanks::new();
    let mut level_sizes = BTreeMap::new();
    for part in parts {
        let (a, size, r) = part?;
        level_sizes.insert(a, size);
        for ((m2, a2), k) in r.iter() {
            ranks.add(m2, a2, k);
        }
    }
    Ok(TildeHomology { ranks, level_sizes })
}

/// Hat homology: tilde homology with the extra basepoint factors divided out.
pub fn hat_homology(g: &ValidatedGrid, max_generators: u64) -> Result<BigradedRanks> {
    deflate_to_hat(&tilde_homology(g, max_generators)?.ranks, extra_basepoints(g))
}

/// Lowest tilde level with nonzero homology, its ranks and the sizes of
/// all levels visited on the way up.
pub fn bottom_tilde_level(
    g: &ValidatedGrid,
    max_generators: u64,
) -> Result<(i32, BigradedRanks, BTreeMap<i32, u64>)> {
    scan_levels(g, nonempty_levels(g).into_iter(), max_generators)
}

fn scan_levels(
    g: &ValidatedGrid,
    levels: impl Iterator<Item = i32>,
    max_generators: u64,
) -> Result<(i32, BigradedRanks, BTreeMap<i32, u64>)> {
    let mut sizes = BTreeMap::new();
    for a in levels {
        let lc = boundary_at_level(g, a, max_generators)?;
        sizes.insert(a, lc.gens.len() as u64);
        if lc.gens.is_empty() {
            continue;
        }
        let r = level_ranks(&lc)?;
        if !r.is_empty() {
            return Ok((a, r, sizes));
        }
    }
    Err(Error::InconsistentComplex("tilde homology vanishes at every level".into()))
}

fn m_poly(ranks: &BigradedRanks, shift2: i32) -> LaurentPoly {
    LaurentPoly::from_terms(Var::M, ranks.iter().map(|((m2, _), r)| (m2 + shift2, r as i64)))
}

/// The bottom hat group. The lowest nonzero tilde level sits `n - l` below
/// the hat bottom and carries the hat bottom group shifted down by the same
/// amount in both gradings.
pub fn bottom_group(g: &ValidatedGrid, max_generators: u64) -> Result<ExtremalGroup> {
    let (level, ranks, _) = bottom_tilde_level(g, max_generators)?;
    let shift2 = 2 * extra_basepoints(g) as i32;
    Ok(ExtremalGroup {
        alex2_bottom: level + shift2,
        poincare: m_poly(&ranks, shift2),
    })
}

/// The top hat group, which equals the highest nonzero tilde level.
pub fn top_group(g: &ValidatedGrid, max_generators: u64) -> Result<TopGroup> {
    let (level, ranks, _) = scan_levels(g, nonempty_levels(g).into_iter().rev(), max_generators)?;
    Ok(TopGroup {
        alex2_top: level,
        poincare: m_poly(&ranks, 0),
    })
}

/// Twice the genus.
pub fn genus(g: &ValidatedGrid, max_generators: u64) -> Result<i32> {
    Ok(-bottom_group(g, max_generators)?.alex2_bottom)
}

/// Whether the inclusion of the bottom nonzero filtration level of the full
/// filtered complex is nonzero on homology.
pub fn tau_bot_is_minus_g(g: &ValidatedGrid, max_generators: u64) -> Result<bool> {
    let (cutoff, _, _) = bottom_tilde_level(g, max_generators)?;
    let fc = FilteredComplex::build(g, max_generators)?;
    Ok(induced_map_rank(&TwoStepFiltration::new(&fc, cutoff))? > 0)
}

pub fn tau_top_is_g(g: &ValidatedGrid, max_generators: u64) -> Result<bool> {
    tau_bot_is_minus_g(&mirror(g), max_generators)
}

/// Graded Euler characteristic of the hat homology as a polynomial in
/// `t^(1/2)`: exponents are doubled Alexander gradings.
pub fn graded_euler_characteristic(g: &ValidatedGrid, max_generators: u64) -> Result<LaurentPoly> {
    let gens = all_generators(g, max_generators)?;
    let mut chi = LaurentPoly::zero(Var::T);
    for x in &gens {
        let sign = if (x.maslov2 / 2).rem_euclid(2) == 0 { 1 } else { -1 };
        chi.add_term(x.alex2, sign);
    }
    let factor = LaurentPoly::from_terms(Var::T, [(0, 1), (-2, -1)]).pow(extra_basepoints(g) as u32);
    chi.div_exact(&factor).ok_or_else(|| {
        Error::InconsistentComplex("Euler characteristic not divisible by basepoint factors".into())
    })
}

/// Symmetrized Alexander polynomial with `Δ(1) = 1`.
pub fn alexander_polynomial(g: &ValidatedGrid, max_generators: u64) -> Result<LaurentPoly> {
    let l = link_components(g);
    if l > 1 {
        return Err(Error::NotAKnot(l));
    }
    let chi = graded_euler_characteristic(g, max_generators)?;
    let halved = chi
        .scale_exponents_down(2)
        .ok_or_else(|| Error::InconsistentComplex("half-integral Alexander grading on a knot".into()))?;
    let (lo, hi) = (halved.min_exp().unwrap_or(0), halved.max_exp().unwrap_or(0));
    let centred = halved.shift(-(lo + hi) / 2);
    Ok(if centred.eval_at_one() < 0 { centred.scale(-1) } else { centred })
}

pub fn is_extremal_rank_one(e: &ExtremalGroup) -> bool {
    e.poincare.is_monomial() && e.poincare.eval_at_one() == 1
}

/// Supported in a single Maslov grading.
pub fn is_extremal_thin(e: &ExtremalGroup) -> bool {
    e.poincare.support_len() == 1
}
