#![allow(dead_code)]

pub mod oracle;

use hfk_core::grid::{load_corpus_grid, validate, GridDiagram, ValidatedGrid};
use proptest::prelude::*;

pub const MAX: u64 = hfk_core::complex::DEFAULT_MAX_GENERATORS;

pub fn corpus(name: &str) -> ValidatedGrid {
    load_corpus_grid(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Valid grids of size `lo..=hi`, shrinking toward smaller sizes.
pub fn arb_grid(lo: usize, hi: usize) -> impl Strategy<Value = ValidatedGrid> {
    (lo..=hi)
        .prop_flat_map(|n| {
            let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
            (perm.clone(), perm)
        })
        .prop_filter_map("markings collide", |(x, o)| validate(GridDiagram::new(x, o)).ok())
}

pub fn grid(x: &[usize], o: &[usize]) -> ValidatedGrid {
    validate(GridDiagram::new(x.to_vec(), o.to_vec())).unwrap()
}
