//! Knot Floer homology over GF(2) from grid diagrams.

pub mod complex;
pub mod error;
pub mod gf2;
pub mod grid;
pub mod invariants;
pub mod ledger;
pub mod murasugi;
pub mod poly;
pub mod snapshot;

pub use error::{Error, Result};
