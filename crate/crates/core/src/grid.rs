//! Grid diagrams: validation, component counting, mirroring, connected sum
//! and the plain-text grid file format.
//!
//! Conventions used everywhere in this crate:
//!
//! * rows are indexed bottom to top and columns left to right;
//! * `x_cols[r]` (resp. `o_cols[r]`) is the column of the X (resp. O)
//!   marking in row `r`, which occupies the unit cell `[c, c+1] x [r, r+1]`;
//! * vertical strands run from X to O, horizontal strands from O to X.
//!
//! The O markings play the role of the `w` basepoints and the X markings the
//! role of the `z` basepoints.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported grid; permutations are stored inline in `[u8; 16]`.
pub const MAX_GRID_SIZE: usize = 16;

/// Unvalidated grid data, as read from a file or built by hand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDiagram {
    pub size: usize,
    pub x_cols: Vec<usize>,
    pub o_cols: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl GridDiagram {
    pub fn new(x_cols: Vec<usize>, o_cols: Vec<usize>) -> Self {
        GridDiagram {
            size: x_cols.len(),
            x_cols,
            o_cols,
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }
}

/// Link data that cannot be read off the grid: the component count (which
/// can) and an optional user-declared minimal Seifert surface index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkMetadata {
    pub components: usize,
    /// `2 * i(R)` for a declared minimal Seifert surface `R`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seifert_index_doubled: Option<i32>,
}

impl LinkMetadata {
    pub fn new(components: usize, seifert_index_doubled: Option<i32>) -> Result<Self> {
        if components == 0 {
            return Err(Error::SizeMismatch("a link has at least one component".into()));
        }
        if let Some(i2) = seifert_index_doubled {
            if i2 < 0 {
                return Err(Error::SizeMismatch(format!(
                    "declared doubled index {i2} is negative"
                )));
            }
        }
        Ok(LinkMetadata {
            components,
            seifert_index_doubled,
        })
    }
}

/// A grid diagram whose markings are known to be two permutations with no
/// shared cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "GridDiagram")]
pub struct ValidatedGrid {
    inner: GridDiagram,
    /// Row of the X marking in each column.
    x_rows: Vec<usize>,
    /// Row of the O marking in each column.
    o_rows: Vec<usize>,
}

impl From<ValidatedGrid> for GridDiagram {
    fn from(g: ValidatedGrid) -> Self {
        g.inner
    }
}

impl<'de> Deserialize<'de> for ValidatedGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GridDiagram::deserialize(d)?;
        validate(raw).map_err(serde::de::Error::custom)
    }
}

fn inverse_permutation(cols: &[usize]) -> Option<Vec<usize>> {
    let n = cols.len();
    let mut inv = vec![usize::MAX; n];
    for (row, &c) in cols.iter().enumerate() {
        if c >= n || inv[c] != usize::MAX {
            return None;
        }
        inv[c] = row;
    }
    Some(inv)
}

pub fn validate(raw: GridDiagram) -> Result<ValidatedGrid> {
    let n = raw.size;
    if n == 0 {
        return Err(Error::SizeMismatch("grid size must be positive".into()));
    }
    if n > MAX_GRID_SIZE {
        return Err(Error::SizeMismatch(format!(
            "grid size {n} exceeds the supported maximum {MAX_GRID_SIZE}"
        )));
    }
    if raw.x_cols.len() != n || raw.o_cols.len() != n {
        return Err(Error::SizeMismatch(format!(
            "size {n} but {} X and {} O markings",
            raw.x_cols.len(),
            raw.o_cols.len()
        )));
    }
    let x_rows =
        inverse_permutation(&raw.x_cols).ok_or_else(|| Error::NotAPermutation(raw.x_cols.clone()))?;
    let o_rows =
        inverse_permutation(&raw.o_cols).ok_or_else(|| Error::NotAPermutation(raw.o_cols.clone()))?;
    if let Some(row) = (0..n).find(|&r| raw.x_cols[r] == raw.o_cols[r]) {
        return Err(Error::MarkingCollision {
            row,
            col: raw.x_cols[row],
        });
    }
    Ok(ValidatedGrid {
        inner: raw,
        x_rows,
        o_rows,
    })
}

impl ValidatedGrid {
    pub fn size(&self) -> usize {
        self.inner.size
    }

    pub fn x_cols(&self) -> &[usize] {
        &self.inner.x_cols
    }

    pub fn o_cols(&self) -> &[usize] {
        &self.inner.o_cols
    }

    pub fn x_rows(&self) -> &[usize] {
        &self.x_rows
    }

    pub fn o_rows(&self) -> &[usize] {
        &self.o_rows
    }

    pub fn name(&self) -> Option<&str> {
        self.inner.name.as_deref()
    }

    pub fn label(&self) -> String {
        self.inner
            .name
            .clone()
            .unwrap_or_else(|| format!("grid{}", self.size()))
    }

    pub fn renamed(&self, name: impl Into<String>) -> ValidatedGrid {
        let mut g = self.clone();
        g.inner.name = Some(name.into());
        g
    }

    pub fn as_diagram(&self) -> &GridDiagram {
        &self.inner
    }

    /// Same markings, as a plain diagram.
    pub fn to_diagram(&self) -> GridDiagram {
        self.inner.clone()
    }

    /// Cyclically shifts rows up by `k` (row `r` moves to `r + k mod n`).
    /// The torus picture is unchanged, so the link type is preserved.
    pub fn rotate_rows(&self, k: usize) -> ValidatedGrid {
        let n = self.size();
        let mut x = vec![0; n];
        let mut o = vec![0; n];
        for r in 0..n {
            x[(r + k) % n] = self.x_cols()[r];
            o[(r + k) % n] = self.o_cols()[r];
        }
        self.rebuild(x, o)
    }

    /// Cyclically shifts columns right by `k`.
    pub fn rotate_cols(&self, k: usize) -> ValidatedGrid {
        let n = self.size();
        let x = self.x_cols().iter().map(|&c| (c + k) % n).collect();
        let o = self.o_cols().iter().map(|&c| (c + k) % n).collect();
        self.rebuild(x, o)
    }

    fn rebuild(&self, x: Vec<usize>, o: Vec<usize>) -> ValidatedGrid {
        let mut raw = GridDiagram::new(x, o);
        raw.name = self.inner.name.clone();
        validate(raw).expect("grid symmetry preserves validity")
    }
}

impl fmt::Display for ValidatedGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size();
        for r in (0..n).rev() {
            for c in 0..n {
                let ch = if self.x_cols()[r] == c {
                    'X'
                } else if self.o_cols()[r] == c {
                    'O'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            if r > 0 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Number of link components: orbits of the map sending a row to the row of
/// the O sharing a column with that row's X.
pub fn link_components(g: &ValidatedGrid) -> usize {
    let n = g.size();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut r = start;
        while !seen[r] {
            seen[r] = true;
            r = g.o_rows()[g.x_cols()[r]];
        }
    }
    count
}

/// Reflection across a vertical axis, presenting the mirror image.
pub fn mirror(g: &ValidatedGrid) -> ValidatedGrid {
    let n = g.size();
    let x = g.x_cols().iter().map(|&c| n - 1 - c).collect();
    let o = g.o_cols().iter().map(|&c| n - 1 - c).collect();
    let mut raw = GridDiagram::new(x, o);
    raw.name = g.name().map(|s| format!("m({s})"));
    validate(raw).expect("mirroring preserves validity")
}

/// Grid for the connected sum, splicing the strand through row 0 of each
/// summand.
///
/// `g1` is rotated so that its row-0 O sits in the top-right corner and `g2`
/// so that its row-0 X sits in the bottom-left corner. The two squares are
/// then overlapped in that single cell, which loses both markings; the
/// merged row and column each keep one X and one O. The only new crossing
/// lies in the overlap cell and is nugatory, so the result presents
/// `L1 # L2` on a grid of size `n1 + n2 - 1`.
pub fn connected_sum(g1: &ValidatedGrid, g2: &ValidatedGrid) -> ValidatedGrid {
    let n1 = g1.size();
    let n2 = g2.size();
    let n = n1 + n2 - 1;

    let a = g1.rotate_rows(n1 - 1);
    let a = a.rotate_cols((n1 - 1 + n1 - a.o_cols()[n1 - 1]) % n1);
    debug_assert_eq!(a.o_cols()[n1 - 1], n1 - 1);
    let b = g2.rotate_cols((n2 - g2.x_cols()[0]) % n2);
    debug_assert_eq!(b.x_cols()[0], 0);

    let shift = n1 - 1;
    let mut x = Vec::with_capacity(n);
    let mut o = Vec::with_capacity(n);
    for r in 0..n1 - 1 {
        x.push(a.x_cols()[r]);
        o.push(a.o_cols()[r]);
    }
    x.push(a.x_cols()[n1 - 1]);
    o.push(b.o_cols()[0] + shift);
    for r in 1..n2 {
        x.push(b.x_cols()[r] + shift);
        o.push(b.o_cols()[r] + shift);
    }
    let raw = GridDiagram::new(x, o).with_name(format!("{}#{}", g1.label(), g2.label()));
    let out = validate(raw).expect("connected sum construction yields a valid grid");
    debug_assert_eq!(
        link_components(&out),
        link_components(g1) + link_components(g2) - 1
    );
    out
}

/// Parses the plain-text grid format:
///
/// ```text
/// # optional comment lines
/// 5
/// X: 2 3 4 0 1
/// O: 0 1 2 3 4
/// ```
pub fn parse_grid(text: &str) -> Result<GridDiagram> {
    let mut payload = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with('#') {
            continue;
        }
        payload.push((lineno, line));
    }
    let syntax = |line: usize, reason: &str| Error::GridSyntax {
        line,
        reason: reason.to_string(),
    };
    if payload.len() != 3 {
        let line = payload.get(3).map_or(text.lines().count(), |p| p.0);
        return Err(syntax(
            line,
            &format!("expected exactly 3 data lines, found {}", payload.len()),
        ));
    }
    let (l0, size_line) = payload[0];
    let size: usize = size_line
        .trim()
        .parse()
        .map_err(|_| syntax(l0, "first data line must be the grid size"))?;
    let parse_row = |(lineno, line): (usize, &str), tag: &str| -> Result<Vec<usize>> {
        let rest = line
            .strip_prefix(tag)
            .ok_or_else(|| syntax(lineno, &format!("expected line to start with {tag:?}")))?;
        rest.split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| syntax(lineno, &format!("bad column index {tok:?}")))
            })
            .collect()
    };
    let x_cols = parse_row(payload[1], "X:")?;
    let o_cols = parse_row(payload[2], "O:")?;
    Ok(GridDiagram {
        size,
        x_cols,
        o_cols,
        name: None,
    })
}

pub fn format_grid(g: &ValidatedGrid, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    out.push_str(&format!("{}\n", g.size()));
    out.push_str(&format!("X: {}\n", join(g.x_cols())));
    out.push_str(&format!("O: {}\n", join(g.o_cols())));
    out
}

/// Reads and validates a grid file; the file stem becomes the grid name.
pub fn load_grid(path: impl AsRef<Path>) -> Result<ValidatedGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut raw = parse_grid(&text)?;
    raw.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    validate(raw)
}

/// Corpus directory: `$HFK_CORPUS` if set, else the `corpus/` directory
/// shipped with the workspace.
pub fn corpus_dir() -> PathBuf {
    match std::env::var_os("HFK_CORPUS") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"),
    }
}

/// Loads `<corpus>/<name>.grid`.
pub fn load_corpus_grid(name: &str) -> Result<ValidatedGrid> {
    load_grid(corpus_dir().join(format!("{name}.grid")))
}
