//! Binary snapshots of level complexes. The layout is described in
//! `docs/snapshot.md`; all integers are little-endian.

use std::io::{Read, Write};
use std::path::Path;

use crate::complex::{GridGenerator, LevelComplex, Perm};
use crate::error::{Error, Result};
use crate::gf2::SparseGF2Matrix;
use crate::grid::MAX_GRID_SIZE;

pub const MAGIC: &[u8; 4] = b"HFKL";
pub const VERSION: u32 = 1;

pub fn write_level(out: &mut impl Write, level: &LevelComplex) -> std::io::Result<()> {
    let n = level.gens.first().map_or(0, |x| x.perm.len());
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(n as u32).to_le_bytes())?;
    out.write_all(&level.level_alex2.to_le_bytes())?;
    out.write_all(&(level.gens.len() as u32).to_le_bytes())?;
    for x in &level.gens {
        out.write_all(x.perm.as_slice())?;
        out.write_all(&x.maslov2.to_le_bytes())?;
        out.write_all(&x.alex2.to_le_bytes())?;
    }
    out.write_all(&(level.boundary.nnz() as u64).to_le_bytes())?;
    for (r, c) in level.boundary.entries() {
        out.write_all(&(r as u32).to_le_bytes())?;
        out.write_all(&(c as u32).to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize>(input: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Snapshot(format!("truncated: {e}")))?;
    Ok(buf)
}

fn read_u32(input: &mut impl Read) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(input)?))
}

fn read_i32(input: &mut impl Read) -> Result<i32> {
    Ok(i32::from_le_bytes(read_array(input)?))
}

/// Reads a snapshot and re-checks the complex invariants.
pub fn read_level(input: &mut impl Read) -> Result<LevelComplex> {
    if &read_array::<4>(input)? != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = read_u32(input)?;
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let n = read_u32(input)? as usize;
    if n > MAX_GRID_SIZE {
        return Err(Error::Snapshot(format!("grid size {n} too large")));
    }
    let level_alex2 = read_i32(input)?;
    let count = read_u32(input)? as usize;
    let mut gens = Vec::with_capacity(count.min(1 << 20));
    let mut rows = vec![0u8; n];
    for _ in 0..count {
        input
            .read_exact(&mut rows)
            .map_err(|e| Error::Snapshot(format!("truncated: {e}")))?;
        let mut seen = [false; MAX_GRID_SIZE];
        for &r in &rows {
            if r as usize >= n || std::mem::replace(&mut seen[r as usize], true) {
                return Err(Error::Snapshot(format!("{rows:?} is not a permutation")));
            }
        }
        let perm = Perm::from_slice(&rows.iter().map(|&r| r as usize).collect::<Vec<_>>());
        let maslov2 = read_i32(input)?;
        let alex2 = read_i32(input)?;
        gens.push(GridGenerator { perm, maslov2, alex2 });
    }
    let nnz = u64::from_le_bytes(read_array(input)?);
    let mut entries = Vec::with_capacity((nnz as usize).min(1 << 20));
    for _ in 0..nnz {
        let r = read_u32(input)? as usize;
        let c = read_u32(input)? as usize;
        if r >= count || c >= count {
            return Err(Error::Snapshot(format!("entry ({r}, {c}) out of range")));
        }
        entries.push((r, c));
    }
    let trailing = input.read(&mut [0u8]).map_err(|e| Error::Snapshot(e.to_string()))?;
    if trailing != 0 {
        return Err(Error::Snapshot("trailing bytes".into()));
    }
    let level = LevelComplex {
        level_alex2,
        gens,
        boundary: SparseGF2Matrix::from_entries(count, count, entries),
    };
    level.check()?;
    Ok(level)
}

pub fn save_level(path: impl AsRef<Path>, level: &LevelComplex) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_level(&mut w, level)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_level(path: impl AsRef<Path>) -> Result<LevelComplex> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_level(&mut std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::boundary_at_level;
    use crate::grid::{validate, GridDiagram};

    fn trefoil_levels() -> Vec<LevelComplex> {
        let g = validate(GridDiagram::new(vec![2, 3, 4, 0, 1], vec![0, 1, 2, 3, 4])).unwrap();
        (-8..=4).step_by(2).map(|a| boundary_at_level(&g, a, 1 << 20).unwrap()).collect()
    }

    #[test]
    fn round_trip() {
        for level in trefoil_levels() {
            let mut buf = Vec::new();
            write_level(&mut buf, &level).unwrap();
            let back = read_level(&mut buf.as_slice()).unwrap();
            assert_eq!(back, level);
        }
    }

    #[test]
    fn corrupt_snapshots_are_rejected() {
        let level = trefoil_levels().into_iter().max_by_key(|l| l.boundary.nnz()).unwrap();
        let mut buf = Vec::new();
        write_level(&mut buf, &level).unwrap();
        assert!(read_level(&mut &buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_level(&mut extra.as_slice()).is_err());
        let mut magic = buf.clone();
        magic[0] = b'X';
        assert!(read_level(&mut magic.as_slice()).is_err());
        // header is 20 bytes, then the first permutation
        let mut graded = buf.clone();
        let first_maslov = 20 + level.gens[0].perm.len();
        graded[first_maslov] ^= 0x40;
        assert!(read_level(&mut graded.as_slice()).is_err());
    }
}
