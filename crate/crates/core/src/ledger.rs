//! Top-group Poincaré polynomials as elements of the multiplicative group of
//! positive rational functions, with a small append-only JSON store.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{link_components, ValidatedGrid};
use crate::invariants::{genus, top_group};
use crate::poly::{LaurentPoly, Var};

pub const LEDGER_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Computed { grid: String },
    Literature { reference: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerEntry {
    pub name: String,
    /// Ranks of the top group by (undoubled) Maslov grading, variable `t`.
    pub top_poincare: LaurentPoly,
    pub b1_min: u32,
    pub source: Source,
}

impl LedgerEntry {
    pub fn new(name: impl Into<String>, top_poincare: LaurentPoly, b1_min: u32, source: Source) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.starts_with('-') {
            return Err(Error::InvalidLedger(format!("bad entry name {name:?}")));
        }
        if top_poincare.is_zero() || top_poincare.terms().any(|(_, c)| c < 0) {
            return Err(Error::InvalidLedger(format!(
                "{name}: top polynomial must be nonzero with nonnegative coefficients"
            )));
        }
        if let Source::Computed { grid } = &source {
            if grid.is_empty() {
                return Err(Error::InvalidLedger(format!("{name}: computed entry without a grid")));
            }
        }
        Ok(LedgerEntry {
            name,
            top_poincare: top_poincare.with_var(Var::T),
            b1_min,
            source,
        })
    }

    /// Computes the top group and `b1 = 2g - (l - 1)` of a grid.
    pub fn from_grid(
        name: impl Into<String>,
        g: &ValidatedGrid,
        grid_ref: impl Into<String>,
        max_generators: u64,
    ) -> Result<Self> {
        let top = top_group(g, max_generators)?;
        let poly = top
            .poincare
            .scale_exponents_down(2)
            .ok_or_else(|| Error::InconsistentComplex("odd doubled Maslov grading".into()))?;
        let genus2 = genus(g, max_generators)?;
        let b1 = genus2 - (link_components(g) as i32 - 1);
        let b1 = u32::try_from(b1).map_err(|_| Error::InconsistentComplex(format!("negative b1 {b1}")))?;
        LedgerEntry::new(name, poly, b1, Source::Computed { grid: grid_ref.into() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ledger {
    pub version: u32,
    pub entries: Vec<LedgerEntry>,
}

impl Default for Ledger {
    fn default() -> Self {
        Ledger {
            version: LEDGER_VERSION,
            entries: Vec::new(),
        }
    }
}

impl Ledger {
    /// Loads a ledger; a missing file is an empty ledger.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Ledger::default()),
            Err(e) => return Err(Error::io(path, e)),
        };
        let ledger: Ledger = serde_json::from_str(&text)?;
        if ledger.version != LEDGER_VERSION {
            return Err(Error::InvalidLedger(format!("unsupported version {}", ledger.version)));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &ledger.entries {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::DuplicateName(e.name.clone()));
            }
            LedgerEntry::new(e.name.clone(), e.top_poincare.clone(), e.b1_min, e.source.clone())?;
        }
        Ok(ledger)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn add(&mut self, entry: LedgerEntry) -> Result<()> {
        if self.get(&entry.name).is_ok() {
            return Err(Error::DuplicateName(entry.name));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&LedgerEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownEntry(name.into()))
    }

    /// Resolves names; a leading `-` gives the entry sign -1.
    pub fn signed(&self, names: &[impl AsRef<str>]) -> Result<Vec<(i32, &LedgerEntry)>> {
        names
            .iter()
            .map(|n| {
                let n = n.as_ref();
                match n.strip_prefix('-') {
                    Some(rest) => Ok((-1, self.get(rest)?)),
                    None => Ok((1, self.get(n)?)),
                }
            })
            .collect()
    }
}

/// A reduced fraction of polynomials in `t`.
///
/// Numerator and denominator are coprime in `Z[t]` once `t`-powers are
/// cleared; the denominator has lowest exponent 0 and positive leading
/// coefficient, so any `t^k` unit sits in the numerator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PosRationalFunction {
    numerator: LaurentPoly,
    denominator: LaurentPoly,
}

impl PosRationalFunction {
    pub fn one() -> Self {
        PosRationalFunction {
            numerator: LaurentPoly::one(Var::T),
            denominator: LaurentPoly::one(Var::T),
        }
    }

    pub fn new(numerator: LaurentPoly, denominator: LaurentPoly) -> Result<Self> {
        if numerator.is_zero() || denominator.is_zero() {
            return Err(Error::InvalidLedger("zero in a fraction".into()));
        }
        let (num, den) = (numerator.with_var(Var::T), denominator.with_var(Var::T));
        let g = num.gcd(&den)?;
        let mut num = num.div_exact(&g).ok_or(Error::Overflow)?;
        let mut den = den.div_exact(&g).ok_or(Error::Overflow)?;
        let shift = den.min_exp().unwrap_or(0);
        num = num.shift(-shift);
        den = den.shift(-shift);
        if den.max_exp().is_some_and(|e| den.coeff(e) < 0) {
            num = num.scale(-1);
            den = den.scale(-1);
        }
        Ok(PosRationalFunction {
            numerator: num,
            denominator: den,
        })
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.denominator
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.numerator.try_mul(&other.numerator)?,
            self.denominator.try_mul(&other.denominator)?,
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.denominator.clone(), self.numerator.clone())
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Equal after discarding `t^k` factors.
    pub fn eq_up_to_units(&self, other: &Self) -> bool {
        self.numerator.clear_units() == other.numerator.clear_units() && self.denominator == other.denominator
    }

    /// Value at `t = 1` as a (numerator, denominator) pair of integers.
    pub fn at_one(&self) -> (i64, i64) {
        (self.numerator.eval_at_one(), self.denominator.eval_at_one())
    }
}

impl std::fmt::Display for PosRationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.denominator == LaurentPoly::one(Var::T) {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

/// Product of the positive entries' polynomials over the product of the
/// negative ones, reduced.
pub fn p_image(entries: &[(i32, &LedgerEntry)]) -> Result<PosRationalFunction> {
    if entries.is_empty() {
        return Err(Error::InvalidLedger("empty multiset".into()));
    }
    let mut num = LaurentPoly::one(Var::T);
    let mut den = LaurentPoly::one(Var::T);
    for &(sign, e) in entries {
        match sign {
            1 => num = num.try_mul(&e.top_poincare)?,
            -1 => den = den.try_mul(&e.top_poincare)?,
            s => return Err(Error::InvalidLedger(format!("sign must be +1 or -1, got {s}"))),
        }
    }
    PosRationalFunction::new(num, den)
}

/// Whether every pair of polynomials is coprime in `Z[t]` after clearing
/// `t`-powers. Two entries with the same name are never independent.
pub fn independent_by_coprimality(entries: &[&LedgerEntry]) -> Result<bool> {
    if entries.len() < 2 {
        return Err(Error::InvalidLedger("need at least two entries".into()));
    }
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            if a.name == b.name {
                return Ok(false);
            }
            if a.top_poincare.gcd(&b.top_poincare)? != LaurentPoly::one(Var::T) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Top group supported in at least two Maslov gradings.
pub fn cor6_obstruction(entry: &LedgerEntry) -> bool {
    entry.top_poincare.support_len() >= 2
}

pub fn b1_sum_check(e1: &LedgerEntry, e2: &LedgerEntry, e_sum: &LedgerEntry) -> bool {
    e1.b1_min + e2.b1_min == e_sum.b1_min
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Irreducibility {
    /// A unit times `t^k`.
    Unit,
    Irreducible,
    Reducible,
    /// Degree above 2 after clearing `t`-powers.
    Undetermined,
}

fn is_square(v: i64) -> bool {
    v >= 0 && v.isqrt().pow(2) == v
}

/// Irreducibility over `Z` up to `t`-powers, decided only up to degree 2.
pub fn irreducibility(p: &LaurentPoly) -> Irreducibility {
    let q = p.clear_units();
    let deg = q.max_exp().unwrap_or(0);
    let content = q.content();
    if deg == 0 {
        return if content == 1 {
            Irreducibility::Unit
        } else if content > 1 && (2..content).all(|d| d * d > content || content % d != 0) {
            Irreducibility::Irreducible
        } else {
            Irreducibility::Reducible
        };
    }
    if content != 1 {
        return Irreducibility::Reducible;
    }
    match deg {
        1 => Irreducibility::Irreducible,
        2 => {
            let (a, b, c) = (q.coeff(2), q.coeff(1), q.coeff(0));
            // a primitive quadratic splits over Z iff it has a rational root
            if is_square(b * b - 4 * a * c) {
                Irreducibility::Reducible
            } else {
                Irreducibility::Irreducible
            }
        }
        _ => Irreducibility::Undetermined,
    }
}
