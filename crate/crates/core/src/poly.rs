//! Laurent polynomials in one variable with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which grading a polynomial's exponent tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    /// Maslov grading; exponents are doubled (`maslov2`).
    M,
    /// Alexander grading, or the Maslov grading of a top group in the
    /// Grothendieck ledger.
    T,
}

impl Var {
    fn letter(self) -> char {
        match self {
            Var::M => 'm',
            Var::T => 't',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPoly {
    var: Var,
    /// `(exponent, coefficient)` pairs; zero coefficients are never stored.
    #[serde(with = "term_list")]
    terms: BTreeMap<i32, i64>,
}

mod term_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(terms: &BTreeMap<i32, i64>, s: S) -> Result<S::Ok, S::Error> {
        terms.iter().map(|(&e, &c)| (e, c)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i32, i64>, D::Error> {
        let v = Vec::<(i32, i64)>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (e, c) in v {
            *out.entry(e).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        Ok(out)
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl LaurentPoly {
    pub fn zero(var: Var) -> Self {
        LaurentPoly {
            var,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(var: Var) -> Self {
        Self::monomial(var, 0, 1)
    }

    pub fn monomial(var: Var, exp: i32, coeff: i64) -> Self {
        Self::from_terms(var, [(exp, coeff)])
    }

    pub fn from_terms(var: Var, terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut out = Self::zero(var);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, exp: i32, coeff: i64) {
        let c = self.terms.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// The same coefficients read in another variable.
    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i32) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    /// Number of nonzero terms.
    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// `self(1)`, the sum of the coefficients.
    pub fn eval_at_one(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Multiplies by `var^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self::from_terms(self.var, self.terms().map(|(e, c)| (e + k, c)))
    }

    /// Substitutes `var -> var^-1`.
    pub fn reflect(&self) -> Self {
        Self::from_terms(self.var, self.terms().map(|(e, c)| (-e, c)))
    }

    /// Divides every exponent by `d`; `None` if some exponent is not a
    /// multiple of `d`.
    pub fn scale_exponents_down(&self, d: i32) -> Option<Self> {
        if self.terms.keys().any(|e| e % d != 0) {
            return None;
        }
        Some(Self::from_terms(self.var, self.terms().map(|(e, c)| (e / d, c))))
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.var, self.terms().map(|(e, c)| (e, c * k)))
    }

    /// Removes the unit factor `var^k` so the lowest exponent is zero.
    pub fn clear_units(&self) -> Self {
        match self.min_exp() {
            Some(lo) => self.shift(-lo),
            None => self.clone(),
        }
    }

    /// Coefficient symmetry under `var -> var^-1`.
    pub fn is_symmetric(&self) -> bool {
        *self == self.reflect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.var);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                let c = c1.checked_mul(c2).ok_or(Error::Overflow)?;
                let slot = out.terms.entry(e1 + e2).or_insert(0);
                *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
            }
        }
        out.terms.retain(|_, c| *c != 0);
        Ok(out)
    }

    /// Panics on coefficient overflow; see [`LaurentPoly::try_mul`].
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("coefficient overflow")
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.var), |acc, _| acc.mul(self))
    }

    /// Gcd of the absolute values of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> i64 {
        self.terms.values().fold(0i128, |g, &c| gcd_i128(g, c as i128)) as i64
    }

    fn dense(&self) -> (i32, Vec<i128>) {
        let lo = self.min_exp().unwrap_or(0);
        let hi = self.max_exp().unwrap_or(-1);
        let mut v = vec![0i128; (hi - lo + 1).max(0) as usize];
        for (e, c) in self.terms() {
            v[(e - lo) as usize] = c as i128;
        }
        (lo, v)
    }

    fn from_dense(var: Var, lo: i32, v: &[i128]) -> Result<Self> {
        let mut out = Self::zero(var);
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                out.add_term(lo + i as i32, i64::try_from(c).map_err(|_| Error::Overflow)?);
            }
        }
        Ok(out)
    }

    /// Exact quotient `self / divisor` as Laurent polynomials over the
    /// integers, or `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.var));
        }
        let (alo, mut a) = self.dense();
        let (blo, b) = divisor.dense();
        if a.len() < b.len() {
            return None;
        }
        let lead = *b.last().unwrap();
        let mut q = vec![0i128; a.len() - b.len() + 1];
        for k in (0..q.len()).rev() {
            let top = a[k + b.len() - 1];
            if top % lead != 0 {
                return None;
            }
            let f = top / lead;
            q[k] = f;
            for (i, &bc) in b.iter().enumerate() {
                a[k + i] = a[k + i].checked_sub(f.checked_mul(bc)?)?;
            }
        }
        if a.iter().any(|&c| c != 0) {
            return None;
        }
        Self::from_dense(self.var, alo - blo, &q).ok()
    }

    /// Greatest common divisor in `Z[var]` after clearing unit factors
    /// `var^k`: content times primitive gcd, with positive leading
    /// coefficient and lowest exponent zero.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let var = self.var;
        if self.is_zero() {
            return Ok(other.clear_units().normalize_sign());
        }
        if other.is_zero() {
            return Ok(self.clear_units().normalize_sign());
        }
        let content = gcd_i128(self.content() as i128, other.content() as i128);
        let big = |p: &Self| p.dense().1.into_iter().map(BigInt::from).collect::<Vec<_>>();
        let mut a = primitive(big(self));
        let mut b = primitive(big(other));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.len() > 1 {
            let r = pseudo_remainder(&a, &b);
            a = b;
            b = primitive(r);
        }
        // a constant remainder means the primitive parts are coprime
        let g = if b.is_empty() { a } else { vec![BigInt::one()] };
        let g = g
            .into_iter()
            .map(|c| i128::try_from(c * BigInt::from(content)).map_err(|_| Error::Overflow))
            .collect::<Result<Vec<i128>>>()?;
        Ok(Self::from_dense(var, 0, &g)?.clear_units().normalize_sign())
    }

    fn normalize_sign(self) -> Self {
        match self.terms.values().next_back() {
            Some(&c) if c < 0 => self.scale(-1),
            _ => self,
        }
    }

    /// Parses `"1 + t"`, `"2t^-1 - 3 + 2t"`, `"t^2+t^3"` and similar, in the
    /// given variable.
    pub fn parse(var: Var, s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidLedger(format!("cannot parse polynomial {s:?}: {why}"));
        let letter = var.letter();
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut out = Self::zero(var);
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ => (1, rest),
            };
            // a term ends at the next +/- that is not an exponent sign
            let bytes = body.as_bytes();
            let mut end = bytes.len();
            for i in 1..bytes.len() {
                if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                    end = i;
                    break;
                }
            }
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (coeff, exp) = match term.find(letter) {
                None => (term.parse::<i64>().map_err(|_| bad(term))?, 0),
                Some(pos) => {
                    let c = match term[..pos].trim_end_matches('*') {
                        "" => 1,
                        cs => cs.parse::<i64>().map_err(|_| bad(term))?,
                    };
                    let e = match &term[pos + 1..] {
                        "" => 1,
                        es => es
                            .strip_prefix('^')
                            .ok_or_else(|| bad(term))?
                            .parse::<i32>()
                            .map_err(|_| bad(term))?,
                    };
                    (c, e)
                }
            };
            out.add_term(exp, sign * coeff);
        }
        Ok(out)
    }
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g > BigInt::one() {
        for c in &mut v {
            *c /= &g;
        }
    }
    if v.last().is_some_and(|c| c.is_negative()) {
        for c in &mut v {
            *c = -&*c;
        }
    }
    v
}

/// Remainder of `lc(b)^k a` by `b` up to a constant factor, dense
/// coefficient vectors low to high.
fn pseudo_remainder(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap();
    while r.len() >= b.len() {
        let lr = r.last().unwrap().clone();
        let off = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[off + i] -= &lr * bc;
        }
        r = primitive(r);
    }
    r
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let letter = self.var.letter();
        for (k, (e, c)) in self.terms().rev().enumerate() {
            let mag = c.unsigned_abs();
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            }
            match (e, mag) {
                (0, _) => write!(f, "{mag}")?,
                (_, 1) => write!(f, "{letter}")?,
                _ => write!(f, "{mag}{letter}")?,
            }
            if e != 0 && e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;

    /// Parses a polynomial in `t`.
    fn from_str(s: &str) -> Result<Self> {
        LaurentPoly::parse(Var::T, s)
    }
}
