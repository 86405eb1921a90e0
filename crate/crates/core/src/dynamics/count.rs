use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::{Budget, SplitAngle};
use crate::error::{Error, Result};

/// Runs of at least this many zero bits separate the terms of the canonical form.
const GAP: u64 = 32;

/// Totals up to this many bits are also rendered in plain decimal.
const DECIMAL_BITS: u64 = 4096;

/// An exact non-negative iterate count `Σ c_i 2^{e_i}`.
///
/// Counts such as `2^{412316860413}` are perfectly ordinary here: only the
/// shifts are stored, never the binary expansion.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IterCount {
    /// shift -> odd coefficient, canonicalized so that distinct counts have distinct maps
    terms: BTreeMap<u64, BigUint>,
}

impl IterCount {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_u64(n: u64) -> Self {
        Self::term(BigUint::from(n), 0)
    }

    /// `c * 2^e`.
    pub fn term(c: BigUint, e: u64) -> Self {
        let mut out = IterCount::zero();
        if !c.is_zero() {
            out.terms.insert(e, c);
            out.canonicalize();
        }
        out
    }

    pub fn pow2(e: u64) -> Self {
        Self::term(BigUint::from(1u32), e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigUint)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Bit length of the total.
    pub fn bits(&self) -> u64 {
        self.terms
            .iter()
            .next_back()
            .map(|(e, c)| e + c.bits())
            .unwrap_or(0)
    }

    pub fn to_biguint(&self, max_bits: u64) -> Option<BigUint> {
        if self.bits() > max_bits {
            return None;
        }
        Some(self.terms.iter().fold(BigUint::zero(), |acc, (e, c)| acc + (c << *e)))
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_biguint(64).and_then(|n| n.to_u64())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let slot = out.terms.entry(*e).or_default();
            *slot += c;
        }
        out.canonicalize();
        out
    }

    pub fn mul_u64(&self, m: u64) -> Self {
        if m == 0 {
            return Self::zero();
        }
        let mut out = IterCount {
            terms: self.terms.iter().map(|(e, c)| (*e, c * m)).collect(),
        };
        out.canonicalize();
        out
    }

    pub fn shl(&self, s: u64) -> Self {
        IterCount {
            terms: self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect(),
        }
    }

    /// `self * a mod 1`, exact.
    pub fn times_angle(&self, a: &SplitAngle, budget: &Budget) -> Result<SplitAngle> {
        let mut acc = SplitAngle::zero();
        for (e, c) in &self.terms {
            let t = a.mul_int(c, budget)?.mul_pow2(*e, budget)?;
            acc = acc.add(&t, budget)?;
        }
        Ok(acc)
    }

    fn canonicalize(&mut self) {
        // merge terms whose bit ranges come within GAP of each other
        let mut merged: Vec<(u64, BigUint)> = Vec::new();
        for (e, c) in std::mem::take(&mut self.terms) {
            if c.is_zero() {
                continue;
            }
            match merged.last_mut() {
                Some((e0, c0)) if e <= *e0 + c0.bits() + GAP => {
                    *c0 += c << (e - *e0);
                }
                _ => merged.push((e, c)),
            }
        }
        for (e, c) in merged {
            split_runs(e, &c, &mut self.terms);
        }
    }
}

/// Splits `c 2^e` at zero runs of length `>= GAP` and strips trailing zeros.
fn split_runs(e: u64, c: &BigUint, out: &mut BTreeMap<u64, BigUint>) {
    let n = c.bits();
    let mut start: Option<u64> = None;
    let mut last_one = 0u64;
    for i in 0..n {
        if c.bit(i) {
            match start {
                None => start = Some(i),
                Some(s) if i - last_one > GAP => {
                    out.insert(e + s, (c >> s) & ((BigUint::from(1u32) << (last_one - s + 1)) - 1u32));
                    start = Some(i);
                }
                _ => {}
            }
            last_one = i;
        }
    }
    if let Some(s) = start {
        out.insert(e + s, c >> s);
    }
}

impl fmt::Display for IterCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        if let Some(n) = self.to_biguint(DECIMAL_BITS) {
            return write!(f, "{n}");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                if e + c.bits() <= 128 {
                    (c << *e).to_string()
                } else {
                    format!("{c}*2^{e}")
                }
            })
            .collect();
        f.write_str(&parts.join("+"))
    }
}

impl fmt::Debug for IterCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IterCount({self})")
    }
}

/// Parses a decimal integer or a sum of `c*2^e` terms.
impl FromStr for IterCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = IterCount::zero();
        for part in s.split('+') {
            let part = part.trim();
            let (c, e) = match part.split_once("*2^") {
                Some((c, e)) => (c, e),
                None if part.starts_with("2^") => ("1", &part[2..]),
                None => (part, "0"),
            };
            let c: BigUint = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad iterate count term {part:?}")))?;
            let e: u64 = e
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad iterate count exponent {part:?}")))?;
            out = out.add(&IterCount::term(c, e));
        }
        Ok(out)
    }
}

impl Serialize for IterCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IterCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
