use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::angle::{Budget, DyadicAngle};
use crate::error::{Error, Result};

/// A single term `coeff / 2^exp` too fine to be materialized as bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FarTerm {
    pub coeff: BigUint,
    pub exp: u64,
}

/// An exact angle `head + coeff / 2^exp (mod 1)` whose second part lives
/// beyond the bit budget.
///
/// The far term is what lets `α = Σ 2^{-v_k}` keep its `k = 4` contribution
/// (`2^{-412316860454}`) without ever allocating 412 billion bits. Multiplying
/// by `2^j` moves the far term closer; once its exponent falls inside the
/// budget it is folded into the dense head.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SplitAngle {
    head: DyadicAngle,
    far: Option<FarTerm>,
}

impl SplitAngle {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_dense(head: DyadicAngle) -> Self {
        SplitAngle { head, far: None }
    }

    /// Builds `head + coeff / 2^exp`, folding the far term when it fits.
    pub fn new(head: DyadicAngle, coeff: BigUint, exp: u64, budget: &Budget) -> Result<Self> {
        let mut s = SplitAngle { head, far: None };
        s.add_far(coeff, exp, budget)?;
        Ok(s)
    }

    /// `2^-e`, dense or far depending on the budget.
    pub fn pow2_neg(e: u64, budget: &Budget) -> Result<Self> {
        Self::new(DyadicAngle::zero(), BigUint::from(1u32), e, budget)
    }

    pub fn head(&self) -> &DyadicAngle {
        &self.head
    }

    pub fn far(&self) -> Option<&FarTerm> {
        self.far.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.head.is_zero() && self.far.is_none()
    }

    pub fn is_dense(&self) -> bool {
        self.far.is_none()
    }

    fn add_far(&mut self, coeff: BigUint, exp: u64, budget: &Budget) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        if exp <= budget.max_bits {
            self.head = self.head.add_mod1(&DyadicAngle::from_parts(coeff, exp));
            return Ok(());
        }
        let (coeff, exp) = match self.far.take() {
            None => (coeff, exp),
            Some(f) if f.exp == exp => (f.coeff + coeff, exp),
            Some(f) => {
                // align on the finer exponent
                let (fine, coarse) = if f.exp > exp {
                    (f, FarTerm { coeff, exp })
                } else {
                    (FarTerm { coeff, exp }, f)
                };
                let shift = fine.exp - coarse.exp;
                budget.check(shift)?;
                (fine.coeff + (coarse.coeff << shift), fine.exp)
            }
        };
        // canonical: odd coefficient, folded once the exponent fits the budget
        let tz = coeff.trailing_zeros().unwrap_or(0);
        let (coeff, exp) = (coeff >> tz, exp - tz);
        if exp <= budget.max_bits {
            self.head = self.head.add_mod1(&DyadicAngle::from_parts(coeff, exp));
            return Ok(());
        }
        // the far term must stay below the head's resolution
        if coeff.bits() > exp - budget.max_bits {
            return Err(Error::budget(
                format!("far term 2^-{} with {}-bit coefficient", exp, coeff.bits()),
                budget.max_bits,
            ));
        }
        self.far = Some(FarTerm { coeff, exp });
        Ok(())
    }

    pub fn add(&self, other: &Self, budget: &Budget) -> Result<Self> {
        let mut out = SplitAngle {
            head: self.head.add_mod1(&other.head),
            far: self.far.clone(),
        };
        if let Some(f) = &other.far {
            out.add_far(f.coeff.clone(), f.exp, budget)?;
        }
        Ok(out)
    }

    pub fn add_dense(&self, d: &DyadicAngle) -> Self {
        SplitAngle {
            head: self.head.add_mod1(d),
            far: self.far.clone(),
        }
    }

    /// `2^j * self mod 1`.
    pub fn mul_pow2(&self, j: u64, budget: &Budget) -> Result<Self> {
        let mut out = SplitAngle::from_dense(self.head.mul_pow2_mod1(j));
        if let Some(f) = &self.far {
            if j >= f.exp {
                return Ok(out);
            }
            // a far coefficient shifted past the binary point contributes its low bits only
            out.add_far(f.coeff.clone(), f.exp - j, budget)?;
        }
        Ok(out)
    }

    pub fn mul_int(&self, c: &BigUint, budget: &Budget) -> Result<Self> {
        let mut out = SplitAngle::from_dense(self.head.mul_int_mod1(c));
        if let Some(f) = &self.far {
            out.add_far(&f.coeff * c, f.exp, budget)?;
        }
        Ok(out)
    }

    /// Strict comparison against `2^-e`, exact.
    pub fn lt_pow2_neg(&self, e: u64) -> bool {
        match (&self.far, self.head.is_zero()) {
            (None, _) => self.head.lt_pow2_neg(e),
            // head is a multiple of a coarser grid than the far term
            (Some(_), false) => self.head.lt_pow2_neg(e),
            (Some(f), true) => e <= f.exp && f.coeff.bits() <= f.exp - e,
        }
    }

    fn far_f64(&self) -> f64 {
        match &self.far {
            None => 0.0,
            Some(f) => {
                let lead = f.exp.saturating_sub(f.coeff.bits());
                if lead > 1100 {
                    return 0.0;
                }
                let top_shift = f.coeff.bits().saturating_sub(64);
                let top: BigUint = &f.coeff >> top_shift;
                let m = top.to_u64().unwrap_or(u64::MAX) as f64;
                super::angle::ldexp(m, top_shift as i64 - f.exp as i64)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.head.to_f64() + self.far_f64();
        if v >= 1.0 {
            v - 1.0
        } else {
            v
        }
    }

    pub fn to_centered_f64(&self) -> f64 {
        self.head.to_centered_f64() + self.far_f64()
    }

    /// The dense part rounded down to 64 bits; the far term is invisible at this scale.
    pub fn to_fixed_u64(&self) -> u64 {
        self.head.to_fixed_u64()
    }

    /// `0x..p-e` for dense values, `0x..p-e+0x..p-E` with a far term.
    pub fn to_hex(&self) -> String {
        match &self.far {
            None => self.head.to_hex(),
            Some(f) => format!("{}+0x{:x}p-{}", self.head.to_hex(), f.coeff, f.exp),
        }
    }

    pub fn parse(s: &str, budget: &Budget) -> Result<Self> {
        let mut out = SplitAngle::zero();
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("empty summand in {s:?}")));
            }
            if let Some((mant, exp)) = far_parts(part) {
                out.add_far(mant, exp, budget)?;
            } else {
                let d: DyadicAngle = part.parse()?;
                out = out.add_dense(&d);
            }
        }
        Ok(out)
    }
}

/// Recognizes `0x<hex>p-<exp>` pieces whose exponent exceeds any dense use.
fn far_parts(part: &str) -> Option<(BigUint, u64)> {
    let body = part.strip_prefix("0x").or_else(|| part.strip_prefix("0X"))?;
    let (mant, exp) = body.split_once(['p', 'P'])?;
    let exp: u64 = exp.strip_prefix('-')?.parse().ok()?;
    let mant = BigUint::parse_bytes(mant.as_bytes(), 16)?;
    Some((mant, exp))
}

impl From<DyadicAngle> for SplitAngle {
    fn from(d: DyadicAngle) -> Self {
        SplitAngle::from_dense(d)
    }
}

impl fmt::Display for SplitAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for SplitAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:.17})", self.to_hex(), self.to_f64())
    }
}

impl FromStr for SplitAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SplitAngle::parse(s, &Budget::default())
    }
}

impl Serialize for SplitAngle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for SplitAngle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
