use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper bound on the number of fractional bits an exact computation may
/// materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_bits: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_bits: 1 << 20 }
    }
}

impl Budget {
    pub fn new(max_bits: u64) -> Self {
        Budget { max_bits }
    }

    pub fn check(&self, bits: u64) -> Result<()> {
        if bits > self.max_bits {
            Err(Error::budget(bits, self.max_bits))
        } else {
            Ok(())
        }
    }
}

/// An exact point of the circle `R/Z` of the form `numerator / 2^exponent`.
///
/// The representation is canonical: the numerator is odd and strictly below
/// `2^exponent`, except for zero which is stored as `0 / 2^0`. Every operation
/// is exact; nothing here ever rounds unless asked to by [`round_to_bits`].
///
/// [`round_to_bits`]: DyadicAngle::round_to_bits
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicAngle {
    num: BigUint,
    exp: u64,
}

/// `m * 2^e` without intermediate underflow.
pub(crate) fn ldexp(m: f64, e: i64) -> f64 {
    if e < -1000 {
        let half = e / 2;
        m * (half as f64).exp2() * ((e - half) as f64).exp2()
    } else {
        m * (e as f64).exp2()
    }
}

/// `n mod 2^bits`, without building the mask.
pub(crate) fn low_bits(n: &BigUint, bits: u64) -> BigUint {
    if n.bits() <= bits {
        return n.clone();
    }
    let mut digits = n.to_u32_digits();
    let keep = bits.div_ceil(32) as usize;
    digits.truncate(keep);
    let rem = bits % 32;
    if rem != 0 {
        if let Some(top) = digits.last_mut() {
            *top &= (1u32 << rem) - 1;
        }
    }
    BigUint::new(digits)
}

impl DyadicAngle {
    pub fn zero() -> Self {
        DyadicAngle {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    /// `num / 2^exp` reduced mod 1 and brought to canonical form.
    pub fn from_parts(num: BigUint, exp: u64) -> Self {
        if exp == 0 {
            return Self::zero();
        }
        let mut num = low_bits(&num, exp);
        if num.is_zero() {
            return Self::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0);
        num >>= tz;
        DyadicAngle { num, exp: exp - tz }
    }

    /// `2^-e` (zero when `e == 0`).
    pub fn pow2_neg(e: u64) -> Self {
        if e == 0 {
            Self::zero()
        } else {
            DyadicAngle {
                num: BigUint::one(),
                exp: e,
            }
        }
    }

    /// The angle `bits / 2^64`.
    pub fn from_fixed_u64(bits: u64) -> Self {
        Self::from_parts(BigUint::from(bits), 64)
    }

    /// Exact conversion of a finite double, reduced mod 1.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite angle {x}")));
        }
        if x == 0.0 {
            return Ok(Self::zero());
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, e2) = if biased == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        if e2 >= 0 {
            return Ok(Self::zero());
        }
        let denom_bits = (-e2) as u64;
        let mut m = BigInt::from(mantissa);
        if negative {
            m = -m;
        }
        let modulus = BigInt::one() << denom_bits;
        let reduced = m.mod_floor(&modulus);
        let (_, mag) = reduced.into_parts();
        Ok(Self::from_parts(mag, denom_bits))
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    /// Power of two in the denominator of the canonical form.
    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn aligned(&self, other: &Self) -> (BigUint, BigUint, u64) {
        let e = self.exp.max(other.exp);
        (
            &self.num << (e - self.exp),
            &other.num << (e - other.exp),
            e,
        )
    }

    pub fn add_mod1(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self::from_parts(a + b, e)
    }

    pub fn sub_mod1(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        if a >= b {
            Self::from_parts(a - b, e)
        } else {
            Self::from_parts((BigUint::one() << e) + a - b, e)
        }
    }

    pub fn neg_mod1(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::from_parts((BigUint::one() << self.exp) - &self.num, self.exp)
    }

    /// `2^j * self mod 1`: a left shift followed by dropping the integer part.
    pub fn mul_pow2_mod1(&self, j: u64) -> Self {
        if self.is_zero() || j >= self.exp {
            return Self::zero();
        }
        Self::from_parts(self.num.clone(), self.exp - j)
    }

    pub fn mul_int_mod1(&self, c: &BigUint) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::from_parts(&self.num * c, self.exp)
    }

    /// Nearest multiple of `2^-bits` (ties to even), reduced mod 1.
    pub fn round_to_bits(&self, bits: u64) -> Self {
        if self.exp <= bits {
            return self.clone();
        }
        let shift = self.exp - bits;
        let q: BigUint = &self.num >> shift;
        let half = self.num.bit(shift - 1);
        // canonical numerators are odd, so a set half bit with shift > 1 is never a tie
        let tie = shift == 1;
        let round_up = half && (!tie || q.bit(0));
        let q = if round_up { q + 1u32 } else { q };
        Self::from_parts(q, bits)
    }

    /// `true` iff the value is strictly below `2^-e`.
    pub fn lt_pow2_neg(&self, e: u64) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.exp < e {
            return false;
        }
        self.num.bits() <= self.exp - e
    }

    /// Value in `[0, 1)` as a double (from the leading 64 bits of the numerator).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let shift = self.num.bits().saturating_sub(64);
        let top: BigUint = &self.num >> shift;
        let m = top.to_u64().unwrap_or(u64::MAX) as f64;
        ldexp(m, shift as i64 - self.exp as i64)
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn to_centered_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.num.bits() == self.exp {
            -self.neg_mod1().to_f64()
        } else {
            self.to_f64()
        }
    }

    /// `floor(value * 2^64)`.
    pub fn to_fixed_u64(&self) -> u64 {
        if self.exp <= 64 {
            let n: BigUint = &self.num << (64 - self.exp);
            n.to_u64().unwrap_or(0)
        } else {
            let n: BigUint = &self.num >> (self.exp - 64);
            n.to_u64().unwrap_or(0)
        }
    }

    /// `value * 2^128` when that is an integer.
    pub fn to_fixed_u128(&self) -> Option<u128> {
        if self.exp > 128 {
            return None;
        }
        let n: BigUint = &self.num << (128 - self.exp);
        n.to_u128()
    }

    /// Bit-exact hex-float rendering, `0x<numerator>p-<exponent>`.
    pub fn to_hex(&self) -> String {
        format!("0x{:x}p-{}", self.num, self.exp)
    }

    /// Parses `0x<hex>p<signed decimal>`; the value is reduced mod 1.
    pub fn parse_hex(s: &str) -> Result<Self> {
        let t = s.trim();
        let body = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .ok_or_else(|| Error::Parse(format!("hex dyadic must start with 0x: {s:?}")))?;
        let (mant, pow) = match body.find(['p', 'P']) {
            Some(i) => (&body[..i], &body[i + 1..]),
            None => (body, "0"),
        };
        let num = BigUint::parse_bytes(mant.as_bytes(), 16)
            .ok_or_else(|| Error::Parse(format!("bad hex mantissa in {s:?}")))?;
        let pow: i128 = pow
            .parse()
            .map_err(|_| Error::Parse(format!("bad binary exponent in {s:?}")))?;
        if pow >= 0 {
            return Ok(Self::zero());
        }
        let exp = u64::try_from(-pow).map_err(|_| Error::Parse(format!("exponent too large in {s:?}")))?;
        Ok(Self::from_parts(num, exp))
    }
}

impl Default for DyadicAngle {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for DyadicAngle {
    fn cmp(&self, other: &Self) -> Ordering {
        let (big, small, flip) = if self.exp >= other.exp {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let shift = big.exp - small.exp;
        let lhs_bits = big.num.bits();
        let rhs_bits = if small.num.is_zero() {
            0
        } else {
            small.num.bits() + shift
        };
        let ord = match lhs_bits.cmp(&rhs_bits) {
            Ordering::Equal => big.num.cmp(&(&small.num << shift)),
            o => o,
        };
        if flip {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl PartialOrd for DyadicAngle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for DyadicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:.17})", self.to_hex(), self.to_f64())
    }
}

/// Accepts either a hex dyadic (`0x...p-e`) or a decimal number, which is
/// converted exactly from its nearest double.
impl FromStr for DyadicAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with("0x") || t.starts_with("0X") {
            Self::parse_hex(t)
        } else {
            let x: f64 = t
                .parse()
                .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
            Self::from_f64(x)
        }
    }
}

impl Serialize for DyadicAngle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for DyadicAngle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(num: u64, exp: u64) -> DyadicAngle {
        DyadicAngle::from_parts(BigUint::from(num), exp)
    }

    #[test]
    fn canonical_form_strips_even_factors_and_wraps() {
        let a = d(12, 5);
        assert_eq!(a.numerator(), &BigUint::from(3u32));
        assert_eq!(a.exponent(), 3);
        assert!(d(32, 5).is_zero());
        assert_eq!(d(33, 5), d(1, 5));
    }

    #[test]
    fn eighth_times_eight_is_zero() {
        assert!(d(1, 3).mul_pow2_mod1(3).is_zero());
        assert!(DyadicAngle::zero().mul_pow2_mod1(17).is_zero());
    }

    #[test]
    fn add_and_sub_wrap_around() {
        let a = d(3, 2);
        let b = d(1, 1);
        assert_eq!(a.add_mod1(&b), d(1, 2));
        assert_eq!(b.sub_mod1(&a), d(3, 2));
        assert_eq!(a.add_mod1(&a.neg_mod1()), DyadicAngle::zero());
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        for x in [0.5, 0.1, 1e-300, 0.999_999_999_999, 5e-324] {
            let a = DyadicAngle::from_f64(x).unwrap();
            assert_eq!(a.to_f64(), x);
        }
        let neg = DyadicAngle::from_f64(-0.25).unwrap();
        assert_eq!(neg, d(3, 2));
        assert!(DyadicAngle::from_f64(f64::NAN).is_err());
        assert!(DyadicAngle::from_f64(3.0).unwrap().is_zero());
    }

    #[test]
    fn hex_roundtrip() {
        let a = d(77_309_411_329, 37);
        assert_eq!(a.to_hex(), "0x1200000001p-37");
        assert_eq!(DyadicAngle::parse_hex("0x1200000001p-37").unwrap(), a);
        assert_eq!("0.5".parse::<DyadicAngle>().unwrap(), d(1, 1));
        assert!(DyadicAngle::parse_hex("12p-3").is_err());
    }

    #[test]
    fn ordering_and_power_comparisons() {
        assert!(d(1, 3) < d(1, 2));
        assert!(d(3, 3) > d(1, 2));
        assert!(DyadicAngle::zero() < d(1, 100));
        assert!(d(1, 3).lt_pow2_neg(2));
        assert!(!d(1, 2).lt_pow2_neg(2));
        assert!(!d(3, 3).lt_pow2_neg(2));
    }

    #[test]
    fn rounding_to_fixed_precision() {
        assert_eq!(d(3, 3).round_to_bits(2), d(1, 1)); // 0.375 -> tie -> 0.5 (even)
        assert_eq!(d(1, 3).round_to_bits(2), DyadicAngle::zero()); // 0.125 -> tie -> 0
        assert_eq!(d(7, 4).round_to_bits(2), d(1, 1)); // 0.4375 -> 0.5
        assert_eq!(d(31, 5).round_to_bits(2), DyadicAngle::zero()); // wraps past 1
    }

    #[test]
    fn centered_representative() {
        assert_eq!(d(3, 2).to_centered_f64(), -0.25);
        assert_eq!(d(1, 2).to_centered_f64(), 0.25);
        assert_eq!(d(1, 1).to_centered_f64(), -0.5);
    }
}
