use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::angle::DyadicAngle;

/// A real number given as a multiple of `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultipleOfAlpha {
    /// `2^{-n} k α`
    Dyadic { n: u32, k: i64 },
    /// `(p / q) α`
    Rational { p: i64, q: i64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaModReport {
    pub j: Vec<u32>,
    /// `dist(2^j y, αZ)` measured on the real line.
    pub distances: Vec<f64>,
    pub exact_zero: Vec<bool>,
    pub min_distance: f64,
    pub max_distance: f64,
    pub alpha: f64,
}

fn alpha_rational(alpha: &DyadicAngle) -> BigRational {
    let den = BigInt::from(BigUint::from(1u32) << alpha.exponent());
    BigRational::new(BigInt::from(alpha.numerator().clone()), den)
}

/// Exact distance from `x` to the lattice `α Z` in the reals.
fn dist_to_lattice(x: &BigRational, alpha: &BigRational) -> BigRational {
    let q = x / alpha;
    let nearest = q.round();
    (x - nearest * alpha).abs()
}

/// Tabulates `dist(2^j y, αZ)` for `j` in `range`.
pub fn lemma_mod_check(
    y: &MultipleOfAlpha,
    alpha: &DyadicAngle,
    range: std::ops::RangeInclusive<u32>,
) -> LemmaModReport {
    let a = alpha_rational(alpha);
    let y = match *y {
        MultipleOfAlpha::Dyadic { n, k } => {
            BigRational::new(BigInt::from(k), BigInt::from(1u32) << n) * &a
        }
        MultipleOfAlpha::Rational { p, q } => {
            BigRational::new(BigInt::from(p), BigInt::from(q)) * &a
        }
    };
    let mut report = LemmaModReport {
        j: Vec::new(),
        distances: Vec::new(),
        exact_zero: Vec::new(),
        min_distance: f64::INFINITY,
        max_distance: 0.0,
        alpha: alpha.to_f64(),
    };
    for j in range {
        let x = &y * BigRational::from_integer(BigInt::from(1u32) << j);
        let d = dist_to_lattice(&x, &a);
        let df = d.to_f64().unwrap_or(f64::NAN);
        report.j.push(j);
        report.exact_zero.push(d.is_zero());
        report.distances.push(df);
        report.min_distance = report.min_distance.min(df);
        report.max_distance = report.max_distance.max(df);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha3() -> DyadicAngle {
        DyadicAngle::parse_hex("0x1200000001p-37").unwrap()
    }

    #[test]
    fn dyadic_multiple_lands_on_lattice() {
        let r = lemma_mod_check(&MultipleOfAlpha::Dyadic { n: 2, k: 3 }, &alpha3(), 2..=10);
        assert!(r.exact_zero.iter().all(|&z| z));
        let r = lemma_mod_check(&MultipleOfAlpha::Dyadic { n: 2, k: 3 }, &alpha3(), 0..=1);
        assert!(r.exact_zero.iter().all(|&z| !z));
    }

    #[test]
    fn third_of_alpha_stays_away() {
        let r = lemma_mod_check(&MultipleOfAlpha::Rational { p: 1, q: 3 }, &alpha3(), 1..=40);
        assert!(r.min_distance > r.alpha / 4.0);
        let third = r.alpha / 3.0;
        assert!(r.distances.iter().all(|d| (d - third).abs() < 1e-15));
    }

    #[test]
    fn alpha_itself() {
        let r = lemma_mod_check(&MultipleOfAlpha::Rational { p: 1, q: 1 }, &alpha3(), 0..=0);
        assert!(r.exact_zero[0]);
    }
}
