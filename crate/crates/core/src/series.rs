//! The lacunary series `h`, `g = e^{2πih}`, `H` and `R = e^{2πiH}` cut at `|k| <= K`.
//!
//! All frequencies are `±n_k = ±2^{v_k}`, so every phase `n_k θ mod 1` is an
//! exact shift of a dyadic angle; only the final trigonometric evaluation is
//! floating point. The `α` phases `n_k α mod 1` come from the four-term `α`
//! (its last term kept symbolically), which is exact for every quantity at
//! `K <= 3`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::{alpha_split, v, Budget, SplitAngle};
use crate::error::{Error, Result};
use crate::numeric::{cis_turns, cis_turns_m1, ComplexSum};

/// Largest supported cutoff; `v_4`-frequency terms are always dropped.
pub const MAX_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "h_plus")]
    HPlus,
    #[serde(rename = "h_minus")]
    HMinus,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "H")]
    BigH,
    #[serde(rename = "R")]
    R,
}

impl std::str::FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "h" => SeriesKind::H,
            "h_plus" | "h+" => SeriesKind::HPlus,
            "h_minus" | "h-" => SeriesKind::HMinus,
            "g" => SeriesKind::G,
            "H" => SeriesKind::BigH,
            "R" => SeriesKind::R,
            _ => return Err(Error::Parse(format!("unknown series kind {s:?}"))),
        })
    }
}

/// One frequency `sign(k) 2^{v_|k|}` with coefficient `1/|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LacunaryTerm {
    pub k: i64,
    pub coeff: f64,
    pub freq_exponent: u64,
}

impl LacunaryTerm {
    pub fn new(k: i64) -> Self {
        assert!(k != 0 && k.unsigned_abs() as usize <= MAX_K + 1);
        LacunaryTerm {
            k,
            coeff: 1.0 / k.unsigned_abs() as f64,
            freq_exponent: v(k.unsigned_abs() as usize),
        }
    }
}

/// `scale * 2^{-(mult * 2^pow)}`, a bound too small for a double when `pow` is large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub scale: f64,
    pub mult: u64,
    pub pow: u64,
}

impl TailBound {
    /// `log2` of the bound.
    pub fn log2(&self) -> f64 {
        self.scale.log2() - self.mult as f64 * (self.pow as f64).exp2()
    }

    /// The bound as a double; underflows to zero for every `K >= 2`.
    pub fn to_f64(&self) -> f64 {
        let l = self.log2();
        if l < -1074.0 {
            0.0
        } else {
            l.exp2()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    pub kind: SeriesKind,
    pub k_cutoff: usize,
    pub value_re: f64,
    pub value_im: f64,
    /// Absent for the formal truncations of `H` and `R`.
    pub tail_bound: Option<TailBound>,
    pub dropped_terms: String,
}

impl SeriesValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

pub fn check_cutoff(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("series cutoff K must be at least 1".into()));
    }
    if k > MAX_K {
        return Err(Error::InvalidArgument(format!(
            "series cutoff K = {k} exceeds the supported maximum {MAX_K}"
        )));
    }
    Ok(())
}

pub fn terms(k: usize) -> Result<Vec<LacunaryTerm>> {
    check_cutoff(k)?;
    Ok((1..=k as i64)
        .flat_map(|j| [LacunaryTerm::new(j), LacunaryTerm::new(-j)])
        .collect())
}

fn dropped(k: usize) -> String {
    format!("|k| >= {}", k + 1)
}

/// `n_k α mod 1` for `k = 1..=3`, from the four-term `α`.
pub fn alpha_phases() -> &'static [SplitAngle] {
    static PHASES: OnceLock<Vec<SplitAngle>> = OnceLock::new();
    PHASES.get_or_init(|| {
        let b = Budget::default();
        let a = alpha_split(4, &b).expect("four-term alpha fits the default budget");
        (1..=MAX_K)
            .map(|k| a.mul_pow2(v(k), &b).expect("shift of alpha"))
            .collect()
    })
}

/// The frequency `α` the phases are taken from.
pub fn reference_alpha() -> &'static SplitAngle {
    static ALPHA: OnceLock<SplitAngle> = OnceLock::new();
    ALPHA.get_or_init(|| alpha_split(4, &Budget::default()).expect("four-term alpha"))
}

/// `n_k θ mod 1` for `k = 1..=K`, exact.
pub fn phases(theta: &SplitAngle, k: usize) -> Result<Vec<SplitAngle>> {
    check_cutoff(k)?;
    let b = Budget::default();
    (1..=k).map(|j| theta.mul_pow2(v(j), &b)).collect()
}

fn h_terms(theta: &SplitAngle, k: usize, signs: &[f64]) -> Result<Complex64> {
    let p = phases(theta, k)?;
    let a = alpha_phases();
    let mut sum = ComplexSum::default();
    for j in 0..k {
        let pj = p[j].to_centered_f64();
        let aj = a[j].to_centered_f64();
        let c = 1.0 / (j + 1) as f64;
        for &s in signs {
            sum.add(cis_turns_m1(s * aj) * cis_turns(s * pj) * c);
        }
    }
    Ok(sum.value())
}

/// `h_K(θ) = Σ_{0<|k|<=K} (1/|k|)(e^{2πi n_k α} - 1) e^{2πi n_k θ}`.
pub fn eval_h(theta: &SplitAngle, k: usize) -> Result<SeriesValue> {
    let z = h_terms(theta, k, &[1.0, -1.0])?;
    Ok(SeriesValue {
        kind: SeriesKind::H,
        k_cutoff: k,
        value_re: z.re,
        value_im: z.im,
        tail_bound: Some(h_tail(k)),
        dropped_terms: dropped(k),
    })
}

/// Bound on `Σ_{|k|>K}` of the `h` terms on the unit circle.
///
/// `|e^{2πi n_k α} - 1| <= 2π frac(n_k α) < 2π 2^{-k n_k - 1}`, so the first
/// dropped pair uses at most half of `(2/(K+1)) 2π 2^{-(K+1) n_{K+1}}` and the
/// rest are smaller by a doubly exponential factor.
pub fn h_tail(k: usize) -> TailBound {
    TailBound {
        scale: 2.0 * 2.0 * PI / (k + 1) as f64,
        mult: (k + 1) as u64,
        pow: v(k + 1),
    }
}

/// `h_+` (positive `k`) or `h_-` (negative `k`) on the unit circle.
pub fn eval_h_half(theta: &SplitAngle, k: usize, positive: bool) -> Result<SeriesValue> {
    let sign = if positive { 1.0 } else { -1.0 };
    let z = h_terms(theta, k, &[sign])?;
    let mut tail = h_tail(k);
    tail.scale /= 2.0;
    Ok(SeriesValue {
        kind: if positive { SeriesKind::HPlus } else { SeriesKind::HMinus },
        k_cutoff: k,
        value_re: z.re,
        value_im: z.im,
        tail_bound: Some(tail),
        dropped_terms: dropped(k),
    })
}

/// `g_K(θ) = e^{2πi h_K(θ)}` with `h_K` taken real.
pub fn eval_g(theta: &SplitAngle, k: usize) -> Result<SeriesValue> {
    let h = eval_h(theta, k)?;
    let z = cis_turns(h.value_re);
    let mut tail = h_tail(k);
    tail.scale *= 2.0 * PI;
    Ok(SeriesValue {
        kind: SeriesKind::G,
        k_cutoff: k,
        value_re: z.re,
        value_im: z.im,
        tail_bound: Some(tail),
        dropped_terms: dropped(k),
    })
}

/// Formal truncation `H_K(θ) = Σ_{0<|k|<=K} (1/|k|) e^{2πi n_k θ}`; no tail bound exists.
pub fn eval_big_h_trunc(theta: &SplitAngle, k: usize) -> Result<SeriesValue> {
    let p = phases(theta, k)?;
    let mut sum = ComplexSum::default();
    for (j, pj) in p.iter().enumerate() {
        let x = pj.to_centered_f64();
        let c = 1.0 / (j + 1) as f64;
        sum.add(cis_turns(x) * c);
        sum.add(cis_turns(-x) * c);
    }
    let z = sum.value();
    Ok(SeriesValue {
        kind: SeriesKind::BigH,
        k_cutoff: k,
        value_re: z.re,
        value_im: z.im,
        tail_bound: None,
        dropped_terms: dropped(k),
    })
}

/// `R_K(θ) = e^{2πi H_K(θ)}`, formal.
pub fn eval_r_trunc(theta: &SplitAngle, k: usize) -> Result<SeriesValue> {
    let h = eval_big_h_trunc(theta, k)?;
    let z = cis_turns(h.value_re);
    Ok(SeriesValue {
        kind: SeriesKind::R,
        k_cutoff: k,
        value_re: z.re,
        value_im: z.im,
        tail_bound: None,
        dropped_terms: dropped(k),
    })
}

pub fn eval(kind: SeriesKind, theta: &SplitAngle, k: usize) -> Result<SeriesValue> {
    match kind {
        SeriesKind::H => eval_h(theta, k),
        SeriesKind::HPlus => eval_h_half(theta, k, true),
        SeriesKind::HMinus => eval_h_half(theta, k, false),
        SeriesKind::G => eval_g(theta, k),
        SeriesKind::BigH => eval_big_h_trunc(theta, k),
        SeriesKind::R => eval_r_trunc(theta, k),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermResidual {
    pub k: i64,
    pub residual: f64,
    /// `(1/|k|) 2π n_k (α - α_cut) mod 1`, the size the residual should have.
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleResidual {
    pub alpha_cutoff: usize,
    pub terms: Vec<TermResidual>,
    pub total: f64,
}

/// Per-term check of `h(θ) = H(θ + α') - H(θ)` where `α'` is `α` cut at `alpha_cutoff`.
pub fn cocycle_residual(
    theta: &SplitAngle,
    k: usize,
    alpha_cutoff: usize,
) -> Result<CocycleResidual> {
    check_cutoff(k)?;
    let b = Budget::default();
    let shift = alpha_split(alpha_cutoff, &b)?;
    let shifted = theta.add(&shift, &b)?;
    let p0 = phases(theta, k)?;
    let p1 = phases(&shifted, k)?;
    let a = alpha_phases();
    // α - α' is the sum of the omitted terms
    let mut gap = SplitAngle::zero();
    for l in alpha_cutoff + 1..=crate::dyadic::MAX_INDEX {
        gap = gap.add(&SplitAngle::pow2_neg(v(l), &b)?, &b)?;
    }
    let mut out = Vec::with_capacity(2 * k);
    for j in 0..k {
        let c = 1.0 / (j + 1) as f64;
        let predicted_phase = gap.mul_pow2(v(j + 1), &b)?.to_centered_f64();
        for s in [1.0, -1.0] {
            let x0 = s * p0[j].to_centered_f64();
            let x1 = s * p1[j].to_centered_f64();
            let mut sum = ComplexSum::default();
            sum.add(cis_turns(x1) * c);
            sum.add(-cis_turns(x0) * c);
            sum.add(-(cis_turns_m1(s * a[j].to_centered_f64()) * cis_turns(x0) * c));
            out.push(TermResidual {
                k: s as i64 * (j + 1) as i64,
                residual: sum.value().norm(),
                predicted: c * 2.0 * (PI * predicted_phase).sin().abs(),
            });
        }
    }
    let total = out.iter().map(|t| t.residual).fold(0.0, f64::max);
    Ok(CocycleResidual {
        alpha_cutoff,
        terms: out,
        total,
    })
}

/// `log2 |x|` of a (possibly far) angle taken as a centered real.
fn log2_abs(a: &SplitAngle) -> f64 {
    let x = a.to_centered_f64().abs();
    if x > 0.0 {
        return x.log2();
    }
    match a.far() {
        Some(f) if a.head().is_zero() => f.coeff.bits() as f64 - f.exp as f64,
        _ => f64::NEG_INFINITY,
    }
}

/// Gap between consecutive partial sums of `h_+` on `|ζ| = r`, in `log2`.
#[derive(Debug, Clone, Serialize)]
pub struct HolomorphyGap {
    pub k: usize,
    pub radius: f64,
    /// Upper estimate of `log2 |term_k|` on `|ζ| = r`.
    pub log2_gap: f64,
    /// `log2 (2π (r/2^k)^{n_k})`.
    pub log2_bound: f64,
}

impl HolomorphyGap {
    pub fn holds(&self) -> bool {
        self.log2_gap <= self.log2_bound
    }
}

/// Compares `|h_+^{(k)} - h_+^{(k-1)}|` with the Abel-type bound `2π (r/2^k)^{n_k}` for `k = 1..=K`.
pub fn holomorphy_gaps(radius: f64, k: usize) -> Result<Vec<HolomorphyGap>> {
    check_cutoff(k)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let a = alpha_phases();
    let lr = radius.log2();
    Ok((1..=k)
        .map(|j| {
            let n = (v(j) as f64).exp2();
            // |e^{2πia} - 1| = 2|sin πa| <= 2π|a|
            let x = a[j - 1].to_centered_f64().abs();
            let log2_mod = if x > 1e-300 {
                (2.0 * (PI * x).sin()).log2()
            } else {
                (2.0 * PI).log2() + log2_abs(&a[j - 1])
            };
            HolomorphyGap {
                k: j,
                radius,
                log2_gap: log2_mod - (j as f64).log2() + n * lr,
                log2_bound: (2.0 * PI).log2() + n * (lr - j as f64),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicAngle;

    fn t(x: &str) -> SplitAngle {
        x.parse().unwrap()
    }

    #[test]
    fn h_at_zero_k1() {
        let h = eval_h(&SplitAngle::zero(), 1).unwrap();
        let a = 0.125 + (-36f64).exp2();
        let expect = 2.0 * ((2.0 * PI * a).cos() - 1.0);
        assert!((h.value_re - expect).abs() < 1e-15);
        assert!((h.value_re + 0.585_786_437_756).abs() < 1e-11);
        assert!(h.value_im.abs() < 1e-15);
    }

    #[test]
    fn cutoff_errors() {
        assert!(eval_h(&SplitAngle::zero(), 0).is_err());
        assert!(eval_h(&SplitAngle::zero(), 4).is_err());
    }

    #[test]
    fn tail_bounds() {
        let t2 = h_tail(2);
        assert_eq!((t2.mult, t2.pow), (3, 37));
        assert_eq!(t2.to_f64(), 0.0);
        let t1 = h_tail(1);
        assert!(t1.to_f64() < 1e-8);
    }

    #[test]
    fn big_h_values() {
        let h = eval_big_h_trunc(&SplitAngle::zero(), 2).unwrap();
        assert!((h.value_re - 3.0).abs() < 1e-15);
        let h = eval_big_h_trunc(&t("0.25"), 1).unwrap();
        assert!((h.value_re + 2.0).abs() < 1e-15);
        assert!(h.value_im.abs() < 1e-15);
        let r = eval_r_trunc(&t("0.25"), 1).unwrap();
        assert!((r.value() - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn g_has_unit_modulus() {
        let g = eval_g(&t("0x2bp-7"), 3).unwrap();
        assert!((g.value().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn residual_prediction_tracks_alpha_cut() {
        let r = cocycle_residual(&t("0x13p-9"), 2, 2).unwrap();
        for term in &r.terms {
            if term.predicted > 1e-13 {
                let ratio = term.residual / term.predicted;
                assert!((0.5..2.0).contains(&ratio), "{term:?}");
            }
        }
        let r = cocycle_residual(&t("0x13p-9"), 2, 3).unwrap();
        assert!(r.total < 1e-12);
        let zero = DyadicAngle::zero();
        assert!(cocycle_residual(&zero.into(), 3, 4).unwrap().total < 1e-14);
    }

    #[test]
    fn holomorphy_bounds_hold() {
        for r in [0.5, 1.0, 2.0] {
            for g in holomorphy_gaps(r, 3).unwrap() {
                assert!(g.holds(), "{g:?}");
            }
        }
    }
}
