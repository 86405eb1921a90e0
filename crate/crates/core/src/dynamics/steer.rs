use std::f64::consts::PI;

use serde::Serialize;

use super::{Furstenberg, IterCount, TorusPoint};
use crate::dyadic::{v, Budget, DyadicAngle, SplitAngle, MAX_INDEX};
use crate::error::{Error, Result};
use crate::numeric::{cis_turns, cis_turns_m1, ComplexSum};

/// The constants `a < b`, `c` and `N` of the steering estimate.
///
/// Only their approximate sizes are known (`a ≈ 1 - cos π/8`, `b ≈ 3(1 - cos π/8)`);
/// the slack factors 0.9 and 3.1 absorb the error terms at `s = 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaIntConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub n: usize,
}

impl Default for LemmaIntConstants {
    fn default() -> Self {
        let base = 1.0 - (PI / 8.0).cos();
        LemmaIntConstants {
            a: 0.9 * base,
            b: 3.1 * base,
            c: 1.0 / 64.0,
            n: 2,
        }
    }
}

/// `m_s = n_{s+1} / (2^4 n_s) = 2^{v_{s+1} - v_s - 4}`, an integer for `s >= 2`.
pub fn m_s(s: usize) -> Result<IterCount> {
    if s < 2 {
        return Err(Error::Precondition(format!(
            "m_{s} is not an integer; steering starts at s = 2"
        )));
    }
    if s + 1 > MAX_INDEX {
        return Err(Error::InvalidArgument(format!(
            "m_{s} needs v_{} which is not representable",
            s + 1
        )));
    }
    Ok(IterCount::pow2(v(s + 1) - v(s) - 4))
}

#[derive(Debug, Clone, Serialize)]
pub struct SteerResult {
    pub s: usize,
    pub block: IterCount,
    pub point: TorusPoint,
    /// Realized second-coordinate increment `Re S_{m_s}(θ1)`.
    pub u: f64,
    /// `Im S_{m_s}(θ1)` from the literal complex sum; zero up to rounding.
    pub u_im: f64,
    /// `n_s θ1` as a centered real: the `r` of `θ1 = r / n_s`.
    pub r: f64,
    pub r_small: bool,
    pub lower: f64,
    pub upper: f64,
    pub in_interval: bool,
    /// First-coordinate move `m_s α mod 1`.
    pub drift: SplitAngle,
    pub drift_f64: f64,
    /// The drift is claimed below `2^{-drift_bound_neg_log2}`.
    pub drift_bound_neg_log2: u64,
    pub drift_ok: bool,
    pub constants: LemmaIntConstants,
}

/// One steering block `T^{m_s}` applied through the closed form.
pub fn steer_block(sys: &Furstenberg, p: &TorusPoint, s: usize) -> Result<SteerResult> {
    if s > sys.k() {
        return Err(Error::InvalidArgument(format!(
            "steering level s = {s} needs series cutoff K >= s, have K = {}",
            sys.k()
        )));
    }
    let block = m_s(s)?;
    let b = sys.budget();
    let drift = sys.rotation(&block)?;
    let point = sys.iterate_closed(p, &block)?;
    let u = sys.birkhoff_sum(&p.theta1, &block)?;

    let mut literal = ComplexSum::default();
    for j in 1..=sys.k() {
        let phi = p.theta1.mul_pow2(v(j), b)?.to_centered_f64();
        let psi = drift.mul_pow2(v(j), b)?.to_centered_f64();
        for sg in [1.0, -1.0] {
            literal.add(cis_turns(sg * phi) * cis_turns_m1(sg * psi) / j as f64);
        }
    }
    let r = p.theta1.mul_pow2(v(s), b)?.to_centered_f64();
    let constants = LemmaIntConstants::default();
    let lower = -constants.b / s as f64;
    let upper = -constants.a / s as f64;
    let bound = v(s) + 3;
    Ok(SteerResult {
        s,
        block,
        u,
        u_im: literal.value().im,
        r,
        r_small: r.abs() < constants.c,
        lower,
        upper,
        in_interval: (lower..=upper).contains(&u),
        drift_f64: drift.to_centered_f64(),
        drift_ok: drift.lt_pow2_neg(bound),
        drift_bound_neg_log2: bound,
        drift,
        point,
        constants,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RRecursion {
    pub s: usize,
    pub j: usize,
    /// `ν_j` from the explicit sum over `l` and `t`.
    pub nu_formula: SplitAngle,
    /// `ν_j` from composing the blocks `T^{m_s}, ..., T^{m_{s+j-1}}` on the first coordinate.
    pub nu_direct: SplitAngle,
    pub nu: f64,
    /// `r^{(j)} = r n_{s+j}/n_s + ν_j mod 1`.
    pub r_j: SplitAngle,
    /// `j 2^{-j} 2^{-s}`.
    pub bound: f64,
    pub within_bound: bool,
}

/// The drift `ν_j` of `r^{(j)}` after `j` consecutive steering blocks from level `s`.
pub fn r_recursion(r: &DyadicAngle, s: usize, j: usize, k: usize) -> Result<RRecursion> {
    if s < 2 {
        return Err(Error::Precondition("r recursion starts at s = 2".into()));
    }
    if s + j > k {
        return Err(Error::InvalidArgument(format!(
            "r recursion needs s + j <= K, got s = {s}, j = {j}, K = {k}"
        )));
    }
    let b = Budget::default();
    let top = s + j;

    let mut nu_formula = SplitAngle::zero();
    for l in 1..=j {
        let m_exp = (v(s + l) - v(s + l - 1) - 4) as i128;
        for t in s + l..=MAX_INDEX {
            let e = m_exp + v(top) as i128 - v(t) as i128;
            if e < 0 {
                nu_formula = nu_formula.add(&SplitAngle::pow2_neg((-e) as u64, &b)?, &b)?;
            }
        }
    }

    let alpha = crate::series::reference_alpha();
    let mut drift = SplitAngle::zero();
    for l in 1..=j {
        drift = drift.add(&m_s(s + l - 1)?.times_angle(alpha, &b)?, &b)?;
    }
    let nu_direct = drift.mul_pow2(v(top), &b)?;

    let scaled_r = SplitAngle::from_dense(r.mul_pow2_mod1(v(top) - v(s)));
    let r_j = scaled_r.add(&nu_direct, &b)?;
    let nu = nu_direct.to_centered_f64();
    let bound = j as f64 * (-(j as f64) - s as f64).exp2();
    Ok(RRecursion {
        s,
        j,
        within_bound: nu.abs() <= bound,
        nu,
        nu_formula,
        nu_direct,
        r_j,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_lengths() {
        assert_eq!(m_s(2).unwrap().to_u64(), Some(1 << 29));
        assert_eq!(m_s(3).unwrap(), IterCount::pow2(412_316_860_413));
        assert!(m_s(1).is_err());
        assert!(m_s(4).is_err());
    }

    #[test]
    fn s2_block_from_origin() {
        let sys = Furstenberg::new(3).unwrap();
        let r = steer_block(&sys, &TorusPoint::origin(), 2).unwrap();
        let expect = 2.0 * ((PI / 64.0).cos() - 1.0) + ((PI / 8.0).cos() - 1.0);
        assert!((r.u - expect).abs() < 1e-12, "{} vs {}", r.u, expect);
        assert!((r.u + 0.078_529_6).abs() < 1e-5);
        assert!(r.in_interval && r.drift_ok && r.r_small);
        assert!(r.u_im.abs() < 1e-12);
        assert!((r.drift_f64 - 2f64.powi(-8)).abs() < 1e-18);
    }

    #[test]
    fn s3_block_uses_the_far_term() {
        let sys = Furstenberg::new(3).unwrap();
        let r = steer_block(&sys, &TorusPoint::origin(), 3).unwrap();
        assert_eq!(r.drift, SplitAngle::from_dense(DyadicAngle::pow2_neg(41)));
        let expect = (2.0 / 3.0) * ((PI / 8.0).cos() - 1.0);
        assert!((r.u - expect).abs() < 1e-9);
        assert!(r.in_interval);
    }

    #[test]
    fn steering_needs_cutoff() {
        let sys = Furstenberg::new(2).unwrap();
        assert!(steer_block(&sys, &TorusPoint::origin(), 3).is_err());
        assert!(steer_block(&sys, &TorusPoint::origin(), 1).is_err());
    }

    #[test]
    fn recursion_routes_agree() {
        let zero = DyadicAngle::zero();
        let r = r_recursion(&zero, 2, 1, 3).unwrap();
        assert_eq!(r.nu_formula, r.nu_direct);
        assert!(r.within_bound && r.nu.abs() < 0.25);
        let r0 = r_recursion(&zero, 2, 0, 3).unwrap();
        assert!(r0.nu_direct.is_zero() && r0.nu_formula.is_zero());
        assert!(r_recursion(&zero, 2, 2, 3).is_err());
    }
}
