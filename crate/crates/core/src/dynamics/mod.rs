//! The skew product `T(θ1, θ2) = (θ1 + α, θ2 + h(θ1))` on the 2-torus.

mod count;
mod density;
mod steer;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dyadic::{alpha_split, v, Budget, DyadicAngle, SplitAngle};
use crate::error::Result;
use crate::numeric::{chord, Compensated};
use crate::series;

pub use count::IterCount;
pub use density::{
    density_certificate, verify_certificate, Block, DensityCertificate, DensityOptions, Verification,
};
pub use steer::{m_s, r_recursion, steer_block, LemmaIntConstants, RRecursion, SteerResult};

/// Default number of fractional bits kept for the second coordinate.
pub const DEFAULT_PRECISION_BITS: u64 = 128;

/// A point `(e^{2πiθ1}, e^{2πiθ2})`; the first angle is exact, the second is
/// kept to a fixed number of bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TorusPoint {
    pub theta1: SplitAngle,
    pub theta2: DyadicAngle,
}

impl TorusPoint {
    pub fn new(theta1: impl Into<SplitAngle>, theta2: DyadicAngle) -> Self {
        TorusPoint {
            theta1: theta1.into(),
            theta2,
        }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_f64(t1: f64, t2: f64) -> Result<Self> {
        Ok(TorusPoint::new(DyadicAngle::from_f64(t1)?, DyadicAngle::from_f64(t2)?))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.theta1.to_f64(), self.theta2.to_f64())
    }

    /// Euclidean distance in `C^2` between the two points of `S^1 x S^1`.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        let d1 = chord(self.theta1.to_centered_f64(), other.theta1.to_centered_f64());
        let d2 = chord(self.theta2.to_centered_f64(), other.theta2.to_centered_f64());
        d1.hypot(d2)
    }
}

/// `T_α` with the series cut at `K`.
#[derive(Debug, Clone)]
pub struct Furstenberg {
    k: usize,
    alpha: SplitAngle,
    alpha_phases: Vec<SplitAngle>,
    precision_bits: u64,
    budget: Budget,
}

impl Furstenberg {
    /// The map for the standard `α`.
    pub fn new(k: usize) -> Result<Self> {
        Self::with_alpha(k, series::reference_alpha().clone())
    }

    /// A member of the commuting family sharing the frequencies `n_k` but using another `α`.
    pub fn with_alpha(k: usize, alpha: SplitAngle) -> Result<Self> {
        series::check_cutoff(k)?;
        let budget = Budget::default();
        let alpha_phases = (1..=k)
            .map(|j| alpha.mul_pow2(v(j), &budget))
            .collect::<Result<Vec<_>>>()?;
        Ok(Furstenberg {
            k,
            alpha,
            alpha_phases,
            precision_bits: DEFAULT_PRECISION_BITS,
            budget,
        })
    }

    pub fn with_precision(mut self, bits: u64) -> Self {
        self.precision_bits = bits;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &SplitAngle {
        &self.alpha
    }

    pub fn precision_bits(&self) -> u64 {
        self.precision_bits
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// `h_K(θ1)` as the literal sum of the `2K` complex terms (real part).
    pub fn h(&self, theta1: &SplitAngle) -> Result<f64> {
        let p = series::phases(theta1, self.k)?;
        let mut sum = crate::numeric::ComplexSum::default();
        for (j, pj) in p.iter().enumerate() {
            let c = 1.0 / (j + 1) as f64;
            let x = pj.to_centered_f64();
            let a = self.alpha_phases[j].to_centered_f64();
            for s in [1.0, -1.0] {
                sum.add(crate::numeric::cis_turns_m1(s * a) * crate::numeric::cis_turns(s * x) * c);
            }
        }
        Ok(sum.value().re)
    }

    fn bump(&self, theta2: &DyadicAngle, inc: f64) -> Result<DyadicAngle> {
        Ok(theta2
            .add_mod1(&DyadicAngle::from_f64(inc)?)
            .round_to_bits(self.precision_bits))
    }

    pub fn step(&self, p: &TorusPoint) -> Result<TorusPoint> {
        let inc = self.h(&p.theta1)?;
        Ok(TorusPoint {
            theta1: p.theta1.add(&self.alpha, &self.budget)?,
            theta2: self.bump(&p.theta2, inc)?,
        })
    }

    pub fn iterate_steps(&self, p: &TorusPoint, n: u64) -> Result<TorusPoint> {
        let mut q = p.clone();
        for _ in 0..n {
            q = self.step(&q)?;
        }
        Ok(q)
    }

    /// `n α mod 1`, exact.
    pub fn rotation(&self, n: &IterCount) -> Result<SplitAngle> {
        n.times_angle(&self.alpha, &self.budget)
    }

    /// `S_n(θ1) = Σ_k (1/|k|) e^{2πi n_k θ1}(e^{2πi n_k n α} - 1)`, real by pairing.
    ///
    /// Each pair is evaluated as `(2/k)(cos 2π(φ+ψ) - cos 2πφ) = -(4/k) sin 2π(φ + ψ/2) sin πψ`
    /// with `φ = n_k θ1` and `ψ = n_k n α` exact dyadics.
    pub fn birkhoff_sum(&self, theta1: &SplitAngle, n: &IterCount) -> Result<f64> {
        let na = self.rotation(n)?;
        self.birkhoff_sum_from_rotation(theta1, &na)
    }

    fn birkhoff_sum_from_rotation(&self, theta1: &SplitAngle, na: &SplitAngle) -> Result<f64> {
        let mut sum = Compensated::default();
        for j in 1..=self.k {
            let phi = theta1.mul_pow2(v(j), &self.budget)?;
            let psi = na.mul_pow2(v(j), &self.budget)?;
            let psi_c = psi.to_centered_f64();
            // φ + ψ_c/2 where ψ_c is the centered representative of ψ
            let half = half_centered(&psi, &self.budget)?;
            let mid = phi.add(&half, &self.budget)?.to_centered_f64();
            sum.add(-(4.0 / j as f64) * (2.0 * PI * mid).sin() * (PI * psi_c).sin());
        }
        Ok(sum.value())
    }

    /// `T^n(p)` through the closed form; `n` may be astronomically large.
    pub fn iterate_closed(&self, p: &TorusPoint, n: &IterCount) -> Result<TorusPoint> {
        if n.is_zero() {
            return Ok(p.clone());
        }
        let na = self.rotation(n)?;
        let s = self.birkhoff_sum_from_rotation(&p.theta1, &na)?;
        Ok(TorusPoint {
            theta1: p.theta1.add(&na, &self.budget)?,
            theta2: self.bump(&p.theta2, s)?,
        })
    }

    pub fn iterate_closed_u64(&self, p: &TorusPoint, n: u64) -> Result<TorusPoint> {
        self.iterate_closed(p, &IterCount::from_u64(n))
    }
}

/// `ψ_c / 2` where `ψ_c ∈ [-1/2, 1/2)` represents `ψ`, as an angle mod 1.
fn half_centered(psi: &SplitAngle, budget: &Budget) -> Result<SplitAngle> {
    let head = psi.head();
    let upper = !head.is_zero() && head.numerator().bits() == head.exponent();
    let half_head = DyadicAngle::from_parts(head.numerator().clone(), head.exponent() + 1);
    let mut out = SplitAngle::from_dense(half_head);
    if upper {
        // (ψ - 1)/2 = ψ/2 + 1/2 mod 1
        out = out.add_dense(&DyadicAngle::pow2_neg(1));
    }
    if let Some(f) = psi.far() {
        out = out.add(&SplitAngle::new(DyadicAngle::zero(), f.coeff.clone(), f.exp + 1, budget)?, budget)?;
    }
    Ok(out)
}

/// `α` cut at `k_max` terms, for experiments with shorter frequencies.
pub fn alpha_model(k_max: usize) -> Result<SplitAngle> {
    alpha_split(k_max, &Budget::default())
}
