use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::v;
use crate::error::{Error, Result};
use crate::numeric::cis_turns;
use crate::series;

const TWO64: f64 = 18_446_744_073_709_551_616.0;

/// A torus point with both angles in 64-bit fixed point, `θ = t / 2^64`.
///
/// This is the workhorse of the sampling code: rotations by a 64-bit angle are
/// exact, and `n_k θ1 mod 1` is a plain left shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Point64 {
    pub t1: u64,
    pub t2: u64,
}

impl Point64 {
    pub fn new(t1: u64, t2: u64) -> Self {
        Point64 { t1, t2 }
    }

    pub fn from_f64(theta1: f64, theta2: f64) -> Self {
        Point64 {
            t1: turns_to_fixed(theta1),
            t2: turns_to_fixed(theta2),
        }
    }

    pub fn theta1(&self) -> f64 {
        fixed_to_turns(self.t1)
    }

    pub fn theta2(&self) -> f64 {
        fixed_to_turns(self.t2)
    }
}

/// `x mod 1` in 64-bit fixed point.
pub fn turns_to_fixed(x: f64) -> u64 {
    let f = x - x.floor();
    ((f * TWO64) as i128) as u64
}

pub fn fixed_to_turns(t: u64) -> f64 {
    t as f64 / TWO64
}

/// `n_k θ mod 1` for a fixed-point angle.
pub fn phase64(t: u64, k: usize) -> f64 {
    let s = v(k);
    if s >= 64 {
        0.0
    } else {
        fixed_to_turns(t << s)
    }
}

/// `H_K(θ1) = Σ_{k<=K} (2/k) cos 2π n_k θ1`.
pub fn big_h64(t1: u64, k: usize) -> f64 {
    (1..=k)
        .map(|j| (2.0 / j as f64) * (2.0 * PI * phase64(t1, j)).cos())
        .sum()
}

/// `arg f_K / 2π` for `f_K = R_K(ζ1) / ζ2`, in turns.
pub fn f_angle64(p: Point64, k: usize) -> f64 {
    big_h64(p.t1, k) - p.theta2()
}

pub fn f_trunc64(p: Point64, k: usize) -> Complex64 {
    cis_turns(f_angle64(p, k))
}

/// The Furstenberg map on fixed-point angles.
///
/// The rotation uses `α` truncated to 64 bits (exactly `α_3`); the series uses
/// the exact `n_k α` phases, so `f_K` is invariant up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastFurstenberg {
    pub k: usize,
    pub alpha: u64,
    /// `n_k α mod 1`, centered, for `k = 1..=K`.
    pub alpha_phases: Vec<f64>,
}

impl FastFurstenberg {
    pub fn new(k: usize) -> Result<Self> {
        series::check_cutoff(k)?;
        Ok(FastFurstenberg {
            k,
            alpha: series::reference_alpha().to_fixed_u64(),
            alpha_phases: series::alpha_phases()[..k]
                .iter()
                .map(|a| a.to_centered_f64())
                .collect(),
        })
    }

    /// `h_K(θ1) = Σ (2/k)[cos 2π(φ + a) - cos 2πφ]`.
    pub fn h(&self, t1: u64) -> f64 {
        let mut s = 0.0;
        for (j, &a) in self.alpha_phases.iter().enumerate() {
            let phi = phase64(t1, j + 1);
            s += -(4.0 / (j + 1) as f64) * (2.0 * PI * (phi + 0.5 * a)).sin() * (PI * a).sin();
        }
        s
    }

    pub fn apply(&self, p: Point64) -> Point64 {
        Point64 {
            t1: p.t1.wrapping_add(self.alpha),
            t2: p.t2.wrapping_add(signed_to_fixed(self.h(p.t1))),
        }
    }
}

/// A real increment in turns, as a wrapping fixed-point amount.
fn signed_to_fixed(x: f64) -> u64 {
    ((x * TWO64) as i128) as u64
}

/// A fiber map acting on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberMap {
    /// `θ1 -> θ1 + a`, the second coordinate untouched.
    Rotation { a: u64 },
    Furstenberg(FastFurstenberg),
    /// `θ -> θ - β sin 2πθ` on both coordinates; attracting fixed point at the origin.
    Attractor { beta: f64 },
}

impl FiberMap {
    /// Rotation by `a` turns.
    pub fn rotation(a: f64) -> Self {
        FiberMap::Rotation { a: turns_to_fixed(a) }
    }

    pub fn furstenberg(k: usize) -> Result<Self> {
        Ok(FiberMap::Furstenberg(FastFurstenberg::new(k)?))
    }

    /// The attracting map; a diffeomorphism only for `β < 1/(2π)`.
    pub fn attractor(beta: f64) -> Result<Self> {
        if !(0.0..1.0 / (2.0 * PI)).contains(&beta) {
            return Err(Error::InvalidArgument(format!(
                "attractor strength must lie in [0, 1/(2π)), got {beta}"
            )));
        }
        Ok(FiberMap::Attractor { beta })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FiberMap::Rotation { .. } => "rotation",
            FiberMap::Furstenberg(_) => "furstenberg",
            FiberMap::Attractor { .. } => "attractor",
        }
    }

    pub fn apply(&self, p: Point64) -> Point64 {
        match self {
            FiberMap::Rotation { a } => Point64 {
                t1: p.t1.wrapping_add(*a),
                t2: p.t2,
            },
            FiberMap::Furstenberg(f) => f.apply(p),
            FiberMap::Attractor { beta } => {
                let pull = |t: u64| {
                    let x = fixed_to_turns(t);
                    t.wrapping_sub(signed_to_fixed(beta * (2.0 * PI * x).sin()))
                };
                Point64 {
                    t1: pull(p.t1),
                    t2: pull(p.t2),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::SplitAngle;
    use crate::dynamics::{Furstenberg, TorusPoint};

    #[test]
    fn fixed_point_conversions() {
        assert_eq!(turns_to_fixed(0.5), 1 << 63);
        assert_eq!(turns_to_fixed(-0.25), 3 << 62);
        assert_eq!(fixed_to_turns(1 << 62), 0.25);
        assert_eq!(phase64(1 << 62, 1), 0.5);
        assert_eq!(phase64(1 << 62, 2), 0.0);
    }

    #[test]
    fn fast_step_matches_exact_step() {
        let fast = FastFurstenberg::new(3).unwrap();
        let exact = Furstenberg::new(3).unwrap();
        for t1 in [0u64, 0x1234_5678_9abc_def0, u64::MAX / 3] {
            let p = Point64::new(t1, 77);
            let q = fast.apply(p);
            let theta1 = SplitAngle::from_dense(crate::dyadic::DyadicAngle::from_fixed_u64(t1));
            let tp = TorusPoint::new(theta1, crate::dyadic::DyadicAngle::from_fixed_u64(77));
            let tq = exact.step(&tp).unwrap();
            let d = crate::numeric::chord(q.theta2(), tq.theta2.to_f64());
            assert!(d < 1e-13, "{d}");
        }
    }

    #[test]
    fn attractor_fixes_origin_and_rejects_large_beta() {
        let a = FiberMap::attractor(0.1).unwrap();
        assert_eq!(a.apply(Point64::default()), Point64::default());
        assert!(FiberMap::attractor(0.2).is_err());
        let p = Point64::from_f64(0.1, 0.9);
        let q = a.apply(p);
        assert!(q.theta1() < 0.1 && q.theta2() > 0.9);
    }
}
