use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maps::{f_angle64, FiberMap, Point64};
use crate::error::{Error, Result};
use crate::numeric::{centered, Compensated};
use crate::series;

/// Samples per RNG stream and per summation block.
///
/// Sample `i` always comes from stream `i / CHUNK` of the master seed, and sums
/// are reduced block by block in index order, so results do not depend on the
/// number of worker threads.
pub const CHUNK: usize = 1 << 16;

/// A weighted sample cloud on the torus; weights sum to 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub points: Vec<Point64>,
    pub weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn uniform(points: Vec<Point64>) -> Self {
        let w = if points.is_empty() { 0.0 } else { 1.0 / points.len() as f64 };
        let weights = vec![w; points.len()];
        EmpiricalMeasure { points, weights }
    }

    pub fn dirac(p: Point64) -> Self {
        Self::uniform(vec![p])
    }

    /// Rescales the weights to total mass 1.
    pub fn weighted(points: Vec<Point64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidArgument("points and weights differ in length".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("total weight must be positive".into()));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(EmpiricalMeasure { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `∫ φ dm`, reduced deterministically.
    pub fn integrate<F>(&self, phi: F) -> f64
    where
        F: Fn(Point64) -> f64 + Sync,
    {
        let blocks: Vec<f64> = self
            .points
            .par_chunks(CHUNK)
            .zip(self.weights.par_chunks(CHUNK))
            .map(|(ps, ws)| {
                let mut s = Compensated::default();
                for (p, w) in ps.iter().zip(ws) {
                    s.add(w * phi(*p));
                }
                s.value()
            })
            .collect();
        let mut s = Compensated::default();
        for b in blocks {
            s.add(b);
        }
        s.value()
    }

    pub fn pushforward(&self, map: &FiberMap) -> EmpiricalMeasure {
        EmpiricalMeasure {
            points: self.points.par_iter().map(|p| map.apply(*p)).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// `n` Haar-distributed points from `seed`.
pub fn haar(n: usize, seed: u64) -> EmpiricalMeasure {
    let chunks = n.div_ceil(CHUNK);
    let points: Vec<Point64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(move |_| Point64::new(rng.random(), rng.random()))
        })
        .collect();
    EmpiricalMeasure::uniform(points)
}

/// `μ_{s0,δ}` as a sample cloud, with the acceptance statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutMeasure {
    /// Center of the arc, `arg s0 / 2π`.
    pub s0: f64,
    pub delta: f64,
    pub k: usize,
    pub seed: u64,
    pub total: usize,
    pub accepted: usize,
    /// `accepted / total`; its expectation is `δ`.
    pub fraction: f64,
    /// Binomial standard deviation `sqrt(δ(1-δ)/N)`.
    pub sigma: f64,
    pub measure: EmpiricalMeasure,
}

impl CutMeasure {
    /// `(fraction - δ) / σ`.
    pub fn z_score(&self) -> f64 {
        if self.sigma == 0.0 {
            0.0
        } else {
            (self.fraction - self.delta) / self.sigma
        }
    }

    /// Signed offsets `arg f_K / 2π - s0` of the accepted samples, in `[-1/2, 1/2)`.
    pub fn f_offsets(&self) -> Vec<f64> {
        self.measure
            .points
            .iter()
            .map(|p| centered(f_angle64(*p, self.k) - self.s0))
            .collect()
    }

    /// Whether an angle (turns) lies on this measure's arc `I(s0, δ)`.
    pub fn arc_contains(&self, angle: f64) -> bool {
        in_arc(angle, self.s0, self.delta)
    }
}

fn in_arc(angle: f64, s0: f64, delta: f64) -> bool {
    delta >= 1.0 || centered(angle - s0).abs() < 0.5 * delta
}

/// Rejection-samples Haar measure, keeping points with `arg f_K` within `δ/2` turns of `s0`.
///
/// `s0` is the argument of the unit-modulus parameter, in turns.
pub fn mu_s0_delta(s0: f64, delta: f64, k: usize, n: usize, seed: u64) -> Result<CutMeasure> {
    series::check_cutoff(k)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1], got {delta}")));
    }
    const REQUIRED: usize = 100;
    if (n as f64) * delta < REQUIRED as f64 {
        return Err(Error::TooFewAcceptances {
            accepted: 0,
            total: n,
            required: REQUIRED,
        });
    }
    let all = haar(n, seed);
    let kept: Vec<Point64> = all
        .points
        .par_iter()
        .copied()
        .filter(|p| in_arc(f_angle64(*p, k), s0, delta))
        .collect();
    let accepted = kept.len();
    if accepted < REQUIRED {
        return Err(Error::TooFewAcceptances {
            accepted,
            total: n,
            required: REQUIRED,
        });
    }
    Ok(CutMeasure {
        s0,
        delta,
        k,
        seed,
        total: n,
        accepted,
        fraction: accepted as f64 / n as f64,
        sigma: (delta * (1.0 - delta) / n as f64).sqrt(),
        measure: EmpiricalMeasure::uniform(kept),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_reproducible_across_pools() {
        let a = haar(200_000, 7);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| haar(200_000, 7));
        assert_eq!(a, b);
        assert_ne!(haar(10, 8).points, a.points[..10]);
        let m = |p: Point64| p.theta1();
        assert_eq!(a.integrate(m), pool.install(|| b.integrate(m)));
    }

    #[test]
    fn full_arc_recovers_haar() {
        let c = mu_s0_delta(0.0, 1.0, 2, 10_000, 1).unwrap();
        assert_eq!(c.accepted, 10_000);
        assert_eq!(c.measure, haar(10_000, 1));
    }

    #[test]
    fn too_few_acceptances() {
        assert!(matches!(
            mu_s0_delta(0.0, 0.01, 1, 5_000, 1),
            Err(Error::TooFewAcceptances { .. })
        ));
        assert!(mu_s0_delta(0.0, 0.0, 1, 5_000, 1).is_err());
    }

    #[test]
    fn weights_normalize() {
        let m = EmpiricalMeasure::weighted(vec![Point64::default(); 3], vec![1.0, 2.0, 1.0]).unwrap();
        assert!((m.total_weight() - 1.0).abs() < 1e-15);
        assert!(EmpiricalMeasure::weighted(vec![Point64::default()], vec![-1.0]).is_err());
    }
}
