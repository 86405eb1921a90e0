//! Krylov–Bogolyubov averaging along words in a family of fiber maps, with an
//! invariance-defect monitor in place of a fixed-point theorem.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::empirical::{EmpiricalMeasure, CHUNK};
use super::maps::{fixed_to_turns, FiberMap, Point64};
use crate::error::{Error, Result};
use crate::numeric::Compensated;

/// `cos 2π(aθ1 + bθ2)` or `sin 2π(aθ1 + bθ2)`, phase computed exactly in fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrigFn {
    pub a: i64,
    pub b: i64,
    pub sine: bool,
}

impl TrigFn {
    pub fn cos(a: i64, b: i64) -> Self {
        TrigFn { a, b, sine: false }
    }

    pub fn sin(a: i64, b: i64) -> Self {
        TrigFn { a, b, sine: true }
    }

    pub fn eval(&self, p: Point64) -> f64 {
        let t = (self.a as u64)
            .wrapping_mul(p.t1)
            .wrapping_add((self.b as u64).wrapping_mul(p.t2));
        let x = 2.0 * PI * fixed_to_turns(t);
        if self.sine {
            x.sin()
        } else {
            x.cos()
        }
    }
}

/// Real trigonometric monomials with `0 < |a| + |b| <= degree`, one per `±(a, b)` pair.
pub fn low_degree_trig(degree: i64) -> Vec<TrigFn> {
    let mut out = Vec::new();
    for a in 0..=degree {
        for b in -degree..=degree {
            if a.abs() + b.abs() > degree || (a == 0 && b <= 0) {
                continue;
            }
            out.push(TrigFn::cos(a, b));
            out.push(TrigFn::sin(a, b));
        }
    }
    out
}

/// `max_φ |∫ φ∘F dm - ∫ φ dm|`.
pub fn invariance_defect(m: &EmpiricalMeasure, map: &FiberMap, testfns: &[TrigFn]) -> f64 {
    prefix_defect(m, m.len(), map, testfns)
}

/// Defect of the normalized restriction of `m` to its first `len` samples.
fn prefix_defect(m: &EmpiricalMeasure, len: usize, map: &FiberMap, testfns: &[TrigFn]) -> f64 {
    if len == 0 || testfns.is_empty() {
        return 0.0;
    }
    let pts = &m.points[..len];
    let ws = &m.weights[..len];
    let blocks: Vec<Vec<f64>> = pts
        .par_chunks(CHUNK)
        .zip(ws.par_chunks(CHUNK))
        .map(|(ps, ws)| {
            let mut acc = vec![Compensated::default(); testfns.len()];
            for (p, w) in ps.iter().zip(ws) {
                let q = map.apply(*p);
                for (a, f) in acc.iter_mut().zip(testfns) {
                    a.add(w * (f.eval(q) - f.eval(*p)));
                }
            }
            acc.iter().map(|a| a.value()).collect()
        })
        .collect();
    let total: f64 = ws.iter().sum();
    (0..testfns.len())
        .map(|i| {
            let mut s = Compensated::default();
            for b in &blocks {
                s.add(b[i]);
            }
            (s.value() / total).abs()
        })
        .fold(0.0, f64::max)
}

/// Wasserstein-1 distance on the circle between the `θ1` marginal of `m` and
/// Lebesgue measure, on a grid of `2^bins_bits` cells.
pub fn circle_w1(m: &EmpiricalMeasure, bins_bits: u32) -> f64 {
    let bins = 1usize << bins_bits;
    let mut hist = vec![0.0; bins];
    let total = m.total_weight();
    for (p, w) in m.points.iter().zip(&m.weights) {
        hist[(p.t1 >> (64 - bins_bits)) as usize] += w / total;
    }
    let mut cdf = 0.0;
    let mut d: Vec<f64> = hist
        .iter()
        .enumerate()
        .map(|(i, h)| {
            cdf += h;
            cdf - (i + 1) as f64 / bins as f64
        })
        .collect();
    // on the circle W1 = min_c ∫ |F - x - c|, attained at the median
    let mut sorted = d.clone();
    sorted.sort_by(f64::total_cmp);
    let med = sorted[bins / 2];
    d.iter_mut().for_each(|x| *x = (*x - med).abs());
    d.iter().sum::<f64>() / bins as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbOptions {
    pub n: usize,
    pub seed: u64,
    pub initial: Point64,
    /// Test functions are trigonometric monomials up to this degree.
    pub degree: i64,
    pub w1_bins_bits: u32,
    /// Also average over the first generator alone and test that measure against all generators.
    pub candidate: bool,
}

impl Default for KbOptions {
    fn default() -> Self {
        KbOptions {
            n: 100_000,
            seed: 0,
            initial: Point64::default(),
            degree: 2,
            w1_bins_bits: 16,
            candidate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbReport {
    pub generators: Vec<String>,
    pub n: usize,
    pub seed: u64,
    /// Prefix lengths `n/8, n/4, n/2, n` at which the defects were measured.
    pub checkpoints: Vec<usize>,
    /// `defect_history[i][g]`: defect of the prefix average at checkpoint `i` under generator `g`.
    pub defect_history: Vec<Vec<f64>>,
    pub defects: Vec<f64>,
    pub max_defect: f64,
    /// Set when the defect did not at least halve over three doublings and stays above `10^-3`.
    pub non_convergence: bool,
    pub w1_theta1: f64,
    /// Defects of the first generator's own average under every generator.
    pub candidate_defects: Option<Vec<f64>>,
    #[serde(skip)]
    pub measure: EmpiricalMeasure,
}

const FLAG_FLOOR: f64 = 1e-3;

/// Cesàro average of `δ_{x0}` pushed along a seeded balanced word in `maps`.
///
/// The word is a concatenation of random permutations of the generators, so
/// every generator is used equally often in each block.
pub fn krylov_bogolyubov(maps: &[FiberMap], opts: &KbOptions) -> Result<KbReport> {
    if maps.is_empty() {
        return Err(Error::Precondition("Krylov-Bogolyubov needs at least one map".into()));
    }
    if opts.n < 8 {
        return Err(Error::Precondition(format!("need n >= 8 samples, got {}", opts.n)));
    }
    let measure = orbit_average(maps, opts);
    let tests = low_degree_trig(opts.degree);
    let checkpoints: Vec<usize> = [8, 4, 2, 1].iter().map(|d| opts.n / d).collect();
    let defect_history: Vec<Vec<f64>> = checkpoints
        .iter()
        .map(|&len| maps.iter().map(|f| prefix_defect(&measure, len, f, &tests)).collect())
        .collect();
    let worst = |row: &Vec<f64>| row.iter().copied().fold(0.0, f64::max);
    let first = worst(&defect_history[0]);
    let last = worst(&defect_history[3]);
    let candidate_defects = if opts.candidate && maps.len() > 1 {
        let alone = orbit_average(&maps[..1], opts);
        Some(maps.iter().map(|f| invariance_defect(&alone, f, &tests)).collect())
    } else {
        None
    };
    Ok(KbReport {
        generators: maps.iter().map(|f| f.name().to_string()).collect(),
        n: opts.n,
        seed: opts.seed,
        checkpoints,
        defects: defect_history[3].clone(),
        max_defect: last,
        non_convergence: last > FLAG_FLOOR.max(0.5 * first),
        defect_history,
        w1_theta1: circle_w1(&measure, opts.w1_bins_bits),
        candidate_defects,
        measure,
    })
}

fn orbit_average(maps: &[FiberMap], opts: &KbOptions) -> EmpiricalMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut block: Vec<usize> = (0..maps.len()).collect();
    let mut points = Vec::with_capacity(opts.n);
    let mut x = opts.initial;
    while points.len() < opts.n {
        block.shuffle(&mut rng);
        for &g in &block {
            if points.len() == opts.n {
                break;
            }
            points.push(x);
            x = maps[g].apply(x);
        }
    }
    EmpiricalMeasure::uniform(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_basis() {
        let fs = low_degree_trig(1);
        assert_eq!(fs.len(), 4);
        let p = Point64::from_f64(0.25, 0.0);
        assert!((TrigFn::sin(1, 0).eval(p) - 1.0).abs() < 1e-15);
        assert!((TrigFn::cos(-1, 1).eval(p)).abs() < 1e-15);
        assert_eq!(low_degree_trig(2).len(), 12);
    }

    #[test]
    fn w1_of_uniform_grid_and_point_mass() {
        let grid = EmpiricalMeasure::uniform((0..1u64 << 12).map(|j| Point64::new(j << 52, 0)).collect());
        assert!(circle_w1(&grid, 12) < 1e-9);
        // a point mass is at circle distance 1/4 from Lebesgue on average
        let w = circle_w1(&EmpiricalMeasure::dirac(Point64::default()), 12);
        assert!((w - 0.25).abs() < 1e-3, "{w}");
    }

    #[test]
    fn attractor_fixed_point_has_no_defect() {
        let a = FiberMap::attractor(0.1).unwrap();
        let m = EmpiricalMeasure::dirac(Point64::default());
        assert_eq!(invariance_defect(&m, &a, &low_degree_trig(3)), 0.0);
    }

    #[test]
    fn empty_family_rejected() {
        assert!(krylov_bogolyubov(&[], &KbOptions::default()).is_err());
    }
}
