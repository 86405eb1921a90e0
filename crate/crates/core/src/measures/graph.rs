use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::empirical::{EmpiricalMeasure, CHUNK};
use super::maps::{big_h64, turns_to_fixed, Point64};
use crate::error::{Error, Result};
use crate::numeric::{cis_turns, ComplexSum};
use crate::series;

/// Lebesgue measure on `θ1` lifted to the graph `ζ2 = R_K(ζ1) / s0`, discretized
/// on the grid `θ1 = j / 2^grid_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphMeasure {
    /// `arg s0 / 2π`.
    pub s0: f64,
    pub k: usize,
    pub grid_bits: u32,
}

impl GraphMeasure {
    pub fn new(s0: f64, k: usize, grid_bits: u32) -> Result<Self> {
        series::check_cutoff(k)?;
        if !(10..=32).contains(&grid_bits) {
            return Err(Error::Precondition(format!(
                "graph grid needs between 2^10 and 2^32 points, got 2^{grid_bits}"
            )));
        }
        Ok(GraphMeasure { s0, k, grid_bits })
    }

    pub fn grid_len(&self) -> usize {
        1 << self.grid_bits
    }

    /// The `j`-th grid point `(j / M, H_K(j / M) - s0)`.
    pub fn point(&self, j: usize) -> Point64 {
        let t1 = (j as u64) << (64 - self.grid_bits);
        Point64::new(t1, turns_to_fixed(big_h64(t1, self.k) - self.s0))
    }

    pub fn to_measure(&self) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform((0..self.grid_len()).into_par_iter().map(|j| self.point(j)).collect())
    }

    /// `n` independent draws from the grid measure.
    pub fn sample(&self, n: usize, seed: u64) -> EmpiricalMeasure {
        let m = self.grid_len();
        let points = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let len = CHUNK.min(n - c * CHUNK);
                (0..len).map(move |_| self.point(rng.random_range(0..m)))
            })
            .collect();
        EmpiricalMeasure::uniform(points)
    }

    /// `∫ φ(θ1, θ2)` over the graph, with `θ2 = H_K(θ1) - s0` evaluated in floating point.
    pub fn integrate_with<F>(&self, phi: F) -> Complex64
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let m = self.grid_len();
        let blocks: Vec<Complex64> = (0..m.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut s = ComplexSum::default();
                for j in c * CHUNK..m.min((c + 1) * CHUNK) {
                    let t1 = (j as u64) << (64 - self.grid_bits);
                    let theta1 = j as f64 / m as f64;
                    s.add(phi(theta1, big_h64(t1, self.k) - self.s0));
                }
                s.value()
            })
            .collect();
        let mut s = ComplexSum::default();
        for b in blocks {
            s.add(b);
        }
        s.value() / m as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphTestFn {
    Zeta1,
    Zeta2,
    ReF,
    FTrunc,
}

impl FromStr for GraphTestFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zeta1" => Ok(GraphTestFn::Zeta1),
            "zeta2" => Ok(GraphTestFn::Zeta2),
            "re_f" | "ref" => Ok(GraphTestFn::ReF),
            "f" | "f_trunc" => Ok(GraphTestFn::FTrunc),
            _ => Err(Error::Parse(format!("unknown graph test function {s:?}"))),
        }
    }
}

fn f_value(t1: f64, t2: f64, k: usize) -> Complex64 {
    cis_turns(big_h64(turns_to_fixed(t1), k) - t2)
}

/// Quadrature of a test function against the graph measure.
pub fn graph_integrate(gm: &GraphMeasure, testfn: GraphTestFn) -> Complex64 {
    match testfn {
        GraphTestFn::Zeta1 => gm.integrate_with(|t1, _| cis_turns(t1)),
        GraphTestFn::Zeta2 => gm.integrate_with(|_, t2| cis_turns(t2)),
        GraphTestFn::ReF => {
            let k = gm.k;
            gm.integrate_with(move |t1, t2| Complex64::new(f_value(t1, t2, k).re, 0.0))
        }
        GraphTestFn::FTrunc => {
            let k = gm.k;
            gm.integrate_with(move |t1, t2| f_value(t1, t2, k))
        }
    }
}
