//! Invariant measures: Haar sampling, the cut-off measures `μ_{s0,δ}`, graph
//! measures on level sets of the truncated invariant `f_K`, Birkhoff averages,
//! and Krylov–Bogolyubov averaging for groups of fiber maps.

mod birkhoff;
mod empirical;
mod graph;
mod kb;
mod maps;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::TorusPoint;
use crate::error::Result;
use crate::numeric::cis_turns;
use crate::series;

pub use birkhoff::{birkhoff, log_grid, BirkhoffReport, Observable};
pub use empirical::{haar, mu_s0_delta, CutMeasure, EmpiricalMeasure, CHUNK};
pub use graph::{graph_integrate, GraphMeasure, GraphTestFn};
pub use kb::{circle_w1, invariance_defect, krylov_bogolyubov, low_degree_trig, KbOptions, KbReport, TrigFn};
pub use maps::{
    big_h64, f_angle64, f_trunc64, fixed_to_turns, phase64, turns_to_fixed, FastFurstenberg, FiberMap, Point64,
};

/// `arg f_K(p) / 2π = H_K(θ1) - θ2`, in turns (not reduced).
pub fn f_angle(p: &TorusPoint, k: usize) -> Result<f64> {
    let h = series::eval_big_h_trunc(&p.theta1, k)?.value_re;
    Ok(h - p.theta2.to_centered_f64())
}

/// `f_K(ζ1, ζ2) = R_K(ζ1) / ζ2`.
pub fn f_trunc(p: &TorusPoint, k: usize) -> Result<Complex64> {
    Ok(cis_turns(f_angle(p, k)?))
}

/// `f_K` together with the bound on how far it can drift under one step of
/// `T_{K_map}`: `sup |g_K / g_{K_map} - 1| <= 2π Σ_{K<k<=K_map} (2/k) 2 sin(π |n_k α|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedInvariant {
    pub k: usize,
    pub k_map: usize,
    pub defect_budget: f64,
}

impl TruncatedInvariant {
    pub fn new(k: usize, k_map: usize) -> Result<Self> {
        series::check_cutoff(k)?;
        series::check_cutoff(k_map)?;
        let phases = series::alpha_phases();
        let budget = (k + 1..=k_map)
            .map(|j| {
                let a = phases[j - 1].to_centered_f64();
                2.0 * PI * (2.0 / j as f64) * 2.0 * (PI * a).sin().abs()
            })
            .fold(0.0, |acc, x| acc + x);
        Ok(TruncatedInvariant {
            k,
            k_map,
            defect_budget: budget,
        })
    }

    pub fn eval(&self, p: &TorusPoint) -> Result<Complex64> {
        f_trunc(p, self.k)
    }
}
