//! The acceptance suite: one line per criterion, with its wall time.
//!
//! Runs without the libtest harness so the table is always printed. The
//! process fails if any criterion fails, except one that is known to be
//! unattainable; that one still prints FAIL, and the facts that make it
//! unattainable are asserted instead.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use covertower::{all_reduced_words, open_all, verify_tower, SurfaceGroup, TowerOptions};
use skewlab::dyadic::{alpha_partial, frac_n_alpha, lemma_mod_check, v_seq, Budget, DyadicAngle, MultipleOfAlpha};
use skewlab::dynamics::{
    density_certificate, steer_block, verify_certificate, DensityOptions, Furstenberg, IterCount, TorusPoint,
};
use skewlab::measures::{
    f_angle64, graph_integrate, krylov_bogolyubov, mu_s0_delta, FiberMap, GraphMeasure, GraphTestFn, KbOptions,
    TruncatedInvariant,
};
use skewlab::numeric::{centered, cis_turns};
use skewlab::series::{cocycle_residual, eval_big_h_trunc};

enum Verdict {
    Pass(String),
    Fail(String),
    /// Fails as stated; `String` says why and what was checked instead.
    Known(String),
}

type Check = fn() -> Verdict;

fn pass_if(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> TorusPoint {
    TorusPoint::new(
        DyadicAngle::from_fixed_u64(rng.random()),
        DyadicAngle::from_fixed_u64(rng.random()),
    )
}

fn constants() -> Verdict {
    let b = Budget::default();
    let v = v_seq(4, &b).unwrap();
    let want: Vec<BigUint> = [1u64, 4, 37, 412_316_860_454].map(BigUint::from).to_vec();
    let a = alpha_partial(3, &b).unwrap();
    let exact = a.value == DyadicAngle::from_parts(BigUint::from(77_309_411_329u64), 37);
    let bounds: Vec<bool> = (1..=3).map(|k| frac_n_alpha(k, 4, &b).unwrap().bound_holds).collect();
    let out = Command::new(env!("CARGO_BIN_EXE_skewlab"))
        .args(["constants", "--K", "4"])
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cli_v = doc["v"] == serde_json::json!([1, 4, 37, 412_316_860_454u64]);
    pass_if(
        v.values() == want.as_slice() && exact && bounds.iter().all(|b| *b) && cli_v && out.status.success(),
        format!("alpha_3 = {}, bounds k=1..3 {bounds:?}, cli v ok = {cli_v}", a.value.to_hex()),
    )
}

fn iterate_agreement() -> Verdict {
    let sys = Furstenberg::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let starts: Vec<TorusPoint> = (0..100).map(|_| random_point(&mut rng)).collect();
    let worst = starts
        .par_iter()
        .map(|p0| {
            let mut p = p0.clone();
            let mut worst = 0.0f64;
            for n in 1..=10_000u64 {
                p = sys.step(&p).unwrap();
                let q = sys.iterate_closed_u64(p0, n).unwrap();
                assert_eq!(p.theta1, q.theta1);
                worst = worst.max(centered(p.theta2.to_f64() - q.theta2.to_f64()).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    pass_if(worst < 1e-10, format!("max |closed - steps| = {worst:.3e} over 100 starts, n <= 10^4"))
}

fn steering() -> Verdict {
    let sys = Furstenberg::new(3).unwrap();
    let p = TorusPoint::origin();
    steer_block(&sys, &p, 2).unwrap();
    let t = Instant::now();
    let r = steer_block(&sys, &p, 2).unwrap();
    let dt = t.elapsed();
    let c = 1.0 - (PI / 8.0).cos();
    let (lo, hi) = (-3.1 * c / 2.0, -0.9 * c / 2.0);
    let ok = (r.u - -0.0785296).abs() <= 1e-5
        && (lo..=hi).contains(&r.u)
        && (r.lower - lo).abs() < 1e-15
        && (r.upper - hi).abs() < 1e-15
        && r.drift_f64.abs() < 2f64.powi(-6)
        && r.block == IterCount::pow2(29)
        && dt < Duration::from_millis(1);
    pass_if(
        ok,
        format!("u = {:.7}, interval [{lo:.5}, {hi:.5}], drift = {:.3e}, m_2 = 2^29 in {dt:?}", r.u, r.drift_f64),
    )
}

fn density() -> Verdict {
    let sys = Furstenberg::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs: Vec<(TorusPoint, TorusPoint)> = (0..20).map(|_| (random_point(&mut rng), random_point(&mut rng))).collect();
    let results: Vec<(bool, f64, u64)> = pairs
        .par_iter()
        .map(|(p, q)| {
            let cert = density_certificate(&sys, p, q, 0.05, &DensityOptions::default()).unwrap();
            let v = verify_certificate(&sys, &cert).unwrap();
            (v.ok && v.total_consistent && v.achieved_distance <= 0.05, v.achieved_distance, cert.total_steps.bits())
        })
        .collect();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let bits = results.iter().map(|r| r.2).max().unwrap_or(0);
    pass_if(
        results.iter().all(|r| r.0),
        format!("20/20 certified, worst distance {worst:.4}, largest count has {bits} bits"),
    )
}

fn invariant_function() -> Verdict {
    let sys = Furstenberg::new(3).unwrap();
    let inv = TruncatedInvariant::new(1, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let starts: Vec<TorusPoint> = (0..10).map(|_| random_point(&mut rng)).collect();
    let worst = starts
        .par_iter()
        .map(|p0| {
            let mut p = p0.clone();
            let mut f = inv.eval(&p).unwrap();
            let mut worst = 0.0f64;
            for _ in 0..100_000 {
                p = sys.step(&p).unwrap();
                let g = inv.eval(&p).unwrap();
                worst = worst.max((g - f).norm());
                f = g;
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    pass_if(
        worst < 1e-8,
        format!("max |f_1(Tp) - f_1(p)| = {worst:.3e}, budget {:.3e}", inv.defect_budget),
    )
}

fn measure_family() -> Verdict {
    let mut worst = 0.0f64;
    let mut runs = 0;
    for delta in [0.05, 0.1, 0.25] {
        for j in 0..8 {
            let c = mu_s0_delta(j as f64 / 8.0, delta, 3, 1_000_000, 600 + j).unwrap();
            worst = worst.max(c.z_score().abs());
            runs += 1;
        }
    }
    let a = mu_s0_delta(0.0, 0.05, 3, 1_000_000, 61).unwrap();
    let b = mu_s0_delta(0.5, 0.05, 3, 1_000_000, 62).unwrap();
    let disjoint = a.measure.points.iter().all(|p| !b.arc_contains(f_angle64(*p, 3)))
        && b.measure.points.iter().all(|p| !a.arc_contains(f_angle64(*p, 3)));
    pass_if(
        worst < 3.0 && disjoint,
        format!("{runs} runs at N = 10^6, max |z| = {worst:.2}, s0 = 1 vs -1 disjoint = {disjoint}"),
    )
}

fn graph_scaling() -> Verdict {
    let mut spread = 0.0f64;
    for k in 1..=3 {
        let base = graph_integrate(&GraphMeasure::new(0.0, k, 14).unwrap(), GraphTestFn::Zeta2);
        for j in 1..8 {
            let s0 = j as f64 / 8.0;
            let z = graph_integrate(&GraphMeasure::new(s0, k, 14).unwrap(), GraphTestFn::Zeta2);
            spread = spread.max((cis_turns(s0) * z - base).norm());
        }
    }
    pass_if(spread < 1e-10, format!("max spread over 8 roots, K = 1..3: {spread:.3e}"))
}

fn non_unique_ergodicity() -> Verdict {
    let sys = Furstenberg::new(3).unwrap();
    let inv = TruncatedInvariant::new(1, 3).unwrap();
    let on_level = |theta1: f64, s0: f64| {
        let p = TorusPoint::from_f64(theta1, 0.0).unwrap();
        let h = eval_big_h_trunc(&p.theta1, 1).unwrap().value_re;
        TorusPoint::from_f64(theta1, h - s0).unwrap()
    };
    let sums: Vec<Vec<Complex64>> = [on_level(0.2, 0.0), on_level(0.7, 0.25)]
        .par_iter()
        .map(|p0| {
            let mut p = p0.clone();
            let mut acc = Complex64::default();
            let mut out = Vec::with_capacity(100_000);
            for _ in 0..100_000 {
                let z = inv.eval(&p).unwrap();
                acc += z;
                out.push(acc);
                p = sys.step(&p).unwrap();
            }
            out
        })
        .collect();
    let gap = 2f64.sqrt();
    let closest = sums[0]
        .iter()
        .zip(&sums[1])
        .enumerate()
        .map(|(i, (a, b))| (a - b).norm() / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    pass_if(
        closest >= 0.9 * gap,
        format!("min over n <= 10^5 of |A_n(s0=1) - A_n(s0=i)| = {closest:.6} vs 0.9|1-i| = {:.6}", 0.9 * gap),
    )
}

fn krylov_bogolyubov_checks() -> Verdict {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let opts = KbOptions {
        n: 100_000,
        seed: 9,
        ..Default::default()
    };
    let rot = krylov_bogolyubov(&[FiberMap::rotation(golden)], &opts).unwrap();
    let mixed = krylov_bogolyubov(
        &[FiberMap::furstenberg(3).unwrap(), FiberMap::attractor(0.1).unwrap()],
        &opts,
    )
    .unwrap();
    let cand = mixed.candidate_defects.clone().unwrap_or_default();
    let attractor_defect = cand.get(1).copied().unwrap_or(0.0);
    pass_if(
        rot.max_defect < 1e-2 && rot.w1_theta1 < 1e-2 && mixed.non_convergence && attractor_defect > 0.05,
        format!(
            "rotation defect {:.2e}, W1 {:.2e}; mixed flag = {}, candidate ATTRACTOR defect {attractor_defect:.3}",
            rot.max_defect, rot.w1_theta1, mixed.non_convergence
        ),
    )
}

fn cover_tower() -> Verdict {
    let g = SurfaceGroup::new(2).unwrap();
    let words: Vec<_> = all_reduced_words(4, 4).into_iter().filter(|w| !g.is_trivial(w).unwrap()).collect();
    let at = |depth| open_all(&g, &words, &TowerOptions { max_depth: depth, ..Default::default() }).unwrap();
    let genera_ok = |t: &covertower::CoverTower| {
        let mut genus = 2;
        t.levels.iter().all(|l| {
            let ok = l.base_genus == genus && l.cover_genus == 2 * genus - 1;
            genus = l.cover_genus;
            ok
        })
    };
    let t3 = at(3);
    let v3 = verify_tower(&t3, &words).unwrap();
    if t3.complete && v3.all_open && genera_ok(&t3) {
        return Verdict::Pass(format!("{} words open by depth 3, verified", words.len()));
    }
    // 8 letters must each leave the base coset, and a depth-3 tower has only 7 others
    let pigeonhole = t3.survivors().any(|s| s.word.len() == 2);
    let t8 = at(8);
    let v8 = verify_tower(&t8, &words).unwrap();
    let genera: Vec<usize> = t8.levels.iter().map(|l| l.base_genus).collect();
    assert!(pigeonhole, "depth 3 failed without a length-2 survivor");
    assert!(genera_ok(&t3) && genera_ok(&t8) && genera[..4] == [2, 3, 5, 9]);
    assert!(t8.complete && v8.all_open, "depth 8 should open every word");
    Verdict::Known(format!(
        "{} of {} words closed at depth 3 (verified); a length-2 word must stay closed with 8 cosets. \
         Depth 8 opens all, verified, genera {genera:?}",
        t3.survivors().count(),
        words.len(),
    ))
}

fn cocycle_identity() -> Verdict {
    let worst = (0u64..1024)
        .into_par_iter()
        .map(|j| {
            let theta = DyadicAngle::from_fixed_u64(j << 54).into();
            cocycle_residual(&theta, 2, 3).unwrap().total
        })
        .reduce(|| 0.0, f64::max);
    pass_if(worst < 1e-9, format!("max term residual on 2^10 grid = {worst:.3e}"))
}

fn lemma_mod() -> Verdict {
    let alpha = alpha_partial(3, &Budget::default()).unwrap().value;
    let mut positive = true;
    for n in 0..=8u32 {
        for k in [1i64, 3, 5, -7, 9] {
            let r = lemma_mod_check(&MultipleOfAlpha::Dyadic { n, k }, &alpha, n..=n + 40);
            positive &= r.exact_zero.iter().all(|z| *z);
        }
    }
    let r = lemma_mod_check(&MultipleOfAlpha::Rational { p: 1, q: 3 }, &alpha, 0..=40);
    let negative = r.min_distance >= r.alpha / 4.0 && !r.exact_zero.iter().any(|z| *z);
    pass_if(
        positive && negative,
        format!(
            "2^-n k α exact zero for j in [n, n+40] = {positive}; α/3 min distance {:.4e} vs α/4 = {:.4e}",
            r.min_distance,
            r.alpha / 4.0
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<u64>, Check); 12] = [
        (1, "constants", Some(1), constants),
        (2, "iterate agreement", Some(30), iterate_agreement),
        (3, "steering block", None, steering),
        (4, "density certificates", Some(60), density),
        (5, "invariant function", None, invariant_function),
        (6, "measure family", Some(120), measure_family),
        (7, "extremal-measure scaling", None, graph_scaling),
        (8, "non-unique ergodicity", None, non_unique_ergodicity),
        (9, "Krylov-Bogolyubov", None, krylov_bogolyubov_checks),
        (10, "cover tower", Some(120), cover_tower),
        (11, "per-term cocycle identity", None, cocycle_identity),
        (12, "lemma mod", None, lemma_mod),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let t = Instant::now();
        let verdict = check();
        let secs = t.elapsed().as_secs_f64();
        let late = limit.is_some_and(|l| secs > l as f64);
        let (word, detail) = match verdict {
            Verdict::Pass(d) if late => ("FAIL", format!("{d}; over the {}s limit", limit.unwrap_or(0))),
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => ("FAIL", d),
            Verdict::Known(d) => ("FAIL", format!("known, unattainable as stated: {d}")),
        };
        if word == "FAIL" && !detail.starts_with("known") {
            failed += 1;
        }
        println!("criterion {id:>2} {name:<26} {word} ({secs:.2}s) {detail}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
