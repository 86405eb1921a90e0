use num_complex::Complex64;
use skewlab::dyadic::SplitAngle;
use skewlab::dynamics::{Furstenberg, TorusPoint};
use skewlab::measures::*;
use skewlab::numeric::{centered, cis_turns};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `J_n(x)` from its power series; fine for the moderate arguments used here.
fn bessel_j(n: u32, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..200 {
        term *= -(0.25 * x * x) / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

#[test]
fn bessel_oracle_sanity() {
    assert!((bessel_j(0, 0.0) - 1.0).abs() < 1e-15);
    assert!((bessel_j(0, 2.404825557695773)).abs() < 1e-12);
    assert!((bessel_j(1, 3.831705970207512)).abs() < 1e-12);
}

#[test]
fn graph_zeta2_regression_k1() {
    let gm = GraphMeasure::new(0.0, 1, 14).unwrap();
    let z = graph_integrate(&gm, GraphTestFn::Zeta2);
    // ∫ e^{2πi·2cos 4πθ} dθ = J_0(4π)
    let oracle = bessel_j(0, 4.0 * std::f64::consts::PI);
    assert!((z.re - oracle).abs() < 1e-12, "{z} vs {oracle}");
    assert!(z.im.abs() < 1e-12);
    assert!((oracle - 0.157507392482138).abs() < 1e-12);
}

#[test]
fn graph_scaling_across_roots_of_unity() {
    for k in 1..=3 {
        let base = graph_integrate(&GraphMeasure::new(0.0, k, 14).unwrap(), GraphTestFn::Zeta2);
        for j in 1..8 {
            let s0 = j as f64 / 8.0;
            let z = graph_integrate(&GraphMeasure::new(s0, k, 14).unwrap(), GraphTestFn::Zeta2);
            assert!((cis_turns(s0) * z - base).norm() < 1e-10);
        }
    }
}

#[test]
fn graph_marginal_is_uniform() {
    let gm = GraphMeasure::new(0.25, 2, 14).unwrap();
    let m = gm.sample(200_000, 11);
    let bins = 1024usize;
    let mut counts = vec![0u64; bins];
    for p in &m.points {
        counts[(p.t1 >> 54) as usize] += 1;
    }
    let e = m.len() as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let crit = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(chi2 < crit, "{chi2} >= {crit}");
    // every sample lies on the level set
    for p in m.points.iter().take(1000) {
        assert!(centered(f_angle64(*p, 2) - 0.25).abs() < 1e-12);
    }
}

#[test]
fn cut_measure_mass_and_disjointness() {
    let n = 200_000;
    for &delta in &[0.05, 0.1, 0.25] {
        for j in 0..8 {
            let c = mu_s0_delta(j as f64 / 8.0, delta, 3, n, 100 + j).unwrap();
            assert!(c.z_score().abs() < 3.0, "δ={delta} s0={j}/8 z={}", c.z_score());
            assert!(c.f_offsets().iter().all(|d| d.abs() < delta / 2.0));
        }
    }
    let a = mu_s0_delta(0.0, 0.05, 1, n, 1).unwrap();
    let b = mu_s0_delta(0.5, 0.05, 1, n, 2).unwrap();
    assert!(a.measure.points.iter().all(|p| !b.arc_contains(f_angle64(*p, 1))));
    assert!(b.measure.points.iter().all(|p| !a.arc_contains(f_angle64(*p, 1))));
}

#[test]
fn haar_is_furstenberg_invariant_but_not_attractor_invariant() {
    let haar = haar(1_000_000, 5);
    let f = FiberMap::furstenberg(3).unwrap();
    let d = invariance_defect(&haar, &f, &low_degree_trig(2));
    assert!(d < 5e-3, "{d}");
    let a = FiberMap::attractor(0.1).unwrap();
    let d = invariance_defect(&haar, &a, &[TrigFn::cos(1, 0)]);
    // ∫ cos(x - 0.2π sin x) dx / 2π - 0 = J_1(0.2π)
    let oracle = bessel_j(1, 0.2 * std::f64::consts::PI);
    assert!((d - oracle).abs() < 5e-3, "{d} vs {oracle}");
    assert!(d > 0.05);
}

#[test]
fn kb_rotation_converges_to_lebesgue() {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let opts = KbOptions {
        initial: Point64::from_f64(0.1, 0.3),
        ..KbOptions::default()
    };
    let r = krylov_bogolyubov(&[FiberMap::rotation(golden)], &opts).unwrap();
    assert!(r.max_defect < 1e-2);
    assert!(r.w1_theta1 < 1e-2, "{}", r.w1_theta1);
    assert!(!r.non_convergence);
}

#[test]
fn kb_furstenberg_stays_on_level_set() {
    let s0 = 0.3;
    let t1 = turns_to_fixed(0.123);
    let p = Point64::new(t1, turns_to_fixed(big_h64(t1, 3) - s0));
    let opts = KbOptions {
        initial: p,
        ..KbOptions::default()
    };
    let r = krylov_bogolyubov(&[FiberMap::furstenberg(3).unwrap()], &opts).unwrap();
    assert!(r.max_defect < 1e-3, "{}", r.max_defect);
    assert!(!r.non_convergence);
    let worst = r
        .measure
        .points
        .iter()
        .map(|q| centered(f_angle64(*q, 3) - s0).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn kb_attractor_breaks_invariance() {
    let opts = KbOptions {
        initial: Point64::from_f64(0.3, 0.6),
        ..KbOptions::default()
    };
    let maps = [FiberMap::furstenberg(3).unwrap(), FiberMap::attractor(0.1).unwrap()];
    let r = krylov_bogolyubov(&maps, &opts).unwrap();
    assert!(r.non_convergence, "{:?}", r.defect_history);
    let cand = r.candidate_defects.unwrap();
    assert!(cand[0] < 1e-3);
    assert!(cand[1] > 0.05, "{cand:?}");
}

#[test]
fn kb_is_deterministic() {
    let maps = [FiberMap::rotation(0.3), FiberMap::attractor(0.05).unwrap()];
    let opts = KbOptions {
        n: 4096,
        seed: 9,
        ..KbOptions::default()
    };
    let a = krylov_bogolyubov(&maps, &opts).unwrap();
    let b = krylov_bogolyubov(&maps, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invariant_along_orbits_at_k1() {
    let t = Furstenberg::new(3).unwrap();
    let inv = TruncatedInvariant::new(1, 3).unwrap();
    let mut p = TorusPoint::from_f64(0.77, 0.01).unwrap();
    let f0 = inv.eval(&p).unwrap();
    for _ in 0..2000 {
        p = t.step(&p).unwrap();
    }
    assert!((inv.eval(&p).unwrap() - f0).norm() < 2000.0 * inv.defect_budget + 1e-9);
}

#[test]
fn birkhoff_separates_level_sets() {
    let t = Furstenberg::new(3).unwrap();
    let on_level = |theta1: f64, s0: f64| {
        let p = TorusPoint::from_f64(theta1, 0.0).unwrap();
        let h = skewlab::series::eval_big_h_trunc(&p.theta1, 1).unwrap().value_re;
        TorusPoint::from_f64(theta1, h - s0).unwrap()
    };
    let p = on_level(0.2, 0.0);
    let q = on_level(0.7, 0.25);
    let n = 4096;
    let a = birkhoff(&t, &p, Observable::FTrunc(1), n).unwrap();
    let b = birkhoff(&t, &q, Observable::FTrunc(1), n).unwrap();
    let gap = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, 1.0)).norm();
    for i in 0..a.ns.len() {
        assert!((a.average(i) - b.average(i)).norm() >= 0.9 * gap);
    }
}

#[test]
fn commuting_family() {
    let b = skewlab::dyadic::Budget::default();
    let other = SplitAngle::from_dense("0x1d3p-13".parse().unwrap())
        .add(skewlab::series::reference_alpha(), &b)
        .unwrap();
    let s = Furstenberg::new(3).unwrap();
    let t = Furstenberg::with_alpha(3, other).unwrap();
    for (x, y) in [(0.1, 0.2), (0.55, 0.9), (0.31, 0.47)] {
        let p = TorusPoint::from_f64(x, y).unwrap();
        let st = s.iterate_closed_u64(&t.iterate_closed_u64(&p, 1234).unwrap(), 987).unwrap();
        let ts = t.iterate_closed_u64(&s.iterate_closed_u64(&p, 987).unwrap(), 1234).unwrap();
        assert_eq!(st.theta1, ts.theta1);
        assert!(st.distance(&ts) < 1e-10);
    }
}
