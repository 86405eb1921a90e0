use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use covertower::{all_reduced_words, open_all, verify_tower, CoverTower, SurfaceGroup, TowerOptions};
use skewlab::dyadic::{alpha_partial, alpha_split, frac_n_alpha, v_seq, Budget, DyadicAngle, SplitAngle, MAX_INDEX};
use skewlab::dynamics::{
    density_certificate, steer_block, verify_certificate, DensityOptions, Furstenberg, TorusPoint,
};
use skewlab::measures::{
    birkhoff, graph_integrate, krylov_bogolyubov, mu_s0_delta, FiberMap, GraphMeasure,
    GraphTestFn, KbOptions, Observable, Point64, TruncatedInvariant,
};
use skewlab::series::{self, h_tail, SeriesKind};

use crate::config::RunConfig;
use crate::emit::{dec, hex64, to_value, Report, Table};
use crate::Failure;

pub type Outcome = Result<(Report, Result<(), Failure>), Failure>;

fn system(cfg: &RunConfig) -> Result<Furstenberg, Failure> {
    Ok(Furstenberg::new(cfg.k)?.with_precision(cfg.precision_bits))
}

fn parse_point(s: &str) -> Result<TorusPoint, Failure> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("expected θ1,θ2 but got {s:?}")))?;
    let t1: SplitAngle = a.trim().parse()?;
    let t2: DyadicAngle = b.trim().parse()?;
    Ok(TorusPoint::new(t1, t2))
}

fn series_budgets(cfg: &RunConfig) -> Value {
    let mut b = json!({
        "precision_bits": cfg.precision_bits,
        "exact_bits": Budget::default().max_bits,
    });
    if (1..=series::MAX_K).contains(&cfg.k) {
        let t = h_tail(cfg.k);
        b["h_tail"] = to_value(&t);
        b["h_tail_text"] = json!(format!("{}*2^-({}*2^{})", dec(t.scale), t.mult, t.pow));
    }
    b
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(m), Value::Object(e)) = (&mut base, extra) {
        m.extend(e);
    }
    base
}

fn point_json(step: u64, p: &TorusPoint) -> Value {
    let (a, b) = p.to_f64();
    json!({
        "step": step,
        "theta1_hex": p.theta1.to_hex(),
        "theta2_hex": p.theta2.to_hex(),
        "theta1_f64": a,
        "theta2_f64": b,
    })
}

pub fn constants(cfg: &RunConfig) -> Outcome {
    let k = cfg.k;
    if !(1..=MAX_INDEX).contains(&k) {
        return Err(Failure::Usage(format!("constants needs 1 <= K <= {MAX_INDEX}, got {k}")));
    }
    let b = Budget::default();
    let v = v_seq(k, &b)?.to_u64s().expect("v_k fits for k <= 4");
    let (alpha_hex, alpha_f64, tail) = if k < MAX_INDEX {
        let a = alpha_partial(k, &b)?;
        (a.value.to_hex(), a.value.to_f64(), Some(a.tail_neg_log2))
    } else {
        let a = alpha_split(k, &b)?;
        (a.to_hex(), a.to_f64(), None)
    };
    let mut frac = BTreeMap::new();
    let mut failed = Vec::new();
    for j in 1..k {
        let f = frac_n_alpha(j, k, &b)?;
        if !f.bound_holds {
            failed.push(j);
        }
        frac.insert(j.to_string(), f);
    }
    let report = Report {
        command: "constants",
        args: json!({}),
        budgets: series_budgets(cfg),
        result: json!({
            "v": v,
            "alpha_hex": alpha_hex,
            "alpha_f64": alpha_f64,
            "alpha_tail_neg_log2": tail,
            "frac_n_alpha": frac,
        }),
        table: None,
    };
    let check = if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("frac(n_k α) bound fails for k = {failed:?}")))
    };
    Ok((report, check))
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    /// h, h_plus, h_minus, g, H or R.
    #[arg(long, default_value = "h")]
    kind: String,
    /// Angle in turns, hex dyadic or decimal.
    #[arg(long, default_value = "0")]
    theta: String,
}

pub fn series(cfg: &RunConfig, a: &SeriesArgs) -> Outcome {
    let kind: SeriesKind = a.kind.parse()?;
    let theta: SplitAngle = a.theta.parse()?;
    let v = series::eval(kind, &theta, cfg.k)?;
    let report = Report {
        command: "series",
        args: to_value(a),
        budgets: series_budgets(cfg),
        result: merge(json!({ "theta_hex": theta.to_hex() }), to_value(&v)),
        table: None,
    };
    Ok((report, Ok(())))
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    /// θ1,θ2 in turns.
    #[arg(long, default_value = "0,0")]
    start: String,
    #[arg(long, default_value_t = 100)]
    n: u64,
}

pub fn orbit(cfg: &RunConfig, a: &OrbitArgs) -> Outcome {
    let sys = system(cfg)?;
    let mut p = parse_point(&a.start)?;
    let mut rows = Vec::with_capacity(a.n as usize + 1);
    let mut points = Vec::with_capacity(a.n as usize + 1);
    for step in 0..=a.n {
        let (x, y) = p.to_f64();
        rows.push(vec![step.to_string(), p.theta1.to_hex(), p.theta2.to_hex(), dec(x), dec(y)]);
        points.push(point_json(step, &p));
        if step < a.n {
            p = sys.step(&p)?;
        }
    }
    let report = Report {
        command: "orbit",
        args: to_value(a),
        budgets: series_budgets(cfg),
        result: json!({ "orbit": points }),
        table: Some(Table {
            columns: ["step", "theta1_hex", "theta2_hex", "theta1_f64", "theta2_f64"].map(String::from).to_vec(),
            rows,
        }),
    };
    Ok((report, Ok(())))
}

#[derive(Debug, Args, Serialize)]
pub struct SteerArgs {
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value = "0,0")]
    start: String,
}

pub fn steer(cfg: &RunConfig, a: &SteerArgs) -> Outcome {
    let sys = system(cfg)?;
    let p = parse_point(&a.start)?;
    let r = steer_block(&sys, &p, a.s)?;
    let check = if r.r_small && !(r.in_interval && r.drift_ok) {
        Err(Failure::Verify(format!(
            "u = {} outside [{}, {}] or drift {} too large",
            r.u, r.lower, r.upper, r.drift_f64
        )))
    } else {
        Ok(())
    };
    let report = Report {
        command: "steer",
        args: to_value(a),
        budgets: series_budgets(cfg),
        result: to_value(&r),
        table: None,
    };
    Ok((report, check))
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long, default_value = "0,0")]
    start: String,
    /// θ1,θ2 in turns.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = DensityOptions::default().scan_limit)]
    scan_limit: u64,
    #[arg(long, default_value_t = DensityOptions::default().max_refine)]
    max_refine: u32,
}

pub fn density(cfg: &RunConfig, a: &DensityArgs) -> Outcome {
    let sys = system(cfg)?;
    let p = parse_point(&a.start)?;
    let target = parse_point(&a.target)?;
    let opts = DensityOptions {
        scan_limit: a.scan_limit,
        max_refine: a.max_refine,
    };
    let cert = density_certificate(&sys, &p, &target, a.eps, &opts)?;
    let ver = verify_certificate(&sys, &cert)?;
    let check = if ver.ok {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "certificate reaches distance {} > ε = {}",
            ver.achieved_distance, a.eps
        )))
    };
    let report = Report {
        command: "density",
        args: to_value(a),
        budgets: series_budgets(cfg),
        result: json!({ "certificate": cert, "verification": ver }),
        table: None,
    };
    Ok((report, check))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cut,
    Graph,
    Birkhoff,
    Kb,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// arg s0 in turns.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s0: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Haar samples drawn for the cut measure.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 14)]
    grid_bits: u32,
    /// zeta1, zeta2, re_f or f.
    #[arg(long, default_value = "zeta2")]
    test_fn: String,
    /// one, zeta1, zeta2, f or f:K.
    #[arg(long, default_value = "f")]
    observable: String,
    /// Orbit length for birkhoff and kb.
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[arg(long, default_value = "0,0")]
    start: String,
    /// Comma-separated generators: rotation:a, furstenberg, attractor:β.
    #[arg(long, default_value = "rotation:0.6180339887498949")]
    maps: String,
    #[arg(long, default_value_t = 2)]
    degree: i64,
}

fn parse_maps(s: &str, k: usize) -> Result<Vec<FiberMap>, Failure> {
    s.split(',')
        .map(|m| {
            let (name, param) = match m.trim().split_once(':') {
                Some((n, p)) => (n, Some(p)),
                None => (m.trim(), None),
            };
            let num = |p: Option<&str>| -> Result<f64, Failure> {
                p.ok_or_else(|| Failure::Usage(format!("{name} needs a parameter, as in {name}:0.1")))?
                    .parse()
                    .map_err(|_| Failure::Usage(format!("bad parameter in {m:?}")))
            };
            Ok(match name {
                "rotation" => FiberMap::rotation(num(param)?),
                "furstenberg" => FiberMap::furstenberg(k)?,
                "attractor" => FiberMap::attractor(num(param)?)?,
                _ => return Err(Failure::Usage(format!("unknown map {name:?}"))),
            })
        })
        .collect()
}

pub fn measure(cfg: &RunConfig, a: &MeasureArgs) -> Outcome {
    let k = cfg.k;
    series::check_cutoff(k)?;
    let inv = TruncatedInvariant::new(k, series::MAX_K)?;
    let mut budgets = series_budgets(cfg);
    budgets["defect_budget"] = json!(inv.defect_budget);
    budgets["defect_budget_map_K"] = json!(inv.k_map);
    let (result, table) = match a.mode {
        Mode::Cut => {
            let c = mu_s0_delta(a.s0, a.delta, k, a.samples, cfg.seed)?;
            let offsets = c.f_offsets();
            let lo = offsets.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let rows = c
                .measure
                .points
                .iter()
                .zip(&offsets)
                .enumerate()
                .map(|(i, (p, d))| {
                    vec![i.to_string(), hex64(p.t1), hex64(p.t2), dec(p.theta1()), dec(p.theta2()), dec(*d)]
                })
                .collect();
            let result = json!({
                "mode": "cut",
                "s0": c.s0,
                "delta": c.delta,
                "k": c.k,
                "seed": c.seed,
                "samples": c.total,
                "accepted": c.accepted,
                "fraction": c.fraction,
                "sigma": c.sigma,
                "z_score": c.z_score(),
                "f_offset_range": [lo, hi],
            });
            let cols = ["index", "theta1_hex", "theta2_hex", "theta1_f64", "theta2_f64", "f_offset"];
            (result, Table { columns: cols.map(String::from).to_vec(), rows })
        }
        Mode::Graph => {
            let gm = GraphMeasure::new(a.s0, k, a.grid_bits)?;
            let tf: GraphTestFn = a.test_fn.parse()?;
            let z = graph_integrate(&gm, tf);
            let rows = (0..gm.grid_len())
                .map(|j| {
                    let p = gm.point(j);
                    vec![j.to_string(), hex64(p.t1), hex64(p.t2), dec(p.theta1()), dec(p.theta2())]
                })
                .collect();
            let result = json!({
                "mode": "graph",
                "s0": a.s0,
                "k": k,
                "grid_bits": a.grid_bits,
                "grid_points": gm.grid_len(),
                "test_fn": tf,
                "integral_re": z.re,
                "integral_im": z.im,
            });
            let cols = ["j", "theta1_hex", "theta2_hex", "theta1_f64", "theta2_f64"];
            (result, Table { columns: cols.map(String::from).to_vec(), rows })
        }
        Mode::Birkhoff => {
            let sys = system(cfg)?;
            let p = parse_point(&a.start)?;
            let obs: Observable = a.observable.parse()?;
            let r = birkhoff(&sys, &p, obs, a.n)?;
            let rows = r
                .ns
                .iter()
                .zip(&r.averages)
                .map(|(n, z)| vec![n.to_string(), dec(z[0]), dec(z[1])])
                .collect();
            let result = merge(json!({ "mode": "birkhoff" }), to_value(&r));
            (result, Table { columns: ["n", "re", "im"].map(String::from).to_vec(), rows })
        }
        Mode::Kb => {
            let maps = parse_maps(&a.maps, k)?;
            let (x, y) = parse_point(&a.start)?.to_f64();
            let opts = KbOptions {
                n: a.n as usize,
                seed: cfg.seed,
                initial: Point64::from_f64(x, y),
                degree: a.degree,
                ..Default::default()
            };
            let r = krylov_bogolyubov(&maps, &opts)?;
            let mut rows = Vec::new();
            for (c, ds) in r.checkpoints.iter().zip(&r.defect_history) {
                for (g, d) in r.generators.iter().zip(ds) {
                    rows.push(vec![c.to_string(), g.clone(), dec(*d)]);
                }
            }
            let result = merge(json!({ "mode": "kb" }), to_value(&r));
            let cols = ["checkpoint", "generator", "defect"];
            (result, Table { columns: cols.map(String::from).to_vec(), rows })
        }
    };
    let report = Report {
        command: "measure",
        args: to_value(a),
        budgets,
        result,
        table: Some(table),
    };
    Ok((report, Ok(())))
}

#[derive(Debug, Args, Serialize)]
pub struct TowerArgs {
    #[arg(long, default_value_t = 2)]
    genus: usize,
    /// Every nontrivial reduced word up to this length is a target.
    #[arg(long, default_value_t = 4)]
    max_word_len: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = TowerOptions::default().restarts)]
    restarts: usize,
}

pub fn tower(cfg: &RunConfig, a: &TowerArgs) -> Outcome {
    let group = SurfaceGroup::new(a.genus)?;
    let mut words = Vec::new();
    for w in all_reduced_words(2 * a.genus, a.max_word_len) {
        if !group.is_trivial(&w)? {
            words.push(w);
        }
    }
    let opts = TowerOptions {
        max_depth: a.depth,
        seed: cfg.seed,
        restarts: a.restarts,
        ..Default::default()
    };
    let t = open_all(&group, &words, &opts)?;
    let ver = verify_tower(&t, &words).map_err(|e| Failure::Verify(e.to_string()))?;
    let survivors = t.survivors().count();
    let rows = t
        .words
        .iter()
        .zip(&ver.words)
        .map(|(w, v)| vec![w.text.clone(), level(w.open_level), level(v.all_lifts_open_level)])
        .collect();
    let check = if t.complete {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "{survivors} of {} words still lift to closed curves at depth {}",
            words.len(),
            t.depth()
        )))
    };
    let report = Report {
        command: "tower",
        args: to_value(a),
        budgets: json!({
            "max_depth": opts.max_depth,
            "exhaustive_dim": opts.exhaustive_dim,
            "restarts": opts.restarts,
            "lookahead": opts.lookahead,
        }),
        result: json!({
            "tower": t,
            "verification": {
                "all_open": ver.all_open,
                "depth": ver.depth,
                "words_checked": ver.words.len(),
                "survivors": survivors,
            },
        }),
        table: Some(Table {
            columns: ["word", "open_level", "all_lifts_open_level"].map(String::from).to_vec(),
            rows,
        }),
    };
    Ok((report, check))
}

fn level(l: Option<usize>) -> String {
    l.map_or_else(|| "closed".into(), |k| k.to_string())
}

pub fn tower_verify(_cfg: &RunConfig, file: &Path) -> Outcome {
    let text = fs::read_to_string(file).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("not JSON: {e}")))?;
    let body = doc.get("tower").cloned().unwrap_or(doc);
    let t: CoverTower = serde_json::from_value(body).map_err(|e| Failure::Usage(format!("not a tower: {e}")))?;
    let words: Vec<_> = t.words.iter().map(|w| w.word.clone()).collect();
    let ver = verify_tower(&t, &words).map_err(|e| Failure::Verify(e.to_string()))?;
    let rows = ver
        .words
        .iter()
        .map(|w| vec![w.text.clone(), level(w.claimed), level(w.oracle), level(w.all_lifts_open_level)])
        .collect();
    let report = Report {
        command: "tower verify",
        args: json!({ "file": file.display().to_string() }),
        budgets: json!({ "depth": t.depth() }),
        result: to_value(&ver),
        table: Some(Table {
            columns: ["word", "claimed", "oracle", "all_lifts_open_level"].map(String::from).to_vec(),
            rows,
        }),
    };
    Ok((report, Ok(())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_and_maps_parse() {
        let p = parse_point("0x1p-1, 0.25").unwrap();
        assert_eq!(p.to_f64(), (0.5, 0.25));
        assert!(parse_point("0.5").is_err());
        assert_eq!(parse_maps("rotation:0.5,furstenberg,attractor:0.1", 1).unwrap().len(), 3);
        assert!(parse_maps("attractor", 1).is_err());
        assert!(parse_maps("shear:1", 1).is_err());
    }
}
