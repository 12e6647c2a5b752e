//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{chi_square, PowerLawSampler};
use dmpa_core::analytic::{
    contraction_diagnostic, exponent_constants_red, solve_fixed_point, DEFAULT_FD_STEP, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
use dmpa_core::estimate::{fit_power_law, DegreeHistogram, Direction};
use dmpa_core::model::{AnalyticParams, Color, ThetaPair};
use dmpa_core::runner::{cmd_compare, cmd_gce, cmd_simulate, cmd_sweep, parse_config, RunConfig};
use dmpa_core::sim::{sample_by_in_degree, sample_by_out_degree, GrowthGraph};
use dmpa_core::{exponents_both_groups, GceVerdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> RunConfig {
    let path = configs_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_config(&text, &[]).unwrap()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Closed forms written out independently: `(theta_in, theta_out, [C_in(R), C_out(R), C_in(B), C_out(B)])`.
fn closed_form(case: usize, r: f64, p: f64, q: f64, d: f64) -> (f64, f64, [f64; 4]) {
    match case {
        1 => {
            let den = d * (p + q) + 1.0;
            let (ci, co) = ((1.0 - q) / den, (1.0 - p) / den);
            (r, r, [ci, co, ci, co])
        }
        2 => {
            let (ci, co) = (p / (d + 1.0), (1.0 - p) / (d + 1.0));
            (r, r, [ci, co, ci, co])
        }
        3 => {
            let t = r * (1.0 - 2.0 * p) + p;
            (
                t,
                1.0 - t,
                [
                    p * (1.0 - r) / (r * (1.0 + d) + p * (1.0 - 2.0 * r)),
                    (1.0 - p) * (1.0 - r) / (r * (d - 1.0) + p * (2.0 * r - 1.0) + 1.0),
                    p * r / ((1.0 - r) * (1.0 + d) + p * (2.0 * r - 1.0)),
                    (1.0 - p) * r / ((1.0 - r) * (d - 1.0) + p * (1.0 - 2.0 * r) + 1.0),
                ],
            )
        }
        _ => {
            let t_in = r * (p * d * (1.0 - (p + q) * (1.0 - r)) + q * (1.0 + d))
                / (p * (1.0 - r + d) + q * (1.0 + d));
            let t_out = 1.0 - p * (1.0 - r);
            let ci = (1.0 - p * (1.0 - r) - q) / (d * (p + q) + 1.0);
            let co = (1.0 - p) / (p * (r * (1.0 + d) - 1.0) + q * r * d + 1.0);
            (t_in, t_out, [ci, co, ci, 0.0])
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for case in 1..=4 {
        for _ in 0..200 {
            let r = rng.random_range(0.05..0.95);
            let d = rng.random_range(2.0..16.0);
            let (p, q, rho_b, rho_r) = match case {
                1 => {
                    let p = rng.random_range(0.02..0.9);
                    (p, rng.random_range(0.01..(1.0 - p)), 0.5, 0.5)
                }
                2 | 3 => {
                    let p = rng.random_range(0.02..0.98);
                    let rho = if case == 2 { 1.0 } else { 0.0 };
                    (p, 1.0 - p, rho, rho)
                }
                _ => {
                    let p = rng.random_range(0.02..0.9);
                    (p, rng.random_range(0.01..(1.0 - p)), 0.0, 1.0)
                }
            };
            let ap = AnalyticParams::new(r, p, q, rho_b, rho_r, d);
            let fp = match solve_fixed_point(&ap, DEFAULT_TOL, DEFAULT_MAX_ITER, ThetaPair::new(0.5, 0.5)) {
                Ok(fp) => fp,
                Err(e) => {
                    failures.push(format!("case {case} {ap:?}: {e}"));
                    continue;
                }
            };
            let th = fp.theta_star;
            let red = exponent_constants_red(&ap, &th).unwrap();
            let blue = exponent_constants_red(&ap.swapped(), &th.swapped()).unwrap();
            let (t_in, t_out, cs) = closed_form(case, r, p, q, d);
            let got = [th.theta_in(), th.theta_out(), red.c_in, red.c_out, blue.c_in, blue.c_out];
            let want = [t_in, t_out, cs[0], cs[1], cs[2], cs[3]];
            for (g, w) in got.iter().zip(&want) {
                let err = (g - w).abs();
                worst = worst.max(err);
                if err > 1e-9 {
                    failures.push(format!("case {case} r={r} p={p} q={q} d={d}: {g} vs {w}"));
                }
            }
        }
    }
    let el = start.elapsed();
    let pass = failures.is_empty() && el < Duration::from_secs(10);
    let first = failures.first().cloned().unwrap_or_default();
    outcome(
        pass,
        format!(
            "800 points, max abs error {worst:.3e}, {} mismatches, {:.2}s {first}",
            failures.len(),
            secs(el)
        ),
    )
}

/// The in-degree rate constant as a sum of per-event acceptance terms.
fn rate_constant_oracle(ap: &AnalyticParams, th: &ThetaPair) -> f64 {
    let (r, p, q, d) = (ap.r(), ap.p(), ap.q(), ap.delta());
    let (rb, rr) = (ap.rho_blue(), ap.rho_red());
    let s = p + q;
    let (ti, to) = (th.theta_in(), th.theta_out());
    let red_in = ti + d * s * r;
    let blue_in = 1.0 - ti + d * s * (1.0 - r);
    let red_out = to + d * s * r;
    let blue_out = 1.0 - to + d * s * (1.0 - r);
    let t1 = p * (1.0 - r) * (1.0 - rr) / (1.0 + d * s - red_in * rr - blue_in * (1.0 - rb));
    let t2 = p * r * rr / (1.0 + d * s - red_in * (1.0 - rr) - blue_in * rb);
    let w3 = 1.0 - p - q;
    let t3 = if w3.abs() < 1e-15 {
        0.0
    } else {
        w3 * (blue_out * (1.0 - rr) + red_out * rr)
            / ((1.0 + s * d).powi(2)
                - blue_out * blue_in * (1.0 - rb)
                - blue_out * red_in * rr
                - red_out * blue_in * rb
                - red_out * red_in * (1.0 - rr))
    };
    t1 + t2 + t3
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..100 {
        let p = rng.random_range(0.02..0.9);
        let q = rng.random_range(0.01..(1.0 - p));
        let ap = AnalyticParams::new(
            rng.random_range(0.05..0.95),
            p,
            q,
            rng.random(),
            rng.random(),
            rng.random_range(2.0..16.0),
        );
        match exponents_both_groups(&ap, DEFAULT_TOL, DEFAULT_MAX_ITER, None) {
            Ok(rep) => {
                let a = rate_constant_oracle(&ap, &rep.theta_star);
                worst = worst.max((a - rep.red.c_in).abs());
            }
            Err(_) => errors += 1,
        }
    }
    let el = start.elapsed();
    outcome(
        errors == 0 && worst <= 1e-9 && el < Duration::from_secs(5),
        format!("100 points, max |A - C_in(R)| {worst:.3e}, {errors} solver errors, {:.2}s", secs(el)),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
    let (mut spread, mut norm) = (0.0f64, 0.0f64);
    let mut errors = 0;
    for _ in 0..50 {
        let s = rng.random_range(0.2..1.0);
        let p = s * rng.random_range(0.0..1.0);
        let ap = AnalyticParams::new(
            rng.random_range(0.05..0.95),
            p,
            s - p,
            rng.random(),
            rng.random(),
            rng.random_range(8.0..16.0),
        );
        let sols: Vec<ThetaPair> = corners
            .iter()
            .filter_map(|&(a, b)| solve_fixed_point(&ap, DEFAULT_TOL, DEFAULT_MAX_ITER, ThetaPair::new(a, b)).ok())
            .map(|f| f.theta_star)
            .collect();
        if sols.len() != 4 {
            errors += 1;
            continue;
        }
        for a in &sols {
            for b in &sols {
                spread = spread.max((a.theta_in() - b.theta_in()).abs().max((a.theta_out() - b.theta_out()).abs()));
            }
        }
        match contraction_diagnostic(&ap, &sols[0], DEFAULT_FD_STEP) {
            Ok(n) => norm = norm.max(n),
            Err(_) => errors += 1,
        }
    }
    outcome(
        errors == 0 && spread <= 1e-11 && norm < 1.0,
        format!("50 points, max corner spread {spread:.3e}, max Jacobian norm {norm:.4}, {errors} errors"),
    )
}

fn criterion_4() -> Outcome {
    let cfg = load("homophily_sweep.conf");
    let start = Instant::now();
    let table = cmd_sweep(&cfg);
    let el = start.elapsed();
    let mut groups: BTreeMap<(u64, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for row in &table.rows {
        let Ok(rep) = &row.outcome else { continue };
        let ap = &rep.params;
        if ap.rho_blue() == 0.5 && ap.rho_red() == 0.5 {
            groups
                .entry((ap.p().to_bits(), ap.q().to_bits()))
                .or_default()
                .push((rep.red.gamma_in().value(), rep.red.gamma_out().value()));
        }
    }
    let mut spread = 0.0f64;
    let mut order_ok = true;
    for ((pb, qb), vals) in &groups {
        let (p, q) = (f64::from_bits(*pb), f64::from_bits(*qb));
        for v in vals {
            spread = spread.max((v.0 - vals[0].0).abs()).max((v.1 - vals[0].1).abs());
            if (v.1 < v.0) != (p < q) {
                order_ok = false;
            }
        }
    }
    let pass = el < Duration::from_secs(60)
        && table.rows.len() == cfg.cell_count()
        && table.failures() == 0
        && groups.len() == 3
        && spread < 1e-9
        && order_ok;
    outcome(
        pass,
        format!(
            "{} cells, {} failed, {:.2}s, unbiased r-spread {spread:.3e} over {} (p,q) rows, gamma_out < gamma_in iff p < q: {order_ok}",
            table.rows.len(),
            table.failures(),
            secs(el),
            groups.len()
        ),
    )
}

fn criteria_5_and_6() -> (Outcome, Outcome) {
    let cfg = load("case_i.conf");
    let start = Instant::now();
    let runs = match cmd_simulate(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let o = || outcome(false, format!("simulation failed: {e}"));
            return (o(), o());
        }
    };
    let el = start.elapsed();
    let n = runs.len() as f64;
    let (mut dev_in, mut dev_out) = (0.0, 0.0);
    let mut worst_frac = 0.0f64;
    let target = (cfg.params.p + cfg.params.q) * cfg.params.r;
    for run in &runs {
        let th = run.graph.theta().unwrap();
        dev_in += (th.theta_in() - 0.35).abs() / n;
        dev_out += (th.theta_out() - 0.35).abs() / n;
        let frac = run.graph.group_size(Color::Red) as f64 / cfg.steps as f64;
        worst_frac = worst_frac.max((frac - target).abs());
    }
    let ok_runs = runs.len() == 10 && cfg.steps == 1_000_000;
    (
        outcome(
            ok_runs && dev_in < 0.02 && dev_out < 0.02 && el < Duration::from_secs(120),
            format!(
                "{} seeds x {} steps, mean |dtheta_in| {dev_in:.4}, mean |dtheta_out| {dev_out:.4}, {:.2}s",
                runs.len(),
                cfg.steps,
                secs(el)
            ),
        ),
        outcome(
            ok_runs && worst_frac < 0.02,
            format!("max |n(R)/T - (p+q)r| {worst_frac:.4} against {target:.4}"),
        ),
    )
}

fn criterion_7() -> Outcome {
    let cfg = load("heavy_tail.conf");
    let start = Instant::now();
    let res = match cmd_compare(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("compare failed: {e}")),
    };
    let el = start.elapsed();
    let mut pass = el < Duration::from_secs(300) && cfg.seeds == 10 && cfg.steps == 1_000_000;
    let mut parts = Vec::new();
    for row in res.table.rows.iter().filter(|r| r.label == "pooled" && r.direction == Direction::Out) {
        match &row.fit {
            Ok(f) => {
                let a = row.gamma_analytic.value();
                pass &= (f.gamma_hat - a).abs() <= 0.3;
                parts.push(format!("{} fit {:.3} analytic {:.3}", row.group, f.gamma_hat, a));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{} fit failed: {e}", row.group));
            }
        }
    }
    pass &= parts.len() == 2;
    outcome(pass, format!("pooled out-degree: {}, {:.2}s", parts.join("; "), secs(el)))
}

fn criterion_8() -> Outcome {
    let cfg = load("case_iv.conf");
    let res = match cmd_gce(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("gce failed: {e}")),
    };
    let verdict = res.analytic.as_ref().map(|a| a.verdict.clone()).unwrap_or_default();
    let expected = GceVerdict::BlueFacesGce.to_string();
    let away = res
        .empirical
        .iter()
        .filter(|c| {
            [4, 8, 16]
                .iter()
                .all(|k| c.curve.iter().any(|s| s.k == *k && s.ratio.value() > 1.0))
        })
        .count();
    outcome(
        verdict == expected && res.empirical.len() == 10 && away >= 8,
        format!(
            "analytic verdict {verdict}, {away} of {} seeds with ratio > 1 at k = 4, 8, 16",
            res.empirical.len()
        ),
    )
}

fn sampler_fixtures() -> Vec<(&'static str, GrowthGraph, f64)> {
    use Color::{Blue as B, Red as R};
    vec![
        (
            "path",
            GrowthGraph::from_edges(vec![R, B, R], vec![(0, 1), (0, 2), (1, 2)]).unwrap(),
            1.0,
        ),
        ("seed pair", GrowthGraph::default(), 0.5),
        (
            "star",
            GrowthGraph::from_edges(vec![R, B, B, B, R], vec![(1, 0), (2, 0), (3, 0), (4, 0), (0, 4)]).unwrap(),
            0.2,
        ),
        (
            "isolated node",
            GrowthGraph::from_edges(vec![B, R, R, B], vec![(0, 1), (1, 0), (0, 2), (2, 2)]).unwrap(),
            3.0,
        ),
        (
            "multi-edge",
            GrowthGraph::from_edges(vec![R, B, B], vec![(0, 1), (0, 1), (0, 1), (2, 0), (1, 2)]).unwrap(),
            7.5,
        ),
    ]
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let draws = 100_000;
    let mut pass = true;
    let mut worst = (0.0f64, String::new());
    for (name, g, d) in sampler_fixtures() {
        let total = g.edge_count() as f64 + g.node_count() as f64 * d;
        for (dir, degs) in [("in", g.in_degrees()), ("out", g.out_degrees())] {
            let probs: Vec<f64> = degs.iter().map(|&k| (k as f64 + d) / total).collect();
            let mut obs = vec![0u64; g.node_count()];
            for _ in 0..draws {
                let u = if dir == "in" {
                    sample_by_in_degree(&g, d, &mut rng)
                } else {
                    sample_by_out_degree(&g, d, &mut rng)
                };
                obs[u as usize] += 1;
            }
            let (stat, crit, ok) = chi_square(&obs, &probs, 0.001);
            pass &= ok;
            if stat / crit > worst.0 {
                worst = (stat / crit, format!("{name}/{dir}: {stat:.2} vs critical {crit:.2}"));
            }
        }
    }
    outcome(pass, format!("5 fixtures x 2 samplers x {draws} draws, worst {}", worst.1))
}

fn criterion_10() -> Outcome {
    let sampler = PowerLawSampler::new(2.5, 1);
    let sizes = [1_000usize, 10_000, 100_000];
    let mut medians = Vec::new();
    let mut all_in_band = true;
    let mut errors = 0;
    for (si, &n) in sizes.iter().enumerate() {
        let mut errs = Vec::new();
        for rep in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 * si as u64 + rep);
            let mut h = DegreeHistogram::new(Color::Red, Direction::In);
            for _ in 0..n {
                *h.counts.entry(sampler.sample(&mut rng)).or_insert(0) += 1;
            }
            match fit_power_law(&h, None) {
                Ok(f) => {
                    errs.push((f.gamma_hat - 2.5).abs());
                    if n == 100_000 && !(2.4..=2.6).contains(&f.gamma_hat) {
                        all_in_band = false;
                    }
                }
                Err(_) => errors += 1,
            }
        }
        errs.sort_by(f64::total_cmp);
        medians.push(errs.get(errs.len() / 2).copied().unwrap_or(f64::NAN));
    }
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    outcome(
        errors == 0 && all_in_band && decreasing,
        format!(
            "median |gamma_hat - 2.5| at n = 1e3, 1e4, 1e5: {:.4}, {:.4}, {:.4}; all n = 1e5 fits in [2.4, 2.6]: {all_in_band}",
            medians[0], medians[1], medians[2]
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
    ];
    let (c5, c6) = criteria_5_and_6();
    results.push((5, c5));
    results.push((6, c6));
    results.push((7, criterion_7()));
    results.push((8, criterion_8()));
    results.push((9, criterion_9()));
    results.push((10, criterion_10()));
    let mut failed = 0;
    for (n, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} {tag}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
