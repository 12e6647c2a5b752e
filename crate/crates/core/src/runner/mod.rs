//! Batch commands behind the `dmpa` binary. Each command is a pure function
//! of its resolved configuration; [`cli`] adds file output and the manifest.

pub mod cli;
mod config;

pub use config::{parse_config, Axis, GceMode, RunConfig, DEFAULT_K_GRID};

use std::fmt;
use std::io;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{exponents_both_groups, glass_ceiling, AnalyticError, ExponentReport, DEFAULT_GCE_TOL};
use crate::estimate::{compare_summary, gce_curve, ComparisonTable, DegreeSummary, ExtRatio, GceStatistic};
use crate::ext;
use crate::model::{analysis_view, validate_params, NotAnalytic, ParamErrors};
use crate::sim::{self, GrowthGraph, SimConfig, SimError, Trajectory};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamErrors),
    #[error("not in the analytic regime: {0}")]
    NotAnalytic(#[from] NotAnalytic),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// 2 config, 3 non-convergence or other analytic failure, 4 degenerate
    /// simulation, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Params(_) | RunError::NotAnalytic(_) => 2,
            RunError::Analytic(_) => 3,
            RunError::Sim(SimError::InvalidParams(_))
            | RunError::Sim(SimError::InvalidInitialGraph(_))
            | RunError::Sim(SimError::InvalidMaxRejections) => 2,
            RunError::Sim(SimError::Io(_)) | RunError::Io { .. } => 5,
            RunError::Sim(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of stream `index` under `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ index)
}

/// Seeds used for the `cfg.seeds` simulation runs.
pub fn run_seeds(cfg: &RunConfig) -> Vec<u64> {
    (0..cfg.seeds).map(|i| derive_seed(cfg.seed, i)).collect()
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<ExponentReport> {
    let params = validate_params(cfg.params)?;
    let ap = analysis_view(&params)?;
    Ok(exponents_both_groups(&ap, cfg.tol, cfg.max_iter, None)?)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub cell: usize,
    pub axis_labels: Vec<String>,
    pub seed: u64,
    pub outcome: std::result::Result<ExponentReport, String>,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axis_names: Vec<String>,
    pub rows: Vec<SweepRow>,
}

const REPORT_COLUMNS: [&str; 16] = [
    "theta_in_star",
    "theta_out_star",
    "c_in_red",
    "c_out_red",
    "c_in_blue",
    "c_out_blue",
    "gamma_in_red",
    "gamma_out_red",
    "gamma_in_blue",
    "gamma_out_blue",
    "red_score",
    "blue_score",
    "gce_verdict",
    "derivation",
    "contraction_norm",
    "iterations",
];

fn csv_cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => String::new(),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell");
        for a in &self.axis_names {
            out.push(',');
            out.push_str(a);
        }
        out.push_str(",seed,");
        out.push_str(&REPORT_COLUMNS.join(","));
        out.push_str(",status\n");
        for row in &self.rows {
            let mut fields = vec![row.cell.to_string()];
            fields.extend(row.axis_labels.iter().cloned());
            fields.push(row.seed.to_string());
            match &row.outcome {
                Ok(rep) => {
                    let js = rep.to_json();
                    fields.extend(REPORT_COLUMNS.iter().map(|c| csv_cell(&js[*c])));
                    fields.push("ok".into());
                }
                Err(msg) => {
                    fields.extend(REPORT_COLUMNS.iter().map(|_| "nan".to_string()));
                    fields.push(format!("error: {}", msg.replace([',', '\n'], ";")));
                }
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Solves every cell of the axis grid. Failing cells keep their row with
/// the error recorded; rows are in grid order regardless of scheduling.
pub fn cmd_sweep(cfg: &RunConfig) -> SweepTable {
    let rows = (0..cfg.cell_count())
        .into_par_iter()
        .map(|cell| {
            let idx = cfg.cell_indices(cell);
            let axis_labels = cfg.axes.iter().zip(&idx).map(|(a, &i)| a.label(i)).collect();
            let outcome = cfg
                .cell(cell)
                .and_then(|c| cmd_solve(&c))
                .map_err(|e| e.to_string());
            SweepRow {
                cell,
                axis_labels,
                seed: derive_seed(cfg.seed, cell as u64),
                outcome,
            }
        })
        .collect();
    SweepTable {
        axis_names: cfg.axes.iter().map(|a| a.name.clone()).collect(),
        rows,
    }
}

#[derive(Debug, Clone)]
pub struct SimRun {
    pub seed: u64,
    pub graph: GrowthGraph,
    pub trajectory: Trajectory,
}

fn sim_config(cfg: &RunConfig, seed: u64) -> SimConfig {
    SimConfig {
        max_rejections: cfg.max_rejections,
        ..SimConfig::new(cfg.params, seed, cfg.steps)
    }
}

/// One simulation per seed from [`run_seeds`], in seed order.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<SimRun>> {
    run_seeds(cfg)
        .into_par_iter()
        .map(|seed| {
            let (graph, trajectory) = sim::simulate(&sim_config(cfg, seed))?;
            Ok(SimRun {
                seed,
                graph,
                trajectory,
            })
        })
        .collect()
}

/// Direction of an empirical glass ceiling curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    TowardZero,
    TowardOne,
    TowardInfinity,
    Indeterminate,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::TowardZero => "toward_zero",
            Trend::TowardOne => "toward_one",
            Trend::TowardInfinity => "toward_infinity",
            Trend::Indeterminate => "indeterminate",
        })
    }
}

/// Ratios further than this factor from 1 count as having moved away.
pub const TREND_FACTOR: f64 = 1.5;

/// `TowardInfinity` when every defined ratio exceeds 1 and one is infinite or
/// beyond [`TREND_FACTOR`]; `TowardZero` mirrors it; otherwise `TowardOne`.
pub fn classify_trend(curve: &[GceStatistic]) -> Trend {
    let vals: Vec<f64> = curve
        .iter()
        .filter(|s| s.ratio != ExtRatio::Indeterminate)
        .map(|s| s.ratio.value())
        .collect();
    if vals.is_empty() {
        return Trend::Indeterminate;
    }
    let far = |v: &f64| v.ln().abs() > TREND_FACTOR.ln();
    if vals.iter().all(|v| *v > 1.0) && vals.iter().any(far) {
        Trend::TowardInfinity
    } else if vals.iter().all(|v| *v < 1.0) && vals.iter().any(far) {
        Trend::TowardZero
    } else {
        Trend::TowardOne
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticGce {
    pub verdict: String,
    pub red_score: serde_json::Value,
    pub blue_score: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedCurve {
    pub seed: u64,
    pub curve: Vec<GceStatistic>,
    pub trend: Trend,
}

#[derive(Debug, Clone, Serialize)]
pub struct GceOutcome {
    /// Present whenever the parameters admit the analytic view.
    pub analytic: Option<AnalyticGce>,
    pub empirical: Vec<SeedCurve>,
    /// Most common trend over seeds; ties resolve to the first in enum order.
    pub majority: Option<Trend>,
}

fn analytic_gce(cfg: &RunConfig) -> Result<AnalyticGce> {
    let rep = cmd_solve(cfg)?;
    Ok(match glass_ceiling(&rep, DEFAULT_GCE_TOL) {
        Ok(v) => AnalyticGce {
            verdict: v.verdict.to_string(),
            red_score: ext::to_json(v.red_score),
            blue_score: ext::to_json(v.blue_score),
        },
        Err(AnalyticError::Indeterminate { red, blue }) => AnalyticGce {
            verdict: "indeterminate".into(),
            red_score: ext::to_json(red),
            blue_score: ext::to_json(blue),
        },
        Err(e) => return Err(e.into()),
    })
}

pub fn cmd_gce(cfg: &RunConfig) -> Result<GceOutcome> {
    match cfg.mode {
        GceMode::Analytic => Ok(GceOutcome {
            analytic: Some(analytic_gce(cfg)?),
            empirical: Vec::new(),
            majority: None,
        }),
        GceMode::Empirical => {
            let analytic = match analysis_view(&cfg.params) {
                Ok(_) => Some(analytic_gce(cfg)?),
                Err(_) => None,
            };
            let empirical = run_seeds(cfg)
                .into_par_iter()
                .map(|seed| {
                    let (g, _) = sim::simulate(&sim_config(cfg, seed))?;
                    let curve = gce_curve(&g, &cfg.k_grid).map_err(|e| RunError::Config(e.to_string()))?;
                    let trend = classify_trend(&curve);
                    Ok(SeedCurve { seed, curve, trend })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut counts = std::collections::BTreeMap::new();
            for c in &empirical {
                *counts.entry(c.trend).or_insert(0usize) += 1;
            }
            let majority = counts
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(t, _)| *t);
            Ok(GceOutcome {
                analytic,
                empirical,
                majority,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub report: ExponentReport,
    pub table: ComparisonTable,
    /// Rows whose fit failed.
    pub warnings: Vec<String>,
}

/// Analytic report against fits on each seed's graph, then on the pooled
/// histograms of all seeds (label `pooled`).
pub fn cmd_compare(cfg: &RunConfig) -> Result<CompareOutcome> {
    let report = cmd_solve(cfg)?;
    let summaries = run_seeds(cfg)
        .into_par_iter()
        .map(|seed| {
            let (g, _) = sim::simulate(&sim_config(cfg, seed))?;
            Ok((seed, DegreeSummary::from_graph(&g)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut parts: Vec<ComparisonTable> = summaries
        .par_iter()
        .map(|(seed, s)| compare_summary(&report, s, &seed.to_string()))
        .collect();
    let pooled = DegreeSummary::pool(summaries.iter().map(|(_, s)| s));
    parts.push(compare_summary(&report, &pooled, "pooled"));
    let mut table = ComparisonTable::default();
    for p in parts {
        table.extend(p);
    }
    let warnings = table
        .rows
        .iter()
        .filter_map(|r| {
            r.fit
                .as_ref()
                .err()
                .map(|e| format!("{} {} {}: {e}", r.label, r.group, r.direction))
        })
        .collect();
    Ok(CompareOutcome {
        report,
        table,
        warnings,
    })
}
