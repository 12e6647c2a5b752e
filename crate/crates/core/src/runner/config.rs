//! Flat `key = value` configuration with `#` comments.
//!
//! Homophily and delta keys come in a shared form (`rho_blue`, `rho_red`,
//! `delta`) and per-event/per-direction forms (`rho_blue_e2`, `delta_in`);
//! the specific form wins. Sweep axes are declared as `axis.<key> = <grid>`
//! where the grid is `start:stop:step` (inclusive), a comma list, or for the
//! joint key `p+q` a comma list of `p/q` pairs. Axes expand in declaration
//! order, the first being outermost.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::RunError;
use crate::analytic::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::model::{HomophilyMatrix, ModelParams};
use crate::sim::DEFAULT_MAX_REJECTIONS;

const PARAM_KEYS: &[&str] = &[
    "r",
    "p",
    "q",
    "rho_blue",
    "rho_red",
    "rho_blue_e1",
    "rho_red_e1",
    "rho_blue_e2",
    "rho_red_e2",
    "rho_blue_e3",
    "rho_red_e3",
    "delta",
    "delta_in",
    "delta_out",
];

const RUN_KEYS: &[&str] = &[
    "seed",
    "steps",
    "seeds",
    "max_rejections",
    "tol",
    "max_iter",
    "k_grid",
    "mode",
];

pub const DEFAULT_K_GRID: &[u64] = &[2, 4, 8, 16, 32, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GceMode {
    Analytic,
    Empirical,
}

/// One sweep axis: the keys it sets and the value assigned per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    keys: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl Axis {
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    /// Grid point `i` rendered as it appears in CSV output.
    pub fn label(&self, i: usize) -> String {
        self.values[i]
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// A fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
    pub params: ModelParams,
    pub seed: u64,
    pub steps: u64,
    pub seeds: u64,
    pub max_rejections: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub k_grid: Vec<u64>,
    pub mode: GceMode,
    pub axes: Vec<Axis>,
}

fn cfg_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

/// Parses `text` and applies `overrides` in order.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, RunError> {
    let mut entries = BTreeMap::new();
    let mut axis_order = Vec::new();
    let mut put = |k: &str, v: &str, entries: &mut BTreeMap<String, String>| -> Result<(), RunError> {
        let k = k.trim();
        check_key(k)?;
        if let Some(a) = k.strip_prefix("axis.") {
            if !axis_order.iter().any(|x: &String| x == a) {
                axis_order.push(a.to_string());
            }
        }
        entries.insert(k.to_string(), v.trim().to_string());
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| cfg_err(format!("line {}: expected key = value", i + 1)))?;
        put(k, v, &mut entries)?;
    }
    for (k, v) in overrides {
        put(k, v, &mut entries)?;
    }
    let axes = axis_order
        .iter()
        .map(|a| parse_axis(a, &entries[&format!("axis.{a}")]))
        .collect::<Result<Vec<_>, _>>()?;
    build(entries, axes)
}

fn check_key(k: &str) -> Result<(), RunError> {
    if let Some(a) = k.strip_prefix("axis.") {
        if a == "p+q" || PARAM_KEYS.contains(&a) {
            return Ok(());
        }
        return Err(cfg_err(format!("axis {a:?} is not a model parameter")));
    }
    if PARAM_KEYS.contains(&k) || RUN_KEYS.contains(&k) {
        Ok(())
    } else {
        Err(cfg_err(format!("unknown key {k:?}")))
    }
}

/// Nearest double to the 12-decimal rounding of `x`, so that the grid
/// `0:1:0.02` hits `0.5` exactly.
fn snap(x: f64) -> f64 {
    format!("{x:.12}").parse().expect("formatted float parses")
}

fn num(key: &str, v: &str) -> Result<f64, RunError> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| cfg_err(format!("{key}: {v:?} is not a number")))
}

fn parse_axis(name: &str, grid: &str) -> Result<Axis, RunError> {
    let key = format!("axis.{name}");
    let (keys, values): (Vec<String>, Vec<Vec<f64>>) = if name == "p+q" {
        let vals = grid
            .split(',')
            .map(|pair| {
                let (p, q) = pair
                    .split_once('/')
                    .ok_or_else(|| cfg_err(format!("{key}: expected p/q pairs, got {pair:?}")))?;
                Ok(vec![num(&key, p)?, num(&key, q)?])
            })
            .collect::<Result<Vec<_>, RunError>>()?;
        (vec!["p".into(), "q".into()], vals)
    } else if grid.contains(':') {
        let parts: Vec<&str> = grid.split(':').collect();
        let [a, b, s] = parts.as_slice() else {
            return Err(cfg_err(format!("{key}: expected start:stop:step")));
        };
        let (a, b, s) = (num(&key, a)?, num(&key, b)?, num(&key, s)?);
        if !(s > 0.0) || b < a {
            return Err(cfg_err(format!("{key}: need step > 0 and stop >= start")));
        }
        let n = ((b - a) / s + 1e-9).floor() as usize;
        (
            vec![name.into()],
            (0..=n).map(|i| vec![snap(a + i as f64 * s)]).collect(),
        )
    } else {
        let vals = grid
            .split(',')
            .map(|v| Ok(vec![num(&key, v)?]))
            .collect::<Result<Vec<_>, RunError>>()?;
        (vec![name.into()], vals)
    };
    if values.is_empty() {
        return Err(cfg_err(format!("{key}: empty grid")));
    }
    Ok(Axis {
        name: name.to_string(),
        keys,
        values,
    })
}

fn build(entries: BTreeMap<String, String>, axes: Vec<Axis>) -> Result<RunConfig, RunError> {
    let get = |k: &str| entries.get(k).map(String::as_str);
    let req = |k: &str| -> Result<f64, RunError> {
        num(k, get(k).ok_or_else(|| cfg_err(format!("missing key {k:?}")))?)
    };
    let either = |specific: &str, shared: &str| -> Result<f64, RunError> {
        match get(specific) {
            Some(v) => num(specific, v),
            None => req(shared).map_err(|_| cfg_err(format!("missing key {shared:?} (or {specific:?})"))),
        }
    };
    let matrix = |e: u8| -> Result<HomophilyMatrix, RunError> {
        Ok(HomophilyMatrix::new(
            either(&format!("rho_blue_e{e}"), "rho_blue")?,
            either(&format!("rho_red_e{e}"), "rho_red")?,
        ))
    };
    let params = ModelParams {
        r: req("r")?,
        p: req("p")?,
        q: req("q")?,
        e1: matrix(1)?,
        e2: matrix(2)?,
        e3: matrix(3)?,
        delta_in: either("delta_in", "delta")?,
        delta_out: either("delta_out", "delta")?,
    };
    let int = |k: &str, default: u64| -> Result<u64, RunError> {
        match get(k) {
            None => Ok(default),
            Some(v) => parse_count(v).ok_or_else(|| cfg_err(format!("{k}: {v:?} is not a nonnegative integer"))),
        }
    };
    let tol = match get("tol") {
        Some(v) => num("tol", v)?,
        None => DEFAULT_TOL,
    };
    let k_grid = match get("k_grid") {
        None => DEFAULT_K_GRID.to_vec(),
        Some(v) => v
            .split(',')
            .map(|k| match parse_count(k) {
                Some(k) if k >= 1 => Ok(k),
                _ => Err(cfg_err(format!("k_grid: {k:?} is not a positive integer"))),
            })
            .collect::<Result<_, _>>()?,
    };
    let mode = match get("mode").unwrap_or("analytic") {
        "analytic" => GceMode::Analytic,
        "empirical" => GceMode::Empirical,
        m => return Err(cfg_err(format!("mode must be analytic or empirical, got {m:?}"))),
    };
    let seeds = int("seeds", 1)?;
    if seeds == 0 {
        return Err(cfg_err("seeds must be at least 1"));
    }
    Ok(RunConfig {
        params,
        seed: int("seed", 0)?,
        steps: int("steps", 0)?,
        seeds,
        max_rejections: int("max_rejections", DEFAULT_MAX_REJECTIONS)?,
        tol,
        max_iter: int("max_iter", DEFAULT_MAX_ITER as u64)? as usize,
        k_grid,
        mode,
        axes,
        entries,
    })
}

/// Integers, also written as `1e6` or `1_000_000`.
fn parse_count(v: &str) -> Option<u64> {
    let v = v.trim().replace('_', "");
    if let Ok(n) = v.parse::<u64>() {
        return Some(n);
    }
    let x: f64 = v.parse().ok()?;
    (x >= 0.0 && x.fract() == 0.0 && x < 1.8e19).then_some(x as u64)
}

impl RunConfig {
    /// SHA-256 of the resolved entries in key order, so formatting and
    /// comments do not change it. The seed is recorded separately and left
    /// out.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.entries.iter().filter(|(k, _)| *k != "seed") {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        let mut out = String::with_capacity(64);
        for b in h.finalize() {
            write!(out, "{b:02x}").unwrap();
        }
        out
    }

    /// Number of sweep cells: the product of the axis lengths.
    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    /// Axis grid indices of cell `index`, first axis outermost.
    pub fn cell_indices(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            *slot = index % axis.len();
            index /= axis.len();
        }
        out
    }

    /// The configuration with the axis values of cell `index` applied.
    pub fn cell(&self, index: usize) -> Result<RunConfig, RunError> {
        let mut entries = self.entries.clone();
        for (axis, i) in self.axes.iter().zip(self.cell_indices(index)) {
            for (k, v) in axis.keys.iter().zip(&axis.values[i]) {
                entries.insert(k.clone(), v.to_string());
            }
        }
        entries.retain(|k, _| !k.starts_with("axis."));
        build(entries, Vec::new())
    }
}
