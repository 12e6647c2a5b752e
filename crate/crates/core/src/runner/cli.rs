//! Command-line front end: argument parsing, artifact files and the run
//! manifest.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use super::{
    cmd_compare, cmd_gce, cmd_simulate, cmd_solve, cmd_sweep, parse_config, run_seeds, GceMode, Result, RunConfig,
    RunError,
};
use crate::atomic::write_atomic;
use crate::estimate::write_gce_csv;
use crate::sim::write_edge_list;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Solve,
    Simulate,
    Sweep,
    Gce,
    Compare,
}

#[derive(Debug, Parser)]
#[command(name = "dmpa", version, about = "Two-group directed preferential attachment with homophily")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "dmpa-out")]
    out: PathBuf,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, value_parser = ["analytic", "empirical"])]
    mode: Option<String>,
    /// Comma-separated degree thresholds.
    #[arg(long = "k-grid")]
    k_grid: Option<String>,
    /// Sweep axis `name=grid`; repeatable.
    #[arg(long = "axis", value_name = "NAME=GRID")]
    axes: Vec<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

fn split_kv(s: &str) -> Result<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| RunError::Config(format!("expected KEY=VALUE, got {s:?}")))
}

impl Cli {
    fn overrides(&self) -> Result<Vec<(String, String)>> {
        let mut out = self.sets.iter().map(|s| split_kv(s)).collect::<Result<Vec<_>>>()?;
        for a in &self.axes {
            let (k, v) = split_kv(a)?;
            out.push((format!("axis.{k}"), v));
        }
        let flags = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("steps", self.steps.clone()),
            ("seeds", self.seeds.map(|v| v.to_string())),
            ("mode", self.mode.clone()),
            ("k_grid", self.k_grid.clone()),
            ("tol", self.tol.map(|v| v.to_string())),
            ("max_iter", self.max_iter.map(|v| v.to_string())),
        ];
        out.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
        Ok(out)
    }
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: &'static str,
    tool_version: &'static str,
    config_path: String,
    config_hash: String,
    seed: u64,
    run_seeds: Vec<u64>,
    artifacts: Vec<String>,
    timings_ms: BTreeMap<&'static str, f64>,
    finished_unix: u64,
}

/// Collects artifacts under one directory and writes the manifest last.
struct Outputs {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes).map_err(|source| RunError::Io { path, source })?;
        self.artifacts.push(name.to_string());
        Ok(())
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn name(c: Command) -> &'static str {
    match c {
        Command::Solve => "solve",
        Command::Simulate => "simulate",
        Command::Sweep => "sweep",
        Command::Gce => "gce",
        Command::Compare => "compare",
    }
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let mut out = Outputs::new(&cli.out)?;
    let mut timings = BTreeMap::new();
    match cli.command {
        Command::Solve => {
            let rep = cmd_solve(cfg)?;
            let js = rep.to_json();
            if rep.fixed_point.contraction_warning {
                eprintln!("warning: Jacobian norm >= 1 at the fixed point; contraction is not certified");
            }
            out.write("report.json", &json_bytes(&js))?;
            println!("{}", serde_json::to_string_pretty(&js).expect("json"));
        }
        Command::Simulate => {
            let runs = cmd_simulate(cfg)?;
            timings.insert("simulate", started.elapsed().as_secs_f64() * 1e3);
            for (i, run) in runs.iter().enumerate() {
                let mut buf = Vec::new();
                write_edge_list(&run.graph, &mut buf).expect("in-memory write");
                out.write(&format!("graph_{i}.txt"), &buf)?;
                let mut buf = Vec::new();
                run.trajectory.write_csv(&mut buf).expect("in-memory write");
                out.write(&format!("trajectory_{i}.csv"), &buf)?;
            }
        }
        Command::Sweep => {
            let table = cmd_sweep(cfg);
            timings.insert("sweep", started.elapsed().as_secs_f64() * 1e3);
            out.write("sweep.csv", table.to_csv().as_bytes())?;
            if table.failures() > 0 {
                eprintln!("warning: {} of {} cells failed; see the status column", table.failures(), table.rows.len());
            }
        }
        Command::Gce => {
            let res = cmd_gce(cfg)?;
            for (i, c) in res.empirical.iter().enumerate() {
                let mut buf = Vec::new();
                write_gce_csv(&c.curve, &mut buf).expect("in-memory write");
                out.write(&format!("gce_curve_{i}.csv"), &buf)?;
            }
            out.write("gce.json", &json_bytes(&res))?;
            if let Some(a) = &res.analytic {
                println!("analytic verdict: {}", a.verdict);
            }
            if let Some(m) = res.majority {
                println!("empirical majority trend: {m}");
            }
        }
        Command::Compare => {
            let res = cmd_compare(cfg)?;
            let mut buf = Vec::new();
            res.table.write_csv(&mut buf).expect("in-memory write");
            out.write("compare.csv", &buf)?;
            out.write("report.json", &json_bytes(&res.report.to_json()))?;
            for w in &res.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    timings.insert("total", started.elapsed().as_secs_f64() * 1e3);
    let manifest = Manifest {
        command: name(cli.command),
        tool_version: env!("CARGO_PKG_VERSION"),
        config_path: cli.config.display().to_string(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        run_seeds: match cli.command {
            Command::Simulate | Command::Compare => run_seeds(cfg),
            Command::Gce if cfg.mode == GceMode::Empirical => run_seeds(cfg),
            _ => Vec::new(),
        },
        artifacts: out.artifacts.clone(),
        timings_ms: timings,
        finished_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    };
    let path = out.dir.join("manifest.json");
    write_atomic(&path, &json_bytes(&manifest)).map_err(|source| RunError::Io { path, source })
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| RunError::Config(format!("{}: {e}", cli.config.display())))?;
    parse_config(&text, &cli.overrides()?)
}

fn thread_pool() -> Option<rayon::ThreadPool> {
    let n = std::env::var("DMPA_THREADS").ok()?.trim().parse::<usize>().ok()?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let go = || load(&cli).and_then(|cfg| execute(&cli, &cfg));
    let res = match thread_pool() {
        Some(pool) => pool.install(go),
        None => go(),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
