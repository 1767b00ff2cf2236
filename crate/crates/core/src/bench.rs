//! Planner comparison runs producing one CSV row per planner, K and trial.

use std::fmt;
use std::str::FromStr;
use web_time::Instant;

use crate::graph::NavGraph;
use crate::metrics::MetricsReport;
use crate::path::PathSet;
use crate::planner::{default_max_attempts, rhcf, PlanError, RandomSource};
use crate::yen::yen_k_shortest;

pub const CSV_HEADER: &str = "scenario,planner,K,trial,seed,time_us,shortfall,rd,cg,ncg,best_cost,n_paths";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Planner {
    Rhcf,
    Yen,
}

impl Planner {
    pub fn name(self) -> &'static str {
        match self {
            Planner::Rhcf => "rhcf",
            Planner::Yen => "yen",
        }
    }

    /// Runs the planner once. `seed` only matters for RHCF.
    pub fn plan(self, g: &NavGraph, k: usize, seed: u64, max_attempts: Option<usize>) -> Result<PathSet, PlanError> {
        match self {
            Planner::Rhcf => rhcf(
                g,
                k,
                &mut RandomSource::new(seed),
                max_attempts.unwrap_or_else(|| default_max_attempts(k)),
            ),
            Planner::Yen => yen_k_shortest(g, k),
        }
    }
}

impl fmt::Display for Planner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `rhcf`, `yen` or `both`.
pub fn parse_planners(s: &str) -> Result<Vec<Planner>, String> {
    match s {
        "rhcf" => Ok(vec![Planner::Rhcf]),
        "yen" => Ok(vec![Planner::Yen]),
        "both" => Ok(vec![Planner::Rhcf, Planner::Yen]),
        other => Err(format!("unknown planner `{other}` (expected rhcf, yen or both)")),
    }
}

impl FromStr for Planner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_planners(s)?.as_slice() {
            [p] => Ok(*p),
            _ => Err("expected a single planner".into()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: String,
    pub planners: Vec<Planner>,
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub max_attempts: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return Err("k values must be a non-empty list of positive counts".into());
        }
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if self.planners.is_empty() {
            return Err("no planner selected".into());
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scenario: String,
    pub trial: usize,
    pub seed: u64,
    pub report: MetricsReport,
    pub n_paths: usize,
}

impl CsvRow {
    pub fn to_csv(&self) -> String {
        let r = &self.report;
        format!(
            "{},{},{},{},{},{:.3},{},{},{},{},{},{}",
            self.scenario,
            r.planner,
            r.k,
            self.trial,
            self.seed,
            r.time_us,
            r.shortfall as u8,
            r.rd,
            r.cg,
            r.ncg,
            r.best_cost(),
            self.n_paths
        )
    }
}

/// Runs every planner for every K and trial on a prebuilt graph.
///
/// Each RHCF set is normalized against Yen's best paths of the same size.
/// Trials run sequentially so timings are not skewed by contention.
pub fn run(g: &NavGraph, cfg: &RunConfig) -> Result<Vec<CsvRow>, PlanError> {
    cfg.validate().map_err(PlanError::InvalidArgument)?;
    let mut rows = Vec::new();
    for &k in &cfg.k_values {
        let reference = yen_k_shortest(g, k)?;
        for &planner in &cfg.planners {
            for trial in 0..cfg.trials {
                let seed = cfg.trial_seed(trial);
                let clock = Instant::now();
                let ps = planner.plan(g, k, seed, cfg.max_attempts)?;
                let time_us = clock.elapsed().as_secs_f64() * 1e6;
                let reference_prefix = PathSet {
                    paths: reference.paths[..ps.len().min(reference.len())].to_vec(),
                    ..PathSet::default()
                };
                let report = MetricsReport::score(planner.name(), k, time_us, g, &ps, &reference_prefix)?;
                rows.push(CsvRow {
                    scenario: cfg.scenario.clone(),
                    trial,
                    seed,
                    report,
                    n_paths: ps.len(),
                });
            }
        }
    }
    Ok(rows)
}

/// Header plus one line per row.
pub fn to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
