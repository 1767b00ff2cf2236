//! Evaluation metrics: discrete Fréchet distance, robust diversity, cumulative
//! gain and its normalized form, and planning time.

use web_time::Instant;

use crate::geometry::Point;
use crate::graph::NavGraph;
use crate::path::PathSet;
use crate::planner::PlanError;
use crate::yen::yen_k_shortest;

/// Discrete Fréchet distance between two vertex-position sequences.
///
/// # Panics
/// If either sequence is empty.
pub fn discrete_frechet(a: &[Point], b: &[Point]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "discrete Fréchet needs non-empty sequences");
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    for (i, &pa) in a.iter().enumerate() {
        for (j, &pb) in b.iter().enumerate() {
            let d = pa.dist(pb);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Robust diversity of a path set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diversity {
    pub value: f64,
    /// Fewer than two paths: the value is reported as 0.
    pub degenerate: bool,
}

/// Mean over paths of the Fréchet distance to the nearest other path.
pub fn robust_diversity(paths: &[Vec<Point>]) -> Diversity {
    if paths.len() < 2 {
        return Diversity {
            value: 0.0,
            degenerate: true,
        };
    }
    let n = paths.len();
    let mut nearest = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = discrete_frechet(&paths[i], &paths[j]);
            nearest[i] = nearest[i].min(d);
            nearest[j] = nearest[j].min(d);
        }
    }
    Diversity {
        value: nearest.iter().sum::<f64>() / n as f64,
        degenerate: false,
    }
}

/// Robust diversity of graph paths, measured at their vertices.
pub fn path_set_diversity(g: &NavGraph, ps: &PathSet) -> Diversity {
    let seqs: Vec<Vec<Point>> = ps.paths.iter().map(|p| p.positions(g)).collect();
    robust_diversity(&seqs)
}

/// Same as [`path_set_diversity`] but over full edge geometry rather than vertices.
pub fn path_set_diversity_dense(g: &NavGraph, ps: &PathSet) -> Diversity {
    let seqs: Vec<Vec<Point>> = ps.paths.iter().map(|p| p.geometry(g).points).collect();
    robust_diversity(&seqs)
}

/// Sum of inverse path costs.
pub fn cumulative_gain(ps: &PathSet) -> f64 {
    ps.paths.iter().map(|p| 1.0 / p.cost).sum()
}

/// Cumulative gain of `candidate` relative to `reference`.
pub fn normalized_cg_against(candidate: &PathSet, reference: &PathSet) -> Result<f64, PlanError> {
    if reference.is_empty() || candidate.is_empty() {
        return Err(PlanError::EmptySet);
    }
    Ok(cumulative_gain(candidate) / cumulative_gain(reference))
}

/// Cumulative gain of `candidate` over that of Yen's `k` best paths on `reference_graph`.
pub fn normalized_cg(candidate: &PathSet, reference_graph: &NavGraph, k: usize) -> Result<f64, PlanError> {
    if candidate.is_empty() {
        return Err(PlanError::EmptySet);
    }
    let yen = yen_k_shortest(reference_graph, k)?;
    normalized_cg_against(candidate, &yen)
}

/// Wall-clock statistics of repeated planning calls.
#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub mean_us: f64,
    pub std_us: f64,
    pub samples_us: Vec<f64>,
}

/// Times `planner(graph, k, seed)` over `trials` runs with seeds `seed, seed+1, ...`.
/// Only the planner call is measured.
pub fn time_to_k<T>(
    mut planner: impl FnMut(&NavGraph, usize, u64) -> T,
    g: &NavGraph,
    k: usize,
    trials: usize,
    seed: u64,
) -> Timing {
    assert!(trials >= 1, "need at least one trial");
    let mut samples_us = Vec::with_capacity(trials);
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let clock = Instant::now();
        let out = planner(g, k, trial_seed);
        let elapsed = clock.elapsed();
        std::hint::black_box(out);
        samples_us.push(elapsed.as_secs_f64() * 1e6);
    }
    let n = samples_us.len() as f64;
    let mean_us = samples_us.iter().sum::<f64>() / n;
    let var = samples_us.iter().map(|x| (x - mean_us).powi(2)).sum::<f64>() / n;
    Timing {
        mean_us,
        std_us: var.sqrt(),
        samples_us,
    }
}

/// One planner run, scored.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub planner: String,
    pub k: usize,
    pub time_us: f64,
    pub rd: f64,
    pub cg: f64,
    pub ncg: f64,
    pub costs: Vec<f64>,
    pub shortfall: bool,
}

impl MetricsReport {
    /// Scores `ps` against the reference set (normally Yen's best paths for the same count).
    pub fn score(planner: &str, k: usize, time_us: f64, g: &NavGraph, ps: &PathSet, reference: &PathSet) -> Result<Self, PlanError> {
        Ok(Self {
            planner: planner.to_string(),
            k,
            time_us,
            rd: path_set_diversity(g, ps).value,
            cg: cumulative_gain(ps),
            ncg: normalized_cg_against(ps, reference)?,
            costs: ps.costs(),
            shortfall: ps.shortfall,
        })
    }

    pub fn best_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
