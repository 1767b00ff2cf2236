//! Randomized Homotopy Classes Finder: repeated cost-biased random walks with
//! vertex retirement until `K` distinct start-to-goal paths are collected.

use std::collections::HashSet;
use web_time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::NavGraph;
use crate::path::{cost_then_sequence, GraphPath, PathSet};
use crate::scenario::Scenario;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("goal is unreachable from start")]
    Unreachable,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("path set is empty")]
    EmptySet,
}

/// Attempt cap used when the caller does not choose one.
pub fn default_max_attempts(k: usize) -> usize {
    1000 * k
}

/// Seeded deterministic draw stream.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Transition probabilities out of `v` over neighbors accepted by `allowed`,
/// proportional to inverse edge cost. Empty when no neighbor is allowed.
pub fn transition_distribution(g: &NavGraph, v: usize, allowed: impl Fn(usize) -> bool) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = g
        .neighbors(v)
        .iter()
        .filter(|a| allowed(a.to))
        .map(|a| (a.to, 1.0 / g.edges[a.edge].cost))
        .collect();
    let total: f64 = out.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut out {
        *w /= total;
    }
    out
}

/// Reusable scratch space for walks on one graph.
pub struct Walker<'g> {
    graph: &'g NavGraph,
    visited: Vec<bool>,
    weights: Vec<(usize, f64)>,
    trace: Vec<usize>,
}

impl<'g> Walker<'g> {
    pub fn new(graph: &'g NavGraph) -> Self {
        Self {
            graph,
            visited: vec![false; graph.vertex_count()],
            weights: Vec::with_capacity(8),
            trace: Vec::with_capacity(64),
        }
    }

    /// One walk from start; `Some` when it reaches the goal, `None` when stuck.
    pub fn walk(&mut self, rng: &mut RandomSource) -> Option<GraphPath> {
        let g = self.graph;
        self.trace.clear();
        let mut v = g.start;
        self.trace.push(v);
        let mut cost = 0.0;
        let reached = loop {
            if v == g.goal {
                break true;
            }
            self.weights.clear();
            let mut total = 0.0;
            for a in g.neighbors(v) {
                if !self.visited[a.to] {
                    let w = 1.0 / g.edges[a.edge].cost;
                    total += w;
                    self.weights.push((a.edge, w));
                }
            }
            if self.weights.is_empty() {
                break false;
            }
            let mut r = rng.next_unit() * total;
            let mut chosen = self.weights[self.weights.len() - 1].0;
            for &(e, w) in &self.weights {
                if r < w {
                    chosen = e;
                    break;
                }
                r -= w;
            }
            // leaving v retires it together with its incident edges
            self.visited[v] = true;
            let edge = &g.edges[chosen];
            cost += edge.cost;
            v = if edge.u == v { edge.v } else { edge.u };
            self.trace.push(v);
        };
        for &u in &self.trace {
            self.visited[u] = false;
        }
        reached.then(|| GraphPath {
            vertices: self.trace.clone(),
            cost,
        })
    }
}

/// A single random walk with a fresh visited mask.
pub fn random_walk(g: &NavGraph, rng: &mut RandomSource) -> Option<GraphPath> {
    Walker::new(g).walk(rng)
}

/// Runs walks until `k` distinct valid paths are found or `max_attempts` walks have been made.
pub fn rhcf(g: &NavGraph, k: usize, rng: &mut RandomSource, max_attempts: usize) -> Result<PathSet, PlanError> {
    if k == 0 {
        return Err(PlanError::InvalidArgument("K must be at least 1".into()));
    }
    if max_attempts < k {
        return Err(PlanError::InvalidArgument(format!(
            "max_attempts {max_attempts} is below K = {k}"
        )));
    }
    if !g.connected(g.start, g.goal) {
        return Err(PlanError::Unreachable);
    }
    let clock = Instant::now();
    let mut out = PathSet::default();
    if g.start == g.goal {
        out.push(
            GraphPath {
                vertices: vec![g.start],
                cost: 0.0,
            },
            clock.elapsed(),
        );
        out.shortfall = k > 1;
        out.attempts = 1;
        return Ok(out);
    }
    let mut walker = Walker::new(g);
    let mut found: HashSet<Vec<usize>> = HashSet::with_capacity(k);
    while out.len() < k && out.attempts < max_attempts {
        out.attempts += 1;
        if let Some(path) = walker.walk(rng) {
            if path.last() == g.goal && !found.contains(&path.vertices) {
                found.insert(path.vertices.clone());
                out.push(path, clock.elapsed());
            }
        }
    }
    out.shortfall = out.len() < k;
    Ok(out)
}

/// The cheapest path of the set; ties go to the lexicographically smaller sequence.
pub fn select_best(h: &PathSet) -> Result<&GraphPath, PlanError> {
    h.paths
        .iter()
        .min_by(|a, b| cost_then_sequence(a, b))
        .ok_or(PlanError::EmptySet)
}

/// Keeps the paths whose geometry stays at least `clearance` away from every
/// pedestrian disc of the updated scenario.
pub fn revalidate(h: &PathSet, g: &NavGraph, s_updated: &Scenario, clearance: f64) -> PathSet {
    let mut out = PathSet {
        attempts: h.attempts,
        ..PathSet::default()
    };
    for (path, &at) in h.paths.iter().zip(&h.discovered_at) {
        let geom = path.geometry(g);
        let clear = s_updated
            .pedestrians
            .iter()
            .all(|p| geom.distance_to(p.center()) - p.radius >= clearance);
        if clear {
            out.push(path.clone(), at);
        }
    }
    out
}
