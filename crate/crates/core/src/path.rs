//! Graph paths and path sets shared by both planners.

use std::fmt::Write as _;
use std::time::Duration;

use thiserror::Error;

use crate::geometry::{Point, Polyline};
use crate::graph::NavGraph;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("empty vertex sequence")]
    Empty,
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("vertex {0} repeats")]
    Repeated(usize),
}

/// A simple path as a vertex sequence with its summed edge cost.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPath {
    pub vertices: Vec<usize>,
    pub cost: f64,
}

impl GraphPath {
    /// Checks adjacency and simplicity, and sums edge costs front to back.
    pub fn from_vertices(g: &NavGraph, vertices: Vec<usize>) -> Result<Self, PathError> {
        if vertices.is_empty() {
            return Err(PathError::Empty);
        }
        let mut seen = vec![false; g.vertex_count()];
        for &v in &vertices {
            if std::mem::replace(&mut seen[v], true) {
                return Err(PathError::Repeated(v));
            }
        }
        let mut cost = 0.0;
        for w in vertices.windows(2) {
            let e = g.edge_between(w[0], w[1]).ok_or(PathError::NotAdjacent(w[0], w[1]))?;
            cost += g.edges[e].cost;
        }
        Ok(Self { vertices, cost })
    }

    /// Caller guarantees the sequence is a simple path of `g`.
    pub(crate) fn from_vertices_unchecked(g: &NavGraph, vertices: Vec<usize>) -> Self {
        let cost = vertices
            .windows(2)
            .map(|w| g.edges[g.edge_between(w[0], w[1]).expect("adjacent")].cost)
            .sum();
        Self { vertices, cost }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    /// Vertex positions, in order.
    pub fn positions(&self, g: &NavGraph) -> Vec<Point> {
        self.vertices.iter().map(|&v| g.vertices[v]).collect()
    }

    /// Concatenated edge polylines, oriented along the path.
    pub fn geometry(&self, g: &NavGraph) -> Polyline {
        let mut out = Polyline::new(vec![g.vertices[self.first()]]);
        for w in self.vertices.windows(2) {
            let e = &g.edges[g.edge_between(w[0], w[1]).expect("adjacent")];
            if e.u == w[0] {
                out.extend_from(&e.geometry.points);
            } else {
                let rev: Vec<Point> = e.geometry.points.iter().rev().copied().collect();
                out.extend_from(&rev);
            }
        }
        out
    }
}

/// Ordering used for every deterministic tie: cost, then vertex sequence.
pub fn cost_then_sequence(a: &GraphPath, b: &GraphPath) -> std::cmp::Ordering {
    a.cost.total_cmp(&b.cost).then_with(|| a.vertices.cmp(&b.vertices))
}

/// Paths in discovery order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathSet {
    pub paths: Vec<GraphPath>,
    /// Elapsed planning time when each path was admitted.
    pub discovered_at: Vec<Duration>,
    /// Fewer paths than requested were found.
    pub shortfall: bool,
    /// Number of search iterations (random walks for RHCF, accepted paths for Yen).
    pub attempts: usize,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn push(&mut self, path: GraphPath, at: Duration) {
        self.paths.push(path);
        self.discovered_at.push(at);
    }

    pub fn costs(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.cost).collect()
    }

    /// One line per path: `cost v0 v1 ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.paths {
            let _ = write!(out, "{}", p.cost);
            for v in &p.vertices {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}
