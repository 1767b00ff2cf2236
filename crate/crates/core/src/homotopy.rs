//! Independent checks on path sets: winding-number signatures around each
//! pedestrian, and exhaustive enumeration of simple start-to-goal paths.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::geometry::{Point, Polyline};
use crate::graph::NavGraph;
use crate::path::GraphPath;
use crate::scenario::Scenario;

/// Tolerance when rounding a signature difference to a multiple of 2π.
pub const WINDING_TOLERANCE: f64 = 1e-3;

/// Enumeration cap used when the caller has no better bound.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum HomotopyError {
    #[error("path point coincides with pedestrian {0}")]
    ThroughObstacle(usize),
    #[error("paths do not share start and goal")]
    MismatchedEndpoints,
    #[error("signature difference for pedestrian {0} is not a multiple of 2π")]
    NotClosed(usize),
}

/// Total signed angle subtended by a path at each pedestrian center.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopySignature(pub Vec<f64>);

impl HomotopySignature {
    /// Per-pedestrian winding counts of `self - other`.
    pub fn winding_difference(&self, other: &Self) -> Result<Vec<i64>, HomotopyError> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .map(|(i, (a, b))| {
                let d = a - b;
                let turns = (d / TAU).round();
                if (d - turns * TAU).abs() > WINDING_TOLERANCE {
                    Err(HomotopyError::NotClosed(i))
                } else {
                    Ok(turns as i64)
                }
            })
            .collect()
    }
}

pub fn winding_signature(path: &Polyline, s: &Scenario) -> Result<HomotopySignature, HomotopyError> {
    let mut out = Vec::with_capacity(s.pedestrians.len());
    for (i, ped) in s.pedestrians.iter().enumerate() {
        let o = ped.center();
        if path.points.iter().any(|&p| p == o) {
            return Err(HomotopyError::ThroughObstacle(i));
        }
        out.push(subtended_angle(&path.points, o));
    }
    Ok(HomotopySignature(out))
}

fn subtended_angle(points: &[Point], o: Point) -> f64 {
    points
        .windows(2)
        .map(|w| {
            let a = w[0].sub(o);
            let b = w[1].sub(o);
            (a.x * b.y - a.y * b.x).atan2(a.x * b.x + a.y * b.y)
        })
        .sum()
}

/// Whether two curves with common endpoints are homotopic in the plane punctured at the pedestrians.
pub fn same_class(a: &Polyline, b: &Polyline, s: &Scenario) -> Result<bool, HomotopyError> {
    if a.first() != b.first() || a.last() != b.last() || a.points.is_empty() {
        return Err(HomotopyError::MismatchedEndpoints);
    }
    let sa = winding_signature(a, s)?;
    let sb = winding_signature(b, s)?;
    Ok(sa.winding_difference(&sb)?.iter().all(|&t| t == 0))
}

/// [`same_class`] on graph paths.
pub fn paths_same_class(g: &NavGraph, a: &GraphPath, b: &GraphPath, s: &Scenario) -> Result<bool, HomotopyError> {
    same_class(&a.geometry(g), &b.geometry(g), s)
}

/// Simple start-to-goal paths in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub paths: Vec<GraphPath>,
    /// More than `limit` paths exist.
    pub overflow: bool,
}

/// Depth-first enumeration of all simple start-to-goal paths, truncated at `limit`.
pub fn enumerate_simple_paths(g: &NavGraph, limit: usize) -> Enumeration {
    let mut paths = Vec::new();
    let overflow = dfs(g, limit, |stack| paths.push(GraphPath::from_vertices_unchecked(g, stack.to_vec())));
    Enumeration { paths, overflow }
}

/// Number of simple start-to-goal paths, capped at `limit`; the flag reports truncation.
pub fn count_simple_paths(g: &NavGraph, limit: usize) -> (usize, bool) {
    let mut count = 0;
    let overflow = dfs(g, limit, |_| count += 1);
    (count, overflow)
}

fn dfs(g: &NavGraph, limit: usize, mut emit: impl FnMut(&[usize])) -> bool {
    let mut on_path = vec![false; g.vertex_count()];
    let mut stack = vec![g.start];
    // per-depth cursor into the neighbor list
    let mut cursor = vec![0usize];
    on_path[g.start] = true;
    let mut found = 0usize;
    if g.start == g.goal {
        emit(&stack);
        return limit < 1;
    }
    while let Some(&v) = stack.last() {
        let depth = stack.len() - 1;
        let adj = g.neighbors(v);
        if cursor[depth] >= adj.len() {
            on_path[v] = false;
            stack.pop();
            cursor.pop();
            continue;
        }
        let w = adj[cursor[depth]].to;
        cursor[depth] += 1;
        if on_path[w] {
            continue;
        }
        if w == g.goal {
            if found == limit {
                return true;
            }
            found += 1;
            stack.push(w);
            emit(&stack);
            stack.pop();
            continue;
        }
        on_path[w] = true;
        stack.push(w);
        cursor.push(0);
    }
    false
}
