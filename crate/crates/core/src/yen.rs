//! Exact baseline: Dijkstra and Yen's K shortest loopless paths.
//!
//! Every tie between equal-cost paths is resolved toward the lexicographically
//! smaller vertex sequence, so results are reproducible bit for bit.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashSet};
use web_time::Instant;

use crate::graph::NavGraph;
use crate::path::{cost_then_sequence, GraphPath, PathSet};
use crate::planner::PlanError;

/// Vertices and edges excluded from a search.
#[derive(Debug, Clone)]
pub struct Bans {
    pub vertices: Vec<bool>,
    pub edges: Vec<bool>,
}

impl Bans {
    pub fn none(g: &NavGraph) -> Self {
        Self {
            vertices: vec![false; g.vertex_count()],
            edges: vec![false; g.edge_count()],
        }
    }

    fn clear(&mut self) {
        self.vertices.fill(false);
        self.edges.fill(false);
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

fn trace_back(pred: &[usize], src: usize, mut v: usize) -> Vec<usize> {
    let mut out = vec![v];
    while v != src {
        v = pred[v];
        out.push(v);
    }
    out.reverse();
    out
}

/// Minimum-cost path from `src` to `dst` avoiding banned items, or `None` when unreachable.
pub fn dijkstra(g: &NavGraph, src: usize, dst: usize, bans: &Bans) -> Option<GraphPath> {
    if bans.vertices[src] || bans.vertices[dst] {
        return None;
    }
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse(Entry(0.0, src)));
    while let Some(Reverse(Entry(d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == dst {
            break;
        }
        for a in g.neighbors(u) {
            let v = a.to;
            if done[v] || bans.vertices[v] || bans.edges[a.edge] {
                continue;
            }
            let nd = d + g.edges[a.edge].cost;
            let better = if nd < dist[v] {
                true
            } else if nd == dist[v] {
                let mut via_u = trace_back(&pred, src, u);
                let mut via_old = trace_back(&pred, src, pred[v]);
                via_u.push(v);
                via_old.push(v);
                via_u < via_old
            } else {
                false
            };
            if better {
                let improved = nd < dist[v];
                dist[v] = nd;
                pred[v] = u;
                if improved {
                    heap.push(Reverse(Entry(nd, v)));
                }
            }
        }
    }
    if !done[dst] {
        return None;
    }
    Some(GraphPath {
        vertices: trace_back(&pred, src, dst),
        cost: dist[dst],
    })
}

struct Candidate(GraphPath);

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        cost_then_sequence(&self.0, &other.0)
    }
}

/// Up to `k` loopless start-to-goal paths in nondecreasing cost order.
pub fn yen_k_shortest(g: &NavGraph, k: usize) -> Result<PathSet, PlanError> {
    if k == 0 {
        return Err(PlanError::InvalidArgument("K must be at least 1".into()));
    }
    let clock = Instant::now();
    let mut bans = Bans::none(g);
    let first = dijkstra(g, g.start, g.goal, &bans).ok_or(PlanError::Unreachable)?;
    let mut out = PathSet::default();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(first.vertices.clone());
    out.push(first, clock.elapsed());
    let mut pool: BTreeSet<Candidate> = BTreeSet::new();

    while out.len() < k {
        let prev = out.paths.last().unwrap().vertices.clone();
        for i in 0..prev.len().saturating_sub(1) {
            let spur = prev[i];
            let root = &prev[..=i];
            bans.clear();
            for p in &out.paths {
                if p.vertices.len() > i + 1 && p.vertices[..=i] == *root {
                    if let Some(e) = g.edge_between(p.vertices[i], p.vertices[i + 1]) {
                        bans.edges[e] = true;
                    }
                }
            }
            for &v in &root[..i] {
                bans.vertices[v] = true;
            }
            let Some(tail) = dijkstra(g, spur, g.goal, &bans) else { continue };
            let mut vertices = root[..i].to_vec();
            vertices.extend_from_slice(&tail.vertices);
            if seen.insert(vertices.clone()) {
                pool.insert(Candidate(GraphPath::from_vertices_unchecked(g, vertices)));
            }
        }
        match pool.pop_first() {
            Some(Candidate(best)) => out.push(best, clock.elapsed()),
            None => break,
        }
    }
    out.attempts = out.len();
    out.shortfall = out.len() < k;
    Ok(out)
}
