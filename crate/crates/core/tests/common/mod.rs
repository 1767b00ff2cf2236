#![allow(dead_code)]

use proptest::prelude::*;
use rhcf::{NavGraph, Point};

/// Undirected graph spec: vertex count and integer-cost edges.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphSpec {
    pub fn build(&self) -> NavGraph {
        let vertices = (0..self.n)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / self.n as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        NavGraph::from_costs(vertices, &self.edges, 0, self.n - 1).unwrap()
    }

    pub fn relabeled(&self, perm: &[usize]) -> NavGraph {
        let mut vertices = vec![Point::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let a = i as f64 * std::f64::consts::TAU / self.n as f64;
            vertices[perm[i]] = Point::new(a.cos(), a.sin());
        }
        let edges: Vec<_> = self.edges.iter().map(|&(u, v, c)| (perm[u], perm[v], c)).collect();
        NavGraph::from_costs(vertices, &edges, perm[0], perm[self.n - 1]).unwrap()
    }
}

/// Random simple graphs with 2..=max_n vertices and integer costs in 1..=5.
pub fn graph_spec(max_n: usize) -> impl Strategy<Value = GraphSpec> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let m = pairs.len();
        (
            Just(n),
            Just(pairs),
            proptest::collection::vec(proptest::bool::weighted(0.45), m),
            proptest::collection::vec(1u32..=5, m),
        )
            .prop_map(|(n, pairs, keep, costs)| GraphSpec {
                n,
                edges: pairs
                    .into_iter()
                    .zip(keep)
                    .zip(costs)
                    .filter(|((_, keep), _)| *keep)
                    .map(|(((u, v), _), c)| (u, v, f64::from(c)))
                    .collect(),
            })
    })
}

/// All simple start-to-goal paths by plain recursion, each with its cost summed front to back.
pub fn brute_force_paths(g: &NavGraph) -> Vec<(f64, Vec<usize>)> {
    fn go(g: &NavGraph, path: &mut Vec<usize>, cost: f64, out: &mut Vec<(f64, Vec<usize>)>) {
        let v = *path.last().unwrap();
        if v == g.goal {
            out.push((cost, path.clone()));
            return;
        }
        for a in g.neighbors(v) {
            if !path.contains(&a.to) {
                path.push(a.to);
                go(g, path, cost + g.edges[a.edge].cost, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, &mut vec![g.start], 0.0, &mut out);
    out
}

/// Brute-force paths sorted by cost, ties by vertex sequence.
pub fn ranked_paths(g: &NavGraph) -> Vec<(f64, Vec<usize>)> {
    let mut all = brute_force_paths(g);
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    all
}
