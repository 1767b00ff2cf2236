//! Navigation graph built from the Voronoi skeleton.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Point, Polyline};
use crate::scenario::Scenario;
use crate::social::edge_cost;
use crate::voronoi::{extract_gvd, rasterize_obstacles, skeleton_degree, GvdError, OccupancyGrid, Skeleton};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error(transparent)]
    Gvd(#[from] GvdError),
    #[error("unreachable goal: start and goal lie in different components")]
    Unreachable,
    #[error("edge {edge} is invalid: {reason}")]
    InvalidEdge { edge: usize, reason: String },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Oriented from `u` to `v`.
    pub geometry: Polyline,
    pub length: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacent {
    pub to: usize,
    pub edge: usize,
}

/// Undirected weighted graph with polyline edges and designated terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct NavGraph {
    pub vertices: Vec<Point>,
    pub edges: Vec<Edge>,
    adjacency: Vec<Vec<Adjacent>>,
    pub start: usize,
    pub goal: usize,
}

impl NavGraph {
    /// Assembles a graph, checking the structural invariants: no self-loops,
    /// no parallel edges, positive costs, endpoints matching geometry.
    pub fn new(vertices: Vec<Point>, edges: Vec<Edge>, start: usize, goal: usize) -> Result<Self, GraphError> {
        let n = vertices.len();
        for v in [start, goal] {
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            let bad = |reason: &str| GraphError::InvalidEdge {
                edge: id,
                reason: reason.to_string(),
            };
            if e.u >= n || e.v >= n {
                return Err(bad("endpoint out of range"));
            }
            if e.u == e.v {
                return Err(bad("self-loop"));
            }
            if !(e.cost > 0.0 && e.cost.is_finite()) {
                return Err(bad("cost must be positive and finite"));
            }
            if e.geometry.first() != Some(vertices[e.u]) || e.geometry.last() != Some(vertices[e.v]) {
                return Err(bad("geometry does not join its endpoints"));
            }
            adjacency[e.u].push(Adjacent { to: e.v, edge: id });
            adjacency[e.v].push(Adjacent { to: e.u, edge: id });
        }
        for (v, adj) in adjacency.iter_mut().enumerate() {
            adj.sort_by_key(|a| a.to);
            if let Some(w) = adj.windows(2).find(|w| w[0].to == w[1].to) {
                return Err(GraphError::InvalidEdge {
                    edge: w[1].edge,
                    reason: format!("parallel to edge {} at vertex {v}", w[0].edge),
                });
            }
        }
        Ok(Self {
            vertices,
            edges,
            adjacency,
            start,
            goal,
        })
    }

    /// Abstract graph with straight-line geometry; handy for tests and small examples.
    pub fn from_costs(vertices: Vec<Point>, edges: &[(usize, usize, f64)], start: usize, goal: usize) -> Result<Self, GraphError> {
        let mut out = Vec::with_capacity(edges.len());
        for (id, &(u, v, cost)) in edges.iter().enumerate() {
            let (pu, pv) = match (vertices.get(u), vertices.get(v)) {
                (Some(&a), Some(&b)) => (a, b),
                _ => {
                    return Err(GraphError::InvalidEdge {
                        edge: id,
                        reason: "endpoint out of range".into(),
                    })
                }
            };
            out.push(Edge {
                u,
                v,
                geometry: Polyline::segment(pu, pv),
                length: pu.dist(pv),
                cost,
            });
        }
        Self::new(vertices, out, start, goal)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v`, sorted by vertex id.
    pub fn neighbors(&self, v: usize) -> &[Adjacent] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let adj = &self.adjacency[u];
        adj.binary_search_by_key(&v, |a| a.to).ok().map(|i| adj[i].edge)
    }

    /// Whether `to` can be reached from `from`.
    pub fn connected(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for a in &self.adjacency[v] {
                if !seen[a.to] {
                    seen[a.to] = true;
                    queue.push_back(a.to);
                }
            }
        }
        false
    }

    /// Plain-text dump: `vertex id x y` lines followed by `edge id u v length cost` lines.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# start {} goal {}", self.start, self.goal);
        for (i, p) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "vertex {i} {} {}", p.x, p.y);
        }
        for (i, e) in self.edges.iter().enumerate() {
            let _ = writeln!(out, "edge {i} {} {} {} {}", e.u, e.v, e.length, e.cost);
        }
        out
    }
}

/// Skeleton graph before terminals are attached and costs are assigned.
///
/// Unlike [`NavGraph`] this may contain self-loops and parallel edges.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGraph {
    pub vertices: Vec<Point>,
    pub edges: Vec<RawEdge>,
    /// Skeleton cells absorbed into vertices (junction clusters and cycle anchors).
    pub vertex_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawEdge {
    pub u: usize,
    pub v: usize,
    pub points: Vec<Point>,
    /// Degree-2 skeleton cells collapsed into this edge.
    pub chain_cells: usize,
}

impl RawGraph {
    fn add_vertex(&mut self, p: Point) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    /// Splits edge `e` at interior point `at`, returning the new vertex.
    fn split_edge(&mut self, e: usize, at: usize) -> usize {
        let edge = &self.edges[e];
        debug_assert!(at > 0 && at + 1 < edge.points.len());
        let (u, v) = (edge.u, edge.v);
        let head = edge.points[..=at].to_vec();
        let tail = edge.points[at..].to_vec();
        let total = edge.chain_cells;
        let head_cells = at.saturating_sub(1).min(total);
        let w = self.add_vertex(head[at]);
        self.edges[e] = RawEdge {
            u,
            v: w,
            points: head,
            chain_cells: head_cells,
        };
        self.edges.push(RawEdge {
            u: w,
            v,
            points: tail,
            chain_cells: total - head_cells,
        });
        w
    }

    /// Number of connected components (vertices with edges or not).
    pub fn component_count(&self) -> usize {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut count = n;
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }
}

/// Collapses the skeleton into junction/endpoint vertices joined by chain edges.
pub fn skeleton_to_graph(skel: &Skeleton, grid: &OccupancyGrid) -> RawGraph {
    let cells = &skel.cells;
    let n = cells.len();
    let deg: Vec<u32> = (0..n)
        .map(|i| if cells[i] { skeleton_degree(grid, cells, i) } else { 0 })
        .collect();
    let is_node = |i: usize| cells[i] && deg[i] != 2;

    let mut graph = RawGraph {
        vertices: Vec::new(),
        edges: Vec::new(),
        vertex_cells: 0,
    };

    // junction clusters: 8-connected groups of node cells
    let mut cluster = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut rep: Vec<usize> = Vec::new();
    for start in 0..n {
        if !is_node(start) || cluster[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        let mut group = vec![start];
        cluster[start] = id;
        let mut k = 0;
        while k < group.len() {
            let c = group[k];
            k += 1;
            grid.for_each_neighbor(c, |j| {
                if is_node(j) && cluster[j] == usize::MAX {
                    cluster[j] = id;
                    group.push(j);
                }
            });
        }
        group.sort_unstable();
        let pts: Vec<Point> = group.iter().map(|&c| grid.cell_center(c)).collect();
        let centroid = Point::new(
            pts.iter().map(|p| p.x).sum::<f64>() / pts.len() as f64,
            pts.iter().map(|p| p.y).sum::<f64>() / pts.len() as f64,
        );
        let best = group
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let da = grid.cell_center(a).dist(centroid);
                let db = grid.cell_center(b).dist(centroid);
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .unwrap();
        graph.vertex_cells += group.len();
        graph.add_vertex(grid.cell_center(best));
        rep.push(best);
        members.push(group);
    }

    let mut visited = vec![false; n];
    let next_cell = |cur: usize, prev: usize| -> Option<usize> {
        let mut next = None;
        grid.for_each_neighbor(cur, |j| {
            if cells[j] && j != prev && next.is_none() {
                next = Some(j);
            }
        });
        next
    };

    for k in 0..members.len() {
        for &a in &members[k].clone() {
            let mut starts = Vec::new();
            grid.for_each_neighbor(a, |j| {
                if cells[j] && !is_node(j) {
                    starts.push(j);
                }
            });
            for first in starts {
                if visited[first] {
                    continue;
                }
                let mut points = vec![grid.cell_center(rep[k])];
                if a != rep[k] {
                    points.push(grid.cell_center(a));
                }
                let (mut prev, mut cur) = (a, first);
                let mut chain = 0;
                loop {
                    visited[cur] = true;
                    chain += 1;
                    points.push(grid.cell_center(cur));
                    let Some(next) = next_cell(cur, prev) else { break };
                    if is_node(next) {
                        let k2 = cluster[next];
                        if next != rep[k2] {
                            points.push(grid.cell_center(next));
                        }
                        points.push(grid.cell_center(rep[k2]));
                        graph.edges.push(RawEdge {
                            u: k,
                            v: k2,
                            points,
                            chain_cells: chain,
                        });
                        break;
                    }
                    if visited[next] {
                        break;
                    }
                    prev = cur;
                    cur = next;
                }
            }
        }
    }

    // cycles with no junction: anchor a synthetic vertex at the lowest cell
    for start in 0..n {
        if !cells[start] || is_node(start) || visited[start] {
            continue;
        }
        visited[start] = true;
        graph.vertex_cells += 1;
        let v = graph.add_vertex(grid.cell_center(start));
        let mut points = vec![grid.cell_center(start)];
        let mut prev = start;
        let Some(mut cur) = next_cell(start, usize::MAX) else { continue };
        let mut chain = 0;
        while cur != start && !visited[cur] {
            visited[cur] = true;
            chain += 1;
            points.push(grid.cell_center(cur));
            match next_cell(cur, prev) {
                Some(next) => {
                    prev = cur;
                    cur = next;
                }
                None => break,
            }
        }
        points.push(grid.cell_center(start));
        graph.edges.push(RawEdge {
            u: v,
            v,
            points,
            chain_cells: chain,
        });
    }
    graph
}

enum Anchor {
    Vertex(usize),
    Interior { edge: usize, index: usize },
}

fn nearest_anchor(g: &RawGraph, p: Point, admit: impl Fn(Point) -> bool) -> Option<(Anchor, f64)> {
    let mut best: Option<(Anchor, f64)> = None;
    let offer = |a: Anchor, d: f64, best: &mut Option<(Anchor, f64)>| {
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            *best = Some((a, d));
        }
    };
    for (v, &q) in g.vertices.iter().enumerate() {
        let has_edge = g.edges.iter().any(|e| e.u == v || e.v == v);
        if has_edge && admit(q) {
            offer(Anchor::Vertex(v), q.dist(p), &mut best);
        }
    }
    for (e, edge) in g.edges.iter().enumerate() {
        for index in 1..edge.points.len().saturating_sub(1) {
            if admit(edge.points[index]) {
                offer(Anchor::Interior { edge: e, index }, edge.points[index].dist(p), &mut best);
            }
        }
    }
    best
}

/// 8-connected components of free cells; blocked cells get `usize::MAX`.
fn free_components(grid: &OccupancyGrid) -> Vec<usize> {
    let mut comp = vec![usize::MAX; grid.blocked.len()];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..grid.blocked.len() {
        if grid.blocked[start] || comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        stack.push(start);
        while let Some(c) = stack.pop() {
            grid.for_each_neighbor(c, |j| {
                if !grid.blocked[j] && comp[j] == usize::MAX {
                    comp[j] = next;
                    stack.push(j);
                }
            });
        }
        next += 1;
    }
    comp
}

fn cell_of(grid: &OccupancyGrid, p: Point) -> usize {
    let col = ((p.x - grid.origin.x) / grid.resolution).floor().clamp(0.0, (grid.width - 1) as f64) as usize;
    let row = ((p.y - grid.origin.y) / grid.resolution).floor().clamp(0.0, (grid.height - 1) as f64) as usize;
    grid.index(col, row)
}

/// Free-space component of `p`: that of its own cell, or of the nearest free cell.
fn component_of(grid: &OccupancyGrid, comp: &[usize], p: Point) -> Option<usize> {
    let c = cell_of(grid, p);
    if comp[c] != usize::MAX {
        return Some(comp[c]);
    }
    (0..comp.len())
        .filter(|&i| comp[i] != usize::MAX)
        .min_by(|&a, &b| grid.cell_center(a).dist(p).total_cmp(&grid.cell_center(b).dist(p)))
        .map(|i| comp[i])
}

/// Adds start and goal vertices, each joined by a straight stub to the nearest
/// skeleton point in its own free-space region (splitting the host edge when
/// that point is interior).
///
/// Returns the ids of the start and goal vertices. A terminal whose region
/// holds no skeleton point makes the goal unreachable.
pub fn attach_terminals(g: &mut RawGraph, grid: &OccupancyGrid, s: &Scenario) -> Result<(usize, usize), GraphError> {
    if g.edges.is_empty() {
        return Err(GraphError::Gvd(GvdError::EmptySkeleton));
    }
    let comp = free_components(grid);
    let attach = |g: &mut RawGraph, p: Point| -> Result<usize, GraphError> {
        let region = component_of(grid, &comp, p);
        let (anchor, _) = nearest_anchor(g, p, |q| region == Some(comp[cell_of(grid, q)]))
            .ok_or(GraphError::Unreachable)?;
        let host = match anchor {
            Anchor::Vertex(v) => v,
            Anchor::Interior { edge, index } => g.split_edge(edge, index),
        };
        let t = g.add_vertex(p);
        let q = g.vertices[host];
        g.edges.push(RawEdge {
            u: t,
            v: host,
            points: vec![p, q],
            chain_cells: 0,
        });
        Ok(t)
    };
    let start = attach(g, s.robot.position())?;
    let goal = attach(g, s.goal.position())?;
    Ok((start, goal))
}

/// Removes self-loops and parallel edges by subdividing, so that distinct
/// vertex sequences always denote distinct routes.
pub fn normalize(g: &mut RawGraph) {
    let mut e = 0;
    while e < g.edges.len() {
        if g.edges[e].u == g.edges[e].v {
            let len = g.edges[e].points.len();
            if len < 4 {
                g.edges.remove(e);
                continue;
            }
            let (i1, i2) = (len / 3, 2 * len / 3);
            let (i1, i2) = (i1.max(1), i2.max(i1.max(1) + 1).min(len - 2));
            g.split_edge(e, i1);
            // the tail half now starts at the new vertex; its index shifts by i1
            let tail = g.edges.len() - 1;
            if i2 > i1 {
                g.split_edge(tail, i2 - i1);
            }
        }
        e += 1;
    }

    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (id, edge) in g.edges.iter().enumerate() {
        groups.entry((edge.u.min(edge.v), edge.u.max(edge.v))).or_default().push(id);
    }
    let mut doomed = Vec::new();
    for (_, mut ids) in groups {
        if ids.len() < 2 {
            continue;
        }
        ids.sort_by_key(|&id| (g.edges[id].points.len(), id));
        for &id in &ids[1..] {
            let len = g.edges[id].points.len();
            if len < 3 {
                doomed.push(id);
            } else {
                g.split_edge(id, len / 2);
            }
        }
    }
    doomed.sort_unstable();
    for id in doomed.into_iter().rev() {
        g.edges.remove(id);
    }
}

/// Full pipeline: occupancy grid, skeleton, chain graph, terminals, costs.
pub fn build_navgraph(s: &Scenario) -> Result<NavGraph, GraphError> {
    Ok(build_navgraph_parts(s)?.graph)
}

/// Intermediate products of [`build_navgraph`], kept for rendering and diagnostics.
#[derive(Debug, Clone)]
pub struct GraphBuild {
    pub grid: OccupancyGrid,
    pub skeleton: Skeleton,
    pub graph: NavGraph,
}

pub fn build_navgraph_parts(s: &Scenario) -> Result<GraphBuild, GraphError> {
    let grid = rasterize_obstacles(s);
    let skeleton = extract_gvd(&grid)?;
    let mut raw = skeleton_to_graph(&skeleton, &grid);
    let (start, goal) = attach_terminals(&mut raw, &grid, s)?;
    normalize(&mut raw);
    let edges = raw
        .edges
        .into_iter()
        .map(|e| {
            let geometry = Polyline::new(e.points);
            Edge {
                u: e.u,
                v: e.v,
                length: geometry.length(),
                cost: edge_cost(&geometry, s),
                geometry,
            }
        })
        .collect();
    let graph = NavGraph::new(raw.vertices, edges, start, goal)?;
    if !graph.connected(start, goal) {
        return Err(GraphError::Unreachable);
    }
    Ok(GraphBuild { grid, skeleton, graph })
}
