//! Occupancy grid, exact Euclidean feature transform, and generalized Voronoi
//! skeleton extraction.
//!
//! The skeleton is the set of free cells whose 8-neighborhood sees a different
//! nearest obstacle site. It is then made hole-faithful (every hole encloses an
//! obstacle) and reduced to unit width by deleting simple points in order of
//! increasing clearance, so the result keeps the topology of the free space
//! around each site and sits on the medial band between sites.

use std::collections::VecDeque;
use std::sync::OnceLock;

use thiserror::Error;

use crate::geometry::Point;
use crate::scenario::Scenario;

#[derive(Debug, Error, PartialEq)]
pub enum GvdError {
    #[error("need at least two obstacle sites, found {0}")]
    TooFewSites(usize),
    #[error("occupancy grid has no free cells")]
    NoFreeCells,
    #[error("voronoi skeleton is empty")]
    EmptySkeleton,
}

/// 8-neighborhood offsets in ring order, starting east and turning counter-clockwise.
pub const RING: [(i32, i32); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub origin: Point,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    pub blocked: Vec<bool>,
    /// Site id of every blocked cell, `None` on free cells. Site 0 is the boundary ring.
    pub site: Vec<Option<u32>>,
    pub n_sites: usize,
}

impl OccupancyGrid {
    /// Builds a grid from a raw blocked mask; sites are the 4-connected blocked components.
    pub fn from_mask(origin: Point, resolution: f64, width: usize, height: usize, blocked: Vec<bool>) -> Self {
        assert_eq!(blocked.len(), width * height);
        let mut site = vec![None; blocked.len()];
        let mut n_sites = 0u32;
        let mut queue = VecDeque::new();
        for start in 0..blocked.len() {
            if !blocked[start] || site[start].is_some() {
                continue;
            }
            site[start] = Some(n_sites);
            queue.push_back(start);
            while let Some(c) = queue.pop_front() {
                let (col, row) = (c % width, c / width);
                let mut visit = |n: usize| {
                    if blocked[n] && site[n].is_none() {
                        site[n] = Some(n_sites);
                        queue.push_back(n);
                    }
                };
                if col > 0 {
                    visit(c - 1);
                }
                if col + 1 < width {
                    visit(c + 1);
                }
                if row > 0 {
                    visit(c - width);
                }
                if row + 1 < height {
                    visit(c + width);
                }
            }
            n_sites += 1;
        }
        Self {
            origin,
            resolution,
            width,
            height,
            blocked,
            site,
            n_sites: n_sites as usize,
        }
    }

    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }

    pub fn cell_center(&self, idx: usize) -> Point {
        let (col, row) = (idx % self.width, idx / self.width);
        Point::new(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    /// Calls `f` for each in-grid 8-neighbor of `idx`, in [`RING`] order.
    #[inline]
    pub fn for_each_neighbor(&self, idx: usize, mut f: impl FnMut(usize)) {
        let (col, row) = ((idx % self.width) as i32, (idx / self.width) as i32);
        for (dx, dy) in RING {
            let (c, r) = (col + dx, row + dy);
            if c >= 0 && r >= 0 && (c as usize) < self.width && (r as usize) < self.height {
                f(r as usize * self.width + c as usize);
            }
        }
    }
}

/// Blocks the outer ring of cells and every cell whose center lies inside a pedestrian disc.
pub fn rasterize_obstacles(s: &Scenario) -> OccupancyGrid {
    let (width, height) = s.grid_dims();
    let origin = Point::new(s.bounds.xmin, s.bounds.ymin);
    let res = s.resolution;
    let mut blocked = vec![false; width * height];
    for row in 0..height {
        for col in 0..width {
            if row == 0 || col == 0 || row + 1 == height || col + 1 == width {
                blocked[row * width + col] = true;
            }
        }
    }
    for p in &s.pedestrians {
        let c = p.center();
        let col_lo = (((c.x - p.radius - origin.x) / res).floor().max(0.0)) as usize;
        let row_lo = (((c.y - p.radius - origin.y) / res).floor().max(0.0)) as usize;
        let col_hi = ((((c.x + p.radius - origin.x) / res).ceil()) as usize).min(width - 1);
        let row_hi = ((((c.y + p.radius - origin.y) / res).ceil()) as usize).min(height - 1);
        for row in row_lo..=row_hi {
            for col in col_lo..=col_hi {
                let center = Point::new(
                    origin.x + (col as f64 + 0.5) * res,
                    origin.y + (row as f64 + 0.5) * res,
                );
                if center.dist(c) <= p.radius {
                    blocked[row * width + col] = true;
                }
            }
        }
    }
    OccupancyGrid::from_mask(origin, res, width, height, blocked)
}

/// Exact squared Euclidean distance (in cells²) to the nearest blocked cell,
/// together with that cell's index.
#[derive(Debug, Clone)]
pub struct FeatureTransform {
    pub dist2: Vec<i64>,
    pub nearest: Vec<usize>,
}

const UNREACHED: i64 = i64::MAX / 4;

/// Separable lower-envelope transform: column pass, then a parabola envelope per row.
pub fn feature_transform(grid: &OccupancyGrid) -> FeatureTransform {
    let (w, h) = (grid.width, grid.height);
    let n = w * h;
    // per column: nearest blocked row and its vertical distance
    let mut col_dist = vec![UNREACHED; n];
    let mut col_src = vec![usize::MAX; n];
    for col in 0..w {
        let mut last: Option<usize> = None;
        for row in 0..h {
            let i = row * w + col;
            if grid.blocked[i] {
                last = Some(row);
            }
            if let Some(r) = last {
                col_dist[i] = (row - r) as i64;
                col_src[i] = r * w + col;
            }
        }
        last = None;
        for row in (0..h).rev() {
            let i = row * w + col;
            if grid.blocked[i] {
                last = Some(row);
            }
            if let Some(r) = last {
                let d = (r - row) as i64;
                if d < col_dist[i] {
                    col_dist[i] = d;
                    col_src[i] = r * w + col;
                }
            }
        }
    }

    let mut dist2 = vec![UNREACHED; n];
    let mut nearest = vec![usize::MAX; n];
    let mut hull: Vec<usize> = Vec::with_capacity(w);
    let mut bounds: Vec<f64> = Vec::with_capacity(w + 1);
    for row in 0..h {
        let g2 = |x: usize| {
            let d = col_dist[row * w + x];
            d * d
        };
        hull.clear();
        bounds.clear();
        for x in 0..w {
            if col_dist[row * w + x] >= UNREACHED {
                continue;
            }
            loop {
                match hull.last() {
                    None => {
                        hull.push(x);
                        bounds.push(f64::NEG_INFINITY);
                        break;
                    }
                    Some(&q) => {
                        let s = intersection(q, g2(q), x, g2(x));
                        if s <= *bounds.last().unwrap() {
                            hull.pop();
                            bounds.pop();
                        } else {
                            hull.push(x);
                            bounds.push(s);
                            break;
                        }
                    }
                }
            }
        }
        if hull.is_empty() {
            continue;
        }
        let mut k = 0;
        for x in 0..w {
            while k + 1 < hull.len() && bounds[k + 1] < x as f64 {
                k += 1;
            }
            let q = hull[k];
            let dx = x as i64 - q as i64;
            let i = row * w + x;
            dist2[i] = dx * dx + g2(q);
            nearest[i] = col_src[row * w + q];
        }
    }
    FeatureTransform { dist2, nearest }
}

fn intersection(q: usize, fq: i64, x: usize, fx: i64) -> f64 {
    let (q, x) = (q as f64, x as f64);
    ((fx as f64 + x * x) - (fq as f64 + q * q)) / (2.0 * (x - q))
}

/// Unit-width generalized Voronoi skeleton as a per-cell mask.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub cells: Vec<bool>,
    pub transform: FeatureTransform,
    /// Nearest-site label of every cell.
    pub label: Vec<u32>,
}

impl Skeleton {
    pub fn len(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i)
    }
}

pub fn extract_gvd(grid: &OccupancyGrid) -> Result<Skeleton, GvdError> {
    if grid.n_sites < 2 {
        return Err(GvdError::TooFewSites(grid.n_sites));
    }
    if grid.blocked.iter().all(|&b| b) {
        return Err(GvdError::NoFreeCells);
    }
    let transform = feature_transform(grid);
    let label: Vec<u32> = transform
        .nearest
        .iter()
        .map(|&f| grid.site[f].expect("feature is a blocked cell"))
        .collect();

    let n = grid.blocked.len();
    let mut skel = vec![false; n];
    for i in 0..n {
        if grid.blocked[i] {
            continue;
        }
        let mut boundary = false;
        grid.for_each_neighbor(i, |j| boundary |= label[j] != label[i]);
        skel[i] = boundary;
    }

    fill_empty_holes(grid, &mut skel);
    thin(grid, &transform.dist2, &mut skel);
    drop_isolated_points(grid, &mut skel);

    if !skel.iter().any(|&c| c) {
        return Err(GvdError::EmptySkeleton);
    }
    Ok(Skeleton {
        cells: skel,
        transform,
        label,
    })
}

/// Absorbs every 4-connected background pocket that contains no obstacle cell.
fn fill_empty_holes(grid: &OccupancyGrid, skel: &mut [bool]) {
    let (w, h) = (grid.width, grid.height);
    let mut seen = vec![false; skel.len()];
    let mut queue = VecDeque::new();
    let mut component = Vec::new();
    for start in 0..skel.len() {
        if skel[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        component.clear();
        let mut has_obstacle = false;
        while let Some(c) = queue.pop_front() {
            component.push(c);
            has_obstacle |= grid.blocked[c];
            let (col, row) = (c % w, c / w);
            let mut visit = |j: usize| {
                if !skel[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if col > 0 {
                visit(c - 1);
            }
            if col + 1 < w {
                visit(c + 1);
            }
            if row > 0 {
                visit(c - w);
            }
            if row + 1 < h {
                visit(c + w);
            }
        }
        if !has_obstacle {
            for &c in &component {
                skel[c] = true;
            }
        }
    }
}

/// Ring bitmask of foreground neighbors (bit k set for `RING[k]`).
#[inline]
fn ring_mask(grid: &OccupancyGrid, skel: &[bool], idx: usize) -> u8 {
    let (col, row) = ((idx % grid.width) as i32, (idx / grid.width) as i32);
    let mut mask = 0u8;
    for (k, (dx, dy)) in RING.iter().enumerate() {
        let (c, r) = (col + dx, row + dy);
        if c >= 0 && r >= 0 && (c as usize) < grid.width && (r as usize) < grid.height && skel[r as usize * grid.width + c as usize] {
            mask |= 1 << k;
        }
    }
    mask
}

/// Whether deleting a foreground point with this neighborhood preserves topology
/// (8-connected foreground, 4-connected background).
pub fn is_simple(mask: u8) -> bool {
    simple_table()[mask as usize]
}

fn simple_table() -> &'static [bool; 256] {
    static TABLE: OnceLock<[bool; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [false; 256];
        for (m, slot) in t.iter_mut().enumerate() {
            *slot = simple_by_components(m as u8);
        }
        t
    })
}

fn simple_by_components(mask: u8) -> bool {
    let on = |k: usize| mask & (1 << k) != 0;
    let adjacent = |a: usize, b: usize, four: bool| {
        let (ax, ay) = RING[a];
        let (bx, by) = RING[b];
        let (dx, dy) = ((ax - bx).abs(), (ay - by).abs());
        if four {
            dx + dy == 1
        } else {
            dx.max(dy) == 1
        }
    };
    let components = |fg: bool, four: bool| -> Vec<Vec<usize>> {
        let mut seen = [false; 8];
        let mut out = Vec::new();
        for s in 0..8 {
            if on(s) != fg || seen[s] {
                continue;
            }
            let mut stack = vec![s];
            seen[s] = true;
            let mut comp = Vec::new();
            while let Some(a) = stack.pop() {
                comp.push(a);
                for b in 0..8 {
                    if on(b) == fg && !seen[b] && adjacent(a, b, four) {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            out.push(comp);
        }
        out
    };
    let fg = components(true, false);
    // even ring positions are the 4-neighbors of the center
    let bg_touching = components(false, true)
        .into_iter()
        .filter(|c| c.iter().any(|k| k % 2 == 0))
        .count();
    fg.len() == 1 && bg_touching == 1
}

fn thin(grid: &OccupancyGrid, dist2: &[i64], skel: &mut [bool]) {
    let mut order: Vec<usize> = (0..skel.len()).filter(|&i| skel[i]).collect();
    order.sort_by_key(|&i| (dist2[i], i));
    loop {
        let mut changed = false;
        for &i in &order {
            if skel[i] && is_simple(ring_mask(grid, skel, i)) {
                skel[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        order.retain(|&i| skel[i]);
    }
}

fn drop_isolated_points(grid: &OccupancyGrid, skel: &mut [bool]) {
    for i in 0..skel.len() {
        if skel[i] && ring_mask(grid, skel, i) == 0 {
            skel[i] = false;
        }
    }
}

/// Number of skeleton 8-neighbors of `idx`.
pub fn skeleton_degree(grid: &OccupancyGrid, skel: &[bool], idx: usize) -> u32 {
    ring_mask(grid, skel, idx).count_ones()
}
