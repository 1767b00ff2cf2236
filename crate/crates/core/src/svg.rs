//! SVG rendering of a scenario, its skeleton and graph, and a set of paths.

use std::fmt::Write as _;

use crate::geometry::Point;
use crate::graph::GraphBuild;
use crate::path::GraphPath;
use crate::scenario::Scenario;
use crate::social::{grey_level, ScalarField};

const PX_PER_M: f64 = 50.0;
const PATH_COLORS: [&str; 8] = [
    "#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
];

struct Frame {
    xmin: f64,
    ymax: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        (x - self.xmin) * PX_PER_M
    }

    fn y(&self, y: f64) -> f64 {
        (self.ymax - y) * PX_PER_M
    }

    fn pt(&self, p: Point) -> String {
        format!("{:.2},{:.2}", self.x(p.x), self.y(p.y))
    }
}

/// Draws horizontal runs of cells sharing a fill, skipping `None`.
fn cell_runs(
    out: &mut String,
    f: &Frame,
    origin: Point,
    res: f64,
    width: usize,
    height: usize,
    fill: impl Fn(usize, usize) -> Option<String>,
) {
    for row in 0..height {
        let mut col = 0;
        while col < width {
            let Some(color) = fill(col, row) else {
                col += 1;
                continue;
            };
            let start = col;
            while col < width && fill(col, row).as_deref() == Some(color.as_str()) {
                col += 1;
            }
            let x0 = origin.x + start as f64 * res;
            let y1 = origin.y + (row + 1) as f64 * res;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                f.x(x0),
                f.y(y1),
                (col - start) as f64 * res * PX_PER_M,
                res * PX_PER_M
            );
        }
    }
}

/// Scene in the style of a planner figure: greyscale social field, skeleton,
/// navigation graph, pedestrians, robot (red cross), goal (green circle) and
/// one `<path>` element per planned path.
pub fn render_svg(s: &Scenario, build: &GraphBuild, paths: &[GraphPath], field: Option<&ScalarField>) -> String {
    let b = s.bounds;
    let f = Frame {
        xmin: b.xmin,
        ymax: b.ymax,
    };
    let (w, h) = (b.width() * PX_PER_M, b.height() * PX_PER_M);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.2}" height="{h:.2}" fill="white"/>"#);

    if let Some(field) = field {
        let max = field.max_value();
        out.push_str("<g class=\"field\">\n");
        cell_runs(&mut out, &f, field.origin, field.resolution, field.width, field.height, |c, r| {
            // 16 grey levels keeps the run count low
            let g = grey_level(field.get(c, r), max) / 16 * 16 + 15;
            (g < 255).then(|| format!("rgb({g},{g},{g})"))
        });
        out.push_str("</g>\n");
    }

    let grid = &build.grid;
    out.push_str("<g class=\"skeleton\">\n");
    cell_runs(&mut out, &f, grid.origin, grid.resolution, grid.width, grid.height, |c, r| {
        build.skeleton.cells[grid.index(c, r)].then(|| "#9a9a9a".to_string())
    });
    out.push_str("</g>\n");

    let g = &build.graph;
    out.push_str("<g class=\"graph\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\">\n");
    for e in &g.edges {
        let pts: Vec<String> = e.geometry.points.iter().map(|&p| f.pt(p)).collect();
        let _ = writeln!(out, r#"<polyline points="{}"/>"#, pts.join(" "));
    }
    out.push_str("</g>\n<g class=\"vertices\" fill=\"#1f4fd1\">\n");
    for &v in &g.vertices {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#, f.x(v.x), f.y(v.y));
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"paths\" fill=\"none\" stroke-width=\"3\" stroke-linejoin=\"round\">\n");
    for (i, p) in paths.iter().enumerate() {
        let geom = p.geometry(g);
        let mut d = String::new();
        for (j, &q) in geom.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2} {:.2}", if j == 0 { "M" } else { " L" }, f.x(q.x), f.y(q.y));
        }
        let _ = writeln!(
            out,
            r#"<path d="{d}" stroke="{}" opacity="0.8"><title>path {i} cost {:.4}</title></path>"#,
            PATH_COLORS[i % PATH_COLORS.len()],
            p.cost
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"pedestrians\" stroke=\"#1f4fd1\" stroke-width=\"2\" fill=\"none\">\n");
    for p in &s.pedestrians {
        let c = p.center();
        let tip = Point::new(
            c.x + 2.0 * p.radius * p.pose.theta.cos(),
            c.y + 2.0 * p.radius * p.pose.theta.sin(),
        );
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            f.x(c.x),
            f.y(c.y),
            p.radius * PX_PER_M,
            f.x(c.x),
            f.y(c.y),
            f.x(tip.x),
            f.y(tip.y)
        );
    }
    out.push_str("</g>\n");

    let (rx, ry) = (f.x(s.robot.x), f.y(s.robot.y));
    let _ = writeln!(
        out,
        r#"<g class="robot" stroke="red" stroke-width="3"><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"#,
        rx - 8.0,
        ry - 8.0,
        rx + 8.0,
        ry + 8.0,
        rx - 8.0,
        ry + 8.0,
        rx + 8.0,
        ry - 8.0
    );
    let _ = writeln!(
        out,
        r#"<circle class="goal" cx="{:.2}" cy="{:.2}" r="8" fill="none" stroke="green" stroke-width="3"/>"#,
        f.x(s.goal.x),
        f.y(s.goal.y)
    );
    out.push_str("</svg>\n");
    out
}
