//! Browser bindings: render a planned scene, compare the two planners, and
//! count the path classes of a generated layout.

use rhcf::bench::Planner;
use rhcf::homotopy::count_simple_paths;
use rhcf::metrics::{cumulative_gain, normalized_cg_against, path_set_diversity};
use rhcf::social::rasterize_field;
use rhcf::svg::render_svg;
use rhcf::{build_navgraph_parts, generate_scenario, Family, GraphBuild, PathSet, Scenario};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn scene(family: &str, peds: u32, seed: u32) -> Result<(Scenario, GraphBuild), String> {
    let family: Family = family.parse()?;
    let s = generate_scenario(family, peds as usize, u64::from(seed)).map_err(|e| e.to_string())?;
    let build = build_navgraph_parts(&s).map_err(|e| e.to_string())?;
    Ok((s, build))
}

fn plan(planner: &str, build: &GraphBuild, k: u32, seed: u64) -> Result<PathSet, String> {
    let planner: Planner = planner.parse()?;
    planner.plan(&build.graph, k as usize, seed, None).map_err(|e| e.to_string())
}

/// SVG of a generated layout with `k` paths from `planner` (`rhcf` or `yen`).
#[wasm_bindgen]
pub fn render(family: &str, peds: u32, seed: u32, planner: &str, k: u32, show_field: bool) -> Result<String, String> {
    let (s, build) = scene(family, peds, seed)?;
    let paths = plan(planner, &build, k, u64::from(seed))?;
    let field = show_field.then(|| rasterize_field(&s));
    Ok(render_svg(&s, &build, &paths.paths, field.as_ref()))
}

/// JSON with mean nCG and diversity of RHCF over `trials` seeds, next to Yen's set.
#[wasm_bindgen]
pub fn compare(family: &str, peds: u32, seed: u32, k: u32, trials: u32) -> Result<String, String> {
    let (_, build) = scene(family, peds, seed)?;
    let g = &build.graph;
    let yen = plan("yen", &build, k, 0)?;
    let trials = trials.max(1);
    let (mut ncg, mut rd, mut shortfalls) = (0.0, 0.0, 0);
    for t in 0..trials {
        let h = plan("rhcf", &build, k, u64::from(seed) + u64::from(t))?;
        let reference = PathSet {
            paths: yen.paths[..h.len().min(yen.len())].to_vec(),
            ..PathSet::default()
        };
        ncg += normalized_cg_against(&h, &reference).map_err(|e| e.to_string())?;
        rd += path_set_diversity(g, &h).value;
        shortfalls += h.shortfall as u32;
    }
    let n = trials as f64;
    Ok(json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "rhcf": { "ncg": ncg / n, "rd": rd / n, "shortfalls": shortfalls },
        "yen": {
            "ncg": 1.0,
            "rd": path_set_diversity(g, &yen).value,
            "cg": cumulative_gain(&yen),
            "costs": yen.costs(),
        },
    })
    .to_string())
}

/// Number of simple start-to-goal paths, capped at `limit`, as `{"count", "overflow"}`.
#[wasm_bindgen]
pub fn classes(family: &str, peds: u32, seed: u32, limit: u32) -> Result<String, String> {
    let (_, build) = scene(family, peds, seed)?;
    let (count, overflow) = count_simple_paths(&build.graph, limit as usize);
    Ok(json!({ "count": count, "overflow": overflow }).to_string())
}
