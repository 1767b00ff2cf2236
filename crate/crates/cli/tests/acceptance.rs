//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so criteria execute sequentially and the
//! timing comparison is not skewed by parallel tests.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rhcf::bench::{self, Planner, RunConfig};
use rhcf::homotopy::{count_simple_paths, enumerate_simple_paths, paths_same_class};
use rhcf::metrics::{discrete_frechet, robust_diversity, time_to_k};
use rhcf::planner::transition_distribution;
use rhcf::social::{anisotropy, edge_cost_with_step};
use rhcf::yen::Bans;
use rhcf::{
    build_navgraph, dijkstra, generate_scenario, random_walk, rhcf, yen_k_shortest, Family, NavGraph, Point,
    RandomSource, Scenario,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle equivalence", c01_oracle_equivalence),
        ("rhcf completeness", c02_completeness),
        ("homotopy distinctness", c03_homotopy_distinctness),
        ("transition normalization", c04_transition_probabilities),
        ("timing trend", c05_timing),
        ("nCG convergence", c06_ncg_convergence),
        ("nCG band", c07_ncg_band),
        ("diversity trend", c08_diversity),
        ("metric oracles", c09_metrics),
        ("field properties", c10_field),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = run();
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ---- shared helpers ----

/// Random simple graph on `n` vertices with integer costs in 1..=5.
fn random_graph(rng: &mut RandomSource, n: usize) -> NavGraph {
    let vertices = (0..n)
        .map(|_| Point::new(rng.next_unit() * 10.0, rng.next_unit() * 10.0))
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_unit() < 0.45 {
                edges.push((u, v, 1.0 + (rng.next_unit() * 5.0).floor().min(4.0)));
            }
        }
    }
    NavGraph::from_costs(vertices, &edges, 0, n - 1).expect("valid random graph")
}

/// Every simple start-to-goal path with its front-to-back cost, ranked by cost then sequence.
fn ranked_paths(g: &NavGraph) -> Vec<(f64, Vec<usize>)> {
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
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out
}

fn frechet_by_couplings(a: &[Point], b: &[Point]) -> f64 {
    fn go(a: &[Point], b: &[Point], i: usize, j: usize, worst: f64, best: &mut f64) {
        let worst = worst.max(a[i].dist(b[j]));
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = best.min(worst);
            return;
        }
        if i + 1 < a.len() {
            go(a, b, i + 1, j, worst, best);
        }
        if j + 1 < b.len() {
            go(a, b, i, j + 1, worst, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            go(a, b, i + 1, j + 1, worst, best);
        }
    }
    let mut best = f64::INFINITY;
    go(a, b, 0, 0, 0.0, &mut best);
    best
}

fn scenario_graph(family: Family, n: usize, seed: u64) -> Result<(Scenario, NavGraph), String> {
    let s = generate_scenario(family, n, seed).map_err(|e| format!("{family} n={n} seed={seed}: {e}"))?;
    let g = build_navgraph(&s).map_err(|e| format!("{family} n={n} seed={seed}: {e}"))?;
    Ok((s, g))
}

fn vertex_sets(paths: &[rhcf::GraphPath]) -> BTreeSet<Vec<usize>> {
    paths.iter().map(|p| p.vertices.clone()).collect()
}

/// Mean RHCF and Yen metrics at K over `trials` RHCF seeds.
struct Comparison {
    rhcf_ncg: f64,
    rhcf_rd: f64,
    yen_rd: f64,
}

fn compare(g: &NavGraph, label: &str, k: usize, trials: usize) -> Result<Comparison, String> {
    let cfg = RunConfig {
        scenario: label.to_string(),
        planners: vec![Planner::Rhcf, Planner::Yen],
        k_values: vec![k],
        trials,
        seed: 1,
        max_attempts: None,
    };
    let rows = bench::run(g, &cfg).map_err(|e| e.to_string())?;
    let mean = |planner: &str, f: fn(&bench::CsvRow) -> f64| {
        let v: Vec<f64> = rows.iter().filter(|r| r.report.planner == planner).map(f).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    Ok(Comparison {
        rhcf_ncg: mean("rhcf", |r| r.report.ncg),
        rhcf_rd: mean("rhcf", |r| r.report.rd),
        yen_rd: mean("yen", |r| r.report.rd),
    })
}

// ---- criteria ----

fn c01_oracle_equivalence() -> Outcome {
    let clock = Instant::now();
    let mut rng = RandomSource::new(2024);
    let (mut graphs, mut compared) = (0, 0);
    while graphs < 150 {
        let n = 2 + (rng.next_unit() * 9.0) as usize;
        let g = random_graph(&mut rng, n.min(10));
        let ranked = ranked_paths(&g);
        if ranked.is_empty() {
            continue;
        }
        graphs += 1;
        let first = dijkstra(&g, g.start, g.goal, &Bans::none(&g)).ok_or("dijkstra found no path")?;
        let yen1 = yen_k_shortest(&g, 1).map_err(|e| e.to_string())?;
        if yen1.paths[0] != first || first.vertices != ranked[0].1 {
            return Err(format!("rank-1 mismatch on graph {graphs}"));
        }
        for k in [2, 3, 5, 8, 12] {
            let yen = yen_k_shortest(&g, k).map_err(|e| e.to_string())?;
            let got: Vec<&Vec<usize>> = yen.paths.iter().map(|p| &p.vertices).collect();
            let want: Vec<&Vec<usize>> = ranked.iter().take(k).map(|p| &p.1).collect();
            if got != want {
                return Err(format!("K={k} set differs from enumeration on graph {graphs}"));
            }
            compared += 1;
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    check(secs < 10.0, format!("{graphs} graphs, {compared} K-sets matched exactly in {secs:.2}s"))
}

fn c02_completeness() -> Outcome {
    let clock = Instant::now();
    let mut scenarios = 0;
    let mut runs = 0;
    for family in Family::ALL {
        for n in 1..=4 {
            for seed in 0..3 {
                let (_, g) = scenario_graph(family, n, seed)?;
                let all = enumerate_simple_paths(&g, 1000);
                if all.overflow || all.paths.len() > 20 {
                    continue;
                }
                scenarios += 1;
                let want = vertex_sets(&all.paths);
                for walk_seed in 0..20 {
                    let h = rhcf(&g, want.len(), &mut RandomSource::new(walk_seed), 50_000).map_err(|e| e.to_string())?;
                    runs += 1;
                    if vertex_sets(&h.paths) != want {
                        return Err(format!(
                            "{family} n={n} seed={seed} walk seed {walk_seed}: found {} of {}",
                            h.len(),
                            want.len()
                        ));
                    }
                }
            }
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    check(
        scenarios >= 20 && secs < 60.0,
        format!("{scenarios} scenarios x 20 seeds, {runs} runs recovered the full path set"),
    )
}

fn c03_homotopy_distinctness() -> Outcome {
    let mut pairs = 0;
    for family in Family::ALL {
        for n in 1..=10 {
            for seed in 0..2 {
                let (s, g) = scenario_graph(family, n, seed)?;
                let h = rhcf(&g, 10, &mut RandomSource::new(seed + 100), 10_000).map_err(|e| e.to_string())?;
                for i in 0..h.len() {
                    for j in i + 1..h.len() {
                        pairs += 1;
                        match paths_same_class(&g, &h.paths[i], &h.paths[j], &s) {
                            Ok(false) => {}
                            other => {
                                return Err(format!("{family} n={n} seed={seed}: paths {i},{j} gave {other:?}"))
                            }
                        }
                    }
                }
            }
        }
    }
    check(pairs >= 500, format!("{pairs} pairs, all in distinct classes"))
}

fn c04_transition_probabilities() -> Outcome {
    let mut graphs = Vec::new();
    let mut rng = RandomSource::new(7);
    for _ in 0..100 {
        let n = 2 + (rng.next_unit() * 9.0) as usize;
        graphs.push(random_graph(&mut rng, n.min(10)));
    }
    for family in Family::ALL {
        for n in [2, 6, 10] {
            graphs.push(scenario_graph(family, n, 0)?.1);
        }
    }
    let mut vertices = 0;
    let mut worst = 0.0f64;
    for g in &graphs {
        for v in 0..g.vertex_count() {
            let dist = transition_distribution(g, v, |_| true);
            if dist.is_empty() {
                continue;
            }
            vertices += 1;
            worst = worst.max((dist.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs());
        }
    }
    if worst > 1e-9 {
        return Err(format!("probability mass off by {worst:e}"));
    }

    let diamond = NavGraph::from_costs(
        vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, -1.0), Point::new(2.0, 0.0)],
        &[(0, 1, 1.0), (0, 2, 3.0), (1, 3, 1.0), (2, 3, 1.0)],
        0,
        3,
    )
    .map_err(|e| e.to_string())?;
    let mut rng = RandomSource::new(99);
    let walks = 10_000;
    let cheap = (0..walks)
        .filter(|_| random_walk(&diamond, &mut rng).is_some_and(|p| p.vertices[1] == 1))
        .count();
    let freq = cheap as f64 / walks as f64;
    check(
        (freq - 0.75).abs() <= 0.02,
        format!("{vertices} vertices normalized within {worst:.1e}; cheap first step taken {freq:.4} (expected 0.75)"),
    )
}

fn c05_timing() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut used = 0;
    for family in [Family::CrowdA, Family::CrowdB] {
        for seed in 0..3 {
            let (_, g) = scenario_graph(family, 14, seed)?;
            let (count, _) = count_simple_paths(&g, 500);
            if count < 500 {
                continue;
            }
            used += 1;
            // warm caches once before measuring
            let _ = Planner::Rhcf.plan(&g, 5, 0, None);
            let _ = Planner::Yen.plan(&g, 5, 0, None);
            let r = time_to_k(|g, k, seed| Planner::Rhcf.plan(g, k, seed, None), &g, 5, 100, 1);
            let y = time_to_k(|g, k, seed| Planner::Yen.plan(g, k, seed, None), &g, 5, 100, 1);
            let ratio = y.mean_us / r.mean_us;
            ok &= ratio >= 2.0;
            lines.push(format!("{family}/{seed} {:.1}us vs {:.1}us ({ratio:.1}x)", r.mean_us, y.mean_us));
        }
    }
    check(ok && used > 0, format!("rhcf vs yen at K=5 on {used} graphs with >=500 paths: {}", lines.join(", ")))
}

fn c06_ncg_convergence() -> Outcome {
    let (_, g) = scenario_graph(Family::CrowdA, 6, 0)?;
    let (total, overflow) = count_simple_paths(&g, 200);
    if overflow {
        return Err("scenario has more than 200 classes".into());
    }
    let mut ks: Vec<usize> = [1, 2, 3, 5, 8, 10, 15, 20, 25, 30, 35, 40].into_iter().filter(|&k| k < total).collect();
    ks.push(total);
    let trials = 30;
    let mut curve = Vec::new();
    for &k in &ks {
        let mut sum = 0.0;
        for t in 0..trials {
            let h = rhcf(&g, k, &mut RandomSource::new(t), 100_000).map_err(|e| e.to_string())?;
            if h.len() != k {
                return Err(format!("K={k} trial {t} found only {}", h.len()));
            }
            sum += rhcf::metrics::normalized_cg(&h, &g, k).map_err(|e| e.to_string())?;
        }
        curve.push(sum / trials as f64);
    }
    let monotone = curve.windows(2).all(|w| w[1] >= w[0] - 0.02);
    let last = *curve.last().unwrap();
    let shown: Vec<String> = ks.iter().zip(&curve).map(|(k, c)| format!("{k}:{c:.3}")).collect();
    check(
        monotone && (last - 1.0).abs() <= 1e-9,
        format!("{total} classes, mean nCG by K {}", shown.join(" ")),
    )
}

/// Six pedestrians: a few dozen classes per layout.
const BAND_PEDS: usize = 6;
const BAND_LAYOUTS: u64 = 3;

fn c07_ncg_band() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for family in Family::ALL {
        let mut sum = 0.0;
        for seed in 0..BAND_LAYOUTS {
            let (_, g) = scenario_graph(family, BAND_PEDS, seed)?;
            sum += compare(&g, family.name(), 5, 100)?.rhcf_ncg;
        }
        let mean = sum / BAND_LAYOUTS as f64;
        ok &= (0.6..=1.0).contains(&mean);
        lines.push(format!("{family} {mean:.3}"));
    }
    check(ok, format!("rhcf K=5 mean nCG: {}", lines.join(", ")))
}

fn c08_diversity() -> Outcome {
    let mut wins = 0;
    let mut lines = Vec::new();
    for family in [Family::CrowdA, Family::CrowdB, Family::Surrounded] {
        let (mut r, mut y) = (0.0, 0.0);
        for seed in 0..BAND_LAYOUTS {
            let (_, g) = scenario_graph(family, BAND_PEDS, seed)?;
            let c = compare(&g, family.name(), 5, 100)?;
            r += c.rhcf_rd;
            y += c.yen_rd;
        }
        let (r, y) = (r / BAND_LAYOUTS as f64, y / BAND_LAYOUTS as f64);
        if r >= y {
            wins += 1;
        }
        lines.push(format!("{family} rhcf {r:.3} yen {y:.3}"));
    }
    check(wins >= 2, format!("rhcf at least as diverse in {wins}/3 families: {}", lines.join(", ")))
}

fn c09_metrics() -> Outcome {
    let mut rng = RandomSource::new(31);
    let seq = |rng: &mut RandomSource| -> Vec<Point> {
        let len = 1 + (rng.next_unit() * 6.0) as usize;
        (0..len.min(6))
            .map(|_| Point::new(rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0))
            .collect()
    };
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (seq(&mut rng), seq(&mut rng));
        worst = worst.max((discrete_frechet(&a, &b) - frechet_by_couplings(&a, &b)).abs());
    }
    let mut rd_worst = 0.0f64;
    for _ in 0..200 {
        let n = 2 + (rng.next_unit() * 4.0) as usize;
        let set: Vec<Vec<Point>> = (0..n).map(|_| seq(&mut rng)).collect();
        let mut total = 0.0;
        for i in 0..n {
            let nearest = (0..n)
                .filter(|&j| j != i)
                .map(|j| frechet_by_couplings(&set[i], &set[j]))
                .fold(f64::INFINITY, f64::min);
            total += nearest;
        }
        rd_worst = rd_worst.max((robust_diversity(&set).value - total / n as f64).abs());
    }
    check(
        worst <= 1e-12 && rd_worst <= 1e-12,
        format!("1000 Frechet pairs within {worst:.1e}, 200 RD sets within {rd_worst:.1e}"),
    )
}

fn c10_field() -> Outcome {
    for i in 0..=20 {
        let lambda = i as f64 / 20.0;
        for j in 0..=40 {
            let f = anisotropy(lambda, -1.0 + j as f64 / 20.0);
            if f < lambda - 1e-15 || f > 1.0 + 1e-15 {
                return Err(format!("anisotropy {f} outside [{lambda}, 1]"));
            }
        }
    }
    let (mut edges, mut worst) = (0, 0.0f64);
    for family in Family::ALL {
        for n in [1, 4, 8, 12] {
            for seed in 0..2 {
                let (s, g) = scenario_graph(family, n, seed)?;
                for e in &g.edges {
                    edges += 1;
                    if e.cost < e.length {
                        return Err(format!("{family} n={n}: edge cost {} below length {}", e.cost, e.length));
                    }
                    let fine = edge_cost_with_step(&e.geometry, &s.pedestrians, &s.social, s.resolution / 2.0);
                    worst = worst.max((e.cost - fine).abs() / fine);
                }
            }
        }
    }
    check(
        worst < 0.005,
        format!("anisotropy within [lambda, 1]; {edges} edges cost >= length; halving the step moves costs at most {:.4}%", worst * 100.0),
    )
}

fn c11_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("rhcf-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let scenario = dir.join("s.json");
    let bin = env!("CARGO_BIN_EXE_rhcf-bench");
    let status = Command::new(bin)
        .args(["generate", "--family", "crowd_a", "--peds", "8", "--seed", "5", "--out"])
        .arg(&scenario)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err("generate failed".into());
    }
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.join(name);
        let status = Command::new(bin)
            .args(["run", "--planner", "both", "--k", "1,5,10", "--trials", "10", "--seed", "42", "--scenario"])
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err("run failed".into());
        }
        outputs.push(std::fs::read_to_string(&out).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split(',').collect();
                cols.remove(5);
                cols.join(",")
            })
            .collect()
    };
    let (a, b) = (strip(&outputs[0]), strip(&outputs[1]));
    check(
        a == b && a.len() == 61,
        format!("{} rows identical apart from time_us", a.len() - 1),
    )
}
