use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rhcf::bench::{self, Planner, RunConfig};
use rhcf::homotopy::{count_simple_paths, DEFAULT_ENUMERATION_LIMIT};
use rhcf::social::rasterize_field;
use rhcf::svg::render_svg;
use rhcf::{build_navgraph_parts, generate_scenario, load_scenario, save_scenario, Family, Scenario};

/// Seed used when neither `--seed` nor this variable is given.
const SEED_ENV: &str = "RHCF_SEED";

#[derive(Parser)]
#[command(name = "rhcf-bench", version, about = "Compare RHCF and Yen's K shortest paths on crowd scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated scenario document
    Generate {
        #[arg(long)]
        family: Family,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        peds: u32,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run planners over K values and trials, writing one CSV row per run
    Run(RunArgs),
    /// Count the simple start-to-goal paths of a scenario's graph
    Classes {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
}

#[derive(Args)]
struct Source {
    /// Scenario document
    #[arg(long, conflicts_with_all = ["family", "peds"])]
    scenario: Option<PathBuf>,
    /// Generate instead of loading (needs --peds)
    #[arg(long, requires = "peds")]
    family: Option<Family>,
    #[arg(long, requires = "family", value_parser = clap::value_parser!(u32).range(1..))]
    peds: Option<u32>,
    /// Generator seed when --family is used
    #[arg(long, default_value_t = 0)]
    scenario_seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// rhcf, yen or both
    #[arg(long, default_value = "both", value_parser = planner_set)]
    planner: PlannerSet,
    /// Comma-separated list of K values
    #[arg(long, value_delimiter = ',', default_value = "5", value_parser = clap::value_parser!(u32).range(1..))]
    k: Vec<u32>,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// RHCF walk budget per run; 1000·K when absent
    #[arg(long)]
    max_attempts: Option<usize>,
    /// CSV output; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Render the first planner's trial-0 paths for the largest K
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone)]
struct PlannerSet(Vec<Planner>);

fn planner_set(s: &str) -> Result<PlannerSet, String> {
    bench::parse_planners(s).map(PlannerSet)
}

enum Failure {
    Usage(anyhow::Error),
    Planning(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

fn planning(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Planning(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Planning(e)) => {
            eprintln!("planning failed: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { family, peds, seed, out } => {
            let s = generate_scenario(family, peds as usize, seed)?;
            emit(out.as_deref(), &save_scenario(&s))?;
        }
        Command::Run(args) => run(args)?,
        Command::Classes { source, limit } => {
            let s = source.load()?;
            let build = build_navgraph_parts(&s).map_err(planning)?;
            let (count, overflow) = count_simple_paths(&build.graph, limit);
            println!("classes {count}");
            println!("overflow {overflow}");
        }
    }
    Ok(())
}

impl Source {
    fn load(&self) -> anyhow::Result<Scenario> {
        match (&self.scenario, self.family, self.peds) {
            (Some(path), _, _) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                load_scenario(&text).with_context(|| format!("loading {}", path.display()))
            }
            (None, Some(family), Some(peds)) => Ok(generate_scenario(family, peds as usize, self.scenario_seed)?),
            _ => anyhow::bail!("give --scenario or both --family and --peds"),
        }
    }

    fn label(&self) -> String {
        match (&self.scenario, self.family) {
            (Some(path), _) => path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned()),
            (None, Some(family)) => format!("{family}-{}-{}", self.peds.unwrap_or(0), self.scenario_seed),
            _ => "scenario".into(),
        }
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let s = args.source.load()?;
    let cfg = RunConfig {
        scenario: args.source.label(),
        planners: args.planner.0,
        k_values: args.k.iter().map(|&k| k as usize).collect(),
        trials: args.trials as usize,
        seed: args.seed,
        max_attempts: args.max_attempts,
    };
    cfg.validate().map_err(anyhow::Error::msg)?;
    let build = build_navgraph_parts(&s).map_err(planning)?;
    let rows = bench::run(&build.graph, &cfg).map_err(planning)?;
    emit(args.out.as_deref(), &bench::to_csv(&rows))?;

    if let Some(path) = &args.svg {
        let k = *cfg.k_values.iter().max().expect("validated non-empty");
        let paths = cfg.planners[0]
            .plan(&build.graph, k, cfg.trial_seed(0), cfg.max_attempts)
            .map_err(planning)?;
        let field = rasterize_field(&s);
        let svg = render_svg(&s, &build, &paths.paths, Some(&field));
        fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
