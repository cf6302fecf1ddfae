use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use meshplace::{
    connectivity_components, exhaustive_best, init_placement, nr_init, nr_min, parse_region,
    run_hillclimb, run_metropolis, serialize_region, CoverState, RegionGenParams, SolverRng,
};
use meshplace_cli::config::{parse_grid, ExperimentConfig, StrategyChoice};
use meshplace_cli::experiment::{load_region, run_experiment, solver_seed};
use meshplace_cli::output::{
    parse_positions, positions_line, render_depth_image, write_file,
};
use rand::SeedableRng;

#[derive(Parser)]
#[command(name = "meshplace", version, about = "Mesh router placement on gridded regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random region file.
    Generate(GenerateArgs),
    /// Run a single Metropolis search with a fixed router count.
    Solve(SolveArgs),
    /// Run the full router-count reduction loop for each seed.
    Reduce(ExperimentArgs),
    /// Run the reduction loop with every removal strategy on the same regions.
    CompareStrategies(ExperimentArgs),
    /// Run the configured experiment (defaults reproduce the 200x200 setup).
    Run(ExperimentArgs),
    /// Exhaustive search on a tiny region.
    #[command(hide = true)]
    Oracle(OracleArgs),
    /// Render a cover-depth image from a region and a positions log.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "200x200")]
    grid: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    interest_blobs: usize,
    /// Radius range, e.g. 8-20.
    #[arg(long, default_value = "8-20")]
    interest_radius: String,
    #[arg(long, default_value_t = 5)]
    prohibited_blobs: usize,
    #[arg(long, default_value = "4-10")]
    prohibited_radius: String,
    /// Output file; prints to stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Flags mirror the config-file keys and override them.
#[derive(Args, Default)]
struct ExperimentArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Region file; replaces the generator.
    #[arg(long)]
    region: Option<PathBuf>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    interest_blobs: Option<usize>,
    #[arg(long)]
    interest_radius: Option<String>,
    #[arg(long)]
    prohibited_blobs: Option<usize>,
    #[arg(long)]
    prohibited_radius: Option<String>,
    #[arg(long)]
    radius: Option<u32>,
    #[arg(long)]
    temp: Option<f64>,
    #[arg(long)]
    nbtostop: Option<usize>,
    #[arg(long)]
    init_factor: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    jump_probability: Option<f64>,
    /// paper (exp(T·Δf)) or canonical (exp(Δf/T)).
    #[arg(long)]
    acceptance: Option<String>,
    /// min-single, min-coverage, max-over or all.
    #[arg(long)]
    strategy: Option<String>,
    /// relative:<margin>, absolute:<fraction> or a bare fraction.
    #[arg(long)]
    threshold: Option<String>,
    /// none, nr-min or a router count.
    #[arg(long)]
    sweep_to: Option<String>,
    /// Comma-separated seeds; ranges like 1..5 allowed.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl ExperimentArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides: [(&str, Option<String>); 18] = [
            ("grid", self.grid),
            ("interest_blobs", self.interest_blobs.map(|v| v.to_string())),
            ("interest_radius", self.interest_radius),
            ("prohibited_blobs", self.prohibited_blobs.map(|v| v.to_string())),
            ("prohibited_radius", self.prohibited_radius),
            ("region", self.region.map(|p| p.display().to_string())),
            ("radius", self.radius.map(|v| v.to_string())),
            ("temp", self.temp.map(|v| v.to_string())),
            ("nbtostop", self.nbtostop.map(|v| v.to_string())),
            ("init_factor", self.init_factor.map(|v| v.to_string())),
            ("max_iterations", self.max_iterations.map(|v| v.to_string())),
            ("jump_probability", self.jump_probability.map(|v| v.to_string())),
            ("acceptance", self.acceptance),
            ("strategy", self.strategy),
            ("threshold", self.threshold),
            ("sweep_to", self.sweep_to),
            ("seeds", self.seeds),
            ("output", self.output.map(|p| p.display().to_string())),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                config.apply(key, &value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Router count; defaults to the initial count derived from the region.
    #[arg(long)]
    routers: Option<usize>,
    /// Accept only non-worsening moves.
    #[arg(long)]
    hillclimb: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    routers: usize,
    #[arg(long, default_value_t = 2)]
    radius: u32,
    #[arg(long, default_value_t = 10)]
    cap: usize,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    positions: PathBuf,
    /// 0-based line of the positions log; defaults to the last line.
    #[arg(long)]
    line: Option<usize>,
    #[arg(long, default_value_t = 8)]
    radius: u32,
    #[arg(short, long)]
    output: PathBuf,
}

fn read_region(path: &PathBuf) -> Result<meshplace::Region> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_region(&text).with_context(|| format!("parsing {}", path.display()))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let (width, height) = parse_grid(&args.grid)?;
    let mut config = ExperimentConfig::default();
    config.apply("interest_radius", &args.interest_radius)?;
    config.apply("prohibited_radius", &args.prohibited_radius)?;
    let meshplace_cli::RegionSource::Generate(base) = config.region else {
        unreachable!()
    };
    let params = RegionGenParams {
        width,
        height,
        interest_blob_count: args.interest_blobs,
        prohibited_blob_count: args.prohibited_blobs,
        seed: args.seed,
        ..base
    };
    let text = serialize_region(&meshplace::generate_region(&params)?);
    match args.output {
        Some(path) => write_file(&path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let config = args.experiment.into_config()?;
    let seed = config.seeds[0];
    let region = load_region(&config.region, seed)?;
    let params = config.solver_params(solver_seed(seed));
    let n = match args.routers {
        Some(0) => bail!("--routers must be positive"),
        Some(n) => n,
        None => nr_init(nr_min(&region, params.radius), params.init_factor)?,
    };
    let mut rng = SolverRng::seed_from_u64(params.seed);
    let initial = init_placement(&region, n, params.radius, &mut rng)?;
    let started = std::time::Instant::now();
    let outcome = if args.hillclimb {
        run_hillclimb(&region, initial, &params, &mut rng)?
    } else {
        run_metropolis(&region, initial, &params, &mut rng)?
    };
    let m = outcome.state.metrics(n);
    let out = &config.output_dir;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_file(&out.join("region.region"), serialize_region(&region))?;
    write_file(
        &out.join("solve.positions"),
        positions_line(&outcome.placement.positions) + "\n",
    )?;
    render_depth_image(&region, &outcome.state, &out.join("solve.ppm"))?;
    println!(
        "routers={n} nr_min={} f={} initial_f={} required={:.4} optional={:.4} iterations={} accepted={} components={} elapsed={:.2?}",
        nr_min(&region, params.radius),
        outcome.trace.best_f,
        outcome.trace.initial_f,
        m.required_fraction,
        m.optional_fraction,
        outcome.trace.iterations_run,
        outcome.trace.accepted_count(),
        connectivity_components(&outcome.placement.positions, 2 * params.radius)?,
        started.elapsed(),
    );
    Ok(())
}

fn experiment(args: ExperimentArgs, force_all: bool) -> Result<()> {
    let mut config = args.into_config()?;
    if force_all {
        config.strategy = StrategyChoice::All;
    }
    let outcome = run_experiment(&config)?;
    print!("{}", outcome.summary);
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let region = read_region(&args.region)?;
    let result = exhaustive_best(&region, args.routers, args.radius, args.cap)?;
    println!(
        "best_f={} interest={} evaluated={}",
        result.best_f,
        region.interest_count(),
        result.evaluated
    );
    for p in &result.best_placements {
        println!("{}", positions_line(p));
    }
    Ok(())
}

fn render(args: RenderArgs) -> Result<()> {
    let region = read_region(&args.region)?;
    let text = std::fs::read_to_string(&args.positions)
        .with_context(|| format!("reading {}", args.positions.display()))?;
    let lines = parse_positions(&text)?;
    let index = args.line.unwrap_or(lines.len().saturating_sub(1));
    let positions = lines
        .get(index)
        .with_context(|| format!("positions log has {} lines, asked for line {index}", lines.len()))?;
    let state = CoverState::with_routers(&region, args.radius, positions)?;
    render_depth_image(&region, &state, &args.output)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Reduce(a) | Command::Run(a) => experiment(a, false),
        Command::CompareStrategies(a) => experiment(a, true),
        Command::Oracle(a) => oracle(a),
        Command::Render(a) => render(a),
    }
}
