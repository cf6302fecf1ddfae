//! Multi-seed experiment orchestration.
//!
//! Each `(seed, strategy)` pair is an independent run on its own worker.
//! Runs share only the immutable region. Output files are named per seed and
//! strategy; the aggregate `summary.txt` is written once all runs finish.
//!
//! ```text
//! <output>/
//!   summary.txt
//!   seed-<s>/region.region
//!   seed-<s>/<strategy>.csv        coverage curve, one row per router count
//!   seed-<s>/<strategy>.positions  placement per curve row
//!   seed-<s>/<strategy>.ppm        cover depth of the retained placement
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use meshplace::{
    connectivity_components, generate_region, nr_min, optimize_router_count, parse_region,
    serialize_region, CoverState, ReductionOptions, ReductionReport, Region, RemovalStrategy,
    SolverRng,
};
use rand::SeedableRng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, RegionSource, SweepTo};
use crate::output::{emit_coverage_curve, positions_log, render_depth_image, write_file};

/// Fractions within this margin of the curve's best count as saturated.
pub const NR_MAX_TOLERANCE: f64 = 0.005;

/// Solver seed for a run seed; keeps the solver stream apart from the
/// region generator, which uses the run seed directly.
pub fn solver_seed(seed: u64) -> u64 {
    // SplitMix64 finalizer.
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn load_region(source: &RegionSource, seed: u64) -> Result<Region> {
    match source {
        RegionSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading region {}", path.display()))?;
            parse_region(&text).with_context(|| format!("parsing region {}", path.display()))
        }
        RegionSource::Generate(params) => {
            let params = meshplace::RegionGenParams { seed, ..params.clone() };
            Ok(generate_region(&params).with_context(|| format!("generating region for seed {seed}"))?)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub strategy: RemovalStrategy,
    pub report: ReductionReport,
    pub elapsed: Duration,
}

impl SeedRun {
    pub fn nr_max(&self) -> usize {
        self.report.nr_max(NR_MAX_TOLERANCE)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub regions: Vec<(u64, Region)>,
    pub runs: Vec<SeedRun>,
    pub summary: String,
}

/// Runs the reduction loop for one seed and strategy.
pub fn run_seed(config: &ExperimentConfig, region: &Region, seed: u64, strategy: RemovalStrategy) -> Result<ReductionReport> {
    let params = config.solver_params(solver_seed(seed));
    let sweep_floor = match config.sweep_to {
        SweepTo::None => None,
        SweepTo::NrMin => Some(nr_min(region, config.radius).max(1)),
        SweepTo::Count(c) => Some(c.max(1)),
    };
    let options = ReductionOptions {
        strategy,
        threshold: config.threshold,
        sweep_floor,
        ..Default::default()
    };
    let mut rng = SolverRng::seed_from_u64(params.seed);
    Ok(optimize_router_count(region, &params, &options, &mut rng)?)
}

pub fn seed_dir(output: &Path, seed: u64) -> PathBuf {
    output.join(format!("seed-{seed}"))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let regions: Vec<(u64, Region)> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let region = load_region(&config.region, seed)?;
            let dir = seed_dir(out, seed);
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            write_file(&dir.join("region.region"), serialize_region(&region))?;
            Ok((seed, region))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, RemovalStrategy)> = (0..regions.len())
        .flat_map(|i| config.strategy.strategies().into_iter().map(move |s| (i, s)))
        .collect();
    let runs: Vec<SeedRun> = jobs
        .par_iter()
        .map(|&(i, strategy)| {
            let (seed, region) = (&regions[i].0, &regions[i].1);
            let started = Instant::now();
            let report = run_seed(config, region, *seed, strategy)?;
            let elapsed = started.elapsed();
            let dir = seed_dir(out, *seed);
            emit_coverage_curve(&report, *seed, &dir.join(format!("{strategy}.csv")))?;
            write_file(&dir.join(format!("{strategy}.positions")), positions_log(&report))?;
            let state = CoverState::with_routers(region, config.radius, &report.placement.positions)?;
            render_depth_image(region, &state, &dir.join(format!("{strategy}.ppm")))?;
            eprintln!(
                "seed {seed} {strategy}: nr_min {} nr_init {} nr_opt {} required {:.4} in {:.2?}",
                report.nr_min,
                report.nr_init,
                report.nr_opt,
                report.opt().required_fraction,
                elapsed
            );
            Ok(SeedRun {
                seed: *seed,
                strategy,
                report,
                elapsed,
            })
        })
        .collect::<Result<_>>()?;

    let summary = summarize(config, &runs);
    write_file(&out.join("summary.txt"), &summary)?;
    Ok(ExperimentOutcome { regions, runs, summary })
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

type Metric = Box<dyn Fn(&SeedRun) -> Option<f64>>;

/// Deterministic text summary: one row per run, then per-strategy aggregates.
pub fn summarize(config: &ExperimentConfig, runs: &[SeedRun]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# radius={} temp={} nbtostop={} init_factor={} acceptance={} threshold={:?}",
        config.radius, config.temperature, config.nbtostop, config.init_factor, config.acceptance, config.threshold
    )
    .unwrap();
    writeln!(
        out,
        "seed strategy nr_min nr_init nr_opt nr_max opt_ratio required optional below_threshold required_at_nr_min optional_at_nr_min components"
    )
    .unwrap();
    for run in runs {
        let r = &run.report;
        let opt = r.opt();
        let at_min = r.step_with_count(r.nr_min);
        let fmt_at = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let components = connectivity_components(&r.placement.positions, 2 * config.radius).unwrap_or(0);
        writeln!(
            out,
            "{} {} {} {} {} {} {:.4} {:.4} {:.4} {} {} {} {}",
            run.seed,
            run.strategy,
            r.nr_min,
            r.nr_init,
            r.nr_opt,
            run.nr_max(),
            r.nr_opt as f64 / r.nr_min as f64,
            opt.required_fraction,
            opt.optional_fraction,
            r.below_threshold,
            fmt_at(at_min.map(|s| s.required_fraction)),
            fmt_at(at_min.map(|s| s.optional_fraction)),
            components,
        )
        .unwrap();
    }
    writeln!(out, "# aggregate over seeds").unwrap();
    writeln!(out, "strategy metric median min max").unwrap();
    for strategy in config.strategy.strategies() {
        let mine: Vec<&SeedRun> = runs.iter().filter(|r| r.strategy == strategy).collect();
        let metrics: [(&str, Metric); 6] = [
            ("nr_opt", Box::new(|r| Some(r.report.nr_opt as f64))),
            ("opt_ratio", Box::new(|r| Some(r.report.nr_opt as f64 / r.report.nr_min as f64))),
            ("nr_max", Box::new(|r| Some(r.nr_max() as f64))),
            ("required", Box::new(|r| Some(r.report.opt().required_fraction))),
            ("optional", Box::new(|r| Some(r.report.opt().optional_fraction))),
            (
                "required_at_nr_min",
                Box::new(|r| r.report.step_with_count(r.report.nr_min).map(|s| s.required_fraction)),
            ),
        ];
        for (name, metric) in metrics.iter() {
            let mut values: Vec<f64> = mine.iter().filter_map(|r| metric(r)).collect();
            if values.is_empty() {
                continue;
            }
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            writeln!(out, "{strategy} {name} {:.4} {lo:.4} {hi:.4}", median(&mut values)).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }

    #[test]
    fn solver_seed_differs_from_run_seed() {
        assert_ne!(solver_seed(1), 1);
        assert_ne!(solver_seed(1), solver_seed(2));
        assert_eq!(solver_seed(7), solver_seed(7));
    }
}
