//! Experiment configuration.
//!
//! Config files are flat `key = value` lines; `#` starts a comment. Command
//! line flags are applied on top through the same keys. Every default
//! reproduces the headline 200x200 experiment.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use meshplace::{AcceptanceForm, RegionGenParams, RemovalStrategy, SolverParams, Threshold};

#[derive(Debug, Clone, PartialEq)]
pub enum RegionSource {
    File(PathBuf),
    /// Generator parameters; the seed is replaced by each run's seed.
    Generate(RegionGenParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyChoice {
    One(RemovalStrategy),
    All,
}

impl StrategyChoice {
    pub fn strategies(self) -> Vec<RemovalStrategy> {
        match self {
            StrategyChoice::One(s) => vec![s],
            StrategyChoice::All => RemovalStrategy::ALL.to_vec(),
        }
    }
}

/// How far below the threshold the coverage curve is extended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTo {
    None,
    NrMin,
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub region: RegionSource,
    pub radius: u32,
    pub temperature: f64,
    pub nbtostop: usize,
    pub init_factor: f64,
    pub max_iterations: usize,
    pub jump_probability: f64,
    pub acceptance: AcceptanceForm,
    pub strategy: StrategyChoice,
    pub threshold: Threshold,
    pub sweep_to: SweepTo,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let solver = SolverParams::default();
        Self {
            region: RegionSource::Generate(RegionGenParams::default()),
            radius: solver.radius,
            temperature: solver.temperature,
            nbtostop: solver.nbtostop,
            init_factor: solver.init_factor,
            max_iterations: solver.max_iterations,
            jump_probability: solver.move_config.jump_probability,
            acceptance: solver.acceptance,
            strategy: StrategyChoice::One(RemovalStrategy::MinSingleCoverage),
            threshold: Threshold::Relative(0.01),
            sweep_to: SweepTo::NrMin,
            seeds: vec![1, 2, 3, 4, 5],
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value {value:?} for {key}: {e}"))
}

/// `"8-20"` or `"8"`.
fn parse_range(key: &str, value: &str) -> Result<(usize, usize)> {
    match value.split_once('-') {
        Some((lo, hi)) => Ok((parse_num(key, lo.trim())?, parse_num(key, hi.trim())?)),
        None => {
            let v = parse_num(key, value)?;
            Ok((v, v))
        }
    }
}

/// `"200x200"`.
pub fn parse_grid(value: &str) -> Result<(usize, usize)> {
    let (w, h) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("grid must look like WIDTHxHEIGHT, got {value:?}"))?;
    Ok((parse_num("grid", w.trim())?, parse_num("grid", h.trim())?))
}

pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi): (u64, u64) = (parse_num("seeds", lo)?, parse_num("seeds", hi)?);
                if lo > hi {
                    bail!("empty seed range {part:?}");
                }
                seeds.extend(lo..=hi);
            }
            None => seeds.push(parse_num("seeds", part)?),
        }
    }
    Ok(seeds)
}

/// `relative:0.01`, `absolute:0.9`, or a bare number (absolute).
pub fn parse_threshold(value: &str) -> Result<Threshold> {
    let t = match value.split_once(':') {
        Some(("relative", v)) => Threshold::Relative(parse_num("threshold", v.trim())?),
        Some(("absolute", v)) => Threshold::Absolute(parse_num("threshold", v.trim())?),
        Some((mode, _)) => bail!("unknown threshold mode {mode:?} (expected relative or absolute)"),
        None => Threshold::Absolute(parse_num("threshold", value)?),
    };
    Ok(t)
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
            self.apply(key.trim(), value.trim())
                .with_context(|| format!("line {}", n + 1))?;
        }
        Ok(())
    }

    fn gen_params(&mut self) -> &mut RegionGenParams {
        if !matches!(self.region, RegionSource::Generate(_)) {
            self.region = RegionSource::Generate(RegionGenParams::default());
        }
        match &mut self.region {
            RegionSource::Generate(p) => p,
            RegionSource::File(_) => unreachable!(),
        }
    }

    /// Applies one setting.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "region" => self.region = RegionSource::File(PathBuf::from(value)),
            "grid" => {
                let (w, h) = parse_grid(value)?;
                let p = self.gen_params();
                p.width = w;
                p.height = h;
            }
            "interest_blobs" => self.gen_params().interest_blob_count = parse_num(key, value)?,
            "interest_radius" => self.gen_params().interest_blob_radius_range = parse_range(key, value)?,
            "prohibited_blobs" => self.gen_params().prohibited_blob_count = parse_num(key, value)?,
            "prohibited_radius" => {
                self.gen_params().prohibited_blob_radius_range = parse_range(key, value)?
            }
            "radius" => self.radius = parse_num(key, value)?,
            "temp" | "temperature" => self.temperature = parse_num(key, value)?,
            "nbtostop" => self.nbtostop = parse_num(key, value)?,
            "init_factor" => self.init_factor = parse_num(key, value)?,
            "max_iterations" => self.max_iterations = parse_num(key, value)?,
            "jump_probability" => self.jump_probability = parse_num(key, value)?,
            "acceptance" => self.acceptance = value.parse()?,
            "strategy" => {
                self.strategy = if value == "all" {
                    StrategyChoice::All
                } else {
                    StrategyChoice::One(value.parse()?)
                }
            }
            "threshold" => self.threshold = parse_threshold(value)?,
            "sweep_to" => {
                self.sweep_to = match value {
                    "none" => SweepTo::None,
                    "nr-min" => SweepTo::NrMin,
                    v => SweepTo::Count(parse_num(key, v)?),
                }
            }
            "seeds" => self.seeds = parse_seeds(value)?,
            "output" => self.output_dir = PathBuf::from(value),
            other => bail!("unknown setting {other:?}"),
        }
        Ok(())
    }

    pub fn solver_params(&self, seed: u64) -> SolverParams {
        let mut p = SolverParams {
            temperature: self.temperature,
            nbtostop: self.nbtostop,
            radius: self.radius,
            init_factor: self.init_factor,
            seed,
            max_iterations: self.max_iterations,
            acceptance: self.acceptance,
            ..Default::default()
        };
        p.move_config.jump_probability = self.jump_probability;
        p
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("at least one seed is required");
        }
        self.solver_params(0).validate()?;
        if let RegionSource::Generate(p) = &self.region {
            p.validate()?;
        }
        let (Threshold::Absolute(t) | Threshold::Relative(t)) = self.threshold;
        if !(0.0..=1.0).contains(&t) {
            bail!("threshold value {t} outside [0, 1]");
        }
        Ok(())
    }
}
