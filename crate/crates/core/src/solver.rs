//! Constant-temperature Metropolis search over router placements.
//!
//! Each iteration moves one router: either a unit step from the configured
//! step set or, with `jump_probability`, a jump to a random eligible cell.
//! Routers only ever sit on cells with `cover = 1` and `place = 1`. The
//! fitness change is computed incrementally from the two discs' symmetric
//! difference and accepted with probability `min(1, exp(T·Δf))` (paper form)
//! or `min(1, exp(Δf/T))` (canonical form). The search stops once the best
//! fitness has not improved for `nbtostop` consecutive iterations.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};

use crate::coverage::CoverState;
use crate::error::{Error, Result};
use crate::region::{Cell, Region};
use crate::SolverRng;

/// Constant in the area-based router estimate.
const PI_ESTIMATE_HUNDREDTHS: u64 = 314;

/// Proposal attempts before falling back to a no-op.
pub const PROPOSAL_ATTEMPTS: usize = 32;

/// Router positions sharing one radius. Co-located routers are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub positions: Vec<Cell>,
    pub radius: u32,
}

impl Placement {
    pub fn new(positions: Vec<Cell>, radius: u32) -> Self {
        Self { positions, radius }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Acceptance rule for worsening moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AcceptanceForm {
    /// `x < exp(T·Δf)`.
    #[default]
    Paper,
    /// `x < exp(Δf/T)`.
    Canonical,
}

impl std::str::FromStr for AcceptanceForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(AcceptanceForm::Paper),
            "canonical" => Ok(AcceptanceForm::Canonical),
            other => Err(Error::InvalidParameter(format!(
                "unknown acceptance form {other:?} (expected paper or canonical)"
            ))),
        }
    }
}

impl std::fmt::Display for AcceptanceForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AcceptanceForm::Paper => "paper",
            AcceptanceForm::Canonical => "canonical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveConfig {
    /// Unit displacements available to a step move.
    pub step_moves: Vec<(i32, i32)>,
    /// Probability that a proposal jumps to a uniformly random eligible cell.
    pub jump_probability: f64,
}

impl Default for MoveConfig {
    fn default() -> Self {
        Self {
            step_moves: vec![(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)],
            jump_probability: 0.2,
        }
    }
}

impl MoveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_moves.is_empty() {
            return Err(Error::InvalidParameter("step move set is empty".into()));
        }
        if !(0.0..=1.0).contains(&self.jump_probability) {
            return Err(Error::InvalidParameter(format!(
                "jump probability {} outside [0, 1]",
                self.jump_probability
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub temperature: f64,
    /// Consecutive non-improving iterations before stopping.
    pub nbtostop: usize,
    pub radius: u32,
    /// Initial router count multiplier, strictly between 1 and 2.
    pub init_factor: f64,
    pub seed: u64,
    pub move_config: MoveConfig,
    /// Hard cap on iterations per run.
    pub max_iterations: usize,
    pub acceptance: AcceptanceForm,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            temperature: 0.1,
            nbtostop: 500,
            radius: 8,
            init_factor: 1.4,
            seed: 0,
            move_config: MoveConfig::default(),
            max_iterations: 1_000_000,
            acceptance: AcceptanceForm::Paper,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.radius < 1 {
            return Err(Error::InvalidParameter("radius must be at least 1".into()));
        }
        if !(self.init_factor > 1.0 && self.init_factor < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "init factor must lie in (1, 2), got {}",
                self.init_factor
            )));
        }
        if self.nbtostop == 0 {
            return Err(Error::InvalidParameter("nbtostop must be positive".into()));
        }
        self.move_config.validate()
    }

    /// Solver RNG for this seed.
    pub fn rng(&self) -> SolverRng {
        SolverRng::seed_from_u64(self.seed)
    }
}

/// `⌈Σ Cover / (r² · 3.14)⌉`, in exact integer arithmetic.
pub fn nr_min(region: &Region, radius: u32) -> usize {
    let interest = region.interest_count() as u64;
    let denom = (radius as u64).pow(2) * PI_ESTIMATE_HUNDREDTHS;
    (interest * 100).div_ceil(denom) as usize
}

/// Initial router count: `⌈factor · nr_min⌉` clamped into the open window
/// `(nr_min, 2·nr_min)`. The window is empty for `nr_min = 1`; that case
/// returns 2.
pub fn nr_init(nr_min: usize, init_factor: f64) -> Result<usize> {
    if !(init_factor > 1.0 && init_factor < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "init factor must lie in (1, 2), got {init_factor}"
        )));
    }
    if nr_min == 0 {
        return Err(Error::InvalidParameter("nr_min must be at least 1".into()));
    }
    if nr_min == 1 {
        return Ok(2);
    }
    // Shave rounding noise so 1.4 · 10 stays 14.
    let raw = (init_factor * nr_min as f64 - 1e-9).ceil() as usize;
    Ok(raw.clamp(nr_min + 1, 2 * nr_min - 1))
}

/// Places `n` routers uniformly (with replacement) on eligible cells.
pub fn init_placement<R: Rng + ?Sized>(
    region: &Region,
    n: usize,
    radius: u32,
    rng: &mut R,
) -> Result<Placement> {
    let eligible = region.eligible_cells();
    if eligible.is_empty() {
        return Err(Error::NoEligibleCell);
    }
    let positions = (0..n)
        .map(|_| eligible[rng.random_range(0..eligible.len())])
        .collect();
    Ok(Placement::new(positions, radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Step,
    Jump,
    /// No legal target found; the router stays put.
    NoOp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proposal {
    pub router: usize,
    pub target: Cell,
    pub kind: MoveKind,
}

/// Proposes moving one uniformly chosen router.
///
/// `eligible` must be `region.eligible_cells()`. Panics on an empty placement.
pub fn propose_move<R: Rng + ?Sized>(
    region: &Region,
    eligible: &[Cell],
    placement: &Placement,
    config: &MoveConfig,
    rng: &mut R,
) -> Proposal {
    assert!(!placement.is_empty(), "cannot propose a move for an empty placement");
    let router = rng.random_range(0..placement.len());
    let current = placement.positions[router];
    for _ in 0..PROPOSAL_ATTEMPTS {
        if config.jump_probability > 0.0 && rng.random_bool(config.jump_probability) {
            let target = eligible[rng.random_range(0..eligible.len())];
            return Proposal {
                router,
                target,
                kind: MoveKind::Jump,
            };
        }
        let (dx, dy) = config.step_moves[rng.random_range(0..config.step_moves.len())];
        let (x, y) = (current.x as i64 + dx as i64, current.y as i64 + dy as i64);
        if region.contains(x, y) {
            let target = Cell::new(x as usize, y as usize);
            if region.is_eligible(target) {
                return Proposal {
                    router,
                    target,
                    kind: MoveKind::Step,
                };
            }
        }
    }
    Proposal {
        router,
        target: current,
        kind: MoveKind::NoOp,
    }
}

/// Acceptance test. Non-worsening moves are always accepted without
/// consuming randomness; otherwise draws `x ∈ (0, 1)`.
pub fn accept<R: Rng + ?Sized>(delta_f: i64, temperature: f64, form: AcceptanceForm, rng: &mut R) -> bool {
    if delta_f >= 0 {
        return true;
    }
    let exponent = match form {
        AcceptanceForm::Paper => temperature * delta_f as f64,
        AcceptanceForm::Canonical => delta_f as f64 / temperature,
    };
    let x: f64 = rng.sample(Open01);
    x < exponent.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub router: usize,
    pub target: Cell,
    pub kind: MoveKind,
    pub delta: i64,
    pub accepted: bool,
    /// Current fitness after this iteration.
    pub f: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchTrace {
    pub records: Vec<TraceRecord>,
    pub initial_f: usize,
    pub best_f: usize,
    /// Iteration count (1-based) at which `best_f` was reached; 0 if the
    /// initial placement was never beaten.
    pub best_iteration: usize,
    pub iterations_run: usize,
    pub hit_iteration_cap: bool,
}

impl SearchTrace {
    pub fn accepted_count(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<'r> {
    /// Best placement visited.
    pub placement: Placement,
    /// Cover state of `placement`.
    pub state: CoverState<'r>,
    pub trace: SearchTrace,
}

#[derive(Clone, Copy)]
enum Rule {
    Metropolis(AcceptanceForm),
    HillClimb,
}

/// Metropolis search from `placement`. Returns the best placement visited.
pub fn run_metropolis<'r, R: Rng + ?Sized>(
    region: &'r Region,
    placement: Placement,
    params: &SolverParams,
    rng: &mut R,
) -> Result<SearchOutcome<'r>> {
    search(region, placement, params, Rule::Metropolis(params.acceptance), rng)
}

/// Same loop as [`run_metropolis`] but only non-worsening moves are accepted.
pub fn run_hillclimb<'r, R: Rng + ?Sized>(
    region: &'r Region,
    placement: Placement,
    params: &SolverParams,
    rng: &mut R,
) -> Result<SearchOutcome<'r>> {
    search(region, placement, params, Rule::HillClimb, rng)
}

fn search<'r, R: Rng + ?Sized>(
    region: &'r Region,
    placement: Placement,
    params: &SolverParams,
    rule: Rule,
    rng: &mut R,
) -> Result<SearchOutcome<'r>> {
    params.validate()?;
    if placement.is_empty() {
        return Err(Error::EmptyPlacement);
    }
    if placement.radius != params.radius {
        return Err(Error::InvalidParameter(format!(
            "placement radius {} differs from solver radius {}",
            placement.radius, params.radius
        )));
    }
    for &p in &placement.positions {
        region.check_bounds(p)?;
    }
    let eligible = region.eligible_cells();
    if eligible.is_empty() {
        return Err(Error::NoEligibleCell);
    }

    let mut state = CoverState::with_routers(region, params.radius, &placement.positions)?;
    let mut current = placement;
    let mut best = current.positions.clone();
    let mut trace = SearchTrace {
        initial_f: state.fitness(),
        best_f: state.fitness(),
        ..Default::default()
    };
    let mut stale = 0usize;

    while stale < params.nbtostop && trace.iterations_run < params.max_iterations {
        let proposal = propose_move(region, &eligible, &current, &params.move_config, rng);
        let from = current.positions[proposal.router];
        let delta = state.move_delta(from, proposal.target)?;
        let accepted = match rule {
            Rule::Metropolis(form) => accept(delta, params.temperature, form, rng),
            Rule::HillClimb => delta >= 0,
        };
        if accepted {
            state.move_router(from, proposal.target)?;
            current.positions[proposal.router] = proposal.target;
        }
        trace.iterations_run += 1;
        let f = state.fitness();
        if f > trace.best_f {
            trace.best_f = f;
            trace.best_iteration = trace.iterations_run;
            best.clone_from(&current.positions);
            stale = 0;
        } else {
            stale += 1;
        }
        trace.records.push(TraceRecord {
            router: proposal.router,
            target: proposal.target,
            kind: proposal.kind,
            delta,
            accepted,
            f,
        });
    }
    trace.hit_iteration_cap = stale < params.nbtostop;

    if current.positions != best {
        current.positions = best;
        state = CoverState::with_routers(region, params.radius, &current.positions)?;
    }
    Ok(SearchOutcome {
        placement: current,
        state,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{parse_region, CellClass};

    fn rng(seed: u64) -> SolverRng {
        SolverRng::seed_from_u64(seed)
    }

    #[test]
    fn nr_min_arithmetic() {
        let mk = |n: usize| {
            let mut cover = vec![false; 2000];
            cover[..n].iter_mut().for_each(|c| *c = true);
            Region::new(100, 20, cover, vec![true; 2000]).unwrap()
        };
        assert_eq!(nr_min(&mk(1000), 8), 5);
        assert_eq!(nr_min(&mk(201), 8), 2);
        assert_eq!(nr_min(&mk(200), 8), 1);
        // 314 / (1 · 3.14) is exactly 100.
        assert_eq!(nr_min(&mk(314), 1), 100);
        let none = Region::new(2, 1, vec![true, false], vec![true, true]).unwrap();
        assert_eq!(nr_min(&none, 8), 1);
    }

    #[test]
    fn nr_min_of_empty_sum_is_zero() {
        // Regions always hold an interest cell, so check the formula directly.
        assert_eq!(0u64.div_ceil(64 * PI_ESTIMATE_HUNDREDTHS), 0);
    }

    #[test]
    fn nr_init_window() {
        assert_eq!(nr_init(10, 1.4).unwrap(), 14);
        assert_eq!(nr_init(2, 1.4).unwrap(), 3);
        assert_eq!(nr_init(1, 1.4).unwrap(), 2);
        assert_eq!(nr_init(1, 1.9).unwrap(), 2);
        assert_eq!(nr_init(10, 1.01).unwrap(), 11);
        assert_eq!(nr_init(10, 1.99).unwrap(), 19);
        assert_eq!(nr_init(37, 1.4).unwrap(), 52);
        assert!(nr_init(10, 1.0).is_err());
        assert!(nr_init(10, 2.0).is_err());
        assert!(nr_init(0, 1.4).is_err());
    }

    #[test]
    fn init_forced_on_single_eligible_cell() {
        let region = parse_region("3 3\nooo\noIo\nooo").unwrap();
        let p = init_placement(&region, 3, 1, &mut rng(1)).unwrap();
        assert_eq!(p.positions, vec![Cell::new(1, 1); 3]);
    }

    #[test]
    fn init_is_deterministic() {
        let region = Region::uniform(20, 20, CellClass::Interest).unwrap();
        let a = init_placement(&region, 7, 2, &mut rng(9)).unwrap();
        let b = init_placement(&region, 7, 2, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn surrounded_router_gets_noop() {
        let region = parse_region("3 3\nxix\noIo\nxix").unwrap();
        let placement = Placement::new(vec![Cell::new(1, 1)], 1);
        let config = MoveConfig {
            jump_probability: 0.0,
            ..Default::default()
        };
        let eligible = region.eligible_cells();
        let mut r = rng(3);
        for _ in 0..100 {
            let p = propose_move(&region, &eligible, &placement, &config, &mut r);
            assert_eq!(p.kind, MoveKind::NoOp);
            assert_eq!(p.target, Cell::new(1, 1));
        }
    }

    #[test]
    fn acceptance_edges() {
        let mut r = rng(5);
        for _ in 0..1000 {
            assert!(accept(0, 0.1, AcceptanceForm::Paper, &mut r));
            assert!(accept(5, 0.1, AcceptanceForm::Paper, &mut r));
            assert!(accept(5, 0.1, AcceptanceForm::Canonical, &mut r));
        }
        // Canonical form at T = 0.1 essentially never accepts Δf = -3.
        let hits = (0..10_000)
            .filter(|_| accept(-3, 0.1, AcceptanceForm::Canonical, &mut r))
            .count();
        assert_eq!(hits, 0);
    }

    #[test]
    fn acceptance_form_parses() {
        assert_eq!("paper".parse::<AcceptanceForm>().unwrap(), AcceptanceForm::Paper);
        assert_eq!("canonical".parse::<AcceptanceForm>().unwrap(), AcceptanceForm::Canonical);
        assert!("boltzmann".parse::<AcceptanceForm>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SolverParams::default().validate().is_ok());
        let bad = [
            SolverParams { temperature: 0.0, ..Default::default() },
            SolverParams { init_factor: 2.0, ..Default::default() },
            SolverParams { radius: 0, ..Default::default() },
            SolverParams { nbtostop: 0, ..Default::default() },
            SolverParams {
                move_config: MoveConfig { step_moves: vec![], jump_probability: 0.2 },
                ..Default::default()
            },
            SolverParams {
                move_config: MoveConfig { jump_probability: 1.5, ..Default::default() },
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn single_router_finds_full_cover() {
        // A 3x3 interest block in a 9x9 grid; r=2 covers it from the centre only.
        let mut text = String::from("9 9");
        for y in 0..9 {
            text.push('\n');
            for x in 0..9 {
                text.push(if (3..6).contains(&x) && (3..6).contains(&y) { 'I' } else { 'o' });
            }
        }
        let region = parse_region(&text).unwrap();
        let params = SolverParams { radius: 2, nbtostop: 200, ..Default::default() };
        let mut hits = 0;
        for seed in 0..10 {
            let mut r = rng(seed);
            let init = init_placement(&region, 1, 2, &mut r).unwrap();
            let out = run_metropolis(&region, init, &params, &mut r).unwrap();
            if out.state.fitness() == 9 {
                hits += 1;
                assert_eq!(out.placement.positions, vec![Cell::new(4, 4)]);
            }
        }
        assert!(hits >= 9, "{hits}/10");
    }

    #[test]
    fn stopping_contract() {
        let region = crate::region::generate_region(&crate::region::RegionGenParams {
            width: 60,
            height: 60,
            interest_blob_count: 5,
            interest_blob_radius_range: (4, 10),
            prohibited_blob_count: 2,
            prohibited_blob_radius_range: (2, 5),
            seed: 11,
        })
        .unwrap();
        let params = SolverParams { radius: 4, nbtostop: 300, ..Default::default() };
        let mut r = rng(2);
        let init = init_placement(&region, 6, 4, &mut r).unwrap();
        let out = run_metropolis(&region, init, &params, &mut r).unwrap();
        let t = &out.trace;
        assert!(!t.hit_iteration_cap);
        assert_eq!(t.iterations_run, t.records.len());
        assert!(t.records.len() >= params.nbtostop);
        assert_eq!(t.iterations_run - t.best_iteration, params.nbtostop);
        let tail = &t.records[t.records.len() - params.nbtostop..];
        assert!(tail.iter().all(|rec| rec.f <= t.best_f));
        assert_eq!(out.state.fitness(), t.best_f);
        assert_eq!(out.state.fitness(), out.state.fitness_full());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let region = Region::uniform(40, 40, CellClass::Interest).unwrap();
        let params = SolverParams { radius: 3, max_iterations: 50, nbtostop: 10_000, ..Default::default() };
        let mut r = rng(4);
        let init = init_placement(&region, 4, 3, &mut r).unwrap();
        let out = run_metropolis(&region, init, &params, &mut r).unwrap();
        assert!(out.trace.hit_iteration_cap);
        assert_eq!(out.trace.iterations_run, 50);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let region = Region::uniform(10, 10, CellClass::Interest).unwrap();
        let params = SolverParams { radius: 2, ..Default::default() };
        let mut r = rng(0);
        assert_eq!(
            run_metropolis(&region, Placement::new(vec![], 2), &params, &mut r).unwrap_err(),
            Error::EmptyPlacement
        );
        assert!(run_metropolis(&region, Placement::new(vec![Cell::new(0, 0)], 3), &params, &mut r).is_err());
        assert!(run_metropolis(&region, Placement::new(vec![Cell::new(10, 0)], 2), &params, &mut r).is_err());
    }

    #[test]
    fn hillclimb_never_accepts_losses() {
        let region = Region::uniform(30, 30, CellClass::Interest).unwrap();
        let params = SolverParams { radius: 4, nbtostop: 300, ..Default::default() };
        let mut r = rng(8);
        let init = init_placement(&region, 5, 4, &mut r).unwrap();
        let out = run_hillclimb(&region, init, &params, &mut r).unwrap();
        assert!(out.trace.records.iter().all(|rec| !rec.accepted || rec.delta >= 0));
        assert!(out.trace.best_f >= out.trace.initial_f);
    }
}
