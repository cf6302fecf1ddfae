//! Router-count reduction.
//!
//! Starting from an optimized placement with the initial router count, one
//! router is removed at a time (chosen by a [`RemovalStrategy`]) and the rest
//! are re-optimized. Removal continues while the required-coverage fraction
//! stays at or above the threshold; the last placement that met it is kept.

use rand::Rng;

use crate::coverage::CoverState;
use crate::error::{Error, Result};
use crate::region::{Cell, Region};
use crate::solver::{init_placement, nr_init, nr_min, run_metropolis, Placement, SolverParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RemovalStrategy {
    /// Remove the router covering the fewest cells that nobody else covers.
    MinSingleCoverage,
    /// Remove the router covering the fewest cells.
    MinCoverage,
    /// Remove the router with the most cells also covered by another router.
    MaxOverCoverage,
}

impl RemovalStrategy {
    pub const ALL: [RemovalStrategy; 3] = [
        RemovalStrategy::MinSingleCoverage,
        RemovalStrategy::MinCoverage,
        RemovalStrategy::MaxOverCoverage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RemovalStrategy::MinSingleCoverage => "min-single",
            RemovalStrategy::MinCoverage => "min-coverage",
            RemovalStrategy::MaxOverCoverage => "max-over",
        }
    }
}

impl std::fmt::Display for RemovalStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RemovalStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RemovalStrategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown strategy {s:?} (expected min-single, min-coverage or max-over)"
                ))
            })
    }
}

/// Which disc cells count toward removal scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreScope {
    #[default]
    InterestOnly,
    AllCells,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RouterScores {
    /// Disc cells with depth exactly 1.
    pub single: usize,
    /// Disc cells with depth ≥ 1.
    pub total: usize,
    /// Disc cells with depth ≥ 2.
    pub over: usize,
}

/// Scores of router `index` over its interest cells.
pub fn router_scores(state: &CoverState<'_>, placement: &Placement, index: usize) -> Result<RouterScores> {
    router_scores_in(state, placement, index, ScoreScope::InterestOnly)
}

pub fn router_scores_in(
    state: &CoverState<'_>,
    placement: &Placement,
    index: usize,
    scope: ScoreScope,
) -> Result<RouterScores> {
    let pos = *placement.positions.get(index).ok_or(Error::RouterIndex {
        index,
        len: placement.len(),
    })?;
    let cover = state.region().cover_flags();
    let depth = state.depths();
    let mut s = RouterScores::default();
    for i in state.disc_cells(pos) {
        if scope == ScoreScope::InterestOnly && !cover[i] {
            continue;
        }
        match depth[i] {
            0 => {}
            1 => {
                s.single += 1;
                s.total += 1;
            }
            _ => {
                s.total += 1;
                s.over += 1;
            }
        }
    }
    Ok(s)
}

/// Router index to remove under `strategy`; ties go to the lowest index.
pub fn select_removal(state: &CoverState<'_>, placement: &Placement, strategy: RemovalStrategy) -> Result<usize> {
    select_removal_in(state, placement, strategy, ScoreScope::InterestOnly)
}

pub fn select_removal_in(
    state: &CoverState<'_>,
    placement: &Placement,
    strategy: RemovalStrategy,
    scope: ScoreScope,
) -> Result<usize> {
    if placement.is_empty() {
        return Err(Error::EmptyPlacement);
    }
    let mut best: Option<(usize, i64)> = None;
    for index in 0..placement.len() {
        let s = router_scores_in(state, placement, index, scope)?;
        // Lower key wins.
        let key = match strategy {
            RemovalStrategy::MinSingleCoverage => s.single as i64,
            RemovalStrategy::MinCoverage => s.total as i64,
            RemovalStrategy::MaxOverCoverage => -(s.over as i64),
        };
        if best.is_none_or(|(_, k)| key < k) {
            best = Some((index, key));
        }
    }
    Ok(best.map(|(i, _)| i).unwrap())
}

/// Required-coverage threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Fixed fraction in `[0, 1]`.
    Absolute(f64),
    /// Fraction reached at the initial count minus this margin.
    Relative(f64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Relative(0.01)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOptions {
    pub strategy: RemovalStrategy,
    pub threshold: Threshold,
    pub scope: ScoreScope,
    /// Keep removing and recording below the threshold down to this router
    /// count. The result (`nr_opt`, placement) is unaffected; the extra
    /// steps only extend the coverage curve.
    pub sweep_floor: Option<usize>,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            strategy: RemovalStrategy::MinSingleCoverage,
            threshold: Threshold::default(),
            scope: ScoreScope::default(),
            sweep_floor: None,
        }
    }
}

impl ReductionOptions {
    pub fn validate(&self) -> Result<()> {
        match self.threshold {
            Threshold::Absolute(t) if !(0.0..=1.0).contains(&t) => Err(Error::InvalidParameter(
                format!("absolute threshold {t} outside [0, 1]"),
            )),
            Threshold::Relative(d) if !(0.0..=1.0).contains(&d) => Err(Error::InvalidParameter(
                format!("relative threshold margin {d} outside [0, 1]"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub router_count: usize,
    pub required_fraction: f64,
    pub optional_fraction: f64,
    pub f: usize,
    /// Router removed before this step's re-optimization; `None` for the first step.
    pub removed: Option<Cell>,
    pub strategy: RemovalStrategy,
    pub satisfied: bool,
    /// Metropolis iterations spent on this step.
    pub iterations: usize,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub steps: Vec<ReductionStep>,
    pub nr_min: usize,
    pub nr_init: usize,
    pub nr_opt: usize,
    /// Index into `steps` of the returned placement.
    pub opt_step: usize,
    pub threshold: f64,
    /// Set when even the initial placement missed the threshold.
    pub below_threshold: bool,
    pub strategy: RemovalStrategy,
    pub placement: Placement,
}

impl ReductionReport {
    pub fn opt(&self) -> &ReductionStep {
        &self.steps[self.opt_step]
    }

    pub fn step_with_count(&self, router_count: usize) -> Option<&ReductionStep> {
        self.steps.iter().find(|s| s.router_count == router_count)
    }

    /// Smallest recorded router count whose required fraction is within
    /// `tolerance` of the best fraction on the curve.
    pub fn nr_max(&self, tolerance: f64) -> usize {
        let best = self
            .steps
            .iter()
            .map(|s| s.required_fraction)
            .fold(f64::NEG_INFINITY, f64::max);
        self.steps
            .iter()
            .filter(|s| s.required_fraction >= best - tolerance)
            .map(|s| s.router_count)
            .min()
            .unwrap_or(self.nr_init)
    }
}

/// Runs the full reduction loop starting at `nr_init` routers.
pub fn optimize_router_count<R: Rng + ?Sized>(
    region: &Region,
    params: &SolverParams,
    options: &ReductionOptions,
    rng: &mut R,
) -> Result<ReductionReport> {
    params.validate()?;
    options.validate()?;
    let nr_min = nr_min(region, params.radius);
    let nr_init = nr_init(nr_min, params.init_factor)?;
    let initial = init_placement(region, nr_init, params.radius, rng)?;
    let first = run_metropolis(region, initial, params, rng)?;
    let m = first.state.metrics(nr_init);
    let threshold = match options.threshold {
        Threshold::Absolute(t) => t,
        Threshold::Relative(margin) => m.required_fraction - margin,
    };

    let mut steps = vec![ReductionStep {
        router_count: nr_init,
        required_fraction: m.required_fraction,
        optional_fraction: m.optional_fraction,
        f: m.covered_interest_cells,
        removed: None,
        strategy: options.strategy,
        satisfied: m.required_fraction >= threshold,
        iterations: first.trace.iterations_run,
        placement: first.placement.clone(),
    }];
    let below_threshold = !steps[0].satisfied;
    let mut reducing = !below_threshold;
    let mut opt_step = 0;
    let mut state = first.state;
    let mut placement = first.placement;

    while placement.len() > 1 {
        if !reducing && !options.sweep_floor.is_some_and(|floor| placement.len() > floor) {
            break;
        }
        let index = select_removal_in(&state, &placement, options.strategy, options.scope)?;
        let removed = placement.positions.remove(index);
        let out = run_metropolis(region, placement, params, rng)?;
        let count = out.placement.len();
        let m = out.state.metrics(count);
        let satisfied = m.required_fraction >= threshold;
        steps.push(ReductionStep {
            router_count: count,
            required_fraction: m.required_fraction,
            optional_fraction: m.optional_fraction,
            f: m.covered_interest_cells,
            removed: Some(removed),
            strategy: options.strategy,
            satisfied,
            iterations: out.trace.iterations_run,
            placement: out.placement.clone(),
        });
        if reducing {
            if satisfied {
                opt_step = steps.len() - 1;
            } else {
                reducing = false;
            }
        }
        state = out.state;
        placement = out.placement;
    }

    let opt = &steps[opt_step];
    Ok(ReductionReport {
        nr_min,
        nr_init,
        nr_opt: opt.router_count,
        placement: opt.placement.clone(),
        opt_step,
        threshold,
        below_threshold,
        strategy: options.strategy,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{parse_region, CellClass};
    use crate::SolverRng;
    use rand::SeedableRng;

    #[test]
    fn strategy_names_round_trip() {
        for s in RemovalStrategy::ALL {
            assert_eq!(s.name().parse::<RemovalStrategy>().unwrap(), s);
        }
        assert!("greedy".parse::<RemovalStrategy>().is_err());
    }

    #[test]
    fn sole_router_scores() {
        let region = Region::uniform(9, 9, CellClass::Interest).unwrap();
        let p = Placement::new(vec![Cell::new(4, 4)], 3);
        let state = CoverState::with_routers(&region, 3, &p.positions).unwrap();
        let s = router_scores(&state, &p, 0).unwrap();
        assert_eq!(s, RouterScores { single: 25, total: 25, over: 0 });
        assert!(matches!(router_scores(&state, &p, 1), Err(Error::RouterIndex { .. })));
    }

    #[test]
    fn co_located_scores() {
        let region = Region::uniform(9, 9, CellClass::Interest).unwrap();
        let p = Placement::new(vec![Cell::new(4, 4), Cell::new(4, 4)], 3);
        let state = CoverState::with_routers(&region, 3, &p.positions).unwrap();
        for i in 0..2 {
            let s = router_scores(&state, &p, i).unwrap();
            assert_eq!(s.single, 0);
            assert_eq!(s.over, s.total);
        }
    }

    #[test]
    fn scope_widens_to_optional_cells() {
        let region = parse_region("3 1\nIoo").unwrap();
        let p = Placement::new(vec![Cell::new(0, 0)], 3);
        let state = CoverState::with_routers(&region, 3, &p.positions).unwrap();
        assert_eq!(router_scores(&state, &p, 0).unwrap().total, 1);
        assert_eq!(router_scores_in(&state, &p, 0, ScoreScope::AllCells).unwrap().total, 3);
    }

    #[test]
    fn selection_rules() {
        let region = Region::uniform(30, 30, CellClass::Interest).unwrap();
        let one = Placement::new(vec![Cell::new(5, 5)], 3);
        let state = CoverState::with_routers(&region, 3, &one.positions).unwrap();
        for s in RemovalStrategy::ALL {
            assert_eq!(select_removal(&state, &one, s).unwrap(), 0);
        }

        // Isolated router first, then a co-located pair.
        let p = Placement::new(vec![Cell::new(20, 20), Cell::new(5, 5), Cell::new(5, 5)], 3);
        let state = CoverState::with_routers(&region, 3, &p.positions).unwrap();
        assert_eq!(select_removal(&state, &p, RemovalStrategy::MinSingleCoverage).unwrap(), 1);
        assert_eq!(select_removal(&state, &p, RemovalStrategy::MaxOverCoverage).unwrap(), 1);
        // All three have equal totals: lowest index.
        assert_eq!(select_removal(&state, &p, RemovalStrategy::MinCoverage).unwrap(), 0);

        let empty = Placement::new(vec![], 3);
        assert_eq!(select_removal(&state, &empty, RemovalStrategy::MinCoverage), Err(Error::EmptyPlacement));
    }

    fn small_region() -> Region {
        crate::region::generate_region(&crate::region::RegionGenParams {
            width: 50,
            height: 50,
            interest_blob_count: 4,
            interest_blob_radius_range: (5, 10),
            prohibited_blob_count: 2,
            prohibited_blob_radius_range: (2, 4),
            seed: 5,
        })
        .unwrap()
    }

    fn small_params() -> SolverParams {
        SolverParams { radius: 4, nbtostop: 200, ..Default::default() }
    }

    #[test]
    fn zero_threshold_runs_to_one_router() {
        let region = small_region();
        let options = ReductionOptions { threshold: Threshold::Absolute(0.0), ..Default::default() };
        let report = optimize_router_count(&region, &small_params(), &options, &mut SolverRng::seed_from_u64(1)).unwrap();
        assert_eq!(report.nr_opt, 1);
        assert_eq!(report.steps.last().unwrap().router_count, 1);
        assert!(!report.below_threshold);
        let counts: Vec<_> = report.steps.iter().map(|s| s.router_count).collect();
        let expected: Vec<_> = (1..=report.nr_init).rev().collect();
        assert_eq!(counts, expected);
    }

    #[test]
    fn full_threshold_stops_at_first_loss() {
        // Two interest cells 6 apart; r=2 needs one router on each.
        let region = parse_region("7 1\nIoooooI").unwrap();
        let params = SolverParams { radius: 2, nbtostop: 100, ..Default::default() };
        let options = ReductionOptions { threshold: Threshold::Absolute(1.0), ..Default::default() };
        let report = optimize_router_count(&region, &params, &options, &mut SolverRng::seed_from_u64(3)).unwrap();
        assert_eq!(report.nr_init, 2);
        assert!(!report.below_threshold);
        assert_eq!(report.nr_opt, 2);
        assert_eq!(report.steps.len(), 2);
        assert!(!report.steps[1].satisfied);
        assert_eq!(report.placement, report.steps[0].placement);
    }

    #[test]
    fn unreachable_threshold_is_flagged() {
        let region = small_region();
        let options = ReductionOptions { threshold: Threshold::Absolute(1.0), ..Default::default() };
        let params = SolverParams { radius: 2, nbtostop: 50, ..Default::default() };
        let report = optimize_router_count(&region, &params, &options, &mut SolverRng::seed_from_u64(1)).unwrap();
        assert!(report.below_threshold);
        assert_eq!(report.nr_opt, report.nr_init);
        assert_eq!(report.steps.len(), 1);
    }

    #[test]
    fn sweep_floor_extends_curve_only() {
        let region = small_region();
        let params = small_params();
        let base = ReductionOptions { threshold: Threshold::Relative(0.01), ..Default::default() };
        let swept = ReductionOptions { sweep_floor: Some(2), ..base.clone() };
        let a = optimize_router_count(&region, &params, &base, &mut SolverRng::seed_from_u64(6)).unwrap();
        let b = optimize_router_count(&region, &params, &swept, &mut SolverRng::seed_from_u64(6)).unwrap();
        assert_eq!(a.nr_opt, b.nr_opt);
        assert_eq!(a.placement, b.placement);
        assert_eq!(&b.steps[..a.steps.len()], a.steps.as_slice());
        assert_eq!(b.steps.last().unwrap().router_count, 2);
    }

    #[test]
    fn invalid_threshold() {
        let region = small_region();
        let options = ReductionOptions { threshold: Threshold::Absolute(1.5), ..Default::default() };
        assert!(optimize_router_count(&region, &small_params(), &options, &mut SolverRng::seed_from_u64(1)).is_err());
    }
}
