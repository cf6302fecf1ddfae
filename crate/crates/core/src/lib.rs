//! Mesh router placement on gridded rural regions.
//!
//! A region is a grid of elementary cells, each flagged as needing coverage
//! and/or accepting a router. Routers cover an open lattice disc of fixed
//! radius. The [`solver`] searches placements with a constant-temperature
//! Metropolis walk, and [`reduction`] removes routers one at a time while a
//! required-coverage threshold still holds.

pub mod coverage;
pub mod error;
pub mod oracle;
pub mod reduction;
pub mod region;
pub mod solver;

pub use coverage::{connectivity_components, disc_offsets, CoverState, CoverageMetrics, DiscOffsets};
pub use error::{Error, Result};
pub use oracle::{exhaustive_best, OracleResult};
pub use reduction::{
    optimize_router_count, router_scores, select_removal, ReductionOptions, ReductionReport,
    ReductionStep, RemovalStrategy, RouterScores, ScoreScope, Threshold,
};
pub use region::{cell_class, generate_blobs, generate_region, Blob, parse_region, serialize_region, Cell, CellClass, Region, RegionGenParams};
pub use solver::{
    accept, init_placement, nr_init, nr_min, propose_move, run_hillclimb, run_metropolis,
    AcceptanceForm, MoveConfig, MoveKind, Placement, Proposal, SearchOutcome, SearchTrace,
    SolverParams, TraceRecord,
};

/// Deterministic RNG used throughout. ChaCha output is stable across
/// platforms and crate versions, which the golden outputs depend on.
pub type SolverRng = rand_chacha::ChaCha8Rng;
