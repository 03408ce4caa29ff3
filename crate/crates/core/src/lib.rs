//! Simulation and analysis of identifiability collapse in Poisson random
//! hypergraphs.
//!
//! A hypergraph is collapsed by repeatedly removing a vertex that carries a
//! patch (a size-1 hyperedge); every hyperedge containing the vertex shrinks
//! by one. The vertices removed this way are the identifiable vertices, and
//! the hyperedges that end up as debris (empty hyperedges) are the
//! identifiable hyperedges. For a Poisson(β) random hypergraph on N vertices
//! the rescaled counts of identifiable vertices and hyperedges concentrate,
//! as N grows, on constants computed from the generating series β alone.
//!
//! The crate provides both sides of that statement:
//!
//! * [`beta`] — the coefficient series β and the threshold function
//!   `f(t) = β'(t) + log(1−t)` whose first strict sign change locates the
//!   limiting collapse fraction `z*`.
//! * [`hypergraph`] / [`collapse`] — exact finite-N sampling and the full
//!   collapse engine, including a brute-force identifiability oracle.
//! * [`chain`] — the two-dimensional embedded Markov chain of (patch count,
//!   debris count), distributionally equivalent to the engine but O(N) per
//!   trajectory.
//! * [`fluid`] — deterministic limit paths, limiting constants, the Gaussian
//!   fluctuation of the patch density, and the exact sampler for the limit
//!   law of the collapse fraction in the critical (tangent) case.
//! * [`harness`] — reproducible Monte Carlo experiment drivers and the
//!   statistical comparisons used by the acceptance suite.
//!
//! Trials parallelize over independent RNG streams derived from a master
//! seed and the trial index, so results are identical across worker counts.
//! The `parallel` feature (on by default) enables the rayon-backed driver;
//! without it every experiment runs on the sequential fallback path.

pub mod beta;
pub mod chain;
pub mod collapse;
pub mod fluid;
pub mod harness;
pub mod hypergraph;
pub mod stream;

pub use beta::{AnalyzeOptions, BetaSeries, TangencyZero, ThresholdReport};
pub use chain::{ChainRun, ChainState};
pub use collapse::{CollapseTrace, OrderPolicy, StepRecord};
pub use fluid::{FluidReport, Limits, PathSample, ZLawSample};
pub use harness::{
    EngineKind, ExperimentConfig, ExperimentResult, RecordMode, TrialSummary,
};
pub use hypergraph::Hypergraph;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("{0}")]
    Domain(String),
    #[error("edge size {size} exceeds vertex count {n_vertices}")]
    SupportExceedsVertices { size: usize, n_vertices: usize },
    #[error("vertex {0} carries no patch: collapse not permitted")]
    NoPatch(u32),
    #[error("explicit order selects unpatched vertex {vertex} at step {step}")]
    BadExplicitOrder { vertex: u32, step: usize },
    #[error("chain is absorbed: no patches remain")]
    Absorbed,
    #[error("tangency at t = 0: the limit law is undefined for this series")]
    DegenerateZeroTangency,
    #[error("empty sample")]
    EmptySample,
    #[error("malformed hypergraph file: {0}")]
    Parse(String),
    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
