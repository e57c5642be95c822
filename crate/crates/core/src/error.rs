//! Error types shared across the crate.

use thiserror::Error;

/// Errors from barrier-geometry evaluations and differential operators.
#[derive(Debug, Clone, Error)]
pub enum GeometryError {
    #[error("point is not in the strict interior of the domain")]
    NotInterior,
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric is not positive definite (pivot {pivot:.3e} at row {row})")]
    MetricNotPositiveDefinite { row: usize, pivot: f64 },
    #[error("metric is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    MetricNotSymmetric { max_asymmetry: f64 },
    #[error("operation is only defined for cone geometries")]
    NotACone,
    #[error("spatial direction must be a unit vector (|u| = {norm})")]
    NotUnitVector { norm: f64 },
    #[error("light-cone observable undefined: {reason}")]
    LightConeDomain { reason: String },
    #[error("geometry does not provide an interior sampler")]
    NoSampler,
    #[error("finite-difference stencil left the domain near a sampled point")]
    StencilLeftDomain,
}

/// Errors from the finite-difference oracle.
#[derive(Debug, Clone, Error)]
pub enum FdError {
    #[error("stencil step along coordinate {coordinate} leaves the domain")]
    StencilOutOfDomain { coordinate: usize },
    #[error("step size must be positive, got {h}")]
    InvalidStep { h: f64 },
}

/// Errors from the stochastic integrators.
#[derive(Debug, Clone, Error)]
pub enum SimError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(
        "step failed at replica {replica}, step {step} (t = {time}): \
         proposal left the domain after {tries} resamples"
    )]
    StepFailure {
        replica: usize,
        step: usize,
        time: f64,
        tries: u32,
        state: Vec<f64>,
    },
    #[error("scheme not supported for this geometry: {0}")]
    UnsupportedScheme(String),
    #[error("energy spec invalid: {0}")]
    InvalidEnergy(String),
}

/// Errors from path statistics and hypothesis tests.
#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error("scalar paths are on different time grids")]
    GridMismatch,
    #[error("too few replicas: got {got}, need at least {need}")]
    TooFewReplicas { got: usize, need: usize },
    #[error("observable evaluation failed at step {step}")]
    EvaluationFailed { step: usize },
    #[error("target density is not normalizable: {0}")]
    NonNormalizable(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("the Lorentz theorem suite is stated at beta = 2, got beta = {0}")]
    WrongTemperature(f64),
}

/// Errors from the verification suites (simulation plus analysis).
#[derive(Debug, Clone, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Errors from the central-path solver.
#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cost vector is not in the interior of the dual cone: {0}")]
    DualCone(String),
    #[error("Newton iteration left the domain at iterate {iteration}")]
    LeftDomain { iteration: usize },
    #[error("no convergence after {iterations} iterations (decrement {decrement:.3e})")]
    NoConvergence { iterations: usize, decrement: f64 },
    #[error("gradient flow left the domain at theta = {theta}")]
    FlowLeftDomain { theta: f64 },
    #[error("objective increased between stages (at theta = {theta})")]
    NotDecreasing { theta: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Errors from the text parsers (energy grammar, key=value config, float lists).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("invalid float {text:?}")]
    InvalidFloat { text: String },
    #[error("line {line}: expected key=value")]
    MissingEquals { line: usize },
    #[error("line {line}: empty key")]
    EmptyKey { line: usize },
    #[error("unknown energy kind {kind:?} (expected linear, quadratic or barrier)")]
    UnknownEnergyKind { kind: String },
    #[error("energy spec: {0}")]
    BadEnergySpec(String),
}
