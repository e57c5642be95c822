//! Brownian motion and Langevin dynamics on Hessian barrier geometries.
//!
//! The crate implements, for the positive orthant, the open unit cube and
//! the forward Lorentz cone:
//!
//! * canonical barriers whose Hessians serve as Riemannian metrics, with
//!   closed-form gradients, metrics, inverse metrics and diffusion drifts,
//!   all cross-checkable against finite-difference oracles;
//! * Euler-Maruyama and exact-transform integrators for the metric
//!   Brownian motion and its energy-tilted Langevin variant, with
//!   deterministic per-replica random streams;
//! * path statistics (drift, realized quadratic variation and covariation,
//!   distributional tests) that verify the processes behave like scalar
//!   Brownian motions along the geometries' distinguished observables;
//! * stationary-law checks against Gibbs densities, and a barrier
//!   central-path solver (damped Newton plus a gradient-flow integrator)
//!   for conic programs.

pub mod analysis;
pub mod centralpath;
pub mod cones;
pub mod config;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod report;
pub mod rng;
pub mod sde;
pub mod stats;
pub mod verify;

pub use cones::{
    lorentz_mu, lorentz_sigma, make_light_vector, CubeGeometry, GeometryKind, LightVector,
    LorentzGeometry, OrthantGeometry,
};
pub use error::{AnalysisError, FdError, GeometryError, ParseError, SimError, SolveError};
pub use geometry::{
    cone_identity_check, drift_vector, laplace_beltrami, monge_ampere_residual,
    riemannian_gradient, BarrierGeometry, InteriorPoint, MetricTensor, ScalarField,
};
pub use sde::{
    exact_transform_bm, simulate_bm, simulate_rle, BoundaryPolicy, EnergySpec, Ensemble, Path,
    Scheme, SimulationConfig,
};
