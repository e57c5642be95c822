//! Stochastic integrators for metric Brownian motion and the
//! energy-tilted Langevin dynamics.
//!
//! The Euler-Maruyama step at inverse temperature beta is
//!
//!   x' = x + dt [ b(x)/(2 beta) - (1/2) g^{-1}(x) dE(x) ]
//!           + sqrt(dt/beta) S(x) xi,      S S^T = g^{-1},  xi ~ N(0, I),
//!
//! whose generator is (1/(2 beta)) [ delta f - beta <grad E, grad f>_g ]
//! and whose stationary law is proportional to e^{-beta E} sqrt(det g).
//! With E = 0 this is Brownian motion on the Hessian manifold, run so
//! that each distinguished unit-gradient observable accumulates quadratic
//! variation at rate 1/beta.
//!
//! Replica k draws from its own ChaCha12 stream (see [`crate::rng`]), so
//! ensembles are bit-for-bit reproducible and independent of scheduling.

use crate::error::SimError;
use crate::geometry::{BarrierGeometry, InteriorPoint};
use crate::rng::replica_rng;
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::io::{self, Write};

/// What to do when a proposed step leaves the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Redraw the Gaussian increment, up to `max_tries` times per step.
    Resample { max_tries: u32 },
    /// Fail the replica immediately.
    Abort,
}

impl Default for BoundaryPolicy {
    fn default() -> Self {
        BoundaryPolicy::Resample { max_tries: 100 }
    }
}

/// Integrator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    EulerMaruyama,
    /// Map to a flat chart, take Gaussian steps, map back. Only available
    /// where the geometry is a product of 1-d factors ([`ExactChart`]).
    ExactTransform,
}

/// Parameters shared by all simulation entry points.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub beta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub replicas: usize,
    pub boundary_policy: BoundaryPolicy,
    pub scheme: Scheme,
}

impl SimulationConfig {
    pub fn new(beta: f64, dt: f64, horizon: f64, seed: u64) -> Self {
        Self {
            beta,
            dt,
            horizon,
            seed,
            replicas: 1,
            boundary_policy: BoundaryPolicy::default(),
            scheme: Scheme::EulerMaruyama,
        }
    }

    pub fn with_replicas(mut self, replicas: usize) -> Self {
        self.replicas = replicas;
        self
    }

    pub fn with_boundary_policy(mut self, policy: BoundaryPolicy) -> Self {
        self.boundary_policy = policy;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Number of steps K with t_K = K dt = horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return bad(format!(
                "horizon must be at least dt, got horizon {} with dt {}",
                self.horizon, self.dt
            ));
        }
        let k = self.horizon / self.dt;
        if (k - k.round()).abs() > 1e-6 * k.max(1.0) {
            return bad(format!(
                "horizon must be an integer multiple of dt (horizon/dt = {k})"
            ));
        }
        if self.replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        if let BoundaryPolicy::Resample { max_tries: 0 } = self.boundary_policy {
            return bad("resample policy needs max_tries >= 1".into());
        }
        Ok(())
    }
}

/// Potential energy tilting the stationary law to e^{-beta E} sqrt(det g).
#[derive(Debug, Clone, PartialEq)]
pub enum EnergySpec {
    /// E(x) = c . x
    Linear { cost: DVector<f64> },
    /// E(x) = (1/2) (x - m)^T Q (x - m), Q symmetric positive semidefinite.
    Quadratic {
        center: DVector<f64>,
        matrix: nalgebra::DMatrix<f64>,
    },
    /// E(x) = alpha F(x), a multiple of the barrier itself.
    BarrierMultiple { alpha: f64 },
}

impl EnergySpec {
    pub fn value<G: BarrierGeometry + ?Sized>(&self, geometry: &G, x: &DVector<f64>) -> f64 {
        match self {
            EnergySpec::Linear { cost } => cost.dot(x),
            EnergySpec::Quadratic { center, matrix } => {
                let d = x - center;
                0.5 * d.dot(&(matrix * &d))
            }
            EnergySpec::BarrierMultiple { alpha } => alpha * geometry.barrier(x),
        }
    }

    pub fn euclidean_gradient<G: BarrierGeometry + ?Sized>(
        &self,
        geometry: &G,
        x: &DVector<f64>,
    ) -> DVector<f64> {
        match self {
            EnergySpec::Linear { cost } => cost.clone(),
            EnergySpec::Quadratic { center, matrix } => matrix * (x - center),
            EnergySpec::BarrierMultiple { alpha } => geometry.barrier_gradient(x) * *alpha,
        }
    }

    /// Dimension and shape checks against a geometry.
    pub fn validate(&self, dim: usize) -> Result<(), SimError> {
        match self {
            EnergySpec::Linear { cost } => {
                if cost.len() != dim {
                    return Err(SimError::InvalidEnergy(format!(
                        "cost vector has length {}, geometry dimension is {dim}",
                        cost.len()
                    )));
                }
            }
            EnergySpec::Quadratic { center, matrix } => {
                if center.len() != dim || matrix.nrows() != dim || matrix.ncols() != dim {
                    return Err(SimError::InvalidEnergy(format!(
                        "quadratic energy shaped {}x{} around a point of length {}, \
                         geometry dimension is {dim}",
                        matrix.nrows(),
                        matrix.ncols(),
                        center.len()
                    )));
                }
                let scale = matrix.amax().max(1.0);
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                            return Err(SimError::InvalidEnergy(
                                "quadratic energy matrix is not symmetric".into(),
                            ));
                        }
                    }
                }
                let eigen = matrix.clone().symmetric_eigenvalues();
                if eigen.iter().any(|l| *l < -1e-10 * scale) {
                    return Err(SimError::InvalidEnergy(
                        "quadratic energy matrix is not positive semidefinite".into(),
                    ));
                }
            }
            EnergySpec::BarrierMultiple { alpha } => {
                if !alpha.is_finite() {
                    return Err(SimError::InvalidEnergy(format!(
                        "barrier multiple must be finite, got {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One replica's trajectory on the uniform grid t_k = k dt.
#[derive(Debug, Clone)]
pub struct Path {
    dim: usize,
    dt: f64,
    states: Vec<f64>, // (steps + 1) x dim, row-major
    rejections: u64,
}

impl Path {
    /// Number of grid points (steps + 1).
    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    /// Boundary resamples accumulated over the whole trajectory.
    pub fn rejections(&self) -> u64 {
        self.rejections
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn state_vector(&self, k: usize) -> DVector<f64> {
        DVector::from_column_slice(self.state(k))
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }
}

/// A set of replica paths from one experiment.
#[derive(Debug, Clone)]
pub struct Ensemble {
    paths: Vec<Path>,
}

impl Ensemble {
    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

struct StepContext<'a, G: BarrierGeometry + ?Sized> {
    geometry: &'a G,
    energy: Option<&'a EnergySpec>,
    beta: f64,
    dt: f64,
    policy: BoundaryPolicy,
}

impl<G: BarrierGeometry + ?Sized> StepContext<'_, G> {
    /// One Euler-Maruyama step; `Err(tries)` if every resample exited.
    fn advance(
        &self,
        x: &DVector<f64>,
        rng: &mut ChaCha12Rng,
        rejections: &mut u64,
    ) -> Result<DVector<f64>, u32> {
        let geometry = self.geometry;
        let mut deterministic = geometry.drift_vector(x) * (self.dt / (2.0 * self.beta));
        if let Some(energy) = self.energy {
            let de = energy.euclidean_gradient(geometry, x);
            deterministic -= (geometry.inverse_metric(x) * de) * (0.5 * self.dt);
        }
        let noise_factor = geometry.noise_factor(x);
        let scale = (self.dt / self.beta).sqrt();
        let dim = x.len();
        let max_tries = match self.policy {
            BoundaryPolicy::Resample { max_tries } => max_tries,
            BoundaryPolicy::Abort => 1,
        };
        for _ in 0..max_tries {
            let xi = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
            let candidate = x + &deterministic + &noise_factor * xi;
            if geometry.contains(&candidate) {
                return Ok(candidate);
            }
            *rejections += 1;
        }
        Err(max_tries)
    }
}

fn run_replicas<F>(replicas: usize, run_one: F) -> Result<Ensemble, SimError>
where
    F: Fn(usize) -> Result<Path, SimError> + Sync + Send,
{
    let results: Vec<Result<Path, SimError>> =
        (0..replicas).into_par_iter().map(run_one).collect();
    let mut paths = Vec::with_capacity(replicas);
    for r in results {
        paths.push(r?);
    }
    Ok(Ensemble { paths })
}

/// Langevin dynamics under an optional energy. With `energy = None` the
/// trajectory is exactly [`simulate_bm`]'s, bit for bit at equal seeds.
pub fn simulate_rle<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    energy: Option<&EnergySpec>,
    start: &InteriorPoint,
    config: &SimulationConfig,
) -> Result<Ensemble, SimError> {
    config.validate()?;
    if let Some(e) = energy {
        e.validate(geometry.dim())?;
    }
    if start.dim() != geometry.dim() {
        return Err(SimError::Geometry(
            crate::error::GeometryError::DimensionMismatch {
                expected: geometry.dim(),
                got: start.dim(),
            },
        ));
    }
    let steps = config.steps();
    let dim = geometry.dim();
    let ctx = StepContext {
        geometry,
        energy,
        beta: config.beta,
        dt: config.dt,
        policy: config.boundary_policy,
    };
    run_replicas(config.replicas, |replica| {
        let mut rng = replica_rng(config.seed, replica as u64);
        let mut states = Vec::with_capacity((steps + 1) * dim);
        let mut rejections = 0u64;
        let mut x = start.coords().clone();
        states.extend_from_slice(x.as_slice());
        for k in 0..steps {
            match ctx.advance(&x, &mut rng, &mut rejections) {
                Ok(next) => x = next,
                Err(tries) => {
                    return Err(SimError::StepFailure {
                        replica,
                        step: k,
                        time: k as f64 * config.dt,
                        tries,
                        state: x.as_slice().to_vec(),
                    })
                }
            }
            states.extend_from_slice(x.as_slice());
        }
        Ok(Path {
            dim,
            dt: config.dt,
            states,
            rejections,
        })
    })
}

/// Metric Brownian motion (zero energy).
pub fn simulate_bm<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    start: &InteriorPoint,
    config: &SimulationConfig,
) -> Result<Ensemble, SimError> {
    simulate_rle(geometry, None, start, config)
}

/// Runs the Langevin dynamics keeping only each replica's endpoint.
/// Returns the endpoints and the total boundary-resample count.
pub fn sample_endpoints<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    energy: Option<&EnergySpec>,
    start: &InteriorPoint,
    config: &SimulationConfig,
) -> Result<(Vec<DVector<f64>>, u64), SimError> {
    config.validate()?;
    if let Some(e) = energy {
        e.validate(geometry.dim())?;
    }
    let steps = config.steps();
    let ctx = StepContext {
        geometry,
        energy,
        beta: config.beta,
        dt: config.dt,
        policy: config.boundary_policy,
    };
    let results: Vec<Result<(DVector<f64>, u64), SimError>> = (0..config.replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(config.seed, replica as u64);
            let mut rejections = 0u64;
            let mut x = start.coords().clone();
            for k in 0..steps {
                match ctx.advance(&x, &mut rng, &mut rejections) {
                    Ok(next) => x = next,
                    Err(tries) => {
                        return Err(SimError::StepFailure {
                            replica,
                            step: k,
                            time: k as f64 * config.dt,
                            tries,
                            state: x.as_slice().to_vec(),
                        })
                    }
                }
            }
            Ok((x, rejections))
        })
        .collect();
    let mut endpoints = Vec::with_capacity(config.replicas);
    let mut total_rejections = 0;
    for r in results {
        let (x, rej) = r?;
        endpoints.push(x);
        total_rejections += rej;
    }
    Ok((endpoints, total_rejections))
}

/// Geometries that factor into 1-d pieces with a closed-form chart in
/// which the metric Brownian motion is a standard one.
pub trait ExactChart: BarrierGeometry {
    fn to_chart(&self, x: &DVector<f64>) -> DVector<f64>;
    #[allow(clippy::wrong_self_convention)] // chart transition, not a constructor
    fn from_chart(&self, y: &DVector<f64>) -> DVector<f64>;
}

impl ExactChart for crate::cones::OrthantGeometry {
    fn to_chart(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| v.ln())
    }
    fn from_chart(&self, y: &DVector<f64>) -> DVector<f64> {
        y.map(|v| v.exp())
    }
}

impl ExactChart for crate::cones::CubeGeometry {
    fn to_chart(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| (std::f64::consts::FRAC_PI_2 * v).tan().ln())
    }
    fn from_chart(&self, y: &DVector<f64>) -> DVector<f64> {
        y.map(|v| v.exp().atan() * (2.0 / std::f64::consts::PI))
    }
}

/// Brownian motion via the exact chart: Gaussian increments of variance
/// dt/beta per coordinate in the chart, mapped back each step. No
/// discretization error in law at the grid times.
pub fn exact_transform_bm<G: ExactChart + ?Sized>(
    geometry: &G,
    start: &InteriorPoint,
    config: &SimulationConfig,
) -> Result<Ensemble, SimError> {
    config.validate()?;
    let steps = config.steps();
    let dim = geometry.dim();
    let scale = (config.dt / config.beta).sqrt();
    run_replicas(config.replicas, |replica| {
        let mut rng = replica_rng(config.seed, replica as u64);
        let mut states = Vec::with_capacity((steps + 1) * dim);
        let mut y = geometry.to_chart(start.coords());
        states.extend_from_slice(start.coords().as_slice());
        for k in 0..steps {
            for i in 0..dim {
                y[i] += rng.sample::<f64, _>(StandardNormal) * scale;
            }
            let x = geometry.from_chart(&y);
            if !geometry.contains(&x) {
                // Only reachable by floating-point saturation of the chart.
                return Err(SimError::StepFailure {
                    replica,
                    step: k,
                    time: k as f64 * config.dt,
                    tries: 0,
                    state: x.as_slice().to_vec(),
                });
            }
            states.extend_from_slice(x.as_slice());
        }
        Ok(Path {
            dim,
            dt: config.dt,
            states,
            rejections: 0,
        })
    })
}

/// CSV dump: `replica,step,time,x0,...`, one row per grid point, floats
/// in full 17-significant-digit precision.
pub fn write_paths_csv<W: Write>(writer: &mut W, ensemble: &Ensemble) -> io::Result<()> {
    let dim = ensemble.paths().first().map_or(0, |p| p.dim());
    write!(writer, "replica,step,time")?;
    for i in 0..dim {
        write!(writer, ",x{i}")?;
    }
    writeln!(writer)?;
    for (replica, path) in ensemble.paths().iter().enumerate() {
        for k in 0..path.len() {
            write!(writer, "{replica},{k},{:.16e}", path.time(k))?;
            for v in path.state(k) {
                write!(writer, ",{v:.16e}")?;
            }
            writeln!(writer)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{CubeGeometry, OrthantGeometry};
    use crate::geometry::InteriorPoint;

    fn orthant_start(geom: &OrthantGeometry) -> InteriorPoint {
        InteriorPoint::new(geom, DVector::from_element(geom.dim(), 1.0)).unwrap()
    }

    #[test]
    fn config_validation_catches_bad_inputs() {
        assert!(SimulationConfig::new(1.0, 1e-2, 1.0, 0).validate().is_ok());
        assert!(SimulationConfig::new(-1.0, 1e-2, 1.0, 0).validate().is_err());
        assert!(SimulationConfig::new(1.0, 0.0, 1.0, 0).validate().is_err());
        assert!(SimulationConfig::new(1.0, 1e-2, 0.0, 0).validate().is_err());
        // 0.35 / 0.1 is not an integer.
        assert!(SimulationConfig::new(1.0, 0.1, 0.35, 0).validate().is_err());
        let zero_tries = SimulationConfig::new(1.0, 1e-2, 1.0, 0)
            .with_boundary_policy(BoundaryPolicy::Resample { max_tries: 0 });
        assert!(zero_tries.validate().is_err());
    }

    #[test]
    fn same_seed_same_paths_bitwise() {
        let geom = OrthantGeometry::new(2).unwrap();
        let x0 = orthant_start(&geom);
        let cfg = SimulationConfig::new(1.0, 1e-2, 0.5, 99).with_replicas(4);
        let a = simulate_bm(&geom, &x0, &cfg).unwrap();
        let b = simulate_bm(&geom, &x0, &cfg).unwrap();
        for (pa, pb) in a.paths().iter().zip(b.paths()) {
            assert_eq!(pa.states, pb.states);
        }
        let other = SimulationConfig::new(1.0, 1e-2, 0.5, 100).with_replicas(4);
        let c = simulate_bm(&geom, &x0, &other).unwrap();
        assert_ne!(a.paths()[0].states, c.paths()[0].states);
    }

    #[test]
    fn zero_energy_langevin_equals_brownian_motion() {
        let geom = OrthantGeometry::new(3).unwrap();
        let x0 = orthant_start(&geom);
        let cfg = SimulationConfig::new(2.0, 1e-2, 1.0, 7).with_replicas(3);
        let bm = simulate_bm(&geom, &x0, &cfg).unwrap();
        let zero = EnergySpec::Linear {
            cost: DVector::zeros(3),
        };
        let rle = simulate_rle(&geom, Some(&zero), &x0, &cfg).unwrap();
        for (pa, pb) in bm.paths().iter().zip(rle.paths()) {
            assert_eq!(pa.states, pb.states, "bitwise equality of state streams");
        }
    }

    #[test]
    fn abort_policy_fails_where_resample_survives() {
        // Huge dt on the cube forces boundary exits almost surely.
        let geom = CubeGeometry::new(1).unwrap();
        let x0 = InteriorPoint::new(&geom, DVector::from_element(1, 0.5)).unwrap();
        let mut cfg = SimulationConfig::new(1.0, 50.0, 500.0, 11).with_replicas(1);
        cfg.boundary_policy = BoundaryPolicy::Abort;
        let aborted = simulate_bm(&geom, &x0, &cfg);
        assert!(matches!(aborted, Err(SimError::StepFailure { .. })));
        cfg.boundary_policy = BoundaryPolicy::Resample { max_tries: 1000 };
        let survived = simulate_bm(&geom, &x0, &cfg).unwrap();
        assert!(survived.paths()[0].rejections() > 0);
    }

    #[test]
    fn paths_have_the_declared_grid() {
        let geom = OrthantGeometry::new(1).unwrap();
        let x0 = orthant_start(&geom);
        let cfg = SimulationConfig::new(1.0, 0.25, 1.0, 5);
        let ens = simulate_bm(&geom, &x0, &cfg).unwrap();
        let p = &ens.paths()[0];
        assert_eq!(p.len(), 5);
        assert_eq!(p.time(0), 0.0);
        assert_eq!(p.time(4), 1.0);
        assert_eq!(p.state(0), &[1.0]);
    }

    #[test]
    fn exact_chart_round_trips() {
        let orthant = OrthantGeometry::new(2).unwrap();
        let x = DVector::from_vec(vec![0.3, 5.0]);
        let back = orthant.from_chart(&orthant.to_chart(&x));
        assert!((back - &x).amax() < 1e-14);
        let cube = CubeGeometry::new(2).unwrap();
        let x = DVector::from_vec(vec![0.25, 0.8]);
        let back = cube.from_chart(&cube.to_chart(&x));
        assert!((back - &x).amax() < 1e-14);
    }

    #[test]
    fn exact_transform_matches_manual_lognormal_walk() {
        let geom = OrthantGeometry::new(1).unwrap();
        let x0 = orthant_start(&geom);
        let cfg = SimulationConfig::new(4.0, 0.1, 0.5, 21);
        let ens = exact_transform_bm(&geom, &x0, &cfg).unwrap();
        let path = &ens.paths()[0];
        let mut rng = replica_rng(21, 0);
        let mut y = 0.0f64;
        for k in 1..path.len() {
            y += rng.sample::<f64, _>(StandardNormal) * (0.1f64 / 4.0).sqrt();
            assert_eq!(path.state(k)[0], y.exp());
        }
    }

    #[test]
    fn endpoint_sampler_agrees_with_full_paths() {
        let geom = CubeGeometry::new(1).unwrap();
        let x0 = InteriorPoint::new(&geom, DVector::from_element(1, 0.5)).unwrap();
        let cfg = SimulationConfig::new(1.0, 1e-2, 0.3, 17).with_replicas(5);
        let full = simulate_bm(&geom, &x0, &cfg).unwrap();
        let (ends, _) = sample_endpoints(&geom, None, &x0, &cfg).unwrap();
        for (p, e) in full.paths().iter().zip(&ends) {
            assert_eq!(p.final_state(), e.as_slice());
        }
    }

    #[test]
    fn quadratic_energy_requires_symmetric_psd_matrix() {
        let asym = EnergySpec::Quadratic {
            center: DVector::zeros(2),
            matrix: nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]),
        };
        assert!(asym.validate(2).is_err());
        let indefinite = EnergySpec::Quadratic {
            center: DVector::zeros(2),
            matrix: nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        };
        assert!(indefinite.validate(2).is_err());
        let ok = EnergySpec::Quadratic {
            center: DVector::zeros(2),
            matrix: nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
        };
        assert!(ok.validate(2).is_ok());
        assert!(ok.validate(3).is_err());
    }

    #[test]
    fn csv_writer_emits_header_and_rows() {
        let geom = OrthantGeometry::new(2).unwrap();
        let x0 = orthant_start(&geom);
        let cfg = SimulationConfig::new(1.0, 0.5, 1.0, 1).with_replicas(2);
        let ens = simulate_bm(&geom, &x0, &cfg).unwrap();
        let mut buf = Vec::new();
        write_paths_csv(&mut buf, &ens).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("replica,step,time,x0,x1"));
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert!(text.lines().nth(1).unwrap().starts_with("0,0,0.0000000000000000e0,"));
    }
}
