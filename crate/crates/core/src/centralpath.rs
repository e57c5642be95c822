//! Barrier central path for conic programs: damped Newton centering,
//! a Runge-Kutta integrator for the path ODE dx/dtheta = -g^{-1} c, and
//! a path-following solver with theta doubling.
//!
//! The central point x(theta) minimizes theta c.x + F(x); its optimality
//! condition is dF(x) + theta c = 0. The Newton decrement
//! lambda = sqrt(r^T g^{-1} r) with r = dF + theta c controls both
//! damping (full steps once lambda < 1/4) and convergence.

use crate::error::SolveError;
use crate::geometry::{metric_tensor, BarrierGeometry, InteriorPoint};
use nalgebra::DVector;
use serde::Serialize;
use std::io::{self, Write};

/// Damped Newton gives up after this many iterations; for
/// self-concordant barriers convergence takes far fewer.
pub const MAX_NEWTON_ITERATIONS: usize = 200;

/// A conic program: minimize c.x over the domain's closure, approached
/// through barrier central points.
pub struct ConicProgram<'g> {
    geometry: &'g dyn BarrierGeometry,
    cost: DVector<f64>,
}

impl<'g> ConicProgram<'g> {
    /// Validates the cost dimension and, for cone geometries that can
    /// decide membership, that the cost lies in the dual cone's interior
    /// (otherwise theta c.x + F is unbounded below and no central point
    /// exists).
    pub fn new(geometry: &'g dyn BarrierGeometry, cost: DVector<f64>) -> Result<Self, SolveError> {
        if cost.len() != geometry.dim() {
            return Err(SolveError::InvalidArgument(format!(
                "cost has length {}, geometry dimension is {}",
                cost.len(),
                geometry.dim()
            )));
        }
        if cost.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::InvalidArgument(
                "cost vector has non-finite entries".into(),
            ));
        }
        if geometry.is_cone() {
            if let Some(false) = geometry.dual_interior(&cost) {
                return Err(SolveError::DualCone(format!(
                    "cost {:?} fails the dual-interior test",
                    cost.as_slice()
                )));
            }
        }
        Ok(Self { geometry, cost })
    }

    pub fn geometry(&self) -> &'g dyn BarrierGeometry {
        self.geometry
    }

    pub fn cost(&self) -> &DVector<f64> {
        &self.cost
    }

    pub fn objective(&self, x: &InteriorPoint) -> f64 {
        self.cost.dot(x.coords())
    }

    fn residual(&self, theta: f64, x: &DVector<f64>) -> DVector<f64> {
        self.geometry.barrier_gradient(x) + &self.cost * theta
    }
}

/// A point on (or near) the central path.
#[derive(Debug, Clone)]
pub struct CentralPathPoint {
    pub theta: f64,
    pub point: InteriorPoint,
    pub newton_decrement: f64,
}

fn check_theta(theta: f64) -> Result<(), SolveError> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(SolveError::InvalidArgument(format!(
            "theta must be positive and finite, got {theta}"
        )));
    }
    Ok(())
}

fn newton_iterate(
    program: &ConicProgram<'_>,
    theta: f64,
    start: &InteriorPoint,
    tolerance: f64,
) -> Result<(CentralPathPoint, usize), SolveError> {
    check_theta(theta)?;
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(SolveError::InvalidArgument(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let geometry = program.geometry;
    let mut x = start.coords().clone();
    for iteration in 0..MAX_NEWTON_ITERATIONS {
        let interior = InteriorPoint::new(geometry, x.clone())?;
        let r = program.residual(theta, &x);
        let metric = metric_tensor(geometry, &interior)?;
        let direction = -metric.solve(&r);
        let decrement = (-r.dot(&direction)).max(0.0).sqrt();
        if decrement < tolerance {
            return Ok((
                CentralPathPoint {
                    theta,
                    point: interior,
                    newton_decrement: decrement,
                },
                iteration,
            ));
        }
        // Full steps in the quadratic-convergence region, damped
        // 1/(1 + lambda) steps outside it.
        let step = if decrement < 0.25 {
            1.0
        } else {
            1.0 / (1.0 + decrement)
        };
        x += direction * step;
        if !geometry.contains(&x) {
            return Err(SolveError::LeftDomain { iteration });
        }
    }
    let r = program.residual(theta, &x);
    let interior = InteriorPoint::new(geometry, x)?;
    let metric = metric_tensor(geometry, &interior)?;
    let direction = -metric.solve(&r);
    let decrement = (-r.dot(&direction)).max(0.0).sqrt();
    Err(SolveError::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        decrement,
    })
}

/// Damped Newton centering at a fixed theta.
pub fn newton_central_point(
    program: &ConicProgram<'_>,
    theta: f64,
    start: &InteriorPoint,
    tolerance: f64,
) -> Result<CentralPathPoint, SolveError> {
    newton_iterate(program, theta, start, tolerance).map(|(p, _)| p)
}

fn decrement_at(
    program: &ConicProgram<'_>,
    theta: f64,
    x: &InteriorPoint,
) -> Result<f64, SolveError> {
    let r = program.residual(theta, x.coords());
    let metric = metric_tensor(program.geometry, x)?;
    let direction = -metric.solve(&r);
    Ok((-r.dot(&direction)).max(0.0).sqrt())
}

/// Integrates the central-path ODE dx/dtheta = -g^{-1}(x) c from theta0
/// to theta1 (either direction) with classical fixed-step RK4, starting
/// from a point on the path at theta0. Returns the points at every grid
/// theta, including both ends; `theta0 == theta1` returns the start
/// unchanged.
pub fn flow_central_path(
    program: &ConicProgram<'_>,
    theta0: f64,
    theta1: f64,
    start: &InteriorPoint,
    step: f64,
) -> Result<Vec<CentralPathPoint>, SolveError> {
    check_theta(theta0)?;
    check_theta(theta1)?;
    if !step.is_finite() || step <= 0.0 {
        return Err(SolveError::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let geometry = program.geometry;
    let mut points = vec![CentralPathPoint {
        theta: theta0,
        point: start.clone(),
        newton_decrement: decrement_at(program, theta0, start)?,
    }];
    if theta0 == theta1 {
        return Ok(points);
    }
    let span = theta1 - theta0;
    let substeps = (span.abs() / step).ceil() as usize;
    let h = span / substeps as f64;
    let velocity = |theta: f64, x: &DVector<f64>| -> Result<DVector<f64>, SolveError> {
        if !geometry.contains(x) {
            return Err(SolveError::FlowLeftDomain { theta });
        }
        let interior = InteriorPoint::new(geometry, x.clone())?;
        let metric = metric_tensor(geometry, &interior)?;
        Ok(-metric.solve(program.cost()))
    };
    let mut x = start.coords().clone();
    let mut theta = theta0;
    for k in 0..substeps {
        let k1 = velocity(theta, &x)?;
        let k2 = velocity(theta + 0.5 * h, &(&x + &k1 * (0.5 * h)))?;
        let k3 = velocity(theta + 0.5 * h, &(&x + &k2 * (0.5 * h)))?;
        let k4 = velocity(theta + h, &(&x + &k3 * h))?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        theta = theta0 + (k + 1) as f64 * h;
        if !geometry.contains(&x) {
            return Err(SolveError::FlowLeftDomain { theta });
        }
        let interior = InteriorPoint::new(geometry, x.clone())?;
        points.push(CentralPathPoint {
            theta,
            newton_decrement: decrement_at(program, theta, &interior)?,
            point: interior,
        });
    }
    Ok(points)
}

/// One stage of the path-following solve.
#[derive(Debug, Clone)]
pub struct PathStage {
    pub theta: f64,
    pub point: InteriorPoint,
    pub objective: f64,
    pub newton_decrement: f64,
    pub newton_iterations: usize,
}

/// Follows the central path by theta doubling from 1 to `theta_max`,
/// re-centering with warm-started Newton at each stage, and verifies the
/// objective decreases strictly stage to stage.
pub fn solve_conic(
    program: &ConicProgram<'_>,
    theta_max: f64,
    tolerance: f64,
    start: Option<&InteriorPoint>,
) -> Result<Vec<PathStage>, SolveError> {
    check_theta(theta_max)?;
    let geometry = program.geometry;
    let owned_start: InteriorPoint;
    let mut current = match start {
        Some(p) => p.clone(),
        None => {
            let center = geometry.center_point().ok_or_else(|| {
                SolveError::InvalidArgument(
                    "geometry has no default center; pass a starting point".into(),
                )
            })?;
            owned_start = InteriorPoint::new(geometry, center)?;
            owned_start
        }
    };

    let mut thetas = Vec::new();
    let mut theta = 1.0_f64.min(theta_max);
    loop {
        thetas.push(theta);
        if theta >= theta_max {
            break;
        }
        theta = (theta * 2.0).min(theta_max);
    }

    let mut stages: Vec<PathStage> = Vec::with_capacity(thetas.len());
    for theta in thetas {
        let (point, iterations) = newton_iterate(program, theta, &current, tolerance)?;
        current = point.point.clone();
        let objective = program.objective(&point.point);
        if let Some(previous) = stages.last() {
            if objective >= previous.objective {
                return Err(SolveError::NotDecreasing { theta });
            }
        }
        stages.push(PathStage {
            theta,
            point: point.point,
            objective,
            newton_decrement: point.newton_decrement,
            newton_iterations: iterations,
        });
    }
    Ok(stages)
}

/// CSV dump of path stages: `theta,objective,x0,...`.
pub fn write_stages_csv<W: Write>(writer: &mut W, stages: &[PathStage]) -> io::Result<()> {
    let dim = stages.first().map_or(0, |s| s.point.dim());
    write!(writer, "theta,objective")?;
    for i in 0..dim {
        write!(writer, ",x{i}")?;
    }
    writeln!(writer)?;
    for s in stages {
        write!(writer, "{:.16e},{:.16e}", s.theta, s.objective)?;
        for v in s.point.coords().iter() {
            write!(writer, ",{v:.16e}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct StageSummary {
    theta: f64,
    objective: f64,
    newton_decrement: f64,
    newton_iterations: usize,
}

/// JSON summary of a solve: per-stage diagnostics plus the final point.
pub fn stages_summary(stages: &[PathStage]) -> serde_json::Value {
    let rows: Vec<StageSummary> = stages
        .iter()
        .map(|s| StageSummary {
            theta: s.theta,
            objective: s.objective,
            newton_decrement: s.newton_decrement,
            newton_iterations: s.newton_iterations,
        })
        .collect();
    let last = stages.last();
    serde_json::json!({
        "stages": rows,
        "final_theta": last.map(|s| s.theta),
        "final_objective": last.map(|s| s.objective),
        "final_point": last.map(|s| s.point.coords().as_slice().to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{CubeGeometry, LorentzGeometry, OrthantGeometry};
    use approx::assert_abs_diff_eq;

    fn interior<G: BarrierGeometry>(geom: &G, coords: Vec<f64>) -> InteriorPoint {
        InteriorPoint::new(geom, DVector::from_vec(coords)).unwrap()
    }

    #[test]
    fn orthant_central_points_have_closed_form() {
        // Optimality: -1/x_i + theta c_i = 0, so x_i = 1/(theta c_i) and
        // c.x = n/theta.
        let geom = OrthantGeometry::new(3).unwrap();
        let cost = DVector::from_vec(vec![1.0, 2.0, 4.0]);
        let program = ConicProgram::new(&geom, cost.clone()).unwrap();
        let start = interior(&geom, vec![1.0, 1.0, 1.0]);
        for theta in [1.0, 32.0, 1024.0] {
            let point = newton_central_point(&program, theta, &start, 1e-10).unwrap();
            for i in 0..3 {
                let exact = 1.0 / (theta * cost[i]);
                assert_abs_diff_eq!(point.point.coords()[i], exact, epsilon = 1e-8 * exact);
            }
            assert_abs_diff_eq!(
                program.objective(&point.point),
                3.0 / theta,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn cube_central_points_match_arccot_form() {
        // -pi cot(pi x_i) + theta c_i = 0  =>  x_i = atan(pi/(theta c_i))/pi.
        let geom = CubeGeometry::new(2).unwrap();
        let cost = DVector::from_vec(vec![1.0, 0.5]);
        let program = ConicProgram::new(&geom, cost.clone()).unwrap();
        let start = interior(&geom, vec![0.5, 0.5]);
        let theta = 2.0;
        let point = newton_central_point(&program, theta, &start, 1e-12).unwrap();
        for i in 0..2 {
            let exact = (std::f64::consts::PI / (theta * cost[i])).atan() / std::f64::consts::PI;
            assert_abs_diff_eq!(point.point.coords()[i], exact, epsilon = 1e-10);
        }
    }

    #[test]
    fn lorentz_central_point_matches_closed_form() {
        // For cost c in the dual interior, x(theta) = N B c / (theta c^T B c)
        // with B = diag(1, -1, ..., -1): then dF = -theta c exactly.
        let geom = LorentzGeometry::new(4).unwrap();
        let cost = DVector::from_vec(vec![2.0, 1.0, 0.0, 0.0]);
        let program = ConicProgram::new(&geom, cost).unwrap();
        let start = interior(&geom, vec![1.0, 0.0, 0.0, 0.0]);
        let theta = 3.0;
        let point = newton_central_point(&program, theta, &start, 1e-12).unwrap();
        let expected = [8.0 / (3.0 * theta), -4.0 / (3.0 * theta), 0.0, 0.0];
        for i in 0..4 {
            assert_abs_diff_eq!(point.point.coords()[i], expected[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn dual_cone_validation_rejects_bad_costs() {
        let geom = OrthantGeometry::new(2).unwrap();
        assert!(matches!(
            ConicProgram::new(&geom, DVector::from_vec(vec![1.0, 0.0])),
            Err(SolveError::DualCone(_))
        ));
        let lorentz = LorentzGeometry::new(3).unwrap();
        assert!(matches!(
            ConicProgram::new(&lorentz, DVector::from_vec(vec![1.0, 2.0, 0.0])),
            Err(SolveError::DualCone(_))
        ));
        // The cube is not a cone; any finite cost is accepted.
        let cube = CubeGeometry::new(2).unwrap();
        assert!(ConicProgram::new(&cube, DVector::from_vec(vec![-3.0, 0.0])).is_ok());
    }

    #[test]
    fn flow_tracks_the_orthant_path() {
        let geom = OrthantGeometry::new(2).unwrap();
        let cost = DVector::from_vec(vec![1.0, 3.0]);
        let program = ConicProgram::new(&geom, cost.clone()).unwrap();
        // Start exactly on the path at theta = 1.
        let start = interior(&geom, vec![1.0, 1.0 / 3.0]);
        let points = flow_central_path(&program, 1.0, 10.0, &start, 0.01).unwrap();
        assert_eq!(points.len(), 901);
        let end = points.last().unwrap();
        assert_abs_diff_eq!(end.theta, 10.0, epsilon = 1e-12);
        for i in 0..2 {
            let exact = 1.0 / (10.0 * cost[i]);
            assert!(
                (end.point.coords()[i] - exact).abs() < 1e-7,
                "coordinate {i}: {} vs {exact}",
                end.point.coords()[i]
            );
        }
        // The flow stays on the path: decrements remain tiny throughout.
        assert!(points.iter().all(|p| p.newton_decrement < 1e-5));
    }

    #[test]
    fn degenerate_flow_returns_start() {
        let geom = OrthantGeometry::new(1).unwrap();
        let program = ConicProgram::new(&geom, DVector::from_vec(vec![2.0])).unwrap();
        let start = interior(&geom, vec![0.5]);
        let points = flow_central_path(&program, 1.0, 1.0, &start, 0.1).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].point.coords()[0], 0.5);
    }

    #[test]
    fn solve_follows_doubling_schedule_with_decreasing_objective() {
        let geom = OrthantGeometry::new(3).unwrap();
        let cost = DVector::from_vec(vec![1.0, 2.0, 4.0]);
        let program = ConicProgram::new(&geom, cost.clone()).unwrap();
        let stages = solve_conic(&program, 1024.0, 1e-10, None).unwrap();
        let thetas: Vec<f64> = stages.iter().map(|s| s.theta).collect();
        assert_eq!(
            thetas,
            vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]
        );
        for w in stages.windows(2) {
            assert!(w[1].objective < w[0].objective);
        }
        let last = stages.last().unwrap();
        for i in 0..3 {
            let exact = 1.0 / (1024.0 * cost[i]);
            assert_abs_diff_eq!(last.point.coords()[i], exact, epsilon = 1e-8 * exact);
        }
        assert_abs_diff_eq!(last.objective, 3.0 / 1024.0, epsilon = 1e-10);
    }

    #[test]
    fn non_integral_theta_max_is_reached_exactly() {
        let geom = OrthantGeometry::new(1).unwrap();
        let program = ConicProgram::new(&geom, DVector::from_vec(vec![1.0])).unwrap();
        let stages = solve_conic(&program, 5.0, 1e-10, None).unwrap();
        let thetas: Vec<f64> = stages.iter().map(|s| s.theta).collect();
        assert_eq!(thetas, vec![1.0, 2.0, 4.0, 5.0]);
    }

    #[test]
    fn csv_and_summary_have_expected_shape() {
        let geom = OrthantGeometry::new(2).unwrap();
        let program = ConicProgram::new(&geom, DVector::from_vec(vec![1.0, 1.0])).unwrap();
        let stages = solve_conic(&program, 4.0, 1e-10, None).unwrap();
        let mut buf = Vec::new();
        write_stages_csv(&mut buf, &stages).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta,objective,x0,x1\n"));
        assert_eq!(text.lines().count(), 1 + stages.len());
        let summary = stages_summary(&stages);
        assert_eq!(summary["final_theta"], serde_json::json!(4.0));
        assert_eq!(summary["stages"].as_array().unwrap().len(), 3);
    }
}
