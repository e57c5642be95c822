//! Hessian barrier geometries and the differential operators built on them.
//!
//! A barrier geometry is a convex domain equipped with a self-concordant
//! barrier F whose Hessian D^2 F serves as a Riemannian metric g. For the
//! canonical barriers implemented in [`crate::cones`] the metric satisfies
//! the Monge-Ampere identity F = (1/2) log det D^2 F, which makes the
//! Riemannian volume element e^F and collapses the Laplace-Beltrami drift
//! to b^i = d_j g^{ij} + g^{ij} d_j F.

use crate::error::GeometryError;
use crate::fd;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Condition estimate above which metric solves emit a warning.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

/// A convex domain with a barrier whose Hessian is the metric.
///
/// Coordinate vectors passed to the evaluation methods must already lie in
/// the interior; use [`InteriorPoint`] at API boundaries to enforce this.
pub trait BarrierGeometry: Send + Sync {
    /// Ambient coordinate dimension.
    fn dim(&self) -> usize;

    /// Whether the domain is a cone (scale-invariant with a log-homogeneous
    /// barrier). Cone-specific identities are only checked when this holds.
    fn is_cone(&self) -> bool;

    /// Strict interior membership. Must reject non-finite coordinates.
    fn contains(&self, x: &DVector<f64>) -> bool;

    /// Barrier value F(x).
    fn barrier(&self, x: &DVector<f64>) -> f64;

    /// Euclidean gradient dF(x).
    fn barrier_gradient(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Metric g(x) = D^2 F(x).
    fn metric(&self, x: &DVector<f64>) -> DMatrix<f64>;

    /// Inverse metric g^{-1}(x). Default: SPD factorization of `metric`.
    fn inverse_metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let g = self.metric(x);
        match Cholesky::new(g) {
            Some(chol) => chol.inverse(),
            None => DMatrix::from_element(self.dim(), self.dim(), f64::NAN),
        }
    }

    /// Row divergence of the inverse metric, (d_j g^{ij})_i.
    /// Default: central differences of `inverse_metric` with step 1e-5.
    fn inverse_metric_divergence(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let h = fd::DEFAULT_STEP;
        let mut div = DVector::zeros(n);
        let mut xp = x.clone();
        for j in 0..n {
            xp[j] = x[j] + h;
            let gp = self.inverse_metric(&xp);
            xp[j] = x[j] - h;
            let gm = self.inverse_metric(&xp);
            xp[j] = x[j];
            for i in 0..n {
                div[i] += (gp[(i, j)] - gm[(i, j)]) / (2.0 * h);
            }
        }
        div
    }

    /// Laplace-Beltrami first-order coefficients,
    /// b^i = d_j g^{ij} + g^{ij} d_i (log sqrt(det g)).
    ///
    /// The default estimates d(log sqrt det g) by finite differences so it
    /// stays correct for non-canonical barriers; canonical geometries
    /// override with closed forms (where the volume term equals dF).
    fn drift_vector(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let h = fd::DEFAULT_STEP;
        let mut grad_log_vol = DVector::zeros(n);
        let mut xp = x.clone();
        for j in 0..n {
            xp[j] = x[j] + h;
            let lp = half_log_det(&self.metric(&xp));
            xp[j] = x[j] - h;
            let lm = half_log_det(&self.metric(&xp));
            xp[j] = x[j];
            grad_log_vol[j] = (lp - lm) / (2.0 * h);
        }
        self.inverse_metric_divergence(x) + self.inverse_metric(x) * grad_log_vol
    }

    /// A factor S(x) with S S^T = g^{-1}(x), used to drive the noise.
    /// Default: lower Cholesky factor of the inverse metric.
    fn noise_factor(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match Cholesky::new(self.inverse_metric(x)) {
            Some(chol) => chol.unpack(),
            None => DMatrix::from_element(self.dim(), self.dim(), f64::NAN),
        }
    }

    /// Whether a cost vector lies in the interior of the dual cone.
    /// `None` means the geometry cannot decide (non-cone domains).
    fn dual_interior(&self, _c: &DVector<f64>) -> Option<bool> {
        None
    }

    /// A reasonable strictly interior point, used as a default solver start.
    fn center_point(&self) -> Option<DVector<f64>> {
        None
    }

    /// For products of identical 1-d factors: the open interval each
    /// coordinate ranges over. `None` for non-product domains.
    fn coordinate_interval(&self) -> Option<(f64, f64)> {
        None
    }

    /// Draw a point from the geometry's reference interior distribution
    /// (used by the verification samplers). `None` if not implemented.
    fn sample_interior(&self, _rng: &mut dyn rand::RngCore) -> Option<DVector<f64>> {
        None
    }
}

fn half_log_det(g: &DMatrix<f64>) -> f64 {
    match Cholesky::new(g.clone()) {
        Some(chol) => chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum(),
        None => f64::NAN,
    }
}

/// A coordinate vector validated against a geometry's interior.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorPoint {
    coords: DVector<f64>,
}

impl InteriorPoint {
    /// Validates finiteness, dimension, and strict interior membership.
    pub fn new<G: BarrierGeometry + ?Sized>(
        geometry: &G,
        coords: DVector<f64>,
    ) -> Result<Self, GeometryError> {
        if coords.len() != geometry.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: geometry.dim(),
                got: coords.len(),
            });
        }
        if let Some(index) = coords.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        if !geometry.contains(&coords) {
            return Err(GeometryError::NotInterior);
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }
}

/// Validated metric tensor: symmetric to 1e-12 (relative) and positive
/// definite. Produced by [`metric_tensor`]; the hot simulation paths use
/// the raw trait methods instead.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    matrix: DMatrix<f64>,
    cholesky: Cholesky<f64, Dyn>,
}

impl MetricTensor {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, GeometryError> {
        let scale = matrix.amax().max(1.0);
        let mut max_asym: f64 = 0.0;
        for i in 0..matrix.nrows() {
            for j in (i + 1)..matrix.ncols() {
                max_asym = max_asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if max_asym > 1e-12 * scale {
            return Err(GeometryError::MetricNotSymmetric {
                max_asymmetry: max_asym,
            });
        }
        let cholesky = Cholesky::new(matrix.clone()).ok_or_else(|| {
            // Recompute with the pivot location for the error message.
            first_bad_pivot(&matrix)
        })?;
        Ok(Self { matrix, cholesky })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Solve g v = rhs. Warns (does not abort) when the condition estimate
    /// exceeds [`CONDITION_WARN_THRESHOLD`].
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let cond = self.condition_estimate();
        if cond > CONDITION_WARN_THRESHOLD {
            log::warn!("metric solve is ill-conditioned (condition estimate {cond:.3e})");
        }
        self.cholesky.solve(rhs)
    }

    /// Cheap condition estimate from the Cholesky diagonal:
    /// (max_i L_ii / min_i L_ii)^2. A lower bound on the true condition
    /// number, adequate for the warning threshold.
    pub fn condition_estimate(&self) -> f64 {
        let diag = self.cholesky.l_dirty().diagonal();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for d in diag.iter() {
            lo = lo.min(*d);
            hi = hi.max(*d);
        }
        (hi / lo).powi(2)
    }

    pub fn half_log_det(&self) -> f64 {
        self.cholesky
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum()
    }
}

fn first_bad_pivot(matrix: &DMatrix<f64>) -> GeometryError {
    // LDL^T-style pass just to locate the failing pivot for diagnostics.
    let n = matrix.nrows();
    let mut a = matrix.clone();
    for k in 0..n {
        let pivot = a[(k, k)];
        if pivot <= 0.0 || !pivot.is_finite() {
            return GeometryError::MetricNotPositiveDefinite { row: k, pivot };
        }
        for i in (k + 1)..n {
            let f = a[(i, k)] / pivot;
            for j in (k + 1)..n {
                let v = a[(k, j)];
                a[(i, j)] -= f * v;
            }
        }
    }
    GeometryError::MetricNotPositiveDefinite {
        row: n.saturating_sub(1),
        pivot: a[(n - 1, n - 1)],
    }
}

/// Validated metric at a point.
pub fn metric_tensor<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    x: &InteriorPoint,
) -> Result<MetricTensor, GeometryError> {
    MetricTensor::new(geometry.metric(x.coords()))
}

/// A twice-differentiable scalar observable on the domain.
pub trait ScalarField {
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// The barrier itself as a scalar field (gradient dF, Hessian g).
pub struct BarrierField<'g, G: BarrierGeometry + ?Sized> {
    pub geometry: &'g G,
}

impl<G: BarrierGeometry + ?Sized> ScalarField for BarrierField<'_, G> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.geometry.barrier(x)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.geometry.barrier_gradient(x)
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.geometry.metric(x)
    }
}

/// f(x) = log x^i; the Brownian-conformance observable on the orthant.
pub struct LogCoordinateField {
    pub index: usize,
}

impl ScalarField for LogCoordinateField {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x[self.index].ln()
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(x.len());
        g[self.index] = 1.0 / x[self.index];
        g
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(x.len(), x.len());
        h[(self.index, self.index)] = -1.0 / (x[self.index] * x[self.index]);
        h
    }
}

/// A scalar field given by closures (value, gradient, Hessian).
pub struct ClosureField<V, Gr, He>
where
    V: Fn(&DVector<f64>) -> f64,
    Gr: Fn(&DVector<f64>) -> DVector<f64>,
    He: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    pub value: V,
    pub gradient: Gr,
    pub hessian: He,
}

impl<V, Gr, He> ScalarField for ClosureField<V, Gr, He>
where
    V: Fn(&DVector<f64>) -> f64,
    Gr: Fn(&DVector<f64>) -> DVector<f64>,
    He: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    fn value(&self, x: &DVector<f64>) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(x)
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.hessian)(x)
    }
}

/// Riemannian gradient grad f = g^{-1} df.
pub fn riemannian_gradient<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    x: &InteriorPoint,
    differential: &DVector<f64>,
) -> Result<DVector<f64>, GeometryError> {
    if differential.len() != geometry.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: geometry.dim(),
            got: differential.len(),
        });
    }
    let g = metric_tensor(geometry, x)?;
    Ok(g.solve(differential))
}

/// Metric inner product of two differentials, <df, dh>_g = df^T g^{-1} dh.
pub fn metric_inner<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    x: &InteriorPoint,
    df: &DVector<f64>,
    dh: &DVector<f64>,
) -> Result<f64, GeometryError> {
    let grad_h = riemannian_gradient(geometry, x, dh)?;
    Ok(df.dot(&grad_h))
}

/// Checked wrapper for [`BarrierGeometry::drift_vector`].
pub fn drift_vector<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    x: &InteriorPoint,
) -> Result<DVector<f64>, GeometryError> {
    Ok(geometry.drift_vector(x.coords()))
}

/// Laplace-Beltrami operator applied to a scalar field:
/// delta f = g^{ij} d_i d_j f + b^i d_i f.
pub fn laplace_beltrami<G, F>(geometry: &G, field: &F, x: &InteriorPoint) -> Result<f64, GeometryError>
where
    G: BarrierGeometry + ?Sized,
    F: ScalarField + ?Sized,
{
    let coords = x.coords();
    let inv = geometry.inverse_metric(coords);
    let hess = field.hessian(coords);
    let grad = field.gradient(coords);
    let b = geometry.drift_vector(coords);
    let mut trace = 0.0;
    for i in 0..coords.len() {
        for j in 0..coords.len() {
            trace += inv[(i, j)] * hess[(j, i)];
        }
    }
    Ok(trace + b.dot(&grad))
}

/// Residual of the Monge-Ampere identity F = (1/2) log det D^2 F.
pub fn monge_ampere_residual<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    x: &InteriorPoint,
) -> Result<f64, GeometryError> {
    let g = metric_tensor(geometry, x)?;
    Ok(geometry.barrier(x.coords()) - g.half_log_det())
}

/// Residuals of the cone identities for log-homogeneous barriers:
/// grad F = -x, |grad F|_g^2 = n, and delta F = 0.
#[derive(Debug, Clone)]
pub struct ConeIdentityResidual {
    /// max_i |(g^{-1} dF + x)_i|
    pub gradient_plus_point: f64,
    /// | dF^T g^{-1} dF - n |
    pub gradient_norm_minus_dim: f64,
    /// | delta F |
    pub barrier_laplacian: f64,
}

/// Evaluates the cone identities. Errors with [`GeometryError::NotACone`]
/// on non-cone geometries.
pub fn cone_identity_check<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    x: &InteriorPoint,
) -> Result<ConeIdentityResidual, GeometryError> {
    if !geometry.is_cone() {
        return Err(GeometryError::NotACone);
    }
    let df = geometry.barrier_gradient(x.coords());
    let grad = riemannian_gradient(geometry, x, &df)?;
    let gradient_plus_point = (&grad + x.coords()).amax();
    let gradient_norm_minus_dim = (df.dot(&grad) - geometry.dim() as f64).abs();
    let field = BarrierField { geometry };
    let barrier_laplacian = laplace_beltrami(geometry, &field, x)?.abs();
    Ok(ConeIdentityResidual {
        gradient_plus_point,
        gradient_norm_minus_dim,
        barrier_laplacian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimal non-canonical geometry (half-line, barrier 2 F_orthant) to
    /// exercise the finite-difference trait defaults.
    struct DoubledLog;

    impl BarrierGeometry for DoubledLog {
        fn dim(&self) -> usize {
            1
        }
        fn is_cone(&self) -> bool {
            false
        }
        fn contains(&self, x: &DVector<f64>) -> bool {
            x[0].is_finite() && x[0] > 0.0
        }
        fn barrier(&self, x: &DVector<f64>) -> f64 {
            -2.0 * x[0].ln()
        }
        fn barrier_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![-2.0 / x[0]])
        }
        fn metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_vec(1, 1, vec![2.0 / (x[0] * x[0])])
        }
    }

    #[test]
    fn default_drift_matches_closed_form_for_doubled_log() {
        // g = 2/x^2, g^{-1} = x^2/2, d g^{-1} = x,
        // log sqrt det g = (1/2) log 2 - log x, so the volume term is
        // g^{-1} * (-1/x) = -x/2 and b = x - x/2 = x/2.
        let geom = DoubledLog;
        let x = DVector::from_vec(vec![0.8]);
        let b = geom.drift_vector(&x);
        assert!((b[0] - 0.4).abs() < 1e-7, "b = {}", b[0]);
    }

    #[test]
    fn interior_point_rejects_exterior_and_nonfinite() {
        let geom = DoubledLog;
        assert!(InteriorPoint::new(&geom, DVector::from_vec(vec![1.0])).is_ok());
        assert!(matches!(
            InteriorPoint::new(&geom, DVector::from_vec(vec![-1.0])),
            Err(GeometryError::NotInterior)
        ));
        assert!(matches!(
            InteriorPoint::new(&geom, DVector::from_vec(vec![f64::NAN])),
            Err(GeometryError::NonFinite { index: 0 })
        ));
        assert!(matches!(
            InteriorPoint::new(&geom, DVector::from_vec(vec![1.0, 2.0])),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn metric_tensor_rejects_asymmetry_and_indefiniteness() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5 + 1e-6, 1.0]);
        assert!(matches!(
            MetricTensor::new(asym),
            Err(GeometryError::MetricNotSymmetric { .. })
        ));
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match MetricTensor::new(indef) {
            Err(GeometryError::MetricNotPositiveDefinite { row, pivot }) => {
                assert_eq!(row, 1);
                assert!(pivot < 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn condition_estimate_tracks_diagonal_spread() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-8]);
        let t = MetricTensor::new(m).unwrap();
        let cond = t.condition_estimate();
        assert!((cond - 1e8).abs() / 1e8 < 1e-6, "cond = {cond}");
    }

    #[test]
    fn cone_check_refuses_non_cones() {
        let geom = DoubledLog;
        let x = InteriorPoint::new(&geom, DVector::from_vec(vec![1.0])).unwrap();
        assert!(matches!(
            cone_identity_check(&geom, &x),
            Err(GeometryError::NotACone)
        ));
    }
}
