//! Positive orthant with the log barrier F(x) = -sum_i log x^i.
//!
//! Everything is diagonal: g = diag(1/(x^i)^2), g^{-1} = diag((x^i)^2),
//! d_j g^{ij} = 2 x^i, and the Laplace-Beltrami drift is b(x) = x.

use crate::error::GeometryError;
use crate::geometry::BarrierGeometry;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct OrthantGeometry {
    dim: usize,
}

impl OrthantGeometry {
    pub fn new(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { dim })
    }
}

impl BarrierGeometry for OrthantGeometry {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_cone(&self) -> bool {
        true
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim && x.iter().all(|v| v.is_finite() && *v > 0.0)
    }

    fn barrier(&self, x: &DVector<f64>) -> f64 {
        -x.iter().map(|v| v.ln()).sum::<f64>()
    }

    fn barrier_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| -1.0 / v)
    }

    fn metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&x.map(|v| 1.0 / (v * v)))
    }

    fn inverse_metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&x.map(|v| v * v))
    }

    fn inverse_metric_divergence(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| 2.0 * v)
    }

    fn drift_vector(&self, x: &DVector<f64>) -> DVector<f64> {
        x.clone()
    }

    fn noise_factor(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(x)
    }

    fn dual_interior(&self, c: &DVector<f64>) -> Option<bool> {
        Some(c.len() == self.dim && c.iter().all(|v| v.is_finite() && *v > 0.0))
    }

    fn center_point(&self) -> Option<DVector<f64>> {
        Some(DVector::from_element(self.dim, 1.0))
    }

    fn coordinate_interval(&self) -> Option<(f64, f64)> {
        Some((0.0, f64::INFINITY))
    }

    /// Coordinates e^U with U uniform on [-1, 1], independent per axis.
    fn sample_interior(&self, rng: &mut dyn rand::RngCore) -> Option<DVector<f64>> {
        Some(DVector::from_fn(self.dim, |_, _| {
            rng.gen_range(-1.0_f64..=1.0).exp()
        }))
    }
}
