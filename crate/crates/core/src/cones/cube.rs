//! Open unit cube (0,1)^n with the canonical barrier
//! F(x) = -sum_i log( sin(pi x^i) / pi ).
//!
//! This is the unique barrier on the cube satisfying the Monge-Ampere
//! identity F = (1/2) log det D^2 F: the metric is
//! g = diag(pi^2 / sin^2(pi x^i)), so (1/2) log det g = -sum log(sin/pi).
//! The Laplace-Beltrami drift is b^i = sin(2 pi x^i) / (2 pi), which
//! pushes toward the center and vanishes at x^i = 1/2.

use crate::error::GeometryError;
use crate::geometry::BarrierGeometry;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::PI;

/// Strict-interior margin: the metric overflows within ~1e-8 of a face,
/// so points that close are treated as boundary.
pub const CUBE_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CubeGeometry {
    dim: usize,
}

impl CubeGeometry {
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

impl BarrierGeometry for CubeGeometry {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_cone(&self) -> bool {
        false
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim
            && x.iter()
                .all(|v| v.is_finite() && *v > CUBE_MARGIN && *v < 1.0 - CUBE_MARGIN)
    }

    fn barrier(&self, x: &DVector<f64>) -> f64 {
        -x.iter().map(|v| ((PI * v).sin() / PI).ln()).sum::<f64>()
    }

    fn barrier_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| {
            let (s, c) = (PI * v).sin_cos();
            -PI * c / s
        })
    }

    fn metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&x.map(|v| {
            let s = (PI * v).sin();
            PI * PI / (s * s)
        }))
    }

    fn inverse_metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&x.map(|v| {
            let s = (PI * v).sin();
            s * s / (PI * PI)
        }))
    }

    fn inverse_metric_divergence(&self, x: &DVector<f64>) -> DVector<f64> {
        // d/dx [ sin^2(pi x) / pi^2 ] = sin(2 pi x) / pi
        x.map(|v| (2.0 * PI * v).sin() / PI)
    }

    fn drift_vector(&self, x: &DVector<f64>) -> DVector<f64> {
        // d g^{ii} + g^{ii} dF = sin(2 pi x)/pi - sin(pi x) cos(pi x)/pi
        //                      = sin(2 pi x) / (2 pi)
        x.map(|v| (2.0 * PI * v).sin() / (2.0 * PI))
    }

    fn noise_factor(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&x.map(|v| (PI * v).sin() / PI))
    }

    fn center_point(&self) -> Option<DVector<f64>> {
        Some(DVector::from_element(self.dim, 0.5))
    }

    fn coordinate_interval(&self) -> Option<(f64, f64)> {
        Some((0.0, 1.0))
    }

    /// Uniform on [0.1, 0.9] per axis.
    fn sample_interior(&self, rng: &mut dyn rand::RngCore) -> Option<DVector<f64>> {
        Some(DVector::from_fn(self.dim, |_, _| rng.gen_range(0.1..=0.9)))
    }
}
