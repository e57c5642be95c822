//! Forward Lorentz cone { x : x^0 > |x_spatial| } in ambient dimension
//! N = n + 1, with the scaled log barrier
//!
//!   F(x) = -(N/2) log q(x) + (N/2) log N,   q(x) = (x^0)^2 - |x_s|^2.
//!
//! The N/2 scaling (rather than the classical 1/2) makes F satisfy the
//! Monge-Ampere identity F = (1/2) log det D^2 F: writing A for the
//! Minkowski form diag(1, -1, ..., -1),
//!
//!   dF   = -(N/q) A x,
//!   g    = (N/q) ( 2 (Ax)(Ax)^T / q - A ),      det g = (N/q)^N,
//!   g^-1 = (1/N) ( 2 x x^T - q A ),
//!
//! and the Laplace-Beltrami drift collapses to b(x) = x, as for every
//! canonical cone barrier here.
//!
//! The module also provides the light-ray observables
//! f_b(x) = (sqrt(N)/2) log ((b.x)^2 / q) for null directions b = (1, u),
//! |u| = 1, which have unit Riemannian gradient norm everywhere and
//! constant Laplacian (N - 2)/sqrt(N).

use crate::error::GeometryError;
use crate::geometry::BarrierGeometry;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct LorentzGeometry {
    ambient: usize,
}

impl LorentzGeometry {
    /// `ambient` is N = n + 1 >= 2 (one time-like plus n spatial axes).
    pub fn new(ambient: usize) -> Result<Self, GeometryError> {
        if ambient < 2 {
            return Err(GeometryError::DimensionMismatch {
                expected: 2,
                got: ambient,
            });
        }
        Ok(Self { ambient })
    }

    pub fn spatial_dim(&self) -> usize {
        self.ambient - 1
    }

    /// Minkowski quadratic form q(x) = (x^0)^2 - |x_s|^2.
    pub fn minkowski_form(x: &DVector<f64>) -> f64 {
        let mut q = x[0] * x[0];
        for i in 1..x.len() {
            q -= x[i] * x[i];
        }
        q
    }

    /// A x = (x^0, -x^1, ..., -x^n).
    fn apply_a(x: &DVector<f64>) -> DVector<f64> {
        let mut ax = -x.clone();
        ax[0] = x[0];
        ax
    }
}

impl BarrierGeometry for LorentzGeometry {
    fn dim(&self) -> usize {
        self.ambient
    }

    fn is_cone(&self) -> bool {
        true
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.ambient
            && x.iter().all(|v| v.is_finite())
            && x[0] > 0.0
            && Self::minkowski_form(x) > 0.0
    }

    fn barrier(&self, x: &DVector<f64>) -> f64 {
        let n = self.ambient as f64;
        0.5 * n * (n.ln() - Self::minkowski_form(x).ln())
    }

    fn barrier_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.ambient as f64;
        let q = Self::minkowski_form(x);
        Self::apply_a(x) * (-n / q)
    }

    fn metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let nn = self.ambient;
        let n = nn as f64;
        let q = Self::minkowski_form(x);
        let ax = Self::apply_a(x);
        let mut g = DMatrix::zeros(nn, nn);
        for i in 0..nn {
            for j in 0..nn {
                g[(i, j)] = 2.0 * ax[i] * ax[j] / q;
            }
        }
        g[(0, 0)] -= 1.0;
        for i in 1..nn {
            g[(i, i)] += 1.0;
        }
        g * (n / q)
    }

    fn inverse_metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let nn = self.ambient;
        let n = nn as f64;
        let q = Self::minkowski_form(x);
        let mut inv = DMatrix::zeros(nn, nn);
        for i in 0..nn {
            for j in 0..nn {
                inv[(i, j)] = 2.0 * x[i] * x[j];
            }
        }
        inv[(0, 0)] -= q;
        for i in 1..nn {
            inv[(i, i)] += q;
        }
        inv / n
    }

    fn inverse_metric_divergence(&self, x: &DVector<f64>) -> DVector<f64> {
        // d_j [ (2 x^i x^j - q A^{ij}) / N ]: the x x^T part contributes
        // (2/N)(N + 1) x^i, the -q A part -2 x^i / N; total 2 x^i.
        x * 2.0
    }

    fn drift_vector(&self, x: &DVector<f64>) -> DVector<f64> {
        x.clone()
    }

    fn dual_interior(&self, c: &DVector<f64>) -> Option<bool> {
        // The cone is self-dual.
        Some(c.len() == self.ambient && c.iter().all(|v| v.is_finite()) && {
            let mut spatial = 0.0;
            for i in 1..c.len() {
                spatial += c[i] * c[i];
            }
            c[0] > 0.0 && c[0] * c[0] > spatial
        })
    }

    fn center_point(&self) -> Option<DVector<f64>> {
        let mut x = DVector::zeros(self.ambient);
        x[0] = 1.0;
        Some(x)
    }

    /// x^0 uniform on [1, 3]; spatial part uniform in the ball of radius
    /// 0.8 x^0 (direction from normalized Gaussians, radius via the
    /// U^{1/n} volume trick).
    fn sample_interior(&self, rng: &mut dyn rand::RngCore) -> Option<DVector<f64>> {
        let n = self.spatial_dim();
        let mut x = DVector::zeros(self.ambient);
        x[0] = rng.gen_range(1.0_f64..=3.0);
        let mut dir = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = dir.norm();
        if norm == 0.0 {
            dir[0] = 1.0;
        } else {
            dir /= norm;
        }
        let u: f64 = rng.gen_range(0.0_f64..1.0);
        let radius = 0.8 * x[0] * u.powf(1.0 / n as f64);
        for i in 0..n {
            x[i + 1] = radius * dir[i];
        }
        Some(x)
    }
}

/// A forward null direction b = (1, u) with |u| = 1, so b^T A b = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LightVector {
    b: DVector<f64>,
}

impl LightVector {
    /// The axis-aligned light vector (1, e_k), k a 0-based spatial index.
    pub fn axis(ambient: usize, k: usize) -> Result<Self, GeometryError> {
        if ambient < 2 || k + 1 >= ambient {
            return Err(GeometryError::DimensionMismatch {
                expected: ambient,
                got: k + 1,
            });
        }
        let mut b = DVector::zeros(ambient);
        b[0] = 1.0;
        b[k + 1] = 1.0;
        Ok(Self { b })
    }

    pub fn ambient_dim(&self) -> usize {
        self.b.len()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.b
    }

    /// Minkowski pairing b^T A b' = 1 - u . u'; zero iff b = b'.
    pub fn minkowski_inner(&self, other: &LightVector) -> f64 {
        let mut acc = self.b[0] * other.b[0];
        for i in 1..self.b.len() {
            acc -= self.b[i] * other.b[i];
        }
        acc
    }
}

/// Builds the light vector (1, u) from a spatial unit vector u.
pub fn make_light_vector(u: &DVector<f64>) -> Result<LightVector, GeometryError> {
    if u.is_empty() {
        return Err(GeometryError::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    let norm = u.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(GeometryError::NotUnitVector { norm });
    }
    let mut b = DVector::zeros(u.len() + 1);
    b[0] = 1.0;
    for i in 0..u.len() {
        b[i + 1] = u[i];
    }
    Ok(LightVector { b })
}

fn light_ray_parts(b: &LightVector, x: &DVector<f64>) -> Result<(f64, f64), GeometryError> {
    if b.ambient_dim() != x.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: b.ambient_dim(),
            got: x.len(),
        });
    }
    let bx = b.vector().dot(x);
    let q = LorentzGeometry::minkowski_form(x);
    if !bx.is_finite() || bx <= 0.0 {
        return Err(GeometryError::LightConeDomain {
            reason: format!("b.x = {bx} is not positive"),
        });
    }
    if !q.is_finite() || q <= 0.0 {
        return Err(GeometryError::LightConeDomain {
            reason: format!("Minkowski form q = {q} is not positive"),
        });
    }
    Ok((bx, q))
}

/// f_b(x) = (sqrt(N)/2) log ((b.x)^2 / q).
pub fn lorentz_aux_value(b: &LightVector, x: &DVector<f64>) -> Result<f64, GeometryError> {
    let (bx, q) = light_ray_parts(b, x)?;
    let n = b.ambient_dim() as f64;
    Ok(n.sqrt() * (bx.ln() - 0.5 * q.ln()))
}

/// df_b = sqrt(N) ( b / (b.x) - A x / q ).
pub fn lorentz_aux_gradient(
    b: &LightVector,
    x: &DVector<f64>,
) -> Result<DVector<f64>, GeometryError> {
    let (bx, q) = light_ray_parts(b, x)?;
    let n = b.ambient_dim() as f64;
    let mut g = b.vector() / bx;
    g[0] -= x[0] / q;
    for i in 1..x.len() {
        g[i] += x[i] / q;
    }
    Ok(g * n.sqrt())
}

/// D^2 f_b = sqrt(N) ( -b b^T/(b.x)^2 - A/q + 2 (Ax)(Ax)^T / q^2 ).
pub fn lorentz_aux_hessian(
    b: &LightVector,
    x: &DVector<f64>,
) -> Result<DMatrix<f64>, GeometryError> {
    let (bx, q) = light_ray_parts(b, x)?;
    let nn = x.len();
    let n = nn as f64;
    let bv = b.vector();
    let mut h = DMatrix::zeros(nn, nn);
    let mut ax = -x.clone();
    ax[0] = x[0];
    for i in 0..nn {
        for j in 0..nn {
            h[(i, j)] = -bv[i] * bv[j] / (bx * bx) + 2.0 * ax[i] * ax[j] / (q * q);
        }
    }
    h[(0, 0)] -= 1.0 / q;
    for i in 1..nn {
        h[(i, i)] += 1.0 / q;
    }
    Ok(h * n.sqrt())
}

/// Radial observable (sqrt(N)/2) log q; a linear function of the barrier,
/// with unit gradient norm and zero Laplacian.
pub fn lorentz_radial_value(ambient: usize, x: &DVector<f64>) -> f64 {
    let n = ambient as f64;
    0.5 * n.sqrt() * LorentzGeometry::minkowski_form(x).ln()
}

/// Instantaneous cross-diffusion coefficient of two light-ray observables:
/// <grad f_i, grad f_j>_g = 1 - (b_i^T A b_j) exp(-(f_i + f_j)/sqrt(N)).
pub fn lorentz_sigma(bi: &LightVector, bj: &LightVector, fi: f64, fj: f64) -> f64 {
    let n = bi.ambient_dim() as f64;
    1.0 - bi.minkowski_inner(bj) * (-(fi + fj) / n.sqrt()).exp()
}

/// Drift constant of the spatial light-ray observables at beta = 2:
/// mu = (n - 1) / (2 sqrt(n + 1)), n the spatial dimension.
pub fn lorentz_mu(spatial_dim: usize) -> f64 {
    let n = spatial_dim as f64;
    (n - 1.0) / (2.0 * (n + 1.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;
    use crate::geometry::{
        cone_identity_check, laplace_beltrami, metric_inner, monge_ampere_residual, ClosureField,
        InteriorPoint,
    };
    use approx::assert_abs_diff_eq;

    fn reference_point() -> DVector<f64> {
        DVector::from_vec(vec![2.0, 0.7, -0.4, 0.9])
    }

    #[test]
    fn metric_inverse_pair_multiplies_to_identity() {
        let geom = LorentzGeometry::new(4).unwrap();
        let x = reference_point();
        let prod = geom.metric(&x) * geom.inverse_metric(&x);
        let err = (&prod - DMatrix::<f64>::identity(4, 4)).amax();
        assert!(err < 1e-12, "max |g g^-1 - I| = {err}");
    }

    #[test]
    fn metric_at_unit_time_vector_is_scaled_identity() {
        // At x = (1, 0, 0, 0): q = 1, Ax = x, g = 4 (2 e0 e0^T - A) = 4 I.
        let geom = LorentzGeometry::new(4).unwrap();
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let g = geom.metric(&x);
        let err = (&g - DMatrix::<f64>::identity(4, 4) * 4.0).amax();
        assert!(err < 1e-14);
    }

    #[test]
    fn gradient_and_metric_match_finite_differences() {
        let geom = LorentzGeometry::new(4).unwrap();
        let x = reference_point();
        let f = |y: &DVector<f64>| geom.contains(y).then(|| geom.barrier(y));
        let fd_grad = fd::fd_gradient(&f, &x, 1e-5).unwrap();
        assert!((&fd_grad - geom.barrier_gradient(&x)).amax() < 1e-7);
        let grad = |y: &DVector<f64>| geom.contains(y).then(|| geom.barrier_gradient(y));
        let fd_hess = fd::fd_hessian_from_gradient(&grad, &x, 1e-5).unwrap();
        assert!((&fd_hess - geom.metric(&x)).amax() < 1e-8);
    }

    #[test]
    fn monge_ampere_and_cone_identities_hold() {
        for ambient in [2, 4, 9] {
            let geom = LorentzGeometry::new(ambient).unwrap();
            let mut coords = DVector::zeros(ambient);
            coords[0] = 1.7;
            for i in 1..ambient {
                coords[i] = 0.9 / (i as f64 + 1.0) * if i % 2 == 0 { -1.0 } else { 1.0 };
            }
            let x = InteriorPoint::new(&geom, coords).unwrap();
            let ma = monge_ampere_residual(&geom, &x).unwrap();
            assert!(ma.abs() < 1e-10, "ambient {ambient}: MA residual {ma}");
            let cone = cone_identity_check(&geom, &x).unwrap();
            assert!(cone.gradient_plus_point < 1e-10);
            assert!(cone.gradient_norm_minus_dim < 1e-10);
            assert!(cone.barrier_laplacian < 1e-9);
        }
    }

    #[test]
    fn drift_equals_position_via_defaults() {
        // Cross-check the closed-form b(x) = x against the trait's
        // finite-difference default route.
        let geom = LorentzGeometry::new(3).unwrap();
        let x = DVector::from_vec(vec![1.5, 0.3, -0.8]);
        let closed = geom.drift_vector(&x);
        let fd_div = {
            // Recompute inverse_metric_divergence by finite differences.
            let h = 1e-5;
            let mut div = DVector::zeros(3);
            let mut xp = x.clone();
            for j in 0..3 {
                xp[j] = x[j] + h;
                let gp = geom.inverse_metric(&xp);
                xp[j] = x[j] - h;
                let gm = geom.inverse_metric(&xp);
                xp[j] = x[j];
                for i in 0..3 {
                    div[i] += (gp[(i, j)] - gm[(i, j)]) / (2.0 * h);
                }
            }
            div
        };
        assert!((&fd_div - geom.inverse_metric_divergence(&x)).amax() < 1e-9);
        let vol_term = geom.inverse_metric(&x) * geom.barrier_gradient(&x);
        assert!((&closed - (fd_div + vol_term)).amax() < 1e-9);
    }

    #[test]
    fn light_ray_observables_have_unit_gradient_and_constant_laplacian() {
        let geom = LorentzGeometry::new(4).unwrap();
        let x = InteriorPoint::new(&geom, reference_point()).unwrap();
        let b = LightVector::axis(4, 0).unwrap();
        let df = lorentz_aux_gradient(&b, x.coords()).unwrap();
        let norm2 = metric_inner(&geom, &x, &df, &df).unwrap();
        assert_abs_diff_eq!(norm2, 1.0, epsilon = 1e-12);
        let d_f = geom.barrier_gradient(x.coords());
        assert_abs_diff_eq!(metric_inner(&geom, &x, &df, &d_f).unwrap(), 0.0, epsilon = 1e-12);

        let field = ClosureField {
            value: |y: &DVector<f64>| lorentz_aux_value(&b, y).unwrap(),
            gradient: |y: &DVector<f64>| lorentz_aux_gradient(&b, y).unwrap(),
            hessian: |y: &DVector<f64>| lorentz_aux_hessian(&b, y).unwrap(),
        };
        let lap = laplace_beltrami(&geom, &field, &x).unwrap();
        // (N - 2)/sqrt(N) with N = 4.
        assert_abs_diff_eq!(lap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn light_ray_closed_forms_match_finite_differences() {
        let b = make_light_vector(&DVector::from_vec(vec![
            0.6,
            0.8 / 5.0_f64.sqrt(),
            1.6 / 5.0_f64.sqrt(),
        ]))
        .unwrap();
        // |u|^2 = 0.36 + 0.128 + 0.512 = 1.
        let x = reference_point();
        let f = |y: &DVector<f64>| lorentz_aux_value(&b, y).ok();
        let fd_grad = fd::fd_gradient(&f, &x, 1e-5).unwrap();
        assert!((&fd_grad - lorentz_aux_gradient(&b, &x).unwrap()).amax() < 1e-7);
        let grad = |y: &DVector<f64>| lorentz_aux_gradient(&b, y).ok();
        let fd_hess = fd::fd_hessian_from_gradient(&grad, &x, 1e-5).unwrap();
        assert!((&fd_hess - lorentz_aux_hessian(&b, &x).unwrap()).amax() < 1e-8);
    }

    #[test]
    fn sigma_matches_direct_gradient_inner_product() {
        let geom = LorentzGeometry::new(4).unwrap();
        let x = InteriorPoint::new(&geom, reference_point()).unwrap();
        let bi = LightVector::axis(4, 0).unwrap();
        let bj = LightVector::axis(4, 2).unwrap();
        let dfi = lorentz_aux_gradient(&bi, x.coords()).unwrap();
        let dfj = lorentz_aux_gradient(&bj, x.coords()).unwrap();
        let direct = metric_inner(&geom, &x, &dfi, &dfj).unwrap();
        let fi = lorentz_aux_value(&bi, x.coords()).unwrap();
        let fj = lorentz_aux_value(&bj, x.coords()).unwrap();
        assert_abs_diff_eq!(lorentz_sigma(&bi, &bj, fi, fj), direct, epsilon = 1e-12);
        // Self-pairing is exactly 1 (null vectors).
        assert_abs_diff_eq!(lorentz_sigma(&bi, &bi, fi, fi), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn drift_constants() {
        assert_abs_diff_eq!(lorentz_mu(1), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lorentz_mu(3), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lorentz_mu(8), 7.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn light_vector_validation() {
        assert!(make_light_vector(&DVector::from_vec(vec![0.6, 0.8])).is_ok());
        assert!(matches!(
            make_light_vector(&DVector::from_vec(vec![0.6, 0.7])),
            Err(GeometryError::NotUnitVector { .. })
        ));
        let b = LightVector::axis(4, 1).unwrap();
        assert_eq!(b.vector().as_slice(), &[1.0, 0.0, 1.0, 0.0]);
        assert!(LightVector::axis(4, 3).is_err());
    }

    #[test]
    fn radial_observable_is_affine_in_the_barrier() {
        let geom = LorentzGeometry::new(4).unwrap();
        let x = reference_point();
        let n = 4.0_f64;
        let expected = (0.5 * n * n.ln() - geom.barrier(&x)) / n.sqrt();
        assert_abs_diff_eq!(lorentz_radial_value(4, &x), expected, epsilon = 1e-12);
    }

    #[test]
    fn interior_sampler_stays_inside() {
        use rand::SeedableRng;
        let geom = LorentzGeometry::new(9).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = geom.sample_interior(&mut rng).unwrap();
            assert!(geom.contains(&x));
        }
    }
}
