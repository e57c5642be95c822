//! End-to-end verification drivers: geometry certificates (closed forms
//! against finite differences and exact identities at sampled interior
//! points) and the simulation-backed observable suites used by the
//! command-line verifier.

use crate::analysis::{
    bm_conformance_test, lorentz_theorem_test, observable_path, with_retry, BmExpectation,
    ScalarPath, StatReport,
};
use crate::cones::{CubeGeometry, GeometryKind, LorentzGeometry, OrthantGeometry};
use crate::error::{AnalysisError, GeometryError, VerifyError};
use crate::fd;
use crate::geometry::{
    cone_identity_check, metric_tensor, BarrierGeometry, InteriorPoint,
};
use crate::rng::replica_rng;
use crate::sde::{exact_transform_bm, simulate_bm, ExactChart, Scheme, SimulationConfig};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// One line of a geometry certificate.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryCheck {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub status: String,
}

impl GeometryCheck {
    fn judged(check: &str, max_residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            max_residual: Some(max_residual),
            tolerance,
            status: if max_residual <= tolerance {
                "pass".into()
            } else {
                "fail".into()
            },
        }
    }

    fn skipped(check: &str, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            max_residual: None,
            tolerance,
            status: "skipped".into(),
        }
    }
}

/// Residual summary over sampled interior points.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryCertificate {
    pub geometry: String,
    pub dim: usize,
    pub points: usize,
    pub seed: u64,
    pub exact_tolerance: f64,
    pub fd_tolerance: f64,
    pub checks: Vec<GeometryCheck>,
    pub verdict: bool,
}

/// Evaluates every closed form and identity at `points` sampled interior
/// points and reports per-check maxima. Exact identities (inverse pair,
/// drift decomposition, Monge-Ampere, cone identities) are judged at
/// `exact_tol`; finite-difference cross-checks at `fd_tol`.
pub fn certify_geometry(
    geometry: &dyn BarrierGeometry,
    name: &str,
    points: usize,
    seed: u64,
    exact_tol: f64,
    fd_tol: f64,
) -> Result<GeometryCertificate, GeometryError> {
    let mut rng = replica_rng(seed, 0);
    let dim = geometry.dim();
    let identity = DMatrix::<f64>::identity(dim, dim);

    let mut grad_fd = 0.0f64;
    let mut metric_fd = 0.0f64;
    let mut inverse_exact = 0.0f64;
    let mut divergence_fd = 0.0f64;
    let mut drift_exact = 0.0f64;
    let mut monge_ampere = 0.0f64;
    let mut cone_gradient = 0.0f64;
    let mut cone_norm = 0.0f64;
    let mut cone_harmonic = 0.0f64;
    let mut cone_homogeneity = 0.0f64;

    for _ in 0..points {
        let coords = geometry
            .sample_interior(&mut rng)
            .ok_or(GeometryError::NoSampler)?;
        let x = InteriorPoint::new(geometry, coords)?;
        let c = x.coords();

        let closed_grad = geometry.barrier_gradient(c);
        let barrier_fn =
            |y: &DVector<f64>| geometry.contains(y).then(|| geometry.barrier(y));
        let fd_grad = fd::fd_gradient(&barrier_fn, c, fd::DEFAULT_STEP)
            .map_err(|_| GeometryError::StencilLeftDomain)?;
        grad_fd = grad_fd.max(
            (&fd_grad - &closed_grad).amax() / closed_grad.amax().max(1.0),
        );

        let metric = geometry.metric(c);
        let grad_fn =
            |y: &DVector<f64>| geometry.contains(y).then(|| geometry.barrier_gradient(y));
        let fd_metric = fd::fd_hessian_from_gradient(&grad_fn, c, fd::DEFAULT_STEP)
            .map_err(|_| GeometryError::StencilLeftDomain)?;
        metric_fd = metric_fd.max((&fd_metric - &metric).norm() / metric.norm());

        let inverse = geometry.inverse_metric(c);
        inverse_exact = inverse_exact.max((&metric * &inverse - &identity).amax());

        let closed_div = geometry.inverse_metric_divergence(c);
        let mut fd_div = DVector::zeros(dim);
        let h = fd::DEFAULT_STEP;
        let mut xp = c.clone();
        for j in 0..dim {
            xp[j] = c[j] + h;
            let gp = geometry.inverse_metric(&xp);
            xp[j] = c[j] - h;
            let gm = geometry.inverse_metric(&xp);
            xp[j] = c[j];
            for i in 0..dim {
                fd_div[i] += (gp[(i, j)] - gm[(i, j)]) / (2.0 * h);
            }
        }
        divergence_fd = divergence_fd
            .max((&fd_div - &closed_div).amax() / closed_div.amax().max(1.0));

        let drift = geometry.drift_vector(c);
        let recomposed = &closed_div + &inverse * &closed_grad;
        drift_exact = drift_exact.max((&drift - recomposed).amax());

        let tensor = metric_tensor(geometry, &x)?;
        monge_ampere = monge_ampere.max((geometry.barrier(c) - tensor.half_log_det()).abs());

        if geometry.is_cone() {
            let res = cone_identity_check(geometry, &x)?;
            cone_gradient = cone_gradient.max(res.gradient_plus_point);
            cone_norm = cone_norm.max(res.gradient_norm_minus_dim);
            cone_harmonic = cone_harmonic.max(res.barrier_laplacian);
            // F(lambda x) = F(x) - N log(lambda)
            let fx = geometry.barrier(c);
            for lambda in [0.5, 2.0, 10.0] {
                let fl = geometry.barrier(&c.scale(lambda));
                cone_homogeneity =
                    cone_homogeneity.max((fl - (fx - dim as f64 * lambda.ln())).abs());
            }
        }
    }

    let mut checks = vec![
        GeometryCheck::judged("barrier_gradient_vs_fd", grad_fd, fd_tol),
        GeometryCheck::judged("metric_vs_fd", metric_fd, fd_tol),
        GeometryCheck::judged("inverse_metric_pair", inverse_exact, exact_tol),
        GeometryCheck::judged("inverse_metric_divergence_vs_fd", divergence_fd, fd_tol),
        GeometryCheck::judged("drift_decomposition", drift_exact, exact_tol),
        GeometryCheck::judged("monge_ampere_identity", monge_ampere, exact_tol),
    ];
    if geometry.is_cone() {
        checks.push(GeometryCheck::judged(
            "cone_gradient_identity",
            cone_gradient,
            exact_tol,
        ));
        checks.push(GeometryCheck::judged(
            "cone_gradient_norm",
            cone_norm,
            exact_tol,
        ));
        checks.push(GeometryCheck::judged(
            "cone_barrier_harmonic",
            cone_harmonic,
            exact_tol,
        ));
        checks.push(GeometryCheck::judged(
            "cone_log_homogeneity",
            cone_homogeneity,
            exact_tol,
        ));
    } else {
        checks.push(GeometryCheck::skipped("cone_gradient_identity", exact_tol));
        checks.push(GeometryCheck::skipped("cone_gradient_norm", exact_tol));
        checks.push(GeometryCheck::skipped("cone_barrier_harmonic", exact_tol));
        checks.push(GeometryCheck::skipped("cone_log_homogeneity", exact_tol));
    }
    let verdict = checks.iter().all(|c| c.status != "fail");
    Ok(GeometryCertificate {
        geometry: name.into(),
        dim,
        points,
        seed,
        exact_tolerance: exact_tol,
        fd_tolerance: fd_tol,
        checks,
        verdict,
    })
}

/// Shared knobs for the simulation-backed suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub beta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub seed: u64,
}

impl SuiteParams {
    fn config(&self, seed: u64) -> SimulationConfig {
        SimulationConfig::new(self.beta, self.dt, self.horizon, seed)
            .with_replicas(self.replicas)
    }

    fn json(&self, seed: u64, extra: &[(&str, serde_json::Value)]) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("beta".into(), serde_json::json!(self.beta));
        map.insert("dt".into(), serde_json::json!(self.dt));
        map.insert("horizon".into(), serde_json::json!(self.horizon));
        map.insert("replicas".into(), serde_json::json!(self.replicas));
        map.insert("seed".into(), serde_json::json!(seed));
        for (k, v) in extra {
            map.insert((*k).into(), v.clone());
        }
        serde_json::Value::Object(map)
    }
}

fn center_start(geometry: &dyn BarrierGeometry) -> Result<InteriorPoint, VerifyError> {
    let center = geometry.center_point().ok_or_else(|| {
        VerifyError::Analysis(AnalysisError::Unsupported(
            "geometry has no canonical starting point".into(),
        ))
    })?;
    Ok(InteriorPoint::new(geometry, center)?)
}

/// For cone geometries the scaled barrier u = sqrt(beta/n) (F(X_t) -
/// F(X_0)) is a standard Brownian motion under the metric dynamics;
/// checks drift 0, quadratic-variation rate 1, and Gaussian increments.
pub fn scaled_barrier_suite(
    kind: GeometryKind,
    dim: usize,
    params: &SuiteParams,
) -> Result<StatReport, VerifyError> {
    let geometry = kind.build(dim)?;
    if !geometry.is_cone() {
        return Err(VerifyError::Analysis(AnalysisError::Unsupported(format!(
            "the scaled-barrier law needs the cone identities; {kind} is not a cone"
        ))));
    }
    let start = center_start(geometry.as_ref())?;
    let scale = (params.beta / dim as f64).sqrt();
    with_retry(params.seed, |seed| {
        let ensemble = simulate_bm(geometry.as_ref(), &start, &params.config(seed))?;
        let mut paths = Vec::with_capacity(ensemble.len());
        for path in ensemble.paths() {
            let raw = observable_path(path, |state| {
                let v = geometry.barrier(&DVector::from_column_slice(state));
                v.is_finite().then_some(v)
            })?;
            let f0 = raw.first();
            paths.push(raw.map(|v| scale * (v - f0)));
        }
        bm_conformance_test(
            &format!("{kind}_scaled_barrier"),
            &paths,
            BmExpectation {
                drift: 0.0,
                qv_rate: 1.0,
            },
            params.json(seed, &[("geometry", serde_json::json!(kind.to_string())),
                                ("dim", serde_json::json!(dim))]),
        )
        .map_err(VerifyError::from)
    })
}

fn log_suite_impl<G: ExactChart>(
    geometry: &G,
    name: &str,
    scheme: Scheme,
    params: &SuiteParams,
    config: impl Fn(u64) -> serde_json::Value,
) -> Result<StatReport, VerifyError> {
    let start = center_start(geometry)?;
    let dim = geometry.dim();
    with_retry(params.seed, |seed| {
        let cfg = params.config(seed).with_scheme(scheme);
        let ensemble = match scheme {
            Scheme::EulerMaruyama => simulate_bm(geometry, &start, &cfg)?,
            Scheme::ExactTransform => exact_transform_bm(geometry, &start, &cfg)?,
        };
        // Every chart coordinate of every replica is an independent
        // Brownian motion with variance rate 1/beta; pool them.
        let mut paths: Vec<ScalarPath> = Vec::with_capacity(ensemble.len() * dim);
        for path in ensemble.paths() {
            for i in 0..dim {
                paths.push(observable_path(path, |state| {
                    let y = geometry.to_chart(&DVector::from_column_slice(state));
                    y[i].is_finite().then_some(y[i])
                })?);
            }
        }
        bm_conformance_test(
            name,
            &paths,
            BmExpectation {
                drift: 0.0,
                qv_rate: 1.0 / params.beta,
            },
            config(seed),
        )
        .map_err(VerifyError::from)
    })
}

/// The flat-chart coordinates (log x^i on the orthant,
/// log tan(pi x^i / 2) on the cube) are independent scalar Brownian
/// motions with variance rate 1/beta; checks drift, QV and normality
/// under either integrator.
pub fn log_coordinate_suite(
    kind: GeometryKind,
    dim: usize,
    scheme: Scheme,
    params: &SuiteParams,
) -> Result<StatReport, VerifyError> {
    let scheme_tag = match scheme {
        Scheme::EulerMaruyama => "em",
        Scheme::ExactTransform => "exact",
    };
    let extra = move |seed: u64| {
        params.json(
            seed,
            &[
                ("geometry", serde_json::json!(kind.to_string())),
                ("dim", serde_json::json!(dim)),
                ("scheme", serde_json::json!(scheme_tag)),
            ],
        )
    };
    match kind {
        GeometryKind::Orthant => {
            let geometry = OrthantGeometry::new(dim)?;
            log_suite_impl(
                &geometry,
                &format!("orthant_log_coordinates_{scheme_tag}"),
                scheme,
                params,
                extra,
            )
        }
        GeometryKind::Cube => {
            let geometry = CubeGeometry::new(dim)?;
            log_suite_impl(
                &geometry,
                &format!("cube_log_tan_coordinates_{scheme_tag}"),
                scheme,
                params,
                extra,
            )
        }
        GeometryKind::Lorentz => Err(VerifyError::Analysis(AnalysisError::Unsupported(
            "the Lorentz cone has no flat product chart".into(),
        ))),
    }
}

/// Light-ray observable suite on the Lorentz cone (drift, QV and
/// cross-covariation laws at beta = 2).
pub fn light_ray_suite(ambient: usize, params: &SuiteParams) -> Result<StatReport, VerifyError> {
    let geometry = LorentzGeometry::new(ambient)?;
    let start = center_start(&geometry)?;
    with_retry(params.seed, |seed| {
        let ensemble = simulate_bm(&geometry, &start, &params.config(seed))?;
        lorentz_theorem_test(
            &geometry,
            &ensemble,
            params.beta,
            params.json(seed, &[("geometry", serde_json::json!("lorentz")),
                                ("ambient_dim", serde_json::json!(ambient))]),
        )
        .map_err(VerifyError::from)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates_pass_for_all_builtin_geometries() {
        for (kind, dim) in [
            (GeometryKind::Orthant, 3),
            (GeometryKind::Cube, 2),
            (GeometryKind::Lorentz, 4),
        ] {
            let geometry = kind.build(dim).unwrap();
            let cert = certify_geometry(geometry.as_ref(), &kind.to_string(), 25, 11, 1e-8, 1e-4)
                .unwrap();
            assert!(
                cert.verdict,
                "{kind} failed: {:?}",
                cert.checks
                    .iter()
                    .filter(|c| c.status == "fail")
                    .collect::<Vec<_>>()
            );
            let skipped = cert.checks.iter().filter(|c| c.status == "skipped").count();
            if kind == GeometryKind::Cube {
                assert_eq!(skipped, 4, "cone identities must be skipped on the cube");
            } else {
                assert_eq!(skipped, 0);
            }
        }
    }

    #[test]
    fn log_suite_rejects_lorentz() {
        let params = SuiteParams {
            beta: 1.0,
            dt: 1e-2,
            horizon: 0.1,
            replicas: 64,
            seed: 0,
        };
        assert!(log_coordinate_suite(GeometryKind::Lorentz, 3, Scheme::EulerMaruyama, &params)
            .is_err());
    }
}
