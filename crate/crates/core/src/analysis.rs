//! Path statistics and the statistical verification suites: scalar
//! observables along trajectories, realized (co)variation, Brownian
//! conformance tests, the light-cone observable suite, and stationary
//! histogram checks against Gibbs densities.

use crate::cones::{lorentz_sigma, LightVector, LorentzGeometry};
use crate::cones::{lorentz_aux_value, lorentz_radial_value};
use crate::error::AnalysisError;
use crate::geometry::BarrierGeometry;
use crate::sde::{Ensemble, EnergySpec, Path};
use crate::stats;
use serde::Serialize;

/// Minimum ensemble size for the statistical suites; below this the
/// normal-approximation error bars are not trustworthy.
pub const MIN_REPLICAS: usize = 64;

/// Significance level shared by the distributional sub-checks.
pub const P_VALUE_FLOOR: f64 = 0.01;

/// A scalar observable sampled on the same uniform grid as a [`Path`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPath {
    dt: f64,
    values: Vec<f64>,
}

impl ScalarPath {
    pub fn from_values(dt: f64, values: Vec<f64>) -> Self {
        assert!(dt > 0.0 && !values.is_empty());
        Self { dt, values }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("non-empty by construction")
    }

    pub fn horizon(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ScalarPath {
        ScalarPath {
            dt: self.dt,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    fn grid_matches(&self, other: &ScalarPath) -> bool {
        self.dt == other.dt && self.len() == other.len()
    }
}

/// Evaluates an observable along a path. The closure returns `None`
/// (or a non-finite value) to signal failure, reported with its step.
pub fn observable_path<F>(path: &Path, f: F) -> Result<ScalarPath, AnalysisError>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let mut values = Vec::with_capacity(path.len());
    for k in 0..path.len() {
        match f(path.state(k)) {
            Some(v) if v.is_finite() => values.push(v),
            _ => return Err(AnalysisError::EvaluationFailed { step: k }),
        }
    }
    Ok(ScalarPath {
        dt: path.dt(),
        values,
    })
}

/// Cumulative realized covariation sum_{j<k} (p_{j+1}-p_j)(q_{j+1}-q_j),
/// on the same grid with value 0 at t = 0.
pub fn realized_covariation(
    p: &ScalarPath,
    q: &ScalarPath,
) -> Result<ScalarPath, AnalysisError> {
    if !p.grid_matches(q) {
        return Err(AnalysisError::GridMismatch);
    }
    let mut values = Vec::with_capacity(p.len());
    values.push(0.0);
    // Kahan-compensated running sum.
    let mut sum = 0.0;
    let mut c = 0.0;
    for k in 1..p.len() {
        let term = (p.values[k] - p.values[k - 1]) * (q.values[k] - q.values[k - 1]);
        let y = term - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
        values.push(sum);
    }
    Ok(ScalarPath { dt: p.dt, values })
}

/// Cumulative realized quadratic variation of a scalar path.
pub fn realized_qv(p: &ScalarPath) -> ScalarPath {
    realized_covariation(p, p).expect("a path always matches its own grid")
}

/// One named sub-check of a statistical report.
#[derive(Debug, Clone, Serialize)]
pub struct StatCheck {
    pub test: String,
    pub estimate: f64,
    pub stderr: f64,
    pub expected: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_p: Option<f64>,
    pub verdict: bool,
}

impl StatCheck {
    /// Mean-style check: passes when the estimate is within three
    /// standard errors of the expectation.
    fn three_sigma(test: impl Into<String>, values: &[f64], expected: f64) -> Self {
        let estimate = stats::mean(values);
        let stderr = stats::stderr_of_mean(values);
        let verdict = if stderr > 0.0 {
            (estimate - expected).abs() <= 3.0 * stderr
        } else {
            estimate == expected
        };
        Self {
            test: test.into(),
            estimate,
            stderr,
            expected,
            ks_p: None,
            verdict,
        }
    }
}

/// A bundle of sub-checks; `verdict` is the conjunction.
#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub name: String,
    pub checks: Vec<StatCheck>,
    pub verdict: bool,
    pub config: serde_json::Value,
}

impl StatReport {
    pub fn new(name: impl Into<String>, checks: Vec<StatCheck>, config: serde_json::Value) -> Self {
        let verdict = checks.iter().all(|c| c.verdict);
        Self {
            name: name.into(),
            checks,
            verdict,
            config,
        }
    }

    pub fn check(&self, test: &str) -> Option<&StatCheck> {
        self.checks.iter().find(|c| c.test == test)
    }
}

/// Statistical suites are randomized; a true null still fails ~once per
/// hundred runs at our significance floor. This driver reruns a failing
/// suite once with the successor seed and returns that outcome, recording
/// the retry in the report config.
pub fn with_retry<E, F>(seed: u64, mut run: F) -> Result<StatReport, E>
where
    F: FnMut(u64) -> Result<StatReport, E>,
{
    let first = run(seed)?;
    if first.verdict {
        return Ok(first);
    }
    let mut second = run(seed + 1)?;
    if let serde_json::Value::Object(map) = &mut second.config {
        map.insert("retried_from_seed".into(), serde_json::json!(seed));
    }
    Ok(second)
}

/// Expected law of a scalar observable path under the time-changed
/// dynamics: linear drift and linear quadratic-variation growth.
#[derive(Debug, Clone, Copy)]
pub struct BmExpectation {
    pub drift: f64,
    pub qv_rate: f64,
}

/// Tests that scalar observable paths behave like Brownian motion with
/// the given drift and quadratic-variation rate:
///
/// 1. per-replica terminal drift (f(T) - f(0))/T, 3-sigma around the
///    expected drift;
/// 2. per-replica terminal realized QV over T, 3-sigma around the rate;
/// 3. KS test of standardized increments over ~0.1-time-unit blocks,
///    pooled across replicas, at significance [`P_VALUE_FLOOR`].
pub fn bm_conformance_test(
    name: &str,
    paths: &[ScalarPath],
    expected: BmExpectation,
    config: serde_json::Value,
) -> Result<StatReport, AnalysisError> {
    if paths.len() < MIN_REPLICAS {
        return Err(AnalysisError::TooFewReplicas {
            got: paths.len(),
            need: MIN_REPLICAS,
        });
    }
    let first = &paths[0];
    if paths.iter().any(|p| !p.grid_matches(first)) {
        return Err(AnalysisError::GridMismatch);
    }
    if !expected.qv_rate.is_finite() || expected.qv_rate <= 0.0 {
        return Err(AnalysisError::Unsupported(
            "conformance testing needs a positive quadratic-variation rate".into(),
        ));
    }
    let horizon = first.horizon();

    let drifts: Vec<f64> = paths
        .iter()
        .map(|p| (p.last() - p.first()) / horizon)
        .collect();
    let qv_rates: Vec<f64> = paths
        .iter()
        .map(|p| realized_qv(p).last() / horizon)
        .collect();

    // Standardized block increments. Block length ~0.1 time units.
    let block_steps = ((0.1 / first.dt()).round() as usize).max(1);
    let tau = block_steps as f64 * first.dt();
    let sigma = (expected.qv_rate * tau).sqrt();
    let mut z = Vec::new();
    for p in paths {
        let mut k = block_steps;
        while k < p.len() {
            let inc = p.values[k] - p.values[k - block_steps];
            z.push((inc - expected.drift * tau) / sigma);
            k += block_steps;
        }
    }
    let (d, p_value) = stats::ks_test_standard_normal(&z);

    let checks = vec![
        StatCheck::three_sigma("drift", &drifts, expected.drift),
        StatCheck::three_sigma("qv_rate", &qv_rates, expected.qv_rate),
        StatCheck {
            test: "increment_normality_ks".into(),
            estimate: d,
            stderr: 0.0,
            expected: 0.0,
            ks_p: Some(p_value),
            verdict: p_value > P_VALUE_FLOOR,
        },
    ];
    Ok(StatReport::new(name, checks, config))
}

/// Verifies the light-cone observable laws on the Lorentz cone at
/// beta = 2: the radial observable drifts at 0 with QV rate 1/2, each
/// spatial light-ray observable f_i has QV rate 1/2 and drift mu(n),
/// and realized cross-covariations match the time integral of
/// (1/beta) <grad f_i, grad f_j>_g along the path (within 10% of
/// T/beta in absolute terms).
pub fn lorentz_theorem_test(
    geometry: &LorentzGeometry,
    ensemble: &Ensemble,
    beta: f64,
    config: serde_json::Value,
) -> Result<StatReport, AnalysisError> {
    if (beta - 2.0).abs() > 1e-12 {
        return Err(AnalysisError::WrongTemperature(beta));
    }
    if ensemble.len() < MIN_REPLICAS {
        return Err(AnalysisError::TooFewReplicas {
            got: ensemble.len(),
            need: MIN_REPLICAS,
        });
    }
    let ambient = geometry.dim();
    let spatial = geometry.spatial_dim();
    let rays: Vec<LightVector> = (0..spatial)
        .map(|k| LightVector::axis(ambient, k).expect("k < spatial dim"))
        .collect();

    // Observable paths per replica: index 0 is radial, 1..=n the rays.
    let mut obs: Vec<Vec<ScalarPath>> = Vec::with_capacity(ensemble.len());
    for path in ensemble.paths() {
        let mut per_replica = Vec::with_capacity(spatial + 1);
        per_replica.push(observable_path(path, |x| {
            let v = lorentz_radial_value(ambient, &nalgebra::DVector::from_column_slice(x));
            v.is_finite().then_some(v)
        })?);
        for ray in &rays {
            per_replica.push(observable_path(path, |x| {
                lorentz_aux_value(ray, &nalgebra::DVector::from_column_slice(x)).ok()
            })?);
        }
        obs.push(per_replica);
    }
    let horizon = obs[0][0].horizon();
    let dt = obs[0][0].dt();
    let replicas = ensemble.len();

    let mut checks = Vec::new();
    let terminal_drifts = |idx: usize| -> Vec<f64> {
        obs.iter()
            .map(|o| (o[idx].last() - o[idx].first()) / horizon)
            .collect()
    };
    let terminal_qv = |idx: usize| -> Vec<f64> {
        obs.iter()
            .map(|o| realized_qv(&o[idx]).last() / horizon)
            .collect()
    };

    let qv_expected = 1.0 / beta;
    checks.push(StatCheck::three_sigma(
        "radial_drift",
        &terminal_drifts(0),
        0.0,
    ));
    checks.push(StatCheck::three_sigma(
        "radial_qv_rate",
        &terminal_qv(0),
        qv_expected,
    ));
    let mu = crate::cones::lorentz_mu(spatial);
    for i in 0..spatial {
        checks.push(StatCheck::three_sigma(
            format!("ray{i}_drift"),
            &terminal_drifts(i + 1),
            mu,
        ));
        checks.push(StatCheck::three_sigma(
            format!("ray{i}_qv_rate"),
            &terminal_qv(i + 1),
            qv_expected,
        ));
    }

    // Cross-covariations between distinct rays: the ensemble mean of the
    // realized covariation must match the mean predicted integral within
    // 10% relative error (absolute floor guards a near-zero integral).
    for i in 0..spatial {
        for j in (i + 1)..spatial {
            let mut realized = Vec::with_capacity(replicas);
            let mut predicted = Vec::with_capacity(replicas);
            for o in &obs {
                let (fi, fj) = (&o[i + 1], &o[j + 1]);
                realized.push(realized_covariation(fi, fj)?.last());
                let integral = stats::kahan_sum((0..fi.len() - 1).map(|k| {
                    lorentz_sigma(&rays[i], &rays[j], fi.value(k), fj.value(k)) / beta * dt
                }));
                predicted.push(integral);
            }
            let est = stats::mean(&realized);
            let exp = stats::mean(&predicted);
            let diffs: Vec<f64> = realized
                .iter()
                .zip(&predicted)
                .map(|(r, p)| r - p)
                .collect();
            let tolerance = (0.1 * exp.abs()).max(1e-3 * horizon / beta);
            checks.push(StatCheck {
                test: format!("ray{i}_ray{j}_covariation"),
                estimate: est,
                stderr: stats::stderr_of_mean(&diffs),
                expected: exp,
                ks_p: None,
                verdict: (est - exp).abs() <= tolerance,
            });
        }
    }

    Ok(StatReport::new("lorentz_light_ray_suite", checks, config))
}

/// How to bin and judge a stationary histogram comparison.
#[derive(Debug, Clone, Copy)]
pub struct HistogramSpec {
    pub bins: usize,
    pub tv_tolerance: f64,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self {
            bins: 20,
            tv_tolerance: 0.05,
        }
    }
}

/// Compares endpoint samples of a 1-d geometry against the Gibbs density
/// proportional to exp(-beta E) sqrt(det g). The target is normalized by
/// quadrature; a divergent normalizer is reported as
/// [`AnalysisError::NonNormalizable`]. Checks: total-variation distance
/// between the empirical and target bin masses, and a chi-squared
/// goodness-of-fit p-value.
pub fn stationary_histogram_test<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    energy: Option<&EnergySpec>,
    beta: f64,
    endpoints: &[f64],
    spec: HistogramSpec,
    config: serde_json::Value,
) -> Result<StatReport, AnalysisError> {
    let table = stationary_histogram_table(geometry, energy, beta, endpoints, spec.bins)?;
    Ok(histogram_conformance(&table, spec, config))
}

/// Binned endpoint counts next to the integrated target masses.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramTable {
    /// bins + 1 coordinate edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// counts / n.
    pub empirical: Vec<f64>,
    /// Integrated normalized target mass per bin.
    pub target: Vec<f64>,
}

impl HistogramTable {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn samples(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Bins endpoints against the normalized stationary target
/// e^{-beta E} sqrt(det g) on the geometry's coordinate interval.
pub fn stationary_histogram_table<G: BarrierGeometry + ?Sized>(
    geometry: &G,
    energy: Option<&EnergySpec>,
    beta: f64,
    endpoints: &[f64],
    bins: usize,
) -> Result<HistogramTable, AnalysisError> {
    if geometry.dim() != 1 {
        return Err(AnalysisError::Unsupported(format!(
            "histogram test is 1-d only, geometry has dimension {}",
            geometry.dim()
        )));
    }
    if bins < 2 {
        return Err(AnalysisError::Unsupported("need at least two bins".into()));
    }
    if endpoints.len() < MIN_REPLICAS {
        return Err(AnalysisError::TooFewReplicas {
            got: endpoints.len(),
            need: MIN_REPLICAS,
        });
    }
    let (lo, hi) = geometry.coordinate_interval().ok_or_else(|| {
        AnalysisError::Unsupported("geometry does not expose a coordinate interval".into())
    })?;

    // The canonical barriers satisfy F = (1/2) log det g, so the target
    // e^{-beta E} sqrt(det g) equals exp(F - beta E). Evaluating in log
    // space survives the extreme near-boundary abscissas the quadrature
    // visits, where the metric itself overflows. Guard the identity at
    // one generic point so a non-normalized geometry is rejected.
    let probe = if hi.is_finite() {
        lo + 0.382 * (hi - lo)
    } else {
        lo + 1.382
    };
    let probe_v = nalgebra::DVector::from_element(1, probe);
    let probe_gap =
        geometry.barrier(&probe_v) - 0.5 * geometry.metric(&probe_v)[(0, 0)].ln();
    if probe_gap.abs() > 1e-8 {
        return Err(AnalysisError::Unsupported(
            "histogram target needs the log-det barrier normalization".into(),
        ));
    }
    let density = |x: f64| {
        let xv = nalgebra::DVector::from_element(1, x);
        let e = energy.map_or(0.0, |en| en.value(geometry, &xv));
        (geometry.barrier(&xv) - beta * e).exp()
    };

    let normalizer = if hi.is_finite() {
        quadrature::tanh_sinh(&density, lo, hi)?
    } else {
        quadrature::half_line(&density)?
    };
    if !hi.is_finite() {
        return Err(AnalysisError::Unsupported(
            "histogram binning needs a bounded interval".into(),
        ));
    }

    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for x in endpoints {
        if !(*x > lo && *x < hi) {
            return Err(AnalysisError::Unsupported(format!(
                "endpoint {x} outside the domain ({lo}, {hi})"
            )));
        }
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = endpoints.len() as f64;
    let edges: Vec<f64> = (0..=bins).map(|b| lo + b as f64 * width).collect();
    let mut target = Vec::with_capacity(bins);
    for b in 0..bins {
        target.push(quadrature::tanh_sinh(&density, edges[b], edges[b + 1])? / normalizer);
    }
    let empirical = counts.iter().map(|c| *c as f64 / n).collect();
    Ok(HistogramTable {
        edges,
        counts,
        empirical,
        target,
    })
}

/// Total-variation and chi-squared conformance of a binned sample
/// against its target masses.
pub fn histogram_conformance(
    table: &HistogramTable,
    spec: HistogramSpec,
    config: serde_json::Value,
) -> StatReport {
    let n = table.samples() as f64;
    let tv = 0.5
        * stats::kahan_sum(
            table
                .empirical
                .iter()
                .zip(&table.target)
                .map(|(e, q)| (e - q).abs()),
        );
    let expected_counts: Vec<f64> = table.target.iter().map(|q| q * n).collect();
    let (chi2, p) = stats::chi_squared_gof(&table.counts, &expected_counts);

    let checks = vec![
        StatCheck {
            test: "tv_distance".into(),
            estimate: tv,
            stderr: 0.0,
            expected: 0.0,
            ks_p: None,
            verdict: tv < spec.tv_tolerance,
        },
        StatCheck {
            test: "chi_squared".into(),
            estimate: chi2,
            stderr: 0.0,
            expected: (table.bins() - 1) as f64,
            ks_p: Some(p),
            verdict: p > P_VALUE_FLOOR,
        },
    ];
    StatReport::new("stationary_histogram", checks, config)
}

/// Double-exponential (tanh-sinh) quadrature, with divergence detection
/// tuned for densities with power-law endpoint behavior.
mod quadrature {
    use crate::error::AnalysisError;

    const T_MAX: f64 = 6.0;
    const LEVELS: usize = 7;

    /// Integrates f over (a, b). Endpoint singularities that are
    /// integrable (|f| ~ d^{-k}, k < 1, d the boundary distance) converge;
    /// non-integrable ones are reported as `NonNormalizable`.
    pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64, AnalysisError> {
        let half = 0.5 * (b - a);
        let mut previous = f64::NAN;
        let mut h = 1.5;
        for level in 0..LEVELS {
            let steps = (T_MAX / h).floor() as i64;
            let mut sum = 0.0;
            let mut comp = 0.0;
            let mut max_tail = 0.0f64;
            for j in -steps..=steps {
                let t = j as f64 * h;
                let u = std::f64::consts::FRAC_PI_2 * t.sinh();
                // Node position measured from its nearer endpoint so that
                // near-boundary abscissas keep full precision:
                // 1 - tanh|u| = 2q/(1+q) with q = exp(-2|u|).
                let q = (-2.0 * u.abs()).exp();
                let offset = (b - a) * q / (1.0 + q);
                let x = if t >= 0.0 { b - offset } else { a + offset };
                // sech^2(u) = 4q/(1+q)^2, overflow-free for any u.
                let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() * 4.0 * q
                    / ((1.0 + q) * (1.0 + q));
                if !(x > a && x < b) || w == 0.0 {
                    continue;
                }
                let term = f(x) * w;
                if !term.is_finite() {
                    return Err(AnalysisError::NonNormalizable(format!(
                        "integrand not finite near x = {x}"
                    )));
                }
                if t.abs() > T_MAX - 1.0 {
                    max_tail = max_tail.max(term.abs());
                }
                let y = term * h - comp;
                let s = sum + y;
                comp = (s - sum) - y;
                sum = s;
            }
            if level >= 2 && (sum - previous).abs() <= 1e-10 * sum.abs().max(1e-30) {
                if max_tail * h > 1e-6 * sum.abs().max(1e-30) {
                    return Err(AnalysisError::NonNormalizable(
                        "endpoint contributions do not decay".into(),
                    ));
                }
                return Ok(sum);
            }
            previous = sum;
            h *= 0.5;
        }
        Err(AnalysisError::NonNormalizable(
            "quadrature did not stabilize (integral likely divergent)".into(),
        ))
    }

    /// Integral over (0, infinity) via the exp-sinh substitution
    /// x = exp((pi/2) sinh t). The log-spaced abscissas resolve both an
    /// integrable singularity at 0 and decay at infinity; persistent
    /// endpoint mass (a non-normalizable density) is reported as an
    /// error.
    pub fn half_line<F: Fn(f64) -> f64>(f: &F) -> Result<f64, AnalysisError> {
        let mut previous = f64::NAN;
        let mut h = 1.5;
        for level in 0..LEVELS {
            let steps = (T_MAX / h).floor() as i64;
            let mut sum = 0.0;
            let mut comp = 0.0;
            let mut max_tail = 0.0f64;
            for j in -steps..=steps {
                let t = j as f64 * h;
                let u = std::f64::consts::FRAC_PI_2 * t.sinh();
                let x = u.exp();
                let w = std::f64::consts::FRAC_PI_2 * t.cosh() * x;
                if x == 0.0 || !x.is_finite() {
                    continue;
                }
                let term = f(x) * w;
                if !term.is_finite() {
                    return Err(AnalysisError::NonNormalizable(format!(
                        "integrand not finite near x = {x}"
                    )));
                }
                if t.abs() > T_MAX - 1.0 {
                    max_tail = max_tail.max(term.abs());
                }
                let y = term * h - comp;
                let s = sum + y;
                comp = (s - sum) - y;
                sum = s;
            }
            if level >= 2 && (sum - previous).abs() <= 1e-10 * sum.abs().max(1e-30) {
                if max_tail * h > 1e-6 * sum.abs().max(1e-30) {
                    return Err(AnalysisError::NonNormalizable(
                        "mass keeps accumulating toward 0 or infinity".into(),
                    ));
                }
                return Ok(sum);
            }
            previous = sum;
            h *= 0.5;
        }
        Err(AnalysisError::NonNormalizable(
            "quadrature did not stabilize (integral likely divergent)".into(),
        ))
    }
}
