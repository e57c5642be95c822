//! Experiment runner for barrier-geometry diffusions: certifies the
//! closed-form geometry identities, runs the Monte Carlo theorem suites,
//! integrates sample paths, compares Gibbs endpoints against their
//! stationary target, and traces central paths.
//!
//! Every command prints a JSON envelope `{command, timestamp?, result}`
//! to stdout; bulk data (paths, histograms, path stages) goes to CSV via
//! `--out`. Exit codes: 0 all checks pass, 1 computational or test
//! failure, 2 usage or validation error.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use barrierlab::analysis::{
    histogram_conformance, stationary_histogram_table, HistogramSpec, HistogramTable,
};
use barrierlab::centralpath::{solve_conic, stages_summary, write_stages_csv, ConicProgram};
use barrierlab::config::{parse_float_list, parse_key_values};
use barrierlab::error::{AnalysisError, SimError, SolveError, VerifyError};
use barrierlab::report;
use barrierlab::sde::{sample_endpoints, write_paths_csv};
use barrierlab::verify::{
    certify_geometry, light_ray_suite, log_coordinate_suite, scaled_barrier_suite, SuiteParams,
};
use barrierlab::{
    exact_transform_bm, simulate_rle, BarrierGeometry, CubeGeometry, EnergySpec, Ensemble,
    GeometryKind, InteriorPoint, OrthantGeometry, Scheme, SimulationConfig,
};
use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

#[derive(Parser)]
#[command(
    name = "barrierlab",
    version,
    about = "Brownian motion, Langevin sampling and central paths on Hessian barrier geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify closed-form geometry identities at sampled interior points
    VerifyGeometry(VerifyGeometryArgs),
    /// Run the Monte Carlo theorem suites for one geometry
    VerifyTheorems(VerifyTheoremsArgs),
    /// Integrate replica paths and write them as CSV
    Simulate(SimulateArgs),
    /// Sample Langevin endpoints and compare with the Gibbs target
    Gibbs(GibbsArgs),
    /// Trace the central path of a conic program
    CentralPath(CentralPathArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Geometry name: orthant | cube | lorentz
    #[arg(long)]
    geometry: Option<String>,
    /// Coordinate dimension (ambient dimension for lorentz)
    #[arg(long)]
    dim: Option<usize>,
    /// Flat key=value file supplying defaults; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Omit the timestamp from the JSON envelope (for byte-exact reruns)
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct SimFlags {
    /// Inverse temperature
    #[arg(long)]
    beta: Option<f64>,
    /// Integrator step
    #[arg(long)]
    dt: Option<f64>,
    /// Time horizon
    #[arg(long)]
    horizon: Option<f64>,
    /// Number of replicas
    #[arg(long)]
    replicas: Option<usize>,
    /// Master seed; replica k uses stream k
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyGeometryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of sampled interior points
    #[arg(long)]
    points: Option<usize>,
    /// Sampling seed
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for closed-form identities
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance for finite-difference cross-checks
    #[arg(long)]
    fd_tol: Option<f64>,
    /// Also write the JSON certificate to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyTheoremsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    sim: SimFlags,
    /// Also write the JSON reports to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    sim: SimFlags,
    /// Integrator: em | exact
    #[arg(long)]
    scheme: Option<String>,
    /// Energy spec: linear:c=..., quadratic:m=...,q=..., barrier:alpha=...
    #[arg(long)]
    energy: Option<String>,
    /// Starting point as a comma-separated list (default: geometry center)
    #[arg(long)]
    start: Option<String>,
    /// Paths CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a two-column time/first-coordinate file next to --out
    #[arg(long)]
    plot_data: bool,
}

#[derive(Args)]
struct GibbsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    sim: SimFlags,
    /// Energy spec; omitting it means E = 0 (usually non-normalizable)
    #[arg(long)]
    energy: Option<String>,
    /// Starting point as a comma-separated list (default: geometry center)
    #[arg(long)]
    start: Option<String>,
    /// Number of histogram bins
    #[arg(long)]
    bins: Option<usize>,
    /// Total-variation tolerance for the verdict
    #[arg(long)]
    tv_tol: Option<f64>,
    /// Histogram CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a two-column bin-center/empirical-mass file next to --out
    #[arg(long)]
    plot_data: bool,
}

#[derive(Args)]
struct CentralPathArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Cost vector as a comma-separated list
    #[arg(long)]
    cost: Option<String>,
    /// Largest path parameter; stages double from theta = 1
    #[arg(long)]
    theta_max: Option<f64>,
    /// Newton-decrement tolerance per stage
    #[arg(long)]
    tol: Option<f64>,
    /// Starting point as a comma-separated list (default: geometry center)
    #[arg(long)]
    start: Option<String>,
    /// Stage CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a two-column theta/objective file next to --out
    #[arg(long)]
    plot_data: bool,
}

/// Exit-code carrier: usage/validation problems exit 2, computational
/// failures exit 1.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::StepFailure { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::NonNormalizable(_) | AnalysisError::EvaluationFailed { .. } => {
                CliError::Failure(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Geometry(_) | SolveError::DualCone(_) | SolveError::InvalidArgument(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Geometry(g) => CliError::Usage(g.to_string()),
            VerifyError::Sim(s) => s.into(),
            VerifyError::Analysis(a) => a.into(),
        }
    }
}

fn io_failure(context: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Failure(format!("{context}: {e}"))
}

/// Key=value defaults loaded from `--config`; keys are flag names with
/// `-` and `_` treated alike.
struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(p) = path else {
            return Ok(Self(BTreeMap::new()));
        };
        let text = fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
        let map = parse_key_values(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
        Ok(Self(
            map.into_iter()
                .map(|(k, v)| (k.replace('-', "_"), v))
                .collect(),
        ))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key} = {raw:?}: {e}"))),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn resolve<T: FromStr>(flag: Option<T>, cfg: &FileConfig, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(cfg.get(key)?.unwrap_or(default)),
    }
}

fn require<T: FromStr>(flag: Option<T>, cfg: &FileConfig, key: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => cfg.get(key)?.ok_or_else(|| {
            CliError::Usage(format!("missing required option --{}", key.replace('_', "-")))
        }),
    }
}

/// Geometry selection plus simulation knobs shared by the sampling
/// commands, resolved from flags, config file, and defaults.
struct Resolved {
    kind: GeometryKind,
    dim: usize,
    geometry: Box<dyn BarrierGeometry>,
    timestamp: Option<u64>,
}

fn resolve_geometry(common: &CommonArgs, cfg: &FileConfig) -> Result<Resolved, CliError> {
    let name: String = require(common.geometry.clone(), cfg, "geometry")?;
    let kind = GeometryKind::from_str(&name).map_err(CliError::Usage)?;
    let dim = require(common.dim, cfg, "dim")?;
    let geometry = kind.build(dim).map_err(|e| CliError::Usage(e.to_string()))?;
    let timestamp = (!common.no_timestamp).then(report::now_unix);
    Ok(Resolved {
        kind,
        dim,
        geometry,
        timestamp,
    })
}

fn resolve_sim(sim: &SimFlags, cfg: &FileConfig, horizon_default: f64, replicas_default: usize) -> Result<SuiteParams, CliError> {
    Ok(SuiteParams {
        beta: resolve(sim.beta, cfg, "beta", 1.0)?,
        dt: resolve(sim.dt, cfg, "dt", 1e-3)?,
        horizon: resolve(sim.horizon, cfg, "horizon", horizon_default)?,
        replicas: resolve(sim.replicas, cfg, "replicas", replicas_default)?,
        seed: resolve(sim.seed, cfg, "seed", 42)?,
    })
}

fn resolve_energy(
    flag: Option<&String>,
    cfg: &FileConfig,
    dim: usize,
) -> Result<Option<EnergySpec>, CliError> {
    let text = match flag {
        Some(t) => Some(t.as_str()),
        None => cfg.raw("energy"),
    };
    let Some(text) = text else { return Ok(None) };
    let spec = EnergySpec::from_str(text)
        .map_err(|e| CliError::Usage(format!("--energy {text:?}: {e}")))?;
    spec.validate(dim)
        .map_err(|e| CliError::Usage(format!("--energy {text:?}: {e}")))?;
    Ok(Some(spec))
}

fn resolve_start(
    flag: Option<&String>,
    cfg: &FileConfig,
    geometry: &dyn BarrierGeometry,
) -> Result<InteriorPoint, CliError> {
    let text = match flag {
        Some(t) => Some(t.as_str()),
        None => cfg.raw("start"),
    };
    let coords = match text {
        Some(t) => DVector::from_vec(
            parse_float_list(t).map_err(|e| CliError::Usage(format!("--start {t:?}: {e}")))?,
        ),
        None => geometry.center_point().ok_or_else(|| {
            CliError::Usage("geometry has no default starting point; pass --start".into())
        })?,
    };
    InteriorPoint::new(geometry, coords).map_err(|e| CliError::Usage(format!("--start: {e}")))
}

fn parse_scheme(flag: Option<&String>, cfg: &FileConfig) -> Result<Scheme, CliError> {
    let text = match flag {
        Some(t) => t.as_str(),
        None => cfg.raw("scheme").unwrap_or("em"),
    };
    match text.trim().to_ascii_lowercase().as_str() {
        "em" | "euler-maruyama" => Ok(Scheme::EulerMaruyama),
        "exact" | "exact-transform" => Ok(Scheme::ExactTransform),
        other => Err(CliError::Usage(format!(
            "unknown scheme {other:?} (expected em or exact)"
        ))),
    }
}

fn print_envelope(env: &serde_json::Value) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    report::write_json(&mut stdout, env).map_err(io_failure("writing report to stdout"))
}

fn write_envelope_copy(env: &serde_json::Value, out: Option<&PathBuf>) -> Result<(), CliError> {
    if let Some(p) = out {
        let mut f = fs::File::create(p).map_err(io_failure(&format!("creating {}", p.display())))?;
        report::write_json(&mut f, env).map_err(io_failure(&format!("writing {}", p.display())))?;
    }
    Ok(())
}

fn plot_path(out: Option<&PathBuf>, enabled: bool) -> Result<Option<PathBuf>, CliError> {
    if !enabled {
        return Ok(None);
    }
    match out {
        Some(p) => Ok(Some(p.with_extension("plot"))),
        None => Err(CliError::Usage("--plot-data needs --out".into())),
    }
}

fn write_plot(
    path: &PathBuf,
    header: &str,
    rows: impl Iterator<Item = (f64, f64)>,
) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(io_failure(&format!("creating {}", path.display())))?;
    let write = |f: &mut fs::File, line: &str| {
        writeln!(f, "{line}").map_err(io_failure(&format!("writing {}", path.display())))
    };
    write(&mut f, &format!("# {header}"))?;
    for (a, b) in rows {
        write(&mut f, &format!("{a:.16e} {b:.16e}"))?;
    }
    Ok(())
}

fn cmd_verify_geometry(args: VerifyGeometryArgs) -> Result<bool, CliError> {
    let cfg = FileConfig::load(args.common.config.as_ref())?;
    let res = resolve_geometry(&args.common, &cfg)?;
    let points = resolve(args.points, &cfg, "points", 100)?;
    let seed = resolve(args.seed, &cfg, "seed", 42)?;
    let tol = resolve(args.tol, &cfg, "tol", 1e-8)?;
    let fd_tol = resolve(args.fd_tol, &cfg, "fd_tol", 1e-4)?;
    let cert = certify_geometry(
        res.geometry.as_ref(),
        &res.kind.to_string(),
        points,
        seed,
        tol,
        fd_tol,
    )
    .map_err(|e| CliError::Failure(e.to_string()))?;
    let env = report::envelope("verify-geometry", res.timestamp, &cert);
    print_envelope(&env)?;
    write_envelope_copy(&env, args.out.as_ref())?;
    Ok(cert.verdict)
}

fn cmd_verify_theorems(args: VerifyTheoremsArgs) -> Result<bool, CliError> {
    let cfg = FileConfig::load(args.common.config.as_ref())?;
    let res = resolve_geometry(&args.common, &cfg)?;
    let params = resolve_sim(&args.sim, &cfg, 10.0, 256)?;
    let mut reports = Vec::new();
    match res.kind {
        GeometryKind::Orthant => {
            reports.push(scaled_barrier_suite(res.kind, res.dim, &params)?);
            reports.push(log_coordinate_suite(
                res.kind,
                res.dim,
                Scheme::EulerMaruyama,
                &params,
            )?);
            reports.push(log_coordinate_suite(
                res.kind,
                res.dim,
                Scheme::ExactTransform,
                &params,
            )?);
        }
        GeometryKind::Cube => {
            reports.push(log_coordinate_suite(
                res.kind,
                res.dim,
                Scheme::EulerMaruyama,
                &params,
            )?);
            reports.push(log_coordinate_suite(
                res.kind,
                res.dim,
                Scheme::ExactTransform,
                &params,
            )?);
        }
        GeometryKind::Lorentz => {
            if (params.beta - 2.0).abs() > 1e-12 {
                return Err(CliError::Usage(format!(
                    "the light-ray laws are stated at inverse temperature beta = 2; got beta = {}",
                    params.beta
                )));
            }
            reports.push(scaled_barrier_suite(res.kind, res.dim, &params)?);
            reports.push(light_ray_suite(res.dim, &params)?);
        }
    }
    let verdict = reports.iter().all(|r| r.verdict);
    let body = serde_json::json!({ "reports": reports, "verdict": verdict });
    let env = report::envelope("verify-theorems", res.timestamp, &body);
    print_envelope(&env)?;
    write_envelope_copy(&env, args.out.as_ref())?;
    Ok(verdict)
}

fn run_exact(
    kind: GeometryKind,
    dim: usize,
    start: &InteriorPoint,
    config: &SimulationConfig,
) -> Result<Ensemble, CliError> {
    match kind {
        GeometryKind::Orthant => {
            let g = OrthantGeometry::new(dim).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(exact_transform_bm(&g, start, config)?)
        }
        GeometryKind::Cube => {
            let g = CubeGeometry::new(dim).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(exact_transform_bm(&g, start, config)?)
        }
        GeometryKind::Lorentz => Err(CliError::Usage(
            "the exact-transform sampler needs a flat product chart; lorentz has none".into(),
        )),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<bool, CliError> {
    let cfg = FileConfig::load(args.common.config.as_ref())?;
    let res = resolve_geometry(&args.common, &cfg)?;
    let params = resolve_sim(&args.sim, &cfg, 10.0, 256)?;
    let scheme = parse_scheme(args.scheme.as_ref(), &cfg)?;
    let energy = resolve_energy(args.energy.as_ref(), &cfg, res.dim)?;
    let start = resolve_start(args.start.as_ref(), &cfg, res.geometry.as_ref())?;
    let sim_config = SimulationConfig::new(params.beta, params.dt, params.horizon, params.seed)
        .with_replicas(params.replicas)
        .with_scheme(scheme);

    let ensemble = match scheme {
        Scheme::EulerMaruyama => {
            simulate_rle(res.geometry.as_ref(), energy.as_ref(), &start, &sim_config)?
        }
        Scheme::ExactTransform => {
            if energy.is_some() {
                return Err(CliError::Usage(
                    "the exact-transform sampler integrates barrier Brownian motion only; drop --energy".into(),
                ));
            }
            run_exact(res.kind, res.dim, &start, &sim_config)?
        }
    };

    match args.out.as_ref() {
        Some(p) => {
            let mut f =
                fs::File::create(p).map_err(io_failure(&format!("creating {}", p.display())))?;
            write_paths_csv(&mut f, &ensemble)
                .map_err(io_failure(&format!("writing {}", p.display())))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            write_paths_csv(&mut stdout, &ensemble).map_err(io_failure("writing CSV to stdout"))?;
        }
    }
    if let Some(plot) = plot_path(args.out.as_ref(), args.plot_data)? {
        let first = &ensemble.paths()[0];
        write_plot(
            &plot,
            "time x0 (replica 0)",
            (0..first.len()).map(|k| (first.time(k), first.state(k)[0])),
        )?;
    }

    let rejections: u64 = ensemble.paths().iter().map(|p| p.rejections()).sum();
    let steps = sim_config.steps();
    let body = serde_json::json!({
        "replicas": params.replicas,
        "steps": steps,
        "rows": params.replicas * (steps + 1),
        "rejections": rejections,
        "csv": args.out.as_ref().map(|p| p.display().to_string()),
    });
    // CSV goes to stdout when --out is omitted; suppress the JSON
    // envelope there so the output stays machine-readable.
    if args.out.is_some() {
        let env = report::envelope("simulate", res.timestamp, &body);
        print_envelope(&env)?;
    }
    Ok(true)
}

fn write_histogram_csv(path: &PathBuf, table: &HistogramTable) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(io_failure(&format!("creating {}", path.display())))?;
    let context = format!("writing {}", path.display());
    let ctx = io_failure(&context);
    writeln!(f, "bin_lo,bin_hi,count,empirical,target").map_err(&ctx)?;
    for b in 0..table.bins() {
        writeln!(
            f,
            "{:.16e},{:.16e},{},{:.16e},{:.16e}",
            table.edges[b],
            table.edges[b + 1],
            table.counts[b],
            table.empirical[b],
            table.target[b]
        )
        .map_err(&ctx)?;
    }
    Ok(())
}

fn cmd_gibbs(args: GibbsArgs) -> Result<bool, CliError> {
    let cfg = FileConfig::load(args.common.config.as_ref())?;
    let res = resolve_geometry(&args.common, &cfg)?;
    let params = resolve_sim(&args.sim, &cfg, 20.0, 4096)?;
    let energy = resolve_energy(args.energy.as_ref(), &cfg, res.dim)?;
    let start = resolve_start(args.start.as_ref(), &cfg, res.geometry.as_ref())?;
    let bins = resolve(args.bins, &cfg, "bins", 20)?;
    let tv_tol = resolve(args.tv_tol, &cfg, "tv_tol", 0.05)?;
    let sim_config = SimulationConfig::new(params.beta, params.dt, params.horizon, params.seed)
        .with_replicas(params.replicas);

    let (endpoints, rejections) =
        sample_endpoints(res.geometry.as_ref(), energy.as_ref(), &start, &sim_config)?;
    let xs: Vec<f64> = endpoints.iter().map(|x| x[0]).collect();
    let table = stationary_histogram_table(
        res.geometry.as_ref(),
        energy.as_ref(),
        params.beta,
        &xs,
        bins,
    )?;
    let spec = HistogramSpec {
        bins,
        tv_tolerance: tv_tol,
    };
    let report_cfg = serde_json::json!({
        "geometry": res.kind.to_string(),
        "dim": res.dim,
        "beta": params.beta,
        "dt": params.dt,
        "horizon": params.horizon,
        "replicas": params.replicas,
        "seed": params.seed,
        "energy": energy.as_ref().map(|e| e.to_string()),
        "bins": bins,
    });
    let stat_report = histogram_conformance(&table, spec, report_cfg);

    if let Some(p) = args.out.as_ref() {
        write_histogram_csv(p, &table)?;
    }
    if let Some(plot) = plot_path(args.out.as_ref(), args.plot_data)? {
        write_plot(
            &plot,
            "bin_center empirical_mass",
            (0..table.bins()).map(|b| {
                (
                    0.5 * (table.edges[b] + table.edges[b + 1]),
                    table.empirical[b],
                )
            }),
        )?;
    }

    let body = serde_json::json!({
        "report": stat_report,
        "rejections": rejections,
        "csv": args.out.as_ref().map(|p| p.display().to_string()),
    });
    let env = report::envelope("gibbs", res.timestamp, &body);
    print_envelope(&env)?;
    Ok(stat_report.verdict)
}

fn cmd_central_path(args: CentralPathArgs) -> Result<bool, CliError> {
    let cfg = FileConfig::load(args.common.config.as_ref())?;
    let res = resolve_geometry(&args.common, &cfg)?;
    let cost_text: String = require(args.cost.clone(), &cfg, "cost")?;
    let cost = DVector::from_vec(
        parse_float_list(&cost_text)
            .map_err(|e| CliError::Usage(format!("--cost {cost_text:?}: {e}")))?,
    );
    let theta_max = resolve(args.theta_max, &cfg, "theta_max", 1024.0)?;
    let tol = resolve(args.tol, &cfg, "tol", 1e-10)?;
    let program = ConicProgram::new(res.geometry.as_ref(), cost)?;
    let start = match args.start.as_deref().or(cfg.raw("start")) {
        Some(t) => Some(
            InteriorPoint::new(
                res.geometry.as_ref(),
                DVector::from_vec(
                    parse_float_list(t)
                        .map_err(|e| CliError::Usage(format!("--start {t:?}: {e}")))?,
                ),
            )
            .map_err(|e| CliError::Usage(format!("--start: {e}")))?,
        ),
        None => None,
    };
    let stages = solve_conic(&program, theta_max, tol, start.as_ref())?;

    if let Some(p) = args.out.as_ref() {
        let mut f = fs::File::create(p).map_err(io_failure(&format!("creating {}", p.display())))?;
        write_stages_csv(&mut f, &stages).map_err(io_failure(&format!("writing {}", p.display())))?;
    }
    if let Some(plot) = plot_path(args.out.as_ref(), args.plot_data)? {
        write_plot(
            &plot,
            "theta objective",
            stages.iter().map(|s| (s.theta, s.objective)),
        )?;
    }
    let env = report::envelope("central-path", res.timestamp, &stages_summary(&stages));
    print_envelope(&env)?;
    Ok(true)
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::VerifyGeometry(a) => cmd_verify_geometry(a),
        Command::VerifyTheorems(a) => cmd_verify_theorems(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Gibbs(a) => cmd_gibbs(a),
        Command::CentralPath(a) => cmd_central_path(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
