//! Command-line verification runner: executes the degree estimators and
//! the supporting identity checks over the shape catalog and emits
//! machine-readable reports.
//!
//! Exit codes: 0 = all verifications pass, 1 = a verification failed
//! (reports are still written), 2 = input or configuration error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hopf_core::corpus::{build, Hypersurface, ShapeBundle, ShapeConfig, CATALOG};
use hopf_core::degree::{
    degree_gk, degree_mesh, degree_pfaffian, degree_preimage, degree_tpf, estimate_all,
    winding_number, DegreeEstimate,
};
use hopf_core::euler::{chi_mesh, chi_morse};
use hopf_core::report::{
    default_corpus, lemma1_max_residual, to_canonical_json, verify_all, VerifyOptions,
    DEFAULT_DEGREE_TOL,
};
use hopf_core::surfaces::chart::Chart;
use hopf_core::transgression::{closedness_residual, even_degree, naturality_residual};
use hopf_core::HopfError;

#[derive(Parser)]
#[command(name = "hopf", version, about = "Gauss-map degree verification laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Quadrature resolution override, e.g. 256, 64x128, 24x48x48.
    /// With verify-all it applies to shapes of matching dimension only.
    #[arg(long, global = true, value_name = "AxB[xC]")]
    grid: Option<String>,

    /// Differentiation backend for chart shapes.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,

    /// Seed for direction draws and sample points.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads (also env HOPF_THREADS; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Acceptance tolerance (defaults per subcommand).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Write the JSON report here.
    #[arg(long, global = true, value_name = "PATH.json")]
    report: Option<PathBuf>,

    /// Write the CSV summary here (degree and verify-all).
    #[arg(long, global = true, value_name = "PATH.csv")]
    csv: Option<PathBuf>,

    /// Record wall-clock timings in the report (makes reports
    /// non-reproducible byte-for-byte).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List the shape catalog with its ground-truth annotations.
    List,
    /// Run degree estimators on one shape.
    Degree {
        shape: String,
        #[arg(long, value_enum, default_value_t = EstimatorArg::All)]
        estimator: EstimatorArg,
    },
    /// Compute the Euler characteristic of one shape.
    Euler {
        shape: String,
        /// Default: mesh counting for meshes, Morse theory for charts.
        #[arg(long, value_enum)]
        method: Option<EulerMethod>,
    },
    /// Run the transgression-form suite on an even-dimensional shape.
    Transgress { shape: String },
    /// Check the sphere-connection compatibility residual on a chart shape.
    Lemma1 { shape: String },
    /// Run the full verification suite over the corpus.
    VerifyAll {
        /// JSON file with an array of shape configs
        /// [{"name": ..., "params": {...}, "resolution": [...], "backend": ...}].
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Analytic,
    Dual,
    Fd,
}

impl BackendArg {
    fn name(self) -> &'static str {
        match self {
            BackendArg::Analytic => "analytic",
            BackendArg::Dual => "dual",
            BackendArg::Fd => "fd",
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EstimatorArg {
    All,
    Preimage,
    Gk,
    Pfaffian,
    Tpf,
    Winding,
    Mesh,
}

#[derive(Clone, Copy, ValueEnum)]
enum EulerMethod {
    Mesh,
    Morse,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &HopfError) -> u8 {
    match e {
        HopfError::Input(_)
        | HopfError::Ingestion(_)
        | HopfError::Io(_)
        | HopfError::UnsupportedParity(_) => 2,
        _ => 1,
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), HopfError> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var("HOPF_THREADS") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| HopfError::Input(format!("HOPF_THREADS={v:?} is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(HopfError::Input("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HopfError::Input(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn parse_grid(grid: &str) -> Result<Vec<usize>, HopfError> {
    let parts: Result<Vec<usize>, _> = grid.split('x').map(|p| p.trim().parse()).collect();
    match parts {
        Ok(v) if !v.is_empty() && v.iter().all(|&n| n > 0) => Ok(v),
        _ => Err(HopfError::Input(format!(
            "grid {grid:?} must look like 256, 64x128, or 24x48x48"
        ))),
    }
}

/// Chart parameter dimension per catalog name (0 for meshes).
fn param_dim_of(name: &str) -> usize {
    match name {
        "circle" | "ellipse" | "bumpy_circle" => 1,
        "sphere" | "ellipsoid" | "torus" => 2,
        "sphere3" | "ellipsoid4" | "tube_s1xs2" => 3,
        _ => 0,
    }
}

fn shape_config(cli: &Cli, name: &str, strict_grid: bool) -> Result<ShapeConfig, HopfError> {
    let mut config = ShapeConfig::named(name);
    config.backend = cli.backend.map(|b| b.name().to_string());
    if let Some(grid) = &cli.grid {
        let res = parse_grid(grid)?;
        if res.len() == param_dim_of(name) {
            config.resolution = Some(res);
        } else if strict_grid {
            return Err(HopfError::Input(format!(
                "grid {grid:?} has {} axes but {name} is parametrized by {}",
                res.len(),
                param_dim_of(name)
            )));
        }
    }
    Ok(config)
}

fn build_shape(cli: &Cli, name: &str) -> Result<ShapeBundle, HopfError> {
    build(&shape_config(cli, name, true)?)
}

fn chart_of(bundle: &ShapeBundle) -> Result<&Chart, HopfError> {
    match &bundle.surface {
        Hypersurface::Chart(c) => Ok(c),
        _ => Err(HopfError::Input(format!(
            "{} is not a parametrized chart shape",
            bundle.record.name
        ))),
    }
}

fn write_outputs(
    cli: &Cli,
    json: Option<Result<String, HopfError>>,
    csv: Option<String>,
) -> Result<(), HopfError> {
    if let Some(path) = &cli.report {
        match json {
            Some(json) => std::fs::write(path, json?)?,
            None => {
                return Err(HopfError::Input(
                    "--report is not available for this subcommand".into(),
                ))
            }
        }
    }
    if let Some(path) = &cli.csv {
        match csv {
            Some(csv) => std::fs::write(path, csv)?,
            None => {
                return Err(HopfError::Input(
                    "--csv is not available for this subcommand".into(),
                ))
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, HopfError> {
    match &cli.command {
        Command::List => {
            write_outputs(cli, None, None)?;
            println!(
                "{:<12} {:>3} {:>6} {:>6} {:>6}  parameters",
                "shape", "n", "chi(H)", "chi(W)", "degree"
            );
            for name in CATALOG {
                let r = build(&ShapeConfig::named(name))?.record;
                let params: Vec<String> =
                    r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "{:<12} {:>3} {:>6} {:>6} {:>6}  {}",
                    r.name,
                    r.ambient_dim,
                    r.chi_surface,
                    r.chi_solid,
                    r.expected_degree,
                    params.join(", ")
                );
            }
            Ok(true)
        }
        Command::Degree { shape, estimator } => run_degree(cli, shape, *estimator),
        Command::Euler { shape, method } => run_euler(cli, shape, *method),
        Command::Transgress { shape } => run_transgress(cli, shape),
        Command::Lemma1 { shape } => run_lemma1(cli, shape),
        Command::VerifyAll { config } => run_verify_all(cli, config.as_deref()),
    }
}

fn run_degree(cli: &Cli, shape: &str, which: EstimatorArg) -> Result<bool, HopfError> {
    let bundle = build_shape(cli, shape)?;
    let record = &bundle.record;
    let res = &record.default_resolution;
    let estimates: Vec<DegreeEstimate> = match which {
        EstimatorArg::All => estimate_all(&bundle, cli.seed)?,
        EstimatorArg::Preimage => vec![match &bundle.surface {
            Hypersurface::Chart(c) => degree_preimage(c, cli.seed)?,
            Hypersurface::Mesh(_) if record.name == "genus2_mesh" => {
                hopf_core::degree::degree_preimage_implicit(
                    &hopf_core::corpus::genus2_implicit(),
                    cli.seed,
                    hopf_core::degree::SCAN_NODES_PER_AXIS,
                )?
            }
            _ => return Err(HopfError::Input(format!("{shape} has no preimage estimator"))),
        }],
        EstimatorArg::Gk => vec![degree_gk(chart_of(&bundle)?, res)?],
        EstimatorArg::Pfaffian => vec![degree_pfaffian(chart_of(&bundle)?, res)?],
        EstimatorArg::Tpf => vec![degree_tpf(chart_of(&bundle)?, res)?],
        EstimatorArg::Winding => vec![winding_number(chart_of(&bundle)?, res[0])?],
        EstimatorArg::Mesh => match &bundle.surface {
            Hypersurface::Mesh(m) => vec![degree_mesh(m)?],
            _ => return Err(HopfError::Input(format!("{shape} is not a mesh"))),
        },
    };
    let tol = cli.tol.unwrap_or(DEFAULT_DEGREE_TOL);
    let mut all_pass = true;
    println!("shape {shape}: expected degree {}", record.expected_degree);
    for est in &estimates {
        let pass = est.rounded == record.expected_degree
            && (est.value - est.rounded as f64).abs() <= est.error.max(tol);
        all_pass &= pass;
        println!(
            "  {:<9} value {:+.12e}  error {:.3e}  rounded {:+}  [{}]",
            est.estimator,
            est.value,
            est.error,
            est.rounded,
            if pass { "pass" } else { "FAIL" }
        );
    }

    #[derive(Serialize)]
    struct DegreeReport<'a> {
        schema: u32,
        tool_version: &'a str,
        seed: u64,
        record: &'a hopf_core::corpus::ShapeRecord,
        estimates: &'a [DegreeEstimate],
        verdict: &'a str,
    }
    let json = to_canonical_json(&DegreeReport {
        schema: 1,
        tool_version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        record,
        estimates: &estimates,
        verdict: if all_pass { "pass" } else { "fail" },
    });
    let mut csv = String::from("shape,estimator,value,error,expected,verdict\n");
    for est in &estimates {
        let pass = est.rounded == record.expected_degree
            && (est.value - est.rounded as f64).abs() <= est.error.max(tol);
        csv.push_str(&format!(
            "{shape},{},{:.16e},{:.16e},{},{}\n",
            est.estimator,
            est.value,
            est.error,
            record.expected_degree,
            if pass { "pass" } else { "fail" }
        ));
    }
    write_outputs(cli, Some(json), Some(csv))?;
    Ok(all_pass)
}

fn run_euler(cli: &Cli, shape: &str, method: Option<EulerMethod>) -> Result<bool, HopfError> {
    let bundle = build_shape(cli, shape)?;
    let record = &bundle.record;
    let method = match (method, &bundle.surface) {
        (Some(m), _) => m,
        (None, Hypersurface::Mesh(_)) => EulerMethod::Mesh,
        (None, _) => EulerMethod::Morse,
    };
    let (label, chi) = match method {
        EulerMethod::Mesh => match &bundle.surface {
            Hypersurface::Mesh(m) => ("mesh", chi_mesh(m)),
            _ => return Err(HopfError::Input(format!("{shape} is not a mesh"))),
        },
        EulerMethod::Morse => ("morse", chi_morse(chart_of(&bundle)?, cli.seed)?),
    };
    let pass = chi == record.chi_surface;
    println!(
        "shape {shape}: chi({label}) = {chi}, annotated {}  [{}]",
        record.chi_surface,
        if pass { "pass" } else { "FAIL" }
    );

    #[derive(Serialize)]
    struct EulerReport<'a> {
        schema: u32,
        tool_version: &'a str,
        seed: u64,
        record: &'a hopf_core::corpus::ShapeRecord,
        method: &'a str,
        chi: i64,
        verdict: &'a str,
    }
    let json = to_canonical_json(&EulerReport {
        schema: 1,
        tool_version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        record,
        method: label,
        chi,
        verdict: if pass { "pass" } else { "fail" },
    });
    write_outputs(cli, Some(json), None)?;
    Ok(pass)
}

fn run_transgress(cli: &Cli, shape: &str) -> Result<bool, HopfError> {
    let bundle = build_shape(cli, shape)?;
    let record = &bundle.record;
    let chart = chart_of(&bundle)?;
    let res = &record.default_resolution;
    let tol = cli.tol.unwrap_or(1e-6);

    let (value, error) = even_degree(chart, res)?;
    let integral = -value;
    let expected = -record.expected_degree as f64;
    let integral_pass = (integral - expected).abs() <= error.max(tol);

    let mut closedness = 0.0f64;
    let mut naturality = 0.0f64;
    let dom = chart.domain();
    for k in 0..5usize {
        let u: Vec<f64> = dom
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| a + (b - a) * (0.13 + 0.17 * ((k + i) as f64)).fract())
            .collect();
        closedness = closedness.max(closedness_residual(chart, &u)?);
        match naturality_residual(chart, &u) {
            Ok(r) => naturality = naturality.max(r),
            Err(HopfError::DegeneratePoint(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let closed_pass = closedness <= 1e-4;
    let natural_pass = naturality <= tol.max(1e-6);
    let pass = integral_pass && closed_pass && natural_pass;

    println!("shape {shape}: transgression suite");
    println!(
        "  integral    {integral:+.12e}  expected {expected:+}  error {error:.3e}  [{}]",
        if integral_pass { "pass" } else { "FAIL" }
    );
    println!(
        "  closedness  {closedness:.3e}  [{}]",
        if closed_pass { "pass" } else { "FAIL" }
    );
    println!(
        "  naturality  {naturality:.3e}  [{}]",
        if natural_pass { "pass" } else { "FAIL" }
    );

    #[derive(Serialize)]
    struct TransgressReport<'a> {
        schema: u32,
        tool_version: &'a str,
        record: &'a hopf_core::corpus::ShapeRecord,
        integral: f64,
        integral_error: f64,
        closedness_residual: f64,
        naturality_residual: f64,
        verdict: &'a str,
    }
    let json = to_canonical_json(&TransgressReport {
        schema: 1,
        tool_version: env!("CARGO_PKG_VERSION"),
        record,
        integral,
        integral_error: error,
        closedness_residual: closedness,
        naturality_residual: naturality,
        verdict: if pass { "pass" } else { "fail" },
    });
    write_outputs(cli, Some(json), None)?;
    Ok(pass)
}

fn run_lemma1(cli: &Cli, shape: &str) -> Result<bool, HopfError> {
    let bundle = build_shape(cli, shape)?;
    let chart = chart_of(&bundle)?;
    let tol = cli.tol.unwrap_or(1e-6);
    let residual = lemma1_max_residual(chart, cli.seed, 100)?;
    let pass = residual <= tol;
    println!(
        "shape {shape}: max connection-compatibility residual {residual:.3e}  [{}]",
        if pass { "pass" } else { "FAIL" }
    );

    #[derive(Serialize)]
    struct Lemma1Report<'a> {
        schema: u32,
        tool_version: &'a str,
        seed: u64,
        record: &'a hopf_core::corpus::ShapeRecord,
        max_residual: f64,
        tolerance: f64,
        verdict: &'a str,
    }
    let json = to_canonical_json(&Lemma1Report {
        schema: 1,
        tool_version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        record: &bundle.record,
        max_residual: residual,
        tolerance: tol,
        verdict: if pass { "pass" } else { "fail" },
    });
    write_outputs(cli, Some(json), None)?;
    Ok(pass)
}

fn run_verify_all(cli: &Cli, config: Option<&std::path::Path>) -> Result<bool, HopfError> {
    let mut configs: Vec<ShapeConfig> = match config {
        Some(path) => {
            let payload = std::fs::read_to_string(path)?;
            serde_json::from_str(&payload)
                .map_err(|e| HopfError::Input(format!("config {path:?}: {e}")))?
        }
        None => default_corpus(),
    };
    for c in &mut configs {
        if c.backend.is_none() {
            c.backend = cli.backend.map(|b| b.name().to_string());
        }
        if c.resolution.is_none() {
            c.resolution = shape_config(cli, &c.name, false)?.resolution;
        }
    }
    // Reject duplicate names early: the report is keyed by shape name.
    let mut seen = BTreeMap::new();
    for c in &configs {
        if seen.insert(c.name.clone(), ()).is_some() {
            return Err(HopfError::Input(format!("duplicate shape {:?} in config", c.name)));
        }
    }

    let opts = VerifyOptions {
        seed: cli.seed,
        tol: cli.tol.unwrap_or(DEFAULT_DEGREE_TOL),
        timings: cli.timings,
        ..Default::default()
    };
    let report = verify_all(&configs, &opts)?;
    for (name, shape) in &report.shapes {
        let values: Vec<String> = shape
            .estimates
            .iter()
            .map(|e| format!("{}={:+.6}", e.estimator, e.value))
            .collect();
        println!(
            "{name:<12} expected {:+}  {}  [{}]",
            shape.record.expected_degree,
            values.join("  "),
            if shape.passed() { "pass" } else { "FAIL" }
        );
    }
    let all = report.all_pass();
    println!("verify-all: {}", if all { "all shapes pass" } else { "FAILURES" });
    write_outputs(cli, Some(report.to_json_string()), Some(report.to_csv()))?;
    Ok(all)
}
