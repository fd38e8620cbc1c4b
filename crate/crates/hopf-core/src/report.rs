//! Machine-readable verification reports: the per-shape suite runner,
//! a versioned JSON schema with reproducible float formatting, and the
//! CSV summary carrying the same numeric content.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::connection::lemma1_residual;
use crate::corpus::{build, unit_sphere_chart, Hypersurface, ShapeBundle, ShapeConfig, ShapeRecord};
use crate::degree::{estimate_all, DegreeEstimate};
use crate::error::{HopfError, Result};
use crate::euler::{chi_mesh, chi_morse, chi_solid};
use crate::surfaces::chart::{Chart, DiffBackend};
use crate::transgression::{closedness_residual, integrate_tpf, naturality_residual};

/// Rounded-value acceptance window used when an estimator's own error
/// estimate is optimistic.
pub const DEFAULT_DEGREE_TOL: f64 = 0.1;

/// Options for the verification suite.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Acceptance window around the rounded degree (see
    /// [`DEFAULT_DEGREE_TOL`]).
    pub tol: f64,
    /// Sample count for the connection-compatibility residual.
    pub lemma1_samples: usize,
    /// Sample count for the pointwise closedness and naturality
    /// residuals of the transgression form.
    pub residual_samples: usize,
    /// Record wall-clock timings per shape. Off by default so that
    /// reports are byte-identical across runs.
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            seed: 42,
            tol: DEFAULT_DEGREE_TOL,
            lemma1_samples: 100,
            residual_samples: 5,
            timings: false,
        }
    }
}

/// Euler-characteristic oracles gathered for one shape.
#[derive(Debug, Clone, Serialize)]
pub struct ChiOracles {
    /// Annotated chi of the hypersurface H.
    pub annotated_surface: i64,
    /// Annotated chi of the enclosed solid W.
    pub annotated_solid: i64,
    /// Combinatorial V - E + F (mesh shapes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<i64>,
    /// Morse-theoretic count on the hypersurface (chart shapes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse: Option<i64>,
    /// Boundary-Morse count for chi(W) (chart shapes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solid_morse: Option<i64>,
    /// Every computed oracle matches its annotation.
    pub consistent: bool,
}

/// Transgression-form checks for even ambient dimension.
#[derive(Debug, Clone, Serialize)]
pub struct TpfChecks {
    /// Integral of the transgression form over the round unit sphere of
    /// the same dimension; must be -1.
    pub sphere_integral: f64,
    /// Integral over the shape itself; must be minus the degree.
    pub surface_integral: f64,
    /// Largest Bianchi residual of the path curvature over the sample
    /// points.
    pub closedness_residual: f64,
    /// Largest pullback-naturality residual over the sample points.
    pub naturality_residual: f64,
}

/// Verification record for one shape.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeReport {
    pub record: ShapeRecord,
    pub estimates: Vec<DegreeEstimate>,
    pub chi: ChiOracles,
    /// "pass" iff every estimator rounds to the expected degree within
    /// its error bar (widened to the acceptance window).
    pub theorem_verdict: String,
    /// Max connection-compatibility residual over the seeded samples
    /// (chart shapes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma1_max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tpf: Option<TpfChecks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl ShapeReport {
    pub fn passed(&self) -> bool {
        self.theorem_verdict == "pass" && self.chi.consistent
    }
}

/// Top-level verification report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub seed: u64,
    pub tolerance: f64,
    pub shapes: BTreeMap<String, ShapeReport>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.shapes.values().all(|s| s.passed())
    }

    /// CSV summary with the same numeric content as the JSON report.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("shape,estimator,value,error,expected,verdict\n");
        for (name, shape) in &self.shapes {
            for est in &shape.estimates {
                let verdict = if estimate_passes(est, shape.record.expected_degree, self.tolerance)
                {
                    "pass"
                } else {
                    "fail"
                };
                out.push_str(&format!(
                    "{name},{},{:.16e},{:.16e},{},{verdict}\n",
                    est.estimator, est.value, est.error, shape.record.expected_degree
                ));
            }
        }
        out
    }

    pub fn to_json_string(&self) -> Result<String> {
        to_canonical_json(self)
    }
}

/// JSON formatter printing every float with 17 significant digits so
/// reports are byte-reproducible regression inputs.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize any value to JSON with the reproducible float format.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| HopfError::Input(format!("report serialization: {e}")))?;
    String::from_utf8(out).map_err(|e| HopfError::Input(format!("report serialization: {e}")))
}

fn estimate_passes(est: &DegreeEstimate, expected: i64, tol: f64) -> bool {
    est.rounded == expected && (est.value - est.rounded as f64).abs() <= est.error.max(tol)
}

/// Max connection-compatibility residual over a fixed seeded family of
/// ambient matrices, interior chart points, and directions.
pub fn lemma1_max_residual(chart: &Chart, seed: u64, samples: usize) -> Result<f64> {
    let n = chart.ambient_dim();
    let d = chart.param_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4c31);
    let mats: Vec<DMatrix<f64>> = (0..3)
        .map(|_| DMatrix::from_fn(n, n, |_, _| -> f64 { StandardNormal.sample(&mut rng) }))
        .collect();
    let dom = chart.domain();
    // Interior points: a 5% margin keeps chart poles out of the sample.
    let points: Vec<(Vec<f64>, Vec<f64>)> = (0..samples)
        .map(|_| {
            let u: Vec<f64> = dom
                .iter()
                .map(|&(a, b)| a + (b - a) * (0.05 + 0.9 * rng.gen::<f64>()))
                .collect();
            let y: Vec<f64> = (0..d).map(|_| -> f64 { StandardNormal.sample(&mut rng) }).collect();
            (u, y)
        })
        .collect();
    let residuals: Vec<Result<f64>> = points
        .par_iter()
        .map(|(u, y)| {
            let mut worst = 0.0f64;
            for a in &mats {
                worst = worst.max(lemma1_residual(chart, u, a, y)?);
            }
            Ok(worst)
        })
        .collect();
    let mut max = 0.0f64;
    for r in residuals {
        max = max.max(r?);
    }
    Ok(max)
}

/// Interior sample points for pointwise residual checks.
fn residual_points(chart: &Chart, seed: u64, samples: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e51);
    let dom = chart.domain();
    (0..samples)
        .map(|_| {
            dom.iter()
                .map(|&(a, b)| a + (b - a) * (0.1 + 0.8 * rng.gen::<f64>()))
                .collect()
        })
        .collect()
}

fn tpf_checks(chart: &Chart, record: &ShapeRecord, opts: &VerifyOptions) -> Result<TpfChecks> {
    let n = chart.ambient_dim();
    let sphere = unit_sphere_chart(n, DiffBackend::Analytic)?;
    let sphere_res: Vec<usize> = match n {
        2 => vec![256],
        _ => vec![24, 48, 48],
    };
    let sphere_integral = integrate_tpf(&sphere, &sphere_res)?;
    let surface_integral = integrate_tpf(chart, &record.default_resolution)?;
    let points = residual_points(chart, opts.seed, opts.residual_samples);
    let mut closedness = 0.0f64;
    let mut naturality = 0.0f64;
    for u in &points {
        closedness = closedness.max(closedness_residual(chart, u)?);
        match naturality_residual(chart, u) {
            Ok(r) => naturality = naturality.max(r),
            // The Gauss image can land on a pole of the canonical sphere
            // chart; skip such points.
            Err(HopfError::DegeneratePoint(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(TpfChecks {
        sphere_integral,
        surface_integral,
        closedness_residual: closedness,
        naturality_residual: naturality,
    })
}

/// Run the full verification suite for one shape.
pub fn verify_shape(bundle: &ShapeBundle, opts: &VerifyOptions) -> Result<ShapeReport> {
    let start = std::time::Instant::now();
    let record = bundle.record.clone();
    let estimates = estimate_all(bundle, opts.seed)?;

    let mut chi = ChiOracles {
        annotated_surface: record.chi_surface,
        annotated_solid: record.chi_solid,
        mesh: None,
        morse: None,
        solid_morse: None,
        consistent: true,
    };
    let mut lemma1 = None;
    let mut tpf = None;
    match &bundle.surface {
        Hypersurface::Chart(chart) => {
            chi.morse = Some(chi_morse(chart, opts.seed)?);
            chi.solid_morse = chi_solid(bundle, opts.seed)?.morse_check;
            lemma1 = Some(lemma1_max_residual(chart, opts.seed, opts.lemma1_samples)?);
            if chart.ambient_dim() % 2 == 0 {
                tpf = Some(tpf_checks(chart, &record, opts)?);
            }
        }
        Hypersurface::Mesh(mesh) => {
            chi.mesh = Some(chi_mesh(mesh));
        }
        Hypersurface::Implicit(_) => {
            return Err(HopfError::Input(
                "standalone implicit shapes are not in the catalog".into(),
            ))
        }
    }
    chi.consistent = chi.mesh.map_or(true, |v| v == chi.annotated_surface)
        && chi.morse.map_or(true, |v| v == chi.annotated_surface)
        && chi.solid_morse.map_or(true, |v| v == chi.annotated_solid);

    let pass = estimates
        .iter()
        .all(|e| estimate_passes(e, record.expected_degree, opts.tol));
    Ok(ShapeReport {
        record,
        estimates,
        chi,
        theorem_verdict: if pass { "pass" } else { "fail" }.to_string(),
        lemma1_max_residual: lemma1,
        tpf,
        elapsed_ms: opts.timings.then(|| start.elapsed().as_millis() as u64),
    })
}

/// Verify a list of shape configs (the whole catalog by default) in
/// parallel and assemble the report.
pub fn verify_all(configs: &[ShapeConfig], opts: &VerifyOptions) -> Result<Report> {
    let entries: Vec<Result<(String, ShapeReport)>> = configs
        .par_iter()
        .map(|config| {
            let bundle = build(config)?;
            let report = verify_shape(&bundle, opts)?;
            Ok((bundle.record.name.clone(), report))
        })
        .collect();
    let mut shapes = BTreeMap::new();
    for e in entries {
        let (name, report) = e?;
        shapes.insert(name, report);
    }
    Ok(Report {
        schema: 1,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: opts.seed,
        tolerance: opts.tol,
        shapes,
    })
}

/// The default verification corpus: every catalog shape at its default
/// parameters and resolution.
pub fn default_corpus() -> Vec<ShapeConfig> {
    crate::corpus::CATALOG.iter().map(|n| ShapeConfig::named(n)).collect()
}
