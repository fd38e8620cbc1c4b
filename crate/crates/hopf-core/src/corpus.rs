//! The shape catalog: constructors with closed-form jets, ground-truth
//! annotations, and the JSON config format naming them.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{HopfError, Result};
use crate::surfaces::chart::{Chart, DiffBackend, Jets, SurfaceMap};
use crate::surfaces::implicit::{ImplicitSurface, LevelFn};
use crate::surfaces::jet::Jet;
use crate::surfaces::mesh::{self, TriMesh};

const TAU: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

/// A hypersurface in one of the three supported representations.
#[derive(Clone)]
pub enum Hypersurface {
    Chart(Chart),
    Mesh(TriMesh),
    Implicit(ImplicitSurface),
}

/// Catalog entry: construction parameters plus annotated ground truth.
/// The `provenance` strings record how each annotation is known.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeRecord {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub ambient_dim: usize,
    /// Euler characteristic of the hypersurface H.
    pub chi_surface: i64,
    /// Euler characteristic of the enclosed solid W.
    pub chi_solid: i64,
    pub expected_degree: i64,
    pub provenance: String,
    /// Default quadrature resolution per chart axis (empty for meshes).
    pub default_resolution: Vec<usize>,
}

impl ShapeRecord {
    fn new(
        name: &str,
        params: BTreeMap<String, f64>,
        ambient_dim: usize,
        chi_surface: i64,
        chi_solid: i64,
        expected_degree: i64,
        provenance: &str,
        default_resolution: Vec<usize>,
    ) -> Result<ShapeRecord> {
        // Redundancy check: the annotated degree must satisfy the degree
        // theorem for the annotated Euler characteristics.
        let consistent = if ambient_dim % 2 == 1 {
            chi_surface % 2 == 0 && expected_degree == chi_surface / 2
        } else {
            expected_degree == chi_solid
        };
        if !consistent {
            return Err(HopfError::Input(format!(
                "inconsistent ground-truth annotation for {name}: \
                 chi(H) = {chi_surface}, chi(W) = {chi_solid}, degree = {expected_degree}"
            )));
        }
        Ok(ShapeRecord {
            name: name.to_string(),
            params,
            ambient_dim,
            chi_surface,
            chi_solid,
            expected_degree,
            provenance: provenance.to_string(),
            default_resolution,
        })
    }
}

/// Built shape: representation plus its catalog record.
#[derive(Clone)]
pub struct ShapeBundle {
    pub surface: Hypersurface,
    pub record: ShapeRecord,
}

/// JSON shape configuration: {"name": ..., "params": {...},
/// "resolution": [...], "backend": "analytic"|"dual"|"fd"}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub resolution: Option<Vec<usize>>,
    #[serde(default)]
    pub backend: Option<String>,
}

impl ShapeConfig {
    pub fn named(name: &str) -> ShapeConfig {
        ShapeConfig {
            name: name.to_string(),
            params: BTreeMap::new(),
            resolution: None,
            backend: None,
        }
    }

    pub fn parse_backend(&self) -> Result<DiffBackend> {
        match self.backend.as_deref() {
            None | Some("analytic") => Ok(DiffBackend::Analytic),
            Some("dual") => Ok(DiffBackend::Dual),
            Some("fd") => Ok(DiffBackend::FiniteDiff {
                h1: crate::surfaces::chart::DEFAULT_FD_H1,
                h2: crate::surfaces::chart::DEFAULT_FD_H2,
            }),
            Some(other) => Err(HopfError::Input(format!("unknown backend {other:?}"))),
        }
    }
}

/// Shape names accepted by [`build`].
pub const CATALOG: [&str; 11] = [
    "circle",
    "ellipse",
    "bumpy_circle",
    "sphere",
    "ellipsoid",
    "torus",
    "genus2_mesh",
    "icosphere",
    "sphere3",
    "ellipsoid4",
    "tube_s1xs2",
];

fn num(params: &BTreeMap<String, serde_json::Value>, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| HopfError::Input(format!("parameter {key} must be a number"))),
    }
}

fn text<'a>(
    params: &'a BTreeMap<String, serde_json::Value>,
    key: &str,
    default: &'a str,
) -> Result<&'a str> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_str()
            .ok_or_else(|| HopfError::Input(format!("parameter {key} must be a string"))),
    }
}

/// Build a catalog shape from its config.
pub fn build(config: &ShapeConfig) -> Result<ShapeBundle> {
    let backend = config.parse_backend()?;
    let p = &config.params;
    let mut bundle = match config.name.as_str() {
        "circle" => {
            let r = num(p, "r", 1.0)?;
            require_positive(r, "r")?;
            chart_bundle(
                Arc::new(EllipseMap { a: r, b: r }),
                backend,
                ShapeRecord::new(
                    "circle",
                    BTreeMap::from([("r".into(), r)]),
                    2,
                    0,
                    1,
                    1,
                    "chi(S^1) = 0, chi(disk) = 1; degree 1 by the winding oracle",
                    vec![256],
                )?,
            )
        }
        "ellipse" => {
            let a = num(p, "a", 2.0)?;
            let b = num(p, "b", 1.0)?;
            require_positive(a.min(b), "a, b")?;
            chart_bundle(
                Arc::new(EllipseMap { a, b }),
                backend,
                ShapeRecord::new(
                    "ellipse",
                    BTreeMap::from([("a".into(), a), ("b".into(), b)]),
                    2,
                    0,
                    1,
                    1,
                    "chi(S^1) = 0, chi(disk) = 1; degree 1 by the winding oracle",
                    vec![256],
                )?,
            )
        }
        "bumpy_circle" => {
            let amp = num(p, "amp", 0.3)?;
            let k = num(p, "k", 5.0)?;
            if k.fract() != 0.0 || k < 1.0 {
                return Err(HopfError::Input("k must be a positive integer".into()));
            }
            if amp.abs() >= 1.0 {
                return Err(HopfError::Input(
                    "bumpy_circle needs |amp| < 1 for a positive radius".into(),
                ));
            }
            chart_bundle(
                Arc::new(BumpyCircleMap { amp, k }),
                backend,
                ShapeRecord::new(
                    "bumpy_circle",
                    BTreeMap::from([("amp".into(), amp), ("k".into(), k)]),
                    2,
                    0,
                    1,
                    1,
                    "embedded radial graph over S^1; degree 1 by the winding oracle",
                    vec![512],
                )?,
            )
        }
        "sphere" => {
            let r = num(p, "r", 1.0)?;
            require_positive(r, "r")?;
            chart_bundle(
                Arc::new(EllipsoidMap { a: r, b: r, c: r }),
                backend,
                ShapeRecord::new(
                    "sphere",
                    BTreeMap::from([("r".into(), r)]),
                    3,
                    2,
                    1,
                    1,
                    "chi(S^2) = 2, chi(ball) = 1; Gauss map is the identity on the unit sphere",
                    vec![64, 128],
                )?,
            )
        }
        "ellipsoid" => {
            let a = num(p, "a", 1.0)?;
            let b = num(p, "b", 1.3)?;
            let c = num(p, "c", 0.7)?;
            require_positive(a.min(b).min(c), "a, b, c")?;
            chart_bundle(
                Arc::new(EllipsoidMap { a, b, c }),
                backend,
                ShapeRecord::new(
                    "ellipsoid",
                    BTreeMap::from([("a".into(), a), ("b".into(), b), ("c".into(), c)]),
                    3,
                    2,
                    1,
                    1,
                    "diffeomorphic to S^2; convex, so the Gauss map is a diffeomorphism",
                    vec![64, 128],
                )?,
            )
        }
        "torus" => {
            let big_r = num(p, "R", 2.0)?;
            let small_r = num(p, "r", 1.0)?;
            require_tube(big_r, small_r)?;
            chart_bundle(
                Arc::new(TorusMap { big_r, small_r }),
                backend,
                ShapeRecord::new(
                    "torus",
                    BTreeMap::from([("R".into(), big_r), ("r".into(), small_r)]),
                    3,
                    0,
                    0,
                    0,
                    "chi(T^2) = 0, chi(solid torus) = chi(S^1) = 0",
                    vec![64, 64],
                )?,
            )
        }
        "genus2_mesh" => {
            let file = text(p, "file", "genus2.off")?;
            let path = resolve_asset(file)?;
            let payload = std::fs::read_to_string(&path)?;
            let mesh = mesh::ingest_mesh(&payload)?;
            let chi = mesh.euler_characteristic();
            if chi != -2 {
                return Err(HopfError::Ingestion(format!(
                    "genus-2 mesh {path:?} has chi = {chi}, expected -2"
                )));
            }
            ShapeBundle {
                surface: Hypersurface::Mesh(mesh),
                record: ShapeRecord::new(
                    "genus2_mesh",
                    BTreeMap::new(),
                    3,
                    -2,
                    -1,
                    -1,
                    "chi = V - E + F = -2 counted on the shipped file; \
                     chi(genus-2 handlebody) = 1 - 2 = -1",
                    vec![],
                )?,
            }
        }
        "icosphere" => {
            let subdiv = num(p, "subdiv", 2.0)?;
            if subdiv.fract() != 0.0 || subdiv < 0.0 || subdiv > 6.0 {
                return Err(HopfError::Input("subdiv must be an integer in 0..=6".into()));
            }
            let mesh = mesh::icosphere(subdiv as usize, num(p, "r", 1.0)?);
            ShapeBundle {
                surface: Hypersurface::Mesh(mesh),
                record: ShapeRecord::new(
                    "icosphere",
                    BTreeMap::from([("subdiv".into(), subdiv)]),
                    3,
                    2,
                    1,
                    1,
                    "combinatorial sphere: V - E + F = 2 at every subdivision level",
                    vec![],
                )?,
            }
        }
        "sphere3" => {
            let r = num(p, "r", 1.0)?;
            require_positive(r, "r")?;
            chart_bundle(
                Arc::new(Ellipsoid4Map {
                    a: r,
                    b: r,
                    c: r,
                    d: r,
                }),
                backend,
                ShapeRecord::new(
                    "sphere3",
                    BTreeMap::from([("r".into(), r)]),
                    4,
                    0,
                    1,
                    1,
                    "chi(S^3) = 0 (odd-dimensional), chi(B^4) = 1",
                    vec![24, 48, 48],
                )?,
            )
        }
        "ellipsoid4" => {
            let a = num(p, "a", 1.0)?;
            let b = num(p, "b", 1.2)?;
            let c = num(p, "c", 0.9)?;
            let d = num(p, "d", 1.1)?;
            require_positive(a.min(b).min(c).min(d), "a, b, c, d")?;
            chart_bundle(
                Arc::new(Ellipsoid4Map { a, b, c, d }),
                backend,
                ShapeRecord::new(
                    "ellipsoid4",
                    BTreeMap::from([
                        ("a".into(), a),
                        ("b".into(), b),
                        ("c".into(), c),
                        ("d".into(), d),
                    ]),
                    4,
                    0,
                    1,
                    1,
                    "diffeomorphic to S^3 bounding a 4-ball; convex",
                    vec![24, 48, 48],
                )?,
            )
        }
        "tube_s1xs2" => {
            let big_r = num(p, "R", 2.0)?;
            let small_r = num(p, "r", 1.0)?;
            require_tube(big_r, small_r)?;
            chart_bundle(
                Arc::new(TubeMap { big_r, small_r }),
                backend,
                ShapeRecord::new(
                    "tube_s1xs2",
                    BTreeMap::from([("R".into(), big_r), ("r".into(), small_r)]),
                    4,
                    0,
                    0,
                    0,
                    "boundary S^1 x S^2 of a tubular neighborhood S^1 x D^3 of a planar \
                     circle; chi(S^1 x S^2) = 0 and chi(S^1 x D^3) = chi(S^1) = 0",
                    vec![32, 32, 32],
                )?,
            )
        }
        other => {
            return Err(HopfError::Input(format!(
                "unknown shape {other:?}; catalog: {}",
                CATALOG.join(", ")
            )))
        }
    };
    if let Some(res) = &config.resolution {
        if !res.is_empty() {
            bundle.record.default_resolution = res.clone();
        }
    }
    Ok(bundle)
}

fn chart_bundle(map: Arc<dyn SurfaceMap>, backend: DiffBackend, record: ShapeRecord) -> ShapeBundle {
    ShapeBundle {
        surface: Hypersurface::Chart(Chart::new(map, backend)),
        record,
    }
}

fn require_positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(HopfError::Input(format!("{what} must be positive")))
    }
}

fn require_tube(big_r: f64, small_r: f64) -> Result<()> {
    require_positive(small_r, "r")?;
    if big_r > small_r {
        Ok(())
    } else {
        Err(HopfError::Input("need R > r > 0 for an embedded tube".into()))
    }
}

/// Locate a data file: absolute/relative path as given, then
/// $HOPF_DATA_DIR, then ./assets, then the workspace assets directory.
pub fn resolve_asset(file: &str) -> Result<PathBuf> {
    let direct = PathBuf::from(file);
    if direct.exists() {
        return Ok(direct);
    }
    let mut tried = vec![direct.display().to_string()];
    if let Ok(dir) = std::env::var("HOPF_DATA_DIR") {
        let p = PathBuf::from(dir).join(file);
        if p.exists() {
            return Ok(p);
        }
        tried.push(p.display().to_string());
    }
    let local = PathBuf::from("assets").join(file);
    if local.exists() {
        return Ok(local);
    }
    tried.push(local.display().to_string());
    let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../assets")
        .join(file);
    if workspace.exists() {
        return Ok(workspace);
    }
    tried.push(workspace.display().to_string());
    Err(HopfError::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("mesh file {file:?} not found; tried {tried:?}"),
    )))
}

// ---------------------------------------------------------------------
// Chart families
// ---------------------------------------------------------------------

/// Ellipse (a cos t, b sin t); a = b = r gives the circle.
pub struct EllipseMap {
    pub a: f64,
    pub b: f64,
}

impl SurfaceMap for EllipseMap {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, TAU)]
    }
    fn periodic(&self) -> Vec<bool> {
        vec![true]
    }
    fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
        let t = u[0];
        vec![Jet::constant(self.a) * t.cos(), Jet::constant(self.b) * t.sin()]
    }
    fn analytic_jets(&self, u: &[f64]) -> Option<Jets> {
        let (s, c) = u[0].sin_cos();
        let (a, b) = (self.a, self.b);
        Some(Jets {
            pos: vec![a * c, b * s],
            d1: vec![vec![-a * s, b * c]],
            d2: vec![vec![vec![-a * c, -b * s]]],
        })
    }
}

/// Radial graph r(t) = 1 + amp cos(k t) over the circle.
pub struct BumpyCircleMap {
    pub amp: f64,
    pub k: f64,
}

impl SurfaceMap for BumpyCircleMap {
    fn ambient_dim(&self) -> usize {
        2
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, TAU)]
    }
    fn periodic(&self) -> Vec<bool> {
        vec![true]
    }
    fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
        let t = u[0];
        let r = Jet::constant(1.0) + Jet::constant(self.amp) * (Jet::constant(self.k) * t).cos();
        vec![r * t.cos(), r * t.sin()]
    }
    fn analytic_jets(&self, u: &[f64]) -> Option<Jets> {
        let t = u[0];
        let (s, c) = t.sin_cos();
        let (sk, ck) = (self.k * t).sin_cos();
        let r = 1.0 + self.amp * ck;
        let dr = -self.amp * self.k * sk;
        let ddr = -self.amp * self.k * self.k * ck;
        Some(Jets {
            pos: vec![r * c, r * s],
            d1: vec![vec![dr * c - r * s, dr * s + r * c]],
            d2: vec![vec![vec![
                ddr * c - 2.0 * dr * s - r * c,
                ddr * s + 2.0 * dr * c - r * s,
            ]]],
        })
    }
}

/// Ellipsoid (a sin u cos v, b sin u sin v, c cos u); equal axes give
/// the sphere. u in (0, pi) is the polar angle, v the periodic azimuth.
pub struct EllipsoidMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SurfaceMap for EllipsoidMap {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, PI), (0.0, TAU)]
    }
    fn periodic(&self) -> Vec<bool> {
        vec![false, true]
    }
    fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
        let (th, ph) = (u[0], u[1]);
        vec![
            Jet::constant(self.a) * th.sin() * ph.cos(),
            Jet::constant(self.b) * th.sin() * ph.sin(),
            Jet::constant(self.c) * th.cos(),
        ]
    }
    fn analytic_jets(&self, u: &[f64]) -> Option<Jets> {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let (a, b, c) = (self.a, self.b, self.c);
        Some(Jets {
            pos: vec![a * st * cp, b * st * sp, c * ct],
            d1: vec![
                vec![a * ct * cp, b * ct * sp, -c * st],
                vec![-a * st * sp, b * st * cp, 0.0],
            ],
            d2: vec![
                vec![
                    vec![-a * st * cp, -b * st * sp, -c * ct],
                    vec![-a * ct * sp, b * ct * cp, 0.0],
                ],
                vec![
                    vec![-a * ct * sp, b * ct * cp, 0.0],
                    vec![-a * st * cp, -b * st * sp, 0.0],
                ],
            ],
        })
    }
}

/// Torus of revolution at (v, u) = (azimuth, tube angle):
/// ((R + r cos u) cos v, (R + r cos u) sin v, r sin u).
pub struct TorusMap {
    pub big_r: f64,
    pub small_r: f64,
}

impl SurfaceMap for TorusMap {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, TAU), (0.0, TAU)]
    }
    fn periodic(&self) -> Vec<bool> {
        vec![true, true]
    }
    fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
        let (ph, th) = (u[0], u[1]);
        let rho = Jet::constant(self.big_r) + Jet::constant(self.small_r) * th.cos();
        vec![
            rho * ph.cos(),
            rho * ph.sin(),
            Jet::constant(self.small_r) * th.sin(),
        ]
    }
    fn analytic_jets(&self, u: &[f64]) -> Option<Jets> {
        let (sp, cp) = u[0].sin_cos();
        let (st, ct) = u[1].sin_cos();
        let r = self.small_r;
        let rho = self.big_r + r * ct;
        Some(Jets {
            pos: vec![rho * cp, rho * sp, r * st],
            d1: vec![
                vec![-rho * sp, rho * cp, 0.0],
                vec![-r * st * cp, -r * st * sp, r * ct],
            ],
            d2: vec![
                vec![
                    vec![-rho * cp, -rho * sp, 0.0],
                    vec![r * st * sp, -r * st * cp, 0.0],
                ],
                vec![
                    vec![r * st * sp, -r * st * cp, 0.0],
                    vec![-r * ct * cp, -r * ct * sp, -r * st],
                ],
            ],
        })
    }
}

/// Four-axis ellipsoid in hyperspherical coordinates (x, t, p):
/// (a cos x, b sin x cos t, c sin x sin t cos p, d sin x sin t sin p).
/// Equal axes give the round 3-sphere.
pub struct Ellipsoid4Map {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SurfaceMap for Ellipsoid4Map {
    fn ambient_dim(&self) -> usize {
        4
    }
    fn param_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, PI), (0.0, PI), (0.0, TAU)]
    }
    fn periodic(&self) -> Vec<bool> {
        vec![false, false, true]
    }
    fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
        let (x, t, p) = (u[0], u[1], u[2]);
        vec![
            Jet::constant(self.a) * x.cos(),
            Jet::constant(self.b) * x.sin() * t.cos(),
            Jet::constant(self.c) * x.sin() * t.sin() * p.cos(),
            Jet::constant(self.d) * x.sin() * t.sin() * p.sin(),
        ]
    }
    fn analytic_jets(&self, u: &[f64]) -> Option<Jets> {
        let (sx, cx) = u[0].sin_cos();
        let (st, ct) = u[1].sin_cos();
        let (sp, cp) = u[2].sin_cos();
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let pos = vec![a * cx, b * sx * ct, c * sx * st * cp, d * sx * st * sp];
        let dx = vec![-a * sx, b * cx * ct, c * cx * st * cp, d * cx * st * sp];
        let dt = vec![0.0, -b * sx * st, c * sx * ct * cp, d * sx * ct * sp];
        let dp = vec![0.0, 0.0, -c * sx * st * sp, d * sx * st * cp];
        let dxx = vec![-a * cx, -b * sx * ct, -c * sx * st * cp, -d * sx * st * sp];
        let dxt = vec![0.0, -b * cx * st, c * cx * ct * cp, d * cx * ct * sp];
        let dxp = vec![0.0, 0.0, -c * cx * st * sp, d * cx * st * cp];
        let dtt = vec![0.0, -b * sx * ct, -c * sx * st * cp, -d * sx * st * sp];
        let dtp = vec![0.0, 0.0, -c * sx * ct * sp, d * sx * ct * cp];
        let dpp = vec![0.0, 0.0, -c * sx * st * cp, -d * sx * st * sp];
        Some(Jets {
            pos,
            d1: vec![dx, dt, dp],
            d2: vec![
                vec![dxx, dxt.clone(), dxp.clone()],
                vec![dxt, dtt, dtp.clone()],
                vec![dxp, dtp, dpp],
            ],
        })
    }
}

/// Boundary of a tubular neighborhood of the planar circle of radius R
/// in R^4, at (v, u, w) = (circle angle, tube polar angle, tube azimuth):
/// ((R + r cos u) cos v, (R + r cos u) sin v, r sin u cos w, r sin u sin w).
/// Topologically S^1 x S^2.
pub struct TubeMap {
    pub big_r: f64,
    pub small_r: f64,
}

impl SurfaceMap for TubeMap {
    fn ambient_dim(&self) -> usize {
        4
    }
    fn param_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, TAU), (0.0, PI), (0.0, TAU)]
    }
    fn periodic(&self) -> Vec<bool> {
        vec![true, false, true]
    }
    fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
        let (ph, al, be) = (u[0], u[1], u[2]);
        let r = Jet::constant(self.small_r);
        let rho = Jet::constant(self.big_r) + r * al.cos();
        vec![
            rho * ph.cos(),
            rho * ph.sin(),
            r * al.sin() * be.cos(),
            r * al.sin() * be.sin(),
        ]
    }
    fn analytic_jets(&self, u: &[f64]) -> Option<Jets> {
        let (sp, cp) = u[0].sin_cos();
        let (sa, ca) = u[1].sin_cos();
        let (sb, cb) = u[2].sin_cos();
        let r = self.small_r;
        let rho = self.big_r + r * ca;
        let pos = vec![rho * cp, rho * sp, r * sa * cb, r * sa * sb];
        let dph = vec![-rho * sp, rho * cp, 0.0, 0.0];
        let dal = vec![-r * sa * cp, -r * sa * sp, r * ca * cb, r * ca * sb];
        let dbe = vec![0.0, 0.0, -r * sa * sb, r * sa * cb];
        let dphph = vec![-rho * cp, -rho * sp, 0.0, 0.0];
        let dphal = vec![r * sa * sp, -r * sa * cp, 0.0, 0.0];
        let dphbe = vec![0.0; 4];
        let dalal = vec![-r * ca * cp, -r * ca * sp, -r * sa * cb, -r * sa * sb];
        let dalbe = vec![0.0, 0.0, -r * ca * sb, r * ca * cb];
        let dbebe = vec![0.0, 0.0, -r * sa * cb, -r * sa * sb];
        Some(Jets {
            pos,
            d1: vec![dph, dal, dbe],
            d2: vec![
                vec![dphph, dphal.clone(), dphbe.clone()],
                vec![dphal, dalal, dalbe.clone()],
                vec![dphbe, dalbe, dbebe],
            ],
        })
    }
}

// ---------------------------------------------------------------------
// Genus-2 implicit surface
// ---------------------------------------------------------------------

/// Smooth union of two overlapping torus distance fields, giving a
/// genus-2 surface with F < 0 inside.
pub struct GenusTwoLevel;

impl GenusTwoLevel {
    pub const BBOX: [(f64, f64); 3] = [(-2.5, 2.5), (-1.6, 1.6), (-0.8, 0.8)];

    fn torus_distance(x: Jet, y: Jet, z: Jet, cx: f64) -> Jet {
        // Distance to the circle of radius 1 centered at (cx, 0, 0) in
        // the z = 0 plane, minus the tube radius 0.35.
        let dx = x - Jet::constant(cx);
        let ring = (dx * dx + y * y).sqrt() - Jet::constant(1.0);
        (ring * ring + z * z).sqrt() - Jet::constant(0.35)
    }
}

impl LevelFn for GenusTwoLevel {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn eval_jet(&self, x: &[Jet]) -> Jet {
        let f1 = GenusTwoLevel::torus_distance(x[0], x[1], x[2], 0.9);
        let f2 = GenusTwoLevel::torus_distance(x[0], x[1], x[2], -0.9);
        // Smooth minimum: -log(exp(-k f1) + exp(-k f2)) / k.
        let k = Jet::constant(8.0);
        -((-k * f1).exp() + (-k * f2).exp()).ln() / k
    }
}

/// The genus-2 shape as an implicit surface (the shipped mesh is a
/// triangulation of this level set).
pub fn genus2_implicit() -> ImplicitSurface {
    ImplicitSurface::new(Arc::new(GenusTwoLevel), GenusTwoLevel::BBOX.to_vec())
        .expect("valid genus-2 level set")
}

// ---------------------------------------------------------------------
// Canonical unit spheres and their coordinates
// ---------------------------------------------------------------------

/// Canonical round unit sphere S^{n-1} in R^n as a chart, n in {2,3,4}.
pub fn unit_sphere_chart(ambient_dim: usize, backend: DiffBackend) -> Result<Chart> {
    let map: Arc<dyn SurfaceMap> = match ambient_dim {
        2 => Arc::new(EllipseMap { a: 1.0, b: 1.0 }),
        3 => Arc::new(EllipsoidMap {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }),
        4 => Arc::new(Ellipsoid4Map {
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
        }),
        n => {
            return Err(HopfError::Input(format!(
                "no canonical sphere chart in R^{n}"
            )))
        }
    };
    Ok(Chart::new(map, backend))
}

/// Chart coordinates of a unit vector under the canonical sphere chart.
/// Degenerate at the chart poles.
pub fn unit_sphere_coords(v: &[f64]) -> Result<Vec<f64>> {
    match v.len() {
        2 => Ok(vec![v[1].atan2(v[0]).rem_euclid(TAU)]),
        3 => {
            let th = v[2].clamp(-1.0, 1.0).acos();
            Ok(vec![th, v[1].atan2(v[0]).rem_euclid(TAU)])
        }
        4 => {
            let x = v[0].clamp(-1.0, 1.0).acos();
            let sx = x.sin();
            if sx < 1e-12 {
                return Err(HopfError::DegeneratePoint(
                    "sphere chart pole in coordinate recovery".into(),
                ));
            }
            let t = (v[1] / sx).clamp(-1.0, 1.0).acos();
            Ok(vec![x, t, v[3].atan2(v[2]).rem_euclid(TAU)])
        }
        n => Err(HopfError::Input(format!("no sphere coordinates in R^{n}"))),
    }
}

/// Winding number of the closed hypersurface around an ambient point q
/// (the Gauss integral): 0 outside, 1 inside for outward orientation.
/// Used by the orientation tests.
pub fn enclosure_winding(chart: &Chart, resolution: &[usize], q: &[f64]) -> Result<f64> {
    let n = chart.ambient_dim();
    let total = match n {
        2 => TAU,
        3 => 2.0 * TAU,
        4 => TAU * TAU / 2.0,
        _ => return Err(HopfError::Input("unsupported ambient dimension".into())),
    };
    let grid = crate::surfaces::quadrature::QuadGrid::for_chart(chart, resolution)?;
    grid.integrate(|u| {
        let gp = chart.gauss_point(u)?;
        let mut diff = gp.position.clone();
        for i in 0..n {
            diff[i] -= q[i];
        }
        let dist = diff.norm();
        Ok(diff.dot(&gp.normal) / dist.powi(n as i32) * gp.volume_element / total)
    })
}
