//! Independent estimators of the degree of the Gauss map: signed
//! preimage counting at a random regular value, the Gauss-Kronecker
//! curvature integral, the intrinsic Pfaffian integral (odd ambient
//! dimension), the transgression integral (even ambient dimension),
//! the planar winding number, and the discrete angle-defect estimator.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::connection::euler_form_integral;
use crate::corpus::{genus2_implicit, Hypersurface, ShapeBundle};
use crate::error::{HopfError, Result};
use crate::surfaces::chart::Chart;
use crate::surfaces::implicit::ImplicitSurface;
use crate::surfaces::mesh::TriMesh;
use crate::surfaces::quadrature::{halve_resolution, pairwise_sum, QuadGrid};
use crate::transgression::even_degree;

/// Volume of the unit sphere S^{n-1}.
pub fn sphere_volume(ambient_dim: usize) -> Result<f64> {
    use std::f64::consts::PI;
    match ambient_dim {
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        4 => Ok(2.0 * PI * PI),
        n => Err(HopfError::Input(format!("no sphere volume for R^{n}"))),
    }
}

pub const NEWTON_RESIDUAL_TOL: f64 = 1e-12;
pub const REGULARITY_TOL: f64 = 1e-6;
pub const DEDUP_RADIUS: f64 = 1e-6;
pub const MAX_DIRECTION_DRAWS: usize = 16;
pub const SCAN_NODES_PER_AXIS: usize = 64;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    /// Quadrature or scan nodes used.
    pub nodes: usize,
    /// Preimages found (preimage estimator only).
    pub preimages: usize,
    /// Direction draws rejected for non-regularity.
    pub rejected_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeEstimate {
    pub estimator: String,
    pub value: f64,
    pub error: f64,
    pub rounded: i64,
    pub diagnostics: Diagnostics,
}

impl DegreeEstimate {
    fn real(estimator: &str, value: f64, error: f64, diagnostics: Diagnostics) -> DegreeEstimate {
        DegreeEstimate {
            estimator: estimator.to_string(),
            value,
            error,
            rounded: value.round() as i64,
            diagnostics,
        }
    }

    fn integer(estimator: &str, k: i64, diagnostics: Diagnostics) -> DegreeEstimate {
        DegreeEstimate {
            estimator: estimator.to_string(),
            value: k as f64,
            error: 0.0,
            rounded: k,
            diagnostics,
        }
    }

    /// Verdict "consistent integer": the rounded value lies within the
    /// reported error (integer estimators are exact).
    pub fn is_consistent(&self) -> bool {
        (self.value - self.rounded as f64).abs() <= self.error.max(1e-12)
    }
}

/// Draw a uniform direction on S^{n-1} from the seeded generator.
fn draw_direction(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| -> f64 { StandardNormal.sample(rng) });
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector v.
fn perp_basis(v: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = v.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    // Gram-Schmidt the standard basis against v, skipping the axis most
    // aligned with it.
    let skip = v.iter().map(|x| x.abs()).enumerate().fold((0, 0.0), |m, (i, a)| {
        if a > m.1 {
            (i, a)
        } else {
            m
        }
    });
    for i in 0..n {
        if i == skip.0 {
            continue;
        }
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        e -= v * v.dot(&e);
        for b in &basis {
            let p = b.dot(&e);
            e -= b * p;
        }
        let norm = e.norm();
        basis.push(e / norm);
    }
    basis
}

enum ScanOutcome {
    /// Signed preimages (parameter point, sign of the Gauss Jacobian).
    Roots(Vec<(Vec<f64>, i64)>),
    /// A near-critical preimage or Newton stall: resample the direction.
    Degenerate(String),
}

/// Chart preimage solver with a cached normal field on a dense scan
/// grid, reusable across direction draws.
pub struct PreimageSolver {
    chart: Chart,
    dims: Vec<usize>,
    nodes: Vec<Vec<f64>>,
    normals: Vec<DVector<f64>>,
}

impl PreimageSolver {
    pub fn new(chart: &Chart, nodes_per_axis: usize) -> Result<PreimageSolver> {
        let d = chart.param_dim();
        let dom = chart.domain();
        let dims = vec![nodes_per_axis; d];
        let axes: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let (a, b) = dom[i];
                let h = (b - a) / nodes_per_axis as f64;
                (0..nodes_per_axis).map(|j| a + (j as f64 + 0.5) * h).collect()
            })
            .collect();
        let total: usize = dims.iter().product();
        let nodes: Vec<Vec<f64>> = (0..total)
            .map(|mut flat| {
                let mut u = vec![0.0; d];
                for i in (0..d).rev() {
                    u[i] = axes[i][flat % dims[i]];
                    flat /= dims[i];
                }
                u
            })
            .collect();
        let normals: Vec<Result<DVector<f64>>> = nodes
            .par_iter()
            .map(|u| Ok(chart.gauss_point(u)?.normal))
            .collect();
        let mut resolved = Vec::with_capacity(total);
        for n in normals {
            resolved.push(n?);
        }
        Ok(PreimageSolver {
            chart: chart.clone(),
            dims,
            nodes,
            normals: resolved,
        })
    }

    pub fn scan_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn neighbors(&self, flat: usize) -> Vec<Option<usize>> {
        let d = self.dims.len();
        let mut idx = vec![0usize; d];
        let mut rem = flat;
        for i in (0..d).rev() {
            idx[i] = rem % self.dims[i];
            rem /= self.dims[i];
        }
        let per = self.chart.periodic();
        let mut out = Vec::with_capacity(2 * d);
        for i in 0..d {
            for step in [-1i64, 1] {
                let j = idx[i] as i64 + step;
                let nj = if j < 0 || j >= self.dims[i] as i64 {
                    if per[i] {
                        Some(j.rem_euclid(self.dims[i] as i64) as usize)
                    } else {
                        None
                    }
                } else {
                    Some(j as usize)
                };
                out.push(nj.map(|nj| {
                    let mut f = 0usize;
                    for k in 0..d {
                        f = f * self.dims[k] + if k == i { nj } else { idx[k] };
                    }
                    f
                }));
            }
        }
        out
    }

    fn refine(&self, start: &[f64], v: &DVector<f64>, basis: &[DVector<f64>]) -> Result<NewtonEnd> {
        let d = self.chart.param_dim();
        let mut u = start.to_vec();
        for _ in 0..60 {
            self.chart.wrap(&mut u);
            if !self.chart.contains(&u) {
                return Ok(NewtonEnd::Escaped);
            }
            let gp = match self.chart.gauss_point(&u) {
                Ok(gp) => gp,
                Err(_) => return Ok(NewtonEnd::Escaped),
            };
            let full_res = (&gp.normal - v).norm();
            if full_res <= NEWTON_RESIDUAL_TOL {
                return Ok(NewtonEnd::Root(u, gp.gauss_kronecker()));
            }
            let mut r = DVector::zeros(d);
            let mut jac = DMatrix::zeros(d, d);
            for a in 0..d {
                r[a] = basis[a].dot(&(&gp.normal - v));
                for i in 0..d {
                    jac[(a, i)] = basis[a].dot(&gp.dnormal[i]);
                }
            }
            let delta = match jac.lu().solve(&r) {
                Some(x) => x,
                None => return Ok(NewtonEnd::Stalled(full_res)),
            };
            for i in 0..d {
                u[i] -= delta[i];
            }
        }
        self.chart.wrap(&mut u);
        let res = match self.chart.gauss_point(&u) {
            Ok(gp) => (&gp.normal - v).norm(),
            Err(_) => return Ok(NewtonEnd::Escaped),
        };
        Ok(NewtonEnd::Stalled(res))
    }

    fn find_preimages(&self, v: &DVector<f64>) -> Result<ScanOutcome> {
        let basis = perp_basis(v);
        // Local minima of |nu - v|^2 on the scan grid are the Newton
        // starting points.
        let scores: Vec<f64> = self.normals.iter().map(|n| (n - v).norm_squared()).collect();
        let mut candidates = Vec::new();
        for flat in 0..self.nodes.len() {
            if scores[flat] >= 1.0 {
                continue;
            }
            let is_min = self
                .neighbors(flat)
                .into_iter()
                .all(|nb| nb.map_or(true, |nb| scores[flat] <= scores[nb]));
            if is_min {
                candidates.push(flat);
            }
        }
        let mut roots: Vec<(Vec<f64>, i64)> = Vec::new();
        for flat in candidates {
            match self.refine(&self.nodes[flat], v, &basis)? {
                NewtonEnd::Root(u, det) => {
                    if det.abs() < REGULARITY_TOL {
                        return Ok(ScanOutcome::Degenerate(format!(
                            "|det dG| = {:.3e} at u = {u:?}",
                            det.abs()
                        )));
                    }
                    let dup = roots
                        .iter()
                        .any(|(r, _)| self.chart.param_distance(r, &u) <= DEDUP_RADIUS);
                    if !dup {
                        roots.push((u, if det > 0.0 { 1 } else { -1 }));
                    }
                }
                NewtonEnd::Escaped => {}
                NewtonEnd::Stalled(res) => {
                    if res < 1e-3 {
                        return Ok(ScanOutcome::Degenerate(format!(
                            "Newton stalled at residual {res:.3e}"
                        )));
                    }
                }
            }
        }
        Ok(ScanOutcome::Roots(roots))
    }

    /// Preimages of the unit direction v with their Gauss-Jacobian
    /// signs, or `None` when v is not a regular value (resample).
    pub fn preimages(&self, v: &DVector<f64>) -> Result<Option<Vec<(Vec<f64>, i64)>>> {
        match self.find_preimages(v)? {
            ScanOutcome::Roots(r) => Ok(Some(r)),
            ScanOutcome::Degenerate(_) => Ok(None),
        }
    }

    /// Signed preimage count at a seeded random regular value.
    pub fn degree(&self, seed: u64) -> Result<DegreeEstimate> {
        let n = self.chart.ambient_dim();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rejected = 0usize;
        let mut detail = String::new();
        for _ in 0..MAX_DIRECTION_DRAWS {
            let v = draw_direction(&mut rng, n);
            match self.find_preimages(&v)? {
                ScanOutcome::Roots(roots) => {
                    let sum: i64 = roots.iter().map(|(_, s)| s).sum();
                    return Ok(DegreeEstimate::integer(
                        "preimage",
                        sum,
                        Diagnostics {
                            nodes: self.nodes.len(),
                            preimages: roots.len(),
                            rejected_samples: rejected,
                        },
                    ));
                }
                ScanOutcome::Degenerate(d) => {
                    rejected += 1;
                    detail = d;
                }
            }
        }
        Err(HopfError::NonRegularValue {
            draws: MAX_DIRECTION_DRAWS,
            detail,
        })
    }
}

enum NewtonEnd {
    Root(Vec<f64>, f64),
    Escaped,
    Stalled(f64),
}

/// Signed preimage counting on an implicit surface: dense scan of the
/// bounding box for near-surface points whose normal is close to v,
/// then Newton on the joint system (F = 0, normal aligned with v).
pub fn degree_preimage_implicit(
    surface: &ImplicitSurface,
    seed: u64,
    nodes_per_axis: usize,
) -> Result<DegreeEstimate> {
    let n = surface.ambient_dim();
    if n != 3 {
        return Err(HopfError::Input(
            "implicit preimage counting is implemented for R^3".into(),
        ));
    }
    // Near-surface scan points with their unit normals.
    let steps: Vec<f64> = surface
        .bbox
        .iter()
        .map(|&(a, b)| (b - a) / nodes_per_axis as f64)
        .collect();
    let cell = steps.iter().fold(0.0f64, |m, &s| m.max(s));
    let total = nodes_per_axis.pow(3);
    let sampled: Vec<Option<(Vec<f64>, DVector<f64>)>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let k = flat % nodes_per_axis;
            let j = (flat / nodes_per_axis) % nodes_per_axis;
            let i = flat / (nodes_per_axis * nodes_per_axis);
            let x = vec![
                surface.bbox[0].0 + (i as f64 + 0.5) * steps[0],
                surface.bbox[1].0 + (j as f64 + 0.5) * steps[1],
                surface.bbox[2].0 + (k as f64 + 0.5) * steps[2],
            ];
            let (f, grad, _) = surface.gradient_hessian(&x);
            let gn = grad.norm();
            if gn < 1e-8 || f.abs() > 1.5 * cell * gn {
                return None;
            }
            Some((x, grad / gn))
        })
        .collect();
    let near: Vec<(Vec<f64>, DVector<f64>)> = sampled.into_iter().flatten().collect();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0usize;
    let mut detail = String::new();
    'draws: for _ in 0..MAX_DIRECTION_DRAWS {
        let v = draw_direction(&mut rng, n);
        let basis = perp_basis(&v);
        // Greedy spatially-separated candidate selection by alignment.
        let mut scored: Vec<(f64, usize)> = near
            .iter()
            .enumerate()
            .filter_map(|(i, (_, nu))| {
                let s = (nu - &v).norm_squared();
                (s < 0.5).then_some((s, i))
            })
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut starts: Vec<usize> = Vec::new();
        for &(_, i) in &scored {
            let xi = &near[i].0;
            let separated = starts.iter().all(|&j| {
                let xj = &near[j].0;
                let d2: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() > 2.5 * cell
            });
            if separated {
                starts.push(i);
            }
        }
        let mut roots: Vec<(Vec<f64>, i64)> = Vec::new();
        for &i in &starts {
            let mut x = near[i].0.clone();
            let mut converged = false;
            for _ in 0..80 {
                let (f, grad, hess) = surface.gradient_hessian(&x);
                let gn = grad.norm();
                if gn < 1e-8 {
                    break;
                }
                let nu = &grad / gn;
                let resid = (f.powi(2) + (&nu - &v).norm_squared()).sqrt();
                if f.abs() < 1e-12 && (&nu - &v).norm() < NEWTON_RESIDUAL_TOL {
                    converged = true;
                    break;
                }
                // Rows: grad F; B^T d nu with d nu = (I - nu nu^T) H / |grad F|.
                let proj = DMatrix::identity(n, n) - &nu * nu.transpose();
                let dnu = &proj * &hess / gn;
                let mut jac = DMatrix::zeros(n, n);
                let mut r = DVector::zeros(n);
                for c in 0..n {
                    jac[(0, c)] = grad[c];
                }
                r[0] = f;
                for a in 0..n - 1 {
                    r[a + 1] = basis[a].dot(&(&nu - &v));
                    for c in 0..n {
                        jac[(a + 1, c)] = basis[a].dot(&dnu.column(c).clone_owned());
                    }
                }
                let delta = match jac.lu().solve(&r) {
                    Some(dlt) => dlt,
                    None => break,
                };
                for c in 0..n {
                    x[c] -= delta[c];
                }
                if resid > 1e6 {
                    break;
                }
            }
            if !converged {
                continue;
            }
            let gd = surface.gauss_data(&x)?;
            if gd.gauss_kronecker.abs() < REGULARITY_TOL {
                rejected += 1;
                detail = format!("|det dG| = {:.3e} at x = {x:?}", gd.gauss_kronecker.abs());
                continue 'draws;
            }
            let dup = roots.iter().any(|(rx, _)| {
                let d2: f64 = rx.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() <= DEDUP_RADIUS
            });
            if !dup {
                roots.push((x.clone(), if gd.gauss_kronecker > 0.0 { 1 } else { -1 }));
            }
        }
        let sum: i64 = roots.iter().map(|(_, s)| s).sum();
        return Ok(DegreeEstimate::integer(
            "preimage",
            sum,
            Diagnostics {
                nodes: total,
                preimages: roots.len(),
                rejected_samples: rejected,
            },
        ));
    }
    Err(HopfError::NonRegularValue {
        draws: MAX_DIRECTION_DRAWS,
        detail,
    })
}

/// Convenience wrapper constructing a fresh solver.
pub fn degree_preimage(chart: &Chart, seed: u64) -> Result<DegreeEstimate> {
    PreimageSolver::new(chart, SCAN_NODES_PER_AXIS)?.degree(seed)
}

/// Total Gauss-Kronecker curvature over the sphere volume, with a
/// Richardson error estimate from a half-resolution run.
pub fn degree_gk(chart: &Chart, resolution: &[usize]) -> Result<DegreeEstimate> {
    let vol = sphere_volume(chart.ambient_dim())?;
    let run = |res: &[usize]| -> Result<f64> {
        let grid = QuadGrid::for_chart(chart, res)?;
        grid.integrate(|u| {
            let gp = chart.gauss_point(u)?;
            Ok(gp.gauss_kronecker() * gp.volume_element / vol)
        })
    };
    let fine = run(resolution)?;
    let coarse = run(&halve_resolution(resolution))?;
    Ok(DegreeEstimate::real(
        "gk",
        fine,
        (fine - coarse).abs(),
        Diagnostics {
            nodes: resolution.iter().product(),
            ..Default::default()
        },
    ))
}

/// Gauss-Kronecker integral of an implicit surface estimated on a
/// triangulation: face centroids are projected onto the level set and
/// weighted by face area. A vertex-projected variant supplies the
/// error estimate.
pub fn degree_gk_implicit(surface: &ImplicitSurface, mesh: &TriMesh) -> Result<DegreeEstimate> {
    let vol = sphere_volume(surface.ambient_dim())?;
    let per_face = |use_vertices: bool| -> Result<f64> {
        let terms: Vec<Result<f64>> = (0..mesh.face_count())
            .into_par_iter()
            .map(|fi| {
                let (area, centroid) = mesh.face_area_centroid(fi);
                let k = if use_vertices {
                    let f = mesh.faces[fi];
                    let mut acc = 0.0;
                    for &vi in &f {
                        let p = surface.project(&mesh.vertices[vi])?;
                        acc += surface.gauss_data(&p)?.gauss_kronecker;
                    }
                    acc / 3.0
                } else {
                    let p = surface.project(&centroid)?;
                    surface.gauss_data(&p)?.gauss_kronecker
                };
                Ok(k * area / vol)
            })
            .collect();
        let mut vals = Vec::with_capacity(terms.len());
        for t in terms {
            vals.push(t?);
        }
        Ok(pairwise_sum(&vals))
    };
    let centroid_est = per_face(false)?;
    let vertex_est = per_face(true)?;
    Ok(DegreeEstimate::real(
        "gk",
        centroid_est,
        (centroid_est - vertex_est).abs(),
        Diagnostics {
            nodes: mesh.face_count(),
            ..Default::default()
        },
    ))
}

/// Odd-ambient-dimension degree: half the integral of the intrinsic
/// Euler form (no shape operator involved).
pub fn degree_pfaffian(chart: &Chart, resolution: &[usize]) -> Result<DegreeEstimate> {
    if chart.ambient_dim() % 2 == 0 {
        return Err(HopfError::UnsupportedParity(format!(
            "the Pfaffian degree formula needs odd ambient dimension, got {}",
            chart.ambient_dim()
        )));
    }
    let fine = 0.5 * euler_form_integral(chart, resolution)?;
    let coarse = 0.5 * euler_form_integral(chart, &halve_resolution(resolution))?;
    Ok(DegreeEstimate::real(
        "pfaffian",
        fine,
        (fine - coarse).abs(),
        Diagnostics {
            nodes: resolution.iter().product(),
            ..Default::default()
        },
    ))
}

/// Even-ambient-dimension degree via the transgression form.
pub fn degree_tpf(chart: &Chart, resolution: &[usize]) -> Result<DegreeEstimate> {
    let (value, error) = even_degree(chart, resolution)?;
    Ok(DegreeEstimate::real(
        "tpf",
        value,
        error,
        Diagnostics {
            nodes: resolution.iter().product(),
            ..Default::default()
        },
    ))
}

/// Planar winding number of the normal by continuous angle lift.
/// Doubles the resolution (up to four times) when the lift jumps by
/// more than pi between samples.
pub fn winding_number(chart: &Chart, resolution: usize) -> Result<DegreeEstimate> {
    if chart.ambient_dim() != 2 {
        return Err(HopfError::Input("winding number needs a planar curve".into()));
    }
    let (a, b) = chart.domain()[0];
    let mut n = resolution.max(8);
    for _ in 0..=4 {
        let angles: Vec<Result<f64>> = (0..=n)
            .into_par_iter()
            .map(|j| {
                let u = [a + (b - a) * (j % n) as f64 / n as f64];
                let gp = chart.gauss_point(&u)?;
                Ok(gp.normal[1].atan2(gp.normal[0]))
            })
            .collect();
        let mut lift = Vec::with_capacity(n + 1);
        for v in angles {
            lift.push(v?);
        }
        let mut total = 0.0;
        let mut ok = true;
        for j in 0..n {
            let mut d = lift[j + 1] - lift[j];
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            if d.abs() >= std::f64::consts::PI - 1e-9 {
                ok = false;
                break;
            }
            total += d;
        }
        if ok {
            let value = total / (2.0 * std::f64::consts::PI);
            return Ok(DegreeEstimate::real(
                "winding",
                value,
                (value - value.round()).abs(),
                Diagnostics {
                    nodes: n,
                    ..Default::default()
                },
            ));
        }
        n *= 2;
    }
    Err(HopfError::Resolution(format!(
        "normal angle jumps by more than pi even at {n} samples"
    )))
}

/// Discrete estimator: sum of angle defects over 4 pi.
pub fn degree_mesh(mesh: &TriMesh) -> Result<DegreeEstimate> {
    let value = mesh.angle_defect_sum() / (4.0 * std::f64::consts::PI);
    // Distance to the nearest half-integer (the estimator's exact
    // combinatorial values are chi/2).
    let error = (value - (2.0 * value).round() / 2.0).abs();
    Ok(DegreeEstimate::real(
        "mesh",
        value,
        error,
        Diagnostics {
            nodes: mesh.vertex_count(),
            ..Default::default()
        },
    ))
}

/// Run every estimator applicable to the shape at its default (or
/// overridden) resolution.
pub fn estimate_all(bundle: &ShapeBundle, seed: u64) -> Result<Vec<DegreeEstimate>> {
    let mut out = Vec::new();
    match &bundle.surface {
        Hypersurface::Chart(chart) => {
            let res = &bundle.record.default_resolution;
            out.push(degree_preimage(chart, seed)?);
            out.push(degree_gk(chart, res)?);
            match chart.ambient_dim() {
                2 => {
                    out.push(winding_number(chart, res[0])?);
                    out.push(degree_tpf(chart, res)?);
                }
                3 => out.push(degree_pfaffian(chart, res)?),
                4 => out.push(degree_tpf(chart, res)?),
                _ => {}
            }
        }
        Hypersurface::Mesh(mesh) => {
            out.push(degree_mesh(mesh)?);
            if bundle.record.name == "genus2_mesh" {
                let implicit = genus2_implicit();
                out.push(degree_gk_implicit(&implicit, mesh)?);
                out.push(degree_preimage_implicit(&implicit, seed, SCAN_NODES_PER_AXIS)?);
            }
        }
        Hypersurface::Implicit(_) => {
            return Err(HopfError::Input(
                "standalone implicit shapes are not in the catalog".into(),
            ))
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build, ShapeConfig};
    use approx::assert_relative_eq;

    fn chart_of(name: &str) -> Chart {
        match build(&ShapeConfig::named(name)).unwrap().surface {
            Hypersurface::Chart(c) => c,
            _ => panic!("expected chart"),
        }
    }

    #[test]
    fn sphere_preimage_is_one() {
        let chart = chart_of("sphere");
        let est = degree_preimage(&chart, 42).unwrap();
        assert_eq!(est.rounded, 1);
        assert_eq!(est.diagnostics.preimages, 1);
    }

    #[test]
    fn torus_preimage_is_zero_with_two_points() {
        let chart = chart_of("torus");
        let est = degree_preimage(&chart, 7).unwrap();
        assert_eq!(est.rounded, 0);
        assert_eq!(est.diagnostics.preimages, 2);
    }

    #[test]
    fn circle_preimage_is_one() {
        let chart = chart_of("circle");
        let est = degree_preimage(&chart, 3).unwrap();
        assert_eq!(est.rounded, 1);
        assert_eq!(est.diagnostics.preimages, 1);
    }

    #[test]
    fn gk_on_sphere_and_ellipse() {
        let sphere = chart_of("sphere");
        let est = degree_gk(&sphere, &[32, 64]).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-9);
        let ellipse = chart_of("ellipse");
        let est = degree_gk(&ellipse, &[256]).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn winding_numbers() {
        for name in ["circle", "ellipse", "bumpy_circle"] {
            let est = winding_number(&chart_of(name), 256).unwrap();
            assert_eq!(est.rounded, 1, "{name}");
            assert!(est.error < 1e-9, "{name}: {}", est.error);
        }
    }

    #[test]
    fn pfaffian_parity_guard() {
        let chart = chart_of("circle");
        assert!(matches!(
            degree_pfaffian(&chart, &[64]),
            Err(HopfError::UnsupportedParity(_))
        ));
        let chart = chart_of("sphere3");
        assert!(matches!(
            degree_pfaffian(&chart, &[8, 8, 8]),
            Err(HopfError::UnsupportedParity(_))
        ));
    }

    #[test]
    fn mesh_degrees() {
        let tetra = crate::surfaces::mesh::tetrahedron();
        let est = degree_mesh(&tetra).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-12);
        let ico = crate::surfaces::mesh::icosphere(2, 1.0);
        assert_relative_eq!(degree_mesh(&ico).unwrap().value, 1.0, epsilon = 1e-9);
        let torus = crate::surfaces::mesh::torus_grid(32, 32, 2.0, 1.0);
        assert_relative_eq!(degree_mesh(&torus).unwrap().value, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn tpf_degree_on_circle() {
        let est = degree_tpf(&chart_of("circle"), &[64]).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-12);
    }
}
