//! Euler-characteristic oracles: combinatorial counting on meshes,
//! Morse theory for height functions on charts, and the annotated
//! characteristic of the enclosed solid with its boundary-Morse
//! cross-check.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::connection::christoffel;
use crate::corpus::{Hypersurface, ShapeBundle};
use crate::degree::{PreimageSolver, MAX_DIRECTION_DRAWS, SCAN_NODES_PER_AXIS};
use crate::error::{HopfError, Result};
use crate::surfaces::chart::{dot, Chart};
use crate::surfaces::mesh::TriMesh;

/// Critical point of a height function h_v on a chart.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub u: Vec<f64>,
    /// Height value at the point.
    pub value: f64,
    /// Number of negative eigenvalues of the covariant Hessian.
    pub index: usize,
    /// Whether the outward normal equals +v (gradient of h_v points
    /// outward) or -v.
    pub outward: bool,
}

/// Combinatorial Euler characteristic V - E + F.
pub fn chi_mesh(mesh: &TriMesh) -> i64 {
    mesh.euler_characteristic()
}

/// Covariant Hessian of h_v at a putative critical point and its Morse
/// index; `None` when an eigenvalue is too close to zero to classify.
fn morse_index(chart: &Chart, u: &[f64], v: &DVector<f64>) -> Result<Option<usize>> {
    let gp = chart.gauss_point(u)?;
    let d = gp.param_dim();
    let gamma = christoffel(&gp.jets, &gp.metric_inv);
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut hij = dot(&gp.jets.d2[i][j], v.as_slice());
            for k in 0..d {
                hij -= gamma[k][i][j] * dot(&gp.jets.d1[k], v.as_slice());
            }
            hess[(i, j)] = hij;
        }
    }
    let hess = (&hess + hess.transpose()) * 0.5;
    let eig = hess.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let min = eig.eigenvalues.iter().fold(f64::MAX, |m, l| m.min(l.abs()));
    if min < 1e-8 * scale.max(1.0) {
        return Ok(None);
    }
    Ok(Some(eig.eigenvalues.iter().filter(|&&l| l < 0.0).count()))
}

/// All critical points of h_v, found as Gauss-map preimages of +v and
/// -v. `None` when v is not Morse-generic (degenerate preimage or
/// degenerate Hessian): the caller should resample.
pub fn critical_points(
    chart: &Chart,
    solver: &PreimageSolver,
    v: &DVector<f64>,
) -> Result<Option<Vec<CriticalPoint>>> {
    let mut points = Vec::new();
    for (sign, outward) in [(1.0, true), (-1.0, false)] {
        let target = v * sign;
        let roots = match solver.preimages(&target)? {
            Some(r) => r,
            None => return Ok(None),
        };
        for (u, _) in roots {
            let index = match morse_index(chart, &u, v)? {
                Some(i) => i,
                None => return Ok(None),
            };
            let pos = chart.position(&u);
            points.push(CriticalPoint {
                value: dot(&pos, v.as_slice()),
                u,
                index,
                outward,
            });
        }
    }
    Ok(Some(points))
}

fn draw_direction(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| -> f64 { StandardNormal.sample(rng) });
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Morse-theoretic Euler characteristic of the hypersurface:
/// chi = sum over critical points of (-1)^index, for a seeded generic
/// direction (resampled on degeneracy).
pub fn chi_morse(chart: &Chart, seed: u64) -> Result<i64> {
    let solver = PreimageSolver::new(chart, SCAN_NODES_PER_AXIS)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DIRECTION_DRAWS {
        let v = draw_direction(&mut rng, chart.ambient_dim());
        if let Some(points) = critical_points(chart, &solver, &v)? {
            return Ok(points
                .iter()
                .map(|p| if p.index % 2 == 0 { 1 } else { -1 })
                .sum());
        }
    }
    Err(HopfError::NonRegularValue {
        draws: MAX_DIRECTION_DRAWS,
        detail: "no Morse-generic height direction found".into(),
    })
}

/// chi_morse for a caller-supplied direction; `None` when the direction
/// is not Morse-generic.
pub fn chi_morse_direction(
    chart: &Chart,
    solver: &PreimageSolver,
    v: &DVector<f64>,
) -> Result<Option<i64>> {
    Ok(critical_points(chart, solver, v)?.map(|points| {
        points
            .iter()
            .map(|p| if p.index % 2 == 0 { 1 } else { -1 })
            .sum()
    }))
}

/// Euler characteristic of the enclosed solid W.
#[derive(Debug, Clone, Serialize)]
pub struct ChiSolid {
    /// The annotated ground-truth value.
    pub annotated: i64,
    /// Boundary-Morse cross-check, when the shape admits it: the count
    /// of (-1)^index over inward-normal critical points.
    pub morse_check: Option<i64>,
}

/// Annotated chi(W) with a boundary-Morse cross-check for chart shapes:
/// a linear height function on W has no interior critical points, so
/// chi(W) equals the signed count over boundary critical points whose
/// gradient points into W (normal equal to -v).
pub fn chi_solid(bundle: &ShapeBundle, seed: u64) -> Result<ChiSolid> {
    let annotated = bundle.record.chi_solid;
    let chart = match &bundle.surface {
        Hypersurface::Chart(c) => c,
        _ => {
            return Ok(ChiSolid {
                annotated,
                morse_check: None,
            })
        }
    };
    let solver = PreimageSolver::new(chart, SCAN_NODES_PER_AXIS)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DIRECTION_DRAWS {
        let v = draw_direction(&mut rng, chart.ambient_dim());
        if let Some(points) = critical_points(chart, &solver, &v)? {
            let check = points
                .iter()
                .filter(|p| !p.outward)
                .map(|p| if p.index % 2 == 0 { 1 } else { -1 })
                .sum();
            return Ok(ChiSolid {
                annotated,
                morse_check: Some(check),
            });
        }
    }
    Err(HopfError::NonRegularValue {
        draws: MAX_DIRECTION_DRAWS,
        detail: "no Morse-generic height direction found".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build, ShapeConfig};

    fn chart_of(name: &str) -> Chart {
        match build(&ShapeConfig::named(name)).unwrap().surface {
            Hypersurface::Chart(c) => c,
            _ => panic!("expected chart"),
        }
    }

    #[test]
    fn chi_of_chart_shapes() {
        for (name, expected) in [
            ("circle", 0i64),
            ("ellipse", 0),
            ("sphere", 2),
            ("ellipsoid", 2),
            ("torus", 0),
            ("sphere3", 0),
            ("tube_s1xs2", 0),
        ] {
            let chi = chi_morse(&chart_of(name), 11).unwrap();
            assert_eq!(chi, expected, "{name}");
        }
    }

    #[test]
    fn chi_of_meshes() {
        assert_eq!(chi_mesh(&crate::surfaces::mesh::icosphere(2, 1.0)), 2);
        assert_eq!(chi_mesh(&crate::surfaces::mesh::torus_grid(32, 32, 2.0, 1.0)), 0);
    }

    #[test]
    fn solid_morse_cross_check() {
        for (name, expected) in [("ellipse", 1i64), ("sphere", 1), ("torus", 0), ("sphere3", 1)] {
            let bundle = build(&ShapeConfig::named(name)).unwrap();
            let cs = chi_solid(&bundle, 5).unwrap();
            assert_eq!(cs.annotated, expected, "{name}");
            assert_eq!(cs.morse_check, Some(expected), "{name}");
        }
    }

    #[test]
    fn torus_critical_points() {
        let chart = chart_of("torus");
        let solver = PreimageSolver::new(&chart, 64).unwrap();
        // A tilted direction is Morse-generic for the torus and must
        // produce four critical points with indices 0, 1, 1, 2.
        let v = DVector::from_vec(vec![0.2, 0.3, 0.93]).normalize();
        let points = critical_points(&chart, &solver, &v).unwrap().unwrap();
        assert_eq!(points.len(), 4);
        let mut indices: Vec<usize> = points.iter().map(|p| p.index).collect();
        indices.sort_unstable();
        assert_eq!(indices, vec![0, 1, 1, 2]);
    }
}
