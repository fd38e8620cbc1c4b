//! Parametrized charts, differentiation backends and Gauss-map data.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{HopfError, Result};
use crate::surfaces::jet::Jet;

/// Position, first and second derivatives of an immersion at one
/// parameter point. `d1[i]` is the i-th partial, `d2[i][j]` the mixed
/// second partial; all vectors are ambient.
#[derive(Debug, Clone)]
pub struct Jets {
    pub pos: Vec<f64>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<Vec<f64>>>,
}

/// A smooth immersion of a rectangle into R^n. Implementors provide the
/// formula through dual numbers plus hand-written analytic jets.
pub trait SurfaceMap: Send + Sync {
    fn ambient_dim(&self) -> usize;
    fn param_dim(&self) -> usize;
    fn domain(&self) -> Vec<(f64, f64)>;
    fn periodic(&self) -> Vec<bool>;

    /// The chart formula evaluated on jets (dual numbers).
    fn position_jet(&self, u: &[Jet]) -> Vec<Jet>;

    /// Closed-form jets; shapes in the corpus all provide these.
    fn analytic_jets(&self, _u: &[f64]) -> Option<Jets> {
        None
    }

    fn position(&self, u: &[f64]) -> Vec<f64> {
        if let Some(j) = self.analytic_jets(u) {
            return j.pos;
        }
        let ju: Vec<Jet> = u.iter().map(|&x| Jet::constant(x)).collect();
        self.position_jet(&ju).into_iter().map(|j| j.v).collect()
    }
}

/// How derivatives of the chart map are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffBackend {
    /// Caller-supplied exact jets.
    Analytic,
    /// Forward-mode dual numbers through the chart formula.
    Dual,
    /// Central finite differences, steps h1 (first) and h2 (second).
    FiniteDiff { h1: f64, h2: f64 },
}

impl Default for DiffBackend {
    fn default() -> Self {
        DiffBackend::Analytic
    }
}

pub const DEFAULT_FD_H1: f64 = 1e-5;
pub const DEFAULT_FD_H2: f64 = 5e-4;

#[derive(Clone)]
pub struct Chart {
    pub map: Arc<dyn SurfaceMap>,
    pub backend: DiffBackend,
}

impl Chart {
    pub fn new(map: Arc<dyn SurfaceMap>, backend: DiffBackend) -> Chart {
        Chart { map, backend }
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.ambient_dim()
    }

    pub fn param_dim(&self) -> usize {
        self.map.param_dim()
    }

    pub fn domain(&self) -> Vec<(f64, f64)> {
        self.map.domain()
    }

    pub fn periodic(&self) -> Vec<bool> {
        self.map.periodic()
    }

    /// Wrap periodic coordinates into their fundamental domain.
    pub fn wrap(&self, u: &mut [f64]) {
        let dom = self.domain();
        let per = self.periodic();
        for (i, x) in u.iter_mut().enumerate() {
            if per[i] {
                let (a, b) = dom[i];
                let len = b - a;
                *x = a + (*x - a).rem_euclid(len);
            }
        }
    }

    /// Is `u` within the chart domain (periodic axes always pass)?
    pub fn contains(&self, u: &[f64]) -> bool {
        let dom = self.domain();
        let per = self.periodic();
        u.iter().enumerate().all(|(i, &x)| {
            per[i] || (x >= dom[i].0 && x <= dom[i].1)
        })
    }

    /// Distance in parameter space respecting periodic identifications.
    pub fn param_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let dom = self.domain();
        let per = self.periodic();
        let mut s = 0.0;
        for i in 0..a.len() {
            let mut d = a[i] - b[i];
            if per[i] {
                let len = dom[i].1 - dom[i].0;
                d = d.rem_euclid(len);
                if d > len / 2.0 {
                    d -= len;
                }
            }
            s += d * d;
        }
        s.sqrt()
    }

    pub fn position(&self, u: &[f64]) -> Vec<f64> {
        self.map.position(u)
    }

    /// First and second derivatives via the active backend.
    pub fn jets(&self, u: &[f64]) -> Result<Jets> {
        match self.backend {
            DiffBackend::Analytic => self.map.analytic_jets(u).ok_or_else(|| {
                HopfError::Input("shape does not provide analytic jets".into())
            }),
            DiffBackend::Dual => Ok(self.dual_jets(u)),
            DiffBackend::FiniteDiff { h1, h2 } => Ok(self.fd_jets(u, h1, h2)),
        }
    }

    fn dual_jets(&self, u: &[f64]) -> Jets {
        let d = u.len();
        let ju: Vec<Jet> = u
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(x, i))
            .collect();
        let out = self.map.position_jet(&ju);
        let n = out.len();
        let pos: Vec<f64> = out.iter().map(|j| j.v).collect();
        let d1: Vec<Vec<f64>> = (0..d)
            .map(|i| out.iter().map(|j| j.g[i]).collect())
            .collect();
        let d2: Vec<Vec<Vec<f64>>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| out.iter().map(|jet| jet.h[i][j]).collect())
                    .collect()
            })
            .collect();
        debug_assert_eq!(n, self.ambient_dim());
        Jets { pos, d1, d2 }
    }

    fn fd_jets(&self, u: &[f64], h1: f64, h2: f64) -> Jets {
        let d = u.len();
        let pos = self.map.position(u);
        let n = pos.len();
        let eval = |du: &[f64]| -> Vec<f64> {
            let shifted: Vec<f64> = u.iter().zip(du).map(|(a, b)| a + b).collect();
            self.map.position(&shifted)
        };
        let mut d1 = vec![vec![0.0; n]; d];
        for i in 0..d {
            let mut dp = vec![0.0; d];
            dp[i] = h1;
            let fp = eval(&dp);
            dp[i] = -h1;
            let fm = eval(&dp);
            for k in 0..n {
                d1[i][k] = (fp[k] - fm[k]) / (2.0 * h1);
            }
        }
        let mut d2 = vec![vec![vec![0.0; n]; d]; d];
        for i in 0..d {
            let mut dp = vec![0.0; d];
            dp[i] = h2;
            let fp = eval(&dp);
            dp[i] = -h2;
            let fm = eval(&dp);
            for k in 0..n {
                d2[i][i][k] = (fp[k] - 2.0 * pos[k] + fm[k]) / (h2 * h2);
            }
            for j in i + 1..d {
                let mut dq = vec![0.0; d];
                dq[i] = h2;
                dq[j] = h2;
                let fpp = eval(&dq);
                dq[j] = -h2;
                let fpm = eval(&dq);
                dq[i] = -h2;
                let fmm = eval(&dq);
                dq[j] = h2;
                let fmp = eval(&dq);
                for k in 0..n {
                    let v = (fpp[k] - fpm[k] - fmp[k] + fmm[k]) / (4.0 * h2 * h2);
                    d2[i][j][k] = v;
                    d2[j][i][k] = v;
                }
            }
        }
        Jets { pos, d1, d2 }
    }

    pub fn gauss_point(&self, u: &[f64]) -> Result<GaussPoint> {
        let jets = self.jets(u)?;
        GaussPoint::from_jets(u, jets)
    }
}

/// Generalized cross product of n-1 vectors in R^n, signed so that the
/// determinant det[cross, v_1, ..., v_{n-1}] is nonnegative (equal to
/// |cross|^2). Supports n = 2, 3, 4.
pub fn generalized_cross(cols: &[&[f64]]) -> Vec<f64> {
    let n = cols.len() + 1;
    match n {
        2 => {
            let t = cols[0];
            vec![t[1], -t[0]]
        }
        3 => {
            let (a, b) = (cols[0], cols[1]);
            vec![
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        }
        4 => {
            let (a, b, c) = (cols[0], cols[1], cols[2]);
            let det3 = |r: [usize; 3]| -> f64 {
                a[r[0]] * (b[r[1]] * c[r[2]] - b[r[2]] * c[r[1]])
                    - a[r[1]] * (b[r[0]] * c[r[2]] - b[r[2]] * c[r[0]])
                    + a[r[2]] * (b[r[0]] * c[r[1]] - b[r[1]] * c[r[0]])
            };
            // Expansion of det[v | a b c] along the first column:
            // det = sum_i (-1)^{i} v_i * M_i with M_i the minor dropping row i.
            vec![
                det3([1, 2, 3]),
                -det3([0, 2, 3]),
                det3([0, 1, 3]),
                -det3([0, 1, 2]),
            ]
        }
        _ => panic!("generalized_cross supports ambient dim 2..=4"),
    }
}

/// Pointwise Gauss-map package: outward unit normal, fundamental forms,
/// shape operator and an oriented orthonormal tangent frame.
#[derive(Debug, Clone)]
pub struct GaussPoint {
    pub u: Vec<f64>,
    pub position: DVector<f64>,
    /// Unit normal; outward provided the chart follows the corpus
    /// orientation convention (checked by the ray-parity tests).
    pub normal: DVector<f64>,
    /// Ambient derivatives of the unit normal along each chart direction.
    pub dnormal: Vec<DVector<f64>>,
    /// Orthonormal tangent frame e_1..e_{n-1}; (normal, e_1, ..) is a
    /// positively oriented ambient basis.
    pub tangent_frame: Vec<DVector<f64>>,
    /// Gram-Schmidt coefficients: e_a = sum_i frame_coeffs[(i, a)] d_i psi.
    pub frame_coeffs: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    /// II_ij = <d_i nu, d_j psi>; with this sign the unit sphere has S = +I.
    pub second_form: DMatrix<f64>,
    /// Shape operator S = g^{-1} II in the chart basis; equals the
    /// differential of the Gauss map.
    pub shape_operator: DMatrix<f64>,
    /// sqrt(det g).
    pub volume_element: f64,
    pub jets: Jets,
}

pub const IMMERSION_TOL: f64 = 1e-8;

impl GaussPoint {
    pub fn from_jets(u: &[f64], jets: Jets) -> Result<GaussPoint> {
        let n = jets.pos.len();
        let d = jets.d1.len();
        if d + 1 != n {
            return Err(HopfError::Input(format!(
                "not a hypersurface: {d} params in R^{n}"
            )));
        }
        let mut metric = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                metric[(i, j)] = dot(&jets.d1[i], &jets.d1[j]);
            }
        }
        let det_g = metric.clone().determinant();
        if !(det_g > 0.0) || det_g.sqrt() < IMMERSION_TOL {
            return Err(HopfError::DegeneratePoint(format!(
                "rank-deficient Jacobian at u = {u:?} (det g = {det_g:.3e})"
            )));
        }
        let metric_inv = metric
            .clone()
            .try_inverse()
            .ok_or_else(|| HopfError::DegeneratePoint(format!("singular metric at u = {u:?}")))?;

        let cols: Vec<&[f64]> = jets.d1.iter().map(|v| v.as_slice()).collect();
        let raw = generalized_cross(&cols);
        let norm = dot(&raw, &raw).sqrt();
        if norm < IMMERSION_TOL {
            return Err(HopfError::DegeneratePoint(format!(
                "vanishing normal at u = {u:?}"
            )));
        }
        let normal: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        // |raw| equals sqrt(det g).
        let volume_element = norm;

        // d_k(raw) by Leibniz over the multilinear cross product, then
        // project out the normal component to differentiate raw/|raw|.
        let mut dnormal = Vec::with_capacity(d);
        for k in 0..d {
            let mut draw = vec![0.0; n];
            for j in 0..d {
                let replaced: Vec<&[f64]> = (0..d)
                    .map(|m| {
                        if m == j {
                            jets.d2[k][j].as_slice()
                        } else {
                            jets.d1[m].as_slice()
                        }
                    })
                    .collect();
                let term = generalized_cross(&replaced);
                for i in 0..n {
                    draw[i] += term[i];
                }
            }
            let radial = dot(&normal, &draw);
            let dn: Vec<f64> = (0..n)
                .map(|i| (draw[i] - normal[i] * radial) / norm)
                .collect();
            dnormal.push(DVector::from_vec(dn));
        }

        let mut second_form = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                second_form[(i, j)] = dot(dnormal[i].as_slice(), &jets.d1[j]);
            }
        }
        // Symmetric analytically; average away roundoff.
        let second_form = (&second_form + second_form.transpose()) * 0.5;
        let shape_operator = &metric_inv * &second_form;

        // Oriented orthonormal tangent frame by Gram-Schmidt on the chart
        // basis. frame_coeffs is upper triangular, so the frame keeps the
        // chart orientation and (normal, frame) stays positively oriented.
        let mut tangent_frame: Vec<DVector<f64>> = Vec::with_capacity(d);
        let mut frame_coeffs = DMatrix::zeros(d, d);
        for a in 0..d {
            let mut v = DVector::from_vec(jets.d1[a].clone());
            let mut coeff = DVector::zeros(d);
            coeff[a] = 1.0;
            for b in 0..a {
                let proj = tangent_frame[b].dot(&v);
                v -= &tangent_frame[b] * proj;
                let cb = frame_coeffs.column(b).clone_owned();
                coeff -= cb * proj;
            }
            let nv = v.norm();
            if nv < IMMERSION_TOL {
                return Err(HopfError::DegeneratePoint(format!(
                    "degenerate tangent frame at u = {u:?}"
                )));
            }
            v /= nv;
            coeff /= nv;
            tangent_frame.push(v);
            frame_coeffs.set_column(a, &coeff);
        }

        Ok(GaussPoint {
            u: u.to_vec(),
            position: DVector::from_vec(jets.pos.clone()),
            normal: DVector::from_vec(normal),
            dnormal,
            tangent_frame,
            frame_coeffs,
            metric,
            metric_inv,
            second_form,
            shape_operator,
            volume_element,
            jets,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.position.len()
    }

    pub fn param_dim(&self) -> usize {
        self.u.len()
    }

    /// Gauss-Kronecker curvature det(S), the Jacobian density of the
    /// Gauss map.
    pub fn gauss_kronecker(&self) -> f64 {
        self.shape_operator.clone().determinant()
    }

    /// Tangential projector P = I - nu nu^T.
    pub fn projector(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        DMatrix::identity(n, n) - &self.normal * self.normal.transpose()
    }

    /// Ambient derivatives of the projector: dP_k = -(dnu_k nu^T + nu dnu_k^T).
    pub fn projector_derivatives(&self) -> Vec<DMatrix<f64>> {
        self.dnormal
            .iter()
            .map(|dn| -(dn * self.normal.transpose() + &self.normal * dn.transpose()))
            .collect()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cross_products_are_oriented() {
        // n=2
        let t = [3.0, 4.0];
        let v = generalized_cross(&[&t]);
        assert_relative_eq!(v[0] * t[0] + v[1] * t[1], 0.0);
        assert!(v[0] * t[1] - v[1] * t[0] > 0.0);
        // n=3 orthogonality and right-handedness
        let a = [1.0, 0.2, -0.3];
        let b = [0.1, 1.0, 0.5];
        let v = generalized_cross(&[&a, &b]);
        assert_relative_eq!(dot(&v, &a), 0.0, epsilon = 1e-14);
        assert_relative_eq!(dot(&v, &b), 0.0, epsilon = 1e-14);
        // n=4: det[v a b c] = |v|^2
        let a = [1.0, 0.0, 0.2, 0.1];
        let b = [0.0, 1.0, -0.4, 0.3];
        let c = [0.2, 0.1, 1.0, -0.2];
        let v = generalized_cross(&[&a, &b, &c]);
        for w in [&a, &b, &c] {
            assert_relative_eq!(dot(&v, w), 0.0, epsilon = 1e-13);
        }
        let m = DMatrix::from_fn(4, 4, |i, j| match j {
            0 => v[i],
            1 => a[i],
            2 => b[i],
            _ => c[i],
        });
        assert_relative_eq!(m.determinant(), dot(&v, &v), epsilon = 1e-12);
    }
}
