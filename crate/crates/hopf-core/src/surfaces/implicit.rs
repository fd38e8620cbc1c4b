//! Implicit level-set hypersurfaces {F = 0} with F < 0 on the bounded
//! interior, so the outward normal is grad F / |grad F|.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{HopfError, Result};
use crate::surfaces::jet::Jet;

/// Level function with derivatives obtained by dual-number propagation.
pub trait LevelFn: Send + Sync {
    fn ambient_dim(&self) -> usize;
    fn eval_jet(&self, x: &[Jet]) -> Jet;

    fn eval(&self, x: &[f64]) -> f64 {
        let jx: Vec<Jet> = x.iter().map(|&v| Jet::constant(v)).collect();
        self.eval_jet(&jx).v
    }
}

pub const REGULAR_VALUE_TOL: f64 = 1e-8;

#[derive(Clone)]
pub struct ImplicitSurface {
    pub f: Arc<dyn LevelFn>,
    pub bbox: Vec<(f64, f64)>,
}

/// Pointwise data of an implicit surface at a point on (or near) the
/// level set.
#[derive(Debug, Clone)]
pub struct ImplicitPoint {
    pub position: DVector<f64>,
    pub normal: DVector<f64>,
    /// Ambient shape operator P H P / |grad F| restricted to the tangent
    /// space (the normal direction is in its kernel).
    pub shape_ambient: DMatrix<f64>,
    /// Gauss-Kronecker curvature: product of the nonzero eigenvalues.
    pub gauss_kronecker: f64,
}

impl ImplicitSurface {
    pub fn new(f: Arc<dyn LevelFn>, bbox: Vec<(f64, f64)>) -> Result<ImplicitSurface> {
        if f.ambient_dim() != bbox.len() {
            return Err(HopfError::Input("bbox dimension mismatch".into()));
        }
        Ok(ImplicitSurface { f, bbox })
    }

    pub fn ambient_dim(&self) -> usize {
        self.f.ambient_dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.f.eval(x)
    }

    pub fn gradient_hessian(&self, x: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let jx: Vec<Jet> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(v, i))
            .collect();
        let r = self.f.eval_jet(&jx);
        let grad = DVector::from_fn(n, |i, _| r.g[i]);
        let hess = DMatrix::from_fn(n, n, |i, j| r.h[i][j]);
        (r.v, grad, hess)
    }

    /// Project a nearby point onto the level set by Newton steps along
    /// the gradient.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut p = x.to_vec();
        for _ in 0..50 {
            let (v, grad, _) = self.gradient_hessian(&p);
            let gn2 = grad.norm_squared();
            if gn2.sqrt() < REGULAR_VALUE_TOL {
                return Err(HopfError::DegeneratePoint(format!(
                    "vanishing gradient near {p:?}"
                )));
            }
            if v.abs() < 1e-13 {
                return Ok(p);
            }
            let step = v / gn2;
            for i in 0..p.len() {
                p[i] -= step * grad[i];
            }
        }
        Err(HopfError::NumericalQuality(format!(
            "projection onto level set failed to converge from {x:?}"
        )))
    }

    /// Gauss-map data at a point assumed to lie on the level set.
    pub fn gauss_data(&self, x: &[f64]) -> Result<ImplicitPoint> {
        let n = x.len();
        let (_, grad, hess) = self.gradient_hessian(x);
        let gn = grad.norm();
        if gn < REGULAR_VALUE_TOL {
            return Err(HopfError::DegeneratePoint(format!(
                "0 is not regular: |grad F| = {gn:.3e} at {x:?}"
            )));
        }
        let normal = &grad / gn;
        let proj = DMatrix::identity(n, n) - &normal * normal.transpose();
        let shape_ambient = (&proj * &hess * &proj) / gn;
        // Nonzero-eigenvalue product: drop the eigenvalue nearest zero
        // (the normal direction is an exact kernel vector analytically).
        let eig = shape_ambient.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let (kmin, _) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        vals.remove(kmin);
        let gauss_kronecker = vals.iter().product();
        Ok(ImplicitPoint {
            position: DVector::from_vec(x.to_vec()),
            normal,
            shape_ambient,
            gauss_kronecker,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct SphereLevel {
        r: f64,
    }

    impl LevelFn for SphereLevel {
        fn ambient_dim(&self) -> usize {
            3
        }
        fn eval_jet(&self, x: &[Jet]) -> Jet {
            x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - Jet::constant(self.r * self.r)
        }
    }

    #[test]
    fn unit_sphere_level_set() {
        let s = ImplicitSurface::new(Arc::new(SphereLevel { r: 1.0 }), vec![(-1.2, 1.2); 3])
            .unwrap();
        let p = s.project(&[0.9, 0.3, -0.2]).unwrap();
        let r: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(r, 1.0, epsilon = 1e-12);
        let gd = s.gauss_data(&p).unwrap();
        // outward normal is the position itself
        for i in 0..3 {
            assert_relative_eq!(gd.normal[i], p[i], epsilon = 1e-12);
        }
        assert_relative_eq!(gd.gauss_kronecker, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn scaled_sphere_curvature() {
        let s = ImplicitSurface::new(Arc::new(SphereLevel { r: 2.0 }), vec![(-2.5, 2.5); 3])
            .unwrap();
        let p = s.project(&[1.5, 1.0, 0.5]).unwrap();
        let gd = s.gauss_data(&p).unwrap();
        assert_relative_eq!(gd.gauss_kronecker, 0.25, epsilon = 1e-10);
    }
}
