//! Intrinsic Riemannian data of a chart: Christoffel symbols, the
//! curvature two-form matrix in an oriented orthonormal coframe, the
//! Euler form Pf(Omega)/(2 pi)^m, and a pointwise check that the
//! pullback of the sphere connection under the Gauss map agrees with
//! the Levi-Civita connection of the hypersurface.

use nalgebra::{DMatrix, DVector};

use crate::error::{HopfError, Result};
use crate::forms::{CoordFrame, DifferentialForm, FormMatrix, TPoly};
use crate::surfaces::chart::{dot, Chart, GaussPoint, Jets};

/// Step for the finite-difference third derivatives of the chart
/// (fourth-order central stencil). Chosen large enough that the
/// f64 roundoff floor (eps/h), amplified by the inverse metric near
/// chart poles, stays below the curvature accuracy target; the
/// truncation error is negligible for the trigonometric charts.
pub const CHRISTOFFEL_FD_STEP: f64 = 1e-3;

/// Allowed antisymmetry violation of the frame curvature components.
pub const ANTISYMMETRY_TOL: f64 = 1e-4;

/// Derivatives of the metric from exact chart jets:
/// d_k g_ij = <d2[k][i], d1[j]> + <d1[i], d2[k][j]>.
pub fn metric_derivatives(jets: &Jets) -> Vec<Vec<Vec<f64>>> {
    let d = jets.d1.len();
    let mut dg = vec![vec![vec![0.0; d]; d]; d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                dg[k][i][j] =
                    dot(&jets.d2[k][i], &jets.d1[j]) + dot(&jets.d1[i], &jets.d2[k][j]);
            }
        }
    }
    dg
}

/// Christoffel symbols of the induced metric,
/// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
pub fn christoffel(jets: &Jets, metric_inv: &DMatrix<f64>) -> Vec<Vec<Vec<f64>>> {
    let d = jets.d1.len();
    let dg = metric_derivatives(jets);
    let mut gamma = vec![vec![vec![0.0; d]; d]; d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += metric_inv[(k, l)] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[k][i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Third derivatives d3[m][i][j] = d_m d_i d_j psi (ambient components)
/// by a fourth-order central difference of the exact second jets. The
/// jets are smooth and bounded even at chart poles, so this stays
/// accurate where the Christoffel symbols themselves blow up.
fn third_derivatives(chart: &Chart, u: &[f64]) -> Result<Vec<Vec<Vec<Vec<f64>>>>> {
    let d = chart.param_dim();
    let n = chart.ambient_dim();
    let h = CHRISTOFFEL_FD_STEP;
    let mut d3 = vec![vec![vec![vec![0.0; n]; d]; d]; d];
    for m in 0..d {
        let eval = |s: f64| -> Result<Jets> {
            let mut v = u.to_vec();
            v[m] += s;
            chart.jets(&v)
        };
        let jp1 = eval(h)?;
        let jm1 = eval(-h)?;
        let jp2 = eval(2.0 * h)?;
        let jm2 = eval(-2.0 * h)?;
        for i in 0..d {
            for j in 0..d {
                for p in 0..n {
                    d3[m][i][j][p] = (-jp2.d2[i][j][p] + 8.0 * jp1.d2[i][j][p]
                        - 8.0 * jm1.d2[i][j][p]
                        + jm2.d2[i][j][p])
                        / (12.0 * h);
                }
            }
        }
    }
    Ok(d3)
}

/// Curvature of the induced metric at one point, expressed in the
/// oriented orthonormal coframe of the Gauss point.
pub struct CurvatureData {
    pub gauss_point: GaussPoint,
    /// Coframe labels theta^1..theta^d (forms-engine frame).
    pub frame: CoordFrame,
    /// Curvature two-forms Omega_ab = 1/2 R_abcd theta^c ^ theta^d.
    pub curvature: FormMatrix,
}

/// Assemble the curvature matrix at `u`. Third derivatives of the chart
/// come from a fourth-order central difference of the exact second
/// jets; the Christoffel derivatives are then assembled algebraically
/// (d g^{-1} = -g^{-1} (d g) g^{-1}), which stays accurate near chart
/// poles where the symbols themselves are singular.
pub fn curvature(chart: &Chart, u: &[f64]) -> Result<CurvatureData> {
    let gp = chart.gauss_point(u)?;
    let d = gp.param_dim();
    let gamma = christoffel(&gp.jets, &gp.metric_inv);

    let dg = metric_derivatives(&gp.jets);
    let d3 = third_derivatives(chart, u)?;
    // ddg[m][k][i][j] = d_m d_k g_ij from the jets and third derivatives.
    let mut ddg = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for m in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    ddg[m][k][i][j] = dot(&d3[m][k][i], &gp.jets.d1[j])
                        + dot(&gp.jets.d2[k][i], &gp.jets.d2[m][j])
                        + dot(&gp.jets.d2[m][i], &gp.jets.d2[k][j])
                        + dot(&gp.jets.d1[i], &d3[m][k][j]);
                }
            }
        }
    }

    // dgamma[m][l][j][k] = d_m Gamma^l_jk
    //   = 1/2 (d_m g^{-1})^{lp} (d_j g_kp + d_k g_jp - d_p g_jk)
    //   + 1/2 g^{lp} (d_m d_j g_kp + d_m d_k g_jp - d_m d_p g_jk).
    let mut dgamma = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for m in 0..d {
        let mut dgm = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                dgm[(i, j)] = dg[m][i][j];
            }
        }
        let dginv = -(&gp.metric_inv * dgm * &gp.metric_inv);
        for l in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v = 0.0;
                    for p in 0..d {
                        v += dginv[(l, p)] * (dg[j][k][p] + dg[k][j][p] - dg[p][j][k])
                            + gp.metric_inv[(l, p)]
                                * (ddg[m][j][k][p] + ddg[m][k][j][p] - ddg[m][p][j][k]);
                    }
                    dgamma[m][l][j][k] = 0.5 * v;
                }
            }
        }
    }

    // R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik
    //         + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    let mut riem_up = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..d {
                        v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    riem_up[l][k][i][j] = v;
                }
            }
        }
    }
    // Lower the first index: R_lkij = g_lm R^m_kij.
    let mut riem = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut v = 0.0;
                    for m in 0..d {
                        v += gp.metric[(l, m)] * riem_up[m][k][i][j];
                    }
                    riem[l][k][i][j] = v;
                }
            }
        }
    }
    // Orthonormal-frame components R_abcd with e_a = A_ia d_i.
    let a = &gp.frame_coeffs;
    let mut rf = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    let mut scale = 0.0f64;
    for aa in 0..d {
        for bb in 0..d {
            for cc in 0..d {
                for dd in 0..d {
                    let mut v = 0.0;
                    for l in 0..d {
                        for k in 0..d {
                            for i in 0..d {
                                for j in 0..d {
                                    v += a[(l, aa)] * a[(k, bb)] * a[(i, cc)] * a[(j, dd)]
                                        * riem[l][k][i][j];
                                }
                            }
                        }
                    }
                    rf[aa][bb][cc][dd] = v;
                    scale = scale.max(v.abs());
                }
            }
        }
    }
    // The frame components are antisymmetric in the first pair only up
    // to differentiation error; measure and enforce it.
    let mut resid = 0.0f64;
    for aa in 0..d {
        for bb in 0..d {
            for cc in 0..d {
                for dd in 0..d {
                    resid = resid.max((rf[aa][bb][cc][dd] + rf[bb][aa][cc][dd]).abs());
                }
            }
        }
    }
    if resid > ANTISYMMETRY_TOL * scale.max(1.0) {
        return Err(HopfError::NumericalQuality(format!(
            "curvature antisymmetry residual {resid:.3e} at u = {u:?}"
        )));
    }

    let frame = CoordFrame::space(d);
    let curvature = FormMatrix::from_upper_triangle(frame.clone(), 2, d, |aa, bb| {
        let mut form = DifferentialForm::zero(frame.clone(), 2);
        for cc in 0..d {
            for dd in cc + 1..d {
                let coeff = 0.5 * (rf[aa][bb][cc][dd] - rf[bb][aa][cc][dd]);
                let term = DifferentialForm::monomial(
                    frame.clone(),
                    &[cc as u8, dd as u8],
                    TPoly::constant(coeff),
                )?;
                form = form.add(&term)?;
            }
        }
        Ok(form)
    })?;

    Ok(CurvatureData {
        gauss_point: gp,
        frame,
        curvature,
    })
}

/// Density of the Euler form Pf(Omega)/(2 pi)^m with respect to the
/// Riemannian volume. Identically zero for odd-dimensional
/// hypersurfaces.
pub fn euler_form_density(data: &CurvatureData) -> Result<f64> {
    let d = data.curvature.size();
    if d % 2 == 1 {
        return Ok(0.0);
    }
    let m = d / 2;
    let pf = data.curvature.pfaffian()?;
    let top: Vec<u8> = (0..d as u8).collect();
    Ok(pf.coeff(&top).eval(0.0) / (2.0 * std::f64::consts::PI).powi(m as i32))
}

/// Integrate the Euler form over the whole chart.
pub fn euler_form_integral(chart: &Chart, resolution: &[usize]) -> Result<f64> {
    let grid = crate::surfaces::quadrature::QuadGrid::for_chart(chart, resolution)?;
    grid.integrate(|u| {
        let data = curvature(chart, u)?;
        Ok(euler_form_density(&data)? * data.gauss_point.volume_element)
    })
}

/// Tangent vector field X_A(x) = (I - x x^T) A x on the unit sphere.
pub fn sphere_field(a: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let ax = a * x;
    &ax - x * x.dot(&ax)
}

/// Ambient differential of X_A at x applied to w.
pub fn sphere_field_diff(a: &DMatrix<f64>, x: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
    let ax = a * x;
    let aw = a * w;
    &aw - x * x.dot(&aw) - w * x.dot(&ax) - x * w.dot(&ax)
}

/// Compare the two connections of the pullback identification at one
/// point: the sphere's Levi-Civita connection pulled back through the
/// Gauss map, against the hypersurface's own Levi-Civita connection
/// applied to the same tangent field. Returns the norm of the
/// difference of the two ambient covariant-derivative vectors.
///
/// `a` seeds the tangent field X_A on the sphere and `y` holds chart
/// components of the direction of differentiation.
pub fn lemma1_residual(chart: &Chart, u: &[f64], a: &DMatrix<f64>, y: &[f64]) -> Result<f64> {
    let gp = chart.gauss_point(u)?;
    let d = gp.param_dim();
    let nu = &gp.normal;

    // The field along H and its chart derivatives through the Gauss map.
    let field = sphere_field(a, nu);
    let dfield: Vec<DVector<f64>> = (0..d)
        .map(|i| sphere_field_diff(a, nu, &gp.dnormal[i]))
        .collect();

    // Route one: pullback connection, i.e. sphere covariant derivative
    // in the direction d nu (Y), which is the tangential projection at
    // nu(u) of the ambient derivative of X_A.
    let mut deriv = DVector::zeros(gp.ambient_dim());
    for i in 0..d {
        deriv += &dfield[i] * y[i];
    }
    let side_pullback = &deriv - nu * nu.dot(&deriv);

    // Route two: Levi-Civita connection of the induced metric via
    // Christoffel symbols, acting on the chart components of the field.
    let mut b = DVector::zeros(d);
    for j in 0..d {
        b[j] = dot(&gp.jets.d1[j], field.as_slice());
    }
    let comp = &gp.metric_inv * &b;
    let dg = metric_derivatives(&gp.jets);
    let gamma = christoffel(&gp.jets, &gp.metric_inv);
    // d_i comp = g^{-1} (d_i b - (d_i g) comp)
    let mut dcomp = Vec::with_capacity(d);
    for i in 0..d {
        let mut db = DVector::zeros(d);
        for j in 0..d {
            db[j] = dot(&gp.jets.d2[i][j], field.as_slice())
                + dot(&gp.jets.d1[j], dfield[i].as_slice());
        }
        let mut dgc = DVector::zeros(d);
        for j in 0..d {
            for l in 0..d {
                dgc[j] += dg[i][j][l] * comp[l];
            }
        }
        dcomp.push(&gp.metric_inv * (db - dgc));
    }
    let mut side_intrinsic = DVector::zeros(gp.ambient_dim());
    for k in 0..d {
        let mut ck = 0.0;
        for i in 0..d {
            ck += y[i] * dcomp[i][k];
            for j in 0..d {
                ck += gamma[k][i][j] * y[i] * comp[j];
            }
        }
        side_intrinsic += DVector::from_vec(gp.jets.d1[k].clone()) * ck;
    }

    Ok((side_pullback - side_intrinsic).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::chart::{DiffBackend, SurfaceMap};
    use crate::surfaces::jet::Jet;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    struct SphereMap {
        r: f64,
    }

    impl SurfaceMap for SphereMap {
        fn ambient_dim(&self) -> usize {
            3
        }
        fn param_dim(&self) -> usize {
            2
        }
        fn domain(&self) -> Vec<(f64, f64)> {
            vec![(0.0, std::f64::consts::PI), (0.0, 2.0 * std::f64::consts::PI)]
        }
        fn periodic(&self) -> Vec<bool> {
            vec![false, true]
        }
        fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
            let r = Jet::constant(self.r);
            let (th, ph) = (u[0], u[1]);
            vec![
                r * th.sin() * ph.cos(),
                r * th.sin() * ph.sin(),
                r * th.cos(),
            ]
        }
    }

    struct EllipsoidMap;

    impl SurfaceMap for EllipsoidMap {
        fn ambient_dim(&self) -> usize {
            3
        }
        fn param_dim(&self) -> usize {
            2
        }
        fn domain(&self) -> Vec<(f64, f64)> {
            vec![(0.0, std::f64::consts::PI), (0.0, 2.0 * std::f64::consts::PI)]
        }
        fn periodic(&self) -> Vec<bool> {
            vec![false, true]
        }
        fn position_jet(&self, u: &[Jet]) -> Vec<Jet> {
            let (th, ph) = (u[0], u[1]);
            vec![
                Jet::constant(1.3) * th.sin() * ph.cos(),
                Jet::constant(0.9) * th.sin() * ph.sin(),
                Jet::constant(0.7) * th.cos(),
            ]
        }
    }

    #[test]
    fn unit_sphere_sectional_curvature() {
        let chart = Chart::new(Arc::new(SphereMap { r: 1.0 }), DiffBackend::Dual);
        let data = curvature(&chart, &[1.1, 0.4]).unwrap();
        // Omega_01 = R_0101 theta^0 ^ theta^1 with R_0101 = 1.
        let coeff = data.curvature.get(0, 1).coeff(&[0, 1]).eval(0.0);
        assert_relative_eq!(coeff, 1.0, epsilon = 1e-7);
        assert_relative_eq!(
            euler_form_density(&data).unwrap(),
            1.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-7
        );
    }

    #[test]
    fn sphere_curvature_survives_near_pole() {
        // The smallest Gauss-Legendre node of a 64-point rule on (0, pi)
        // sits at theta ~ 1.1e-3, where the Christoffel symbols are
        // nearly singular; the curvature assembly must stay accurate.
        let chart = Chart::new(Arc::new(SphereMap { r: 1.0 }), DiffBackend::Dual);
        for &th in &[1.1e-3, 1e-2, std::f64::consts::PI - 1.1e-3] {
            let data = curvature(&chart, &[th, 0.0]).unwrap();
            assert_relative_eq!(
                euler_form_density(&data).unwrap(),
                1.0 / (2.0 * std::f64::consts::PI),
                epsilon = 1e-7
            );
        }
    }

    #[test]
    fn scaled_sphere_euler_density() {
        let chart = Chart::new(Arc::new(SphereMap { r: 2.0 }), DiffBackend::Dual);
        let data = curvature(&chart, &[0.8, 2.0]).unwrap();
        // Gauss curvature 1/r^2.
        assert_relative_eq!(
            euler_form_density(&data).unwrap(),
            0.25 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-7
        );
    }

    #[test]
    fn lemma1_residual_small_on_ellipsoid() {
        let chart = Chart::new(Arc::new(EllipsoidMap), DiffBackend::Dual);
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[0.3, -1.1, 0.6, 0.9, 0.2, -0.4, -0.7, 0.5, 1.2],
        );
        for &(th, ph) in &[(0.6, 1.1), (1.4, 3.9), (2.3, 5.0)] {
            let r = lemma1_residual(&chart, &[th, ph], &a, &[0.7, -1.3]).unwrap();
            assert!(r < 1e-8, "residual {r:.3e} at ({th}, {ph})");
        }
    }

    #[test]
    fn lemma1_residual_vanishes_on_unit_sphere() {
        let chart = Chart::new(Arc::new(SphereMap { r: 1.0 }), DiffBackend::Dual);
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 2.0, 0.5, -2.0, 0.0]);
        let r = lemma1_residual(&chart, &[1.2, 0.3], &a, &[1.0, 0.5]).unwrap();
        assert!(r < 1e-12, "residual {r:.3e}");
    }
}
