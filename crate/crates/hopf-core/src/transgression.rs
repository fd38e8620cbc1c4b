//! Transgression of the Pfaffian between the ambient flat connection
//! and the projector connection on the pullback of the sphere's
//! tangent bundle, for even ambient dimension.
//!
//! At a chart point the construction lives on the product of the chart
//! with the path parameter t in [0, 1]. With P = I - nu nu^T and the
//! antisymmetric ambient matrix omega = nu dnu^T - dnu nu^T, the path
//! connection is omega_t = (1 - t) omega and its curvature is
//!
//!   Omega_t = -dt ^ omega + 2 (1 - t) dP^dP + omega_t ^ omega_t,
//!
//! all of which needs only first derivatives of the normal. The
//! transgression form is the exact t-integral of the dt-contraction of
//! Pf(Omega_t), normalized by (2 pi)^{n/2}; its integral over the
//! hypersurface is minus the degree of the Gauss map.

use crate::error::{HopfError, Result};
use crate::forms::{CoordFrame, DifferentialForm, FormMatrix, TPoly};
use crate::surfaces::chart::{Chart, DiffBackend, GaussPoint};
use crate::surfaces::quadrature::{halve_resolution, QuadGrid};

/// Step for finite differences in chart coordinates inside the
/// closedness (Bianchi) residual.
pub const CLOSEDNESS_FD_STEP: f64 = 1e-4;

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(HopfError::UnsupportedParity(format!(
            "transgression form needs even ambient dimension, got {n}"
        )));
    }
    Ok(())
}

/// Path-connection matrix omega_t = (1 - t)(nu dnu^T - dnu nu^T) and
/// its curvature, as ambient n x n matrices of forms over the frame
/// (t, u_1, ..., u_{n-1}).
pub fn path_connection(gp: &GaussPoint) -> Result<(FormMatrix, FormMatrix)> {
    let n = gp.ambient_dim();
    require_even(n)?;
    let d = gp.param_dim();
    let frame = CoordFrame::with_t(d);
    let nu = &gp.normal;
    let dnu = &gp.dnormal;

    // omega_pq = sum_i (nu_p dnu_i[q] - dnu_i[p] nu_q) du^i, exactly
    // antisymmetric by construction.
    let omega_hat = FormMatrix::from_upper_triangle(frame.clone(), 1, n, |p, q| {
        let mut form = DifferentialForm::zero(frame.clone(), 1);
        for i in 0..d {
            let c = nu[p] * dnu[i][q] - dnu[i][p] * nu[q];
            form = form.add(&DifferentialForm::monomial(
                frame.clone(),
                &[(i + 1) as u8],
                TPoly::constant(c),
            )?)?;
        }
        Ok(form)
    })?;

    // (dP ^ dP)_pq = sum_{i<j} (dnu_i[p] dnu_j[q] - dnu_j[p] dnu_i[q])
    //               du^i ^ du^j  (the nu nu^T part cancels).
    let dpdp = FormMatrix::from_upper_triangle(frame.clone(), 2, n, |p, q| {
        let mut form = DifferentialForm::zero(frame.clone(), 2);
        for i in 0..d {
            for j in i + 1..d {
                let c = dnu[i][p] * dnu[j][q] - dnu[j][p] * dnu[i][q];
                form = form.add(&DifferentialForm::monomial(
                    frame.clone(),
                    &[(i + 1) as u8, (j + 1) as u8],
                    TPoly::constant(c),
                )?)?;
            }
        }
        Ok(form)
    })?;

    let omega_t = omega_hat.scale_poly(&TPoly::one_minus_t());

    // -dt ^ omega
    let dt = DifferentialForm::monomial(frame.clone(), &[0], TPoly::constant(1.0))?;
    let mut dt_omega = FormMatrix::zero(frame.clone(), 2, n);
    for p in 0..n {
        for q in 0..n {
            dt_omega.set(p, q, dt.wedge(omega_hat.get(p, q))?);
        }
    }

    let two_one_minus_t = TPoly::one_minus_t().scale(2.0);
    let curvature = dt_omega
        .scale(-1.0)
        .add(&dpdp.scale_poly(&two_one_minus_t))?
        .add(&omega_t.wedge_mul(&omega_t)?)?;
    Ok((omega_t, curvature))
}

/// The transgression form at one chart point, as a top-degree form in
/// the chart coordinates (coefficient with respect to du_1 ^ ... ^
/// du_{n-1}).
pub fn tpf_form(gp: &GaussPoint) -> Result<DifferentialForm> {
    let n = gp.ambient_dim();
    let (_, curvature) = path_connection(gp)?;
    let pf = curvature.pfaffian()?;
    let contracted = pf.interior_dt()?;
    let integrated = contracted.integrate_t()?;
    Ok(integrated.scale(1.0 / (2.0 * std::f64::consts::PI).powi((n / 2) as i32)))
}

/// Coefficient of the transgression form with respect to the chart
/// coordinate measure du_1 ... du_{n-1}.
pub fn tpf_du_density(gp: &GaussPoint) -> Result<f64> {
    let d = gp.param_dim();
    let form = tpf_form(gp)?;
    let top: Vec<u8> = (0..d as u8).collect();
    Ok(form.coeff(&top).eval(0.0))
}

/// Integral of the transgression form over the whole chart. On the
/// unit sphere this equals -1.
pub fn integrate_tpf(chart: &Chart, resolution: &[usize]) -> Result<f64> {
    require_even(chart.ambient_dim())?;
    let grid = QuadGrid::for_chart(chart, resolution)?;
    grid.integrate(|u| tpf_du_density(&chart.gauss_point(u)?))
}

/// Even-case degree with a Richardson error estimate: the degree is
/// minus the integral of the transgression form.
pub fn even_degree(chart: &Chart, resolution: &[usize]) -> Result<(f64, f64)> {
    let fine = -integrate_tpf(chart, resolution)?;
    let coarse = -integrate_tpf(chart, &halve_resolution(resolution))?;
    Ok((fine, (fine - coarse).abs()))
}

/// Naturality residual at one point: the transgression form of H must
/// equal the pullback through the Gauss map of the transgression form
/// of the unit sphere. The sphere-side density is evaluated on the
/// canonical sphere chart at the image point; the pullback multiplies
/// it by the Gauss-map Jacobian det(S) sqrt(det g).
pub fn naturality_residual(chart: &Chart, u: &[f64]) -> Result<f64> {
    let n = chart.ambient_dim();
    require_even(n)?;
    let gp = chart.gauss_point(u)?;
    let lhs = tpf_du_density(&gp)?;

    let sphere = crate::corpus::unit_sphere_chart(n, DiffBackend::Analytic)?;
    let v: Vec<f64> = gp.normal.iter().copied().collect();
    let su = crate::corpus::unit_sphere_coords(&v)?;
    let sgp = sphere.gauss_point(&su)?;
    // Density per unit sphere volume is chart-independent.
    let sphere_density = tpf_du_density(&sgp)? / sgp.volume_element;
    let rhs = sphere_density * gp.gauss_kronecker() * gp.volume_element;
    Ok((lhs - rhs).abs())
}

/// Closedness of the path curvature, checked through the Bianchi
/// identity d Omega_t = Omega_t ^ omega_t - omega_t ^ Omega_t, which is
/// what makes the fiber integral of Pf(Omega_t) closed. The exterior
/// derivative is exact in t and a fourth-order finite difference in the
/// chart coordinates. Returns the largest coefficient of the residual
/// matrix.
pub fn closedness_residual(chart: &Chart, u: &[f64]) -> Result<f64> {
    let n = chart.ambient_dim();
    require_even(n)?;
    let d = chart.param_dim();
    let frame = CoordFrame::with_t(d);
    let gp = chart.gauss_point(u)?;
    let (omega_t, curv) = path_connection(&gp)?;

    // dt-part: differentiate the t-polynomials and wedge dt on the left.
    // For n = 2 every grade-3 term collapses to the zero form (the
    // frame is two-dimensional), so the residual is structurally zero.
    let res_grade = 3.min(frame.dim());
    let dt = DifferentialForm::monomial(frame.clone(), &[0], TPoly::constant(1.0))?;
    let mut dcurv = FormMatrix::zero(frame.clone(), res_grade, n);
    for p in 0..n {
        for q in 0..n {
            let mut entry = DifferentialForm::zero(frame.clone(), res_grade);
            let e = curv.get(p, q);
            for (k, c) in e.terms() {
                let dc = c.derivative();
                if dc.is_zero() || k.first() == Some(&0) {
                    continue;
                }
                let mono = DifferentialForm::monomial(frame.clone(), k, dc)?;
                entry = entry.add(&dt.wedge(&mono)?)?;
            }
            dcurv.set(p, q, entry);
        }
    }

    // Space part: fourth-order central differences of the curvature
    // coefficients along each chart axis, wedged with du^i on the left.
    let h = CLOSEDNESS_FD_STEP;
    for i in 0..d {
        let eval = |s: f64| -> Result<FormMatrix> {
            let mut v = u.to_vec();
            v[i] += s;
            Ok(path_connection(&chart.gauss_point(&v)?)?.1)
        };
        let cp1 = eval(h)?;
        let cm1 = eval(-h)?;
        let cp2 = eval(2.0 * h)?;
        let cm2 = eval(-2.0 * h)?;
        let deriv = cp2
            .scale(-1.0)
            .add(&cp1.scale(8.0))?
            .add(&cm1.scale(-8.0))?
            .add(&cm2)?
            .scale(1.0 / (12.0 * h));
        let du_i = DifferentialForm::monomial(frame.clone(), &[(i + 1) as u8], TPoly::constant(1.0))?;
        for p in 0..n {
            for q in 0..n {
                let wedged = du_i.wedge(deriv.get(p, q))?;
                dcurv.set(p, q, dcurv.get(p, q).add(&wedged)?);
            }
        }
    }

    let residual = dcurv
        .add(&omega_t.wedge_mul(&curv)?)?
        .add(&curv.wedge_mul(&omega_t)?.scale(-1.0))?;
    Ok(residual.max_abs_coeff())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build, Hypersurface, ShapeConfig};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn chart_of(name: &str) -> Chart {
        match build(&ShapeConfig::named(name)).unwrap().surface {
            Hypersurface::Chart(c) => c,
            _ => panic!("expected chart"),
        }
    }

    #[test]
    fn unit_circle_density_is_uniform() {
        let chart = chart_of("circle");
        for &th in &[0.3, 1.7, 4.4] {
            let gp = chart.gauss_point(&[th]).unwrap();
            let c = tpf_du_density(&gp).unwrap();
            assert_relative_eq!(c, -1.0 / (2.0 * PI), epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_three_sphere_density_is_uniform() {
        let chart = chart_of("sphere3");
        for &u in &[[0.7, 1.2, 0.5], [2.1, 0.9, 4.0]] {
            let gp = chart.gauss_point(&u).unwrap();
            let c = tpf_du_density(&gp).unwrap();
            // Density per unit volume is -1/(2 pi^2) = -1/vol(S^3).
            assert_relative_eq!(
                c / gp.volume_element,
                -1.0 / (2.0 * PI * PI),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn circle_integral_is_minus_one() {
        let chart = chart_of("circle");
        let v = integrate_tpf(&chart, &[64]).unwrap();
        assert_relative_eq!(v, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn odd_ambient_dimension_is_rejected() {
        let chart = chart_of("sphere");
        let gp = chart.gauss_point(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            tpf_form(&gp),
            Err(HopfError::UnsupportedParity(_))
        ));
        assert!(integrate_tpf(&chart, &[16, 16]).is_err());
    }

    #[test]
    fn naturality_on_ellipse() {
        let chart = chart_of("ellipse");
        for &th in &[0.4, 2.0, 3.3, 5.9] {
            let r = naturality_residual(&chart, &[th]).unwrap();
            assert!(r < 1e-12, "residual {r:.3e} at {th}");
        }
    }

    #[test]
    fn closedness_on_ellipse_and_ellipsoid4() {
        let chart = chart_of("ellipse");
        let r = closedness_residual(&chart, &[1.1]).unwrap();
        assert!(r < 1e-8, "ellipse residual {r:.3e}");
        let chart = chart_of("ellipsoid4");
        let r = closedness_residual(&chart, &[1.2, 1.0, 2.5]).unwrap();
        assert!(r < 1e-6, "ellipsoid4 residual {r:.3e}");
    }
}
