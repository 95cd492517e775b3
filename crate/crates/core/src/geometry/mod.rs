//! Quadrature, differentiation and geometric functionals of a curve given by
//! its radius of curvature, plus planar reconstruction and polygon oracles.
//!
//! Integrals over the tangent angle use the rectangle rule on the periodic
//! grid, which is exact for trigonometric polynomials of degree below `M` and
//! spectrally accurate otherwise. The support function `p` solves
//! `p'' + p = rho` with its first harmonics pinned to zero (Steiner point at
//! the origin).

mod oracle;
mod spectral;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use oracle::{polygon_perimeter, shoelace_area};
pub use spectral::{spectral, Spectral};

use crate::curve_model::{CurveState, DerivMethod, DEFAULT_CLOSURE_TOL};
use crate::error::{FlowError, Result};

pub fn integrate_periodic(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(FlowError::invalid("cannot integrate an empty sample set"));
    }
    Ok(periodic_sum(samples))
}

#[inline]
pub(crate) fn periodic_sum(samples: &[f64]) -> f64 {
    2.0 * PI / samples.len() as f64 * samples.iter().sum::<f64>()
}

pub fn second_derivative(samples: &[f64], method: DerivMethod) -> Vec<f64> {
    match method {
        DerivMethod::Spectral => spectral(samples.len()).second_derivative(samples),
        DerivMethod::CentralFd2 => {
            let m = samples.len();
            let h2 = (2.0 * PI / m as f64).powi(2);
            (0..m)
                .map(|j| {
                    let prev = samples[(j + m - 1) % m];
                    let next = samples[(j + 1) % m];
                    (next - 2.0 * samples[j] + prev) / h2
                })
                .collect()
        }
    }
}

/// Spectral first derivative.
pub fn first_derivative(samples: &[f64]) -> Vec<f64> {
    spectral(samples.len()).first_derivative(samples)
}

pub fn length(state: &CurveState) -> f64 {
    periodic_sum(&state.rho)
}

/// `(int rho cos, int rho sin)`; zero exactly when the curve closes up.
pub fn closure_residual(state: &CurveState) -> (f64, f64) {
    let s = spectral(state.len());
    let cx: f64 = state.rho.iter().zip(s.cos_table()).map(|(r, c)| r * c).sum();
    let cy: f64 = state.rho.iter().zip(s.sin_table()).map(|(r, c)| r * c).sum();
    let w = s.dtheta();
    (w * cx, w * cy)
}

pub fn support_function(state: &CurveState) -> Result<Vec<f64>> {
    support_function_with_tol(&state.rho, DEFAULT_CLOSURE_TOL)
}

pub fn support_function_with_tol(rho: &[f64], closure_tol: f64) -> Result<Vec<f64>> {
    let (p, c1) = spectral(rho.len()).support_solve(rho);
    // |(int rho cos, int rho sin)| = 2 pi |c_1|
    let residual = 2.0 * PI * c1.norm();
    if residual > closure_tol {
        return Err(FlowError::ClosureViolation {
            residual,
            tolerance: closure_tol,
        });
    }
    Ok(p)
}

pub fn area(state: &CurveState) -> Result<f64> {
    area_with_tol(&state.rho, DEFAULT_CLOSURE_TOL)
}

/// `A = (1/2) int p rho dtheta`.
pub fn area_with_tol(rho: &[f64], closure_tol: f64) -> Result<f64> {
    let p = support_function_with_tol(rho, closure_tol)?;
    Ok(0.5 * area_integrand_sum(&p, rho))
}

fn area_integrand_sum(p: &[f64], rho: &[f64]) -> f64 {
    let prod: Vec<f64> = p.iter().zip(rho).map(|(a, b)| a * b).collect();
    periodic_sum(&prod)
}

/// `lambda = (1 / 2A) int rho^{n+1} dtheta`.
pub fn lambda_nonlocal(state: &CurveState, n: f64, area: f64) -> Result<f64> {
    lambda_from_rho(&state.rho, n, area)
}

pub(crate) fn lambda_from_rho(rho: &[f64], n: f64, area: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(FlowError::invalid(format!("area must be positive, got {area}")));
    }
    let powered: Vec<f64> = rho.iter().map(|r| r.powf(n + 1.0)).collect();
    Ok(periodic_sum(&powered) / (2.0 * area))
}

/// `L^2 - 4 pi A` evaluated as `4 pi^2 sum_{|k|>=2} |c_k|^2 / (k^2 - 1)`.
///
/// Equal to the difference of the quadrature values of `L^2` and `4 pi A`
/// up to round-off, but free of the cancellation between two O(1)
/// quantities, so it stays accurate down to the underflow range.
pub fn isoperimetric_difference(state: &CurveState) -> f64 {
    let s = spectral(state.len());
    let c = s.forward(&state.rho);
    let total: f64 = c
        .iter()
        .enumerate()
        .filter_map(|(i, ci)| {
            let k = s.wavenumber(i);
            (k.abs() >= 2).then(|| ci.norm_sqr() / ((k * k) as f64 - 1.0))
        })
        .sum();
    4.0 * PI * PI * total
}

/// Amplitude of the highest quarter of resolved modes relative to the mean.
/// Large values mean the grid does not resolve the curve.
pub fn spectral_tail(state: &CurveState) -> f64 {
    let s = spectral(state.len());
    let c = s.forward(&state.rho);
    let cutoff = (state.len() / 4) as i64;
    let tail = c
        .iter()
        .enumerate()
        .filter(|(i, _)| s.wavenumber(*i).abs() > cutoff)
        .map(|(_, ci)| ci.norm())
        .fold(0.0, f64::max);
    tail / c[0].re.abs()
}

/// Planar points of the curve with outward normal `(sin, -cos)` and unit
/// tangent `(cos, sin)` at tangent angle theta, traversed counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedCurve {
    pub t: f64,
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl EmbeddedCurve {
    pub fn theta_count(&self) -> usize {
        self.theta.len()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("curve serializes")
    }
}

/// `X(theta) = p nu + p' T`, so that `X' = (p'' + p) T = rho T`.
pub fn reconstruct(state: &CurveState) -> Result<EmbeddedCurve> {
    reconstruct_refined(state, state.len())
}

/// Reconstruction evaluated at `count >= M` uniform tangent angles using the
/// trigonometric interpolant of the support function.
pub fn reconstruct_refined(state: &CurveState, count: usize) -> Result<EmbeddedCurve> {
    let m = state.len();
    if count < m {
        return Err(FlowError::invalid(format!(
            "refined count {count} is below the grid size {m}"
        )));
    }
    let p_coarse = support_function(state)?;
    let s = spectral(m);
    let dp_coarse = s.first_derivative(&p_coarse);
    let p = s.interpolate(&p_coarse, count);
    let dp = s.interpolate(&dp_coarse, count);
    let rho = s.interpolate(&state.rho, count);
    let theta: Vec<f64> = (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect();
    let mut x = Vec::with_capacity(count);
    let mut y = Vec::with_capacity(count);
    for j in 0..count {
        let (sn, cs) = theta[j].sin_cos();
        x.push(p[j] * sn + dp[j] * cs);
        y.push(-p[j] * cs + dp[j] * sn);
    }
    Ok(EmbeddedCurve {
        t: state.t,
        theta,
        rho,
        p,
        x,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_model::{make_circle, make_ellipse, make_fourier, FourierTerm};

    fn grid(m: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..m).map(|j| f(2.0 * PI * j as f64 / m as f64)).collect()
    }

    fn perturbed(eps: f64, k: usize, m: usize) -> CurveState {
        make_fourier(1.0, &[FourierTerm::cos(k, eps)], m).unwrap()
    }

    #[test]
    fn integrate_examples() {
        let v = integrate_periodic(&grid(64, |t| (2.0 * t).cos())).unwrap();
        assert!(v.abs() < 1e-14);
        let v = integrate_periodic(&[1.0; 16]).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-14);
        let v = integrate_periodic(&grid(128, |t| (1.0 + 0.3 * (2.0 * t).cos()).powi(2))).unwrap();
        assert!((v - (2.0 * PI + 0.09 * PI)).abs() < 1e-13);
        assert!((v - 6.565928).abs() < 1e-6);
        assert!(matches!(integrate_periodic(&[]), Err(FlowError::InvalidArgument(_))));
    }

    #[test]
    fn spectral_second_derivative_of_eigenfunction() {
        let d = second_derivative(&grid(64, |t| (3.0 * t).cos()), DerivMethod::Spectral);
        for (a, b) in d.iter().zip(grid(64, |t| -9.0 * (3.0 * t).cos())) {
            assert!((a - b).abs() < 1e-11);
        }
        for method in [DerivMethod::Spectral, DerivMethod::CentralFd2] {
            let d = second_derivative(&[2.5; 32], method);
            assert!(d.iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn central_difference_is_second_order() {
        let errs: Vec<f64> = [32, 64, 128]
            .iter()
            .map(|&m| {
                let d = second_derivative(&grid(m, |t| (3.0 * t).cos()), DerivMethod::CentralFd2);
                d.iter()
                    .zip(grid(m, |t| -9.0 * (3.0 * t).cos()))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() < 0.1, "order {order}");
        }
    }

    #[test]
    fn length_examples() {
        assert!((length(&make_circle(2.0, 64).unwrap()) - 4.0 * PI).abs() < 1e-13);
        assert!((length(&perturbed(0.3, 2, 128)) - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn support_function_mode_division() {
        let p = support_function(&make_circle(1.7, 32).unwrap()).unwrap();
        assert!(p.iter().all(|x| (x - 1.7).abs() < 1e-14));

        for (k, eps, factor) in [(2usize, 0.3, -1.0 / 3.0), (3, 0.2, -1.0 / 8.0)] {
            let s = perturbed(eps, k, 64);
            let p = support_function(&s).unwrap();
            for j in 0..64 {
                let want = 1.0 + factor * eps * (k as f64 * s.theta(j)).cos();
                assert!((p[j] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn support_function_rejects_open_curves() {
        let s = CurveState::new(grid(64, |t| 1.0 + 0.1 * t.cos()), 0.0).unwrap();
        assert!(matches!(support_function(&s), Err(FlowError::ClosureViolation { .. })));
        assert!(matches!(area(&s), Err(FlowError::ClosureViolation { .. })));
        assert!(matches!(reconstruct(&s), Err(FlowError::ClosureViolation { .. })));
    }

    #[test]
    fn area_examples() {
        assert!((area(&make_circle(1.0, 32).unwrap()).unwrap() - PI).abs() < 1e-14);
        assert!((area(&make_circle(3.0, 32).unwrap()).unwrap() - 9.0 * PI).abs() < 1e-12);
        let a = area(&perturbed(0.3, 2, 256)).unwrap();
        assert!((a - (PI - PI * 0.09 / 6.0)).abs() < 1e-13);
    }

    #[test]
    fn lambda_examples() {
        for n in [0.5, 1.0, 2.0, 3.0] {
            for r in [0.5, 1.0, 2.0] {
                let s = make_circle(r, 32).unwrap();
                let lam = lambda_nonlocal(&s, n, area(&s).unwrap()).unwrap();
                assert!((lam - r.powf(n - 1.0)).abs() < 1e-12 * r.powf(n - 1.0).max(1.0));
            }
        }
        let s = make_circle(2.0, 32).unwrap();
        assert!((lambda_nonlocal(&s, 3.0, area(&s).unwrap()).unwrap() - 4.0).abs() < 1e-12);

        let s = perturbed(0.3, 2, 128);
        let lam = lambda_nonlocal(&s, 1.0, area(&s).unwrap()).unwrap();
        assert!((lam - 2.09 / 1.97).abs() < 1e-13);
        assert!((lam - 1.060914).abs() < 1e-6);
        assert!(lambda_nonlocal(&s, 1.0, 0.0).is_err());
    }

    #[test]
    fn closure_residual_examples() {
        let (cx, cy) = closure_residual(&make_circle(1.0, 64).unwrap());
        assert!(cx.abs() < 1e-14 && cy.abs() < 1e-14);
        let (cx, cy) = closure_residual(&perturbed(0.3, 2, 64));
        assert!(cx.abs() < 1e-14 && cy.abs() < 1e-14);
        let s = CurveState::new(grid(64, |t| 1.0 + 0.1 * t.cos()), 0.0).unwrap();
        let (cx, cy) = closure_residual(&s);
        assert!((cx - 0.1 * PI).abs() < 1e-14);
        assert!(cy.abs() < 1e-14);
    }

    #[test]
    fn iso_difference_matches_direct_evaluation() {
        let s = perturbed(0.3, 2, 128);
        let direct = length(&s).powi(2) - 4.0 * PI * area(&s).unwrap();
        let stable = isoperimetric_difference(&s);
        assert!((direct - stable).abs() < 1e-12);
        assert!((stable - 0.06 * PI * PI).abs() < 1e-13);
        assert_eq!(isoperimetric_difference(&make_circle(1.0, 32).unwrap()), 0.0);
    }

    #[test]
    fn reconstruct_circle() {
        let c = reconstruct(&make_circle(1.0, 64).unwrap()).unwrap();
        for (x, y) in c.points() {
            assert!((x.hypot(y) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruct_tangent_matches_rho() {
        let s = make_fourier(1.0, &[FourierTerm { k: 2, a: 0.2, b: 0.1 }], 256).unwrap();
        let c = reconstruct(&s).unwrap();
        let m = s.len();
        let h = 2.0 * PI / m as f64;
        let fine = reconstruct_refined(&s, 2 * m).unwrap();
        for j in 0..m {
            let next = (j + 1) % m;
            let mid_theta = (j as f64 + 0.5) * h;
            let rho_mid = fine.rho[2 * j + 1];
            let (dx, dy) = (c.x[next] - c.x[j], c.y[next] - c.y[j]);
            let (ex, ey) = (rho_mid * mid_theta.cos() * h, rho_mid * mid_theta.sin() * h);
            // midpoint rule for int rho T over one cell: |(rho T)''| h^3 / 24
            assert!((dx - ex).hypot(dy - ey) < 0.15 * h.powi(3), "cell {j}");
        }
    }

    #[test]
    fn reconstruct_shoelace_area_matches() {
        let s = perturbed(0.3, 2, 128);
        let curve = reconstruct_refined(&s, 128 * 64).unwrap();
        let a = area(&s).unwrap();
        assert!((shoelace_area(&curve).unwrap() - a).abs() < 1e-6);
    }

    #[test]
    fn polygon_perimeter_converges_at_second_order() {
        let errs: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&m| {
                let s = make_ellipse(2.0, 1.0, m).unwrap();
                (polygon_perimeter(&reconstruct(&s).unwrap()).unwrap() - length(&s)).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "order {order} from {errs:?}");
        }
    }

    #[test]
    fn embedded_curve_json_layout() {
        let c = reconstruct(&make_circle(1.0, 16).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json_string()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        for k in ["t", "theta", "rho", "p", "x", "y"] {
            assert!(keys.contains(&k));
        }
        assert_eq!(keys.len(), 6);
    }

    #[test]
    fn spectral_tail_flags_under_resolution() {
        let resolved = perturbed(0.3, 2, 128);
        assert!(spectral_tail(&resolved) < 1e-12);
        let coarse = perturbed(0.1, 6, 16);
        assert!(spectral_tail(&coarse) > 1e-2);
    }
}
