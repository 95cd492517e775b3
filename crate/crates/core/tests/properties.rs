use std::f64::consts::PI;

use proptest::prelude::*;

use areaflow::geometry::{self, spectral};
use areaflow::{make_fourier, rhs_phi, rhs_rho, summarize, CurveState, FlowParams, FourierTerm, GeometricBounds};

fn band_limited() -> impl Strategy<Value = CurveState> {
    let grid = prop_oneof![Just(32usize), Just(64), Just(128)];
    let coeffs = prop::collection::vec((-0.06f64..0.06, -0.06f64..0.06), 5);
    (0.5f64..3.0, coeffs, grid).prop_map(|(a0, c, m)| {
        let terms: Vec<FourierTerm> = c
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| FourierTerm {
                k: i + 2,
                a: a * a0,
                b: b * a0,
            })
            .collect();
        make_fourier(a0, &terms, m).unwrap()
    })
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(3.0), 0.3f64..3.5]
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let h = 2.0 * PI / a.len() as f64;
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h
}

proptest! {
    #[test]
    fn support_function_solves_its_ode(s in band_limited()) {
        let p = geometry::support_function(&s).unwrap();
        let d2 = geometry::second_derivative(&p, areaflow::DerivMethod::Spectral);
        let resid = max_abs(d2.iter().zip(&p).zip(&s.rho).map(|((a, b), r)| a + b - r));
        prop_assert!(resid < 1e-11 * s.mean_rho());
    }

    #[test]
    fn isoperimetric_inequality(s in band_limited()) {
        let l = geometry::length(&s);
        let a = geometry::area(&s).unwrap();
        let iso = geometry::isoperimetric_difference(&s);
        prop_assert!(iso >= 0.0);
        prop_assert!((l * l - 4.0 * PI * a - iso).abs() < 1e-11 * l * l);
    }

    #[test]
    fn holder_chain_and_lambda_lower_bound(s in band_limited(), n in exponent()) {
        let a = geometry::area(&s).unwrap();
        let l = geometry::length(&s);
        let lifted: Vec<f64> = s.rho.iter().map(|r| r.powf(n + 1.0)).collect();
        let int = geometry::integrate_periodic(&lifted).unwrap();
        let via_length = (2.0 * PI).powf(-n) * l.powf(n + 1.0);
        let via_area = 2.0 * PI * (a / PI).powf(0.5 * (n + 1.0));
        prop_assert!(int >= via_length * (1.0 - 1e-12));
        prop_assert!(via_length >= via_area * (1.0 - 1e-12));

        let lambda = geometry::lambda_nonlocal(&s, n, a).unwrap();
        let bounds = GeometricBounds::from_initial(&s, n).unwrap();
        prop_assert!(lambda >= bounds.m1 * (1.0 - 1e-12));
        prop_assert!((bounds.m2 - lambda).abs() <= 1e-12 * lambda);
    }

    #[test]
    fn radius_is_bracketed(s in band_limited()) {
        let r = (geometry::area(&s).unwrap() / PI).sqrt();
        prop_assert!(s.rho_min() <= r * (1.0 + 1e-12));
        prop_assert!(r <= s.rho_max() * (1.0 + 1e-12));
    }

    #[test]
    fn semi_discrete_area_is_conserved(s in band_limited(), n in exponent()) {
        let mut params = FlowParams::with_n(n);
        params.grid_size = s.len();
        let rhs = rhs_rho(&s, &params).unwrap();
        let p = geometry::support_function(&s).unwrap();
        let scale = dot(&p.iter().map(|x| x.abs()).collect::<Vec<_>>(), &rhs.iter().map(|x| x.abs()).collect::<Vec<_>>());
        prop_assert!(dot(&p, &rhs).abs() <= 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn length_derivative_matches_flux(s in band_limited(), n in exponent()) {
        let mut params = FlowParams::with_n(n);
        params.grid_size = s.len();
        let rhs = rhs_rho(&s, &params).unwrap();
        let dl = geometry::integrate_periodic(&rhs).unwrap();
        let summary = summarize(&s, n).unwrap();
        prop_assert!(dl <= 1e-12 * summary.length);
        prop_assert!((dl - summary.flux).abs() <= 1e-10 * summary.length);
    }

    #[test]
    fn flow_keeps_the_curve_closed(s in band_limited(), n in exponent()) {
        let mut params = FlowParams::with_n(n);
        params.grid_size = s.len();
        let rhs = rhs_rho(&s, &params).unwrap();
        let c = spectral(s.len()).forward(&rhs);
        prop_assert!(c[1].norm() <= 1e-12 * max_abs(rhs.iter().copied()).max(1.0));
    }

    #[test]
    fn chain_rule_between_formulations(s in band_limited(), n in exponent()) {
        let mut params = FlowParams::with_n(n);
        params.grid_size = s.len();
        let rho_t = rhs_rho(&s, &params).unwrap();
        let phi: Vec<f64> = s.rho.iter().map(|r| r.powf(n)).collect();
        let phi_t = rhs_phi(&phi, &params).unwrap();
        let chain: Vec<f64> = s.rho.iter().zip(&rho_t).map(|(r, v)| n * r.powf(n - 1.0) * v).collect();
        let scale = max_abs(chain.iter().copied()).max(1e-12);
        prop_assert!(max_abs(phi_t.iter().zip(&chain).map(|(a, b)| a - b)) <= 1e-9 * scale);
    }

    #[test]
    fn rescaling_hits_the_target_area(s in band_limited(), target in 0.1f64..50.0) {
        let r = s.rescaled_to_area(target).unwrap();
        prop_assert!((geometry::area(&r).unwrap() - target).abs() < 1e-12 * target);
    }
}
