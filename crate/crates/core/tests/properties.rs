//! Property tests for the quadrature, scaling and linearity invariants.

use axmots::fields::TrigPoly;
use axmots::geometry::{area, GraphSurface};
use axmots::grid::ThetaGrid;
use axmots::initial_data::{omega_of_surface, surface_quantities, InitialData, ProductData};
use axmots::output::{fmt_sig, round_sig};
use axmots::profile::MetricProfile;
use proptest::prelude::*;
use std::f64::consts::PI;

fn small_coeff() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -0.12..0.12f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_rule_integrates_cos_polynomials_against_sin(degree in 0usize..25) {
        let g = ThetaGrid::gauss(64, PI);
        let vals = g.sample(|t| t.cos().powi(degree as i32) * t.sin());
        let exact = if degree % 2 == 0 { 2.0 / (degree as f64 + 1.0) } else { 0.0 };
        prop_assert!((g.integrate(&vals) - exact).abs() < 1e-12);
    }

    #[test]
    fn area_scales_quadratically(r in 0.3..3.0f64, c0 in small_coeff(), c1 in small_coeff()) {
        let base = MetricProfile::poly(1.0, &[c0, c1]).unwrap();
        let scaled = MetricProfile::poly(r, &[c0, c1]).unwrap();
        let g1 = ThetaGrid::gauss(96, base.domain_len());
        let gr = ThetaGrid::gauss(96, scaled.domain_len());
        let a1 = area(&base, &g1);
        let ar = area(&scaled, &gr);
        prop_assert!(((ar - r * r * a1) / ar).abs() < 1e-12);
    }

    #[test]
    fn komar_is_linear_in_the_rotation_field(b2 in -1.0..1.0f64, b3 in -1.0..1.0f64, s in -2.0..2.0f64) {
        let grid = ThetaGrid::gauss(128, PI);
        let komar_of = |sin2: f64, sin3: f64| -> f64 {
            let beta = TrigPoly::new(vec![0.0, 0.0, sin2, sin3], Vec::new());
            let d = InitialData::Product(
                ProductData::new(MetricProfile::round(), Vec::new(), beta).unwrap(),
            );
            let surf = GraphSurface::constant(d.metric(), &grid, 0.0);
            let q = surface_quantities(&d, &surf, &grid).unwrap();
            omega_of_surface(&q, &grid, 1.0).unwrap().komar
        };
        let lhs = komar_of(s * b2, s * b3);
        let rhs = s * komar_of(b2, b3);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }

    #[test]
    fn omega_ignores_constant_height_shifts(shift in -3.0..3.0f64, amp in 0.0..0.4f64) {
        let d = InitialData::Product(
            ProductData::new(MetricProfile::round(), vec![0.3], TrigPoly::sin_power(2, 0.7)).unwrap(),
        );
        let grid = ThetaGrid::midpoint(128, PI);
        let s1 = GraphSurface::from_fn(d.metric(), &grid, |t| amp * t.cos());
        let s2 = GraphSurface::from_fn(d.metric(), &grid, |t| amp * t.cos() + shift);
        let q1 = surface_quantities(&d, &s1, &grid).unwrap();
        let q2 = surface_quantities(&d, &s2, &grid).unwrap();
        let r1 = omega_of_surface(&q1, &grid, 1.0).unwrap();
        let r2 = omega_of_surface(&q2, &grid, 1.0).unwrap();
        prop_assert!((r1.omega - r2.omega).abs() <= 1e-12 * r1.omega.max(1e-30));
    }

    #[test]
    fn null_expansion_factorization(amp1 in -0.3..0.3f64, amp2 in -0.2..0.2f64, b in 0.0..1.0f64) {
        let d = InitialData::Product(
            ProductData::new(
                MetricProfile::round(),
                vec![0.2, 0.4],
                TrigPoly::sin_power(2, b),
            )
            .unwrap(),
        );
        let grid = ThetaGrid::midpoint(96, PI);
        let s = GraphSurface::from_cos_coeffs(d.metric(), &grid, &[amp1, amp2]);
        let q = surface_quantities(&d, &s, &grid).unwrap();
        for j in 0..grid.n() {
            let lhs = q.theta_plus[j] * q.theta_minus[j];
            let rhs = q.tr_sigma_k[j].powi(2) - q.mean_curvature[j].powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
        // projection bound |X^eta|^2 <= |X|^2
        for j in 0..grid.n() {
            let xsq = q.x_theta[j].powi(2) + q.rho[j].powi(2) * q.x_phi[j].powi(2);
            prop_assert!(q.x_eta_norm2[j] <= xsq + 1e-15);
            prop_assert!(q.x_eta_norm2[j] >= 0.0);
        }
    }

    #[test]
    fn formatted_floats_round_trip(x in prop::num::f64::NORMAL) {
        let printed = fmt_sig(x);
        let parsed: f64 = printed.parse().unwrap();
        prop_assert_eq!(parsed, round_sig(x));
        prop_assert!(((parsed - x) / x).abs() < 1e-11);
    }

    #[test]
    fn horizon_quantities_scale_homogeneously(a_frac in 0.01..0.9f64, lam in 0.2..4.0f64) {
        let a = a_frac * axmots::nariai::a_max(1.0);
        let p1 = axmots::nariai::NariaiParams::new(a, 1.0).unwrap();
        let p2 = axmots::nariai::NariaiParams::new(a * lam, lam).unwrap();
        let r1 = axmots::nariai::report(&p1, 128).unwrap();
        let r2 = axmots::nariai::report(&p2, 128).unwrap();
        prop_assert!(((r2.area - lam * lam * r1.area) / r2.area).abs() < 1e-12);
        prop_assert!(((r2.omega * lam * lam - r1.omega) / r1.omega.max(1e-30)).abs() < 1e-12);
    }
}
