mod common;

use fvbound::bounds::{
    chain_from_gamma, fv_upper_bound, fv_upper_bound_3d, hardy_cone, HardyEstimate,
};
use fvbound::star_domain::{
    shape_factors, RadialProfile, ShapeFactors, ShapeOptions, StarDomain,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn factors(d: &StarDomain) -> ShapeFactors {
    shape_factors(d, &ShapeOptions::default()).unwrap()
}

fn with_grid(d: &StarDomain, m: usize) -> ShapeFactors {
    shape_factors(
        d,
        &ShapeOptions {
            grid_per_angle: Some(m),
            ..Default::default()
        },
    )
    .unwrap()
}

/// Planar Fourier profile with mild coefficients, valid for a = 0.5 * min r0.
fn fourier_strategy() -> impl Strategy<Value = StarDomain> {
    (
        prop::collection::vec(-0.08f64..0.08, 0..4),
        prop::collection::vec(-0.08f64..0.08, 0..4),
    )
        .prop_map(|(c, s)| {
            let lower = 1.0 - c.iter().chain(&s).map(|x| x.abs()).sum::<f64>();
            StarDomain::radial_fourier(1.0, c, s, 0.5 * lower)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shape_factors_are_scale_invariant(dom in fourier_strategy(), lambda in 1e-3f64..1e3) {
        let a = factors(&dom);
        let b = factors(&dom.scaled(lambda));
        prop_assert!((a.eta - b.eta).abs() <= 1e-12 * a.eta);
        prop_assert!((a.q_factor - b.q_factor).abs() <= 1e-12);
        let ga = fv_upper_bound(2, a.eta, a.q_factor).unwrap();
        let gb = fv_upper_bound(2, b.eta, b.q_factor).unwrap();
        prop_assert!((ga - gb).abs() <= 1e-12 * ga);
    }

    #[test]
    fn doubling_the_grid_stays_within_the_error_estimate(dom in fourier_strategy()) {
        let coarse = with_grid(&dom, 512);
        let fine = with_grid(&dom, 1024);
        let slack = 1e-12;
        prop_assert!((coarse.eta - fine.eta).abs() <= coarse.eta_error.max(fine.eta_error) + slack);
        prop_assert!((coarse.q_factor - fine.q_factor).abs() <= coarse.q_error.max(fine.q_error) + slack);
    }

    #[test]
    fn ellipsoid_scale_invariance(p in prop::collection::vec(0.7f64..2.0, 3), lambda in 0.01f64..100.0) {
        let a = 0.9 * p.iter().cloned().fold(f64::INFINITY, f64::min);
        let dom = StarDomain::new(3, a, RadialProfile::Ellipse { semi_axes: p });
        let f = shape_factors(&dom, &ShapeOptions { grid_per_angle: Some(33), ..Default::default() }).unwrap();
        let g = shape_factors(&dom.scaled(lambda), &ShapeOptions { grid_per_angle: Some(33), ..Default::default() }).unwrap();
        prop_assert!((f.eta - g.eta).abs() <= 1e-12 * f.eta);
        prop_assert!((f.q_factor - g.q_factor).abs() <= 1e-12);
    }

    #[test]
    fn rotation_leaves_factors_unchanged(dom in fourier_strategy(), phi in 0.0f64..(2.0 * PI)) {
        let a = factors(&dom);
        let b = factors(&dom.rotated(phi).unwrap());
        prop_assert!((a.eta - b.eta).abs() <= 1e-9);
        prop_assert!((a.q_factor - b.q_factor).abs() <= 1e-9);
    }
}

#[test]
fn q_vanishes_exactly_for_constant_profiles() {
    for r in [0.3, 1.0, 7.0] {
        assert_eq!(factors(&StarDomain::ball(2, r, r / 2.0)).q_factor, 0.0);
        let flat = StarDomain::radial_fourier(r, vec![0.0, 0.0], vec![0.0], r / 2.0);
        assert_eq!(factors(&flat).q_factor, 0.0);
    }
    let bumpy = StarDomain::radial_fourier(1.0, vec![0.0, 1e-6], vec![], 0.5);
    assert!(factors(&bumpy).q_factor > 0.0);
}

#[test]
fn ellipse_q_against_dense_scan() {
    // |r0'|/r0 = (q^2 - p^2)|sin cos| / (q^2 cos^2 + p^2 sin^2), scanned on 10^6 angles
    let (p, q) = (1.0f64, 2.0f64);
    let scan = (0..1_000_000)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 1e6;
            let (s, c) = t.sin_cos();
            (q * q - p * p) * (s * c).abs() / (q * q * c * c + p * p * s * s)
        })
        .fold(0.0, f64::max);
    let f = factors(&StarDomain::ellipse([p, q], 1.0));
    assert!((f.q_factor - scan).abs() < 1e-6);
    assert!((f.q_factor - 0.75).abs() < 1e-6);
}

#[test]
fn bound_is_monotone_on_a_grid() {
    for n in 2..=6 {
        for i in 0..50 {
            let eta = 1.0 + 3.0 * i as f64 / 49.0;
            let mut prev = fv_upper_bound(n, eta, 0.0).unwrap();
            for j in 1..50 {
                let g = fv_upper_bound(n, eta, 3.0 * j as f64 / 49.0).unwrap();
                assert!(g >= prev * (1.0 - 1e-15), "n={n} eta={eta}");
                prev = g;
            }
        }
        for j in 0..50 {
            let q = 3.0 * j as f64 / 49.0;
            let mut prev = fv_upper_bound(n, 1.0, q).unwrap();
            for i in 1..50 {
                let g = fv_upper_bound(n, 1.0 + 3.0 * i as f64 / 49.0, q).unwrap();
                // at (n, q) = (2, 0) the bound is identically 1, so allow roundoff
                assert!(g >= prev * (1.0 - 1e-15), "n={n} q={q}");
                prev = g;
            }
        }
    }
}

#[test]
fn three_d_bound_dominates_general_formula() {
    for i in 0..50 {
        let eta = 1.0 + 3.0 * i as f64 / 49.0;
        for j in 0..50 {
            let q = 3.0 * j as f64 / 49.0;
            let general = fv_upper_bound(3, eta, q).unwrap();
            let special = fv_upper_bound_3d(eta, q).unwrap();
            assert!(general <= special * (1.0 + 1e-15));
            if i == 0 {
                assert!((general - special).abs() <= 1e-12 * special);
            }
        }
    }
}

#[test]
fn hardy_cone_decreases_in_theta() {
    for n in 2..=6 {
        let mut prev = f64::INFINITY;
        for k in 1..=30 {
            let h = hardy_cone(n, PI / 2.0 * k as f64 / 30.0).unwrap();
            assert!(h < prev);
            prev = h;
        }
    }
}

#[test]
fn chain_fields_are_consistent() {
    for &g in &[0.0, 0.5, 1.0, 2.0, 20.624, 1e6] {
        for h in [HardyEstimate::convex(), HardyEstimate::planar_john(), HardyEstimate::user(0.3)] {
            let r = chain_from_gamma(g, h, false);
            assert_eq!(r.c_upper, g + 1.0);
            assert_eq!(r.p_upper, h.value * r.c_upper);
            assert_eq!(r.p_lower_if_gamma_tight, None);
        }
    }
}
