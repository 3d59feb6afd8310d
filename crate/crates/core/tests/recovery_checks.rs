//! Equilibrium-based stress fields: surface conditions, symmetry, smoothness
//! and their agreement with the continuum reference.

use fgbeam::recovery::{
    fd_moment_second_derivative, fibres, standardize_sigma_y, DerivativeRoute, Standardization, StressRecovery,
    StressSample,
};
use fgbeam::{solve, BeamModel, BoundaryCondition, ElementKind, Error, GradingKind, MaterialLaw, Solution};

const Q: f64 = 5000.0;
const B: f64 = 50.0;
const H: f64 = 200.0;

fn solved(grading: GradingKind, p: f64, kind: ElementKind, n: usize, bc: BoundaryCondition) -> Solution {
    solve(&BeamModel::new(MaterialLaw::standard(grading, p), kind, n, bc, Q)).unwrap()
}

fn ss_cf(grading: GradingKind, p: f64) -> Solution {
    solved(grading, p, ElementKind::MixedCF, 16, BoundaryCondition::SimplySupported)
}

fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[test]
fn surfaces_carry_the_applied_tractions() {
    for grading in [GradingKind::TypeA, GradingKind::TypeB, GradingKind::TypeC] {
        let sol = ss_cf(grading, 5.0);
        let rec = StressRecovery::new(&sol);
        for x in [100.0, 400.0, 1000.0, 1500.0, 1900.0] {
            let top = rec.sample(x, 0.5 * H).unwrap();
            let bottom = rec.sample(x, -0.5 * H).unwrap();
            assert!((top.sigma_y * B - Q).abs() <= 5e-3 * Q, "{grading} σy(x={x}, top) = {}", top.sigma_y);
            assert!(bottom.sigma_y.abs() <= 1e-9 * Q / B, "{grading} σy(x={x}, bottom) = {}", bottom.sigma_y);
            assert!(bottom.tau_xy.abs() <= 1e-9 * Q / B && top.tau_xy.abs() <= 1e-9 * Q / B, "{grading} τ at the faces");
        }
        let at = rec.sample(1500.0, 100.0).unwrap().sigma_y;
        assert!((at - 100.0).abs() < 5e-3, "{grading} σy(1500, 100) = {at}");
    }
}

#[test]
fn midspan_shear_vanishes_under_symmetric_load() {
    let sol = ss_cf(GradingKind::TypeC, 5.0);
    let rec = StressRecovery::new(&sol);
    let peak = rec.profile(100.0, 201).unwrap().iter().fold(0.0f64, |m, s| m.max(s.tau_xy.abs()));
    for s in rec.profile(1000.0, 201).unwrap() {
        assert!(s.tau_xy.abs() <= 1e-6 * peak, "τ(1000, {}) = {}", s.y, s.tau_xy);
    }
}

#[test]
fn profiles_are_continuous_across_layer_junctions() {
    let sol = ss_cf(GradingKind::TypeC, 5.0);
    let rec = StressRecovery::new(&sol);
    let profile = rec.profile(1500.0, 201).unwrap();
    let peak = |f: fn(&StressSample) -> f64| profile.iter().fold(0.0f64, |m, s| m.max(f(s).abs()));
    let d = 1e-7;
    for y in [-40.0, 40.0] {
        let (lo, hi) = (rec.sample(1500.0, y - d).unwrap(), rec.sample(1500.0, y + d).unwrap());
        assert!((lo.tau_xy - hi.tau_xy).abs() < 5e-3 * peak(|s| s.tau_xy), "τ jump at {y}");
        assert!((lo.sigma_y - hi.sigma_y).abs() < 5e-3 * peak(|s| s.sigma_y), "σy jump at {y}");
    }
}

#[test]
fn finite_difference_moments_recover_the_load() {
    let sol = ss_cf(GradingKind::TypeA, 5.0);
    for (x, v) in fd_moment_second_derivative(&sol, 1).unwrap() {
        assert!((v + Q).abs() <= 5e-3 * Q, "Mw''({x}) = {v}");
    }
    let two = solved(GradingKind::TypeA, 5.0, ElementKind::MixedCF, 2, BoundaryCondition::SimplySupported);
    assert!(matches!(fd_moment_second_derivative(&two, 1), Err(Error::Domain(_))));
    assert!(fd_moment_second_derivative(&sol, 5).is_err());
}

#[test]
fn polynomial_force_element_underestimates_surface_load() {
    let sol = solved(GradingKind::TypeA, 5.0, ElementKind::MixedC, 32, BoundaryCondition::SimplySupported);
    let analytic = StressRecovery::new(&sol).sample(1500.0, 100.0).unwrap().sigma_y;
    assert!((analytic - 98.054).abs() <= 0.01 * 98.054, "analytic σy = {analytic}");
    let fd = StressRecovery::new(&sol)
        .with_route(DerivativeRoute::FiniteDifference)
        .unwrap()
        .sample(1500.0, 100.0)
        .unwrap()
        .sigma_y;
    assert!((fd - 100.0).abs() < (analytic - 100.0).abs(), "FD σy = {fd}");
}

#[test]
fn in_plane_equilibrium_holds_pointwise() {
    let sol = ss_cf(GradingKind::TypeC, 5.0);
    let rec = StressRecovery::new(&sol);
    let scale = rec.profile(1000.0, 201).unwrap().iter().fold(0.0f64, |m, s| m.max(s.sigma_x.abs()));
    let (dx, dy) = (1.0, 0.05);
    for i in 1..=9 {
        let x = 2000.0 * i as f64 / 10.0 + 3.0;
        for j in 1..=9 {
            let y = -100.0 + 200.0 * j as f64 / 10.0 + 1.0;
            let sx = |x: f64| rec.sample(x, y).unwrap().sigma_x;
            let tau = |y: f64| rec.sample(x, y).unwrap().tau_xy;
            let divergence = (sx(x + dx) - sx(x - dx)) / (2.0 * dx) + (tau(y + dy) - tau(y - dy)) / (2.0 * dy);
            assert!(divergence.abs() <= 1e-3 * scale, "∂σx/∂x + ∂τ/∂y at ({x}, {y}) = {divergence}");
        }
    }
}

#[test]
fn standardized_transverse_profile_is_insensitive_to_grading_index() {
    let profile = |p: f64| {
        let sol = ss_cf(GradingKind::TypeC, p);
        let raw: Vec<f64> = StressRecovery::new(&sol)
            .profile(1500.0, 201)
            .unwrap()
            .iter()
            .map(|s| s.sigma_y)
            .collect();
        standardize_sigma_y(&raw, Standardization::ByMaxAbs, Q, B).unwrap()
    };
    let set: Vec<Vec<f64>> = [1.0, 5.0, 10.0].into_iter().map(profile).collect();
    for a in 0..3 {
        assert!((set[a].iter().fold(0.0f64, |m, v| m.max(v.abs())) - 1.0).abs() < 1e-12);
        for b in a + 1..3 {
            let d = relative_l2(&set[a], &set[b]);
            assert!(d < 0.10, "profiles {a} and {b} differ by {d}");
        }
    }
}

#[test]
fn standardization_divisors() {
    let scaled = standardize_sigma_y(&[100.0, 50.0], Standardization::ByAnalytical, Q, B).unwrap();
    assert_eq!(scaled, vec![1.0, 0.5]);
    assert!(matches!(
        standardize_sigma_y(&[0.0; 5], Standardization::ByMaxAbs, Q, B),
        Err(Error::Domain(_))
    ));
}

#[test]
fn clamped_shear_profiles_mirror_about_midspan() {
    let sol = solved(GradingKind::TypeC, 5.0, ElementKind::MixedCF, 64, BoundaryCondition::ClampedClamped);
    let rec = StressRecovery::new(&sol);
    let left = rec.profile(800.0, 201).unwrap();
    let right = rec.profile(1200.0, 201).unwrap();
    let peak = left.iter().fold(0.0f64, |m, s| m.max(s.tau_xy.abs()));
    for (l, r) in left.iter().zip(&right) {
        assert!((l.tau_xy + r.tau_xy).abs() <= 0.01 * peak, "τ at y = {}: {} vs {}", l.y, l.tau_xy, r.tau_xy);
    }
}

#[test]
fn stations_outside_the_beam_are_rejected() {
    let sol = ss_cf(GradingKind::TypeA, 1.0);
    let rec = StressRecovery::new(&sol);
    assert!(matches!(rec.sample(2100.0, 0.0), Err(Error::Domain(_))));
    assert!(matches!(rec.sample(100.0, 101.0), Err(Error::Domain(_))));
    assert_eq!(fibres(H, 3), vec![-100.0, 0.0, 100.0]);
}
