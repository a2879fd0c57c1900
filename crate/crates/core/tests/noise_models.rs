use std::f64::consts::PI;

use adlab::noise::{
    boson_second_moment_quadrature, cavity_d_correlation, cavity_pair_correlation, cavity_third_moment_bounds,
    lorentzian_correlation, Method,
};
use adlab::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lorentzian(sigma: f64, gamma: f64, nu0: f64) -> Lorentzian {
    Lorentzian { sigma, gamma, nu0, symmetry: Symmetry::Antisymmetric }
}

/// `s(t) = cos(2πt/t_f)`: a single `cos2θ` period.
fn single_period(t_f: f64) -> DrivePath {
    DrivePath::fourier(FourierCoefficients::new(vec![1.0], vec![]), 1000.0, t_f).unwrap()
}

fn cavity(kappa: f64) -> CavityShot {
    CavityShot { g: 1.0, delta: 10.0, kappa, n_thermal: 1.0 }
}

#[test]
fn lorentzian_correlation_values() {
    assert_eq!(lorentzian_correlation(&lorentzian(1.5, 0.3, 2.0), 0.0), 2.25);
    assert!((lorentzian_correlation(&lorentzian(1.0, 0.0, PI), 1.0) + 1.0).abs() < 1e-15);
    assert!((lorentzian_correlation(&lorentzian(1.0, 1.0, 2.0 * PI), 1.0) - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn silent_noise_has_no_variance() {
    let v = phase_variance(&single_period(1.0), &NoiseSpec::silent(), 1.0).unwrap();
    assert_eq!(v.value, 0.0);
    assert_eq!(v.method, Method::ClosedForm);
}

#[test]
fn full_loop_revival_is_exact() {
    let path = DrivePath::circular(1, 1000.0, 1.0).unwrap();
    let v = phase_variance(&path, &NoiseSpec::Lorentzian(lorentzian(1.0, 0.0, 2.0 * PI)), 1.0).unwrap();
    assert!(v.value < 1e-12);
    for m in [1.0, 3.0, 4.0] {
        assert!(lorentzian_variance_closed_form(1.0, 2.0 * m * PI, 1.0, 2).abs() < 1e-12);
    }
    assert_eq!(lorentzian_variance_closed_form(1.0, 0.0, 1.0, 2), 0.0);
}

#[test]
fn single_period_variance() {
    let path = single_period(1.0);
    let at_half = lorentzian_variance_closed_form(1.0, PI, 1.0, 1);
    assert!((at_half - 4.0 / (9.0 * PI * PI)).abs() < 1e-15);
    let quad = phase_variance(&path, &NoiseSpec::Lorentzian(lorentzian(1.0, 0.0, PI)), 1.0).unwrap().value;
    assert!((quad - at_half).abs() < 1e-10);
    // At ν0 t_f = 2π a single period does not revive.
    let quad = phase_variance(&path, &NoiseSpec::Lorentzian(lorentzian(1.0, 0.0, 2.0 * PI)), 1.0).unwrap().value;
    assert!((quad - 0.25).abs() < 1e-10);
    assert!((lorentzian_variance_closed_form(1.0, 2.0 * PI, 1.0, 1) - 0.25).abs() < 1e-15);
}

#[test]
fn removable_point_is_continuous() {
    let at = lorentzian_variance_closed_form(1.3, 2.0 * PI, 1.0, 1);
    for d in [1e-10, 1e-11, 1e-12] {
        for side in [-1.0, 1.0] {
            let near = lorentzian_variance_closed_form(1.3, 2.0 * PI + side * d, 1.0, 1);
            assert!((near - at).abs() < 1e-9);
        }
    }
}

#[test]
fn boson_trivial_cases() {
    let bath = BosonBath { modes: vec![BosonMode { coupling: 0.0, energy: 3.0 }], beta: 1.0 };
    assert_eq!(boson_second_moment(&bath, 1.0, 1.0).unwrap(), Complex64::new(0.0, 0.0));
    let bath = BosonBath { modes: vec![BosonMode { coupling: 0.1, energy: 5.0 }], beta: 1.0 };
    assert_eq!(boson_second_moment(&bath, 0.0, 1.0).unwrap().norm(), 0.0);
    assert!(BosonBath { modes: vec![], beta: 1.0 }.validate().is_err());
}

#[test]
fn boson_single_mode_against_quadrature() {
    let bath = BosonBath { modes: vec![BosonMode { coupling: 0.1, energy: 5.0 }], beta: 1.0 };
    let path = DrivePath::circular(1, 1000.0, 1.0).unwrap();
    let closed = boson_second_moment(&bath, 1.0, 1.0).unwrap();
    let quad = boson_second_moment_quadrature(&path, &bath, 1.0).unwrap();
    assert!((closed - quad).norm() < 1e-8 * closed.norm());
}

#[test]
fn boson_resonance_uses_the_limit() {
    let t_f = 1.0;
    let b = 2.0 * PI / t_f;
    let at = |e: f64| {
        let bath = BosonBath { modes: vec![BosonMode { coupling: 0.2, energy: e }], beta: 0.7 };
        boson_second_moment(&bath, t_f, t_f).unwrap()
    };
    let exact = at(2.0 * b);
    assert!(exact.re.is_finite() && exact.im.is_finite());
    for d in [1e-3, 1e-5, 1e-7] {
        for e in [2.0 * b + d, 2.0 * b - d] {
            assert!((at(e) - exact).norm() < 1e-2 * d + 1e-13);
        }
    }
    let path = DrivePath::circular(1, 1000.0, t_f).unwrap();
    let bath = BosonBath { modes: vec![BosonMode { coupling: 0.2, energy: 2.0 * b }], beta: 0.7 };
    let quad = boson_second_moment_quadrature(&path, &bath, t_f).unwrap();
    assert!((quad - exact).norm() < 1e-8 * exact.norm());
}

#[test]
fn cavity_correlations() {
    let c = cavity(2.0);
    assert_eq!(cavity_d_correlation(&c, 0.0), 1.0);
    assert!((cavity_d_correlation(&c, 2.0) - (-2.0f64).exp()).abs() < 1e-16);
    assert!((cavity_d_correlation(&cavity(1.0), 2.0) - (-1.0f64).exp()).abs() < 1e-16);
    let vacuum = CavityShot { n_thermal: 0.0, ..c };
    assert_eq!(cavity_d_correlation(&vacuum, 0.7), 0.0);
    assert!((cavity_pair_correlation(&c, 0.5) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn cavity_closed_form_limits() {
    assert!(cavity_second_moment_closed_form(&cavity(1e-12), 1, 1.0) < 1e-12);
    let c = cavity(1.0);
    let path = DrivePath::circular(1, 1000.0, 1.0).unwrap();
    let quad = phase_variance(&path, &NoiseSpec::CavityShot(c), 1.0).unwrap().value;
    let closed = cavity_second_moment_closed_form(&c, 1, 1.0);
    assert!((quad / closed - 1.0).abs() < 1e-8);
    let t_f = 1e3;
    let long = cavity_second_moment_closed_form(&c, 1, t_f) / (c.strength() * t_f / c.kappa);
    assert!((long - 1.0).abs() < 0.01);
}

#[test]
fn cavity_closed_form_matches_quadrature_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let kt = 10f64.powf(rng.gen_range(-2.0..2.0));
        let n = [1u32, 2, 4][rng.gen_range(0..3)];
        let c = cavity(kt);
        let path = DrivePath::circular(n, 1000.0, 1.0).unwrap();
        let quad = phase_variance(&path, &NoiseSpec::CavityShot(c), 1.0).unwrap().value;
        let closed = cavity_second_moment_closed_form(&c, n, 1.0);
        assert!((quad / closed - 1.0).abs() < 1e-7, "κt_f = {kt}, n = {n}");
    }
}

#[test]
fn third_moment_bounds() {
    let none = CavityShot { g: 0.0, ..cavity(1.0) };
    let b = cavity_third_moment_bounds(&none, 1.0, 1.0);
    assert_eq!((b.long_time_ratio, b.short_time_ratio), (0.0, 0.0));
    let c = cavity(2.0);
    let b = cavity_third_moment_bounds(&c, 1.0, 1e6);
    assert!((b.single_loop_term * c.kappa.powi(3) + 4.0).abs() < 1e-6);
    // Experimental operating point: κt_f = 100, so only the long-time
    // truncation criterion applies.
    let exp = CavityShot { g: 5e4, delta: 1e6, kappa: 1e5, n_thermal: 1.0 };
    let b = cavity_third_moment_bounds(&exp, 1.0, 1e-3);
    assert!(b.long_time_ratio < 0.1);
    assert!((b.short_time_ratio - 250.0).abs() < 1e-9);
}

#[test]
fn variance_is_invariant_under_time_reversal() {
    let t_f = 1.3;
    let forward = DrivePath::fourier(FourierCoefficients::new(vec![0.3, 0.7], vec![0.2, -0.1]), 1e3, t_f).unwrap();
    let backward = DrivePath::fourier(FourierCoefficients::new(vec![0.3, 0.7], vec![-0.2, 0.1]), 1e3, t_f).unwrap();
    for spec in [NoiseSpec::Lorentzian(lorentzian(0.8, 0.4, 5.0)), NoiseSpec::CavityShot(cavity(3.0))] {
        let a = phase_variance(&forward, &spec, t_f).unwrap().value;
        let b = phase_variance(&backward, &spec, t_f).unwrap().value;
        assert!((a - b).abs() < 1e-10 * a);
    }
}
