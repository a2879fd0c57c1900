use std::f64::consts::PI;

use adlab::*;

fn optimal_path(t_f: f64) -> DrivePath {
    DrivePath::fourier(FourierCoefficients::new(vec![0.2, 0.8], vec![0.0, 0.0]), 2000.0, t_f).unwrap()
}

#[test]
fn circular_angles() {
    let t_f = 2.0;
    let path = DrivePath::circular(1, 10.0, t_f).unwrap();
    assert_eq!(path.theta_at(0.0).unwrap(), 0.0);
    assert_eq!(path.cos2theta_at(0.0).unwrap(), 1.0);
    assert!(path.cos2theta_at(t_f / 8.0).unwrap().abs() < 1e-15);
    assert!((path.theta_at(t_f).unwrap() - 2.0 * PI).abs() < 1e-12);
    assert!(path.theta_at(t_f * 1.01).is_err());
}

#[test]
fn optimal_path_starts_in_first_qubit_state() {
    let path = optimal_path(1.0);
    assert!((path.cos2theta_at(0.0).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(path.theta_at(0.0).unwrap(), 0.0);
}

#[test]
fn fourier_theta_round_trips_and_is_continuous() {
    let coeffs = FourierCoefficients::new(vec![0.2, 0.8], vec![0.0, 0.0]);
    let path = DrivePath::fourier(coeffs.clone(), 100.0, 1.0).unwrap();
    let mut last = path.theta_at(0.0).unwrap();
    for k in 0..=10_000 {
        let t = k as f64 * 1e-4;
        let theta = path.theta_at(t).unwrap();
        let s = coeffs.eval(t)[0];
        assert!(((2.0 * theta).cos() - s).abs() < 1e-9);
        assert!((theta - last).abs() < 0.05, "jump at t = {t}");
        last = theta;
    }
}

#[test]
fn linear_rate_phase_is_independent_of_loop_count() {
    let c = 0.9;
    let t_f = 3.0;
    for n in 1..=4 {
        let path = DrivePath::circular(n, 500.0, t_f).unwrap().with_phase(PhaseProfile::LinearRate { c });
        assert!((geometric_phase(&path, t_f).unwrap() - c * t_f / 2.0).abs() < 1e-10);
    }
}

#[test]
fn phase_is_additive() {
    let path = optimal_path(1.0).with_phase(PhaseProfile::QuadraticRate { c: 5.0 });
    let whole = geometric_phase(&path, 0.8).unwrap();
    let parts = geometric_phase(&path, 0.33).unwrap() + geometric_phase_between(&path, 0.33, 0.8).unwrap();
    assert!((whole - parts).abs() < 1e-12);
}

#[test]
fn closed_coherence_has_constant_magnitude() {
    let params = ProtocolParams::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), 1000.0, 1.0).unwrap();
    let path = optimal_path(1.0).with_phase(PhaseProfile::LinearRate { c: 2.0 });
    assert_eq!(closed_system_coherence(&params, &path, 0.0).unwrap(), params.coherence0());
    for k in 0..=20 {
        let z = closed_system_coherence(&params, &path, k as f64 / 20.0).unwrap();
        assert!((z.norm() - 0.48).abs() < 1e-15);
    }
}

#[test]
fn experimental_cavity_parameters_validity() {
    let params = ProtocolParams::balanced(1e5, 1e-3).unwrap();
    let path = DrivePath::circular(1, 2e5, 1e-3).unwrap();
    let noise = NoiseSpec::CavityShot(CavityShot { g: 5e4, delta: 1e6, kappa: 1e5, n_thermal: 1.0 });
    let report = validity_check(&params, &path, &noise).unwrap();
    for row in ["phi_dot_over_gap", "theta_dot_over_gap", "inverse_gap_time", "second_derivative_over_gap_squared"] {
        assert!(report.get(row).unwrap().pass, "{row}");
    }
    for row in ["slow_drive_vs_detuning", "detuning_matching", "initial_state_correction", "truncation_long_time"] {
        assert!(report.get(row).unwrap().pass, "{row}");
    }
    // g√N/G = 1/2, G/Δ = κ/Δ = 1/10 and κt_f = 100 put these rows outside
    // the "≪ 1" window at this operating point.
    let ratio = |row: &str| report.get(row).unwrap().ratio;
    assert!((ratio("small_coupling") - 0.5).abs() < 1e-12);
    assert!((ratio("large_detuning") - 0.1).abs() < 1e-12);
    assert!((ratio("small_damping") - 0.1).abs() < 1e-12);
    assert!(ratio("truncation_short_time") > 1.0);
    let failing: Vec<&str> = report.failures().collect();
    assert_eq!(failing, ["large_detuning", "small_coupling", "small_damping", "truncation_short_time"]);
    for e in report.entries.values() {
        assert_eq!(e.pass, e.ratio < e.threshold);
    }
}
