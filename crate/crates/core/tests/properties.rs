use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use adlab::quantum::{build_interaction_hamiltonian, instantaneous_eigenframe, rotating_frame_transform, EXCITED};
use adlab::*;

fn drives() -> impl Strategy<Value = (f64, f64, f64)> {
    (-50.0..50.0f64, -50.0..50.0f64, -3.2..3.2f64).prop_filter("nonzero drive", |(a, b, _)| a.hypot(*b) > 1e-3)
}

/// `s = A1 cos(2πx) + (1 − A1) cos(4πx)` or a whole number of circular loops.
fn paths() -> impl Strategy<Value = DrivePath> {
    prop_oneof![
        (0.0..1.0f64).prop_map(|a1| {
            DrivePath::fourier(FourierCoefficients::new(vec![a1, 1.0 - a1], vec![]), 500.0, 1.0).unwrap()
        }),
        (1u32..4).prop_map(|n| DrivePath::circular(n, 500.0, 1.0).unwrap()),
    ]
}

fn profiles() -> impl Strategy<Value = PhaseProfile> {
    prop_oneof![
        (-5.0..5.0f64).prop_map(|c| PhaseProfile::LinearRate { c }),
        (-5.0..5.0f64).prop_map(|c| PhaseProfile::QuadraticRate { c }),
    ]
}

fn noises() -> impl Strategy<Value = NoiseSpec> {
    prop_oneof![
        (0.0..2.0f64, 0.0..10.0f64, 0.0..30.0f64, any::<bool>()).prop_map(|(sigma, gamma, nu0, only)| {
            let symmetry = if only { Symmetry::OnlyG1 } else { Symmetry::Antisymmetric };
            NoiseSpec::Lorentzian(Lorentzian { sigma, gamma, nu0, symmetry })
        }),
        (0.1..2.0f64, 5.0..20.0f64, 0.01..50.0f64, 0.0..3.0f64).prop_map(|(g, delta, kappa, n_thermal)| {
            NoiseSpec::CavityShot(CavityShot { g, delta, kappa, n_thermal })
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tripod_spectrum((o1, o2, phi) in drives()) {
        let h = build_interaction_hamiltonian(o1, o2, phi).unwrap();
        let g = 0.5 * o1.hypot(o2);
        let ev = h.hermitian_eigenvalues();
        for (x, y) in ev.iter().zip([-g, 0.0, 0.0, g]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12 * g.max(1.0));
        }
    }

    #[test]
    fn dark_state_has_no_excited_component((o1, o2, phi) in drives()) {
        let h = build_interaction_hamiltonian(o1, o2, phi).unwrap();
        let frame = instantaneous_eigenframe(o1, o2, phi).unwrap();
        prop_assert!(frame.dark.amplitude(EXCITED).norm() < 1e-14);
        let hd = h.apply(&frame.dark);
        prop_assert!(hd.norm_sqr().sqrt() < 1e-13 * o1.hypot(o2).max(1.0));
    }

    #[test]
    fn static_frame_change_preserves_spectrum((o1, o2, phi) in drives(), (p1, p2, q) in drives()) {
        let h = build_interaction_hamiltonian(o1, o2, phi).unwrap();
        let u = instantaneous_eigenframe(p1, p2, q).unwrap().unitary();
        let rotated = rotating_frame_transform(&h, &u, &ComplexMatrix4::zeros()).unwrap();
        let scale = o1.hypot(o2).max(1.0);
        for (x, y) in rotated.hermitian_eigenvalues().iter().zip(h.hermitian_eigenvalues()) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12 * scale);
        }
    }

    #[test]
    fn variance_and_fidelity_bounds(path in paths(), noise in noises(), a in 0.05..0.95f64) {
        let t_f = path.t_f();
        let var = phase_variance(&path, &noise, t_f).unwrap().value;
        prop_assert!(var >= 0.0);
        let params = ProtocolParams::new(a.sqrt().into(), (1.0 - a).sqrt().into(), 250.0, t_f).unwrap();
        let report = fidelity(&params, &path, &noise).unwrap();
        prop_assert!((0.0..=1.0).contains(&report.fidelity));
        let limit = params.coherence0().norm();
        let trace = coherence(&params, &path, &noise, &[0.0, 0.3, 0.7, 1.0]).unwrap();
        prop_assert!(trace.values.iter().all(|v| v.norm() <= limit * (1.0 + 1e-14)));
    }

    #[test]
    fn filter_function_is_even_and_nonnegative(a1 in -1.0..1.0f64, b1 in -1.0..1.0f64, omega in -100.0..100.0f64) {
        let c = FourierCoefficients::new(vec![a1, 0.5], vec![b1]);
        let f = filter_function(&c, omega, 1.3);
        prop_assert!(f >= 0.0);
        assert_abs_diff_eq!(f, filter_function(&c, -omega, 1.3), epsilon = 1e-12 * f.max(1.0));
    }

    #[test]
    fn bloch_area_tracks_geometric_phase(path in paths(), profile in profiles()) {
        let gamma = geometric_phase(&path.clone().with_phase(profile), path.t_f()).unwrap();
        assert_abs_diff_eq!(8.0 * bloch_area(&path, profile).unwrap(), gamma, epsilon = 1e-12);
    }

    #[test]
    fn geometric_phase_is_additive(path in paths(), profile in profiles(), split in 0.01..0.99f64) {
        let path = path.with_phase(profile);
        let whole = geometric_phase(&path, 1.0).unwrap();
        let parts = geometric_phase(&path, split).unwrap() + geometric_phase_between(&path, split, 1.0).unwrap();
        assert_abs_diff_eq!(whole, parts, epsilon = 1e-12);
    }
}
