use proptest::prelude::*;
use rabisqueeze::hilbert::{number, FockSpace};
use rabisqueeze::linalg::{eig_hermitian, expm_hermitian_propagator, kron, ComplexMatrix};
use rabisqueeze::model::{approx_rabi_eigenstate, h_rabi, rabi_ground_state, Branch, ModelParams};
use rabisqueeze::protocol::{
    run_dispersive_analytic, run_dispersive_numeric, run_rabi_numeric, ProtocolConfig, Variant,
};
use rabisqueeze::squeezing::{bare_mode_variances, squeezed_fock, squeezed_vacuum, squeezing_db, QuadratureVariances};
use rabisqueeze::C;

const HEISENBERG_SLACK: f64 = 1e-6;

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        ComplexMatrix::from_vec(n, n, v.into_iter().map(|(re, im)| C::new(re, im)).collect()).unwrap()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    matrix(n).prop_map(|m| (&m + &m.dagger()).scale_real(0.5))
}

fn coupling() -> impl Strategy<Value = (f64, f64)> {
    (0.01f64..0.15, prop_oneof![1.5f64..10.0, -0.6f64..-0.3])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(2), c in matrix(3)) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-13);
    }

    #[test]
    fn kron_mixed_product(a in matrix(2), b in matrix(3), c in matrix(2), d in matrix(3)) {
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(h in hermitian(7)) {
        let e = eig_hermitian(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-12);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let v = &e.eigenvectors;
        prop_assert!(v.dagger().matmul(v).max_abs_diff(&ComplexMatrix::identity(7)) < 1e-12);
    }

    #[test]
    fn propagator_is_unitary(h in hermitian(6), t in -5.0f64..5.0) {
        let u = expm_hermitian_propagator(&h, t).unwrap();
        prop_assert!(u.matmul(&u.dagger()).max_abs_diff(&ComplexMatrix::identity(6)) <= 1e-9);
    }

    #[test]
    fn rabi_propagator_is_unitary((g, delta) in coupling(), t in 0.0f64..3.0) {
        let p = ModelParams::from_ratios(g, delta).unwrap();
        let space = FockSpace::new(20).unwrap();
        let u = expm_hermitian_propagator(&h_rabi(&p, space), t).unwrap();
        prop_assert!(u.matmul(&u.dagger()).max_abs_diff(&ComplexMatrix::identity(40)) <= 1e-9);
    }

    #[test]
    fn squeezed_vacuum_has_even_parity(r in -0.5f64..0.5) {
        let s = squeezed_vacuum(r, FockSpace::new(40).unwrap()).unwrap();
        let odd = s.amplitudes().unwrap().iter().skip(1).step_by(2).map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(odd <= 1e-12);
    }

    #[test]
    fn squeezed_single_photon_variances(r in -0.3f64..0.3) {
        let s = squeezed_fock(1, r, FockSpace::new(60).unwrap()).unwrap();
        let v = bare_mode_variances(&s).unwrap();
        prop_assert!((v.var_x - 3.0 * (2.0 * r).exp()).abs() < 1e-7);
        prop_assert!((v.var_p - 3.0 * (-2.0 * r).exp()).abs() < 1e-7);
    }

    #[test]
    fn squeezed_states_obey_heisenberg(n in 0usize..4, r in -0.4f64..0.4) {
        let v = bare_mode_variances(&squeezed_fock(n, r, FockSpace::new(60).unwrap()).unwrap()).unwrap();
        prop_assert!(v.uncertainty_product() >= 1.0 - HEISENBERG_SLACK);
    }

    #[test]
    fn eigenstates_obey_heisenberg((g, delta) in coupling()) {
        let p = ModelParams::from_ratios(g, delta).unwrap();
        let space = FockSpace::new(40).unwrap();
        let ground = bare_mode_variances(&rabi_ground_state(&p, space).unwrap()).unwrap();
        prop_assert!(ground.uncertainty_product() >= 1.0 - HEISENBERG_SLACK);
        for b in [Branch::Plus, Branch::Minus] {
            let v = bare_mode_variances(&approx_rabi_eigenstate(&p, b, space).unwrap()).unwrap();
            prop_assert!(v.uncertainty_product() >= 1.0 - HEISENBERG_SLACK);
        }
    }

    #[test]
    fn protocol_states_obey_heisenberg((g, delta) in coupling(), cycles in 0usize..5) {
        let p = ModelParams::from_ratios(g, delta).unwrap();
        let space = FockSpace::new(40).unwrap();
        let cfg = ProtocolConfig::new(Variant::DispersiveNumeric, cycles, p);
        for trace in [
            run_dispersive_analytic(&cfg).unwrap(),
            run_dispersive_numeric(&cfg, space).unwrap(),
            run_rabi_numeric(&cfg, space).unwrap(),
        ] {
            prop_assert_eq!(trace.reports.len(), cycles + 1);
            for r in &trace.reports {
                prop_assert!(r.variances.uncertainty_product() >= 1.0 - HEISENBERG_SLACK);
            }
        }
    }

    #[test]
    fn squeezing_is_monotone_in_min_variance(a in 0.01f64..2.0, b in 0.01f64..2.0) {
        let sa = squeezing_db(QuadratureVariances::new(a, 1.0 / a)).unwrap().s_db;
        let sb = squeezing_db(QuadratureVariances::new(b, 1.0 / b)).unwrap().s_db;
        let (ma, mb) = (a.min(1.0 / a), b.min(1.0 / b));
        if ma < mb {
            prop_assert!(sa >= sb);
        } else if mb < ma {
            prop_assert!(sb >= sa);
        }
        prop_assert!(sa >= 0.0 && sb >= 0.0);
    }

    #[test]
    fn number_operator_is_diagonal_counting(d in 2usize..30) {
        let n = number::<f64>(FockSpace::new(d).unwrap());
        for k in 0..d {
            prop_assert_eq!(n[(k, k)].re, k as f64);
        }
    }
}

#[test]
fn single_precision_tracks_double() {
    let p64 = ModelParams::<f64>::from_ratios(0.1, 2.0).unwrap();
    let p32 = ModelParams::<f32>::from_ratios(0.1, 2.0).unwrap();
    let s64 = run_dispersive_analytic(&ProtocolConfig::new(Variant::DispersiveAnalytic, 5, p64)).unwrap();
    let s32 = run_dispersive_analytic(&ProtocolConfig::new(Variant::DispersiveAnalytic, 5, p32)).unwrap();
    for (a, b) in s64.reports.iter().zip(&s32.reports) {
        assert!((a.s_db - b.s_db as f64).abs() < 1e-4);
    }
    let space = FockSpace::new(12).unwrap();
    let num32 = run_dispersive_numeric(&ProtocolConfig::new(Variant::DispersiveNumeric, 2, p32), space).unwrap();
    assert!((num32.reports[2].s_db as f64 - s64.reports[2].s_db).abs() < 1e-3);
}
