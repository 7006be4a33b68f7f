use ndarray::Array2;
use proptest::prelude::*;

use bragg_entangle::config::RunConfig;
use bragg_entangle::dynamics::{propagate, CondensateDrive};
use bragg_entangle::fock::{pt_spectrum_oracle, schmidt_coefficients};
use bragg_entangle::projection::JointState;
use bragg_entangle::sweep::{evaluate_point, state_at, SweepPoint};
use bragg_entangle::witness::{evaluate, negativity, su11_inequality};
use bragg_entangle::Complex64;

fn amplitudes(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn joint_state() -> impl Strategy<Value = JointState> {
    amplitudes(9)
        .prop_filter("nonzero", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| JointState::from_amplitudes(Array2::from_shape_vec((3, 3), v).unwrap()).unwrap())
}

fn product_state() -> impl Strategy<Value = JointState> {
    let local = || amplitudes(3).prop_filter("nonzero", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
    (local(), local()).prop_map(|(a, b)| {
        JointState::from_amplitudes(Array2::from_shape_fn((3, 3), |(m, n)| a[m] * b[n])).unwrap()
    })
}

fn figure_point() -> impl Strategy<Value = SweepPoint> {
    (0.05f64..8.0, 0.0f64..10.0, 0.0f64..10.0, 0.5f64..20.0, -3.2f64..3.2, -3.2f64..3.2).prop_map(
        |(tau, eta_a, eta_b, n_p, theta_alpha, theta_beta)| SweepPoint {
            tau,
            eta_a,
            eta_b,
            delta_a: 1.0,
            delta_b: 1.0,
            n_p,
            theta_alpha,
            theta_beta,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_is_symplectic(eta in 0.0f64..10.0, delta in -2.0f64..2.0, tau in 0.0f64..8.0) {
        let c = propagate(&CondensateDrive::real(eta, delta).unwrap(), tau).unwrap();
        prop_assert!(c.relative_symplectic_defect() < 1e-8);
    }

    #[test]
    fn heralded_support_stays_within_two_excitations(p in figure_point(), n_max in 2usize..6) {
        let cfg = RunConfig { n_max, ..RunConfig::default() };
        if let Ok(state) = state_at(&cfg, &p) {
            for ((m, n), c) in state.amplitudes().indexed_iter() {
                if m + n > 2 {
                    prop_assert_eq!(c.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn padding_does_not_change_witnesses(p in figure_point()) {
        let small = RunConfig::default();
        let large = RunConfig { n_max: 4, ..small.clone() };
        if let (Ok((_, a)), Ok((_, b))) = (evaluate_point(&small, &p), evaluate_point(&large, &p)) {
            prop_assert!((a.lhs - b.lhs).abs() <= 1e-10 * a.lhs.abs().max(1.0));
            prop_assert!((a.min_pt_eig - b.min_pt_eig).abs() <= 1e-10);
        }
    }

    #[test]
    fn minimum_pt_eigenvalue_matches_schmidt_oracle(state in joint_state()) {
        let oracle = pt_spectrum_oracle(&schmidt_coefficients(&state));
        prop_assert!((negativity(&state).unwrap() - oracle[0]).abs() < 1e-9);
    }

    #[test]
    fn reduced_form_equals_margin_for_coincidence_states(p in figure_point()) {
        if let Ok((_, r)) = evaluate_point(&RunConfig::default(), &p) {
            prop_assert!(r.n2.abs() <= 1e-12);
            let reduced = r.reduced_form.expect("n2 vanishes");
            let scale = r.rhs.max(1.0);
            prop_assert!((r.lhs_minus_rhs() - reduced).abs() <= 1e-10 * scale);
            if r.lhs_minus_rhs().abs() > 1e-10 * scale {
                prop_assert_eq!(r.lhs_minus_rhs() < 0.0, reduced < 0.0);
            }
        }
    }

    #[test]
    fn separable_states_never_violate(state in product_state()) {
        let ineq = su11_inequality(&state).unwrap();
        prop_assert!(ineq.lhs >= ineq.rhs - 1e-10);
        prop_assert!(!ineq.violated);
        prop_assert!(negativity(&state).unwrap() >= -1e-10);
    }

    #[test]
    fn violation_implies_negative_partial_transpose(state in joint_state()) {
        let r = evaluate(&state).unwrap();
        if r.violated {
            prop_assert!(r.min_pt_eig < 0.0);
        }
    }

    #[test]
    fn swapping_condensates_transposes_the_state(p in figure_point()) {
        let swapped = SweepPoint {
            eta_a: p.eta_b,
            eta_b: p.eta_a,
            theta_alpha: p.theta_beta,
            theta_beta: p.theta_alpha,
            ..p
        };
        let cfg = RunConfig::default();
        if let (Ok(s), Ok(t)) = (state_at(&cfg, &p), state_at(&cfg, &swapped)) {
            let transposed = JointState::from_amplitudes(t.amplitudes().t().to_owned()).unwrap();
            prop_assert!(s.distance_up_to_phase(&transposed) < 1e-10);
            let (a, b) = (evaluate(&s).unwrap(), evaluate(&t).unwrap());
            prop_assert!((a.lhs_minus_rhs() - b.lhs_minus_rhs()).abs() <= 1e-9 * a.rhs);
            prop_assert!((a.min_pt_eig - b.min_pt_eig).abs() <= 1e-10);
        }
    }
}
