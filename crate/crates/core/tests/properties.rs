use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use qsl_core::bounds::{
    alpha, alpha_endpoint, bd_isolated, evaluate_bounds, first_passage, mt_isolated, time_average, EnergyStatistics,
    ReportOptions,
};
use qsl_core::counterexamples::{build_coupling, choose_theta, run_refutation, RefutationSpec};
use qsl_core::evolution::{sample_trajectory, RotatedHamiltonianSystem};
use qsl_core::linalg::{
    anticommutator_residual, commutator_norm, fidelity, trace_distance, CMatrix, HermitianOperator, PureState,
};
use qsl_core::random;

fn operator_and_state(seed: u64, dim: usize, radius: f64) -> (HermitianOperator, PureState) {
    let mut rng = random::seeded(seed, dim as u64);
    let h = random::hermitian(&mut rng, dim, radius);
    let u = random::state(&mut rng, dim);
    (h, u)
}

fn identity_error(m: &CMatrix) -> f64 {
    (m - CMatrix::identity(m.nrows(), m.ncols())).norm()
}

proptest! {
    #[test]
    fn bhatia_davies_inequality(seed: u64, dim in 2usize..=8, radius in 0.1f64..10.0) {
        let (h, u) = operator_and_state(seed, dim, radius);
        let stats = EnergyStatistics::of(&h, &u).unwrap();
        let variance = stats.uncertainty * stats.uncertainty;
        prop_assert!(variance <= stats.bd_factor().powi(2) + 1e-12 * radius * radius);
    }

    #[test]
    fn bhatia_davies_equality_on_two_levels(seed: u64, dim in 2usize..=6, i in 0usize..6, j in 0usize..6, w in 0.05f64..0.95, phase in 0.0f64..(2.0 * PI)) {
        prop_assume!(i < dim && j < dim && i != j);
        let (h, _) = operator_and_state(seed, dim, 3.0);
        let v = &h.eigh().vectors;
        let amps = v.column(i) * Complex64::new(w.sqrt(), 0.0) + v.column(j) * Complex64::from_polar((1.0 - w).sqrt(), phase);
        let u = PureState::new(amps.into_owned()).unwrap();
        let stats = EnergyStatistics::of(&h, &u).unwrap();
        prop_assert!((stats.uncertainty - stats.bd_factor()).abs() < 1e-9);
    }

    #[test]
    fn fidelity_symmetric_and_phase_invariant(seed: u64, dim in 1usize..=8, phase in -10.0f64..10.0) {
        let mut rng = random::seeded(seed, 0);
        let a = random::state(&mut rng, dim);
        let b = random::state(&mut rng, dim);
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-15);
        prop_assert!((f - fidelity(&a.with_global_phase(phase), &b).unwrap()).abs() < 1e-14);
        prop_assert!((fidelity(&a, &a.with_global_phase(phase)).unwrap() - 1.0).abs() < 1e-14);
        prop_assert!(trace_distance(&a, &a.with_global_phase(phase)).unwrap() < 1e-14);
        let td = trace_distance(&a, &b).unwrap();
        prop_assert!((td * td - (1.0 - f)).abs() < 1e-12);
    }

    #[test]
    fn unitary_exp_group_property(seed: u64, dim in 1usize..=8, s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let (h, _) = operator_and_state(seed, dim, 4.0);
        let us = h.unitary_exp(s);
        let ut = h.unitary_exp(t);
        prop_assert!((&us * &ut - h.unitary_exp(s + t)).norm() < 1e-12);
        prop_assert!(identity_error(&(us.adjoint() * &us)) < 1e-12);
        prop_assert!(identity_error(&(h.unitary_exp(-s) * &us)) < 1e-12);
    }

    #[test]
    fn spectral_reconstruction(seed: u64, dim in 1usize..=16, radius in 0.01f64..100.0) {
        let (h, _) = operator_and_state(seed, dim, radius);
        let eig = h.eigh();
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&eig.values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>().into());
        let rebuilt = &eig.vectors * d * eig.vectors.adjoint();
        prop_assert!((rebuilt - h.matrix()).norm() <= 1e-12 * radius.max(1.0));
        prop_assert!(identity_error(&(eig.vectors.adjoint() * &eig.vectors)) < 1e-12);
    }

    #[test]
    fn coupling_makes_a_geodesic(seed: u64, dim in 2usize..=8, radius in 0.1f64..5.0) {
        let (h, u) = operator_and_state(seed, dim, radius);
        let a = build_coupling(&h, &u).unwrap();
        let rho = u.density();
        prop_assert!(anticommutator_residual(a.matrix(), &rho).unwrap() < 1e-10);
        prop_assert!(commutator_norm(h.sub(&a).unwrap().matrix(), &rho).unwrap() < 1e-10);
    }

    #[test]
    fn geodesic_speed_is_constant(seed: u64, dim in 2usize..=6) {
        // arccos√F(t) grows at rate ΔH until the state is orthogonal
        let (h, u) = operator_and_state(seed, dim, 2.0);
        let a = build_coupling(&h, &u).unwrap();
        let speed = h.variance(&u).unwrap().sqrt();
        prop_assume!(speed > 1e-3);
        let sys = RotatedHamiltonianSystem::new(h, a, u).unwrap();
        let distance = |t: f64| fidelity(sys.initial(), &sys.propagate_exact(t)).unwrap().sqrt().acos();
        let dt = 1e-4 / speed;
        for k in 1..10 {
            let t = k as f64 * 0.1 * FRAC_PI_2 / speed;
            let fd = (distance(t + dt) - distance(t - dt)) / (2.0 * dt);
            prop_assert!((fd - speed).abs() < 1e-6 * speed.max(1.0), "t={t} fd={fd} speed={speed}");
        }
    }

    #[test]
    fn evolution_preserves_purity(seed: u64, dim in 1usize..=6, t in 0.0f64..20.0) {
        let mut rng = random::seeded(seed, 1);
        let h = random::hermitian(&mut rng, dim, 3.0);
        let a = random::hermitian(&mut rng, dim, 3.0);
        let u = random::state(&mut rng, dim);
        let sys = RotatedHamiltonianSystem::new(h, a, u).unwrap();
        let rho = sys.propagate_exact(t).density();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!((&rho * &rho - &rho).norm() < 1e-12);
        let rotating = sys.rotating_frame(t, &sys.propagate_exact(t)).unwrap();
        prop_assert!(trace_distance(&rotating, &sys.rotating_state(t)).unwrap() < 1e-10);
    }

    #[test]
    fn commuting_initial_state_conserves_observables(seed: u64, dim in 2usize..=6, t_max in 0.1f64..10.0) {
        let (h, u) = operator_and_state(seed, dim, 3.0);
        let a = build_coupling(&h, &u).unwrap();
        let sys = RotatedHamiltonianSystem::new(h, a, u).unwrap();
        let traj = sample_trajectory(&sys, t_max, 50).unwrap();
        prop_assert!(traj.max_occupation_drift() < 1e-10);
        prop_assert!(traj.max_drift(|s| s.exp_energy) < 1e-10);
        prop_assert!(traj.max_drift(|s| s.energy_uncertainty) < 1e-10);
        prop_assert!(traj.max_drift(|s| s.norm_energy) < 1e-10);
        prop_assert!(traj.max_drift(|s| s.dual_norm_energy) < 1e-10);
    }

    #[test]
    fn isolated_bounds_never_exceed_passage_time(seed: u64, dim in 2usize..=5, delta in 0.0f64..0.99) {
        let (h, u) = operator_and_state(seed, dim, 2.0);
        let sys = RotatedHamiltonianSystem::isolated(h, u).unwrap();
        let options = ReportOptions { samples: 100, ..ReportOptions::default() };
        if let Ok((report, _)) = evaluate_bounds(&sys, delta, &options) {
            prop_assert!(report.violations().is_empty(), "{:?}", report);
        }
    }

    #[test]
    fn alpha_between_bounds_and_decreasing(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let alpha_lo = alpha(lo).unwrap();
        let alpha_hi = alpha(hi).unwrap();
        prop_assert!(alpha_lo <= lo.sqrt().acos() + 1e-12);
        prop_assert!(alpha_lo <= alpha_endpoint(lo) + 1e-12);
        prop_assert!(alpha_hi <= alpha_lo + 1e-12);
        prop_assert!(alpha_lo >= 0.0);
    }

    #[test]
    fn time_average_of_affine_signal(t0 in -5.0f64..5.0, span in 0.1f64..10.0, c in -5.0f64..5.0, m in -5.0f64..5.0, n in 2usize..200) {
        let times: Vec<f64> = (0..=n).map(|k| t0 + span * k as f64 / n as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| c + m * t).collect();
        let exact = c + m * (t0 + 0.5 * span);
        prop_assert!((time_average(&times, &values).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn chosen_angle_satisfies_strict_inequality(delta in 0.0f64..0.999, numerator in 0.01f64..3.0, margin in 0.01f64..2.0) {
        let theta = choose_theta(delta, numerator, margin).unwrap();
        prop_assert!(theta > 0.0 && theta < PI);
        prop_assert!(1.0 / (0.5 * theta).tan() > delta.sqrt().acos() / numerator);
    }

    #[test]
    fn mandelstam_tamm_and_bhatia_davies_agree_on_qubits(seed: u64, delta in 0.0f64..1.0) {
        let (h, u) = operator_and_state(seed, 2, 3.0);
        let mt = mt_isolated(&h, &u, delta).unwrap().value();
        let bd = bd_isolated(&h, &u, delta).unwrap().value();
        prop_assert!((mt - bd).abs() <= 1e-9 * mt.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn any_positive_numerator_is_refuted(delta in 0.0f64..0.95, numerator in 0.05f64..3.0, energy in 0.1f64..5.0) {
        let spec = RefutationSpec::with_margin(delta, numerator, energy, 0.1).unwrap();
        let (report, traj) = run_refutation(&spec, 200).unwrap();
        prop_assert!(report.violated);
        prop_assert!((report.tau - spec.predicted_time()).abs() < 1e-8);
        prop_assert!(report.margins.tau_minus_mt_closed.abs() < 1e-8);
        prop_assert!(traj.samples.iter().all(|s| (s.norm_energy - energy).abs() < 1e-9));
    }

    #[test]
    fn first_passage_is_first(seed: u64, dim in 2usize..=5, delta in 0.0f64..0.95) {
        let (h, u) = operator_and_state(seed, dim, 2.0);
        let sys = RotatedHamiltonianSystem::isolated(h, u).unwrap();
        let horizon = 20.0;
        if let Ok(tau) = first_passage(&sys, delta, horizon) {
            let f = fidelity(sys.initial(), &sys.propagate_exact(tau)).unwrap();
            prop_assert!((f - delta).abs() < 1e-9);
            for k in 0..2000 {
                let t = tau * k as f64 / 2000.0;
                let f = fidelity(sys.initial(), &sys.propagate_exact(t)).unwrap();
                prop_assert!(f >= delta - 1e-9, "fidelity {f} < {delta} at {t} < {tau}");
            }
        }
    }

    #[test]
    fn nonsaturation_margin_positive(seed: u64, dim in 3usize..=6, delta in 0.0f64..0.9) {
        let (h, u) = operator_and_state(seed, dim, 2.0);
        let r = qsl_core::counterexamples::run_bd_nonsaturation_with(&h, &u, delta, 200).unwrap();
        prop_assert!(r.min_pointwise_gap > 0.0);
        prop_assert!(r.closed_gap > 1e-6);
        prop_assert!((r.bounds.tau_actual - r.bounds.mt_closed.value()).abs() < 1e-8);
    }
}
