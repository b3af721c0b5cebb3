//! Invariants that cut across modules, checked on random configurations.

use std::f64::consts::PI;

use amplikit::statevector::run_trace;
use amplikit::{
    amplitude_closed, build_iteration_matrix, check_condition, iterate_b, iterate_pair, Complex64, Method, PhaseConfig,
    SearchInstance, UnitarySpec,
};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

/// Configurations away from the cos φ = 0 line, with p log-uniform on
/// [0.003, 0.95] so long periods are common.
fn config() -> impl Strategy<Value = PhaseConfig> {
    (angle(), angle(), (0.003f64.ln()..0.95f64.ln()).prop_map(f64::exp))
        .prop_filter("cos φ bounded away from zero", |&(_, phi, _)| phi.cos().abs() > 0.05)
        .prop_map(|(t, f, p)| PhaseConfig::with_p(t, f, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, max_global_rejects: 8192, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn norm_is_conserved(cfg in config(), k in 0u64..200) {
        let pair = iterate_pair(&build_iteration_matrix(&cfg), k);
        prop_assert!((pair.state_norm_sqr(cfg.u_tau_gamma()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_phase_is_irrelevant(cfg in config(), omega in angle(), k in 1u64..60) {
        let rotated = PhaseConfig::new(cfg.theta(), cfg.phi(), Complex64::from_polar(cfg.p(), omega)).unwrap();
        let plain = iterate_b(&build_iteration_matrix(&cfg), k).norm();
        let turned = iterate_b(&build_iteration_matrix(&rotated), k).norm();
        prop_assert!((plain - turned).abs() < 1e-9 * (1.0 + plain));
    }

    #[test]
    fn closed_form_is_periodic(cfg in config(), k in 0.0f64..50.0) {
        let v = check_condition(&cfg).unwrap();
        let here = amplitude_closed(&cfg, k).unwrap().b_norm;
        let later = amplitude_closed(&cfg, k + v.period).unwrap().b_norm;
        prop_assert!((here - later).abs() < 1e-8 * (1.0 + here));
    }

    /// When the condition holds the integer optimum is reached by a rising
    /// sequence and |b| there is at least as large as at every earlier step.
    #[test]
    fn amplitude_rises_to_integer_optimum(cfg in config()) {
        let v = check_condition(&cfg).unwrap();
        prop_assume!(v.satisfied);
        let k_int = v.k_opt_int.unwrap();
        prop_assume!(k_int <= 2000);
        let m = build_iteration_matrix(&cfg);
        let b: Vec<f64> = (0..=k_int).map(|k| iterate_b(&m, k).norm()).collect();
        for w in b.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        let peak = amplitude_closed(&cfg, v.k_opt_real.unwrap()).unwrap().b_norm;
        prop_assert!((peak - 1.0).abs() < 1e-9);
    }

    /// Unsatisfied configurations never reach |b| = 1 at any integer step.
    #[test]
    fn unsatisfied_never_reaches_one(cfg in config()) {
        let v = check_condition(&cfg).unwrap();
        prop_assume!(v.ratio > 1.0 + 1e-6);
        let m = build_iteration_matrix(&cfg);
        let steps = (v.period.ceil() as u64).clamp(1, 5000);
        for k in 1..=steps {
            prop_assert!(iterate_b(&m, k).norm() < 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn simulation_agrees_with_model(
        seed in any::<u64>(),
        n in 1u32..=4,
        theta in angle(),
        phi in angle(),
        picks in (any::<usize>(), any::<usize>()),
    ) {
        prop_assume!(phi.cos().abs() > 0.05);
        let dim = 1usize << n;
        let gamma = picks.0 % dim;
        let tau = (gamma + 1 + picks.1 % (dim - 1)) % dim;
        let inst = SearchInstance::new(n, gamma, tau, UnitarySpec::Random { seed }, theta, phi).unwrap();
        prop_assume!(inst.u_tau_gamma().norm() > 0.05 && inst.u_tau_gamma().norm() < 0.95);
        let trace = run_trace(&inst, 40).unwrap();
        for s in trace.samples() {
            prop_assert!(s.residual < 1e-9, "k={} residual {:e}", s.k, s.residual);
            prop_assert!(s.estimate(Method::StateVector).is_some());
        }
    }
}
