use bellctx_core::generators::{
    pr_box, random_finite_model, random_pr_mixture, random_quad, random_state, random_weights,
};
use bellctx_core::hidden::{hv_bivariate, hv_chsh, Method, QuasiObjectivisticModel};
use bellctx_core::inequalities::{
    bchs_all_variants, bchs_variants, finite_ensemble_chsh, ExperimentQuartet, OutcomeQuadruple,
};
use bellctx_core::joint::{
    check_consistency, fine_equivalence, joint_exists, product_joint, witness_error, WITNESS_TOL,
};
use bellctx_core::macrostate::{
    attempt_quad_construction, macro_bivariate, quantum_target_model, MacrostateModel, MeasurementContext,
};
use bellctx_core::povm::{arm_povm, pair_povm, quad_probabilities, ArmConfig, ExperimentConfig};
use bellctx_core::quantum::{correlation, projective_bivariate};
use bellctx_core::rng::chunk_rng;
use bellctx_core::{Angle, PairSelector, Settings};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = Angle> {
    (0.0..std::f64::consts::PI).prop_map(Angle::new)
}

fn settings() -> impl Strategy<Value = Settings> {
    (angle(), angle(), angle(), angle()).prop_map(|(a, b, c, d)| Settings::new(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correlations_are_bounded(seed in any::<u64>(), rank in 1usize..=4, t1 in angle(), t2 in angle()) {
        let rho = random_state(&mut chunk_rng(seed, 0, 0), rank);
        let e = correlation(&rho, t1, t2);
        prop_assert!((-1.0..=1.0).contains(&e));
    }

    #[test]
    fn povm_laws(gamma in 0.0f64..=1.0, t in angle(), tp in angle()) {
        let arm = ArmConfig::new(gamma, t, tp).unwrap();
        let povm = arm_povm(&arm);
        let id = bellctx_core::linalg::ComplexMatrix::identity(2);
        prop_assert!(povm.sum().max_abs_diff(&id) < 1e-12);
        for (_, m) in povm.elements() {
            prop_assert!(m.min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn pair_povm_completes(g1 in 0.0f64..=1.0, g2 in 0.0f64..=1.0, s in settings()) {
        let rho = bellctx_core::quantum::DensityMatrix::maximally_mixed(4);
        let cfg = ExperimentConfig::from_settings(g1, g2, &s, rho).unwrap();
        let povm = pair_povm(&cfg);
        let id = bellctx_core::linalg::ComplexMatrix::identity(4);
        prop_assert!(povm.sum().max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn generalized_experiment_is_non_signaling(
        seed in any::<u64>(), g1 in 0.0f64..=1.0, g2 in 0.0f64..=1.0, s in settings()
    ) {
        let rho = random_state(&mut chunk_rng(seed, 0, 0), 2);
        let cfg = ExperimentConfig::from_settings(g1, g2, &s, rho).unwrap();
        let q = ExperimentQuartet::from_quad(&quad_probabilities(&cfg));
        prop_assert!(check_consistency(&q).passed);
        prop_assert!(joint_exists(&q).unwrap().is_feasible());
    }

    #[test]
    fn fine_equivalence_on_random_quartets(seed in any::<u64>()) {
        let mut rng = chunk_rng(seed, 0, 0);
        let from_quad = ExperimentQuartet::from_quad(&random_quad(&mut rng));
        prop_assert!(fine_equivalence(&from_quad).unwrap());
        prop_assert!(joint_exists(&from_quad).unwrap().is_feasible());
        let mixed = random_pr_mixture(&mut rng);
        prop_assert!(fine_equivalence(&mixed).unwrap());
    }

    #[test]
    fn feasibility_is_relabel_invariant(seed in any::<u64>(), pick in 0usize..8, flips in any::<[bool; 4]>()) {
        let q = random_pr_mixture(&mut chunk_rng(seed, 0, 0));
        let v = bellctx_core::inequalities::BchsVariant { flips, ..bchs_variants()[pick] };
        let a = joint_exists(&q).unwrap().is_feasible();
        let b = joint_exists(&v.apply(&q)).unwrap().is_feasible();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lp_witness_matches_marginals(seed in any::<u64>()) {
        let q = random_pr_mixture(&mut chunk_rng(seed, 1, 0));
        let r = joint_exists(&q).unwrap();
        if let Some(w) = &r.witness {
            prop_assert!(witness_error(w, &q) < WITNESS_TOL);
        } else {
            let c = r.certificate.unwrap();
            prop_assert!(!(-1.0 - 1e-9..=1e-9).contains(&c.value));
        }
    }

    #[test]
    fn possessed_values_bound(seed in any::<u64>(), n in 1usize..200) {
        let mut rng = chunk_rng(seed, 0, 0);
        let all: Vec<OutcomeQuadruple> = OutcomeQuadruple::all().collect();
        let ens: Vec<OutcomeQuadruple> =
            (0..n).map(|_| all[rand::Rng::random_range(&mut rng, 0..16)]).collect();
        prop_assert!(finite_ensemble_chsh(&ens).unwrap() <= 2.0 + 1e-12);
    }

    #[test]
    fn finite_models_obey_bell(seed in any::<u64>(), grid in 1usize..12, det in any::<bool>()) {
        let s = Settings::chsh_optimal();
        let m = random_finite_model(&mut chunk_rng(seed, 0, 0), grid, &s, det);
        let est = hv_chsh(&m, &s, Method::ExactSum).unwrap();
        prop_assert!(est.value <= 2.0 + 1e-9);
        let r = joint_exists(&est.quartet).unwrap();
        prop_assert!(r.is_feasible());
        let pj = product_joint(&m, &s).unwrap();
        prop_assert!(witness_error(&pj, &est.quartet) < WITNESS_TOL);
    }

    #[test]
    fn hv_single_marginals_ignore_remote_setting(seed in any::<u64>(), s in settings()) {
        let m = random_finite_model(&mut chunk_rng(seed, 0, 0), 6, &s, false);
        let q = bellctx_core::hidden::hv_quartet(&m, &s, Method::ExactSum).unwrap();
        prop_assert!(check_consistency(&q).max_discrepancy < 1e-12);
    }

    #[test]
    fn quantum_target_is_consistent_and_exact(seed in any::<u64>(), s in settings()) {
        let rho = random_state(&mut chunk_rng(seed, 0, 0), 3);
        let m = quantum_target_model(&rho, &s);
        let q = m.quartet().unwrap();
        prop_assert!(check_consistency(&q).max_discrepancy < 1e-12);
        for pair in PairSelector::ALL {
            let (t1, t2) = s.for_pair(pair);
            prop_assert!(q.get(pair).linf_distance(&projective_bivariate(&rho, t1, t2)) < 1e-9);
        }
    }

    #[test]
    fn constant_context_map_degenerates(seed in any::<u64>(), s in settings()) {
        let hv = random_finite_model(&mut chunk_rng(seed, 0, 0), 5, &s, false);
        let m = MacrostateModel::from_quasi_objectivistic(&hv, &s).unwrap();
        for pair in PairSelector::ALL {
            let c = MeasurementContext::for_pair(pair, &s);
            let want = hv_bivariate(&hv, c.settings.0, c.settings.1, Method::ExactSum).unwrap();
            prop_assert!(macro_bivariate(&m, &c).unwrap().linf_distance(&want) < 1e-12);
        }
        let r = attempt_quad_construction(&m).unwrap();
        prop_assert!(r.is_feasible());
        let w = ExperimentQuartet::from_quad(r.witness.as_ref().unwrap());
        prop_assert!(bchs_all_variants(&w).unwrap().satisfied);
    }

    #[test]
    fn weights_are_normalized(seed in any::<u64>(), n in 1usize..50) {
        let w = random_weights(&mut chunk_rng(seed, 0, 0), n);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn pr_box_is_infeasible() {
    let r = joint_exists(&pr_box()).unwrap();
    assert!(!r.is_feasible());
    assert!((pr_box().bell_lhs() - 4.0).abs() < 1e-12);
}

#[test]
fn monte_carlo_error_shrinks_like_inverse_sqrt() {
    let m = QuasiObjectivisticModel::malus(360).unwrap();
    let (t1, t2) = (Angle::ZERO, Angle::new(0.4));
    let exact = hv_bivariate(&m, t1, t2, Method::ExactSum).unwrap().correlation();
    for n in [1_000u64, 10_000, 100_000] {
        let mc = hv_bivariate(&m, t1, t2, Method::MonteCarlo { seed: 9, samples: n }).unwrap();
        // five standard errors of a ±1 average
        assert!((mc.correlation() - exact).abs() < 5.0 / (n as f64).sqrt(), "n = {n}");
    }
}
