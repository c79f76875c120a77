use bellctx_core::macrostate::{
    attempt_quad_construction, context_quads_from_quartet, contextual_values_demo, quantum_target_model,
    MacrostateModel,
};
use bellctx_core::quantum::{product_state, BellState, DensityMatrix};
use bellctx_core::relaxation::{relaxation_sweep, RelaxationParams, DEMO_WINDOWS};
use bellctx_core::{Angle, Outcome, PairSelector, QuadrivariateDistribution, Settings};

#[test]
fn identical_deterministic_contexts_are_consistent() {
    let q = QuadrivariateDistribution::point_mass(Outcome::Plus, Outcome::Minus, Outcome::Minus, Outcome::Plus);
    let r = contextual_values_demo(&[q; 4], 1000, 1).unwrap();
    assert_eq!(r.consistent_rounds, 1000);
    assert_eq!(r.inconsistent_fraction(), 0.0);
}

#[test]
fn quantum_contexts_force_inconsistency() {
    let m = quantum_target_model(&DensityMatrix::bell(BellState::PhiPlus), &Settings::chsh_optimal());
    let quads = context_quads_from_quartet(&m.quartet().unwrap());
    let r = contextual_values_demo(&quads, 10_000, 7).unwrap();
    assert!(r.inconsistent_fraction() > 0.0);
    assert!(r.remote_pattern_rounds >= r.rounds - r.consistent_rounds);
}

#[test]
fn uniform_contexts_report_a_fraction() {
    let u = QuadrivariateDistribution::uniform();
    let r = contextual_values_demo(&[u; 4], 10_000, 3).unwrap();
    // measured values agree for all four observables with probability 1/16
    let f = 1.0 - r.inconsistent_fraction();
    assert!((f - 1.0 / 16.0).abs() < 0.01, "{f}");
}

#[test]
fn shared_quad_is_always_consistent() {
    // one joint quad used by every context: the sampled quadruples need not
    // agree, but a consistent assignment must exist exactly when the
    // measured values do
    let q = QuadrivariateDistribution::point_mass(Outcome::Minus, Outcome::Minus, Outcome::Plus, Outcome::Minus);
    let r = contextual_values_demo(&[q; 4], 500, 2).unwrap();
    assert_eq!(r.remote_pattern_rounds, 0);
    assert_eq!(r.local_pattern_rounds, 0);
}

#[test]
fn quantum_target_examples() {
    let s = Settings::chsh_optimal();
    let m = quantum_target_model(&DensityMatrix::bell(BellState::PhiPlus), &s);
    assert!((m.quartet().unwrap().bell_lhs() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    let r = attempt_quad_construction(&m).unwrap();
    assert!(!r.is_feasible() && r.certificate.is_some());

    let mixed = quantum_target_model(&DensityMatrix::maximally_mixed(4), &s);
    for pair in PairSelector::ALL {
        let b = mixed.quartet().unwrap();
        for a in Outcome::BOTH {
            for c in Outcome::BOTH {
                assert!((b.get(pair).get(a, c) - 0.25).abs() < 1e-12);
            }
        }
    }

    let same = quantum_target_model(&DensityMatrix::bell(BellState::PhiPlus), &Settings::uniform(Angle::new(0.3)));
    assert!(attempt_quad_construction(&same).unwrap().is_feasible());

    let prod = product_state(&DensityMatrix::polarized(Angle::new(0.2)), &DensityMatrix::polarized(Angle::new(1.1)))
        .unwrap();
    let pm = quantum_target_model(&prod, &s).quartet().unwrap();
    for pair in PairSelector::ALL {
        let b = pm.get(pair);
        for a in Outcome::BOTH {
            for c in Outcome::BOTH {
                let f = b.first_marginal(a) * b.second_marginal(c);
                assert!((b.get(a, c) - f).abs() < 1e-12);
            }
        }
    }
    assert!(attempt_quad_construction(&quantum_target_model(&prod, &s)).unwrap().is_feasible());
}

#[test]
fn relaxation_endpoints_and_crossing() {
    let p = RelaxationParams::demo(42);
    let pts = relaxation_sweep(&p, &DEMO_WINDOWS).unwrap();
    let first = pts.first().unwrap();
    let last = pts.last().unwrap();
    assert!(first.chsh <= 2.0 + 3.0 * first.sigma);
    assert!((last.chsh - 2.0 * 2f64.sqrt()).abs() <= 3.0 * last.sigma);
    assert!(pts.windows(2).any(|w| w[0].chsh < 2.0 && w[1].chsh > 2.0));
}

#[test]
fn zero_window_matches_hidden_variables_statistics() {
    let mut p = RelaxationParams::demo(8);
    p.samples = 50_000;
    let pt = relaxation_sweep(&p, &[0.0]).unwrap()[0];
    // Malus preparation: CHSH √2 in expectation
    assert!((pt.chsh - 2f64.sqrt()).abs() < 4.0 * pt.sigma);
    let eq = MacrostateModel::from_quasi_objectivistic(&p.preparation, &p.settings).unwrap();
    assert!(eq.is_context_independent());
}
