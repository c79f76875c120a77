//! Generalized Aspect experiment: a semi-transparent mirror of transmissivity
//! γ in each arm sends the photon coherently towards a polarizer at θ
//! (detector `a`) and one at θ′ (detector `b`).
//!
//! Arm POVM, indexed `(a, b)` with `+` = registration:
//!
//! ```text
//! R(+,+) = O              R(+,−) = γ E₊(θ)
//! R(−,+) = (1−γ) F₊(θ′)   R(−,−) = γ E₋(θ) + (1−γ) F₋(θ′)
//! ```
//!
//! γ = 1 is an ideal measurement of the θ observable, γ = 0 of the θ′ one.

use alloc::vec::Vec;

use crate::angle::{Angle, Settings};
use crate::distribution::{BivariateDistribution, Outcome, PairSelector, QuadrivariateDistribution};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::{polarization_projectors, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArmConfig {
    gamma: f64,
    pub theta: Angle,
    pub theta_prime: Angle,
}

impl ArmConfig {
    pub fn new(gamma: f64, theta: Angle, theta_prime: Angle) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        Ok(ArmConfig { gamma, theta, theta_prime })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmPovm {
    elements: [[ComplexMatrix; 2]; 2],
}

impl ArmPovm {
    pub fn element(&self, a: Outcome, b: Outcome) -> &ComplexMatrix {
        &self.elements[a.index()][b.index()]
    }

    pub fn elements(&self) -> impl Iterator<Item = ((Outcome, Outcome), &ComplexMatrix)> {
        Outcome::BOTH.into_iter().flat_map(move |a| {
            Outcome::BOTH.into_iter().map(move |b| ((a, b), self.element(a, b)))
        })
    }

    pub fn sum(&self) -> ComplexMatrix {
        self.elements().fold(ComplexMatrix::zeros(2), |acc, (_, m)| &acc + m)
    }
}

/// Sixteen dim-4 operators `R_ijkl = R⁽¹⁾_ij ⊗ R⁽²⁾_kl`, stored in the
/// [`QuadrivariateDistribution`] atom order.
#[derive(Clone, Debug, PartialEq)]
pub struct PairPovm {
    elements: Vec<ComplexMatrix>,
}

impl PairPovm {
    pub fn element(&self, a1: Outcome, b1: Outcome, a2: Outcome, b2: Outcome) -> &ComplexMatrix {
        &self.elements[QuadrivariateDistribution::index(a1, b1, a2, b2)]
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn sum(&self) -> ComplexMatrix {
        self.elements.iter().fold(ComplexMatrix::zeros(4), |acc, m| &acc + m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub arm1: ArmConfig,
    pub arm2: ArmConfig,
    state: DensityMatrix,
}

impl ExperimentConfig {
    pub fn new(arm1: ArmConfig, arm2: ArmConfig, state: DensityMatrix) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: state.dim() });
        }
        Ok(ExperimentConfig { arm1, arm2, state })
    }

    /// Arms built from the `a`/`b` directions of `settings`.
    pub fn from_settings(
        gamma1: f64,
        gamma2: f64,
        settings: &Settings,
        state: DensityMatrix,
    ) -> Result<Self> {
        Self::new(
            ArmConfig::new(gamma1, settings.a1, settings.b1)?,
            ArmConfig::new(gamma2, settings.a2, settings.b2)?,
            state,
        )
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn settings(&self) -> Settings {
        Settings::new(self.arm1.theta, self.arm1.theta_prime, self.arm2.theta, self.arm2.theta_prime)
    }
}

pub fn arm_povm(config: &ArmConfig) -> ArmPovm {
    let g = config.gamma;
    let e = polarization_projectors(config.theta);
    let f = polarization_projectors(config.theta_prime);
    ArmPovm {
        elements: [
            [ComplexMatrix::zeros(2), e.plus.scale(g)],
            [f.plus.scale(1.0 - g), &e.minus.scale(g) + &f.minus.scale(1.0 - g)],
        ],
    }
}

/// Joint detection table of one arm:
/// `[[0, γ⟨E₊⟩], [(1−γ)⟨F₊⟩, 1 − γ⟨E₊⟩ − (1−γ)⟨F₊⟩]]`.
pub fn arm_probabilities(rho1: &DensityMatrix, config: &ArmConfig) -> BivariateDistribution {
    assert_eq!(rho1.dim(), 2, "arm_probabilities needs a single-photon state");
    let g = config.gamma;
    let e_plus = rho1.expectation(&polarization_projectors(config.theta).plus);
    let f_plus = rho1.expectation(&polarization_projectors(config.theta_prime).plus);
    let pa = g * e_plus;
    let pb = (1.0 - g) * f_plus;
    BivariateDistribution::new([[0.0, pa], [pb, 1.0 - pa - pb]])
        .expect("arm table of a valid state")
}

/// Reduced single-photon states `(ρ₁, ρ₂)` of a pair state.
pub fn reduced_states(rho: &DensityMatrix) -> (DensityMatrix, DensityMatrix) {
    (rho.reduced_first(), rho.reduced_second())
}

pub fn pair_povm(config: &ExperimentConfig) -> PairPovm {
    let r1 = arm_povm(&config.arm1);
    let r2 = arm_povm(&config.arm2);
    let elements = (0..16)
        .map(|idx| {
            let [a1, b1, a2, b2] = QuadrivariateDistribution::outcomes(idx);
            r1.element(a1, b1).kron(r2.element(a2, b2))
        })
        .collect();
    PairPovm { elements }
}

/// `p(a₁, b₁, a₂, b₂) = Tr ρ R_ijkl`.
pub fn quad_probabilities(config: &ExperimentConfig) -> QuadrivariateDistribution {
    let povm = pair_povm(config);
    let mut atoms = [0.0; 16];
    for (atom, r) in atoms.iter_mut().zip(povm.elements()) {
        *atom = config.state.expectation(r).max(0.0);
    }
    QuadrivariateDistribution::new(atoms).expect("POVM probabilities of a valid state")
}

/// The four standard Aspect experiments (γ ∈ {0, 1}²), in [`PairSelector::ALL`]
/// order: (1,1) measures A1A2, (1,0) A1B2, (0,1) B1A2, (0,0) B1B2.
pub fn standard_aspect_configs(settings: &Settings, state: &DensityMatrix) -> Result<[ExperimentConfig; 4]> {
    let cfg = |pair: PairSelector| {
        let (x, y) = pair.roles();
        let g1 = if x == 0 { 1.0 } else { 0.0 };
        let g2 = if y == 0 { 1.0 } else { 0.0 };
        ExperimentConfig::from_settings(g1, g2, settings, state.clone())
    };
    Ok([
        cfg(PairSelector::A1A2)?,
        cfg(PairSelector::A1B2)?,
        cfg(PairSelector::B1A2)?,
        cfg(PairSelector::B1B2)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{projective_bivariate, BellState};
    use core::f64::consts::FRAC_PI_4;

    fn arm(g: f64) -> ArmConfig {
        ArmConfig::new(g, Angle::ZERO, Angle::new(FRAC_PI_4)).unwrap()
    }

    #[test]
    fn gamma_range_enforced() {
        assert_eq!(ArmConfig::new(1.2, Angle::ZERO, Angle::ZERO), Err(Error::GammaOutOfRange(1.2)));
        assert!(ArmConfig::new(-0.01, Angle::ZERO, Angle::ZERO).is_err());
        assert!(ArmConfig::new(f64::NAN, Angle::ZERO, Angle::ZERO).is_err());
    }

    #[test]
    fn ideal_limits() {
        use Outcome::*;
        let e = polarization_projectors(Angle::ZERO);
        let f = polarization_projectors(Angle::new(FRAC_PI_4));
        let one = arm_povm(&arm(1.0));
        assert!(one.element(Plus, Plus).is_zero(0.0));
        assert!(one.element(Plus, Minus).max_abs_diff(&e.plus) < 1e-15);
        assert!(one.element(Minus, Plus).is_zero(0.0));
        assert!(one.element(Minus, Minus).max_abs_diff(&e.minus) < 1e-15);
        let zero = arm_povm(&arm(0.0));
        assert!(zero.element(Plus, Minus).is_zero(0.0));
        assert!(zero.element(Minus, Plus).max_abs_diff(&f.plus) < 1e-15);
        assert!(zero.element(Minus, Minus).max_abs_diff(&f.minus) < 1e-15);
    }

    #[test]
    fn half_mirror_povm_is_positive_and_complete() {
        let p = arm_povm(&arm(0.5));
        for (_, m) in p.elements() {
            assert!(m.min_eigenvalue() >= -1e-12);
        }
        assert!(p.sum().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn arm_table_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let t = arm_probabilities(&mixed, &arm(0.5));
        let want = [[0.0, 0.25], [0.25, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t.table()[i][j] - want[i][j]).abs() < 1e-15);
            }
        }
        let eig = DensityMatrix::polarized(Angle::new(0.7));
        let cfg = ArmConfig::new(1.0, Angle::new(0.7), Angle::new(2.0)).unwrap();
        let t = arm_probabilities(&eig, &cfg);
        assert!((t.get(Outcome::Plus, Outcome::Minus) - 1.0).abs() < 1e-15);
        assert_eq!(t.get(Outcome::Plus, Outcome::Plus), 0.0);
    }

    #[test]
    fn ideal_pair_povm_pins_b_outcomes() {
        let rho = DensityMatrix::bell(BellState::PhiPlus);
        let cfg = ExperimentConfig::new(arm(1.0), arm(1.0), rho.clone()).unwrap();
        let povm = pair_povm(&cfg);
        let nonzero = povm.elements().iter().filter(|m| !m.is_zero(1e-15)).count();
        assert_eq!(nonzero, 4);
        let e = polarization_projectors(Angle::ZERO);
        for a1 in Outcome::BOTH {
            for a2 in Outcome::BOTH {
                let want = e.element(a1).kron(e.element(a2));
                let got = povm.element(a1, Outcome::Minus, a2, Outcome::Minus);
                assert!(got.max_abs_diff(&want) < 1e-15);
            }
        }
        let quad = quad_probabilities(&cfg);
        let direct = projective_bivariate(&rho, Angle::ZERO, Angle::ZERO);
        assert!(quad.marginal(PairSelector::A1A2).linf_distance(&direct) < 1e-14);
    }

    #[test]
    fn mixed_state_quad_is_product_of_arm_tables() {
        let cfg = ExperimentConfig::new(arm(0.5), arm(0.5), DensityMatrix::maximally_mixed(4)).unwrap();
        let quad = quad_probabilities(&cfg);
        let t = BivariateDistribution::new([[0.0, 0.25], [0.25, 0.5]]).unwrap();
        let want = QuadrivariateDistribution::from_arm_tables(&t, &t);
        assert!(quad.linf_distance(&want) < 1e-15);
    }

    #[test]
    fn rejects_single_photon_experiment_state() {
        let r = ExperimentConfig::new(arm(0.5), arm(0.5), DensityMatrix::maximally_mixed(2));
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 4, found: 2 })));
    }
}
