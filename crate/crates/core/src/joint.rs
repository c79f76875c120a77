//! Existence of a quadrivariate joint distribution with prescribed pair
//! marginals, decided as an LP over the 16 atoms, and explicit product
//! constructions `Σ_λ ρ(λ) p(a₁|λ) p(b₁|λ) p(a₂|λ) p(b₂|λ)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::angle::Settings;
use crate::distribution::{Outcome, PairSelector, QuadrivariateDistribution};
use crate::error::{Error, Result};
use crate::hidden::QuasiObjectivisticModel;
use crate::inequalities::{bchs_all_variants, BchsSummary, ExperimentQuartet, CONSISTENCY_TOL};
use crate::simplex;

/// Allowed deviation between witness marginals and the input quartet.
pub const WITNESS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyReport {
    /// `|p(X=+) from one experiment − p(X=+) from the other|` for A1, B1, A2, B2.
    pub discrepancies: [f64; 4],
    pub max_discrepancy: f64,
    pub passed: bool,
}

/// No-signaling check: every single-observable marginal must agree between
/// the two experiments that contain the observable.
pub fn check_consistency(quartet: &ExperimentQuartet) -> ConsistencyReport {
    check_consistency_with(quartet, CONSISTENCY_TOL)
}

pub fn check_consistency_with(quartet: &ExperimentQuartet, tolerance: f64) -> ConsistencyReport {
    let discrepancies = quartet.single_derivations().map(|[x, y]| (x - y).abs());
    let max_discrepancy = discrepancies.iter().copied().fold(0.0, f64::max);
    ConsistencyReport { discrepancies, max_discrepancy, passed: max_discrepancy <= tolerance }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

/// A BCHS variant (index into [`crate::inequalities::bchs_variants`]) and its value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub variant: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub witness: Option<QuadrivariateDistribution>,
    pub certificate: Option<Certificate>,
    /// Phase-1 residual of the LP (zero for explicit constructions).
    pub residual: f64,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }

    pub fn from_witness(witness: QuadrivariateDistribution) -> Self {
        FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(witness),
            certificate: None,
            residual: 0.0,
        }
    }
}

/// Marginal constraint rows over the atoms: `(A, b)` with one row per
/// `(pair, outcome₁, outcome₂)` plus normalization.
fn marginal_system(quartet: &ExperimentQuartet) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut a = Vec::with_capacity(17);
    let mut b = Vec::with_capacity(17);
    for pair in PairSelector::ALL {
        let (x, y) = pair.roles();
        for o1 in Outcome::BOTH {
            for o2 in Outcome::BOTH {
                let row = (0..16)
                    .map(|idx| {
                        let o = QuadrivariateDistribution::outcomes(idx);
                        if o[x] == o1 && o[2 + y] == o2 { 1.0 } else { 0.0 }
                    })
                    .collect();
                a.push(row);
                b.push(quartet.get(pair).get(o1, o2));
            }
        }
    }
    a.push(vec![1.0; 16]);
    b.push(1.0);
    (a, b)
}

/// Largest deviation of the witness's pair marginals from the quartet.
pub fn witness_error(witness: &QuadrivariateDistribution, quartet: &ExperimentQuartet) -> f64 {
    quartet.linf_distance(&ExperimentQuartet::from_quad(witness))
}

fn certificate_of(summary: &BchsSummary) -> Certificate {
    let (variant, value) = summary.most_violated().unwrap_or_else(|| summary.tightest());
    Certificate { variant, value }
}

/// Decides whether some quadrivariate distribution has the quartet's four
/// bivariates as marginals.
///
/// Redundant marginal rows are pruned before a phase-1 simplex; feasible
/// results carry the LP vertex as witness, infeasible ones the most violated
/// BCHS variant.
pub fn joint_exists(quartet: &ExperimentQuartet) -> Result<FeasibilityResult> {
    let report = check_consistency(quartet);
    if !report.passed {
        return Err(Error::InconsistentQuartet { discrepancy: report.max_discrepancy });
    }
    let (a, b) = marginal_system(quartet);
    let rows = simplex::independent_rows(&a, 1e-9);
    let a_red: Vec<Vec<f64>> = rows.iter().map(|&i| a[i].clone()).collect();
    let b_red: Vec<f64> = rows.iter().map(|&i| b[i]).collect();
    let lp = simplex::phase_one(&a_red, &b_red, simplex::FEASIBILITY_TOL);

    if lp.feasible {
        let mut atoms = [0.0; 16];
        atoms.copy_from_slice(&lp.x);
        let total: f64 = atoms.iter().sum();
        for p in atoms.iter_mut() {
            *p /= total;
        }
        let witness = QuadrivariateDistribution::new(atoms)?;
        Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(witness),
            certificate: None,
            residual: lp.infeasibility,
        })
    } else {
        let summary = bchs_all_variants(quartet)?;
        Ok(FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            certificate: Some(certificate_of(&summary)),
            residual: lp.infeasibility,
        })
    }
}

/// True iff the LP decision agrees with "every BCHS variant holds".
pub fn fine_equivalence(quartet: &ExperimentQuartet) -> Result<bool> {
    let lp = joint_exists(quartet)?;
    let bchs = bchs_all_variants(quartet)?;
    Ok(lp.is_feasible() == bchs.satisfied)
}

/// `Σ_λ w(λ) p(a₁|λ) p(b₁|λ) p(a₂|λ) p(b₂|λ)` from per-λ single-observable
/// probabilities of `+`, given as `(w, [a1, b1, a2, b2])`.
pub fn product_joint_from_responses(branches: &[(f64, [f64; 4])]) -> Result<QuadrivariateDistribution> {
    let total: f64 = branches.iter().map(|b| b.0).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(total));
    }
    let mut atoms = [0.0; 16];
    for &(w, p) in branches {
        if w < 0.0 {
            return Err(Error::InvalidParameter("negative weight"));
        }
        if let Some(&bad) = p.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::ProbabilityOutOfRange(bad));
        }
        for (idx, atom) in atoms.iter_mut().enumerate() {
            let o = QuadrivariateDistribution::outcomes(idx);
            let mut term = w;
            for k in 0..4 {
                term *= if o[k] == Outcome::Plus { p[k] } else { 1.0 - p[k] };
            }
            *atom += term;
        }
    }
    QuadrivariateDistribution::new(atoms)
}

/// The product joint of a quasi-objectivistic model at four settings.
pub fn product_joint(model: &QuasiObjectivisticModel, settings: &Settings) -> Result<QuadrivariateDistribution> {
    let weights = model.weights();
    let a1 = model.side_probs(1, settings.a1)?;
    let b1 = model.side_probs(1, settings.b1)?;
    let a2 = model.side_probs(2, settings.a2)?;
    let b2 = model.side_probs(2, settings.b2)?;
    let branches: Vec<(f64, [f64; 4])> =
        (0..weights.len()).map(|k| (weights[k], [a1[k], b1[k], a2[k], b2[k]])).collect();
    product_joint_from_responses(&branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::BivariateDistribution;
    use Outcome::*;

    #[test]
    fn consistency_examples() {
        let q = ExperimentQuartet::from_quad(&QuadrivariateDistribution::uniform());
        let r = check_consistency(&q);
        assert!(r.passed && r.max_discrepancy == 0.0);
        let bad = ExperimentQuartet::new(
            BivariateDistribution::independent(0.6, 0.5),
            BivariateDistribution::independent(0.4, 0.5),
            BivariateDistribution::uniform(),
            BivariateDistribution::uniform(),
        );
        let r = check_consistency(&bad);
        assert!(!r.passed);
        assert!((r.max_discrepancy - 0.2).abs() < 1e-12);
        assert!(matches!(joint_exists(&bad), Err(Error::InconsistentQuartet { .. })));
    }

    #[test]
    fn product_quad_is_feasible() {
        let t1 = BivariateDistribution::new([[0.1, 0.3], [0.2, 0.4]]).unwrap();
        let t2 = BivariateDistribution::new([[0.25, 0.25], [0.05, 0.45]]).unwrap();
        let quad = QuadrivariateDistribution::from_arm_tables(&t1, &t2);
        let q = ExperimentQuartet::from_quad(&quad);
        let r = joint_exists(&q).unwrap();
        assert!(r.is_feasible());
        assert!(witness_error(r.witness.as_ref().unwrap(), &q) < WITNESS_TOL);
    }

    #[test]
    fn product_joint_examples() {
        let one = product_joint_from_responses(&[(1.0, [1.0; 4])]).unwrap();
        assert_eq!(one.get(Plus, Plus, Plus, Plus), 1.0);
        let two = product_joint_from_responses(&[(0.5, [1.0; 4]), (0.5, [0.0; 4])]).unwrap();
        assert_eq!(two.get(Plus, Plus, Plus, Plus), 0.5);
        assert_eq!(two.get(Minus, Minus, Minus, Minus), 0.5);
        assert!(matches!(
            product_joint_from_responses(&[(0.4, [1.0; 4])]),
            Err(Error::NotNormalized(_))
        ));
    }
}
