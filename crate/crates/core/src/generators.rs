//! Random instances for property checks: quads, noisy PR-box quartets,
//! finite hidden-variables models and two-photon states.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::angle::{Angle, Settings};
use crate::distribution::{BivariateDistribution, Outcome, QuadrivariateDistribution};
use crate::hidden::{HiddenVariableSpace, QuasiObjectivisticModel, ResponseFunction};
use crate::inequalities::{bchs_variants, ExperimentQuartet};
use crate::linalg::ComplexMatrix;
use crate::math;
use crate::quantum::DensityMatrix;

fn exp_draw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -math::ln(1.0 - rng.random::<f64>())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

/// Flat Dirichlet weights of length `n`.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| exp_draw(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Quad drawn uniformly from the probability simplex.
pub fn random_quad<R: Rng + ?Sized>(rng: &mut R) -> QuadrivariateDistribution {
    let mut atoms = [0.0; 16];
    atoms.copy_from_slice(&random_weights(rng, 16));
    QuadrivariateDistribution::new(atoms).expect("simplex point")
}

/// The PR box: perfectly correlated on (A1, A2), anti-correlated elsewhere.
pub fn pr_box() -> ExperimentQuartet {
    let corr = BivariateDistribution::new([[0.5, 0.0], [0.0, 0.5]]).expect("table");
    let anti = BivariateDistribution::new([[0.0, 0.5], [0.5, 0.0]]).expect("table");
    ExperimentQuartet::new(corr, anti, anti, anti)
}

/// `v·PR + (1−v)·N` with the PR box in a random orientation of the BCHS
/// orbit, `N` the marginals of a random quad and `v` uniform in `[0, 1]`.
pub fn random_pr_mixture<R: Rng + ?Sized>(rng: &mut R) -> ExperimentQuartet {
    let variants = bchs_variants();
    let pick = variants[rng.random_range(0..variants.len())];
    let mut flips = [false; 4];
    for f in flips.iter_mut() {
        *f = rng.random::<bool>();
    }
    let oriented = crate::inequalities::BchsVariant { flips, ..pick }.apply(&pr_box());
    let noise = ExperimentQuartet::from_quad(&random_quad(rng));
    let v = rng.random::<f64>();
    oriented.mix(&noise, v)
}

fn random_table<R: Rng + ?Sized>(rng: &mut R, n: usize, deterministic: bool) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| {
            core::array::from_fn(|_| {
                if deterministic {
                    if rng.random::<bool>() { 1.0 } else { 0.0 }
                } else {
                    rng.random::<f64>()
                }
            })
        })
        .collect()
}

/// Finite model with `grid` random points and tabulated responses at
/// `settings` (A1, B1 on side 1; A2, B2 on side 2).
pub fn random_finite_model<R: Rng + ?Sized>(
    rng: &mut R,
    grid: usize,
    settings: &Settings,
    deterministic: bool,
) -> QuasiObjectivisticModel {
    let weights = random_weights(rng, grid);
    let points: Vec<(f64, f64)> = weights.iter().enumerate().map(|(k, &w)| (k as f64, w)).collect();
    let space = HiddenVariableSpace::finite(&points).expect("normalized weights");
    let r1 = ResponseFunction::Tabulated {
        settings: [settings.a1, settings.b1],
        table: random_table(rng, grid, deterministic),
    };
    let r2 = ResponseFunction::Tabulated {
        settings: [settings.a2, settings.b2],
        table: random_table(rng, grid, deterministic),
    };
    QuasiObjectivisticModel::new(space, r1, r2).expect("tabulated responses in range")
}

/// Two-photon state `G G† / Tr(G G†)` with Gaussian `G`; pure when `rank` is 1.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> DensityMatrix {
    let rank = rank.clamp(1, 4);
    let mut g = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..rank {
            g.set(i, j, Complex64::new(gaussian(rng), gaussian(rng)));
        }
    }
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let mut m = m.scale(1.0 / tr);
    // symmetrize away rounding
    let sym = (&m + &m.adjoint()).scale(0.5);
    m = sym;
    DensityMatrix::new(m).expect("Gram matrix is a state")
}

/// Random angle in `[0, π)`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> Angle {
    Angle::new(rng.random::<f64>() * core::f64::consts::PI)
}

/// Random outcome quadruple ensembles for the possessed-values bound.
pub fn random_outcomes<R: Rng + ?Sized>(rng: &mut R) -> [Outcome; 4] {
    QuadrivariateDistribution::outcomes(rng.random_range(0..16))
}
