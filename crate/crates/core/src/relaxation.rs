//! Relaxation-time toy: a pair's microstate starts on a shared preparation
//! grid and relaxes into the macrostate branch of the measurement context.
//!
//! Per sample in context `c`:
//!
//! 1. draw the prepared grid index `k₀` from the preparation model;
//! 2. after an exponential time with mean `tau` the pair is captured by a
//!    branch of the context's equilibrium model (drawn with its weights);
//! 3. until then it hops `±1` on the preparation ring at rate `diffusion/tau`.
//!
//! Over a window `[0, T]` the outcome is conditioned on whichever region
//! held the larger share of the time: the equilibrium branch's responses,
//! or the preparation responses averaged along the path. Small `T` leaves
//! the shared preparation in control; large `T` hands control to the
//! context's equilibrium statistics.

use alloc::vec::Vec;

use crate::angle::Settings;
use crate::distribution::PairSelector;
use crate::error::{Error, Result};
use crate::exec::{ChunkExecutor, Sequential};
use crate::hidden::{chsh_sigma, QuasiObjectivisticModel};
use crate::inequalities::{bell_lhs, CorrelationQuad};
use crate::macrostate::{quantum_target_model, MacroBranch, MacrostateModel, MeasurementContext};
use crate::quantum::{BellState, DensityMatrix};
use crate::rng::{self, StreamRng};

/// Windows of the bundled demo, in units of `tau`.
pub const DEMO_WINDOWS: [f64; 10] = [0.0, 0.1, 0.3, 1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0];

#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationParams {
    /// Mean capture time; may be infinite (frozen dynamics).
    pub tau: f64,
    /// Hops per `tau` on the preparation ring.
    pub diffusion: f64,
    pub preparation: QuasiObjectivisticModel,
    pub equilibrium: MacrostateModel,
    pub settings: Settings,
    pub samples: u64,
    pub seed: u64,
}

impl RelaxationParams {
    /// `tau = 1`, unit diffusion, Malus preparation on 360 points,
    /// phi_plus outcome-indexed equilibrium at the CHSH-optimal settings.
    pub fn demo(seed: u64) -> Self {
        let settings = Settings::chsh_optimal();
        RelaxationParams {
            tau: 1.0,
            diffusion: 1.0,
            preparation: QuasiObjectivisticModel::malus(360).expect("valid grid"),
            equilibrium: quantum_target_model(&DensityMatrix::bell(BellState::PhiPlus), &settings),
            settings,
            samples: 100_000,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tau.is_nan() || self.tau <= 0.0 {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        if !self.diffusion.is_finite() || self.diffusion < 0.0 {
            return Err(Error::InvalidParameter("diffusion must be finite and nonnegative"));
        }
        if self.samples == 0 {
            return Err(Error::InvalidSampleCount);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxationPoint {
    pub window: f64,
    pub window_over_tau: f64,
    pub chsh: f64,
    pub sigma: f64,
    pub correlations: CorrelationQuad,
}

struct ContextTables {
    prep: [Vec<f64>; 2],
    branches: Vec<MacroBranch>,
    cumulative: Vec<f64>,
}

impl ContextTables {
    fn new(params: &RelaxationParams, pair: PairSelector) -> Result<Self> {
        let context = MeasurementContext::for_pair(pair, &params.settings);
        let (t1, t2) = context.settings;
        let entry = params.equilibrium.entry(&context)?;
        let mut acc = 0.0;
        let cumulative = entry
            .branches
            .iter()
            .map(|b| {
                acc += b.weight;
                acc
            })
            .collect();
        Ok(ContextTables {
            prep: [params.preparation.side_probs(1, t1)?, params.preparation.side_probs(2, t2)?],
            branches: entry.branches.clone(),
            cumulative,
        })
    }

    fn branch(&self, u: f64) -> &MacroBranch {
        let total = *self.cumulative.last().expect("non-empty context");
        let idx = self.cumulative.partition_point(|&c| c <= u * total).min(self.branches.len() - 1);
        &self.branches[idx]
    }
}

fn sample_responses(
    params: &RelaxationParams,
    tables: &ContextTables,
    window: f64,
    rng: &mut StreamRng,
) -> ([f64; 2], [f64; 2]) {
    let (k0, _) = params.preparation.space().sample(rng);
    let u = [rng::uniform(rng), rng::uniform(rng)];
    let u_branch = rng::uniform(rng);
    let capture = rng::exponential(rng) * params.tau;

    if window - capture > capture {
        let b = tables.branch(u_branch);
        return (u, [b.response1, b.response2]);
    }
    let horizon = capture.min(window);
    let rate = params.diffusion / params.tau;
    let n = tables.prep[0].len();
    let mut k = k0;
    let mut t = 0.0;
    let mut acc = [0.0; 2];
    let mut moved = false;
    if rate > 0.0 {
        loop {
            let dt = rng::exponential(rng) / rate;
            if t + dt >= horizon {
                break;
            }
            acc[0] += dt * tables.prep[0][k];
            acc[1] += dt * tables.prep[1][k];
            t += dt;
            moved = true;
            k = if rng::uniform(rng) < 0.5 { (k + 1) % n } else { (k + n - 1) % n };
        }
    }
    if !moved {
        return (u, [tables.prep[0][k0], tables.prep[1][k0]]);
    }
    let rest = horizon - t;
    let p = [
        (acc[0] + rest * tables.prep[0][k]) / horizon,
        (acc[1] + rest * tables.prep[1][k]) / horizon,
    ];
    (u, p)
}

fn relax_chunk(params: &RelaxationParams, tables: &ContextTables, window: f64, lane: u32, chunk: u32) -> [u64; 4] {
    let mut r = rng::chunk_rng(params.seed, lane, chunk);
    let mut counts = [0u64; 4];
    for _ in 0..rng::chunk_len(params.samples, chunk) {
        let (u, p) = sample_responses(params, tables, window, &mut r);
        let i = usize::from(u[0] >= p[0]);
        let j = usize::from(u[1] >= p[1]);
        counts[2 * i + j] += 1;
    }
    counts
}

/// CHSH estimate per window. Random streams depend on the context and chunk
/// only, so every window reuses the same draws.
pub fn relaxation_sweep_with<E: ChunkExecutor>(
    exec: &E,
    params: &RelaxationParams,
    windows: &[f64],
) -> Result<Vec<RelaxationPoint>> {
    params.validate()?;
    if windows.iter().any(|w| w.is_nan() || *w < 0.0) {
        return Err(Error::InvalidParameter("windows must be nonnegative"));
    }
    let tables: Vec<ContextTables> =
        PairSelector::ALL.iter().map(|&p| ContextTables::new(params, p)).collect::<Result<_>>()?;
    let chunks = rng::chunk_count(params.samples);
    windows
        .iter()
        .map(|&window| {
            let mut e = [0.0; 4];
            for (k, t) in tables.iter().enumerate() {
                let c: [u64; 4] = exec.run(chunks, |chunk| Ok(relax_chunk(params, t, window, k as u32, chunk)))?;
                let agree = (c[0] + c[3]) as f64;
                let disagree = (c[1] + c[2]) as f64;
                e[k] = (agree - disagree) / params.samples as f64;
            }
            let corrs = CorrelationQuad::new(e[0], e[1], e[2], e[3])?;
            Ok(RelaxationPoint {
                window,
                window_over_tau: window / params.tau,
                chsh: bell_lhs(&corrs),
                sigma: chsh_sigma(&corrs, params.samples),
                correlations: corrs,
            })
        })
        .collect()
}

pub fn relaxation_sweep(params: &RelaxationParams, windows: &[f64]) -> Result<Vec<RelaxationPoint>> {
    relaxation_sweep_with(&Sequential, params, windows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_tau() {
        let mut p = RelaxationParams::demo(1);
        p.tau = 0.0;
        assert!(relaxation_sweep(&p, &[0.0]).is_err());
        p.tau = -1.0;
        assert!(relaxation_sweep(&p, &[0.0]).is_err());
        let p = RelaxationParams::demo(1);
        assert!(relaxation_sweep(&p, &[-0.5]).is_err());
    }

    #[test]
    fn frozen_dynamics_match_zero_window() {
        let mut p = RelaxationParams::demo(3);
        p.samples = 5_000;
        p.tau = f64::INFINITY;
        let pts = relaxation_sweep(&p, &[0.0, 1.0, 50.0]).unwrap();
        assert_eq!(pts[0].correlations, pts[1].correlations);
        assert_eq!(pts[0].correlations, pts[2].correlations);
    }
}
