//! Quasi-objectivistic hidden-variables models.
//!
//! A hidden variable λ is prepared with density ρ(λ) independently of the
//! measurement; each side answers `+` with probability `p(+ | λ, θ)` that
//! depends only on its own setting θ. Bivariates are
//! `p(a₁, a₂) = Σ_λ ρ(λ) p(a₁|λ) p(a₂|λ)`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::angle::{Angle, Settings};
use crate::distribution::{BivariateDistribution, PairSelector};
use crate::error::{Error, Result};
use crate::exec::{ChunkExecutor, Sequential};
use crate::inequalities::{bell_lhs, CorrelationQuad, ExperimentQuartet};
use crate::math;
use crate::rng::{self, StreamRng};

/// Grid resolution used for exact sums over the polarization circle.
pub const DEFAULT_CIRCLE_GRID: usize = 3600;

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Explicit points with weights.
    FiniteGrid,
    /// λ uniform on `[0, π)`; exact sums use a midpoint grid.
    ContinuousCircle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HiddenVariableSpace {
    kind: SpaceKind,
    points: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl HiddenVariableSpace {
    /// `points` are `(λ, weight)`; weights must be nonnegative and sum to 1 within 1e-12.
    pub fn finite(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty hidden-variable grid"));
        }
        if points.iter().any(|&(l, w)| !l.is_finite() || !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidParameter("grid weights must be finite and nonnegative"));
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::NotNormalized(total));
        }
        let weights: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(HiddenVariableSpace {
            kind: SpaceKind::FiniteGrid,
            points: points.iter().map(|p| p.0).collect(),
            weights,
            cumulative,
        })
    }

    pub fn circle(grid_size: usize) -> Result<Self> {
        if grid_size == 0 {
            return Err(Error::InvalidParameter("circle grid needs at least one point"));
        }
        let n = grid_size as f64;
        Ok(HiddenVariableSpace {
            kind: SpaceKind::ContinuousCircle,
            points: (0..grid_size).map(|k| (k as f64 + 0.5) * PI / n).collect(),
            weights: alloc::vec![1.0 / n; grid_size],
            cumulative: Vec::new(),
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(index, λ, weight)` over the exact-sum grid.
    pub fn grid(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.points.iter().zip(&self.weights).enumerate().map(|(i, (&l, &w))| (i, l, w))
    }

    /// Draws `(grid index, λ)` from ρ.
    pub fn sample(&self, rng: &mut StreamRng) -> (usize, f64) {
        let u = rng::uniform(rng);
        match self.kind {
            SpaceKind::ContinuousCircle => {
                let n = self.points.len();
                let idx = ((u * n as f64) as usize).min(n - 1);
                (idx, u * PI)
            }
            SpaceKind::FiniteGrid => {
                let total = *self.cumulative.last().expect("non-empty grid");
                let target = u * total;
                let idx = self
                    .cumulative
                    .partition_point(|&c| c <= target)
                    .min(self.points.len() - 1);
                (idx, self.points[idx])
            }
        }
    }
}

/// Probability of outcome `+` given λ and the local setting.
#[derive(Clone, Debug, PartialEq)]
pub enum ResponseFunction {
    /// Deterministic `+` iff `cos 2(θ − λ) ≥ 0`.
    SawTooth,
    /// `cos²(θ − λ)`.
    Malus,
    Constant(f64),
    /// Per-grid-point probabilities at exactly two settings.
    Tabulated { settings: [Angle; 2], table: Vec<[f64; 2]> },
}

impl ResponseFunction {
    pub fn prob_plus(&self, point: usize, lambda: f64, setting: Angle) -> Result<f64> {
        match self {
            ResponseFunction::SawTooth => {
                let c = math::cos(2.0 * (setting.radians() - lambda));
                Ok(if c >= 0.0 { 1.0 } else { 0.0 })
            }
            ResponseFunction::Malus => {
                let c = math::cos(setting.radians() - lambda);
                Ok((c * c).clamp(0.0, 1.0))
            }
            ResponseFunction::Constant(p) => Ok(*p),
            ResponseFunction::Tabulated { settings, table } => {
                let col = settings
                    .iter()
                    .position(|s| s.distance(setting) <= 1e-12)
                    .ok_or(Error::UnknownSetting(setting.radians()))?;
                table
                    .get(point)
                    .map(|row| row[col])
                    .ok_or(Error::InvalidParameter("grid index outside response table"))
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        let binary = |p: f64| p == 0.0 || p == 1.0;
        match self {
            ResponseFunction::SawTooth => true,
            ResponseFunction::Malus => false,
            ResponseFunction::Constant(p) => binary(*p),
            ResponseFunction::Tabulated { table, .. } => table.iter().flatten().all(|&p| binary(p)),
        }
    }

    fn validate(&self, grid_len: usize) -> Result<()> {
        match self {
            ResponseFunction::Constant(p) if !(0.0..=1.0).contains(p) => {
                Err(Error::ProbabilityOutOfRange(*p))
            }
            ResponseFunction::Tabulated { table, .. } => {
                if table.len() != grid_len {
                    return Err(Error::DimensionMismatch { expected: grid_len, found: table.len() });
                }
                match table.iter().flatten().find(|p| !(0.0..=1.0).contains(*p)) {
                    Some(&p) => Err(Error::ProbabilityOutOfRange(p)),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiObjectivisticModel {
    space: HiddenVariableSpace,
    response1: ResponseFunction,
    response2: ResponseFunction,
}

impl QuasiObjectivisticModel {
    pub fn new(
        space: HiddenVariableSpace,
        response1: ResponseFunction,
        response2: ResponseFunction,
    ) -> Result<Self> {
        response1.validate(space.len())?;
        response2.validate(space.len())?;
        Ok(QuasiObjectivisticModel { space, response1, response2 })
    }

    /// Deterministic sign model, identical on both sides, λ uniform on the circle.
    pub fn saw_tooth(grid_size: usize) -> Result<Self> {
        Self::new(HiddenVariableSpace::circle(grid_size)?, ResponseFunction::SawTooth, ResponseFunction::SawTooth)
    }

    /// Independent Malus-law responses on both sides; correlation `½ cos 2Δ`.
    pub fn malus(grid_size: usize) -> Result<Self> {
        Self::new(HiddenVariableSpace::circle(grid_size)?, ResponseFunction::Malus, ResponseFunction::Malus)
    }

    pub fn space(&self) -> &HiddenVariableSpace {
        &self.space
    }

    pub fn response1(&self) -> &ResponseFunction {
        &self.response1
    }

    pub fn response2(&self) -> &ResponseFunction {
        &self.response2
    }

    pub fn is_deterministic(&self) -> bool {
        self.response1.is_deterministic() && self.response2.is_deterministic()
    }

    /// Grid weights ρ(λ).
    pub fn weights(&self) -> Vec<f64> {
        self.space.weights.clone()
    }

    /// `p(+ | λ, θ)` over the grid for side 1 or 2.
    pub fn side_probs(&self, side: u8, theta: Angle) -> Result<Vec<f64>> {
        let response = if side == 1 { &self.response1 } else { &self.response2 };
        self.space.grid().map(|(i, l, _)| response.prob_plus(i, l, theta)).collect()
    }

    /// `(weight, p(+|λ) side 1, p(+|λ) side 2)` over the grid.
    pub fn responses_at(&self, theta1: Angle, theta2: Angle) -> Result<Vec<(f64, f64, f64)>> {
        self.space
            .grid()
            .map(|(i, l, w)| {
                Ok((w, self.response1.prob_plus(i, l, theta1)?, self.response2.prob_plus(i, l, theta2)?))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactSum,
    MonteCarlo { seed: u64, samples: u64 },
}

fn exact_bivariate(model: &QuasiObjectivisticModel, theta1: Angle, theta2: Angle) -> Result<BivariateDistribution> {
    let mut t = [[0.0; 2]; 2];
    for (w, p1, p2) in model.responses_at(theta1, theta2)? {
        let f = [p1, 1.0 - p1];
        let s = [p2, 1.0 - p2];
        for i in 0..2 {
            for j in 0..2 {
                t[i][j] += w * f[i] * s[j];
            }
        }
    }
    BivariateDistribution::new(t)
}

/// Outcome counts for one chunk of a Monte-Carlo run, flattened `[++, +−, −+, −−]`.
pub fn hv_counts_chunk(
    model: &QuasiObjectivisticModel,
    theta1: Angle,
    theta2: Angle,
    seed: u64,
    lane: u32,
    chunk: u32,
    len: u64,
) -> Result<[u64; 4]> {
    let mut rng = rng::chunk_rng(seed, lane, chunk);
    let mut counts = [0u64; 4];
    for _ in 0..len {
        let (idx, lambda) = model.space.sample(&mut rng);
        let u1 = rng::uniform(&mut rng);
        let u2 = rng::uniform(&mut rng);
        let p1 = model.response1.prob_plus(idx, lambda, theta1)?;
        let p2 = model.response2.prob_plus(idx, lambda, theta2)?;
        let i = usize::from(u1 >= p1);
        let j = usize::from(u2 >= p2);
        counts[2 * i + j] += 1;
    }
    Ok(counts)
}

/// Monte-Carlo bivariate on the given lane, evaluated by `exec`.
pub fn hv_bivariate_sampled<E: ChunkExecutor>(
    exec: &E,
    model: &QuasiObjectivisticModel,
    theta1: Angle,
    theta2: Angle,
    seed: u64,
    samples: u64,
    lane: u32,
) -> Result<BivariateDistribution> {
    if samples == 0 {
        return Err(Error::InvalidSampleCount);
    }
    let counts: [u64; 4] = exec.run(rng::chunk_count(samples), |c| {
        hv_counts_chunk(model, theta1, theta2, seed, lane, c, rng::chunk_len(samples, c))
    })?;
    BivariateDistribution::from_counts([[counts[0], counts[1]], [counts[2], counts[3]]])
}

pub fn hv_bivariate(
    model: &QuasiObjectivisticModel,
    theta1: Angle,
    theta2: Angle,
    method: Method,
) -> Result<BivariateDistribution> {
    match method {
        Method::ExactSum => exact_bivariate(model, theta1, theta2),
        Method::MonteCarlo { seed, samples } => {
            hv_bivariate_sampled(&Sequential, model, theta1, theta2, seed, samples, 0)
        }
    }
}

/// Four bivariates from one model; Monte-Carlo pair `k` uses lane `k`.
pub fn hv_quartet_with<E: ChunkExecutor>(
    exec: &E,
    model: &QuasiObjectivisticModel,
    settings: &Settings,
    method: Method,
) -> Result<ExperimentQuartet> {
    ExperimentQuartet::try_from_fn(|pair| {
        let (t1, t2) = settings.for_pair(pair);
        match method {
            Method::ExactSum => exact_bivariate(model, t1, t2),
            Method::MonteCarlo { seed, samples } => {
                hv_bivariate_sampled(exec, model, t1, t2, seed, samples, pair.index() as u32)
            }
        }
    })
}

pub fn hv_quartet(model: &QuasiObjectivisticModel, settings: &Settings, method: Method) -> Result<ExperimentQuartet> {
    hv_quartet_with(&Sequential, model, settings, method)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshEstimate {
    /// [`bell_lhs`] of the quartet correlations.
    pub value: f64,
    /// Statistical standard error; zero for exact sums.
    pub sigma: f64,
    pub quartet: ExperimentQuartet,
}

/// Standard error of [`bell_lhs`] when each correlation is estimated from
/// `samples` independent pairs.
pub fn chsh_sigma(corrs: &CorrelationQuad, samples: u64) -> f64 {
    let var: f64 = PairSelector::ALL.iter().map(|&p| 1.0 - corrs.get(p) * corrs.get(p)).sum();
    math::sqrt(var / samples as f64)
}

pub fn hv_chsh_with<E: ChunkExecutor>(
    exec: &E,
    model: &QuasiObjectivisticModel,
    settings: &Settings,
    method: Method,
) -> Result<ChshEstimate> {
    let quartet = hv_quartet_with(exec, model, settings, method)?;
    let corrs = quartet.correlations();
    let sigma = match method {
        Method::ExactSum => 0.0,
        Method::MonteCarlo { samples, .. } => chsh_sigma(&corrs, samples),
    };
    Ok(ChshEstimate { value: bell_lhs(&corrs), sigma, quartet })
}

pub fn hv_chsh(model: &QuasiObjectivisticModel, settings: &Settings, method: Method) -> Result<ChshEstimate> {
    hv_chsh_with(&Sequential, model, settings, method)
}

/// Closed-form correlation of the saw-tooth model at relative angle Δ.
pub fn sawtooth_correlation(delta: f64) -> f64 {
    let d = Angle::ZERO.distance(Angle::new(delta));
    1.0 - 4.0 * d / PI
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitPoint {
    pub delta: f64,
    pub model: f64,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub max_deviation: f64,
    pub at_delta: f64,
    pub points: Vec<FitPoint>,
}

/// Compares the model correlation `E(0, Δ)` (exact sum) against
/// `target = [(Δ, E_target)]` and reports the largest absolute deviation.
pub fn best_lhv_fit(model: &QuasiObjectivisticModel, target: &[(f64, f64)]) -> Result<FitReport> {
    let mut points = Vec::with_capacity(target.len());
    let mut max_deviation = 0.0;
    let mut at_delta = 0.0;
    for &(delta, t) in target {
        let e = exact_bivariate(model, Angle::ZERO, Angle::new(delta))?.correlation();
        let dev = (e - t).abs();
        if dev > max_deviation {
            max_deviation = dev;
            at_delta = delta;
        }
        points.push(FitPoint { delta, model: e, target: t });
    }
    Ok(FitReport { max_deviation, at_delta, points })
}

/// `n` evenly spaced relative angles covering `[0, π/2]`.
pub fn delta_grid(n: usize) -> Vec<f64> {
    if n <= 1 {
        return alloc::vec![0.0; n];
    }
    (0..n).map(|k| FRAC_PI_2 * k as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn sawtooth_examples() {
        let m = QuasiObjectivisticModel::saw_tooth(DEFAULT_CIRCLE_GRID).unwrap();
        let e = |t2: f64| hv_bivariate(&m, Angle::ZERO, Angle::new(t2), Method::ExactSum).unwrap().correlation();
        assert!((e(0.0) - 1.0).abs() < 1e-12);
        assert!((e(FRAC_PI_2) + 1.0).abs() < 1e-12);
        assert!(e(FRAC_PI_4).abs() < 1e-12);
        assert!(m.is_deterministic());
    }

    #[test]
    fn sawtooth_quarter_angle_matches_fine_grid() {
        // oracle: direct summation on an independent 10⁴-point grid
        let n = 10_000;
        let mut acc = 0.0;
        for k in 0..n {
            let l = (k as f64 + 0.5) * PI / n as f64;
            let a = if (2.0 * (0.0 - l)).cos() >= 0.0 { 1.0 } else { -1.0 };
            let b = if (2.0 * (FRAC_PI_4 - l)).cos() >= 0.0 { 1.0 } else { -1.0 };
            acc += a * b;
        }
        assert!((acc / n as f64).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_optimal_chsh_is_two() {
        let m = QuasiObjectivisticModel::saw_tooth(DEFAULT_CIRCLE_GRID).unwrap();
        let est = hv_chsh(&m, &Settings::chsh_optimal(), Method::ExactSum).unwrap();
        assert!(est.value <= 2.0 + 1e-9);
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn malus_model_reaches_sqrt_two() {
        let m = QuasiObjectivisticModel::malus(DEFAULT_CIRCLE_GRID).unwrap();
        let est = hv_chsh(&m, &Settings::chsh_optimal(), Method::ExactSum).unwrap();
        assert!((est.value - SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn constant_and_point_models() {
        let space = HiddenVariableSpace::finite(&[(0.3, 1.0)]).unwrap();
        let m = QuasiObjectivisticModel::new(space.clone(), ResponseFunction::Constant(0.5), ResponseFunction::Constant(0.5)).unwrap();
        let q = hv_quartet(&m, &Settings::chsh_optimal(), Method::ExactSum).unwrap();
        for p in PairSelector::ALL {
            assert!(q.get(p).linf_distance(&BivariateDistribution::uniform()) < 1e-15);
        }
        let det = QuasiObjectivisticModel::new(space, ResponseFunction::Constant(1.0), ResponseFunction::Constant(0.0)).unwrap();
        let q = hv_quartet(&det, &Settings::chsh_optimal(), Method::ExactSum).unwrap();
        for p in PairSelector::ALL {
            let want = BivariateDistribution::point_mass(crate::Outcome::Plus, crate::Outcome::Minus);
            assert_eq!(*q.get(p), want);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(HiddenVariableSpace::finite(&[(0.0, 0.5)]), Err(Error::NotNormalized(_))));
        assert!(HiddenVariableSpace::finite(&[]).is_err());
        assert!(HiddenVariableSpace::circle(0).is_err());
        let space = HiddenVariableSpace::finite(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let short = ResponseFunction::Tabulated { settings: [Angle::ZERO, Angle::new(1.0)], table: alloc::vec![[0.0, 1.0]] };
        assert!(matches!(
            QuasiObjectivisticModel::new(space.clone(), short, ResponseFunction::Malus),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(QuasiObjectivisticModel::new(space.clone(), ResponseFunction::Constant(1.5), ResponseFunction::Malus).is_err());
        let tab = ResponseFunction::Tabulated { settings: [Angle::ZERO, Angle::new(1.0)], table: alloc::vec![[0.0, 1.0]; 2] };
        let m = QuasiObjectivisticModel::new(space, tab, ResponseFunction::Malus).unwrap();
        assert!(matches!(
            hv_bivariate(&m, Angle::new(0.5), Angle::ZERO, Method::ExactSum),
            Err(Error::UnknownSetting(_))
        ));
        assert_eq!(
            hv_bivariate(&m, Angle::ZERO, Angle::ZERO, Method::MonteCarlo { seed: 1, samples: 0 }),
            Err(Error::InvalidSampleCount)
        );
    }

    #[test]
    fn fit_report_examples() {
        let m = QuasiObjectivisticModel::saw_tooth(DEFAULT_CIRCLE_GRID).unwrap();
        let grid = delta_grid(100);
        let own: Vec<(f64, f64)> = grid
            .iter()
            .map(|&d| (d, hv_bivariate(&m, Angle::ZERO, Angle::new(d), Method::ExactSum).unwrap().correlation()))
            .collect();
        assert_eq!(best_lhv_fit(&m, &own).unwrap().max_deviation, 0.0);
        let quantum: Vec<(f64, f64)> = grid.iter().map(|&d| (d, (2.0 * d).cos())).collect();
        let r = best_lhv_fit(&m, &quantum).unwrap();
        assert!(r.max_deviation > 0.1, "{}", r.max_deviation);
        let zero: Vec<(f64, f64)> = grid.iter().map(|&d| (d, 0.0)).collect();
        let r = best_lhv_fit(&m, &zero).unwrap();
        let max_model = r.points.iter().map(|p| p.model.abs()).fold(0.0, f64::max);
        assert_eq!(r.max_deviation, max_model);
    }

    #[test]
    fn sawtooth_grid_tracks_closed_form() {
        let m = QuasiObjectivisticModel::saw_tooth(DEFAULT_CIRCLE_GRID).unwrap();
        for d in delta_grid(37) {
            let e = hv_bivariate(&m, Angle::ZERO, Angle::new(d), Method::ExactSum).unwrap().correlation();
            assert!((e - sawtooth_correlation(d)).abs() <= 2.0 / DEFAULT_CIRCLE_GRID as f64 + 1e-12);
        }
    }

    #[test]
    fn monte_carlo_is_seed_reproducible() {
        let m = QuasiObjectivisticModel::saw_tooth(360).unwrap();
        let method = Method::MonteCarlo { seed: 99, samples: 40_000 };
        let a = hv_bivariate(&m, Angle::ZERO, Angle::new(0.3), method).unwrap();
        let b = hv_bivariate(&m, Angle::ZERO, Angle::new(0.3), method).unwrap();
        assert_eq!(a, b);
    }
}
