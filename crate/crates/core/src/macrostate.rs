//! Context-dependent macrostate models.
//!
//! Each measurement context carries its own distribution over macrostates,
//! and each side answers from the macrostate alone:
//! `p(a₁, a₂) = Σ ρ(λ̄) p(a₁|λ̄) p(a₂|λ̄)` with `λ̄` depending on the context.
//! A macrostate is an occupation measure over a finite Λ-grid.

use alloc::vec::Vec;

use crate::angle::{Angle, Settings};
use crate::distribution::{BivariateDistribution, Outcome, PairSelector, QuadrivariateDistribution};
use crate::error::{Error, Result};
use crate::exec::{ChunkExecutor, Sequential};
use crate::hidden::QuasiObjectivisticModel;
use crate::inequalities::ExperimentQuartet;
use crate::joint::{joint_exists, product_joint_from_responses, FeasibilityResult};
use crate::quantum::{projective_bivariate, DensityMatrix};
use crate::rng;

const WEIGHT_TOL: f64 = 1e-12;
const SETTING_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementContext {
    pub pair: PairSelector,
    pub settings: (Angle, Angle),
}

impl MeasurementContext {
    pub fn new(pair: PairSelector, theta1: Angle, theta2: Angle) -> Self {
        MeasurementContext { pair, settings: (theta1, theta2) }
    }

    pub fn for_pair(pair: PairSelector, settings: &Settings) -> Self {
        let (t1, t2) = settings.for_pair(pair);
        Self::new(pair, t1, t2)
    }

    fn matches(&self, other: &MeasurementContext) -> bool {
        self.pair == other.pair
            && self.settings.0.distance(other.settings.0) <= SETTING_TOL
            && self.settings.1.distance(other.settings.1) <= SETTING_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Macrostate {
    /// `(side-1 component, side-2 component)`.
    pub label: (usize, usize),
    pub occupation: Vec<f64>,
}

impl Macrostate {
    /// Occupation concentrated on one grid point.
    pub fn point(label: (usize, usize), grid_len: usize, at: usize) -> Self {
        let mut occupation = alloc::vec![0.0; grid_len];
        occupation[at] = 1.0;
        Macrostate { label, occupation }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacroBranch {
    pub state: Macrostate,
    pub weight: f64,
    /// `p(+ | λ̄)` on side 1 and side 2.
    pub response1: f64,
    pub response2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContextEntry {
    pub context: MeasurementContext,
    pub branches: Vec<MacroBranch>,
}

/// Which variables a side's macrostate may depend on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Locality {
    /// Macrostates indexed by the full pair context.
    #[default]
    PairContext,
    /// Each side's label marginal must not depend on the remote setting,
    /// and its response must depend only on its own label component.
    LocalOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacrostateModel {
    grid_len: usize,
    locality: Locality,
    entries: Vec<ContextEntry>,
}

impl MacrostateModel {
    pub fn new(grid_len: usize, locality: Locality, entries: Vec<ContextEntry>) -> Result<Self> {
        if grid_len == 0 {
            return Err(Error::InvalidParameter("macrostate grid must be non-empty"));
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.context.pair == e.context.pair) {
                return Err(Error::InvalidParameter("duplicate context"));
            }
            if e.branches.is_empty() {
                return Err(Error::EmptyEnsemble);
            }
            let mut total = 0.0;
            for b in &e.branches {
                if !b.weight.is_finite() || b.weight < 0.0 {
                    return Err(Error::InvalidParameter("macrostate weights must be nonnegative"));
                }
                total += b.weight;
                for p in [b.response1, b.response2] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::ProbabilityOutOfRange(p));
                    }
                }
                let occ = &b.state.occupation;
                if occ.len() != grid_len {
                    return Err(Error::DimensionMismatch { expected: grid_len, found: occ.len() });
                }
                if occ.iter().any(|&w| !w.is_finite() || w < 0.0) {
                    return Err(Error::InvalidParameter("occupation must be nonnegative"));
                }
                let mass: f64 = occ.iter().sum();
                if (mass - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::NotNormalized(mass));
                }
            }
            if (total - 1.0).abs() > WEIGHT_TOL {
                return Err(Error::NotNormalized(total));
            }
        }
        let model = MacrostateModel { grid_len, locality, entries };
        if locality == Locality::LocalOnly {
            model.check_local()?;
        }
        Ok(model)
    }

    /// The model that conditions on λ itself: one point macrostate per grid
    /// point, shared by every context.
    pub fn from_quasi_objectivistic(model: &QuasiObjectivisticModel, settings: &Settings) -> Result<Self> {
        let weights = model.weights();
        let n = weights.len();
        let side = [
            [model.side_probs(1, settings.a1)?, model.side_probs(1, settings.b1)?],
            [model.side_probs(2, settings.a2)?, model.side_probs(2, settings.b2)?],
        ];
        let entries = PairSelector::ALL
            .iter()
            .map(|&pair| {
                let (x, y) = pair.roles();
                let branches = (0..n)
                    .map(|k| MacroBranch {
                        state: Macrostate::point((k, k), n, k),
                        weight: weights[k],
                        response1: side[0][x][k],
                        response2: side[1][y][k],
                    })
                    .collect();
                ContextEntry { context: MeasurementContext::for_pair(pair, settings), branches }
            })
            .collect();
        Self::new(n, Locality::PairContext, entries)
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn locality(&self) -> Locality {
        self.locality
    }

    pub fn entries(&self) -> &[ContextEntry] {
        &self.entries
    }

    pub fn entry(&self, context: &MeasurementContext) -> Result<&ContextEntry> {
        self.entries.iter().find(|e| e.context.matches(context)).ok_or(Error::UnknownContext)
    }

    fn entry_for(&self, pair: PairSelector) -> Result<&ContextEntry> {
        self.entries.iter().find(|e| e.context.pair == pair).ok_or(Error::IncompleteModel)
    }

    /// Settings `(a1, b1, a2, b2)` read off the four contexts.
    pub fn settings(&self) -> Result<Settings> {
        let c = |p| self.entry_for(p).map(|e| e.context.settings);
        let (a1, a2) = c(PairSelector::A1A2)?;
        let (b1, b2) = c(PairSelector::B1B2)?;
        Ok(Settings::new(a1, b1, a2, b2))
    }

    fn check_local(&self) -> Result<()> {
        for side in 0..2 {
            for obs in 0..2 {
                let pairs: Vec<&ContextEntry> = self
                    .entries
                    .iter()
                    .filter(|e| {
                        let r = e.context.pair.roles();
                        (if side == 0 { r.0 } else { r.1 }) == obs
                    })
                    .collect();
                let mut marginals: Vec<Vec<(usize, f64, f64)>> = Vec::new();
                for e in pairs {
                    // (own label, weight, response) accumulated per own label
                    let mut m: Vec<(usize, f64, f64)> = Vec::new();
                    for b in &e.branches {
                        let (own, resp) = if side == 0 {
                            (b.state.label.0, b.response1)
                        } else {
                            (b.state.label.1, b.response2)
                        };
                        match m.iter_mut().find(|t| t.0 == own) {
                            Some(t) => {
                                if (t.2 - resp).abs() > WEIGHT_TOL {
                                    return Err(Error::LocalityViolation("response depends on remote label"));
                                }
                                t.1 += b.weight;
                            }
                            None => m.push((own, b.weight, resp)),
                        }
                    }
                    m.sort_by_key(|t| t.0);
                    marginals.push(m);
                }
                if let [first, second] = marginals.as_slice() {
                    let same = first.len() == second.len()
                        && first.iter().zip(second).all(|(p, q)| {
                            p.0 == q.0 && (p.1 - q.1).abs() <= 1e-9 && (p.2 - q.2).abs() <= WEIGHT_TOL
                        });
                    if !same {
                        return Err(Error::LocalityViolation("local macrostate depends on remote setting"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The four bivariates; fails unless every context is present.
    pub fn quartet(&self) -> Result<ExperimentQuartet> {
        ExperimentQuartet::try_from_fn(|pair| bivariate_of(self.entry_for(pair)?))
    }

    /// Per-branch `(w, [a1, b1, a2, b2])` if every context shares the same
    /// macrostates with the same weights and each observable's response is
    /// the same in both contexts that contain it.
    pub fn shared_responses(&self) -> Option<Vec<(f64, [f64; 4])>> {
        let e: Vec<&ContextEntry> = PairSelector::ALL.iter().map(|&p| self.entry_for(p).ok()).collect::<Option<_>>()?;
        let n = e[0].branches.len();
        if e.iter().any(|c| c.branches.len() != n) {
            return None;
        }
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let reference = &e[0].branches[k];
            let mut resp: [Option<f64>; 4] = [None; 4];
            for c in &e {
                let b = &c.branches[k];
                if b.state != reference.state || (b.weight - reference.weight).abs() > WEIGHT_TOL {
                    return None;
                }
                let (x, y) = c.context.pair.roles();
                for (slot, r) in [(x, b.response1), (2 + y, b.response2)] {
                    match resp[slot] {
                        Some(v) if (v - r).abs() > WEIGHT_TOL => return None,
                        _ => resp[slot] = Some(r),
                    }
                }
            }
            out.push((reference.weight, resp.map(|r| r.unwrap_or(0.0))));
        }
        Some(out)
    }

    pub fn is_context_independent(&self) -> bool {
        self.shared_responses().is_some()
    }
}

fn bivariate_of(entry: &ContextEntry) -> Result<BivariateDistribution> {
    let mut t = [[0.0; 2]; 2];
    for b in &entry.branches {
        let f = [b.response1, 1.0 - b.response1];
        let s = [b.response2, 1.0 - b.response2];
        for i in 0..2 {
            for j in 0..2 {
                t[i][j] += b.weight * f[i] * s[j];
            }
        }
    }
    BivariateDistribution::new(t)
}

/// Exact bivariate of one context.
pub fn macro_bivariate(model: &MacrostateModel, context: &MeasurementContext) -> Result<BivariateDistribution> {
    bivariate_of(model.entry(context)?)
}

/// Context `(x, y)` gets one macrostate per outcome pair `(i, j)`, weighted by
/// the projective probability, answering `i` on side 1 and `j` on side 2
/// with certainty.
pub fn quantum_target_model(state: &DensityMatrix, settings: &Settings) -> MacrostateModel {
    let entries = PairSelector::ALL
        .iter()
        .map(|&pair| {
            let context = MeasurementContext::for_pair(pair, settings);
            let biv = projective_bivariate(state, context.settings.0, context.settings.1);
            let mut branches = Vec::with_capacity(4);
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    let (i, j) = (a.index(), b.index());
                    branches.push(MacroBranch {
                        state: Macrostate::point((i, j), 4, 2 * i + j),
                        weight: biv.get(a, b),
                        response1: if a == Outcome::Plus { 1.0 } else { 0.0 },
                        response2: if b == Outcome::Plus { 1.0 } else { 0.0 },
                    });
                }
            }
            ContextEntry { context, branches }
        })
        .collect();
    MacrostateModel::new(4, Locality::PairContext, entries).expect("projective probabilities form valid weights")
}

/// Explicit product quad when the model is context independent, otherwise
/// the LP decision on the model's quartet.
pub fn attempt_quad_construction(model: &MacrostateModel) -> Result<FeasibilityResult> {
    match model.shared_responses() {
        Some(branches) => Ok(FeasibilityResult::from_witness(product_joint_from_responses(&branches)?)),
        None => joint_exists(&model.quartet()?),
    }
}

/// Outcome values per context: `values[context][observable]`, contexts in
/// [`PairSelector::ALL`] order and observables as A1, B1, A2, B2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContextualValueAssignment {
    pub values: [[Outcome; 4]; 4],
}

impl ContextualValueAssignment {
    fn measured(pair: PairSelector) -> [usize; 2] {
        let (x, y) = pair.roles();
        [x, 2 + y]
    }

    /// A context-independent assignment agreeing with every context on the
    /// two observables it measures, found by search over all 16.
    pub fn consistent_assignment(&self) -> Option<[Outcome; 4]> {
        (0..16).map(QuadrivariateDistribution::outcomes).find(|v| {
            PairSelector::ALL
                .iter()
                .all(|&p| Self::measured(p).iter().all(|&o| v[o] == self.values[p.index()][o]))
        })
    }

    /// Some measured value changes with the remote setting alone.
    pub fn remote_dependent(&self) -> bool {
        (0..4).any(|obs| {
            let ctx: Vec<usize> = PairSelector::ALL
                .iter()
                .filter(|p| Self::measured(**p).contains(&obs))
                .map(|p| p.index())
                .collect();
            self.values[ctx[0]][obs] != self.values[ctx[1]][obs]
        })
    }

    /// Some observable takes a different value in a context where its own
    /// side measures the other observable.
    pub fn local_setting_dependent(&self) -> bool {
        (0..4).any(|obs| {
            let side1 = obs < 2;
            PairSelector::ALL.iter().any(|&p| {
                let own = if side1 { Self::measured(p)[0] } else { Self::measured(p)[1] };
                own == obs
                    && PairSelector::ALL.iter().any(|&q| {
                        let other = if side1 { Self::measured(q)[0] } else { Self::measured(q)[1] };
                        other != obs && self.values[q.index()][obs] != self.values[p.index()][obs]
                    })
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContextualReport {
    pub rounds: u64,
    pub consistent_rounds: u64,
    /// Rounds showing remote-setting dependence of a measured value.
    pub remote_pattern_rounds: u64,
    /// Rounds showing own-setting dependence of some value.
    pub local_pattern_rounds: u64,
}

impl ContextualReport {
    pub fn inconsistent_fraction(&self) -> f64 {
        (self.rounds - self.consistent_rounds) as f64 / self.rounds as f64
    }
}

fn sample_quad(quad: &QuadrivariateDistribution, u: f64) -> [Outcome; 4] {
    let mut acc = 0.0;
    for (idx, &p) in quad.atoms().iter().enumerate() {
        acc += p;
        if u < acc {
            return QuadrivariateDistribution::outcomes(idx);
        }
    }
    // rounding left a sliver above the last cumulative value
    let last = quad.atoms().iter().rposition(|&p| p > 0.0).unwrap_or(15);
    QuadrivariateDistribution::outcomes(last)
}

fn contextual_chunk(quads: &[QuadrivariateDistribution; 4], seed: u64, chunk: u32, len: u64) -> [u64; 3] {
    let mut r = rng::chunk_rng(seed, 0, chunk);
    let mut tally = [0u64; 3];
    for _ in 0..len {
        let values = core::array::from_fn(|k| sample_quad(&quads[k], rng::uniform(&mut r)));
        let a = ContextualValueAssignment { values };
        tally[0] += u64::from(a.consistent_assignment().is_some());
        tally[1] += u64::from(a.remote_dependent());
        tally[2] += u64::from(a.local_setting_dependent());
    }
    tally
}

pub fn contextual_values_demo_with<E: ChunkExecutor>(
    exec: &E,
    quads: &[QuadrivariateDistribution; 4],
    rounds: u64,
    seed: u64,
) -> Result<ContextualReport> {
    if rounds == 0 {
        return Err(Error::InvalidSampleCount);
    }
    let t: [u64; 3] = exec.run(rng::chunk_count(rounds), |c| {
        Ok(contextual_chunk(quads, seed, c, rng::chunk_len(rounds, c)))
    })?;
    Ok(ContextualReport {
        rounds,
        consistent_rounds: t[0],
        remote_pattern_rounds: t[1],
        local_pattern_rounds: t[2],
    })
}

/// Samples one outcome quadruple per context from `quads` (in
/// [`PairSelector::ALL`] order) each round and counts rounds admitting a
/// context-independent assignment.
pub fn contextual_values_demo(
    quads: &[QuadrivariateDistribution; 4],
    rounds: u64,
    seed: u64,
) -> Result<ContextualReport> {
    contextual_values_demo_with(&Sequential, quads, rounds, seed)
}

/// One quad per context: the context's bivariate on the measured pair, the
/// unmeasured observables independent with their single marginals.
pub fn context_quads_from_quartet(quartet: &ExperimentQuartet) -> [QuadrivariateDistribution; 4] {
    let singles = quartet.singles();
    PairSelector::ALL.map(|pair| {
        let (x, y) = pair.roles();
        let biv = quartet.get(pair);
        let mut atoms = [0.0; 16];
        for (idx, atom) in atoms.iter_mut().enumerate() {
            let o = QuadrivariateDistribution::outcomes(idx);
            let mut p = biv.get(o[x], o[2 + y]);
            for obs in [1 - x, 3 - y] {
                let s = singles[obs].clamp(0.0, 1.0);
                p *= if o[obs] == Outcome::Plus { s } else { 1.0 - s };
            }
            *atom = p;
        }
        QuadrivariateDistribution::new(atoms).expect("product of valid tables")
    })
}
