//! Bell's inequality in the correlation form
//! `|⟨A₁A₂⟩ − ⟨A₁B₂⟩| − ⟨B₁B₂⟩ − ⟨B₁A₂⟩ ≤ 2` and the BCHS inequality
//! `−1 ≤ p(b₁,a₂) + p(b₁,b₂) + p(a₁,b₂) − p(a₁,a₂) − p(b₁) − p(b₂) ≤ 0`,
//! where every probability symbol means "outcome +".
//!
//! The BCHS expression is not invariant under relabeling the outcomes of an
//! observable or exchanging roles (A ↔ B on a side, side 1 ↔ side 2).
//! [`bchs_variants`] generates that orbit and removes duplicates, leaving the
//! eight inequivalent expressions; together they cut out exactly the quartets
//! that admit a quadrivariate joint distribution.

use alloc::vec::Vec;

use crate::distribution::{BivariateDistribution, Outcome, PairSelector, QuadrivariateDistribution};
use crate::error::{Error, Result};

/// Classification tolerance for BCHS bounds.
pub const BCHS_TOL: f64 = 1e-9;
/// Allowed disagreement between the two derivations of a single-observable marginal.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// `⟨XY⟩ = Σ xy p(x, y)` for ±1 values.
pub fn correlation_of(biv: &BivariateDistribution) -> f64 {
    biv.correlation()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationQuad {
    pub e_a1a2: f64,
    pub e_a1b2: f64,
    pub e_b1a2: f64,
    pub e_b1b2: f64,
}

impl CorrelationQuad {
    pub fn new(e_a1a2: f64, e_a1b2: f64, e_b1a2: f64, e_b1b2: f64) -> Result<Self> {
        let mut v = [e_a1a2, e_a1b2, e_b1a2, e_b1b2];
        for e in v.iter_mut() {
            if !e.is_finite() || e.abs() > 1.0 + 1e-12 {
                return Err(Error::InvalidParameter("correlation outside [-1, 1]"));
            }
            *e = e.clamp(-1.0, 1.0);
        }
        Ok(CorrelationQuad { e_a1a2: v[0], e_a1b2: v[1], e_b1a2: v[2], e_b1b2: v[3] })
    }

    pub fn get(&self, pair: PairSelector) -> f64 {
        match pair {
            PairSelector::A1A2 => self.e_a1a2,
            PairSelector::A1B2 => self.e_a1b2,
            PairSelector::B1A2 => self.e_b1a2,
            PairSelector::B1B2 => self.e_b1b2,
        }
    }
}

/// `|e_a1a2 − e_a1b2| − e_b1b2 − e_b1a2`.
pub fn bell_lhs(corrs: &CorrelationQuad) -> f64 {
    (corrs.e_a1a2 - corrs.e_a1b2).abs() - corrs.e_b1b2 - corrs.e_b1a2
}

/// Values of all four observables for one particle pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OutcomeQuadruple {
    pub a1: Outcome,
    pub b1: Outcome,
    pub a2: Outcome,
    pub b2: Outcome,
}

impl OutcomeQuadruple {
    pub fn new(a1: Outcome, b1: Outcome, a2: Outcome, b2: Outcome) -> Self {
        OutcomeQuadruple { a1, b1, a2, b2 }
    }

    /// All 16 value assignments, in quadrivariate atom order.
    pub fn all() -> impl Iterator<Item = OutcomeQuadruple> {
        (0..16).map(|i| {
            let [a1, b1, a2, b2] = QuadrivariateDistribution::outcomes(i);
            OutcomeQuadruple { a1, b1, a2, b2 }
        })
    }

    pub fn get(&self, side1: bool, observable_b: bool) -> Outcome {
        match (side1, observable_b) {
            (true, false) => self.a1,
            (true, true) => self.b1,
            (false, false) => self.a2,
            (false, true) => self.b2,
        }
    }
}

/// Finite-ensemble CHSH: averages `a₁a₂`, `a₁b₂`, `b₁a₂`, `b₁b₂` over the
/// ensemble and evaluates [`bell_lhs`]. Never exceeds 2.
pub fn finite_ensemble_chsh(quadruples: &[OutcomeQuadruple]) -> Result<f64> {
    if quadruples.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    // integer sums keep the bound exact
    let mut sums = [0i64; 4];
    for q in quadruples {
        let v = |o: Outcome| if o == Outcome::Plus { 1i64 } else { -1 };
        sums[0] += v(q.a1) * v(q.a2);
        sums[1] += v(q.a1) * v(q.b2);
        sums[2] += v(q.b1) * v(q.a2);
        sums[3] += v(q.b1) * v(q.b2);
    }
    let n = quadruples.len() as f64;
    let c = CorrelationQuad {
        e_a1a2: sums[0] as f64 / n,
        e_a1b2: sums[1] as f64 / n,
        e_b1a2: sums[2] as f64 / n,
        e_b1b2: sums[3] as f64 / n,
    };
    Ok(bell_lhs(&c))
}

/// The four bivariate distributions of the Bell experiments on
/// `(A₁,A₂)`, `(A₁,B₂)`, `(B₁,A₂)`, `(B₁,B₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentQuartet {
    // [side-1 observable][side-2 observable], 0 = A, 1 = B
    tables: [[BivariateDistribution; 2]; 2],
}

impl ExperimentQuartet {
    pub fn new(
        p_a1a2: BivariateDistribution,
        p_a1b2: BivariateDistribution,
        p_b1a2: BivariateDistribution,
        p_b1b2: BivariateDistribution,
    ) -> Self {
        ExperimentQuartet { tables: [[p_a1a2, p_a1b2], [p_b1a2, p_b1b2]] }
    }

    pub fn from_fn(mut f: impl FnMut(PairSelector) -> BivariateDistribution) -> Self {
        Self::new(
            f(PairSelector::A1A2),
            f(PairSelector::A1B2),
            f(PairSelector::B1A2),
            f(PairSelector::B1B2),
        )
    }

    pub fn try_from_fn(
        mut f: impl FnMut(PairSelector) -> Result<BivariateDistribution>,
    ) -> Result<Self> {
        Ok(Self::new(
            f(PairSelector::A1A2)?,
            f(PairSelector::A1B2)?,
            f(PairSelector::B1A2)?,
            f(PairSelector::B1B2)?,
        ))
    }

    /// The four pair marginals of a quadrivariate distribution.
    pub fn from_quad(quad: &QuadrivariateDistribution) -> Self {
        Self::from_fn(|pair| quad.marginal(pair))
    }

    pub fn get(&self, pair: PairSelector) -> &BivariateDistribution {
        let (x, y) = pair.roles();
        &self.tables[x][y]
    }

    pub fn correlations(&self) -> CorrelationQuad {
        CorrelationQuad {
            e_a1a2: self.tables[0][0].correlation(),
            e_a1b2: self.tables[0][1].correlation(),
            e_b1a2: self.tables[1][0].correlation(),
            e_b1b2: self.tables[1][1].correlation(),
        }
    }

    pub fn bell_lhs(&self) -> f64 {
        bell_lhs(&self.correlations())
    }

    /// `p(X = +)` derived from each of the two experiments containing `X`,
    /// for `X` in `A1, B1, A2, B2` order.
    pub fn single_derivations(&self) -> [[f64; 2]; 4] {
        let t = &self.tables;
        [
            [t[0][0].first_marginal(Outcome::Plus), t[0][1].first_marginal(Outcome::Plus)],
            [t[1][0].first_marginal(Outcome::Plus), t[1][1].first_marginal(Outcome::Plus)],
            [t[0][0].second_marginal(Outcome::Plus), t[1][0].second_marginal(Outcome::Plus)],
            [t[0][1].second_marginal(Outcome::Plus), t[1][1].second_marginal(Outcome::Plus)],
        ]
    }

    /// Largest disagreement between the two derivations of any single marginal.
    pub fn max_single_discrepancy(&self) -> f64 {
        self.single_derivations().iter().map(|[x, y]| (x - y).abs()).fold(0.0, f64::max)
    }

    /// `p(X = +)` averaged over the two derivations, `A1, B1, A2, B2` order.
    pub fn singles(&self) -> [f64; 4] {
        self.single_derivations().map(|[x, y]| 0.5 * (x + y))
    }

    pub fn swap_sides(&self) -> Self {
        let t = &self.tables;
        ExperimentQuartet {
            tables: [
                [t[0][0].transpose(), t[1][0].transpose()],
                [t[0][1].transpose(), t[1][1].transpose()],
            ],
        }
    }

    /// Exchange the roles of A₁ and B₁.
    pub fn swap_first(&self) -> Self {
        let t = &self.tables;
        ExperimentQuartet { tables: [t[1], t[0]] }
    }

    /// Exchange the roles of A₂ and B₂.
    pub fn swap_second(&self) -> Self {
        let t = &self.tables;
        ExperimentQuartet { tables: [[t[0][1], t[0][0]], [t[1][1], t[1][0]]] }
    }

    /// Relabel the outcomes of observable `obs` (`0..4` = A1, B1, A2, B2).
    pub fn flip(&self, obs: usize) -> Self {
        let mut t = self.tables;
        match obs {
            0 | 1 => {
                for y in 0..2 {
                    t[obs][y] = t[obs][y].flip_first();
                }
            }
            _ => {
                let y = obs - 2;
                for row in t.iter_mut() {
                    row[y] = row[y].flip_second();
                }
            }
        }
        ExperimentQuartet { tables: t }
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        PairSelector::ALL
            .iter()
            .map(|&p| self.get(p).linf_distance(other.get(p)))
            .fold(0.0, f64::max)
    }

    /// Mixture `w·self + (1−w)·other`, pair by pair.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        Self::from_fn(|p| self.get(p).mix(other.get(p), w))
    }
}

/// `p(b₁,a₂) + p(b₁,b₂) + p(a₁,b₂) − p(a₁,a₂) − p(b₁) − p(b₂)` at outcome `+`.
pub fn bchs_value(quartet: &ExperimentQuartet, single_b1: f64, single_b2: f64) -> Result<f64> {
    for s in [single_b1, single_b2] {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::ProbabilityOutOfRange(s));
        }
    }
    let pp = |pair| quartet.get(pair).get(Outcome::Plus, Outcome::Plus);
    Ok(pp(PairSelector::B1A2) + pp(PairSelector::B1B2) + pp(PairSelector::A1B2)
        - pp(PairSelector::A1A2)
        - single_b1
        - single_b2)
}

/// One member of the BCHS symmetry orbit: role exchanges applied first, then
/// outcome relabelings (`flips` in A1, B1, A2, B2 order).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BchsVariant {
    pub swap_sides: bool,
    pub swap_first: bool,
    pub swap_second: bool,
    pub flips: [bool; 4],
}

impl BchsVariant {
    pub fn identity() -> Self {
        BchsVariant { swap_sides: false, swap_first: false, swap_second: false, flips: [false; 4] }
    }

    pub fn apply(&self, quartet: &ExperimentQuartet) -> ExperimentQuartet {
        let mut q = *quartet;
        if self.swap_sides {
            q = q.swap_sides();
        }
        if self.swap_first {
            q = q.swap_first();
        }
        if self.swap_second {
            q = q.swap_second();
        }
        for (obs, &f) in self.flips.iter().enumerate() {
            if f {
                q = q.flip(obs);
            }
        }
        q
    }

    /// BCHS value of the relabeled quartet, singles averaged over derivations.
    pub fn evaluate(&self, quartet: &ExperimentQuartet) -> f64 {
        let q = self.apply(quartet);
        let s = q.singles();
        bchs_value(&q, s[1].clamp(0.0, 1.0), s[3].clamp(0.0, 1.0)).expect("clamped singles")
    }
}

// Generic no-signaling boxes: the origin plus one step along each of the
// eight coordinates (four single marginals, four correlations). An affine
// functional is determined by its values on them.
fn probe_boxes() -> [ExperimentQuartet; 9] {
    core::array::from_fn(|k| {
        let mut params = [0.0f64; 8];
        if k > 0 {
            params[k - 1] = 0.3;
        }
        let m = &params[..4];
        let e = &params[4..];
        ExperimentQuartet::from_fn(|pair| {
            let (x, y) = pair.roles();
            let (m1, m2, c) = (m[x], m[2 + y], e[pair.index()]);
            let mut t = [[0.0; 2]; 2];
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    let (va, vb) = (a.value(), b.value());
                    t[a.index()][b.index()] = 0.25 * (1.0 + va * m1 + vb * m2 + va * vb * c);
                }
            }
            BivariateDistribution::new(t).expect("probe box")
        })
    })
}

/// The deduplicated BCHS orbit, in a fixed enumeration order. Has 8 members.
pub fn bchs_variants() -> Vec<BchsVariant> {
    let probes = probe_boxes();
    let mut kept: Vec<(BchsVariant, [f64; 9])> = Vec::new();
    for perm in 0..8u8 {
        for mask in 0..16u8 {
            let v = BchsVariant {
                swap_sides: perm & 1 != 0,
                swap_first: perm & 2 != 0,
                swap_second: perm & 4 != 0,
                flips: core::array::from_fn(|i| mask >> i & 1 != 0),
            };
            let sig: [f64; 9] = core::array::from_fn(|k| v.evaluate(&probes[k]));
            let dup = kept
                .iter()
                .any(|(_, s)| s.iter().zip(&sig).all(|(a, b)| (a - b).abs() < 1e-9));
            if !dup {
                kept.push((v, sig));
            }
        }
    }
    kept.into_iter().map(|(v, _)| v).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BchsSummary {
    /// One value per member of [`bchs_variants`], same order.
    pub values: Vec<f64>,
    pub worst_low: f64,
    pub worst_high: f64,
    pub satisfied: bool,
}

impl BchsSummary {
    /// The variant furthest outside `[−1, 0]`, with its value, if any lies
    /// outside by more than [`BCHS_TOL`].
    pub fn most_violated(&self) -> Option<(usize, f64)> {
        let margin = |v: f64| (-1.0 - v).max(v);
        self.values
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, v)| margin(v) > BCHS_TOL)
            .max_by(|a, b| margin(a.1).total_cmp(&margin(b.1)))
    }

    /// The variant with the largest signed distance past its nearest bound
    /// (may be negative when every variant holds).
    pub fn tightest(&self) -> (usize, f64) {
        let margin = |v: f64| (-1.0 - v).max(v);
        self.values
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| margin(a.1).total_cmp(&margin(b.1)))
            .expect("non-empty orbit")
    }
}

/// Evaluates every BCHS variant; `satisfied` iff all lie in `[−1 − 1e-9, 1e-9]`.
pub fn bchs_all_variants(quartet: &ExperimentQuartet) -> Result<BchsSummary> {
    let disc = quartet.max_single_discrepancy();
    if disc > CONSISTENCY_TOL {
        return Err(Error::InconsistentQuartet { discrepancy: disc });
    }
    let values: Vec<f64> = bchs_variants().iter().map(|v| v.evaluate(quartet)).collect();
    let worst_low = values.iter().copied().fold(f64::INFINITY, f64::min);
    let worst_high = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let satisfied = worst_low >= -1.0 - BCHS_TOL && worst_high <= BCHS_TOL;
    Ok(BchsSummary { values, worst_low, worst_high, satisfied })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;
    use Outcome::*;

    #[test]
    fn correlation_of_examples() {
        assert_eq!(correlation_of(&BivariateDistribution::point_mass(Plus, Plus)), 1.0);
        assert_eq!(correlation_of(&BivariateDistribution::uniform()), 0.0);
        let anti = BivariateDistribution::new([[0.0, 0.5], [0.5, 0.0]]).unwrap();
        assert_eq!(correlation_of(&anti), -1.0);
    }

    #[test]
    fn bell_lhs_examples() {
        let ones = CorrelationQuad::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(bell_lhs(&ones), -2.0);
        let h = SQRT_2 / 2.0;
        let opt = CorrelationQuad::new(h, -h, -h, -h).unwrap();
        assert!((bell_lhs(&opt) - 2.0 * SQRT_2).abs() < 1e-15);
        assert!(CorrelationQuad::new(1.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn finite_ensemble_examples() {
        let all_plus = OutcomeQuadruple::new(Plus, Plus, Plus, Plus);
        assert_eq!(finite_ensemble_chsh(&[all_plus]).unwrap(), -2.0);
        let q = OutcomeQuadruple::new(Plus, Plus, Plus, Minus);
        assert_eq!(finite_ensemble_chsh(&[q]).unwrap(), 2.0);
        assert_eq!(finite_ensemble_chsh(&[]), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn bchs_value_examples() {
        let uni = ExperimentQuartet::from_fn(|_| BivariateDistribution::uniform());
        assert!((bchs_value(&uni, 0.5, 0.5).unwrap() + 0.5).abs() < 1e-15);
        let det = ExperimentQuartet::from_fn(|_| BivariateDistribution::point_mass(Plus, Plus));
        assert_eq!(bchs_value(&det, 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(bchs_value(&uni, 1.5, 0.5), Err(Error::ProbabilityOutOfRange(_))));
    }

    #[test]
    fn orbit_has_eight_members() {
        let vs = bchs_variants();
        assert_eq!(vs.len(), 8);
        assert_eq!(vs[0], BchsVariant::identity());
    }

    #[test]
    fn uniform_quartet_satisfies_all_variants_at_minus_half() {
        let uni = ExperimentQuartet::from_fn(|_| BivariateDistribution::uniform());
        let s = bchs_all_variants(&uni).unwrap();
        assert!(s.satisfied);
        assert!(s.values.iter().all(|v| (v + 0.5).abs() < 1e-15));
        assert!(s.most_violated().is_none());
    }

    #[test]
    fn inconsistent_singles_rejected() {
        let q = ExperimentQuartet::new(
            BivariateDistribution::independent(0.6, 0.5),
            BivariateDistribution::independent(0.4, 0.5),
            BivariateDistribution::uniform(),
            BivariateDistribution::uniform(),
        );
        assert!(matches!(bchs_all_variants(&q), Err(Error::InconsistentQuartet { .. })));
    }

    #[test]
    fn relabelings_are_involutions() {
        let q = ExperimentQuartet::new(
            BivariateDistribution::new([[0.1, 0.2], [0.3, 0.4]]).unwrap(),
            BivariateDistribution::new([[0.15, 0.15], [0.25, 0.45]]).unwrap(),
            BivariateDistribution::new([[0.3, 0.1], [0.1, 0.5]]).unwrap(),
            BivariateDistribution::new([[0.2, 0.2], [0.2, 0.4]]).unwrap(),
        );
        assert_eq!(q.swap_sides().swap_sides(), q);
        assert_eq!(q.swap_first().swap_first(), q);
        assert_eq!(q.swap_second().swap_second(), q);
        for obs in 0..4 {
            assert_eq!(q.flip(obs).flip(obs), q);
        }
        assert_eq!(*q.swap_sides().get(PairSelector::A1B2), q.get(PairSelector::B1A2).transpose());
    }
}
