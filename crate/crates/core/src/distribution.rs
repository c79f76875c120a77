use crate::error::{Error, Result};

/// Dichotomic outcome; `Plus` is the value +1 (photon registered / transmitted).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    /// Table index: `Plus` → 0, `Minus` → 1.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_index(i: usize) -> Outcome {
        if i == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }
}

/// Which two of the four observables a Bell experiment measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairSelector {
    A1A2,
    A1B2,
    B1A2,
    B1B2,
}

impl PairSelector {
    pub const ALL: [PairSelector; 4] =
        [PairSelector::A1A2, PairSelector::A1B2, PairSelector::B1A2, PairSelector::B1B2];

    /// `(side-1 observable, side-2 observable)`, each 0 for A and 1 for B.
    pub fn roles(self) -> (usize, usize) {
        match self {
            PairSelector::A1A2 => (0, 0),
            PairSelector::A1B2 => (0, 1),
            PairSelector::B1A2 => (1, 0),
            PairSelector::B1B2 => (1, 1),
        }
    }

    pub fn from_roles(side1: usize, side2: usize) -> PairSelector {
        match (side1, side2) {
            (0, 0) => PairSelector::A1A2,
            (0, _) => PairSelector::A1B2,
            (_, 0) => PairSelector::B1A2,
            _ => PairSelector::B1B2,
        }
    }

    pub fn index(self) -> usize {
        let (x, y) = self.roles();
        2 * x + y
    }

    pub fn name(self) -> &'static str {
        match self {
            PairSelector::A1A2 => "A1A2",
            PairSelector::A1B2 => "A1B2",
            PairSelector::B1A2 => "B1A2",
            PairSelector::B1B2 => "B1B2",
        }
    }
}

const CLAMP_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

fn clean(entries: &mut [f64]) -> Result<()> {
    for p in entries.iter_mut() {
        if !p.is_finite() || *p < -CLAMP_TOL || *p > 1.0 + SUM_TOL {
            return Err(Error::ProbabilityOutOfRange(*p));
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let sum: f64 = entries.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::NotNormalized(sum));
    }
    for p in entries.iter_mut() {
        *p /= sum;
    }
    Ok(())
}

/// Joint distribution of two dichotomic observables, indexed `[first][second]`
/// with `Plus` at index 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BivariateDistribution {
    table: [[f64; 2]; 2],
}

impl BivariateDistribution {
    /// Entries above −1e-12 are accepted and clamped at zero; the total must be
    /// within 1e-9 of one and is renormalized.
    pub fn new(table: [[f64; 2]; 2]) -> Result<Self> {
        let mut flat = [table[0][0], table[0][1], table[1][0], table[1][1]];
        clean(&mut flat)?;
        Ok(BivariateDistribution { table: [[flat[0], flat[1]], [flat[2], flat[3]]] })
    }

    pub fn uniform() -> Self {
        BivariateDistribution { table: [[0.25; 2]; 2] }
    }

    pub fn point_mass(first: Outcome, second: Outcome) -> Self {
        let mut table = [[0.0; 2]; 2];
        table[first.index()][second.index()] = 1.0;
        BivariateDistribution { table }
    }

    /// Product of two single-observable laws given as `p(+)`.
    pub fn independent(p_first: f64, p_second: f64) -> Self {
        let f = [p_first, 1.0 - p_first];
        let s = [p_second, 1.0 - p_second];
        BivariateDistribution {
            table: [[f[0] * s[0], f[0] * s[1]], [f[1] * s[0], f[1] * s[1]]],
        }
    }

    pub fn from_counts(counts: [[u64; 2]; 2]) -> Result<Self> {
        let n: u64 = counts.iter().flatten().sum();
        if n == 0 {
            return Err(Error::InvalidSampleCount);
        }
        let n = n as f64;
        Ok(BivariateDistribution {
            table: [
                [counts[0][0] as f64 / n, counts[0][1] as f64 / n],
                [counts[1][0] as f64 / n, counts[1][1] as f64 / n],
            ],
        })
    }

    #[inline]
    pub fn get(&self, first: Outcome, second: Outcome) -> f64 {
        self.table[first.index()][second.index()]
    }

    pub fn table(&self) -> [[f64; 2]; 2] {
        self.table
    }

    /// `p(first = o)`.
    pub fn first_marginal(&self, o: Outcome) -> f64 {
        let r = self.table[o.index()];
        r[0] + r[1]
    }

    /// `p(second = o)`.
    pub fn second_marginal(&self, o: Outcome) -> f64 {
        self.table[0][o.index()] + self.table[1][o.index()]
    }

    /// `⟨XY⟩` for ±1 values.
    pub fn correlation(&self) -> f64 {
        let t = &self.table;
        (t[0][0] + t[1][1] - t[0][1] - t[1][0]).clamp(-1.0, 1.0)
    }

    pub fn transpose(&self) -> Self {
        let t = &self.table;
        BivariateDistribution { table: [[t[0][0], t[1][0]], [t[0][1], t[1][1]]] }
    }

    /// Relabel the outcomes of the first observable.
    pub fn flip_first(&self) -> Self {
        let t = &self.table;
        BivariateDistribution { table: [t[1], t[0]] }
    }

    pub fn flip_second(&self) -> Self {
        let t = &self.table;
        BivariateDistribution { table: [[t[0][1], t[0][0]], [t[1][1], t[1][0]]] }
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.table[i][j] - other.table[i][j]).abs());
            }
        }
        d
    }

    /// Mixture `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        let mut table = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                table[i][j] = w * self.table[i][j] + (1.0 - w) * other.table[i][j];
            }
        }
        BivariateDistribution { table }
    }
}

/// Joint distribution over `(a1, b1, a2, b2)`; atom index is
/// `8·a1 + 4·b1 + 2·a2 + b2` with `Plus` = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadrivariateDistribution {
    atoms: [f64; 16],
}

impl QuadrivariateDistribution {
    pub fn new(mut atoms: [f64; 16]) -> Result<Self> {
        clean(&mut atoms)?;
        Ok(QuadrivariateDistribution { atoms })
    }

    pub fn uniform() -> Self {
        QuadrivariateDistribution { atoms: [1.0 / 16.0; 16] }
    }

    pub fn point_mass(a1: Outcome, b1: Outcome, a2: Outcome, b2: Outcome) -> Self {
        let mut atoms = [0.0; 16];
        atoms[Self::index(a1, b1, a2, b2)] = 1.0;
        QuadrivariateDistribution { atoms }
    }

    /// Product of the two arm tables (each over `(a_n, b_n)`).
    pub fn from_arm_tables(arm1: &BivariateDistribution, arm2: &BivariateDistribution) -> Self {
        let mut atoms = [0.0; 16];
        for (idx, atom) in atoms.iter_mut().enumerate() {
            let [a1, b1, a2, b2] = Self::outcomes(idx);
            *atom = arm1.get(a1, b1) * arm2.get(a2, b2);
        }
        QuadrivariateDistribution { atoms }
    }

    #[inline]
    pub fn index(a1: Outcome, b1: Outcome, a2: Outcome, b2: Outcome) -> usize {
        8 * a1.index() + 4 * b1.index() + 2 * a2.index() + b2.index()
    }

    /// Inverse of [`Self::index`]: `[a1, b1, a2, b2]`.
    pub fn outcomes(index: usize) -> [Outcome; 4] {
        [
            Outcome::from_index((index >> 3) & 1),
            Outcome::from_index((index >> 2) & 1),
            Outcome::from_index((index >> 1) & 1),
            Outcome::from_index(index & 1),
        ]
    }

    pub fn get(&self, a1: Outcome, b1: Outcome, a2: Outcome, b2: Outcome) -> f64 {
        self.atoms[Self::index(a1, b1, a2, b2)]
    }

    pub fn atoms(&self) -> &[f64; 16] {
        &self.atoms
    }

    pub fn marginal(&self, pair: PairSelector) -> BivariateDistribution {
        let (x, y) = pair.roles();
        let mut table = [[0.0; 2]; 2];
        for (idx, p) in self.atoms.iter().enumerate() {
            let o = Self::outcomes(idx);
            // side-1 observable at position x (0 = a1, 1 = b1); side 2 at 2 + y
            table[o[x].index()][o[2 + y].index()] += p;
        }
        BivariateDistribution { table }
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.atoms.iter().zip(&other.atoms).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Marginal of a quadrivariate distribution on one pair of observables.
pub fn marginal_pair(quad: &QuadrivariateDistribution, pair: PairSelector) -> BivariateDistribution {
    quad.marginal(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bivariate_rejects_bad_tables() {
        assert!(matches!(
            BivariateDistribution::new([[0.5, 0.5], [0.5, 0.0]]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            BivariateDistribution::new([[1.1, -0.1], [0.0, 0.0]]),
            Err(Error::ProbabilityOutOfRange(_))
        ));
        let b = BivariateDistribution::new([[0.5, -1e-13], [0.0, 0.5]]).unwrap();
        assert_eq!(b.get(Outcome::Plus, Outcome::Minus), 0.0);
    }

    #[test]
    fn uniform_quad_marginals_uniform() {
        let q = QuadrivariateDistribution::uniform();
        for pair in PairSelector::ALL {
            let m = marginal_pair(&q, pair);
            assert!(m.linf_distance(&BivariateDistribution::uniform()) < 1e-15);
        }
    }

    #[test]
    fn marginal_picks_right_observables() {
        use Outcome::*;
        let q = QuadrivariateDistribution::point_mass(Plus, Minus, Minus, Plus);
        assert_eq!(q.marginal(PairSelector::A1A2).get(Plus, Minus), 1.0);
        assert_eq!(q.marginal(PairSelector::A1B2).get(Plus, Plus), 1.0);
        assert_eq!(q.marginal(PairSelector::B1A2).get(Minus, Minus), 1.0);
        assert_eq!(q.marginal(PairSelector::B1B2).get(Minus, Plus), 1.0);
    }

    #[test]
    fn index_roundtrip() {
        for i in 0..16 {
            let [a, b, c, d] = QuadrivariateDistribution::outcomes(i);
            assert_eq!(QuadrivariateDistribution::index(a, b, c, d), i);
        }
    }
}
