//! Two-photon polarization states and projective measurements.
//!
//! Basis ordering of the two-photon space is `|HH⟩, |HV⟩, |VH⟩, |VV⟩`
//! (photon 1 is the leading tensor factor). A polarizer at angle θ has
//! `E₊(θ) = |θ⟩⟨θ|` with `|θ⟩ = cos θ |H⟩ + sin θ |V⟩`, and the dichotomic
//! observable is `A(θ) = E₊ − E₋`.

use alloc::vec;

use num_complex::Complex64;

use crate::angle::Angle;
use crate::distribution::{BivariateDistribution, Outcome};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::math;

/// Tolerance for Hermiticity and positivity checks on construction.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for the unit-trace check on construction.
pub const TRACE_TOL: f64 = 1e-12;

/// Spectral projectors of the polarization observable at one angle.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorPair {
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
    pub angle: Angle,
}

impl ProjectorPair {
    pub fn element(&self, outcome: Outcome) -> &ComplexMatrix {
        match outcome {
            Outcome::Plus => &self.plus,
            Outcome::Minus => &self.minus,
        }
    }

    /// `E₊ − E₋`.
    pub fn observable(&self) -> ComplexMatrix {
        &self.plus - &self.minus
    }
}

/// `E₊` projects on direction θ, `E₋` on θ + π/2.
pub fn polarization_projectors(theta: Angle) -> ProjectorPair {
    let (s, c) = (math::sin(theta.radians()), math::cos(theta.radians()));
    let plus = ComplexMatrix::from_real(2, &[c * c, c * s, c * s, s * s]).unwrap();
    let minus = ComplexMatrix::from_real(2, &[s * s, -c * s, -c * s, c * c]).unwrap();
    ProjectorPair { plus, minus, angle: theta }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BellState {
    #[default]
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] =
        [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi_plus",
            BellState::PhiMinus => "phi_minus",
            BellState::PsiPlus => "psi_plus",
            BellState::PsiMinus => "psi_minus",
        }
    }

    pub fn from_name(name: &str) -> Option<BellState> {
        BellState::ALL.into_iter().find(|b| b.name() == name)
    }
}

/// Positive, unit-trace operator of dimension 2 (one photon) or 4 (a pair).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 2 && matrix.dim() != 4 {
            return Err(Error::InvalidDensityMatrix("dimension must be 2 or 4"));
        }
        if matrix.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry"));
        }
        if matrix.hermiticity_defect() > STATE_TOL {
            return Err(Error::InvalidDensityMatrix("not Hermitian"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix("trace differs from 1"));
        }
        if matrix.min_eigenvalue() < -STATE_TOL {
            return Err(Error::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(DensityMatrix { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector of length 2 or 4.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = math::sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensityMatrix("zero state vector"));
        }
        let v: alloc::vec::Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
        DensityMatrix::new(ComplexMatrix::outer(&v))
    }

    pub fn bell(kind: BellState) -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let p = Complex64::new(h, 0.0);
        let v = match kind {
            BellState::PhiPlus => [p, z, z, p],
            BellState::PhiMinus => [p, z, z, -p],
            BellState::PsiPlus => [z, p, p, z],
            BellState::PsiMinus => [z, p, -p, z],
        };
        DensityMatrix { matrix: ComplexMatrix::outer(&v) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "maximally_mixed: dimension must be 2 or 4");
        DensityMatrix { matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    /// Single-photon state `(I + x σx + y σy + z σz)/2`; requires `x²+y²+z² ≤ 1`.
    pub fn qubit_from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = ComplexMatrix::from_vec(
            2,
            vec![
                Complex64::new((1.0 + z) / 2.0, 0.0),
                Complex64::new(x / 2.0, -y / 2.0),
                Complex64::new(x / 2.0, y / 2.0),
                Complex64::new((1.0 - z) / 2.0, 0.0),
            ],
        )
        .unwrap();
        DensityMatrix::new(m)
    }

    /// The `+` eigenstate of the polarizer at `theta`.
    pub fn polarized(theta: Angle) -> Self {
        DensityMatrix { matrix: polarization_projectors(theta).plus }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Re Tr(ρ O)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(op).re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Reduced state of photon 1 (photon 2 traced out).
    pub fn reduced_first(&self) -> DensityMatrix {
        assert_eq!(self.dim(), 4, "reduced_first needs a two-photon state");
        let mut m = ComplexMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let v = self.matrix.get(2 * i, 2 * j) + self.matrix.get(2 * i + 1, 2 * j + 1);
                m.set(i, j, v);
            }
        }
        DensityMatrix { matrix: m }
    }

    /// Reduced state of photon 2.
    pub fn reduced_second(&self) -> DensityMatrix {
        assert_eq!(self.dim(), 4, "reduced_second needs a two-photon state");
        let mut m = ComplexMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let v = self.matrix.get(i, j) + self.matrix.get(2 + i, 2 + j);
                m.set(i, j, v);
            }
        }
        DensityMatrix { matrix: m }
    }
}

/// `ρ₁ ⊗ ρ₂`.
pub fn product_state(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DensityMatrix> {
    for rho in [rho1, rho2] {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
        }
    }
    DensityMatrix::new(rho1.matrix.kron(&rho2.matrix))
}

fn assert_pair_state(rho: &DensityMatrix) {
    assert_eq!(rho.dim(), 4, "two-photon state required");
}

/// `Tr ρ (A(θ₁) ⊗ A(θ₂))`.
pub fn correlation(rho: &DensityMatrix, theta1: Angle, theta2: Angle) -> f64 {
    assert_pair_state(rho);
    let a1 = polarization_projectors(theta1).observable();
    let a2 = polarization_projectors(theta2).observable();
    rho.expectation(&a1.kron(&a2)).clamp(-1.0, 1.0)
}

/// `p(a₁, a₂) = Tr ρ (E^{a₁}(θ₁) ⊗ E^{a₂}(θ₂))`.
pub fn projective_bivariate(
    rho: &DensityMatrix,
    theta1: Angle,
    theta2: Angle,
) -> BivariateDistribution {
    assert_pair_state(rho);
    let e1 = polarization_projectors(theta1);
    let e2 = polarization_projectors(theta2);
    let mut table = [[0.0; 2]; 2];
    for a1 in Outcome::BOTH {
        for a2 in Outcome::BOTH {
            let op = e1.element(a1).kron(e2.element(a2));
            table[a1.index()][a2.index()] = rho.expectation(&op).max(0.0);
        }
    }
    BivariateDistribution::new(table).expect("projective probabilities of a valid state")
}
