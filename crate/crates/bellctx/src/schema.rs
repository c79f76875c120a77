//! JSON input formats. Every document may carry a `"schema"` tag; when
//! present it must match the expected one.

use bellctx_core::hidden::{HiddenVariableSpace, QuasiObjectivisticModel, ResponseFunction, DEFAULT_CIRCLE_GRID};
use bellctx_core::inequalities::ExperimentQuartet;
use bellctx_core::linalg::ComplexMatrix;
use bellctx_core::macrostate::{
    quantum_target_model, ContextEntry, Locality, MacroBranch, Macrostate, MacrostateModel, MeasurementContext,
};
use bellctx_core::povm::{ArmConfig, ExperimentConfig};
use bellctx_core::quantum::{BellState, DensityMatrix};
use bellctx_core::relaxation::RelaxationParams;
use bellctx_core::{Angle, BivariateDistribution, PairSelector, Settings};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DENSITY_MATRIX: &str = "bellctx/density-matrix/v1";
pub const EXPERIMENT: &str = "bellctx/experiment/v1";
pub const QUARTET: &str = "bellctx/quartet/v1";
pub const HV_MODEL: &str = "bellctx/hv-model/v1";
pub const MACRO_MODEL: &str = "bellctx/macro-model/v1";
pub const RELAXATION: &str = "bellctx/relaxation/v1";

fn check_tag(found: &Option<String>, expected: &str) -> Result<(), CliError> {
    match found {
        Some(s) if s != expected => Err(CliError::Input(format!("schema {s:?}, expected {expected:?}"))),
        _ => Ok(()),
    }
}

fn angle(x: f64, degrees: bool) -> Result<Angle, CliError> {
    if !x.is_finite() {
        return Err(CliError::Input(format!("angle {x} is not finite")));
    }
    Ok(if degrees { Angle::from_degrees(x) } else { Angle::new(x) })
}

/// Row-major `dim × dim` matrix as separate real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityMatrixSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl DensityMatrixSpec {
    pub fn build(&self) -> Result<DensityMatrix, CliError> {
        check_tag(&self.schema, DENSITY_MATRIX)?;
        let n = self.dim * self.dim;
        if self.re.len() != n || !(self.im.is_empty() || self.im.len() == n) {
            return Err(CliError::Input(format!("density matrix needs {n} entries per part")));
        }
        let data = (0..n)
            .map(|k| Complex64::new(self.re[k], self.im.get(k).copied().unwrap_or(0.0)))
            .collect();
        let m = ComplexMatrix::from_vec(self.dim, data)
            .ok_or_else(|| CliError::Input("density matrix shape".into()))?;
        Ok(DensityMatrix::new(m)?)
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        let e = rho.matrix().entries();
        DensityMatrixSpec {
            schema: Some(DENSITY_MATRIX.into()),
            dim: rho.dim(),
            re: e.iter().map(|z| z.re).collect(),
            im: e.iter().map(|z| z.im).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    Bell(String),
    Matrix(DensityMatrixSpec),
    MaximallyMixed,
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Bell("phi_plus".into())
    }
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix, CliError> {
        let rho = match self {
            StateSpec::Bell(name) => DensityMatrix::bell(
                BellState::from_name(name).ok_or_else(|| CliError::Input(format!("unknown Bell state {name:?}")))?,
            ),
            StateSpec::Matrix(m) => m.build()?,
            StateSpec::MaximallyMixed => DensityMatrix::maximally_mixed(4),
        };
        if rho.dim() != 4 {
            return Err(CliError::Input("a two-photon (4×4) state is required".into()));
        }
        Ok(rho)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSpec {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    #[serde(default)]
    pub degrees: bool,
}

impl SettingsSpec {
    pub fn build(&self) -> Result<Settings, CliError> {
        let d = self.degrees;
        Ok(Settings::new(angle(self.a1, d)?, angle(self.b1, d)?, angle(self.a2, d)?, angle(self.b2, d)?))
    }
}

impl Default for SettingsSpec {
    fn default() -> Self {
        SettingsSpec { a1: 0.0, b1: 45.0, a2: -22.5, b2: -67.5, degrees: true }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSpec {
    pub gamma: f64,
    pub theta: f64,
    pub theta_prime: f64,
}

/// One generalized Aspect experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub arm1: ArmSpec,
    pub arm2: ArmSpec,
    #[serde(default)]
    pub state: StateSpec,
    #[serde(default)]
    pub degrees: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let s = SettingsSpec::default();
        ExperimentSpec {
            schema: Some(EXPERIMENT.into()),
            arm1: ArmSpec { gamma: 1.0, theta: s.a1, theta_prime: s.b1 },
            arm2: ArmSpec { gamma: 1.0, theta: s.a2, theta_prime: s.b2 },
            state: StateSpec::default(),
            degrees: true,
        }
    }
}

impl ExperimentSpec {
    pub fn settings(&self) -> Result<Settings, CliError> {
        SettingsSpec {
            a1: self.arm1.theta,
            b1: self.arm1.theta_prime,
            a2: self.arm2.theta,
            b2: self.arm2.theta_prime,
            degrees: self.degrees,
        }
        .build()
    }

    pub fn build(&self) -> Result<ExperimentConfig, CliError> {
        check_tag(&self.schema, EXPERIMENT)?;
        let d = self.degrees;
        let arm = |a: &ArmSpec| -> Result<ArmConfig, CliError> {
            Ok(ArmConfig::new(a.gamma, angle(a.theta, d)?, angle(a.theta_prime, d)?)?)
        };
        Ok(ExperimentConfig::new(arm(&self.arm1)?, arm(&self.arm2)?, self.state.build()?)?)
    }
}

/// Four bivariate tables `[[p(++), p(+−)], [p(−+), p(−−)]]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuartetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub a1a2: [[f64; 2]; 2],
    pub a1b2: [[f64; 2]; 2],
    pub b1a2: [[f64; 2]; 2],
    pub b1b2: [[f64; 2]; 2],
}

impl QuartetSpec {
    pub fn build(&self) -> Result<ExperimentQuartet, CliError> {
        check_tag(&self.schema, QUARTET)?;
        let b = |t: [[f64; 2]; 2]| BivariateDistribution::new(t);
        Ok(ExperimentQuartet::new(b(self.a1a2)?, b(self.a1b2)?, b(self.b1a2)?, b(self.b1b2)?))
    }

    pub fn from_quartet(q: &ExperimentQuartet) -> Self {
        QuartetSpec {
            schema: Some(QUARTET.into()),
            a1a2: q.get(PairSelector::A1A2).table(),
            a1b2: q.get(PairSelector::A1B2).table(),
            b1a2: q.get(PairSelector::B1A2).table(),
            b1b2: q.get(PairSelector::B1B2).table(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSpec {
    /// λ uniform on `[0, π)`, exact sums on this many midpoints.
    Circle(usize),
    /// `[[λ, weight], ...]`.
    Finite(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseSpec {
    SawTooth,
    Malus,
    Constant(f64),
    /// Probabilities of `+` per grid point at the side's two settings
    /// (A then B, taken from the model's settings).
    Tabulated(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HvModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub space: SpaceSpec,
    pub response1: ResponseSpec,
    pub response2: ResponseSpec,
    #[serde(default)]
    pub settings: SettingsSpec,
}

impl Default for HvModelSpec {
    fn default() -> Self {
        HvModelSpec {
            schema: Some(HV_MODEL.into()),
            space: SpaceSpec::Circle(DEFAULT_CIRCLE_GRID),
            response1: ResponseSpec::SawTooth,
            response2: ResponseSpec::SawTooth,
            settings: SettingsSpec::default(),
        }
    }
}

impl HvModelSpec {
    pub fn build(&self) -> Result<(QuasiObjectivisticModel, Settings), CliError> {
        check_tag(&self.schema, HV_MODEL)?;
        let settings = self.settings.build()?;
        let space = match &self.space {
            SpaceSpec::Circle(n) => HiddenVariableSpace::circle(*n)?,
            SpaceSpec::Finite(points) => {
                let pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
                HiddenVariableSpace::finite(&pts)?
            }
        };
        let response = |r: &ResponseSpec, s: [Angle; 2]| match r {
            ResponseSpec::SawTooth => ResponseFunction::SawTooth,
            ResponseSpec::Malus => ResponseFunction::Malus,
            ResponseSpec::Constant(p) => ResponseFunction::Constant(*p),
            ResponseSpec::Tabulated(t) => ResponseFunction::Tabulated { settings: s, table: t.clone() },
        };
        let model = QuasiObjectivisticModel::new(
            space,
            response(&self.response1, [settings.a1, settings.b1]),
            response(&self.response2, [settings.a2, settings.b2]),
        )?;
        Ok((model, settings))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub label: [usize; 2],
    pub occupation: Vec<f64>,
    pub weight: f64,
    pub response1: f64,
    pub response2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    /// `"A1A2"`, `"A1B2"`, `"B1A2"` or `"B1B2"`.
    pub pair: String,
    pub branches: Vec<BranchSpec>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalitySpec {
    #[default]
    PairContext,
    LocalOnly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacroKind {
    QuantumTarget {
        #[serde(default)]
        state: StateSpec,
    },
    HiddenVariables(HvModelSpec),
    Explicit {
        grid_len: usize,
        #[serde(default)]
        locality: LocalitySpec,
        contexts: Vec<ContextSpec>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub model: MacroKind,
    #[serde(default)]
    pub settings: SettingsSpec,
}

impl Default for MacroModelSpec {
    fn default() -> Self {
        MacroModelSpec {
            schema: Some(MACRO_MODEL.into()),
            model: MacroKind::QuantumTarget { state: StateSpec::default() },
            settings: SettingsSpec::default(),
        }
    }
}

fn pair_from_name(name: &str) -> Result<PairSelector, CliError> {
    PairSelector::ALL
        .into_iter()
        .find(|p| p.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| CliError::Input(format!("unknown pair {name:?}")))
}

impl MacroModelSpec {
    pub fn build(&self) -> Result<(MacrostateModel, Settings), CliError> {
        check_tag(&self.schema, MACRO_MODEL)?;
        let settings = self.settings.build()?;
        let model = match &self.model {
            MacroKind::QuantumTarget { state } => quantum_target_model(&state.build()?, &settings),
            MacroKind::HiddenVariables(spec) => {
                let (hv, _) = HvModelSpec { settings: self.settings, ..spec.clone() }.build()?;
                MacrostateModel::from_quasi_objectivistic(&hv, &settings)?
            }
            MacroKind::Explicit { grid_len, locality, contexts } => {
                let entries = contexts
                    .iter()
                    .map(|c| {
                        let pair = pair_from_name(&c.pair)?;
                        let branches = c
                            .branches
                            .iter()
                            .map(|b| MacroBranch {
                                state: Macrostate { label: (b.label[0], b.label[1]), occupation: b.occupation.clone() },
                                weight: b.weight,
                                response1: b.response1,
                                response2: b.response2,
                            })
                            .collect();
                        Ok(ContextEntry { context: MeasurementContext::for_pair(pair, &settings), branches })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let locality = match locality {
                    LocalitySpec::PairContext => Locality::PairContext,
                    LocalitySpec::LocalOnly => Locality::LocalOnly,
                };
                MacrostateModel::new(*grid_len, locality, entries)?
            }
        };
        Ok((model, settings))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub tau: f64,
    pub diffusion: f64,
    pub samples: u64,
    /// Preparation model; its settings are replaced by the equilibrium's.
    pub preparation: HvModelSpec,
    pub equilibrium: MacroModelSpec,
}

impl Default for RelaxationSpec {
    fn default() -> Self {
        RelaxationSpec {
            schema: Some(RELAXATION.into()),
            tau: 1.0,
            diffusion: 1.0,
            samples: 100_000,
            preparation: HvModelSpec {
                space: SpaceSpec::Circle(360),
                response1: ResponseSpec::Malus,
                response2: ResponseSpec::Malus,
                ..HvModelSpec::default()
            },
            equilibrium: MacroModelSpec::default(),
        }
    }
}

impl RelaxationSpec {
    pub fn build(&self, seed: u64) -> Result<RelaxationParams, CliError> {
        check_tag(&self.schema, RELAXATION)?;
        let (equilibrium, settings) = self.equilibrium.build()?;
        let prep = HvModelSpec { settings: self.equilibrium.settings, ..self.preparation.clone() };
        let (preparation, _) = prep.build()?;
        Ok(RelaxationParams {
            tau: self.tau,
            diffusion: self.diffusion,
            preparation,
            equilibrium,
            settings,
            samples: self.samples,
            seed,
        })
    }
}
