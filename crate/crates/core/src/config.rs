//! JSON configuration schemas (`schema: 1`). Unknown keys are rejected
//! everywhere so configs stay reproducible.

use crate::channeling::{BeamConfig, ChannelGeometry};
use crate::entanglement::BellState;
use crate::error::{Error, Result};
use crate::percolation::{EntanglementNetwork, LatticeKind, RepeaterConfig};
use crate::spin::{PulseSequence, SpinSystem};
use crate::state::{DensityMatrix, DensityMatrixData, PureState, PureStateData};
use crate::SCHEMA_VERSION;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::config(format!(
            "unsupported schema {schema}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

/// A mixed state specified inline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    Werner { p: f64, #[serde(default)] phi: f64 },
    Bell { which: BellState },
    MaximallyMixed,
    Density(DensityMatrixData),
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Werner { p, phi } => crate::entanglement::werner_state(
                &crate::entanglement::WernerParams::new(*p, *phi)?,
            ),
            StateSpec::Bell { which } => Ok(crate::entanglement::bell_state(*which).projector()),
            StateSpec::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(4)),
            StateSpec::Density(data) => DensityMatrix::try_from(data),
        }
    }
}

/// A pure state specified inline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PureSpec {
    Bell { which: BellState },
    WernerProjector { #[serde(default)] phi: f64 },
    Amplitudes(PureStateData),
}

impl PureSpec {
    pub fn build(&self) -> Result<PureState> {
        match self {
            PureSpec::Bell { which } => Ok(crate::entanglement::bell_state(*which)),
            PureSpec::WernerProjector { phi } => {
                Ok(crate::entanglement::werner_projector_state(*phi))
            }
            PureSpec::Amplitudes(data) => PureState::try_from(data),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelRunConfig {
    pub schema: u32,
    #[serde(default)]
    pub geometry: ChannelGeometry,
    #[serde(default)]
    pub beam: BeamConfig,
}

/// Initial state for spin-sequence runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSpinState {
    /// Product basis state, e.g. "uud" = electron up, 1H up, 29Si down.
    Basis { labels: String },
    /// Electron in a basis or superposition state (u, d, plus) with the
    /// nuclear pair in a Werner state.
    ElectronNuclearWerner {
        electron: String,
        p: f64,
        #[serde(default)]
        phi: f64,
    },
    Density(DensityMatrixData),
}

impl InitialSpinState {
    pub fn build(&self) -> Result<DensityMatrix> {
        use crate::qmat::{kron, CVec};
        use num_complex::Complex64;
        match self {
            InitialSpinState::Basis { labels } => {
                let mut index = 0usize;
                if labels.is_empty() || labels.len() > 3 {
                    return Err(Error::config("basis labels must have 1..=3 characters"));
                }
                for ch in labels.chars() {
                    index <<= 1;
                    match ch {
                        'u' => {}
                        'd' => index |= 1,
                        _ => return Err(Error::config("basis labels use only 'u' and 'd'")),
                    }
                }
                let dim = 1 << labels.len();
                let mut amps = CVec::zeros(dim);
                amps[index] = Complex64::new(1.0, 0.0);
                Ok(PureState::new(amps)?.projector())
            }
            InitialSpinState::ElectronNuclearWerner { electron, p, phi } => {
                let e = match electron.as_str() {
                    "u" => CVec::from_column_slice(&[
                        Complex64::new(1.0, 0.0),
                        Complex64::new(0.0, 0.0),
                    ]),
                    "d" => CVec::from_column_slice(&[
                        Complex64::new(0.0, 0.0),
                        Complex64::new(1.0, 0.0),
                    ]),
                    "plus" => CVec::from_column_slice(&[
                        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    ]),
                    other => {
                        return Err(Error::config(format!(
                            "unknown electron state '{other}' (use u, d or plus)"
                        )))
                    }
                };
                let e_rho = &e * e.adjoint();
                let nuclear = crate::entanglement::werner_state(
                    &crate::entanglement::WernerParams::new(*p, *phi)?,
                )?;
                DensityMatrix::new(kron(&e_rho, nuclear.matrix()))
            }
            InitialSpinState::Density(data) => DensityMatrix::try_from(data),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinEvolveConfig {
    pub schema: u32,
    #[serde(default)]
    pub spin: SpinSystem,
    pub initial: InitialSpinState,
    pub sequence: PulseSequence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoConfig {
    pub schema: u32,
    pub truth: StateSpec,
    pub n_scale: f64,
    pub seed: u64,
    /// Monte-Carlo iterations for the `mc` subcommand.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Fidelity target for the `mc` subcommand.
    #[serde(default = "default_target")]
    pub target: PureSpec,
}

fn default_iterations() -> usize {
    10_000
}

fn default_target() -> PureSpec {
    PureSpec::WernerProjector { phi: 0.0 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercRunConfig {
    pub schema: u32,
    pub network: EntanglementNetwork,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercThresholdConfig {
    pub schema: u32,
    pub lattice: LatticeKind,
    pub side: usize,
    pub trials_per_point: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeaterRunConfig {
    pub schema: u32,
    pub repeater: RepeaterConfig,
}
