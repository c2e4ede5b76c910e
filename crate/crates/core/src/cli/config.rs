use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coefficients::{derive_bbm5, Bbm5Coefficients, ModelParameters};
use crate::derivation::DerivationSweepConfig;
use crate::evolution::{InitialCondition, Monitors, Scheme, StepperConfig};
use crate::spectral::Grid;

use super::CliError;

/// One JSON document with a section per command. Unknown keys anywhere are
/// rejected; every section has defaults, so `{}` is a valid config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub model: ModelSection,
    pub simulate: SimulateSection,
    pub energy_drift: EnergyDriftSection,
    pub split: SplitSection,
    pub multiplier_table: MultiplierSection,
    pub picard: PicardSection,
    pub derivation: DerivationSweepConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Where the model coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub parameters: ModelParameters,
    /// Replace ρ by the energy-conserving value.
    pub rho_auto: bool,
    /// Use these coefficients instead of deriving them.
    pub coefficients: Option<Bbm5Coefficients>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            parameters: ModelParameters::reference(),
            rho_auto: false,
            coefficients: None,
        }
    }
}

impl ModelSection {
    pub fn parameters(&self) -> ModelParameters {
        if self.rho_auto {
            self.parameters.with_energy_rho()
        } else {
            self.parameters
        }
    }

    pub fn coefficients(&self) -> Bbm5Coefficients {
        self.coefficients.unwrap_or_else(|| derive_bbm5(&self.parameters()))
    }
}

fn sech2(amplitude: f64) -> InitialCondition {
    InitialCondition::Sech2 {
        amplitude,
        width: 1.0,
        center: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub grid: Grid,
    pub initial: InitialCondition,
    pub horizon: f64,
    pub stepper: StepperConfig,
    pub dealias: bool,
    pub monitors: Monitors,
    /// Also write the final state as `final_snapshot.csv` and `final_spectrum.csv`.
    pub final_snapshot: bool,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection {
            grid: Grid::new(2048, 64.0 * std::f64::consts::PI).expect("valid grid"),
            initial: sech2(0.5),
            horizon: 10.0,
            stepper: StepperConfig::default(),
            dealias: true,
            monitors: Monitors {
                every: 100,
                ..Monitors::default()
            },
            final_snapshot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyDriftSection {
    pub grid: Grid,
    pub initial: InitialCondition,
    pub horizon: f64,
    pub stepper: StepperConfig,
    /// Overrides the model's γ; `null` keeps it.
    pub gamma: Option<f64>,
    pub every: usize,
}

impl Default for EnergyDriftSection {
    fn default() -> Self {
        EnergyDriftSection {
            grid: Grid::new(2048, 64.0 * std::f64::consts::PI).expect("valid grid"),
            initial: sech2(0.5),
            horizon: 10.0,
            stepper: StepperConfig::default(),
            gamma: Some(7.0 / 48.0 + 0.1),
            every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub grid: Grid,
    pub s: f64,
    pub cutoffs: Vec<f64>,
    pub t0_constant: f64,
    /// `H^s` norm of the random initial data.
    pub data_norm: f64,
    pub smooth_width: Option<f64>,
    pub stepper: StepperConfig,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            grid: Grid::new(512, 2.0 * std::f64::consts::PI).expect("valid grid"),
            s: 1.5,
            cutoffs: vec![8.0, 16.0, 32.0, 64.0],
            t0_constant: 1.0,
            data_norm: 1.0,
            smooth_width: None,
            stepper: StepperConfig {
                dt: 1e-3,
                ..StepperConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierSection {
    pub xi_max: f64,
    pub samples_per_unit: usize,
}

impl Default for MultiplierSection {
    fn default() -> Self {
        MultiplierSection {
            xi_max: 20.0,
            samples_per_unit: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardSection {
    pub grid: Grid,
    pub initial: InitialCondition,
    /// Rescale the data to this `H^s` norm (`s` = stepper.sobolev_index).
    pub data_norm: Option<f64>,
    /// Defaults to the guaranteed existence time.
    pub horizon: Option<f64>,
    pub stepper: StepperConfig,
}

impl Default for PicardSection {
    fn default() -> Self {
        PicardSection {
            grid: Grid::new(512, 32.0 * std::f64::consts::PI).expect("valid grid"),
            initial: InitialCondition::Gaussian {
                amplitude: 1.0,
                width: 2.0,
                center: None,
            },
            data_norm: Some(1e-2),
            horizon: None,
            stepper: StepperConfig {
                scheme: Scheme::PicardDuhamel,
                dt: 1e-2,
                ..StepperConfig::default()
            },
        }
    }
}
