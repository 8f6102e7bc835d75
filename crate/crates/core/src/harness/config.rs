use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::pins::default_pins_path;
use crate::constants::GehringParams;
use crate::error::{KgError, Result};
use crate::kfp::{EnsembleSpec, SolverProblem, TransportScheme};

/// `d = 1`, `q = 2`, `σ = 3`, `b = 2`, `θ = 10⁻¹³`, `γ = 1.25`.
pub fn default_params() -> GehringParams {
    GehringParams { q: 2.0, sigma: 3.0, b: 2.0, theta: 1e-13, gamma: 1.25, d: 1 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConfig {
    /// Random instances per group axiom.
    pub samples: usize,
    /// Cells per axis of the volume quadrature.
    pub volume_resolution: usize,
    pub max_dim: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { samples: 10_000, volume_resolution: 64, max_dim: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CoveringConfig {
    pub families: usize,
    pub max_family_size: usize,
    /// Sample points per family, split evenly over its cylinders.
    pub samples_per_family: usize,
    pub kernel_pairs: usize,
}

impl Default for CoveringConfig {
    fn default() -> Self {
        CoveringConfig { families: 200, max_family_size: 50, samples_per_family: 100_000, kernel_pairs: 10_000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalizationConfig {
    pub lipschitz_triples: usize,
    pub inclusion_pairs: usize,
    pub lower_bound_samples: usize,
    pub resolution: usize,
    /// Cylinders per synthetic field in the normalisation check.
    pub normalisation_cylinders: usize,
    pub tolerance: f64,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig {
            lipschitz_triples: 100_000,
            inclusion_pairs: 10_000,
            lower_bound_samples: 100_000,
            resolution: 96,
            normalisation_cylinders: 400,
            tolerance: 2e-2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LayerCakeConfig {
    pub levels: usize,
    pub resolution: usize,
    pub tolerance: f64,
}

impl Default for LayerCakeConfig {
    fn default() -> Self {
        LayerCakeConfig { levels: 512, resolution: 64, tolerance: 1e-2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantsConfig {
    /// Exponent at which `C_G` is reported; the midpoint of `[q, p*)` when
    /// absent.
    pub p: Option<f64>,
    pub max_dim: usize,
    pub divergence_steps: u32,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig { p: None, max_dim: 8, divergence_steps: 6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub scheme: TransportScheme,
    pub moment_resolution: usize,
    pub moment_time: f64,
    pub moment_tolerance: f64,
    pub mms_resolutions: Vec<usize>,
    pub min_order: f64,
    pub conservation_resolution: usize,
    pub bogovskii_resolution: usize,
    pub bogovskii_sources: usize,
    pub poincare_resolution: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            scheme: TransportScheme::Limited,
            moment_resolution: 128,
            moment_time: 0.5,
            moment_tolerance: 2e-2,
            mms_resolutions: vec![32, 64, 128],
            min_order: 0.9,
            conservation_resolution: 48,
            bogovskii_resolution: 32,
            bogovskii_sources: 10,
            poincare_resolution: 96,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EndToEndConfig {
    pub refined_resolution: usize,
    pub rh_cylinders: usize,
    pub eps: f64,
    pub energy_r: f64,
    pub big_r: f64,
    pub refinement_tolerance: f64,
}

impl Default for EndToEndConfig {
    fn default() -> Self {
        EndToEndConfig {
            refined_resolution: 96,
            rh_cylinders: 500,
            eps: 0.01,
            energy_r: 0.5,
            big_r: 1.0,
            refinement_tolerance: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub suite: String,
    pub seed: u64,
    pub params: GehringParams,
    pub geometry: GeometryConfig,
    pub covering: CoveringConfig,
    pub localization: LocalizationConfig,
    pub layercake: LayerCakeConfig,
    pub constants: ConstantsConfig,
    pub solver: SolverConfig,
    pub ensemble: EnsembleSpec,
    pub endtoend: EndToEndConfig,
    /// Problem for a single `solve` run; ensemble member 0 when absent.
    pub problem: Option<SolverProblem>,
    pub out: Option<PathBuf>,
    pub pins: Option<PathBuf>,
    pub update_pins: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: "all".into(),
            seed: 20240611,
            params: default_params(),
            geometry: GeometryConfig::default(),
            covering: CoveringConfig::default(),
            localization: LocalizationConfig::default(),
            layercake: LayerCakeConfig::default(),
            constants: ConstantsConfig::default(),
            solver: SolverConfig::default(),
            ensemble: EnsembleSpec::default(),
            endtoend: EndToEndConfig::default(),
            problem: None,
            out: None,
            pins: None,
            update_pins: false,
        }
    }
}

impl ExperimentConfig {
    pub fn for_suite(suite: &str) -> Self {
        ExperimentConfig { suite: suite.into(), ..Default::default() }
    }

    pub fn pins_path(&self) -> PathBuf {
        self.pins.clone().unwrap_or_else(default_pins_path)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.ensemble.validate()?;
        if self.solver.mms_resolutions.len() < 2 {
            return Err(KgError::Configuration("need at least two MMS resolutions".into()));
        }
        if self.layercake.levels < 2 {
            return Err(KgError::Configuration("need at least two levels".into()));
        }
        let e = &self.endtoend;
        if !(e.energy_r > 0.0 && e.energy_r < e.big_r && e.eps > 0.0) {
            return Err(KgError::Configuration("need 0 < r < R and eps > 0".into()));
        }
        if let Some(p) = &self.pins {
            if !self.update_pins && !p.exists() {
                return Err(KgError::Configuration(format!("pins file {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
