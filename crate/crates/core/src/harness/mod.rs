//! Configuration-driven verification suites with machine-readable reports.
//!
//! A suite produces ordered [`CheckRecord`]s and CSV tables. Ensemble
//! quantities without analytic values are compared against a pinned
//! regression file; `update_pins` rewrites it from the current run.

mod config;
mod pins;
mod report;
mod suites;

use std::path::Path;
use std::time::Instant;

pub use config::{
    default_params, CoveringConfig, EndToEndConfig, ExperimentConfig, GeometryConfig,
    LayerCakeConfig, LocalizationConfig, SolverConfig, ConstantsConfig,
};
pub use pins::{default_pins_path, Pins, PIN_FACTOR};
pub use report::{
    exceeded_pins, lint_references, CheckRecord, Summary, SuiteReport, Table, REFERENCES,
};

use crate::error::{KgError, Result};

/// Names accepted by [`run_suite`], in the order `all` runs them.
pub const SUITES: &[&str] = &[
    "geometry",
    "covering",
    "localization",
    "layercake",
    "constants",
    "solver",
    "gehring-endtoend",
];

/// Runs the configured suite. Pins are read from the configured file; with
/// `update_pins` the pinned quantities of this run are written back.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport> {
    config.validate()?;
    let names: Vec<&str> = match config.suite.as_str() {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => return Err(KgError::UnknownSuite(other.to_string())),
    };
    let pins_path = config.pins_path();
    let pins = Pins::load_or_empty(&pins_path)?;
    let start = Instant::now();
    let mut ctx = suites::Context::new(config, &pins);
    for name in &names {
        log::info!("running suite {name}");
        suites::run(name, &mut ctx)?;
    }
    let (records, tables, measured_pins) = ctx.finish();
    if config.update_pins {
        let mut updated = pins.clone();
        updated.merge(&measured_pins);
        updated.save(&pins_path)?;
    }
    let report = SuiteReport::new(&config.suite, config.seed, records, tables, start.elapsed().as_secs_f64());
    if let Some(dir) = &config.out {
        report.write(dir)?;
    }
    Ok(report)
}

/// Reads a JSON configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
