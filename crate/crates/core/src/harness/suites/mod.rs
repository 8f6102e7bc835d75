use std::collections::BTreeMap;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::pins::{Pins, PIN_FACTOR};
use super::report::{CheckRecord, Table};
use crate::error::{KgError, Result};

mod constants;
mod covering;
mod endtoend;
mod geometry;
mod layercake;
mod localization;
mod solver;

pub(super) struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pins: &'a Pins,
    records: Vec<CheckRecord>,
    tables: Vec<Table>,
    measured_pins: BTreeMap<String, f64>,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ExperimentConfig, pins: &'a Pins) -> Self {
        Context { config, pins, records: Vec::new(), tables: Vec::new(), measured_pins: BTreeMap::new() }
    }

    pub fn finish(self) -> (Vec<CheckRecord>, Vec<Table>, BTreeMap<String, f64>) {
        (self.records, self.tables, self.measured_pins)
    }

    pub fn push(&mut self, r: CheckRecord) {
        log::info!("{} {}", if r.pass { "pass" } else { "FAIL" }, r.name);
        self.records.push(r);
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    /// Seed for one experiment, derived from the run seed and a tag.
    pub fn seed(&self, tag: u64) -> u64 {
        self.config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ tag
    }

    /// Record for a pinned empirical constant.
    pub fn pinned<I: Serialize>(&mut self, name: &str, reference: &str, inputs: &I, measured: f64) {
        self.measured_pins.insert(name.to_string(), measured);
        let rec = CheckRecord::new(name, reference, inputs).measure("value", measured);
        let rec = if self.config.update_pins {
            rec.measure("pinned", measured)
                .threshold(format!("<= {PIN_FACTOR} x pinned"))
                .verdict(measured.is_finite())
                .warn("pin updated from this run")
        } else {
            match self.pins.get(name) {
                Some(p) => rec
                    .measure("pinned", p)
                    .threshold(format!("<= {PIN_FACTOR} x {p:e}"))
                    .verdict(measured.is_finite() && measured <= PIN_FACTOR * p),
                None => rec.verdict(false).warn("no pinned value; run with --update-pins"),
            }
        };
        self.push(rec);
    }
}

pub(super) fn run(name: &str, ctx: &mut Context) -> Result<()> {
    match name {
        "geometry" => geometry::run(ctx),
        "covering" => covering::run(ctx),
        "localization" => localization::run(ctx),
        "layercake" => layercake::run(ctx),
        "constants" => constants::run(ctx),
        "solver" => solver::run(ctx),
        "gehring-endtoend" => endtoend::run(ctx),
        other => Err(KgError::UnknownSuite(other.to_string())),
    }
}

/// `|a - b| / max(|b|, floor)`
pub(crate) fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
