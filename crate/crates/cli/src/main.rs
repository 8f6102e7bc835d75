use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use kinetic_gehring::constants::{compute_constants, p_star};
use kinetic_gehring::field::write_binary;
use kinetic_gehring::harness::{exceeded_pins, lint_references, load_config, run_suite, ExperimentConfig, SuiteReport};
use kinetic_gehring::kfp::solve;

#[derive(Parser)]
#[command(name = "kg", version, about = "Kinetic Gehring verification suites")]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for reports, tables and fields.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Regression pins file.
    #[arg(long = "pin", global = true)]
    pin: Option<PathBuf>,
    /// Rewrite the pins file from this run.
    #[arg(long, global = true)]
    update_pins: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Gehring constants for the configured parameters.
    Constants {
        /// Target exponent; defaults to the midpoint of [q, p*).
        #[arg(long)]
        p: Option<f64>,
    },
    /// Run one verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Target,
    },
    /// Solve the configured problem and write the space-time field.
    Solve,
    /// Run every suite.
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Geometry,
    Covering,
    Localization,
    Layercake,
    Constants,
    Solver,
    Gehring,
}

impl Target {
    fn suite(self) -> &'static str {
        match self {
            Target::Geometry => "geometry",
            Target::Covering => "covering",
            Target::Localization => "localization",
            Target::Layercake => "layercake",
            Target::Constants => "constants",
            Target::Solver => "solver",
            Target::Gehring => "gehring-endtoend",
        }
    }
}

fn configure(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => load_config(path).with_context(|| format!("reading config {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.out.is_some() {
        config.out = cli.out.clone();
    }
    if cli.pin.is_some() {
        config.pins = cli.pin.clone();
    }
    config.update_pins |= cli.update_pins;
    Ok(config)
}

fn print_report(report: &SuiteReport) {
    for r in &report.records {
        println!("{} {:<40} [{}]", if r.pass { "pass" } else { "FAIL" }, r.name, r.reference);
        for w in &r.warnings {
            println!("     warning: {w}");
        }
    }
    println!(
        "{}: {} passed, {} failed, {:.1} s",
        report.suite, report.summary.passed, report.summary.failed, report.wall_time_s
    );
    for e in exceeded_pins(report) {
        eprintln!("error: {e}");
    }
    for bad in lint_references(report) {
        eprintln!("error: unregistered reference {bad}");
    }
}

fn run_named(config: &mut ExperimentConfig, suite: &str) -> Result<bool> {
    config.suite = suite.to_string();
    let report = run_suite(config)?;
    print_report(&report);
    Ok(report.all_passed() && lint_references(&report).is_empty())
}

fn run(cli: Cli) -> Result<bool> {
    let mut config = configure(&cli)?;
    match cli.command {
        Command::Constants { p } => {
            let params = &config.params;
            let p = match p {
                Some(p) => p,
                None => params.q + 0.5 * (p_star(params)?.value - params.q),
            };
            let report = compute_constants(params, p)?;
            let text = serde_json::to_string_pretty(&report)?;
            if let Some(dir) = &config.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("constants.json"), &text)?;
            }
            println!("{text}");
            let c = &report.checks;
            Ok(c.seventy_five_identity && c.a_forms_agree && c.theta_scaling_consistent && c.exact_matches_float)
        }
        Command::Verify { suite } => run_named(&mut config, suite.suite()),
        Command::Report => run_named(&mut config, "all"),
        Command::Solve => {
            let problem = config.problem.clone().unwrap_or_else(|| config.ensemble.problem(0));
            let sol = solve(&problem)?;
            let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            write_binary(&sol.field, BufWriter::new(File::create(dir.join("solution.bin"))?))?;
            let summary = serde_json::json!({
                "substeps": sol.substeps,
                "max_mass_drift": sol.max_mass_drift(),
                "initial_mass": sol.mass_history.first(),
                "final_mass": sol.mass_history.last(),
                "max_value": sol.field.max_value(),
            });
            std::fs::write(dir.join("solution.json"), serde_json::to_string_pretty(&summary)?)?;
            println!("{summary}");
            Ok(sol.field.values().iter().all(|v| v.is_finite()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("KG_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
