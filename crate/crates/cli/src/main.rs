//! `qlab`: run measurement, Bell, search, evolution and spectral commands on
//! scenario files or built-in fixtures.
//!
//! Exit codes: 0 success, 1 a `verify-paper` check failed, 2 input error,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qlab_core::bell::ConstraintSet;
use qlab_core::report::{run, verify_paper, Command, Overrides, Report};
use qlab_core::scenario::{fixture, parse_scenario, Scenario, FIXTURES};
use qlab_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Cmd {
    Measure,
    Bell,
    Search,
    Evolve,
    Spectral,
    VerifyPaper,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Measure => Command::Measure,
            Cmd::Bell => Command::Bell,
            Cmd::Search => Command::Search,
            Cmd::Evolve => Command::Evolve,
            Cmd::Spectral => Command::Spectral,
            Cmd::VerifyPaper => Command::VerifyPaper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qlab", version, about = "Heisenberg measurements in indefinite geometries")]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,

    /// Scenario JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "fixture")]
    scenario: Option<PathBuf>,

    /// Built-in scenario.
    #[arg(long, value_name = "NAME", value_parser = clap::builder::PossibleValuesParser::new(FIXTURES))]
    fixture: Option<String>,

    /// State and isometry tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,

    /// Upper bound on the euclidean norm squared of search states.
    #[arg(long = "norm-cap", value_name = "X")]
    norm_cap: Option<f64>,

    /// none, marginals_nonneg, pairwise_nonneg or triple_nonneg.
    #[arg(long, value_name = "SET")]
    constraints: Option<String>,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,

    /// Evolution steps.
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn load(cli: &Cli) -> Result<Scenario, Failure> {
    match (&cli.scenario, &cli.fixture) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            parse_scenario(&text).map_err(|e| match Failure::from(e) {
                Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
                other => other,
            })
        }
        (None, Some(name)) => Ok(fixture(name)?),
        (None, None) => Err(Failure::Input("one of --scenario FILE or --fixture NAME is required".into())),
    }
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let command = Command::from(cli.command);
    if command == Command::VerifyPaper {
        return Ok(verify_paper()?);
    }
    let constraints = cli
        .constraints
        .as_deref()
        .map(str::parse::<ConstraintSet>)
        .transpose()?;
    let overrides = Overrides {
        tol: cli.tol,
        norm_cap: cli.norm_cap,
        constraints,
        steps: cli.steps,
    };
    let scenario = overrides.apply(&load(cli)?)?;
    Ok(run(&scenario, command)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            match report.verify() {
                Some(v) if !v.all_pass => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Input(m)) => {
            eprintln!("qlab: input error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("qlab: numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
