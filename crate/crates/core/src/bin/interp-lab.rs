use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use interp_lab::harness::{list_suites, run_suite, ExperimentConfig};
use interp_lab::interpolation::{
    interpolated_norm, lions_peetre_decompose, peetre_norm_bracket, InterpolationRequest, NormMode, NumericOptions,
    PeetreRepresentation,
};
use interp_lab::tolerances::OBJECTIVE_TOL;
use interp_lab::{Couple, Error, Result, C64};
use serde::de::DeserializeOwned;

/// Numerical experiments with interpolation of weighted sequence spaces.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and write `<suite>.json` / `<suite>.csv`.
    Run {
        suite: String,
        /// JSON experiment config; its suite must match.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the registered suites.
    List,
    /// Interpolated norm of a vector.
    Norm {
        /// Couple as inline JSON or a path to a JSON file.
        #[arg(long)]
        couple: String,
        #[arg(long)]
        theta: f64,
        /// Vector as JSON, e.g. `[[1,0],[0,2]]`.
        #[arg(long)]
        x: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: Mode,
    },
    /// K-functional split `x = x0 + x1` at `t`.
    Decompose {
        #[arg(long)]
        couple: String,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: String,
    },
    /// Dyadic representation of `x` and the bracket on its norm.
    Peetre {
        #[arg(long)]
        couple: String,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 20)]
        max_index: i64,
        #[arg(long, default_value_t = 256)]
        phases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Closed,
    Numeric,
    Both,
}

fn json_arg<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with(['{', '[']) { arg.to_owned() } else { fs::read_to_string(arg)? };
    Ok(serde_json::from_str(&text)?)
}

fn request(couple: &str, theta: f64) -> Result<InterpolationRequest> {
    InterpolationRequest::new(json_arg::<Couple>(couple)?, theta)
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::List => {
            for s in list_suites() {
                println!("{:<20} {}", s.name, s.description);
            }
        }
        Command::Run { suite, config, seed, out } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
                None => ExperimentConfig::new(&suite, seed.unwrap_or(0)),
            };
            if cfg.suite != suite {
                return Err(Error::Config(vec![format!(
                    "suite: config names `{}`, command line `{suite}`",
                    cfg.suite
                )]));
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("reports"));
            let start = Instant::now();
            let report = run_suite(&cfg)?;
            let (json, csv) = report.write(&dir)?;
            for r in report.failures() {
                eprintln!("FAIL {}: lhs {:e} > rhs {:e} + {:e}", r.check, r.lhs, r.rhs, r.tolerance);
            }
            println!(
                "{}: {} passed, {} failed, {} heuristic in {:.1?} -> {}, {}",
                report.suite,
                report.passed,
                report.failed,
                report.heuristic,
                start.elapsed(),
                json.display(),
                csv.display()
            );
            return Ok(report.ok());
        }
        Command::Norm { couple, theta, x, mode } => {
            let req = request(&couple, theta)?;
            let x: Vec<C64> = json_arg(&x)?;
            let mode = match mode {
                Mode::Closed => NormMode::Closed,
                Mode::Numeric => NormMode::Numeric,
                Mode::Both => NormMode::Both,
            };
            print_json(&interpolated_norm(&req, &x, mode, &NumericOptions::default())?)?;
        }
        Command::Decompose { couple, theta, t, x } => {
            let req = request(&couple, theta)?;
            print_json(&lions_peetre_decompose(&req, &json_arg::<Vec<C64>>(&x)?, t, OBJECTIVE_TOL)?)?;
        }
        Command::Peetre { couple, theta, x, max_index, phases, seed } => {
            let req = request(&couple, theta)?;
            let rep = PeetreRepresentation::dyadic(&req.couple, &json_arg::<Vec<C64>>(&x)?, max_index)?;
            let (lower, upper) = peetre_norm_bracket(&req, &rep, phases, seed)?;
            print_json(&serde_json::json!({ "representation": rep, "lower": lower, "upper": upper }))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
