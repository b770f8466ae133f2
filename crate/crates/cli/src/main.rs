use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gencx::Exec;

mod algebra;
mod config;
mod deform;
mod hodge;
mod report;

use config::ExperimentConfig;
use report::Report;

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "gencx", version, about = "Generalized complex structures on flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded property checks of the Clifford and structure layers.
    VerifyAlgebra {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest complex dimension; real dimensions 1..=2n are tested.
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Negates the Hodge star before checking it (negative control).
        #[arg(long, hide = true)]
        corrupt_star: bool,
        #[arg(long)]
        json: bool,
    },
    /// Component pattern, Laplacian and Green operator identities for a background.
    VerifyHodge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solves the deformation problem order by order and verifies the result.
    Deform {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        /// Residual tolerance; overrides the config.
        #[arg(long)]
        tol: Option<f64>,
        /// Artifact directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn emit(report: &Report, json: bool) {
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    ExperimentConfig::load(path).map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(EXIT_USAGE)
    })
}

fn verdict(report: &Report) -> ExitCode {
    if report.passed {
        ExitCode::SUCCESS
    } else {
        for c in report.failures() {
            eprintln!("failed: {}", c.name);
        }
        ExitCode::from(deform::EXIT_FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let exec = Exec::default();
    match cli.command {
        Command::VerifyAlgebra {
            seed,
            n_max,
            trials,
            corrupt_star,
            json,
        } => {
            let report = algebra::run(&algebra::AlgebraOptions {
                seed,
                n_max,
                trials,
                corrupt_star,
            });
            emit(&report, json);
            verdict(&report)
        }
        Command::VerifyHodge { config, json } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match hodge::run(&cfg, exec) {
                Ok(report) => {
                    emit(&report, json);
                    verdict(&report)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
        Command::Deform {
            config,
            order,
            tol,
            out,
            json,
        } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let opts = deform::DeformOptions { order, tol, out };
            match deform::run(&cfg, &opts, exec) {
                Ok(outcome) => {
                    emit(&outcome.report, json);
                    for c in outcome.report.failures() {
                        eprintln!("failed: {}", c.name);
                    }
                    ExitCode::from(outcome.code)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
    }
}
