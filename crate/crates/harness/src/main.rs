use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polydisc_harness::gallery::write_gallery;
use polydisc_harness::generate::{generate, GenKind, GenParams};
use polydisc_harness::run::{diagnostic, run_scenario, RunOptions, EXIT_CONFIG};
use polydisc_harness::scenario::ScenarioFile;

#[derive(Parser)]
#[command(
    name = "polydisc",
    version,
    about = "Verify invariant-subspace characterizations on truncated Hardy spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario file.
    Run {
        scenario: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the mask margins, one per variable.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        margin: Option<Vec<usize>>,
        /// Record wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Generate a seeded scenario.
    Generate {
        /// positive-monomial, positive-blaschke, adversarial or non-invariant
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        caps: Vec<usize>,
        /// Number of inner terms.
        #[arg(long, default_value_t = 2)]
        terms: usize,
        #[arg(long)]
        seed: u64,
        /// Use increasing terms paired with head spaces.
        #[arg(long)]
        increasing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write and run the bundled scenarios.
    Gallery {
        #[arg(long, default_value = "gallery")]
        out_dir: PathBuf,
    },
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            out,
            tol,
            margin,
            timing,
        } => {
            let text = match fs::read_to_string(&scenario) {
                Ok(t) => t,
                Err(e) => return config_error(format!("{}: {e}", scenario.display())),
            };
            let parsed = match ScenarioFile::from_json(&text) {
                Ok(s) => s,
                Err(e) => return config_error(e),
            };
            let opts = RunOptions {
                tol,
                margins: margin,
                timing,
            };
            let report = match run_scenario(&parsed, &opts) {
                Ok(r) => r,
                Err(e) => return config_error(e),
            };
            if let Err(e) = write_or_print(out.as_ref(), &report.to_json()) {
                return config_error(e);
            }
            if let Some(d) = diagnostic(&report) {
                eprintln!("{d}");
            }
            ExitCode::from(report.exit_code as u8)
        }
        Command::Generate {
            kind,
            n,
            caps,
            terms,
            seed,
            increasing,
            out,
        } => {
            let params = GenParams {
                kind,
                n,
                caps,
                terms,
                seed,
                increasing,
            };
            match generate(&params) {
                Ok(s) => match write_or_print(out.as_ref(), &s.to_json()) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => config_error(e),
                },
                Err(e) => config_error(e),
            }
        }
        Command::Gallery { out_dir } => match write_gallery(&out_dir) {
            Ok(reports) => {
                let mut code = 0;
                for r in &reports {
                    println!("{:<40} exit {}", r.scenario.name, r.exit_code);
                    if let Some(d) = diagnostic(r) {
                        eprintln!("{}: {d}", r.scenario.name);
                    }
                    code = code.max(r.exit_code);
                }
                ExitCode::from(code as u8)
            }
            Err(e) => config_error(e),
        },
    }
}
