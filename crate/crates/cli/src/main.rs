use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orbsym_cli::run::{text_summary, DEFAULT_SEED};
use orbsym_cli::{parse_problem_config, run, Command, Options};

/// Order reduction, symmetry certification and numeric verification of
/// central-force problems.
#[derive(Parser, Debug)]
#[command(name = "orbsym", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report destination; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled-point checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Run independent integrations concurrently.
    #[arg(long)]
    parallel: bool,
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cfg = match parse_problem_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let csv = cfg.raw.csv.clone().or_else(|| cli.out.as_ref().map(|p| p.with_extension("csv")));
    let opts = Options { seed: cli.seed, parallel: cli.parallel, csv: csv.as_deref() };
    let report = run(cli.command, &cfg, &opts);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_FAIL);
            }
            eprint!("{}", text_summary(&report));
        }
        None => {
            // a closed pipe on stdout is not an error of the run
            let _ = writeln!(std::io::stdout().lock(), "{json}");
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
