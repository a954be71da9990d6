use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use homharm::io::convert_field;
use homharm::verify::{emit_report, run_suite, ReportFormat, Suite, SuiteConfig};
use homharm::Error;

#[derive(Parser)]
#[command(name = "homharm", version, about = "Property checks and file conversion for equivariant harmonic analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and write a report.
    Check {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        bandwidth: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Report path; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        #[arg(long, default_value_t = homharm::nonlin::DEFAULT_OVERSAMPLE)]
        oversample: usize,
        #[arg(long, env = "HOMHARM_THREADS")]
        threads: Option<usize>,
        /// Override one tolerance, `check.name=value`. Repeatable.
        #[arg(long = "tol", value_parser = parse_tol)]
        tolerances: Vec<(String, f64)>,
        /// Include per-check wall times (makes reports differ between runs).
        #[arg(long)]
        timings: bool,
    },
    /// Convert a field file between JSON and CSV, chosen by extension.
    Convert { input: PathBuf, output: PathBuf },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = v.parse().map_err(|_| format!("bad tolerance {v:?}"))?;
    if !(v >= 0.0) {
        return Err("tolerance must be nonnegative".into());
    }
    Ok((k.to_string(), v))
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            suite,
            bandwidth,
            seed,
            trials,
            report,
            format,
            oversample,
            threads,
            tolerances,
            timings,
        } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            let config = SuiteConfig {
                bandwidth,
                seed,
                trials,
                oversample,
                tolerances: tolerances.into_iter().collect(),
                timings,
            };
            let rep = match run_suite(suite, &config) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let written = match &report {
                Some(path) => emit_report(&rep, path, format),
                None => match format {
                    ReportFormat::Json => rep.to_json(),
                    ReportFormat::Csv => rep.to_csv(),
                }
                .map(|s| print!("{s}")),
            };
            if let Err(e) = written {
                match &report {
                    Some(path) => eprintln!("error: writing {}: {e}", path.display()),
                    None => eprintln!("error: {e}"),
                }
                return ExitCode::from(EXIT_IO);
            }
            let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            eprintln!("{}: {} checks, {} failed", rep.suite, rep.checks.len(), failed.len());
            for name in &failed {
                eprintln!("  failed: {name}");
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Command::Convert { input, output } => match convert_field(&input, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                match &e {
                    Error::Io(_) => eprintln!("error: {}: {e}", input.display()),
                    _ => eprintln!("error: {e}"),
                }
                ExitCode::from(EXIT_IO)
            }
        },
    }
}
