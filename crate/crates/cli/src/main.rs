mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use commands::{couple, bsll, hyp, profile, selftest, tiling, wreath};
use report::{Format, RunReport};

/// Experiments with orbit-equivalence couplings, Følner tilings and hyperbolicity constants.
#[derive(Parser, Debug)]
#[command(name = "oelab", version)]
struct Cli {
    /// Output format for the report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random stream in the run.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Følner tiling sequences.
    #[command(subcommand)]
    Tiling(tiling::TilingCmd),
    /// Matched tiling couplings.
    #[command(subcommand)]
    Couple(couple::CoupleCmd),
    /// The odometer coupling between BS(1,k) and the lamplighter.
    #[command(subcommand, name = "bs-ll")]
    BsLl(bsll::BsLlCmd),
    /// Brute-force isoperimetric profiles.
    Profile(profile::ProfileArgs),
    /// Wreath products of couplings.
    #[command(subcommand)]
    Wreath(wreath::WreathCmd),
    /// Hyperbolicity constants and cycle audits of finite graphs.
    #[command(subcommand)]
    Hyp(hyp::HypCmd),
    /// Fast sanity checks with known answers.
    Selftest(selftest::SelftestArgs),
}

impl Command {
    fn run(&self, seed: u64) -> oelab_core::Result<report::Outcome> {
        match self {
            Command::Tiling(c) => tiling::run(c, seed),
            Command::Couple(c) => couple::run(c, seed),
            Command::BsLl(c) => bsll::run(c, seed),
            Command::Profile(a) => profile::run(a),
            Command::Wreath(c) => wreath::run(c, seed),
            Command::Hyp(c) => hyp::run(c),
            Command::Selftest(a) => selftest::run(a, seed),
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let echo = argv.join(" ");
    let started = Instant::now();
    let version = env!("CARGO_PKG_VERSION");
    let mut stdout = std::io::stdout().lock();

    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{}", e.render());
            let report = RunReport {
                command: echo,
                parameters: Value::Null,
                seed: None,
                status: "error",
                results: Value::Null,
                error: Some(e.kind().to_string()),
                timing_ms: 0.0,
                version,
            };
            let format = if argv.windows(2).any(|w| w[0] == "--format" && w[1] == "csv") {
                Format::Csv
            } else {
                Format::Json
            };
            let _ = report.emit(format, None, &mut stdout);
            return ExitCode::from(1);
        }
    };

    let outcome = match cli.threads {
        Some(0) => Err(oelab_core::Error::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| oelab_core::Error::Usage(e.to_string())),
        None => Ok(()),
    }
    .and_then(|()| cli.command.run(cli.seed));

    let parameters = report::to_value(&cli.command);
    let timing_ms = started.elapsed().as_secs_f64() * 1e3;
    let (report, table) = match outcome {
        Ok(o) => (
            RunReport {
                command: echo,
                parameters,
                seed: Some(cli.seed),
                status: if o.pass { "ok" } else { "audit_failed" },
                results: o.results,
                error: None,
                timing_ms,
                version,
            },
            Some(o.table),
        ),
        Err(e) => (
            RunReport {
                command: echo,
                parameters,
                seed: Some(cli.seed),
                status: "error",
                results: Value::Null,
                error: Some(e.to_string()),
                timing_ms,
                version,
            },
            None,
        ),
    };
    if let Err(e) = report.emit(cli.format, table.as_ref(), &mut stdout) {
        eprintln!("failed to write report: {e}");
        return ExitCode::from(1);
    }
    let _ = stdout.flush();
    if let Some(err) = &report.error {
        eprintln!("oelab: {err}");
    }
    ExitCode::from(report.exit_code() as u8)
}
