//! `fpl`: generate packings and rasters, analyze them, summarize reports.
//!
//! Exit codes: 0 success, 2 usage, 3 input format, 4 numeric failure.
//! Errors are one JSON object on stderr; warnings are JSON lines there too.

mod analyze;
mod args;
mod gen;
mod output;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "fpl", version, about = "Curve packings, Fatou-component rasters and their statistics")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "FPL_THREADS", default_value_t = 0, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a packing file (and a raster where applicable).
    Gen {
        #[command(subcommand)]
        kind: gen::GenKind,
    },
    /// Compute a statistic or homogeneity report from packing/raster files.
    Analyze {
        #[command(subcommand)]
        kind: analyze::AnalyzeKind,
    },
    /// Summarize analysis files as markdown with pass/fail lines.
    Report(report::ReportArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if e.use_stderr() {
                let line = serde_json::json!({ "error": "Usage", "message": e.kind().to_string(), "exit_code": output::EXIT_USAGE });
                eprintln!("{line}");
                return ExitCode::from(output::EXIT_USAGE);
            }
            return ExitCode::from(code as u8);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        output::warn(format!("thread pool: {e}"));
    }
    let result = match cli.command {
        Command::Gen { kind } => gen::run(kind),
        Command::Analyze { kind } => analyze::run(kind),
        Command::Report(a) => report::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => ExitCode::from(output::report_error(&e)),
    }
}
