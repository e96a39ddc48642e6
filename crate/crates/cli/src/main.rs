use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use metproj_cli::{run, CliError, JobSpec};

/// Metric projections onto balls and positive cones: projections,
/// derivatives, and numerical differentiability checks driven by job files.
#[derive(Debug, Parser)]
#[command(name = "metproj", version)]
struct Args {
    /// JSON job file.
    #[arg(long)]
    job: PathBuf,
    /// Seed for residual scans; overrides `options.seed` in the job.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not print the report to standard output.
    #[arg(long)]
    quiet: bool,
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(&args.job).map_err(|source| CliError::Read {
        path: args.job.display().to_string(),
        source,
    })?;
    let job = JobSpec::parse(&text)?;
    let report = run(&job, args.seed)?;
    match &args.out {
        Some(path) => std::fs::write(path, &report.body).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?,
        None if !args.quiet => print!("{}", report.body),
        None => {}
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("metproj: {e}");
            ExitCode::from(2)
        }
    }
}
