use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dea_bench::cli::{exit_code, run, Command, Format, RunConfig};
use dea_bench::dea::DEFAULT_ALPHAS;

/// Closest-target and two-step DEA benchmarking.
#[derive(Debug, Parser)]
#[command(name = "dea-bench", version)]
struct Args {
    command: Command,
    /// CSV with header `id,in:<name>,...,out:<name>,...`.
    input: PathBuf,
    /// Weights on the first step of a two-step plan.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS)]
    alphas: Vec<f64>,
    /// Number of efficient levels to peel.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Only report these unit ids.
    #[arg(long, value_delimiter = ',')]
    dmu: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Cross-check every objective against brute-force face enumeration.
    #[arg(long)]
    certify: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol_feas: Option<f64>,
    #[arg(long)]
    tol_opt: Option<f64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = RunConfig {
        input_path: args.input,
        command: args.command,
        alphas: args.alphas,
        depth: args.depth,
        dmus: args.dmu,
        format: args.format,
        certify: args.certify,
        feas_tol: args.tol_feas,
        opt_tol: args.tol_opt,
    };

    let output = match run(&config) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let written = match &args.out {
        Some(path) => std::fs::write(path, &output.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(output.text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if output.certification_failures > 0 {
        eprintln!(
            "error: {} row(s) disagree with the oracle by more than the certification tolerance",
            output.certification_failures
        );
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
