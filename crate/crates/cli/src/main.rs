use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use holochiral_cli::{execute, parse_config_for, CliError, Command, RunConfig};

/// Holonomic chirality discrimination: pulse synthesis, simulation,
/// robustness sweeps and tomography.
#[derive(Debug, Parser)]
#[command(name = "holochiral", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed of the stochastic noise channels.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator steps per cyclic evolution.
    #[arg(long)]
    steps: Option<usize>,
    /// Print the fully defaulted configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

fn resolve(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config_for(&text, Some(args.command)).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
                other => other,
            })?
        }
        None => RunConfig::defaults(args.command),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.render().to_string().trim().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(2);
        }
    };
    let outcome = resolve(&args).and_then(|cfg| {
        if args.print_config {
            print!("{}", cfg.to_toml());
            return Ok(());
        }
        let report = execute(&cfg)?;
        for line in &report.summary {
            println!("{line}");
        }
        println!("wrote {} files to {}", report.files.len(), cfg.out.display());
        Ok(())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
