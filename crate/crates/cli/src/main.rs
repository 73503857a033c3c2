use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dqme_cli::config::normalize_methods;
use dqme_cli::{emit_csv, format_csv, parse_config, run_sweep_with, CliError};
use dqme_core::Method;

#[derive(Parser)]
#[command(name = "dqme", version, about = "Steady-state energy currents of driven open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a parameter sweep and write a CSV table.
    Sweep {
        /// JSON sweep configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output file; overrides the config. Without either, CSV goes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Comma-separated subset of dqme, dme, fme; overrides the config.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn sweep(
    config: PathBuf,
    output: Option<PathBuf>,
    methods: Option<Vec<Method>>,
    threads: Option<usize>,
) -> Result<(), CliError> {
    let text = fs::read_to_string(&config).map_err(|source| CliError::Io {
        path: config.clone(),
        source,
    })?;
    let cfg = parse_config(&text)?;
    let methods = match methods {
        Some(m) => normalize_methods(m).map_err(|e| CliError::Config(format!("--methods: {e}")))?,
        None => cfg.methods.clone(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    let rows = pool.install(|| run_sweep_with(&cfg, &methods))?;
    match output.or(cfg.output.clone()) {
        Some(path) => emit_csv(&rows, &path),
        None => io::stdout()
            .write_all(format_csv(&rows).as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Sweep {
            config,
            output,
            methods,
            threads,
        } => sweep(config, output, methods, threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
