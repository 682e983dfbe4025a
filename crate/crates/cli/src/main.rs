use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use logcave_cli::{load_config, run, write_outputs, CliError, Subcommand};

/// Seeded experiments for log-concave density approximation and selection.
#[derive(Parser, Debug)]
#[command(name = "logcave", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// JSON parameters for the subcommand; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides a "seed" key in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    emit_svg: bool,
}

fn threads_from_env() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LOGCAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("LOGCAVE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = threads_from_env()
        .and_then(|_| load_config(args.subcommand, args.config.as_deref(), args.seed, &args.out, args.emit_svg))
        .and_then(|cfg| {
            let record = run(&cfg)?;
            write_outputs(&cfg, &record)
        });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
