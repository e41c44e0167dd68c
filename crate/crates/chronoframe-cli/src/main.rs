use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chronoframe_cli::{load_config, run, CheckLevel, Format, RunError, RunOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chronoframe", version, about = "Run relational-clock causality scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Override every clock dimension, keeping the period fixed.
        #[arg(long)]
        clock_dim: Option<usize>,
        /// Seed for `random` generators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = CheckLevel::Fast)]
        check_level: CheckLevel,
    },
    /// Print the JSON schema of scenario files.
    Schema,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&chronoframe_cli::config::schema()).expect("schema"));
            ExitCode::SUCCESS
        }
        Command::Run { config, out, format, clock_dim, seed, check_level } => {
            let opts = RunOptions { format, clock_dim, seed, check_level, threads: None };
            match execute(&config, out, &opts) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => {
                    eprintln!("chronoframe: one or more invariant checks failed");
                    ExitCode::from(1)
                }
                Err(e) => {
                    eprintln!("chronoframe: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}

fn execute(config: &Path, out: Option<PathBuf>, opts: &RunOptions) -> Result<bool, RunError> {
    let cfg = load_config(config)?;
    let mut sink: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let ok = run(&cfg, opts, &mut sink)?;
    sink.flush()?;
    Ok(ok)
}
