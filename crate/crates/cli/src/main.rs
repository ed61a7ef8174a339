//! `neqcoh`: steady states, time evolution, and parameter sweeps of small
//! open quantum systems between two heat baths.

mod config;
mod output;
mod run;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{OutputFormat, RunConfig};
use neqcoh::verify::{run_all, run_check, Mutation, VerifyOptions, CHECK_NAMES};
use output::{CsvWriter, JsonWriter, RowWriter};

#[derive(Parser)]
#[command(
    name = "neqcoh",
    about = "Non-secular master-equation toolkit: steady coherence and heat flux \
             of three-level and coupled two-qubit systems between two heat baths",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Configuration document (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output file (stdout when omitted; overrides config `output.path`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (overrides config `output.format`)
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Echo the effective configuration to stderr before running
    #[arg(long)]
    print_config: bool,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format '{other}' (csv|json)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one steady state and emit a single record
    Steady(IoArgs),
    /// Integrate the master equation and emit the sampled trajectory
    Evolve(IoArgs),
    /// Evaluate the steady state over a parameter grid
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        /// Worker threads for grid points (output order is unaffected)
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the built-in analytic self-checks
    Verify {
        /// List check names without running them
        #[arg(long)]
        list: bool,
        /// Run a single named check
        #[arg(long)]
        only: Option<String>,
        /// Seed for the randomized checks
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Deliberately mis-build part of the generator (mutation testing)
        #[arg(long)]
        mutate: Option<Mutation>,
    },
    /// Print the configuration schema
    Schema,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Steady(io) => {
            let config = load(&io)?;
            let record = run::steady_record(&config, &[]);
            let columns = record.columns();
            let values: Vec<output::Value> = record.fields.into_iter().map(|(_, v)| v).collect();
            with_writer(&io, &config, |writer| {
                writer.write_row(&columns, &values)?;
                Ok(())
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Evolve(io) => {
            let config = load(&io)?;
            let (columns, rows) = run::trajectory_records(&config)?;
            with_writer(&io, &config, |writer| {
                for row in &rows {
                    writer.write_row(&columns, row)?;
                }
                Ok(())
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { io, workers } => {
            let config = load(&io)?;
            let n = with_writer(&io, &config, |writer| {
                sweep::run_sweep(&config, workers, writer)
            })?;
            eprintln!("sweep: {n} grid points");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            list,
            only,
            seed,
            mutate,
        } => {
            if list {
                for name in CHECK_NAMES {
                    print_line(name)?;
                }
                return Ok(ExitCode::SUCCESS);
            }
            let opts = VerifyOptions {
                seed,
                mutation: mutate,
            };
            let outcomes = match only {
                Some(name) => {
                    vec![run_check(&name, &opts)
                        .with_context(|| format!("unknown check '{name}'; see `verify --list`"))?]
                }
                None => run_all(&opts),
            };
            let mut all_passed = true;
            for outcome in &outcomes {
                print_line(&outcome.summary_line())?;
                all_passed &= outcome.passed;
            }
            if all_passed {
                print_line(&format!("verify: all {} checks passed", outcomes.len()))?;
                Ok(ExitCode::SUCCESS)
            } else {
                print_line("verify: FAILURES present")?;
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Schema => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(config::SCHEMA_TEXT.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn print_line(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}")?;
    Ok(())
}

fn load(io: &IoArgs) -> Result<RunConfig> {
    let config = RunConfig::from_path(&io.config)?;
    if io.print_config {
        eprintln!("{}", serde_json::to_string_pretty(&config)?);
    }
    if let Ok(problem) = run::Problem::build(&config) {
        if let Some(warning) = problem.warning(&config) {
            eprintln!("warning: {warning}");
        }
    }
    Ok(config)
}

fn effective_format(io: &IoArgs, config: &RunConfig) -> OutputFormat {
    io.format
        .or_else(|| config.output.as_ref().map(|o| o.format))
        .unwrap_or_default()
}

fn with_writer<T>(
    io: &IoArgs,
    config: &RunConfig,
    body: impl FnOnce(&mut RowWriter<Box<dyn Write>>) -> Result<T>,
) -> Result<T> {
    let format = effective_format(io, config);
    let path = io.out.clone().or_else(|| {
        config
            .output
            .as_ref()
            .and_then(|o| o.path.clone().map(PathBuf::from))
    });
    let sink: Box<dyn Write> = match &path {
        Some(p) => {
            Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(std::io::stdout()),
    };
    let mut writer = match format {
        OutputFormat::Csv => RowWriter::Csv(CsvWriter::new(sink)),
        OutputFormat::Json => RowWriter::Json(JsonWriter::new(sink)),
    };
    let result = body(&mut writer)?;
    writer.finish()?;
    Ok(result)
}
