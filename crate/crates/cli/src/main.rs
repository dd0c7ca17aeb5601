use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skew_ergodic_cli::config::{ExperimentConfig, Kind};
use skew_ergodic_cli::record::ResultRecord;
use skew_ergodic_cli::{run, sweep, verify, with_threads, CliError};

#[derive(Parser)]
#[command(name = "skewerg", version, about = "Ergodic averages of skew products over circle rotations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by the config.
    Run(Common),
    /// Run the experiment once per value of its [sweep] axis.
    Sweep(Common),
    /// Compare terminal-checkpoint errors with the tolerance policy.
    Verify(Common),
    /// Evaluate oracle limits for the configured observable.
    Limits(Common),
    /// Run a check-growth or check-c2 experiment and apply its criterion.
    Check(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn load(c: &Common) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(&c.config).map_err(|e| CliError::Config(format!("{}: {e}", c.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = c.seed {
        cfg.master_seed = seed;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn emit(record: &ResultRecord, cfg: &ExperimentConfig, out: &Option<PathBuf>, to_stdout: bool) -> Result<(), CliError> {
    let path = out.clone().or(cfg.output.as_ref().map(PathBuf::from));
    match path {
        Some(p) => fs::write(&p, record.to_bytes()).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None if to_stdout => std::io::stdout().write_all(&record.to_bytes()).map_err(|e| CliError::Io(e.to_string())),
        None => Ok(()),
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run(c) => {
            let cfg = load(&c)?;
            let record = with_threads(c.threads, || run::execute(&cfg))??;
            emit(&record, &cfg, &c.out, true)?;
            Ok(0)
        }
        Command::Sweep(c) => {
            let cfg = load(&c)?;
            let record = with_threads(c.threads, || sweep::sweep(&cfg))??;
            emit(&record, &cfg, &c.out, true)?;
            Ok(0)
        }
        Command::Limits(c) => {
            let mut cfg = load(&c)?;
            cfg.kind = Kind::Limits;
            cfg.validate()?;
            let record = with_threads(c.threads, || run::execute(&cfg))??;
            emit(&record, &cfg, &c.out, true)?;
            Ok(0)
        }
        Command::Check(c) => {
            let cfg = load(&c)?;
            let (record, outcome) = with_threads(c.threads, || run::check(&cfg))??;
            emit(&record, &cfg, &c.out, false)?;
            println!("check: {} ({})", if outcome.passed { "PASS" } else { "FAIL" }, outcome.summary);
            Ok(if outcome.passed { 0 } else { 1 })
        }
        Command::Verify(c) => {
            let cfg = load(&c)?;
            let report = with_threads(c.threads, || verify::verify(&cfg, c.tolerance))??;
            if let Some(record) = &report.record {
                emit(record, &cfg, &c.out, false)?;
            }
            print!("{}", report.render());
            Ok(report.verdict.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("skewerg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
