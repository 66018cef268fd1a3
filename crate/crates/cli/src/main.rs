//! `septensor` command-line tool.
//!
//! The environment variable `SEPTENSOR_SEEDLESS` is ignored: every
//! computation is deterministic and uses no random numbers.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::LevelFilter;

use septensor_cli::commands::{self, summary_line};
use septensor_cli::config::{DEFAULT_OUT_DIR, RunArgs, RunConfig};
use septensor_core::{Error, builtin_registry};

#[derive(Parser)]
#[command(name = "septensor", version, about = "Separable low-rank approximation of bivariate functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the interpolant, decompose it and write all artifacts
    Decompose(RunArgs),
    /// Check every a-priori bound; exits 3 if any fails
    Validate(RunArgs),
    /// Run the reference experiment and write the data behind every figure
    ReproducePaper {
        #[arg(long, default_value = DEFAULT_OUT_DIR)]
        out: PathBuf,
        #[arg(long)]
        verbose: bool,
    },
    /// List builtin functions
    Builtins,
}

fn init_logging(verbose: bool) {
    let level = if verbose { LevelFilter::Info } else { LevelFilter::Warn };
    env_logger::Builder::new()
        .filter_level(level)
        .format(|buf, record| writeln!(buf, "{}", record.args()))
        .target(env_logger::Target::Stderr)
        .init();
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Decompose(args) => {
            let cfg = RunConfig::from_args(&args)?;
            init_logging(cfg.verbose);
            let p = commands::cmd_decompose(&cfg)?;
            println!("{}", summary_line(&p));
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            let cfg = RunConfig::from_args(&args)?;
            init_logging(cfg.verbose);
            let report = commands::cmd_validate(&cfg)?;
            let failures: Vec<_> = report.failures().collect();
            if failures.is_empty() {
                println!("all {} checks pass", report.bound_checks.len());
                Ok(ExitCode::SUCCESS)
            } else {
                for c in failures {
                    let rhs = c.rhs.map_or("-".to_string(), |v| v.to_string());
                    println!("FAIL {} K={:?} lhs={} rhs={} {}", c.name, c.rank, c.lhs, rhs, c.detail);
                }
                Ok(ExitCode::from(3))
            }
        }
        Command::ReproducePaper { out, verbose } => {
            init_logging(verbose);
            let s = commands::cmd_reproduce_paper(&out)?;
            println!(
                "rank={} relerr={} bounds={}",
                s.k, s.rank2_rel_err, if s.all_bounds_pass { "pass" } else { "fail" }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Builtins => {
            for name in builtin_registry() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
