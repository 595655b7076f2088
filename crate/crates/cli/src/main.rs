use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use deltashell_cli::commands::{cmd_check_ls, cmd_dispersion, cmd_oracle, cmd_spectrum, cmd_verify};
use deltashell_cli::{output_dir, write_outcome, CliError, Outcome, ProblemConfig, RunFlags};

#[derive(Parser)]
#[command(name = "deltashell", version, about = "Spectral checks for Dirac operators with delta-shell interactions")]
struct Cli {
    /// Output directory (default: $DELTASHELL_OUT, then ./deltashell-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compute the spectrum even when the LS checks fail.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized sampling in `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, hide = true)]
    tamper_alpha2: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algebraic identity suite.
    Verify,
    /// Local, uniform and parameter-dependent LS checks.
    CheckLs { config: PathBuf },
    /// Essential spectrum with provenance.
    Spectrum { config: PathBuf },
    /// Dispersion tables of the shell limit problems.
    Dispersion { config: PathBuf },
    /// Run the finite-difference battery and compare with the baseline.
    Oracle { config: PathBuf },
}

fn run(cli: &Cli) -> Result<(Outcome, PathBuf), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let flags = RunFlags { force: cli.force, seed: cli.seed, tamper_alpha2: cli.tamper_alpha2 };
    let (outcome, cfg) = match &cli.command {
        Command::Verify => (cmd_verify(&flags), None),
        Command::CheckLs { config } | Command::Spectrum { config } | Command::Dispersion { config } | Command::Oracle { config } => {
            let cfg = ProblemConfig::load(config)?;
            let outcome = match &cli.command {
                Command::CheckLs { .. } => cmd_check_ls(&cfg)?,
                Command::Spectrum { .. } => cmd_spectrum(&cfg, &flags)?,
                Command::Dispersion { .. } => cmd_dispersion(&cfg)?,
                _ => cmd_oracle(&cfg)?,
            };
            (outcome, Some(cfg))
        }
    };
    Ok((outcome, output_dir(cli.out.as_deref(), cfg.as_ref())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, dir)) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            match write_outcome(&dir, &outcome) {
                Ok(paths) => {
                    for p in paths {
                        println!("wrote {}", p.display());
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code() as u8);
                }
            }
            println!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
