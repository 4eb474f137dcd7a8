use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use leafspec::cli::{self, report, CliError};

#[derive(Parser)]
#[command(name = "leafspec", version, about = "Basic spectra and isospectrality checks for foliations with interval leaf spaces")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (overridden by LEAFSPEC_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all spectra and verdicts of a scenario and write the report.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigenvalues of one presentation along a doubling grid ladder.
    Converge {
        scenario: PathBuf,
        name: String,
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000")]
        ladder: Vec<usize>,
        #[arg(short = 'k', default_value_t = 5)]
        k: usize,
    },
    /// Extrapolated basic spectrum of one presentation.
    Spectrum {
        scenario: PathBuf,
        name: String,
        #[arg(short = 'N', default_value_t = 2000)]
        n: usize,
        #[arg(short = 'k', default_value_t = 10)]
        k: usize,
    },
}

fn dispatch(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Run { scenario, out } => {
            let outcome = cli::run(&scenario, &out, args.jobs);
            let report = match &outcome {
                Ok(r) => Some(r.verdicts.len()),
                Err(CliError::Inconsistent { .. }) => None,
                Err(_) => return outcome.map(|_| ()),
            };
            if let Some(n) = report {
                println!("verdicts: {n}, outputs in {}", out.display());
            }
            outcome.map(|_| ())
        }
        Command::Converge {
            scenario,
            name,
            ladder,
            k,
        } => {
            let study = cli::converge(&scenario, &name, &ladder, k, args.jobs)?;
            print!("{}", report::convergence_csv(&[study]));
            Ok(())
        }
        Command::Spectrum { scenario, name, n, k } => {
            let s = cli::spectrum(&scenario, &name, n, k, args.jobs)?;
            print!("{}", report::spectra_csv(&[s]));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("leafspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
