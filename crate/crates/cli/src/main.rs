mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use input::InputArgs;

#[derive(Parser, Debug)]
#[command(name = "distgap", version, about = "Spectral gap and Cheeger constant of the normalized distance Laplacian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Emit JSON instead of the human-readable report
    #[arg(long)]
    pub json: bool,
    /// Tolerance for bound comparisons
    #[arg(long, default_value = "1e-9")]
    pub tol: f64,
    /// Eigensolver convergence tolerance (relative off-diagonal norm)
    #[arg(long, default_value = "1e-12")]
    pub eig_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct CheegerArgs {
    /// Largest n for exhaustive Cheeger enumeration
    #[arg(long, default_value_t = distgap::cheeger::DEFAULT_CAP)]
    pub cheeger_cap: usize,
    /// Skip the Cheeger computation
    #[arg(long)]
    pub skip_cheeger: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectrum of the normalized distance Laplacian with bound checks
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Exact Cheeger constant by exhaustive cut enumeration
    Cheeger {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = distgap::cheeger::DEFAULT_CAP)]
        cheeger_cap: usize,
    },
    /// Closed-form spectrum of a Cayley graph on a finite abelian group
    Cayley(commands::CayleyArgs),
    /// Randomized checks of the certificate inequalities (JSON report)
    Certify {
        #[arg(long, env = "DISTGAP_SEED", default_value_t = 0)]
        seed: u64,
        /// Random instances per certificate
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Evaluate a graph or metric family and persist the records
    Scan(commands::ScanArgs),
    /// Every check on one graph: spectrum, Cheeger, equality case, certificates
    VerifyAll {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cheeger: CheegerArgs,
        #[arg(long, env = "DISTGAP_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Spectrum { input, common } => commands::spectrum(&input, &common),
        Command::Cheeger { input, common, cheeger_cap } => commands::cheeger(&input, &common, cheeger_cap),
        Command::Cayley(args) => commands::cayley(&args),
        Command::Certify { seed, trials, out } => commands::certify(seed, trials, out.as_deref()),
        Command::Scan(args) => commands::scan(&args),
        Command::VerifyAll { input, common, cheeger, seed } => commands::verify_all(&input, &common, &cheeger, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if let distgap::Error::CapExceeded { .. } = e {
                eprintln!("hint: raise --cheeger-cap or pass --skip-cheeger");
            }
            ExitCode::from(distgap::harness::EXIT_INPUT as u8)
        }
    }
}
