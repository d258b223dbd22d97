use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

/// A failed run: exit status plus a one-line diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 2, message }
    }
}

impl From<dirac_tori::Error> for Failure {
    fn from(e: dirac_tori::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "dirac-tori", version, about = "Construct, verify and classify Dirac tori")]
struct Cli {
    /// JSON job configuration; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct LatticeArgs {
    /// Modulus: Γ = 2π(1, τ). Accepts "i", "re,im" or "a+bi".
    #[arg(long, conflicts_with_all = ["gamma1", "lattice"])]
    pub tau: Option<String>,
    #[arg(long, requires = "gamma2", conflicts_with = "lattice")]
    pub gamma1: Option<String>,
    #[arg(long, requires = "gamma1")]
    pub gamma2: Option<String>,
    /// Lattice JSON, inline or as a file path.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Spin structure "s1,s2" with entries 0 or 1/2.
    #[arg(long)]
    pub spin: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ToleranceArgs {
    #[arg(long)]
    pub tol_pde: Option<f64>,
    #[arg(long)]
    pub tol_closedness: Option<f64>,
    #[arg(long)]
    pub tol_period: Option<f64>,
    #[arg(long)]
    pub tol_conformal: Option<f64>,
    #[arg(long)]
    pub tol_half_density: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the dual basis and Γ′, or the table of eigenvalues with many frequencies.
    Spectrum {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Eigenvalue ("sqrt5", "2.5"); omit or "auto-min" for the table.
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        mu_max: Option<f64>,
        #[arg(long)]
        min_card: Option<usize>,
    },
    /// Build a closed torus, verify it and write OBJ + JSON artifacts.
    Synth {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        mu_max: Option<f64>,
        /// Three picks "m,n;m,n;m,n" or "auto".
        #[arg(long)]
        picks: Option<String>,
        /// Complex seed, e.g. "1" or "0-0.5i".
        #[arg(long, allow_hyphen_values = true)]
        seed_scale: Option<String>,
        /// Use the worked square-lattice example with its fixed coefficients.
        #[arg(long, conflicts_with_all = ["tau", "gamma1", "lattice", "mu", "picks", "seed_scale", "spin"])]
        example_paper: bool,
        #[arg(short = 'n', long)]
        n: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Verify an immersion JSON file.
    Verify {
        path: PathBuf,
        #[arg(short = 'n', long)]
        n: Option<usize>,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Decide existence of Dirac tori for a conformal class, exactly.
    Classify {
        /// τ² of the rectangular lattice (1, iτ), as an exact scalar.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["tau", "gamma1"])]
        rect_tau_sq: Option<String>,
        /// Squarefree d of the field Q(√d) the inputs live in.
        #[arg(short = 'd', long)]
        d: Option<u64>,
        /// Exact modulus, "i" or "re,im" with exact scalars.
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, requires = "gamma2")]
        gamma1: Option<String>,
        #[arg(long, requires = "gamma1")]
        gamma2: Option<String>,
        /// Treat the generators as Γ* instead of Γ.
        #[arg(long)]
        dual: bool,
        #[arg(long, default_value_t = 4)]
        bound: u64,
    },
    /// Write the OBJ mesh of an immersion JSON file.
    Export {
        path: PathBuf,
        #[arg(short = 'o', long)]
        out: PathBuf,
        #[arg(short = 'n', long)]
        n: Option<usize>,
        #[arg(long)]
        force: bool,
    },
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = match &cli.config {
        Some(p) => config::JobConfig::load(p)?,
        None => config::JobConfig::default(),
    };
    match cli.command {
        Command::Spectrum { lattice, mu, mu_max, min_card } => commands::spectrum(&cfg, &lattice, mu, mu_max, min_card),
        Command::Synth { lattice, mu, mu_max, picks, seed_scale, example_paper, n, out_dir, force, tol } => {
            let opts = commands::SynthOptions { lattice, mu, mu_max, picks, seed_scale, example_paper, n, out_dir, force, tol };
            commands::synth(&cfg, &opts)
        }
        Command::Verify { path, n, tol } => commands::verify(&cfg, &path, n, &tol),
        Command::Classify { rect_tau_sq, d, tau, gamma1, gamma2, dual, bound } => {
            commands::classify(rect_tau_sq, d, tau, gamma1.zip(gamma2), dual, bound)
        }
        Command::Export { path, out, n, force } => commands::export(&cfg, &path, &out, n, force),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
