//! `phspec`: bound states of the pseudoharmonic diatomic potential
//! V(r) = V0 (r/r0 - r0/r)^2, in closed form and cross-validated numerically.

use clap::{Parser, Subcommand};
use pseudoharmonic::cli::{self, CliError, Format};
use pseudoharmonic::oracle::DEFAULT_GRID_POINTS;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "phspec",
    version,
    about = "Ro-vibrational bound states of the pseudoharmonic diatomic potential",
    long_about = "Closed-form energies and radial wavefunctions of \
                  V(r) = V0 (r/r0 - r0/r)^2 for diatomic molecules, with an \
                  independent finite-difference/Numerov cross-check and \
                  parameter back-fitting from observed levels."
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form spectrum E(n, l) of one registry molecule
    Spectrum {
        /// Molecule name from the registry (e.g. N2)
        molecule: String,
        /// Largest radial quantum number n
        #[arg(long, default_value_t = 5)]
        nmax: u32,
        /// Cap on l (default: l runs up to n)
        #[arg(long)]
        lmax: Option<u32>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Parameter file replacing the built-in registry
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// The four-molecule reference energy table (N2, CO, NO, CH)
    Table1 {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Radial wavefunction samples (r, R, r^2 R^2, V_eff) for plotting
    Wavefunction {
        molecule: String,
        /// Radial quantum number (number of nodes)
        n: u32,
        /// Angular momentum
        l: u32,
        /// Number of radial samples
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Cross-check closed-form energies against the numeric eigensolvers
    Validate {
        /// Registry molecule, or "natural" for the dimensionless test case
        molecule: String,
        /// Check all states n <= nmax, l <= n
        #[arg(long, default_value_t = 5)]
        nmax: u32,
        /// Largest allowed |E_closed - E_numeric| in eV
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Interior grid points of the coarsest grid in the h, h/2, h/4 ladder
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Fit V0 and r0 from an observed-level file at fixed reduced mass
    Fit {
        /// File of `n,l,energy_eV` lines (# comments allowed)
        observations: PathBuf,
        /// Reduced mass in amu (not fitted; the spectrum cannot determine it)
        #[arg(long)]
        mu: f64,
        /// Name for the emitted registry block
        #[arg(long, default_value = "FIT")]
        name: String,
    },
}

fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::Spectrum { molecule, nmax, lmax, format, registry } => {
            let records = cli::registry_from_path(registry.as_deref())?;
            cli::run_spectrum(&records, &molecule, nmax, lmax, format)
        }
        Command::Table1 { format, registry } => {
            let records = cli::registry_from_path(registry.as_deref())?;
            cli::run_table1(&records, format)
        }
        Command::Wavefunction { molecule, n, l, points, format, registry } => {
            let records = cli::registry_from_path(registry.as_deref())?;
            cli::run_wavefunction(&records, &molecule, n, l, points, format)
        }
        Command::Validate { molecule, nmax, tolerance, grid_points, format, registry } => {
            let records = cli::registry_from_path(registry.as_deref())?;
            cli::run_validate(&records, &molecule, nmax, tolerance, grid_points, format)
        }
        Command::Fit { observations, mu, name } => {
            let levels = cli::observations_from_path(&observations)?;
            cli::run_fit(&levels, &observations.display().to_string(), mu, &name)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprint!("error: {err}");
            if !err.to_string().ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
