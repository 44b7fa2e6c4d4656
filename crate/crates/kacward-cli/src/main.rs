//! Command-line front end: graph validation, oracle verification suites,
//! regime scans and free-energy sweeps with CSV output.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use kacward::ising::BoundaryCondition;
use kacward::regimes::Side;

mod common;
mod free_energy;
mod scan;
mod validate;
mod verify;

#[derive(Parser)]
#[command(
    name = "kacward",
    version,
    about = "Kac-Ward machinery for the planar Ising model: validation, verification, regime scans and free-energy sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    High,
    Low,
}

#[derive(Clone, Copy, ValueEnum)]
enum BcArg {
    Free,
    Plus,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph file: embedding, faces, degrees, dual consistency.
    Validate {
        /// Graph file in the plain-text format.
        file: PathBuf,
        /// Fail when the file carries no dual_vertices section.
        #[arg(long)]
        need_dual: bool,
    },
    /// Run the oracle identity suites with seeded randomness.
    Verify {
        /// Graph file in the plain-text format.
        file: PathBuf,
        /// RNG seed; identical seeds give byte-identical reports.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random draws per identity.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Relative tolerance for the partition-function identities.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Scan a complex beta grid for regime membership, envelopes, and
    /// certified norm bounds.
    ScanRegimes {
        /// Lower coupling bound m.
        #[arg(long = "m")]
        lower: f64,
        /// Upper coupling bound M.
        #[arg(long = "M")]
        upper: f64,
        /// Real-axis grid start:end:count.
        #[arg(long, allow_hyphen_values = true)]
        re: String,
        /// Imaginary-axis grid start:end:count.
        #[arg(long, allow_hyphen_values = true)]
        im: String,
        /// Graph file; enables the certified bound and exact radius columns.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Coupling spec: zinvariant, const:J or file:PATH.
        #[arg(long)]
        couplings: Option<String>,
        /// Which weight system the certified bound targets.
        #[arg(long, value_enum, default_value_t = SideArg::High)]
        side: SideArg,
        /// CSV output path (stdout when absent); a .meta.json sidecar is
        /// written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep free energy densities over a beta grid and a graph family.
    FreeEnergy {
        /// square, tri, hex or file.
        #[arg(long)]
        graph_family: String,
        /// Largest patch size for the generator families.
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Boundary condition.
        #[arg(long, value_enum, default_value_t = BcArg::Free)]
        bc: BcArg,
        /// Coupling spec: zinvariant, const:J or file:PATH.
        #[arg(long, default_value = "zinvariant")]
        couplings: String,
        /// Real-axis grid start:end:count.
        #[arg(long, allow_hyphen_values = true)]
        re: String,
        /// Imaginary-axis grid start:end:count.
        #[arg(long, allow_hyphen_values = true)]
        im: String,
        /// Graph file for --graph-family file.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// CSV output path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace-series tail tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { file, need_dual } => validate::run(&file, need_dual),
        Command::Verify {
            file,
            seed,
            trials,
            tol,
        } => verify::run(&file, seed, trials, tol),
        Command::ScanRegimes {
            lower,
            upper,
            re,
            im,
            graph,
            couplings,
            side,
            out,
        } => scan::run(scan::ScanArgs {
            lower,
            upper,
            re: &re,
            im: &im,
            graph: graph.as_deref(),
            couplings: couplings.as_deref(),
            side: match side {
                SideArg::High => Side::High,
                SideArg::Low => Side::Low,
            },
            out: out.as_deref(),
        }),
        Command::FreeEnergy {
            graph_family,
            n_max,
            bc,
            couplings,
            re,
            im,
            graph,
            out,
            tol,
        } => free_energy::run(free_energy::FreeEnergyArgs {
            family: &graph_family,
            n_max,
            bc: match bc {
                BcArg::Free => BoundaryCondition::Free,
                BcArg::Plus => BoundaryCondition::Plus,
            },
            couplings: &couplings,
            re: &re,
            im: &im,
            graph: graph.as_deref(),
            out: out.as_deref(),
            tol,
        }),
    };
    std::process::exit(code);
}
