mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spin-aware uncertainty bounds for fermion systems and neutral atoms.
#[derive(Parser, Debug)]
#[command(name = "pauli-bounds", version, about)]
struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the bound constants for one parameter set.
    Bounds(BoundsArgs),
    /// Compare analytic model systems with their gridded evaluation.
    Model(ModelArgs),
    /// Hartree-Fock report for a single atom.
    Atom(AtomArgs),
    /// Reports for a range of atoms, e.g. `1..103`.
    Scan(ScanArgs),
    /// Check the inequality chain for densities read from files.
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, default_value_t = 3.0)]
    d: f64,
    #[arg(long = "N", default_value_t = 1)]
    n: u64,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    m: u32,
    /// Lieb-Thirring constant, between 1 and 2.
    #[arg(long = "c-d", default_value_t = 1.0)]
    c_d: f64,
    /// Emit CSV instead of an aligned table.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKindArg {
    Hydrogen,
    Oscillator,
}

#[derive(Args, Debug)]
struct ModelArgs {
    kind: ModelKindArg,
    /// Nuclear charge of the hydrogenic state.
    #[arg(long, default_value_t = 1.0)]
    z: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Oscillator dimension.
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Fill oscillator shells 0..=M and print the bound ratios.
    #[arg(long)]
    fill: Option<u32>,
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// Write `<prefix>_position.dat` and `<prefix>_momentum.dat`.
    #[arg(long)]
    write_density: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExchangeArg {
    Hf,
    Slater,
}

/// Settings shared by `atom` and `scan`; each overrides `--config`.
#[derive(Args, Debug, Default)]
struct RunArgs {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long = "c-d")]
    c_d: Option<f64>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    exchange: Option<ExchangeArg>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Directory receiving scan.csv, fig1.dat and fig2.dat.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AtomArgs {
    z: u32,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Inclusive range `first..last`.
    range: String,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// Position density file.
    file: PathBuf,
    /// Momentum density file.
    #[arg(long)]
    momentum: Option<PathBuf>,
    /// `⟨p²⟩`, overriding the value from the momentum density.
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long = "c-d", default_value_t = 1.0)]
    c_d: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    m: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_USAGE)
        }
    }
}
