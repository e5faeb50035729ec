//! `had2lin`: construct, evaluate, lift and verify Hadamard-to-2Lin(2)
//! gadgets with exact rational arithmetic.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use had2lin::scalar::parse_rational;
use had2lin::soundness::Mode;
use had2lin::Rational;

use output::Outcome;

#[derive(Parser, Debug)]
#[command(name = "had2lin", version, about, propagate_version = true)]
struct Cli {
    /// Worker threads for per-placement work. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List edge orbits (or placement classes) of arity K.
    Orbits {
        #[arg(long)]
        k: u8,
        /// List placement classes instead of edge orbits.
        #[arg(long)]
        placements: bool,
    },
    /// Build the gadget of the given completeness with least soundness.
    Construct {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_parser = parse_fraction)]
        completeness: Rational,
        #[command(flatten)]
        files: Outputs,
    },
    /// Among gadgets of best ratio (1 - s)/(1 - c), build the one of least completeness.
    Extremal {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        files: Outputs,
    },
    /// Compute rs or rsinf of a gadget file and optionally save the witness.
    Evaluate {
        #[arg(long)]
        gadget: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        /// Where to write the flow witness.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Check a gadget and flow witness; exits 0 only when accepted.
    Verify {
        #[arg(long)]
        gadget: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
    },
    /// Tabulate s(c) of infinity-relaxed gadgets as CSV.
    Curve {
        #[arg(long, default_value_t = 4)]
        k: u8,
        #[arg(long, value_parser = parse_fraction, default_value = "1/512")]
        step: Rational,
        /// Allowed edge orbits; arity 4 defaults to the shipped list.
        #[arg(long)]
        restrict: Option<PathBuf>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a gadget (and its flow witness) to a higher arity.
    Lift {
        #[arg(long)]
        gadget: PathBuf,
        #[arg(long = "to-k")]
        to_k: u8,
        /// Witness to lift; computed in --mode when absent.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, value_parser = parse_mode, default_value = "rsinf")]
        mode: Mode,
        /// Report the total leakage of the lifted flow.
        #[arg(long)]
        measure_leak: bool,
        /// Placements sampled when the leakage cannot be computed exactly.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also compute rs of the lifted gadget.
        #[arg(long)]
        evaluate: bool,
        /// Where to write the lifted gadget.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact soundness of an arity 2 gadget by enumeration.
    TrueSoundness {
        #[arg(long)]
        gadget: PathBuf,
    },
    /// Write the joint construction LP in LP file format.
    ExportLp {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_parser = parse_fraction)]
        completeness: Rational,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Target {
    #[arg(long)]
    k: u8,
    #[arg(long, value_parser = parse_mode)]
    mode: Mode,
    /// Allowed edge orbits, one `<f1> <f2>` pair per line.
    #[arg(long)]
    restrict: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Outputs {
    /// Where to write the gadget.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the flow witness.
    #[arg(long)]
    witness: Option<PathBuf>,
}

fn parse_fraction(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("expected a fraction p/q, got {s:?}"))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    use commands::*;
    match cli.command {
        Command::Orbits { k, placements } => orbits(k, placements),
        Command::Construct { target, completeness, files } => {
            construct(target.k, target.mode, target.restrict.as_deref(), &completeness, &files.out, &files.witness)
        }
        Command::Extremal { target, files } => {
            extremal(target.k, target.mode, target.restrict.as_deref(), &files.out, &files.witness)
        }
        Command::Evaluate { gadget, mode, witness } => evaluate(&gadget, mode, witness.as_deref()),
        Command::Verify { gadget, witness, mode } => verify(&gadget, &witness, mode),
        Command::Curve { k, step, restrict, out } => curve(k, &step, restrict.as_deref(), out.as_deref()),
        Command::Lift { gadget, to_k, witness, mode, measure_leak, samples, seed, evaluate, out } => lift(LiftArgs {
            gadget: &gadget,
            to_k,
            witness: witness.as_deref(),
            mode,
            measure_leak,
            samples,
            seed,
            evaluate,
            out: out.as_deref(),
        }),
        Command::TrueSoundness { gadget } => true_soundness(&gadget),
        Command::ExportLp { target, completeness, out } => {
            export_lp(target.k, target.mode, target.restrict.as_deref(), &completeness, &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global() {
        log::warn!("could not size the thread pool: {e}");
    }
    let format = cli.format;
    match run(cli) {
        Ok(outcome) => {
            outcome.print(format);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
