mod commands;
mod numeric;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact verification and classification of 4D-consistent lattice maps.
#[derive(Debug, Parser)]
#[command(name = "latmap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check T_l(T_k x_ij) = T_k(T_l x_ij) degree by degree for a map family.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write the Darboux series truncated at --order.
    ExpandDarboux {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Audit the quadratic conditions, report per-order kernel dimensions,
    /// and classify an input family if one is given.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Solve the per-order linear systems up to --order.
    Kernel {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Include the assembled matrices and right-hand sides in the report.
        #[arg(long)]
        dump_matrix: bool,
    },
    /// Conjugate a map family by a gauge transformation.
    GaugeApply {
        #[command(flatten)]
        input: InputArgs,
        /// Gauge description: {"scalings":{"12":"c"},"point":{"12":{"2":"b"}}}
        #[arg(long)]
        gauge: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate a closed-form map on random states and measure the residuals.
    NumericCheck {
        #[arg(long, value_enum)]
        map: MapArg,
        #[arg(long, value_enum, default_value_t = Mode::Float)]
        mode: Mode,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest accepted relative residual in float mode.
        #[arg(long, default_value_t = 1e-10, value_parser = positive_float)]
        tolerance: f64,
        /// Use the all-zero state for every trial.
        #[arg(long)]
        zero_state: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Map family file.
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,
    /// Map family file (alternative to the positional argument).
    #[arg(long, conflicts_with = "file")]
    input: Option<PathBuf>,
}

impl InputArgs {
    fn path(&self) -> Option<&PathBuf> {
        self.file.as_ref().or(self.input.as_ref())
    }
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Truncation order.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(2..))]
    order: u32,
    /// Where to write the report or family file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Print the JSON report instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MapArg {
    Darboux,
    StarTriangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Ok,
    Inconsistent,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { input, common } => commands::verify(input.path(), &common),
        Command::ExpandDarboux { common } => commands::expand_darboux(&common),
        Command::Classify { input, common } => commands::classify(input.path(), &common),
        Command::Kernel {
            input,
            common,
            dump_matrix,
        } => commands::kernel(input.path(), &common, dump_matrix),
        Command::GaugeApply { input, gauge, common } => commands::gauge_apply(input.path(), &gauge, &common),
        Command::NumericCheck {
            map,
            mode,
            trials,
            seed,
            tolerance,
            zero_state,
            common,
        } => numeric::run(
            &numeric::Settings {
                map,
                mode,
                trials,
                seed,
                tolerance,
                zero_state,
            },
            &common,
        ),
    };
    match result {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Inconsistent) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
