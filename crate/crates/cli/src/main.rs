//! `cantor`: exact-rational experiments on Cantor space.
//!
//! Output is one `key=value` record per line (`--format raw`, the default)
//! or aligned columns (`--format table`). Exit status is 0 when every check
//! passes, 1 when a check fails or a computation errors, 2 on bad input.

mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args as ClapArgs, Parser, Subcommand};

use commands::{AvoiderConfig, CliError, MartingaleArgs, SllnArgs, TraceConfig};
use report::{Format, Report};

#[derive(Parser)]
#[command(name = "cantor", version, about = "Exact-rational measures, machines and transport on Cantor space")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapArgs)]
struct Common {
    /// Search, build or check depth. Each command has its own default.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    /// Bound on input bits read or on certificate search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: Option<u64>,
    /// Number of seeded samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// File for the full ledger or plan.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Raw)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Exact additivity of a measure at every node above the depth.
    Additivity {
        #[arg(required = true, num_args = 1..)]
        measure: Vec<String>,
    },
    /// Enclosure of the pushforward mass of a cylinder: MACHINE MEASURE WORD.
    Pushforward {
        #[arg(required = true, num_args = 1..)]
        args: Vec<String>,
    },
    /// Inputs decided in or out of a cylinder: MACHINE MEASURE WORD.
    Preimage {
        #[arg(required = true, num_args = 1..)]
        args: Vec<String>,
    },
    /// Builds and verifies a transport plan, then certifies avoidance:
    /// MU NUPRIME X0.
    Avoider {
        #[arg(required = true, num_args = 1..)]
        args: Vec<String>,
    },
    /// Follows points through the transport stages: MU NUPRIME X0.
    Trace {
        #[arg(required = true, num_args = 1..)]
        args: Vec<String>,
        /// Trace this point instead of seeded samples.
        #[arg(long)]
        omega: Option<String>,
    },
    /// First depth at which the capital ratio reaches a threshold.
    Martingale {
        #[arg(long, num_args = 1.., required = true)]
        nu: Vec<String>,
        #[arg(long, num_args = 1.., required = true)]
        mu: Vec<String>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        threshold: String,
        /// Print the whole ratio trace.
        #[arg(long)]
        show_trace: bool,
        /// Oscillation over trailing windows of this size.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Stage value of a conditional measure.
    Conditional {
        /// A product measure.
        #[arg(long, num_args = 1.., required = true)]
        mu: Vec<String>,
        #[arg(long)]
        y: String,
        #[arg(long)]
        sigma: String,
    },
    /// Running means of a machine's output bits.
    Slln {
        #[arg(long, num_args = 1.., required = true)]
        machine: Vec<String>,
        #[arg(long, conflicts_with = "x_random", required_unless_present = "x_random")]
        x: Option<String>,
        /// Seeded pseudo-random input.
        #[arg(long)]
        x_random: bool,
        #[arg(short = 'n', default_value_t = 1000)]
        count: usize,
    },
    /// Mutual independence of a sequence-set family and fairness of its map.
    Independence {
        #[arg(required = true, num_args = 1..)]
        family: Vec<String>,
    },
    /// Relative density of a clopen set along a point.
    Density {
        #[arg(required = true, num_args = 1..)]
        measure: Vec<String>,
        #[arg(long, num_args = 1.., required = true)]
        set: Vec<String>,
        #[arg(long)]
        x: String,
        #[arg(short = 'n', default_value_t = 10)]
        count: usize,
    },
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let c = &cli.common;
    let depth = |default: usize| c.depth.map_or(default, |d| d as usize);
    let fuel = |default: usize| c.fuel.map_or(default, |f| f as usize);
    let out = c.out.as_deref();
    match &cli.command {
        Command::Additivity { measure } => commands::additivity(measure, depth(12), out),
        Command::Pushforward { args } => commands::pushforward(args, depth(12)),
        Command::Preimage { args } => commands::preimage(args, depth(8)),
        Command::Avoider { args } => commands::avoider(
            args,
            AvoiderConfig { depth: depth(8), fuel: fuel(64), samples: c.samples.unwrap_or(0), seed: c.seed, out },
        ),
        Command::Trace { args, omega } => commands::trace(
            args,
            omega.as_deref(),
            TraceConfig { stages: depth(4), samples: c.samples.unwrap_or(1), seed: c.seed },
        ),
        Command::Martingale { nu, mu, x, threshold, show_trace, window } => commands::martingale(MartingaleArgs {
            nu: &nu.join(" "),
            mu: &mu.join(" "),
            x,
            threshold,
            depth: depth(64),
            window: *window,
            show_trace: *show_trace,
        }),
        Command::Conditional { mu, y, sigma } => {
            commands::conditional(&mu.join(" "), y, sigma, c.depth.map(|d| d as usize))
        }
        Command::Slln { machine, x, x_random: _, count } => commands::slln(SllnArgs {
            machine: &machine.join(" "),
            x: x.as_deref(),
            count: *count,
            fuel: fuel(8 * count),
            seed: c.seed,
        }),
        Command::Independence { family } => commands::independence(family, c.depth.map(|d| d as usize)),
        Command::Density { measure, set, x, count } => {
            commands::density(measure, &set.join(" "), x, *count, depth(*count).max(*count))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.common.format;
    match run(cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(report.render(format).as_bytes());
            for n in &report.notes {
                eprintln!("{n}");
            }
            if report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
