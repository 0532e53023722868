mod commands;
mod report;
mod scenario;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coarse_double::error::Error;
use report::RunReport;
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "coarse-double", version, about = "Window-certified computations with metrics on doubles of discrete spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Global {
    /// Built-in space name (see `space list`).
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// JSON file describing a custom finite space.
    #[arg(long, global = true, conflicts_with = "space")]
    pub space_file: Option<PathBuf>,
    /// Window radius around the basepoint.
    #[arg(long, global = true)]
    pub radius: Option<i64>,
    /// Largest level index examined by zero tests and measures.
    #[arg(long, global = true)]
    pub n_max: Option<u64>,
    /// JSON file with defaults for space, radius, n_max and the witness grid.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when any verdict is inconclusive.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect metric spaces.
    Space {
        #[command(subcommand)]
        cmd: SpaceCmd,
    },
    /// Define a projection from a subset, a level spec or an expression.
    Proj {
        #[command(subcommand)]
        cmd: ProjCmd,
    },
    /// Evaluate a kernel d(x, y′).
    Eval {
        #[arg(long)]
        metric: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Compare two projections (level specs) up to quasi or coarse equivalence.
    Compare {
        e1: String,
        e2: String,
        #[arg(long, value_enum, default_value_t = CompareMode::Both)]
        mode: CompareMode,
    },
    /// Compose two kernels (right after left) and classify the result.
    Product {
        left: String,
        right: String,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// Meet of two projections, with a zero test.
    Meet { e1: String, e2: String },
    /// Join of two projections, with a test against 𝟏.
    Join { e1: String, e2: String },
    /// Type I / type II classification.
    Classify {
        e: String,
        /// Sweep the radii R/4, R/2, R instead of a single window.
        #[arg(long)]
        sweep: bool,
    },
    /// Atoms and two-valued homomorphisms of the Boolean algebra generated by projections.
    Algebra {
        /// Generator level specs separated by `;`.
        #[arg(long, required = true, value_delimiter = ';')]
        generators: Vec<String>,
        #[arg(value_enum)]
        action: AlgebraAction,
    },
    /// τ of a projection along a filter base of tails of a set.
    Tau {
        e: String,
        #[arg(long)]
        filter_base: String,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
    },
    /// Density measures.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
    /// Approximate units and R-ideals.
    Ideal {
        #[command(subcommand)]
        cmd: IdealCmd,
    },
    /// Scenario corpus.
    Scenario {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
    /// Re-render a saved JSON report.
    Report {
        file: PathBuf,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpaceCmd {
    List,
    Show,
}

#[derive(Subcommand, Debug)]
pub enum ProjCmd {
    Define {
        #[arg(long, group = "source")]
        from_subset: Option<String>,
        /// Level spec (`1`, `0`, `subset:…`, `expr:…`, `metric:…`) or `@file.json`.
        #[arg(long, group = "source")]
        levels: Option<String>,
        #[arg(long, group = "source")]
        expr: Option<String>,
        /// Write the tabulated levels as JSON.
        #[arg(long)]
        save: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum MeasureCmd {
    NuHat {
        e: String,
        #[arg(long, value_enum, default_value_t = DensityChoice::Shell)]
        kind: DensityChoice,
    },
    NuBar {
        #[arg(required = true)]
        gens: Vec<String>,
        #[arg(long, value_enum, default_value_t = DensityChoice::Shell)]
        kind: DensityChoice,
    },
    Laws {
        e: String,
        f: String,
        #[arg(long, value_enum, default_value_t = DensityChoice::Shell)]
        kind: DensityChoice,
    },
}

#[derive(Subcommand, Debug)]
pub enum IdealCmd {
    Check { e: String },
}

#[derive(Subcommand, Debug)]
pub enum ScenarioCmd {
    List,
    Run {
        name: String,
        /// Expected-value table to use instead of the built-in one.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMode {
    Quasi,
    Coarse,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraAction {
    Atoms,
    Homs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityChoice {
    Ball,
    Shell,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub space: Option<String>,
    pub radius: Option<i64>,
    pub n_max: Option<u64>,
    pub alpha_max: Option<u64>,
    pub beta_max: Option<u64>,
}

fn exit_for_error(e: &Error) -> u8 {
    match e {
        Error::Inconclusive { .. } | Error::IncompleteEnumeration { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.cmd {
        Command::Report { file, json, csv } => {
            return ExitCode::from(commands::rerender(file, *json, *csv));
        }
        _ => commands::run(&cli),
    };
    let mut report: RunReport = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for_error(&e));
        }
    };
    if cli.global.timing {
        report.timing_ms = Some(start.elapsed().as_millis());
    }
    let json = report.to_json();
    if let Some(path) = &cli.global.out {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if cli.global.json {
        println!("{json}");
    } else {
        print!("{}", report.to_text());
    }
    if !report.mismatches.is_empty() {
        eprintln!("{} expectation(s) not met", report.mismatches.len());
        return ExitCode::from(EXIT_MISMATCH);
    }
    if cli.global.strict && report.any_inconclusive() {
        return ExitCode::from(EXIT_INCONCLUSIVE);
    }
    ExitCode::from(EXIT_OK)
}
