//! Command-line front end: build lamplighter windows, run computations,
//! and emit deterministic plain-text reports.

mod commands;
mod config;
mod descriptors;
mod fixtures;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::JobConfig;
use report::Report;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit 3.
    Usage(String),
    /// Caps hit or verdict undecidable: exit 2.
    Inconclusive(String),
}

impl From<lamplight::Error> for CliError {
    fn from(e: lamplight::Error) -> Self {
        match e {
            // Caps and undersized windows mean "could not decide with these
            // resources", not "bad input".
            lamplight::Error::CapExceeded(msg) => CliError::Inconclusive(msg),
            lamplight::Error::Window(msg) => CliError::Inconclusive(msg),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lamplight",
    version,
    about = "Desk-scale computations on lamplighter graphs and wreath products"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Flat key=value config file; command-line key=value args override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Window radius override for graph descriptors.
    #[arg(long, global = true)]
    window: Option<i64>,
    /// State budget for closure/BFS searches.
    #[arg(long, global = true, default_value_t = 200_000)]
    cap_states: usize,
    /// Held-Karp set-size cap for exact TS distances.
    #[arg(long, global = true, default_value_t = 20)]
    cap_heldkarp: usize,
    /// Write the materialized graph as DOT.
    #[arg(long, global = true)]
    dot_out: Option<PathBuf>,
    /// Write the report to a file as well as stdout.
    #[arg(long, global = true)]
    report_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Materialize a lamplighter window and report its shape.
    Build { overrides: Vec<String> },
    /// Exact distance (and optionally a geodesic) between two vertices.
    Dist { overrides: Vec<String> },
    /// Coarse homotopy: loop triviality or path equivalence at scale E.
    Homotopy { overrides: Vec<String> },
    /// Persistent-intersection certificates via the arrow I/O covering.
    Persist { overrides: Vec<String> },
    /// Leaf computations: distances, squares, ladders.
    Leaves { overrides: Vec<String> },
    /// Følner certificates: grid boxes, wreath sets, tree pieces.
    Folner { overrides: Vec<String> },
    /// Quasi-κ-to-one residuals over thick-set families.
    Kappa { overrides: Vec<String> },
    /// Aptolic quasi-isometry constructions with verification.
    Aptolic { overrides: Vec<String> },
    /// Word-length distortion experiment in Z≀Z.
    Distortion { overrides: Vec<String> },
    /// Ends profile of a graph window.
    Ends { overrides: Vec<String> },
    /// Run the built-in fixture battery.
    Fixtures { overrides: Vec<String> },
}

fn dispatch(cmd: &Cmd, cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    match cmd {
        Cmd::Build { .. } => commands::build(cfg, common),
        Cmd::Dist { .. } => commands::dist(cfg, common),
        Cmd::Homotopy { .. } => commands::homotopy(cfg, common),
        Cmd::Persist { .. } => commands::persist(cfg, common),
        Cmd::Leaves { .. } => commands::leaves(cfg, common),
        Cmd::Folner { .. } => commands::folner(cfg, common),
        Cmd::Kappa { .. } => commands::kappa(cfg, common),
        Cmd::Aptolic { .. } => commands::aptolic(cfg, common),
        Cmd::Distortion { .. } => commands::distortion(cfg, common),
        Cmd::Ends { .. } => commands::ends(cfg, common),
        Cmd::Fixtures { .. } => fixtures::run(cfg, common),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{}", e);
                std::process::exit(0);
            }
            eprintln!("{}", e);
            std::process::exit(3);
        }
    };
    let overrides = match &cli.cmd {
        Cmd::Build { overrides }
        | Cmd::Dist { overrides }
        | Cmd::Homotopy { overrides }
        | Cmd::Persist { overrides }
        | Cmd::Leaves { overrides }
        | Cmd::Folner { overrides }
        | Cmd::Kappa { overrides }
        | Cmd::Aptolic { overrides }
        | Cmd::Distortion { overrides }
        | Cmd::Ends { overrides }
        | Cmd::Fixtures { overrides } => overrides.clone(),
    };
    let code = run(&cli, &overrides);
    std::process::exit(code);
}

fn run(cli: &Cli, overrides: &[String]) -> i32 {
    let cfg = match JobConfig::load(cli.common.config.as_deref(), overrides) {
        Ok(cfg) => cfg,
        Err(e) => return bail(e),
    };
    let mut report = match dispatch(&cli.cmd, &cfg, &cli.common) {
        Ok(report) => report,
        Err(e) => return bail(e),
    };
    if let Err(e) = cfg.finish() {
        return bail(e);
    }
    // Embed the resolved config (file + overrides + global flags).
    report.config = cfg.lines();
    report.config.push(format!("seed = {}", cli.common.seed));
    report
        .config
        .push(format!("cap-states = {}", cli.common.cap_states));
    report
        .config
        .push(format!("cap-heldkarp = {}", cli.common.cap_heldkarp));
    if let Some(w) = cli.common.window {
        report.config.push(format!("window = {}", w));
    }
    let text = report.render();
    print!("{}", text);
    if let Some(path) = &cli.common.report_out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write report to {:?}: {}", path, e);
            return 3;
        }
    }
    report.verdict.code()
}

fn bail(e: CliError) -> i32 {
    match e {
        CliError::Usage(msg) => {
            eprintln!("error: {}", msg);
            3
        }
        CliError::Inconclusive(msg) => {
            eprintln!("inconclusive: {}", msg);
            2
        }
    }
}
