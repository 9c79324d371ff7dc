use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use qcongest::params::SearchMode;
use qcongest_cli::config::{Enforcement, RunConfig};
use qcongest_cli::{bench_rounds, run_apsp, run_find_edges, verify_lemmas};

#[derive(Parser)]
#[command(
    name = "qcongest",
    about = "Quantum CONGEST-CLIQUE shortest-path simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<String>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Search mode override.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SearchMode>,
    /// Abort on any bandwidth violation (default); `--strict=false` audits.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    strict: bool,
}

fn parse_mode(s: &str) -> Result<SearchMode, String> {
    match s {
        "quantum-sim" => Ok(SearchMode::QuantumSim),
        "oracle-exhaustive" => Ok(SearchMode::OracleExhaustive),
        other => Err(format!("unknown mode {other:?}")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// All-pairs shortest paths with the full reduction pipeline.
    Apsp(Common),
    /// Negative-triangle pair detection on one instance.
    FindEdges(Common),
    /// Property suites for the randomized building blocks.
    Verify(Common),
    /// Round-count scaling rows (CSV).
    Bench(Common),
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        cfg.enforcement = if self.strict {
            Enforcement::Strict
        } else {
            Enforcement::Audit
        };
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Apsp(common) => {
            let report = run_apsp(&common.load()?)?;
            common.emit(&format!("{}\n", serde_json::to_string_pretty(&report)?))?;
            Ok(report.passed)
        }
        Command::FindEdges(common) => {
            let report = run_find_edges(&common.load()?)?;
            common.emit(&format!("{}\n", serde_json::to_string_pretty(&report)?))?;
            Ok(report.passed)
        }
        Command::Verify(common) => {
            let report = verify_lemmas(&common.load()?)?;
            common.emit(&format!("{}\n", serde_json::to_string_pretty(&report)?))?;
            Ok(report.passed)
        }
        Command::Bench(common) => {
            let report = bench_rounds(&common.load()?)?;
            common.emit(&report.to_csv())?;
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
