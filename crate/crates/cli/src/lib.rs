//! `debtjudge` command implementations. Each command returns the text it
//! would print; `main` only handles printing and exit codes.

mod contest;
mod error;
mod grade;
mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use debtjudge_service::ServiceConfig;

pub use contest::{award, export_leaderboard, qualify, AwardRow, AwardTable};
pub use error::CliError;
pub use grade::{grade_penalty, Distribution, GradeReport, GradeRow};
pub use report::{run_report, ReportKind};

#[derive(Debug, Parser)]
#[command(name = "debtjudge", version, about = "Technical-debt contest judge")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradeMode {
    Penalty,
}

/// Where the contest log lives and which weights rescore it.
#[derive(Debug, Clone, clap::Args)]
pub struct StoreArgs {
    /// Service config file (weights and data_dir are read from it).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured data directory.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
}

impl StoreArgs {
    pub fn resolve(&self) -> Result<ServiceConfig, CliError> {
        let mut cfg = ServiceConfig::from_sources(self.config.as_deref())?;
        if let Some(d) = &self.data_dir {
            cfg.data_dir = d.clone();
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay the event log and serve the HTTP API until interrupted.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Batch-grade a directory of measure exports against a gate.
    Grade {
        #[arg(long, value_enum, default_value = "penalty")]
        mode: GradeMode,
        /// Directory of `*.json` measure exports.
        #[arg(long)]
        measures: PathBuf,
        /// TOML file with `[[condition]]` entries and an optional `[penalty]` table.
        #[arg(long)]
        gate: PathBuf,
        /// Code mark for exports that carry no `code_grade`.
        #[arg(long, default_value_t = 3.0)]
        code_grade: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Record a team's contest prerequisites.
    Qualify {
        team: String,
        #[arg(long)]
        gate_ok: bool,
        #[arg(long)]
        use_cases_ok: bool,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// Hand out the reward bonus over the final ranking.
    Award {
        /// Policy TOML; only its `[reward]` table is used.
        #[arg(long)]
        policy: PathBuf,
        /// Optional `team,grade` CSV to compute truncated final grades.
        #[arg(long)]
        grades: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// Cohort statistics reports.
    Report {
        #[arg(value_enum)]
        kind: ReportKind,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write the leaderboard as JSON or CSV.
    Export {
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        /// RFC 3339 timestamp for a historical board.
        #[arg(long)]
        as_of: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        store: StoreArgs,
    },
}

fn write_or_return(text: String, output: Option<&Path>) -> Result<String, CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

/// Runs a command to completion and returns its standard output.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Serve { config } => {
            let cfg = ServiceConfig::from_sources(config.as_deref())?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
            rt.block_on(debtjudge_service::run(cfg, async {
                let _ = tokio::signal::ctrl_c().await;
            }))?;
            Ok(String::new())
        }
        Command::Grade { mode: GradeMode::Penalty, measures, gate, code_grade, format } => {
            let report = grade_penalty(&measures, &gate, code_grade)?;
            Ok(match format {
                Format::Text => report.render(),
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
            })
        }
        Command::Qualify { team, gate_ok, use_cases_ok, store } => {
            let q = qualify(&store.resolve()?, &team, gate_ok, use_cases_ok)?;
            Ok(format!(
                "{}: gate {}, use cases {}, {}\n",
                q.team,
                if q.gate_passed { "ok" } else { "not ok" },
                if q.all_use_cases_implemented { "ok" } else { "not ok" },
                if q.qualified() { "qualified" } else { "not qualified" }
            ))
        }
        Command::Award { policy, grades, format, store } => {
            let table = award(&store.resolve()?, &policy, grades.as_deref())?;
            Ok(match format {
                Format::Text => table.render(),
                Format::Json => serde_json::to_string_pretty(&table).expect("serializable") + "\n",
            })
        }
        Command::Report { kind, dataset, format, output } => {
            let text = run_report(kind, &dataset, format)?;
            write_or_return(text, output.as_deref())
        }
        Command::Export { format, as_of, output, store } => {
            let text = export_leaderboard(&store.resolve()?, format, as_of.as_deref())?;
            write_or_return(text, output.as_deref())
        }
    }
}
