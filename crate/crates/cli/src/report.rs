use std::path::Path;

use clap::ValueEnum;
use debtjudge_core::stats::{
    comparison_report, load_dataset, normality_report, render_comparison_table, render_normality_table,
    render_summary_table, summary_stats, CohortDataset, ReportDocument,
};

use crate::{CliError, ReportFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Normality,
    Comparison,
    Summary,
}

fn header(d: &CohortDataset) -> String {
    let (p, r) = d.sizes();
    format!("penalising n={p}, rewarding n={r}, N={}\n\n", p + r)
}

pub fn run_report(kind: ReportKind, dataset: &Path, format: ReportFormat) -> Result<String, CliError> {
    let file = std::fs::File::open(dataset).map_err(|e| CliError::Io(format!("dataset {}: {e}", dataset.display())))?;
    let d = load_dataset(file)?;
    let machine = format == ReportFormat::Machine;
    Ok(match kind {
        ReportKind::Normality => {
            let r = normality_report(&d)?;
            if machine {
                ReportDocument::new("normality", &d, r).to_json() + "\n"
            } else {
                header(&d) + &render_normality_table(&r)
            }
        }
        ReportKind::Comparison => {
            let r = comparison_report(&d)?;
            if machine {
                ReportDocument::new("comparison", &d, r).to_json() + "\n"
            } else {
                header(&d) + &render_comparison_table(&r)
            }
        }
        ReportKind::Summary => {
            let r = summary_stats(&d)?;
            if machine {
                ReportDocument::new("summary", &d, r).to_json() + "\n"
            } else {
                header(&d) + &render_summary_table(&r)
            }
        }
    })
}
