//! Run reports: one row per job, emitted as an aligned text table and CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Solved,
    Unsolved,
    Error,
}

impl std::fmt::Display for JobStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JobStatus::Solved => write!(f, "solved"),
            JobStatus::Unsolved => write!(f, "unsolved"),
            JobStatus::Error => write!(f, "error"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub qubits: u32,
    pub target: usize,
    pub status: JobStatus,
    /// Reason string for unsolved/error rows.
    pub detail: String,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    /// Per-condition verdict summaries, e.g. `init[cyc0]=verified`.
    pub verification: Vec<String>,
    pub verification_seconds: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    pub fn text_table(&self) -> String {
        let headers = [
            "experiment",
            "qubits",
            "target",
            "status",
            "setup(s)",
            "solve(s)",
            "verify(s)",
            "verification",
        ];
        let mut cells: Vec<Vec<String>> = vec![headers.iter().map(|s| s.to_string()).collect()];
        for row in &self.rows {
            let verification = if row.verification.is_empty() {
                row.detail.clone()
            } else {
                row.verification.join(" ")
            };
            cells.push(vec![
                row.experiment.clone(),
                row.qubits.to_string(),
                format!("|{}>", row.target),
                row.status.to_string(),
                format!("{:.2}", row.setup_seconds),
                format!("{:.2}", row.solve_seconds),
                format!("{:.2}", row.verification_seconds),
                verification,
            ]);
        }
        let widths: Vec<usize> = (0..headers.len())
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in cells.iter().enumerate() {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                let _ = write!(line, "{:width$}  ", cell, width = widths[c]);
            }
            let _ = writeln!(out, "{}", line.trim_end());
            if i == 0 {
                let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
                let _ = writeln!(out, "{}", "-".repeat(total));
            }
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(
            "experiment,qubits,target,status,detail,setup_seconds,solve_seconds,verification,verification_seconds\n",
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{},{:.6}",
                csv_escape(&row.experiment),
                row.qubits,
                row.target,
                row.status,
                csv_escape(&row.detail),
                row.setup_seconds,
                row.solve_seconds,
                csv_escape(&row.verification.join("; ")),
                row.verification_seconds,
            );
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
