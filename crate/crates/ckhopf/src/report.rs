//! Structured pass/fail records for the verification checkers.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Flag,
}

/// One checked item: `{check, algebra_id, item, status, residual, wall_time_ms}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEntry {
    pub check: String,
    pub algebra_id: String,
    pub item: String,
    pub status: Status,
    /// Canonical text of the offending element when the check failed.
    pub residual: String,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
    check: String,
    algebra_id: String,
    started: Instant,
}

impl Report {
    pub fn new(check: impl Into<String>, algebra_id: impl Into<String>) -> Self {
        Report {
            entries: Vec::new(),
            check: check.into(),
            algebra_id: algebra_id.into(),
            started: Instant::now(),
        }
    }

    pub fn push(&mut self, item: impl Into<String>, status: Status, residual: String) {
        let wall_time_ms = self.started.elapsed().as_millis() as u64;
        self.started = Instant::now();
        self.entries.push(ReportEntry {
            check: self.check.clone(),
            algebra_id: self.algebra_id.clone(),
            item: item.into(),
            status,
            residual,
            wall_time_ms,
        });
    }

    /// Push pass when `zero` holds, fail carrying the residual otherwise.
    pub fn push_residual(&mut self, item: impl Into<String>, zero: bool, residual: String) {
        if zero {
            self.push(item, Status::Pass, String::new());
        } else {
            self.push(item, Status::Fail, residual);
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    /// Pass/flag entries are acceptable; only `Fail` blocks.
    pub fn no_failures(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "[{}] {} / {} / {}{}",
                match e.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Flag => "FLAG",
                },
                e.check,
                e.algebra_id,
                e.item,
                if e.residual.is_empty() {
                    String::new()
                } else {
                    format!(" | residual: {}", e.residual)
                }
            )?;
        }
        Ok(())
    }
}
