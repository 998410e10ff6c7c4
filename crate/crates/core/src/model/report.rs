//! Text and machine (JSON) rendering of check reports.

use serde::{Deserialize, Serialize};

use crate::criteria::CheckReport;

/// Everything one CLI invocation reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub reports: Vec<CheckReport>,
}

impl ReportDocument {
    /// Reports are ordered by model, then check, keeping the original order
    /// among equal keys.
    pub fn new(command: &str, mut reports: Vec<CheckReport>) -> ReportDocument {
        reports.sort_by(|a, b| a.model.cmp(&b.model).then_with(|| a.check.cmp(&b.check)));
        ReportDocument {
            tool: "gupcheck".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            reports,
        }
    }

    pub fn all_succeeded(&self) -> bool {
        self.reports.iter().all(|r| r.status.is_success())
    }

    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_machine(text: &str) -> Result<ReportDocument, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&format!("{}: {} [{}] {}\n", r.model, r.check, r.mode, r.status));
            if r.residual != "0" {
                out.push_str(&format!("  residual: {}\n", r.residual));
            }
            for (k, v) in &r.solution {
                out.push_str(&format!("  {k} = {v}\n"));
            }
            for n in &r.notes {
                out.push_str(&format!("  note: {n}\n"));
            }
        }
        let ok = self.reports.iter().filter(|r| r.status.is_success()).count();
        out.push_str(&format!("{ok}/{} succeeded\n", self.reports.len()));
        out
    }
}
