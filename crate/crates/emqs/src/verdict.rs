//! Machine-readable verdict records for the checking commands.

use serde::{Deserialize, Serialize};

use emqs_core::diagnostics::{OracleReport, StructureVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub tag: String,
    pub expected: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn from_structure(verdicts: &[StructureVerdict]) -> Vec<Verdict> {
    let mut out = Vec::new();
    for v in verdicts {
        for c in &v.checks {
            out.push(Verdict {
                check: c.name.clone(),
                tag: v.tag.name().to_string(),
                expected: if c.expect_below {
                    format!("<= {}", c.threshold)
                } else {
                    format!("> {}", c.threshold)
                },
                measured: c.measured,
                tolerance: c.threshold,
                pass: c.pass,
            });
        }
    }
    out
}

pub fn from_oracle(report: &OracleReport) -> Verdict {
    Verdict {
        check: "dense assembly oracle".into(),
        tag: report.tag.name().to_string(),
        expected: "exact match".into(),
        measured: report.max_discrepancy,
        tolerance: 0.0,
        pass: report.pass,
    }
}

pub fn to_json(verdicts: &[Verdict]) -> String {
    serde_json::to_string_pretty(verdicts).expect("verdicts serialize")
}
