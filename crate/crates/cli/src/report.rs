//! Machine-readable verification reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use enriques_core::classify::{invariants_summary, Summary};
use enriques_core::CaseVerdict;

pub const REPORT_SCHEMA: u32 = 1;

/// Canonical indices over the full classification.
pub const EXPECTED_INDEX_SET: [u64; 7] = [7, 8, 9, 10, 11, 13, 17];

/// The deterministic part of a run: identical inputs give identical bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub report_schema: u32,
    pub case_schema: u32,
    pub tool: String,
    pub version: String,
    pub cases: Vec<CaseVerdict>,
    pub summary: Summary,
    /// Present for full runs only.
    pub index_set_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: u128,
    pub per_case_ms: BTreeMap<String, u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub report: VerificationReport,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn new(cases: Vec<CaseVerdict>, full_run: bool) -> Self {
        let summary = invariants_summary(&cases);
        let expected: BTreeSet<u64> = EXPECTED_INDEX_SET.into_iter().collect();
        VerificationReport {
            report_schema: REPORT_SCHEMA,
            case_schema: enriques_core::cases::SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            index_set_ok: full_run.then(|| summary.index_set == expected),
            summary,
            cases,
        }
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseVerdict::passed) && self.index_set_ok != Some(false)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn to_json_file(report: &VerificationReport, timing: &Timing) -> String {
    let file = ReportFile {
        report: report.clone(),
        timing: timing.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("reports serialize");
    s.push('\n');
    s
}

pub fn fmt_set(t: &[u32]) -> String {
    let v: Vec<String> = t.iter().map(u32::to_string).collect();
    format!("{{{}}}", v.join(","))
}

fn range(lo: Option<usize>, hi: Option<usize>) -> String {
    match (lo, hi) {
        (Some(a), Some(b)) => format!("{a}-{b}"),
        _ => "-".to_string(),
    }
}

/// Human-readable summary table.
pub fn table(report: &VerificationReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:<12} {:>6} {:>3} {:>6} {:>5} {:>5} {:>6}  status",
        "case", "a", "I", "rho", "const", "sets", "agree"
    )
    .unwrap();
    for v in &report.cases {
        writeln!(
            s,
            "{:<12} {:>6} {:>3} {:>6} {:>5} {:>5} {:>6}  {}",
            v.case_id,
            v.a.to_string(),
            v.index,
            range(v.rho_min, v.rho_max),
            v.identity_constant,
            v.admissible.len(),
            if v.agreement { "yes" } else { "no" },
            if v.passed() { "ok" } else { "MISMATCH" }
        )
        .unwrap();
    }
    let idx: Vec<String> = report
        .summary
        .index_set
        .iter()
        .map(u64::to_string)
        .collect();
    write!(s, "index set: {{{}}}", idx.join(", ")).unwrap();
    if let Some(ok) = report.index_set_ok {
        write!(s, " ({})", if ok { "as expected" } else { "MISMATCH" }).unwrap();
    }
    write!(
        s,
        "\n{}/{} cases verified",
        report.summary.passed,
        report.cases.len()
    )
    .unwrap();
    s
}
