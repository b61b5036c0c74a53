//! Verification reports and their text and JSON layouts.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Finding,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Finding => "FINDING",
            Status::Fail => "FAIL",
        }
    }

    /// Process exit code: 0, 2, 1.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Finding => 2,
            Status::Fail => 1,
        }
    }

    /// The worse of two statuses.
    pub fn worst(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Pass => 0,
            Status::Finding => 1,
            Status::Fail => 2,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

/// Everything needed to re-run one failed check in isolation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub property: String,
    pub message: String,
    pub engine: String,
    pub seed: u64,
    /// Universe bounds, for checks that rebuild a test basis.
    pub bounds: Option<String>,
    /// Schema, then instances `I0, I1, ...`, then morphisms `M0, M1, ...`.
    pub document: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyTally {
    pub property: String,
    pub checks: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub schema: String,
    pub bounds: String,
    pub universe_size: usize,
    pub seed: u64,
    pub trials: u64,
    pub engine: String,
    pub status: Status,
    pub properties: Vec<PropertyTally>,
    pub failures: Vec<Witness>,
    pub findings: Vec<Witness>,
    pub elapsed_ms: u64,
}

/// Witnesses kept per property in a report; tallies still count all of them.
pub const MAX_WITNESSES_PER_PROPERTY: usize = 5;

impl VerificationReport {
    pub fn checks(&self) -> u64 {
        self.properties.iter().map(|p| p.checks).sum()
    }

    /// Line-oriented summary. Timing is left out so reruns compare equal.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {} schema {} bounds {} universe {} seed {} trials {} engine {}: {}",
            self.suite,
            self.schema,
            self.bounds,
            self.universe_size,
            self.seed,
            self.trials,
            self.engine,
            self.status.as_str()
        );
        for p in &self.properties {
            let verdict = if p.failures == 0 { "ok" } else { "violated" };
            let _ =
                writeln!(out, "  {:<28} checks {:>7}  failures {:>5}  {}", p.property, p.checks, p.failures, verdict);
        }
        for (kind, list) in [("failure", &self.failures), ("finding", &self.findings)] {
            for w in list {
                let _ = writeln!(out, "  {kind} {}: {}", w.property, w.message);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<VerificationReport> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_order() {
        assert_eq!(Status::Pass.worst(Status::Finding), Status::Finding);
        assert_eq!(Status::Fail.worst(Status::Finding), Status::Fail);
        assert_eq!(Status::Finding.exit_code(), 2);
    }

    #[test]
    fn json_round_trip() {
        let r = VerificationReport {
            suite: "s".into(),
            schema: "digraph".into(),
            bounds: "V=1,E=1".into(),
            universe_size: 3,
            seed: 1,
            trials: 2,
            engine: "standard".into(),
            status: Status::Pass,
            properties: vec![PropertyTally { property: "p".into(), checks: 4, failures: 0 }],
            failures: vec![],
            findings: vec![],
            elapsed_ms: 12,
        };
        assert_eq!(VerificationReport::from_json(&r.to_json()).unwrap(), r);
        assert!(r.to_json().contains("\"status\": \"PASS\""));
        assert!(!r.to_text().contains("12"));
    }
}
