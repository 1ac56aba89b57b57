//! Machine-readable run reports shared by the command-line driver and the
//! verification suites. Field order is fixed so identical runs serialize to
//! identical bytes.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One named check with optional witness data (exact matrices, angles,
/// error tables) attached on failure or when informative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, name: &str, ok: bool, detail: Option<String>, witness: Option<serde_json::Value>) {
        if !ok {
            self.passed = false;
        }
        self.checks.push(CheckResult {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
            witness,
        });
    }

    pub fn pass(&mut self, name: &str, detail: impl Into<String>) {
        self.push(name, true, Some(detail.into()), None);
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>, witness: Option<serde_json::Value>) {
        self.push(name, false, Some(detail.into()), witness);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_serialization_is_deterministic() {
        let build = || {
            let mut r = Report::new("demo", serde_json::json!({"seed": 7}));
            r.pass("first", "ok");
            r.fail("second", "broken", Some(serde_json::json!([["1", "0"], ["0", "1"]])));
            serde_json::to_string_pretty(&r).unwrap()
        };
        assert_eq!(build(), build());
        let r: Report = serde_json::from_str(&build()).unwrap();
        assert!(!r.passed);
        assert_eq!(r.checks.len(), 2);
        assert_eq!(r.checks[1].status, Status::Fail);
    }
}
