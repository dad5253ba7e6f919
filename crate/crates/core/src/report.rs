//! Pass/fail reports for checks.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Preconditions not met.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub witness: Vec<String>,
    pub detail: String,
    /// Only filled in when timings are requested, so reports stay reproducible.
    pub elapsed_ms: Option<u64>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

pub fn run_check(check: &str, timings: bool, f: impl FnOnce() -> Result<String>) -> CheckReport {
    let start = Instant::now();
    let outcome = f();
    let elapsed_ms = timings.then(|| start.elapsed().as_millis() as u64);
    let (status, witness, detail) = match outcome {
        Ok(detail) => (Status::Pass, Vec::new(), detail),
        Err(Error::Mismatch { check: what, witness }) => (Status::Fail, witness, what),
        Err(e @ (Error::NotModular | Error::NotDistributive | Error::Precondition(_) | Error::ParamTooLarge(_))) => {
            (Status::Skipped, Vec::new(), e.to_string())
        }
        Err(e) => (Status::Fail, Vec::new(), e.to_string()),
    };
    CheckReport { check: check.to_string(), status, witness, detail, elapsed_ms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses() {
        assert_eq!(run_check("a", false, || Ok("fine".into())).status, Status::Pass);
        let r = run_check("b", false, || Err(Error::mismatch("b", vec!["x".into()])));
        assert_eq!((r.status, r.witness.clone(), r.elapsed_ms), (Status::Fail, vec!["x".to_string()], None));
        assert!(!r.passed());
        let s = run_check("c", true, || Err(Error::NotModular));
        assert!(s.passed() && s.elapsed_ms.is_some());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"status\":\"fail\""));
        assert_eq!(serde_json::from_str::<CheckReport>(&json).unwrap(), r);
    }
}
