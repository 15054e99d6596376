use serde::{Deserialize, Serialize};

use crate::formal_series::WindowComparison;

/// Outcome of one named check, serialized as `{check, window, pass, witness?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub window: Option<i64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, window: Option<i64>, pass: bool, witness: Option<String>) -> Self {
        CheckReport { check: check.into(), window, pass, witness }
    }

    pub fn from_comparison(check: impl Into<String>, cmp: &WindowComparison) -> Self {
        CheckReport {
            check: check.into(),
            window: cmp.window,
            pass: cmp.equal,
            witness: cmp.first_difference.as_ref().map(|d| d.to_string()),
        }
    }

    /// A report that only passes if `cmp` is equal and reaches down to `target`.
    pub fn from_comparison_reaching(check: impl Into<String>, cmp: &WindowComparison, target: i64) -> Self {
        let mut r = Self::from_comparison(check, cmp);
        if let Some(w) = cmp.window {
            if w > target {
                r.pass = false;
                if r.witness.is_none() {
                    r.witness = Some(format!("window {w} does not reach {target}"));
                }
            }
        }
        r
    }
}
