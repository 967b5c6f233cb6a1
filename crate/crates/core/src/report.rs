//! Residual-based verification reports.
//!
//! Every verification routine in this crate reduces an operator identity to
//! a scalar residual and compares it against an explicit threshold. The
//! report keeps one entry per identity so a failure names exactly which
//! relation broke and by how much.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

/// One verified identity: its residual, the threshold it was held to, and
/// whether it passed. `context` echoes the parameters the check ran with.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckEntry {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub context: String,
}

/// An ordered list of check entries with a consistent pass/fail summary.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record a check. `pass` is derived from `residual <= tolerance`, so a
    /// report can never claim a pass that its own numbers contradict.
    pub fn push(&mut self, check: &str, residual: f64, tolerance: f64, context: &str) {
        self.entries.push(CheckEntry {
            check: check.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            context: context.to_string(),
        });
    }

    /// Record an informational entry that always passes (used for
    /// conditioning warnings where the number is reported but not gated).
    pub fn push_info(&mut self, check: &str, value: f64, context: &str) {
        self.entries.push(CheckEntry {
            check: check.to_string(),
            residual: value,
            tolerance: f64::INFINITY,
            pass: true,
            context: context.to_string(),
        });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failed(&self) -> Vec<&CheckEntry> {
        self.entries.iter().filter(|e| !e.pass).collect()
    }

    /// `(total, passed, failed)` counts over the entries.
    pub fn summary(&self) -> (usize, usize, usize) {
        let total = self.entries.len();
        let passed = self.entries.iter().filter(|e| e.pass).count();
        (total, passed, total - passed)
    }

    /// Largest residual-to-tolerance ratio over all gated entries.
    pub fn worst_ratio(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.tolerance.is_finite() && e.tolerance > 0.0)
            .map(|e| e.residual / e.tolerance)
            .fold(0.0, f64::max)
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Summary {
            total: usize,
            passed: usize,
            failed: usize,
        }
        let (total, passed, failed) = self.summary();
        let mut st = serializer.serialize_struct("VerificationReport", 2)?;
        st.serialize_field("entries", &self.entries)?;
        st.serialize_field(
            "summary",
            &Summary {
                total,
                passed,
                failed,
            },
        )?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_residual() {
        let mut r = VerificationReport::new();
        r.push("ok", 1e-12, 1e-10, "");
        r.push("bad", 1e-8, 1e-10, "");
        r.push("nan", f64::NAN, 1e-10, "");
        assert!(r.entries[0].pass);
        assert!(!r.entries[1].pass);
        assert!(!r.entries[2].pass, "non-finite residual must fail");
        assert_eq!(r.summary(), (3, 1, 2));
        assert!(!r.all_pass());
    }

    #[test]
    fn summary_serialized_consistent_with_entries() {
        let mut r = VerificationReport::new();
        r.push("a", 0.0, 1.0, "ctx");
        r.push("b", 2.0, 1.0, "ctx");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["summary"]["total"], 2);
        assert_eq!(json["summary"]["passed"], 1);
        assert_eq!(json["summary"]["failed"], 1);
        assert_eq!(json["entries"][0]["check"], "a");
    }
}
