use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One checked inequality `lhs ≥ rhs` (up to `tolerance`), as written to
/// verification reports: `{claim, lhs, rhs, margin, passed, context}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub claim: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
    pub context: Map<String, Value>,
}

impl CertificateRecord {
    pub fn inequality(claim: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        let mut context = Map::new();
        context.insert("tolerance".into(), tolerance.into());
        Self {
            claim: claim.into(),
            lhs,
            rhs,
            margin,
            passed: margin >= -tolerance,
            context,
        }
    }

    /// The hypothesis of the claim does not hold; nothing was asserted.
    pub fn not_applicable(claim: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut context = Map::new();
        context.insert("applicable".into(), false.into());
        context.insert("reason".into(), reason.into().into());
        Self {
            claim: claim.into(),
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            passed: true,
            context,
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("context values serialize");
        self.context.insert(key.to_owned(), value);
        self
    }

    /// Marks the record failed without touching the numbers.
    pub fn fail(mut self, reason: &str) -> Self {
        self.passed = false;
        self.with("failure", reason)
    }

    pub fn is_applicable(&self) -> bool {
        self.context
            .get("applicable")
            .and_then(Value::as_bool)
            .unwrap_or(true)
    }

    /// Applicable and failed.
    pub fn is_failure(&self) -> bool {
        self.is_applicable() && !self.passed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_margin_and_tolerance() {
        let r = CertificateRecord::inequality("x", 1.0, 1.0 + 1e-10, 1e-9);
        assert!(r.passed);
        assert!(r.margin < 0.0);
        let r = CertificateRecord::inequality("x", 1.0, 1.1, 1e-9);
        assert!(r.is_failure());
    }

    #[test]
    fn not_applicable_is_never_a_failure() {
        let r = CertificateRecord::not_applicable("x", "vacuous");
        assert!(!r.is_applicable());
        assert!(!r.fail("forced").is_failure());
    }

    #[test]
    fn schema_fields() {
        let r = CertificateRecord::inequality("c", 2.0, 1.0, 0.0).with("n", 3);
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["claim", "context", "lhs", "margin", "passed", "rhs"]);
    }
}
