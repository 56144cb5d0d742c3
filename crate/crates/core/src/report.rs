//! Verification reports shared by every checker and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subject {
    #[serde(rename = "prop1")]
    Prop1,
    #[serde(rename = "prop2")]
    Prop2,
    #[serde(rename = "cor1")]
    Cor1,
    #[serde(rename = "cor2")]
    Cor2,
    #[serde(rename = "coarse_grain")]
    CoarseGrain,
    #[serde(rename = "lemma1")]
    Lemma1,
    #[serde(rename = "lemma2")]
    Lemma2,
    #[serde(rename = "prop3")]
    Prop3,
    #[serde(rename = "assumption_1")]
    Assumption1,
    #[serde(rename = "assumption_2")]
    Assumption2,
    #[serde(rename = "assumption_3a")]
    Assumption3a,
    #[serde(rename = "assumption_3b")]
    Assumption3b,
    #[serde(rename = "assumption_3c")]
    Assumption3c,
    #[serde(rename = "theorem1")]
    Theorem1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: Subject,
    pub verdict: Verdict,
    pub witnesses: Vec<Value>,
    pub metrics: BTreeMap<String, f64>,
    /// Structured findings that are not counterexamples.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn builder(subject: Subject) -> ReportBuilder {
        ReportBuilder {
            subject,
            witnesses: Vec::new(),
            metrics: BTreeMap::new(),
            details: Value::Null,
            notes: Vec::new(),
        }
    }

    pub fn is_fail(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Caps the number of witnesses kept per report; the total is recorded
/// in the `witness_count` metric.
pub const MAX_WITNESSES: usize = 25;

#[derive(Debug)]
pub struct ReportBuilder {
    subject: Subject,
    witnesses: Vec<Value>,
    metrics: BTreeMap<String, f64>,
    details: Value,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn details(&mut self, details: Value) -> &mut Self {
        self.details = details;
        self
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    pub fn witness(&mut self, w: Value) -> &mut Self {
        self.witnesses.push(w);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn witness_count(&self) -> usize {
        self.witnesses.len()
    }

    /// Panics if a failing report carries no witness or a metric is not
    /// finite; both are logic errors in the checker.
    pub fn finish(&mut self, verdict: Verdict) -> VerificationReport {
        assert!(
            verdict != Verdict::Fail || !self.witnesses.is_empty(),
            "{:?}: fail verdict without witnesses",
            self.subject
        );
        for (name, value) in &self.metrics {
            assert!(value.is_finite(), "{:?}: metric {name} is not finite", self.subject);
        }
        let total = self.witnesses.len();
        let mut witnesses = std::mem::take(&mut self.witnesses);
        if total > MAX_WITNESSES {
            witnesses.truncate(MAX_WITNESSES);
            self.metrics.insert("witness_count".into(), total as f64);
        }
        VerificationReport {
            subject: self.subject,
            verdict,
            witnesses,
            metrics: std::mem::take(&mut self.metrics),
            details: std::mem::take(&mut self.details),
            notes: std::mem::take(&mut self.notes),
        }
    }
}

/// Pass when no witnesses were collected, fail otherwise.
pub fn verdict_from_witnesses(b: &ReportBuilder) -> Verdict {
    if b.witness_count() == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}
