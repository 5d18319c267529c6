//! Pass/fail bookkeeping shared by every property check.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// No trial satisfied the hypothesis, so nothing was asserted.
    Vacuous,
}

/// A single violated assertion with enough context to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: Option<u64>,
    pub theta: Option<f64>,
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub note: String,
}

impl Counterexample {
    pub fn new(inputs: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            seed: None,
            theta: None,
            inputs: inputs.into(),
            lhs,
            rhs,
            slack: 0.0,
            note: String::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Outcome of one property over many trials.
///
/// `trials` counts every attempted instance, `satisfied` those whose
/// hypothesis held (and were therefore asserted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub property: String,
    pub trials: usize,
    pub satisfied: usize,
    pub vacuous: usize,
    pub failures: Vec<Counterexample>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(property: impl Into<String>) -> Self {
        Self {
            property: property.into(),
            trials: 0,
            satisfied: 0,
            vacuous: 0,
            failures: Vec::new(),
            verdict: Verdict::Vacuous,
            notes: Vec::new(),
        }
    }

    fn refresh(&mut self) {
        self.verdict = if !self.failures.is_empty() {
            Verdict::Fail
        } else if self.satisfied == 0 {
            Verdict::Vacuous
        } else {
            Verdict::Pass
        };
    }

    pub fn record_pass(&mut self) {
        self.trials += 1;
        self.satisfied += 1;
        self.refresh();
    }

    pub fn record_vacuous(&mut self) {
        self.trials += 1;
        self.vacuous += 1;
        self.refresh();
    }

    pub fn record_failure(&mut self, c: Counterexample) {
        self.trials += 1;
        self.satisfied += 1;
        self.failures.push(c);
        self.refresh();
    }

    /// Records an assertion outcome for a trial whose hypothesis held.
    pub fn check(&mut self, ok: bool, c: impl FnOnce() -> Counterexample) {
        if ok {
            self.record_pass();
        } else {
            self.record_failure(c());
        }
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    /// Folds another report's trials into this one.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.trials += other.trials;
        self.satisfied += other.satisfied;
        self.vacuous += other.vacuous;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
        self.refresh();
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// One human-readable status line.
    pub fn summary_line(&self) -> String {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Vacuous => "VACUOUS",
        };
        format!(
            "{tag:<8} {} (trials={}, asserted={}, vacuous={}, failures={})",
            self.property,
            self.trials,
            self.satisfied,
            self.vacuous,
            self.failures.len()
        )
    }
}
