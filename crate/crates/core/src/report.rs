//! Check results shared by every verifier in the crate.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Relative residual (absolute residual divided by `scale`). Never NaN.
    pub max_residual: f64,
    pub scale: f64,
    pub pass: bool,
    pub witness: Option<String>,
}

impl Check {
    /// A check that passes iff `residual <= tol`.
    pub fn from_residual(name: impl Into<String>, tracker: Residual, tol: f64) -> Self {
        let residual = sanitize(tracker.value);
        Self {
            name: name.into(),
            max_residual: residual,
            scale: sanitize(tracker.scale),
            pass: residual <= tol,
            witness: if residual > tol { tracker.witness } else { None },
        }
    }

    /// A check whose verdict is decided by the caller.
    pub fn verdict(name: impl Into<String>, pass: bool, residual: f64, scale: f64, witness: Option<String>) -> Self {
        Self {
            name: name.into(),
            max_residual: sanitize(residual),
            scale: sanitize(scale),
            pass,
            witness: if pass { None } else { witness },
        }
    }

    pub fn failed(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Self { name: name.into(), max_residual: f64::MAX, scale: 1.0, pass: false, witness: Some(witness.into()) }
    }
}

fn sanitize(x: f64) -> f64 {
    if !x.is_finite() {
        f64::MAX
    } else {
        x.max(0.0)
    }
}

/// Running maximum of relative residuals together with the first witness that
/// attained it.
#[derive(Clone, Debug, Default)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
    pub witness: Option<String>,
}

impl Residual {
    pub fn new() -> Self {
        Self { value: 0.0, scale: 1.0, witness: None }
    }

    /// Records `abs / max(1, scale)`.
    pub fn observe(&mut self, abs: f64, scale: f64, witness: impl FnOnce() -> String) {
        let s = scale.max(1.0);
        let rel = if abs.is_nan() { f64::INFINITY } else { abs / s };
        if rel > self.value || (self.witness.is_none() && rel > 0.0 && rel >= self.value) {
            self.value = rel;
            self.scale = s;
            self.witness = Some(witness());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub tolerance: f64,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>, tolerance: f64) -> Self {
        Self { subject: subject.into(), tolerance, notes: vec![], warnings: vec![], checks: vec![] }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }

    pub fn warn(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.warnings.contains(&s) {
            self.warnings.push(s);
        }
    }

    /// Appends another report's checks, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}.{}", c.name);
            }
            self.checks.push(c);
        }
        for n in other.notes {
            self.note(n);
        }
        for w in other.warnings {
            self.warn(w);
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name || c.name.ends_with(&format!(".{name}")))
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Keeps checks whose name contains any of the given fragments.
    pub fn filter(&mut self, fragments: &[String]) {
        if fragments.is_empty() {
            return;
        }
        self.checks.retain(|c| fragments.iter().any(|f| c.name.contains(f.as_str())));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_pass_iff_all_checks_pass() {
        let mut r = VerificationReport::new("x", 1e-9);
        r.push(Check::verdict("a", true, 0.0, 1.0, None));
        assert!(r.pass());
        r.push(Check::verdict("b", false, 0.5, 1.0, Some("w".into())));
        assert!(!r.pass());
        assert_eq!(r.failing().count(), 1);
    }

    #[test]
    fn residual_tracker_keeps_max_and_witness() {
        let mut t = Residual::new();
        t.observe(0.1, 1.0, || "first".into());
        t.observe(0.5, 2.0, || "second".into());
        t.observe(0.2, 1.0, || "third".into());
        assert_eq!(t.value, 0.25);
        assert_eq!(t.witness.as_deref(), Some("second"));
        let c = Check::from_residual("c", t, 1e-9);
        assert!(!c.pass);
        assert_eq!(c.witness.as_deref(), Some("second"));
    }

    #[test]
    fn nan_residual_is_reported_as_failure() {
        let mut t = Residual::new();
        t.observe(f64::NAN, 1.0, || "nan".into());
        let c = Check::from_residual("c", t, 1e-9);
        assert!(!c.pass);
        assert!(c.max_residual.is_finite());
    }
}
