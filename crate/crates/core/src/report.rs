//! Pass/fail bookkeeping shared by the bound checkers.

use serde::Serialize;

/// Outcome of comparing one computed quantity against one bound.
///
/// `margin` is signed so that a negative margin always means the bound was
/// missed (before tolerance).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// `value >= bound - tol`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let margin = value - bound;
        Self { name: name.into(), passed: margin >= -tol, value, bound, margin, detail: None }
    }

    /// `value <= bound + tol`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let margin = bound - value;
        Self { name: name.into(), passed: margin >= -tol, value, bound, margin, detail: None }
    }

    /// `value > bound + tol`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let margin = value - bound;
        Self { name: name.into(), passed: margin > tol, value, bound, margin, detail: None }
    }

    /// `value < bound - tol`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let margin = bound - value;
        Self { name: name.into(), passed: margin > tol, value, bound, margin, detail: None }
    }

    /// A check decided elsewhere (typically by exact arithmetic).
    pub fn decided(name: impl Into<String>, passed: bool, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed, value, bound, margin: value - bound, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub tol: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(tol: f64) -> Self {
        Self { tol, checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}
