use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, PlaneKind};
use crate::transforms::TransformMethod;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Num(v)
    }
}
impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}
impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<i32> for ParamValue {
    fn from(v: i32) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}
impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}
impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Str(v)
    }
}

/// How `ratio` is judged against `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// |ratio − target| ≤ tolerance
    Equal { target: f64 },
    /// ratio ≤ bound·(1 + tolerance)
    AtMost { bound: f64 },
    /// ratio ≥ bound·(1 − tolerance)
    AtLeast { bound: f64 },
}

impl Criterion {
    pub fn holds(&self, ratio: f64, tolerance: f64) -> bool {
        if !ratio.is_finite() {
            return false;
        }
        match *self {
            Criterion::Equal { target } => (ratio - target).abs() <= tolerance,
            Criterion::AtMost { bound } => ratio <= bound * (1.0 + tolerance),
            Criterion::AtLeast { bound } => ratio >= bound * (1.0 - tolerance),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Verification,
    /// p ≠ 2 comparisons against conjectured constants.
    Consistency,
    /// Built to violate its bound; the harness expects `pass == false`.
    NegativeControl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "H")]
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub plane: String,
}

impl From<&GridSpec> for GridSummary {
    fn from(s: &GridSpec) -> Self {
        GridSummary {
            half_width: s.half_width,
            height: s.height,
            nx: s.nx,
            ny: s.ny,
            plane: match s.plane {
                PlaneKind::UpperHalfPlane => "upper".into(),
                PlaneKind::FullPlane => "full".into(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub parameters: BTreeMap<String, ParamValue>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub grid: Option<GridSummary>,
    pub method: Option<TransformMethod>,
    pub runtime_ms: u64,
    pub criterion: Criterion,
    pub label: Label,
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, criterion: Criterion, tolerance: f64) -> Self {
        CheckReport {
            check_id: check_id.into(),
            parameters: BTreeMap::new(),
            lhs: 0.0,
            rhs: 0.0,
            ratio: f64::NAN,
            tolerance,
            pass: false,
            grid: None,
            method: None,
            runtime_ms: 0,
            criterion,
            label: Label::Verification,
            degenerate: false,
            warnings: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<ParamValue>) -> Self {
        self.parameters.insert(key.to_string(), v.into());
        self
    }

    pub fn set_param(&mut self, key: &str, v: impl Into<ParamValue>) {
        self.parameters.insert(key.to_string(), v.into());
    }

    pub fn grid(mut self, spec: &GridSpec) -> Self {
        self.grid = Some(spec.into());
        self
    }

    pub fn method(mut self, m: TransformMethod) -> Self {
        self.method = Some(m);
        self
    }

    pub fn label(mut self, l: Label) -> Self {
        self.label = l;
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    pub fn warnings(mut self, ws: impl IntoIterator<Item = String>) -> Self {
        for w in ws {
            self.warn(w);
        }
        self
    }

    /// Record the compared quantities and settle `pass`.
    pub fn finish(mut self, lhs: f64, rhs: f64, ratio: f64, started: Instant) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.ratio = ratio;
        self.pass = self.criterion.holds(ratio, self.tolerance);
        self.runtime_ms = started.elapsed().as_millis() as u64;
        self
    }

    /// Zero input: passes by convention, flagged, excluded from aggregates.
    pub fn finish_degenerate(mut self, started: Instant) -> Self {
        self.degenerate = true;
        self.pass = true;
        self.ratio = match self.criterion {
            Criterion::Equal { target } => target,
            _ => 0.0,
        };
        self.warn("degenerate: zero input");
        self.runtime_ms = started.elapsed().as_millis() as u64;
        self
    }

    pub fn expected_pass(&self) -> bool {
        self.label != Label::NegativeControl
    }

    /// The report came out the way the harness expects.
    pub fn ok(&self) -> bool {
        self.degenerate || self.pass == self.expected_pass()
    }

    /// Compare everything except wall-clock time.
    pub fn same_result(&self, other: &CheckReport) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.runtime_ms = 0;
        b.runtime_ms = 0;
        a == b
    }
}

/// Aggregate verdict: all non-degenerate reports behave as expected.
pub fn all_ok(reports: &[CheckReport]) -> bool {
    reports.iter().filter(|r| !r.degenerate).all(CheckReport::ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria() {
        assert!(Criterion::Equal { target: 1.0 }.holds(1.0005, 1e-3));
        assert!(!Criterion::Equal { target: 1.0 }.holds(1.002, 1e-3));
        assert!(Criterion::AtMost { bound: 16.0 }.holds(16.01, 1e-3));
        assert!(!Criterion::AtMost { bound: 16.0 }.holds(16.1, 1e-3));
        assert!(Criterion::AtLeast { bound: 12.0 }.holds(12.9, 0.0));
        assert!(!Criterion::AtLeast { bound: 12.0 }.holds(f64::NAN, 0.0));
    }

    #[test]
    fn negative_control_ok_when_failing() {
        let r = CheckReport::new("x", Criterion::AtMost { bound: 1.0 }, 0.0)
            .label(Label::NegativeControl)
            .finish(2.0, 1.0, 2.0, Instant::now());
        assert!(!r.pass);
        assert!(r.ok());
    }
}
