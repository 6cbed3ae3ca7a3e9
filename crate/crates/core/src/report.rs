use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Margins at or above this count as satisfied.
pub const MARGIN_TOL: f64 = -1e-9;
/// Sign disagreements closer than this to the boundary are not flagged.
pub const BOUNDARY_BAND: f64 = 1e-6;

/// Outcome of one regime condition. `margin` is in bits unless `units` says otherwise;
/// a condition passes when `margin >= -1e-9`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub units: String,
    /// Independent closed-form evaluation of the same condition, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_margin: Option<f64>,
    /// The two margins disagree in sign away from the boundary.
    pub discrepancy: bool,
    pub witnesses: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionReport {
    pub fn new(name: impl Into<String>, margin: f64) -> Self {
        ConditionReport {
            name: name.into(),
            passed: margin >= MARGIN_TOL,
            margin,
            units: "bits".into(),
            closed_form_margin: None,
            discrepancy: false,
            witnesses: BTreeMap::new(),
            note: None,
        }
    }

    pub fn with_units(mut self, units: &str) -> Self {
        self.units = units.into();
        self
    }

    pub fn with_closed_form(mut self, closed: f64) -> Self {
        self.closed_form_margin = Some(closed);
        let far = self.margin.abs() > BOUNDARY_BAND || closed.abs() > BOUNDARY_BAND;
        self.discrepancy = far && (self.margin >= MARGIN_TOL) != (closed >= MARGIN_TOL);
        self
    }

    pub fn witness(mut self, key: &str, value: f64) -> Self {
        self.witnesses.insert(key.into(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
