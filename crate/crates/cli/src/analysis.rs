//! One analysis at one parameter point, producing both a JSON report and a fixed-width
//! CSV row so direct commands and sweeps share a single evaluation path.

use std::collections::BTreeMap;

use dirty_region::channels::IcParams;
use dirty_region::ic::{ic_strong_point, ic_strong_segment_with, ic_vs_capacity, ic_weak_sum_capacity, strong_orientation, weak_gate_value};
use dirty_region::mac_helper::{capacity_segments, classify, full_capacity_check, inner_envelope, outer_envelope};
use dirty_region::region::{convexify, fmt_sig, BoundaryCurve, Pentagon};
use dirty_region::z_ic::{zic_strong_point, zic_strong_segment_with, zic_vs_capacity, zic_weak_sum_capacity};
use dirty_region::Error;
use serde_json::{json, Value};

use crate::scenario::{channel, Analysis, Channel, Grids, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The parameters lie outside the regime the analysis characterises.
    Gate,
    /// The parameters themselves are invalid (negative power, |rho| > 1, ...).
    Invalid,
    /// The very-strong coefficient system has no solution at this point.
    Singular,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Gate => "gate",
            Status::Invalid => "invalid",
            Status::Singular => "singular",
            Status::Error => "error",
        }
    }

    fn of(e: &Error) -> Status {
        match e {
            Error::RegimeGate { .. } => Status::Gate,
            Error::InvalidParameter { .. } | Error::PowerViolation { .. } | Error::InvalidSplit { .. } => Status::Invalid,
            Error::SingularCoefficients { .. } => Status::Singular,
            _ => Status::Error,
        }
    }
}

pub struct Evaluation {
    pub status: Status,
    pub passed: bool,
    /// Analysis-specific part of the report; the error message when `status` is not `Ok`.
    pub result: Value,
    /// Values for [`columns`], empty strings where nothing was computed.
    pub row: Vec<String>,
    /// Boundaries for export (helper-MAC bounds only).
    pub curves: Vec<(&'static str, BoundaryCurve)>,
    pub no_state: Option<Pentagon>,
}

/// Result columns of an analysis, after the axis columns and `status`. The last is `pass`.
pub fn columns(model: Model, analysis: Analysis) -> &'static [&'static str] {
    match (model, analysis) {
        (Model::MacHelper, Analysis::Bounds) => &[
            "inner_max_r1_bits",
            "inner_max_r2_bits",
            "inner_max_sum_bits",
            "outer_max_r1_bits",
            "outer_max_r2_bits",
            "outer_max_sum_bits",
            "pass",
        ],
        (Model::MacHelper, _) => &[
            "label_r1",
            "label_r2",
            "label_sum",
            "case",
            "a_margin_r1_bits",
            "a_margin_r2_bits",
            "a_margin_sum_bits",
            "c_margin_r1",
            "c_margin_r2",
            "c_margin_sum",
            "pass",
        ],
        (Model::Zic, Analysis::Verystrong) => &["margin_bits", "pass"],
        (Model::Ic, Analysis::Verystrong) => &["margin1_bits", "margin2_bits", "determinant", "pass"],
        (_, Analysis::Strong) => &["passing_points", "segment_lo", "segment_hi", "r1_lo_bits", "r1_hi_bits", "swapped", "pass"],
        (Model::Zic, _) => &["a_squared", "sum_capacity_bits", "pass"],
        (Model::Ic, _) => &["gate_value", "sum_capacity_bits", "pass"],
    }
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

fn ok(passed: bool, result: Value, row: Vec<String>) -> Evaluation {
    Evaluation {
        status: Status::Ok,
        passed,
        result,
        row,
        curves: Vec::new(),
        no_state: None,
    }
}

pub fn evaluate(
    model: Model,
    analysis: Analysis,
    params: &BTreeMap<String, f64>,
    grid: &Grids,
    convex: bool,
) -> Evaluation {
    let run = || -> dirty_region::Result<Evaluation> {
        match (channel(model, params)?, analysis) {
            (Channel::Mac(p), Analysis::Bounds) => {
                let inner = inner_envelope(&p, grid.inner())?;
                let outer = outer_envelope(&p, grid.rho_points)?;
                let shape = |c: BoundaryCurve| if convex { convexify(&c) } else { c };
                let inner_curve = shape(inner.boundary(grid.boundary_points)?);
                let outer_curve = shape(outer.boundary(grid.boundary_points)?);
                let full = full_capacity_check(&p)?;
                let no_state = Pentagon::gaussian_mac(p.p1, p.p2);
                let extent = |r: &dirty_region::region::RateRegion| {
                    json!({"max_r1": r.max_r1(), "max_r2": r.max_r2(), "max_sum": r.max_sum()})
                };
                let row = vec![
                    fmt_sig(inner.max_r1()),
                    fmt_sig(inner.max_r2()),
                    fmt_sig(inner.max_sum()),
                    fmt_sig(outer.max_r1()),
                    fmt_sig(outer.max_r2()),
                    fmt_sig(outer.max_sum()),
                    flag(true),
                ];
                let result = json!({
                    "inner": extent(&inner),
                    "outer": extent(&outer),
                    "no_state": no_state,
                    "full_capacity": full,
                    "convexified": convex,
                    "boundary_points": grid.boundary_points,
                });
                let mut e = ok(true, result, row);
                e.curves = vec![("inner", inner_curve), ("outer", outer_curve)];
                e.no_state = Some(no_state);
                Ok(e)
            }
            (Channel::Mac(p), _) => {
                let cls = classify(&p)?;
                let segments = capacity_segments(&p)?;
                let full = full_capacity_check(&p)?;
                let mut row: Vec<String> = cls.labels.iter().map(|l| format!("{l:?}")).collect();
                row.push(cls.case().map(|c| c.to_string()).unwrap_or_default());
                row.extend(cls.indices.iter().map(|i| fmt_sig(i.a_margin)));
                row.extend(cls.indices.iter().map(|i| fmt_sig(i.c_margin)));
                row.push(flag(true));
                let result = json!({
                    "case": cls.case(),
                    "labels": cls.labels,
                    "indices": cls.indices,
                    "segments": segments.segments,
                    "full_capacity": full,
                });
                Ok(ok(true, result, row))
            }
            (Channel::Zic(p), Analysis::Verystrong) => {
                let r = zic_vs_capacity(&p)?;
                let row = vec![fmt_sig(r.condition.margin), flag(r.condition.passed)];
                Ok(ok(r.condition.passed, serde_json::to_value(&r).expect("serialisable"), row))
            }
            (Channel::Ic(p), Analysis::Verystrong) => {
                let r = ic_vs_capacity(&p)?;
                let passed = r.conditions.iter().all(|c| c.passed);
                let row = vec![
                    fmt_sig(r.conditions[0].margin),
                    fmt_sig(r.conditions[1].margin),
                    fmt_sig(r.determinant),
                    flag(passed),
                ];
                Ok(ok(passed, serde_json::to_value(&r).expect("serialisable"), row))
            }
            (Channel::Zic(p), Analysis::Strong) => {
                let seg = zic_strong_segment_with(&p, grid.segment_points)?;
                let corner = zic_strong_point(&p, p.p1)?;
                Ok(strong(seg, corner))
            }
            (Channel::Ic(p), Analysis::Strong) => {
                let seg = ic_strong_segment_with(&p, grid.segment_points)?;
                let corner = ic_strong_point(&p, oriented_p1(&p)?)?;
                Ok(strong(seg, corner))
            }
            (Channel::Zic(p), _) => {
                let sum = zic_weak_sum_capacity(&p)?;
                let row = vec![fmt_sig(p.a * p.a), fmt_sig(sum), flag(true)];
                Ok(ok(true, json!({"sum_capacity": sum}), row))
            }
            (Channel::Ic(p), _) => {
                let sum = ic_weak_sum_capacity(&p)?;
                let row = vec![fmt_sig(weak_gate_value(&p)), fmt_sig(sum), flag(true)];
                Ok(ok(true, json!({"sum_capacity": sum, "gate_value": weak_gate_value(&p)}), row))
            }
        }
    };
    match run() {
        Ok(e) => e,
        Err(err) => {
            let n = columns(model, analysis).len();
            let mut row = vec![String::new(); n];
            row[n - 1] = flag(false);
            Evaluation {
                status: Status::of(&err),
                passed: false,
                result: json!({"error": err.to_string()}),
                row,
                curves: Vec::new(),
                no_state: None,
            }
        }
    }
}

fn oriented_p1(p: &IcParams) -> dirty_region::Result<f64> {
    Ok(strong_orientation(p)?.0.p1)
}

fn strong(seg: dirty_region::z_ic::StrongSegment, corner: dirty_region::z_ic::StrongPoint) -> Evaluation {
    let passed = seg.segment.is_some();
    let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_default();
    let row = vec![
        seg.passing_points.to_string(),
        opt(seg.segment.map(|s| s.lo)),
        opt(seg.segment.map(|s| s.hi)),
        opt(seg.r1_range.map(|r| r.0)),
        opt(seg.r1_range.map(|r| r.1)),
        flag(seg.swapped),
        flag(passed),
    ];
    ok(passed, json!({"segment": seg, "corner": corner}), row)
}
