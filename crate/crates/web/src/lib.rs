//! Browser demo. Each export takes plain numbers and returns a JSON string holding the
//! computed values and a ready-to-insert SVG; errors come back as `{"error": "..."}`.

// `!(x > 0.0)` style guards are deliberate: NaN must fail range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use dirty_region::channels::{IcParams, MacHelperParams, ZicParams};
use dirty_region::ic::ic_vs_conditions;
use dirty_region::mac_helper::{classify, inner_envelope, outer_envelope, InnerGrid};
use dirty_region::region::{render_svg, PlotSpec, Series};
use dirty_region::z_ic::{layered_rates, zic_strong_segment_with};
use dirty_region::{channels::LayeredChannel, channels::PowerSplit, Error};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const DEMO_GRID: InnerGrid = InnerGrid {
    alpha_points: 65,
    beta_points: 33,
    refine: true,
};
const BOUNDARY_POINTS: usize = 121;
const SEGMENT_POINTS: usize = 201;

fn respond(r: Result<Value, Error>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Inner and outer bounds of the helper MAC with the A/B/C label of each constraint.
pub fn mac_region_json(p0: f64, p1: f64, p2: f64, q: f64) -> Result<Value, Error> {
    let p = MacHelperParams::new(p0, p1, p2, q)?;
    let inner = inner_envelope(&p, DEMO_GRID)?.boundary(BOUNDARY_POINTS)?;
    let outer = outer_envelope(&p, 201)?.boundary(BOUNDARY_POINTS)?;
    let cls = classify(&p)?;
    let spec = PlotSpec::new("Helper MAC rate region", "R1 (bits)", "R2 (bits)")
        .with(Series::from_curve("outer bound", &outer))
        .with(Series::from_curve("inner bound", &inner));
    Ok(json!({
        "units": "bits",
        "labels": cls.labels,
        "case": cls.case(),
        "a_margins": cls.indices.iter().map(|i| i.a_margin).collect::<Vec<_>>(),
        "c_margins": cls.indices.iter().map(|i| i.c_margin).collect::<Vec<_>>(),
        "svg": render_svg(&spec),
    }))
}

/// Part of the strong Z-IC sum-capacity face reachable with state correlation `c`
/// (`S2 = c S1 + S2'`).
pub fn zic_segment_json(a: f64, p1: f64, p2: f64, q1: f64, q2: f64, c: f64) -> Result<Value, Error> {
    let p = ZicParams::with_backward(a, p1, p2, q1, q2, c)?;
    let seg = zic_strong_segment_with(&p, SEGMENT_POINTS)?;
    let ch = LayeredChannel::from(&p);
    let face: Vec<(f64, f64)> = seg
        .scanned
        .grid(SEGMENT_POINTS)
        .into_iter()
        .map(|x| {
            let r = layered_rates(&ch, PowerSplit::full(p.p1, x.min(p.p1)).expect("scan lies in [0, P1]"));
            (r.r1, r.r2)
        })
        .collect();
    let reached: Vec<(f64, f64)> = match seg.r1_range {
        Some((lo, hi)) => face.iter().copied().filter(|&(r1, _)| r1 >= lo - 1e-12 && r1 <= hi + 1e-12).collect(),
        None => Vec::new(),
    };
    let mut spec = PlotSpec::new("Strong Z-IC: sum-capacity face", "R1 (bits)", "R2 (bits)")
        .with(Series::line("sum-capacity face", face));
    if !reached.is_empty() {
        spec = spec.with(Series::markers("reached with state", reached));
    }
    Ok(json!({
        "units": "bits",
        "segment": seg.segment,
        "r1_range": seg.r1_range,
        "passing_points": seg.passing_points,
        "scan_points": SEGMENT_POINTS,
        "svg": render_svg(&spec),
    }))
}

/// Both very strong IC conditions on a `b` grid over `[0, b_max]` with correlation `d`
/// (`S1 = d S2 + S1'`). Points where the coefficient system is singular are skipped.
#[allow(clippy::too_many_arguments)]
pub fn ic_conditions_json(a: f64, p1: f64, p2: f64, q1: f64, q2: f64, d: f64, b_max: f64, points: usize) -> Result<Value, Error> {
    if points < 2 || !(b_max > 0.0) {
        return Err(Error::InvalidGrid(format!("{points} points on [0, {b_max}]")));
    }
    let mut rows = Vec::new();
    for i in 0..points {
        let b = b_max * i as f64 / (points - 1) as f64;
        let p = IcParams::with_forward(a, b, p1, p2, q1, q2, d)?;
        match ic_vs_conditions(&p) {
            Ok((c1, c2)) => rows.push((b, c1.margin, c2.margin)),
            Err(Error::SingularCoefficients { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let spec = PlotSpec::new("IC very strong conditions", "cross gain b", "margin (bits)")
        .with(Series::line("receiver 1", rows.iter().map(|r| (r.0, r.1)).collect()))
        .with(Series::line("receiver 2", rows.iter().map(|r| (r.0, r.2)).collect()))
        .with(Series::line("zero", vec![(0.0, 0.0), (b_max, 0.0)]));
    Ok(json!({
        "units": "bits",
        "b": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        "receiver1": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
        "receiver2": rows.iter().map(|r| r.2).collect::<Vec<_>>(),
        "svg": render_svg(&spec),
    }))
}

#[wasm_bindgen]
pub fn mac_region(p0: f64, p1: f64, p2: f64, q: f64) -> String {
    respond(mac_region_json(p0, p1, p2, q))
}

#[wasm_bindgen]
pub fn zic_segment(a: f64, p1: f64, p2: f64, q1: f64, q2: f64, c: f64) -> String {
    respond(zic_segment_json(a, p1, p2, q1, q2, c))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn ic_conditions(a: f64, p1: f64, p2: f64, q1: f64, q2: f64, d: f64, b_max: f64, points: usize) -> String {
    respond(ic_conditions_json(a, p1, p2, q1, q2, d, b_max, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mac_region_labels_and_svg() {
        let v: Value = serde_json::from_str(&mac_region(15.0, 2.0, 3.0, 12.0)).unwrap();
        assert_eq!(v["labels"], json!(["C", "C", "C"]));
        assert_eq!(v["case"], 19);
        assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    }

    #[test]
    fn errors_are_reported_as_json() {
        let v: Value = serde_json::from_str(&mac_region(-1.0, 2.0, 3.0, 12.0)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("P0"));
        let v: Value = serde_json::from_str(&zic_segment(3.0, 1.0, 1.0, 2.0, 1.0, 0.3)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("strong"));
    }

    #[test]
    fn zic_segment_at_the_demo_point() {
        let v: Value = serde_json::from_str(&zic_segment(1.2, 1.0, 1.0, 2.0, 1.0, 0.5)).unwrap();
        assert!(v.get("error").is_none(), "{v}");
        let n = v["passing_points"].as_u64().unwrap();
        assert!(n <= SEGMENT_POINTS as u64);
        if let Some(r) = v["r1_range"].as_array() {
            // the reachable part always ends at the R1-maximal corner
            assert!((r[1].as_f64().unwrap() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn ic_conditions_skip_the_singular_gain() {
        // a b P1 P2 = (P1+1)(P2+1) at b = 2.5
        let v: Value = serde_json::from_str(&ic_conditions(1.6, 1.0, 1.0, 0.9, 0.9, 0.5, 4.4, 45)).unwrap();
        let bs: Vec<f64> = v["b"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(bs.len(), 44);
        assert!(bs.iter().all(|b| (b - 2.5).abs() > 1e-9));
        assert_eq!(v["receiver1"].as_array().unwrap().len(), 44);
    }
}
