//! State-dependent interference channel: joint dirty paper coding in the very strong
//! regime, the layered scheme in the strong regime, and the weak-regime sum capacity.

use serde::{Deserialize, Serialize};

use crate::channels::{
    build_ic_verystrong, build_strong_layered, IcParams, IcVeryStrongCoefficients, LayeredChannel,
    PowerSplit,
};
use crate::error::{Error, Result};
use crate::gauss_core::LinearGaussianSystem;
use crate::region::{awgn, Pentagon};
use crate::report::ConditionReport;
use crate::search::Interval;
use crate::z_ic::{
    layered_coefficients, layered_identities, layered_rates, rectangle, segment_from_margin, StrongPoint,
    StrongSegment, SEGMENT_GRID,
};

/// `|D|` at or below this is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Entropy and information forms of a condition must agree this closely.
pub const FORM_AGREEMENT: f64 = 1e-9;

const STATES: [&str; 2] = ["S1p", "S2"];

/// `(P1+1)(P2+1) - ab P1 P2`.
pub fn coefficient_determinant(p: &IcParams) -> f64 {
    (p.p1 + 1.0) * (p.p2 + 1.0) - p.a * p.b * p.p1 * p.p2
}

/// Joint dirty-paper coefficients cancelling both states at both receivers.
pub fn ic_vs_coefficients(p: &IcParams) -> Result<IcVeryStrongCoefficients> {
    let det = coefficient_determinant(p);
    if det.abs() <= SINGULAR_TOL {
        return Err(Error::SingularCoefficients { det, ab: p.a * p.b });
    }
    let d = p.forward().coefficient;
    let (p1, p2, a, b) = (p.p1, p.p2, p.a, p.b);
    Ok(IcVeryStrongCoefficients {
        alpha1: p1 * (1.0 + p2) / det,
        alpha2: p1 * (d + d * p2 - a * p2) / det,
        beta1: -b * p1 * p2 / det,
        beta2: p2 * (p1 + 1.0 - b * d * p1) / det,
    })
}

/// Residuals of the four consistency equations, cross-multiplied.
pub fn ic_vs_residuals(p: &IcParams, c: &IcVeryStrongCoefficients) -> [f64; 4] {
    let d = p.forward().coefficient;
    let (a, b) = (p.a, p.b);
    [
        c.alpha1 * (d - a * c.beta2) - c.alpha2 * (1.0 - a * c.beta1),
        c.alpha1 * (p.p1 + 1.0) - p.p1 * (1.0 - a * c.beta1),
        c.beta1 * (1.0 - b * c.alpha2) + b * c.alpha1 * c.beta2,
        c.beta1 * (p.p2 + 1.0) + b * c.alpha1 * p.p2,
    ]
}

fn both_forms(
    sys: &LinearGaussianSystem,
    name: &str,
    aux: &str,
    input: &str,
    other: &str,
    target: f64,
) -> Result<ConditionReport> {
    let info = sys.mutual_info_reduced(&[aux], &[other])? - sys.mutual_info_reduced(&[aux], &STATES)? - target;
    let entropy = sys.entropy_bits(&[input])? - sys.entropy_bits(&[aux, other])? + sys.entropy_bits(&[other])? - target;
    let mut r = ConditionReport::new(name, info).with_closed_form(entropy);
    if (info - entropy).abs() > FORM_AGREEMENT {
        r.discrepancy = true;
    }
    Ok(r)
}

/// The cross receiver can decode each user's auxiliary at its interference-free rate:
/// `I(U;Y2) - I(S1,S2;U) >= ½log(1+P1)` and `I(V;Y1) - I(S1,S2;V) >= ½log(1+P2)`.
/// The entropy form `h(X) - h(aux, Y) + h(Y)` is carried as the closed-form margin.
pub fn ic_vs_conditions(p: &IcParams) -> Result<(ConditionReport, ConditionReport)> {
    let c = ic_vs_coefficients(p)?;
    let sys = build_ic_verystrong(p, c)?;
    Ok((
        both_forms(&sys, "receiver2_decodes_u", "U", "X1", "Y2", awgn(p.p1))?,
        both_forms(&sys, "receiver1_decodes_v", "V", "X2", "Y1", awgn(p.p2))?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcVeryStrongResult {
    pub coefficients: IcVeryStrongCoefficients,
    pub conditions: [ConditionReport; 2],
    /// `I(U;V,Y1) - I(S1,S2;U) - ½log(1+P1)` and `I(V;U,Y2) - I(S1,S2;V) - ½log(1+P2)`.
    pub identity_residuals: [f64; 2],
    pub consistency_residuals: [f64; 4],
    /// `(P1+1)(P2+1) - ab P1 P2`; coefficients blow up as it approaches 0.
    pub determinant: f64,
    pub near_singular: bool,
    pub region: Option<Pentagon>,
}

pub fn very_strong_gate(p: &IcParams) -> Result<()> {
    let corner = (1.0 + p.p1) * (1.0 + p.p2);
    let s1 = p.p1 + p.a * p.a * p.p2 + 1.0;
    let s2 = p.b * p.b * p.p1 + p.p2 + 1.0;
    if s1 > corner && s2 > corner {
        Ok(())
    } else {
        Err(Error::RegimeGate {
            regime: "ic very strong",
            detail: format!("P1 + a^2 P2 + 1 = {s1} and b^2 P1 + P2 + 1 = {s2} must both exceed (1+P1)(1+P2) = {corner}"),
        })
    }
}

pub fn ic_vs_capacity(p: &IcParams) -> Result<IcVeryStrongResult> {
    p.validate()?;
    very_strong_gate(p)?;
    let coefficients = ic_vs_coefficients(p)?;
    let sys = build_ic_verystrong(p, coefficients)?;
    let identity_residuals = [
        sys.mutual_info_reduced(&["U"], &["V", "Y1"])? - sys.mutual_info_reduced(&STATES, &["U"])? - awgn(p.p1),
        sys.mutual_info_reduced(&["V"], &["U", "Y2"])? - sys.mutual_info_reduced(&STATES, &["V"])? - awgn(p.p2),
    ];
    let (c1, c2) = ic_vs_conditions(p)?;
    let region = (c1.passed && c2.passed).then(|| rectangle(p.p1, p.p2));
    let determinant = coefficient_determinant(p);
    Ok(IcVeryStrongResult {
        coefficients,
        conditions: [c1, c2],
        identity_residuals,
        consistency_residuals: ic_vs_residuals(p, &coefficients),
        determinant,
        near_singular: determinant.abs() < 1e-6 * (1.0 + p.p1) * (1.0 + p.p2),
        region,
    })
}

/// Strong-regime gate and orientation. Returns the parameters in canonical orientation
/// (`P1 + a²P2 + 1 <= b²P1 + P2 + 1`) and whether users were swapped.
pub fn strong_orientation(p: &IcParams) -> Result<(IcParams, bool)> {
    let gate = |detail: String| Error::RegimeGate {
        regime: "ic strong",
        detail,
    };
    if p.a < 1.0 || p.b < 1.0 {
        return Err(gate(format!("gains a = {}, b = {} must both be at least 1", p.a, p.b)));
    }
    let s1 = p.p1 + p.a * p.a * p.p2 + 1.0;
    let s2 = p.b * p.b * p.p1 + p.p2 + 1.0;
    let corner = (1.0 + p.p1) * (1.0 + p.p2);
    if s1.min(s2) > corner {
        return Err(gate(format!(
            "min(P1 + a^2 P2 + 1, b^2 P1 + P2 + 1) = {} exceeds (1+P1)(1+P2) = {corner}",
            s1.min(s2)
        )));
    }
    Ok(if s1 <= s2 { (*p, false) } else { (p.swapped(), true) })
}

/// Point on the sum-capacity face with private power `private`, checked against the
/// three receiver-2 decoding conditions of the layered scheme. `private` refers to the
/// user that is transmitter 1 after orientation.
pub fn ic_strong_point(p: &IcParams, private: f64) -> Result<StrongPoint> {
    p.validate()?;
    let (q, swapped) = strong_orientation(p)?;
    let split = PowerSplit::full(q.p1, private)?;
    let ch = LayeredChannel::from(&q);
    let coefficients = layered_coefficients(&ch, split);
    let rates = layered_rates(&ch, split);
    let sys = build_strong_layered(&ch, split, coefficients)?;
    let m1 = sys.mutual_info_reduced(&["U1"], &["Y2"])? - sys.mutual_info_reduced(&["U1"], &["S1"])? - rates.r1_common;
    let m2 = sys.cond_mutual_info_reduced(&["U2"], &["V", "Y2"], &["U1"])?
        - sys.cond_mutual_info_reduced(&["U2"], &["S1"], &["U1"])?
        - rates.r1_private;
    let m3 = sys.cond_mutual_info_reduced(&["V"], &["Y2"], &["U1"])? - sys.mutual_info_reduced(&["V"], &["S1"])? - rates.r2;
    let conditions = vec![
        ConditionReport::new("receiver2_decodes_u1", m1),
        ConditionReport::new("receiver2_decodes_u2", m2),
        ConditionReport::new("receiver2_decodes_v", m3),
    ];
    Ok(StrongPoint {
        split,
        rates,
        coefficients,
        passed: conditions.iter().all(|c| c.passed),
        conditions,
        identity_residuals: layered_identities(&sys, &rates)?,
        degenerate: split.is_degenerate(),
        swapped,
    })
}

pub fn ic_strong_segment(p: &IcParams) -> Result<StrongSegment> {
    ic_strong_segment_with(p, SEGMENT_GRID)
}

pub fn ic_strong_segment_with(p: &IcParams, grid: usize) -> Result<StrongSegment> {
    p.validate()?;
    let (q, swapped) = strong_orientation(p)?;
    let scanned = Interval::new((q.a * q.a - 1.0).max(0.0).min(q.p1), q.p1)?;
    let ch = LayeredChannel::from(&q);
    let margin = |x: f64| match ic_strong_point(&q, x.min(q.p1)) {
        Ok(pt) => {
            let m = pt.conditions.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
            if pt.passed {
                m.max(0.0)
            } else {
                m.min(-f64::MIN_POSITIVE)
            }
        }
        Err(_) => f64::NAN,
    };
    let r1 = |x: f64| layered_rates(&ch, PowerSplit::full(q.p1, x.min(q.p1)).expect("in range")).r1;
    let mut seg = segment_from_margin(scanned, grid, margin, r1);
    seg.swapped = swapped;
    Ok(seg)
}

/// `|a(1 + b²P1)| + |b(1 + a²P2)|`; the weak regime requires this to be at most 1.
pub fn weak_gate_value(p: &IcParams) -> f64 {
    (p.a * (1.0 + p.b * p.b * p.p1)).abs() + (p.b * (1.0 + p.a * p.a * p.p2)).abs()
}

pub fn weak_gate(p: &IcParams) -> Result<()> {
    let v = weak_gate_value(p);
    if v <= 1.0 {
        Ok(())
    } else {
        Err(Error::RegimeGate {
            regime: "ic weak",
            detail: format!("|a(1+b^2 P1)| + |b(1+a^2 P2)| = {v} exceeds 1"),
        })
    }
}

/// `½log(1 + P1/(a²P2+1)) + ½log(1 + P2/(b²P1+1))`, treating interference as noise.
pub fn ic_weak_sum_capacity(p: &IcParams) -> Result<f64> {
    p.validate()?;
    weak_gate(p)?;
    Ok(weak_sum_formula(p))
}

/// The weak-regime sum-rate expression without the gate, for callers with their own gate.
pub fn weak_sum_formula(p: &IcParams) -> f64 {
    awgn(p.p1 / (p.a * p.a * p.p2 + 1.0)) + awgn(p.p2 / (p.b * p.b * p.p1 + 1.0))
}
