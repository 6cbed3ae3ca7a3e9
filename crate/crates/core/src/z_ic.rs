//! State-dependent Z-interference channel: very strong, strong and weak regimes.
//!
//! The strong-regime layered scheme (rate splitting at transmitter 1, dirty paper coding
//! of every layer against `S1`) lives here and is shared with the full IC.

use serde::{Deserialize, Serialize};

use crate::channels::{
    build_strong_layered, build_zic_verystrong, LayeredChannel, LayeredCoefficients, PowerSplit,
    ZicParams, ZicVeryStrongCoefficients,
};
use crate::error::{Error, Result};
use crate::gauss_core::LinearGaussianSystem;
use crate::region::{awgn, Pentagon};
use crate::report::ConditionReport;
use crate::search::{bisect_transition, satisfied_intervals, Interval};

/// Tolerance of the achieved-rate identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// P1'' samples of a segment scan.
pub const SEGMENT_GRID: usize = 513;

const STATES: [&str; 2] = ["S1p", "S2"];

pub fn zic_vs_coefficients(p: &ZicParams) -> ZicVeryStrongCoefficients {
    let d = p.forward().coefficient;
    let g1 = p.p1 / (p.p1 + 1.0);
    let beta = p.p2 / (p.p2 + 1.0);
    ZicVeryStrongCoefficients {
        alpha1: g1 * (d - p.a * beta),
        alpha2: g1,
        beta,
    }
}

/// Residuals of the three coefficient equations, cross-multiplied so that none divides.
pub fn zic_vs_residuals(p: &ZicParams, c: &ZicVeryStrongCoefficients) -> [f64; 3] {
    let d = p.forward().coefficient;
    [
        c.alpha1 * (p.p1 + 1.0) - p.p1 * (d - p.a * c.beta),
        c.alpha2 * (p.p1 + 1.0) - p.p1,
        c.beta * (p.p2 + 1.0) - p.p2,
    ]
}

/// Closed-form receiver-1 margin for decoding `V`, in bits, with the bracket repaired
/// and the sign of `aβ` matching the channel (`S2` enters `Y1` as `d S2`, `X2` as `a X2`).
pub fn zic_vs_closed_form(p: &ZicParams) -> f64 {
    if p.p2 == 0.0 {
        return 0.0;
    }
    let fwd = p.forward();
    let (d, q1p) = (fwd.coefficient, fwd.residual);
    let beta = p.p2 / (p.p2 + 1.0);
    let var_y1 = p.p1 + p.a * p.a * p.p2 + d * d * p.q2 + q1p + 1.0;
    let det = (d - p.a * beta).powi(2) * p.q2 * p.p2 + (p.p2 + beta * beta * p.q2) * (p.p1 + q1p + 1.0);
    0.5 * (p.p2 * var_y1 / det).log2() - awgn(p.p2)
}

/// Receiver 1 can decode `V` at the rate it was designed for at receiver 2:
/// `I(V;Y1) - I(V;Y2) >= 0`.
pub fn zic_vs_condition(p: &ZicParams) -> Result<ConditionReport> {
    let c = zic_vs_coefficients(p);
    let sys = build_zic_verystrong(p, c)?;
    let margin = sys.mutual_info_reduced(&["V"], &["Y1"])? - sys.mutual_info_reduced(&["V"], &["Y2"])?;
    Ok(ConditionReport::new("receiver1_decodes_v", margin)
        .with_closed_form(zic_vs_closed_form(p))
        .witness("alpha1", c.alpha1)
        .witness("alpha2", c.alpha2)
        .witness("beta", c.beta)
        .witness("d", p.forward().coefficient))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZicVeryStrongResult {
    pub coefficients: ZicVeryStrongCoefficients,
    pub condition: ConditionReport,
    /// `I(U;V,Y1) - I(S1,S2;U) - ½log(1+P1)` and `I(V;Y2) - I(S2;V) - ½log(1+P2)`.
    pub identity_residuals: [f64; 2],
    /// Capacity rectangle, present when the condition holds.
    pub region: Option<Pentagon>,
}

pub fn very_strong_gate(p: &ZicParams) -> Result<()> {
    if p.a * p.a > 1.0 + p.p1 {
        Ok(())
    } else {
        Err(Error::RegimeGate {
            regime: "z-ic very strong",
            detail: format!("a^2 = {} must exceed 1 + P1 = {}", p.a * p.a, 1.0 + p.p1),
        })
    }
}

pub fn zic_vs_identities(sys: &LinearGaussianSystem, p1: f64, p2: f64) -> Result<[f64; 2]> {
    Ok([
        sys.mutual_info_reduced(&["U"], &["V", "Y1"])? - sys.mutual_info_reduced(&STATES, &["U"])? - awgn(p1),
        sys.mutual_info_reduced(&["V"], &["Y2"])? - sys.mutual_info_reduced(&["S2"], &["V"])? - awgn(p2),
    ])
}

pub fn zic_vs_capacity(p: &ZicParams) -> Result<ZicVeryStrongResult> {
    p.validate()?;
    very_strong_gate(p)?;
    let coefficients = zic_vs_coefficients(p);
    let sys = build_zic_verystrong(p, coefficients)?;
    let identity_residuals = zic_vs_identities(&sys, p.p1, p.p2)?;
    let condition = zic_vs_condition(p)?;
    let region = condition
        .passed
        .then(|| rectangle(p.p1, p.p2));
    Ok(ZicVeryStrongResult {
        coefficients,
        condition,
        identity_residuals,
        region,
    })
}

/// Whether the very-strong capacity holds at `p`: the gate and the decoding condition.
pub fn very_strong_holds(p: &ZicParams) -> bool {
    very_strong_gate(p).is_ok() && zic_vs_condition(p).map(|r| r.passed).unwrap_or(false)
}

/// Smallest cross gain `a` at which the very-strong capacity holds, bisected to `tol` between
/// the regime boundary `sqrt(1+P1)` and `a_max`. `None` when it fails at `a_max`.
pub fn min_passing_gain(p: &ZicParams, a_max: f64, tol: f64) -> Result<Option<f64>> {
    p.validate()?;
    let lo = (1.0 + p.p1).sqrt();
    if !(a_max > lo) {
        return Err(Error::InvalidParameter {
            name: "a_max",
            value: a_max,
            reason: "must exceed sqrt(1 + P1)",
        });
    }
    let holds = |a: f64| very_strong_holds(&ZicParams { a, ..*p });
    if !holds(a_max) {
        return Ok(None);
    }
    bisect_transition(holds, lo, a_max, tol).map(Some)
}

/// Interference-free rectangle `R1 <= ½log(1+P1)`, `R2 <= ½log(1+P2)`.
pub fn rectangle(p1: f64, p2: f64) -> Pentagon {
    Pentagon::new(awgn(p1), awgn(p2), awgn(p1) + awgn(p2))
}

/// Layered coefficients: `α1 = P1'/D`, `α2 = P1''/D`, `β = a²P2/D`, `D = P1 + a²P2 + 1`.
pub fn layered_coefficients(ch: &LayeredChannel, split: PowerSplit) -> LayeredCoefficients {
    let d = ch.p1 + ch.a * ch.a * ch.p2 + 1.0;
    LayeredCoefficients {
        alpha1: split.common / d,
        alpha2: split.private / d,
        beta: ch.a * ch.a * ch.p2 / d,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredRates {
    pub r1_common: f64,
    pub r1_private: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Rates on the no-state sum-capacity face reached by the split.
pub fn layered_rates(ch: &LayeredChannel, split: PowerSplit) -> LayeredRates {
    let a2p2 = ch.a * ch.a * ch.p2;
    let r1_common = awgn(split.common / (a2p2 + split.private + 1.0));
    let r1_private = awgn(split.private);
    LayeredRates {
        r1_common,
        r1_private,
        r1: r1_common + r1_private,
        r2: awgn(a2p2 / (split.private + 1.0)),
    }
}

/// Receiver-1 decoding identities of the layered scheme (all zero when the coefficients
/// cancel `S1` at receiver 1): `U1`, then `V` given `U1`, then `U2` given both.
pub fn layered_identities(sys: &LinearGaussianSystem, rates: &LayeredRates) -> Result<[f64; 3]> {
    Ok([
        sys.mutual_info_reduced(&["U1"], &["Y1"])? - sys.mutual_info_reduced(&["U1"], &["S1"])? - rates.r1_common,
        sys.cond_mutual_info_reduced(&["U2"], &["V", "Y1"], &["U1"])?
            - sys.cond_mutual_info_reduced(&["U2"], &["S1"], &["U1"])?
            - rates.r1_private,
        sys.mutual_info_reduced(&["V"], &["U1", "Y1"])? - sys.mutual_info_reduced(&["V"], &["S1"])? - rates.r2,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongPoint {
    pub split: PowerSplit,
    pub rates: LayeredRates,
    pub coefficients: LayeredCoefficients,
    pub conditions: Vec<ConditionReport>,
    pub passed: bool,
    pub identity_residuals: [f64; 3],
    /// One layer carries no power.
    pub degenerate: bool,
    /// Users were relabelled to put the channel in its canonical orientation.
    pub swapped: bool,
}

pub fn strong_gate(p: &ZicParams) -> Result<()> {
    let a2 = p.a * p.a;
    if (1.0..1.0 + p.p1).contains(&a2) {
        Ok(())
    } else {
        Err(Error::RegimeGate {
            regime: "z-ic strong",
            detail: format!("a^2 = {a2} must lie in [1, 1 + P1 = {})", 1.0 + p.p1),
        })
    }
}

/// Closed-form receiver-2 margin for `V`, in bits.
pub fn zic_strong_closed_form(p: &ZicParams, private: f64) -> f64 {
    let a2p2 = p.a * p.a * p.p2;
    if a2p2 == 0.0 {
        return 0.0;
    }
    let bwd = p.backward();
    let (c, q2p) = (bwd.coefficient, bwd.residual);
    let beta = a2p2 / (p.p1 + a2p2 + 1.0);
    let num = a2p2 * (p.p2 + c * c * p.q1 + q2p + 1.0);
    let den = (p.a * c - beta).powi(2) * p.q1 * p.p2 + (a2p2 + beta * beta * p.q1) * (q2p + 1.0);
    0.5 * (num / den).log2() - awgn(a2p2 / (private + 1.0))
}

/// Point on the sum-capacity face with private power `private` (P1''), and whether
/// receiver 2 can decode `V` there: `I(V;Y2) - I(V;U1,Y1) >= 0`.
pub fn zic_strong_point(p: &ZicParams, private: f64) -> Result<StrongPoint> {
    p.validate()?;
    strong_gate(p)?;
    let split = PowerSplit::full(p.p1, private)?;
    let ch = LayeredChannel::from(p);
    let coefficients = layered_coefficients(&ch, split);
    let rates = layered_rates(&ch, split);
    let sys = build_strong_layered(&ch, split, coefficients)?;
    let margin = sys.mutual_info_reduced(&["V"], &["Y2"])? - sys.mutual_info_reduced(&["V"], &["U1", "Y1"])?;
    let report = ConditionReport::new("receiver2_decodes_v", margin)
        .with_closed_form(zic_strong_closed_form(p, private))
        .witness("p1_private", private)
        .witness("c", ch.backward().coefficient);
    Ok(StrongPoint {
        split,
        rates,
        coefficients,
        passed: report.passed,
        conditions: vec![report],
        identity_residuals: layered_identities(&sys, &rates)?,
        degenerate: split.is_degenerate(),
        swapped: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongSegment {
    /// P1'' range scanned, `[max(a²-1, 0), P1]`.
    pub scanned: Interval,
    /// Passing P1'' intervals.
    pub passing: Vec<Interval>,
    /// Passing interval that starts at `P1'' = P1` (the `R1`-maximal corner), if any.
    pub segment: Option<Interval>,
    /// `R1` range of `segment`.
    pub r1_range: Option<(f64, f64)>,
    /// Passing points exist that are not connected to the `R1`-maximal corner.
    pub prefix_violation: bool,
    /// Number of passing scan points.
    pub passing_points: usize,
    pub swapped: bool,
}

pub(crate) fn segment_from_margin<F>(scanned: Interval, grid: usize, margin: F, rate_r1: impl Fn(f64) -> f64) -> StrongSegment
where
    F: Fn(f64) -> f64,
{
    let passing = satisfied_intervals(&margin, scanned, grid);
    let passing_points = scanned.grid(grid).into_iter().filter(|&x| margin(x) >= 0.0).count();
    let segment = passing.last().filter(|iv| iv.hi == scanned.hi).copied();
    let prefix_violation = passing.len() > usize::from(segment.is_some());
    StrongSegment {
        scanned,
        r1_range: segment.map(|iv| (rate_r1(iv.lo), rate_r1(iv.hi))),
        passing,
        segment,
        prefix_violation,
        passing_points,
        swapped: false,
    }
}

/// Portion of the sum-capacity face reachable by the layered scheme, scanning P1'' from
/// the `R1`-maximal corner down to `a² - 1`.
pub fn zic_strong_segment(p: &ZicParams) -> Result<StrongSegment> {
    zic_strong_segment_with(p, SEGMENT_GRID)
}

pub fn zic_strong_segment_with(p: &ZicParams, grid: usize) -> Result<StrongSegment> {
    p.validate()?;
    strong_gate(p)?;
    let scanned = Interval::new((p.a * p.a - 1.0).max(0.0), p.p1)?;
    let ch = LayeredChannel::from(p);
    let margin = |x: f64| match zic_strong_point(p, x.min(p.p1)) {
        Ok(pt) if pt.passed => pt.conditions[0].margin.max(0.0),
        Ok(pt) => pt.conditions[0].margin.min(-f64::MIN_POSITIVE),
        Err(_) => f64::NAN,
    };
    let r1 = |x: f64| layered_rates(&ch, PowerSplit::full(p.p1, x.min(p.p1)).expect("in range")).r1;
    Ok(segment_from_margin(scanned, grid, margin, r1))
}

pub fn weak_gate(p: &ZicParams) -> Result<()> {
    if p.a * p.a <= 1.0 {
        Ok(())
    } else {
        Err(Error::RegimeGate {
            regime: "z-ic weak",
            detail: format!("a^2 = {} must not exceed 1", p.a * p.a),
        })
    }
}

/// `½log(1 + P1/(a²P2+1)) + ½log(1+P2)`; the state correlation plays no role.
pub fn zic_weak_sum_capacity(p: &ZicParams) -> Result<f64> {
    p.validate()?;
    weak_gate(p)?;
    Ok(awgn(p.p1 / (p.a * p.a * p.p2 + 1.0)) + awgn(p.p2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coefficient_special_cases() {
        let p = ZicParams::with_forward(2.0, 1.0, 3.0, 1.0, 1.0, 0.0).unwrap();
        let c = zic_vs_coefficients(&p);
        assert_abs_diff_eq!(c.alpha1, -0.5 * 2.0 * 0.75, epsilon = 1e-15);
        let p = ZicParams::with_forward(0.0, 1.0, 3.0, 1.0, 1.0, 0.6).unwrap();
        assert_abs_diff_eq!(zic_vs_coefficients(&p).alpha1, 0.3, epsilon = 1e-15);
        for r in zic_vs_residuals(&p, &zic_vs_coefficients(&p)) {
            assert!(r.abs() < 1e-15);
        }
    }

    #[test]
    fn very_strong_identities() {
        let p = ZicParams::with_forward(3.0, 2.0, 2.0, 1.0, 1.0, 0.7).unwrap();
        let r = zic_vs_capacity(&p).unwrap();
        for x in r.identity_residuals {
            assert!(x.abs() < IDENTITY_TOL, "{x}");
        }
    }

    #[test]
    fn very_strong_gate_boundary() {
        let p = ZicParams::new(2.0, 3.0, 2.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(zic_vs_capacity(&p), Err(Error::RegimeGate { .. })));
        assert!(zic_vs_capacity(&ZicParams { a: 2.0001, ..p }).is_ok());
    }

    #[test]
    fn mi_and_closed_form_agree_in_sign() {
        for (a, q2) in [(1e3, 1.4), (1e3, 1.6), (2.0, 1.0), (4.0, 0.3)] {
            let p = ZicParams::new(a, 2.0, 2.0, 1.0, q2, 0.0).unwrap();
            let r = zic_vs_condition(&p).unwrap();
            assert!(!r.discrepancy, "{a} {q2}: {r:?}");
        }
    }

    #[test]
    fn anchor_point_rates() {
        let p = ZicParams::with_backward(1.2, 1.0, 1.0, 2.0, 1.0, 0.5).unwrap();
        let pt = zic_strong_point(&p, 1.2 * 1.2 - 1.0).unwrap();
        assert_abs_diff_eq!(pt.rates.r1, 0.5 * 1.72f64.log2(), epsilon = 1e-9);
        assert_abs_diff_eq!(pt.rates.r2, 0.5, epsilon = 1e-9);
        for r in pt.identity_residuals {
            assert!(r.abs() < IDENTITY_TOL, "{r}");
        }
    }

    #[test]
    fn no_split_point_is_degenerate() {
        let p = ZicParams::with_backward(1.2, 1.0, 1.0, 2.0, 1.0, 0.5).unwrap();
        let pt = zic_strong_point(&p, 1.0).unwrap();
        assert!(pt.degenerate);
        assert_abs_diff_eq!(pt.rates.r1, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn weak_sum_capacity_values() {
        let p = ZicParams::new(0.0, 1.0, 3.0, 1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(zic_weak_sum_capacity(&p).unwrap(), 0.5 + 1.0, epsilon = 1e-12);
        let p = ZicParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let v = zic_weak_sum_capacity(&p).unwrap();
        assert_abs_diff_eq!(v, 0.5 * 1.5f64.log2() + 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 0.792481250360578, epsilon = 1e-12);
        for rho in [-0.9, 0.9] {
            assert_eq!(zic_weak_sum_capacity(&ZicParams { rho, ..p }).unwrap(), v);
        }
        assert!(matches!(
            zic_weak_sum_capacity(&ZicParams { a: 2.0, ..p }),
            Err(Error::RegimeGate { .. })
        ));
    }
}
