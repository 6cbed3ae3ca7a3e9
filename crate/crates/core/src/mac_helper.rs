//! State-dependent MAC with a helper: outer bound, Gaussian inner bound, and the
//! A/B/C classification of each rate constraint.
//!
//! The three rate constraints are indexed 1 (`R1`, power `P1`), 2 (`R2`, power `P2`)
//! and 3 (`R1 + R2`, power `P1 + P2`).

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{MacCoefficients, MacHelperParams};
use crate::error::{Error, Result};
use crate::region::{awgn, Pentagon, RateRegion};
use crate::report::{ConditionReport, MARGIN_TOL};
use crate::search::{maximize_1d, maximize_1d_with, maximize_2d, maximize_2d_with, satisfied_intervals, Interval, Maximum2d};

/// Points used to scan the α window of the full-cancellation condition.
pub const OMEGA_GRID: usize = 4096;
/// Default (α, β) grid of the inner envelope.
pub const ALPHA_GRID: usize = 257;
pub const BETA_GRID: usize = 129;
const RHO_TOL: f64 = 1e-10;

fn log2_ratio(num: f64, den: f64) -> f64 {
    0.5 * (num / den).log2()
}

/// The powers tied to constraints 1, 2 and 3.
pub fn index_powers(p: &MacHelperParams) -> [f64; 3] {
    [p.p1, p.p2, p.p1 + p.p2]
}

fn check_beta(p: &MacHelperParams, beta: f64) -> Result<f64> {
    let bound = p.beta_bound();
    if !(beta.abs() <= bound * (1.0 + 1e-12)) {
        return Err(Error::BetaOutOfRange { beta, bound });
    }
    p.residual_helper_power(beta)
}

/// Rate available to the user once the helper's auxiliary is decoded and binned against
/// the state, `I(U,X;Y|other) - I(U;S)`. Infinite without state; `-inf` when the helper
/// has no residual power but `α != 0`.
pub fn f_rate(p: &MacHelperParams, alpha: f64, beta: f64, power: f64) -> Result<f64> {
    if p.q == 0.0 {
        return Ok(f64::INFINITY);
    }
    let p0p = check_beta(p, beta)?;
    let q = p.q;
    if p0p == 0.0 {
        return Ok(if alpha == 0.0 {
            awgn(power / ((1.0 + beta).powi(2) * q + 1.0))
        } else {
            f64::NEG_INFINITY
        });
    }
    let den = p0p * q * (alpha - 1.0 - beta).powi(2) + p0p + alpha * alpha * q;
    Ok(log2_ratio(p0p * (p0p + (1.0 + beta).powi(2) * q + power + 1.0), den))
}

/// Rate of the user given the helper's auxiliary, `I(X;Y|other,U)`.
pub fn g_rate(p: &MacHelperParams, alpha: f64, beta: f64, power: f64) -> Result<f64> {
    if p.q == 0.0 {
        return Ok(awgn(power));
    }
    let p0p = check_beta(p, beta)?;
    let q = p.q;
    if p0p == 0.0 && alpha == 0.0 {
        return Ok(awgn(power / ((1.0 + beta).powi(2) * q + 1.0)));
    }
    let den = p0p * q * (alpha - 1.0 - beta).powi(2) + p0p + alpha * alpha * q;
    Ok(awgn(power * (p0p + alpha * alpha * q) / den))
}

/// `min(f, g)`: the inner bound on the constraint with power `power`.
pub fn inner_rate(p: &MacHelperParams, alpha: f64, beta: f64, power: f64) -> Result<f64> {
    Ok(f_rate(p, alpha, beta, power)?.min(g_rate(p, alpha, beta, power)?))
}

/// First term of the outer bound for correlation `rho` between helper input and state.
pub fn outer_term(p: &MacHelperParams, power: f64, rho: f64) -> f64 {
    let den = p.q + 2.0 * rho * (p.p0 * p.q).sqrt() + p.p0 + 1.0;
    awgn(power / den) + awgn(p.p0 - rho * rho * p.p0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoStar {
    pub rho: f64,
    pub value: f64,
}

/// Maximiser of [`outer_term`] over `rho ∈ [-1, 1]`.
pub fn rho_star(p: &MacHelperParams, power: f64) -> Result<RhoStar> {
    if p.p0 == 0.0 || p.q == 0.0 {
        return Ok(RhoStar {
            rho: 0.0,
            value: outer_term(p, power, 0.0),
        });
    }
    let m = maximize_1d(|r| outer_term(p, power, r), Interval::new(-1.0, 1.0)?, RHO_TOL)?;
    Ok(RhoStar { rho: m.x, value: m.value })
}

/// Coefficients that make `f` meet the outer bound: `β = ρ* sqrt(P0/Q)` and
/// `α = (1+β) P0' / (P0' + 1)`.
pub fn optimizer(p: &MacHelperParams, power: f64) -> Result<(MacCoefficients, RhoStar)> {
    let rs = rho_star(p, power)?;
    if p.q == 0.0 {
        return Ok((MacCoefficients { alpha: 0.0, beta: 0.0 }, rs));
    }
    let beta = (rs.rho * (p.p0 / p.q).sqrt()).clamp(-p.beta_bound(), p.beta_bound());
    let p0p = p.residual_helper_power(beta)?;
    let alpha = (1.0 + beta) * p0p / (p0p + 1.0);
    Ok((MacCoefficients { alpha, beta }, rs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacOuterPoint {
    pub rho: f64,
    pub m1: f64,
    pub m2: f64,
    pub m12: f64,
}

impl MacOuterPoint {
    pub fn pentagon(&self) -> Pentagon {
        Pentagon::new(self.m1, self.m2, self.m12)
    }
}

pub fn outer_point(p: &MacHelperParams, rho: f64) -> MacOuterPoint {
    let [a, b, c] = index_powers(p).map(|pw| outer_term(p, pw, rho).min(awgn(pw)));
    MacOuterPoint { rho, m1: a, m2: b, m12: c }
}

/// Union over a `rho` grid (plus the three maximisers) of the outer-bound pentagons.
pub fn outer_envelope(p: &MacHelperParams, rho_grid: usize) -> Result<RateRegion> {
    p.validate()?;
    if rho_grid < 3 {
        return Err(Error::InvalidGrid(format!("rho grid of {rho_grid} points")));
    }
    let mut rhos = Interval::new(-1.0, 1.0)?.grid(rho_grid);
    for pw in index_powers(p) {
        rhos.push(rho_star(p, pw)?.rho);
    }
    Ok(RateRegion::new(rhos.into_iter().map(|r| outer_point(p, r).pentagon()).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerGrid {
    pub alpha_points: usize,
    pub beta_points: usize,
    /// Local 2-D refinement around the best cell of each constraint.
    pub refine: bool,
}

impl Default for InnerGrid {
    fn default() -> Self {
        InnerGrid {
            alpha_points: ALPHA_GRID,
            beta_points: BETA_GRID,
            refine: true,
        }
    }
}

/// α window of the envelope grid: the full-cancellation window widened by 1 each side.
pub fn alpha_window(p: &MacHelperParams) -> Interval {
    let s = (p.p0 / p.q).sqrt();
    Interval { lo: -s, hi: 2.0 + s }
}

fn inner_pentagon(p: &MacHelperParams, alpha: f64, beta: f64) -> Result<Pentagon> {
    let [a, b, c] = index_powers(p);
    Ok(Pentagon::new(
        inner_rate(p, alpha, beta, a)?,
        inner_rate(p, alpha, beta, b)?,
        inner_rate(p, alpha, beta, c)?,
    ))
}

fn grid_pentagons(p: &MacHelperParams, alphas: &[f64], betas: &[f64]) -> Result<Vec<(f64, f64, Pentagon)>> {
    let row = |&alpha: &f64| -> Result<Vec<(f64, f64, Pentagon)>> {
        betas
            .iter()
            .map(|&beta| Ok((alpha, beta, inner_pentagon(p, alpha, beta)?)))
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<Vec<_>>> = alphas.par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<Vec<_>>> = alphas.iter().map(row).collect();
    let mut out = Vec::with_capacity(alphas.len() * betas.len());
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// Union of inner-bound pentagons over an (α, β) grid, the analytic optimisers of each
/// constraint, and the full-cancellation witnesses.
pub fn inner_envelope(p: &MacHelperParams, grid: InnerGrid) -> Result<RateRegion> {
    p.validate()?;
    if p.q == 0.0 {
        return Ok(RateRegion::single(Pentagon::gaussian_mac(p.p1, p.p2)));
    }
    if grid.alpha_points < 2 || grid.beta_points < 2 {
        return Err(Error::InvalidGrid(format!(
            "inner grid {}x{}",
            grid.alpha_points, grid.beta_points
        )));
    }
    let bx = alpha_window(p);
    let bound = p.beta_bound();
    let by = Interval::new(-bound, bound)?;
    let alphas = bx.grid(grid.alpha_points);
    let betas = by.grid(grid.beta_points);
    let cells = grid_pentagons(p, &alphas, &betas)?;

    let mut pentagons: Vec<Pentagon> = cells.iter().map(|c| c.2).collect();
    let powers = index_powers(p);

    if grid.refine {
        let (hx, hy) = (bx.width() / (grid.alpha_points - 1) as f64, by.width() / (grid.beta_points - 1) as f64);
        for (k, &pw) in powers.iter().enumerate() {
            let face = |pg: &Pentagon| [pg.m1, pg.m2, pg.m12][k];
            let best = cells
                .iter()
                .fold(None::<&(f64, f64, Pentagon)>, |b, c| match b {
                    Some(b) if face(&b.2) >= face(&c.2) => Some(b),
                    _ => Some(c),
                })
                .expect("non-empty grid");
            let lx = Interval::new((best.0 - hx).max(bx.lo), (best.0 + hx).min(bx.hi))?;
            let ly = Interval::new((best.1 - hy).max(by.lo), (best.1 + hy).min(by.hi))?;
            let m = maximize_2d_with(|a, b| inner_rate(p, a, b, pw).unwrap_or(f64::NEG_INFINITY), lx, ly, 1e-10, (9, 9))?;
            pentagons.push(inner_pentagon(p, m.x, m.y)?);
        }
    }
    for &pw in &powers {
        let (c, _) = optimizer(p, pw)?;
        pentagons.push(inner_pentagon(p, c.alpha, c.beta)?);
        let w = cancellation_witness(p, pw)?;
        if w.margin >= MARGIN_TOL {
            let beta = (w.alpha - 1.0).clamp(-bound, bound);
            pentagons.push(inner_pentagon(p, w.alpha, beta)?);
        }
    }
    Ok(RateRegion::new(pentagons))
}

/// Largest inner-bound rate for the constraint with power `power`, searched over the
/// envelope window and compared against the analytic optimiser and the cancellation witness.
pub fn inner_max(p: &MacHelperParams, power: f64) -> Result<Maximum2d> {
    p.validate()?;
    if p.q == 0.0 {
        return Ok(Maximum2d { x: 0.0, y: 0.0, value: awgn(power) });
    }
    let bound = p.beta_bound();
    let obj = |a: f64, b: f64| inner_rate(p, a, b, power).unwrap_or(f64::NEG_INFINITY);
    let mut best = maximize_2d(obj, alpha_window(p), Interval::new(-bound, bound)?, 1e-10)?;
    let (c, _) = optimizer(p, power)?;
    let w = cancellation_witness(p, power)?;
    let mut candidates = vec![(c.alpha, c.beta)];
    if w.margin >= MARGIN_TOL {
        candidates.push((w.alpha, (w.alpha - 1.0).clamp(-bound, bound)));
    }
    for (a, b) in candidates {
        let v = obj(a, b);
        if v > best.value {
            best = Maximum2d { x: a, y: b, value: v };
        }
    }
    Ok(best)
}

/// Margin of the full-cancellation condition at `alpha`:
/// `P0'² - α²Q(P+1-P0')` with `P0' = P0 - (α-1)²Q`.
pub fn cancellation_margin(p: &MacHelperParams, power: f64, alpha: f64) -> f64 {
    let p0p = p.p0 - (alpha - 1.0).powi(2) * p.q;
    p0p * p0p - alpha * alpha * p.q * (power + 1.0 - p0p)
}

/// `[1 - sqrt(P0/Q), 1 + sqrt(P0/Q)]`: the α values for which `β = α - 1` is affordable.
pub fn omega(p: &MacHelperParams) -> Interval {
    let s = (p.p0 / p.q).sqrt();
    Interval { lo: 1.0 - s, hi: 1.0 + s }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CancellationWitness {
    pub alpha: f64,
    /// Margin at `alpha` (units of power squared).
    pub margin: f64,
    /// Satisfied sub-intervals of the α window.
    pub intervals: Vec<Interval>,
}

/// Best α for the full-cancellation condition: `α = 0`, then `α = 1`, then the maximiser
/// of the margin over the window.
pub fn cancellation_witness(p: &MacHelperParams, power: f64) -> Result<CancellationWitness> {
    if p.q == 0.0 {
        return Ok(CancellationWitness {
            alpha: 0.0,
            margin: p.p0 * p.p0,
            intervals: Vec::new(),
        });
    }
    let w = omega(p);
    let margin = |a: f64| cancellation_margin(p, power, a);
    let intervals = satisfied_intervals(margin, w, OMEGA_GRID);
    for a in [0.0, 1.0] {
        if w.contains(a) && margin(a) >= MARGIN_TOL {
            return Ok(CancellationWitness {
                alpha: a,
                margin: margin(a),
                intervals,
            });
        }
    }
    let m = maximize_1d_with(margin, w, 1e-12, OMEGA_GRID)?;
    Ok(CancellationWitness {
        alpha: m.x,
        margin: m.value,
        intervals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// The inner bound meets the outer bound's first term at the optimiser.
    A,
    /// Neither characterisation applies.
    B,
    /// The state can be fully cancelled for this constraint.
    C,
}

impl Label {
    fn rank(self) -> u8 {
        match self {
            Label::A => 0,
            Label::B => 1,
            Label::C => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexClass {
    pub index: u8,
    pub power: f64,
    pub label: Label,
    pub rho_star: f64,
    pub coefficients: MacCoefficients,
    /// `g - f` at the optimiser (bits); `A` needs this `>= -1e-9`.
    pub a_margin: f64,
    /// Full-cancellation margin at the best α (power squared); `C` needs `>= -1e-9`.
    pub c_margin: f64,
    pub c_witness: Option<f64>,
    pub c_intervals: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacClassification {
    pub labels: [Label; 3],
    pub indices: Vec<IndexClass>,
}

impl MacClassification {
    pub fn case(&self) -> Option<u8> {
        case_index(self.labels)
    }
}

/// Position of a label triple in the 19-case list: the 18 cases with the sum constraint
/// not fully cancellable (sum label, then `R1`, then `R2`, each ordered A, B, C), then the
/// all-C case as 19. Incoherent triples (sum C without both singles C) give `None`.
pub fn case_index(labels: [Label; 3]) -> Option<u8> {
    let [l1, l2, l3] = labels;
    if l3 == Label::C {
        return (l1 == Label::C && l2 == Label::C).then_some(19);
    }
    Some(l3.rank() * 9 + l1.rank() * 3 + l2.rank() + 1)
}

fn classify_index(p: &MacHelperParams, index: u8, power: f64) -> Result<IndexClass> {
    let w = cancellation_witness(p, power)?;
    let (coefficients, rs) = optimizer(p, power)?;
    let f = f_rate(p, coefficients.alpha, coefficients.beta, power)?;
    let g = g_rate(p, coefficients.alpha, coefficients.beta, power)?;
    let a_margin = if f.is_infinite() && g.is_infinite() { 0.0 } else { g - f };
    let passed_c = w.margin >= MARGIN_TOL;
    let label = if passed_c {
        Label::C
    } else if a_margin >= MARGIN_TOL {
        Label::A
    } else {
        Label::B
    };
    Ok(IndexClass {
        index,
        power,
        label,
        rho_star: rs.rho,
        coefficients,
        a_margin,
        c_margin: w.margin,
        c_witness: passed_c.then_some(w.alpha),
        c_intervals: w.intervals,
    })
}

pub fn classify(p: &MacHelperParams) -> Result<MacClassification> {
    p.validate()?;
    let powers = index_powers(p);
    let indices = (0..3)
        .map(|k| classify_index(p, k as u8 + 1, powers[k]))
        .collect::<Result<Vec<_>>>()?;
    let labels = [indices[0].label, indices[1].label, indices[2].label];
    Ok(MacClassification { labels, indices })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullCapacity {
    pub report: ConditionReport,
    /// The no-state MAC region, which is the capacity region when the check passes.
    pub region: Option<Pentagon>,
}

/// Whether the helper can cancel the state for the sum constraint, in which case the
/// whole no-state MAC region is achievable.
pub fn full_capacity_check(p: &MacHelperParams) -> Result<FullCapacity> {
    p.validate()?;
    let w = cancellation_witness(p, p.p1 + p.p2)?;
    let mut report = ConditionReport::new("full_capacity", w.margin)
        .with_units("power^2")
        .witness("alpha", w.alpha);
    if p.q > 0.0 {
        let om = omega(p);
        report = report.witness("omega_lo", om.lo).witness("omega_hi", om.hi);
    }
    let region = report.passed.then(|| Pentagon::gaussian_mac(p.p1, p.p2));
    Ok(FullCapacity { report, region })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub index: u8,
    pub constraint: String,
    pub label: Label,
    /// Value of the characterised capacity face (bits); `None` for label B.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub case: Option<u8>,
    pub labels: [Label; 3],
    pub segments: Vec<Segment>,
}

pub fn capacity_segments(p: &MacHelperParams) -> Result<SegmentReport> {
    let cls = classify(p)?;
    let names = ["r1", "r2", "sum"];
    let mut segments = Vec::with_capacity(3);
    for ic in &cls.indices {
        let value = match ic.label {
            Label::C => Some(awgn(ic.power)),
            Label::A => Some(f_rate(p, ic.coefficients.alpha, ic.coefficients.beta, ic.power)?),
            Label::B => None,
        };
        segments.push(Segment {
            index: ic.index,
            constraint: names[ic.index as usize - 1].into(),
            label: ic.label,
            value,
        });
    }
    Ok(SegmentReport {
        case: cls.case(),
        labels: cls.labels,
        segments,
    })
}
