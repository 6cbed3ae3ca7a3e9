//! Named figure presets. Each one fixes its channel parameters and grids, evaluates the
//! models, and renders a CSV table and an SVG plot. Output is a pure function of the
//! preset name.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{IcParams, MacHelperParams, ZicParams};
use crate::error::{Error, Result};
use crate::ic::{ic_strong_segment, ic_vs_capacity, ic_vs_conditions};
use crate::mac_helper::{classify, inner_max, rho_star, Label};
use crate::region::{awgn, fmt_sig, render_svg, table_to_csv, PlotSpec, Series};
use crate::search::{satisfied_intervals, Interval};
use crate::z_ic::{min_passing_gain, very_strong_gate, zic_strong_segment, zic_vs_condition};

pub const PRESETS: [&str; 8] = [
    "fig2_2", "fig2_3", "fig3_2", "fig3_3", "fig3_5", "fig4_2", "fig4_3", "fig4_5",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Figure {
    pub name: String,
    pub csv: String,
    pub svg: String,
}

pub fn render(name: &str) -> Result<Figure> {
    let (csv, spec) = match name {
        "fig2_2" => fig2_2()?,
        "fig2_3" => fig2_3()?,
        "fig3_2" => fig3_2()?,
        "fig3_3" => fig3_3()?,
        "fig3_5" => fig3_5()?,
        "fig4_2" => fig4_2()?,
        "fig4_3" => fig4_3()?,
        "fig4_5" => fig4_5()?,
        _ => {
            return Err(Error::InvalidGrid(format!(
                "unknown figure preset {name:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(Figure {
        name: name.into(),
        csv,
        svg: render_svg(&spec),
    })
}

fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

/// `lo, lo + step, ...` up to `hi`, computed from the index to avoid drift.
pub fn stepped(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

// ---- MAC with a helper ----

pub const FIG2_2_POWER: f64 = 5.0;
pub const FIG2_2_Q: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HelperSweepRow {
    pub p0: f64,
    /// Best inner-bound `R1`.
    pub inner: f64,
    /// Maximised first term of the outer bound.
    pub outer_first: f64,
    /// `min(outer_first, ½log(1+P1))`.
    pub outer: f64,
    /// `½log(1+P1)`: the rate without state.
    pub no_state: f64,
}

/// Single-user helper sweep (`P1 = 5`, `P2 = 0`, `Q = 12`) over the helper power.
pub fn helper_sweep(p0s: &[f64]) -> Result<Vec<HelperSweepRow>> {
    par_map(p0s, |&p0| {
        let p = MacHelperParams::new(p0, FIG2_2_POWER, 0.0, FIG2_2_Q)?;
        let inner = inner_max(&p, p.p1)?.value;
        let outer_first = rho_star(&p, p.p1)?.value;
        let no_state = awgn(p.p1);
        Ok(HelperSweepRow {
            p0,
            inner,
            outer_first,
            outer: outer_first.min(no_state),
            no_state,
        })
    })
    .into_iter()
    .collect()
}

fn fig2_2() -> Result<(String, PlotSpec)> {
    let rows = helper_sweep(&stepped(0.0, 10.0, 0.1))?;
    let csv = table_to_csv(
        &["p0", "inner_r1_bits", "outer_first_term_bits", "outer_r1_bits", "no_state_bits"],
        &rows
            .iter()
            .map(|r| vec![fmt_sig(r.p0), fmt_sig(r.inner), fmt_sig(r.outer_first), fmt_sig(r.outer), fmt_sig(r.no_state)])
            .collect::<Vec<_>>(),
    );
    let col = |f: fn(&HelperSweepRow) -> f64| rows.iter().map(|r| (r.p0, f(r))).collect::<Vec<_>>();
    let spec = PlotSpec::new("Helper MAC: bounds on R1 (P1 = 5, Q = 12)", "helper power P0", "R1 (bits)")
        .with(Series::line("inner bound", col(|r| r.inner)))
        .with(Series::line("outer bound, first term", col(|r| r.outer_first)))
        .with(Series::line("no-state rate", col(|r| r.no_state)));
    Ok((csv, spec))
}

fn fig2_3() -> Result<(String, PlotSpec)> {
    let mut cells = Vec::new();
    for q in stepped(0.5, 20.0, 0.5) {
        for p0 in stepped(0.0, 20.0, 0.5) {
            cells.push((q, p0));
        }
    }
    let labels = par_map(&cells, |&(q, p0)| -> Result<_> {
        let p = MacHelperParams::new(p0, FIG2_2_POWER, 0.0, q)?;
        Ok(classify(&p)?.indices[0].clone())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&labels)
        .map(|(&(q, p0), ic)| {
            vec![
                fmt_sig(q),
                fmt_sig(p0),
                format!("{:?}", ic.label),
                fmt_sig(ic.a_margin),
                fmt_sig(ic.c_margin),
            ]
        })
        .collect();
    let csv = table_to_csv(&["q", "p0", "label", "a_margin_bits", "c_margin"], &rows);
    let pick = |l: Label| {
        cells
            .iter()
            .zip(&labels)
            .filter(|(_, ic)| ic.label == l)
            .map(|(&c, _)| c)
            .collect::<Vec<_>>()
    };
    let spec = PlotSpec::new("Helper MAC: characterised parameters (P = 5)", "state power Q", "helper power P0")
        .with(Series::markers("full cancellation (C)", pick(Label::C)))
        .with(Series::markers("outer bound met (A)", pick(Label::A)))
        .with(Series::markers("open (B)", pick(Label::B)));
    Ok((csv, spec))
}

// ---- Z-IC, very strong ----

fn gain_map(title: &str, q1: f64, q2: f64, a_hi: f64, a_step: f64) -> Result<(String, PlotSpec)> {
    let mut cells = Vec::new();
    // S1 = d S2 + S1' needs d <= sqrt(Q1/Q2)
    let d_axis = Interval { lo: 0.0, hi: (q1 / q2).sqrt() }.grid(21);
    for &d in &d_axis {
        for a in stepped(0.0, a_hi, a_step) {
            cells.push((d, a));
        }
    }
    let evals = par_map(&cells, |&(d, a)| -> Result<(bool, f64)> {
        let p = ZicParams::with_forward(a, 2.0, 2.0, q1, q2, d)?;
        Ok((very_strong_gate(&p).is_ok(), zic_vs_condition(&p)?.margin))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let pass = |(gate, margin): (bool, f64)| gate && margin >= crate::report::MARGIN_TOL;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&evals)
        .map(|(&(d, a), &e)| {
            vec![
                fmt_sig(d),
                fmt_sig(a),
                u8::from(e.0).to_string(),
                fmt_sig(e.1),
                u8::from(pass(e)).to_string(),
            ]
        })
        .collect();
    let csv = table_to_csv(&["d", "a", "gate", "margin_bits", "pass"], &rows);
    let passing: Vec<(f64, f64)> = cells
        .iter()
        .zip(&evals)
        .filter(|(_, &e)| pass(e))
        .map(|(&(d, a), _)| (a, d))
        .collect();
    let spec = PlotSpec::new(title, "cross gain a", "state correlation d")
        .with(Series::markers("capacity without state reached", passing));
    Ok((csv, spec))
}

/// Smallest passing `a` per correlation `d` at `P1 = P2 = 2`, `Q1 = Q2 = 1`.
pub fn min_gain_curve(ds: &[f64], tol: f64) -> Result<Vec<(f64, Option<f64>)>> {
    par_map(ds, |&d| {
        let p = ZicParams::with_forward(2.0, 2.0, 2.0, 1.0, 1.0, d)?;
        Ok((d, min_passing_gain(&p, 1e3, tol)?))
    })
    .into_iter()
    .collect()
}

fn fig3_2() -> Result<(String, PlotSpec)> {
    let (csv, mut spec) = gain_map("Z-IC very strong: (a, d) with Q1 = Q2 = 1", 1.0, 1.0, 6.0, 0.05)?;
    let curve = min_gain_curve(&stepped(0.0, 1.0, 0.05), 1e-4)?;
    spec = spec.with(Series::line(
        "smallest passing a",
        curve.iter().filter_map(|&(d, a)| a.map(|a| (a, d))).collect(),
    ));
    Ok((csv, spec))
}

fn fig3_3() -> Result<(String, PlotSpec)> {
    gain_map("Z-IC very strong: (a, d) with Q1 = 4, Q2 = 2", 4.0, 2.0, 16.0, 0.1)
}

// ---- Z-IC and IC, strong ----

pub const FIG3_5_GAIN: f64 = 1.2;
pub const FIG3_5_Q1: f64 = 2.0;
pub const FIG3_5_Q2: f64 = 1.0;
/// Cross gain toward receiver 1 in the IC comparison.
pub const FIG4_5_B: f64 = 1.2;

/// The strong Z-IC with `S2 = c S1 + S2'` and `Q2 = 1` fixed, so `c <= 1/sqrt(Q1)`.
pub fn strong_zic(c: f64) -> Result<ZicParams> {
    ZicParams::with_backward(FIG3_5_GAIN, 1.0, 1.0, FIG3_5_Q1, FIG3_5_Q2, c)
}

pub fn strong_c_grid() -> Vec<f64> {
    Interval {
        lo: 0.0,
        hi: (FIG3_5_Q2 / FIG3_5_Q1).sqrt(),
    }
    .grid(21)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentRow {
    pub c: f64,
    pub passing_points: usize,
    pub r1_range: Option<(f64, f64)>,
}

pub fn zic_segment_rows(cs: &[f64]) -> Result<Vec<SegmentRow>> {
    par_map(cs, |&c| {
        let s = zic_strong_segment(&strong_zic(c)?)?;
        Ok(SegmentRow {
            c,
            passing_points: s.passing_points,
            r1_range: s.r1_range,
        })
    })
    .into_iter()
    .collect()
}

pub fn ic_segment_rows(cs: &[f64], b: f64) -> Result<Vec<SegmentRow>> {
    par_map(cs, |&c| {
        let z = strong_zic(c)?;
        let s = ic_strong_segment(&IcParams { b, ..z.as_ic() })?;
        Ok(SegmentRow {
            c,
            passing_points: s.passing_points,
            r1_range: s.r1_range,
        })
    })
    .into_iter()
    .collect()
}

fn range_series(name_lo: &str, name_hi: &str, rows: &[SegmentRow]) -> [Series; 2] {
    let lo = rows.iter().filter_map(|r| r.r1_range.map(|x| (r.c, x.0))).collect();
    let hi = rows.iter().filter_map(|r| r.r1_range.map(|x| (r.c, x.1))).collect();
    [Series::markers(name_lo, lo), Series::markers(name_hi, hi)]
}

fn fig3_5() -> Result<(String, PlotSpec)> {
    let rows = zic_segment_rows(&strong_c_grid())?;
    let csv = table_to_csv(
        &["c", "passing_points", "r1_lo_bits", "r1_hi_bits"],
        &rows
            .iter()
            .map(|r| {
                vec![
                    fmt_sig(r.c),
                    r.passing_points.to_string(),
                    opt(r.r1_range.map(|x| x.0)),
                    opt(r.r1_range.map(|x| x.1)),
                ]
            })
            .collect::<Vec<_>>(),
    );
    let [lo, hi] = range_series("segment start R1", "segment end R1", &rows);
    let spec = PlotSpec::new("Strong Z-IC: achievable sum-capacity segment vs c", "c", "R1 (bits)")
        .with(lo)
        .with(hi);
    Ok((csv, spec))
}

fn fig4_5() -> Result<(String, PlotSpec)> {
    let cs = strong_c_grid();
    let z = zic_segment_rows(&cs)?;
    let ic = ic_segment_rows(&cs, FIG4_5_B)?;
    let rows: Vec<Vec<String>> = z
        .iter()
        .zip(&ic)
        .map(|(z, i)| {
            vec![
                fmt_sig(z.c),
                z.passing_points.to_string(),
                opt(z.r1_range.map(|x| x.0)),
                opt(z.r1_range.map(|x| x.1)),
                i.passing_points.to_string(),
                opt(i.r1_range.map(|x| x.0)),
                opt(i.r1_range.map(|x| x.1)),
            ]
        })
        .collect();
    let csv = table_to_csv(
        &["c", "zic_points", "zic_r1_lo_bits", "zic_r1_hi_bits", "ic_points", "ic_r1_lo_bits", "ic_r1_hi_bits"],
        &rows,
    );
    let [zl, zh] = range_series("Z-IC start", "Z-IC end", &z);
    let [il, ih] = range_series("IC start", "IC end", &ic);
    let spec = PlotSpec::new("Strong regime segments: IC (b = 1.2) vs Z-IC", "c", "R1 (bits)")
        .with(zl)
        .with(zh)
        .with(il)
        .with(ih);
    Ok((csv, spec))
}

// ---- IC, very strong ----

pub const FIG4_2_GAIN: f64 = 1.6;
pub const FIG4_2_Q: f64 = 0.9;
pub const FIG4_2_D: [f64; 3] = [0.99, 0.5, 0.1];
/// Upper end of the `b` axis.
pub const FIG4_2_B_MAX: f64 = 4.4;

pub fn ic_vs_params(a: f64, b: f64, d: f64) -> Result<IcParams> {
    IcParams::with_forward(a, b, 1.0, 1.0, FIG4_2_Q, FIG4_2_Q, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionRow {
    pub b: f64,
    /// `I(U;Y2) - I(U;S1,S2)` and its target `½log(1+P1)`.
    pub lhs_u: f64,
    /// `I(V;Y1) - I(V;S1,S2)` and its target `½log(1+P2)`.
    pub lhs_v: f64,
    pub target_u: f64,
    pub target_v: f64,
}

/// Condition curves against `b`; points where the coefficient system is singular are
/// omitted.
pub fn condition_curves(d: f64, bs: &[f64]) -> Result<Vec<ConditionRow>> {
    let rows = par_map(bs, |&b| -> Result<Option<ConditionRow>> {
        let p = ic_vs_params(FIG4_2_GAIN, b, d)?;
        match ic_vs_conditions(&p) {
            Ok((u, v)) => Ok(Some(ConditionRow {
                b,
                lhs_u: u.margin + awgn(p.p1),
                lhs_v: v.margin + awgn(p.p2),
                target_u: awgn(p.p1),
                target_v: awgn(p.p2),
            })),
            Err(Error::SingularCoefficients { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

/// Maximal `b` intervals of `[0, b_max]` on which the receiver-2 condition holds.
pub fn receiver2_intervals(d: f64, b_max: f64, grid: usize) -> Result<Vec<Interval>> {
    let margin = |b: f64| match ic_vs_params(FIG4_2_GAIN, b, d).and_then(|p| ic_vs_conditions(&p)) {
        Ok((u, _)) => u.margin,
        Err(_) => f64::NAN,
    };
    Ok(satisfied_intervals(margin, Interval::new(0.0, b_max)?, grid))
}

fn fig4_2() -> Result<(String, PlotSpec)> {
    let bs = stepped(0.0, FIG4_2_B_MAX, 0.01);
    let mut rows = Vec::new();
    let mut spec = PlotSpec::new("IC very strong: conditions vs b (a = 1.6)", "b", "bits");
    spec.y_range = Some((0.0, 2.0));
    for d in FIG4_2_D {
        let curve = condition_curves(d, &bs)?;
        for r in &curve {
            rows.push(vec![
                fmt_sig(d),
                fmt_sig(r.b),
                fmt_sig(r.lhs_u),
                fmt_sig(r.target_u),
                fmt_sig(r.lhs_v),
                fmt_sig(r.target_v),
            ]);
        }
        spec = spec
            .with(Series::line(&format!("receiver 2, d = {d}"), curve.iter().map(|r| (r.b, r.lhs_u)).collect()))
            .with(Series::line(&format!("receiver 1, d = {d}"), curve.iter().map(|r| (r.b, r.lhs_v)).collect()));
    }
    spec = spec.with(Series::line("½log(1+P)", vec![(0.0, awgn(1.0)), (FIG4_2_B_MAX, awgn(1.0))]));
    let csv = table_to_csv(&["d", "b", "lhs_u_bits", "target_u_bits", "lhs_v_bits", "target_v_bits"], &rows);
    Ok((csv, spec))
}

/// Whether the very-strong IC capacity holds: gate, nonsingular coefficients, both conditions.
pub fn ic_capacity_holds(a: f64, b: f64, d: f64) -> Result<bool> {
    let p = ic_vs_params(a, b, d)?;
    match ic_vs_capacity(&p) {
        Ok(r) => Ok(r.region.is_some()),
        Err(Error::RegimeGate { .. } | Error::SingularCoefficients { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

fn fig4_3() -> Result<(String, PlotSpec)> {
    let axis = Interval::new(0.0, 5.0)?.grid(51);
    let mut cells = Vec::new();
    for &d in FIG4_2_D.iter().rev() {
        for &a in &axis {
            for &b in &axis {
                cells.push((d, a, b));
            }
        }
    }
    let pass = par_map(&cells, |&(d, a, b)| ic_capacity_holds(a, b, d))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&pass)
        .map(|(&(d, a, b), &ok)| vec![fmt_sig(d), fmt_sig(a), fmt_sig(b), u8::from(ok).to_string()])
        .collect();
    let csv = table_to_csv(&["d", "a", "b", "pass"], &rows);
    let mut spec = PlotSpec::new("IC very strong: (a, b) reaching capacity without state", "a", "b");
    spec.x_range = Some((0.0, 5.0));
    spec.y_range = Some((0.0, 5.0));
    for &d in FIG4_2_D.iter().rev() {
        let pts = cells
            .iter()
            .zip(&pass)
            .filter(|(c, &ok)| ok && c.0 == d)
            .map(|(&(_, a, b), _)| (a, b))
            .collect();
        spec = spec.with(Series::markers(&format!("d = {d}"), pts));
    }
    Ok((csv, spec))
}
