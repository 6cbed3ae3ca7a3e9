//! Rate-region geometry and export.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Slack used when comparing rates that come from the same arithmetic.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        RatePoint { r1, r2 }
    }
}

/// `{r1 <= m1, r2 <= m2, r1 + r2 <= m12, r >= 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pentagon {
    pub m1: f64,
    pub m2: f64,
    pub m12: f64,
}

fn clamp0(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

impl Pentagon {
    /// Negative, `-inf` and NaN bounds become 0 (an empty face).
    pub fn new(m1: f64, m2: f64, m12: f64) -> Self {
        Pentagon {
            m1: clamp0(m1),
            m2: clamp0(m2),
            m12: clamp0(m12),
        }
    }

    /// The no-state MAC region `½log(1+P1)`, `½log(1+P2)`, `½log(1+P1+P2)`.
    pub fn gaussian_mac(p1: f64, p2: f64) -> Self {
        Pentagon::new(awgn(p1), awgn(p2), awgn(p1 + p2))
    }

    /// Largest achievable `r1` (the sum bound may be the tighter one).
    pub fn max_r1(&self) -> f64 {
        self.m1.min(self.m12)
    }

    pub fn max_r2(&self) -> f64 {
        self.m2.min(self.m12)
    }

    pub fn max_sum(&self) -> f64 {
        self.m12.min(self.max_r1() + self.max_r2())
    }

    /// `min(m1 - r1, m2 - r2, m12 - r1 - r2)`; nonnegative iff inside (for `r >= 0`).
    pub fn margin(&self, p: RatePoint) -> f64 {
        (self.m1 - p.r1).min(self.m2 - p.r2).min(self.m12 - p.r1 - p.r2)
    }

    pub fn contains(&self, p: RatePoint) -> bool {
        p.r1 >= -EPS && p.r2 >= -EPS && self.margin(p) >= -1e-9
    }

    /// Largest `r2` with `(r1, r2)` inside, or `None` when `r1` is past the region.
    pub fn r2_at(&self, r1: f64) -> Option<f64> {
        if r1 > self.max_r1() + EPS || r1 < 0.0 {
            None
        } else {
            Some(self.m2.min(self.m12 - r1).max(0.0))
        }
    }

    /// Vertices counterclockwise from the origin, without repeats.
    pub fn vertices(&self) -> Vec<RatePoint> {
        let e1 = self.max_r1();
        let e2 = self.max_r2();
        let raw = [
            RatePoint::new(0.0, 0.0),
            RatePoint::new(e1, 0.0),
            RatePoint::new(e1, e2.min(self.m12 - e1).max(0.0)),
            RatePoint::new(e1.min(self.m12 - e2).max(0.0), e2),
            RatePoint::new(0.0, e2),
        ];
        let mut out: Vec<RatePoint> = Vec::with_capacity(5);
        for v in raw {
            let dup = out
                .last()
                .is_some_and(|l| (l.r1 - v.r1).abs() <= EPS && (l.r2 - v.r2).abs() <= EPS);
            if !dup {
                out.push(v);
            }
        }
        if out.len() > 1 {
            let (f, l) = (out[0], out[out.len() - 1]);
            if (f.r1 - l.r1).abs() <= EPS && (f.r2 - l.r2).abs() <= EPS {
                out.pop();
            }
        }
        out
    }
}

/// `½ log2(1 + snr)`.
pub fn awgn(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

/// Which constraint fixes `r2` at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    R2,
    Sum,
    TimeSharing,
}

impl Binding {
    pub fn as_str(self) -> &'static str {
        match self {
            Binding::R2 => "r2",
            Binding::Sum => "sum",
            Binding::TimeSharing => "time_sharing",
        }
    }
}

/// Boundary sampled on an `r1` grid: `r1` strictly increasing, `r2` nonincreasing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub points: Vec<RatePoint>,
    pub binding: Vec<Binding>,
}

impl BoundaryCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, p: RatePoint, b: Binding) {
        self.points.push(p);
        self.binding.push(b);
    }

    /// Boundary value at `r1` by linear interpolation; `None` past the last point.
    pub fn r2_at(&self, r1: f64) -> Option<f64> {
        let pts = &self.points;
        let last = pts.last()?;
        if r1 > last.r1 + EPS || r1 < pts[0].r1 - EPS {
            return None;
        }
        let i = pts.partition_point(|p| p.r1 < r1);
        if i == 0 {
            return Some(pts[0].r2);
        }
        if i >= pts.len() {
            return Some(last.r2);
        }
        let (a, b) = (pts[i - 1], pts[i]);
        let t = (r1 - a.r1) / (b.r1 - a.r1);
        Some(a.r2 + t * (b.r2 - a.r2))
    }
}

/// Upper boundary of the union of `pentagons` on `r1_grid` equally spaced points from 0
/// to the largest achievable `r1`.
pub fn upper_envelope(pentagons: &[Pentagon], r1_grid: usize) -> Result<BoundaryCurve> {
    if pentagons.is_empty() {
        return Err(Error::EmptyInput("upper_envelope needs at least one pentagon"));
    }
    if r1_grid < 2 {
        return Err(Error::InvalidGrid(format!("r1 grid of {r1_grid} points")));
    }
    let r1_max = pentagons.iter().map(Pentagon::max_r1).fold(0.0, f64::max);
    let mut curve = BoundaryCurve::default();
    if r1_max <= 0.0 {
        let r2 = pentagons.iter().map(Pentagon::max_r2).fold(0.0, f64::max);
        curve.push(RatePoint::new(0.0, r2), Binding::R2);
        return Ok(curve);
    }
    let mut prev = f64::INFINITY;
    for i in 0..r1_grid {
        let r1 = if i + 1 == r1_grid {
            r1_max
        } else {
            r1_max * i as f64 / (r1_grid - 1) as f64
        };
        let mut best: Option<(f64, Binding)> = None;
        for p in pentagons {
            if let Some(r2) = p.r2_at(r1) {
                let bind = if p.m2 <= p.m12 - r1 { Binding::R2 } else { Binding::Sum };
                if best.is_none_or(|(b, _)| r2 > b) {
                    best = Some((r2, bind));
                }
            }
        }
        let (r2, bind) = best.expect("r1 within the largest pentagon");
        let r2 = r2.min(prev);
        prev = r2;
        curve.push(RatePoint::new(r1, r2), bind);
    }
    Ok(curve)
}

/// Upper concave envelope (time sharing), resampled on the same `r1` values. Points that
/// move up are labelled [`Binding::TimeSharing`].
pub fn convexify(curve: &BoundaryCurve) -> BoundaryCurve {
    let pts = &curve.points;
    if pts.len() < 2 {
        return curve.clone();
    }
    let mut anchors: Vec<RatePoint> = pts.clone();
    let last = pts[pts.len() - 1];
    if last.r2 > 0.0 {
        anchors.push(RatePoint::new(last.r1, 0.0));
    }
    // Monotone chain, upper hull, left to right.
    let mut hull: Vec<RatePoint> = Vec::new();
    for &p in &anchors {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let hull_curve = BoundaryCurve {
        binding: vec![Binding::TimeSharing; hull.len()],
        points: hull,
    };
    let mut out = BoundaryCurve::default();
    for (p, &b) in pts.iter().zip(&curve.binding) {
        let h = hull_curve.r2_at(p.r1).unwrap_or(p.r2).max(p.r2);
        let bind = if h > p.r2 + 1e-12 { Binding::TimeSharing } else { b };
        out.push(RatePoint::new(p.r1, h), bind);
    }
    out
}

/// Union of pentagons.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateRegion {
    pub pentagons: Vec<Pentagon>,
}

impl RateRegion {
    pub fn new(pentagons: Vec<Pentagon>) -> Self {
        RateRegion { pentagons }
    }

    pub fn single(p: Pentagon) -> Self {
        RateRegion { pentagons: vec![p] }
    }

    pub fn max_r1(&self) -> f64 {
        self.pentagons.iter().map(Pentagon::max_r1).fold(0.0, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.pentagons.iter().map(Pentagon::max_r2).fold(0.0, f64::max)
    }

    pub fn max_sum(&self) -> f64 {
        self.pentagons.iter().map(Pentagon::max_sum).fold(0.0, f64::max)
    }

    pub fn margin(&self, p: RatePoint) -> f64 {
        self.pentagons
            .iter()
            .map(|q| q.margin(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: RatePoint) -> bool {
        self.pentagons.iter().any(|q| q.contains(p))
    }

    pub fn boundary(&self, r1_grid: usize) -> Result<BoundaryCurve> {
        upper_envelope(&self.pentagons, r1_grid)
    }
}

/// Formats with 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub const CSV_HEADER: &str = "r1_bits,r2_bits,binding";

pub fn curve_to_csv(curve: &BoundaryCurve) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (p, b) in curve.points.iter().zip(&curve.binding) {
        let _ = writeln!(s, "{},{},{}", fmt_sig(p.r1), fmt_sig(p.r2), b.as_str());
    }
    s
}

pub fn export_csv<W: Write>(curve: &BoundaryCurve, mut dest: W) -> Result<()> {
    dest.write_all(curve_to_csv(curve).as_bytes())?;
    Ok(dest.flush()?)
}

/// Generic numeric table with the same number formatting as rate curves.
pub fn table_to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesStyle {
    Line,
    Markers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

impl Series {
    pub fn line(name: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
            style: SeriesStyle::Line,
        }
    }

    pub fn markers(name: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
            style: SeriesStyle::Markers,
        }
    }

    pub fn from_curve(name: &str, curve: &BoundaryCurve) -> Self {
        let mut pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.r1, p.r2)).collect();
        if let Some(&(x, y)) = pts.last() {
            if y > 0.0 {
                pts.push((x, 0.0));
            }
        }
        Series::line(name, pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Axis ranges; computed from the data when absent.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

impl PlotSpec {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        PlotSpec {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            x_range: None,
            y_range: None,
        }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range_of(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

/// Standalone SVG document, 800×600 viewBox, coordinates rounded to 0.01 px.
pub fn render_svg(spec: &PlotSpec) -> String {
    let all = || spec.series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = spec.x_range.unwrap_or_else(|| range_of(all().map(|p| p.0)));
    let (y0, y1) = spec.y_range.unwrap_or_else(|| {
        let (lo, hi) = range_of(all().map(|p| p.1));
        (lo.min(0.0), hi + 0.05 * (hi - lo.min(0.0)))
    });
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            fmt_sig((t * 1e6).round() / 1e6)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            fmt_sig((t * 1e6).round() / 1e6)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&spec.y_label)
    );
    let _ = writeln!(
        s,
        r#"<clipPath id="plot-area"><rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}"/></clipPath>"#
    );
    let mut legend = String::new();
    s.push_str("<g clip-path=\"url(#plot-area)\">\n");
    for (i, series) in spec.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let finite: Vec<(f64, f64)> = series
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        match series.style {
            SeriesStyle::Line => {
                let mut pts = String::new();
                for (k, (x, y)) in finite.iter().enumerate() {
                    if k > 0 {
                        pts.push(' ');
                    }
                    let _ = write!(pts, "{:.2},{:.2}", sx(*x), sy(*y));
                }
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>"#
                );
            }
            SeriesStyle::Markers => {
                for (x, y) in &finite {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                        sx(*x),
                        sy(*y)
                    );
                }
            }
        }
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            legend,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</g>\n");
    s.push_str(&legend);
    s.push_str("</svg>\n");
    s
}

pub fn export_svg<W: Write>(spec: &PlotSpec, mut dest: W) -> Result<()> {
    dest.write_all(render_svg(spec).as_bytes())?;
    Ok(dest.flush()?)
}
