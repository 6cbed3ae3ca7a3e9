//! Deterministic scalar optimisation and condition-interval finding.
//!
//! Every routine here is a fixed grid scan followed by a local refinement, so
//! identical inputs give bit-identical outputs. Objectives may return
//! `f64::NEG_INFINITY` to mark infeasible points; `NaN` and `+inf` are errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coarse grid used by [`maximize_1d`].
pub const GRID_1D: usize = 1025;
/// Coarse grid (x, y) used by [`maximize_2d`].
pub const GRID_2D: (usize, usize) = (257, 129);
/// Maximum alternating rounds in the 2-D refinement.
pub const MAX_ROUNDS_2D: usize = 64;
/// Width to which sign changes are bracketed.
pub const BISECT_WIDTH: f64 = 1e-8;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidGrid(format!("interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `n` evenly spaced points including both ends (a single point when `lo == hi`).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        if n <= 1 || self.lo == self.hi {
            return vec![self.lo];
        }
        let step = self.width() / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Maximum1d {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Maximum2d {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

fn checked(value: f64, at: &[f64]) -> Result<f64> {
    if value.is_nan() || value == f64::INFINITY {
        Err(Error::NonFinite {
            value,
            at: at.to_vec(),
        })
    } else {
        Ok(value)
    }
}

/// Maximises `objective` on `interval`: a [`GRID_1D`]-point scan, then golden-section
/// refinement on the bracket around the best sample. Ties go to the smaller `x`.
pub fn maximize_1d<F>(objective: F, interval: Interval, tol: f64) -> Result<Maximum1d>
where
    F: Fn(f64) -> f64,
{
    maximize_1d_with(objective, interval, tol, GRID_1D)
}

pub fn maximize_1d_with<F>(objective: F, interval: Interval, tol: f64, grid: usize) -> Result<Maximum1d>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidGrid(format!("tolerance {tol} must be positive")));
    }
    let xs = interval.grid(grid.max(2));
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let v = checked(objective(x), &[x])?;
        if v > best_v || i == 0 {
            best = i;
            best_v = v;
        }
    }
    if xs.len() == 1 || best_v == f64::NEG_INFINITY {
        return Ok(Maximum1d { x: xs[best], value: best_v });
    }

    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(xs.len() - 1)];
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = checked(objective(c), &[c])?;
    let mut fd = checked(objective(d), &[d])?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = checked(objective(c), &[c])?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = checked(objective(d), &[d])?;
        }
    }
    let x = 0.5 * (a + b);
    let v = checked(objective(x), &[x])?;
    if v > best_v {
        Ok(Maximum1d { x, value: v })
    } else {
        Ok(Maximum1d { x: xs[best], value: best_v })
    }
}

/// Maximises a two-argument objective over `bx × by`.
///
/// A [`GRID_2D`] scan seeds up to [`MAX_ROUNDS_2D`] rounds of alternating
/// one-dimensional line searches, followed by a shrinking compass search over the
/// eight axis and diagonal directions (min-type objectives have ridges that pure
/// coordinate moves cannot climb). The guarantee is local only.
pub fn maximize_2d<F>(objective: F, bx: Interval, by: Interval, tol: f64) -> Result<Maximum2d>
where
    F: Fn(f64, f64) -> f64,
{
    maximize_2d_with(objective, bx, by, tol, GRID_2D)
}

pub fn maximize_2d_with<F>(
    objective: F,
    bx: Interval,
    by: Interval,
    tol: f64,
    grid: (usize, usize),
) -> Result<Maximum2d>
where
    F: Fn(f64, f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidGrid(format!("tolerance {tol} must be positive")));
    }
    let xs = bx.grid(grid.0.max(2));
    let ys = by.grid(grid.1.max(2));
    let mut best = Maximum2d {
        x: xs[0],
        y: ys[0],
        value: f64::NEG_INFINITY,
    };
    let mut first = true;
    for &x in &xs {
        for &y in &ys {
            let v = checked(objective(x, y), &[x, y])?;
            if first || v > best.value {
                best = Maximum2d { x, y, value: v };
                first = false;
            }
        }
    }
    if best.value == f64::NEG_INFINITY {
        return Ok(best);
    }

    let hx = if xs.len() > 1 { xs[1] - xs[0] } else { 0.0 };
    let hy = if ys.len() > 1 { ys[1] - ys[0] } else { 0.0 };

    for _ in 0..MAX_ROUNDS_2D {
        let before = best;
        if hx > 0.0 {
            let local = Interval::new((best.x - 2.0 * hx).max(bx.lo), (best.x + 2.0 * hx).min(bx.hi))?;
            let y = best.y;
            let m = maximize_1d_with(|x| objective(x, y), local, tol, 33)?;
            if m.value > best.value {
                best = Maximum2d { x: m.x, y, value: m.value };
            }
        }
        if hy > 0.0 {
            let local = Interval::new((best.y - 2.0 * hy).max(by.lo), (best.y + 2.0 * hy).min(by.hi))?;
            let x = best.x;
            let m = maximize_1d_with(|y| objective(x, y), local, tol, 33)?;
            if m.value > best.value {
                best = Maximum2d { x, y: m.x, value: m.value };
            }
        }
        if best.value - before.value <= 0.0 {
            break;
        }
    }

    // Compass search: steps start at one grid cell and halve on failure.
    const DIRS: [(f64, f64); 8] = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
        (-1.0, -1.0),
    ];
    let (mut sx, mut sy) = (hx, hy);
    while sx.max(sy) > tol {
        let mut moved = false;
        for (dx, dy) in DIRS {
            let x = (best.x + dx * sx).clamp(bx.lo, bx.hi);
            let y = (best.y + dy * sy).clamp(by.lo, by.hi);
            let v = checked(objective(x, y), &[x, y])?;
            if v > best.value {
                best = Maximum2d { x, y, value: v };
                moved = true;
            }
        }
        if !moved {
            sx *= 0.5;
            sy *= 0.5;
        }
    }
    Ok(best)
}

/// Locates where `pred` flips between `lo` and `hi` by bisection; `pred(lo) != pred(hi)`
/// is required. Returns the midpoint of the final bracket of width `tol`.
pub fn bisect_transition<P>(pred: P, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    P: Fn(f64) -> bool,
{
    let at_lo = pred(lo);
    if at_lo == pred(hi) {
        return Err(Error::InvalidGrid(format!(
            "predicate does not change between {lo} and {hi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximal subintervals of `interval` on which `margin >= 0`.
///
/// The margin is sampled on `grid` points; each sign change is bracketed by bisection
/// to [`BISECT_WIDTH`]. Intervals come back sorted and disjoint; an endpoint produced by
/// bisection is the last known satisfied point. `NaN` counts as unsatisfied.
pub fn satisfied_intervals<F>(margin: F, interval: Interval, grid: usize) -> Vec<Interval>
where
    F: Fn(f64) -> f64,
{
    let ok = |x: f64| margin(x) >= 0.0;
    let xs = interval.grid(grid.max(2));
    let flags: Vec<bool> = xs.iter().map(|&x| ok(x)).collect();

    let crossing = |a: f64, b: f64, entering: bool| -> f64 {
        // Bracket [a, b] with ok(a) != ok(b); return the satisfied-side endpoint.
        let (mut lo, mut hi) = (a, b);
        while hi - lo > BISECT_WIDTH {
            let mid = 0.5 * (lo + hi);
            if ok(mid) == ok(lo) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if entering {
            hi
        } else {
            lo
        }
    };

    let mut out = Vec::new();
    let mut start: Option<f64> = if flags[0] { Some(xs[0]) } else { None };
    for i in 1..xs.len() {
        match (flags[i - 1], flags[i]) {
            (false, true) => start = Some(crossing(xs[i - 1], xs[i], true)),
            (true, false) => {
                let end = crossing(xs[i - 1], xs[i], false);
                let lo = start.take().unwrap_or(xs[i - 1]);
                out.push(Interval { lo, hi: end.max(lo) });
            }
            _ => {}
        }
    }
    if let Some(lo) = start {
        out.push(Interval {
            lo,
            hi: *xs.last().expect("non-empty grid"),
        });
    }
    out
}
