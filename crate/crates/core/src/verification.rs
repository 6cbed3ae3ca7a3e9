//! Cross-checks behind the `verify` command: closed-form rate expressions against the
//! exact log-determinant evaluation, and exact mutual informations against seeded
//! Monte-Carlo estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{
    build_ic_verystrong, build_mac_helper, build_strong_layered, build_zic_verystrong, IcParams, LayeredChannel,
    MacCoefficients, MacHelperParams, PowerSplit, ZicParams,
};
use crate::error::Result;
use crate::gauss_core::LinearGaussianSystem;
use crate::ic::{coefficient_determinant, ic_vs_coefficients, ic_vs_conditions};
use crate::mac_helper::{f_rate, g_rate};
use crate::mc_oracle::{cond_mi_estimate, SampleConfig};
use crate::search::Interval;
use crate::z_ic::{layered_coefficients, zic_strong_closed_form, zic_strong_point, zic_vs_closed_form, zic_vs_coefficients, zic_vs_condition};

/// Largest accepted gap between an exact MI and its Monte-Carlo estimate, in bits.
pub const MC_TOL: f64 = 0.01;
/// Largest accepted gap between a closed form and the log-determinant evaluation, in bits.
pub const FORMULA_TOL: f64 = 1e-9;
/// Seed of the random channel parameters in the Monte-Carlo battery.
pub const PARAM_SEED: u64 = 2024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiCheck {
    pub model: &'static str,
    pub term: String,
    pub exact: f64,
    pub estimate: f64,
    pub error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaCheck {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub units: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub formulas: Vec<FormulaCheck>,
    pub monte_carlo: Vec<MiCheck>,
    pub passed: bool,
}

struct Term {
    a: &'static [&'static str],
    b: &'static [&'static str],
    c: &'static [&'static str],
}

const fn t(a: &'static [&'static str], b: &'static [&'static str], c: &'static [&'static str]) -> Term {
    Term { a, b, c }
}

fn describe(term: &Term) -> String {
    let mut s = format!("I({};{}", term.a.join(","), term.b.join(","));
    if !term.c.is_empty() {
        s.push('|');
        s.push_str(&term.c.join(","));
    }
    s.push(')');
    s
}

const MAC_TERMS: [Term; 4] = [
    t(&["U"], &["S"], &[]),
    t(&["U", "X1"], &["Y"], &["X2"]),
    t(&["X1"], &["Y"], &["X2", "U"]),
    t(&["U"], &["Y"], &[]),
];
const VS_TERMS: [Term; 4] = [
    t(&["V"], &["Y1"], &[]),
    t(&["V"], &["Y2"], &[]),
    t(&["U"], &["V", "Y1"], &[]),
    t(&["S1p", "S2"], &["U"], &[]),
];
const IC_TERMS: [Term; 3] = [t(&["U"], &["Y2"], &[]), t(&["V"], &["U", "Y2"], &[]), t(&["V"], &["S1p", "S2"], &[])];
const LAYERED_TERMS: [Term; 3] = [
    t(&["U1"], &["Y1"], &[]),
    t(&["U2"], &["V", "Y1"], &["U1"]),
    t(&["V"], &["Y2"], &["U1"]),
];

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn random_mac(rng: &mut ChaCha8Rng) -> Result<LinearGaussianSystem> {
    let p = MacHelperParams::new(
        uniform(rng, 0.5, 10.0),
        uniform(rng, 0.5, 5.0),
        uniform(rng, 0.5, 5.0),
        uniform(rng, 0.5, 15.0),
    )?;
    let beta = 0.9 * p.beta_bound() * uniform(rng, -1.0, 1.0);
    let alpha = uniform(rng, -0.5, 1.5);
    build_mac_helper(&p, MacCoefficients { alpha, beta })
}

fn random_zic_vs(rng: &mut ChaCha8Rng) -> Result<LinearGaussianSystem> {
    let p = ZicParams::new(
        uniform(rng, 0.0, 4.0),
        uniform(rng, 0.5, 4.0),
        uniform(rng, 0.5, 4.0),
        uniform(rng, 0.5, 3.0),
        uniform(rng, 0.5, 3.0),
        uniform(rng, -0.9, 0.9),
    )?;
    build_zic_verystrong(&p, zic_vs_coefficients(&p))
}

fn random_ic_vs(rng: &mut ChaCha8Rng) -> Result<LinearGaussianSystem> {
    loop {
        let p = IcParams::new(
            uniform(rng, 0.0, 4.0),
            uniform(rng, 0.0, 4.0),
            uniform(rng, 0.5, 4.0),
            uniform(rng, 0.5, 4.0),
            uniform(rng, 0.5, 3.0),
            uniform(rng, 0.5, 3.0),
            uniform(rng, -0.9, 0.9),
        )?;
        // keep the coefficients moderate so the estimate is not dominated by one huge term
        if coefficient_determinant(&p).abs() > 0.5 * (1.0 + p.p1) * (1.0 + p.p2) {
            return build_ic_verystrong(&p, ic_vs_coefficients(&p)?);
        }
    }
}

fn random_layered(rng: &mut ChaCha8Rng) -> Result<LinearGaussianSystem> {
    let p1 = uniform(rng, 1.0, 4.0);
    let a = uniform(rng, 1.0, (1.0 + p1).sqrt());
    let p = IcParams::new(
        a,
        uniform(rng, 0.0, 1.5),
        p1,
        uniform(rng, 0.5, 3.0),
        uniform(rng, 0.5, 3.0),
        uniform(rng, 0.5, 3.0),
        uniform(rng, -0.9, 0.9),
    )?;
    let ch = LayeredChannel::from(&p);
    let split = PowerSplit::full(p1, uniform(rng, 0.1, 0.9) * p1)?;
    build_strong_layered(&ch, split, layered_coefficients(&ch, split))
}

fn check(model: &'static str, sys: &LinearGaussianSystem, term: &Term, cfg: SampleConfig) -> Result<MiCheck> {
    let exact = sys.cond_mutual_info_bits(term.a, term.b, term.c)?;
    let estimate = cond_mi_estimate(sys, term.a, term.b, term.c, cfg)?;
    let error = (exact - estimate).abs();
    Ok(MiCheck {
        model,
        term: describe(term),
        exact,
        estimate,
        error,
        passed: error <= MC_TOL,
    })
}

/// Twenty mutual-information terms over random parameters of all three models.
pub fn mi_battery(cfg: SampleConfig, param_seed: u64) -> Result<Vec<MiCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(param_seed);
    let mut out = Vec::with_capacity(20);
    for _ in 0..2 {
        let sys = random_mac(&mut rng)?;
        for term in &MAC_TERMS[..if out.is_empty() { 4 } else { 3 }] {
            out.push(check("mac_helper", &sys, term, cfg)?);
        }
    }
    let sys = random_zic_vs(&mut rng)?;
    for term in &VS_TERMS {
        out.push(check("zic", &sys, term, cfg)?);
    }
    let sys = random_layered(&mut rng)?;
    for term in &LAYERED_TERMS {
        out.push(check("zic", &sys, term, cfg)?);
    }
    let sys = random_ic_vs(&mut rng)?;
    for term in &IC_TERMS {
        out.push(check("ic", &sys, term, cfg)?);
    }
    let sys = random_layered(&mut rng)?;
    for term in &LAYERED_TERMS {
        out.push(check("ic", &sys, term, cfg)?);
    }
    Ok(out)
}

fn formula(name: &'static str, errors: Vec<f64>) -> FormulaCheck {
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    FormulaCheck {
        name,
        cases: errors.len(),
        max_error,
        passed: errors.iter().all(|e| *e <= FORMULA_TOL),
    }
}

/// Helper-MAC rates `f` and `g` against `I(U,X1;Y|X2) - I(U;S)` and `I(X1;Y|X2,U)` on a
/// 20×20 grid of valid (α, β). Returns the largest gaps `(f, g)`.
pub fn helper_rate_gaps(p: &MacHelperParams, grid: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let bound = p.beta_bound();
    let alphas = Interval { lo: -0.5, hi: 2.0 }.grid(grid);
    // cell centres keep |β| strictly inside the power constraint
    let betas: Vec<f64> = (0..grid)
        .map(|j| -bound + (j as f64 + 0.5) * 2.0 * bound / grid as f64)
        .collect();
    let (mut fe, mut ge) = (Vec::new(), Vec::new());
    for &alpha in &alphas {
        for &beta in &betas {
            let sys = build_mac_helper(p, MacCoefficients { alpha, beta })?;
            let f_mi = sys.cond_mutual_info_bits(&["U", "X1"], &["Y"], &["X2"])? - sys.mutual_info_bits(&["U"], &["S"])?;
            let g_mi = sys.cond_mutual_info_bits(&["X1"], &["Y"], &["X2", "U"])?;
            fe.push((f_rate(p, alpha, beta, p.p1)? - f_mi).abs());
            ge.push((g_rate(p, alpha, beta, p.p1)? - g_mi).abs());
        }
    }
    Ok((fe, ge))
}

pub fn formula_checks() -> Result<Vec<FormulaCheck>> {
    let mac = MacHelperParams::new(5.0, 2.5, 2.5, 12.0)?;
    let (fe, ge) = helper_rate_gaps(&mac, 20)?;

    let mut rng = ChaCha8Rng::seed_from_u64(PARAM_SEED);
    let mut vs = Vec::new();
    let mut forms = Vec::new();
    let mut strong = Vec::new();
    for _ in 0..50 {
        let p = ZicParams::new(
            uniform(&mut rng, 0.0, 6.0),
            uniform(&mut rng, 0.5, 4.0),
            uniform(&mut rng, 0.5, 4.0),
            uniform(&mut rng, 0.5, 3.0),
            uniform(&mut rng, 0.5, 3.0),
            uniform(&mut rng, -0.95, 0.95),
        )?;
        vs.push((zic_vs_condition(&p)?.margin - zic_vs_closed_form(&p)).abs());

        let ic = IcParams { b: uniform(&mut rng, 0.0, 4.0), ..p.as_ic() };
        if coefficient_determinant(&ic).abs() > 1e-3 {
            let (u, v) = ic_vs_conditions(&ic)?;
            for r in [u, v] {
                forms.push((r.margin - r.closed_form_margin.unwrap_or(f64::NAN)).abs());
            }
        }

        let p1 = uniform(&mut rng, 1.0, 4.0);
        let a = uniform(&mut rng, 1.0, (1.0 + p1).sqrt());
        let z = ZicParams { a, p1, ..p };
        let private = uniform(&mut rng, (a * a - 1.0).max(0.0), p1);
        strong.push((zic_strong_point(&z, private)?.conditions[0].margin - zic_strong_closed_form(&z, private)).abs());
    }
    Ok(vec![
        formula("mac_helper_f", fe),
        formula("mac_helper_g", ge),
        formula("zic_verystrong_closed_form", vs),
        formula("ic_verystrong_entropy_form", forms),
        formula("zic_strong_closed_form", strong),
    ])
}

pub fn verify_all(cfg: SampleConfig) -> Result<Verification> {
    let formulas = formula_checks()?;
    let monte_carlo = mi_battery(cfg, PARAM_SEED)?;
    let passed = formulas.iter().all(|f| f.passed) && monte_carlo.iter().all(|m| m.passed);
    Ok(Verification {
        units: "bits",
        samples: cfg.samples,
        seed: cfg.seed,
        formulas,
        monte_carlo,
        passed,
    })
}
