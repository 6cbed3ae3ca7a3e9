//! Channel parameter records, state decompositions, and the Gaussian systems each
//! coding scheme induces.
//!
//! Variable names used by the builders:
//!
//! | model | bases | derived |
//! |---|---|---|
//! | MAC with helper | `S X0p X1 X2 N` | `U X0 Y` |
//! | Z-IC / IC very strong | `S2 S1p X1 X2 N1 N2` | `U V Y1 Y2` |
//! | strong (layered) | `S1 S2p X1p X1pp X2 N1 N2` | `U1 U2 V Y1 Y2` |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss_core::LinearGaussianSystem;

// Slack for quantities that are mathematically nonnegative but computed in floating point.
const ROUNDING: f64 = 1e-12;

fn nonneg(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and nonnegative",
        })
    }
}

fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

fn correlation(rho: f64) -> Result<()> {
    if rho.is_finite() && rho.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "correlation must lie in [-1, 1]",
        })
    }
}

/// Helper-assisted MAC: `Y = X0 + X1 + X2 + S + N`, `N ~ N(0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacHelperParams {
    #[serde(rename = "P0")]
    pub p0: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P2")]
    pub p2: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

impl MacHelperParams {
    pub fn new(p0: f64, p1: f64, p2: f64, q: f64) -> Result<Self> {
        let p = MacHelperParams { p0, p1, p2, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        nonneg("P0", self.p0)?;
        nonneg("P1", self.p1)?;
        nonneg("P2", self.p2)?;
        nonneg("Q", self.q)
    }

    /// Largest legal `|β|`, `sqrt(P0/Q)`; infinite when there is no state.
    pub fn beta_bound(&self) -> f64 {
        if self.q == 0.0 {
            f64::INFINITY
        } else {
            (self.p0 / self.q).sqrt()
        }
    }

    /// Power left for the state-independent part of the helper signal, `P0 - β²Q`.
    pub fn residual_helper_power(&self, beta: f64) -> Result<f64> {
        let p0p = self.p0 - beta * beta * self.q;
        if p0p >= 0.0 {
            Ok(p0p)
        } else if p0p >= -ROUNDING * (1.0 + self.p0) {
            Ok(0.0)
        } else {
            Err(Error::PowerViolation { p0_prime: p0p })
        }
    }
}

/// Z-interference channel: `Y1 = X1 + a X2 + S1 + N1`, `Y2 = X2 + S2 + N2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZicParams {
    pub a: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P2")]
    pub p2: f64,
    #[serde(rename = "Q1")]
    pub q1: f64,
    #[serde(rename = "Q2")]
    pub q2: f64,
    pub rho: f64,
}

impl ZicParams {
    pub fn new(a: f64, p1: f64, p2: f64, q1: f64, q2: f64, rho: f64) -> Result<Self> {
        let p = ZicParams { a, p1, p2, q1, q2, rho };
        p.validate()?;
        Ok(p)
    }

    /// Parameters given by the forward coefficient `d` in `S1 = d S2 + S1'`.
    pub fn with_forward(a: f64, p1: f64, p2: f64, q1: f64, q2: f64, d: f64) -> Result<Self> {
        Self::new(a, p1, p2, q1, q2, rho_from_forward(q1, q2, d)?)
    }

    /// Parameters given by the backward coefficient `c` in `S2 = c S1 + S2'`.
    pub fn with_backward(a: f64, p1: f64, p2: f64, q1: f64, q2: f64, c: f64) -> Result<Self> {
        Self::new(a, p1, p2, q1, q2, rho_from_backward(q1, q2, c)?)
    }

    pub fn validate(&self) -> Result<()> {
        finite("a", self.a)?;
        nonneg("P1", self.p1)?;
        nonneg("P2", self.p2)?;
        nonneg("Q1", self.q1)?;
        nonneg("Q2", self.q2)?;
        correlation(self.rho)
    }

    pub fn forward(&self) -> StateDecomposition {
        StateDecomposition::forward_or_independent(self.q1, self.q2, self.rho)
    }

    pub fn backward(&self) -> StateDecomposition {
        StateDecomposition::backward_or_independent(self.q1, self.q2, self.rho)
    }

    /// The same channel viewed as an IC with no cross link into receiver 2.
    pub fn as_ic(&self) -> IcParams {
        IcParams {
            a: self.a,
            b: 0.0,
            p1: self.p1,
            p2: self.p2,
            q1: self.q1,
            q2: self.q2,
            rho: self.rho,
        }
    }
}

/// Interference channel: `Y1 = X1 + a X2 + S1 + N1`, `Y2 = b X1 + X2 + S2 + N2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcParams {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P2")]
    pub p2: f64,
    #[serde(rename = "Q1")]
    pub q1: f64,
    #[serde(rename = "Q2")]
    pub q2: f64,
    pub rho: f64,
}

impl IcParams {
    pub fn new(a: f64, b: f64, p1: f64, p2: f64, q1: f64, q2: f64, rho: f64) -> Result<Self> {
        let p = IcParams { a, b, p1, p2, q1, q2, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn with_forward(a: f64, b: f64, p1: f64, p2: f64, q1: f64, q2: f64, d: f64) -> Result<Self> {
        Self::new(a, b, p1, p2, q1, q2, rho_from_forward(q1, q2, d)?)
    }

    pub fn with_backward(a: f64, b: f64, p1: f64, p2: f64, q1: f64, q2: f64, c: f64) -> Result<Self> {
        Self::new(a, b, p1, p2, q1, q2, rho_from_backward(q1, q2, c)?)
    }

    pub fn validate(&self) -> Result<()> {
        finite("a", self.a)?;
        finite("b", self.b)?;
        nonneg("P1", self.p1)?;
        nonneg("P2", self.p2)?;
        nonneg("Q1", self.q1)?;
        nonneg("Q2", self.q2)?;
        correlation(self.rho)
    }

    pub fn forward(&self) -> StateDecomposition {
        StateDecomposition::forward_or_independent(self.q1, self.q2, self.rho)
    }

    pub fn backward(&self) -> StateDecomposition {
        StateDecomposition::backward_or_independent(self.q1, self.q2, self.rho)
    }

    /// Drops the receiver-2 cross link.
    pub fn z_part(&self) -> ZicParams {
        ZicParams {
            a: self.a,
            p1: self.p1,
            p2: self.p2,
            q1: self.q1,
            q2: self.q2,
            rho: self.rho,
        }
    }

    /// Relabels the users: transmitter 1 becomes transmitter 2 and vice versa.
    pub fn swapped(&self) -> IcParams {
        IcParams {
            a: self.b,
            b: self.a,
            p1: self.p2,
            p2: self.p1,
            q1: self.q2,
            q2: self.q1,
            rho: self.rho,
        }
    }
}

fn rho_from_forward(q1: f64, q2: f64, d: f64) -> Result<f64> {
    finite("d", d)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    if q1 == 0.0 {
        return Err(Error::ZeroDivisorVariance("Q1"));
    }
    Ok(snap_unit(d * (q2 / q1).sqrt()))
}

fn rho_from_backward(q1: f64, q2: f64, c: f64) -> Result<f64> {
    finite("c", c)?;
    if c == 0.0 {
        return Ok(0.0);
    }
    if q2 == 0.0 {
        return Err(Error::ZeroDivisorVariance("Q2"));
    }
    Ok(snap_unit(c * (q1 / q2).sqrt()))
}

// A coefficient at its largest feasible value should give |rho| = 1, not one ulp above.
fn snap_unit(rho: f64) -> f64 {
    if (rho.abs() - 1.0).abs() <= 4.0 * f64::EPSILON {
        rho.signum()
    } else {
        rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionForm {
    /// `S1 = d S2 + S1'`
    Forward,
    /// `S2 = c S1 + S2'`
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDecomposition {
    pub form: DecompositionForm,
    pub coefficient: f64,
    pub residual: f64,
}

impl StateDecomposition {
    fn forward_or_independent(q1: f64, q2: f64, rho: f64) -> Self {
        decompose_forward(q1, q2, rho).unwrap_or(StateDecomposition {
            form: DecompositionForm::Forward,
            coefficient: 0.0,
            residual: q1,
        })
    }

    fn backward_or_independent(q1: f64, q2: f64, rho: f64) -> Self {
        decompose_backward(q1, q2, rho).unwrap_or(StateDecomposition {
            form: DecompositionForm::Backward,
            coefficient: 0.0,
            residual: q2,
        })
    }
}

/// `S1 = d S2 + S1'` with `d = ρ sqrt(Q1/Q2)` and `Var(S1') = (1-ρ²) Q1`.
pub fn decompose_forward(q1: f64, q2: f64, rho: f64) -> Result<StateDecomposition> {
    nonneg("Q1", q1)?;
    nonneg("Q2", q2)?;
    correlation(rho)?;
    if q2 == 0.0 {
        return Err(Error::ZeroDivisorVariance("Q2"));
    }
    Ok(StateDecomposition {
        form: DecompositionForm::Forward,
        coefficient: rho * (q1 / q2).sqrt(),
        residual: ((1.0 - rho * rho) * q1).max(0.0),
    })
}

/// `S2 = c S1 + S2'` with `c = ρ sqrt(Q2/Q1)` and `Var(S2') = (1-ρ²) Q2`.
pub fn decompose_backward(q1: f64, q2: f64, rho: f64) -> Result<StateDecomposition> {
    nonneg("Q1", q1)?;
    nonneg("Q2", q2)?;
    correlation(rho)?;
    if q1 == 0.0 {
        return Err(Error::ZeroDivisorVariance("Q1"));
    }
    Ok(StateDecomposition {
        form: DecompositionForm::Backward,
        coefficient: rho * (q2 / q1).sqrt(),
        residual: ((1.0 - rho * rho) * q2).max(0.0),
    })
}

/// `U = X0' + αS`, `X0 = X0' + βS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

/// `U = X1 + α1 S2 + α2 S1'`, `V = X2 + β S2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZicVeryStrongCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

/// `U = X1 + α1 S1' + α2 S2`, `V = X2 + β1 S1' + β2 S2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcVeryStrongCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

/// `U1 = X1' + α1 S1`, `U2 = X1'' + α2 S1`, `V = a X2 + β S1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

/// Split of transmitter 1's power into a layer decoded by both receivers (`common`, P1')
/// and a layer decoded only by receiver 1 (`private`, P1'').
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub common: f64,
    pub private: f64,
}

impl PowerSplit {
    pub fn new(common: f64, private: f64, total: f64) -> Result<Self> {
        let ok = common.is_finite()
            && private.is_finite()
            && common >= 0.0
            && private >= 0.0
            && common + private <= total * (1.0 + ROUNDING) + ROUNDING;
        if ok {
            Ok(PowerSplit { common, private })
        } else {
            Err(Error::InvalidSplit { common, private, total })
        }
    }

    /// Uses all of `total`: `common = total - private`.
    pub fn full(total: f64, private: f64) -> Result<Self> {
        if !(private >= 0.0 && private <= total) {
            return Err(Error::InvalidSplit {
                common: total - private,
                private,
                total,
            });
        }
        Self::new(total - private, private, total)
    }

    /// True when one layer carries no power.
    pub fn is_degenerate(&self) -> bool {
        self.common == 0.0 || self.private == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum DpcCoefficients {
    Mac(MacCoefficients),
    ZicVeryStrong(ZicVeryStrongCoefficients),
    IcVeryStrong(IcVeryStrongCoefficients),
    Layered {
        split: PowerSplit,
        coefficients: LayeredCoefficients,
    },
}

pub fn build_mac_helper(params: &MacHelperParams, coeffs: MacCoefficients) -> Result<LinearGaussianSystem> {
    params.validate()?;
    let MacCoefficients { alpha, beta } = coeffs;
    finite("alpha", alpha)?;
    finite("beta", beta)?;
    let bound = params.beta_bound();
    if beta.abs() > bound * (1.0 + ROUNDING) {
        return Err(Error::BetaOutOfRange { beta, bound });
    }
    let p0p = params.residual_helper_power(beta)?;
    LinearGaussianSystem::builder()
        .base("S", params.q)
        .base("X0p", p0p)
        .base("X1", params.p1)
        .base("X2", params.p2)
        .base("N", 1.0)
        .derived("U", &[("X0p", 1.0), ("S", alpha)])
        .derived("X0", &[("X0p", 1.0), ("S", beta)])
        .derived(
            "Y",
            &[("X0p", 1.0), ("S", 1.0 + beta), ("X1", 1.0), ("X2", 1.0), ("N", 1.0)],
        )
        .build()
}

pub fn build_zic_verystrong(params: &ZicParams, coeffs: ZicVeryStrongCoefficients) -> Result<LinearGaussianSystem> {
    params.validate()?;
    let fwd = params.forward();
    very_strong_system(
        params.a,
        0.0,
        params.p1,
        params.p2,
        fwd,
        params.q2,
        // (S1', S2) coefficients of U and V.
        (coeffs.alpha2, coeffs.alpha1),
        (0.0, coeffs.beta),
    )
}

pub fn build_ic_verystrong(params: &IcParams, coeffs: IcVeryStrongCoefficients) -> Result<LinearGaussianSystem> {
    params.validate()?;
    let fwd = params.forward();
    very_strong_system(
        params.a,
        params.b,
        params.p1,
        params.p2,
        fwd,
        params.q2,
        (coeffs.alpha1, coeffs.alpha2),
        (coeffs.beta1, coeffs.beta2),
    )
}

#[allow(clippy::too_many_arguments)]
fn very_strong_system(
    a: f64,
    b: f64,
    p1: f64,
    p2: f64,
    fwd: StateDecomposition,
    q2: f64,
    u: (f64, f64),
    v: (f64, f64),
) -> Result<LinearGaussianSystem> {
    let d = fwd.coefficient;
    LinearGaussianSystem::builder()
        .base("S2", q2)
        .base("S1p", fwd.residual)
        .base("X1", p1)
        .base("X2", p2)
        .base("N1", 1.0)
        .base("N2", 1.0)
        .derived("U", &[("X1", 1.0), ("S1p", u.0), ("S2", u.1)])
        .derived("V", &[("X2", 1.0), ("S1p", v.0), ("S2", v.1)])
        .derived(
            "Y1",
            &[("X1", 1.0), ("X2", a), ("S2", d), ("S1p", 1.0), ("N1", 1.0)],
        )
        .derived("Y2", &[("X1", b), ("X2", 1.0), ("S2", 1.0), ("N2", 1.0)])
        .build()
}

/// Channel seen by the layered (rate-splitting) scheme of the strong regime.
/// A Z-IC is the case `b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredChannel {
    pub a: f64,
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    pub rho: f64,
}

impl From<&ZicParams> for LayeredChannel {
    fn from(p: &ZicParams) -> Self {
        LayeredChannel::from(&p.as_ic())
    }
}

impl From<&IcParams> for LayeredChannel {
    fn from(p: &IcParams) -> Self {
        LayeredChannel {
            a: p.a,
            b: p.b,
            p1: p.p1,
            p2: p.p2,
            q1: p.q1,
            q2: p.q2,
            rho: p.rho,
        }
    }
}

impl LayeredChannel {
    pub fn backward(&self) -> StateDecomposition {
        StateDecomposition::backward_or_independent(self.q1, self.q2, self.rho)
    }
}

pub fn build_strong_layered(
    channel: &LayeredChannel,
    split: PowerSplit,
    coeffs: LayeredCoefficients,
) -> Result<LinearGaussianSystem> {
    let split = PowerSplit::new(split.common, split.private, channel.p1)?;
    let bwd = channel.backward();
    let (a, b) = (channel.a, channel.b);
    LinearGaussianSystem::builder()
        .base("S1", channel.q1)
        .base("S2p", bwd.residual)
        .base("X1p", split.common)
        .base("X1pp", split.private)
        .base("X2", channel.p2)
        .base("N1", 1.0)
        .base("N2", 1.0)
        .derived("U1", &[("X1p", 1.0), ("S1", coeffs.alpha1)])
        .derived("U2", &[("X1pp", 1.0), ("S1", coeffs.alpha2)])
        .derived("V", &[("X2", a), ("S1", coeffs.beta)])
        .derived(
            "Y1",
            &[("X1p", 1.0), ("X1pp", 1.0), ("X2", a), ("S1", 1.0), ("N1", 1.0)],
        )
        .derived(
            "Y2",
            &[
                ("X1p", b),
                ("X1pp", b),
                ("X2", 1.0),
                ("S1", bwd.coefficient),
                ("S2p", 1.0),
                ("N2", 1.0),
            ],
        )
        .build()
}
