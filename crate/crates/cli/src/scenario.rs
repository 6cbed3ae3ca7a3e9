//! Scenario files: which channel, its parameters, the analysis to run and the grids to
//! use. Parameters are kept as a name -> value map so overrides and sweep axes address
//! them uniformly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use dirty_region::channels::{IcParams, MacHelperParams, ZicParams};
use dirty_region::mac_helper::{InnerGrid, ALPHA_GRID, BETA_GRID};
use dirty_region::mc_oracle::{SampleConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    MacHelper,
    Zic,
    Ic,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::MacHelper => "mac_helper",
            Model::Zic => "zic",
            Model::Ic => "ic",
        }
    }

    pub fn required(self) -> &'static [&'static str] {
        match self {
            Model::MacHelper => &["P0", "P1", "P2", "Q"],
            Model::Zic => &["a", "P1", "P2", "Q1", "Q2"],
            Model::Ic => &["a", "b", "P1", "P2", "Q1", "Q2"],
        }
    }

    /// Names accepted in the parameter record. For the two-receiver models the state
    /// correlation is given by exactly one of `rho`, `d` (S1 = d S2 + S1') or
    /// `c` (S2 = c S1 + S2'); it defaults to independent states.
    pub fn accepts(self, name: &str) -> bool {
        self.required().contains(&name) || (self != Model::MacHelper && CORRELATION.contains(&name))
    }
}

const CORRELATION: [&str; 3] = ["rho", "d", "c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Bounds,
    Classify,
    Verystrong,
    Strong,
    Weak,
    Sweep,
    Verify,
}

impl Analysis {
    pub fn as_str(self) -> &'static str {
        match self {
            Analysis::Bounds => "bounds",
            Analysis::Classify => "classify",
            Analysis::Verystrong => "verystrong",
            Analysis::Strong => "strong",
            Analysis::Weak => "weak",
            Analysis::Sweep => "sweep",
            Analysis::Verify => "verify",
        }
    }

    pub fn applies_to(self, model: Model) -> bool {
        matches!(
            (model, self),
            (Model::MacHelper, Analysis::Bounds | Analysis::Classify)
                | (Model::Zic | Model::Ic, Analysis::Verystrong | Analysis::Strong | Analysis::Weak)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / n })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    /// Correlation grid of the helper-MAC outer envelope.
    pub rho_points: usize,
    pub alpha_points: usize,
    pub beta_points: usize,
    pub refine: bool,
    /// P1'' scan points of the strong-regime segment.
    pub segment_points: usize,
    /// `r1` grid of exported boundaries.
    pub boundary_points: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            rho_points: 401,
            alpha_points: ALPHA_GRID,
            beta_points: BETA_GRID,
            refine: true,
            segment_points: 801,
            boundary_points: 201,
        }
    }
}

impl Grids {
    pub fn inner(&self) -> InnerGrid {
        InnerGrid {
            alpha_points: self.alpha_points,
            beta_points: self.beta_points,
            refine: self.refine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: Model,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Analysis evaluated at each point of a sweep.
    #[serde(default)]
    pub analysis: Option<Analysis>,
    #[serde(default)]
    pub sweep: Vec<Axis>,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub grid: Grids,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

pub fn load(path: &Path) -> anyhow::Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse(text: &str) -> anyhow::Result<Scenario> {
    let s: Scenario = serde_json::from_str(text)?;
    s.check()?;
    Ok(s)
}

impl Scenario {
    pub fn check(&self) -> anyhow::Result<()> {
        for name in self.params.keys() {
            if !self.model.accepts(name) {
                bail!("`{name}` is not a parameter of the {} model", self.model.as_str());
            }
        }
        for name in self.model.required() {
            if !self.params.contains_key(*name) {
                bail!("missing parameter `{name}` for the {} model", self.model.as_str());
            }
        }
        let given = CORRELATION.iter().filter(|n| self.params.contains_key(**n)).count();
        if given > 1 {
            bail!("give at most one of rho, d, c");
        }
        if let Some(a) = self.analysis {
            if a != Analysis::Sweep && !a.applies_to(self.model) {
                bail!("analysis `{}` does not apply to the {} model", a.as_str(), self.model.as_str());
            }
        }
        if self.sweep.len() > 2 {
            bail!("at most two sweep axes, got {}", self.sweep.len());
        }
        for (i, ax) in self.sweep.iter().enumerate() {
            if !self.model.accepts(&ax.name) {
                bail!("sweep axis `{}` is not a parameter of the {} model", ax.name, self.model.as_str());
            }
            if CORRELATION.contains(&ax.name.as_str())
                && CORRELATION.iter().any(|n| *n != ax.name && self.params.contains_key(*n))
            {
                bail!("sweep axis `{}` conflicts with the correlation given in params", ax.name);
            }
            if ax.steps == 0 || !ax.lo.is_finite() || !ax.hi.is_finite() {
                bail!("sweep axis `{}` needs finite bounds and at least one step", ax.name);
            }
            if self.sweep[..i].iter().any(|b| b.name == ax.name) {
                bail!("sweep axis `{}` given twice", ax.name);
            }
        }
        Ok(())
    }

    /// Applies one `key=value` override. Keys are parameter names, `seed`, `samples`,
    /// `analysis` or `grid.<field>`.
    pub fn apply_override(&mut self, spec: &str) -> anyhow::Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{spec}` is not of the form key=value"))?;
        let (key, value) = (key.trim(), value.trim());
        let num = || value.parse::<f64>().map_err(|_| anyhow!("override `{key}`: `{value}` is not a number"));
        let int = || value.parse::<usize>().map_err(|_| anyhow!("override `{key}`: `{value}` is not a count"));
        match key {
            "seed" => self.seed = Some(value.parse().map_err(|_| anyhow!("override seed: `{value}` is not a u64"))?),
            "samples" => self.samples = Some(int()?),
            "analysis" => self.analysis = Some(serde_json::from_value(serde_json::Value::String(value.into()))?),
            "grid.rho_points" => self.grid.rho_points = int()?,
            "grid.alpha_points" => self.grid.alpha_points = int()?,
            "grid.beta_points" => self.grid.beta_points = int()?,
            "grid.segment_points" => self.grid.segment_points = int()?,
            "grid.boundary_points" => self.grid.boundary_points = int()?,
            "grid.refine" => {
                self.grid.refine = value.parse().map_err(|_| anyhow!("override grid.refine: `{value}` is not a bool"))?
            }
            k if self.model.accepts(k) => {
                if CORRELATION.contains(&k) {
                    self.params.retain(|n, _| !CORRELATION.contains(&n.as_str()));
                }
                self.params.insert(k.into(), num()?);
            }
            k => bail!("unknown override key `{k}`"),
        }
        self.check()
    }

    pub fn sample_config(&self) -> SampleConfig {
        SampleConfig {
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        }
    }

    /// Parameter record with the axis values of one sweep point substituted.
    pub fn at(&self, point: &[(String, f64)]) -> BTreeMap<String, f64> {
        let mut params = self.params.clone();
        for (name, v) in point {
            if CORRELATION.contains(&name.as_str()) {
                params.retain(|n, _| !CORRELATION.contains(&n.as_str()));
            }
            params.insert(name.clone(), *v);
        }
        params
    }
}

/// Typed channel parameters built from a record. Out-of-range values surface as library
/// errors so a sweep can report them per point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Mac(MacHelperParams),
    Zic(ZicParams),
    Ic(IcParams),
}

pub fn channel(model: Model, params: &BTreeMap<String, f64>) -> dirty_region::Result<Channel> {
    let g = |n: &str| params[n];
    let corr = CORRELATION.iter().find_map(|n| params.get(*n).map(|v| (*n, *v)));
    Ok(match model {
        Model::MacHelper => Channel::Mac(MacHelperParams::new(g("P0"), g("P1"), g("P2"), g("Q"))?),
        Model::Zic => {
            let (a, p1, p2, q1, q2) = (g("a"), g("P1"), g("P2"), g("Q1"), g("Q2"));
            Channel::Zic(match corr {
                Some(("d", d)) => ZicParams::with_forward(a, p1, p2, q1, q2, d)?,
                Some(("c", c)) => ZicParams::with_backward(a, p1, p2, q1, q2, c)?,
                Some((_, rho)) => ZicParams::new(a, p1, p2, q1, q2, rho)?,
                None => ZicParams::new(a, p1, p2, q1, q2, 0.0)?,
            })
        }
        Model::Ic => {
            let (a, b, p1, p2, q1, q2) = (g("a"), g("b"), g("P1"), g("P2"), g("Q1"), g("Q2"));
            Channel::Ic(match corr {
                Some(("d", d)) => IcParams::with_forward(a, b, p1, p2, q1, q2, d)?,
                Some(("c", c)) => IcParams::with_backward(a, b, p1, p2, q1, q2, c)?,
                Some((_, rho)) => IcParams::new(a, b, p1, p2, q1, q2, rho)?,
                None => IcParams::new(a, b, p1, p2, q1, q2, 0.0)?,
            })
        }
    })
}
