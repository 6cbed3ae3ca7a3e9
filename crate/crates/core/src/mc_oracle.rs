//! Seeded Monte-Carlo estimates of covariances and Gaussian mutual informations, used as
//! an independent check on the exact log-determinant evaluations.
//!
//! Samples come from ChaCha8 (one stream per shard, stream index = shard index) pushed
//! through the ziggurat normal transform of `rand_distr::StandardNormal`. The shard count
//! is fixed, so results depend only on `(seed, n)` and not on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss_core::{CovMatrix, LinearGaussianSystem, MI_FLOOR};

pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5EED;
const SHARDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

impl SampleConfig {
    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidParameter {
                name: "samples",
                value: samples as f64,
                reason: "at least two samples are needed for a covariance",
            });
        }
        Ok(SampleConfig { samples, seed })
    }
}

struct Moments {
    n: usize,
    sum: Vec<f64>,
    cross: Vec<f64>,
}

fn shard_moments(rows: &[Vec<f64>], sd: &[f64], seed: u64, shard: usize, n: usize) -> Moments {
    let m = rows.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    let mut z = vec![0.0; sd.len()];
    let mut x = vec![0.0; m];
    let mut sum = vec![0.0; m];
    let mut cross = vec![0.0; m * m];
    for _ in 0..n {
        for (zk, s) in z.iter_mut().zip(sd) {
            let g: f64 = rng.sample(StandardNormal);
            *zk = g * s;
        }
        for (xi, row) in x.iter_mut().zip(rows) {
            *xi = row.iter().zip(&z).map(|(c, v)| c * v).sum();
        }
        for i in 0..m {
            sum[i] += x[i];
            for j in 0..=i {
                cross[i * m + j] += x[i] * x[j];
            }
        }
    }
    Moments { n, sum, cross }
}

/// Empirical covariance of `names` from `cfg.samples` joint draws.
pub fn sample_covariance(sys: &LinearGaussianSystem, names: &[&str], cfg: SampleConfig) -> Result<CovMatrix> {
    let cfg = SampleConfig::new(cfg.samples, cfg.seed)?;
    let rows: Vec<Vec<f64>> = names
        .iter()
        .map(|n| sys.coefficients(n).map(<[f64]>::to_vec))
        .collect::<Result<_>>()?;
    let sd: Vec<f64> = sys.base_variances().iter().map(|v| v.sqrt()).collect();
    let per = cfg.samples / SHARDS;
    let extra = cfg.samples % SHARDS;
    let count = |s: usize| per + usize::from(s < extra);
    let run = |s: usize| shard_moments(&rows, &sd, cfg.seed, s, count(s));
    #[cfg(feature = "parallel")]
    let parts: Vec<Moments> = (0..SHARDS).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Moments> = (0..SHARDS).map(run).collect();

    let m = names.len();
    let mut sum = vec![0.0; m];
    let mut cross = vec![0.0; m * m];
    let mut n = 0usize;
    for part in parts {
        n += part.n;
        for (a, b) in sum.iter_mut().zip(&part.sum) {
            *a += b;
        }
        for (a, b) in cross.iter_mut().zip(&part.cross) {
            *a += b;
        }
    }
    let nf = n as f64;
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let c = (cross[i * m + j] - sum[i] * sum[j] / nf) / (nf - 1.0);
            data[i * m + j] = c;
            data[j * m + i] = c;
        }
    }
    Ok(CovMatrix::from_rows(&data.chunks(m.max(1)).map(<[f64]>::to_vec).collect::<Vec<_>>()))
}

/// Plug-in Gaussian estimate of `I(A;B|C)` from the empirical covariance.
pub fn cond_mi_estimate(
    sys: &LinearGaussianSystem,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    cfg: SampleConfig,
) -> Result<f64> {
    let mut all: Vec<&str> = Vec::new();
    for n in a.iter().chain(b).chain(c) {
        if !all.contains(n) {
            all.push(n);
        }
    }
    let cov = sample_covariance(sys, &all, cfg)?;
    let pos = |set: &[&str]| -> Vec<usize> {
        set.iter()
            .map(|n| all.iter().position(|m| m == n).expect("in union"))
            .collect()
    };
    let raw = cov
        .cond_mutual_info_raw(&pos(a), &pos(b), &pos(c))
        .map_err(|(set, pivot)| Error::Singular {
            subset: set.iter().map(|&i| all[i].to_string()).collect(),
            pivot,
        })?;
    if raw < MI_FLOOR {
        return Err(Error::NegativeInformation { value: raw });
    }
    Ok(raw.max(0.0))
}

pub fn mi_estimate(sys: &LinearGaussianSystem, a: &[&str], b: &[&str], cfg: SampleConfig) -> Result<f64> {
    cond_mi_estimate(sys, a, b, &[], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> LinearGaussianSystem {
        LinearGaussianSystem::builder()
            .base("Z1", 1.0)
            .base("Z2", 1.0)
            .derived("A", &[("Z1", 1.0)])
            .derived("B", &[("Z1", 0.5), ("Z2", 0.75_f64.sqrt())])
            .build()
            .unwrap()
    }

    #[test]
    fn too_few_samples() {
        assert!(SampleConfig::new(1, 0).is_err());
    }

    #[test]
    fn reproducible() {
        let cfg = SampleConfig::new(10_000, 7).unwrap();
        let a = sample_covariance(&pair(), &["A", "B"], cfg).unwrap();
        let b = sample_covariance(&pair(), &["A", "B"], cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_covariance(&pair(), &["A", "B"], SampleConfig::new(10_000, 8).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn unit_variance_and_independence() {
        let cfg = SampleConfig::new(200_000, DEFAULT_SEED).unwrap();
        let c = sample_covariance(&pair(), &["Z1", "Z2"], cfg).unwrap();
        let se = 3.0 / (cfg.samples as f64).sqrt();
        assert!((c.get(0, 0) - 1.0).abs() < 3.0 * 2f64.sqrt() / (cfg.samples as f64).sqrt());
        assert!(c.get(0, 1).abs() < se);
    }

    #[test]
    fn correlated_pair_information() {
        let cfg = SampleConfig::new(200_000, DEFAULT_SEED).unwrap();
        let i = mi_estimate(&pair(), &["A"], &["B"], cfg).unwrap();
        assert!((i - 0.2075187496394219).abs() < 0.01, "{i}");
        let ind = mi_estimate(&pair(), &["Z1"], &["Z2"], cfg).unwrap();
        assert!(ind < 0.01);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            sample_covariance(&pair(), &["Q"], SampleConfig::new(10, 0).unwrap()),
            Err(Error::UnknownName(_))
        ));
    }
}
