//! Exact entropies and mutual informations for jointly Gaussian variables.
//!
//! A [`LinearGaussianSystem`] holds independent zero-mean base variables and derived
//! variables that are fixed linear combinations of them. Every covariance is then
//! `Σ[i][j] = Σ_k c_i[k] c_j[k] Var(base_k)`, and every entropy or information term
//! reduces to log-determinants of sub-covariances. All rates are in bits.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Relative pivot tolerance of the Cholesky factorisation.
pub const PIVOT_TOL: f64 = 1e-12;
/// Pre-clamp floor for mutual information; anything lower is a numerical failure.
pub const MI_FLOOR: f64 = -1e-9;

/// `log2(2πe)`.
pub fn log2_two_pi_e() -> f64 {
    (2.0 * std::f64::consts::PI * std::f64::consts::E).log2()
}

/// Symmetric covariance matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl CovMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "covariance rows must be square");
            data.extend_from_slice(r);
        }
        CovMatrix { dim, data }
    }

    pub(crate) fn from_flat(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        CovMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Sub-matrix on `idx` (in that order).
    pub fn select(&self, idx: &[usize]) -> CovMatrix {
        let n = idx.len();
        let mut data = Vec::with_capacity(n * n);
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        CovMatrix { dim: n, data }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// `log2 det Σ` via Cholesky. A pivot at or below `PIVOT_TOL · max diag` (or a
    /// determinant under 1e-300) is reported as the pivot value in the `Err`.
    pub fn log2_det(&self) -> std::result::Result<f64, f64> {
        let n = self.dim;
        if n == 0 {
            return Ok(0.0);
        }
        let scale = (0..n).map(|i| self.get(i, i)).fold(0.0_f64, f64::max);
        if !(scale > 0.0) {
            return Err(0.0);
        }
        let tol = PIVOT_TOL * scale;
        let mut l = vec![0.0; n * n];
        let mut log_det = 0.0;
        for j in 0..n {
            let mut pivot = self.get(j, j);
            for k in 0..j {
                pivot -= l[j * n + k] * l[j * n + k];
            }
            if !(pivot > tol) {
                return Err(pivot);
            }
            let d = pivot.sqrt();
            l[j * n + j] = d;
            log_det += pivot.log2();
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        if log_det < (1e-300_f64).log2() {
            return Err(log_det.exp2());
        }
        Ok(log_det)
    }

    /// Differential entropy (bits) of the Gaussian vector with this covariance.
    pub fn entropy_bits(&self) -> std::result::Result<f64, f64> {
        Ok(0.5 * (self.dim as f64 * log2_two_pi_e() + self.log2_det()?))
    }

    /// `I(A;B|C)` in bits for index sets into this matrix; unclamped.
    pub fn cond_mutual_info_raw(&self, a: &[usize], b: &[usize], c: &[usize]) -> std::result::Result<f64, (Vec<usize>, f64)> {
        let ld = |set: Vec<usize>| -> std::result::Result<f64, (Vec<usize>, f64)> {
            self.select(&set).log2_det().map_err(|p| (set, p))
        };
        let ac = union(&[a, c]);
        let bc = union(&[b, c]);
        let abc = union(&[a, b, c]);
        let cc = union(&[c]);
        Ok(0.5 * (ld(ac)? + ld(bc)? - ld(abc)? - ld(cc)?))
    }
}

fn union(sets: &[&[usize]]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for s in sets {
        for &i in *s {
            if !out.contains(&i) {
                out.push(i);
            }
        }
    }
    out
}

/// Independent Gaussian bases plus derived linear combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGaussianSystem {
    names: Vec<String>,
    variances: Vec<f64>,
    // Coefficient vector over bases for every variable (bases are unit vectors).
    coeffs: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl LinearGaussianSystem {
    /// Builds a system from `(name, variance)` bases and `(name, coefficients)` derived
    /// variables, in the order given.
    pub fn new<B, D>(bases: B, derived: D) -> Result<Self>
    where
        B: IntoIterator<Item = (String, f64)>,
        D: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let bases: Vec<(String, f64)> = bases.into_iter().collect();
        let nb = bases.len();
        let mut sys = LinearGaussianSystem {
            names: Vec::new(),
            variances: Vec::with_capacity(nb),
            coeffs: Vec::new(),
            index: HashMap::new(),
        };
        for (k, (name, var)) in bases.into_iter().enumerate() {
            if !(var >= 0.0) || !var.is_finite() {
                return Err(Error::NegativeVariance { name, variance: var });
            }
            let mut c = vec![0.0; nb];
            c[k] = 1.0;
            sys.push(name, c)?;
            sys.variances.push(var);
        }
        for (name, c) in derived {
            if c.len() != nb {
                return Err(Error::LengthMismatch {
                    name,
                    expected: nb,
                    got: c.len(),
                });
            }
            sys.push(name, c)?;
        }
        Ok(sys)
    }

    pub fn builder() -> SystemBuilder {
        SystemBuilder::default()
    }

    fn push(&mut self, name: String, c: Vec<f64>) -> Result<()> {
        if self.index.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        self.index.insert(name.clone(), self.names.len());
        self.names.push(name);
        self.coeffs.push(c);
        Ok(())
    }

    pub fn base_count(&self) -> usize {
        self.variances.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn base_names(&self) -> &[String] {
        &self.names[..self.variances.len()]
    }

    pub fn base_variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn coefficients(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.coeffs[self.lookup(name)?])
    }

    fn lookup(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn variance(&self, name: &str) -> Result<f64> {
        let c = self.coefficients(name)?;
        Ok(c.iter().zip(&self.variances).map(|(c, v)| c * c * v).sum())
    }

    /// True when the variable is identically zero (zero variance).
    pub fn is_deterministic(&self, name: &str) -> Result<bool> {
        Ok(self.variance(name)? == 0.0)
    }

    pub fn covariance(&self, names: &[&str]) -> Result<CovMatrix> {
        let rows: Vec<&[f64]> = names
            .iter()
            .map(|n| self.coefficients(n))
            .collect::<Result<_>>()?;
        let n = rows.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = rows[i]
                    .iter()
                    .zip(rows[j])
                    .zip(&self.variances)
                    .map(|((a, b), v)| a * b * v)
                    .sum();
                data[i * n + j] = s;
                data[j * n + i] = s;
            }
        }
        Ok(CovMatrix::from_flat(n, data))
    }

    pub fn entropy_bits(&self, names: &[&str]) -> Result<f64> {
        let names = dedup(&[names]);
        self.covariance(&names)?
            .entropy_bits()
            .map_err(|pivot| singular(&names, pivot))
    }

    pub fn mutual_info_bits(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.cond_mutual_info_bits(a, b, &[])
    }

    /// `I(A;B|C) = h(A,C) + h(B,C) - h(A,B,C) - h(C)`, clamped at zero.
    pub fn cond_mutual_info_bits(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let raw = self.cond_mutual_info_raw(a, b, c)?;
        if raw < MI_FLOOR {
            return Err(Error::NegativeInformation { value: raw });
        }
        Ok(raw.max(0.0))
    }

    /// `I(A;B|C)` after removing identically-zero variables from every set. A zero
    /// variable carries no information, so dropping it is exact; an emptied `A` or `B`
    /// gives 0.
    pub fn cond_mutual_info_reduced(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let (a, b, c) = (self.nonzero(a)?, self.nonzero(b)?, self.nonzero(c)?);
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        self.cond_mutual_info_bits(&a, &b, &c)
    }

    fn nonzero<'a>(&self, set: &[&'a str]) -> Result<Vec<&'a str>> {
        let mut out = Vec::with_capacity(set.len());
        for &n in set {
            if !self.is_deterministic(n)? {
                out.push(n);
            }
        }
        Ok(out)
    }

    pub fn mutual_info_reduced(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.cond_mutual_info_reduced(a, b, &[])
    }

    /// Unclamped `I(A;B|C)`; used by property tests of the clamp itself.
    pub fn cond_mutual_info_raw(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let all = dedup(&[a, b, c]);
        let cov = self.covariance(&all)?;
        let pos = |set: &[&str]| -> Vec<usize> {
            set.iter()
                .map(|n| all.iter().position(|m| m == n).expect("name in union"))
                .collect()
        };
        cov.cond_mutual_info_raw(&pos(a), &pos(b), &pos(c))
            .map_err(|(set, pivot)| {
                let names: Vec<&str> = set.iter().map(|&i| all[i]).collect();
                singular(&names, pivot)
            })
    }
}

fn dedup<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for s in sets {
        for n in *s {
            if !out.contains(n) {
                out.push(n);
            }
        }
    }
    out
}

fn singular(names: &[&str], pivot: f64) -> Error {
    Error::Singular {
        subset: names.iter().map(|s| s.to_string()).collect(),
        pivot,
    }
}

/// Incremental construction by name: `builder().base("S", q).derived("U", &[("X", 1.0), ("S", a)])`.
#[derive(Debug, Default, Clone)]
pub struct SystemBuilder {
    bases: Vec<(String, f64)>,
    derived: Vec<(String, Vec<(String, f64)>)>,
}

impl SystemBuilder {
    pub fn base(mut self, name: &str, variance: f64) -> Self {
        self.bases.push((name.to_string(), variance));
        self
    }

    pub fn derived(mut self, name: &str, terms: &[(&str, f64)]) -> Self {
        self.derived.push((
            name.to_string(),
            terms.iter().map(|(n, c)| (n.to_string(), *c)).collect(),
        ));
        self
    }

    pub fn build(self) -> Result<LinearGaussianSystem> {
        let pos: HashMap<&str, usize> = self
            .bases
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.as_str(), i))
            .collect();
        let nb = self.bases.len();
        let mut derived = Vec::with_capacity(self.derived.len());
        for (name, terms) in &self.derived {
            let mut c = vec![0.0; nb];
            for (base, coef) in terms {
                let &k = pos.get(base.as_str()).ok_or_else(|| Error::UnknownName(base.clone()))?;
                c[k] += coef;
            }
            derived.push((name.clone(), c));
        }
        LinearGaussianSystem::new(self.bases.clone(), derived)
    }
}
