//! Independent Gaussian oracle for the integration tests: covariances assembled by hand
//! and determinants from nalgebra's LU decomposition.
#![allow(dead_code)]

use nalgebra::DMatrix;

pub struct Oracle {
    names: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
    vars: Vec<f64>,
}

impl Oracle {
    /// `bases` are independent with the given variances; each derived row lists its
    /// coefficients on the bases in order.
    pub fn new(bases: &[(&'static str, f64)], derived: &[(&'static str, Vec<f64>)]) -> Self {
        let k = bases.len();
        let mut names = Vec::new();
        let mut rows = Vec::new();
        for (i, (n, _)) in bases.iter().enumerate() {
            names.push(*n);
            let mut r = vec![0.0; k];
            r[i] = 1.0;
            rows.push(r);
        }
        for (n, r) in derived {
            assert_eq!(r.len(), k);
            names.push(*n);
            rows.push(r.clone());
        }
        Oracle {
            names,
            rows,
            vars: bases.iter().map(|b| b.1).collect(),
        }
    }

    fn idx(&self, n: &str) -> usize {
        self.names.iter().position(|m| *m == n).unwrap_or_else(|| panic!("no variable {n}"))
    }

    pub fn cov(&self, set: &[&str]) -> DMatrix<f64> {
        let ids: Vec<usize> = set.iter().map(|n| self.idx(n)).collect();
        DMatrix::from_fn(ids.len(), ids.len(), |i, j| {
            let (a, b) = (&self.rows[ids[i]], &self.rows[ids[j]]);
            a.iter().zip(b).zip(&self.vars).map(|((x, y), v)| x * y * v).sum()
        })
    }

    fn logdet(&self, set: &[&str]) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        self.cov(set).determinant().log2()
    }

    /// `I(A;B|C)` in bits from four determinants.
    pub fn mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> f64 {
        let join = |x: &[&str], y: &[&str]| -> Vec<&'static str> {
            let mut v: Vec<&'static str> = Vec::new();
            for n in x.iter().chain(y) {
                let s = self.names[self.idx(n)];
                if !v.contains(&s) {
                    v.push(s);
                }
            }
            v
        };
        let ac = join(a, c);
        let bc = join(b, c);
        let abc = join(&ac, b);
        0.5 * (self.logdet(&ac) + self.logdet(&bc) - self.logdet(&abc) - self.logdet(c))
    }
}

pub fn awgn(snr: f64) -> f64 {
    0.5 * (1.0 + snr).log2()
}

/// Helper MAC: bases S, X0', X1, X2, N; `U = X0' + αS`, `Y = X0' + (1+β)S + X1 + X2 + N`.
pub fn mac(p0: f64, p1: f64, p2: f64, q: f64, alpha: f64, beta: f64) -> Oracle {
    let p0p = p0 - beta * beta * q;
    Oracle::new(
        &[("S", q), ("X0p", p0p), ("X1", p1), ("X2", p2), ("N", 1.0)],
        &[
            ("U", vec![alpha, 1.0, 0.0, 0.0, 0.0]),
            ("Y", vec![1.0 + beta, 1.0, 1.0, 1.0, 1.0]),
        ],
    )
}

/// Two-receiver very-strong system with `S1 = d S2 + S1'`; `u` and `v` are the
/// `(S1', S2)` coefficients of the two auxiliaries.
#[allow(clippy::too_many_arguments)]
pub fn two_user(a: f64, b: f64, p1: f64, p2: f64, q1: f64, q2: f64, d: f64, u: (f64, f64), v: (f64, f64)) -> Oracle {
    Oracle::new(
        &[("S1p", q1 - d * d * q2), ("S2", q2), ("X1", p1), ("X2", p2), ("N1", 1.0), ("N2", 1.0)],
        &[
            ("U", vec![u.0, u.1, 1.0, 0.0, 0.0, 0.0]),
            ("V", vec![v.0, v.1, 0.0, 1.0, 0.0, 0.0]),
            ("Y1", vec![1.0, d, 1.0, a, 1.0, 0.0]),
            ("Y2", vec![0.0, 1.0, b, 1.0, 0.0, 1.0]),
        ],
    )
}

/// Layered strong-regime system with `S2 = c S1 + S2'`.
#[allow(clippy::too_many_arguments)]
pub fn layered(a: f64, b: f64, p1c: f64, p1p: f64, p2: f64, q1: f64, q2p: f64, c: f64) -> Oracle {
    let dd = p1c + p1p + a * a * p2 + 1.0;
    let (a1, a2, be) = (p1c / dd, p1p / dd, a * a * p2 / dd);
    Oracle::new(
        &[("S1", q1), ("S2p", q2p), ("X1p", p1c), ("X1pp", p1p), ("X2", p2), ("N1", 1.0), ("N2", 1.0)],
        &[
            ("U1", vec![a1, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
            ("U2", vec![a2, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
            ("V", vec![be, 0.0, 0.0, 0.0, a, 0.0, 0.0]),
            ("Y1", vec![1.0, 0.0, 1.0, 1.0, a, 1.0, 0.0]),
            ("Y2", vec![c, 1.0, b, b, 1.0, 0.0, 1.0]),
        ],
    )
}
