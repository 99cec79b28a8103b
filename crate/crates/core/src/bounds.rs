//! Coherence, the `m ≥ C·μ²·S·ln n` sample-complexity bound and its
//! inversion, and 1-D DCT sparsification with PSNR.

use rustdct::DctPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub const DEFAULT_C: f64 = 46.0;

/// `μ = √n · max |⟨u_i, v_j⟩|` over rows of two orthonormal bases.
pub fn coherence(u: &DenseMatrix<f64>, v: &DenseMatrix<f64>) -> Result<f64> {
    let n = u.rows();
    if u.shape() != (n, n) || v.shape() != (n, n) {
        return Err(Error::Dimension("coherence needs two n×n bases of the same size".into()));
    }
    check_orthonormal_rows(u)?;
    check_orthonormal_rows(v)?;
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ip: num_complex::Complex64 = u.row(i).iter().zip(v.row(j)).map(|(a, b)| a * b.conj()).sum();
            best = best.max(ip.norm());
        }
    }
    Ok((n as f64).sqrt() * best)
}

fn check_orthonormal_rows(a: &DenseMatrix<f64>) -> Result<()> {
    let n = a.rows();
    for i in 0..n {
        let mut deviation: f64 = 0.0;
        for j in 0..n {
            let ip: num_complex::Complex64 = a.row(i).iter().zip(a.row(j)).map(|(x, y)| x * y.conj()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((ip - target).norm());
        }
        if deviation > 1e-10 {
            return Err(Error::NotOrthonormal { row: i, deviation });
        }
    }
    Ok(())
}

/// Inputs to the bound. Logarithms are natural.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub n: f64,
    pub m: f64,
    pub mu: f64,
    pub c_const: f64,
}

impl BoundQuery {
    pub fn new(n: f64, m: f64, mu: f64) -> Self {
        Self { n, m, mu, c_const: DEFAULT_C }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 2.0) {
            return Err(Error::InvalidInput(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.m > 0.0 && self.m <= self.n) {
            return Err(Error::InvalidInput(format!("need 0 < m <= n, got m={}", self.m)));
        }
        check_mu(self.mu, self.n)?;
        if !(self.c_const > 0.0) {
            return Err(Error::InvalidInput("C must be positive".into()));
        }
        Ok(())
    }
}

fn check_mu(mu: f64, n: f64) -> Result<()> {
    if !(mu >= 1.0 && mu <= n.sqrt() + 1e-12) {
        return Err(Error::InvalidInput(format!("mu must lie in [1, sqrt(n)], got {mu}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityBudget {
    pub s: f64,
    pub floor: u64,
}

/// Largest sparsity the bound certifies: `S = m / (C·μ²·ln n)`.
pub fn max_sparsity(q: &BoundQuery) -> Result<SparsityBudget> {
    q.validate()?;
    let s = q.m / (q.c_const * q.mu * q.mu * q.n.ln());
    Ok(SparsityBudget { s, floor: s.floor() as u64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRequirement {
    pub m: u64,
    /// Demands more measurements than the signal has entries.
    pub infeasible: bool,
}

/// `m = ⌈C·μ²·S·ln n⌉`.
pub fn required_measurements(s: u64, n: f64, mu: f64, c_const: f64) -> Result<MeasurementRequirement> {
    if s == 0 {
        return Err(Error::InvalidInput("sparsity must be at least 1".into()));
    }
    if !(n >= 2.0) {
        return Err(Error::InvalidInput(format!("n must be at least 2, got {n}")));
    }
    check_mu(mu, n)?;
    if !(c_const > 0.0) {
        return Err(Error::InvalidInput("C must be positive".into()));
    }
    let m = (c_const * mu * mu * s as f64 * n.ln()).ceil() as u64;
    Ok(MeasurementRequirement { m, infeasible: m as f64 > n })
}

/// Orthonormal type-II DCT.
pub fn dct_forward(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty signal".into()));
    }
    let mut buf = x.to_vec();
    DctPlanner::new().plan_dct2(n).process_dct2(&mut buf);
    let dc = (1.0 / n as f64).sqrt();
    let ac = (2.0 / n as f64).sqrt();
    buf[0] *= dc;
    for c in &mut buf[1..] {
        *c *= ac;
    }
    Ok(buf)
}

/// Inverse of [`dct_forward`] (orthonormal type-III DCT).
pub fn dct_inverse(c: &[f64]) -> Result<Vec<f64>> {
    let n = c.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty coefficient vector".into()));
    }
    // rustdct's type III halves the DC term
    let mut buf = c.to_vec();
    buf[0] *= 2.0 / (n as f64).sqrt();
    let ac = (2.0 / n as f64).sqrt();
    for v in &mut buf[1..] {
        *v *= ac;
    }
    DctPlanner::new().plan_dct3(n).process_dct3(&mut buf);
    Ok(buf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sparsified {
    pub kept: usize,
    pub reconstruction: Vec<f64>,
    pub mse: f64,
    /// `+∞` when the reconstruction is exact.
    pub psnr_db: f64,
}

/// Number of coefficients kept for a fraction of `len`, `⌈fraction·len⌉`.
pub fn kept_count(keep_fraction: f64, len: usize) -> usize {
    // products like 0.07·100 land a hair above the integer in binary
    let raw = keep_fraction * len as f64;
    let rounded = raw.round();
    let count = if (raw - rounded).abs() <= 1e-9 * raw.max(1.0) { rounded } else { raw.ceil() };
    (count as usize).min(len)
}

/// Keeps the largest-magnitude DCT coefficients (ties to the lower index)
/// and reconstructs.
pub fn sparsify(x: &[f64], keep_fraction: f64) -> Result<Sparsified> {
    if !(0.0..=1.0).contains(&keep_fraction) {
        return Err(Error::InvalidInput(format!("keep fraction {keep_fraction} outside [0, 1]")));
    }
    let n = x.len();
    let kept = kept_count(keep_fraction, n);
    let reconstruction = if kept == n {
        x.to_vec()
    } else {
        let coeffs = dct_forward(x)?;
        let mut thinned = vec![0.0; n];
        for i in largest_indices(&coeffs, kept) {
            thinned[i] = coeffs[i];
        }
        dct_inverse(&thinned)?
    };
    let mse = x.iter().zip(&reconstruction).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n as f64;
    Ok(Sparsified { kept, psnr_db: psnr(x, mse), reconstruction, mse })
}

/// Indices of the `count` largest magnitudes, ties to the lower index.
pub fn largest_indices(values: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    order.truncate(count);
    order
}

/// `10·log10(peak²/MSE)` with `peak = max|x|`; `+∞` for zero error.
pub fn psnr(x: &[f64], mse: f64) -> f64 {
    if mse == 0.0 {
        return f64::INFINITY;
    }
    let peak = x.iter().fold(0.0f64, |p, v| p.max(v.abs()));
    10.0 * (peak * peak / mse).log10()
}

/// Deterministic piecewise-smooth test signal with three jumps.
pub fn synthetic_signal(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let t = i as f64 / len as f64;
            if t < 0.3 {
                0.8 + 0.5 * (2.0 * std::f64::consts::PI * 3.0 * t).sin()
            } else if t < 0.55 {
                -0.4 + 12.0 * (t - 0.3).powi(2)
            } else if t < 0.8 {
                0.2 + 0.3 * (2.0 * std::f64::consts::PI * 7.0 * t).cos()
            } else {
                (-20.0 * (t - 0.8)).exp() - 0.5
            }
        })
        .collect()
}
