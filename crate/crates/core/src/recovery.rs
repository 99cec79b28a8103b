//! Sparse recovery: brute-force ℓ0 minimization over supports, a per-signal
//! uniqueness check built on it, and ℓ1 basis pursuit by ADMM.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{partial_fourier, FrequencySet};
use crate::error::{Error, Result};
use crate::linalg::numeric_rank;
use crate::matrix::DenseMatrix;
use crate::robustness::DEFAULT_SUBSET_BUDGET;
use crate::subsets::{checked_binomial, unrank_colex};

pub const DEFAULT_TAU_FEAS: f64 = 1e-8;
pub const MAX_REPORTED_SOLUTIONS: usize = 64;

/// Length-N vector stored as support plus nonzero values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSignal {
    length: usize,
    support: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseSignal {
    pub fn new(length: usize, support: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::InvalidInput("support and values differ in length".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("support must be strictly increasing".into()));
        }
        if support.iter().any(|&i| i >= length) {
            return Err(Error::InvalidInput(format!("support index outside [0, {length})")));
        }
        if values.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::InvalidInput("stored values must be nonzero".into()));
        }
        Ok(Self { length, support, values })
    }

    pub fn zero(length: usize) -> Self {
        Self { length, support: vec![], values: vec![] }
    }

    /// Keeps entries with modulus above `zero_tol`.
    pub fn from_dense(x: &[Complex64], zero_tol: f64) -> Self {
        let (support, values) = x
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > zero_tol)
            .map(|(i, v)| (i, *v))
            .unzip();
        Self { length: x.len(), support, values }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn l0(&self) -> usize {
        self.support.len()
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.length];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }

    /// Same support and every value within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.length == other.length
            && self.support == other.support
            && self.values.iter().zip(&other.values).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Parses `index,real,imag` lines. A leading header row is skipped.
    pub fn read_csv(reader: impl Read, length: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut entries: Vec<(usize, Complex64)> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if line == 0 && rec.get(0).is_some_and(|f| f.eq_ignore_ascii_case("index")) {
                continue;
            }
            if rec.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected index,real,imag", line + 1)));
            }
            let parse = |i: usize| -> Result<f64> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", line + 1)))
            };
            let index = rec[0]
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", line + 1)))?;
            let v = Complex64::new(parse(1)?, parse(2)?);
            if v.norm() != 0.0 {
                entries.push((index, v));
            }
        }
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Parse("duplicate index".into()));
        }
        let (support, values) = entries.into_iter().unzip();
        Self::new(length, support, values)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for (&i, v) in self.support.iter().zip(&self.values) {
            w.write_record([i.to_string(), format!("{:?}", v.re), format!("{:?}", v.im)])
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `f̂` restricted to Ω, i.e. the partial DFT applied to `f`.
pub fn dft_measure(f: &SparseSignal, omega: &FrequencySet) -> Result<Vec<Complex64>> {
    if f.length() != omega.modulus() {
        return Err(Error::Dimension(format!(
            "signal length {} vs modulus {}",
            f.length(),
            omega.modulus()
        )));
    }
    let psi = partial_fourier::<f64>(omega.modulus(), omega)?;
    psi.mul_vec(&f.to_dense())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P0Options {
    pub s_max: usize,
    pub tau_feas: f64,
    /// Restrict `g` to real vectors.
    pub real_only: bool,
    pub budget: u128,
    pub force_budget: bool,
}

impl P0Options {
    pub fn new(s_max: usize) -> Self {
        Self {
            s_max,
            tau_feas: DEFAULT_TAU_FEAS,
            real_only: false,
            budget: DEFAULT_SUBSET_BUDGET,
            force_budget: false,
        }
    }

    pub fn real_only(mut self, on: bool) -> Self {
        self.real_only = on;
        self
    }
}

/// Per support size: how many supports were tried and how many were feasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeLog {
    pub size: usize,
    pub supports: u128,
    pub feasible: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub solutions: Vec<SparseSignal>,
    /// Dense output of basis pursuit.
    pub estimate: Option<Vec<Complex64>>,
    pub residual_l2: f64,
    pub sparsity_found: Option<usize>,
    pub supports_enumerated: Option<u128>,
    pub iterations: Option<usize>,
    pub converged: bool,
    pub feasible: bool,
    /// More than [`MAX_REPORTED_SOLUTIONS`] minimizers; list truncated.
    pub overflow: bool,
    pub enumeration_log: Vec<SizeLog>,
}

struct Candidate {
    signal: SparseSignal,
    residual: f64,
}

fn residual_norm(a: &DMatrix<Complex64>, x: &DVector<Complex64>, y: &DVector<Complex64>) -> f64 {
    (a * x - y).norm()
}

/// Minimum-norm least squares on the columns `support`.
fn restricted_solve(
    a: &DMatrix<Complex64>,
    y: &DVector<Complex64>,
    support: &[usize],
    real_only: bool,
) -> Option<(Vec<Complex64>, f64)> {
    let sub = a.select_columns(support);
    let x: DVector<Complex64> = if real_only {
        let m = sub.nrows();
        let stacked = DMatrix::<f64>::from_fn(2 * m, support.len(), |i, j| {
            if i < m { sub[(i, j)].re } else { sub[(i - m, j)].im }
        });
        let rhs = DVector::<f64>::from_fn(2 * m, |i, _| if i < m { y[i].re } else { y[i - m].im });
        let svd = stacked.svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let x = svd.solve(&rhs, eps).ok()?;
        x.map(|v| Complex64::new(v, 0.0))
    } else {
        let svd = sub.clone().svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        svd.solve(y, eps).ok()?
    };
    let r = residual_norm(&sub, &x, y);
    Some((x.iter().copied().collect(), r))
}

/// Brute-force `min ‖g‖₀ s.t. A g = y`: supports by increasing size, every
/// minimizer at the first feasible size.
pub fn p0_solve(a: &DenseMatrix<f64>, y: &[Complex64], opts: &P0Options) -> Result<RecoveryResult> {
    let (rows, cols) = a.shape();
    if y.len() != rows {
        return Err(Error::Dimension(format!("{} measurements for {rows} rows", y.len())));
    }
    if opts.s_max > rows {
        return Err(Error::InvalidInput(format!("s_max {} exceeds row count {rows}", opts.s_max)));
    }
    let mut total: u128 = 0;
    for s in 0..=opts.s_max {
        total = total.saturating_add(checked_binomial(cols, s)?);
    }
    if total > opts.budget && !opts.force_budget {
        return Err(Error::BudgetExceeded { count: total, budget: opts.budget });
    }

    let am = a.to_nalgebra();
    let yv = DVector::from_column_slice(y);
    let y_norm = yv.norm();
    let mut log = Vec::new();
    let mut enumerated: u128 = 0;

    for s in 0..=opts.s_max {
        let count = checked_binomial(cols, s)?;
        enumerated += count;
        let found: Vec<Candidate> = if s == 0 {
            if y_norm <= opts.tau_feas {
                vec![Candidate { signal: SparseSignal::zero(cols), residual: y_norm }]
            } else {
                vec![]
            }
        } else {
            let per_rank: Vec<Option<Candidate>> = (0..count)
                .into_par_iter()
                .map(|rank| {
                    let support = unrank_colex(rank, s);
                    let (x, r) = restricted_solve(&am, &yv, &support, opts.real_only)?;
                    if r > opts.tau_feas {
                        return None;
                    }
                    // an exactly vanishing coefficient means a smaller support is feasible
                    let signal = SparseSignal::new(cols, support, x).ok()?;
                    Some(Candidate { signal, residual: r })
                })
                .collect();
            per_rank.into_iter().flatten().collect()
        };
        log.push(SizeLog { size: s, supports: count, feasible: found.len() as u128 });
        if !found.is_empty() {
            let overflow = found.len() > MAX_REPORTED_SOLUTIONS;
            let residual = found.iter().map(|c| c.residual).fold(0.0, f64::max);
            let solutions = found.into_iter().take(MAX_REPORTED_SOLUTIONS).map(|c| c.signal).collect();
            return Ok(RecoveryResult {
                solutions,
                estimate: None,
                residual_l2: residual,
                sparsity_found: Some(s),
                supports_enumerated: Some(enumerated),
                iterations: None,
                converged: true,
                feasible: true,
                overflow,
                enumeration_log: log,
            });
        }
    }
    Ok(RecoveryResult {
        solutions: vec![],
        estimate: None,
        residual_l2: f64::INFINITY,
        sparsity_found: None,
        supports_enumerated: Some(enumerated),
        iterations: None,
        converged: false,
        feasible: false,
        overflow: false,
        enumeration_log: log,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniqueness {
    Unique,
    NotUnique,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub verdict: Uniqueness,
    /// A competing minimizer when the verdict is `not_unique`.
    pub certificate: Option<SparseSignal>,
    pub p0: Option<RecoveryResult>,
}

/// Is `f` the only sparsest vector consistent with `A f`?
pub fn uniqueness_check(a: &DenseMatrix<f64>, f: &SparseSignal, opts: &P0Options) -> Result<UniquenessReport> {
    if f.length() != a.cols() {
        return Err(Error::Dimension(format!("signal length {} vs {} columns", f.length(), a.cols())));
    }
    let y = a.mul_vec(&f.to_dense())?;
    let run_opts = P0Options { s_max: f.l0(), ..*opts };
    let p0 = match p0_solve(a, &y, &run_opts) {
        Ok(r) => r,
        Err(Error::BudgetExceeded { .. }) => {
            return Ok(UniquenessReport { verdict: Uniqueness::Undecided, certificate: None, p0: None })
        }
        Err(e) => return Err(e),
    };
    let Some(s_star) = p0.sparsity_found else {
        let own = restricted_solve(&a.to_nalgebra(), &DVector::from_column_slice(&y), f.support(), opts.real_only)
            .map_or(f64::INFINITY, |(_, r)| r);
        return Err(Error::SelfInfeasible(own));
    };
    let matches_f = |g: &SparseSignal| g.approx_eq(f, opts.tau_feas);
    let verdict = if s_star == f.l0() && p0.solutions.len() == 1 && matches_f(&p0.solutions[0]) {
        Uniqueness::Unique
    } else {
        Uniqueness::NotUnique
    };
    let certificate = match verdict {
        Uniqueness::NotUnique => p0.solutions.iter().find(|g| !matches_f(g)).cloned(),
        _ => None,
    };
    Ok(UniquenessReport { verdict, certificate, p0: Some(p0) })
}

/// Complex magnitude shrinkage `max(|v| - κ, 0) · v/|v|`.
pub fn shrink(v: Complex64, kappa: f64) -> Complex64 {
    let mag = v.norm();
    if mag <= kappa {
        Complex64::new(0.0, 0.0)
    } else {
        v * ((mag - kappa) / mag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpParams {
    pub rho: f64,
    pub max_iter: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
}

impl Default for BpParams {
    fn default() -> Self {
        Self { rho: 1.0, max_iter: 50_000, tol_primal: 1e-9, tol_dual: 1e-9 }
    }
}

/// `min ‖g‖₁ s.t. A g = y` by ADMM. The x-step projects onto the affine
/// feasible set with a precomputed pseudoinverse; the z-step shrinks.
/// Returns the z iterate.
pub fn basis_pursuit(a: &DenseMatrix<f64>, y: &[Complex64], params: &BpParams) -> Result<RecoveryResult> {
    let (rows, cols) = a.shape();
    if y.len() != rows {
        return Err(Error::Dimension(format!("{} measurements for {rows} rows", y.len())));
    }
    if params.rho <= 0.0 {
        return Err(Error::InvalidInput("penalty must be positive".into()));
    }
    if numeric_rank(a, &1e-10)? != rows {
        return Err(Error::InvalidInput(format!("matrix `{}` lacks full row rank", a.label())));
    }
    let am = a.to_nalgebra();
    let ah = am.adjoint();
    let gram_inv = (&am * &ah)
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("A A* is singular".into()))?;
    let pinv = &ah * gram_inv;
    let yv = DVector::from_column_slice(y);
    let q = &pinv * &yv;
    let proj = DMatrix::<Complex64>::identity(cols, cols) - &pinv * &am;
    let kappa = 1.0 / params.rho;

    let zero = DVector::<Complex64>::zeros(cols);
    let mut z = zero.clone();
    let mut u = zero;
    let mut converged = false;
    let mut iterations = 0;
    let mut feas = f64::INFINITY;
    for it in 1..=params.max_iter {
        iterations = it;
        let x = &proj * (&z - &u) + &q;
        let z_old = std::mem::replace(&mut z, (&x + &u).map(|v| shrink(v, kappa)));
        u += &x - &z;
        let primal = (&x - &z).norm();
        let dual = params.rho * (&z - &z_old).norm();
        if primal <= params.tol_primal && dual <= params.tol_dual {
            feas = residual_norm(&am, &z, &yv);
            if feas <= params.tol_primal {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        feas = residual_norm(&am, &z, &yv);
    }
    let g: Vec<Complex64> = z.iter().copied().collect();
    let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let signal = SparseSignal::from_dense(&g, 1e-6 * scale.max(f64::MIN_POSITIVE));
    Ok(RecoveryResult {
        sparsity_found: Some(signal.l0()),
        solutions: vec![signal],
        estimate: Some(g),
        residual_l2: feas,
        supports_enumerated: None,
        iterations: Some(iterations),
        converged,
        feasible: feas <= params.tol_primal,
        overflow: false,
        enumeration_log: vec![],
    })
}

pub fn l1_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).sum()
}

pub fn l2_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::make_symmetric_omega;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sparse_signal_invariants() {
        assert!(SparseSignal::new(5, vec![1, 1], vec![c(1.0, 0.0); 2]).is_err());
        assert!(SparseSignal::new(5, vec![5], vec![c(1.0, 0.0)]).is_err());
        assert!(SparseSignal::new(5, vec![1], vec![c(0.0, 0.0)]).is_err());
        assert!(SparseSignal::new(5, vec![1, 2], vec![c(1.0, 0.0)]).is_err());
        let f = SparseSignal::new(5, vec![1, 3], vec![c(1.0, 2.0), c(-3.0, 0.0)]).unwrap();
        assert_eq!(f.l0(), 2);
        assert_eq!(SparseSignal::from_dense(&f.to_dense(), 0.0), f);
    }

    #[test]
    fn csv_roundtrip_and_header() {
        let f = SparseSignal::new(7, vec![0, 4], vec![c(0.1, -2.5), c(3.0, 1e-300)]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = SparseSignal::read_csv(buf.as_slice(), 7).unwrap();
        assert_eq!(back, f);
        let text = "index,real,imag\n2, 1.5, 0\n# note\n0,0,0\n";
        let g = SparseSignal::read_csv(text.as_bytes(), 4).unwrap();
        assert_eq!(g.support(), &[2]);
        assert!(SparseSignal::read_csv("1,2\n".as_bytes(), 4).is_err());
        assert!(SparseSignal::read_csv("1,2,0\n1,3,0\n".as_bytes(), 4).is_err());
    }

    #[test]
    fn dft_measure_examples() {
        let omega = make_symmetric_omega(5).unwrap();
        let y = dft_measure(&SparseSignal::zero(5), &omega).unwrap();
        assert!(y.iter().all(|v| v.norm() == 0.0));
        let spike = SparseSignal::new(5, vec![0], vec![c(1.0, 0.0)]).unwrap();
        for v in dft_measure(&spike, &omega).unwrap() {
            assert!((v - c(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        let f = SparseSignal::new(5, vec![2], vec![c(3.0, 0.0)]).unwrap();
        let y = dft_measure(&f, &omega).unwrap();
        let w = |e: f64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e / 5.0);
        let expect = [w(0.0), w(2.0), w(-2.0)].map(|z| z * (3.0 / 5f64.sqrt()));
        for (a, b) in y.iter().zip(expect) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(dft_measure(&SparseSignal::zero(7), &omega).is_err());
    }

    #[test]
    fn p0_zero_measurement() {
        let omega = make_symmetric_omega(5).unwrap();
        let psi = partial_fourier::<f64>(5, &omega).unwrap();
        let r = p0_solve(&psi, &[c(0.0, 0.0); 3], &P0Options::new(2)).unwrap();
        assert_eq!(r.sparsity_found, Some(0));
        assert_eq!(r.solutions, vec![SparseSignal::zero(5)]);
        assert!(p0_solve(&psi, &[c(0.0, 0.0); 3], &P0Options::new(4)).is_err());
    }

    #[test]
    fn shrink_reduces_to_soft_threshold() {
        for v in [-3.0f64, -0.5, 0.0, 0.2, 1.0, 7.5] {
            let soft = v.signum() * (v.abs() - 0.7f64).max(0.0);
            let z = shrink(c(v, 0.0), 0.7);
            assert!((z.re - soft).abs() < 1e-15 && z.im == 0.0, "{v}");
        }
        let z = shrink(c(3.0, 4.0), 1.0);
        assert!((z - c(2.4, 3.2)).norm() < 1e-15);
    }

    #[test]
    fn basis_pursuit_zero_rhs_converges_immediately() {
        let omega = make_symmetric_omega(7).unwrap();
        let psi = partial_fourier::<f64>(7, &omega).unwrap();
        let r = basis_pursuit(&psi, &[c(0.0, 0.0); 5], &BpParams::default()).unwrap();
        assert!(r.converged);
        assert!(r.iterations.unwrap() <= 1);
        assert!(r.estimate.unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn basis_pursuit_rejects_rank_deficient() {
        let a = DenseMatrix::<f64>::from_real_rows("dup", &[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(basis_pursuit(&a, &[c(1.0, 0.0), c(2.0, 0.0)], &BpParams::default()).is_err());
    }

    #[test]
    fn uniqueness_of_zero_signal() {
        let omega = make_symmetric_omega(5).unwrap();
        let psi = partial_fourier::<f64>(5, &omega).unwrap();
        let r = uniqueness_check(&psi, &SparseSignal::zero(5), &P0Options::new(0)).unwrap();
        assert_eq!(r.verdict, Uniqueness::Unique);
    }
}
