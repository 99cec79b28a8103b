use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::claims;
use super::report::ClaimEntry;
use super::spec::{Frame, ScenarioParams};
use crate::bounds::{dct_forward, dct_inverse, max_sparsity, required_measurements, sparsify, synthetic_signal};
use crate::constructions::{
    gram_blocks, make_symmetric_omega, partial_fourier, phi_closed_form, primes_between, realifier_q, realify,
    symmetry_defect,
};
use crate::cyclotomic::{exact_rank_cyclotomic, MAX_EXACT_MODULUS};
use crate::error::Result;
use crate::linalg::numeric_rank;
use crate::recovery::{
    basis_pursuit, l1_norm, l2_distance, p0_solve, uniqueness_check, P0Options, SparseSignal, Uniqueness,
};
use crate::robustness::{
    exact_subset_rank, maximal_robustness, spark, verify_witness, EnumerationOptions, Mode, Verdict,
};
use crate::scalar::{Ext, Precision, Real};

pub(crate) fn write_csv<S: Serialize>(dir: &Path, name: &str, rows: &[S]) -> Result<String> {
    let mut w = csv::Writer::from_path(dir.join(name))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(name.to_string())
}

fn join(indices: &[usize]) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaRow {
    pub modulus: usize,
    pub k: usize,
    pub omega_size: usize,
    pub parity_formula: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionRow {
    pub modulus: usize,
    pub omega_size: usize,
    pub q_unitarity_defect: f64,
    pub psi_row_defect: f64,
    pub phi_max_imag: f64,
    pub phi_layout_defect: f64,
    pub phi_symmetry_defect: f64,
    pub cos_sin_offdiag_max: f64,
    pub numeric_rank_psi: usize,
    pub numeric_rank_phi: usize,
    pub exact_rank_psi: Option<usize>,
    pub exact_rank_phi: Option<usize>,
}

pub fn omega_rows(max_prime: u64) -> Result<Vec<OmegaRow>> {
    primes_between(3, max_prime)
        .into_iter()
        .map(|p| {
            let n = p as usize;
            let k = (n - 1) / 2;
            Ok(OmegaRow {
                modulus: n,
                k,
                omega_size: make_symmetric_omega(n)?.size(),
                parity_formula: if k % 2 == 0 { k + 1 } else { k + 2 },
            })
        })
        .collect()
}

pub fn construction_row(n: usize) -> Result<ConstructionRow> {
    let omega = make_symmetric_omega(n)?;
    let psi = partial_fourier::<f64>(n, &omega)?;
    let q = realifier_q::<f64>(n)?;
    let raw_phi = psi.matmul(&q.adjoint())?;
    let phi = realify(&psi, &q)?;
    let k = (n - 1) / 2;
    let exact = n <= MAX_EXACT_MODULUS;
    let exact_rank = |a: &crate::DenseMatrix<f64>| -> Result<Option<usize>> {
        match (exact, a.exact_form()) {
            (true, Some(form)) => Ok(Some(exact_rank_cyclotomic(form)?)),
            _ => Ok(None),
        }
    };
    Ok(ConstructionRow {
        modulus: n,
        omega_size: omega.size(),
        q_unitarity_defect: q.matmul(&q.adjoint())?.identity_defect()?,
        psi_row_defect: psi.matmul(&psi.adjoint())?.identity_defect()?,
        phi_max_imag: raw_phi.max_imag(),
        phi_layout_defect: phi.max_abs_diff(&phi_closed_form(n, &omega)?)?,
        phi_symmetry_defect: symmetry_defect(&phi, &omega)?,
        cos_sin_offdiag_max: gram_blocks(&phi, k)?.offdiag_max,
        numeric_rank_psi: numeric_rank(&psi, &f64::rank_tolerance())?,
        numeric_rank_phi: numeric_rank(&phi, &f64::rank_tolerance())?,
        exact_rank_psi: exact_rank(&psi)?,
        exact_rank_phi: exact_rank(&phi)?,
    })
}

pub fn construction_rows(max_prime: u64) -> Result<Vec<ConstructionRow>> {
    primes_between(3, max_prime).into_iter().map(|p| construction_row(p as usize)).collect()
}

/// Construction checks run by the full verification: Ω sizes up to 199 and
/// the matrix identities up to 101.
pub(crate) fn run_constructions(dir: &Path) -> Result<Vec<ClaimEntry>> {
    let omega = omega_rows(199)?;
    let omega_file = write_csv(dir, "omega_sizes.csv", &omega)?;
    let rows = construction_rows(101)?;
    let file = write_csv(dir, "constructions.csv", &rows)?;
    Ok(claims::constructions(&omega, &omega_file, &rows, &file))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessRow {
    pub modulus: usize,
    pub frame: Frame,
    pub n_rows: usize,
    pub n_cols: usize,
    pub verdict: Verdict,
    pub witness: String,
    pub witness_reverified: Option<bool>,
    pub witness_exact_rank: Option<usize>,
    pub subsets_checked: u128,
    pub dependent_subsets: u128,
    pub min_singular_value_seen: Option<f64>,
    pub spark: usize,
    pub spark_witness: String,
    pub spark_consistent: bool,
    pub arithmetic: Mode,
    pub precision: Precision,
}

fn robustness_row_at<T: Real>(n: usize, frame: Frame, mode: Mode, force: bool) -> Result<RobustnessRow> {
    let a = frame.build::<T>(n)?;
    let opts = EnumerationOptions::new(mode).forced(force);
    let r = maximal_robustness(&a, &opts)?;
    let exact_ok = n <= MAX_EXACT_MODULUS;
    let (witness_reverified, witness_exact_rank) = match &r.witness {
        Some(w) if exact_ok => {
            let rank = exact_subset_rank(&a, w)?;
            (Some(rank < w.len()), Some(rank))
        }
        Some(w) => (Some(verify_witness(&a, w, Mode::Floating)?), None),
        None => (None, None),
    };
    let spark_mode = if exact_ok && mode != Mode::Floating { Mode::Exact } else { Mode::Floating };
    let s = spark(&a, &EnumerationOptions::new(spark_mode).forced(force))?;
    Ok(RobustnessRow {
        modulus: n,
        frame,
        n_rows: r.n_rows,
        n_cols: r.n_cols,
        verdict: r.verdict,
        witness: r.witness.as_deref().map(join).unwrap_or_default(),
        witness_reverified,
        witness_exact_rank,
        subsets_checked: r.subsets_checked,
        dependent_subsets: r.dependent_subsets,
        min_singular_value_seen: r.min_singular_value_seen,
        spark: s.spark,
        spark_witness: s.witness.as_deref().map(join).unwrap_or_default(),
        spark_consistent: (s.spark == r.n_rows + 1) == (r.verdict == Verdict::Robust),
        arithmetic: r.arithmetic,
        precision: r.precision,
    })
}

pub fn robustness_row(n: usize, frame: Frame, params: &ScenarioParams) -> Result<RobustnessRow> {
    // past the oracle's size limit a cross-checked run falls back to floating point
    let mode = if n > MAX_EXACT_MODULUS && params.mode == Mode::Both { Mode::Floating } else { params.mode };
    match params.precision {
        Precision::Double => robustness_row_at::<f64>(n, frame, mode, params.force_budget),
        Precision::Extended => robustness_row_at::<Ext>(n, frame, mode, params.force_budget),
    }
}

pub fn robustness_rows(params: &ScenarioParams) -> Result<Vec<RobustnessRow>> {
    let mut rows = Vec::new();
    for &n in &params.primes {
        for &frame in &params.frames {
            rows.push(robustness_row(n, frame, params)?);
        }
    }
    Ok(rows)
}

pub(crate) fn run_robustness(dir: &Path, params: &ScenarioParams) -> Result<Vec<ClaimEntry>> {
    let rows = robustness_rows(params)?;
    let file = write_csv(dir, "robustness_sweep.csv", &rows)?;
    Ok(claims::robustness(&rows, &file))
}

/// One test signal per support of size `0..=max_sparsity`, in colex order
/// within each size. Values are drawn once per support from `seed`.
pub fn recovery_signals(n: usize, frame: Frame, max_sparsity: usize, seed: u64) -> Result<Vec<SparseSignal>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * n as u64 + u64::from(frame == Frame::Phi));
    let mut out = Vec::new();
    for s in 0..=max_sparsity.min(n) {
        let mut support: Vec<usize> = (0..s).collect();
        loop {
            let values = (0..s)
                .map(|_| {
                    let mag = rng.gen_range(0.5..2.0);
                    if frame.real_signals() {
                        Complex64::new(if rng.gen_bool(0.5) { mag } else { -mag }, 0.0)
                    } else {
                        Complex64::from_polar(mag, rng.gen_range(0.0..std::f64::consts::TAU))
                    }
                })
                .collect();
            out.push(SparseSignal::new(n, support.clone(), values)?);
            if s == 0 || !crate::subsets::next_colex(&mut support, n) {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct P0Row {
    pub modulus: usize,
    pub frame: Frame,
    pub n_rows: usize,
    pub support: String,
    pub l0: usize,
    pub verdict: Uniqueness,
    pub sparsest_found: Option<usize>,
    pub minimizers: usize,
    pub certificate_support: String,
    pub spark: usize,
    pub spark_predicts_unique: bool,
    pub consistent_with_p0: bool,
    pub within_half_omega: bool,
}

pub struct RecoveryInstance {
    pub frame: Frame,
    pub signal: SparseSignal,
    pub row: P0Row,
}

pub fn p0_instances(params: &ScenarioParams) -> Result<Vec<RecoveryInstance>> {
    let mut out = Vec::new();
    for &n in &params.primes {
        for &frame in &params.frames {
            let a = frame.build::<f64>(n)?;
            let spark_mode = if n <= MAX_EXACT_MODULUS { Mode::Exact } else { Mode::Floating };
            let sp = spark(&a, &EnumerationOptions::new(spark_mode).forced(params.force_budget))?.spark;
            let base = P0Options {
                tau_feas: params.tau_feas,
                force_budget: params.force_budget,
                ..P0Options::new(0).real_only(frame.real_signals())
            };
            for f in recovery_signals(n, frame, params.max_sparsity.min(a.rows()), params.seed)? {
                let u = uniqueness_check(&a, &f, &base)?;
                let y = a.mul_vec(&f.to_dense())?;
                let direct = p0_solve(&a, &y, &P0Options { s_max: f.l0(), ..base })?;
                let direct_unique = direct.sparsity_found == Some(f.l0())
                    && direct.solutions.len() == 1
                    && direct.solutions[0].approx_eq(&f, params.tau_feas);
                let p0 = u.p0.as_ref();
                let row = P0Row {
                    modulus: n,
                    frame,
                    n_rows: a.rows(),
                    support: join(f.support()),
                    l0: f.l0(),
                    verdict: u.verdict,
                    sparsest_found: p0.and_then(|r| r.sparsity_found),
                    minimizers: p0.map_or(0, |r| r.solutions.len()),
                    certificate_support: u.certificate.as_ref().map(|c| join(c.support())).unwrap_or_default(),
                    spark: sp,
                    spark_predicts_unique: 2 * f.l0() < sp,
                    consistent_with_p0: (u.verdict == Uniqueness::Unique) == direct_unique
                        && u.verdict != Uniqueness::Undecided,
                    within_half_omega: 2 * f.l0() <= a.rows(),
                };
                out.push(RecoveryInstance { frame, signal: f, row });
            }
        }
    }
    Ok(out)
}

pub(crate) fn run_p0(dir: &Path, params: &ScenarioParams) -> Result<Vec<ClaimEntry>> {
    let rows: Vec<P0Row> = p0_instances(params)?.into_iter().map(|i| i.row).collect();
    let file = write_csv(dir, "p0_uniqueness_sweep.csv", &rows)?;
    Ok(claims::p0(&rows, &file))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BpRow {
    pub modulus: usize,
    pub frame: Frame,
    pub support: String,
    pub l0: usize,
    pub p0_verdict: Uniqueness,
    pub bp_converged: bool,
    pub iterations: usize,
    pub feasibility_residual: f64,
    pub distance_to_f: f64,
    pub l1_f: f64,
    pub l1_bp: f64,
    pub bp_l0: usize,
    /// P0 unique, BP converged, yet BP landed elsewhere.
    pub l1_l0_gap: bool,
}

pub const BP_MATCH_TOL: f64 = 1e-6;

pub fn bp_rows(params: &ScenarioParams) -> Result<Vec<BpRow>> {
    p0_instances(params)?
        .into_iter()
        .map(|inst| {
            let n = inst.row.modulus;
            let a = inst.frame.build::<f64>(n)?;
            let y = a.mul_vec(&inst.signal.to_dense())?;
            let bp = basis_pursuit(&a, &y, &params.bp)?;
            let g = bp.estimate.as_deref().unwrap_or_default();
            let distance = l2_distance(g, &inst.signal.to_dense());
            Ok(BpRow {
                modulus: n,
                frame: inst.frame,
                support: inst.row.support,
                l0: inst.row.l0,
                p0_verdict: inst.row.verdict,
                bp_converged: bp.converged,
                iterations: bp.iterations.unwrap_or(0),
                feasibility_residual: bp.residual_l2,
                distance_to_f: distance,
                l1_f: inst.signal.l1(),
                l1_bp: l1_norm(g),
                bp_l0: bp.sparsity_found.unwrap_or(0),
                l1_l0_gap: inst.row.verdict == Uniqueness::Unique && bp.converged && distance > BP_MATCH_TOL,
            })
        })
        .collect()
}

pub(crate) fn run_bp(dir: &Path, params: &ScenarioParams) -> Result<Vec<ClaimEntry>> {
    let rows = bp_rows(params)?;
    let file = write_csv(dir, "bp_vs_p0.csv", &rows)?;
    Ok(claims::bp(&rows, &file))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: f64,
    pub m: f64,
    pub mu: f64,
    pub c: f64,
    pub max_sparsity: f64,
    pub floor: u64,
    /// Measurements the bound asks for at sparsity `floor + 1`.
    pub m_for_next_sparsity: u64,
    pub next_infeasible: bool,
}

pub fn bound_rows(params: &ScenarioParams) -> Result<Vec<BoundRow>> {
    params
        .bound_rows
        .iter()
        .map(|q| {
            let s = max_sparsity(q)?;
            let next = required_measurements(s.floor + 1, q.n, q.mu, q.c_const)?;
            Ok(BoundRow {
                n: q.n,
                m: q.m,
                mu: q.mu,
                c: q.c_const,
                max_sparsity: s.s,
                floor: s.floor,
                m_for_next_sparsity: next.m,
                next_infeasible: next.infeasible,
            })
        })
        .collect()
}

pub(crate) fn run_bound(dir: &Path, params: &ScenarioParams) -> Result<Vec<ClaimEntry>> {
    let rows = bound_rows(params)?;
    let file = write_csv(dir, "bound_table.csv", &rows)?;
    Ok(claims::bound(&rows, &file))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsifyRow {
    pub signal_length: usize,
    pub keep_fraction: f64,
    pub kept: usize,
    pub mse: f64,
    pub psnr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DctCheckRow {
    pub length: usize,
    pub roundtrip_max_error: f64,
    pub parseval_error: f64,
}

pub fn sparsify_rows(params: &ScenarioParams) -> Result<Vec<SparsifyRow>> {
    let x = synthetic_signal(params.signal_length);
    params
        .keep_fractions
        .iter()
        .map(|&f| {
            let s = sparsify(&x, f)?;
            Ok(SparsifyRow {
                signal_length: x.len(),
                keep_fraction: f,
                kept: s.kept,
                mse: s.mse,
                psnr_db: s.psnr_db,
            })
        })
        .collect()
}

/// Round-trip and Parseval errors on a seeded uniform vector.
pub fn dct_check(length: usize, seed: u64) -> Result<DctCheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..length).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = dct_forward(&x)?;
    let back = dct_inverse(&c)?;
    let roundtrip = x.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    Ok(DctCheckRow { length, roundtrip_max_error: roundtrip, parseval_error: (norm(&x) - norm(&c)).abs() })
}

#[derive(Serialize)]
struct SignalPair {
    index: usize,
    original: f64,
    reconstruction: f64,
}

pub(crate) fn run_sparsify(dir: &Path, params: &ScenarioParams) -> Result<Vec<ClaimEntry>> {
    let rows = sparsify_rows(params)?;
    let file = write_csv(dir, "sparsify_demo.csv", &rows)?;
    let check = dct_check(params.dct_check_length, params.seed)?;
    let check_file = write_csv(dir, "dct_check.csv", std::slice::from_ref(&check))?;
    // two-column export at the sparsest nonzero setting
    if let Some(&f) = params.keep_fractions.iter().filter(|f| **f > 0.0).min_by(|a, b| a.total_cmp(b)) {
        let x = synthetic_signal(params.signal_length);
        let s = sparsify(&x, f)?;
        let pairs: Vec<SignalPair> = x
            .iter()
            .zip(&s.reconstruction)
            .enumerate()
            .map(|(index, (&original, &reconstruction))| SignalPair { index, original, reconstruction })
            .collect();
        write_csv(dir, "sparsify_signal.csv", &pairs)?;
    }
    Ok(claims::sparsify(&rows, &file, &check, &check_file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovery_signals_cover_every_support() {
        let sigs = recovery_signals(7, Frame::Psi, 2, 3).unwrap();
        assert_eq!(sigs.len(), 1 + 7 + 21);
        assert_eq!(sigs[0].l0(), 0);
        assert_eq!(sigs[8].support(), &[0, 1]);
        let real = recovery_signals(5, Frame::Phi, 1, 3).unwrap();
        assert!(real.iter().flat_map(|s| s.values()).all(|v| v.im == 0.0 && v.re.abs() >= 0.5));
        assert_eq!(recovery_signals(7, Frame::Psi, 2, 3).unwrap(), sigs);
    }

    #[test]
    fn construction_row_n7() {
        let r = construction_row(7).unwrap();
        assert_eq!(r.omega_size, 5);
        assert_eq!((r.numeric_rank_psi, r.numeric_rank_phi), (5, 5));
        assert_eq!((r.exact_rank_psi, r.exact_rank_phi), (Some(5), Some(5)));
        assert!(r.cos_sin_offdiag_max <= 1e-12 && r.phi_max_imag <= 1e-12);
    }

    #[test]
    fn csv_writer_handles_options_and_enums() {
        let dir = tempfile::tempdir().unwrap();
        let row = robustness_row(5, Frame::Phi, &ScenarioParams::default()).unwrap();
        write_csv(dir.path(), "r.csv", std::slice::from_ref(&row)).unwrap();
        let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("5,phi,3,5,not_robust,0 1 2,true,2,"), "{text}");
    }
}
