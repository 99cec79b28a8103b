//! Maximal robustness and spark by exhaustive column-subset enumeration.
//!
//! Each subset can be judged in floating point (Jacobi singular values at the
//! matrix's precision, relative cutoff `τ_rank`) or exactly (fraction-free
//! elimination over `Z[ω]`). In `Both` mode every subset is judged twice and
//! any disagreement is a hard error.

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycloMatrix;
use crate::error::{Error, Result};
use crate::linalg::{rank_from_singular_values, singular_values};
use crate::matrix::DenseMatrix;
use crate::scalar::{Precision, Real};
use crate::subsets::{checked_binomial, scan, SubsetOutcome};

/// Exhaustive enumeration is refused above this many subsets unless forced.
pub const DEFAULT_SUBSET_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Floating,
    Exact,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Robust,
    NotRobust,
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    pub mode: Mode,
    pub force_budget: bool,
    pub budget: u128,
}

impl EnumerationOptions {
    pub fn new(mode: Mode) -> Self {
        Self { mode, force_budget: false, budget: DEFAULT_SUBSET_BUDGET }
    }

    pub fn forced(mut self, force: bool) -> Self {
        self.force_budget = force;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub matrix_id: String,
    pub n_rows: usize,
    pub n_cols: usize,
    pub verdict: Verdict,
    pub witness: Option<Vec<usize>>,
    pub subsets_checked: u128,
    pub dependent_subsets: u128,
    /// Smallest singular value over all checked subsets (floating paths only).
    pub min_singular_value_seen: Option<f64>,
    pub arithmetic: Mode,
    pub precision: Precision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparkResult {
    pub matrix_id: String,
    pub spark: usize,
    /// No dependent subset of size up to `n_rows`; `spark = n_rows + 1`.
    pub full: bool,
    pub witness: Option<Vec<usize>>,
    pub subsets_checked: u128,
    pub arithmetic: Mode,
}

/// Per-subset judge shared by robustness and spark.
struct SubsetJudge<'a, T: Real> {
    a: &'a DenseMatrix<T>,
    exact: Option<CycloMatrix>,
    mode: Mode,
    tau: T,
}

impl<'a, T: Real> SubsetJudge<'a, T> {
    fn new(a: &'a DenseMatrix<T>, mode: Mode) -> Result<Self> {
        let exact = match mode {
            Mode::Floating => None,
            Mode::Exact | Mode::Both => {
                let form = a
                    .exact_form()
                    .ok_or_else(|| Error::NotRepresentable(a.label().to_string()))?;
                let m = CycloMatrix::from_form(form)?;
                if (m.rows(), m.cols()) != a.shape() {
                    return Err(Error::Dimension("exact form does not match matrix shape".into()));
                }
                Some(m)
            }
        };
        Ok(Self { a, exact, mode, tau: T::rank_tolerance() })
    }

    fn floating_rank(&self, columns: &[usize]) -> Result<(usize, f64)> {
        let sub = self.a.select_columns(columns)?;
        let sv = singular_values(&sub)?;
        let sigma_min = sv.last().map_or(0.0, Real::to_f64);
        Ok((rank_from_singular_values(&sv, &self.tau), sigma_min))
    }

    fn judge(&self, columns: &[usize]) -> Result<SubsetOutcome> {
        let s = columns.len();
        match self.mode {
            Mode::Floating => {
                let (r, sigma) = self.floating_rank(columns)?;
                Ok(SubsetOutcome { dependent: r < s, sigma_min: Some(sigma) })
            }
            Mode::Exact => {
                let r = self.exact.as_ref().expect("exact matrix").rank_of_columns(columns);
                Ok(SubsetOutcome { dependent: r < s, sigma_min: None })
            }
            Mode::Both => {
                let (fr, sigma) = self.floating_rank(columns)?;
                let er = self.exact.as_ref().expect("exact matrix").rank_of_columns(columns);
                if fr != er {
                    return Err(Error::VerdictDisagreement {
                        label: self.a.label().to_string(),
                        columns: columns.to_vec(),
                        floating: fr,
                        exact: er,
                    });
                }
                Ok(SubsetOutcome { dependent: er < s, sigma_min: Some(sigma) })
            }
        }
    }
}

fn guard(count: u128, opts: &EnumerationOptions) -> Result<()> {
    if count > opts.budget && !opts.force_budget {
        return Err(Error::BudgetExceeded { count, budget: opts.budget });
    }
    Ok(())
}

/// Checks every `n_rows`-column subset for linear independence.
pub fn maximal_robustness<T: Real>(a: &DenseMatrix<T>, opts: &EnumerationOptions) -> Result<RobustnessReport> {
    let (n_rows, n_cols) = a.shape();
    if n_rows > n_cols {
        return Err(Error::Dimension(format!("need rows <= cols, got {n_rows}x{n_cols}")));
    }
    let total = checked_binomial(n_cols, n_rows)?;
    guard(total, opts)?;
    let judge = SubsetJudge::new(a, opts.mode)?;
    let summary = scan(n_cols, n_rows, false, |cols| judge.judge(cols))?;
    debug_assert_eq!(summary.checked, total);
    let witness = summary.first_dependent.map(|(_, w)| w);
    Ok(RobustnessReport {
        matrix_id: a.label().to_string(),
        n_rows,
        n_cols,
        verdict: if witness.is_none() { Verdict::Robust } else { Verdict::NotRobust },
        witness,
        subsets_checked: summary.checked,
        dependent_subsets: summary.dependent,
        min_singular_value_seen: summary.min_sigma,
        arithmetic: opts.mode,
        precision: T::PRECISION,
    })
}

/// Smallest number of linearly dependent columns, searched by ascending size.
pub fn spark<T: Real>(a: &DenseMatrix<T>, opts: &EnumerationOptions) -> Result<SparkResult> {
    let (n_rows, n_cols) = a.shape();
    if n_rows > n_cols {
        return Err(Error::Dimension(format!("need rows <= cols, got {n_rows}x{n_cols}")));
    }
    let mut budget_used: u128 = 0;
    for s in 1..=n_rows {
        budget_used = budget_used.saturating_add(checked_binomial(n_cols, s)?);
    }
    guard(budget_used, opts)?;
    let judge = SubsetJudge::new(a, opts.mode)?;
    let mut checked = 0;
    for s in 1..=n_rows {
        let summary = scan(n_cols, s, true, |cols| judge.judge(cols))?;
        checked += summary.checked;
        if let Some((_, witness)) = summary.first_dependent {
            return Ok(SparkResult {
                matrix_id: a.label().to_string(),
                spark: s,
                full: false,
                witness: Some(witness),
                subsets_checked: checked,
                arithmetic: opts.mode,
            });
        }
    }
    Ok(SparkResult {
        matrix_id: a.label().to_string(),
        spark: n_rows + 1,
        full: true,
        witness: None,
        subsets_checked: checked,
        arithmetic: opts.mode,
    })
}

/// Re-checks that `witness` columns are dependent: exact rank below the
/// subset size, or smallest singular value at most `τ_rank` relative.
pub fn verify_witness<T: Real>(a: &DenseMatrix<T>, witness: &[usize], mode: Mode) -> Result<bool> {
    let judge = SubsetJudge::new(a, mode)?;
    Ok(judge.judge(witness)?.dependent)
}

/// Exact rank of a column subset; the matrix needs an exact form.
pub fn exact_subset_rank<T: Real>(a: &DenseMatrix<T>, columns: &[usize]) -> Result<usize> {
    let form = a
        .exact_form()
        .ok_or_else(|| Error::NotRepresentable(a.label().to_string()))?;
    Ok(CycloMatrix::from_form(form)?.rank_of_columns(columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_symmetric_omega, partial_fourier, realifier_q, realify, FrequencySet};

    #[test]
    fn full_dft_is_robust_with_single_subset() {
        let psi = partial_fourier::<f64>(5, &FrequencySet::full(5)).unwrap();
        let r = maximal_robustness(&psi, &EnumerationOptions::new(Mode::Both)).unwrap();
        assert_eq!(r.verdict, Verdict::Robust);
        assert_eq!(r.subsets_checked, 1);
        assert!(r.witness.is_none());
    }

    #[test]
    fn duplicated_column_has_spark_two() {
        let a = DenseMatrix::<f64>::from_real_rows(
            "I3+dup",
            &[vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]],
        )
        .unwrap();
        for mode in [Mode::Floating, Mode::Exact, Mode::Both] {
            let s = spark(&a, &EnumerationOptions::new(mode)).unwrap();
            assert_eq!(s.spark, 2);
            assert_eq!(s.witness.as_deref(), Some(&[0, 3][..]));
            let r = maximal_robustness(&a, &EnumerationOptions::new(mode)).unwrap();
            assert_eq!(r.verdict, Verdict::NotRobust);
            assert_eq!(r.witness.as_deref(), Some(&[0, 1, 3][..]));
        }
    }

    #[test]
    fn phi_n5_witness_is_constant_and_cosines() {
        let omega = make_symmetric_omega(5).unwrap();
        let psi = partial_fourier::<f64>(5, &omega).unwrap();
        let phi = realify(&psi, &realifier_q(5).unwrap()).unwrap();
        let r = maximal_robustness(&phi, &EnumerationOptions::new(Mode::Both)).unwrap();
        assert_eq!(r.verdict, Verdict::NotRobust);
        assert_eq!(r.witness.as_deref(), Some(&[0, 1, 2][..]));
        assert_eq!(exact_subset_rank(&phi, &[0, 1, 2]).unwrap(), 2);
    }

    #[test]
    fn budget_guard_refuses_and_force_overrides() {
        let psi = partial_fourier::<f64>(5, &make_symmetric_omega(5).unwrap()).unwrap();
        let mut opts = EnumerationOptions::new(Mode::Floating);
        opts.budget = 5;
        assert!(matches!(maximal_robustness(&psi, &opts), Err(Error::BudgetExceeded { .. })));
        opts.force_budget = true;
        assert!(maximal_robustness(&psi, &opts).is_ok());
    }

    #[test]
    fn exact_mode_needs_exact_form() {
        let a = DenseMatrix::<f64>::from_real_rows("half", &[vec![0.5, 1.0]]).unwrap();
        assert!(matches!(
            maximal_robustness(&a, &EnumerationOptions::new(Mode::Exact)),
            Err(Error::NotRepresentable(_))
        ));
        assert!(maximal_robustness(&a, &EnumerationOptions::new(Mode::Floating)).is_ok());
    }

    #[test]
    fn rejects_tall_matrix() {
        let a = DenseMatrix::<f64>::from_real_rows("tall", &[vec![1.0], vec![2.0]]).unwrap();
        assert!(maximal_robustness(&a, &EnumerationOptions::new(Mode::Floating)).is_err());
    }
}
