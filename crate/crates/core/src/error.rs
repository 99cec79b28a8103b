use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("realified matrix has imaginary residue {residue:e} above tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("singular value iteration did not converge for matrix `{0}`")]
    SvdNoConvergence(String),

    #[error("floating and exact rank disagree on columns {columns:?} of `{label}` (floating {floating}, exact {exact})")]
    VerdictDisagreement {
        label: String,
        columns: Vec<usize>,
        floating: usize,
        exact: usize,
    },

    #[error("matrix `{0}` has no exact cyclotomic representation")]
    NotRepresentable(String),

    #[error("subset enumeration needs {count} checks, budget is {budget} (pass --force-budget to override)")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("subset count C({n}, {k}) overflows")]
    SubsetOverflow { n: usize, k: usize },

    #[error("row {row} is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { row: usize, deviation: f64 },

    #[error("signal is infeasible against its own measurements (residual {0:e})")]
    SelfInfeasible(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status for the CLI: 1 usage, 2 numerical hard error, 3 budget refusal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } | Error::SubsetOverflow { .. } => 3,
            Error::ImaginaryResidue { .. }
            | Error::SvdNoConvergence(_)
            | Error::VerdictDisagreement { .. }
            | Error::SelfInfeasible(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            _ => 1,
        }
    }
}
