use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::BoundQuery;
use crate::constructions::{is_prime, make_symmetric_omega, partial_fourier, realifier_q, realify};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::recovery::{BpParams, DEFAULT_TAU_FEAS};
use crate::robustness::{Mode, DEFAULT_SUBSET_BUDGET};
use crate::scalar::{Precision, Real};
use crate::subsets::checked_binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    RobustnessSweep,
    P0UniquenessSweep,
    BpVsP0,
    BoundTable,
    SparsifyDemo,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::RobustnessSweep,
        Scenario::P0UniquenessSweep,
        Scenario::BpVsP0,
        Scenario::BoundTable,
        Scenario::SparsifyDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::RobustnessSweep => "robustness_sweep",
            Scenario::P0UniquenessSweep => "p0_uniqueness_sweep",
            Scenario::BpVsP0 => "bp_vs_p0",
            Scenario::BoundTable => "bound_table",
            Scenario::SparsifyDemo => "sparsify_demo",
        }
    }
}

/// The two frames built from the symmetric frequency set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Psi,
    Phi,
}

impl Frame {
    pub fn build<T: Real>(self, n: usize) -> Result<DenseMatrix<T>> {
        let omega = make_symmetric_omega(n)?;
        let psi = partial_fourier::<T>(n, &omega)?;
        match self {
            Frame::Psi => Ok(psi),
            Frame::Phi => realify(&psi, &realifier_q(n)?),
        }
    }

    /// Φ experiments restrict signals to real vectors.
    pub fn real_signals(self) -> bool {
        self == Frame::Phi
    }
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Frame::Psi => "psi",
            Frame::Phi => "phi",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub primes: Vec<usize>,
    pub frames: Vec<Frame>,
    pub mode: Mode,
    pub precision: Precision,
    pub force_budget: bool,
    /// Largest ‖f‖₀ in the recovery sweeps.
    pub max_sparsity: usize,
    pub seed: u64,
    pub tau_feas: f64,
    pub bp: BpParams,
    pub bound_rows: Vec<BoundQuery>,
    pub signal_length: usize,
    pub keep_fractions: Vec<f64>,
    /// Length of the random vector used for the DCT round-trip check.
    pub dct_check_length: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            primes: vec![5, 7, 11, 13],
            frames: vec![Frame::Psi, Frame::Phi],
            mode: Mode::Both,
            precision: Precision::Double,
            force_budget: false,
            max_sparsity: 2,
            seed: 0,
            tau_feas: DEFAULT_TAU_FEAS,
            bp: BpParams::default(),
            bound_rows: vec![
                BoundQuery::new(1024.0, 512.0, 1.0),
                BoundQuery::new(1024.0, 512.0, 32.0),
                BoundQuery::new(4096.0, 1024.0, 1.0),
                BoundQuery::new(65536.0, 8192.0, 1.0),
            ],
            signal_length: 4096,
            keep_fractions: vec![0.0, 0.002, 0.02, 0.2, 1.0],
            dct_check_length: 1 << 20,
        }
    }
}

impl ScenarioParams {
    /// Defaults for the recovery sweeps use the smaller primes.
    pub fn recovery_defaults() -> Self {
        Self { primes: vec![5, 7, 11], ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub params: ScenarioParams,
}

impl ExperimentSpec {
    pub fn new(scenario: Scenario) -> Self {
        let params = match scenario {
            Scenario::P0UniquenessSweep | Scenario::BpVsP0 => ScenarioParams::recovery_defaults(),
            _ => ScenarioParams::default(),
        };
        Self { scenario, output_path: None, params }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let uses_primes = matches!(
            self.scenario,
            Scenario::RobustnessSweep | Scenario::P0UniquenessSweep | Scenario::BpVsP0
        );
        if uses_primes {
            if p.primes.is_empty() || p.frames.is_empty() {
                return Err(Error::InvalidInput("scenario needs at least one prime and one frame".into()));
            }
            for &n in &p.primes {
                if n < 3 || !is_prime(n as u64) {
                    return Err(Error::NotOddPrime(n as u64));
                }
                let rows = crate::constructions::symmetric_omega_size(n);
                let count = match self.scenario {
                    Scenario::RobustnessSweep => checked_binomial(n, rows)?,
                    _ => (0..=p.max_sparsity.min(rows)).try_fold(0u128, |acc, s| {
                        checked_binomial(n, s).map(|c| acc.saturating_add(c))
                    })?,
                };
                if count > DEFAULT_SUBSET_BUDGET && !p.force_budget {
                    return Err(Error::BudgetExceeded { count, budget: DEFAULT_SUBSET_BUDGET });
                }
            }
        }
        if p.seed > i64::MAX as u64 {
            return Err(Error::InvalidInput("seed must be below 2^63".into()));
        }
        if !(p.tau_feas > 0.0) {
            return Err(Error::InvalidInput("tau_feas must be positive".into()));
        }
        if p.keep_fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::InvalidInput("keep fractions must lie in [0, 1]".into()));
        }
        if self.scenario == Scenario::SparsifyDemo && (p.signal_length == 0 || p.dct_check_length == 0) {
            return Err(Error::InvalidInput("signal lengths must be positive".into()));
        }
        for q in &p.bound_rows {
            q.validate()?;
        }
        Ok(())
    }
}
