//! Experiment specs, scenario runners and the consolidated verification
//! report. A run writes CSV tables and `report.json` into one directory.

pub mod claims;
mod report;
pub mod scenarios;
mod spec;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use report::{ClaimEntry, ClaimVerdict, ReportBody, SeedEntry, SeedRegistry, Timestamps, VerificationReport};
pub use spec::{ExperimentSpec, Frame, Scenario, ScenarioParams};

use crate::error::{Error, Result};
use crate::scalar::Precision;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn run_scenario(dir: &Path, spec: &ExperimentSpec) -> Result<Vec<ClaimEntry>> {
    let p = &spec.params;
    match spec.scenario {
        Scenario::RobustnessSweep => scenarios::run_robustness(dir, p),
        Scenario::P0UniquenessSweep => scenarios::run_p0(dir, p),
        Scenario::BpVsP0 => scenarios::run_bp(dir, p),
        Scenario::BoundTable => scenarios::run_bound(dir, p),
        Scenario::SparsifyDemo => scenarios::run_sparsify(dir, p),
    }
}

fn echo(spec: &ExperimentSpec) -> ExperimentSpec {
    ExperimentSpec { output_path: None, ..spec.clone() }
}

fn finish(dir: &Path, body: ReportBody, started: u128) -> Result<VerificationReport> {
    let report = VerificationReport {
        body,
        timestamps: Timestamps { started_unix_ms: started, finished_unix_ms: report::now_ms() },
    };
    report.write(dir)?;
    Ok(report)
}

/// Runs one scenario into `spec.output_path` (default `out/<scenario>`).
/// A hard error still leaves a report marked as aborted.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<VerificationReport> {
    let started = report::now_ms();
    spec.validate()?;
    let dir = spec.output_path.clone().unwrap_or_else(|| PathBuf::from("out").join(spec.scenario.name()));
    std::fs::create_dir_all(&dir)?;
    let mut body = ReportBody {
        tool_version: TOOL_VERSION.into(),
        precision: spec.params.precision,
        specs: vec![echo(spec)],
        claims: vec![],
        seed_registry: SeedRegistry::new(spec.params.seed),
        aborted: None,
    };
    match run_scenario(&dir, spec) {
        Ok(claims) => {
            body.claims = claims;
            finish(&dir, body, started)
        }
        Err(e) => {
            body.aborted = Some(e.to_string());
            finish(&dir, body, started)?;
            Err(e)
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub master_seed: u64,
    pub precision: Precision,
    pub out_dir: PathBuf,
    pub force_budget: bool,
    /// Run the independent steps concurrently.
    pub parallel: bool,
}

impl VerifyOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self { master_seed: 0, precision: Precision::Double, out_dir: out_dir.into(), force_budget: false, parallel: false }
    }
}

/// The default suite: the five scenarios at their default parameters, seeds
/// expanded from the master seed.
pub fn default_specs(opts: &VerifyOptions, seeds: &mut SeedRegistry) -> Vec<ExperimentSpec> {
    let recovery_seed = seeds.seed_for("recovery_instances");
    let dct_seed = seeds.seed_for("dct_check");
    Scenario::ALL
        .into_iter()
        .map(|s| {
            let mut spec = ExperimentSpec::new(s);
            spec.params.precision = opts.precision;
            spec.params.force_budget = opts.force_budget;
            spec.params.seed = match s {
                Scenario::P0UniquenessSweep | Scenario::BpVsP0 => recovery_seed,
                Scenario::SparsifyDemo => dct_seed,
                _ => 0,
            };
            spec
        })
        .collect()
}

/// Runs every claim check and writes one consolidated report. Claims are
/// ordered the same way regardless of `parallel`.
pub fn verify_all(opts: &VerifyOptions) -> Result<VerificationReport> {
    let started = report::now_ms();
    std::fs::create_dir_all(&opts.out_dir)?;
    let mut seeds = SeedRegistry::new(opts.master_seed);
    let specs = default_specs(opts, &mut seeds);
    let dir = opts.out_dir.as_path();

    // step 0 is the construction suite, then one step per scenario
    let step = |i: usize| -> Result<Vec<ClaimEntry>> {
        if i == 0 {
            scenarios::run_constructions(dir)
        } else {
            run_scenario(dir, &specs[i - 1])
        }
    };
    let results: Vec<Result<Vec<ClaimEntry>>> = if opts.parallel {
        (0..=specs.len()).into_par_iter().map(step).collect()
    } else {
        let mut out = Vec::new();
        for i in 0..=specs.len() {
            let r = step(i);
            let failed = r.is_err();
            out.push(r);
            if failed {
                break;
            }
        }
        out
    };

    let mut body = ReportBody {
        tool_version: TOOL_VERSION.into(),
        precision: opts.precision,
        specs: specs.iter().map(echo).collect(),
        claims: vec![],
        seed_registry: seeds,
        aborted: None,
    };
    let mut first_error: Option<Error> = None;
    for r in results {
        match r {
            Ok(c) => body.claims.extend(c),
            Err(e) => {
                if first_error.is_none() {
                    body.aborted = Some(e.to_string());
                    first_error = Some(e);
                }
            }
        }
    }
    if let Some(e) = first_error {
        finish(dir, body, started)?;
        return Err(e);
    }
    body.claims.extend(claims::out_of_scope());
    finish(dir, body, started)
}
