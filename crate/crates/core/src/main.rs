use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use csverify::bounds::{max_sparsity, required_measurements, sparsify, synthetic_signal, BoundQuery, DEFAULT_C};
use csverify::constructions::{make_random_omega, make_symmetric_omega, partial_fourier, realifier_q, realify};
use csverify::harness::{run_experiment, verify_all, ExperimentSpec, Frame, VerificationReport, VerifyOptions};
use csverify::recovery::{basis_pursuit, p0_solve, BpParams, P0Options, SparseSignal, DEFAULT_TAU_FEAS};
use csverify::robustness::{maximal_robustness, spark, EnumerationOptions, Mode};
use csverify::{DenseMatrix, Error, Ext, Precision, Real, Result};

#[derive(Parser)]
#[command(name = "csverify", version, about = "Checks partial Fourier frames, sparse recovery and the sample-complexity bound")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Significand width for floating-point rank decisions.
    #[arg(long, global = true, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for tables and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Enumerate even past the subset budget.
    #[arg(long, global = true)]
    force_budget: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Psi,
    Phi,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Psi,
    Q,
    Phi,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Floating,
    Exact,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Frequency set: symmetric, or uniformly random with --m.
    Omega {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Print Ψ, Q or Φ as JSON.
    Frame {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Phi)]
        kind: KindArg,
    },
    /// Maximal robustness by exhaustive column subsets.
    Robustness(FrameQuery),
    /// Smallest dependent column subset.
    Spark(FrameQuery),
    /// Brute-force sparsest solution for a signal's measurements.
    P0 {
        #[command(flatten)]
        target: SignalTarget,
        #[arg(long)]
        s_max: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TAU_FEAS)]
        tau_feas: f64,
        /// Restrict solutions to real vectors.
        #[arg(long)]
        real_only: bool,
    },
    /// Basis pursuit on a signal's measurements.
    Bp {
        #[command(flatten)]
        target: SignalTarget,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 50_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol_primal: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol_dual: f64,
    },
    /// Sparsity budget for (n, m, mu), or measurements needed for --s.
    Bound {
        #[arg(long)]
        n: f64,
        #[arg(long, required_unless_present = "s")]
        m: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        #[arg(long, conflicts_with = "m")]
        s: Option<u64>,
    },
    /// Keep the largest DCT coefficients of the synthetic signal.
    Sparsify {
        #[arg(long)]
        keep: f64,
        #[arg(long, default_value_t = 4096)]
        length: usize,
    },
    /// Run the full claim suite into --out.
    Verify {
        #[arg(long)]
        parallel: bool,
    },
    /// Run one experiment from a TOML spec.
    Run {
        spec: PathBuf,
    },
}

#[derive(Args)]
struct FrameQuery {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = FrameArg::Phi)]
    frame: FrameArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Floating)]
    mode: ModeArg,
}

#[derive(Args)]
struct SignalTarget {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = FrameArg::Psi)]
    frame: FrameArg,
    /// CSV with `index,real,imag` rows.
    #[arg(long)]
    signal: PathBuf,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Psi => Frame::Psi,
            FrameArg::Phi => Frame::Phi,
        }
    }
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Floating => Mode::Floating,
            ModeArg::Exact => Mode::Exact,
            ModeArg::Both => Mode::Both,
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Serialize)]
struct MatrixView {
    label: String,
    rows: usize,
    cols: usize,
    real: bool,
    /// Row-major `[re, im]` pairs.
    entries: Vec<Vec<[f64; 2]>>,
}

fn matrix_view(a: &DenseMatrix<f64>) -> MatrixView {
    MatrixView {
        label: a.label().to_string(),
        rows: a.rows(),
        cols: a.cols(),
        real: a.is_real(),
        entries: (0..a.rows()).map(|i| a.row(i).iter().map(|z| [z.re, z.im]).collect()).collect(),
    }
}

fn frame_query<T: Real>(q: &FrameQuery, global: &Global, want_spark: bool) -> Result<()> {
    let a = Frame::from(q.frame).build::<T>(q.n)?;
    let opts = EnumerationOptions::new(q.mode.into()).forced(global.force_budget);
    if want_spark {
        print_json(&spark(&a, &opts)?)
    } else {
        print_json(&maximal_robustness(&a, &opts)?)
    }
}

fn load_target(t: &SignalTarget) -> Result<(DenseMatrix<f64>, SparseSignal)> {
    let a = Frame::from(t.frame).build::<f64>(t.n)?;
    let f = SparseSignal::read_csv(File::open(&t.signal)?, t.n)?;
    Ok((a, f))
}

#[derive(Serialize)]
struct SparsifySummary {
    length: usize,
    keep_fraction: f64,
    kept: usize,
    mse: f64,
    psnr_db: f64,
    table: PathBuf,
}

fn print_verify(report: &VerificationReport, dir: &std::path::Path) {
    for c in &report.body.claims {
        println!("{:<28} {}", c.claim_id, c.verdict);
    }
    println!("report: {}", dir.join("report.json").display());
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let precision: Precision = g.precision.into();
    match &cli.command {
        Command::Omega { n, m } => match m {
            Some(m) => print_json(&make_random_omega(*n, *m, g.seed)?),
            None => print_json(&make_symmetric_omega(*n)?),
        },
        Command::Frame { n, kind } => {
            let omega = make_symmetric_omega(*n)?;
            let a = match kind {
                KindArg::Psi => partial_fourier::<f64>(*n, &omega)?,
                KindArg::Q => realifier_q::<f64>(*n)?,
                KindArg::Phi => realify(&partial_fourier::<f64>(*n, &omega)?, &realifier_q(*n)?)?,
            };
            print_json(&matrix_view(&a))
        }
        Command::Robustness(q) | Command::Spark(q) => {
            let want_spark = matches!(cli.command, Command::Spark(_));
            match precision {
                Precision::Double => frame_query::<f64>(q, g, want_spark),
                Precision::Extended => frame_query::<Ext>(q, g, want_spark),
            }
        }
        Command::P0 { target, s_max, tau_feas, real_only } => {
            let (a, f) = load_target(target)?;
            let y = a.mul_vec(&f.to_dense())?;
            let opts = P0Options {
                s_max: s_max.unwrap_or(f.l0()),
                tau_feas: *tau_feas,
                force_budget: g.force_budget,
                ..P0Options::new(0).real_only(*real_only)
            };
            print_json(&p0_solve(&a, &y, &opts)?)
        }
        Command::Bp { target, rho, max_iter, tol_primal, tol_dual } => {
            let (a, f) = load_target(target)?;
            let y = a.mul_vec(&f.to_dense())?;
            let params = BpParams { rho: *rho, max_iter: *max_iter, tol_primal: *tol_primal, tol_dual: *tol_dual };
            print_json(&basis_pursuit(&a, &y, &params)?)
        }
        Command::Bound { n, m, mu, c, s } => match (m, s) {
            (_, Some(s)) => print_json(&required_measurements(*s, *n, *mu, *c)?),
            (Some(m), None) => print_json(&max_sparsity(&BoundQuery { n: *n, m: *m, mu: *mu, c_const: *c })?),
            (None, None) => Err(Error::InvalidInput("pass --m or --s".into())),
        },
        Command::Sparsify { keep, length } => {
            let x = synthetic_signal(*length);
            let s = sparsify(&x, *keep)?;
            std::fs::create_dir_all(&g.out)?;
            let table = g.out.join("sparsify_signal.csv");
            let mut w = csv::Writer::from_path(&table)?;
            w.write_record(["index", "original", "reconstruction"])?;
            for (i, (a, b)) in x.iter().zip(&s.reconstruction).enumerate() {
                w.write_record([i.to_string(), a.to_string(), b.to_string()])?;
            }
            w.flush()?;
            print_json(&SparsifySummary {
                length: *length,
                keep_fraction: *keep,
                kept: s.kept,
                mse: s.mse,
                psnr_db: s.psnr_db,
                table,
            })
        }
        Command::Verify { parallel } => {
            let opts = VerifyOptions {
                master_seed: g.seed,
                precision,
                out_dir: g.out.clone(),
                force_budget: g.force_budget,
                parallel: *parallel,
            };
            let report = verify_all(&opts)?;
            print_verify(&report, &g.out);
            Ok(())
        }
        Command::Run { spec } => {
            let mut spec = ExperimentSpec::load(spec)?;
            if spec.output_path.is_none() {
                spec.output_path = Some(g.out.clone());
            }
            let report = run_experiment(&spec)?;
            print_verify(&report, spec.output_path.as_deref().unwrap_or(&g.out));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
