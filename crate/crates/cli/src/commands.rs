use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cscert::certify::{self, CertificationReport, CertifyOptions, DEFAULT_BUDGET};
use cscert::dft::{self, parse_positions, DftUniquenessResult, MissingSamplePattern};
use cscert::recon::{self, AmplitudeLaw, ExperimentOptions, MeasurementVector};
use cscert::{Error, MeasurementMatrix, Result};

/// Certify compressive-sensing measurement matrices. All indices are 0-based.
#[derive(Debug, Parser)]
#[command(name = "cscert", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spark, coherence, Welch bound, RIP profile and sparsity limits of a matrix.
    Certify(CertifyArgs),
    /// Closed-form unique-sparsity limit for DFT-sparse signals with missing samples.
    DftLimit(DftArgs),
    /// Write a constructed measurement matrix as CSV.
    Gen(GenArgs),
    /// Reconstruct a sparse vector from measurements with orthogonal matching pursuit.
    Recon(ReconArgs),
    /// Monte-Carlo recovery rates per sparsity.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Matrix CSV (rows of real or `a+bi` cells, no header).
    #[arg(long)]
    matrix: PathBuf,
    /// Largest RIP order; defaults to min(M, N, 5).
    #[arg(long)]
    kmax: Option<usize>,
    /// Cap on submatrix evaluations across the spark and RIP sweeps.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Normalize columns before certifying.
    #[arg(long)]
    normalize: bool,
    /// Exit 0 even when the budget ran out and results are lower bounds.
    #[arg(long)]
    allow_approx: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DftArgs {
    /// Signal length, a power of two.
    #[arg(long, required_unless_present = "pattern")]
    n: Option<usize>,
    /// Comma-separated missing positions.
    #[arg(long, default_value = "", conflicts_with = "pattern")]
    missing: String,
    /// Pattern file: first line N, second line the missing positions.
    #[arg(long, conflicts_with = "n")]
    pattern: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixChoice {
    Gaussian,
    PartialIdft,
    RandomFourier,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    kind: MatrixChoice,
    /// Number of measurements M (gaussian, random-fourier without --times).
    #[arg(long)]
    rows: Option<usize>,
    /// Number of coefficients N.
    #[arg(long)]
    cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample positions kept (partial-idft).
    #[arg(long)]
    positions: Option<String>,
    /// Sample positions missing (partial-idft, alternative to --positions).
    #[arg(long, conflicts_with = "positions")]
    missing: Option<String>,
    /// Comma-separated sampling instants (random-fourier).
    #[arg(long)]
    times: Option<String>,
    /// Observation interval length T (random-fourier).
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    /// Scale Fourier rows by 1/sqrt(M) instead of 1/N (partial-idft) or 1 (random-fourier).
    #[arg(long)]
    normalize: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Measurement CSV: a single column (or row) of M values.
    #[arg(long)]
    measurements: PathBuf,
    /// Target sparsity.
    #[arg(long)]
    k: usize,
    /// Stop once the residual norm drops to this value.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Law {
    UnitPhase,
    ComplexNormal,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 1)]
    kmin: usize,
    #[arg(long)]
    kmax: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative l2 error counted as exact recovery.
    #[arg(long, default_value_t = recon::DEFAULT_RECOVERY_TOL)]
    recovery_tol: f64,
    #[arg(long, value_enum, default_value_t = Law::UnitPhase)]
    law: Law,
    #[arg(long)]
    normalize: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Certify(a) => run_certify(a),
        Command::DftLimit(a) => run_dft(a).map(|()| 0),
        Command::Gen(a) => run_gen(a).map(|()| 0),
        Command::Recon(a) => run_recon(a).map(|()| 0),
        Command::Experiment(a) => run_experiment(a).map(|()| 0),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load_matrix(path: &Path, normalize: bool) -> Result<MeasurementMatrix> {
    let a = MeasurementMatrix::load_csv(path)?;
    if normalize {
        a.normalize_columns()
    } else {
        Ok(a)
    }
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<usize>> {
    parse_positions(text)
        .map_err(|(i, f)| Error::Argument(format!("{flag}: field {i} ({f:?}) is not an index")))
}

fn run_certify(args: CertifyArgs) -> Result<u8> {
    let a = load_matrix(&args.matrix, args.normalize)?;
    let mut opts = CertifyOptions::for_matrix(&a);
    opts.budget = args.budget;
    if let Some(k) = args.kmax {
        let limit = a.rows().min(a.cols());
        if k == 0 || k > limit {
            return Err(Error::Argument(format!("--kmax must lie in 1..={limit}")));
        }
        opts.k_max = k;
    }
    let report = certify::certify(&a, &opts)?;
    let text = match args.format {
        Format::Json => to_json(&report),
        Format::Text => certify_text(&report),
        Format::Csv => return Err(Error::Argument("certify supports json or text".into())),
    };
    emit(args.output.as_deref(), &text)?;
    Ok(if report.is_exact() || args.allow_approx { 0 } else { 2 })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "inf".to_string(), |v| format!("{v:.6}"))
}

fn certify_text(r: &CertificationReport) -> String {
    let mut s = String::new();
    let approx = |exact: bool| if exact { "" } else { " (lower bound)" };
    let _ = writeln!(s, "matrix            {} x {} ({:?})", r.rows, r.cols, r.kind);
    let spark = r.spark.map_or_else(|| "none (columns independent)".into(), |v| v.to_string());
    let _ = writeln!(s, "spark             {spark}{}", approx(r.spark_exact));
    let _ = writeln!(s, "coherence         {:.6} at columns {:?}", r.coherence, r.coherence_pair);
    if r.coherence_ties.len() > 1 {
        let _ = writeln!(s, "  tied pairs      {:?}", r.coherence_ties);
    }
    let _ = writeln!(s, "welch bound       {:.6}", r.welch);
    for o in &r.rip.orders {
        let _ = writeln!(s, "delta_{:<2}          {:.6}{}", o.order, o.delta, approx(o.exact));
    }
    let _ = writeln!(s, "limits (largest guaranteed K)");
    let _ = writeln!(s, "  spark           {}", r.spark_limit);
    let _ = writeln!(
        s,
        "  coherence       {}  (K < {})",
        r.coherence_limit,
        opt(r.coherence_threshold)
    );
    let _ = writeln!(s, "  welch (best)    K < {}", opt(r.welch_threshold));
    let _ = writeln!(s, "  rip delta_2K<1  {}", r.rip_unique_limit);
    let _ = writeln!(s, "  l1 sqrt2-1      {}", r.l1_equiv_limit_sqrt2);
    let _ = writeln!(s, "  l1 0.493        {}", r.l1_equiv_limit_0493);
    s
}

fn run_dft(args: DftArgs) -> Result<()> {
    let pattern = match (&args.pattern, args.n) {
        (Some(path), _) => MissingSamplePattern::load(path)?,
        (None, Some(n)) => MissingSamplePattern::new(n, parse_list("--missing", &args.missing)?)?,
        (None, None) => return Err(Error::Argument("either --n or --pattern is required".into())),
    };
    let result = dft::dft_sparsity_limit(&pattern);
    let text = match args.format {
        Format::Json => to_json(&result),
        Format::Text => dft_text(&result),
        Format::Csv => return Err(Error::Argument("dft-limit supports json or text".into())),
    };
    emit(args.output.as_deref(), &text)
}

fn dft_text(r: &DftUniquenessResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "N = {}, Q = {}", r.n, r.missing.len());
    let _ = writeln!(s, "{:>3} {:>7} {:>8} {:>8} {:>5}", "h", "modulus", "Q_2^h", "residue", "term");
    for row in &r.derivation {
        let _ = writeln!(
            s,
            "{:>3} {:>7} {:>8} {:>8} {:>5}",
            row.h, row.modulus, row.count, row.argmax_residue, row.term
        );
    }
    let _ = writeln!(s, "penalty = {}", r.penalty);
    let _ = writeln!(s, "unique for K <= {}", r.k_max);
    s
}

fn run_gen(args: GenArgs) -> Result<()> {
    let n = args.cols;
    let a = match args.kind {
        MatrixChoice::Gaussian => {
            let m = args
                .rows
                .ok_or_else(|| Error::Argument("gaussian needs --rows".into()))?;
            MeasurementMatrix::build_gaussian(m, n, args.seed)?
        }
        MatrixChoice::PartialIdft => {
            let positions = match (&args.positions, &args.missing) {
                (Some(p), _) => parse_list("--positions", p)?,
                (None, Some(q)) => {
                    let missing = parse_list("--missing", q)?;
                    (0..n).filter(|i| !missing.contains(i)).collect()
                }
                (None, None) => {
                    return Err(Error::Argument(
                        "partial-idft needs --positions or --missing".into(),
                    ))
                }
            };
            MeasurementMatrix::build_partial_idft(n, &positions, args.normalize)?
        }
        MatrixChoice::RandomFourier => {
            let times: Vec<f64> = match (&args.times, args.rows) {
                (Some(t), _) => t
                    .split(',')
                    .map(|f| {
                        f.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Argument(format!("--times: {f:?} is not a number")))
                    })
                    .collect::<Result<_>>()?,
                (None, Some(m)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                    (0..m).map(|_| rng.random_range(0.0..args.period)).collect()
                }
                (None, None) => {
                    return Err(Error::Argument(
                        "random-fourier needs --times or --rows".into(),
                    ))
                }
            };
            MeasurementMatrix::build_random_partial_fourier(n, args.period, &times, args.normalize)?
        }
    };
    emit(args.output.as_deref(), &a.to_csv())
}

fn run_recon(args: ReconArgs) -> Result<()> {
    let a = MeasurementMatrix::load_csv(&args.matrix)?;
    let text = std::fs::read_to_string(&args.measurements).map_err(|source| Error::Io {
        path: args.measurements.clone(),
        source,
    })?;
    let y = MeasurementVector::parse_csv(&text)?;
    let result = recon::omp(&a, &y, args.k, args.tol)?;
    emit(args.output.as_deref(), &to_json(&result))
}

fn run_experiment(args: ExperimentArgs) -> Result<()> {
    let a = load_matrix(&args.matrix, args.normalize)?;
    if args.kmin == 0 || args.kmin > args.kmax || args.kmax > a.cols() {
        return Err(Error::Argument(format!(
            "need 1 <= --kmin <= --kmax <= N = {}",
            a.cols()
        )));
    }
    let ks: Vec<usize> = (args.kmin..=args.kmax).collect();
    let opts = ExperimentOptions {
        trials: args.trials,
        seed: args.seed,
        recovery_tol: args.recovery_tol,
        amplitude_law: match args.law {
            Law::UnitPhase => AmplitudeLaw::UnitPhase,
            Law::ComplexNormal => AmplitudeLaw::ComplexNormal,
        },
    };
    let report = recon::monte_carlo(&a, &ks, &opts)?;
    let text = match args.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
        Format::Text => {
            let mut s = String::new();
            for o in &report.outcomes {
                let _ = writeln!(s, "K={:<3} {}/{} exact", o.k, o.successes, report.trials);
            }
            s
        }
    };
    emit(args.output.as_deref(), &text)
}
