//! The `ffp` command line: `synth`, `decompose`, `background`, `anomaly` and
//! `bench`.
//!
//! Every command writes its artifacts into `--out` together with a
//! `manifest.json` describing the run. Exit codes: 0 success, 1 internal
//! failure, 2 usage or invalid input, 3 a solver stopped at its iteration cap
//! (outputs are still written), 4 I/O or file-format error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{anomaly_detect, linear_fit, scaling_benchmark, Axis, BenchParams, Metrics, DEFAULT_ABS_TOL};
use crate::datagen::{make_outlier_problem, make_problem};
use crate::dataio::{load_frame_stack, read_matrix, write_frame, write_json, write_matrix, ReportFile, RunManifest};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::solvers::{
    default_lambda_grid, solve_fffp, solve_ialm, solve_uffp, sweep_lambda, FactoredLowRank, Init, LambdaSweep, Method,
    SolveReport, SolverConfig, DEFAULT_RANK_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ITERATION_CAP: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ffp", version, about = "Factorization-based robust PCA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic low-rank plus sparse problem.
    Synth(SynthArgs),
    /// Split a matrix file into low-rank and sparse parts.
    Decompose(DecomposeArgs),
    /// Background/foreground separation of a directory of .pgm frames.
    Background(BackgroundArgs),
    /// Score columns by the norm of their sparse part.
    Anomaly(AnomalyArgs),
    /// Time a solver on growing synthetic problems.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Fffp,
    Uffp,
    Ialm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fffp => Method::Fffp,
            MethodArg::Uffp => Method::Uffp,
            MethodArg::Ialm => Method::Ialm,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InitArg {
    TruncatedSvd,
    RandomOrthonormal,
}

impl From<InitArg> for Init {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::TruncatedSvd => Init::TruncatedSvd,
            InitArg::RandomOrthonormal => Init::RandomOrthonormal,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum AxisArg {
    Samples,
    Dimension,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Samples => Axis::Samples,
            AxisArg::Dimension => Axis::Dimension,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct SynthArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    rank: usize,
    /// Fraction of corrupted entries.
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    /// Corruptions are uniform on [-magnitude, magnitude].
    #[arg(long, default_value_t = 10.0)]
    magnitude: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instead of a low-rank plus sparse problem, write a rank-one class of
    /// n - OUTLIERS columns with OUTLIERS unrelated columns mixed in.
    #[arg(long)]
    outliers: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

/// Solver flags shared by the commands that decompose something.
#[derive(Debug, Args, Serialize)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "fffp")]
    method: MethodArg,
    /// Factor width (upper bound on the rank). Ignored by ialm.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// U-FFP low-rank weight, or the IALM sparse weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Sweep lambda for uffp and keep the best run.
    #[arg(long, conflicts_with = "lambda")]
    lambda_sweep: bool,
    /// Comma-separated lambda values for --lambda-sweep (default: a log grid
    /// scaled to the data).
    #[arg(long, value_delimiter = ',', requires = "lambda_sweep")]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-4)]
    rho0: f64,
    #[arg(long, default_value_t = 1.5)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e10)]
    rho_cap: f64,
    #[arg(long, value_enum, default_value = "truncated-svd")]
    init: InitArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for --lambda-sweep.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            k: self.k,
            lambda: self.lambda,
            rho0: self.rho0,
            kappa: self.kappa,
            tol: self.tol,
            max_iter: self.max_iter,
            rho_cap: self.rho_cap,
            init: self.init.into(),
            seed: self.seed,
            run_to_max_iter: false,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct DecomposeArgs {
    /// Matrix file (.ffpm, or .csv).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Ground-truth low-rank matrix; adds the recovery error to the report.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long, default_value_t = DEFAULT_ABS_TOL)]
    abs_tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct BackgroundArgs {
    /// Directory of 8-bit .pgm frames, processed in file-name order.
    #[arg(long)]
    frames: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Keep every n-th pixel along both axes.
    #[arg(long, default_value_t = 1)]
    downsample: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct AnomalyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Flag columns whose score is at least this value.
    #[arg(long, conflicts_with = "top_m")]
    threshold: Option<f64>,
    /// Flag the m highest-scoring columns.
    #[arg(long)]
    top_m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "samples")]
    axis: AxisArg,
    /// Comma-separated, strictly ascending scale factors, e.g. 0.1,0.2,0.5,1.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    factors: Vec<f64>,
    #[arg(long, value_enum, default_value = "fffp")]
    method: MethodArg,
    /// Required for uffp.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    d: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    rank: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Background(a) => cmd_background(a),
        Command::Anomaly(a) => cmd_anomaly(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::IterationCap) => {
            eprintln!("warning: solver stopped at the iteration cap before meeting the tolerance");
            EXIT_ITERATION_CAP
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Maps an error to the exit code `run` returns for it.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        e if e.is_io_or_format() => EXIT_IO,
        Error::InvalidArgument(_) | Error::InvalidInput(_) | Error::ZeroData => EXIT_USAGE,
        Error::Divergence { .. } => EXIT_FAILURE,
        _ => EXIT_FAILURE,
    }
}

enum Outcome {
    Done,
    IterationCap,
}

impl Outcome {
    fn from_converged(converged: bool) -> Self {
        if converged {
            Outcome::Done
        } else {
            Outcome::IterationCap
        }
    }
}

/// Collects output paths and writes the manifest when the command finishes.
struct Run<'a> {
    command: &'static str,
    out: &'a Path,
    start: Instant,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn begin(command: &'static str, out: &'a Path) -> Result<Self> {
        fs::create_dir_all(out)?;
        Ok(Self { command, out, start: Instant::now(), inputs: Vec::new(), outputs: Vec::new() })
    }

    fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    /// Path of an output file inside `--out`, recorded for the manifest.
    fn output(&mut self, name: &str) -> PathBuf {
        let path = self.out.join(name);
        self.outputs.push(path.display().to_string());
        path
    }

    fn finish(self, args: &impl Serialize, seed: Option<u64>) -> Result<()> {
        let manifest = RunManifest {
            command: self.command.to_string(),
            config: serde_json::to_value(args)?,
            inputs: self.inputs,
            outputs: self.outputs,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time: self.start.elapsed().as_secs_f64(),
        };
        write_json(self.out.join("manifest.json"), &manifest)
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<Outcome> {
    let mut run = Run::begin("synth", &a.out)?;
    match a.outliers {
        Some(m) => {
            if m >= a.n {
                return Err(Error::InvalidArgument(format!("{m} outliers leave no inlier columns out of {}", a.n)));
            }
            let p = make_outlier_problem(a.d, a.n - m, m, a.seed)?;
            write_matrix(run.output("X.ffpm"), &p.x)?;
            write_json(run.output("outliers.json"), &p.outliers)?;
            println!("wrote {}x{} matrix with {m} outlier columns", a.d, a.n);
        }
        None => {
            let p = make_problem(a.d, a.n, a.rank, a.fraction, a.magnitude, a.seed)?;
            write_matrix(run.output("X.ffpm"), &p.x)?;
            write_matrix(run.output("L_star.ffpm"), &p.l_star)?;
            write_matrix(run.output("S_star.ffpm"), &p.s_star)?;
            println!("wrote {}x{} rank-{} problem, {:.1}% corrupted", a.d, a.n, a.rank, 100.0 * a.fraction);
        }
    }
    run.finish(a, Some(a.seed))?;
    Ok(Outcome::Done)
}

enum LowRank {
    Factored(FactoredLowRank),
    Dense(DenseMatrix),
}

impl LowRank {
    fn dense(&self) -> DenseMatrix {
        match self {
            LowRank::Factored(f) => f.to_dense(),
            LowRank::Dense(l) => l.clone(),
        }
    }
}

struct Decomposition {
    low: LowRank,
    sparse: DenseMatrix,
    report: SolveReport,
    config: SolverConfig,
    sweep: Option<LambdaSweep>,
}

fn decompose(x: &DenseMatrix, args: &SolverArgs) -> Result<Decomposition> {
    let mut config = args.config();
    let method: Method = args.method.into();
    if args.lambda_sweep && method != Method::Uffp {
        return Err(Error::InvalidArgument("--lambda-sweep only applies to --method uffp".into()));
    }
    let (low, sparse, report, sweep) = match method {
        Method::Fffp => {
            let (f, s, r) = solve_fffp(x, &config)?;
            (LowRank::Factored(f), s, r, None)
        }
        Method::Uffp if args.lambda_sweep => {
            let grid = args.lambda_grid.clone().unwrap_or_else(|| default_lambda_grid(x));
            let (f, s, r, sweep) = sweep_lambda(x, &config, &grid, args.jobs)?;
            config.lambda = r.lambda;
            (LowRank::Factored(f), s, r, Some(sweep))
        }
        Method::Uffp => {
            if config.lambda.is_none() {
                return Err(Error::InvalidArgument("--method uffp needs --lambda or --lambda-sweep".into()));
            }
            let (f, s, r) = solve_uffp(x, &config)?;
            (LowRank::Factored(f), s, r, None)
        }
        Method::Ialm => {
            let (l, s, r) = solve_ialm(x, &config)?;
            config.lambda = r.lambda;
            (LowRank::Dense(l), s, r, None)
        }
    };
    println!(
        "{}: {} iterations, rank {}, residual {:.3e}, sparsity {:.4}{}",
        report.method,
        report.iterations,
        report.final_rank,
        report.final_residual,
        report.sparsity_ratio,
        report.lambda.map(|l| format!(", lambda {l:.4e}")).unwrap_or_default()
    );
    Ok(Decomposition { low, sparse, report, config, sweep })
}

fn cmd_decompose(a: &DecomposeArgs) -> Result<Outcome> {
    let mut run = Run::begin("decompose", &a.out)?;
    run.input(&a.input);
    let x = read_matrix(&a.input)?;
    let truth = match &a.truth {
        Some(path) => {
            run.input(path);
            Some(read_matrix(path)?)
        }
        None => None,
    };
    let dec = decompose(&x, &a.solver)?;

    match &dec.low {
        LowRank::Factored(f) => {
            write_matrix(run.output("U.ffpm"), &f.u)?;
            write_matrix(run.output("C.ffpm"), &f.c)?;
            write_matrix(run.output("V.ffpm"), &f.v)?;
        }
        LowRank::Dense(l) => write_matrix(run.output("L.ffpm"), l)?,
    }
    write_matrix(run.output("S.ffpm"), &dec.sparse)?;

    let l = dec.low.dense();
    let metrics = Metrics::compute(&x, &l, &dec.sparse, truth.as_ref(), a.rank_tol, a.abs_tol)?;
    if let Some(err) = metrics.recovery_error {
        println!("recovery error {err:.3e}");
    }
    let converged = dec.report.converged;
    let report = ReportFile { config: dec.config, report: dec.report, metrics: Some(metrics), lambda_sweep: dec.sweep };
    write_json(run.output("report.json"), &report)?;
    run.finish(a, Some(a.solver.seed))?;
    Ok(Outcome::from_converged(converged))
}

fn cmd_background(a: &BackgroundArgs) -> Result<Outcome> {
    let mut run = Run::begin("background", &a.out)?;
    run.input(&a.frames);
    let stack = load_frame_stack(&a.frames, a.downsample)?;
    log::info!("{} frames of {}x{} pixels", stack.frame_names.len(), stack.frame_height, stack.frame_width);
    let dec = decompose(&stack.matrix, &a.solver)?;
    let l = dec.low.dense();

    fs::create_dir_all(a.out.join("background"))?;
    fs::create_dir_all(a.out.join("foreground"))?;
    let (h, w) = (stack.frame_height, stack.frame_width);
    for (j, name) in stack.frame_names.iter().enumerate() {
        let stem = Path::new(name).file_stem().map_or_else(|| name.clone(), |s| s.to_string_lossy().into_owned());
        let file = format!("{stem}.pgm");
        write_frame(&l.column(j), h, w, run.output(&format!("background/{file}")))?;
        let fg: Vec<f64> = dec.sparse.column(j).iter().map(|v| v.abs()).collect();
        write_frame(&fg, h, w, run.output(&format!("foreground/{file}")))?;
    }

    let metrics = Metrics::compute(&stack.matrix, &l, &dec.sparse, None, DEFAULT_RANK_TOL, DEFAULT_ABS_TOL)?;
    let converged = dec.report.converged;
    let report = ReportFile { config: dec.config, report: dec.report, metrics: Some(metrics), lambda_sweep: dec.sweep };
    write_json(run.output("report.json"), &report)?;
    run.finish(a, Some(a.solver.seed))?;
    Ok(Outcome::from_converged(converged))
}

#[derive(Serialize)]
struct AnomalyFile {
    rule: String,
    flagged: Vec<usize>,
}

fn cmd_anomaly(a: &AnomalyArgs) -> Result<Outcome> {
    if a.threshold.is_none() && a.top_m.is_none() {
        return Err(Error::InvalidArgument("give --threshold or --top-m".into()));
    }
    let mut run = Run::begin("anomaly", &a.out)?;
    run.input(&a.input);
    let x = read_matrix(&a.input)?;
    let cfg = SolverConfig { seed: a.seed, ..SolverConfig::with_k(a.k) };
    let (_, sparse, report) = solve_fffp(&x, &cfg)?;

    let (result, rule) = match (a.threshold, a.top_m) {
        (Some(t), _) => (anomaly_detect(&sparse, t), format!("score >= {t}")),
        (None, Some(m)) => {
            let mut r = anomaly_detect(&sparse, f64::INFINITY);
            r.flagged = r.top(m);
            (r, format!("top {m} non-zero scores"))
        }
        (None, None) => unreachable!("checked above"),
    };

    let mut csv = String::from("column,score\n");
    for (j, s) in result.scores.iter().enumerate() {
        csv.push_str(&format!("{j},{s:?}\n"));
    }
    fs::write(run.output("scores.csv"), csv)?;
    write_json(run.output("flagged.json"), &AnomalyFile { rule, flagged: result.flagged.clone() })?;
    println!("flagged {} of {} columns: {:?}", result.flagged.len(), result.scores.len(), result.flagged);
    run.finish(a, Some(a.seed))?;
    Ok(Outcome::from_converged(report.converged))
}

#[derive(Serialize)]
struct BenchSummary {
    axis: Axis,
    method: Method,
    iterations: usize,
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

fn cmd_bench(a: &BenchArgs) -> Result<Outcome> {
    let method: Method = a.method.into();
    if method == Method::Uffp && a.lambda.is_none() {
        return Err(Error::InvalidArgument("--method uffp needs --lambda".into()));
    }
    let mut run = Run::begin("bench", &a.out)?;
    let params = BenchParams {
        d: a.d,
        n: a.n,
        rank: a.rank,
        seed: a.seed,
        method,
        config: SolverConfig { k: a.k, lambda: a.lambda, seed: a.seed, ..BenchParams::default().config },
        repeats: a.repeats,
        ..BenchParams::default()
    };
    let rows = scaling_benchmark(&params, a.axis.into(), &a.factors, a.iters)?;

    let mut csv = String::from("factor,rows,cols,size,seconds\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{},{:?}\n", r.factor, r.rows, r.cols, r.size, r.seconds));
        println!("size {:>6}  {:.4} s", r.size, r.seconds);
    }
    fs::write(run.output("bench.csv"), csv)?;

    if rows.len() >= 2 {
        let sizes: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
        let secs: Vec<f64> = rows.iter().map(|r| r.seconds).collect();
        let fit = linear_fit(&sizes, &secs)?;
        println!("linear fit R^2 = {:.4}", fit.r_squared);
        let summary = BenchSummary {
            axis: a.axis.into(),
            method,
            iterations: a.iters,
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
        };
        write_json(run.output("fit.json"), &summary)?;
    }
    run.finish(a, Some(a.seed))?;
    Ok(Outcome::Done)
}
