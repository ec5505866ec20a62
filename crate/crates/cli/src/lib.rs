//! The `srw` command line tool.
//!
//! Data goes to standard output (or `--out` files), diagnostics to standard
//! error. Exit codes: 0 success, 1 invalid input, 2 solver did not converge
//! under `--strict`, 3 I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use spacey::baselines::{self, ModelKind, PredictiveModel};
use spacey::dynamics::{self, SolveReport};
use spacey::io::{self as sio, format_vector};
use spacey::learn::{self, FitConfig};
use spacey::simulate::{self, trajectory_seed};
use spacey::two_state::{self, Equilibria};
use spacey::{Error, StochasticVector, TransitionHypermatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "srw",
    version,
    about = "Simulate, solve and fit spacey random walks"
)]
pub struct Cli {
    /// Exit with status 2 when an iterative solver does not converge.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StationaryMethod {
    Power,
    Euler,
    Auto,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a hypermatrix file and test Property B.
    Check { hypermatrix: PathBuf },

    /// Simulate trajectories; prints one trajectory per line (1-based states).
    Simulate {
        hypermatrix: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Starting state X(0), 1-based.
        #[arg(long)]
        start: usize,
        /// Surfer parameter: probability of a walk step instead of a jump.
        #[arg(long)]
        alpha: Option<f64>,
        /// Teleportation vector file (default uniform).
        #[arg(long)]
        telep: Option<PathBuf>,
        /// Number of trajectories; trajectory i > 0 uses a seed derived from (seed, i).
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Compute a stochastic z eigenvector; prints the vector.
    Stationary {
        hypermatrix: PathBuf,
        #[arg(long, value_enum, default_value_t = StationaryMethod::Auto)]
        method: StationaryMethod,
        #[arg(long, default_value_t = dynamics::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        /// Euler step size (default 0.5, or the surfer step with --alpha).
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        telep: Option<PathBuf>,
        /// Write the residual history as TSV (iteration, residual).
        #[arg(long)]
        trace: Option<PathBuf>,
    },

    /// Tabulate the two-state forcing function as TSV (x, f) and report equilibria.
    Dynamics2 {
        hypermatrix: PathBuf,
        #[arg(long, default_value_t = 401)]
        points: usize,
    },

    /// Multi-start search for stochastic z eigenvectors; prints one per line.
    FixedPoints {
        hypermatrix: PathBuf,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },

    /// Fit an order-3 hypermatrix by maximum likelihood; prints the NLL trace as TSV.
    Learn {
        trajectories: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },

    /// RMSE of models on test trajectories, as TSV (model, rmse).
    ///
    /// Models are comma separated: `zeroth`, `first` and `second` are fitted
    /// on `--train`; `srw=H.txt` and `true-srw=H.txt` are read from files.
    Evaluate {
        trajectories: PathBuf,
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
        #[arg(long)]
        train: Option<PathBuf>,
        /// Number of states (default: from the model files or the data).
        #[arg(long)]
        dim: Option<usize>,
    },

    /// Stationary distribution of an order-3 chain on pairs of states.
    PairStationary { hypermatrix: PathBuf },
}

/// Failures mapped to exit codes.
enum Failure {
    Invalid(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(msg) => Failure::Io(msg),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type CmdResult = std::result::Result<bool, Failure>;

struct Output<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Output<'_> {
    fn data(&mut self, text: &str) -> std::result::Result<(), Failure> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string()))
    }

    fn note(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "{text}");
    }
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let strict = cli.strict;
    let mut out = Output { stdout, stderr };
    match dispatch(cli.command, &mut out) {
        Ok(true) => EXIT_OK,
        Ok(false) if strict => EXIT_NOT_CONVERGED,
        Ok(false) => EXIT_OK,
        Err(Failure::Invalid(msg)) => {
            out.note(&format!("error: {msg}"));
            EXIT_INVALID
        }
        Err(Failure::Io(msg)) => {
            out.note(&format!("error: {msg}"));
            EXIT_IO
        }
    }
}

fn dispatch(command: Command, out: &mut Output<'_>) -> CmdResult {
    match command {
        Command::Check { hypermatrix } => check(&hypermatrix, out),
        Command::Simulate {
            hypermatrix,
            steps,
            seed,
            start,
            alpha,
            telep,
            count,
            out: path,
        } => {
            let h = sio::read_hypermatrix(&hypermatrix)?;
            let surfer = surfer_args(&h, alpha, telep.as_deref())?;
            if start == 0 || start > h.dim() {
                return Err(Error::StateOutOfRange {
                    state: start,
                    dim: h.dim(),
                }
                .into());
            }
            let mut trajs = Vec::with_capacity(count);
            for i in 0..count {
                let s = if i == 0 {
                    seed
                } else {
                    trajectory_seed(seed, i as u64)
                };
                let (traj, _) = match &surfer {
                    Some((a, v)) => simulate::simulate_surfer(&h, *a, v, start - 1, steps, s)?,
                    None => simulate::simulate(&h, start - 1, steps, s)?,
                };
                trajs.push(traj);
            }
            let text = sio::format_trajectories(&trajs);
            match path {
                Some(p) => write_file(&p, &text)?,
                None => out.data(&text)?,
            }
            Ok(true)
        }
        Command::Stationary {
            hypermatrix,
            method,
            tol,
            max_iters,
            h: step,
            alpha,
            telep,
            trace,
        } => {
            let h = sio::read_hypermatrix(&hypermatrix)?;
            let surfer = surfer_args(&h, alpha, telep.as_deref())?;
            let (h, x0, default_step) = match surfer {
                Some((a, v)) => (
                    h.make_surfer(a, &v)?,
                    v,
                    dynamics::surfer_step(a, h.order()),
                ),
                None => {
                    let n = h.dim();
                    (h, StochasticVector::uniform(n), dynamics::DEFAULT_STEP)
                }
            };
            let step = step.unwrap_or(default_step);
            let report = stationary(&h, &x0, method, tol, max_iters, step, out)?;
            if let Some(p) = trace {
                let mut tsv = String::from("iteration\tresidual\n");
                for (i, r) in report.residual_history.iter().enumerate() {
                    writeln!(tsv, "{}\t{r:e}", i + 1).unwrap();
                }
                write_file(&p, &tsv)?;
            }
            out.data(&format_vector(report.result.as_slice()))?;
            out.note(&format!(
                "method={} converged={} iterations={} residual={:e}",
                method_name(report.method),
                report.converged,
                report.iterations,
                report.final_residual().unwrap_or(0.0)
            ));
            Ok(report.converged)
        }
        Command::Dynamics2 {
            hypermatrix,
            points,
        } => {
            let h = sio::read_hypermatrix(&hypermatrix)?;
            let mut tsv = String::from("x\tf\n");
            for (x, f) in two_state::sample_forcing(&h, points)? {
                writeln!(tsv, "{x}\t{f:e}").unwrap();
            }
            out.data(&tsv)?;
            match two_state::equilibria(&h, 1e-10)? {
                Equilibria::AllPoints => out.note("equilibria: every point of [0, 1]"),
                Equilibria::Points(points) => {
                    for e in points {
                        out.note(&format!("equilibrium\t{}\t{}", e.x, e.stability));
                    }
                }
            }
            Ok(true)
        }
        Command::FixedPoints {
            hypermatrix,
            starts,
            seed,
            tol,
        } => {
            let h = sio::read_hypermatrix(&hypermatrix)?;
            let points = dynamics::find_fixed_points(&h, starts, tol, seed);
            let mut text = String::new();
            for p in &points {
                text.push_str(&format_vector(p.as_slice()));
            }
            out.data(&text)?;
            out.note(&format!("found {} fixed points", points.len()));
            Ok(true)
        }
        Command::Learn {
            trajectories,
            dim,
            max_iters,
            tol,
            seed,
            out: path,
        } => {
            let trajs = sio::read_trajectories(&trajectories, Some(dim))?;
            let mut config = FitConfig {
                seed,
                ..FitConfig::default()
            };
            if let Some(k) = max_iters {
                config.max_iters = k;
            }
            if let Some(t) = tol {
                config.tol = t;
            }
            let fit = learn::fit_srw(&trajs, dim, &config)?;
            sio::write_hypermatrix(&path, &fit.hypermatrix)?;
            let mut tsv = String::from("iteration\tnll\n");
            for (i, v) in fit.nll_trace.iter().enumerate() {
                writeln!(tsv, "{i}\t{v}").unwrap();
            }
            out.data(&tsv)?;
            out.note(&format!(
                "converged={} iterations={}",
                fit.converged,
                fit.nll_trace.len() - 1
            ));
            Ok(fit.converged)
        }
        Command::Evaluate {
            trajectories,
            models,
            train,
            dim,
        } => evaluate(&trajectories, &models, train.as_deref(), dim, out),
        Command::PairStationary { hypermatrix } => {
            let h = sio::read_hypermatrix(&hypermatrix)?;
            let ps = baselines::pair_stationary(&h)?;
            let mut text = String::from("X\n");
            for row in ps.x.row_iter() {
                let row: Vec<f64> = row.iter().copied().collect();
                text.push_str(&format_vector(&row));
            }
            text.push_str("marginal\n");
            text.push_str(&format_vector(ps.marginal().as_slice()));
            text.push_str("column_marginal\n");
            text.push_str(&format_vector(ps.column_marginal().as_slice()));
            out.data(&text)?;
            out.note(&format!("residual={:e}", ps.residual(&h)));
            Ok(true)
        }
    }
}

fn method_name(method: dynamics::Method) -> &'static str {
    match method {
        dynamics::Method::Power => "power",
        dynamics::Method::Euler => "euler",
        dynamics::Method::Perron => "perron",
    }
}

fn check(path: &Path, out: &mut Output<'_>) -> CmdResult {
    match sio::read_hypermatrix(path) {
        Ok(h) => {
            out.data(&format!("valid=true property_b={}\n", h.check_property_b()))?;
            out.note(&format!("order={} dim={}", h.order(), h.dim()));
            Ok(true)
        }
        Err(Error::Io(msg)) => Err(Failure::Io(msg)),
        Err(e) => {
            out.data("valid=false\n")?;
            Err(e.into())
        }
    }
}

fn surfer_args(
    h: &TransitionHypermatrix,
    alpha: Option<f64>,
    telep: Option<&Path>,
) -> std::result::Result<Option<(f64, StochasticVector)>, Failure> {
    let v = match telep {
        Some(p) => Some(sio::read_vector(p)?),
        None => None,
    };
    match (alpha, v) {
        (None, None) => Ok(None),
        (None, Some(_)) => Err(Failure::Invalid("--telep needs --alpha".into())),
        (Some(a), v) => {
            let v = v.unwrap_or_else(|| StochasticVector::uniform(h.dim()));
            if v.len() != h.dim() {
                return Err(Error::DimensionMismatch {
                    expected: h.dim(),
                    got: v.len(),
                }
                .into());
            }
            Ok(Some((a, v)))
        }
    }
}

fn stationary(
    h: &TransitionHypermatrix,
    x0: &StochasticVector,
    method: StationaryMethod,
    tol: f64,
    max_iters: usize,
    step: f64,
    out: &mut Output<'_>,
) -> std::result::Result<SolveReport, Failure> {
    let power = || dynamics::tensor_power_method(h, x0, tol, max_iters);
    let euler = || dynamics::euler_integrate(h, x0, step, max_iters, tol);
    let report = match method {
        StationaryMethod::Power => power()?,
        StationaryMethod::Euler => euler()?,
        StationaryMethod::Auto => {
            let report = power()?;
            if report.converged {
                report
            } else {
                out.note(&format!(
                    "power method did not converge in {} iterations, switching to Euler",
                    report.iterations
                ));
                euler()?
            }
        }
    };
    Ok(report)
}

fn evaluate(
    test: &Path,
    models: &[String],
    train: Option<&Path>,
    dim: Option<usize>,
    out: &mut Output<'_>,
) -> CmdResult {
    if models.is_empty() {
        return Err(Failure::Invalid("--models is empty".into()));
    }
    let mut specs = Vec::new();
    for item in models {
        let (name, file) = match item.split_once('=') {
            Some((n, f)) => (n, Some(PathBuf::from(f))),
            None => (item.as_str(), None),
        };
        let kind: ModelKind = name.parse()?;
        let hypermatrix = match (kind, file) {
            (ModelKind::Srw | ModelKind::TrueSrw, Some(f)) => Some(sio::read_hypermatrix(f)?),
            (ModelKind::Srw | ModelKind::TrueSrw, None) => {
                return Err(Failure::Invalid(format!(
                    "model '{kind}' needs a file: {kind}=H.txt"
                )))
            }
            (_, Some(_)) => {
                return Err(Failure::Invalid(format!(
                    "model '{kind}' is fitted from --train"
                )))
            }
            (_, None) => None,
        };
        specs.push((kind, hypermatrix));
    }
    let model_dim = specs
        .iter()
        .find_map(|(_, h)| h.as_ref().map(TransitionHypermatrix::dim));
    let dim = match (dim, model_dim) {
        (Some(d), Some(m)) if d != m => {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m,
            }
            .into());
        }
        (Some(d), _) | (None, Some(d)) => Some(d),
        (None, None) => None,
    };
    let test_trajs = sio::read_trajectories(test, dim)?;
    let dim = dim.unwrap_or_else(|| test_trajs.first().map_or(0, |t| t.dim()));
    let train_trajs = match train {
        Some(p) => Some(sio::read_trajectories(p, Some(dim))?),
        None => None,
    };
    let mut tsv = String::from("model\trmse\n");
    for (kind, h) in specs {
        let model = match (kind, h) {
            (ModelKind::Srw, Some(h)) => PredictiveModel::Srw(h),
            (ModelKind::TrueSrw, Some(h)) => PredictiveModel::TrueSrw(h),
            (kind, _) => {
                let train = train_trajs
                    .as_deref()
                    .ok_or_else(|| Failure::Invalid(format!("model '{kind}' needs --train")))?;
                baselines::fit_baseline(kind, train, dim)?
            }
        };
        if model.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: model.dim(),
            }
            .into());
        }
        writeln!(tsv, "{kind}\t{}", baselines::rmse(&model, &test_trajs)?).unwrap();
    }
    out.data(&tsv)?;
    Ok(true)
}
