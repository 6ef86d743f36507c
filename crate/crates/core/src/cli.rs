//! Command-line front-end.
//!
//! Exit codes: 0 success, 1 input/IO failure, 2 invalid arguments,
//! 3 a single `run` that did not converge.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use crate::chart::{self, ChartError, ChartOptions};
use crate::engine::{self, DEFAULT_MAX_ITERATIONS, REFERENCE_ALPHA, REFERENCE_TOLERANCE};
use crate::harness::{
    self, HarnessError, Metric, SweepOptions, SweepPlan, SweepRecord, DEFAULT_REPEATS,
};
use crate::norm::NormKind;
use crate::stats::{self, RatioMethod};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

pub const THREADS_ENV: &str = "PAGERANK_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "pagerank-lab",
    version,
    about = "PageRank damping, tolerance and convergence-norm experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run PageRank once on a graph and print its CSV row.
    Run(RunArgs),
    /// Sweep the damping factor (default 0.50..=1.00 step 0.05, tolerance 1e-6, L1).
    SweepDamping(SweepDampingArgs),
    /// Sweep the tolerance (default 1e0..1e-10, alpha 0.85, all norms).
    SweepTolerance(SweepToleranceArgs),
    /// Compare L1, L2 and L-infinity convergence checks (alpha 0.85, tolerance 1e-6).
    CompareNorms(CompareNormsArgs),
    /// Composite relative-performance ratios from a sweep CSV.
    Ratios(RatiosArgs),
    /// Rule-of-thumb iteration estimate log10(tolerance) / log10(alpha).
    Estimate(EstimateArgs),
    /// Draw an SVG line chart from a sweep CSV.
    Chart(ChartArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = REFERENCE_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = REFERENCE_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, default_value = "l1")]
    pub norm: NormKind,
    #[arg(long = "max-iter", default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iter: usize,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeat: usize,
}

#[derive(Debug, Args)]
pub struct CommonSweepArgs {
    /// Graph files (.mtx), comma-separated or repeated.
    #[arg(long = "graphs", alias = "graph", value_delimiter = ',', num_args = 1.., required = true)]
    pub graphs: Vec<PathBuf>,
    #[arg(long = "max-iter", default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iter: usize,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeat: usize,
    /// Write the CSV here (log lines then go to stdout); otherwise CSV goes to stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepDampingArgs {
    #[command(flatten)]
    pub common: CommonSweepArgs,
    #[arg(long = "alpha-from", default_value_t = 0.50)]
    pub alpha_from: f64,
    #[arg(long = "alpha-to", default_value_t = 1.00)]
    pub alpha_to: f64,
    #[arg(long = "alpha-step", default_value_t = 0.05)]
    pub alpha_step: f64,
    #[arg(long, default_value_t = REFERENCE_TOLERANCE)]
    pub tolerance: f64,
    #[arg(
        long = "norms",
        alias = "norm",
        value_delimiter = ',',
        default_value = "l1"
    )]
    pub norms: Vec<NormKind>,
}

#[derive(Debug, Args)]
pub struct SweepToleranceArgs {
    #[command(flatten)]
    pub common: CommonSweepArgs,
    #[arg(long, default_value_t = REFERENCE_ALPHA)]
    pub alpha: f64,
    /// Comma-separated tolerances replacing the default grid.
    #[arg(long = "tol-grid", value_delimiter = ',')]
    pub tol_grid: Option<Vec<f64>>,
    #[arg(
        long = "norms",
        alias = "norm",
        value_delimiter = ',',
        default_value = "l1,l2,linf"
    )]
    pub norms: Vec<NormKind>,
}

#[derive(Debug, Args)]
pub struct CompareNormsArgs {
    #[command(flatten)]
    pub common: CommonSweepArgs,
    #[arg(long, default_value_t = REFERENCE_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = REFERENCE_TOLERANCE)]
    pub tolerance: f64,
    #[arg(
        long = "norms",
        alias = "norm",
        value_delimiter = ',',
        default_value = "l1,l2,linf"
    )]
    pub norms: Vec<NormKind>,
}

#[derive(Debug, Args)]
pub struct RatiosArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "iterations")]
    pub metric: Metric,
    #[arg(long, default_value = "l1")]
    pub baseline: String,
    /// One of ratio-am, ratio-gm, ratio-hm, am-ratio, gm-ratio, hm-ratio, or all.
    #[arg(long, default_value = "all")]
    pub method: String,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub series: String,
    #[arg(long = "log-x")]
    pub log_x: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Plan(m) => CliError::Usage(m),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn io_context(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Failure(format!("{}: {e}", path.display()))
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "{THREADS_ENV} must be a positive integer, got '{v}'"
                ))
            }),
        _ => Ok(None),
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T, W, E>(args: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write + Send,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::SweepDamping(a) => {
            let plan = SweepPlan {
                graphs: a.common.graphs.clone(),
                alphas: harness::damping_grid(a.alpha_from, a.alpha_to, a.alpha_step),
                tolerances: vec![a.tolerance],
                norms: a.norms,
                repeats: a.common.repeat,
                max_iterations: a.common.max_iter,
            };
            if a.alpha_step.is_nan() || a.alpha_step <= 0.0 || a.alpha_to < a.alpha_from {
                Err(CliError::Usage(
                    "alpha grid needs alpha-step > 0 and alpha-to >= alpha-from".into(),
                ))
            } else {
                cmd_sweep(plan, a.common.csv.as_deref(), stdout, stderr)
            }
        }
        Command::SweepTolerance(a) => {
            let plan = SweepPlan {
                graphs: a.common.graphs.clone(),
                alphas: vec![a.alpha],
                tolerances: a.tol_grid.unwrap_or_else(harness::default_tolerance_grid),
                norms: a.norms,
                repeats: a.common.repeat,
                max_iterations: a.common.max_iter,
            };
            cmd_sweep(plan, a.common.csv.as_deref(), stdout, stderr)
        }
        Command::CompareNorms(a) => {
            let plan = SweepPlan {
                graphs: a.common.graphs.clone(),
                alphas: vec![a.alpha],
                tolerances: vec![a.tolerance],
                norms: a.norms,
                repeats: a.common.repeat,
                max_iterations: a.common.max_iter,
            };
            cmd_sweep(plan, a.common.csv.as_deref(), stdout, stderr)
        }
        Command::Ratios(a) => cmd_ratios(a, stdout, stderr),
        Command::Estimate(a) => cmd_estimate(a, stdout),
        Command::Chart(a) => cmd_chart(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn cmd_run<W: Write>(a: RunArgs, stdout: &mut W) -> Result<i32, CliError> {
    let plan = SweepPlan {
        graphs: vec![a.graph.clone()],
        alphas: vec![a.alpha],
        tolerances: vec![a.tolerance],
        norms: vec![a.norm],
        repeats: a.repeat,
        max_iterations: a.max_iter,
    };
    plan.validate()?;
    let g = crate::mtx::load_graph(&a.graph).map_err(|e| CliError::Failure(e.to_string()))?;
    let records = harness::sweep_graph(&harness::graph_label(&a.graph), &g, &plan, &|_| {})?;
    harness::write_csv(&records, &mut *stdout)?;
    Ok(if records.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_sweep<W: Write + Send, E: Write>(
    plan: SweepPlan,
    csv_path: Option<&Path>,
    stdout: &mut W,
    stderr: &mut E,
) -> Result<i32, CliError> {
    plan.validate()?;
    let options = SweepOptions {
        threads: threads_from_env()?,
    };
    let records = match csv_path {
        Some(path) => {
            let file = File::create(path).map_err(io_context(path))?;
            let log = Mutex::new(&mut *stdout);
            let records = harness::run_sweep(&plan, &options, &|r: &SweepRecord| {
                if let Ok(mut out) = log.lock() {
                    let _ = writeln!(out, "{}", r.log_line());
                }
            })?;
            let mut w = BufWriter::new(file);
            harness::write_csv(&records, &mut w)?;
            w.flush().map_err(io_context(path))?;
            records
        }
        None => {
            let mut lines = Vec::new();
            let buffered = Mutex::new(&mut lines);
            let records = harness::run_sweep(&plan, &options, &|r: &SweepRecord| {
                if let Ok(mut l) = buffered.lock() {
                    l.push(r.log_line());
                }
            })?;
            for line in lines {
                let _ = writeln!(stderr, "{line}");
            }
            harness::write_csv(&records, &mut *stdout)?;
            records
        }
    };
    let failed = records.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        let _ = writeln!(
            stderr,
            "note: {failed} of {} runs stopped at the iteration cap without converging",
            records.len()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_ratios<W: Write, E: Write>(
    a: RatiosArgs,
    stdout: &mut W,
    stderr: &mut E,
) -> Result<i32, CliError> {
    let methods: Vec<RatioMethod> = if a.method.eq_ignore_ascii_case("all") {
        RatioMethod::ALL.to_vec()
    } else {
        vec![a
            .method
            .parse()
            .map_err(|e: stats::StatsError| CliError::Usage(e.to_string()))?]
    };
    let file = File::open(&a.input).map_err(io_context(&a.input))?;
    let table = harness::metric_matrix(file, a.metric)?;
    let m = &table.matrix;
    if !m.approaches().contains(&a.baseline) {
        return Err(CliError::Usage(format!(
            "baseline '{}' not among approaches {:?}",
            a.baseline,
            m.approaches()
        )));
    }

    let mut out = String::new();
    out.push_str(&format!(
        "metric: {}\nbaseline: {}\ncases: {}\nnon_converged_cells: {}\n",
        a.metric.column(),
        a.baseline,
        m.cases().len(),
        table.non_converged
    ));
    let mut header = vec![format!("{:<10}", "method")];
    for ap in m.approaches() {
        header.push(format!("{:>14}", format!("mean:{ap}")));
    }
    for ap in m.approaches() {
        header.push(format!("{:>12}", format!("ratio:{ap}")));
    }
    out.push_str(header.join(" ").trim_end());
    out.push('\n');
    for method in methods {
        let t = stats::composite(m, &a.baseline, method)
            .map_err(|e| CliError::Failure(e.to_string()))?;
        let mut row = vec![format!("{:<10}", method.name())];
        for i in 0..m.approaches().len() {
            row.push(match &t.means {
                Some(means) => format!("{:>14.4}", means[i]),
                None => format!("{:>14}", "-"),
            });
        }
        for r in &t.ratios {
            row.push(format!("{r:>12.4}"));
        }
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    stdout.write_all(out.as_bytes())?;
    if table.non_converged > 0 {
        let _ = writeln!(
            stderr,
            "note: {} cells come from runs that hit the iteration cap",
            table.non_converged
        );
    }
    Ok(EXIT_OK)
}

fn cmd_estimate<W: Write>(a: EstimateArgs, stdout: &mut W) -> Result<i32, CliError> {
    let n = engine::estimate_iterations(a.alpha, a.tolerance)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(stdout, "{n}")?;
    Ok(EXIT_OK)
}

fn cmd_chart<W: Write>(a: ChartArgs, stdout: &mut W) -> Result<i32, CliError> {
    let file = File::open(&a.input).map_err(io_context(&a.input))?;
    let chart_err = |e: ChartError| match e {
        ChartError::Csv(e) => CliError::Failure(e.to_string()),
        other => CliError::Usage(other.to_string()),
    };
    let series = chart::series_from_csv(file, &a.x, &a.y, &a.series).map_err(chart_err)?;
    let opts = ChartOptions {
        title: format!("{} by {}", a.y, a.series),
        x_label: a.x.clone(),
        y_label: a.y.clone(),
        log_x: a.log_x,
    };
    let svg = chart::render_svg(&series, &opts).map_err(chart_err)?;
    std::fs::write(&a.out, svg).map_err(io_context(&a.out))?;
    writeln!(
        stdout,
        "wrote {} ({} series)",
        a.out.display(),
        series.len()
    )?;
    Ok(EXIT_OK)
}
