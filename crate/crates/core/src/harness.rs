//! Parameter sweeps over damping factor, tolerance and convergence norm.
//!
//! A sweep runs every `(graph, alpha, tolerance, norm)` cell once untimed,
//! then `repeats` more times to average the wall time of the iteration loop.
//! Each cell also records the L1 distance of its ranks from the graph's
//! default PageRank (alpha = 0.85, tolerance 1e-6, L1).

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, PageRankConfig, PageRankError, DEFAULT_MAX_ITERATIONS};
use crate::graph::CsrGraph;
use crate::mtx::{self, MtxError};
use crate::norm::NormKind;
use crate::stats::{MeasurementMatrix, StatsError};

pub const CSV_HEADER: &str =
    "graph,vertices,edges,alpha,tolerance,norm,iterations,converged,time_ms,err_vs_ref";
pub const DEFAULT_REPEATS: usize = 5;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Graph {
        path: String,
        #[source]
        source: MtxError,
    },
    #[error("graph {graph}: {source}")]
    Engine {
        graph: String,
        #[source]
        source: PageRankError,
    },
    #[error("graph {graph}: iteration count changed between repeats ({first} vs {other})")]
    Nondeterministic {
        graph: String,
        first: usize,
        other: usize,
    },
    #[error("invalid sweep plan: {0}")]
    Plan(String),
    #[error("tolerance grid gap for graph {graph}, norm {norm}, alpha {alpha}: missing tolerance {tolerance}")]
    GridGap {
        graph: String,
        norm: NormKind,
        alpha: f64,
        tolerance: f64,
    },
    #[error("missing measurements: {}", .0.join("; "))]
    MissingCells(Vec<String>),
    #[error("duplicate measurement for {0}")]
    DuplicateCell(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// `0.50, 0.55, ..., 1.00`.
pub fn default_damping_grid() -> Vec<f64> {
    damping_grid(0.50, 1.00, 0.05)
}

/// Inclusive arithmetic grid from `from` to `to`. Values are rounded to six
/// decimals so that `0.85` prints as `0.85`.
pub fn damping_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || to < from {
        return vec![from];
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| {
            let x = from + i as f64 * step;
            (x * 1e6).round() / 1e6
        })
        .collect()
}

/// `1e0, 5e-1, 1e-1, 5e-2, ..., 5e-10, 1e-10`.
pub fn default_tolerance_grid() -> Vec<f64> {
    tolerance_grid(10)
}

/// Descending grid alternating `10^-k` and `5 * 10^-(k+1)`, ending at
/// `10^-lowest_exponent`.
pub fn tolerance_grid(lowest_exponent: i32) -> Vec<f64> {
    let mut grid = Vec::with_capacity(2 * lowest_exponent as usize + 1);
    for k in 0..=lowest_exponent {
        grid.push(1.0 / 10f64.powi(k));
        if k < lowest_exponent {
            grid.push(5.0 / 10f64.powi(k + 1));
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub graphs: Vec<PathBuf>,
    pub alphas: Vec<f64>,
    pub tolerances: Vec<f64>,
    pub norms: Vec<NormKind>,
    pub repeats: usize,
    pub max_iterations: usize,
}

impl SweepPlan {
    pub fn new(graphs: Vec<PathBuf>) -> Self {
        SweepPlan {
            graphs,
            alphas: vec![engine::REFERENCE_ALPHA],
            tolerances: vec![engine::REFERENCE_TOLERANCE],
            norms: vec![NormKind::L1],
            repeats: DEFAULT_REPEATS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Plan(m.to_string()));
        if self.graphs.is_empty() {
            return bad("no graphs");
        }
        if self.alphas.is_empty() || self.tolerances.is_empty() || self.norms.is_empty() {
            return bad("alpha, tolerance and norm lists must be non-empty");
        }
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return bad(&format!("alpha {a} outside [0, 1]"));
        }
        if let Some(t) = self.tolerances.iter().find(|t| t.is_nan() || **t <= 0.0) {
            return bad(&format!("tolerance {t} must be positive"));
        }
        if self.repeats == 0 || self.max_iterations == 0 {
            return bad("repeats and max iterations must be at least 1");
        }
        Ok(())
    }

    fn cell_count(&self) -> usize {
        self.alphas.len() * self.tolerances.len() * self.norms.len()
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub graph: String,
    pub vertices: usize,
    pub edges: usize,
    pub alpha: f64,
    pub tolerance: f64,
    pub norm: NormKind,
    pub iterations: usize,
    pub converged: bool,
    pub time_ms: f64,
    pub err_vs_ref: f64,
}

impl SweepRecord {
    /// Human-readable log line mirroring the CSV row.
    pub fn log_line(&self) -> String {
        format!(
            "[{}] vertices={} edges={} alpha={} tolerance={:e} norm={} iterations={} converged={} time_ms={:.4} err_vs_ref={:e}",
            self.graph,
            self.vertices,
            self.edges,
            self.alpha,
            self.tolerance,
            self.norm,
            self.iterations,
            self.converged,
            self.time_ms,
            self.err_vs_ref
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Cap on graphs processed concurrently; `None` uses all cores.
    pub threads: Option<usize>,
}

/// Sweeps every cell of `plan` on an already-loaded graph. `on_record` sees
/// each record as soon as it is finished.
pub fn sweep_graph(
    label: &str,
    g: &CsrGraph,
    plan: &SweepPlan,
    on_record: &(dyn Fn(&SweepRecord) + Sync),
) -> Result<Vec<SweepRecord>, HarnessError> {
    let wrap = |source| HarnessError::Engine {
        graph: label.to_string(),
        source,
    };
    let reference = engine::reference_ranks(g).map_err(wrap)?;
    let mut records = Vec::with_capacity(plan.cell_count());

    for &norm in &plan.norms {
        for &alpha in &plan.alphas {
            for &tolerance in &plan.tolerances {
                let cfg = PageRankConfig::new(alpha, tolerance, norm)
                    .with_max_iterations(plan.max_iterations);
                // untimed warm-up; also the run whose ranks are reported
                let first = engine::pagerank(g, &cfg).map_err(wrap)?;
                let mut total_ms = 0.0;
                for _ in 0..plan.repeats {
                    let run = engine::pagerank(g, &cfg).map_err(wrap)?;
                    if run.iterations != first.iterations {
                        return Err(HarnessError::Nondeterministic {
                            graph: label.to_string(),
                            first: first.iterations,
                            other: run.iterations,
                        });
                    }
                    total_ms += run.elapsed_ms();
                }
                let record = SweepRecord {
                    graph: label.to_string(),
                    vertices: g.vertex_count(),
                    edges: g.edge_count(),
                    alpha,
                    tolerance,
                    norm,
                    iterations: first.iterations,
                    converged: first.converged,
                    time_ms: total_ms / plan.repeats as f64,
                    err_vs_ref: engine::l1_from(&reference, &first.ranks).map_err(wrap)?,
                };
                on_record(&record);
                records.push(record);
            }
        }
    }
    Ok(records)
}

/// Label used for a graph file in output rows: its file stem.
pub fn graph_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads each graph in `plan` and sweeps it. Graphs run concurrently; the
/// returned records are sorted with [`sort_records`].
pub fn run_sweep(
    plan: &SweepPlan,
    options: &SweepOptions,
    on_record: &(dyn Fn(&SweepRecord) + Sync),
) -> Result<Vec<SweepRecord>, HarnessError> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::ThreadPool(e.to_string()))?;

    let per_graph: Vec<Result<Vec<SweepRecord>, HarnessError>> = pool.install(|| {
        plan.graphs
            .par_iter()
            .map(|path| {
                let g = mtx::load_graph(path).map_err(|source| HarnessError::Graph {
                    path: path.display().to_string(),
                    source,
                })?;
                sweep_graph(&graph_label(path), &g, plan, on_record)
            })
            .collect()
    });

    let mut records = Vec::with_capacity(plan.graphs.len() * plan.cell_count());
    for result in per_graph {
        records.extend(result?);
    }
    sort_records(&mut records);
    Ok(records)
}

/// Orders by graph, norm, ascending alpha, then descending tolerance.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        a.graph
            .cmp(&b.graph)
            .then(a.norm.cmp(&b.norm))
            .then(a.alpha.total_cmp(&b.alpha))
            .then(b.tolerance.total_cmp(&a.tolerance))
    });
}

pub fn write_csv<W: Write>(records: &[SweepRecord], writer: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<SweepRecord>, HarnessError> {
    let mut r = csv::Reader::from_reader(reader);
    let records = r.deserialize().collect::<Result<Vec<SweepRecord>, _>>()?;
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Iterations,
    TimeMs,
}

impl Metric {
    pub fn column(self) -> &'static str {
        match self {
            Metric::Iterations => "iterations",
            Metric::TimeMs => "time_ms",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "iterations" => Ok(Metric::Iterations),
            "time_ms" | "time" => Ok(Metric::TimeMs),
            _ => Err(format!(
                "unknown metric '{s}', expected iterations or time_ms"
            )),
        }
    }
}

#[derive(Debug, Deserialize)]
struct MetricRow {
    graph: String,
    alpha: f64,
    tolerance: f64,
    norm: String,
    #[serde(default)]
    converged: Option<bool>,
    value: f64,
}

/// Measurement matrix built from a sweep CSV plus how many of its cells
/// came from runs that hit the iteration cap.
#[derive(Debug, Clone)]
pub struct MetricTable {
    pub matrix: MeasurementMatrix,
    pub non_converged: usize,
}

/// Builds a `[norm][case]` matrix of `metric` from a sweep CSV, where a case
/// is a `(graph, alpha, tolerance)` triple. Only the `graph`, `alpha`,
/// `tolerance`, `norm` and metric columns are required, and the metric may be
/// fractional. Every norm must have a value for every case.
pub fn metric_matrix<R: Read>(reader: R, metric: Metric) -> Result<MetricTable, HarnessError> {
    let mut r = csv::Reader::from_reader(reader);
    let mut headers = r.headers()?.clone();
    let Some(col) = headers.iter().position(|h| h == metric.column()) else {
        return Err(HarnessError::Plan(format!(
            "input has no '{}' column",
            metric.column()
        )));
    };
    let renamed: csv::StringRecord = headers
        .iter()
        .enumerate()
        .map(|(i, h)| if i == col { "value" } else { h })
        .collect();
    headers = renamed;

    type CaseKey = (String, u64, u64);
    let case_label = |k: &CaseKey| {
        format!(
            "{} alpha={} tolerance={}",
            k.0,
            f64::from_bits(k.1),
            f64::from_bits(k.2)
        )
    };

    let mut cases: Vec<CaseKey> = Vec::new();
    let mut case_index: HashMap<CaseKey, usize> = HashMap::new();
    let mut cells: BTreeMap<ApproachKey, HashMap<usize, f64>> = BTreeMap::new();
    let mut non_converged = 0;

    for row in r.records() {
        let row: MetricRow = row?.deserialize(Some(&headers))?;
        let key: CaseKey = (row.graph, row.alpha.to_bits(), row.tolerance.to_bits());
        let idx = *case_index.entry(key.clone()).or_insert_with(|| {
            cases.push(key.clone());
            cases.len() - 1
        });
        let approach = ApproachKey::new(&row.norm);
        if cells
            .entry(approach.clone())
            .or_default()
            .insert(idx, row.value)
            .is_some()
        {
            return Err(HarnessError::DuplicateCell(format!(
                "{} / {}",
                approach.label,
                case_label(&key)
            )));
        }
        if row.converged == Some(false) {
            non_converged += 1;
        }
    }
    if cells.is_empty() {
        return Err(HarnessError::Plan("input has no data rows".into()));
    }

    let mut missing = Vec::new();
    for (approach, values) in &cells {
        for (j, key) in cases.iter().enumerate() {
            if !values.contains_key(&j) {
                missing.push(format!("{} / {}", approach.label, case_label(key)));
            }
        }
    }
    if !missing.is_empty() {
        return Err(HarnessError::MissingCells(missing));
    }

    let approaches = cells.keys().map(|k| k.label.clone()).collect();
    let values = cells
        .values()
        .map(|m| (0..cases.len()).map(|j| m[&j]).collect())
        .collect();
    let matrix =
        MeasurementMatrix::new(approaches, cases.iter().map(case_label).collect(), values)?;
    Ok(MetricTable {
        matrix,
        non_converged,
    })
}

/// Approach label ordered l1, l2, linf first, then anything else by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ApproachKey {
    unknown: bool,
    norm: Option<NormKind>,
    label: String,
}

impl ApproachKey {
    fn new(raw: &str) -> Self {
        match raw.parse::<NormKind>() {
            Ok(norm) => ApproachKey {
                unknown: false,
                norm: Some(norm),
                label: norm.label().to_string(),
            },
            Err(_) => ApproachKey {
                unknown: true,
                norm: None,
                label: raw.to_string(),
            },
        }
    }
}

/// Sensitivity findings for one `(graph, norm, alpha)` series of a
/// tolerance sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityEntry {
    pub graph: String,
    pub norm: NormKind,
    pub alpha: f64,
    /// Largest tolerance from which every smaller tolerance also failed to
    /// converge.
    pub first_failing_tolerance: Option<f64>,
    /// Tolerances that converged after a single iteration.
    pub single_iteration_tolerances: Vec<f64>,
    /// Non-converged tolerances followed by a converged smaller tolerance.
    pub closure_violations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensitivityReport {
    pub entries: Vec<SensitivityEntry>,
}

impl SensitivityReport {
    pub fn entry(&self, graph: &str, norm: NormKind) -> Option<&SensitivityEntry> {
        self.entries
            .iter()
            .find(|e| e.graph == graph && e.norm == norm)
    }
}

/// Finds, per series, where runs start hitting the iteration cap and where
/// they finish in one iteration. Every series must cover the same tolerance
/// grid (the union of all tolerances present).
pub fn detect_sensitivity(records: &[SweepRecord]) -> Result<SensitivityReport, HarnessError> {
    let mut grid: Vec<f64> = records.iter().map(|r| r.tolerance).collect();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();

    let mut series: BTreeMap<(String, NormKind, u64), Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        series
            .entry((r.graph.clone(), r.norm, r.alpha.to_bits()))
            .or_default()
            .push(r);
    }

    let mut entries = Vec::with_capacity(series.len());
    for ((graph, norm, alpha_bits), mut rows) in series {
        let alpha = f64::from_bits(alpha_bits);
        rows.sort_by(|a, b| b.tolerance.total_cmp(&a.tolerance));
        for (i, &tolerance) in grid.iter().enumerate() {
            if rows.get(i).map(|r| r.tolerance) != Some(tolerance) {
                return Err(HarnessError::GridGap {
                    graph,
                    norm,
                    alpha,
                    tolerance,
                });
            }
        }
        if rows.len() != grid.len() {
            return Err(HarnessError::Plan(format!(
                "graph {graph}, norm {norm}, alpha {alpha}: repeated tolerance values"
            )));
        }

        let tail = rows.iter().rev().take_while(|r| !r.converged).count();
        let first_failing_tolerance = (tail > 0).then(|| rows[rows.len() - tail].tolerance);
        let closure_violations = rows[..rows.len() - tail]
            .iter()
            .filter(|r| !r.converged)
            .map(|r| r.tolerance)
            .collect();
        let single_iteration_tolerances = rows
            .iter()
            .filter(|r| r.iterations == 1)
            .map(|r| r.tolerance)
            .collect();
        entries.push(SensitivityEntry {
            graph,
            norm,
            alpha,
            first_failing_tolerance,
            single_iteration_tolerances,
            closure_violations,
        });
    }
    Ok(SensitivityReport { entries })
}
