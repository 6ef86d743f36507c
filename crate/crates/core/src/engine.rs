//! Pull-based power-iteration PageRank.
//!
//! Every iteration computes the common teleport contribution
//!
//! ```text
//! c0 = (1 - alpha) / N + alpha * (sum of previous ranks of dangling vertices) / N
//! ```
//!
//! and then, for every vertex `v`,
//!
//! ```text
//! rank[v] = c0 + alpha * sum over in-neighbours u of prev[u] / out_degree[u]
//! ```
//!
//! Iteration stops once the chosen norm of `rank - prev` drops below the
//! tolerance, or the iteration cap is hit.

use std::ops::Deref;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::CsrGraph;
use crate::norm::{distance, NormKind};

pub const DEFAULT_MAX_ITERATIONS: usize = 500;
pub const REFERENCE_ALPHA: f64 = 0.85;
pub const REFERENCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum PageRankError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("damping factor {0} outside [0, 1]")]
    Alpha(f64),
    #[error("tolerance {0} must be positive")]
    Tolerance(f64),
    #[error("max iterations must be at least 1")]
    MaxIterations,
    #[error("rank vector has {got} entries, graph has {expected} vertices")]
    RankLength { expected: usize, got: usize },
    #[error("estimate needs {name} in (0, 1), got {value}")]
    EstimateDomain { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub alpha: f64,
    pub tolerance: f64,
    pub norm: NormKind,
    pub max_iterations: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            alpha: REFERENCE_ALPHA,
            tolerance: REFERENCE_TOLERANCE,
            norm: NormKind::L1,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl PageRankConfig {
    pub fn new(alpha: f64, tolerance: f64, norm: NormKind) -> Self {
        PageRankConfig {
            alpha,
            tolerance,
            norm,
            ..Default::default()
        }
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<(), PageRankError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(PageRankError::Alpha(self.alpha));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(PageRankError::Tolerance(self.tolerance));
        }
        if self.max_iterations == 0 {
            return Err(PageRankError::MaxIterations);
        }
        Ok(())
    }
}

/// Per-vertex ranks; entries are non-negative and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn uniform(n: usize) -> Self {
        RankVector(vec![1.0 / n as f64; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl From<Vec<f64>> for RankVector {
    fn from(values: Vec<f64>) -> Self {
        RankVector(values)
    }
}

impl Deref for RankVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankResult {
    pub ranks: RankVector,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the last update.
    pub error: f64,
    /// Wall time of the iteration loop.
    pub elapsed: Duration,
}

impl PageRankResult {
    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e3
    }
}

/// State handed to an observer after each iteration.
#[derive(Debug, Clone, Copy)]
pub struct IterationStep<'a> {
    pub iteration: usize,
    pub ranks: &'a [f64],
    pub error: f64,
}

pub fn pagerank(g: &CsrGraph, cfg: &PageRankConfig) -> Result<PageRankResult, PageRankError> {
    pagerank_observed(g, cfg, |_| {})
}

/// Same as [`pagerank`], calling `observe` after every iteration.
pub fn pagerank_observed<F>(
    g: &CsrGraph,
    cfg: &PageRankConfig,
    mut observe: F,
) -> Result<PageRankResult, PageRankError>
where
    F: FnMut(IterationStep<'_>),
{
    cfg.validate()?;
    let n = g.vertex_count();
    if n == 0 {
        return Err(PageRankError::EmptyGraph);
    }

    let start = Instant::now();
    let alpha = cfg.alpha;
    let nf = n as f64;
    let out_degree = g.out_degree();
    let offsets = g.in_offsets();
    let sources = g.in_sources();

    let mut prev = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut contrib = vec![0.0; n];
    let mut iterations = 0;
    let mut error;

    loop {
        let dangling_mass: f64 = g.dangling().iter().map(|&u| prev[u]).sum();
        let c0 = (1.0 - alpha) / nf + alpha * dangling_mass / nf;
        for ((c, &r), &d) in contrib.iter_mut().zip(&prev).zip(out_degree) {
            *c = if d == 0 { 0.0 } else { r / d as f64 };
        }
        for (v, rank) in next.iter_mut().enumerate() {
            let pulled: f64 = sources[offsets[v]..offsets[v + 1]]
                .iter()
                .map(|&u| contrib[u])
                .sum();
            *rank = c0 + alpha * pulled;
        }
        iterations += 1;
        error = distance(cfg.norm, &next, &prev);
        std::mem::swap(&mut prev, &mut next);
        observe(IterationStep {
            iteration: iterations,
            ranks: &prev,
            error,
        });
        if error < cfg.tolerance || iterations >= cfg.max_iterations {
            break;
        }
    }
    let elapsed = start.elapsed();

    Ok(PageRankResult {
        ranks: RankVector(prev),
        iterations,
        converged: error < cfg.tolerance,
        error,
        elapsed,
    })
}

/// Rule-of-thumb iteration count `log10(tolerance) / log10(alpha)`, rounded
/// to the nearest integer (at least 1).
pub fn estimate_iterations(alpha: f64, tolerance: f64) -> Result<usize, PageRankError> {
    let open_unit = |x: f64| x > 0.0 && x < 1.0;
    if !open_unit(alpha) {
        return Err(PageRankError::EstimateDomain {
            name: "alpha",
            value: alpha,
        });
    }
    if !open_unit(tolerance) {
        return Err(PageRankError::EstimateDomain {
            name: "tolerance",
            value: tolerance,
        });
    }
    let estimate = (tolerance.log10() / alpha.log10()).round();
    Ok((estimate as usize).max(1))
}

/// Configuration of the default run that sweep errors are measured against.
pub fn reference_config() -> PageRankConfig {
    PageRankConfig::new(REFERENCE_ALPHA, REFERENCE_TOLERANCE, NormKind::L1)
        .with_max_iterations(DEFAULT_MAX_ITERATIONS)
}

pub fn reference_ranks(g: &CsrGraph) -> Result<RankVector, PageRankError> {
    pagerank(g, &reference_config()).map(|r| r.ranks)
}

/// L1 distance of `ranks` from the default (alpha = 0.85) PageRank of `g`.
pub fn reference_error(g: &CsrGraph, ranks: &[f64]) -> Result<f64, PageRankError> {
    let reference = reference_ranks(g)?;
    l1_from(&reference, ranks)
}

/// L1 distance of `ranks` from precomputed reference ranks.
pub fn l1_from(reference: &[f64], ranks: &[f64]) -> Result<f64, PageRankError> {
    if reference.len() != ranks.len() {
        return Err(PageRankError::RankLength {
            expected: reference.len(),
            got: ranks.len(),
        });
    }
    Ok(distance(NormKind::L1, ranks, reference))
}
