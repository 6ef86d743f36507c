//! Means and composite relative-performance ratios.
//!
//! Given measurements `values[approach][case]`, a composite ratio against a
//! baseline approach can be formed in two orders:
//!
//! - ratio-then-mean (`RATIO-AM`, `RATIO-GM`, `RATIO-HM`): divide every case by
//!   the baseline's value for that case, then average the ratios;
//! - mean-then-ratio (`AM-RATIO`, `GM-RATIO`, `HM-RATIO`): average each
//!   approach first, then divide by the baseline's mean.
//!
//! Mean-then-ratio results do not depend on which baseline is picked (up to a
//! common factor), and the two GM variants coincide.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("mean of an empty list")]
    Empty,
    #[error("value {0} is not a positive finite number")]
    NonPositive(f64),
    #[error("unknown baseline '{0}'")]
    UnknownBaseline(String),
    #[error("approach '{approach}' has {got} values, expected {expected}")]
    Ragged {
        approach: String,
        expected: usize,
        got: usize,
    },
    #[error("measurement matrix needs at least one approach and one case")]
    NoData,
    #[error("unknown ratio method '{0}'")]
    UnknownMethod(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
}

impl MeanKind {
    pub fn label(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "am",
            MeanKind::Geometric => "gm",
            MeanKind::Harmonic => "hm",
        }
    }
}

fn check_positive(xs: &[f64]) -> Result<(), StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    match xs.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        Some(&bad) => Err(StatsError::NonPositive(bad)),
        None => Ok(()),
    }
}

pub fn mean(kind: MeanKind, xs: &[f64]) -> Result<f64, StatsError> {
    check_positive(xs)?;
    let n = xs.len() as f64;
    Ok(match kind {
        MeanKind::Arithmetic => xs.iter().sum::<f64>() / n,
        // log-sum keeps products of many large values finite
        MeanKind::Geometric => (xs.iter().map(|x| x.ln()).sum::<f64>() / n).exp(),
        MeanKind::Harmonic => n / xs.iter().map(|x| 1.0 / x).sum::<f64>(),
    })
}

/// One of the six composite ratio methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RatioMethod {
    RatioThenMean(MeanKind),
    MeanThenRatio(MeanKind),
}

impl RatioMethod {
    /// In the order the methods are usually tabulated.
    pub const ALL: [RatioMethod; 6] = [
        RatioMethod::MeanThenRatio(MeanKind::Arithmetic),
        RatioMethod::MeanThenRatio(MeanKind::Geometric),
        RatioMethod::MeanThenRatio(MeanKind::Harmonic),
        RatioMethod::RatioThenMean(MeanKind::Arithmetic),
        RatioMethod::RatioThenMean(MeanKind::Geometric),
        RatioMethod::RatioThenMean(MeanKind::Harmonic),
    ];

    pub fn name(self) -> &'static str {
        match self {
            RatioMethod::RatioThenMean(MeanKind::Arithmetic) => "ratio-am",
            RatioMethod::RatioThenMean(MeanKind::Geometric) => "ratio-gm",
            RatioMethod::RatioThenMean(MeanKind::Harmonic) => "ratio-hm",
            RatioMethod::MeanThenRatio(MeanKind::Arithmetic) => "am-ratio",
            RatioMethod::MeanThenRatio(MeanKind::Geometric) => "gm-ratio",
            RatioMethod::MeanThenRatio(MeanKind::Harmonic) => "hm-ratio",
        }
    }
}

impl fmt::Display for RatioMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RatioMethod {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        RatioMethod::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| StatsError::UnknownMethod(s.to_string()))
    }
}

/// Positive measurements indexed `[approach][case]`, fully populated.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    approaches: Vec<String>,
    cases: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl MeasurementMatrix {
    pub fn new(
        approaches: Vec<String>,
        cases: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, StatsError> {
        if approaches.is_empty() || cases.is_empty() {
            return Err(StatsError::NoData);
        }
        if values.len() != approaches.len() {
            return Err(StatsError::Ragged {
                approach: "<rows>".into(),
                expected: approaches.len(),
                got: values.len(),
            });
        }
        for (name, row) in approaches.iter().zip(&values) {
            if row.len() != cases.len() {
                return Err(StatsError::Ragged {
                    approach: name.clone(),
                    expected: cases.len(),
                    got: row.len(),
                });
            }
            check_positive(row)?;
        }
        Ok(MeasurementMatrix {
            approaches,
            cases,
            values,
        })
    }

    pub fn approaches(&self) -> &[String] {
        &self.approaches
    }

    pub fn cases(&self) -> &[String] {
        &self.cases
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    fn index_of(&self, label: &str) -> Result<usize, StatsError> {
        self.approaches
            .iter()
            .position(|a| a == label)
            .ok_or_else(|| StatsError::UnknownBaseline(label.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub method: RatioMethod,
    pub baseline: String,
    pub approaches: Vec<String>,
    /// Per-approach means; only present for mean-then-ratio methods.
    pub means: Option<Vec<f64>>,
    pub ratios: Vec<f64>,
}

impl RatioTable {
    pub fn ratio(&self, approach: &str) -> Option<f64> {
        self.approaches
            .iter()
            .position(|a| a == approach)
            .map(|i| self.ratios[i])
    }
}

pub fn ratio_then_mean(
    m: &MeasurementMatrix,
    baseline: &str,
    kind: MeanKind,
) -> Result<RatioTable, StatsError> {
    let b = m.index_of(baseline)?;
    let base = &m.values[b];
    let mut ratios = Vec::with_capacity(m.approaches.len());
    for (i, row) in m.values.iter().enumerate() {
        if i == b {
            ratios.push(1.0);
            continue;
        }
        let per_case: Vec<f64> = row.iter().zip(base).map(|(x, y)| x / y).collect();
        ratios.push(mean(kind, &per_case)?);
    }
    Ok(RatioTable {
        method: RatioMethod::RatioThenMean(kind),
        baseline: baseline.to_string(),
        approaches: m.approaches.clone(),
        means: None,
        ratios,
    })
}

pub fn mean_then_ratio(
    m: &MeasurementMatrix,
    baseline: &str,
    kind: MeanKind,
) -> Result<RatioTable, StatsError> {
    let b = m.index_of(baseline)?;
    let means = m
        .values
        .iter()
        .map(|row| mean(kind, row))
        .collect::<Result<Vec<_>, _>>()?;
    let ratios = means.iter().map(|x| x / means[b]).collect();
    Ok(RatioTable {
        method: RatioMethod::MeanThenRatio(kind),
        baseline: baseline.to_string(),
        approaches: m.approaches.clone(),
        means: Some(means),
        ratios,
    })
}

pub fn composite(
    m: &MeasurementMatrix,
    baseline: &str,
    method: RatioMethod,
) -> Result<RatioTable, StatsError> {
    match method {
        RatioMethod::RatioThenMean(kind) => ratio_then_mean(m, baseline, kind),
        RatioMethod::MeanThenRatio(kind) => mean_then_ratio(m, baseline, kind),
    }
}
