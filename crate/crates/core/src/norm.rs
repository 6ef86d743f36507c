use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Error function used to decide convergence between successive iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];

    pub fn label(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown norm '{0}', expected l1, l2 or linf")]
pub struct ParseNormError(pub String);

impl FromStr for NormKind {
    type Err = ParseNormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" => Ok(NormKind::LInf),
            _ => Err(ParseNormError(s.to_string())),
        }
    }
}

impl Serialize for NormKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for NormKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("vector length mismatch: {0} vs {1}")]
pub struct LengthMismatch(pub usize, pub usize);

/// Distance between `r` and `s` under `kind`. Unnormalized; summed in index
/// order.
pub fn error_norm(kind: NormKind, r: &[f64], s: &[f64]) -> Result<f64, LengthMismatch> {
    if r.len() != s.len() {
        return Err(LengthMismatch(r.len(), s.len()));
    }
    Ok(distance(kind, r, s))
}

pub(crate) fn distance(kind: NormKind, r: &[f64], s: &[f64]) -> f64 {
    let diffs = r.iter().zip(s).map(|(a, b)| (a - b).abs());
    match kind {
        NormKind::L1 => diffs.sum(),
        NormKind::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        NormKind::LInf => diffs.fold(0.0, f64::max),
    }
}
