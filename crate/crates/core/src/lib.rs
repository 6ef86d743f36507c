//! Toolkit for studying how PageRank parameters affect convergence.
//!
//! The pieces, bottom-up:
//!
//! - [`mtx`] reads MatrixMarket coordinate files into an [`graph::EdgeList`].
//! - [`graph`] turns an edge list into a reverse-CSR [`graph::CsrGraph`].
//! - [`norm`] holds the L1 / L2 / L∞ error functions used as convergence checks.
//! - [`engine`] is the pull-based power-iteration PageRank.
//! - [`stats`] computes AM/GM/HM means and the six composite ratio methods.
//! - [`harness`] runs damping, norm and tolerance sweeps and reads/writes CSV.
//! - [`chart`] renders sweep results as SVG line charts.
//! - [`cli`] is the command-line front-end used by the `pagerank-lab` binary.

pub mod chart;
pub mod cli;
pub mod engine;
pub mod graph;
pub mod harness;
pub mod mtx;
pub mod norm;
pub mod stats;

pub use engine::{estimate_iterations, pagerank, PageRankConfig, PageRankResult, RankVector};
pub use graph::{build_csr, CsrGraph, EdgeList};
pub use norm::{error_norm, NormKind};
