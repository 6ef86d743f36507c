//! MatrixMarket coordinate-format reader.
//!
//! Only `matrix coordinate` files with a `pattern`, `real` or `integer` field
//! and `general` or `symmetric` symmetry are accepted. Entry `i j [w]` becomes
//! the directed edge `(i-1) -> (j-1)`; weights are validated and dropped.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use crate::graph::{build_csr, CsrGraph, EdgeList};

#[derive(Debug, Error)]
pub enum MtxError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("read error: {0}")]
    Read(#[from] io::Error),
}

impl MtxError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        MtxError::Parse {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pattern,
    Real,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_banner(line: &str) -> Result<(Field, Symmetry), MtxError> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(MtxError::at(
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>' banner",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(MtxError::at(
            1,
            format!("unsupported object '{}'", tokens[1]),
        ));
    }
    if tokens[2] != "coordinate" {
        return Err(MtxError::at(
            1,
            format!(
                "unsupported format '{}', only coordinate is accepted",
                tokens[2]
            ),
        ));
    }
    let field = match tokens[3].as_str() {
        "pattern" => Field::Pattern,
        "real" => Field::Real,
        "integer" => Field::Integer,
        other => return Err(MtxError::at(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(MtxError::at(1, format!("unsupported symmetry '{other}'"))),
    };
    Ok((field, symmetry))
}

fn parse_index(token: &str, bound: usize, line: usize, what: &str) -> Result<usize, MtxError> {
    let idx: usize = token.parse().map_err(|_| {
        MtxError::at(
            line,
            format!("{what} index '{token}' is not a positive integer"),
        )
    })?;
    if idx == 0 || idx > bound {
        return Err(MtxError::at(
            line,
            format!("{what} index {idx} out of range 1..={bound}"),
        ));
    }
    Ok(idx - 1)
}

/// Parses a MatrixMarket coordinate stream into an edge list.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<EdgeList, MtxError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let banner = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(MtxError::at(1, "empty input")),
    };
    let (field, symmetry) = parse_banner(&banner)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = 0usize;

    for (lineno, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();

        let Some((rows, cols, nnz)) = size else {
            if tokens.len() != 3 {
                return Err(MtxError::at(
                    lineno,
                    "size line must have three integers: rows cols entries",
                ));
            }
            let mut dims = [0usize; 3];
            for (d, tok) in dims.iter_mut().zip(&tokens) {
                *d = tok.parse().map_err(|_| {
                    MtxError::at(
                        lineno,
                        format!("size line value '{tok}' is not a non-negative integer"),
                    )
                })?;
            }
            size = Some((dims[0], dims[1], dims[2]));
            edges.reserve(dims[2]);
            continue;
        };

        if seen == nnz {
            return Err(MtxError::at(
                lineno,
                format!("more entries than the {nnz} declared"),
            ));
        }
        let expected = if field == Field::Pattern { 2 } else { 3 };
        if tokens.len() != expected {
            return Err(MtxError::at(
                lineno,
                format!(
                    "expected {expected} values per entry, found {}",
                    tokens.len()
                ),
            ));
        }
        let row = parse_index(tokens[0], rows, lineno, "row")?;
        let col = parse_index(tokens[1], cols, lineno, "column")?;
        match field {
            Field::Pattern => {}
            Field::Real => {
                tokens[2].parse::<f64>().map_err(|_| {
                    MtxError::at(
                        lineno,
                        format!("value '{}' is not a real number", tokens[2]),
                    )
                })?;
            }
            Field::Integer => {
                tokens[2].parse::<i64>().map_err(|_| {
                    MtxError::at(lineno, format!("value '{}' is not an integer", tokens[2]))
                })?;
            }
        }
        edges.push((row, col));
        if symmetry == Symmetry::Symmetric && row != col {
            edges.push((col, row));
        }
        seen += 1;
    }

    let Some((rows, cols, nnz)) = size else {
        return Err(MtxError::at(1, "missing size line"));
    };
    if seen != nnz {
        return Err(MtxError::at(
            1,
            format!("size line declares {nnz} entries but {seen} were found"),
        ));
    }
    let n = rows.max(cols);
    // indices were range-checked against rows/cols, both <= n
    Ok(EdgeList::new(n, edges).expect("indices checked during parse"))
}

/// Reads and parses a `.mtx` file.
pub fn read_matrix_market(path: &Path) -> Result<EdgeList, MtxError> {
    let file = File::open(path).map_err(|source| MtxError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_market(BufReader::new(file))
}

/// Reads a `.mtx` file straight into a [`CsrGraph`].
pub fn load_graph(path: &Path) -> Result<CsrGraph, MtxError> {
    read_matrix_market(path).map(|el| build_csr(&el))
}
