//! Directed graphs in reverse-CSR (in-edge) layout.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({from}, {to}) out of range for {vertex_count} vertices")]
    VertexOutOfRange {
        from: usize,
        to: usize,
        vertex_count: usize,
    },
}

/// Directed edges with 0-based endpoints. Duplicates are allowed here and
/// removed by [`build_csr`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeList {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if let Some(&(from, to)) = edges
            .iter()
            .find(|&&(u, v)| u >= vertex_count || v >= vertex_count)
        {
            return Err(GraphError::VertexOutOfRange {
                from,
                to,
                vertex_count,
            });
        }
        Ok(EdgeList {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Immutable directed graph storing, for every vertex, the list of its
/// in-neighbours, plus out-degrees and the dangling (out-degree 0) vertices.
///
/// In-neighbours of each vertex are sorted ascending, so a pull over them
/// always sums in the same order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
    out_degree: Vec<usize>,
    dangling: Vec<usize>,
}

impl CsrGraph {
    pub fn vertex_count(&self) -> usize {
        self.out_degree.len()
    }

    /// Number of distinct stored edges.
    pub fn edge_count(&self) -> usize {
        self.in_sources.len()
    }

    pub fn in_offsets(&self) -> &[usize] {
        &self.in_offsets
    }

    pub fn in_sources(&self) -> &[usize] {
        &self.in_sources
    }

    /// Sources `u` of all edges `u -> v`, ascending.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self) -> &[usize] {
        &self.out_degree
    }

    pub fn dangling(&self) -> &[usize] {
        &self.dangling
    }

    /// All edges as `(source, target)`, grouped by target.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |v| self.in_neighbors(v).iter().map(move |&u| (u, v)))
    }
}

/// Builds the reverse-CSR graph. Exact duplicate edges are dropped and
/// self-loops are kept.
pub fn build_csr(el: &EdgeList) -> CsrGraph {
    let n = el.vertex_count();
    let mut edges = el.edges().to_vec();
    edges.sort_unstable_by_key(|&(u, v)| (v, u));
    edges.dedup();

    // count
    let mut in_offsets = vec![0usize; n + 1];
    let mut out_degree = vec![0usize; n];
    for &(u, v) in &edges {
        in_offsets[v + 1] += 1;
        out_degree[u] += 1;
    }
    for v in 0..n {
        in_offsets[v + 1] += in_offsets[v];
    }

    // fill
    let mut cursor = in_offsets[..n].to_vec();
    let mut in_sources = vec![0usize; edges.len()];
    for &(u, v) in &edges {
        in_sources[cursor[v]] = u;
        cursor[v] += 1;
    }

    let dangling = (0..n).filter(|&v| out_degree[v] == 0).collect();
    CsrGraph {
        in_offsets,
        in_sources,
        out_degree,
        dangling,
    }
}
