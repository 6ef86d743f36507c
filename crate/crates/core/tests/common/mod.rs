//! Graph generators and an independent dense PageRank oracle shared by the
//! integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use pagerank_lab::{build_csr, CsrGraph, EdgeList, NormKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn csr(n: usize, edges: Vec<(usize, usize)>) -> CsrGraph {
    build_csr(&EdgeList::new(n, edges).unwrap())
}

/// Each vertex `v` links to `v+1 .. v+k (mod n)`: every in- and out-degree is `k`.
pub fn circulant(n: usize, k: usize) -> CsrGraph {
    let edges = (0..n)
        .flat_map(|v| (1..=k).map(move |d| (v, (v + d) % n)))
        .collect();
    csr(n, edges)
}

/// Erdős–Rényi digraph with edge probability `p`. When `force_dangling` is
/// set, a random quarter of the vertices (at least one) lose their out-edges.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64, force_dangling: bool) -> CsrGraph {
    let mut dangling = vec![false; n];
    if force_dangling {
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(rng);
        for &v in ids.iter().take((n / 4).max(1)) {
            dangling[v] = true;
        }
    }
    let mut edges = Vec::new();
    for (u, &is_dangling) in dangling.iter().enumerate() {
        for v in 0..n {
            if u != v && !is_dangling && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    csr(n, edges)
}

/// Web-like directed graph: vertices are grouped into hosts of 5..=50 pages.
///
/// Pages link mostly inside their host, picking targets proportionally to
/// `in_degree + 1` (preferential attachment); each link is reciprocated with
/// probability 0.3. A page is dangling with probability 0.1. One host in five
/// is closed: no dangling pages and no links leaving the host, so it traps
/// rank the way self-contained sites do on the web. Other hosts send a fifth
/// of their links to pages of earlier hosts, again preferentially.
pub fn scale_free(n: usize, seed: u64) -> CsrGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut dangling = vec![false; n];
    // global urn over open-host pages: each page once plus once per in-edge
    let mut global: Vec<usize> = Vec::new();
    let mut start = 0;
    while start < n {
        let size = rng.gen_range(5..=50).min(n - start);
        let closed = rng.gen_bool(0.2);
        let mut local: Vec<usize> = Vec::new();
        for v in start..start + size {
            dangling[v] = !closed && rng.gen_bool(0.1);
            if !dangling[v] && !local.is_empty() {
                for _ in 0..rng.gen_range(1..=6) {
                    let external = !closed && !global.is_empty() && rng.gen_bool(0.2);
                    let t = if external {
                        global[rng.gen_range(0..global.len())]
                    } else {
                        local[rng.gen_range(0..local.len())]
                    };
                    edges.push((v, t));
                    if external {
                        global.push(t);
                    } else {
                        local.push(t);
                        if !dangling[t] && rng.gen_bool(0.3) {
                            edges.push((t, v));
                            local.push(v);
                        }
                    }
                }
            }
            local.push(v);
        }
        // the first page of a host has no earlier local target; tie it in
        let first = start;
        if size > 1 && !dangling[first] {
            edges.push((first, first + 1));
        }
        if !closed {
            global.extend(start..start + size);
        }
        start += size;
    }
    csr(n, edges)
}

pub struct DenseRun {
    pub ranks: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration on a dense 0/1 adjacency matrix with the same update and
/// stopping rule as the engine, written without touching the CSR layout.
pub fn dense_pagerank(
    n: usize,
    edges: &[(usize, usize)],
    alpha: f64,
    tolerance: f64,
    norm: NormKind,
    max_iterations: usize,
) -> DenseRun {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        adj[u][v] = true;
    }
    let out: Vec<usize> = adj
        .iter()
        .map(|row| row.iter().filter(|&&b| b).count())
        .collect();
    let nf = n as f64;
    let mut r = vec![1.0 / nf; n];
    let mut iterations = 0;
    loop {
        let mut dangling_mass = 0.0;
        for u in 0..n {
            if out[u] == 0 {
                dangling_mass += r[u];
            }
        }
        let c0 = (1.0 - alpha) / nf + alpha * dangling_mass / nf;
        let mut next = vec![0.0; n];
        for v in 0..n {
            let mut sum = 0.0;
            for u in 0..n {
                if adj[u][v] {
                    sum += r[u] / out[u] as f64;
                }
            }
            next[v] = c0 + alpha * sum;
        }
        iterations += 1;
        let diffs: Vec<f64> = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).collect();
        let err = match norm {
            NormKind::L1 => diffs.iter().sum::<f64>(),
            NormKind::L2 => diffs.iter().map(|d| d * d).sum::<f64>().sqrt(),
            NormKind::LInf => diffs.iter().cloned().fold(0.0, f64::max),
        };
        r = next;
        if err < tolerance || iterations >= max_iterations {
            return DenseRun {
                ranks: r,
                iterations,
                converged: err < tolerance,
            };
        }
    }
}
