//! Sparse symmetric stochastic gossip matrices supported on a graph.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// How off-diagonal weights are derived from the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixKind {
    /// `W = I + (A - D) / d_max`. `d_max` defaults to the graph's maximum
    /// degree; a larger value can be forced (e.g. the ambient lattice degree
    /// for a percolation cluster).
    UniformDegree { d_max: Option<usize> },
    /// `W = A / d` on a `d`-regular graph.
    AdjacencyOverDegree,
    /// `W_vw = 1 / max(deg v, deg w)` on edges, diagonal fills each row to 1.
    MaxNeighborDegree,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixKind::UniformDegree { d_max: None } => write!(f, "uniform_degree"),
            MatrixKind::UniformDegree { d_max: Some(d) } => write!(f, "uniform_degree:{d}"),
            MatrixKind::AdjacencyOverDegree => write!(f, "adjacency_over_d"),
            MatrixKind::MaxNeighborDegree => write!(f, "max_neighbor_degree"),
        }
    }
}

impl std::str::FromStr for MatrixKind {
    type Err = Error;

    /// Accepts `uniform_degree`, `uniform_degree:<d_max>`, `adjacency_over_d`
    /// and `max_neighbor_degree` (hyphens allowed in place of underscores).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('-', "_");
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.to_string(), Some(a.to_string())),
            None => (s.clone(), None),
        };
        match (name.as_str(), arg) {
            ("uniform_degree" | "uniform", None) => Ok(MatrixKind::UniformDegree { d_max: None }),
            ("uniform_degree" | "uniform", Some(a)) => a
                .parse()
                .map(|d| MatrixKind::UniformDegree { d_max: Some(d) })
                .map_err(|_| Error::Parse(format!("bad d_max {a:?}"))),
            ("adjacency_over_d" | "adjacency", None) => Ok(MatrixKind::AdjacencyOverDegree),
            ("max_neighbor_degree" | "max_degree", None) => Ok(MatrixKind::MaxNeighborDegree),
            _ => Err(Error::Parse(format!("unknown matrix kind {s:?}"))),
        }
    }
}

/// Symmetric, nonnegative, row-stochastic matrix whose off-diagonal support
/// is a subset of the graph's edges.
///
/// Each undirected entry is stored once in `edge_weights`; the row-wise
/// layout used by [`GossipMatrix::apply`] is expanded from it, so the matrix
/// equals its transpose exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GossipMatrix {
    diagonal: Vec<f64>,
    /// `(u, v, w)` with `u < v`.
    edge_weights: Vec<(usize, usize, f64)>,
    row_offsets: Vec<usize>,
    row_cols: Vec<usize>,
    row_vals: Vec<f64>,
}

impl GossipMatrix {
    /// Builds a matrix from its diagonal and one weight per undirected edge.
    pub fn from_parts(diagonal: Vec<f64>, edge_weights: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = diagonal.len();
        let mut counts = vec![0usize; n];
        for &(u, v, w) in &edge_weights {
            if u >= v || v >= n {
                return Err(Error::Spec(format!(
                    "edge entry ({u}, {v}) must satisfy u < v < {n}"
                )));
            }
            if !(w >= 0.0) {
                return Err(Error::Spec(format!("negative weight {w} on ({u}, {v})")));
            }
            counts[u] += 1;
            counts[v] += 1;
        }
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        for c in &counts {
            row_offsets.push(row_offsets.last().unwrap() + c);
        }
        let mut fill = row_offsets[..n].to_vec();
        let mut row_cols = vec![0; row_offsets[n]];
        let mut row_vals = vec![0.0; row_offsets[n]];
        for &(u, v, w) in &edge_weights {
            row_cols[fill[u]] = v;
            row_vals[fill[u]] = w;
            fill[u] += 1;
            row_cols[fill[v]] = u;
            row_vals[fill[v]] = w;
            fill[v] += 1;
        }
        // Sort each row by column so the reduction order in `apply` is fixed.
        for r in 0..n {
            let range = row_offsets[r]..row_offsets[r + 1];
            let mut row: Vec<(usize, f64)> = row_cols[range.clone()]
                .iter()
                .copied()
                .zip(row_vals[range.clone()].iter().copied())
                .collect();
            row.sort_by_key(|&(c, _)| c);
            for (k, (c, w)) in row.into_iter().enumerate() {
                row_cols[range.start + k] = c;
                row_vals[range.start + k] = w;
            }
        }
        Ok(GossipMatrix {
            diagonal,
            edge_weights,
            row_offsets,
            row_cols,
            row_vals,
        })
    }

    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// One entry per undirected edge, `(u, v, weight)` with `u < v`.
    pub fn edge_weights(&self) -> &[(usize, usize, f64)] {
        &self.edge_weights
    }

    /// Entry `(v, w)`; zero off the support.
    pub fn get(&self, v: usize, w: usize) -> f64 {
        if v == w {
            return self.diagonal[v];
        }
        let cols = &self.row_cols[self.row_offsets[v]..self.row_offsets[v + 1]];
        match cols.binary_search(&w) {
            Ok(k) => self.row_vals[self.row_offsets[v] + k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sum(&self, v: usize) -> f64 {
        self.diagonal[v]
            + self.row_vals[self.row_offsets[v]..self.row_offsets[v + 1]]
                .iter()
                .sum::<f64>()
    }

    /// `out = W x`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n());
        assert_eq!(out.len(), self.n());
        for (v, o) in out.iter_mut().enumerate() {
            let mut acc = self.diagonal[v] * x[v];
            for k in self.row_offsets[v]..self.row_offsets[v + 1] {
                acc += self.row_vals[k] * x[self.row_cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.apply_into(x, &mut out);
        out
    }

    /// The lazy matrix `(I + W) / 2`.
    pub fn lazy(&self) -> GossipMatrix {
        let diagonal = self.diagonal.iter().map(|d| 0.5 * (1.0 + d)).collect();
        let edges = self
            .edge_weights
            .iter()
            .map(|&(u, v, w)| (u, v, 0.5 * w))
            .collect();
        GossipMatrix::from_parts(diagonal, edges).expect("halving a valid matrix keeps it valid")
    }

    /// Dense row-major copy, for spectral analysis of small matrices.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut dense = vec![0.0; n * n];
        for v in 0..n {
            dense[v * n + v] = self.diagonal[v];
        }
        for &(u, v, w) in &self.edge_weights {
            dense[u * n + v] = w;
            dense[v * n + u] = w;
        }
        dense
    }

    /// Checks nonnegativity, stochasticity (rows sum to 1 within `1e-12`)
    /// and, when a graph is given, that off-diagonal support lies on its edges.
    pub fn check_invariants(&self, graph: Option<&Graph>) -> Result<()> {
        for v in 0..self.n() {
            if self.diagonal[v] < 0.0 {
                return Err(Error::Spec(format!("negative diagonal at {v}")));
            }
            let s = self.row_sum(v);
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::Spec(format!("row {v} sums to {s}")));
            }
        }
        if let Some(g) = graph {
            if g.n() != self.n() {
                return Err(Error::DimensionMismatch {
                    expected: g.n(),
                    got: self.n(),
                });
            }
            for &(u, v, w) in &self.edge_weights {
                if w > 0.0 && g.neighbors(u).binary_search(&v).is_err() {
                    return Err(Error::Spec(format!("weight on non-edge ({u}, {v})")));
                }
            }
        }
        Ok(())
    }
}

/// Builds the gossip matrix of `g` of the requested kind.
pub fn build_gossip_matrix(g: &Graph, kind: MatrixKind) -> Result<GossipMatrix> {
    let n = g.n();
    let degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let edges: Vec<(usize, usize, f64)> = match kind {
        MatrixKind::UniformDegree { d_max } => {
            let graph_max = g.max_degree();
            let d = match d_max {
                Some(d) if d < graph_max => {
                    return Err(Error::Precondition(format!(
                        "d_max override {d} is below the maximum degree {graph_max}"
                    )))
                }
                Some(d) => d,
                None => graph_max,
            };
            let w = if d == 0 { 0.0 } else { 1.0 / d as f64 };
            g.edges().map(|(u, v)| (u, v, w)).collect()
        }
        MatrixKind::AdjacencyOverDegree => {
            let d = g.regular_degree().filter(|&d| d > 0).ok_or_else(|| {
                Error::Precondition(
                    "adjacency_over_d requires a regular graph of positive degree".into(),
                )
            })?;
            let w = 1.0 / d as f64;
            g.edges().map(|(u, v)| (u, v, w)).collect()
        }
        MatrixKind::MaxNeighborDegree => g
            .edges()
            .map(|(u, v)| (u, v, 1.0 / degree[u].max(degree[v]) as f64))
            .collect(),
    };
    let mut off_sum = vec![0.0; n];
    for &(u, v, w) in &edges {
        off_sum[u] += w;
        off_sum[v] += w;
    }
    // Clamp tiny negative round-off (e.g. 1 - 3 * (1/3)) to exactly zero.
    let diagonal = off_sum
        .iter()
        .map(|s| {
            let d = 1.0 - s;
            if d.abs() < 1e-14 {
                0.0
            } else {
                d
            }
        })
        .collect();
    GossipMatrix::from_parts(diagonal, edges)
}
