//! Weighted undirected graphs, cut assignments, and flip gains.
//!
//! A cut partitions the vertex set into two sides labelled 0 and 1. Its value
//! is the total weight crossing the partition,
//!
//! ```text
//!     cut(x) = sum_{(i,j) in E} w_ij * (x_i + x_j - 2 x_i x_j),
//! ```
//!
//! where `x_i + x_j - 2 x_i x_j` is 1 exactly when the endpoints disagree.
//! The *gain* of a vertex is the change in cut value from flipping it alone;
//! [`GainTable`] keeps all gains and [`apply_flip`] maintains them in O(deg)
//! per flip instead of recomputing from scratch.

use crate::error::{Error, Result};

/// One weighted undirected edge. Endpoints are vertex indices in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        Edge { u, v, w }
    }

    /// Endpoints in ascending order; canonical form for sorting and merging.
    fn canonical(self) -> (usize, usize, f64) {
        if self.u <= self.v {
            (self.u, self.v, self.w)
        } else {
            (self.v, self.u, self.w)
        }
    }
}

impl From<(usize, usize, f64)> for Edge {
    fn from((u, v, w): (usize, usize, f64)) -> Self {
        Edge::new(u, v, w)
    }
}

/// Immutable weighted undirected graph in adjacency-list form.
///
/// Construction canonicalizes the edge set: duplicate edges (in either
/// orientation) are merged by summing weights, self-loops are rejected, and
/// adjacency lists are sorted by neighbor index so iteration order is
/// deterministic.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    /// Canonical edge list, sorted by (u, v) with u < v.
    edges: Vec<Edge>,
    /// offsets[i]..offsets[i+1] indexes `neighbors` for vertex i.
    offsets: Vec<usize>,
    /// (neighbor, weight) pairs, sorted by neighbor within each vertex.
    neighbors: Vec<(usize, f64)>,
    total_weight: f64,
}

impl Graph {
    /// Build a graph on `n` vertices from an arbitrary edge list; items may
    /// be [`Edge`]s or bare `(u, v, w)` tuples.
    ///
    /// Duplicates (either orientation) merge by weight summation. Self-loops,
    /// out-of-range endpoints, non-finite or negative weights, and `n == 0`
    /// are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<Edge>,
    {
        if n == 0 {
            return Err(Error::InvalidInstance(
                "graph must have at least one vertex".into(),
            ));
        }
        let mut canon: Vec<(usize, usize, f64)> = Vec::new();
        for e in edges {
            let e: Edge = e.into();
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    e.u, e.v, n
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidInstance(format!(
                    "self-loop on vertex {} is not allowed",
                    e.u
                )));
            }
            if !e.w.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "edge ({}, {}) has non-finite weight",
                    e.u, e.v
                )));
            }
            if e.w < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "edge ({}, {}) has negative weight {}",
                    e.u, e.v, e.w
                )));
            }
            canon.push(e.canonical());
        }
        canon.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut merged: Vec<Edge> = Vec::with_capacity(canon.len());
        for (u, v, w) in canon {
            match merged.last_mut() {
                Some(last) if last.u == u && last.v == v => last.w += w,
                _ => merged.push(Edge { u, v, w }),
            }
        }
        // Zero-weight edges carry no cut value but would still inflate degree
        // statistics and neighbor scans; drop them.
        merged.retain(|e| e.w > 0.0);

        let mut degree = vec![0usize; n];
        for e in &merged {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut neighbors = vec![(0usize, 0f64); offsets[n]];
        let mut cursor = offsets.clone();
        for e in &merged {
            neighbors[cursor[e.u]] = (e.v, e.w);
            cursor[e.u] += 1;
            neighbors[cursor[e.v]] = (e.u, e.w);
            cursor[e.v] += 1;
        }
        // Edges are processed in (u, v) sorted order, so each vertex's slice
        // of forward neighbors is sorted and so is its slice of backward
        // neighbors, but the two interleave; sort each slice once.
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]]
                .sort_by(|a, b| a.0.cmp(&b.0));
        }

        let total_weight = merged.iter().map(|e| e.w).sum();
        Ok(Graph {
            n,
            edges: merged,
            offsets,
            neighbors,
            total_weight,
        })
    }

    /// Number of vertices.
    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Number of edges after canonicalization.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, sorted by (u, v) with u < v.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `i` as (neighbor, weight), sorted by neighbor index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Degree of `i` (number of incident edges).
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sum of incident edge weights at `i` (weighted degree).
    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.neighbors(i).iter().map(|&(_, w)| w).sum()
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Mean number of incident edges per vertex, `2m / n`.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    /// Fraction of vertex pairs that are edges, `2m / (n (n - 1))`.
    /// Defined as 0 for a single-vertex graph.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / (self.n as f64 * (self.n as f64 - 1.0))
        }
    }

    /// Cut value of a 0/1 side assignment. `bits.len()` must equal the
    /// vertex count; this is a caller contract, not an input condition.
    pub fn cut_value(&self, bits: &[u8]) -> f64 {
        assert_eq!(
            bits.len(),
            self.n,
            "assignment length {} does not match vertex count {}",
            bits.len(),
            self.n
        );
        self.edges
            .iter()
            .filter(|e| bits[e.u] != bits[e.v])
            .map(|e| e.w)
            .sum()
    }
}

/// A side assignment together with its cut value, kept consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct CutAssignment {
    bits: Vec<u8>,
    objective: f64,
}

impl CutAssignment {
    /// Wrap an assignment, computing its cut value. Bits must be 0 or 1 and
    /// match the vertex count.
    pub fn new(graph: &Graph, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != graph.num_nodes() {
            return Err(Error::InvalidInstance(format!(
                "assignment has {} entries for {} vertices",
                bits.len(),
                graph.num_nodes()
            )));
        }
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidInstance(format!(
                "assignment entry {} is {}, expected 0 or 1",
                i, bits[i]
            )));
        }
        let objective = graph.cut_value(&bits);
        Ok(CutAssignment { bits, objective })
    }

    /// The side of each vertex, 0 or 1.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Cached cut value; equals `graph.cut_value(self.bits())` up to the
    /// rounding drift of incremental updates.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Consume into the raw bit vector.
    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    /// Re-anchor the cached objective to an equivalent externally computed
    /// value (used after merges to keep comparisons on one arithmetic path).
    pub(crate) fn set_objective(&mut self, objective: f64) {
        debug_assert!(objective.is_finite());
        self.objective = objective;
    }
}

/// Per-vertex flip gains: `gain(i)` is the cut value change from flipping
/// vertex `i` alone.
///
/// An edge to a same-side neighbor contributes `+w` (flipping would cut it),
/// an edge to an opposite-side neighbor contributes `-w` (flipping would
/// uncut it).
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    gains: Vec<f64>,
}

impl GainTable {
    /// Compute all gains from scratch in O(n + m).
    pub fn compute(graph: &Graph, x: &CutAssignment) -> Self {
        let bits = x.bits();
        let mut gains = vec![0.0; graph.num_nodes()];
        for e in graph.edges() {
            if bits[e.u] == bits[e.v] {
                gains[e.u] += e.w;
                gains[e.v] += e.w;
            } else {
                gains[e.u] -= e.w;
                gains[e.v] -= e.w;
            }
        }
        GainTable { gains }
    }

    pub fn gain(&self, i: usize) -> f64 {
        self.gains[i]
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// Flip vertex `i`, updating the assignment's bits and objective and the
/// gain table, in O(deg(i)).
///
/// The flipped vertex's gain negates (flipping back undoes the move). Each
/// neighbor `j` gains `+2w` if the flip made it agree with `i` and `-2w` if
/// it made them disagree.
pub fn apply_flip(graph: &Graph, x: &mut CutAssignment, gains: &mut GainTable, i: usize) {
    debug_assert!(i < graph.num_nodes());
    x.objective += gains.gains[i];
    x.bits[i] ^= 1;
    gains.gains[i] = -gains.gains[i];
    let side = x.bits[i];
    for &(j, w) in graph.neighbors(i) {
        if x.bits[j] == side {
            gains.gains[j] += 2.0 * w;
        } else {
            gains.gains[j] -= 2.0 * w;
        }
    }
}
