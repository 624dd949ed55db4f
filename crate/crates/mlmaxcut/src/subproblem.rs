//! Pinned subproblems: a K-variable window into the full cut.
//!
//! Refinement re-optimizes K chosen nodes while the rest of the graph stays
//! put. All unchosen nodes collapse into two implicit super-nodes, one per
//! part, pinned to their parts. Because they are pinned they never appear as
//! variables: each chosen node feels them only through two linear biases
//! (its total edge weight into each fixed part), and the fixed↔fixed cut
//! weight rides along as a constant. For any assignment `y` of the free
//! nodes,
//!
//! ```text
//!     objective(y) = constant
//!                  + Σ_i  y_i·bias0[i] + (1−y_i)·bias1[i]
//!                  + Σ_{ij internal} w_ij·[y_i ≠ y_j]
//! ```
//!
//! equals the full-graph cut value of the merged assignment, so subproblem
//! solvers optimize the true global objective.

use crate::graph::{apply_flip, CutAssignment, Edge, GainTable, Graph};

/// A K-variable pinned subproblem. Variables are local indices `0..K`
/// mapping onto `free_nodes`; everything else is folded into biases and a
/// constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Subproblem {
    /// Global node ids of the free variables, in chosen order.
    free_nodes: Vec<usize>,
    /// Edges among free nodes, endpoints reindexed to local `0..K`.
    internal_edges: Vec<Edge>,
    /// Per-variable adjacency over `internal_edges`, local indices.
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Weight from each free node to fixed part-0 nodes (cut when y_i = 1).
    bias0: Vec<f64>,
    /// Weight from each free node to fixed part-1 nodes (cut when y_i = 0).
    bias1: Vec<f64>,
    /// Cut weight among fixed nodes; unaffected by any y.
    constant: f64,
}

impl Subproblem {
    /// Number of free variables K.
    pub fn num_vars(&self) -> usize {
        self.free_nodes.len()
    }

    /// Global node ids of the free variables.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free_nodes
    }

    /// Edges among free nodes in local indices.
    pub fn internal_edges(&self) -> &[Edge] {
        &self.internal_edges
    }

    /// Local-index neighbors of variable `i` with edge weights.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn bias0(&self) -> &[f64] {
        &self.bias0
    }

    pub fn bias1(&self) -> &[f64] {
        &self.bias1
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// A whole graph as a subproblem: every node free, no pins, no constant.
    /// This is how the coarsest level is handed to a solver.
    pub fn pin_free(g: &Graph) -> Subproblem {
        let x = CutAssignment::new(g, vec![0; g.num_nodes()])
            .expect("all-zero assignment is valid");
        let chosen: Vec<usize> = (0..g.num_nodes()).collect();
        build_subproblem(g, &x, &chosen)
    }
}

/// Build the pinned subproblem around `chosen` nodes given the current full
/// assignment. `chosen` must name distinct valid nodes, at least one.
pub fn build_subproblem(g: &Graph, x: &CutAssignment, chosen: &[usize]) -> Subproblem {
    let n = g.num_nodes();
    assert!(!chosen.is_empty(), "subproblem needs at least one free node");
    let k = chosen.len();
    let mut local = vec![usize::MAX; n];
    for (li, &gi) in chosen.iter().enumerate() {
        assert!(gi < n, "chosen node {gi} out of range");
        assert_eq!(local[gi], usize::MAX, "chosen node {gi} repeated");
        local[gi] = li;
    }

    let bits = x.bits();
    let mut internal_edges = Vec::new();
    let mut bias0 = vec![0.0; k];
    let mut bias1 = vec![0.0; k];
    let mut constant = 0.0;
    for e in g.edges() {
        let (lu, lv) = (local[e.u], local[e.v]);
        match (lu != usize::MAX, lv != usize::MAX) {
            (true, true) => internal_edges.push(Edge::new(lu, lv, e.w)),
            (true, false) => {
                if bits[e.v] == 0 {
                    bias0[lu] += e.w;
                } else {
                    bias1[lu] += e.w;
                }
            }
            (false, true) => {
                if bits[e.u] == 0 {
                    bias0[lv] += e.w;
                } else {
                    bias1[lv] += e.w;
                }
            }
            (false, false) => {
                if bits[e.u] != bits[e.v] {
                    constant += e.w;
                }
            }
        }
    }

    let mut adjacency = vec![Vec::new(); k];
    for e in &internal_edges {
        adjacency[e.u].push((e.v, e.w));
        adjacency[e.v].push((e.u, e.w));
    }
    for a in &mut adjacency {
        a.sort_by_key(|&(j, _)| j);
    }

    Subproblem { free_nodes: chosen.to_vec(), internal_edges, adjacency, bias0, bias1, constant }
}

/// The full-graph cut value of the merged assignment, computed from the
/// subproblem alone.
pub fn subproblem_objective(sp: &Subproblem, y: &[u8]) -> f64 {
    assert_eq!(y.len(), sp.num_vars(), "assignment length mismatch");
    let mut obj = sp.constant;
    for i in 0..y.len() {
        obj += if y[i] == 1 { sp.bias0[i] } else { sp.bias1[i] };
    }
    for e in &sp.internal_edges {
        if y[e.u] != y[e.v] {
            obj += e.w;
        }
    }
    obj
}

/// Per-variable flip gains of the subproblem objective at `y`.
///
/// Flipping `y_i` swaps which bias it pays and toggles its internal edges,
/// so `gain[i] = (other bias − current bias) + Σ_j ±w_ij` with the usual
/// same-side/opposite-side signs.
pub fn subproblem_gains(sp: &Subproblem, y: &[u8]) -> Vec<f64> {
    assert_eq!(y.len(), sp.num_vars(), "assignment length mismatch");
    let mut gains: Vec<f64> = (0..y.len())
        .map(|i| {
            if y[i] == 1 {
                sp.bias1[i] - sp.bias0[i]
            } else {
                sp.bias0[i] - sp.bias1[i]
            }
        })
        .collect();
    for e in &sp.internal_edges {
        if y[e.u] == y[e.v] {
            gains[e.u] += e.w;
            gains[e.v] += e.w;
        } else {
            gains[e.u] -= e.w;
            gains[e.v] -= e.w;
        }
    }
    gains
}

/// The current assignment restricted to the subproblem's free nodes — the
/// warm start every solver must at least match.
pub fn warm_start(sp: &Subproblem, x: &CutAssignment) -> Vec<u8> {
    sp.free_nodes.iter().map(|&gi| x.bits()[gi]).collect()
}

/// Write a solved subproblem back into the full assignment.
///
/// Differing bits are applied as individual flips so the gain table stays
/// valid for exactly the chosen nodes and their neighbors, then the cached
/// objective is re-anchored to `subproblem_objective(sp, y)` — the same
/// arithmetic solver results are compared with, keeping accept/reject
/// decisions and the stored objective consistent.
pub fn merge_solution(
    g: &Graph,
    x: &mut CutAssignment,
    gains: &mut GainTable,
    sp: &Subproblem,
    y: &[u8],
) {
    assert_eq!(y.len(), sp.num_vars(), "assignment length mismatch");
    for (li, &gi) in sp.free_nodes.iter().enumerate() {
        if x.bits()[gi] != y[li] {
            apply_flip(g, x, gains, gi);
        }
    }
    x.set_objective(subproblem_objective(sp, y));
}

/// Render the subproblem as QUBO text: maximize
/// `c + Σ a_i·y_i + Σ b_ij·y_i·y_j` over binary y.
///
/// Expanding `[y_i ≠ y_j] = y_i + y_j − 2·y_i·y_j` gives
/// `c = constant + Σ bias1`, `a_i = bias0[i] − bias1[i] + Σ_j w_ij`, and
/// `b_ij = −2·w_ij`. Lines are `c v`, `l i v`, and `q i j v` in deterministic
/// order, indices local.
pub fn to_qubo_text(sp: &Subproblem) -> String {
    use std::fmt::Write;
    let k = sp.num_vars();
    let mut linear: Vec<f64> = (0..k).map(|i| sp.bias0[i] - sp.bias1[i]).collect();
    let mut c = sp.constant;
    for b in &sp.bias1 {
        c += b;
    }
    for e in &sp.internal_edges {
        linear[e.u] += e.w;
        linear[e.v] += e.w;
    }
    let mut out = String::new();
    writeln!(out, "c {c}").unwrap();
    for (i, a) in linear.iter().enumerate() {
        writeln!(out, "l {i} {a}").unwrap();
    }
    for e in &sp.internal_edges {
        writeln!(out, "q {} {} {}", e.u, e.v, -2.0 * e.w).unwrap();
    }
    out
}
