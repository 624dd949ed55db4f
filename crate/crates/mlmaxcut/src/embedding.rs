//! Distance embeddings on the unit d-sphere and nearest-neighbor queries.
//!
//! Each node gets a position p_i on the unit sphere chosen to push connected
//! nodes apart: the embedding (locally) maximizes Σ_{ij∈E} w_ij ‖p_i − p_j‖₂.
//! Nodes an optimal cut separates tend to end up far apart, so proximity in
//! the embedding is the coarsening signal: nearest neighbors are *least*
//! entangled with each other in the cut sense and safe to merge.
//!
//! The relaxation runs Gauss–Seidel sweeps in seeded random order; one sweep
//! moves each node once by a degree-normalized repulsion step
//!
//! ```text
//!     p_i ← normalize( p_i + η · Σ_{j∈N(i)} w_ij (p_i − p_j) / max(‖p_i − p_j‖, ε) ),
//!     η = 1 / Σ_{j∈N(i)} w_ij,
//! ```
//!
//! and keeps the move only if the node's local objective term does not
//! decrease, which makes the global objective monotone across sweeps.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kdtree::KdTree;

/// Distance below which two positions count as coincident and the repulsion
/// direction is undefined.
const COINCIDENT_EPS: f64 = 1e-12;

/// Parameters of the sphere relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingParams {
    /// Embedding dimension d ≥ 1.
    pub dim: usize,
    /// Maximum number of Gauss–Seidel sweeps.
    pub sweeps: usize,
    /// Stop early when the mean per-node displacement of a sweep drops
    /// below this.
    pub tolerance: f64,
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        EmbeddingParams { dim: 3, sweeps: 30, tolerance: 1e-4 }
    }
}

/// Node positions on the unit d-sphere.
///
/// Invariants: every row has unit Euclidean norm and contains only finite
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// Row-major `n × dim` positions.
    positions: Vec<f64>,
    dim: usize,
    n: usize,
    /// Sweeps actually executed before convergence or the sweep cap.
    iterations_run: usize,
}

impl Embedding {
    /// Wrap explicit positions (row-major, `n × dim`), normalizing each row
    /// to the unit sphere. Zero or non-finite rows are rejected.
    pub fn from_positions(dim: usize, mut positions: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be ≥ 1".into()));
        }
        if positions.len() % dim != 0 {
            return Err(Error::InvalidConfig(format!(
                "{} coordinates do not form rows of dimension {dim}",
                positions.len()
            )));
        }
        let n = positions.len() / dim;
        for i in 0..n {
            let row = &mut positions[i * dim..(i + 1) * dim];
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("position {i} is not finite")));
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < COINCIDENT_EPS {
                return Err(Error::InvalidConfig(format!(
                    "position {i} has zero norm and cannot be projected to the sphere"
                )));
            }
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
        Ok(Embedding { positions, dim, n, iterations_run: 0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Position row of node `i`.
    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    /// All positions, row-major.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn iterations_run(&self) -> usize {
        self.iterations_run
    }

    /// Euclidean distance between the positions of nodes `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.position(i)
            .iter()
            .zip(self.position(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Draw a uniformly random direction on the unit sphere (by rejection).
fn random_unit(rng: &mut ChaCha8Rng, dim: usize, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
            norm2 += *v * *v;
        }
        // Reject near-zero draws (direction undefined) and, for dim ≥ 2,
        // draws outside the unit ball (keeps the direction uniform).
        if norm2 >= 1e-6 && (dim == 1 || norm2 <= 1.0) {
            let norm = norm2.sqrt();
            for v in out.iter_mut() {
                *v /= norm;
            }
            return;
        }
    }
}

/// Compute the sphere embedding of `g` by projected repulsion sweeps.
///
/// Positions start uniformly random in [−1,1]^d projected to the sphere.
/// Sweeps visit nodes in a fresh seeded random order; a node's move is kept
/// only if its local objective term Σ_j w_ij ‖p_i − p_j‖ does not decrease.
/// Coincident neighbors repel in a seeded random direction, and a raw update
/// that lands at the origin (possible when d = 1) is replaced by a seeded
/// random unit vector so the node can still escape. Isolated nodes keep
/// their initial position. Deterministic for a fixed (graph, params, seed).
pub fn embed(g: &Graph, params: &EmbeddingParams, seed: u64) -> Result<Embedding> {
    if params.dim == 0 {
        return Err(Error::InvalidConfig("embedding dimension must be ≥ 1".into()));
    }
    if params.sweeps == 0 {
        return Err(Error::InvalidConfig("embedding sweep count must be ≥ 1".into()));
    }
    let n = g.num_nodes();
    let dim = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut positions = vec![0.0; n * dim];
    for i in 0..n {
        random_unit(&mut rng, dim, &mut positions[i * dim..(i + 1) * dim]);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut step = vec![0.0; dim];
    let mut cand = vec![0.0; dim];
    let mut dir = vec![0.0; dim];
    let mut iterations_run = 0;

    for _ in 0..params.sweeps {
        order.shuffle(&mut rng);
        let mut total_displacement = 0.0;
        for &i in &order {
            let neighbors = g.neighbors(i);
            if neighbors.is_empty() {
                continue;
            }
            let weight_sum: f64 = neighbors.iter().map(|&(_, w)| w).sum();
            let eta = 1.0 / weight_sum;

            step.iter_mut().for_each(|v| *v = 0.0);
            let mut old_local = 0.0;
            for &(j, w) in neighbors {
                let pj = &positions[j * dim..(j + 1) * dim];
                let pi = &positions[i * dim..(i + 1) * dim];
                let mut norm2 = 0.0;
                for a in 0..dim {
                    let d = pi[a] - pj[a];
                    dir[a] = d;
                    norm2 += d * d;
                }
                let norm = norm2.sqrt();
                old_local += w * norm;
                if norm < COINCIDENT_EPS {
                    random_unit(&mut rng, dim, &mut dir);
                    for a in 0..dim {
                        step[a] += w * dir[a];
                    }
                } else {
                    for a in 0..dim {
                        step[a] += w * dir[a] / norm;
                    }
                }
            }

            {
                let pi = &positions[i * dim..(i + 1) * dim];
                for a in 0..dim {
                    cand[a] = pi[a] + eta * step[a];
                }
            }
            let cnorm = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
            if cnorm < COINCIDENT_EPS {
                random_unit(&mut rng, dim, &mut cand);
            } else {
                cand.iter_mut().for_each(|v| *v /= cnorm);
            }

            let mut new_local = 0.0;
            for &(j, w) in neighbors {
                let pj = &positions[j * dim..(j + 1) * dim];
                let d2: f64 = cand
                    .iter()
                    .zip(pj)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                new_local += w * d2.sqrt();
            }

            if new_local >= old_local {
                let pi = &mut positions[i * dim..(i + 1) * dim];
                let mut disp2 = 0.0;
                for a in 0..dim {
                    let d = cand[a] - pi[a];
                    disp2 += d * d;
                    pi[a] = cand[a];
                }
                total_displacement += disp2.sqrt();
            }
        }
        iterations_run += 1;
        if total_displacement / (n as f64) < params.tolerance {
            break;
        }
    }

    Ok(Embedding { positions, dim, n, iterations_run })
}

/// Total embedded edge length Σ_{ij∈E} w_ij ‖p_i − p_j‖₂, each edge once.
pub fn embedding_objective(g: &Graph, e: &Embedding) -> f64 {
    assert_eq!(e.num_nodes(), g.num_nodes(), "embedding does not match graph");
    g.edges()
        .iter()
        .map(|edge| edge.w * e.distance(edge.u, edge.v))
        .sum()
}

/// Exact nearest-neighbor index over an embedding's positions.
///
/// Immutable after build; queries are deterministic with equidistant
/// candidates ranked by node id.
#[derive(Debug, Clone)]
pub struct NearestIndex {
    tree: KdTree,
    dim: usize,
}

impl NearestIndex {
    pub fn build(e: &Embedding) -> Self {
        NearestIndex { tree: KdTree::build(e.dim(), e.positions()), dim: e.dim() }
    }

    /// The node nearest to `i` among nodes not in `used` and different from
    /// `i`; ties break toward the smallest node id. Queries the k-d tree
    /// with doubling k until an allowed node appears.
    pub fn nearest_unpaired(&self, e: &Embedding, i: usize, used: &[bool]) -> Result<usize> {
        assert_eq!(self.dim, e.dim(), "index does not match embedding");
        assert_eq!(used.len(), self.tree.len(), "used mask does not match index");
        let n = self.tree.len();
        let query = e.position(i);
        let mut k = 8.min(n);
        loop {
            for (_, id) in self.tree.k_nearest(query, k) {
                if id != i && !used[id] {
                    return Ok(id);
                }
            }
            if k >= n {
                return Err(Error::NoCandidate);
            }
            k = (k * 2).min(n);
        }
    }
}

/// One-shot form of [`NearestIndex::nearest_unpaired`]; builds a throwaway
/// index, so prefer the index type inside loops.
pub fn nearest_unpaired(e: &Embedding, i: usize, used: &[bool]) -> Result<usize> {
    NearestIndex::build(e).nearest_unpaired(e, i, used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn params(dim: usize, sweeps: usize) -> EmbeddingParams {
        // Zero tolerance forces every sweep to run, which keeps prefix runs
        // comparable in the monotonicity test.
        EmbeddingParams { dim, sweeps, tolerance: 0.0 }
    }

    #[test]
    fn single_edge_one_dimension_separates() {
        let g = Graph::from_edges(2, [Edge::new(0, 1, 1.0)]).unwrap();
        for seed in 0..10 {
            let e = embed(&g, &params(1, 30), seed).unwrap();
            let a = e.position(0)[0];
            let b = e.position(1)[0];
            assert_eq!(a.abs(), 1.0);
            assert_eq!(b.abs(), 1.0);
            assert_eq!(a, -b, "seed {seed} failed to separate endpoints");
        }
    }

    #[test]
    fn rows_are_unit_norm_and_finite() {
        let g = Graph::from_edges(
            6,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 2.0),
                Edge::new(2, 3, 0.5),
                Edge::new(3, 4, 1.0),
                Edge::new(4, 5, 1.0),
                Edge::new(5, 0, 3.0),
            ],
        )
        .unwrap();
        let e = embed(&g, &EmbeddingParams::default(), 9).unwrap();
        for i in 0..6 {
            let norm: f64 = e.position(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(e.position(i).iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn objective_is_monotone_across_sweeps() {
        let g = Graph::from_edges(
            4,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(2, 3, 1.0),
                Edge::new(3, 0, 1.0),
            ],
        )
        .unwrap();
        // Determinism makes a shorter run a prefix of a longer one, so the
        // per-sweep trajectory is observable through independent calls.
        let mut last = f64::NEG_INFINITY;
        for sweeps in 1..=40 {
            let e = embed(&g, &params(2, sweeps), 5).unwrap();
            let obj = embedding_objective(&g, &e);
            assert!(
                obj >= last - 1e-9,
                "objective decreased at sweep {sweeps}: {last} -> {obj}"
            );
            last = obj;
        }
    }

    #[test]
    fn zero_edge_graph_keeps_initial_positions() {
        let g = Graph::from_edges(3, Vec::<Edge>::new()).unwrap();
        let p = EmbeddingParams { sweeps: 10, ..EmbeddingParams::default() };
        let e = embed(&g, &p, 11).unwrap();
        // Positions are the normalized initial draws; sweep 1 moves nothing
        // and the run converges immediately.
        assert_eq!(e.iterations_run(), 1);
        assert_eq!(embedding_objective(&g, &e), 0.0);
    }

    #[test]
    fn determinism_bit_identical() {
        let g = Graph::from_edges(
            5,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(2, 3, 1.5),
                Edge::new(3, 4, 1.0),
            ],
        )
        .unwrap();
        let a = embed(&g, &EmbeddingParams::default(), 123).unwrap();
        let b = embed(&g, &EmbeddingParams::default(), 123).unwrap();
        assert_eq!(a, b);
        let c = embed(&g, &EmbeddingParams::default(), 124).unwrap();
        assert_ne!(a.positions(), c.positions());
    }

    #[test]
    fn objective_values_on_known_layouts() {
        // Single edge of weight 2 at ±1 in one dimension.
        let g = Graph::from_edges(2, [Edge::new(0, 1, 2.0)]).unwrap();
        let e = Embedding::from_positions(1, vec![1.0, -1.0]).unwrap();
        assert_eq!(embedding_objective(&g, &e), 4.0);

        // Unit triangle at equilateral positions on the 2-sphere equator:
        // chord between unit vectors 120° apart is √3.
        let g = Graph::from_edges(
            3,
            [Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(0, 2, 1.0)],
        )
        .unwrap();
        let r3 = 3.0f64.sqrt();
        let positions = vec![
            1.0, 0.0, 0.0, //
            -0.5, r3 / 2.0, 0.0, //
            -0.5, -r3 / 2.0, 0.0,
        ];
        let e = Embedding::from_positions(3, positions).unwrap();
        assert!((embedding_objective(&g, &e) - 3.0 * r3).abs() < 1e-12);
    }

    #[test]
    fn nearest_unpaired_respects_used_set_and_ties() {
        // Four points on the unit circle at 0°, 45°, 135°, and 315°: nodes
        // 1 and 3 are equidistant from node 0, so the first lookup also
        // exercises the smaller-id tie-break.
        let quarter = std::f64::consts::FRAC_PI_4;
        let angles = [0.0, quarter, 3.0 * quarter, 7.0 * quarter];
        let positions: Vec<f64> =
            angles.iter().flat_map(|a| [a.cos(), a.sin()]).collect();
        let e = Embedding::from_positions(2, positions).unwrap();
        let idx = NearestIndex::build(&e);
        assert_eq!(idx.nearest_unpaired(&e, 0, &[false; 4]).unwrap(), 1);
        assert_eq!(
            idx.nearest_unpaired(&e, 0, &[false, true, false, false]).unwrap(),
            3
        );
        assert_eq!(
            idx.nearest_unpaired(&e, 0, &[false, true, false, true]).unwrap(),
            2
        );
        assert!(matches!(
            idx.nearest_unpaired(&e, 0, &[false, true, true, true]),
            Err(Error::NoCandidate)
        ));

        // Coincident points: the other node wins at distance zero; among
        // equidistant candidates the smallest id wins.
        let e = Embedding::from_positions(2, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let idx = NearestIndex::build(&e);
        assert_eq!(idx.nearest_unpaired(&e, 1, &[false; 3]).unwrap(), 0);
        assert_eq!(idx.nearest_unpaired(&e, 0, &[false; 3]).unwrap(), 1);
    }

    #[test]
    fn nearest_unpaired_matches_brute_force() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 500;
        let dim = 3;
        let mut positions = vec![0.0; n * dim];
        for i in 0..n {
            random_unit(&mut rng, dim, &mut positions[i * dim..(i + 1) * dim]);
        }
        let e = Embedding::from_positions(dim, positions).unwrap();
        let idx = NearestIndex::build(&e);
        let mut used = vec![false; n];
        for _ in 0..n {
            used[rng.gen_range(0..n)] = true;
        }
        for i in (0..n).step_by(17) {
            let got = idx.nearest_unpaired(&e, i, &used);
            let want = (0..n)
                .filter(|&j| j != i && !used[j])
                .map(|j| (e.distance(i, j), j))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            match want {
                Some((_, j)) => assert_eq!(got.unwrap(), j, "query {i}"),
                None => assert!(matches!(got, Err(Error::NoCandidate))),
            }
        }
    }
}
