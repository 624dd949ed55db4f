//! Pair-matching, contraction, edge sparsification, and the multilevel
//! hierarchy.
//!
//! Coarsening halves the graph: nodes are paired with their nearest
//! embedding neighbor, each pair merges into one coarse node, and coarse
//! edge weights accumulate all fine weights between the merged groups
//! (the weighted adjacency product PᵀAP). Intra-pair weight lands on the
//! diagonal, can never be cut again, and is dropped but accounted for —
//! which is exactly what makes coarse cut values equal their interpolated
//! fine cut values.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::embedding::{embed, Embedding, EmbeddingParams, NearestIndex};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::seeding::{derive_seed, stream};

/// A one-level surjection from fine nodes onto coarse nodes.
///
/// Every coarse node has exactly two fine preimages, except at most one
/// singleton (the leftover node of an odd level), so coarse level sizes are
/// always ⌈n/2⌉.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionMap {
    fine_to_coarse: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    singleton: Option<usize>,
}

impl ContractionMap {
    /// Build from an explicit pairing. The pairs plus the optional singleton
    /// must partition `0..n_f`; coarse ids follow pair order, with the
    /// singleton last.
    pub fn new(
        n_f: usize,
        pairs: Vec<(usize, usize)>,
        singleton: Option<usize>,
    ) -> Result<Self> {
        let expected = 2 * pairs.len() + usize::from(singleton.is_some());
        if expected != n_f {
            return Err(Error::InvalidInstance(format!(
                "pairing covers {expected} nodes, graph has {n_f}"
            )));
        }
        let mut fine_to_coarse = vec![usize::MAX; n_f];
        let mut assign = |node: usize, coarse: usize| -> Result<()> {
            let slot = fine_to_coarse
                .get_mut(node)
                .ok_or_else(|| {
                    Error::InvalidInstance(format!("pairing names node {node} out of range"))
                })?;
            if *slot != usize::MAX {
                return Err(Error::InvalidInstance(format!(
                    "node {node} appears twice in the pairing"
                )));
            }
            *slot = coarse;
            Ok(())
        };
        for (c, &(i, j)) in pairs.iter().enumerate() {
            if i == j {
                return Err(Error::InvalidInstance(format!(
                    "node {i} is paired with itself"
                )));
            }
            assign(i, c)?;
            assign(j, c)?;
        }
        if let Some(s) = singleton {
            assign(s, pairs.len())?;
        }
        Ok(ContractionMap { fine_to_coarse, pairs, singleton })
    }

    /// The coarse id of each fine node.
    pub fn fine_to_coarse(&self) -> &[usize] {
        &self.fine_to_coarse
    }

    /// Merged (i, j) fine pairs, in coarse-id order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The odd leftover node, if any; always the last coarse id.
    pub fn singleton(&self) -> Option<usize> {
        self.singleton
    }

    pub fn num_fine(&self) -> usize {
        self.fine_to_coarse.len()
    }

    pub fn num_coarse(&self) -> usize {
        self.pairs.len() + usize::from(self.singleton.is_some())
    }
}

/// Pair each node with its nearest unpaired embedding neighbor.
///
/// Nodes are visited in a seeded random permutation; a node already claimed
/// as someone's partner is skipped. With odd `n` the last unclaimed node
/// becomes the singleton.
pub fn match_pairs(g: &Graph, e: &Embedding, seed: u64) -> ContractionMap {
    assert_eq!(e.num_nodes(), g.num_nodes(), "embedding does not match graph");
    let mut order: Vec<usize> = (0..g.num_nodes()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    match_pairs_in_order(g, e, &order)
}

fn match_pairs_in_order(g: &Graph, e: &Embedding, order: &[usize]) -> ContractionMap {
    let n = g.num_nodes();
    let index = NearestIndex::build(e);
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    let mut singleton = None;
    for &i in order {
        if used[i] {
            continue;
        }
        used[i] = true;
        match index.nearest_unpaired(e, i, &used) {
            Ok(j) => {
                used[j] = true;
                pairs.push((i, j));
            }
            // No partner left: i is the odd leftover.
            Err(Error::NoCandidate) => singleton = Some(i),
            Err(_) => unreachable!("nearest_unpaired only fails with NoCandidate"),
        }
    }
    ContractionMap::new(n, pairs, singleton)
        .expect("matching visits every node exactly once")
}

/// Contract a graph along a pairing: coarse adjacency is PᵀAP with the
/// diagonal removed.
///
/// Returns the coarse graph and the dropped diagonal mass — the total weight
/// of intra-pair fine edges, each counted once. Parallel fine edges landing
/// on the same coarse pair accumulate by weight summation.
pub fn contract(g_f: &Graph, m: &ContractionMap) -> (Graph, f64) {
    assert_eq!(m.num_fine(), g_f.num_nodes(), "map does not match graph");
    let f = m.fine_to_coarse();
    let mut lost = 0.0;
    let mut coarse_edges = Vec::with_capacity(g_f.num_edges());
    for e in g_f.edges() {
        let (cu, cv) = (f[e.u], f[e.v]);
        if cu == cv {
            lost += e.w;
        } else {
            coarse_edges.push(Edge::new(cu, cv, e.w));
        }
    }
    let g_c = Graph::from_edges(m.num_coarse(), coarse_edges)
        .expect("contraction of a valid graph is a valid graph");
    (g_c, lost)
}

/// Move the weight of the shortest edges onto longer neighboring edges.
///
/// Edge length is `w·‖p_u − p_v‖₂`, computed once up front. The
/// `⌊fraction·|E|⌋` shortest edges are processed in ascending length order;
/// each one's current weight moves to the adjacent surviving edge with the
/// greatest embedding length `‖p_u − p_v‖₂` (ties to the smallest edge id),
/// and the edge is removed. Weight received earlier travels onward if the
/// recipient is itself removed later. An edge with no surviving adjacent
/// edge stays, and its slot in the removal quota is not refilled. Total
/// graph weight is preserved.
pub fn sparsify(g: &Graph, e: &Embedding, fraction: f64) -> Graph {
    assert!(
        (0.0..1.0).contains(&fraction),
        "sparsify fraction must lie in [0, 1)"
    );
    assert_eq!(e.num_nodes(), g.num_nodes(), "embedding does not match graph");
    let m = g.num_edges();
    let target = (fraction * m as f64).floor() as usize;
    if target == 0 {
        return g.clone();
    }

    let edges = g.edges();
    let geo_len: Vec<f64> = edges.iter().map(|ed| e.distance(ed.u, ed.v)).collect();
    let mut removal_order: Vec<usize> = (0..m).collect();
    removal_order.sort_by(|&a, &b| {
        (edges[a].w * geo_len[a])
            .total_cmp(&(edges[b].w * geo_len[b]))
            .then(a.cmp(&b))
    });
    removal_order.truncate(target);

    // Incidence lists of edge ids per node.
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.num_nodes()];
    for (k, ed) in edges.iter().enumerate() {
        incident[ed.u].push(k);
        incident[ed.v].push(k);
    }

    let mut weight: Vec<f64> = edges.iter().map(|ed| ed.w).collect();
    let mut alive = vec![true; m];
    for &k in &removal_order {
        let ed = edges[k];
        let recipient = incident[ed.u]
            .iter()
            .chain(&incident[ed.v])
            .copied()
            .filter(|&j| j != k && alive[j])
            .max_by(|&a, &b| geo_len[a].total_cmp(&geo_len[b]).then(b.cmp(&a)));
        if let Some(j) = recipient {
            weight[j] += weight[k];
            alive[k] = false;
        }
    }

    let kept = (0..m)
        .filter(|&k| alive[k])
        .map(|k| Edge::new(edges[k].u, edges[k].v, weight[k]));
    Graph::from_edges(g.num_nodes(), kept)
        .expect("sparsification of a valid graph is a valid graph")
}

/// The full coarsening ladder: graphs `G_0..G_L` (finest first), the maps
/// between consecutive levels, and the diagonal weight dropped per
/// contraction.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub levels: Vec<Graph>,
    pub maps: Vec<ContractionMap>,
    pub lost_weight: Vec<f64>,
}

impl Hierarchy {
    /// The coarsest graph.
    pub fn coarsest(&self) -> &Graph {
        self.levels.last().expect("hierarchy always has a level")
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }
}

/// Build the hierarchy by repeated embed → (sparsify) → match → contract,
/// stopping once the current level has fewer than `k` nodes.
///
/// A graph already below `k` yields a single-level hierarchy. Each level's
/// stored graph is the contraction output; sparsification only shapes the
/// next contraction and is never what refinement later sees. Deterministic
/// for fixed inputs: every level derives its own embed/match seeds.
pub fn build_hierarchy(
    g: &Graph,
    k: usize,
    embed_params: &EmbeddingParams,
    sparsify_fraction: f64,
    seed: u64,
) -> Result<Hierarchy> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "subproblem size must be at least 2, got {k}"
        )));
    }
    if !(0.0..1.0).contains(&sparsify_fraction) {
        return Err(Error::InvalidConfig(format!(
            "sparsify fraction must lie in [0, 1), got {sparsify_fraction}"
        )));
    }
    let mut levels = vec![g.clone()];
    let mut maps = Vec::new();
    let mut lost_weight = Vec::new();
    while levels.last().unwrap().num_nodes() >= k {
        let level = maps.len() as u64;
        let current = levels.last().unwrap();
        let e = embed(current, embed_params, derive_seed(seed, &[stream::EMBED, level]))?;
        let working = if sparsify_fraction > 0.0 {
            sparsify(current, &e, sparsify_fraction)
        } else {
            current.clone()
        };
        let map = match_pairs(&working, &e, derive_seed(seed, &[stream::MATCH, level]));
        let (coarse, lost) = contract(&working, &map);
        levels.push(coarse);
        maps.push(map);
        lost_weight.push(lost);
    }
    Ok(Hierarchy { levels, maps, lost_weight })
}
