//! Exact k-nearest-neighbor queries via a balanced k-d tree.
//!
//! Runtime-dimensioned, deterministic: results are ordered by
//! (squared distance, point id), so equidistant points always rank by id.

/// Balanced k-d tree over a fixed point set.
///
/// The tree is an index permutation arranged in median order: the root of a
/// segment is its middle element, split on axis `depth % dim`. Ties on the
/// split coordinate break by point id during construction, making the
/// layout deterministic.
#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    dim: usize,
    /// Row-major point coordinates, `n * dim` values.
    coords: Vec<f64>,
    /// Point ids in median-order tree layout.
    perm: Vec<usize>,
}

/// A candidate ranked ascending by (squared distance, id); the max-heap kept
/// during search therefore surfaces the *worst* retained candidate at the top.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    d2: f64,
    id: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d2
            .total_cmp(&other.d2)
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl KdTree {
    /// Build from `n * dim` row-major coordinates. Point ids are row indices.
    pub fn build(dim: usize, coords: &[f64]) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert_eq!(coords.len() % dim, 0, "coordinate slice is not n * dim");
        let n = coords.len() / dim;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut tree = KdTree { dim, coords: coords.to_vec(), perm: Vec::new() };
        build_segment(&mut perm, &tree.coords, dim, 0);
        tree.perm = perm;
        tree
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    fn coord(&self, id: usize, axis: usize) -> f64 {
        self.coords[id * self.dim + axis]
    }

    fn dist2(&self, id: usize, query: &[f64]) -> f64 {
        let row = &self.coords[id * self.dim..(id + 1) * self.dim];
        row.iter()
            .zip(query)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// The `k` points nearest to `query`, ascending by (squared distance,
    /// id). Returns fewer than `k` entries only when the tree is smaller.
    pub fn k_nearest(&self, query: &[f64], k: usize) -> Vec<(f64, usize)> {
        assert_eq!(query.len(), self.dim, "query dimension mismatch");
        if k == 0 || self.perm.is_empty() {
            return Vec::new();
        }
        let mut heap: std::collections::BinaryHeap<Candidate> =
            std::collections::BinaryHeap::with_capacity(k + 1);
        self.search(0, self.perm.len(), 0, query, k, &mut heap);
        let mut out: Vec<Candidate> = heap.into_vec();
        out.sort();
        out.into_iter().map(|c| (c.d2, c.id)).collect()
    }

    fn search(
        &self,
        lo: usize,
        hi: usize,
        depth: usize,
        query: &[f64],
        k: usize,
        heap: &mut std::collections::BinaryHeap<Candidate>,
    ) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let id = self.perm[mid];
        let cand = Candidate { d2: self.dist2(id, query), id };
        if heap.len() < k {
            heap.push(cand);
        } else if cand < *heap.peek().unwrap() {
            heap.push(cand);
            heap.pop();
        }

        let axis = depth % self.dim;
        let diff = query[axis] - self.coord(id, axis);
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, depth + 1, query, k, heap);
        // The far half-space can still hold a better candidate unless the
        // splitting plane is strictly farther than the worst kept candidate;
        // at equal distance an id tie-break could prefer the far side.
        let worst = heap.peek().map(|c| c.d2).unwrap_or(f64::INFINITY);
        if heap.len() < k || diff * diff <= worst {
            self.search(far.0, far.1, depth + 1, query, k, heap);
        }
    }
}

fn build_segment(perm: &mut [usize], coords: &[f64], dim: usize, depth: usize) {
    if perm.len() <= 1 {
        return;
    }
    let axis = depth % dim;
    let mid = perm.len() / 2;
    perm.select_nth_unstable_by(mid, |&a, &b| {
        coords[a * dim + axis]
            .total_cmp(&coords[b * dim + axis])
            .then(a.cmp(&b))
    });
    let (left, rest) = perm.split_at_mut(mid);
    build_segment(left, coords, dim, depth + 1);
    build_segment(&mut rest[1..], coords, dim, depth + 1);
}
