//! Shared helpers for integration tests: seeded graph generators and
//! independently coded oracles (exhaustive cut search, dense matrix
//! contraction, dense-matrix circuit evolution). The oracles deliberately
//! use naive formulations so they share no code paths with the library.

#![allow(dead_code)]

use std::collections::HashSet;

use mlmaxcut::graph::Graph;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph where each pair is an edge with probability `density` and
/// integer weights drawn uniformly from `w_min..=w_max`. May be edgeless.
pub fn random_int_graph(
    n: usize,
    density: f64,
    w_min: i64,
    w_max: i64,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < density {
                edges.push((u, v, rng.gen_range(w_min..=w_max) as f64));
            }
        }
    }
    edges
}

/// Erdős–Rényi-style G(n, M): exactly `m` distinct edges sampled uniformly,
/// all with unit weight.
pub fn er_unit_edges(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, f64)> {
    assert!(m <= n * (n - 1) / 2);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push((key.0, key.1, 1.0));
        }
    }
    edges.sort_unstable_by_key(|e| (e.0, e.1));
    edges
}

pub fn graph_from(n: usize, edges: &[(usize, usize, f64)]) -> Graph {
    Graph::from_edges(n, edges.iter().copied()).unwrap()
}

/// Cut value of `side` computed directly from the edge list.
pub fn cut_of(edges: &[(usize, usize, f64)], side: &[u8]) -> f64 {
    edges
        .iter()
        .filter(|&&(u, v, _)| side[u] != side[v])
        .map(|&(_, _, w)| w)
        .sum()
}

/// Exhaustive maximum cut over all 2^n assignments; returns the optimum
/// value and one optimal assignment (as packed bits, bit i = side of node i).
/// Recomputes every candidate from the edge list — no incremental tricks.
pub fn brute_force_max_cut(n: usize, edges: &[(usize, usize, f64)]) -> (f64, u64) {
    assert!(n <= 24, "exhaustive search kept to small instances");
    let mut best = f64::NEG_INFINITY;
    let mut best_z = 0u64;
    for z in 0u64..(1u64 << n) {
        let mut val = 0.0;
        for &(u, v, w) in edges {
            if ((z >> u) ^ (z >> v)) & 1 == 1 {
                val += w;
            }
        }
        if val > best {
            best = val;
            best_z = z;
        }
    }
    (best, best_z)
}

/// Dense PᵀAP oracle: builds the full adjacency matrix A and the 0/1
/// membership matrix P (`f2c[i]` = coarse index of fine node `i`), multiplies
/// them out literally, and returns the coarse matrix. The caller reads
/// off-diagonal entries as coarse edge weights and half the diagonal trace
/// as the weight lost to self-loops.
pub fn dense_ptap(
    n: usize,
    edges: &[(usize, usize, f64)],
    f2c: &[usize],
    nc: usize,
) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        a[u][v] += w;
        a[v][u] += w;
    }
    let mut p = vec![vec![0.0; nc]; n];
    for (i, &c) in f2c.iter().enumerate() {
        p[i][c] = 1.0;
    }
    // ap = A · P, then result = Pᵀ · ap.
    let mut ap = vec![vec![0.0; nc]; n];
    for i in 0..n {
        for j in 0..n {
            if a[i][j] != 0.0 {
                for c in 0..nc {
                    ap[i][c] += a[i][j] * p[j][c];
                }
            }
        }
    }
    let mut coarse = vec![vec![0.0; nc]; nc];
    for c1 in 0..nc {
        for i in 0..n {
            if p[i][c1] != 0.0 {
                for c2 in 0..nc {
                    coarse[c1][c2] += p[i][c1] * ap[i][c2];
                }
            }
        }
    }
    coarse
}

// ---------------------------------------------------------------------------
// Dense-matrix circuit oracle
// ---------------------------------------------------------------------------

type Mat = Vec<Vec<Complex64>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik != Complex64::new(0.0, 0.0) {
                for j in 0..d {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
    }
    out
}

fn mat_vec(a: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn identity(d: usize) -> Mat {
    let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn frobenius_norm(a: &Mat) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Matrix exponential by Taylor series with scaling and squaring — accurate
/// to far below 1e-12 for the small matrices used here.
fn mat_exp(a: &Mat) -> Mat {
    let d = a.len();
    let norm = frobenius_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(1.0 / (1u64 << squarings) as f64, 0.0);
    let scaled: Mat = a
        .iter()
        .map(|row| row.iter().map(|&x| x * scale).collect())
        .collect();
    let mut result = identity(d);
    let mut term = identity(d);
    for k in 1..=30 {
        term = mat_mul(&term, &scaled);
        let inv_k = Complex64::new(1.0 / k as f64, 0.0);
        for i in 0..d {
            for j in 0..d {
                term[i][j] *= inv_k;
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// Evolves the uniform superposition through `p` alternating layers using
/// only dense matrices: a diagonal phase matrix exp(−iγ·diag(values)) and the
/// matrix exponential of the transverse-field generator −iβ·ΣX, where ΣX is
/// the 0/1 matrix connecting bitstrings at Hamming distance one.
pub fn dense_circuit_state(values: &[f64], gammas: &[f64], betas: &[f64]) -> Vec<Complex64> {
    let d = values.len();
    assert!(d.is_power_of_two());
    assert_eq!(gammas.len(), betas.len());
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut state = vec![amp; d];

    let mut x_sum = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for z1 in 0..d {
        for z2 in 0..d {
            if (z1 ^ z2).count_ones() == 1 {
                x_sum[z1][z2] = Complex64::new(1.0, 0.0);
            }
        }
    }

    for (&gamma, &beta) in gammas.iter().zip(betas) {
        let mut phase = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for (z, row) in phase.iter_mut().enumerate() {
            row[z] = (Complex64::new(0.0, -gamma) * values[z]).exp();
        }
        state = mat_vec(&phase, &state);

        let generator: Mat = x_sum
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| x * Complex64::new(0.0, -beta))
                    .collect()
            })
            .collect();
        state = mat_vec(&mat_exp(&generator), &state);
    }
    state
}

/// Objective table computed independently from subproblem pieces: for each
/// assignment `z` of the free variables, the cut among internal edges plus
/// each variable's attraction to whichever fixed block it opposes, plus the
/// fixed-fixed constant.
pub fn values_from_parts(
    k: usize,
    internal_edges: &[(usize, usize, f64)],
    bias0: &[f64],
    bias1: &[f64],
    constant: f64,
) -> Vec<f64> {
    (0u64..(1u64 << k))
        .map(|z| {
            let mut val = constant;
            for i in 0..k {
                if (z >> i) & 1 == 1 {
                    val += bias0[i];
                } else {
                    val += bias1[i];
                }
            }
            for &(u, v, w) in internal_edges {
                if ((z >> u) ^ (z >> v)) & 1 == 1 {
                    val += w;
                }
            }
            val
        })
        .collect()
}
