//! Seeded random instance generators.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed,
//! drawing from a counter-based ChaCha stream, so experiments replay
//! bit-exactly. Weights and profits are uniform on `(0, 1]` — sampled as
//! `1 - u` with `u` uniform on `[0, 1)` — which keeps them strictly positive
//! and makes exact weight ties have probability zero.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::indepset::{generate_unit_disk, LocalGraph, UnitDiskInstance};
use crate::matching::{BipartiteInstance, GeneralInstance};
use crate::matroid::{Matroid, MatroidGround};
use crate::packing::PackingInstance;

fn positive_unit(rng: &mut impl Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Complete bipartite graph with independent uniform `(0, 1]` edge weights.
pub fn gen_bipartite(left: usize, right: usize, seed: u64) -> Result<BipartiteInstance> {
    if left == 0 || right == 0 {
        return Err(Error::EmptyInstance);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(left * right);
    for l in 0..left {
        for r in 0..right {
            edges.push((l, r, positive_unit(&mut rng)));
        }
    }
    BipartiteInstance::new(left, right, edges)
}

/// Erdős–Rényi graph with uniform `(0, 1]` edge weights. Pairs are drawn
/// until at least one edge exists, so the instance is never degenerate.
pub fn gen_general(n: usize, edge_prob: f64, seed: u64) -> Result<GeneralInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "a general graph needs at least 2 vertices, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    loop {
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < edge_prob {
                    edges.push((u, v, positive_unit(&mut rng)));
                }
            }
        }
        if !edges.is_empty() {
            break;
        }
        if edge_prob <= 0.0 {
            // Probability zero never yields an edge; pin one deterministic
            // edge instead of spinning.
            edges.push((0, 1, positive_unit(&mut rng)));
        }
    }
    GeneralInstance::new(n, edges)
}

/// Random packing instance with exact sparsity `d` and capacity ratio
/// `b_ratio`: every option consumes a positive amount on exactly `d`
/// distinct resources, and each consumed resource's capacity is set to
/// `(b_ratio + 1/2) ×` its largest single consumption, which floors to
/// exactly `b_ratio`.
pub fn gen_packing(
    n: usize,
    m: usize,
    options: usize,
    d: usize,
    b_ratio: usize,
    seed: u64,
) -> Result<PackingInstance> {
    if n == 0 || m == 0 || options == 0 {
        return Err(Error::EmptyInstance);
    }
    if d == 0 || d > m {
        return Err(Error::InvalidParameter(format!(
            "sparsity {d} must lie in 1..={m} (the resource count)"
        )));
    }
    if b_ratio == 0 {
        return Err(Error::InvalidParameter("capacity ratio must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profits = vec![vec![0.0; options]; n];
    let mut consumption = vec![vec![vec![0.0; m]; options]; n];
    let mut max_use = vec![0.0f64; m];
    for j in 0..n {
        for k in 0..options {
            profits[j][k] = positive_unit(&mut rng);
            // Partial Fisher–Yates: the first d entries of `picks` become a
            // uniform d-subset of the resources.
            let mut picks: Vec<usize> = (0..m).collect();
            for slot in 0..d {
                let swap = rng.gen_range(slot..m);
                picks.swap(slot, swap);
            }
            for &i in &picks[..d] {
                let amount = positive_unit(&mut rng);
                consumption[j][k][i] = amount;
                if amount > max_use[i] {
                    max_use[i] = amount;
                }
            }
        }
    }
    let capacities: Vec<f64> = max_use
        .iter()
        .map(|&hi| if hi > 0.0 { (b_ratio as f64 + 0.5) * hi } else { 1.0 })
        .collect();
    PackingInstance::new(capacities, profits, consumption)
}

/// Erdős–Rényi vertex-weighted graph for independent-set experiments. The
/// declared local independence bound defaults to `n - 1`, which every graph
/// satisfies; pass a smaller `alpha1` only when the structure guarantees it.
pub fn gen_graph(n: usize, edge_prob: f64, alpha1: Option<usize>, seed: u64) -> Result<LocalGraph> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < edge_prob {
                edges.push((u, v));
            }
        }
    }
    let weights: Vec<f64> = (0..n).map(|_| positive_unit(&mut rng)).collect();
    LocalGraph::new(weights, &edges, alpha1.unwrap_or_else(|| n.saturating_sub(1).max(1)))
}

/// Random unit-disk instance (points in a square scaled for the target
/// average degree, radius 1, uniform `(0, 1]` weights).
pub fn gen_unit_disk(n: usize, target_avg_degree: f64, seed: u64) -> Result<UnitDiskInstance> {
    generate_unit_disk(n, target_avg_degree, seed)
}

/// Uniform matroid of rank `k` over `n` elements with uniform `(0, 1]`
/// weights.
pub fn gen_matroid(n: usize, k: usize, seed: u64) -> Result<MatroidGround> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("rank {k} must lie in 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n).map(|_| positive_unit(&mut rng)).collect();
    MatroidGround::new(Matroid::uniform(n, k), weights)
}
