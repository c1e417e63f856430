//! Online weighted independent set on graphs with a bounded local
//! independence number, plus unit-disk instance generation and exact
//! small-instance oracles.
//!
//! A [`LocalGraph`] carries sealed vertex weights and a declared local
//! independence number `α₁` (no neighborhood contains more than `α₁`
//! pairwise non-adjacent vertices; 5 for unit-disk graphs). Two algorithms
//! operate on it ordinally:
//!
//! * **Sample-and-price**: reject a `Binom(n, p)` prefix, build a greedy
//!   maximal independent set `M₁` of it by weight rank, then price each
//!   later vertex at its best-ranked `M₁`-neighbor — accept if the vertex
//!   outranks its price (vacuously, if it has no `M₁`-neighbor) and the
//!   output stays independent.
//! * **Simulate**: scan all vertices by weight rank; each vertex compatible
//!   with `M₁` joins it on a heads coin and `M₂` on tails; the output is
//!   every `M₂` vertex with no `M₂` neighbor (conflicting vertices are
//!   removed simultaneously).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::ordinal::{ElementId, HiddenWeightStore, WeightEvaluator};

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

/// A vertex-weighted graph with a declared local independence number.
/// Weights are sealed; adjacency and `α₁` are structural.
#[derive(Clone, Debug)]
pub struct LocalGraph {
    adjacency: Vec<Vec<usize>>,
    alpha1: usize,
    store: HiddenWeightStore,
}

impl LocalGraph {
    pub fn new(weights: Vec<f64>, edges: &[(usize, usize)], alpha1: usize) -> Result<Self> {
        if alpha1 == 0 {
            return Err(Error::InvalidParameter(
                "local independence number must be at least 1".into(),
            ));
        }
        let store = HiddenWeightStore::new(weights)?;
        let n = store.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) exceeds vertex count {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(LocalGraph { adjacency, alpha1, store })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn alpha1(&self) -> usize {
        self.alpha1
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Weight access for scoring; algorithm code never touches this.
    pub fn evaluator(&self) -> WeightEvaluator<'_> {
        self.store.evaluator()
    }

    /// Total weight of a vertex set, summed in the given order.
    pub fn value_of(&self, set: &[usize]) -> f64 {
        self.store.evaluator().total(set.iter().map(|&v| ElementId::new(v)))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        for (i, &u) in set.iter().enumerate() {
            for &v in &set[i + 1..] {
                if self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }

    /// The ordinal interface: vertex weight ranks, nothing cardinal.
    pub fn rank_view(&self) -> RankView {
        let mut ranked: Vec<usize> = (0..self.vertex_count()).collect();
        ranked.sort_by(|&a, &b| self.store.cmp_rank(ElementId::new(a), ElementId::new(b)));
        let mut rank_of = vec![0usize; ranked.len()];
        for (r, &v) in ranked.iter().enumerate() {
            rank_of[v] = r;
        }
        RankView { ranked, rank_of }
    }
}

/// Weight ranks over all vertices (0 = heaviest; ties by id).
pub struct RankView {
    ranked: Vec<usize>,
    rank_of: Vec<usize>,
}

impl RankView {
    pub fn ranked(&self) -> &[usize] {
        &self.ranked
    }

    pub fn rank_of(&self, v: usize) -> usize {
        self.rank_of[v]
    }

    /// Strictly better rank.
    pub fn outranks(&self, a: usize, b: usize) -> bool {
        self.rank_of[a] < self.rank_of[b]
    }
}

// ---------------------------------------------------------------------------
// Parameters and bounds
// ---------------------------------------------------------------------------

/// Default retention probability `p = √(α₁/(α₁+1))`.
pub fn default_price_probability(alpha1: usize) -> f64 {
    (alpha1 as f64 / (alpha1 as f64 + 1.0)).sqrt()
}

/// The guarantee the experiments check against, at the default `p`:
/// `1 / [(1 − α₁(1−p)/p) · ((1−p)/α₁)]`.
pub fn indepset_competitive_bound(alpha1: usize) -> f64 {
    let a = alpha1 as f64;
    let p = default_price_probability(alpha1);
    1.0 / ((1.0 - a * (1.0 - p) / p) * ((1.0 - p) / a))
}

// ---------------------------------------------------------------------------
// Sample-and-price
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SamplePriceRun {
    /// Accepted vertices, in acceptance order.
    pub selected: Vec<usize>,
    /// The rejected sample, in arrival order.
    pub sample: Vec<usize>,
    /// Greedy maximal independent set of the sample, by weight rank.
    pub m1: Vec<usize>,
    pub arrival: Vec<usize>,
    pub sample_size: usize,
}

/// Online sample-and-price with a seeded uniform arrival order and
/// `k ~ Binom(n, p)` sampled vertices.
pub fn sample_and_price(graph: &LocalGraph, p: f64, seed: u64) -> Result<SamplePriceRun> {
    validate_probability(p)?;
    let n = graph.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arrival: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        arrival.swap(i, j);
    }
    let k = Binomial::new(n as u64, p).expect("valid binomial").sample(&mut rng) as usize;
    sample_and_price_with(graph, &arrival, k)
}

/// [`sample_and_price`] with the arrival order and sample size pinned; this
/// is the deterministic core that exhaustive-expectation checks enumerate.
pub fn sample_and_price_with(
    graph: &LocalGraph,
    arrival: &[usize],
    sample_size: usize,
) -> Result<SamplePriceRun> {
    let n = graph.vertex_count();
    validate_vertex_arrival(arrival, n)?;
    if sample_size > n {
        return Err(Error::InvalidParameter(format!(
            "sample size {sample_size} exceeds vertex count {n}"
        )));
    }
    let view = graph.rank_view();

    let sample: Vec<usize> = arrival[..sample_size].to_vec();
    let mut by_rank = sample.clone();
    by_rank.sort_by_key(|&v| view.rank_of(v));
    let mut in_m1 = vec![false; n];
    let mut m1 = Vec::new();
    for v in by_rank {
        if graph.neighbors(v).iter().all(|&u| !in_m1[u]) {
            in_m1[v] = true;
            m1.push(v);
        }
    }

    let mut in_s = vec![false; n];
    let mut selected = Vec::new();
    for &v in &arrival[sample_size..] {
        // Price: the best-ranked M₁-neighbor; vacuous when there is none.
        let price = graph
            .neighbors(v)
            .iter()
            .filter(|&&u| in_m1[u])
            .min_by_key(|&&u| view.rank_of(u));
        let clears_price = match price {
            Some(&w_star) => view.outranks(v, w_star),
            None => true,
        };
        if clears_price && graph.neighbors(v).iter().all(|&u| !in_s[u]) {
            in_s[v] = true;
            selected.push(v);
        }
    }

    debug_assert!(graph.is_independent(&selected));
    Ok(SamplePriceRun { selected, sample, m1, arrival: arrival.to_vec(), sample_size })
}

// ---------------------------------------------------------------------------
// Simulate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SimulateRun {
    /// `M₂` vertices with no `M₂` neighbor, ascending by id.
    pub selected: Vec<usize>,
    pub m1: Vec<usize>,
    pub m2: Vec<usize>,
    /// How many coins were consumed (one per `M₁`-compatible vertex).
    pub flips: usize,
}

/// Offline analysis twin of sample-and-price: rank-order scan with a
/// retention coin for every `M₁`-compatible vertex.
pub fn simulate(graph: &LocalGraph, p: f64, coin_seed: u64) -> Result<SimulateRun> {
    validate_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(coin_seed);
    let coins: Vec<bool> = (0..graph.vertex_count()).map(|_| rng.gen_bool(p)).collect();
    simulate_with_coins(graph, &coins)
}

/// [`simulate`] with the coin sequence pinned (consumed in scan order);
/// unused entries are ignored. Exhaustive-expectation checks enumerate the
/// full coin vector.
pub fn simulate_with_coins(graph: &LocalGraph, coins: &[bool]) -> Result<SimulateRun> {
    let n = graph.vertex_count();
    if coins.len() < n {
        return Err(Error::InvalidParameter(format!(
            "need at least {n} coins, got {}",
            coins.len()
        )));
    }
    let view = graph.rank_view();
    let mut in_m1 = vec![false; n];
    let mut in_m2 = vec![false; n];
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let mut flips = 0usize;
    for &v in view.ranked() {
        let compatible = graph.neighbors(v).iter().all(|&u| !in_m1[u]);
        if !compatible {
            continue;
        }
        let heads = coins[flips];
        flips += 1;
        if heads {
            in_m1[v] = true;
            m1.push(v);
        } else {
            in_m2[v] = true;
            m2.push(v);
        }
    }

    // Conflicted M₂ vertices drop out simultaneously.
    let selected: Vec<usize> = (0..n)
        .filter(|&v| in_m2[v] && graph.neighbors(v).iter().all(|&u| !in_m2[u]))
        .collect();
    debug_assert!(graph.is_independent(&selected));
    Ok(SimulateRun { selected, m1, m2, flips })
}

fn validate_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

fn validate_vertex_arrival(arrival: &[usize], n: usize) -> Result<()> {
    if arrival.len() != n {
        return Err(Error::InvalidParameter(format!(
            "arrival order has {} vertices, graph has {n}",
            arrival.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in arrival {
        if v >= n || seen[v] {
            return Err(Error::InvalidParameter(
                "arrival order is not a permutation of the vertices".into(),
            ));
        }
        seen[v] = true;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Exact oracle (evaluation path)
// ---------------------------------------------------------------------------

/// Capability limit of the exact maximum-weight independent set solver.
pub const MWIS_EXACT_LIMIT: usize = 24;

/// Exact maximum-weight independent set by branch and bound: pivot on the
/// highest-degree remaining vertex, absorb isolated vertices for free, and
/// prune on the remaining weight sum.
pub fn max_weight_independent_set_exact(graph: &LocalGraph) -> Result<(Vec<usize>, f64)> {
    let n = graph.vertex_count();
    if n > MWIS_EXACT_LIMIT {
        return Err(Error::CapabilityExceeded(format!(
            "exact independent set supports at most {MWIS_EXACT_LIMIT} vertices, got {n}"
        )));
    }
    let eval = graph.evaluator();
    let weights: Vec<f64> = (0..n).map(|v| eval.weight(ElementId::new(v))).collect();
    let adj: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = (0u32, 0.0f64); // the empty set is always independent
    branch(&adj, &weights, full, 0, 0.0, &mut best);

    let set: Vec<usize> = (0..n).filter(|&v| best.0 & (1 << v) != 0).collect();
    let value = eval.total(set.iter().map(|&v| ElementId::new(v)));
    Ok((set, value))
}

fn branch(
    adj: &[u32],
    weights: &[f64],
    mut candidates: u32,
    mut chosen: u32,
    mut weight: f64,
    best: &mut (u32, f64),
) {
    // Isolated candidates (no remaining neighbors) always join.
    loop {
        let mut grabbed = false;
        let mut scan = candidates;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            if adj[v] & candidates == 0 {
                chosen |= 1 << v;
                weight += weights[v];
                candidates &= !(1 << v);
                grabbed = true;
            }
        }
        if !grabbed {
            break;
        }
    }
    if weight > best.1 {
        *best = (chosen, weight);
    }
    if candidates == 0 {
        return;
    }
    // Prune: even taking every remaining candidate cannot beat the best.
    let mut remaining = 0.0;
    let mut scan = candidates;
    while scan != 0 {
        let v = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        remaining += weights[v];
    }
    if weight + remaining <= best.1 {
        return;
    }
    // Pivot on the highest-degree candidate.
    let mut pivot = 0usize;
    let mut pivot_deg = -1i32;
    let mut scan = candidates;
    while scan != 0 {
        let v = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let deg = (adj[v] & candidates).count_ones() as i32;
        if deg > pivot_deg {
            pivot_deg = deg;
            pivot = v;
        }
    }
    // Include the pivot…
    branch(
        adj,
        weights,
        candidates & !adj[pivot] & !(1 << pivot),
        chosen | (1 << pivot),
        weight + weights[pivot],
        best,
    );
    // …or exclude it.
    branch(adj, weights, candidates & !(1 << pivot), chosen, weight, best);
}

// ---------------------------------------------------------------------------
// Local independence verification
// ---------------------------------------------------------------------------

/// Outcome of [`verify_local_independence`].
#[derive(Clone, Debug)]
pub struct LocalIndependenceReport {
    /// No neighborhood with an independent set larger than `α₁` was found.
    pub holds: bool,
    /// Whether the check was exhaustive (a `false` from sampling is still
    /// definitive; a `true` is evidence, not proof).
    pub exact: bool,
    /// Randomized attempts performed in sampled mode.
    pub samples: usize,
}

/// Exact per-neighborhood check for graphs of up to 14 vertices; randomized
/// greedy search for larger ones.
pub fn verify_local_independence(
    graph: &LocalGraph,
    alpha1: usize,
    seed: u64,
) -> LocalIndependenceReport {
    let n = graph.vertex_count();
    if n <= 14 {
        for v in 0..n {
            if largest_neighborhood_independent_set(graph, v) > alpha1 {
                return LocalIndependenceReport { holds: false, exact: true, samples: 0 };
            }
        }
        return LocalIndependenceReport { holds: true, exact: true, samples: 0 };
    }

    const ATTEMPTS_PER_VERTEX: usize = 200;
    let mut samples = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in 0..n {
        let nbrs = graph.neighbors(v);
        if nbrs.len() <= alpha1 {
            continue; // cannot contain a violating independent set
        }
        let mut order: Vec<usize> = nbrs.to_vec();
        for _ in 0..ATTEMPTS_PER_VERTEX {
            samples += 1;
            for i in (1..order.len()).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let mut packed: Vec<usize> = Vec::new();
            for &u in &order {
                if packed.iter().all(|&w| !graph.has_edge(u, w)) {
                    packed.push(u);
                    if packed.len() > alpha1 {
                        return LocalIndependenceReport { holds: false, exact: false, samples };
                    }
                }
            }
        }
    }
    LocalIndependenceReport { holds: true, exact: false, samples }
}

/// Size of the largest independent set inside `N(v)`, via the exact solver
/// on the induced subgraph with unit weights.
fn largest_neighborhood_independent_set(graph: &LocalGraph, v: usize) -> usize {
    let nbrs = graph.neighbors(v);
    let k = nbrs.len();
    if k == 0 {
        return 0;
    }
    let index_of = |u: usize| nbrs.binary_search(&u).ok();
    let adj: Vec<u32> = nbrs
        .iter()
        .map(|&u| {
            graph
                .neighbors(u)
                .iter()
                .filter_map(|&w| index_of(w))
                .fold(0u32, |m, i| m | (1 << i))
        })
        .collect();
    let weights = vec![1.0f64; k];
    let full = (1u32 << k) - 1;
    let mut best = (0u32, 0.0f64);
    branch(&adj, &weights, full, 0, 0.0, &mut best);
    best.1 as usize
}

// ---------------------------------------------------------------------------
// Unit-disk instances
// ---------------------------------------------------------------------------

/// Points in the plane joined when within the radius; `α₁ = 5` always holds
/// for such graphs.
#[derive(Clone, Debug)]
pub struct UnitDiskInstance {
    pub points: Vec<(f64, f64)>,
    pub radius: f64,
    graph: LocalGraph,
}

impl UnitDiskInstance {
    pub fn graph(&self) -> &LocalGraph {
        &self.graph
    }

    pub fn into_graph(self) -> LocalGraph {
        self.graph
    }

    /// Build the instance from explicit points, weights, and radius.
    pub fn from_points(
        points: Vec<(f64, f64)>,
        weights: Vec<f64>,
        radius: f64,
    ) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidParameter(format!("invalid radius {radius}")));
        }
        let mut edges = Vec::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                if (dx * dx + dy * dy).sqrt() <= radius {
                    edges.push((i, j));
                }
            }
        }
        let graph = LocalGraph::new(weights, &edges, 5)?;
        Ok(UnitDiskInstance { points, radius, graph })
    }
}

/// Random unit-disk instance: `n` points uniform in a square sized so the
/// expected average degree is roughly `target_avg_degree` at radius 1;
/// weights uniform in `(0, 1]`.
pub fn generate_unit_disk(n: usize, target_avg_degree: f64, seed: u64) -> Result<UnitDiskInstance> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if !target_avg_degree.is_finite() || target_avg_degree <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target average degree {target_avg_degree} must be positive"
        )));
    }
    let radius = 1.0f64;
    // A vertex sees roughly (n−1)·πr²/side² neighbors in a uniform square.
    let side = (((n.max(2) - 1) as f64) * std::f64::consts::PI * radius * radius
        / target_avg_degree)
        .sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen::<f64>() * side, rng.gen::<f64>() * side))
        .collect();
    let weights: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    UnitDiskInstance::from_points(points, weights, radius)
}
