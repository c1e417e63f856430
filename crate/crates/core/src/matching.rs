//! Online weighted matching under vertex arrival, with ordinal edge access.
//!
//! Instances seal their edge weights inside a [`HiddenWeightStore`]; the only
//! thing an online algorithm receives is a *view* exposing graph structure
//! and a greedy-matching primitive that walks edges in weight-rank order
//! (weight descending, ties by edge id). Exact maximum-weight oracles live
//! alongside for scoring: Hungarian potentials for bipartite instances of
//! any size, and a subset DP for general graphs up to 16 vertices.
//!
//! Both online algorithms follow the same replay pattern: after a rejected
//! sample of arrivals, each new vertex recomputes the greedy matching over
//! the edges visible so far and adopts its own matched edge if that edge is
//! still compatible with everything accepted earlier. The per-round records
//! they return let callers re-derive the final value edge by edge.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ordinal::{ElementId, HiddenWeightStore, WeightEvaluator};

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// An edge-weighted bipartite graph. Edges are identified by [`ElementId`]
/// in insertion order; weights are hidden from algorithm code.
#[derive(Clone, Debug)]
pub struct BipartiteInstance {
    left: usize,
    right: usize,
    endpoints: Vec<(usize, usize)>,
    store: HiddenWeightStore,
}

impl BipartiteInstance {
    /// `edges` are `(left_vertex, right_vertex, weight)` triples. Parallel
    /// edges are allowed; weights must be finite and non-negative.
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if left == 0 || right == 0 {
            return Err(Error::InvalidParameter("both vertex sides must be non-empty".into()));
        }
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        for (l, r, w) in edges {
            if l >= left || r >= right {
                return Err(Error::InvalidParameter(format!(
                    "edge ({l},{r}) outside {left}x{right} vertex sets"
                )));
            }
            endpoints.push((l, r));
            weights.push(w);
        }
        let store = HiddenWeightStore::new(weights)?;
        Ok(BipartiteInstance { left, right, endpoints, store })
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn endpoints(&self, e: ElementId) -> (usize, usize) {
        self.endpoints[e.index()]
    }

    /// Weight access for scoring; algorithm code never touches this.
    pub fn evaluator(&self) -> WeightEvaluator<'_> {
        self.store.evaluator()
    }

    /// The ordinal interface handed to online algorithms.
    pub fn view(&self) -> BipartiteView<'_> {
        BipartiteView { inst: self, ranked: ranked_edges(&self.store) }
    }
}

/// An edge-weighted general graph (no self-loops).
#[derive(Clone, Debug)]
pub struct GeneralInstance {
    vertices: usize,
    endpoints: Vec<(usize, usize)>,
    store: HiddenWeightStore,
}

impl GeneralInstance {
    pub fn new(vertices: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidParameter("graph must have vertices".into()));
        }
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) exceeds vertex count {vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            endpoints.push((u, v));
            weights.push(w);
        }
        let store = HiddenWeightStore::new(weights)?;
        Ok(GeneralInstance { vertices, endpoints, store })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn endpoints(&self, e: ElementId) -> (usize, usize) {
        self.endpoints[e.index()]
    }

    pub fn evaluator(&self) -> WeightEvaluator<'_> {
        self.store.evaluator()
    }

    pub fn view(&self) -> GeneralView<'_> {
        GeneralView { inst: self, ranked: ranked_edges(&self.store) }
    }
}

fn ranked_edges(store: &HiddenWeightStore) -> Vec<ElementId> {
    let mut ranked: Vec<ElementId> = (0..store.len()).map(ElementId::new).collect();
    ranked.sort_by(|a, b| store.cmp_rank(*a, *b));
    ranked
}

// ---------------------------------------------------------------------------
// Ordinal views
// ---------------------------------------------------------------------------

/// Ordinal bipartite access: structure plus rank-order greedy matching over
/// whatever edge subset the caller admits. The rank list itself stays
/// private so nothing cardinal can leak.
pub struct BipartiteView<'a> {
    inst: &'a BipartiteInstance,
    ranked: Vec<ElementId>,
}

impl<'a> BipartiteView<'a> {
    pub fn left_count(&self) -> usize {
        self.inst.left
    }

    pub fn right_count(&self) -> usize {
        self.inst.right
    }

    pub fn edge_count(&self) -> usize {
        self.inst.endpoints.len()
    }

    pub fn endpoints(&self, e: ElementId) -> (usize, usize) {
        self.inst.endpoints[e.index()]
    }

    /// Greedy matching over admitted edges, best edge first; returns edges
    /// in the order they were matched.
    pub fn greedy_matching(&self, admit: impl Fn(ElementId) -> bool) -> Vec<ElementId> {
        let mut used_l = vec![false; self.inst.left];
        let mut used_r = vec![false; self.inst.right];
        let mut matched = Vec::new();
        for &e in &self.ranked {
            if !admit(e) {
                continue;
            }
            let (l, r) = self.inst.endpoints[e.index()];
            if !used_l[l] && !used_r[r] {
                used_l[l] = true;
                used_r[r] = true;
                matched.push(e);
            }
        }
        matched
    }

    /// The edge greedy assigns to `target` (a left vertex), stopping the
    /// scan as soon as that assignment is decided. Edges ranked below the
    /// point where `target` gets matched cannot change its partner, so this
    /// agrees with [`Self::greedy_matching`].
    pub fn greedy_partner(
        &self,
        admit: impl Fn(ElementId) -> bool,
        target: usize,
    ) -> Option<ElementId> {
        let mut used_l = vec![false; self.inst.left];
        let mut used_r = vec![false; self.inst.right];
        for &e in &self.ranked {
            if !admit(e) {
                continue;
            }
            let (l, r) = self.inst.endpoints[e.index()];
            if !used_l[l] && !used_r[r] {
                if l == target {
                    return Some(e);
                }
                used_l[l] = true;
                used_r[r] = true;
            }
        }
        None
    }
}

/// Ordinal access to a general graph; mirror of [`BipartiteView`] with a
/// single vertex class.
pub struct GeneralView<'a> {
    inst: &'a GeneralInstance,
    ranked: Vec<ElementId>,
}

impl<'a> GeneralView<'a> {
    pub fn vertex_count(&self) -> usize {
        self.inst.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.inst.endpoints.len()
    }

    pub fn endpoints(&self, e: ElementId) -> (usize, usize) {
        self.inst.endpoints[e.index()]
    }

    pub fn greedy_matching(&self, admit: impl Fn(ElementId) -> bool) -> Vec<ElementId> {
        let mut used = vec![false; self.inst.vertices];
        let mut matched = Vec::new();
        for &e in &self.ranked {
            if !admit(e) {
                continue;
            }
            let (u, v) = self.inst.endpoints[e.index()];
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                matched.push(e);
            }
        }
        matched
    }

    pub fn greedy_partner(
        &self,
        admit: impl Fn(ElementId) -> bool,
        target: usize,
    ) -> Option<ElementId> {
        let mut used = vec![false; self.inst.vertices];
        for &e in &self.ranked {
            if !admit(e) {
                continue;
            }
            let (u, v) = self.inst.endpoints[e.index()];
            if !used[u] && !used[v] {
                if u == target || v == target {
                    return Some(e);
                }
                used[u] = true;
                used[v] = true;
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Online algorithms
// ---------------------------------------------------------------------------

/// One post-sample round of an online matching run.
#[derive(Clone, Debug)]
pub struct RoundRecord {
    /// The vertex that arrived this round.
    pub vertex: usize,
    /// The edge the greedy replay assigned to it, if any.
    pub proposal: Option<ElementId>,
    /// Whether the proposal was compatible with earlier acceptances.
    pub accepted: bool,
}

/// Output of an online matching algorithm: the matching in acceptance order
/// plus the round-by-round trace that produced it.
#[derive(Clone, Debug)]
pub struct MatchingRun {
    pub matched: Vec<ElementId>,
    pub rounds: Vec<RoundRecord>,
    pub arrival: Vec<usize>,
    pub sample_size: usize,
}

fn shuffled_vertices(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    order
}

fn validate_arrival(arrival: &[usize], n: usize) -> Result<()> {
    if arrival.len() != n {
        return Err(Error::InvalidParameter(format!(
            "arrival order has {} vertices, instance has {n}",
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

/// Online bipartite matching, left vertices arriving uniformly at random.
///
/// Rejects the first `⌊n/e⌋` left vertices, then for each arrival `l`
/// recomputes the greedy matching over all edges whose left endpoint has
/// arrived and accepts `l`'s greedy edge if its right endpoint is still
/// free.
pub fn bipartite_secretary(view: &BipartiteView, seed: u64) -> MatchingRun {
    let arrival = shuffled_vertices(view.left_count(), seed);
    bipartite_secretary_with_arrival(view, &arrival).expect("generated order is a permutation")
}

/// [`bipartite_secretary`] with the left-vertex arrival order pinned.
pub fn bipartite_secretary_with_arrival(
    view: &BipartiteView,
    arrival: &[usize],
) -> Result<MatchingRun> {
    let n = view.left_count();
    validate_arrival(arrival, n)?;
    let sample_size = (n as f64 / std::f64::consts::E).floor() as usize;

    let mut visible = vec![false; n];
    for &l in &arrival[..sample_size] {
        visible[l] = true;
    }
    let mut right_used = vec![false; view.right_count()];
    let mut matched = Vec::new();
    let mut rounds = Vec::with_capacity(n - sample_size);

    for &l in &arrival[sample_size..] {
        visible[l] = true;
        let proposal = view.greedy_partner(|e| visible[view.endpoints(e).0], l);
        let accepted = match proposal {
            Some(e) => {
                let (_, r) = view.endpoints(e);
                if !right_used[r] {
                    right_used[r] = true;
                    matched.push(e);
                    true
                } else {
                    false
                }
            }
            None => false,
        };
        rounds.push(RoundRecord { vertex: l, proposal, accepted });
    }

    Ok(MatchingRun { matched, rounds, arrival: arrival.to_vec(), sample_size })
}

/// Online matching on a general graph, all vertices arriving uniformly at
/// random.
///
/// The first `⌊n/2⌋` arrivals are frozen into a passive side `R`; of the
/// rest, the next `⌊n/(2e)⌋` are a rejected sample. Each later arrival
/// replays greedy over the edges between arrived non-`R` vertices and `R`,
/// and accepts its greedy edge if both endpoints are still free.
pub fn general_secretary(view: &GeneralView, seed: u64) -> MatchingRun {
    let arrival = shuffled_vertices(view.vertex_count(), seed);
    general_secretary_with_arrival(view, &arrival).expect("generated order is a permutation")
}

/// [`general_secretary`] with the vertex arrival order pinned.
pub fn general_secretary_with_arrival(
    view: &GeneralView,
    arrival: &[usize],
) -> Result<MatchingRun> {
    let n = view.vertex_count();
    validate_arrival(arrival, n)?;
    let r_size = n / 2;
    let sample_size = (n as f64 / (2.0 * std::f64::consts::E)).floor() as usize;

    let mut in_r = vec![false; n];
    for &v in &arrival[..r_size] {
        in_r[v] = true;
    }
    let mut in_l = vec![false; n]; // arrived non-R vertices
    for &v in &arrival[r_size..(r_size + sample_size).min(n)] {
        in_l[v] = true;
    }
    let crossing = |view: &GeneralView, in_l: &[bool], in_r: &[bool], e: ElementId| {
        let (u, v) = view.endpoints(e);
        (in_l[u] && in_r[v]) || (in_r[u] && in_l[v])
    };

    let mut vertex_used = vec![false; n];
    let mut matched = Vec::new();
    let mut rounds = Vec::new();

    for &l in &arrival[(r_size + sample_size).min(n)..] {
        in_l[l] = true;
        let proposal = view.greedy_partner(|e| crossing(view, &in_l, &in_r, e), l);
        let accepted = match proposal {
            Some(e) => {
                let (u, v) = view.endpoints(e);
                if !vertex_used[u] && !vertex_used[v] {
                    vertex_used[u] = true;
                    vertex_used[v] = true;
                    matched.push(e);
                    true
                } else {
                    false
                }
            }
            None => false,
        };
        rounds.push(RoundRecord { vertex: l, proposal, accepted });
    }

    Ok(MatchingRun {
        matched,
        rounds,
        arrival: arrival.to_vec(),
        sample_size: r_size + sample_size,
    })
}

// ---------------------------------------------------------------------------
// Exact oracles (evaluation path: these read weights directly)
// ---------------------------------------------------------------------------

/// A maximum-weight matching together with its value.
#[derive(Clone, Debug)]
pub struct ExactMatching {
    pub edges: Vec<ElementId>,
    pub value: f64,
}

/// Maximum-weight bipartite matching via Hungarian potentials, O(V^3);
/// handles rectangular sides, parallel edges, and missing edges (a vertex
/// may stay unmatched).
pub fn max_weight_bipartite_matching(inst: &BipartiteInstance) -> ExactMatching {
    let size = inst.left.max(inst.right);
    // Cell (i, j) holds the best (most negative cost) parallel edge, if any.
    let mut cost = vec![vec![0.0f64; size + 1]; size + 1];
    let mut cell_edge: Vec<Vec<Option<ElementId>>> = vec![vec![None; size + 1]; size + 1];
    let eval = inst.evaluator();
    for idx in 0..inst.endpoints.len() {
        let e = ElementId::new(idx);
        let (l, r) = inst.endpoints[idx];
        let w = eval.weight(e);
        if -w < cost[l + 1][r + 1] {
            cost[l + 1][r + 1] = -w;
            cell_edge[l + 1][r + 1] = Some(e);
        }
    }

    // Standard shortest-augmenting-path assignment on the padded square.
    let n = size;
    let m = size;
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0][j] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut edges = Vec::new();
    for j in 1..=m {
        let i = p[j];
        if i != 0 {
            if let Some(e) = cell_edge[i][j] {
                edges.push(e);
            }
        }
    }
    edges.sort();
    let value = eval.total(edges.iter().copied());
    ExactMatching { edges, value }
}

/// Capability limit of the general-graph exact matcher.
pub const GENERAL_MATCHING_EXACT_LIMIT: usize = 16;

/// Maximum-weight matching on a general graph by subset DP, O(2^V · E);
/// fails with `CapabilityExceeded` above [`GENERAL_MATCHING_EXACT_LIMIT`]
/// vertices.
pub fn max_weight_general_matching(inst: &GeneralInstance) -> Result<ExactMatching> {
    let n = inst.vertices;
    if n > GENERAL_MATCHING_EXACT_LIMIT {
        return Err(Error::CapabilityExceeded(format!(
            "exact general matching supports at most {GENERAL_MATCHING_EXACT_LIMIT} vertices, got {n}"
        )));
    }
    let eval = inst.evaluator();
    let mut adj: Vec<Vec<(usize, ElementId)>> = vec![Vec::new(); n];
    for idx in 0..inst.endpoints.len() {
        let (a, b) = inst.endpoints[idx];
        adj[a].push((b, ElementId::new(idx)));
        adj[b].push((a, ElementId::new(idx)));
    }

    let full = 1usize << n;
    let mut dp = vec![0.0f64; full];
    for mask in 1..full {
        let v = mask.trailing_zeros() as usize;
        // v stays unmatched…
        let mut best = dp[mask & !(1 << v)];
        // …or matches along one of its edges inside the mask.
        for &(u, e) in &adj[v] {
            if mask & (1 << u) != 0 {
                let cand = eval.weight(e) + dp[mask & !(1 << v) & !(1 << u)];
                if cand > best {
                    best = cand;
                }
            }
        }
        dp[mask] = best;
    }

    // Reconstruct by re-testing the same expressions; comparisons are
    // bit-exact because each candidate is recomputed identically.
    let mut edges = Vec::new();
    let mut mask = full - 1;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        if dp[mask] == dp[mask & !(1 << v)] {
            mask &= !(1 << v);
            continue;
        }
        let mut advanced = false;
        for &(u, e) in &adj[v] {
            if mask & (1 << u) != 0
                && dp[mask] == eval.weight(e) + dp[mask & !(1 << v) & !(1 << u)]
            {
                edges.push(e);
                mask &= !(1 << v) & !(1 << u);
                advanced = true;
                break;
            }
        }
        assert!(advanced, "dp table inconsistent");
    }
    edges.sort();
    let value = eval.total(edges.iter().copied());
    Ok(ExactMatching { edges, value })
}
