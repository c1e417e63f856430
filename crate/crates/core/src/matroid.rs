//! Matroid constraints, ordinal greedy, and the hard instance family for
//! structure-oblivious threshold policies.
//!
//! The threshold machinery models the weakest reasonable online player: a
//! policy that knows only each arriving element's position in one global
//! weight order and a cutoff position, with the environment enforcing
//! independence. The instance family generated here makes every such policy
//! perform badly: a partition matroid over 1 + k unit-capacity blocks where a
//! growing pile of weight-1 elements in the first block is ranked *above* the
//! k genuinely valuable elements, which in turn sit just above a sea of
//! zeros. A policy whose cutoff admits the valuable elements also admits
//! zeros that race them for their blocks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ordinal::{ArrivalSequence, ElementId, HiddenWeightStore, OrdinalOracle};
use crate::seeds::derive_seed;

// ---------------------------------------------------------------------------
// Matroids
// ---------------------------------------------------------------------------

/// The matroid kinds used across the crate.
#[derive(Clone, Debug)]
pub enum Matroid {
    /// Independent iff `|S| <= k`.
    Uniform { n: usize, k: usize },
    /// Independent iff each block holds at most its capacity.
    Partition { block_of: Vec<usize>, capacities: Vec<usize> },
    /// Elements are edges of a multigraph; independent iff acyclic.
    Graphic { vertices: usize, endpoints: Vec<(usize, usize)> },
}

impl Matroid {
    pub fn uniform(n: usize, k: usize) -> Self {
        Matroid::Uniform { n, k }
    }

    pub fn partition(block_of: Vec<usize>, capacities: Vec<usize>) -> Result<Self> {
        if let Some(b) = block_of.iter().find(|b| **b >= capacities.len()) {
            return Err(Error::InvalidParameter(format!(
                "element assigned to block {b}, but only {} blocks exist",
                capacities.len()
            )));
        }
        Ok(Matroid::Partition { block_of, capacities })
    }

    pub fn graphic(vertices: usize, endpoints: Vec<(usize, usize)>) -> Result<Self> {
        if let Some((u, v)) = endpoints.iter().find(|(u, v)| *u >= vertices || *v >= vertices) {
            return Err(Error::InvalidParameter(format!(
                "edge ({u},{v}) exceeds vertex count {vertices}"
            )));
        }
        Ok(Matroid::Graphic { vertices, endpoints })
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Matroid::Uniform { n, .. } => *n,
            Matroid::Partition { block_of, .. } => block_of.len(),
            Matroid::Graphic { endpoints, .. } => endpoints.len(),
        }
    }

    /// Is the given set of distinct elements independent?
    pub fn is_independent(&self, set: &[ElementId]) -> bool {
        match self {
            Matroid::Uniform { k, .. } => set.len() <= *k,
            Matroid::Partition { block_of, capacities } => {
                let mut used = vec![0usize; capacities.len()];
                for e in set {
                    let b = block_of[e.index()];
                    used[b] += 1;
                    if used[b] > capacities[b] {
                        return false;
                    }
                }
                true
            }
            Matroid::Graphic { vertices, endpoints } => {
                // Union-find cycle detection; parallel edges and self-loops
                // form cycles like any others.
                let mut parent: Vec<usize> = (0..*vertices).collect();
                fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
                    while parent[x] != x {
                        parent[x] = parent[parent[x]];
                        x = parent[x];
                    }
                    x
                }
                for e in set {
                    let (u, v) = endpoints[e.index()];
                    let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                    if ru == rv {
                        return false;
                    }
                    parent[ru] = rv;
                }
                true
            }
        }
    }
}

/// Offline greedy over the full ground set: scan elements best-first and keep
/// each one whose addition preserves independence. For matroids this is the
/// maximum-weight independent set, and it needs only the ordinal ranking.
pub fn matroid_greedy_ordinal(oracle: &OrdinalOracle, matroid: &Matroid) -> Vec<ElementId> {
    assert_eq!(
        oracle.arrived_count(),
        oracle.n(),
        "offline greedy requires the full ground set"
    );
    let mut chosen = Vec::new();
    for e in oracle.rank_prefix().expect("ground set is non-empty") {
        chosen.push(e);
        if !matroid.is_independent(&chosen) {
            chosen.pop();
        }
    }
    chosen
}

/// A weighted ground set paired with a matroid over it: the instance type for
/// matroid experiments. Weights are sealed; algorithms reach them only through
/// an [`OrdinalOracle`].
#[derive(Clone, Debug)]
pub struct MatroidGround {
    matroid: Matroid,
    store: HiddenWeightStore,
}

impl MatroidGround {
    pub fn new(matroid: Matroid, weights: Vec<f64>) -> Result<Self> {
        if matroid.ground_size() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "matroid has {} elements but {} weights were given",
                matroid.ground_size(),
                weights.len()
            )));
        }
        let store = HiddenWeightStore::new(weights)?;
        Ok(MatroidGround { matroid, store })
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn element_count(&self) -> usize {
        self.store.len()
    }

    pub fn evaluator(&self) -> crate::ordinal::WeightEvaluator<'_> {
        self.store.evaluator()
    }

    /// Oracle over a seeded uniformly random arrival order.
    pub fn oracle(&self, seed: u64) -> Result<OrdinalOracle<'_>> {
        let seq = crate::ordinal::sample_arrival(self.store.len(), seed)?;
        OrdinalOracle::new(&self.store, seq)
    }

    /// Oracle that has already seen the whole ground set (for offline greedy).
    pub fn oracle_over_full_set(&self) -> OrdinalOracle<'_> {
        OrdinalOracle::over_full_set(&self.store)
    }
}

// ---------------------------------------------------------------------------
// Global orders and threshold policies
// ---------------------------------------------------------------------------

/// An explicit strict total order over all elements of an instance, the only
/// weight information a structure-oblivious policy receives.
#[derive(Clone, Debug)]
pub struct GlobalOrder {
    ranked: Vec<ElementId>,
    rank_of: Vec<u32>,
}

impl GlobalOrder {
    /// Build from a best-first list; must be a permutation of `0..n`.
    pub fn from_ranked(ranked: Vec<ElementId>) -> Result<Self> {
        let n = ranked.len();
        let mut rank_of = vec![u32::MAX; n];
        for (pos, e) in ranked.iter().enumerate() {
            if e.index() >= n || rank_of[e.index()] != u32::MAX {
                return Err(Error::InvalidParameter(
                    "ranked list is not a permutation of the ground set".into(),
                ));
            }
            rank_of[e.index()] = pos as u32 + 1;
        }
        Ok(GlobalOrder { ranked, rank_of })
    }

    /// The order induced by hidden weights (heavier first, documented ties).
    pub fn canonical(store: &HiddenWeightStore) -> Self {
        let mut ranked: Vec<ElementId> = (0..store.len()).map(ElementId::new).collect();
        ranked.sort_by(|&a, &b| store.cmp_rank(a, b));
        Self::from_ranked(ranked).expect("sorted ids form a permutation")
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn ranked(&self) -> &[ElementId] {
        &self.ranked
    }

    /// 1-based position; 1 is the best element.
    pub fn rank_of(&self, e: ElementId) -> usize {
        self.rank_of[e.index()] as usize
    }
}

/// Accept an arriving element iff its global rank is `position` or better.
#[derive(Copy, Clone, Debug)]
pub struct ThresholdPolicy {
    pub position: usize,
}

/// A randomized policy is an explicit distribution over cutoff positions.
/// Verification sweeps deterministic cutoffs against the instance
/// distribution, which by Yao's principle bounds every such mixture.
#[derive(Clone, Debug)]
pub struct RandomizedThresholdPolicy {
    positions: Vec<usize>,
    cumulative: Vec<f64>,
}

impl RandomizedThresholdPolicy {
    pub fn new(positions: Vec<usize>, probabilities: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != probabilities.len() {
            return Err(Error::InvalidParameter(
                "positions and probabilities must be non-empty and equal length".into(),
            ));
        }
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("probabilities must lie in [0,1]".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probabilities.len());
        let mut acc = 0.0;
        for p in &probabilities {
            acc += p;
            cumulative.push(acc);
        }
        Ok(RandomizedThresholdPolicy { positions, cumulative })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> ThresholdPolicy {
        let u: f64 = rng.gen();
        let idx = self
            .cumulative
            .iter()
            .position(|c| u <= *c)
            .unwrap_or(self.positions.len() - 1);
        ThresholdPolicy { position: self.positions[idx] }
    }
}

/// Run a cutoff policy online: accept each arriving element iff its rank is
/// at or above the cutoff and the environment's independence check passes.
pub fn run_threshold_policy(
    policy: ThresholdPolicy,
    matroid: &Matroid,
    order: &GlobalOrder,
    arrival: &mut ArrivalSequence,
) -> Result<Vec<ElementId>> {
    if policy.position == 0 || policy.position > order.len() {
        return Err(Error::InvalidParameter(format!(
            "threshold position {} outside 1..={}",
            policy.position,
            order.len()
        )));
    }
    let mut accepted = Vec::new();
    while let Ok(e) = arrival.advance() {
        if order.rank_of(e) <= policy.position {
            accepted.push(e);
            if !matroid.is_independent(&accepted) {
                accepted.pop();
            }
        }
    }
    Ok(accepted)
}

// ---------------------------------------------------------------------------
// The hard instance family
// ---------------------------------------------------------------------------

/// One member of the hard family: `n + 1` elements over a partition matroid
/// with `1 + k` unit-capacity blocks.
#[derive(Clone, Debug)]
pub struct LowerBoundInstance {
    pub matroid: Matroid,
    pub store: HiddenWeightStore,
    pub order: GlobalOrder,
    pub n: usize,
    pub k: usize,
    /// Which member of the family, in `1..=n/k`.
    pub i: usize,
    pub first_segment: Vec<ElementId>,
    pub valuable: Vec<ElementId>,
    pub zeros: Vec<ElementId>,
}

/// Generate family member `i`. Requires `k >= 1`, `k | n`, `1 <= i <= n/k`.
///
/// Member `i` has `(i-1)k + 1` weight-1 elements in block 0, one weight-1
/// "valuable" element in each of blocks `1..=k`, and `n - ik` zeros spread
/// equally over those same blocks. The global order places every
/// first-segment element above every valuable element (legitimate: all carry
/// weight 1, and the order only needs to be consistent with weights), and
/// every weight-1 element above every zero. The first segment and the
/// valuables are shuffled by `seed`; the zero segment is interleaved one
/// zero per block, round by round (block order shuffled within each round),
/// so every prefix of it is spread over the `k` blocks as evenly as
/// possible. The even spread is what makes the family hard: by convexity an
/// uneven prefix leaves some blocks with fewer zeros ahead of their valuable
/// element, raising the value a cutoff policy collects in expectation. An
/// instance drawn uniformly from `i ∈ 1..=n/k` (probability `k/n` each) is
/// what threshold policies are swept against.
pub fn generate_lower_bound_instance(
    n: usize,
    k: usize,
    i: usize,
    seed: u64,
) -> Result<LowerBoundInstance> {
    if k == 0 || n == 0 || n % k != 0 {
        return Err(Error::InvalidParameter(format!(
            "need k >= 1 and k | n, got n={n}, k={k}"
        )));
    }
    if i == 0 || i > n / k {
        return Err(Error::InvalidParameter(format!(
            "family index {i} outside 1..={}",
            n / k
        )));
    }

    let m1 = (i - 1) * k + 1;
    let zeros_total = n - i * k;
    let count = n + 1;

    let mut weights = vec![0.0; count];
    let mut block_of = vec![0usize; count];
    let first_segment: Vec<ElementId> = (0..m1).map(ElementId::new).collect();
    for e in &first_segment {
        weights[e.index()] = 1.0;
    }
    let valuable: Vec<ElementId> = (m1..m1 + k).map(ElementId::new).collect();
    for (b, e) in valuable.iter().enumerate() {
        weights[e.index()] = 1.0;
        block_of[e.index()] = b + 1;
    }
    let zeros: Vec<ElementId> = (m1 + k..count).map(ElementId::new).collect();
    for (t, e) in zeros.iter().enumerate() {
        block_of[e.index()] = 1 + (t % k);
    }
    debug_assert_eq!(zeros.len(), zeros_total);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = |class: &[ElementId]| {
        let mut v = class.to_vec();
        for j in (1..v.len()).rev() {
            let r = rng.gen_range(0..=j);
            v.swap(j, r);
        }
        v
    };
    let mut ranked = shuffled(&first_segment);
    ranked.extend(shuffled(&valuable));
    // `zeros[t]` lives in block `1 + t % k`, so each consecutive chunk of k
    // covers every block exactly once; shuffling within chunks randomizes
    // the order without disturbing the per-prefix balance.
    for chunk in zeros.chunks(k) {
        ranked.extend(shuffled(chunk));
    }

    Ok(LowerBoundInstance {
        matroid: Matroid::partition(block_of, vec![1; k + 1])?,
        store: HiddenWeightStore::new(weights)?,
        order: GlobalOrder::from_ranked(ranked)?,
        n,
        k,
        i,
        first_segment,
        valuable,
        zeros,
    })
}

// ---------------------------------------------------------------------------
// Threshold sweeps
// ---------------------------------------------------------------------------

/// Per-cutoff value of one `(instance, arrival)` realization, for every
/// cutoff position at once.
///
/// Blocks have capacity 1, so each block independently accepts its
/// first-arriving element whose rank clears the cutoff; an element `e` of
/// block `b` is that element exactly for cutoffs in
/// `[rank(e), min_rank(earlier arrivals in b) - 1]`. Accumulating those
/// intervals of the weight-1 elements into a difference array yields the
/// whole profile in `O(n)` instead of re-running the policy `n + 1` times.
pub fn threshold_profile(inst: &LowerBoundInstance, arrival: &[ElementId]) -> Vec<u32> {
    let count = inst.n + 1;
    debug_assert_eq!(arrival.len(), count);
    let eval = inst.store.evaluator();
    let mut diff = vec![0i64; count + 2];
    let mut min_rank = vec![usize::MAX; count]; // per block, ranks seen so far
    for &e in arrival {
        let b = match &inst.matroid {
            Matroid::Partition { block_of, .. } => block_of[e.index()],
            _ => unreachable!("family instances are partition matroids"),
        };
        let rank = inst.order.rank_of(e);
        if eval.weight(e) > 0.0 {
            let lo = rank;
            let hi = min_rank[b].saturating_sub(1).min(count);
            if lo <= hi {
                diff[lo] += 1;
                diff[hi + 1] -= 1;
            }
        }
        min_rank[b] = min_rank[b].min(rank);
    }
    let mut profile = Vec::with_capacity(count);
    let mut acc = 0i64;
    for t in 1..=count {
        acc += diff[t];
        profile.push(u32::try_from(acc).expect("block values are non-negative"));
    }
    profile
}

/// Monte-Carlo estimate of the expected policy value for every cutoff
/// position, averaged over the uniform family distribution (stratified:
/// `trials_per_instance` fresh shuffles and arrivals for each `i`).
pub struct ThresholdSweep {
    pub n: usize,
    pub k: usize,
    /// `expected_value[p - 1]` is the estimate for cutoff position `p`.
    pub expected_value: Vec<f64>,
    pub trials_per_instance: u64,
}

pub fn sweep_thresholds(
    n: usize,
    k: usize,
    trials_per_instance: u64,
    seed: u64,
) -> Result<ThresholdSweep> {
    if trials_per_instance == 0 {
        return Err(Error::InvalidParameter("trials_per_instance must be positive".into()));
    }
    generate_lower_bound_instance(n, k, 1, 0)?; // validates n, k
    let count = n + 1;
    let mut totals = vec![0u64; count];
    for i in 1..=n / k {
        for t in 0..trials_per_instance {
            let s = derive_seed(seed, i as u64, t);
            let inst = generate_lower_bound_instance(n, k, i, s)?;
            let arrival = crate::ordinal::sample_arrival(count, derive_seed(seed, i as u64, t ^ u64::MAX))?;
            let profile = threshold_profile(&inst, arrival.permutation());
            for (pos, v) in profile.iter().enumerate() {
                totals[pos] += u64::from(*v);
            }
        }
    }
    let denom = (trials_per_instance * (n / k) as u64) as f64;
    Ok(ThresholdSweep {
        n,
        k,
        expected_value: totals.iter().map(|t| *t as f64 / denom).collect(),
        trials_per_instance,
    })
}

/// Sweep all cutoffs and return `(best position, its estimated value)`.
pub fn best_deterministic_threshold(
    n: usize,
    k: usize,
    trials_per_instance: u64,
    seed: u64,
) -> Result<(usize, f64)> {
    let sweep = sweep_thresholds(n, k, trials_per_instance, seed)?;
    let (idx, value) = sweep
        .expected_value
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite estimates"))
        .expect("at least one position");
    Ok((idx + 1, *value))
}

/// Fresh-randomness estimate of a single cutoff's expected value; used to
/// re-measure the sweep winner without the selection bias of taking a
/// maximum over noisy estimates.
pub fn estimate_threshold_value(
    n: usize,
    k: usize,
    position: usize,
    trials_per_instance: u64,
    seed: u64,
) -> Result<f64> {
    let sweep_pos = position.checked_sub(1).ok_or_else(|| {
        Error::InvalidParameter("threshold position is 1-based".into())
    })?;
    if sweep_pos > n {
        return Err(Error::InvalidParameter(format!(
            "threshold position {position} outside 1..={}",
            n + 1
        )));
    }
    let mut total = 0u64;
    for i in 1..=n / k {
        for t in 0..trials_per_instance {
            let s = derive_seed(seed, i as u64, t);
            let inst = generate_lower_bound_instance(n, k, i, s)?;
            let arrival = crate::ordinal::sample_arrival(n + 1, derive_seed(seed, i as u64, t ^ u64::MAX))?;
            let profile = threshold_profile(&inst, arrival.permutation());
            total += u64::from(profile[sweep_pos]);
        }
    }
    Ok(total as f64 / (trials_per_instance * (n / k) as u64) as f64)
}
