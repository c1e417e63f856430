//! Online packing under random-order request arrival.
//!
//! A packing instance has `m` resources with capacities `b`, and `n`
//! requests carrying `K` options each; option `k` of request `j` yields
//! profit `c[j][k]` and consumes `a[j][k][i]` of each resource `i`. Profits
//! are sealed — algorithms see only their rank order (descending, ties by
//! `(request, option)` ascending) — while consumptions and capacities are
//! structural and stay visible, since feasibility checks need them.
//!
//! The online algorithm samples a `⌊p·n⌋` prefix without accepting, then for
//! each later request recomputes the rank-greedy assignment over everything
//! arrived and tentatively adopts the new request's row, reverting it if the
//! capacity constraints would break. The parameter `p` comes from the
//! instance's column sparsity `d` and capacity ratio `B`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram};
use crate::ordinal::{ElementId, HiddenWeightStore, WeightEvaluator};

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

/// An `m`-resource, `n`-request, `K`-option packing instance with sealed
/// profits.
#[derive(Clone, Debug)]
pub struct PackingInstance {
    capacities: Vec<f64>,
    /// `consumption[j][k][i]` ≥ 0: how much option `k` of request `j` uses
    /// of resource `i`.
    consumption: Vec<Vec<Vec<f64>>>,
    options: usize,
    store: HiddenWeightStore,
}

impl PackingInstance {
    /// `profits[j][k]` and `consumption[j][k]` must be rectangular: every
    /// request carries the same number of options.
    pub fn new(
        capacities: Vec<f64>,
        profits: Vec<Vec<f64>>,
        consumption: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let m = capacities.len();
        let n = profits.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter("need at least one resource and request".into()));
        }
        if capacities.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(Error::InvalidParameter("capacities must be finite and positive".into()));
        }
        let options = profits[0].len();
        if options == 0 {
            return Err(Error::InvalidParameter("requests need at least one option".into()));
        }
        if profits.iter().any(|row| row.len() != options) {
            return Err(Error::InvalidParameter("profit rows must have equal width".into()));
        }
        if consumption.len() != n
            || consumption
                .iter()
                .any(|req| req.len() != options || req.iter().any(|opt| opt.len() != m))
        {
            return Err(Error::InvalidParameter(
                "consumption must be shaped [request][option][resource]".into(),
            ));
        }
        for req in &consumption {
            for opt in req {
                if opt.iter().any(|a| !a.is_finite() || *a < 0.0) {
                    return Err(Error::InvalidParameter(
                        "consumptions must be finite and non-negative".into(),
                    ));
                }
            }
        }
        let flat: Vec<f64> = profits.into_iter().flatten().collect();
        let store = HiddenWeightStore::new(flat)?;
        Ok(PackingInstance { capacities, consumption, options, store })
    }

    pub fn resource_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn request_count(&self) -> usize {
        self.consumption.len()
    }

    pub fn option_count(&self) -> usize {
        self.options
    }

    pub fn capacity(&self, i: usize) -> f64 {
        self.capacities[i]
    }

    pub fn consumption(&self, request: usize, option: usize, resource: usize) -> f64 {
        self.consumption[request][option][resource]
    }

    /// Flat profit-store id of `(request, option)`.
    pub fn flat_id(&self, request: usize, option: usize) -> ElementId {
        ElementId::new(request * self.options + option)
    }

    /// Column sparsity: the largest number of resources any single option
    /// touches. Zero only if no option consumes anything.
    pub fn sparsity(&self) -> usize {
        self.consumption
            .iter()
            .flatten()
            .map(|opt| opt.iter().filter(|a| **a > 0.0).count())
            .max()
            .unwrap_or(0)
    }

    /// Capacity ratio `B`: how many copies of the hungriest option every
    /// consumed resource can absorb; resources nothing consumes don't bind.
    pub fn capacity_ratio(&self) -> usize {
        let mut b_min = usize::MAX;
        for i in 0..self.capacities.len() {
            let max_a = self
                .consumption
                .iter()
                .flatten()
                .map(|opt| opt[i])
                .fold(0.0f64, f64::max);
            if max_a > 0.0 {
                let ratio = (self.capacities[i] / max_a).floor();
                let ratio = if ratio >= usize::MAX as f64 { usize::MAX } else { ratio as usize };
                b_min = b_min.min(ratio);
            }
        }
        b_min
    }

    /// Profit access for scoring; algorithm code never touches this.
    pub fn profit_evaluator(&self) -> WeightEvaluator<'_> {
        self.store.evaluator()
    }

    /// Total profit of an assignment, summed in acceptance order.
    pub fn value_of(&self, assignment: &Assignment) -> f64 {
        self.store
            .evaluator()
            .total(assignment.rows.iter().map(|&(j, k)| self.flat_id(j, k)))
    }

    /// Per-resource usage, accumulated in the assignment's row order so the
    /// check reproduces the algorithm's own arithmetic bit for bit.
    pub fn usage_of(&self, assignment: &Assignment) -> Vec<f64> {
        let mut usage = vec![0.0; self.capacities.len()];
        for &(j, k) in &assignment.rows {
            for (i, u) in usage.iter_mut().enumerate() {
                *u += self.consumption[j][k][i];
            }
        }
        usage
    }

    /// `A·y ≤ b` and at most one option per request.
    pub fn is_feasible(&self, assignment: &Assignment) -> bool {
        let mut chosen = vec![false; self.consumption.len()];
        for &(j, _) in &assignment.rows {
            if chosen[j] {
                return false;
            }
            chosen[j] = true;
        }
        self.usage_of(assignment)
            .iter()
            .zip(&self.capacities)
            .all(|(u, b)| u <= b)
    }

    /// The ordinal interface handed to online algorithms.
    pub fn view(&self) -> PackingView<'_> {
        let mut flat: Vec<ElementId> = (0..self.store.len()).map(ElementId::new).collect();
        flat.sort_by(|a, b| self.store.cmp_rank(*a, *b));
        let ranked = flat
            .into_iter()
            .map(|e| (e.index() / self.options, e.index() % self.options))
            .collect();
        PackingView { inst: self, ranked }
    }
}

/// A 0/1 assignment as the list of set entries `(request, option)` in
/// acceptance order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub rows: Vec<(usize, usize)>,
}

// ---------------------------------------------------------------------------
// Ordinal view and greedy assignment
// ---------------------------------------------------------------------------

/// What an online packing algorithm may see: structure, capacities,
/// consumptions, and greedy scans in (hidden) profit-rank order.
pub struct PackingView<'a> {
    inst: &'a PackingInstance,
    ranked: Vec<(usize, usize)>,
}

impl<'a> PackingView<'a> {
    pub fn request_count(&self) -> usize {
        self.inst.request_count()
    }

    pub fn option_count(&self) -> usize {
        self.inst.options
    }

    pub fn resource_count(&self) -> usize {
        self.inst.capacities.len()
    }

    pub fn capacity(&self, i: usize) -> f64 {
        self.inst.capacities[i]
    }

    pub fn consumption(&self, request: usize, option: usize, resource: usize) -> f64 {
        self.inst.consumption[request][option][resource]
    }

    pub fn sparsity(&self) -> usize {
        self.inst.sparsity()
    }

    pub fn capacity_ratio(&self) -> usize {
        self.inst.capacity_ratio()
    }

    /// Rank-greedy assignment over the arrived requests: scan `(j, k)` by
    /// profit rank, set `y[j][k] = 1` whenever request `j` is still
    /// unassigned and capacities allow.
    pub fn greedy_assignment(&self, arrived: &[bool]) -> Assignment {
        let mut usage = vec![0.0f64; self.inst.capacities.len()];
        let mut assigned = vec![false; self.inst.request_count()];
        let mut rows = Vec::new();
        for &(j, k) in &self.ranked {
            if !arrived[j] || assigned[j] {
                continue;
            }
            if self.fits(&usage, j, k) {
                for (i, u) in usage.iter_mut().enumerate() {
                    *u += self.inst.consumption[j][k][i];
                }
                assigned[j] = true;
                rows.push((j, k));
            }
        }
        Assignment { rows }
    }

    /// The option greedy assigns to `target`, stopping the scan as soon as
    /// that row is decided; agrees with [`Self::greedy_assignment`].
    pub fn greedy_option_for(&self, arrived: &[bool], target: usize) -> Option<usize> {
        let mut usage = vec![0.0f64; self.inst.capacities.len()];
        let mut assigned = vec![false; self.inst.request_count()];
        for &(j, k) in &self.ranked {
            if !arrived[j] || assigned[j] {
                continue;
            }
            if self.fits(&usage, j, k) {
                if j == target {
                    return Some(k);
                }
                for (i, u) in usage.iter_mut().enumerate() {
                    *u += self.inst.consumption[j][k][i];
                }
                assigned[j] = true;
            }
        }
        None
    }

    fn fits(&self, usage: &[f64], j: usize, k: usize) -> bool {
        usage
            .iter()
            .zip(&self.inst.consumption[j][k])
            .zip(&self.inst.capacities)
            .all(|((u, a), b)| u + a <= *b)
    }
}

// ---------------------------------------------------------------------------
// Parameters and bounds
// ---------------------------------------------------------------------------

/// Sample fraction `p = e(2d)^{1/B} / (1 + e(2d)^{1/B})`.
pub fn sampling_probability(d: usize, b_ratio: usize) -> Result<f64> {
    if d < 1 || b_ratio < 1 {
        return Err(Error::InvalidParameter(format!(
            "sampling probability needs d ≥ 1 and B ≥ 1, got d={d}, B={b_ratio}"
        )));
    }
    let g = std::f64::consts::E * ((2.0 * d as f64).ln() / b_ratio as f64).exp();
    Ok(g / (1.0 + g))
}

/// The guarantee the experiments check against: `2(d+1)(1 + 2e·d^{1/B})`.
pub fn packing_competitive_bound(d: usize, b_ratio: usize) -> f64 {
    let root = ((d as f64).ln() / b_ratio as f64).exp();
    2.0 * (d as f64 + 1.0) * (1.0 + 2.0 * std::f64::consts::E * root)
}

// ---------------------------------------------------------------------------
// Online algorithm
// ---------------------------------------------------------------------------

/// One post-sample round of the online packing run.
#[derive(Clone, Debug)]
pub struct PackingRound {
    pub request: usize,
    /// Option the greedy replay assigned to this request, if any.
    pub proposal: Option<usize>,
    /// Whether adopting it kept `A·y ≤ b`.
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct PackingRun {
    pub assignment: Assignment,
    pub rounds: Vec<PackingRound>,
    pub arrival: Vec<usize>,
    pub sample_size: usize,
    pub p: f64,
}

/// Online packing with `p` derived from the instance's `d` and `B`, and a
/// seeded uniform arrival order.
pub fn packing_secretary(view: &PackingView, seed: u64) -> Result<PackingRun> {
    let p = sampling_probability(view.sparsity(), view.capacity_ratio())?;
    let n = view.request_count();
    let mut arrival: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        arrival.swap(i, j);
    }
    packing_secretary_with(view, p, &arrival)
}

/// [`packing_secretary`] with `p` and the arrival order pinned. Samples
/// `⌊p·n⌋` requests; each later request adopts its row of the rank-greedy
/// assignment over everything arrived, reverted if capacities would break.
pub fn packing_secretary_with(
    view: &PackingView,
    p: f64,
    arrival: &[usize],
) -> Result<PackingRun> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("sample fraction {p} outside [0,1]")));
    }
    let n = view.request_count();
    if arrival.len() != n {
        return Err(Error::InvalidParameter(format!(
            "arrival order has {} requests, instance has {n}",
            arrival.len()
        )));
    }
    let mut seen = vec![false; n];
    for &j in arrival {
        if j >= n || seen[j] {
            return Err(Error::InvalidParameter(
                "arrival order is not a permutation of the requests".into(),
            ));
        }
        seen[j] = true;
    }
    let sample_size = (p * n as f64).floor() as usize;

    let mut arrived = vec![false; n];
    for &j in &arrival[..sample_size] {
        arrived[j] = true;
    }
    let mut usage = vec![0.0f64; view.resource_count()];
    let mut rows = Vec::new();
    let mut rounds = Vec::with_capacity(n - sample_size);

    for &j in &arrival[sample_size..] {
        arrived[j] = true;
        let proposal = view.greedy_option_for(&arrived, j);
        let accepted = match proposal {
            Some(k) => {
                // Tentatively adopt row j; revert unless A·y ≤ b holds.
                // Usage accumulates in acceptance order and the candidate is
                // only added after the test, so no rollback arithmetic.
                let fits = usage
                    .iter()
                    .zip(view.inst.consumption[j][k].iter())
                    .zip(&view.inst.capacities)
                    .all(|((u, a), b)| u + a <= *b);
                if fits {
                    for (i, u) in usage.iter_mut().enumerate() {
                        *u += view.inst.consumption[j][k][i];
                    }
                    rows.push((j, k));
                }
                fits
            }
            None => false,
        };
        rounds.push(PackingRound { request: j, proposal, accepted });
    }

    Ok(PackingRun {
        assignment: Assignment { rows },
        rounds,
        arrival: arrival.to_vec(),
        sample_size,
        p,
    })
}

// ---------------------------------------------------------------------------
// Fractional oracle (evaluation path)
// ---------------------------------------------------------------------------

/// A certified optimum of the LP relaxation.
#[derive(Clone, Debug)]
pub struct FractionalOptimum {
    /// `x[j][k] ∈ [0, 1]`.
    pub x: Vec<Vec<f64>>,
    pub value: f64,
    pub duality_gap: f64,
}

/// Capability limit on `m·n·K` for the dense LP relaxation.
pub const LP_DENSE_ENTRY_LIMIT: usize = 100_000;

/// Optimal value of `max cᵀx : Ax ≤ b, Σ_k x[j][k] ≤ 1, 0 ≤ x ≤ 1` via the
/// bounded-variable simplex, certified by duality gap.
pub fn fractional_lp_optimum(inst: &PackingInstance) -> Result<FractionalOptimum> {
    let m = inst.resource_count();
    let n = inst.request_count();
    let kk = inst.option_count();
    if m * n * kk > LP_DENSE_ENTRY_LIMIT {
        return Err(Error::CapabilityExceeded(format!(
            "dense LP relaxation supports m·n·K ≤ {LP_DENSE_ENTRY_LIMIT}, got {}",
            m * n * kk
        )));
    }
    let cols = n * kk;
    let eval = inst.profit_evaluator();
    let objective: Vec<f64> = (0..cols).map(|idx| eval.weight(ElementId::new(idx))).collect();

    let mut constraints = Vec::with_capacity(m + n);
    let mut rhs = Vec::with_capacity(m + n);
    for i in 0..m {
        let mut row = vec![0.0; cols];
        for j in 0..n {
            for k in 0..kk {
                row[j * kk + k] = inst.consumption[j][k][i];
            }
        }
        constraints.push(row);
        rhs.push(inst.capacities[i]);
    }
    for j in 0..n {
        let mut row = vec![0.0; cols];
        for k in 0..kk {
            row[j * kk + k] = 1.0;
        }
        constraints.push(row);
        rhs.push(1.0);
    }

    let sol = solve_lp(&LinearProgram {
        objective,
        constraints,
        rhs,
        upper_bounds: vec![1.0; cols],
    })?;
    let x: Vec<Vec<f64>> = (0..n).map(|j| sol.x[j * kk..(j + 1) * kk].to_vec()).collect();
    Ok(FractionalOptimum { x, value: sol.objective, duality_gap: sol.duality_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{max_weight_bipartite_matching, BipartiteInstance};

    /// Uniform-consumption single-resource instance: every option costs 1.
    fn unit_instance(n: usize, capacity: f64, profits: Vec<f64>) -> PackingInstance {
        PackingInstance::new(
            vec![capacity],
            profits.into_iter().map(|c| vec![c]).collect(),
            vec![vec![vec![1.0]]; n],
        )
        .unwrap()
    }

    #[test]
    fn rejects_malformed_instances() {
        assert!(PackingInstance::new(vec![], vec![vec![1.0]], vec![vec![vec![]]]).is_err());
        assert!(PackingInstance::new(vec![0.0], vec![vec![1.0]], vec![vec![vec![1.0]]]).is_err());
        assert!(
            PackingInstance::new(vec![1.0], vec![vec![1.0], vec![1.0, 2.0]], vec![]).is_err()
        );
        assert!(PackingInstance::new(
            vec![1.0],
            vec![vec![1.0]],
            vec![vec![vec![-0.5]]]
        )
        .is_err());
    }

    #[test]
    fn sampling_probability_examples() {
        let p = sampling_probability(1, 1).unwrap();
        assert!((p - 2.0 * std::f64::consts::E / (1.0 + 2.0 * std::f64::consts::E)).abs() < 1e-15);
        assert!((p - 0.84463).abs() < 1e-5);

        let p = sampling_probability(4, 2).unwrap();
        assert!((p - 0.88490).abs() < 5e-5);

        // Large B: p tends to e/(1+e).
        let p = sampling_probability(3, 1_000_000).unwrap();
        assert!((p - std::f64::consts::E / (1.0 + std::f64::consts::E)).abs() < 1e-4);

        assert!(sampling_probability(0, 1).is_err());
        assert!(sampling_probability(1, 0).is_err());
    }

    #[test]
    fn sparsity_and_capacity_ratio_derivation() {
        let inst = PackingInstance::new(
            vec![10.0, 5.0, 7.0], // third resource never consumed
            vec![vec![1.0, 2.0]],
            vec![vec![vec![3.0, 0.0, 0.0], vec![2.0, 2.0, 0.0]]],
        )
        .unwrap();
        assert_eq!(inst.sparsity(), 2);
        // floor(10/3) = 3 and floor(5/2) = 2; the unused resource is skipped.
        assert_eq!(inst.capacity_ratio(), 2);
    }

    #[test]
    fn competitive_bound_formula() {
        let bound = packing_competitive_bound(2, 2);
        let expect = 6.0 * (1.0 + 2.0 * std::f64::consts::E * 2.0f64.sqrt());
        assert!((bound - expect).abs() < 1e-12);
        assert!((bound - 52.13).abs() < 0.01);
    }

    #[test]
    fn greedy_takes_ranked_rows_under_capacity() {
        // One unit resource, two unit requests: only the higher profit fits.
        let inst = unit_instance(2, 1.0, vec![1.0, 2.0]);
        let got = inst.view().greedy_assignment(&[true, true]);
        assert_eq!(got.rows, vec![(1, 0)]);

        // K=2, both options feasible: the higher-ranked option wins and the
        // one-option rule blocks the other.
        let inst = PackingInstance::new(
            vec![10.0],
            vec![vec![1.0, 3.0]],
            vec![vec![vec![1.0], vec![1.0]]],
        )
        .unwrap();
        let got = inst.view().greedy_assignment(&[true]);
        assert_eq!(got.rows, vec![(0, 1)]);
    }

    /// Independent re-scan checker: sort `(j,k)` by cardinal profit outside
    /// the view, replay the capacity logic, and compare.
    #[test]
    fn greedy_agrees_with_reference_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..200 {
            let (m, n, kk) = (3, 5, 2);
            let capacities: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..3.0)).collect();
            let profits: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..kk).map(|_| rng.gen_range(0..32) as f64 / 8.0).collect())
                .collect();
            let consumption: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|_| {
                    (0..kk)
                        .map(|_| (0..m).map(|_| rng.gen_range(0..8) as f64 / 8.0).collect())
                        .collect()
                })
                .collect();
            let inst =
                PackingInstance::new(capacities.clone(), profits.clone(), consumption.clone())
                    .unwrap();
            let arrived: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
            let got = inst.view().greedy_assignment(&arrived);
            assert!(inst.is_feasible(&got));

            let mut pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|j| (0..kk).map(move |k| (j, k))).collect();
            pairs.sort_by(|&(j1, k1), &(j2, k2)| {
                profits[j2][k2]
                    .partial_cmp(&profits[j1][k1])
                    .unwrap()
                    .then((j1, k1).cmp(&(j2, k2)))
            });
            let mut usage = vec![0.0; m];
            let mut taken = vec![false; n];
            let mut expected = Vec::new();
            for (j, k) in pairs {
                if !arrived[j] || taken[j] {
                    continue;
                }
                if (0..m).all(|i| usage[i] + consumption[j][k][i] <= capacities[i]) {
                    for i in 0..m {
                        usage[i] += consumption[j][k][i];
                    }
                    taken[j] = true;
                    expected.push((j, k));
                }
            }
            assert_eq!(got.rows, expected);

            // Early-exit row query agrees with the full scan.
            for target in 0..n {
                let full = got.rows.iter().find(|(j, _)| *j == target).map(|&(_, k)| k);
                assert_eq!(inst.view().greedy_option_for(&arrived, target), full);
            }
        }
    }

    #[test]
    fn unit_capacity_degenerates_to_single_choice() {
        let inst = unit_instance(6, 1.0, vec![0.5, 1.5, 2.5, 0.25, 1.0, 2.0]);
        let view = inst.view();
        for seed in 0..30 {
            let run = packing_secretary(&view, seed).unwrap();
            assert!(run.assignment.rows.len() <= 1);
            assert!(inst.is_feasible(&run.assignment));
        }
    }

    #[test]
    fn secretary_runs_are_feasible_deterministic_and_traced() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for seed in 0..60u64 {
            let (m, n, kk) = (rng.gen_range(1..4), rng.gen_range(2..8), rng.gen_range(1..3));
            let capacities: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..4.0)).collect();
            let profits: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..kk).map(|_| rng.gen_range(0.0..4.0)).collect())
                .collect();
            let consumption: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|_| {
                    (0..kk)
                        .map(|_| (0..m).map(|_| rng.gen_range(0.0..1.0)).collect())
                        .collect()
                })
                .collect();
            let inst = PackingInstance::new(capacities, profits, consumption).unwrap();
            if inst.sparsity() == 0 || inst.capacity_ratio() == 0 {
                continue;
            }
            let view = inst.view();
            let run = packing_secretary(&view, seed).unwrap();
            assert!(inst.is_feasible(&run.assignment));
            let accepted: Vec<(usize, usize)> = run
                .rounds
                .iter()
                .filter(|r| r.accepted)
                .map(|r| (r.request, r.proposal.unwrap()))
                .collect();
            assert_eq!(accepted, run.assignment.rows);
            let replay = packing_secretary(&view, seed).unwrap();
            assert_eq!(replay.assignment, run.assignment);
        }
    }

    #[test]
    fn exhaustive_three_request_expectation_matches_simulation() {
        let inst = PackingInstance::new(
            vec![1.5],
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec![vec![vec![1.0]], vec![vec![0.5]], vec![vec![1.0]]],
        )
        .unwrap();
        let view = inst.view();
        let p = sampling_probability(inst.sparsity(), inst.capacity_ratio()).unwrap();

        // The algorithm is deterministic given the arrival order, so the
        // exact expectation is the average over all 3! orders.
        let mut exact = 0.0;
        let orders = [
            [0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
        ];
        for order in &orders {
            let run = packing_secretary_with(&view, p, order).unwrap();
            exact += inst.value_of(&run.assignment);
        }
        exact /= orders.len() as f64;

        let trials = 4000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for seed in 0..trials {
            let run = packing_secretary(&view, seed).unwrap();
            let v = inst.value_of(&run.assignment);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / trials as f64;
        let var = (sumsq / trials as f64 - mean * mean).max(0.0);
        let se = (var / trials as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 3.0 * se + 1e-9,
            "exact {exact}, simulated {mean} ± {se}"
        );
    }

    #[test]
    fn fractional_oracle_hand_examples() {
        // Two requests, one unit resource, profits 3 and 2: optimum 3.
        let inst = unit_instance(2, 1.0, vec![3.0, 2.0]);
        let opt = fractional_lp_optimum(&inst).unwrap();
        assert!((opt.value - 3.0).abs() < 1e-7);

        // All profits zero.
        let inst = unit_instance(3, 1.0, vec![0.0, 0.0, 0.0]);
        assert!(fractional_lp_optimum(&inst).unwrap().value.abs() < 1e-9);

        // Non-binding capacities: every request takes its best option.
        let inst = PackingInstance::new(
            vec![1000.0],
            vec![vec![1.0, 4.0], vec![2.0, 0.5]],
            vec![vec![vec![1.0], vec![1.0]]; 2],
        )
        .unwrap();
        let opt = fractional_lp_optimum(&inst).unwrap();
        assert!((opt.value - 6.0).abs() < 1e-7);
    }

    #[test]
    fn fractional_oracle_dominates_integral_greedy() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..60 {
            let (m, n, kk) = (rng.gen_range(1..4), rng.gen_range(1..6), rng.gen_range(1..3));
            let capacities: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..3.0)).collect();
            let profits: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..kk).map(|_| rng.gen_range(0.0..2.0)).collect())
                .collect();
            let consumption: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|_| {
                    (0..kk)
                        .map(|_| (0..m).map(|_| rng.gen_range(0.0..1.0)).collect())
                        .collect()
                })
                .collect();
            let inst = PackingInstance::new(capacities, profits, consumption).unwrap();
            let opt = fractional_lp_optimum(&inst).unwrap();
            let greedy = inst.view().greedy_assignment(&vec![true; n]);
            assert!(opt.value >= inst.value_of(&greedy) - 1e-7);
        }
    }

    /// Bipartite matching encoded as packing: requests are left vertices,
    /// options are right vertices, each option consumes one unit of its
    /// right-vertex resource. The constraint matrix is totally unimodular,
    /// so the LP relaxation equals the integral optimum from the matching
    /// oracle.
    #[test]
    fn totally_unimodular_encoding_matches_integral_matching() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..40 {
            let l = rng.gen_range(1..5);
            let r = rng.gen_range(1..5);
            let mut weights = vec![vec![0.0f64; r]; l];
            let mut edges = Vec::new();
            for (a, row) in weights.iter_mut().enumerate() {
                for (b, w) in row.iter_mut().enumerate() {
                    if rng.gen_bool(0.6) {
                        *w = rng.gen_range(0..64) as f64 / 16.0;
                        edges.push((a, b, *w));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let consumption: Vec<Vec<Vec<f64>>> = (0..l)
                .map(|_| {
                    (0..r)
                        .map(|k| (0..r).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
                        .collect()
                })
                .collect();
            let packing =
                PackingInstance::new(vec![1.0; r], weights, consumption).unwrap();
            let lp_opt = fractional_lp_optimum(&packing).unwrap();
            let matching = BipartiteInstance::new(l, r, edges).unwrap();
            let integral = max_weight_bipartite_matching(&matching);
            assert!(
                (lp_opt.value - integral.value).abs() < 1e-6,
                "LP {} vs matching {}",
                lp_opt.value,
                integral.value
            );
        }
    }

    #[test]
    fn secretary_is_ordinally_pure_in_profits() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for seed in 0..40u64 {
            let (m, n, kk) = (2, 6, 2);
            let capacities: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..3.0)).collect();
            let profits: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..kk).map(|_| rng.gen_range(0.01..2.0)).collect())
                .collect();
            let consumption: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|_| {
                    (0..kk)
                        .map(|_| (0..m).map(|_| rng.gen_range(0.0..1.0)).collect())
                        .collect()
                })
                .collect();
            let transformed: Vec<Vec<f64>> = profits
                .iter()
                .map(|row| row.iter().map(|c| c * c * c + c).collect())
                .collect();
            let a = PackingInstance::new(capacities.clone(), profits, consumption.clone())
                .unwrap();
            let b = PackingInstance::new(capacities, transformed, consumption).unwrap();
            if a.sparsity() == 0 || a.capacity_ratio() == 0 {
                continue;
            }
            let run_a = packing_secretary(&a.view(), seed).unwrap();
            let run_b = packing_secretary(&b.view(), seed).unwrap();
            assert_eq!(run_a.assignment, run_b.assignment);
        }
    }

    #[test]
    fn lp_capability_limit_is_enforced() {
        let n = 600;
        let inst = PackingInstance::new(
            vec![1.0; 200],
            vec![vec![1.0]; n],
            vec![vec![vec![0.0; 200]]; n],
        )
        .unwrap();
        assert!(matches!(
            fractional_lp_optimum(&inst),
            Err(Error::CapabilityExceeded(_))
        ));
    }
}
