//! Submodular objectives under ordinal marginal information, and the online
//! reduction to linear matroid selection.
//!
//! Algorithms here never evaluate the objective. A [`MarginalOracle`] answers
//! one kind of question: given a base solution `S`, rank all arrived elements
//! by their marginal value `f(u | S)`. Members of `S` have marginal exactly
//! zero, and the returned order carries a virtual zero marker placed after
//! every non-negative entry, so "is this marginal non-negative?" is decidable
//! ordinally even when `S` is empty — ties at zero count as non-negative.
//!
//! The online reduction samples a binomial prefix, runs greedy on it, and
//! then prices every later element by replaying greedy on the sample solution
//! plus that element alone. The step at which the element is accepted (plus
//! the marginal order at equal steps) yields a synthetic weight rank that is
//! handed to any linear-objective online matroid algorithm; elements the
//! replay rejects, and elements lost to the retention coin, are forwarded as
//! if their weight were zero, at the bottom of the order (ties by id).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::ordinal::{ArrivalSequence, ElementId};

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

/// A non-negative submodular set function with `f(∅) = 0`.
#[derive(Clone, Debug)]
pub enum SubmodularFunction {
    /// Additive weights; the degenerate case the reduction targets.
    Linear { weights: Vec<f64> },
    /// Weighted coverage: element `e` covers `covers[e]`; the value of a set
    /// is the total weight of universe items covered. Monotone.
    Coverage { universe_weights: Vec<f64>, covers: Vec<Vec<usize>> },
    /// Graph cut: elements are vertices, value is the weight of edges
    /// crossing the chosen set. Submodular but not monotone.
    Cut { vertices: usize, edges: Vec<(usize, usize, f64)> },
}

impl SubmodularFunction {
    pub fn linear(weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights)?;
        Ok(SubmodularFunction::Linear { weights })
    }

    pub fn coverage(universe_weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self> {
        validate_weights(&universe_weights)?;
        for set in &covers {
            if let Some(i) = set.iter().find(|i| **i >= universe_weights.len()) {
                return Err(Error::InvalidParameter(format!(
                    "covered item {i} outside universe of size {}",
                    universe_weights.len()
                )));
            }
        }
        Ok(SubmodularFunction::Coverage { universe_weights, covers })
    }

    pub fn cut(vertices: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        for (u, v, w) in &edges {
            if *u >= vertices || *v >= vertices {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) exceeds vertex count {vertices}"
                )));
            }
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidParameter(format!("edge weight {w} invalid")));
            }
        }
        Ok(SubmodularFunction::Cut { vertices, edges })
    }

    pub fn ground_size(&self) -> usize {
        match self {
            SubmodularFunction::Linear { weights } => weights.len(),
            SubmodularFunction::Coverage { covers, .. } => covers.len(),
            SubmodularFunction::Cut { vertices, .. } => *vertices,
        }
    }

    /// Evaluate on a set of distinct elements. Evaluation path only.
    pub fn eval(&self, set: &[ElementId]) -> f64 {
        match self {
            SubmodularFunction::Linear { weights } => {
                set.iter().map(|e| weights[e.index()]).sum()
            }
            SubmodularFunction::Coverage { universe_weights, covers } => {
                let mut covered = vec![false; universe_weights.len()];
                for e in set {
                    for &i in &covers[e.index()] {
                        covered[i] = true;
                    }
                }
                // Sum in universe order so equal covered sets give bit-equal
                // values regardless of which elements produced them.
                covered
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c)
                    .map(|(i, _)| universe_weights[i])
                    .sum()
            }
            SubmodularFunction::Cut { vertices, edges } => {
                let mut inside = vec![false; *vertices];
                for e in set {
                    inside[e.index()] = true;
                }
                edges
                    .iter()
                    .filter(|(u, v, _)| inside[*u] != inside[*v])
                    .map(|(_, _, w)| w)
                    .sum()
            }
        }
    }

    /// `f(e | base)`; exactly zero when `e` is already in `base`.
    pub fn marginal(&self, e: ElementId, base: &[ElementId]) -> f64 {
        if base.contains(&e) {
            return 0.0;
        }
        let mut grown = base.to_vec();
        grown.push(e);
        self.eval(&grown) - self.eval(base)
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "weights must be finite and non-negative, got {w}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Marginal oracle
// ---------------------------------------------------------------------------

/// One entry of a marginal ranking.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum OrderEntry {
    Element(ElementId),
    /// Virtual element of marginal exactly zero. Everything ranked above it
    /// has non-negative marginal; everything below, negative.
    ZeroMark,
}

/// A strict total order over arrived elements consistent with their
/// marginals against a fixed base, plus the zero marker.
#[derive(Clone, Debug)]
pub struct MarginalOrder {
    entries: Vec<OrderEntry>,
    zero_mark: usize,
}

impl MarginalOrder {
    pub fn entries(&self) -> &[OrderEntry] {
        &self.entries
    }

    /// Position of an element, if it has arrived.
    pub fn position(&self, e: ElementId) -> Option<usize> {
        self.entries.iter().position(|x| *x == OrderEntry::Element(e))
    }

    pub fn zero_mark_position(&self) -> usize {
        self.zero_mark
    }

    /// Elements in rank order, skipping the marker.
    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.entries.iter().filter_map(|x| match x {
            OrderEntry::Element(e) => Some(*e),
            OrderEntry::ZeroMark => None,
        })
    }
}

/// Ordinal access to marginals of a sealed objective, gated by arrival.
pub struct MarginalOracle<'a> {
    f: &'a SubmodularFunction,
    seq: ArrivalSequence,
    has_arrived: Vec<bool>,
}

impl<'a> MarginalOracle<'a> {
    pub fn new(f: &'a SubmodularFunction, seq: ArrivalSequence) -> Result<Self> {
        if f.ground_size() != seq.n() {
            return Err(Error::InvalidParameter(format!(
                "objective over {} elements but arrival sequence over {}",
                f.ground_size(),
                seq.n()
            )));
        }
        let mut has_arrived = vec![false; seq.n()];
        for e in seq.arrived() {
            has_arrived[e.index()] = true;
        }
        Ok(MarginalOracle { f, seq, has_arrived })
    }

    pub fn over_full_set(f: &'a SubmodularFunction) -> Self {
        let seq = ArrivalSequence::full(f.ground_size()).expect("non-empty ground set");
        Self::new(f, seq).expect("lengths match")
    }

    pub fn n(&self) -> usize {
        self.seq.n()
    }

    pub fn arrived_count(&self) -> usize {
        self.seq.arrived().len()
    }

    pub fn arrived(&self) -> &[ElementId] {
        self.seq.arrived()
    }

    pub fn has_arrived(&self, e: ElementId) -> bool {
        self.has_arrived.get(e.index()).copied().unwrap_or(false)
    }

    pub fn advance(&mut self) -> Result<ElementId> {
        let e = self.seq.advance()?;
        self.has_arrived[e.index()] = true;
        Ok(e)
    }

    /// Rank all arrived elements by marginal against `base` (members of
    /// `base` rank at zero), with the zero marker inserted. Refuses bases
    /// containing elements that have not arrived.
    pub fn marginal_order(&self, base: &[ElementId]) -> Result<MarginalOrder> {
        for e in base {
            if !self.has_arrived(*e) {
                return Err(Error::InformationLeak(*e));
            }
        }
        let mut scored: Vec<(ElementId, f64)> = self
            .seq
            .arrived()
            .iter()
            .map(|e| (*e, self.f.marginal(*e, base)))
            .collect();
        scored.sort_by(|(e1, m1), (e2, m2)| {
            m2.partial_cmp(m1).expect("marginals are finite").then(e1.cmp(e2))
        });
        let zero_mark = scored.iter().position(|(_, m)| *m < 0.0).unwrap_or(scored.len());
        let mut entries: Vec<OrderEntry> =
            scored.into_iter().map(|(e, _)| OrderEntry::Element(e)).collect();
        entries.insert(zero_mark, OrderEntry::ZeroMark);
        Ok(MarginalOrder { entries, zero_mark })
    }
}

/// Is `f(u | base) >= 0`, decided ordinally: `u` at or above the zero marker.
pub fn positivity_test(oracle: &MarginalOracle, u: ElementId, base: &[ElementId]) -> Result<bool> {
    if !oracle.has_arrived(u) {
        return Err(Error::InformationLeak(u));
    }
    let order = oracle.marginal_order(base)?;
    Ok(order.position(u).expect("u has arrived") < order.zero_mark_position())
}

// ---------------------------------------------------------------------------
// Greedy
// ---------------------------------------------------------------------------

/// Greedy over an arrived candidate set: repeatedly take the maximum-marginal
/// remaining candidate; keep it if the solution stays independent and the
/// marginal is non-negative. `accepted[s - 1]` is the element added at step
/// `s`.
pub fn greedy_submodular(
    oracle: &MarginalOracle,
    matroid: &Matroid,
    candidates: &[ElementId],
) -> Result<Vec<ElementId>> {
    for e in candidates {
        if !oracle.has_arrived(*e) {
            return Err(Error::InformationLeak(*e));
        }
    }
    let mut remaining: Vec<ElementId> = candidates.to_vec();
    let mut solution: Vec<ElementId> = Vec::new();
    while !remaining.is_empty() {
        let order = oracle.marginal_order(&solution)?;
        let (pick_pos, u) = order
            .elements()
            .enumerate()
            .find(|(_, e)| remaining.contains(e))
            .expect("remaining candidates have arrived");
        // `enumerate` above counts elements only; re-derive the entry
        // position to compare against the marker.
        let entry_pos = if pick_pos < order.zero_mark_position() {
            pick_pos
        } else {
            pick_pos + 1
        };
        remaining.retain(|e| *e != u);
        let non_negative = entry_pos < order.zero_mark_position();
        solution.push(u);
        if !non_negative || !matroid.is_independent(&solution) {
            solution.pop();
        }
    }
    Ok(solution)
}

// ---------------------------------------------------------------------------
// Linear-objective online algorithms (plug-ins for the reduction)
// ---------------------------------------------------------------------------

/// An online matroid algorithm for *linear* objectives in the ordinal model.
/// It sees each arrival together with the rank order over everything
/// forwarded so far and must decide irrevocably; implementations are
/// responsible for keeping their accepted set independent.
pub trait LinearOrdinal {
    /// Called once before the stream with the number of elements to come.
    fn begin(&mut self, n: usize);
    /// `ranked_so_far` lists all forwarded elements best-first, including
    /// `element` itself; `accepted` is this algorithm's current output set.
    fn decide(
        &mut self,
        element: ElementId,
        ranked_so_far: &[ElementId],
        accepted: &[ElementId],
        matroid: &Matroid,
    ) -> bool;
}

/// Classic 1/e single-choice secretary: observe `⌊n/e⌋` elements, then take
/// the first one that is best-so-far (at most one acceptance).
#[derive(Default)]
pub struct SingleChoiceSecretary {
    sample_size: usize,
    seen: usize,
    done: bool,
}

impl LinearOrdinal for SingleChoiceSecretary {
    fn begin(&mut self, n: usize) {
        self.sample_size = (n as f64 / std::f64::consts::E).floor() as usize;
        self.seen = 0;
        self.done = false;
    }

    fn decide(
        &mut self,
        element: ElementId,
        ranked_so_far: &[ElementId],
        accepted: &[ElementId],
        matroid: &Matroid,
    ) -> bool {
        self.seen += 1;
        if self.done || self.seen <= self.sample_size {
            return false;
        }
        if ranked_so_far.first() != Some(&element) {
            return false;
        }
        let mut grown = accepted.to_vec();
        grown.push(element);
        if matroid.is_independent(&grown) {
            self.done = true;
            true
        } else {
            false
        }
    }
}

/// Sample-then-threshold: observe `⌊n/e⌋` elements, set the bar at the best
/// of them, then greedily accept anything outranking the bar while
/// independence allows. With an empty sample the bar is vacuous.
#[derive(Default)]
pub struct SampleThresholdSecretary {
    sample_size: usize,
    seen: usize,
    sampled: Vec<ElementId>,
}

impl LinearOrdinal for SampleThresholdSecretary {
    fn begin(&mut self, n: usize) {
        self.sample_size = (n as f64 / std::f64::consts::E).floor() as usize;
        self.seen = 0;
        self.sampled.clear();
    }

    fn decide(
        &mut self,
        element: ElementId,
        ranked_so_far: &[ElementId],
        accepted: &[ElementId],
        matroid: &Matroid,
    ) -> bool {
        self.seen += 1;
        if self.seen <= self.sample_size {
            self.sampled.push(element);
            return false;
        }
        // The bar is the best-ranked sampled element; relative order of two
        // fixed elements never changes as more arrive, so recomputing its
        // position each round is sound.
        let clears_bar = match ranked_so_far.iter().position(|e| self.sampled.contains(e)) {
            Some(bar_pos) => {
                let u_pos = ranked_so_far.iter().position(|e| *e == element).expect("present");
                u_pos < bar_pos
            }
            None => true,
        };
        if !clears_bar {
            return false;
        }
        let mut grown = accepted.to_vec();
        grown.push(element);
        matroid.is_independent(&grown)
    }
}

// ---------------------------------------------------------------------------
// The online reduction
// ---------------------------------------------------------------------------

/// How one element was forwarded to the linear algorithm.
#[derive(Clone, Debug)]
pub struct ForwardedElement {
    pub element: ElementId,
    /// Step at which the replayed greedy accepted it, if it was accepted and
    /// survived the retention coin; `None` means it was forwarded as if its
    /// weight were zero.
    pub greedy_step: Option<usize>,
    /// The replay's solution immediately before this element was added
    /// (empty for weight-zero forwards). Recorded for verification.
    pub basis_prefix: Vec<ElementId>,
}

/// Everything the reduction produced, for scoring and verification.
#[derive(Clone, Debug)]
pub struct ReductionRun {
    /// The algorithm's output, `Q ∩ N`.
    pub selected: Vec<ElementId>,
    /// The rejected binomial sample `L`.
    pub sample: Vec<ElementId>,
    /// Elements that passed their replay and the retention coin (`N`).
    pub retained: Vec<ElementId>,
    /// The linear algorithm's acceptances (`Q`).
    pub linear_accepted: Vec<ElementId>,
    pub forwarded: Vec<ForwardedElement>,
    /// Final synthetic rank order over all forwarded elements, best first.
    pub final_order: Vec<ElementId>,
}

/// Online submodular selection by reduction to a linear algorithm.
///
/// Rejects a `Binomial(n, 1/2)` prefix `L` and computes `M = Greedy(L)`.
/// Each later element `u` is priced by replaying greedy on `M ∪ {u}`: if the
/// replay accepts it at step `s`, then with probability `p` it enters the
/// retained set `N` and is ranked among forwarded elements by `(s, position
/// in the marginal order against its replay prefix)`; otherwise it is
/// forwarded with synthetic weight zero (bottom of the order, ties by id).
/// The linear algorithm sees only the synthetic ranks; its output `Q` is
/// intersected with `N`.
pub fn online_p_reduction(
    oracle: &mut MarginalOracle,
    matroid: &Matroid,
    p: f64,
    linear: &mut dyn LinearOrdinal,
    rng: &mut ChaCha8Rng,
) -> Result<ReductionRun> {
    let x = Binomial::new(oracle.n() as u64, 0.5)
        .expect("valid binomial")
        .sample(rng) as usize;
    online_p_reduction_with_sample(oracle, matroid, p, linear, x, rng)
}

/// [`online_p_reduction`] with the sample size pinned instead of drawn from
/// `Binomial(n, 1/2)`; `rng` then only drives the retention coins. This is
/// what exhaustive-expectation checks condition on.
pub fn online_p_reduction_with_sample(
    oracle: &mut MarginalOracle,
    matroid: &Matroid,
    p: f64,
    linear: &mut dyn LinearOrdinal,
    sample_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ReductionRun> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("retention probability {p} outside [0,1]")));
    }
    let n = oracle.n();
    if oracle.arrived_count() != 0 {
        return Err(Error::InvalidParameter(
            "reduction must drive the arrival sequence from the start".into(),
        ));
    }
    if sample_size > n {
        return Err(Error::InvalidParameter(format!(
            "sample size {sample_size} exceeds ground set size {n}"
        )));
    }
    let x = sample_size;

    let mut sample = Vec::with_capacity(x);
    for _ in 0..x {
        sample.push(oracle.advance()?);
    }
    let base_solution = greedy_submodular(oracle, matroid, &sample)?;

    linear.begin(n - x);
    // Synthetic order state: accepted forwards sorted by (step, marginal
    // order within equal step), then weight-zero forwards sorted by id.
    let mut priced: Vec<(ElementId, usize)> = Vec::new(); // (element, step)
    let mut bottom: Vec<ElementId> = Vec::new();
    let mut forwarded = Vec::new();
    let mut retained = Vec::new();
    let mut linear_accepted: Vec<ElementId> = Vec::new();

    while let Ok(u) = oracle.advance() {
        let mut replay_ground = base_solution.clone();
        replay_ground.push(u);
        let replay = greedy_submodular(oracle, matroid, &replay_ground)?;
        let entry = match replay.iter().position(|e| *e == u) {
            Some(idx) if rng.gen_bool(p) => {
                let step = idx + 1;
                let prefix = replay[..idx].to_vec();
                debug_assert_eq!(
                    prefix,
                    base_solution[..idx],
                    "replay must retrace the sample solution before inserting u"
                );
                // Insert among equal-step forwards by marginal order against
                // the shared prefix; after all later-step forwards... the
                // list is sorted ascending by step, then by within-step rank.
                let order = oracle.marginal_order(&prefix)?;
                let u_pos = order.position(u).expect("u has arrived");
                let insert_at = priced
                    .iter()
                    .position(|(other, other_step)| match other_step.cmp(&step) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => {
                            let other_pos =
                                order.position(*other).expect("forwarded elements arrived");
                            u_pos < other_pos
                        }
                    })
                    .unwrap_or(priced.len());
                priced.insert(insert_at, (u, step));
                retained.push(u);
                ForwardedElement { element: u, greedy_step: Some(step), basis_prefix: prefix }
            }
            _ => {
                let at = bottom.partition_point(|e| *e < u);
                bottom.insert(at, u);
                ForwardedElement { element: u, greedy_step: None, basis_prefix: Vec::new() }
            }
        };
        forwarded.push(entry);

        let mut ranked: Vec<ElementId> = priced.iter().map(|(e, _)| *e).collect();
        ranked.extend(bottom.iter().copied());
        if linear.decide(u, &ranked, &linear_accepted, matroid) {
            linear_accepted.push(u);
            if !matroid.is_independent(&linear_accepted) {
                return Err(Error::Infeasible(
                    "linear algorithm accepted a dependent set".into(),
                ));
            }
        }
    }

    let selected: Vec<ElementId> = linear_accepted
        .iter()
        .copied()
        .filter(|e| retained.contains(e))
        .collect();
    debug_assert!(matroid.is_independent(&selected));

    let mut final_order: Vec<ElementId> = priced.iter().map(|(e, _)| *e).collect();
    final_order.extend(bottom.iter().copied());

    Ok(ReductionRun {
        selected,
        sample,
        retained,
        linear_accepted,
        forwarded,
        final_order,
    })
}
