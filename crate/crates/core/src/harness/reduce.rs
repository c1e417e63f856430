//! Reduction of arbitrary non-negative weights to `{0, 1}` weights that can
//! only worsen an algorithm's measured ratio while leaving every ordinal
//! decision unchanged.
//!
//! Given an instance's weights, the optimal set, and the set an algorithm
//! selected (both listed best-first), the transform works on the canonical
//! rank order (weight descending, ties by identifier):
//!
//! 1. Elements ranked below the worst optimal element drop to weight 0 —
//!    they can only have helped the algorithm.
//! 2. Every surviving element's weight falls to that of the nearest optimal
//!    element at or below it, partitioning the prefix into tied classes,
//!    one per optimal element.
//! 3. Classes are resolved bottom-up. With the bottom class's weight `w` as
//!    a variable, the ratio is the linear-fractional map
//!    `(A + q·w) / (B + r·w)` — `q`/`r` counting optimal/selected elements
//!    in the class, `A`/`B` the weight the two sets hold outside it — which
//!    is monotone in `w`, so pushing `w` to whichever end of
//!    `[0, next weight up]` the derivative sign `q·B − r·A` favors never
//!    decreases the ratio. Raising merges the class into the one above;
//!    lowering zeroes it.
//! 4. The single surviving class is scaled to weight 1, which multiplies
//!    numerator and denominator alike.
//!
//! The surviving class is always a prefix of the canonical order, and the
//! returned tie-break order is the original canonical rank, so the induced
//! total order over elements is *identical* to the original: any algorithm
//! that sees only ranks must replay every decision exactly.

use crate::error::{Error, Result};
use crate::ordinal::{ElementId, HiddenWeightStore};

/// The transformed weights plus the tie-break order that makes
/// [`HiddenWeightStore::with_tie_order`] reproduce the original ranking.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedWeights {
    /// One weight per element, each exactly `0.0` or `1.0`.
    pub weights: Vec<f64>,
    /// `tie_order[e]` is element `e`'s rank in the original canonical order.
    pub tie_order: Vec<u32>,
}

impl ReducedWeights {
    /// The sealed store that replays the original ranking bit-exactly.
    pub fn store(&self) -> Result<HiddenWeightStore> {
        HiddenWeightStore::with_tie_order(self.weights.clone(), self.tie_order.clone())
    }
}

struct TiedClass {
    weight: f64,
    members: Vec<ElementId>,
    opt: usize,
    alg: usize,
}

/// Map `weights` to `{0, 1}` weights under which the ratio
/// `w(optimal) / w(selected)` is no smaller, without disturbing the rank
/// order any ordinal algorithm observes.
///
/// `optimal` and `selected` must each be listed best-first under the
/// canonical order (weight descending, ties by identifier); anything else is
/// an order-contract violation. `optimal` must be non-empty; `selected` may
/// be empty.
pub fn reduce_to_01_weights(
    weights: &[f64],
    optimal: &[ElementId],
    selected: &[ElementId],
) -> Result<ReducedWeights> {
    let store = HiddenWeightStore::new(weights.to_vec())?;
    let n = weights.len();
    if optimal.is_empty() {
        return Err(Error::OrderContract("the optimal set must not be empty".into()));
    }

    let mut ranked: Vec<ElementId> = (0..n).map(ElementId::new).collect();
    ranked.sort_by(|a, b| store.cmp_rank(*a, *b));
    let mut rank_of = vec![0usize; n];
    for (rank, e) in ranked.iter().enumerate() {
        rank_of[e.index()] = rank;
    }

    let mut is_opt = vec![false; n];
    let mut is_alg = vec![false; n];
    for (name, set, flags) in
        [("optimal", optimal, &mut is_opt), ("selected", selected, &mut is_alg)]
    {
        for e in set {
            if e.index() >= n {
                return Err(Error::InvalidParameter(format!(
                    "{name} set names element {} of {n}",
                    e.index()
                )));
            }
            flags[e.index()] = true;
        }
        for pair in set.windows(2) {
            if rank_of[pair[0].index()] >= rank_of[pair[1].index()] {
                return Err(Error::OrderContract(format!(
                    "{name} set is not listed best-first: element {} does not outrank {}",
                    pair[0].index(),
                    pair[1].index()
                )));
            }
        }
    }

    // One tied class per optimal element: everything ranked at or above it
    // but below the previous optimal element levels down to its weight.
    // Elements past the worst optimal element are zeroed outright.
    let eval = store.evaluator();
    let boundaries: Vec<usize> = optimal.iter().map(|e| rank_of[e.index()]).collect();
    let mut classes: Vec<TiedClass> = optimal
        .iter()
        .map(|e| TiedClass { weight: eval.weight(*e), members: Vec::new(), opt: 0, alg: 0 })
        .collect();
    let mut boundary = 0usize;
    for (rank, &e) in ranked.iter().enumerate() {
        while boundary < boundaries.len() && rank > boundaries[boundary] {
            boundary += 1;
        }
        if boundary == boundaries.len() {
            break;
        }
        let class = &mut classes[boundary];
        class.members.push(e);
        if is_opt[e.index()] {
            class.opt += 1;
        }
        if is_alg[e.index()] {
            class.alg += 1;
        }
    }

    let mut opt_total: f64 = classes.iter().map(|c| c.opt as f64 * c.weight).sum();
    let mut alg_total: f64 = classes.iter().map(|c| c.alg as f64 * c.weight).sum();
    while classes.len() > 1 {
        let bottom = classes.pop().expect("loop guard keeps at least two classes");
        let q = bottom.opt as f64;
        let r = bottom.alg as f64;
        let a = opt_total - q * bottom.weight;
        let b = alg_total - r * bottom.weight;
        if q * b - r * a >= 0.0 {
            // The ratio is non-decreasing in the class weight: raise the
            // class into the one above (ties raise, so an algorithm that
            // matches the optimum keeps weight everywhere).
            let up = classes.last_mut().expect("at least one class remains");
            opt_total += q * (up.weight - bottom.weight);
            alg_total += r * (up.weight - bottom.weight);
            up.members.extend(bottom.members);
            up.opt += bottom.opt;
            up.alg += bottom.alg;
        } else {
            opt_total = a;
            alg_total = b;
        }
    }

    let mut out = vec![0.0f64; n];
    for e in &classes[0].members {
        out[e.index()] = 1.0;
    }
    let tie_order: Vec<u32> = rank_of.iter().map(|r| *r as u32).collect();
    Ok(ReducedWeights { weights: out, tie_order })
}
