//! Online selection under ordinal information.
//!
//! Elements with hidden non-negative weights arrive in uniformly random
//! order; algorithms observe only a strict total order over what has arrived
//! and must make irrevocable feasibility-constrained choices. This crate
//! provides the arrival model and sealed ordinal oracles, online algorithms
//! for matroid, submodular, matching, packing and independent-set variants,
//! exact offline optima used as yardsticks, and a Monte-Carlo harness that
//! measures competitive ratios against those optima.
//!
//! The convention enforced throughout: algorithm entry points accept only
//! oracle/view types (rank queries plus structural data), never the
//! weight-bearing instances themselves. Evaluation code — exact oracles,
//! the harness, tests — holds the instances and their cardinal accessors.

pub mod error;
pub mod harness;
pub mod indepset;
pub mod lp;
pub mod matching;
pub mod matroid;
pub mod packing;
pub mod ordinal;
pub mod seeds;
pub mod submodular;

pub use error::{Error, Result};
pub use ordinal::{
    sample_arrival, ArrivalSequence, CompareOutcome, ElementId, HiddenWeightStore, OrdinalOracle,
    WeightEvaluator,
};
