//! The Monte-Carlo experiment harness: instance files, seeded generators,
//! the experiment runner with competitive-ratio estimation, and the
//! ratio-preserving reduction to `{0, 1}` weights.
//!
//! Everything here lives on the *evaluation* side of the ordinal split: the
//! harness holds full instances and their sealed weights, hands algorithms
//! nothing but rank oracles, and only afterwards opens the seal to score the
//! outcome against an exact benchmark.

pub mod experiment;
pub mod format;
pub mod generate;
pub mod reduce;

pub use experiment::{
    aggregate_ratio, exact_optimum, generate_instance, parse_config, render_csv, render_summary,
    run_experiment, run_trial, serialize_config, transform_instance, Algorithm, ExperimentConfig,
    ExperimentOutcome, GeneratorParams, InstanceResult, ProblemKind, RatioEstimate, TrialOutcome,
    TrialReport,
};
pub use format::{parse_instance, serialize_instance, Instance};
pub use generate::{
    gen_bipartite, gen_general, gen_graph, gen_matroid, gen_packing, gen_unit_disk,
};
pub use reduce::{reduce_to_01_weights, ReducedWeights};
