//! Crate-wide error type.
//!
//! The CLI maps these onto process exit codes, so the grouping here is part
//! of the external contract: configuration problems (`InvalidParameter`,
//! `Parse`) exit 2, feasibility contract violations exit 3, and exceeding an
//! exact oracle's size capability exits 4.

use crate::ordinal::ElementId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An instance or arrival sequence over zero elements was requested.
    #[error("instance has no elements")]
    EmptyInstance,

    /// `advance` was called after every element had already arrived.
    #[error("arrival sequence exhausted")]
    Exhausted,

    /// A rank query was issued before any element arrived.
    #[error("ordinal prefix is empty")]
    EmptyPrefix,

    /// An ordinal query referenced an element that has not arrived yet.
    /// Answering it would reveal information the online model does not grant.
    #[error("information leak: element {0:?} has not arrived")]
    InformationLeak(ElementId),

    /// A configuration value or function argument is out of contract.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An algorithm produced output violating its feasibility contract.
    /// This aborts an experiment; it is a bug, not a statistic.
    #[error("feasibility violation: {0}")]
    Infeasible(String),

    /// An exact oracle was asked for an instance beyond its supported size.
    #[error("oracle capability exceeded: {0}")]
    CapabilityExceeded(String),

    /// The LP solver failed to converge or certify optimality.
    #[error("lp solver: {0}")]
    Solver(String),

    /// A malformed instance or experiment file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input sets handed to the weight reduction were not ordered
    /// consistently with the global weight order.
    #[error("inconsistent input ordering: {0}")]
    OrderContract(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
