//! Crate-wide error type.

use crate::game::{Agent, ValidationReport};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot parse rational `{text}`: {reason}")]
    BadRational { text: String, reason: String },

    #[error("game spec failed validation:\n{0}")]
    InvalidGame(ValidationReport),

    #[error("{agent} observation `{obs}` has zero probability; conditioning on it is undefined")]
    ZeroProbabilityObservation { agent: Agent, obs: String },

    #[error("unknown {agent} observation `{obs}`")]
    UnknownObservation { agent: Agent, obs: String },

    #[error("policy covers {got} {agent} observations but the game declares {expected}")]
    PolicySize {
        agent: Agent,
        got: usize,
        expected: usize,
    },

    #[error("distribution over actions for {agent} observation index {obs} does not sum to 1 or has a negative entry")]
    BadActionDistribution { agent: Agent, obs: usize },

    #[error("enumeration would evaluate {candidates} candidates, over the cap of {cap}; raise the cap to force the search")]
    EnumerationCap { candidates: u128, cap: u64 },

    #[error("robot policies compare over different observation sets ({left} vs {right} observations)")]
    MismatchedObservationSets { left: usize, right: usize },

    #[error("message system sizes must be at least 1")]
    EmptyMessageSet,

    #[error("message index {index} out of range for {agent} message set of size {size}")]
    MessageOutOfRange {
        agent: Agent,
        index: usize,
        size: usize,
    },

    #[error("{side} message set of size {messages} cannot transmit {observations} observations verbatim")]
    MessageSetTooSmall {
        side: Agent,
        messages: usize,
        observations: usize,
    },

    #[error("the robot does not determine the human observation on the given subset (observation index {obs} has several possible human observations)")]
    KnowsPreconditionFailed { obs: usize },

    #[error("the knows-that-knows condition fails on the given subset: human observation index {obs} does not determine the robot observation")]
    KnowsThatKnowsPreconditionFailed { obs: usize },

    #[error("observation structures have mismatched dimensions: {reason}")]
    StructureMismatch { reason: String },

    #[error("garbling kernel has invalid shape or rows that do not sum to 1: {reason}")]
    BadGarbling { reason: String },

    #[error("coordinated-garbling search needs {points} deterministic kernel pairs, over the cap of {cap}")]
    ExtremePointCap { points: u128, cap: u64 },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("graph has a self-loop at `{vertex}`")]
    SelfLoop { vertex: String },

    #[error("edge references undeclared vertex `{vertex}`")]
    UnknownVertex { vertex: String },

    #[error("`{0}` does not partition the vertex set")]
    NotAPartition(String),

    #[error("policy plays ACT on observation `{obs}`; unilateral action is dominated in reduction games, so the cut bound does not apply")]
    ReductionPolicyActs { obs: String },

    #[error("brute-force cut search supports at most {cap} vertices, got {got}")]
    GraphTooLarge { got: usize, cap: usize },

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("parameter `{name}` = {value} is outside the valid range {range}")]
    ParameterOutOfRange {
        name: String,
        value: String,
        range: String,
    },

    #[error("game file is malformed: {0}")]
    FileFormat(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
