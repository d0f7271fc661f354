use thiserror::Error;

use crate::graph::{ArcId, NodeId};

/// Faults raised by the solver suite. Constraint violations that are part of
/// normal operation (instance validation, solution feasibility, model checking)
/// are returned as data instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("instance not strongly connected: no path from node {from} to node {to}")]
    NotStronglyConnected { from: NodeId, to: NodeId },

    #[error("unknown arc id {0}")]
    UnknownArc(ArcId),

    #[error("objective vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("solution is infeasible: {}", .0.join("; "))]
    Infeasible(Vec<String>),

    #[error("cannot sample from an empty candidate list")]
    EmptyCandidates,

    #[error("construction failed: capacity (no vehicle can take arc {arc})")]
    ConstructionCapacity { arc: ArcId },

    #[error("all {ants} ants failed to build a feasible solution in iteration {iteration}")]
    AllAntsFailed { ants: usize, iteration: usize },

    #[error("{what} limit exceeded: {value} > {limit}")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("assignment is missing variable `{0}`")]
    MissingVariable(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("instance generation failed after {0} attempts")]
    GenerationFailed(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("malformed csv field: {0}")]
    CsvField(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
