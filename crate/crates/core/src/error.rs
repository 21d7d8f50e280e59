use thiserror::Error;

use crate::graph::NodeId;
use crate::solution::{PathSolution, Telemetry};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Validation, format and I/O failures outside the search itself.
#[derive(Debug, Error)]
pub enum Error {
    #[error("risk {value} is outside [0, 1]")]
    RiskOutOfRange { value: f64 },

    #[error("invalid graph at {location}: {reason}")]
    InvalidGraph { location: String, reason: String },

    #[error("no edge between consecutive path nodes {from} -> {to}")]
    MissingEdge { from: NodeId, to: NodeId },

    #[error("path is empty")]
    EmptyPath,

    #[error("unsupported graph format {0:?}, expected \"apulse-graph/1\"")]
    UnsupportedFormat(String),

    #[error("invalid grid spec: {0}")]
    InvalidGridSpec(String),

    #[error("terrain generation failed: {0}")]
    Generation(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("goal {goal} is unreachable from start {start}")]
    Unreachable { start: NodeId, goal: NodeId },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("pair {pair}: {source}")]
    Pair {
        pair: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Why a solve produced no (complete) solution.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("goal {goal} is unreachable from start {start}")]
    Unreachable { start: NodeId, goal: NodeId },

    #[error("no feasible path within budget {budget} s (minimum travel time {t_min} s)")]
    NoFeasiblePath { budget: f64, t_min: f64 },

    /// Expansion cap or wall-clock limit hit. Carries the best complete
    /// path found so far, if any.
    #[error("search stopped by {limit} after {} expansions", telemetry.expanded)]
    ResourceLimit { limit: LimitKind, incumbent: Option<Box<PathSolution>>, telemetry: Telemetry },

    #[error("graph has {nodes} nodes, exhaustive enumeration is capped at {cap}")]
    OracleTooLarge { nodes: usize, cap: usize },

    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Expansions,
    WallClock,
}

impl std::fmt::Display for LimitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitKind::Expansions => f.write_str("node expansion limit"),
            LimitKind::WallClock => f.write_str("time limit"),
        }
    }
}

impl SolveError {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, SolveError::NoFeasiblePath { .. })
    }
}
