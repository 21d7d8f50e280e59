use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{path_metrics, Graph, NodeId, PathMetrics};
use crate::solver::SolverConfig;

/// Search counters. Every popped label lands in exactly one of
/// `pruned_feasibility`, `pruned_optimality`, `pruned_bucket`,
/// `goal_updates` or `expanded`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Telemetry {
    pub labels_pushed: u64,
    pub labels_popped: u64,
    pub pruned_feasibility: u64,
    pub pruned_optimality: u64,
    /// Dominance pruning: per time bucket in bucketed mode, Pareto otherwise.
    pub pruned_bucket: u64,
    pub goal_updates: u64,
    pub expanded: u64,
    pub queue_residue: u64,
    pub max_queue_len: u64,
    /// Pops whose key fell below the previous pop's key.
    pub pop_order_violations: u64,
    /// Non-dominated labels held at termination (frontier-based solvers).
    pub frontier_labels: u64,
    /// Excluded from JSON so repeated solves serialize identically.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Telemetry {
    pub fn dispositions(&self) -> u64 {
        self.pruned_feasibility + self.pruned_optimality + self.pruned_bucket + self.goal_updates + self.expanded
    }

    /// `pushed == popped + residue` and every pop has one disposition.
    pub fn is_conserved(&self) -> bool {
        self.labels_pushed == self.labels_popped + self.queue_residue && self.labels_popped == self.dispositions()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSolution {
    pub solver: String,
    pub nodes: Vec<NodeId>,
    pub total_time: f64,
    pub total_log_risk: f64,
    pub survival: f64,
    pub telemetry: Telemetry,
    #[serde(default)]
    pub config: Option<SolverConfig>,
    /// Bucket width actually used, seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket_width: Option<f64>,
    /// Set when the search was cut short and this is the best incumbent.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub partial: bool,
}

impl PathSolution {
    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn goal(&self) -> NodeId {
        *self.nodes.last().expect("solutions are non-empty")
    }

    /// Recomputes the metrics from the graph.
    pub fn rescore(&self, graph: &Graph) -> Result<PathMetrics> {
        path_metrics(graph, &self.nodes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solutions serialize")
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    (a - b).abs() / scale
}
