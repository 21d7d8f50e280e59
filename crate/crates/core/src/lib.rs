//! Resource-constrained shortest paths on risk/time graphs.
//!
//! Minimizes the summed log-risk `-ln(1 - R(v))` of the nodes a path enters
//! subject to a budget on summed edge traversal time. The main solver
//! ([`solver::solve`]) is a best-first label-setting search guided by reverse
//! Dijkstra bounds, pruning by feasibility, by the incumbent, and by
//! dominance within fixed-width time buckets. [`oracle`] holds exact solvers
//! used as ground truth and runtime baselines; [`generate`] builds synthetic
//! terrain grids and benchmark instances; [`harness`] times solvers over
//! suites.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod frontier;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod heuristics;
pub mod oracle;
pub mod solution;
pub mod solver;

pub use error::{Error, LimitKind, Result, SolveError};
pub use generate::{
    benchmark_suite, generate_terrain, generate_terrain_with, instance_with_budget, make_instance, GridLayout,
    GridSpec, Instance, InstanceManifest, PairSelector, TerrainClass, VelocityMatrix,
};
pub use graph::{
    load_graph, load_graph_str, log_risk, path_metrics, save_graph, Edge, Graph, Node, NodeId, PathMetrics,
};
pub use heuristics::HeuristicTables;
pub use solution::{PathSolution, Telemetry};
pub use solver::{auto_tune_bucket_width, bucket_index, budget_sweep, solve, solve_query, SearchMode, SolverConfig};
