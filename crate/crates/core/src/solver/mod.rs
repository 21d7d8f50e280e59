//! APULSE: best-first label setting on log-risk, guided by reverse-Dijkstra
//! bounds, with feasibility, incumbent and time-bucket dominance pruning.

mod label;

use std::collections::hash_map::Entry;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use label::QueueEntry;
pub use label::{Label, LabelArena, LabelId};

use crate::error::{Error, LimitKind, SolveError};
use crate::frontier::ParetoFrontier;
use crate::generate::Instance;
use crate::graph::{Graph, NodeId};
use crate::heuristics::HeuristicTables;
use crate::solution::{PathSolution, Telemetry};

pub const DEFAULT_TARGET_BUCKETS: u32 = 8192;
pub const DEFAULT_BUCKET_CLAMP: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Dominance per `(node, floor(g_t / width))` bucket.
    #[default]
    Bucketed,
    /// Full Pareto dominance per node; always optimal.
    Exact,
}

/// Switches for the three pruning stages. All on by default; turning one
/// off never changes an exact-mode objective, only the work done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PruningStages {
    pub feasibility: bool,
    pub optimality: bool,
    pub dominance: bool,
}

impl Default for PruningStages {
    fn default() -> Self {
        PruningStages { feasibility: true, optimality: true, dominance: true }
    }
}

impl PruningStages {
    fn all_enabled(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub target_buckets: u32,
    /// Lower bound on the bucket width, seconds.
    pub bucket_clamp: f64,
    pub mode: SearchMode,
    pub early_exit: bool,
    pub node_expansion_limit: Option<u64>,
    /// Wall-clock cap in seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
    #[serde(skip_serializing_if = "PruningStages::all_enabled")]
    pub pruning: PruningStages,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            target_buckets: DEFAULT_TARGET_BUCKETS,
            bucket_clamp: DEFAULT_BUCKET_CLAMP,
            mode: SearchMode::Bucketed,
            early_exit: true,
            node_expansion_limit: None,
            time_limit: None,
            pruning: PruningStages::default(),
        }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig { mode: SearchMode::Exact, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.target_buckets < 1 {
            return Err(Error::InvalidConfig("target_buckets must be at least 1".into()));
        }
        if !(self.bucket_clamp > 0.0) || !self.bucket_clamp.is_finite() {
            return Err(Error::InvalidConfig(format!("bucket_clamp must be positive, got {}", self.bucket_clamp)));
        }
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return Err(Error::InvalidConfig(format!("time_limit must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn solver_name(&self) -> &'static str {
        match self.mode {
            SearchMode::Bucketed => "apulse",
            SearchMode::Exact => "apulse-exact",
        }
    }
}

/// Relative slack on budget comparisons. Forward and reverse time sums over
/// the same edges can differ in the last bits; without slack a budget equal
/// to the minimum travel time can reject its own fastest path.
pub const BUDGET_RTOL: f64 = 1e-12;

pub fn exceeds_budget(time: f64, budget: f64) -> bool {
    time > budget + BUDGET_RTOL * budget.abs()
}

/// Bucket width `max(clamp, budget / target_buckets)`.
pub fn auto_tune_bucket_width(budget: f64, target_buckets: u32, bucket_clamp: f64) -> Result<f64, Error> {
    if !(budget > 0.0) {
        return Err(Error::InvalidConfig(format!("budget must be positive, got {budget}")));
    }
    if target_buckets < 1 {
        return Err(Error::InvalidConfig("target_buckets must be at least 1".into()));
    }
    Ok(bucket_clamp.max(budget / target_buckets as f64))
}

/// `floor(g_t / width)`. Exact multiples land in the upper bucket.
#[inline]
pub fn bucket_index(g_t: f64, width: f64) -> u64 {
    (g_t / width).floor() as u64
}

pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<PathSolution, SolveError> {
    solve_query(&instance.graph, instance.start, instance.goal, instance.budget, config)
}

pub(crate) fn check_endpoints(graph: &Graph, start: NodeId, goal: NodeId) -> Result<(), Error> {
    for (what, id) in [("start", start), ("goal", goal)] {
        if !graph.contains(id) {
            return Err(Error::InvalidInstance(format!(
                "{what} node {id} not in graph of {} nodes",
                graph.node_count()
            )));
        }
    }
    Ok(())
}

pub fn solve_query(
    graph: &Graph,
    start: NodeId,
    goal: NodeId,
    budget: f64,
    config: &SolverConfig,
) -> Result<PathSolution, SolveError> {
    let clock = Instant::now();
    config.validate()?;
    check_endpoints(graph, start, goal)?;
    if budget.is_nan() {
        return Err(Error::InvalidConfig("budget is NaN".into()).into());
    }
    let tables = HeuristicTables::compute(graph, goal);
    let t_min = tables.h_t[start.index()];
    if t_min.is_infinite() {
        return Err(SolveError::Unreachable { start, goal });
    }
    if exceeds_budget(t_min, budget) {
        return Err(SolveError::NoFeasiblePath { budget, t_min });
    }
    let dominance = match config.mode {
        SearchMode::Bucketed => {
            let width = auto_tune_bucket_width(budget, config.target_buckets, config.bucket_clamp)?;
            Dominance::Buckets { width, best: FxHashMap::default() }
        }
        SearchMode::Exact => Dominance::Pareto(vec![ParetoFrontier::new(); graph.node_count()]),
    };
    Search { graph, tables: &tables, start, goal, budget, config, dominance, clock }.run()
}

enum Dominance {
    Buckets { width: f64, best: FxHashMap<(u32, u64), f64> },
    Pareto(Vec<ParetoFrontier<()>>),
}

impl Dominance {
    /// Records the label and returns true when it is dominated instead.
    fn prune(&mut self, node: NodeId, g_t: f64, g_ell: f64) -> bool {
        match self {
            Dominance::Buckets { width, best } => match best.entry((node.0, bucket_index(g_t, *width))) {
                Entry::Occupied(mut slot) => {
                    if g_ell >= *slot.get() {
                        true
                    } else {
                        slot.insert(g_ell);
                        false
                    }
                }
                Entry::Vacant(slot) => {
                    slot.insert(g_ell);
                    false
                }
            },
            Dominance::Pareto(frontiers) => !frontiers[node.index()].insert(g_t, g_ell, (), |_| {}),
        }
    }

    fn width(&self) -> Option<f64> {
        match self {
            Dominance::Buckets { width, .. } => Some(*width),
            Dominance::Pareto(_) => None,
        }
    }

    fn stored(&self) -> u64 {
        match self {
            Dominance::Buckets { best, .. } => best.len() as u64,
            Dominance::Pareto(f) => f.iter().map(|x| x.len() as u64).sum(),
        }
    }
}

struct Search<'a> {
    graph: &'a Graph,
    tables: &'a HeuristicTables,
    start: NodeId,
    goal: NodeId,
    budget: f64,
    config: &'a SolverConfig,
    dominance: Dominance,
    clock: Instant,
}

const CLOCK_CHECK_INTERVAL: u64 = 1024;

impl Search<'_> {
    fn run(mut self) -> Result<PathSolution, SolveError> {
        let lr = self.graph.log_risks();
        let h_t = &self.tables.h_t;
        let h_ell = &self.tables.h_ell;
        let stages = self.config.pruning;
        let time_limit = self.config.time_limit.map(Duration::from_secs_f64);

        let mut tel = Telemetry::default();
        let mut arena = LabelArena::new();
        let mut queue = BinaryHeap::new();
        let root = arena.push(h_ell[self.start.index()], 0.0, 0.0, self.start, None);
        queue.push(QueueEntry::new(arena.get(root), root));
        tel.labels_pushed = 1;

        let mut best_g_ell = f64::INFINITY;
        let mut incumbent: Option<LabelId> = None;
        let mut last_f = f64::NEG_INFINITY;
        let mut stopped: Option<LimitKind> = None;

        loop {
            if self.config.node_expansion_limit.is_some_and(|cap| tel.expanded >= cap) {
                stopped = Some(LimitKind::Expansions);
                break;
            }
            if let Some(limit) = time_limit {
                if tel.labels_popped % CLOCK_CHECK_INTERVAL == 0 && self.clock.elapsed() > limit {
                    stopped = Some(LimitKind::WallClock);
                    break;
                }
            }
            let Some(entry) = queue.pop() else { break };
            tel.labels_popped += 1;
            if entry.f < last_f - 1e-12 * last_f.abs().max(1.0) {
                tel.pop_order_violations += 1;
            }
            last_f = last_f.max(entry.f);

            let id = LabelId(entry.label);
            let node = NodeId(entry.node);
            let (g_t, g_ell, f) = (entry.g_t, entry.g_ell, entry.f);

            if stages.feasibility && exceeds_budget(g_t + h_t[node.index()], self.budget) {
                tel.pruned_feasibility += 1;
                continue;
            }
            if stages.optimality && f >= best_g_ell {
                tel.pruned_optimality += 1;
                if self.config.early_exit {
                    break;
                }
                continue;
            }
            if stages.dominance && self.dominance.prune(node, g_t, g_ell) {
                tel.pruned_bucket += 1;
                continue;
            }
            if node == self.goal {
                // Only reachable with an over-budget time when feasibility pruning is off.
                if exceeds_budget(g_t, self.budget) {
                    tel.pruned_feasibility += 1;
                    continue;
                }
                if g_ell < best_g_ell {
                    best_g_ell = g_ell;
                    incumbent = Some(id);
                }
                tel.goal_updates += 1;
                continue;
            }

            tel.expanded += 1;
            for e in self.graph.out_edges(node) {
                let cost = lr[e.to.index()];
                if cost.is_infinite() {
                    continue;
                }
                let g_ell2 = g_ell + cost;
                let child = arena.push(g_ell2 + h_ell[e.to.index()], g_ell2, g_t + e.time, e.to, Some(id));
                queue.push(QueueEntry::new(arena.get(child), child));
                tel.labels_pushed += 1;
            }
            tel.max_queue_len = tel.max_queue_len.max(queue.len() as u64);
        }

        tel.queue_residue = queue.len() as u64;
        tel.frontier_labels = self.dominance.stored();
        tel.wall_time = self.clock.elapsed();

        let solution = incumbent.map(|id| {
            let label = arena.get(id);
            PathSolution {
                solver: self.config.solver_name().to_string(),
                nodes: arena.reconstruct_path(id),
                total_time: label.g_t,
                total_log_risk: label.g_ell,
                survival: (-label.g_ell).exp(),
                telemetry: tel.clone(),
                config: Some(self.config.clone()),
                bucket_width: self.dominance.width(),
                partial: stopped.is_some(),
            }
        });
        match (stopped, solution) {
            (Some(limit), incumbent) => {
                Err(SolveError::ResourceLimit { limit, incumbent: incumbent.map(Box::new), telemetry: tel })
            }
            (None, Some(solution)) => Ok(solution),
            (None, None) => Err(SolveError::NoFeasiblePath { budget: self.budget, t_min: h_t[self.start.index()] }),
        }
    }
}

#[derive(Debug)]
pub struct SweepEntry {
    pub budget: f64,
    pub result: Result<PathSolution, SolveError>,
}

/// Independent solves at each budget, returned in ascending budget order.
pub fn budget_sweep(
    graph: &Graph,
    start: NodeId,
    goal: NodeId,
    budgets: &[f64],
    config: &SolverConfig,
) -> Result<Vec<SweepEntry>, Error> {
    if budgets.is_empty() {
        return Err(Error::InvalidConfig("budget sweep needs at least one budget".into()));
    }
    let mut sorted = budgets.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted
        .into_par_iter()
        .map(|budget| SweepEntry { budget, result: solve_query(graph, start, goal, budget, config) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_metrics, Edge, Node};

    /// s(0) -> a(1) -> g(3) takes 10 s, s -> b(2) -> g takes 4 s.
    pub(crate) fn diamond() -> Graph {
        let risk = |lr: f64| 1.0 - (-lr).exp();
        let nodes = vec![
            Node::new(NodeId(0), 0.0, 0.0, 0.0, None).unwrap(),
            Node::new(NodeId(1), 1.0, 1.0, risk(0.05), None).unwrap(),
            Node::new(NodeId(2), 1.0, -1.0, risk(0.4), None).unwrap(),
            Node::new(NodeId(3), 2.0, 0.0, risk(0.01), None).unwrap(),
        ];
        let e = |a, b, time| Edge { from: NodeId(a), to: NodeId(b), time };
        Graph::new(nodes, vec![e(0, 1, 5.0), e(1, 3, 5.0), e(0, 2, 2.0), e(2, 3, 2.0)]).unwrap()
    }

    #[test]
    fn auto_tune_examples() {
        assert_eq!(auto_tune_bucket_width(3600.0, 8192, 1.0).unwrap(), 1.0);
        assert_eq!(auto_tune_bucket_width(81920.0, 8192, 1.0).unwrap(), 10.0);
        assert_eq!(auto_tune_bucket_width(8192.0, 8192, 1.0).unwrap(), 1.0);
        assert!(auto_tune_bucket_width(0.0, 8192, 1.0).is_err());
        assert!(auto_tune_bucket_width(-5.0, 8192, 1.0).is_err());
        assert!(auto_tune_bucket_width(10.0, 0, 1.0).is_err());
    }

    #[test]
    fn bucket_index_examples() {
        assert_eq!(bucket_index(0.0, 3.7), 0);
        assert_eq!(bucket_index(10.0, 4.0), 2);
        assert_eq!(bucket_index(8.0, 4.0), 2);
        assert_eq!(bucket_index(7.999, 4.0), 1);
        assert_eq!(bucket_index(1e6, f64::INFINITY), 0);
    }

    #[test]
    fn diamond_tight_budget_takes_risky_route() {
        for config in [SolverConfig::default(), SolverConfig::exact()] {
            let sol = solve_query(&diamond(), NodeId(0), NodeId(3), 5.0, &config).unwrap();
            assert_eq!(sol.nodes, vec![NodeId(0), NodeId(2), NodeId(3)]);
            assert_eq!(sol.total_time, 4.0);
            assert!((sol.total_log_risk - 0.41).abs() < 1e-12);
        }
    }

    #[test]
    fn diamond_loose_budget_takes_safe_route() {
        for config in [SolverConfig::default(), SolverConfig::exact()] {
            let sol = solve_query(&diamond(), NodeId(0), NodeId(3), 10.0, &config).unwrap();
            assert_eq!(sol.nodes, vec![NodeId(0), NodeId(1), NodeId(3)]);
            assert_eq!(sol.total_time, 10.0);
            assert!((sol.total_log_risk - 0.06).abs() < 1e-12);
            assert!((sol.survival - (-0.06f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn below_t_min_is_infeasible() {
        let err = solve_query(&diamond(), NodeId(0), NodeId(3), 3.9, &SolverConfig::default()).unwrap_err();
        match err {
            SolveError::NoFeasiblePath { t_min, .. } => assert_eq!(t_min, 4.0),
            other => panic!("unexpected {other:?}"),
        }
        let err = solve_query(&diamond(), NodeId(0), NodeId(3), 0.0, &SolverConfig::default()).unwrap_err();
        assert!(err.is_infeasible());
    }

    #[test]
    fn unreachable_is_distinct() {
        let err = solve_query(&diamond(), NodeId(3), NodeId(0), 100.0, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, SolveError::Unreachable { .. }));
        let err = solve_query(&diamond(), NodeId(0), NodeId(9), 100.0, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, SolveError::Invalid(_)));
    }

    #[test]
    fn impassable_node_is_avoided() {
        let g = diamond().with_risks(&[(NodeId(1), 1.0)]).unwrap();
        let sol = solve_query(&g, NodeId(0), NodeId(3), 100.0, &SolverConfig::exact()).unwrap();
        assert_eq!(sol.nodes, vec![NodeId(0), NodeId(2), NodeId(3)]);
    }

    #[test]
    fn reconstructed_metrics_match_labels() {
        let g = diamond();
        for budget in [4.0, 5.0, 10.0, 50.0] {
            let sol = solve_query(&g, NodeId(0), NodeId(3), budget, &SolverConfig::default()).unwrap();
            let m = path_metrics(&g, &sol.nodes).unwrap();
            assert_eq!(m.total_time, sol.total_time);
            assert_eq!(m.total_log_risk, sol.total_log_risk);
            assert!(sol.telemetry.is_conserved(), "{:?}", sol.telemetry);
        }
    }

    #[test]
    fn start_equals_goal() {
        let sol = solve_query(&diamond(), NodeId(2), NodeId(2), 1.0, &SolverConfig::default()).unwrap();
        assert_eq!(sol.nodes, vec![NodeId(2)]);
        assert_eq!(sol.total_log_risk, 0.0);
    }

    #[test]
    fn expansion_limit_carries_incumbent() {
        let config = SolverConfig { node_expansion_limit: Some(0), ..SolverConfig::default() };
        match solve_query(&diamond(), NodeId(0), NodeId(3), 10.0, &config).unwrap_err() {
            SolveError::ResourceLimit { limit, incumbent, telemetry } => {
                assert_eq!(limit, LimitKind::Expansions);
                assert!(incumbent.is_none());
                assert!(telemetry.is_conserved());
            }
            other => panic!("unexpected {other:?}"),
        }
        // Without optimality pruning, s, a and b are all expanded; the goal via a
        // is already the incumbent when the cap of three stops the search.
        let config = SolverConfig {
            node_expansion_limit: Some(3),
            pruning: PruningStages { optimality: false, ..PruningStages::default() },
            ..SolverConfig::exact()
        };
        match solve_query(&diamond(), NodeId(0), NodeId(3), 10.0, &config).unwrap_err() {
            SolveError::ResourceLimit { incumbent, telemetry, .. } => {
                let inc = incumbent.expect("goal reached before the cap");
                assert!(inc.partial);
                assert_eq!(inc.nodes, vec![NodeId(0), NodeId(1), NodeId(3)]);
                assert_eq!(telemetry.expanded, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_orders_budgets_and_keeps_errors() {
        let sweep = budget_sweep(&diamond(), NodeId(0), NodeId(3), &[10.0, 1.0, 4.0], &SolverConfig::exact()).unwrap();
        let budgets: Vec<f64> = sweep.iter().map(|e| e.budget).collect();
        assert_eq!(budgets, vec![1.0, 4.0, 10.0]);
        assert!(sweep[0].result.as_ref().unwrap_err().is_infeasible());
        let lr: Vec<f64> = sweep[1..].iter().map(|e| e.result.as_ref().unwrap().total_log_risk).collect();
        assert!((lr[0] - 0.41).abs() < 1e-12 && (lr[1] - 0.06).abs() < 1e-12);
        assert!(budget_sweep(&diamond(), NodeId(0), NodeId(3), &[], &SolverConfig::exact()).is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: SolverConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, SolverConfig::default());
        let cfg: SolverConfig = serde_json::from_str(r#"{"mode":"exact","target_buckets":16}"#).unwrap();
        assert_eq!(cfg.mode, SearchMode::Exact);
        assert_eq!(cfg.target_buckets, 16);
        assert!(SolverConfig { target_buckets: 0, ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig { bucket_clamp: 0.0, ..SolverConfig::default() }.validate().is_err());
    }
}
