//! Exact reference solvers, kept independent of the APULSE search loop.
//!
//! * [`exact_label_setting`]: bi-criteria label setting in time order with
//!   per-node Pareto frontiers. Its time bound comes from Bellman-Ford rather
//!   than the heuristics module.
//! * [`constrained_astar_reference`]: A*-guided label setting on log-risk with
//!   Pareto dominance and incumbent pruning, no bucketing. The runtime
//!   baseline.
//! * [`exhaustive_enumerate`]: depth-first enumeration of simple paths for
//!   graphs of a few dozen nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, LimitKind, SolveError};
use crate::frontier::ParetoFrontier;
use crate::generate::Instance;
use crate::graph::{Graph, NodeId};
use crate::heuristics::HeuristicTables;
use crate::solution::{PathSolution, Telemetry};
use crate::solver::{check_endpoints, exceeds_budget};

pub const EXHAUSTIVE_NODE_CAP: usize = 25;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_expansions: Option<u64>,
    /// Seconds.
    pub time_limit: Option<f64>,
}

/// Least time from each node to `goal` by Bellman-Ford relaxation rounds,
/// never entering impassable nodes.
pub fn bellman_ford_time_to(graph: &Graph, goal: NodeId) -> Vec<f64> {
    bellman_ford_to(graph, goal, |e_time, _head_cost| e_time)
}

/// Least log-risk from each node to `goal`, excluding the node's own cost.
pub fn bellman_ford_logrisk_to(graph: &Graph, goal: NodeId) -> Vec<f64> {
    bellman_ford_to(graph, goal, |_e_time, head_cost| head_cost)
}

fn bellman_ford_to(graph: &Graph, goal: NodeId, weight: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let lr = graph.log_risks();
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    dist[goal.index()] = 0.0;
    for _ in 0..graph.node_count() {
        let mut changed = false;
        for e in graph.edges() {
            let head = lr[e.to.index()];
            if head.is_infinite() || dist[e.to.index()].is_infinite() {
                continue;
            }
            let cand = weight(e.time, head) + dist[e.to.index()];
            if cand < dist[e.from.index()] {
                dist[e.from.index()] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

struct OracleLabel {
    g_t: f64,
    g_ell: f64,
    node: NodeId,
    parent: Option<usize>,
    alive: bool,
}

fn walk_back(labels: &[OracleLabel], mut id: usize) -> Vec<NodeId> {
    let mut path = vec![labels[id].node];
    while let Some(p) = labels[id].parent {
        path.push(labels[p].node);
        id = p;
    }
    path.reverse();
    path
}

fn finish(
    solver: &str,
    labels: &[OracleLabel],
    best: Option<usize>,
    telemetry: Telemetry,
    budget: f64,
    t_min: f64,
    stopped: Option<LimitKind>,
) -> Result<PathSolution, SolveError> {
    let solution = best.map(|id| PathSolution {
        solver: solver.to_string(),
        nodes: walk_back(labels, id),
        total_time: labels[id].g_t,
        total_log_risk: labels[id].g_ell,
        survival: (-labels[id].g_ell).exp(),
        telemetry: telemetry.clone(),
        config: None,
        bucket_width: None,
        partial: stopped.is_some(),
    });
    match (stopped, solution) {
        (Some(limit), incumbent) => {
            Err(SolveError::ResourceLimit { limit, incumbent: incumbent.map(Box::new), telemetry })
        }
        (None, Some(s)) => Ok(s),
        (None, None) => Err(SolveError::NoFeasiblePath { budget, t_min }),
    }
}

fn precheck(start: NodeId, goal: NodeId, budget: f64, h_t: &[f64]) -> Result<f64, SolveError> {
    if budget.is_nan() {
        return Err(Error::InvalidConfig("budget is NaN".into()).into());
    }
    let t_min = h_t[start.index()];
    if t_min.is_infinite() {
        return Err(SolveError::Unreachable { start, goal });
    }
    if exceeds_budget(t_min, budget) {
        return Err(SolveError::NoFeasiblePath { budget, t_min });
    }
    Ok(t_min)
}

struct Limiter {
    clock: Instant,
    max_expansions: Option<u64>,
    time_limit: Option<Duration>,
}

impl Limiter {
    fn new(limits: &OracleLimits) -> Self {
        Limiter {
            clock: Instant::now(),
            max_expansions: limits.max_expansions,
            time_limit: limits.time_limit.map(Duration::from_secs_f64),
        }
    }

    fn check(&self, tel: &Telemetry) -> Option<LimitKind> {
        if self.max_expansions.is_some_and(|cap| tel.expanded >= cap) {
            return Some(LimitKind::Expansions);
        }
        if let Some(limit) = self.time_limit {
            if tel.labels_popped.is_multiple_of(1024) && self.clock.elapsed() > limit {
                return Some(LimitKind::WallClock);
            }
        }
        None
    }
}

/// Min-heap key for label setting in `(g_t, g_ell)` order.
#[derive(Clone, Copy)]
struct ByTime {
    g_t: f64,
    g_ell: f64,
    id: usize,
}

impl Ord for ByTime {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .g_t
            .total_cmp(&self.g_t)
            .then_with(|| other.g_ell.total_cmp(&self.g_ell))
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for ByTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ByTime {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ByTime {}

pub fn exact_label_setting(instance: &Instance, limits: &OracleLimits) -> Result<PathSolution, SolveError> {
    exact_label_setting_query(&instance.graph, instance.start, instance.goal, instance.budget, limits)
}

/// Full bi-criteria label setting. Labels are generated only if they can
/// still reach the goal in time and are not dominated at their node; the
/// goal's frontier then holds every Pareto-optimal feasible arrival.
pub fn exact_label_setting_query(
    graph: &Graph,
    start: NodeId,
    goal: NodeId,
    budget: f64,
    limits: &OracleLimits,
) -> Result<PathSolution, SolveError> {
    let limiter = Limiter::new(limits);
    check_endpoints(graph, start, goal)?;
    let h_t = bellman_ford_time_to(graph, goal);
    let t_min = precheck(start, goal, budget, &h_t)?;
    let lr = graph.log_risks();

    let mut tel = Telemetry::default();
    let mut labels = vec![OracleLabel { g_t: 0.0, g_ell: 0.0, node: start, parent: None, alive: true }];
    let mut frontiers: Vec<ParetoFrontier<usize>> = vec![ParetoFrontier::new(); graph.node_count()];
    frontiers[start.index()].insert(0.0, 0.0, 0, |_| {});
    let mut heap = BinaryHeap::from([ByTime { g_t: 0.0, g_ell: 0.0, id: 0 }]);
    tel.labels_pushed = 1;
    let mut stopped = None;

    loop {
        if let Some(limit) = limiter.check(&tel) {
            stopped = Some(limit);
            break;
        }
        let Some(ByTime { id, .. }) = heap.pop() else { break };
        tel.labels_popped += 1;
        let (g_t, g_ell, node) = (labels[id].g_t, labels[id].g_ell, labels[id].node);
        if !labels[id].alive {
            tel.pruned_bucket += 1;
            continue;
        }
        if node == goal {
            tel.goal_updates += 1;
            continue;
        }
        tel.expanded += 1;
        for e in graph.out_edges(node) {
            let cost = lr[e.to.index()];
            let t2 = g_t + e.time;
            if cost.is_infinite() || exceeds_budget(t2 + h_t[e.to.index()], budget) {
                continue;
            }
            let g2 = g_ell + cost;
            let new_id = labels.len();
            let inserted = frontiers[e.to.index()].insert(t2, g2, new_id, |dead| labels[dead].alive = false);
            if inserted {
                labels.push(OracleLabel { g_t: t2, g_ell: g2, node: e.to, parent: Some(id), alive: true });
                heap.push(ByTime { g_t: t2, g_ell: g2, id: new_id });
                tel.labels_pushed += 1;
            }
        }
        tel.max_queue_len = tel.max_queue_len.max(heap.len() as u64);
    }
    tel.queue_residue = heap.len() as u64;
    tel.frontier_labels = frontiers.iter().map(|f| f.len() as u64).sum();
    tel.wall_time = limiter.clock.elapsed();

    // Entries are sorted by time with log-risk strictly decreasing, so the
    // last one is the least risky feasible arrival.
    let best = frontiers[goal.index()].entries().last().map(|e| e.payload);
    finish("exact-label-setting", &labels, best, tel, budget, t_min, stopped)
}

/// Min-heap key for A* on log-risk: `(f, g_ell, g_t)`.
#[derive(Clone, Copy)]
struct ByRisk {
    f: f64,
    g_ell: f64,
    g_t: f64,
    id: usize,
}

impl Ord for ByRisk {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.g_ell.total_cmp(&self.g_ell))
            .then_with(|| other.g_t.total_cmp(&self.g_t))
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for ByRisk {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ByRisk {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ByRisk {}

pub fn constrained_astar_reference(instance: &Instance, limits: &OracleLimits) -> Result<PathSolution, SolveError> {
    constrained_astar_query(&instance.graph, instance.start, instance.goal, instance.budget, limits)
}

/// A* on log-risk with generation-time Pareto dominance and feasibility
/// cuts. The first goal label popped is optimal.
pub fn constrained_astar_query(
    graph: &Graph,
    start: NodeId,
    goal: NodeId,
    budget: f64,
    limits: &OracleLimits,
) -> Result<PathSolution, SolveError> {
    let limiter = Limiter::new(limits);
    check_endpoints(graph, start, goal)?;
    let tables = HeuristicTables::compute(graph, goal);
    let t_min = precheck(start, goal, budget, &tables.h_t)?;
    let lr = graph.log_risks();

    let mut tel = Telemetry::default();
    let mut labels = vec![OracleLabel { g_t: 0.0, g_ell: 0.0, node: start, parent: None, alive: true }];
    let mut frontiers: Vec<ParetoFrontier<usize>> = vec![ParetoFrontier::new(); graph.node_count()];
    frontiers[start.index()].insert(0.0, 0.0, 0, |_| {});
    let mut heap = BinaryHeap::from([ByRisk { f: tables.h_ell[start.index()], g_ell: 0.0, g_t: 0.0, id: 0 }]);
    tel.labels_pushed = 1;
    let mut best = None;
    let mut stopped = None;

    loop {
        if let Some(limit) = limiter.check(&tel) {
            stopped = Some(limit);
            break;
        }
        let Some(ByRisk { id, .. }) = heap.pop() else { break };
        tel.labels_popped += 1;
        if !labels[id].alive {
            tel.pruned_bucket += 1;
            continue;
        }
        let (g_t, g_ell, node) = (labels[id].g_t, labels[id].g_ell, labels[id].node);
        if node == goal {
            tel.goal_updates += 1;
            best = Some(id);
            break;
        }
        tel.expanded += 1;
        for e in graph.out_edges(node) {
            let to = e.to.index();
            let cost = lr[to];
            let t2 = g_t + e.time;
            if cost.is_infinite() || exceeds_budget(t2 + tables.h_t[to], budget) {
                continue;
            }
            let g2 = g_ell + cost;
            let new_id = labels.len();
            if frontiers[to].insert(t2, g2, new_id, |dead| labels[dead].alive = false) {
                labels.push(OracleLabel { g_t: t2, g_ell: g2, node: e.to, parent: Some(id), alive: true });
                heap.push(ByRisk { f: g2 + tables.h_ell[to], g_ell: g2, g_t: t2, id: new_id });
                tel.labels_pushed += 1;
            }
        }
        tel.max_queue_len = tel.max_queue_len.max(heap.len() as u64);
    }
    tel.queue_residue = heap.len() as u64;
    tel.frontier_labels = frontiers.iter().map(|f| f.len() as u64).sum();
    tel.wall_time = limiter.clock.elapsed();
    finish("constrained-astar", &labels, best, tel, budget, t_min, stopped)
}

pub fn exhaustive_enumerate(instance: &Instance, max_nodes: usize) -> Result<PathSolution, SolveError> {
    exhaustive_query(&instance.graph, instance.start, instance.goal, instance.budget, max_nodes)
}

/// Enumerates simple paths depth-first. Branches are cut when they can no
/// longer finish within the budget (Bellman-Ford time bound) or can no longer
/// beat the best path found (log-risk is non-negative).
pub fn exhaustive_query(
    graph: &Graph,
    start: NodeId,
    goal: NodeId,
    budget: f64,
    max_nodes: usize,
) -> Result<PathSolution, SolveError> {
    let clock = Instant::now();
    if graph.node_count() > max_nodes {
        return Err(SolveError::OracleTooLarge { nodes: graph.node_count(), cap: max_nodes });
    }
    check_endpoints(graph, start, goal)?;
    let h_t = bellman_ford_time_to(graph, goal);
    let t_min = precheck(start, goal, budget, &h_t)?;

    struct Dfs<'a> {
        graph: &'a Graph,
        goal: NodeId,
        budget: f64,
        h_t: Vec<f64>,
        on_path: Vec<bool>,
        path: Vec<NodeId>,
        best: Option<(f64, f64, Vec<NodeId>)>,
        visits: u64,
    }

    impl Dfs<'_> {
        fn go(&mut self, node: NodeId, g_t: f64, g_ell: f64) {
            self.visits += 1;
            if node == self.goal {
                let better = match &self.best {
                    None => true,
                    // ties: keep the faster path, then the lexicographically smaller one
                    Some((bl, bt, bp)) => {
                        g_ell < *bl || (g_ell == *bl && (g_t < *bt || (g_t == *bt && self.path < *bp)))
                    }
                };
                if better {
                    self.best = Some((g_ell, g_t, self.path.clone()));
                }
                return;
            }
            let lr = self.graph.log_risks();
            for e in self.graph.out_edges(node) {
                let to = e.to;
                if self.on_path[to.index()] || lr[to.index()].is_infinite() {
                    continue;
                }
                let t2 = g_t + e.time;
                let g2 = g_ell + lr[to.index()];
                if exceeds_budget(t2 + self.h_t[to.index()], self.budget) {
                    continue;
                }
                if self.best.as_ref().is_some_and(|(bl, _, _)| g2 > *bl) {
                    continue;
                }
                self.on_path[to.index()] = true;
                self.path.push(to);
                self.go(to, t2, g2);
                self.path.pop();
                self.on_path[to.index()] = false;
            }
        }
    }

    let mut dfs = Dfs {
        graph,
        goal,
        budget,
        h_t,
        on_path: vec![false; graph.node_count()],
        path: vec![start],
        best: None,
        visits: 0,
    };
    dfs.on_path[start.index()] = true;
    dfs.go(start, 0.0, 0.0);

    let telemetry = Telemetry { expanded: dfs.visits, wall_time: clock.elapsed(), ..Telemetry::default() };
    match dfs.best {
        Some((g_ell, g_t, nodes)) => Ok(PathSolution {
            solver: "exhaustive".to_string(),
            nodes,
            total_time: g_t,
            total_log_risk: g_ell,
            survival: (-g_ell).exp(),
            telemetry,
            config: None,
            bucket_width: None,
            partial: false,
        }),
        None => Err(SolveError::NoFeasiblePath { budget, t_min }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};

    fn diamond() -> Graph {
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

    type Oracle = fn(&Graph, NodeId, NodeId, f64) -> Result<PathSolution, SolveError>;

    fn oracles() -> [(&'static str, Oracle); 3] {
        [
            ("label-setting", |g, s, t, b| exact_label_setting_query(g, s, t, b, &OracleLimits::default())),
            ("astar", |g, s, t, b| constrained_astar_query(g, s, t, b, &OracleLimits::default())),
            ("exhaustive", |g, s, t, b| exhaustive_query(g, s, t, b, EXHAUSTIVE_NODE_CAP)),
        ]
    }

    #[test]
    fn diamond_answers() {
        for (name, oracle) in oracles() {
            let tight = oracle(&diamond(), NodeId(0), NodeId(3), 5.0).unwrap();
            assert!((tight.total_log_risk - 0.41).abs() < 1e-12, "{name}");
            assert_eq!(tight.nodes, vec![NodeId(0), NodeId(2), NodeId(3)], "{name}");
            let loose = oracle(&diamond(), NodeId(0), NodeId(3), 10.0).unwrap();
            assert!((loose.total_log_risk - 0.06).abs() < 1e-12, "{name}");
            assert!(oracle(&diamond(), NodeId(0), NodeId(3), 3.0).unwrap_err().is_infeasible(), "{name}");
            assert!(
                matches!(oracle(&diamond(), NodeId(3), NodeId(0), 3.0), Err(SolveError::Unreachable { .. })),
                "{name}"
            );
        }
    }

    #[test]
    fn single_edge_graph() {
        let nodes = vec![
            Node::new(NodeId(0), 0.0, 0.0, 0.2, None).unwrap(),
            Node::new(NodeId(1), 1.0, 0.0, 0.3, None).unwrap(),
        ];
        let g = Graph::new(nodes, vec![Edge { from: NodeId(0), to: NodeId(1), time: 2.0 }]).unwrap();
        for (name, oracle) in oracles() {
            let sol = oracle(&g, NodeId(0), NodeId(1), 2.0).unwrap();
            assert_eq!(sol.nodes, vec![NodeId(0), NodeId(1)], "{name}");
            assert!((sol.survival - 0.7).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn bellman_ford_matches_chain() {
        let g = diamond();
        assert_eq!(bellman_ford_time_to(&g, NodeId(3)), vec![4.0, 5.0, 2.0, 0.0]);
        let lr = bellman_ford_logrisk_to(&g, NodeId(3));
        assert!((lr[0] - 0.06).abs() < 1e-12 && (lr[1] - 0.01).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_cap() {
        let nodes = (0..30).map(|i| Node::new(NodeId(i), i as f64, 0.0, 0.0, None).unwrap()).collect();
        let g = Graph::new(nodes, vec![]).unwrap();
        assert!(matches!(
            exhaustive_query(&g, NodeId(0), NodeId(1), 1.0, EXHAUSTIVE_NODE_CAP),
            Err(SolveError::OracleTooLarge { nodes: 30, cap: 25 })
        ));
    }

    #[test]
    fn infinite_budget_is_unconstrained_optimum() {
        let g = diamond();
        let lr = bellman_ford_logrisk_to(&g, NodeId(3));
        for (name, oracle) in oracles() {
            let sol = oracle(&g, NodeId(0), NodeId(3), f64::INFINITY).unwrap();
            assert!((sol.total_log_risk - lr[0]).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn expansion_cap_reports_limit() {
        let limits = OracleLimits { max_expansions: Some(1), time_limit: None };
        let err = exact_label_setting_query(&diamond(), NodeId(0), NodeId(3), 10.0, &limits).unwrap_err();
        assert!(matches!(err, SolveError::ResourceLimit { limit: LimitKind::Expansions, .. }));
    }
}
