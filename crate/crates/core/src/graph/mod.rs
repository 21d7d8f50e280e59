//! Directed graph with node risk and edge traversal time.
//!
//! Risk is charged on entering a node (its log-risk `-ln(1 - R(v))`), time on
//! traversing an edge. The start node of a path is never charged. A node with
//! risk 1 has infinite log-risk and is treated as impassable by every solver.

mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{load_graph, load_graph_str, save_graph, to_json_string, GraphDoc, NodeDoc, GRAPH_FORMAT};

/// Dense vertex index, `0 <= index < |V|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Additive risk cost of a node: `-ln(1 - risk)`, `+inf` for `risk == 1`.
pub fn log_risk(risk: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&risk) {
        return Err(Error::RiskOutOfRange { value: risk });
    }
    if risk == 1.0 {
        Ok(f64::INFINITY)
    } else {
        // ln_1p keeps precision for small risks; 0.0 maps to +0.0.
        Ok(0.0 - (-risk).ln_1p())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    /// Meters east.
    pub x: f64,
    /// Meters north.
    pub y: f64,
    pub risk: f64,
    pub terrain: Option<String>,
    log_risk: f64,
}

impl Node {
    pub fn new(id: NodeId, x: f64, y: f64, risk: f64, terrain: Option<String>) -> Result<Self> {
        let log_risk = log_risk(risk)?;
        Ok(Node { id, x, y, risk, terrain, log_risk })
    }

    #[inline]
    pub fn log_risk(&self) -> f64 {
        self.log_risk
    }

    #[inline]
    pub fn is_impassable(&self) -> bool {
        self.log_risk.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    /// Seconds, finite and strictly positive.
    pub time: f64,
}

/// Immutable adjacency in compressed form. `out` is sorted by `(from, to)`,
/// `inc` holds the same edges sorted by `(to, from)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nodes: Vec<Node>,
    log_risks: Vec<f64>,
    out_offsets: Vec<usize>,
    out: Vec<Edge>,
    in_offsets: Vec<usize>,
    inc: Vec<Edge>,
}

impl Default for Graph {
    fn default() -> Self {
        Graph::empty()
    }
}

impl Graph {
    pub fn empty() -> Self {
        Graph {
            nodes: Vec::new(),
            log_risks: Vec::new(),
            out_offsets: vec![0],
            out: Vec::new(),
            in_offsets: vec![0],
            inc: Vec::new(),
        }
    }

    /// Builds and validates a graph. Nodes may come in any order but their ids
    /// must be exactly `0..nodes.len()`.
    pub fn new(mut nodes: Vec<Node>, mut edges: Vec<Edge>) -> Result<Self> {
        nodes.sort_by_key(|n| n.id);
        for (i, node) in nodes.iter().enumerate() {
            if node.id.index() != i {
                let reason = if i > 0 && nodes[i - 1].id == node.id {
                    format!("duplicate node id {}", node.id)
                } else {
                    format!("node ids must be contiguous from 0, missing id {i}")
                };
                return Err(Error::InvalidGraph { location: format!("nodes[id={}]", node.id), reason });
            }
            if !node.x.is_finite() || !node.y.is_finite() {
                return Err(Error::InvalidGraph {
                    location: format!("nodes[id={}]", node.id),
                    reason: "non-finite coordinate".into(),
                });
            }
        }
        let n = nodes.len();
        for (i, e) in edges.iter().enumerate() {
            let location = || format!("edges[{i}]");
            if e.from.index() >= n || e.to.index() >= n {
                return Err(Error::InvalidGraph {
                    location: location(),
                    reason: format!("dangling edge endpoint {} -> {} (graph has {n} nodes)", e.from, e.to),
                });
            }
            if e.from == e.to {
                return Err(Error::InvalidGraph {
                    location: location(),
                    reason: format!("self-loop on node {}", e.from),
                });
            }
            if !(e.time > 0.0) || !e.time.is_finite() {
                return Err(Error::InvalidGraph {
                    location: location(),
                    reason: format!("non-positive edge time {}", e.time),
                });
            }
        }
        edges.sort_by_key(|e| (e.from, e.to));
        if let Some(w) = edges.windows(2).find(|w| w[0].from == w[1].from && w[0].to == w[1].to) {
            return Err(Error::InvalidGraph {
                location: format!("edge {} -> {}", w[0].from, w[0].to),
                reason: "duplicate edge".into(),
            });
        }

        let mut out_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.from.index() + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut inc = edges.clone();
        inc.sort_by_key(|e| (e.to, e.from));
        let mut in_offsets = vec![0usize; n + 1];
        for e in &inc {
            in_offsets[e.to.index() + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let log_risks = nodes.iter().map(|n| n.log_risk).collect();
        Ok(Graph { nodes, log_risks, out_offsets, out: edges, in_offsets, inc })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.out.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    /// Per-node log-risk, indexed by `NodeId::index`.
    #[inline]
    pub fn log_risks(&self) -> &[f64] {
        &self.log_risks
    }

    #[inline]
    pub fn out_edges(&self, id: NodeId) -> &[Edge] {
        let i = id.index();
        &self.out[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    /// Edges ending at `id`.
    #[inline]
    pub fn in_edges(&self, id: NodeId) -> &[Edge] {
        let i = id.index();
        &self.inc[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    /// All edges in canonical `(from, to)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.out
    }

    pub fn edge_time(&self, from: NodeId, to: NodeId) -> Option<f64> {
        let out = self.out_edges(from);
        out.binary_search_by_key(&to, |e| e.to).ok().map(|i| out[i].time)
    }

    /// A new graph with the given node risks replaced; `self` is untouched.
    pub fn with_risks(&self, patch: &[(NodeId, f64)]) -> Result<Graph> {
        let mut nodes = self.nodes.clone();
        let mut log_risks = self.log_risks.clone();
        for (i, &(id, risk)) in patch.iter().enumerate() {
            let node = nodes.get_mut(id.index()).ok_or_else(|| Error::InvalidGraph {
                location: format!("patch[{i}]"),
                reason: format!("unknown node {id}"),
            })?;
            let lr = log_risk(risk)
                .map_err(|e| Error::InvalidGraph { location: format!("patch[{i}]"), reason: e.to_string() })?;
            node.risk = risk;
            node.log_risk = lr;
            log_risks[id.index()] = lr;
        }
        Ok(Graph { nodes, log_risks, ..self.clone() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMetrics {
    pub total_time: f64,
    pub total_log_risk: f64,
    pub survival: f64,
}

/// Time, log-risk and survival of a node sequence. The first node's risk is
/// excluded; sums accumulate left to right.
pub fn path_metrics(graph: &Graph, nodes: &[NodeId]) -> Result<PathMetrics> {
    let (&first, _) = nodes.split_first().ok_or(Error::EmptyPath)?;
    if !graph.contains(first) {
        return Err(Error::InvalidGraph { location: "path[0]".into(), reason: format!("unknown node {first}") });
    }
    let mut total_time = 0.0;
    let mut total_log_risk = 0.0;
    for pair in nodes.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        if !graph.contains(to) {
            return Err(Error::MissingEdge { from, to });
        }
        let t = graph.edge_time(from, to).ok_or(Error::MissingEdge { from, to })?;
        total_time += t;
        total_log_risk += graph.log_risks()[to.index()];
    }
    Ok(PathMetrics { total_time, total_log_risk, survival: (-total_log_risk).exp() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u32, risk: f64) -> Node {
        Node::new(NodeId(id), id as f64, 0.0, risk, None).unwrap()
    }

    fn edge(from: u32, to: u32, time: f64) -> Edge {
        Edge { from: NodeId(from), to: NodeId(to), time }
    }

    #[test]
    fn log_risk_values() {
        assert_eq!(log_risk(0.0).unwrap(), 0.0);
        assert!(log_risk(0.0).unwrap().is_sign_positive());
        assert_eq!(log_risk(1.0).unwrap(), f64::INFINITY);
        assert!((log_risk(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn log_risk_rejects_out_of_range() {
        for bad in [-0.1, 1.0000001, f64::NAN] {
            let err = log_risk(bad).unwrap_err();
            assert!(matches!(err, Error::RiskOutOfRange { .. }));
        }
        assert!(log_risk(1.5).unwrap_err().to_string().contains("1.5"));
    }

    #[test]
    fn metrics_single_node() {
        let g = Graph::new(vec![node(0, 0.3)], vec![]).unwrap();
        let m = path_metrics(&g, &[NodeId(0)]).unwrap();
        assert_eq!((m.total_time, m.total_log_risk, m.survival), (0.0, 0.0, 1.0));
    }

    #[test]
    fn metrics_exclude_start_risk() {
        let g =
            Graph::new(vec![node(0, 0.9), node(1, 0.5), node(2, 0.5)], vec![edge(0, 1, 1.0), edge(1, 2, 2.0)]).unwrap();
        let m = path_metrics(&g, &[NodeId(0), NodeId(1), NodeId(2)]).unwrap();
        assert_eq!(m.total_time, 3.0);
        assert!((m.total_log_risk - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!((m.survival - 0.25).abs() < 1e-12);
    }

    #[test]
    fn metrics_missing_edge() {
        let g = Graph::new(vec![node(0, 0.0), node(1, 0.0)], vec![edge(0, 1, 1.0)]).unwrap();
        let err = path_metrics(&g, &[NodeId(1), NodeId(0)]).unwrap_err();
        assert!(matches!(err, Error::MissingEdge { from: NodeId(1), to: NodeId(0) }));
        assert!(matches!(path_metrics(&g, &[]), Err(Error::EmptyPath)));
    }

    #[test]
    fn rejects_bad_edges() {
        let nodes = || vec![node(0, 0.0), node(1, 0.0)];
        let msg = |edges| Graph::new(nodes(), edges).unwrap_err().to_string();
        assert!(msg(vec![edge(0, 1, 0.0)]).contains("non-positive edge time"));
        assert!(msg(vec![edge(0, 1, -2.0)]).contains("non-positive edge time"));
        assert!(msg(vec![edge(0, 1, f64::INFINITY)]).contains("non-positive edge time"));
        assert!(msg(vec![edge(0, 5, 1.0)]).contains("dangling"));
        assert!(msg(vec![edge(1, 1, 1.0)]).contains("self-loop"));
        assert!(msg(vec![edge(0, 1, 1.0), edge(0, 1, 2.0)]).contains("duplicate edge"));
    }

    #[test]
    fn rejects_non_contiguous_ids() {
        let err = Graph::new(vec![node(0, 0.0), node(2, 0.0)], vec![]).unwrap_err();
        assert!(err.to_string().contains("contiguous"));
        let err = Graph::new(vec![node(0, 0.0), node(0, 0.0)], vec![]).unwrap_err();
        assert!(err.to_string().contains("duplicate node"));
    }

    #[test]
    fn transpose_matches() {
        let g = Graph::new(
            vec![node(0, 0.0), node(1, 0.0), node(2, 0.0)],
            vec![edge(2, 0, 4.0), edge(0, 1, 1.0), edge(1, 2, 2.0), edge(0, 2, 3.0)],
        )
        .unwrap();
        for e in g.edges() {
            assert!(g.in_edges(e.to).contains(e));
        }
        let total_in: usize = (0..3).map(|i| g.in_edges(NodeId(i)).len()).sum();
        assert_eq!(total_in, g.edge_count());
        assert_eq!(g.edge_time(NodeId(0), NodeId(2)), Some(3.0));
        assert_eq!(g.edge_time(NodeId(2), NodeId(1)), None);
    }

    #[test]
    fn with_risks_leaves_original() {
        let g = Graph::new(vec![node(0, 0.0), node(1, 0.1)], vec![edge(0, 1, 1.0)]).unwrap();
        let h = g.with_risks(&[(NodeId(1), 1.0)]).unwrap();
        assert!(h.node(NodeId(1)).is_impassable());
        assert_eq!(g.node(NodeId(1)).risk, 0.1);
        assert_eq!(h.log_risks()[1], f64::INFINITY);
        assert!(g.with_risks(&[(NodeId(9), 0.2)]).is_err());
        assert!(g.with_risks(&[(NodeId(0), 2.0)]).is_err());
    }
}
