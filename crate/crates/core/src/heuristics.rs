//! Goal-directed lower bounds from reverse Dijkstra passes.
//!
//! `h_t(v)` is the least travel time from `v` to the goal and `h_ell(v)` the
//! least log-risk charged on the way, counting every node after `v` (the goal
//! included) but not `v` itself. That matches how labels accumulate cost, so
//! `g_ell + h_ell(v)` bounds the full objective from below. Impassable nodes
//! (infinite log-risk) are never entered by any pass.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicTables {
    pub h_t: Vec<f64>,
    pub h_ell: Vec<f64>,
    pub goal: NodeId,
}

impl HeuristicTables {
    pub fn compute(graph: &Graph, goal: NodeId) -> Self {
        HeuristicTables { h_t: reverse_dijkstra_time(graph, goal), h_ell: reverse_dijkstra_logrisk(graph, goal), goal }
    }
}

#[derive(Clone, Copy)]
struct Entry {
    dist: f64,
    node: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra with lazy deletion. `relax(u, d_u, push)` offers
/// candidate distances for the neighbours of a settled node.
fn dijkstra<F>(n: usize, source: NodeId, mut relax: F) -> Vec<f64>
where
    F: FnMut(NodeId, f64, &mut dyn FnMut(NodeId, f64)),
{
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(Entry { dist: 0.0, node: source.0 });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if d > dist[node as usize] {
            continue;
        }
        relax(NodeId(node), d, &mut |v, cand| {
            if cand < dist[v.index()] {
                dist[v.index()] = cand;
                heap.push(Entry { dist: cand, node: v.0 });
            }
        });
    }
    dist
}

/// Least travel time from every node to `goal`; `+inf` where unreachable.
pub fn reverse_dijkstra_time(graph: &Graph, goal: NodeId) -> Vec<f64> {
    let lr = graph.log_risks();
    dijkstra(graph.node_count(), goal, |u, d, push| {
        if lr[u.index()].is_infinite() {
            return;
        }
        for e in graph.in_edges(u) {
            push(e.from, d + e.time);
        }
    })
}

/// Least log-risk from every node to `goal`, excluding the node's own cost.
pub fn reverse_dijkstra_logrisk(graph: &Graph, goal: NodeId) -> Vec<f64> {
    let lr = graph.log_risks();
    dijkstra(graph.node_count(), goal, |u, d, push| {
        let cost = lr[u.index()];
        if cost.is_infinite() {
            return;
        }
        for e in graph.in_edges(u) {
            push(e.from, cost + d);
        }
    })
}

/// Least travel time from `start` to every node.
pub fn forward_dijkstra_time(graph: &Graph, start: NodeId) -> Vec<f64> {
    let lr = graph.log_risks();
    dijkstra(graph.node_count(), start, |u, d, push| {
        for e in graph.out_edges(u) {
            if lr[e.to.index()].is_finite() {
                push(e.to, d + e.time);
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};

    fn chain() -> Graph {
        // s -> a -> g with times 2, 3 and log-risks a = 0.2, g = 0.1
        let risk = |lr: f64| 1.0 - (-lr).exp();
        let nodes = vec![
            Node::new(NodeId(0), 0.0, 0.0, 0.7, None).unwrap(),
            Node::new(NodeId(1), 1.0, 0.0, risk(0.2), None).unwrap(),
            Node::new(NodeId(2), 2.0, 0.0, risk(0.1), None).unwrap(),
        ];
        let edges = vec![
            Edge { from: NodeId(0), to: NodeId(1), time: 2.0 },
            Edge { from: NodeId(1), to: NodeId(2), time: 3.0 },
        ];
        Graph::new(nodes, edges).unwrap()
    }

    #[test]
    fn chain_time() {
        let h = reverse_dijkstra_time(&chain(), NodeId(2));
        assert_eq!(h, vec![5.0, 3.0, 0.0]);
    }

    #[test]
    fn chain_logrisk() {
        let h = reverse_dijkstra_logrisk(&chain(), NodeId(2));
        assert!((h[0] - 0.3).abs() < 1e-12);
        assert!((h[1] - 0.1).abs() < 1e-12);
        assert_eq!(h[2], 0.0);
    }

    #[test]
    fn forward_and_unreachable() {
        let g = chain();
        let f = forward_dijkstra_time(&g, NodeId(0));
        assert_eq!(f, vec![0.0, 2.0, 5.0]);
        let back = forward_dijkstra_time(&g, NodeId(2));
        assert_eq!(back[2], 0.0);
        assert!(back[0].is_infinite() && back[1].is_infinite());
        let h = HeuristicTables::compute(&g, NodeId(0));
        assert_eq!(h.h_t[0], 0.0);
        assert!(h.h_t[2].is_infinite() && h.h_ell[2].is_infinite());
    }

    #[test]
    fn impassable_nodes_block_both_tables() {
        let g = chain().with_risks(&[(NodeId(1), 1.0)]).unwrap();
        let h = HeuristicTables::compute(&g, NodeId(2));
        assert!(h.h_t[0].is_infinite());
        assert!(h.h_ell[0].is_infinite());
        // Leaving an impassable node is fine, only entering it is blocked.
        assert_eq!(h.h_t[1], 3.0);
        assert!(forward_dijkstra_time(&g, NodeId(0))[2].is_infinite());
    }
}
