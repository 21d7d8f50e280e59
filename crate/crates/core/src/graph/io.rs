use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Edge, Graph, Node, NodeId};
use crate::error::{Error, Result};

pub const GRAPH_FORMAT: &str = "apulse-graph/1";

/// Wire form of a graph. `log_risk` is derived on load and never serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub format: String,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub risk: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terrain: Option<String>,
}

impl GraphDoc {
    pub fn into_graph(self) -> Result<Graph> {
        if self.format != GRAPH_FORMAT {
            return Err(Error::UnsupportedFormat(self.format));
        }
        let nodes = self
            .nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                Node::new(NodeId(n.id), n.x, n.y, n.risk, n.terrain)
                    .map_err(|e| Error::InvalidGraph { location: format!("nodes[{i}]"), reason: e.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        Graph::new(nodes, self.edges)
    }

    pub fn from_graph(graph: &Graph) -> Self {
        GraphDoc {
            format: GRAPH_FORMAT.to_string(),
            nodes: graph
                .nodes()
                .iter()
                .map(|n| NodeDoc { id: n.id.0, x: n.x, y: n.y, risk: n.risk, terrain: n.terrain.clone() })
                .collect(),
            edges: graph.edges().to_vec(),
        }
    }
}

pub fn load_graph<R: Read>(source: R) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_reader(source)?;
    doc.into_graph()
}

pub fn load_graph_str(source: &str) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_str(source)?;
    doc.into_graph()
}

/// Writes canonical graph JSON: nodes by id, edges by `(from, to)`, one
/// trailing newline.
pub fn save_graph<W: Write>(graph: &Graph, mut sink: W) -> Result<()> {
    serde_json::to_writer(&mut sink, &GraphDoc::from_graph(graph))?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn to_json_string(graph: &Graph) -> String {
    let mut buf = Vec::new();
    save_graph(graph, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"{"format":"apulse-graph/1",
        "nodes":[{"id":0,"x":0,"y":0,"risk":0.1},{"id":1,"x":25,"y":0,"risk":0.2,"terrain":"Forest"}],
        "edges":[{"from":0,"to":1,"time":5.0}]}"#;

    #[test]
    fn minimal_document() {
        let g = load_graph_str(MINIMAL).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node(NodeId(1)).terrain.as_deref(), Some("Forest"));
        assert!((g.log_risks()[1] - (-(0.8f64).ln())).abs() < 1e-15);
    }

    #[test]
    fn zero_edge_time_rejected() {
        let doc = MINIMAL.replace("\"time\":5.0", "\"time\":0");
        let err = load_graph_str(&doc).unwrap_err().to_string();
        assert!(err.contains("non-positive edge time"), "{err}");
        assert!(err.contains("edges[0]"), "{err}");
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(load_graph_str("{\"format\":\"apulse-graph/1\"}"), Err(Error::Json(_))));
        let wrong = MINIMAL.replace("apulse-graph/1", "other/2");
        assert!(matches!(load_graph_str(&wrong), Err(Error::UnsupportedFormat(_))));
        let risky = MINIMAL.replace("\"risk\":0.2", "\"risk\":1.2");
        let err = load_graph_str(&risky).unwrap_err().to_string();
        assert!(err.contains("nodes[1]") && err.contains("1.2"), "{err}");
        let dangling = MINIMAL.replace("\"to\":1", "\"to\":7");
        assert!(load_graph_str(&dangling).unwrap_err().to_string().contains("dangling"));
    }

    #[test]
    fn empty_graph_document() {
        let s = to_json_string(&Graph::empty());
        assert_eq!(s, "{\"format\":\"apulse-graph/1\",\"nodes\":[],\"edges\":[]}\n");
        assert_eq!(load_graph_str(&s).unwrap(), Graph::empty());
    }

    #[test]
    fn canonical_output_is_deterministic() {
        let shuffled = r#"{"format":"apulse-graph/1",
            "nodes":[{"id":1,"x":25,"y":0,"risk":0.2},{"id":0,"x":0,"y":0,"risk":0.1}],
            "edges":[{"from":1,"to":0,"time":5.0},{"from":0,"to":1,"time":4.0}]}"#;
        let a = to_json_string(&load_graph_str(shuffled).unwrap());
        let b = to_json_string(&load_graph_str(shuffled).unwrap());
        assert_eq!(a, b);
        let from0 = a.find("\"from\":0").unwrap();
        let from1 = a.find("\"from\":1").unwrap();
        assert!(from0 < from1);
        assert!(a.find("\"id\":0").unwrap() < a.find("\"id\":1").unwrap());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12).prop_flat_map(|n| {
            let nodes =
                prop::collection::vec((-1e4f64..1e4, -1e4f64..1e4, 0.0f64..=1.0, prop::option::of("[A-Za-z]{1,8}")), n);
            let edges = prop::collection::btree_map((0..n as u32, 0..n as u32), 1e-3f64..1e4, 0..(n * n));
            (nodes, edges).prop_map(|(nodes, edges)| {
                let nodes = nodes
                    .into_iter()
                    .enumerate()
                    .map(|(i, (x, y, r, t))| Node::new(NodeId(i as u32), x, y, r, t).unwrap())
                    .collect();
                let edges = edges
                    .into_iter()
                    .filter(|((a, b), _)| a != b)
                    .map(|((a, b), time)| Edge { from: NodeId(a), to: NodeId(b), time })
                    .collect();
                Graph::new(nodes, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn save_load_round_trip(g in arb_graph()) {
            let text = to_json_string(&g);
            let back = load_graph_str(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(to_json_string(&back), text);
        }

        #[test]
        fn survival_equals_product(risks in prop::collection::vec(0.0f64..0.999, 1..40)) {
            let mut product = 1.0;
            let mut sum = 0.0;
            for &r in &risks {
                let lr = super::super::log_risk(r).unwrap();
                prop_assert!(((-lr).exp() - (1.0 - r)).abs() <= 1e-12 * (1.0 - r));
                product *= 1.0 - r;
                sum += lr;
            }
            prop_assert!(((-sum).exp() - product).abs() <= 1e-9 * product);
        }
    }
}
