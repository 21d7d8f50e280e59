use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, RwLock};

use apulse_core::{generate_terrain, Error, Graph, GridLayout, GridSpec, NodeId, Result};
use serde::Serialize;

pub const DEMO_GRAPH_ID: &str = "demo";
pub const DEMO_SEED: u64 = 42;

#[derive(Debug, Clone)]
pub struct Entry {
    pub graph: Arc<Graph>,
    pub layout: Option<GridLayout>,
    /// Graph this revision was patched from.
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub id: String,
    pub nodes: usize,
    pub edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

/// Row-major per-cell arrays for rendering a grid graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridView {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub cell_size: f64,
    pub risk: Vec<f64>,
    pub terrain: Vec<Option<String>>,
}

/// In-memory map from id to immutable graph. Patches register new
/// revisions and never touch existing entries.
#[derive(Debug, Default)]
pub struct Registry {
    inner: RwLock<Inner>,
}

#[derive(Debug, Default)]
struct Inner {
    graphs: BTreeMap<String, Entry>,
    revisions: BTreeMap<String, u64>,
    uploads: u64,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.@".contains(c))
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry seeded with the deterministic 50x50 demo grid.
    pub fn with_demo() -> Self {
        let reg = Self::new();
        let graph = generate_terrain(&GridSpec::new(50, 50, DEMO_SEED)).expect("demo grid generates");
        reg.insert(DEMO_GRAPH_ID.to_string(), graph).expect("demo id is free");
        reg
    }

    pub fn get(&self, id: &str) -> Option<Entry> {
        self.inner.read().expect("registry lock").graphs.get(id).cloned()
    }

    pub fn insert(&self, id: String, graph: Graph) -> Result<GraphSummary> {
        if !valid_id(&id) {
            return Err(Error::InvalidConfig(format!("graph id {id:?} must be 1-128 characters of [A-Za-z0-9-_.@]")));
        }
        let mut inner = self.inner.write().expect("registry lock");
        if inner.graphs.contains_key(&id) {
            return Err(Error::InvalidConfig(format!("graph id {id:?} is already registered")));
        }
        let entry = Entry { layout: GridLayout::infer(&graph), graph: Arc::new(graph), parent: None };
        let summary = summarize(&id, &entry);
        inner.graphs.insert(id, entry);
        Ok(summary)
    }

    /// Registers under a fresh `upload-N` id.
    pub fn insert_anonymous(&self, graph: Graph) -> Result<GraphSummary> {
        let id = {
            let mut inner = self.inner.write().expect("registry lock");
            loop {
                inner.uploads += 1;
                let id = format!("upload-{}", inner.uploads);
                if !inner.graphs.contains_key(&id) {
                    break id;
                }
            }
        };
        self.insert(id, graph)
    }

    /// Derives a revision of `id` with patched risks under `<root>@<n>`.
    pub fn patch(&self, id: &str, updates: &[(NodeId, f64)]) -> Result<Option<(String, Entry)>> {
        let Some(base) = self.get(id) else { return Ok(None) };
        let graph = base.graph.with_risks(updates)?;
        let root = id.split('@').next().unwrap_or(id).to_string();
        let mut inner = self.inner.write().expect("registry lock");
        let counter = inner.revisions.entry(root.clone()).or_insert(0);
        *counter += 1;
        let revision = format!("{root}@{counter}");
        let entry = Entry { graph: Arc::new(graph), layout: base.layout, parent: Some(id.to_string()) };
        inner.graphs.insert(revision.clone(), entry.clone());
        Ok(Some((revision, entry)))
    }

    pub fn list(&self) -> Vec<GraphSummary> {
        let inner = self.inner.read().expect("registry lock");
        inner.graphs.iter().map(|(id, e)| summarize(id, e)).collect()
    }

    pub fn grid(&self, id: &str) -> Option<Result<GridView>> {
        let entry = self.get(id)?;
        let Some(layout) = entry.layout else {
            return Some(Err(Error::InvalidConfig(format!("graph {id:?} is not a row-major grid"))));
        };
        let nodes = entry.graph.nodes();
        Some(Ok(GridView {
            id: id.to_string(),
            width: layout.width,
            height: layout.height,
            cell_size: layout.cell_size,
            risk: nodes.iter().map(|n| n.risk).collect(),
            terrain: nodes.iter().map(|n| n.terrain.clone()).collect(),
        }))
    }

    /// Loads every `*.json` graph in `dir`, keyed by file stem.
    pub fn load_dir(&self, dir: &Path) -> Result<Vec<String>> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut loaded = Vec::new();
        for path in paths {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let file = std::fs::File::open(&path)?;
            let graph = apulse_core::load_graph(std::io::BufReader::new(file))
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
            self.insert(id.clone(), graph)?;
            loaded.push(id);
        }
        Ok(loaded)
    }
}

fn summarize(id: &str, entry: &Entry) -> GraphSummary {
    GraphSummary {
        id: id.to_string(),
        nodes: entry.graph.node_count(),
        edges: entry.graph.edge_count(),
        width: entry.layout.map(|l| l.width),
        height: entry.layout.map(|l| l.height),
        parent: entry.parent.clone(),
    }
}
