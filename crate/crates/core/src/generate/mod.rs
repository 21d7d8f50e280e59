//! Synthetic grid terrain and benchmark instances.
//!
//! Elevation and land cover come from seeded value noise, risk from Gaussian
//! hotspots. Cells are 8-connected; an edge's time is the centroid distance
//! divided by the speed allowed by the destination cell's terrain and the
//! directed slope between the two cells.

mod terrain;

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use terrain::{slope_band, TerrainClass, VelocityMatrix, SLOPE_BANDS, SLOPE_BAND_EDGES_DEG};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, GraphDoc, Node, NodeId};
use crate::heuristics::forward_dijkstra_time;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub width: u32,
    pub height: u32,
    /// Meters between neighbouring centroids.
    pub cell_size: f64,
    pub seed: u64,
    /// Noise lattice spacing in cells; larger values give broader features.
    pub terrain_smoothness: f64,
    pub risk_hotspots: u32,
    /// `(min, max)` elevation in meters.
    pub elevation_range: (f64, f64),
    /// Risk at the centre of the strongest hotspot.
    pub hotspot_peak: f64,
    /// Hotspot standard deviation in cells; defaults to 15% of the longer side.
    pub hotspot_radius: Option<f64>,
    /// Risk floor applied everywhere.
    pub base_risk: f64,
    /// Forces every cell to one class.
    pub uniform_terrain: Option<TerrainClass>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            width: 20,
            height: 20,
            cell_size: 25.0,
            seed: 0,
            terrain_smoothness: 8.0,
            risk_hotspots: 4,
            elevation_range: (100.0, 160.0),
            hotspot_peak: 0.35,
            hotspot_radius: None,
            base_risk: 0.002,
            uniform_terrain: None,
        }
    }
}

impl GridSpec {
    pub fn new(width: u32, height: u32, seed: u64) -> Self {
        GridSpec { width, height, seed, ..Self::default() }
    }

    /// Flat, uniform, riskless terrain.
    pub fn flat(width: u32, height: u32, class: TerrainClass) -> Self {
        GridSpec {
            width,
            height,
            risk_hotspots: 0,
            elevation_range: (0.0, 0.0),
            base_risk: 0.0,
            uniform_terrain: Some(class),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cells = self.width as u64 * self.height as u64;
        let bad = |msg: String| Err(Error::InvalidGridSpec(msg));
        if cells < 2 {
            return bad(format!("grid {}x{} needs at least 2 cells", self.width, self.height));
        }
        if cells > u32::MAX as u64 / 2 {
            return bad(format!("grid {}x{} is too large", self.width, self.height));
        }
        if !(self.cell_size > 0.0) || !self.cell_size.is_finite() {
            return bad(format!("cell_size must be positive, got {}", self.cell_size));
        }
        if !(self.terrain_smoothness > 0.0) || !self.terrain_smoothness.is_finite() {
            return bad(format!("terrain_smoothness must be positive, got {}", self.terrain_smoothness));
        }
        let (lo, hi) = self.elevation_range;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return bad(format!("elevation_range ({lo}, {hi}) is not an ordered finite interval"));
        }
        if !(0.0..1.0).contains(&self.hotspot_peak) {
            return bad(format!("hotspot_peak must be in [0, 1), got {}", self.hotspot_peak));
        }
        if !(0.0..1.0).contains(&self.base_risk) {
            return bad(format!("base_risk must be in [0, 1), got {}", self.base_risk));
        }
        if let Some(r) = self.hotspot_radius {
            if !(r > 0.0) || !r.is_finite() {
                return bad(format!("hotspot_radius must be positive, got {r}"));
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> GridLayout {
        GridLayout { width: self.width, height: self.height, cell_size: self.cell_size }
    }
}

/// Row-major grid geometry: node `r * width + c` sits at `(c, r) * cell_size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub width: u32,
    pub height: u32,
    pub cell_size: f64,
}

impl GridLayout {
    pub fn node_at(&self, row: u32, col: u32) -> NodeId {
        NodeId(row * self.width + col)
    }

    pub fn cell_of(&self, id: NodeId) -> (u32, u32) {
        (id.0 / self.width, id.0 % self.width)
    }

    /// Recognizes graphs whose coordinates follow the row-major layout.
    pub fn infer(graph: &Graph) -> Option<GridLayout> {
        let nodes = graph.nodes();
        if nodes.len() < 2 {
            return None;
        }
        let (x0, y0) = (nodes[0].x, nodes[0].y);
        let width = nodes.iter().take_while(|n| n.y == y0).count();
        let cell_size = if width > 1 { nodes[1].x - x0 } else { nodes[1].y - y0 };
        if !(cell_size > 0.0) || !nodes.len().is_multiple_of(width) {
            return None;
        }
        let layout = GridLayout { width: width as u32, height: (nodes.len() / width) as u32, cell_size };
        let tol = 1e-6 * cell_size;
        let fits = nodes.iter().all(|n| {
            let (r, c) = layout.cell_of(n.id);
            (n.x - x0 - c as f64 * cell_size).abs() <= tol && (n.y - y0 - r as f64 * cell_size).abs() <= tol
        });
        fits.then_some(layout)
    }
}

/// Smooth noise in `[0, 1)`: bilinear interpolation of random lattice values
/// with a smoothstep fade, two octaves.
struct ValueNoise {
    octaves: Vec<(f64, usize, Vec<f64>)>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, width: u32, height: u32, spacing: f64) -> Self {
        let octaves = [(spacing, 1.0), ((spacing / 2.0).max(1.0), 0.5)]
            .into_iter()
            .map(|(sp, weight)| {
                let cols = (width as f64 / sp).ceil() as usize + 2;
                let rows = (height as f64 / sp).ceil() as usize + 2;
                let lattice = (0..cols * rows).map(|_| rng.gen::<f64>() * weight).collect();
                (sp, cols, lattice)
            })
            .collect();
        ValueNoise { octaves }
    }

    fn sample(&self, col: u32, row: u32) -> f64 {
        let fade = |t: f64| t * t * (3.0 - 2.0 * t);
        let mut total = 0.0;
        let mut norm = 0.0;
        for (i, (sp, cols, lattice)) in self.octaves.iter().enumerate() {
            let (fx, fy) = (col as f64 / sp, row as f64 / sp);
            let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
            let (tx, ty) = (fade(fx - ix as f64), fade(fy - iy as f64));
            let at = |x: usize, y: usize| lattice[y * cols + x];
            let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
            let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
            total += top * (1.0 - ty) + bottom * ty;
            norm += if i == 0 { 1.0 } else { 0.5 };
        }
        (total / norm).clamp(0.0, 1.0 - f64::EPSILON)
    }
}

fn classify(v: f64) -> TerrainClass {
    const CUTS: [(f64, TerrainClass); 5] = [
        (0.30, TerrainClass::PavedAreas),
        (0.38, TerrainClass::UrbanAreas),
        (0.55, TerrainClass::OpenFields),
        (0.66, TerrainClass::LightVegetation),
        (0.74, TerrainClass::DenseScrub),
    ];
    CUTS.iter().find(|(cut, _)| v < *cut).map_or(TerrainClass::Forest, |&(_, c)| c)
}

const NEIGHBOURS: [(i32, i32); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

pub fn generate_terrain(spec: &GridSpec) -> Result<Graph> {
    generate_terrain_with(spec, &VelocityMatrix::default())
}

pub fn generate_terrain_with(spec: &GridSpec, velocity: &VelocityMatrix) -> Result<Graph> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let n = (w * h) as usize;
    let stream = |k: u64| ChaCha8Rng::seed_from_u64(spec.seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15));

    let (lo, hi) = spec.elevation_range;
    let elevation: Vec<f64> = if lo == hi {
        vec![lo; n]
    } else {
        let noise = ValueNoise::new(&mut stream(1), w, h, spec.terrain_smoothness);
        (0..n).map(|i| lo + (hi - lo) * noise.sample(i as u32 % w, i as u32 / w)).collect()
    };
    let terrain: Vec<TerrainClass> = match spec.uniform_terrain {
        Some(class) => vec![class; n],
        None => {
            let noise = ValueNoise::new(&mut stream(2), w, h, spec.terrain_smoothness * 0.75);
            (0..n).map(|i| classify(noise.sample(i as u32 % w, i as u32 / w))).collect()
        }
    };

    let mut rng = stream(3);
    let radius = spec.hotspot_radius.unwrap_or(0.15 * w.max(h) as f64);
    let hotspots: Vec<(f64, f64, f64, f64)> = (0..spec.risk_hotspots)
        .map(|_| {
            let cx = rng.gen::<f64>() * w as f64;
            let cy = rng.gen::<f64>() * h as f64;
            let sigma = radius * rng.gen_range(0.6..1.4);
            let peak = spec.hotspot_peak * rng.gen_range(0.5..=1.0);
            (cx, cy, sigma, peak)
        })
        .collect();

    let mut nodes = Vec::with_capacity(n);
    for (i, class) in terrain.iter().enumerate() {
        let (col, row) = ((i as u32 % w) as f64, (i as u32 / w) as f64);
        let mut survive = 1.0 - spec.base_risk;
        for &(cx, cy, sigma, peak) in &hotspots {
            let d2 = (col - cx).powi(2) + (row - cy).powi(2);
            survive *= 1.0 - peak * (-d2 / (2.0 * sigma * sigma)).exp();
        }
        let risk = (1.0 - survive).clamp(0.0, 1.0);
        nodes.push(Node::new(
            NodeId(i as u32),
            col * spec.cell_size,
            row * spec.cell_size,
            risk,
            Some(class.name().to_string()),
        )?);
    }

    let mut edges = Vec::with_capacity(n * 8);
    for i in 0..n {
        let (col, row) = ((i as u32 % w) as i32, (i as u32 / w) as i32);
        for (dr, dc) in NEIGHBOURS {
            let (r2, c2) = (row + dr, col + dc);
            if r2 < 0 || c2 < 0 || r2 >= h as i32 || c2 >= w as i32 {
                continue;
            }
            let j = (r2 as u32 * w + c2 as u32) as usize;
            let dist = if dr != 0 && dc != 0 { spec.cell_size * std::f64::consts::SQRT_2 } else { spec.cell_size };
            let slope = ((elevation[j] - elevation[i]) / dist).atan().to_degrees();
            let speed = velocity.speed(terrain[j], slope);
            if speed > 0.0 {
                edges.push(Edge { from: NodeId(i as u32), to: NodeId(j as u32), time: dist / speed });
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::Generation("every cell is impassable, no edges generated".into()));
    }
    Graph::new(nodes, edges)
}

/// A solvable query: graph, endpoints and a time budget derived from the
/// minimum travel time and a slack fraction.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub graph: Arc<Graph>,
    pub start: NodeId,
    pub goal: NodeId,
    pub budget: f64,
    pub t_min: f64,
    pub alpha: f64,
}

impl Instance {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Same query with a different slack.
    pub fn with_alpha(&self, alpha: f64) -> Instance {
        Instance { budget: self.t_min * (1.0 + alpha), alpha, ..self.clone() }
    }
}

fn min_time(graph: &Graph, start: NodeId, goal: NodeId) -> Result<f64> {
    for (what, id) in [("start", start), ("goal", goal)] {
        if !graph.contains(id) {
            return Err(Error::InvalidInstance(format!(
                "{what} node {id} not in graph of {} nodes",
                graph.node_count()
            )));
        }
    }
    if start == goal {
        return Err(Error::InvalidInstance(format!("start and goal are both {start}")));
    }
    let t_min = forward_dijkstra_time(graph, start)[goal.index()];
    if t_min.is_infinite() {
        return Err(Error::Unreachable { start, goal });
    }
    Ok(t_min)
}

/// Budget `t_min * (1 + alpha)` with `t_min` from a time-only Dijkstra.
pub fn make_instance(graph: Arc<Graph>, start: NodeId, goal: NodeId, alpha: f64) -> Result<Instance> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidInstance(format!("slack alpha must be finite and >= 0, got {alpha}")));
    }
    let t_min = min_time(&graph, start, goal)?;
    Ok(Instance {
        name: format!("{start}->{goal}@{alpha}"),
        graph,
        start,
        goal,
        budget: t_min * (1.0 + alpha),
        t_min,
        alpha,
    })
}

/// Instance with an explicit budget; `alpha` is back-computed from `t_min`.
pub fn instance_with_budget(graph: Arc<Graph>, start: NodeId, goal: NodeId, budget: f64) -> Result<Instance> {
    let t_min = min_time(&graph, start, goal)?;
    Ok(Instance {
        name: format!("{start}->{goal}/B{budget}"),
        graph,
        start,
        goal,
        budget,
        t_min,
        alpha: budget / t_min - 1.0,
    })
}

/// Chooses a start/goal pair by id or by position in the node order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSelector {
    Ids(u32, u32),
    /// Fractions of the node count; `(0.0, 1.0)` is first to last node.
    Fraction(f64, f64),
}

impl PairSelector {
    pub fn resolve(&self, node_count: usize) -> Result<(NodeId, NodeId)> {
        match *self {
            PairSelector::Ids(s, g) => Ok((NodeId(s), NodeId(g))),
            PairSelector::Fraction(fs, fg) => {
                let pick = |f: f64| {
                    if (0.0..=1.0).contains(&f) {
                        Ok(NodeId(((node_count.saturating_sub(1)) as f64 * f).round() as u32))
                    } else {
                        Err(Error::InvalidInstance(format!("pair fraction {f} outside [0, 1]")))
                    }
                };
                Ok((pick(fs)?, pick(fg)?))
            }
        }
    }
}

impl fmt::Display for PairSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairSelector::Ids(s, g) => write!(f, "{s}->{g}"),
            PairSelector::Fraction(s, g) => write!(f, "{s}n->{g}n"),
        }
    }
}

/// Every pair crossed with every slack, pairs outermost.
pub fn benchmark_suite(spec: &GridSpec, pairs: &[PairSelector], alphas: &[f64]) -> Result<Vec<Instance>> {
    let graph = Arc::new(generate_terrain(spec)?);
    let mut out = Vec::with_capacity(pairs.len() * alphas.len());
    for pair in pairs {
        let wrap = |e: Error| Error::Pair { pair: pair.to_string(), source: Box::new(e) };
        let (start, goal) = pair.resolve(graph.node_count()).map_err(wrap)?;
        for &alpha in alphas {
            let mut inst = make_instance(graph.clone(), start, goal, alpha).map_err(wrap)?;
            inst.name = format!("{}x{}s{}:{start}->{goal}@{alpha}", spec.width, spec.height, spec.seed);
            out.push(inst);
        }
    }
    Ok(out)
}

/// Graph reference inside an instance manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Path(PathBuf),
    Inline(GraphDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub graph: GraphSource,
    pub start: NodeId,
    pub goal: NodeId,
    pub budget: f64,
    pub alpha: f64,
    pub t_min: f64,
}

impl InstanceManifest {
    pub fn for_instance(instance: &Instance, graph: GraphSource) -> Self {
        InstanceManifest {
            graph,
            start: instance.start,
            goal: instance.goal,
            budget: instance.budget,
            alpha: instance.alpha,
            t_min: instance.t_min,
        }
    }

    /// Loads the graph (paths relative to `base_dir`) and recomputes
    /// `t_min`; the stored budget is kept as given.
    pub fn resolve(&self, base_dir: &Path) -> Result<Instance> {
        let graph = match &self.graph {
            GraphSource::Inline(doc) => doc.clone().into_graph()?,
            GraphSource::Path(p) => {
                let file = std::fs::File::open(base_dir.join(p))?;
                crate::graph::load_graph(std::io::BufReader::new(file))?
            }
        };
        let mut inst = instance_with_budget(Arc::new(graph), self.start, self.goal, self.budget)?;
        inst.alpha = self.alpha;
        Ok(inst)
    }
}
