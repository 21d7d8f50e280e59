use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use apulse_core::harness::{
    crossover_report, crossover_svg, quality_report, run_suite, summary, write_csv, BenchConfig, SolverKind, SuiteFile,
};
use apulse_core::solver::{budget_sweep, solve_query};
use apulse_core::{
    generate_terrain_with, load_graph, make_instance, save_graph, Graph, GridSpec, InstanceManifest, NodeId,
    SearchMode, SolverConfig, VelocityMatrix,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::api::{solve_outcome, sweep_json, Problem};
use crate::service::{serve, ServeConfig};

#[derive(Debug, Parser)]
#[command(name = "apulse", version, about = "Risk-minimizing routes under a travel-time budget")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic terrain grid graph.
    Gen(GenArgs),
    /// Solve one start/goal/budget query.
    Solve(SolveArgs),
    /// Solve one query at several budgets.
    Sweep(SweepArgs),
    /// Time solvers over a benchmark suite.
    Bench(BenchArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 20)]
    pub width: u32,
    #[arg(long, default_value_t = 20)]
    pub height: u32,
    #[arg(long, default_value_t = 25.0)]
    pub cell_size: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Full grid spec as JSON; overrides the size flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Velocity matrix JSON: terrain class -> speed per slope band.
    #[arg(long)]
    pub velocity: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bucketed,
    Exact,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Bucketed)]
    pub mode: ModeArg,
    /// Target bucket count N.
    #[arg(long)]
    pub buckets: Option<u32>,
    /// Minimum bucket width, seconds.
    #[arg(long)]
    pub clamp: Option<f64>,
    #[arg(long)]
    pub expansion_limit: Option<u64>,
    /// Wall-clock cap, seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut config = SolverConfig {
            mode: match self.mode {
                ModeArg::Bucketed => SearchMode::Bucketed,
                ModeArg::Exact => SearchMode::Exact,
            },
            node_expansion_limit: self.expansion_limit,
            time_limit: self.time_limit,
            ..SolverConfig::default()
        };
        if let Some(n) = self.buckets {
            config.target_buckets = n;
        }
        if let Some(c) = self.clamp {
            config.bucket_clamp = c;
        }
        config
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, required_unless_present = "instance", conflicts_with = "instance")]
    pub graph: Option<PathBuf>,
    /// Instance manifest JSON with graph, start, goal and budget.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, required_unless_present = "instance")]
    pub start: Option<u32>,
    #[arg(long, required_unless_present = "instance")]
    pub goal: Option<u32>,
    /// Budget in seconds.
    #[arg(long, conflicts_with = "alpha")]
    pub budget: Option<f64>,
    /// Budget as slack over the minimum travel time: t_min * (1 + alpha).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub start: u32,
    #[arg(long)]
    pub goal: u32,
    #[arg(long, value_delimiter = ',', required_unless_present = "alphas", conflicts_with = "alphas")]
    pub budgets: Vec<f64>,
    /// Budgets as slacks over the minimum travel time.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub suite: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seconds per repetition.
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Run instances concurrently (quality sweeps; timings are contended).
    #[arg(long)]
    pub parallel: bool,
    /// Skip the exact reference solve per instance.
    #[arg(long)]
    pub no_reference: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "APULSE_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = "APULSE_GRAPH_DIR")]
    pub graph_dir: Option<PathBuf>,
    /// Directory of the built web UI, served at `/`.
    #[arg(long, env = "APULSE_UI_DIR")]
    pub ui: Option<PathBuf>,
}

/// A domain failure: human message plus an optional structured body.
#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub detail: Option<String>,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { message: e.to_string(), detail: None }
    }
}

impl Failure {
    fn problem(p: Problem) -> Self {
        Failure { message: p.message.clone(), detail: Some(p.to_json()) }
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some(detail) = f.detail {
                eprintln!("{detail}");
            }
            1
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Bench(a) => bench(a),
        Command::Serve(a) => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(ServeConfig { port: a.port, graph_dir: a.graph_dir, ui_dir: a.ui }))?;
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_graph(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()).into()),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{body}")?;
            Ok(())
        }
    }
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let spec = match &a.spec {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => GridSpec { cell_size: a.cell_size, ..GridSpec::new(a.width, a.height, a.seed) },
    };
    let velocity = match &a.velocity {
        Some(path) => VelocityMatrix::from_json(&std::fs::read_to_string(path)?)?,
        None => VelocityMatrix::default(),
    };
    let graph = generate_terrain_with(&spec, &velocity)?;
    let mut sink = BufWriter::new(File::create(&a.out)?);
    save_graph(&graph, &mut sink)?;
    sink.flush()?;
    eprintln!("wrote {} nodes, {} edges to {}", graph.node_count(), graph.edge_count(), a.out.display());
    Ok(())
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let config = a.solver.config();
    let (graph, start, goal, budget) = if let Some(path) = &a.instance {
        let manifest: InstanceManifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let inst = manifest.resolve(base)?;
        let budget = match (a.budget, a.alpha) {
            (Some(b), _) => b,
            (None, Some(alpha)) => inst.t_min * (1.0 + alpha),
            (None, None) => inst.budget,
        };
        (inst.graph, inst.start, inst.goal, budget)
    } else {
        let graph = Arc::new(read_graph(a.graph.as_deref().expect("clap requires --graph"))?);
        let (start, goal) =
            (NodeId(a.start.expect("clap requires --start")), NodeId(a.goal.expect("clap requires --goal")));
        let budget = match (a.budget, a.alpha) {
            (Some(b), _) => b,
            (None, Some(alpha)) => make_instance(graph.clone(), start, goal, alpha)?.budget,
            (None, None) => return Err("one of --budget and --alpha is required".into()),
        };
        (graph, start, goal, budget)
    };
    let sol = solve_outcome(solve_query(&graph, start, goal, budget, &config)).map_err(Failure::problem)?;
    if sol.partial {
        eprintln!("warning: search stopped early, returning the best path found so far");
    }
    emit(a.out.as_deref(), &sol.to_json())
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let graph = Arc::new(read_graph(&a.graph)?);
    let (start, goal) = (NodeId(a.start), NodeId(a.goal));
    let budgets = if a.alphas.is_empty() {
        a.budgets
    } else {
        let t_min = make_instance(graph.clone(), start, goal, 0.0)?.t_min;
        a.alphas.iter().map(|alpha| t_min * (1.0 + alpha)).collect()
    };
    let entries = budget_sweep(&graph, start, goal, &budgets, &a.solver.config())?;
    emit(a.out.as_deref(), &sweep_json(entries))
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let suite: SuiteFile = serde_json::from_str(&std::fs::read_to_string(&a.suite)?)?;
    let instances = suite.instances()?;
    let config = BenchConfig {
        repetitions: a.reps,
        timeout: a.timeout,
        reference: !a.no_reference,
        parallel: a.parallel,
        apulse: suite.apulse.clone().unwrap_or_default(),
        ..BenchConfig::default()
    };
    let solvers = if suite.solvers.is_empty() {
        vec![SolverKind::Apulse, SolverKind::ExactLabelSetting]
    } else {
        suite.solvers.clone()
    };
    eprintln!("running {} instances x {} solvers x {} reps", instances.len(), solvers.len(), a.reps);
    let runs = run_suite(&instances, &solvers, &config)?;

    std::fs::create_dir_all(&a.out)?;
    write_csv(&runs, BufWriter::new(File::create(a.out.join("runs.csv"))?))?;
    std::fs::write(a.out.join("summary.json"), pretty(&summary(&runs)))?;
    let quality = quality_report(&runs);
    std::fs::write(a.out.join("quality.json"), pretty(&quality))?;
    let crossover = crossover_report(&runs, SolverKind::Apulse);
    std::fs::write(a.out.join("crossover.json"), pretty(&crossover))?;
    std::fs::write(a.out.join("crossover.svg"), crossover_svg(&crossover))?;

    for q in &quality {
        println!(
            "{}: optimal {}/{}, max deviation {:.3e}, missing reference {}",
            q.solver.name(),
            q.optimal,
            q.rows.len(),
            q.max_deviation,
            q.missing
        );
    }
    match crossover.crossover_scale {
        Some(scale) => println!("crossover at {scale} nodes"),
        None if crossover.partial => println!("crossover: partial (needs 3+ scales and 2+ solvers)"),
        None => println!("crossover: none within the ladder"),
    }
    println!("results in {}", a.out.display());
    Ok(())
}
