//! Benchmark harness: timed repetitions per (instance, solver), raw CSV,
//! summary tables, solution-quality and crossover reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, LimitKind, Result, SolveError};
use crate::generate::{benchmark_suite, GridSpec, Instance, PairSelector};
use crate::oracle::{
    constrained_astar_reference, exact_label_setting, exhaustive_enumerate, OracleLimits, EXHAUSTIVE_NODE_CAP,
};
use crate::solution::PathSolution;
use crate::solver::{solve, SearchMode, SolverConfig};

/// Relative deviation at or below which a result counts as optimal.
pub const OPTIMAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Apulse,
    ApulseExact,
    ExactLabelSetting,
    ConstrainedAstar,
    Exhaustive,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Apulse,
        SolverKind::ApulseExact,
        SolverKind::ExactLabelSetting,
        SolverKind::ConstrainedAstar,
        SolverKind::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Apulse => "apulse",
            SolverKind::ApulseExact => "apulse-exact",
            SolverKind::ExactLabelSetting => "exact-label-setting",
            SolverKind::ConstrainedAstar => "constrained-astar",
            SolverKind::Exhaustive => "exhaustive",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown solver {name:?}")))
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, SolverKind::Apulse)
    }

    /// Runs one solve. `apulse` supplies N and the bucket clamp for both APULSE modes.
    pub fn run(
        self,
        instance: &Instance,
        apulse: &SolverConfig,
        timeout: Option<Duration>,
    ) -> Result<PathSolution, SolveError> {
        let time_limit = timeout.map(|d| d.as_secs_f64());
        let limits = OracleLimits { max_expansions: None, time_limit };
        match self {
            SolverKind::Apulse => {
                solve(instance, &SolverConfig { mode: SearchMode::Bucketed, time_limit, ..apulse.clone() })
            }
            SolverKind::ApulseExact => {
                solve(instance, &SolverConfig { mode: SearchMode::Exact, time_limit, ..apulse.clone() })
            }
            SolverKind::ExactLabelSetting => exact_label_setting(instance, &limits),
            SolverKind::ConstrainedAstar => constrained_astar_reference(instance, &limits),
            SolverKind::Exhaustive => exhaustive_enumerate(instance, EXHAUSTIVE_NODE_CAP),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Timeout,
    Infeasible,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::Timeout => "timeout",
            Outcome::Infeasible => "infeasible",
            Outcome::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub repetitions: usize,
    /// Seconds per repetition.
    pub timeout: f64,
    /// Repetition 0 is a warm-up and is left out of the mean.
    pub warmup: bool,
    /// Compute an exact reference per instance for deviations.
    pub reference: bool,
    /// Run instances concurrently; for quality sweeps only, timings are contended.
    pub parallel: bool,
    pub apulse: SolverConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repetitions: 5,
            timeout: 600.0,
            warmup: true,
            reference: true,
            parallel: false,
            apulse: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub instance_id: String,
    /// Node count of the instance graph.
    pub scale: usize,
    pub alpha: f64,
    pub solver: SolverKind,
    pub repetitions: usize,
    pub timeout: f64,
    pub warmup: bool,
    pub wall_times: Vec<f64>,
    pub outcome: Outcome,
    pub objective: Option<f64>,
    pub reference_objective: Option<f64>,
    pub reference_infeasible: bool,
    pub deviation_vs_exact: Option<f64>,
    pub labels_popped: u64,
    pub message: Option<String>,
}

impl BenchRun {
    /// Timed repetitions that count toward the mean.
    pub fn measured_times(&self) -> &[f64] {
        if self.warmup && self.wall_times.len() > 1 {
            &self.wall_times[1..]
        } else {
            &self.wall_times
        }
    }

    /// Mean over measured repetitions; `None` unless the run succeeded.
    pub fn mean_wall_time(&self) -> Option<f64> {
        if self.outcome != Outcome::Ok {
            return None;
        }
        let times = self.measured_times();
        (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64)
    }
}

/// `(objective - reference) / reference`, or the absolute gap when the
/// reference is zero.
pub fn deviation(objective: f64, reference: f64) -> f64 {
    if objective == reference {
        0.0
    } else if reference > 0.0 {
        (objective - reference) / reference
    } else {
        objective - reference
    }
}

enum Reference {
    Objective(f64),
    Infeasible,
    Missing,
}

fn reference_for(instance: &Instance, timeout: Duration) -> Reference {
    match SolverKind::ExactLabelSetting.run(instance, &SolverConfig::default(), Some(timeout)) {
        Ok(sol) => Reference::Objective(sol.total_log_risk),
        Err(SolveError::NoFeasiblePath { .. }) | Err(SolveError::Unreachable { .. }) => Reference::Infeasible,
        Err(_) => Reference::Missing,
    }
}

fn run_one(instance: &Instance, solver: SolverKind, config: &BenchConfig, reference: &Reference) -> BenchRun {
    let timeout = Duration::from_secs_f64(config.timeout);
    let mut run = BenchRun {
        instance_id: instance.name.clone(),
        scale: instance.node_count(),
        alpha: instance.alpha,
        solver,
        repetitions: config.repetitions,
        timeout: config.timeout,
        warmup: config.warmup,
        wall_times: Vec::with_capacity(config.repetitions),
        outcome: Outcome::Ok,
        objective: None,
        reference_objective: None,
        reference_infeasible: matches!(reference, Reference::Infeasible),
        deviation_vs_exact: None,
        labels_popped: 0,
        message: None,
    };
    if let Reference::Objective(r) = reference {
        run.reference_objective = Some(*r);
    }
    for _ in 0..config.repetitions.max(1) {
        let clock = Instant::now();
        let result = solver.run(instance, &config.apulse, Some(timeout));
        let elapsed = clock.elapsed();
        run.wall_times.push(elapsed.as_secs_f64());
        match result {
            Ok(sol) => {
                run.objective = Some(sol.total_log_risk);
                run.labels_popped = sol.telemetry.labels_popped;
                if elapsed > timeout {
                    run.outcome = Outcome::Timeout;
                    break;
                }
            }
            Err(SolveError::ResourceLimit { limit: LimitKind::WallClock, telemetry, .. }) => {
                run.labels_popped = telemetry.labels_popped;
                run.outcome = Outcome::Timeout;
                break;
            }
            Err(SolveError::NoFeasiblePath { .. }) => {
                run.outcome = Outcome::Infeasible;
                run.objective = None;
            }
            Err(e) => {
                run.outcome = Outcome::Error;
                run.message = Some(e.to_string());
                break;
            }
        }
    }
    if let (Outcome::Ok, Some(obj), Some(r)) = (run.outcome, run.objective, run.reference_objective) {
        run.deviation_vs_exact = Some(deviation(obj, r));
    }
    run
}

/// Every instance against every solver, instances outermost. Failures are
/// recorded in the run, never propagated.
pub fn run_suite(instances: &[Instance], solvers: &[SolverKind], config: &BenchConfig) -> Result<Vec<BenchRun>> {
    if instances.is_empty() || solvers.is_empty() {
        return Err(Error::InvalidConfig("benchmark needs at least one instance and one solver".into()));
    }
    if !(config.timeout > 0.0) {
        return Err(Error::InvalidConfig(format!("timeout must be positive, got {}", config.timeout)));
    }
    let per_instance = |inst: &Instance| {
        let reference = if config.reference {
            reference_for(inst, Duration::from_secs_f64(config.timeout))
        } else {
            Reference::Missing
        };
        solvers.iter().map(|&s| run_one(inst, s, config, &reference)).collect::<Vec<_>>()
    };
    let runs: Vec<Vec<BenchRun>> = if config.parallel {
        instances.par_iter().map(per_instance).collect()
    } else {
        instances.iter().map(per_instance).collect()
    };
    Ok(runs.into_iter().flatten().collect())
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// One row per repetition: `instance_id, solver, rep, wall_time_s, outcome,
/// objective, deviation, labels_popped`.
pub fn write_csv<W: Write>(runs: &[BenchRun], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "instance_id",
        "solver",
        "rep",
        "wall_time_s",
        "outcome",
        "objective",
        "deviation",
        "labels_popped",
    ])?;
    for run in runs {
        for (rep, t) in run.wall_times.iter().enumerate() {
            w.write_record([
                run.instance_id.clone(),
                run.solver.name().to_string(),
                rep.to_string(),
                format!("{t:e}"),
                run.outcome.as_str().to_string(),
                opt_num(run.objective),
                opt_num(run.deviation_vs_exact),
                run.labels_popped.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A summary table cell: mean seconds, a failure status, or untested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Seconds(f64),
    Status(String),
}

/// `scale -> solver -> alpha -> cell`, with untested combinations as `null`.
pub type Summary = BTreeMap<usize, BTreeMap<String, BTreeMap<String, Option<Cell>>>>;

pub fn summary(runs: &[BenchRun]) -> Summary {
    let alphas: BTreeSet<String> = runs.iter().map(|r| format!("{:.2}", r.alpha)).collect();
    let mut groups: BTreeMap<(usize, String, String), Vec<&BenchRun>> = BTreeMap::new();
    for r in runs {
        groups.entry((r.scale, r.solver.name().to_string(), format!("{:.2}", r.alpha))).or_default().push(r);
    }
    let mut table = Summary::new();
    for (scale, solver, _) in groups.keys() {
        let row = table.entry(*scale).or_default().entry(solver.clone()).or_default();
        for a in &alphas {
            row.entry(a.clone()).or_insert(None);
        }
    }
    for ((scale, solver, alpha), rs) in groups {
        let cell = if let Some(bad) = rs.iter().find(|r| r.outcome != Outcome::Ok) {
            Cell::Status(bad.outcome.as_str().to_string())
        } else {
            let means: Vec<f64> = rs.iter().filter_map(|r| r.mean_wall_time()).collect();
            Cell::Seconds(means.iter().sum::<f64>() / means.len() as f64)
        };
        table.get_mut(&scale).unwrap().get_mut(&solver).unwrap().insert(alpha, Some(cell));
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub instance_id: String,
    pub objective: Option<f64>,
    pub reference: Option<f64>,
    pub deviation: Option<f64>,
    pub optimal: bool,
    pub missing_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub solver: SolverKind,
    pub rows: Vec<QualityRow>,
    pub optimal: usize,
    pub suboptimal: usize,
    pub missing: usize,
    pub max_deviation: f64,
}

/// Per-solver objective comparison against the exact references; one row per run.
pub fn quality_report(runs: &[BenchRun]) -> Vec<QualityReport> {
    let mut by_solver: BTreeMap<SolverKind, Vec<&BenchRun>> = BTreeMap::new();
    for r in runs {
        by_solver.entry(r.solver).or_default().push(r);
    }
    by_solver
        .into_iter()
        .map(|(solver, rs)| {
            let mut report =
                QualityReport { solver, rows: Vec::new(), optimal: 0, suboptimal: 0, missing: 0, max_deviation: 0.0 };
            for r in rs {
                let agreed_infeasible = r.outcome == Outcome::Infeasible && r.reference_infeasible;
                let missing = !agreed_infeasible && (r.reference_objective.is_none() || r.outcome != Outcome::Ok);
                let optimal = agreed_infeasible || r.deviation_vs_exact.is_some_and(|d| d.abs() <= OPTIMAL_TOLERANCE);
                if missing {
                    report.missing += 1;
                } else if optimal {
                    report.optimal += 1;
                } else {
                    report.suboptimal += 1;
                }
                if let Some(d) = r.deviation_vs_exact {
                    report.max_deviation = report.max_deviation.max(d.abs());
                }
                report.rows.push(QualityRow {
                    instance_id: r.instance_id.clone(),
                    objective: r.objective,
                    reference: r.reference_objective,
                    deviation: r.deviation_vs_exact,
                    optimal: optimal && !missing,
                    missing_reference: missing,
                });
            }
            report
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    pub subject: SolverKind,
    /// Per solver: `(scale, mean seconds)` over successful runs, ascending scale.
    pub series: BTreeMap<SolverKind, Vec<(usize, f64)>>,
    /// Smallest scale at which the subject's mean beats every other solver.
    pub crossover_scale: Option<usize>,
    pub partial: bool,
}

pub fn crossover_report(runs: &[BenchRun], subject: SolverKind) -> CrossoverReport {
    let mut sums: BTreeMap<SolverKind, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    let mut timed_out: BTreeSet<(SolverKind, usize)> = BTreeSet::new();
    for r in runs {
        match r.mean_wall_time() {
            Some(m) => sums.entry(r.solver).or_default().entry(r.scale).or_default().push(m),
            None if r.outcome == Outcome::Timeout => {
                timed_out.insert((r.solver, r.scale));
            }
            None => {}
        }
    }
    let series: BTreeMap<SolverKind, Vec<(usize, f64)>> = sums
        .into_iter()
        .map(|(s, by_scale)| {
            (s, by_scale.into_iter().map(|(scale, v)| (scale, v.iter().sum::<f64>() / v.len() as f64)).collect())
        })
        .collect();
    let scales: BTreeSet<usize> = runs.iter().map(|r| r.scale).collect();
    let solvers: BTreeSet<SolverKind> = runs.iter().map(|r| r.solver).collect();
    let partial = scales.len() < 3 || solvers.len() < 2 || !solvers.contains(&subject);

    let mean_at =
        |s: SolverKind, scale: usize| series.get(&s).and_then(|v| v.iter().find(|p| p.0 == scale)).map(|p| p.1);
    let crossover_scale = if partial {
        None
    } else {
        scales.iter().copied().find(|&scale| {
            let Some(mine) = mean_at(subject, scale) else { return false };
            solvers.iter().filter(|&&s| s != subject).all(|&s| match mean_at(s, scale) {
                Some(theirs) => mine < theirs,
                None => timed_out.contains(&(s, scale)),
            })
        })
    };
    CrossoverReport { subject, series, crossover_scale, partial }
}

/// Runtime-vs-scale line chart, log-scaled time axis.
pub fn crossover_svg(report: &CrossoverReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 5] = ["#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e"];
    let points: Vec<(usize, f64)> = report.series.values().flatten().copied().collect();
    let mut svg = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n");
    if points.is_empty() {
        svg.push_str("<text x=\"20\" y=\"20\">no successful runs</text>\n</svg>\n");
        return svg;
    }
    let (xmin, xmax) = points.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0 as f64), b.max(p.0 as f64)));
    let (ymin, ymax) = points.iter().fold((f64::MAX, f64::MIN), |(a, b), p| {
        let y = p.1.max(1e-7).log10();
        (a.min(y), b.max(y))
    });
    let sx = |x: f64| PAD + (x - xmin) / (xmax - xmin).max(1.0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y.max(1e-7).log10() - ymin) / (ymax - ymin).max(1e-9) * (H - 2.0 * PAD);
    let _ =
        writeln!(svg, "<line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>", H - PAD, W - PAD, H - PAD);
    let _ = writeln!(svg, "<line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>", H - PAD);
    let _ = writeln!(svg, "<text x=\"{}\" y=\"{}\">nodes</text>", W / 2.0, H - 10.0);
    let _ = writeln!(svg, "<text x=\"5\" y=\"{}\">mean s (log)</text>", PAD - 10.0);
    for (i, (solver, pts)) in report.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x as f64), sy(y))).collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
            coords.join(" ")
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>",
            W - PAD - 140.0,
            PAD + 16.0 * i as f64,
            solver.name()
        );
    }
    if let Some(c) = report.crossover_scale {
        let x = sx(c as f64);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.1}\" y1=\"{PAD}\" x2=\"{x:.1}\" y2=\"{}\" stroke=\"grey\" stroke-dasharray=\"4\"/>",
            H - PAD
        );
        let _ = writeln!(svg, "<text x=\"{:.1}\" y=\"{}\">crossover {c}</text>", x + 4.0, PAD);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Benchmark suite file: grids crossed with start/goal pairs and slacks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteFile {
    pub grids: Vec<GridSpec>,
    pub pairs: Vec<PairSelector>,
    pub alphas: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    #[serde(default)]
    pub apulse: Option<SolverConfig>,
}

impl SuiteFile {
    pub fn instances(&self) -> Result<Vec<Instance>> {
        let mut out = Vec::new();
        for spec in &self.grids {
            out.extend(benchmark_suite(spec, &self.pairs, &self.alphas)?);
        }
        Ok(out)
    }
}

/// The default desk-scale ladder, 10x10 through 100x100, corner to corner.
pub fn default_ladder(seed: u64) -> Vec<GridSpec> {
    [10, 20, 30, 50, 70, 100].into_iter().map(|n| GridSpec::new(n, n, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_run(id: &str, solver: SolverKind, scale: usize, times: &[f64], outcome: Outcome) -> BenchRun {
        BenchRun {
            instance_id: id.into(),
            scale,
            alpha: 0.2,
            solver,
            repetitions: times.len(),
            timeout: 600.0,
            warmup: true,
            wall_times: times.to_vec(),
            outcome,
            objective: Some(1.0),
            reference_objective: Some(1.0),
            reference_infeasible: false,
            deviation_vs_exact: Some(0.0),
            labels_popped: 0,
            message: None,
        }
    }

    #[test]
    fn mean_skips_warmup() {
        let r = fake_run("a", SolverKind::Apulse, 100, &[9.0, 1.0, 2.0, 3.0], Outcome::Ok);
        assert_eq!(r.mean_wall_time(), Some(2.0));
        let t = fake_run("a", SolverKind::Apulse, 100, &[1.0, 700.0], Outcome::Timeout);
        assert_eq!(t.mean_wall_time(), None);
    }

    #[test]
    fn deviation_definition() {
        assert_eq!(deviation(1.0, 1.0), 0.0);
        assert!((deviation(1.000025, 1.0) - 2.5e-5).abs() < 1e-12);
        assert_eq!(deviation(0.5, 0.0), 0.5);
    }

    #[test]
    fn quality_all_exact() {
        let runs: Vec<_> =
            (0..4).map(|i| fake_run(&i.to_string(), SolverKind::ApulseExact, 10, &[1.0], Outcome::Ok)).collect();
        let q = &quality_report(&runs)[0];
        assert_eq!((q.optimal, q.suboptimal, q.max_deviation), (4, 0, 0.0));
        assert_eq!(q.rows.len(), 4);
    }

    #[test]
    fn quality_one_small_deviation() {
        let mut runs: Vec<_> =
            (0..26).map(|i| fake_run(&i.to_string(), SolverKind::Apulse, 10, &[1.0], Outcome::Ok)).collect();
        runs[7].objective = Some(1.000025);
        runs[7].deviation_vs_exact = Some(deviation(1.000025, 1.0));
        let q = &quality_report(&runs)[0];
        assert_eq!((q.optimal, q.suboptimal), (25, 1));
        assert!((q.max_deviation - 2.5e-5).abs() < 1e-12);
        assert_eq!(q.rows.len(), 26);
    }

    #[test]
    fn quality_flags_missing_reference() {
        let mut run = fake_run("x", SolverKind::Apulse, 10, &[1.0], Outcome::Ok);
        run.reference_objective = None;
        run.deviation_vs_exact = None;
        let q = &quality_report(&[run])[0];
        assert_eq!((q.optimal, q.suboptimal, q.missing), (0, 0, 1));
        assert!(q.rows[0].missing_reference);
    }

    #[test]
    fn crossover_between_scales() {
        let mut runs = vec![];
        for (scale, apulse, other) in [(100, 2.0, 1.0), (400, 3.0, 3.5), (900, 4.0, 40.0)] {
            runs.push(fake_run("i", SolverKind::Apulse, scale, &[0.0, apulse], Outcome::Ok));
            runs.push(fake_run("i", SolverKind::ExactLabelSetting, scale, &[0.0, other], Outcome::Ok));
        }
        let rep = crossover_report(&runs, SolverKind::Apulse);
        assert!(!rep.partial);
        assert_eq!(rep.crossover_scale, Some(400));
        assert_eq!(rep.series[&SolverKind::Apulse], vec![(100, 2.0), (400, 3.0), (900, 4.0)]);
        let svg = crossover_svg(&rep);
        assert!(svg.contains("crossover 400") && svg.contains("<polyline"));
    }

    #[test]
    fn crossover_counts_baseline_timeouts() {
        let mut runs = vec![];
        for (scale, apulse) in [(100, 2.0), (400, 3.0), (900, 4.0)] {
            runs.push(fake_run("i", SolverKind::Apulse, scale, &[0.0, apulse], Outcome::Ok));
            let outcome = if scale == 900 { Outcome::Timeout } else { Outcome::Ok };
            runs.push(fake_run("i", SolverKind::ExactLabelSetting, scale, &[0.0, 1.0], outcome));
        }
        let rep = crossover_report(&runs, SolverKind::Apulse);
        assert_eq!(rep.crossover_scale, Some(900));
        assert_eq!(rep.series[&SolverKind::ExactLabelSetting].len(), 2);
    }

    #[test]
    fn crossover_single_scale_is_partial() {
        let runs = vec![
            fake_run("i", SolverKind::Apulse, 100, &[1.0], Outcome::Ok),
            fake_run("i", SolverKind::ExactLabelSetting, 100, &[2.0], Outcome::Ok),
        ];
        let rep = crossover_report(&runs, SolverKind::Apulse);
        assert!(rep.partial);
        assert_eq!(rep.crossover_scale, None);
    }

    #[test]
    fn summary_marks_timeouts_and_untested() {
        let mut a = fake_run("i", SolverKind::Apulse, 100, &[0.0, 2.0], Outcome::Ok);
        a.alpha = 0.1;
        let b = fake_run("i", SolverKind::ExactLabelSetting, 100, &[0.0, 700.0], Outcome::Timeout);
        let s = summary(&[a, b]);
        assert_eq!(s[&100]["apulse"]["0.10"], Some(Cell::Seconds(2.0)));
        assert_eq!(s[&100]["apulse"]["0.20"], None);
        assert_eq!(s[&100]["exact-label-setting"]["0.20"], Some(Cell::Status("timeout".into())));
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"0.20\":null"), "{json}");
    }

    #[test]
    fn solver_names_round_trip() {
        for k in SolverKind::ALL {
            assert_eq!(SolverKind::parse(k.name()).unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!(SolverKind::parse("wc-ebba").is_err());
    }
}
