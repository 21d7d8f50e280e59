//! Request and response bodies shared by the HTTP service and the CLI.

use apulse_core::graph::GraphDoc;
use apulse_core::solver::SweepEntry;
use apulse_core::{GridSpec, NodeId, PathSolution, SolveError, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    /// Id of a registered graph; exclusive with `graph`.
    #[serde(default)]
    pub graph_id: Option<String>,
    /// Inline graph document; exclusive with `graph_id`.
    #[serde(default)]
    pub graph: Option<GraphDoc>,
    pub start: NodeId,
    pub goal: NodeId,
    pub budget: f64,
    #[serde(default)]
    pub config: SolverConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    #[serde(default)]
    pub graph_id: Option<String>,
    #[serde(default)]
    pub graph: Option<GraphDoc>,
    pub start: NodeId,
    pub goal: NodeId,
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub config: SolverConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskUpdate {
    pub node: NodeId,
    pub risk: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplanRequest {
    pub graph_id: String,
    #[serde(default)]
    pub patch: Vec<RiskUpdate>,
    pub start: NodeId,
    pub goal: NodeId,
    pub budget: f64,
    #[serde(default)]
    pub config: SolverConfig,
}

/// Registers either a full graph document or a generated grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UploadRequest {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub graph: Option<GraphDoc>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

/// Error body: a machine-readable code plus a human message. Extra fields
/// appear only where they apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    #[serde(skip)]
    pub status: u16,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
}

impl Problem {
    pub fn new(status: u16, error: &'static str, message: impl Into<String>) -> Self {
        Problem { status, error, message: message.into(), t_min: None, budget: None }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(400, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(404, "graph_not_found", message)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem serializes")
    }
}

impl From<apulse_core::Error> for Problem {
    fn from(e: apulse_core::Error) -> Self {
        Problem::bad_request(e.to_string())
    }
}

/// Outcome of a solve as the wire sees it: a solution (possibly a partial
/// incumbent) or a problem.
pub fn solve_outcome(result: Result<PathSolution, SolveError>) -> Result<PathSolution, Problem> {
    let message = match &result {
        Err(e) => e.to_string(),
        Ok(_) => String::new(),
    };
    match result {
        Ok(sol) => Ok(sol),
        Err(SolveError::NoFeasiblePath { budget, t_min }) => {
            Err(Problem { t_min: Some(t_min), budget: Some(budget), ..Problem::new(422, "no_feasible_path", message) })
        }
        Err(SolveError::Unreachable { .. }) => Err(Problem::new(422, "unreachable", message)),
        Err(SolveError::ResourceLimit { incumbent: Some(sol), .. }) => Ok(*sol),
        Err(SolveError::ResourceLimit { .. }) => Err(Problem::new(422, "resource_limit", message)),
        Err(SolveError::Invalid(_)) => Err(Problem::bad_request(message)),
        Err(SolveError::OracleTooLarge { .. }) => Err(Problem::new(500, "internal", message)),
    }
}

/// Sweep body: `{"results":[{"budget":..,"status":"ok","solution":{..}} | {"budget":..,"status":<code>,"problem":{..}}]}`.
/// Solutions are spliced in verbatim so each matches a single solve byte for byte.
pub fn sweep_json(entries: Vec<SweepEntry>) -> String {
    let mut out = String::from("{\"results\":[");
    for (i, entry) in entries.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let budget = serde_json::to_string(&entry.budget).expect("finite budget");
        match solve_outcome(entry.result) {
            Ok(sol) => {
                let status = if sol.partial { "partial" } else { "ok" };
                out.push_str(&format!(
                    "{{\"budget\":{budget},\"status\":\"{status}\",\"solution\":{}}}",
                    sol.to_json()
                ));
            }
            Err(p) => {
                out.push_str(&format!(
                    "{{\"budget\":{budget},\"status\":\"{}\",\"problem\":{}}}",
                    p.error,
                    p.to_json()
                ));
            }
        }
    }
    out.push_str("]}");
    out
}

pub fn replan_json(revision: &str, solution: &PathSolution) -> String {
    format!(
        "{{\"revision\":{},\"solution\":{}}}",
        serde_json::to_string(revision).expect("string serializes"),
        solution.to_json()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasible_problem_carries_t_min() {
        let p = solve_outcome(Err(SolveError::NoFeasiblePath { budget: 0.0, t_min: 12.5 })).unwrap_err();
        assert_eq!(p.status, 422);
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["error"], "no_feasible_path");
        assert_eq!(v["t_min"], 12.5);
        assert!(v["message"].as_str().unwrap().contains("no feasible path"));
    }

    #[test]
    fn solve_request_rejects_unknown_fields() {
        let ok = r#"{"graph_id":"demo","start":0,"goal":3,"budget":10,"config":{"mode":"exact"}}"#;
        let req: SolveRequest = serde_json::from_str(ok).unwrap();
        assert_eq!(req.config, SolverConfig::exact());
        assert!(
            serde_json::from_str::<SolveRequest>(r#"{"graph_id":"d","start":0,"goal":1,"budget":1,"x":1}"#).is_err()
        );
    }
}
