//! The pluggable subproblem-solver contract and its implementations.
//!
//! Every solver — exact enumeration, tabu search, or the simulated QAOA
//! circuit — answers the same request: given a pinned [`Subproblem`], a warm
//! start, a budget, and a seed, return an assignment whose subproblem
//! objective is at least the warm start's. [`solve_checked`] enforces that
//! contract on every call by recomputing the objective independently, so a
//! buggy solver can never silently degrade a solution.

mod exact;
mod tabu;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::subproblem::{subproblem_objective, Subproblem};

pub use exact::ExactSolver;
pub use tabu::TabuSolver;

/// Stopping rule for iterative solvers: a step cap, a wall-clock limit, or
/// both (whichever trips first). At least one bound must be set.
///
/// Step-based budgets are deterministic; time-based budgets are honored but
/// make results machine-dependent, so the pipeline converts its per-call
/// second budgets into step budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Budget {
    pub fn steps(max_steps: u64) -> Self {
        Budget { max_steps: Some(max_steps), time_limit: None }
    }

    pub fn seconds(secs: f64) -> Self {
        Budget { max_steps: None, time_limit: Some(Duration::from_secs_f64(secs)) }
    }

    fn validate(&self) -> Result<()> {
        match (self.max_steps, self.time_limit) {
            (None, None) => Err(Error::InvalidConfig(
                "solver budget must set a step or time limit".into(),
            )),
            (Some(0), _) => Err(Error::InvalidConfig("step budget must be positive".into())),
            (_, Some(t)) if t.is_zero() => {
                Err(Error::InvalidConfig("time budget must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// One solver invocation. The subproblem and warm start are borrowed; each
/// multistart instance issues its own requests with its own derived seeds.
#[derive(Debug, Clone)]
pub struct SolverRequest<'a> {
    pub subproblem: &'a Subproblem,
    pub warm_start: &'a [u8],
    pub budget: Budget,
    pub seed: u64,
}

/// A solver's answer: the assignment, its (re-verified) subproblem
/// objective, the solver's name, and how many objective evaluations —
/// flips, enumeration steps, or circuit expectations — it spent.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub y: Vec<u8>,
    pub objective: f64,
    pub solver_name: &'static str,
    pub evaluations: u64,
}

/// The common solver interface. Implementations must be deterministic for a
/// fixed request (when the budget is step-based) and must return a solution
/// at least as good as the warm start.
pub trait SubproblemSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, req: &SolverRequest<'_>) -> Result<SolverResult>;
}

/// Run a solver and enforce the contract on its answer.
///
/// Checks the request shape, recomputes the returned objective with
/// [`subproblem_objective`] (tolerance 1e-9, recomputed value kept), and
/// rejects any result below the warm start's objective.
pub fn solve_checked(
    solver: &dyn SubproblemSolver,
    req: &SolverRequest<'_>,
) -> Result<SolverResult> {
    req.budget.validate()?;
    let k = req.subproblem.num_vars();
    if req.warm_start.len() != k {
        return Err(Error::InvalidConfig(format!(
            "warm start has {} bits for {k} variables",
            req.warm_start.len()
        )));
    }
    if req.warm_start.iter().any(|&b| b > 1) {
        return Err(Error::InvalidConfig("warm start bits must be 0 or 1".into()));
    }

    let mut result = solver.solve(req)?;
    if result.y.len() != k || result.y.iter().any(|&b| b > 1) {
        return Err(Error::SolverContract {
            solver: result.solver_name.to_string(),
            message: format!("returned a malformed {k}-variable assignment"),
        });
    }
    let recomputed = subproblem_objective(req.subproblem, &result.y);
    if (recomputed - result.objective).abs() > 1e-9 {
        return Err(Error::SolverContract {
            solver: result.solver_name.to_string(),
            message: format!(
                "reported objective {} but the assignment evaluates to {recomputed}",
                result.objective
            ),
        });
    }
    result.objective = recomputed;
    let warm = subproblem_objective(req.subproblem, req.warm_start);
    if result.objective < warm {
        return Err(Error::SolverContract {
            solver: result.solver_name.to_string(),
            message: format!(
                "returned objective {} below the warm start's {warm}",
                result.objective
            ),
        });
    }
    Ok(result)
}

/// Solver selection by name, as used in configs and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Tabu,
    Qaoa,
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "tabu" => Ok(SolverKind::Tabu),
            "qaoa" => Ok(SolverKind::Qaoa),
            other => Err(Error::UnknownSolver(other.to_string())),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SolverKind::Exact => "exact",
            SolverKind::Tabu => "tabu",
            SolverKind::Qaoa => "qaoa",
        };
        write!(f, "{name}")
    }
}

/// Instantiate a solver by kind. QAOA takes its circuit parameters from
/// `qaoa`; the other solvers ignore it.
pub fn make_solver(
    kind: SolverKind,
    qaoa: &crate::qaoa::QaoaParams,
) -> Box<dyn SubproblemSolver> {
    match kind {
        SolverKind::Exact => Box::new(ExactSolver),
        SolverKind::Tabu => Box::new(TabuSolver),
        SolverKind::Qaoa => Box::new(crate::qaoa::QaoaSolver::new(qaoa.clone())),
    }
}
