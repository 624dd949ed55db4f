//! The end-to-end multilevel driver.
//!
//! [`solve`] coarsens the input graph into a hierarchy, solves the coarsest
//! level outright, then walks back toward the original graph: each level's
//! solution is carried down by interpolation and improved by a batch of
//! independent, seeded multistart refinement instances, keeping the best.
//! Refinement repeatedly extracts a small high-gain subproblem around the
//! current cut and hands it to the configured subproblem solver.
//!
//! Everything downstream of configuration is deterministic for a fixed
//! `(graph, config)` pair — multistart instances derive private seeds,
//! solvers run on step budgets, and result selection breaks ties by
//! instance index — so a run can be reproduced exactly from its report.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coarsening::{build_hierarchy, ContractionMap};
use crate::embedding::{embed, Embedding, EmbeddingParams};
use crate::error::{Error, Result};
use crate::graph::{CutAssignment, GainTable, Graph};
use crate::qaoa::QaoaParams;
use crate::seeding::{derive_seed, stream};
use crate::solver::{
    make_solver, solve_checked, Budget, ExactSolver, SolverKind, SolverRequest, TabuSolver,
};
use crate::subproblem::{build_subproblem, merge_solution, warm_start, Subproblem};

/// Conversion rate from advisory second budgets to deterministic step
/// budgets: the config expresses solver budgets in seconds, but wall-clock
/// cutoffs would make results machine-dependent, so the pipeline hands
/// solvers `seconds × TABU_STEPS_PER_SECOND` steps instead.
pub const TABU_STEPS_PER_SECOND: u64 = 200_000;

/// Coarsest graphs at or below this size are solved by exact enumeration
/// instead of tabu search.
const COARSEST_EXACT_MAX: usize = 20;

/// Convert an advisory second budget to a step budget (at least 1 step).
pub fn seconds_to_steps(secs: f64) -> u64 {
    ((secs * TABU_STEPS_PER_SECOND as f64).ceil() as u64).max(1)
}

/// Full configuration of a pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Subproblem size K: refinement hands the solver subproblems of (at
    /// most) this many free variables, and coarsening stops below it.
    pub subproblem_size: usize,
    /// Independent refinement instances per level; the best result wins.
    pub multistarts: usize,
    /// Embedding dimension for coarsening.
    pub dim: usize,
    /// Fraction of each level's edges to sparsify away (weight-preserving)
    /// before matching; 0 disables sparsification.
    pub sparsify_fraction: f64,
    /// Subproblem solver used during refinement.
    pub solver: SolverKind,
    /// Master seed; every random stream in the run derives from it.
    pub seed: u64,
    /// Advisory budget for the coarsest-level solve, seconds.
    pub coarsest_budget_secs: f64,
    /// Advisory budget per refinement subproblem solve, seconds.
    pub subproblem_budget_secs: f64,
    /// Refinement stops after this many consecutive iterations without
    /// strict improvement.
    pub no_improve_limit: usize,
    /// Circuit and sampling parameters for the QAOA solver (ignored by the
    /// others, but always echoed in the report).
    pub qaoa: QaoaParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subproblem_size: 100,
            multistarts: 40,
            dim: 3,
            sparsify_fraction: 0.0,
            solver: SolverKind::Tabu,
            seed: 0,
            coarsest_budget_secs: 5.0,
            subproblem_budget_secs: 0.1,
            no_improve_limit: 3,
            qaoa: QaoaParams::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subproblem_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "subproblem size must be at least 2, got {}",
                self.subproblem_size
            )));
        }
        if self.multistarts < 1 {
            return Err(Error::InvalidConfig("multistart count must be ≥ 1".into()));
        }
        if self.dim < 1 {
            return Err(Error::InvalidConfig("embedding dimension must be ≥ 1".into()));
        }
        if !(0.0..1.0).contains(&self.sparsify_fraction) {
            return Err(Error::InvalidConfig(format!(
                "sparsify fraction must lie in [0, 1), got {}",
                self.sparsify_fraction
            )));
        }
        for (name, v) in [
            ("coarsest budget", self.coarsest_budget_secs),
            ("subproblem budget", self.subproblem_budget_secs),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a positive number of seconds, got {v}"
                )));
            }
        }
        if self.no_improve_limit < 1 {
            return Err(Error::InvalidConfig("no-improve limit must be ≥ 1".into()));
        }
        self.qaoa.validate()
    }

    fn embedding_params(&self) -> EmbeddingParams {
        EmbeddingParams { dim: self.dim, ..EmbeddingParams::default() }
    }

    fn subproblem_budget(&self) -> Budget {
        Budget::steps(seconds_to_steps(self.subproblem_budget_secs))
    }
}

/// Statistics for one hierarchy level as refinement passed through it.
/// Level 0 is the original graph; higher levels are coarser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Objective on arrival at this level — the coarsest solve's result at
    /// the coarsest level, the interpolated value everywhere else.
    pub coarse_objective: f64,
    /// Objective after this level's multistart refinement.
    pub refined_objective: f64,
    /// Refinement iterations summed over all multistart instances.
    pub iterations: u64,
    /// Successful subproblem solves summed over all multistart instances.
    pub solver_calls: u64,
    /// Failed solver calls (skipped iterations) plus failed instances.
    pub failures: u64,
}

/// The outcome of a run: the best cut found, how it was reached, and the
/// exact configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Weight of the returned cut, recomputed from the original graph and
    /// `assignment` at emission — never a value accumulated along the way.
    pub objective: f64,
    /// Side (0 or 1) of every vertex of the original graph.
    pub assignment: Vec<u8>,
    /// Fraction of the final objective already attained when the solution
    /// left the coarsest level. The numerator is the coarsest refined
    /// assignment carried straight down to the original graph and evaluated
    /// there, so it is always commensurable with `objective` — even when
    /// sparsification reshaped the coarse levels' edge weights. Without
    /// sparsification it equals the coarsest level's refined objective
    /// exactly. `None` when the final objective is 0.
    pub coarse_ratio: Option<f64>,
    /// Per-level statistics in processing order, coarsest first.
    pub per_level: Vec<LevelReport>,
    pub wall_time_secs: f64,
    pub seed: u64,
    pub config: RunConfig,
}

/// Carry a coarse-level cut down one level: every fine vertex adopts the
/// side of the coarse vertex it was contracted into. The fine objective is
/// recomputed from scratch on `fine`; without sparsification it equals the
/// coarse objective exactly, because contraction drops intra-pair edges
/// into the ledger rather than folding them into the objective.
pub fn interpolate(x_c: &CutAssignment, map: &ContractionMap, fine: &Graph) -> CutAssignment {
    assert_eq!(map.num_coarse(), x_c.bits().len(), "assignment does not fit the coarse level");
    assert_eq!(map.num_fine(), fine.num_nodes(), "map does not fit the fine graph");
    let bits = map.fine_to_coarse().iter().map(|&c| x_c.bits()[c]).collect();
    CutAssignment::new(fine, bits).expect("interpolated bits are valid by construction")
}

/// What one refinement instance did.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub assignment: CutAssignment,
    pub iterations: u64,
    /// Successful subproblem solves.
    pub solver_calls: u64,
    /// Solver calls that failed; their iterations were skipped.
    pub failures: u64,
    /// Objective after each iteration; non-decreasing.
    pub trace: Vec<f64>,
}

/// One gain-driven refinement instance.
///
/// Each iteration draws a uniform random subset of
/// `min(|V|, ⌈max(0.2·|V|, 2K)⌉)` vertices, keeps the K highest-gain
/// members (ties to the smaller id; all of them if the subset is smaller
/// than K), builds the pinned subproblem around the current cut, and asks
/// the configured solver for a better assignment, warm-started from the
/// current one. Solutions are merged back when the objective does not
/// decrease; the loop stops after `no_improve_limit` consecutive
/// iterations without strict improvement. A solver failure skips the
/// iteration, counts toward the limit, and is logged. The result's
/// objective is never below `x0`'s, and the whole instance is
/// deterministic for a fixed `instance_seed`.
pub fn refine_level(
    g: &Graph,
    x0: &CutAssignment,
    cfg: &RunConfig,
    instance_seed: u64,
) -> Result<RefineOutcome> {
    let n = g.num_nodes();
    let k = cfg.subproblem_size;
    let subset_size = ((0.2 * n as f64).max(2.0 * k as f64).ceil() as usize).min(n);
    let budget = cfg.subproblem_budget();
    let solver = make_solver(cfg.solver, &cfg.qaoa);
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);

    let mut x = x0.clone();
    let mut gains = GainTable::compute(g, &x);
    // Stays a permutation of 0..n across iterations; each iteration
    // re-randomizes only the prefix it consumes.
    let mut pool: Vec<usize> = (0..n).collect();
    let mut iterations = 0u64;
    let mut solver_calls = 0u64;
    let mut failures = 0u64;
    let mut trace = Vec::new();
    let mut since_improve = 0usize;
    let mut last_error = None;

    while since_improve < cfg.no_improve_limit {
        iterations += 1;
        for j in 0..subset_size {
            let pick = rng.gen_range(j..n);
            pool.swap(j, pick);
        }
        let mut chosen: Vec<usize> = pool[..subset_size].to_vec();
        chosen.sort_by(|&a, &b| gains.gain(b).total_cmp(&gains.gain(a)).then(a.cmp(&b)));
        chosen.truncate(k.min(subset_size));
        chosen.sort_unstable();

        let sp = build_subproblem(g, &x, &chosen);
        let warm = warm_start(&sp, &x);
        let req = SolverRequest {
            subproblem: &sp,
            warm_start: &warm,
            budget,
            seed: derive_seed(instance_seed, &[iterations]),
        };
        let solved = match solve_checked(solver.as_ref(), &req) {
            Err(Error::Capacity { solver: "qaoa", vars, limit }) => {
                log::warn!(
                    "qaoa cannot simulate {vars} variables (cap {limit}); \
                     falling back to tabu for this subproblem"
                );
                solve_checked(&TabuSolver, &req)
            }
            other => other,
        };
        match solved {
            Ok(res) => {
                solver_calls += 1;
                if res.objective >= x.objective() {
                    if res.objective > x.objective() {
                        since_improve = 0;
                    } else {
                        since_improve += 1;
                    }
                    merge_solution(g, &mut x, &mut gains, &sp, &res.y);
                } else {
                    since_improve += 1;
                }
            }
            Err(e) => {
                failures += 1;
                since_improve += 1;
                log::warn!("refinement solver call failed, skipping iteration: {e}");
                last_error = Some(e);
            }
        }
        trace.push(x.objective());
    }

    if solver_calls == 0 {
        if let Some(e) = last_error {
            // Every single solve failed: the instance produced nothing and
            // reports the reason instead of silently echoing its input.
            return Err(e);
        }
    }
    Ok(RefineOutcome { assignment: x, iterations, solver_calls, failures, trace })
}

/// What a batch of multistart instances did.
#[derive(Debug, Clone, PartialEq)]
pub struct MultistartOutcome {
    pub assignment: CutAssignment,
    /// Index of the winning instance (lowest index on objective ties).
    pub winner: usize,
    /// Iterations summed over the successful instances.
    pub iterations: u64,
    /// Successful solver calls summed over the successful instances.
    pub solver_calls: u64,
    /// Skipped-iteration solver failures, plus one per failed instance.
    pub failures: u64,
}

/// Run `cfg.multistarts` independent [`refine_level`] instances from the
/// same start and keep the best result (ties to the lowest instance index,
/// so the outcome is independent of execution interleaving).
///
/// Instance i seeds itself with `derive_seed(cfg.seed, [instance-stream,
/// level, i])`; `level` is the hierarchy level being refined, included so
/// no two levels share instance seeds. Instances run in parallel, capped
/// by the `MLMC_THREADS` environment variable when set. A failing instance
/// is excluded with a warning; if every instance fails the batch fails.
pub fn multistart_refine(
    g: &Graph,
    x0: &CutAssignment,
    cfg: &RunConfig,
    level: u64,
) -> Result<MultistartOutcome> {
    let r = cfg.multistarts;
    let run = || {
        (0..r)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, &[stream::INSTANCE, level, i as u64]);
                refine_level(g, x0, cfg, seed)
            })
            .collect::<Vec<Result<RefineOutcome>>>()
    };
    let results = match thread_cap() {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not build a {threads}-thread pool ({e}); using the default");
                run()
            }
        },
        None => run(),
    };

    let mut best: Option<(usize, CutAssignment)> = None;
    let mut iterations = 0u64;
    let mut solver_calls = 0u64;
    let mut failures = 0u64;
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(outcome) => {
                iterations += outcome.iterations;
                solver_calls += outcome.solver_calls;
                failures += outcome.failures;
                let better = match &best {
                    None => true,
                    Some((_, b)) => outcome.assignment.objective() > b.objective(),
                };
                if better {
                    best = Some((i, outcome.assignment));
                }
            }
            Err(e) => {
                failures += 1;
                log::warn!("multistart instance {i} failed and is excluded: {e}");
            }
        }
    }
    match best {
        Some((winner, assignment)) => {
            Ok(MultistartOutcome { assignment, winner, iterations, solver_calls, failures })
        }
        None => Err(Error::AllInstancesFailed(r)),
    }
}

/// Solve the coarsest level as one pin-free subproblem covering the whole
/// graph: exact enumeration when it is small enough, otherwise tabu search
/// under the coarsest-level budget.
fn solve_coarsest(g: &Graph, cfg: &RunConfig) -> Result<CutAssignment> {
    let sp = Subproblem::pin_free(g);
    let warm = vec![0u8; g.num_nodes()];
    let req = SolverRequest {
        subproblem: &sp,
        warm_start: &warm,
        budget: Budget::steps(seconds_to_steps(cfg.coarsest_budget_secs)),
        seed: derive_seed(cfg.seed, &[stream::COARSEST]),
    };
    let res = if g.num_nodes() <= COARSEST_EXACT_MAX {
        solve_checked(&ExactSolver, &req)?
    } else {
        solve_checked(&TabuSolver, &req)?
    };
    CutAssignment::new(g, res.y)
}

/// Run the full multilevel pipeline.
///
/// Builds the hierarchy, solves the coarsest level, then per level from
/// coarsest to finest interpolates the incoming solution and refines it
/// with a multistart batch. The reported objective is recomputed from the
/// original graph at emission; errors carry the pipeline stage they
/// occurred in.
pub fn solve(g: &Graph, cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let hierarchy = build_hierarchy(
        g,
        cfg.subproblem_size,
        &cfg.embedding_params(),
        cfg.sparsify_fraction,
        cfg.seed,
    )
    .map_err(|e| e.in_stage("coarsening"))?;

    let num_levels = hierarchy.num_levels();
    let mut x =
        solve_coarsest(hierarchy.coarsest(), cfg).map_err(|e| e.in_stage("coarsest-solve"))?;

    let mut per_level = Vec::with_capacity(num_levels);
    let mut coarsest_solution = None;
    for level in (0..num_levels).rev() {
        let level_graph = &hierarchy.levels[level];
        if level + 1 < num_levels {
            x = interpolate(&x, &hierarchy.maps[level], level_graph);
        }
        let coarse_objective = x.objective();
        let outcome = multistart_refine(level_graph, &x, cfg, level as u64)
            .map_err(|e| e.in_stage("refinement"))?;
        x = outcome.assignment;
        if level + 1 == num_levels {
            coarsest_solution = Some(x.clone());
        }
        per_level.push(LevelReport {
            level,
            nodes: level_graph.num_nodes(),
            edges: level_graph.num_edges(),
            coarse_objective,
            refined_objective: x.objective(),
            iterations: outcome.iterations,
            solver_calls: outcome.solver_calls,
            failures: outcome.failures,
        });
    }

    let objective = g.cut_value(x.bits());
    debug_assert!(
        (objective - x.objective()).abs() <= 1e-9 * (1.0 + objective.abs()),
        "accumulated objective {} drifted from the recomputed value {objective}",
        x.objective()
    );
    // Measure the coarsest solution in the original graph's currency:
    // carry it straight down through every contraction map and recompute
    // its cut weight on the finest level. Sparsification moves weight
    // between edges of the working graphs, so the stored coarse levels'
    // objectives are not directly comparable with `objective`; the
    // carried-down value always is, and without sparsification it equals
    // the coarsest refined objective exactly.
    let mut carried = coarsest_solution.expect("the level loop always runs at least once");
    for level in (0..num_levels - 1).rev() {
        carried = interpolate(&carried, &hierarchy.maps[level], &hierarchy.levels[level]);
    }
    let coarsest_on_finest = g.cut_value(carried.bits());
    let coarse_ratio = (objective > 0.0).then(|| coarsest_on_finest / objective);
    Ok(RunReport {
        objective,
        assignment: x.into_bits(),
        coarse_ratio,
        per_level,
        wall_time_secs: start.elapsed().as_secs_f64(),
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

/// The embedding the hierarchy computes (or would compute) for the
/// original graph, reproduced with the same derived seed the coarsening
/// stage uses for level 0. Lets callers export vertex coordinates without
/// the hierarchy having to retain them.
pub fn finest_embedding(g: &Graph, cfg: &RunConfig) -> Result<Embedding> {
    cfg.validate()?;
    embed(g, &cfg.embedding_params(), derive_seed(cfg.seed, &[stream::EMBED, 0]))
}

/// Maximum multistart instances to run concurrently, from `MLMC_THREADS`.
fn thread_cap() -> Option<usize> {
    match std::env::var("MLMC_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => {
                log::warn!("ignoring invalid MLMC_THREADS value {raw:?}");
                None
            }
        },
        Err(_) => None,
    }
}
