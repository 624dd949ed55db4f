//! Tabu search: the workhorse heuristic for subproblems too big to
//! enumerate.
//!
//! Plain 1-flip tabu search over the subproblem objective. Each step flips
//! the best-gain non-tabu variable even when the gain is negative (that is
//! how it escapes local optima); recently flipped variables are tabu for a
//! short tenure unless flipping one would set a new overall best
//! (aspiration). Long droughts trigger a restart from a random assignment
//! while the incumbent best is kept.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::error::Result;
use crate::subproblem::{subproblem_gains, subproblem_objective, Subproblem};

use super::{SolverRequest, SolverResult, SubproblemSolver};

/// Steps without a strict best improvement before restarting, per variable.
const RESTART_FACTOR: u64 = 50;

/// How often (in steps) the wall clock is consulted when a time limit is set.
const TIME_CHECK_MASK: u64 = 0xFF;

/// Tabu-search solver. Deterministic for a fixed request when the budget is
/// step-based; a time limit stops the same deterministic trajectory at a
/// machine-dependent point.
#[derive(Debug, Clone, Copy, Default)]
pub struct TabuSolver;

/// Search state over one assignment: incremental objective and gains.
struct State<'a> {
    sp: &'a Subproblem,
    y: Vec<u8>,
    obj: f64,
    gains: Vec<f64>,
}

impl<'a> State<'a> {
    fn new(sp: &'a Subproblem, y: Vec<u8>) -> Self {
        let obj = subproblem_objective(sp, &y);
        let gains = subproblem_gains(sp, &y);
        State { sp, y, obj, gains }
    }

    fn flip(&mut self, i: usize) {
        self.obj += self.gains[i];
        self.y[i] ^= 1;
        self.gains[i] = -self.gains[i];
        let side = self.y[i];
        for &(j, w) in self.sp.neighbors(i) {
            if self.y[j] == side {
                self.gains[j] += 2.0 * w;
            } else {
                self.gains[j] -= 2.0 * w;
            }
        }
    }
}

impl SubproblemSolver for TabuSolver {
    fn name(&self) -> &'static str {
        "tabu"
    }

    fn solve(&self, req: &SolverRequest<'_>) -> Result<SolverResult> {
        let sp = req.subproblem;
        let k = sp.num_vars();
        let tenure = 5.max(k / 10) as u64;
        let restart_after = RESTART_FACTOR * k as u64;
        let max_steps = req.budget.max_steps.unwrap_or(u64::MAX);
        let time_limit = req.budget.time_limit;
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);

        let mut state = State::new(sp, req.warm_start.to_vec());
        let mut best_y = state.y.clone();
        // The incumbent objective is always a from-scratch evaluation, so
        // incremental drift can never promote a truly worse assignment.
        let mut best_obj = state.obj;
        // Variable i may be flipped again once the step counter reaches
        // tabu_until[i].
        let mut tabu_until = vec![0u64; k];
        let mut since_best: u64 = 0;
        let mut evaluations: u64 = 1;

        let mut step: u64 = 0;
        while step < max_steps {
            if let Some(limit) = time_limit {
                if step & TIME_CHECK_MASK == 0 && started.elapsed() >= limit {
                    break;
                }
            }
            if since_best >= restart_after {
                let y: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2)).collect();
                state = State::new(sp, y);
                tabu_until.iter_mut().for_each(|t| *t = 0);
                since_best = 0;
                evaluations += 1;
            }

            // Best admissible move: highest gain among non-tabu variables,
            // ties to the smallest index; a tabu variable is admissible
            // only if flipping it would beat the incumbent (aspiration).
            let mut chosen: Option<usize> = None;
            let mut chosen_gain = f64::NEG_INFINITY;
            for i in 0..k {
                let admissible =
                    step >= tabu_until[i] || state.obj + state.gains[i] > best_obj;
                if admissible && state.gains[i] > chosen_gain {
                    chosen = Some(i);
                    chosen_gain = state.gains[i];
                }
            }
            // Everything tabu and nothing aspirates: flip the variable
            // whose tabu expires first (ties to the smallest index) so the
            // search always moves.
            let i = chosen.unwrap_or_else(|| {
                (0..k).min_by_key(|&i| (tabu_until[i], i)).expect("k >= 1")
            });

            state.flip(i);
            tabu_until[i] = step + 1 + tenure;
            evaluations += 1;

            if state.obj > best_obj {
                // Confirm with a from-scratch evaluation before crowning.
                let true_obj = subproblem_objective(sp, &state.y);
                if true_obj > best_obj {
                    best_obj = true_obj;
                    best_y.copy_from_slice(&state.y);
                    since_best = 0;
                } else {
                    since_best += 1;
                }
            } else {
                since_best += 1;
            }
            step += 1;
        }

        Ok(SolverResult {
            y: best_y,
            objective: best_obj,
            solver_name: "tabu",
            evaluations,
        })
    }
}
