//! Exhaustive subproblem solver: the global optimum by enumeration.
//!
//! Walks all 2^K assignments in Gray-code order so consecutive states differ
//! by one flip, making each step O(deg) via incremental gain updates. Hard
//! capped at 22 variables; beyond that the caller must use a heuristic.

use crate::error::{Error, Result};
use crate::subproblem::{subproblem_gains, subproblem_objective};

use super::{SolverRequest, SolverResult, SubproblemSolver};

/// Enumeration bound: 2^22 states is the most this solver will visit.
pub const EXACT_MAX_VARS: usize = 22;

/// Brute-force solver. Ignores the budget — its work is bounded by the
/// variable cap, and a partial enumeration could not promise optimality.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactSolver;

impl SubproblemSolver for ExactSolver {
    fn name(&self) -> &'static str {
        "exact"
    }

    /// Returns the maximum over all assignments. Ties break toward the
    /// smallest packed value `z = Σ y_i·2^i`. With integer weights the
    /// incremental arithmetic is exact and the tie-break is deterministic;
    /// with arbitrary float weights near-ties resolve best-effort.
    fn solve(&self, req: &SolverRequest<'_>) -> Result<SolverResult> {
        let sp = req.subproblem;
        let k = sp.num_vars();
        if k > EXACT_MAX_VARS {
            return Err(Error::Capacity { solver: "exact", vars: k, limit: EXACT_MAX_VARS });
        }

        let mut y = vec![0u8; k];
        let mut obj = subproblem_objective(sp, &y);
        let mut gains = subproblem_gains(sp, &y);
        let mut best_obj = obj;
        let mut best_z: u64 = 0;

        let total: u64 = 1 << k;
        for t in 1..total {
            // Gray step: state t is gray(t) = t ^ (t >> 1); the bit that
            // changed from state t-1 is the lowest set bit of t.
            let flip = t.trailing_zeros() as usize;
            obj += gains[flip];
            y[flip] ^= 1;
            gains[flip] = -gains[flip];
            let side = y[flip];
            for &(j, w) in sp.neighbors(flip) {
                if y[j] == side {
                    gains[j] += 2.0 * w;
                } else {
                    gains[j] -= 2.0 * w;
                }
            }
            let z = t ^ (t >> 1);
            if obj > best_obj || (obj == best_obj && z < best_z) {
                best_obj = obj;
                best_z = z;
            }
        }

        let best_y: Vec<u8> = (0..k).map(|i| ((best_z >> i) & 1) as u8).collect();
        let recomputed = subproblem_objective(sp, &best_y);
        // Drift floor: across millions of incremental updates float noise
        // could, in principle, crown a state a hair below the warm start;
        // the enumeration saw the warm start too, so never return less.
        let warm_obj = subproblem_objective(sp, req.warm_start);
        let (y_out, obj_out) = if recomputed < warm_obj {
            (req.warm_start.to_vec(), warm_obj)
        } else {
            (best_y, recomputed)
        };
        Ok(SolverResult { y: y_out, objective: obj_out, solver_name: "exact", evaluations: total })
    }
}
