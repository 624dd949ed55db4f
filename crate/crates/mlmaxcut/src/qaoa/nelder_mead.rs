//! Derivative-free simplex maximization (Nelder–Mead).
//!
//! Small, allocation-light implementation for the low-dimensional angle
//! searches here: reflection, expansion, outside/inside contraction, and
//! shrink, with a hard evaluation budget. The best point *ever evaluated*
//! is tracked and returned, so a budget of 1 degenerates to evaluating the
//! start point.

/// Maximize `f` starting from `start`, spending at most `max_evals`
/// evaluations. Returns `(best_x, best_value, evals_used)`. Deterministic.
pub(crate) fn maximize<F>(
    mut f: F,
    start: &[f64],
    initial_step: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize)
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    assert!(dim >= 1, "cannot optimize a zero-dimensional point");
    assert!(max_evals >= 1, "evaluation budget must be positive");

    let mut evals = 0usize;
    let mut best_x = start.to_vec();
    let mut best_val = f64::NEG_INFINITY;
    // Wrap f to honor the budget and remember the best point seen.
    let mut eval = |x: &[f64], evals: &mut usize, best_x: &mut Vec<f64>, best_val: &mut f64| {
        *evals += 1;
        let v = f(x);
        if v > *best_val {
            *best_val = v;
            best_x.clear();
            best_x.extend_from_slice(x);
        }
        v
    };

    // Simplex of dim+1 vertices: the start plus one step along each axis.
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(dim + 1);
    xs.push(start.to_vec());
    vals.push(eval(start, &mut evals, &mut best_x, &mut best_val));
    for i in 0..dim {
        if evals >= max_evals {
            return (best_x, best_val, evals);
        }
        let mut v = start.to_vec();
        v[i] += initial_step;
        vals.push(eval(&v, &mut evals, &mut best_x, &mut best_val));
        xs.push(v);
    }

    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    while evals < max_evals {
        // Order so vals[order[0]] is the best (largest) vertex.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];
        if (vals[best] - vals[worst]).abs() < 1e-12 {
            break; // flat simplex, nothing left to exploit
        }

        // Centroid of all vertices but the worst.
        let mut centroid = vec![0.0; dim];
        for &idx in order.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(&xs[idx]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let blend = |t: f64| -> Vec<f64> {
            // Point centroid + t·(centroid − worst).
            centroid
                .iter()
                .zip(&xs[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = blend(ALPHA);
        let refl_val = eval(&reflected, &mut evals, &mut best_x, &mut best_val);
        if refl_val > vals[best] {
            if evals >= max_evals {
                break;
            }
            let expanded = blend(GAMMA);
            let exp_val = eval(&expanded, &mut evals, &mut best_x, &mut best_val);
            if exp_val > refl_val {
                xs[worst] = expanded;
                vals[worst] = exp_val;
            } else {
                xs[worst] = reflected;
                vals[worst] = refl_val;
            }
            continue;
        }
        if refl_val > vals[second_worst] {
            xs[worst] = reflected;
            vals[worst] = refl_val;
            continue;
        }
        if evals >= max_evals {
            break;
        }
        // Contract toward the better of (reflected, worst).
        let contracted = if refl_val > vals[worst] { blend(RHO) } else { blend(-RHO) };
        let con_val = eval(&contracted, &mut evals, &mut best_x, &mut best_val);
        if con_val > vals[worst].max(refl_val) {
            xs[worst] = contracted;
            vals[worst] = con_val;
            continue;
        }
        // Shrink everything toward the best vertex.
        let best_point = xs[best].clone();
        for &idx in order.iter().skip(1) {
            if evals >= max_evals {
                return (best_x, best_val, evals);
            }
            for (x, b) in xs[idx].iter_mut().zip(&best_point) {
                *x = b + SIGMA * (*x - b);
            }
            let shrunk = xs[idx].clone();
            vals[idx] = eval(&shrunk, &mut evals, &mut best_x, &mut best_val);
        }
    }

    (best_x, best_val, evals)
}
