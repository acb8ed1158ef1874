//! Derivative-free maximisation of a univariate objective on a closed
//! interval: an equispaced candidate scan followed by golden-section
//! refinement inside the bracket around the best candidate.
//!
//! The scan makes the search robust to the kinks introduced by the
//! `min(stock, demand)` sales cap; the refinement recovers interior optima to
//! far better than the scan resolution. Ties are broken towards the lowest
//! argument.

/// Objective values within this distance are considered tied.
pub(crate) const TIE_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Prefers strictly larger values; within `TIE_TOL`, prefers the smaller `x`.
fn better(candidate: Maximum, incumbent: Maximum) -> Maximum {
    if candidate.value > incumbent.value + TIE_TOL {
        candidate
    } else if candidate.value >= incumbent.value - TIE_TOL && candidate.x < incumbent.x {
        candidate
    } else {
        incumbent
    }
}

/// Maximises `f` on `[lo, hi]` by scanning `n_candidates` equispaced points
/// and then running `refine_iters` golden-section iterations in the bracket
/// around the best candidate.
pub(crate) fn maximize_1d(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    n_candidates: usize,
    refine_iters: usize,
) -> Maximum {
    debug_assert!(n_candidates >= 2 && lo < hi);
    let span = hi - lo;
    let denom = (n_candidates - 1) as f64;

    let candidate = |j: usize| {
        if j == n_candidates - 1 {
            hi
        } else {
            lo + span * j as f64 / denom
        }
    };

    // Scan pass: remember the best index; first index wins among ties
    // (candidates are visited in increasing x).
    let mut best_j = 0;
    let mut best = Maximum {
        x: candidate(0),
        value: f(candidate(0)),
    };
    for j in 1..n_candidates {
        let x = candidate(j);
        let value = f(x);
        if value > best.value + TIE_TOL {
            best = Maximum { x, value };
            best_j = j;
        }
    }

    if refine_iters == 0 {
        return best;
    }

    // Golden-section refinement inside the bracket of the best candidate.
    let mut a = candidate(best_j.saturating_sub(1));
    let mut b = candidate((best_j + 1).min(n_candidates - 1));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..refine_iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let refined = better(
        Maximum { x: x1, value: f1 },
        Maximum { x: x2, value: f2 },
    );
    better(refined, best)
}
