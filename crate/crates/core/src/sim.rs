//! Forward simulation of the controlled system and paired policy comparison
//! under common random numbers.
//!
//! Each trajectory owns a disturbance stream derived from `(root_seed, k)`,
//! so a comparison is a deterministic function of the root seed and is
//! independent of the thread schedule. Two policies compared on path `k` see
//! the identical disturbance realisation, which is what makes the
//! distribution of profit differences meaningful.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PricingProblem, INITIAL_STOCK};
use crate::policy::{PathId, Policy};
use crate::rng;

/// One simulated trajectory under a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// Posted prices, one per period.
    pub prices: Vec<f64>,
    /// Stock levels `S_0..S_T` (length `T + 1`, starts at 1).
    pub stocks: Vec<f64>,
    /// Units sold per period.
    pub sales: Vec<f64>,
    /// Total revenue minus the terminal cost of unsold stock.
    pub profit: f64,
}

/// Simulates one trajectory from full stock at time 0 under the given
/// disturbance path `w` (one value per period, all non-negative).
pub fn simulate_path(
    problem: &PricingProblem,
    policy: &dyn Policy,
    path: PathId,
    w: &[f64],
) -> Result<PathRecord> {
    if w.len() != problem.horizon {
        return Err(Error::invalid(
            "w",
            format!("expected {} disturbance values, got {}", problem.horizon, w.len()),
        ));
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::invalid("w", "disturbances must be finite and >= 0"));
    }

    let horizon = problem.horizon;
    let mut stocks = Vec::with_capacity(horizon + 1);
    let mut prices = Vec::with_capacity(horizon);
    let mut sales = Vec::with_capacity(horizon);
    let mut stock = INITIAL_STOCK;
    let mut revenue = 0.0;
    stocks.push(stock);

    for (t, &w_t) in w.iter().enumerate() {
        let a = policy.price(path, t, stock)?;
        let sold = problem.demand.sales(stock, a, w_t);
        revenue += a * sold;
        stock -= sold;
        prices.push(a);
        sales.push(sold);
        stocks.push(stock);
    }

    Ok(PathRecord {
        prices,
        stocks,
        sales,
        profit: revenue + problem.terminal_value(stock),
    })
}

fn profit_from(
    problem: &PricingProblem,
    policy: &dyn Policy,
    path: PathId,
    t0: usize,
    s0: f64,
    w: &[f64],
) -> Result<f64> {
    let mut stock = s0;
    let mut revenue = 0.0;
    for (offset, &w_t) in w.iter().enumerate() {
        let a = policy.price(path, t0 + offset, stock)?;
        let sold = problem.demand.sales(stock, a, w_t);
        revenue += a * sold;
        stock -= sold;
    }
    Ok(revenue + problem.terminal_value(stock))
}

/// Paired per-path profits of two policies on shared disturbance paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSamples {
    pub label_a: String,
    pub label_b: String,
    pub profits_a: Vec<f64>,
    pub profits_b: Vec<f64>,
}

impl ComparisonSamples {
    pub fn n(&self) -> usize {
        self.profits_a.len()
    }
}

/// Simulates both policies on the same `n_sim` disturbance paths.
///
/// Path `k` draws its disturbances from the stream `(root_seed, k)`; rerunning
/// with the same root seed reproduces the samples bit-for-bit regardless of
/// thread count.
pub fn paired_compare(
    problem: &PricingProblem,
    policy_a: &dyn Policy,
    policy_b: &dyn Policy,
    n_sim: usize,
    root_seed: u64,
) -> Result<ComparisonSamples> {
    if n_sim < 1 {
        return Err(Error::invalid("n_sim", "must be >= 1"));
    }
    let pairs: Vec<(f64, f64)> = (0..n_sim as u64)
        .into_par_iter()
        .map(|k| {
            let mut stream = rng::stream(root_seed, &[rng::domain::SIM_PATH, k]);
            let w = problem.disturbance.sample_many(problem.horizon, &mut stream);
            let path = PathId(k);
            let a = simulate_path(problem, policy_a, path, &w)?;
            let b = simulate_path(problem, policy_b, path, &w)?;
            Ok((a.profit, b.profit))
        })
        .collect::<Result<_>>()?;

    Ok(ComparisonSamples {
        label_a: policy_a.name().to_string(),
        label_b: policy_b.name().to_string(),
        profits_a: pairs.iter().map(|p| p.0).collect(),
        profits_b: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Simulates `n_sim` trajectories of a single policy from full stock,
/// returning the full records (used by the per-path CSV emitters).
pub fn run_paths(
    problem: &PricingProblem,
    policy: &dyn Policy,
    n_sim: usize,
    root_seed: u64,
) -> Result<Vec<PathRecord>> {
    if n_sim < 1 {
        return Err(Error::invalid("n_sim", "must be >= 1"));
    }
    (0..n_sim as u64)
        .into_par_iter()
        .map(|k| {
            let mut stream = rng::stream(root_seed, &[rng::domain::SIM_PATH, k]);
            let w = problem.disturbance.sample_many(problem.horizon, &mut stream);
            simulate_path(problem, policy, PathId(k), &w)
        })
        .collect()
}

/// Monte Carlo estimate `(mean, standard error)` of the expected remaining
/// profit of `policy` started at `(t, s)`.
pub fn estimate_objective(
    problem: &PricingProblem,
    policy: &dyn Policy,
    t: usize,
    s: f64,
    n_sim: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_sim < 2 {
        return Err(Error::invalid("n_sim", "must be >= 2 for a standard error"));
    }
    if t >= problem.horizon {
        return Err(Error::OutOfDomain { what: "time", value: t as f64 });
    }
    let remaining = problem.horizon - t;
    let profits: Vec<f64> = (0..n_sim as u64)
        .into_par_iter()
        .map(|k| {
            let mut stream = rng::stream(seed, &[rng::domain::SIM_PATH, k]);
            let w = problem.disturbance.sample_many(remaining, &mut stream);
            profit_from(problem, policy, PathId(k), t, s, &w)
        })
        .collect::<Result<_>>()?;

    // A degenerate disturbance yields bitwise-identical profits; report an
    // exact zero standard error rather than summation noise.
    if profits.iter().all(|&p| p == profits[0]) {
        return Ok((profits[0], 0.0));
    }
    let n = profits.len() as f64;
    let mean = profits.iter().sum::<f64>() / n;
    let var = profits.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}
