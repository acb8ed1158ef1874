//! Backward-induction solver for the pricing problem.
//!
//! The value function is represented on an equispaced stock grid over [0, 1]
//! and propagated backwards in time. At each (time, node) cell the stage
//! expectation is approximated with a fixed set of disturbance samples
//! (common random numbers across all candidate prices, so the argmax is a
//! deterministic function of the seed), the continuation value is evaluated
//! by piecewise-linear interpolation, and the inner maximisation runs an
//! equispaced price scan with golden-section refinement.
//!
//! The time loop is sequential; grid nodes within a time step are
//! independent and are evaluated in parallel. Each cell derives its sample
//! stream from `(seed, t, i)`, so the resulting table is identical for any
//! thread count or evaluation order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PriceInterval, PricingProblem};
use crate::optim;
use crate::rng;

/// Equispaced stock grid `0 = s_1 < s_2 < ... < s_K = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGrid {
    points: Vec<f64>,
}

impl StateGrid {
    /// Builds a grid with `k >= 2` nodes; endpoints are exactly 0 and 1.
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("state_points", "grid needs at least 2 nodes"));
        }
        let denom = (k - 1) as f64;
        let points = (0..k).map(|i| i as f64 / denom).collect();
        Ok(StateGrid { points })
    }

    /// Number of nodes; never below 2.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Piecewise-linear interpolation of `row` (one value per node) at `s`.
    /// Exact at the nodes. Stock cannot leave [0, 1], so queries outside the
    /// grid are a domain error rather than an extrapolation.
    pub fn interpolate(&self, row: &[f64], s: f64) -> Result<f64> {
        if row.len() != self.points.len() {
            return Err(Error::invalid(
                "row",
                format!("expected {} values, got {}", self.points.len(), row.len()),
            ));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfDomain { what: "stock", value: s });
        }
        Ok(self.interp_unchecked(row, s))
    }

    #[inline]
    pub(crate) fn interp_unchecked(&self, row: &[f64], s: f64) -> f64 {
        let k = self.points.len();
        let x = s * (k - 1) as f64;
        let i = (x as usize).min(k - 2);
        // Snap to a node when the query matches it bitwise, so nodal values
        // are reproduced exactly rather than to within rounding.
        if s == self.points[i] {
            return row[i];
        }
        if s == self.points[i + 1] {
            return row[i + 1];
        }
        let u = ((s - self.points[i]) / (self.points[i + 1] - self.points[i])).clamp(0.0, 1.0);
        row[i] + u * (row[i + 1] - row[i])
    }
}

/// Discretisation and sampling parameters of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Number of stock-grid nodes `K`.
    pub state_points: usize,
    /// Number of equispaced candidate prices `M` for the inner maximisation.
    pub price_points: usize,
    /// Monte Carlo samples per expectation.
    pub n_expectation: usize,
    /// Golden-section iterations refining the best candidate price.
    pub refine_iters: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            state_points: 201,
            price_points: 201,
            n_expectation: 1000,
            refine_iters: 20,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.state_points < 2 {
            return Err(Error::invalid("state_points", "must be >= 2"));
        }
        if self.price_points < 2 {
            return Err(Error::invalid("price_points", "must be >= 2"));
        }
        if self.n_expectation < 1 {
            return Err(Error::invalid("n_expectation", "must be >= 1"));
        }
        Ok(())
    }
}

/// Gridded value function `v[t][i]` for `t = 0..=T` and greedy policy
/// `a[t][i]` for `t = 0..T`, as produced by [`solve_bellman`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValuePolicyTable {
    grid: StateGrid,
    prices: PriceInterval,
    values: Vec<Vec<f64>>,
    policy: Vec<Vec<f64>>,
}

impl ValuePolicyTable {
    pub fn grid(&self) -> &StateGrid {
        &self.grid
    }

    /// Number of pricing periods `T`.
    pub fn horizon(&self) -> usize {
        self.policy.len()
    }

    /// Value row over grid nodes at time `t` (`0..=T`).
    pub fn value_row(&self, t: usize) -> &[f64] {
        &self.values[t]
    }

    /// Policy row over grid nodes at time `t` (`0..T`).
    pub fn policy_row(&self, t: usize) -> &[f64] {
        &self.policy[t]
    }

    /// Interpolated value `v(t, s)`.
    pub fn value_at(&self, t: usize, s: f64) -> Result<f64> {
        if t >= self.values.len() {
            return Err(Error::OutOfDomain { what: "time", value: t as f64 });
        }
        self.grid.interpolate(&self.values[t], s)
    }

    /// Interpolated greedy price at `(t, s)`, clipped to the price interval.
    pub fn policy_at(&self, t: usize, s: f64) -> Result<f64> {
        if t >= self.policy.len() {
            return Err(Error::OutOfDomain { what: "time", value: t as f64 });
        }
        Ok(self.prices.clamp(self.grid.interpolate(&self.policy[t], s)?))
    }
}

/// Sample average of the one-period lookahead value
/// `a * sales + v_next(stock - sales)` at stock `s` and price `a`, where
/// `v_next` is the interpolation of `next_row` on `grid`.
pub fn expected_stage_value(
    problem: &PricingProblem,
    stock: f64,
    price: f64,
    samples: &[f64],
    grid: &StateGrid,
    next_row: &[f64],
) -> f64 {
    debug_assert!(!samples.is_empty());
    debug_assert!((0.0..=1.0).contains(&stock));
    let demand = problem.demand.eval(price);
    let mut acc = 0.0;
    for &w in samples {
        let sold = stock.min(demand * w);
        acc += price * sold + grid.interp_unchecked(next_row, stock - sold);
    }
    acc / samples.len() as f64
}

/// Solves the pricing problem by backward induction on the stock grid.
///
/// Returns the value/policy table; `table.value_row(horizon)` is the exact
/// terminal row `-C * s_i`. Within one cell the same disturbance samples are
/// reused for every candidate price, and ties in the inner maximisation go
/// to the lowest price.
pub fn solve_bellman(problem: &PricingProblem, cfg: &SolverConfig) -> Result<ValuePolicyTable> {
    problem.validate()?;
    cfg.validate()?;

    let horizon = problem.horizon;
    let grid = StateGrid::new(cfg.state_points)?;

    let mut values = vec![Vec::new(); horizon + 1];
    let mut policy = vec![Vec::new(); horizon];
    values[horizon] = grid.points().iter().map(|&s| problem.terminal_value(s)).collect();

    for t in (0..horizon).rev() {
        let next_row = &values[t + 1];
        let solved: Vec<(f64, f64)> = grid
            .points()
            .par_iter()
            .enumerate()
            .map(|(i, &s)| solve_node(problem, cfg, &grid, next_row, t, i, s))
            .collect();
        values[t] = solved.iter().map(|&(v, _)| v).collect();
        policy[t] = solved.iter().map(|&(_, a)| a).collect();
    }

    Ok(ValuePolicyTable {
        grid,
        prices: problem.prices,
        values,
        policy,
    })
}

fn solve_node(
    problem: &PricingProblem,
    cfg: &SolverConfig,
    grid: &StateGrid,
    next_row: &[f64],
    t: usize,
    i: usize,
    stock: f64,
) -> (f64, f64) {
    let mut stream = rng::stream(cfg.seed, &[rng::domain::DP_NODE, t as u64, i as u64]);
    let samples = problem
        .disturbance
        .expectation_samples(cfg.n_expectation, &mut stream);
    let best = optim::maximize_1d(
        |a| expected_stage_value(problem, stock, a, &samples, grid, next_row),
        problem.prices.min,
        problem.prices.max,
        cfg.price_points,
        cfg.refine_iters,
    );
    (best.value, best.x)
}
