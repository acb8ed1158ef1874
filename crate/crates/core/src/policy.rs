//! Pricing policies: a common `(t, stock) -> price` abstraction with three
//! implementations.
//!
//! * [`BellmanPolicy`] — interpolated lookup in a solved value/policy table.
//! * [`CecPolicy`] — certainty-equivalent control: future disturbances are
//!   replaced by a point forecast; for exponential demand with a unit
//!   forecast the optimal price has a closed form.
//! * [`OlfcPolicy`] — open-loop feedback control: at each decision epoch the
//!   expected remaining profit is maximised over a fixed price vector via
//!   sample-average approximation; only the first price is applied.
//!
//! Policies are pure: the price depends only on `(path, t, stock)` and the
//! policy's frozen state, so a policy can be shared read-only across threads.

use rand::Rng;

use crate::dp::ValuePolicyTable;
use crate::error::{Error, Result};
use crate::model::PricingProblem;
use crate::optim;
use crate::rng;

/// Identifies one simulated trajectory. Policies that consume randomness of
/// their own (OLFC) key their internal streams on it, so that evaluating one
/// policy never perturbs the noise seen by another on the same path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PathId(pub u64);

pub trait Policy: Sync {
    fn name(&self) -> &str;

    /// Price to post in period `t` at the observed stock level.
    ///
    /// `t` must be in `0..T` and `stock` in [0, 1].
    fn price(&self, path: PathId, t: usize, stock: f64) -> Result<f64>;
}

fn check_query(horizon: usize, t: usize, stock: f64) -> Result<()> {
    if t >= horizon {
        return Err(Error::OutOfDomain { what: "time", value: t as f64 });
    }
    if !(0.0..=1.0).contains(&stock) {
        return Err(Error::OutOfDomain { what: "stock", value: stock });
    }
    Ok(())
}

/// Greedy policy read off a solved table: piecewise-linear interpolation of
/// the policy row at `t`, clipped to the admissible interval.
pub struct BellmanPolicy<'a> {
    table: &'a ValuePolicyTable,
}

impl<'a> BellmanPolicy<'a> {
    pub fn new(table: &'a ValuePolicyTable) -> Self {
        BellmanPolicy { table }
    }

    pub fn table(&self) -> &ValuePolicyTable {
        self.table
    }
}

impl Policy for BellmanPolicy<'_> {
    fn name(&self) -> &str {
        "bellman"
    }

    fn price(&self, _path: PathId, t: usize, stock: f64) -> Result<f64> {
        self.table.policy_at(t, stock)
    }
}

/// Single-price reduction of the certainty-equivalent objective with a unit
/// forecast: `(a + C) * min(s / (T - t), q(a))`. Selling the same forecast
/// amount in every remaining period is optimal, which collapses the
/// multi-period deterministic program to this one-dimensional problem.
pub fn cec_objective(problem: &PricingProblem, t: usize, stock: f64, price: f64) -> f64 {
    debug_assert!(t < problem.horizon && stock >= 0.0);
    let per_period = stock / (problem.horizon - t) as f64;
    (price + problem.unsold_cost) * per_period.min(problem.demand.eval(price))
}

fn cec_objective_with_forecast(
    problem: &PricingProblem,
    t: usize,
    stock: f64,
    price: f64,
    w_hat: f64,
) -> f64 {
    let per_period = stock / (problem.horizon - t) as f64;
    (price + problem.unsold_cost) * per_period.min(problem.demand.eval(price) * w_hat)
}

/// Closed-form certainty-equivalent price for exponential demand and a unit
/// forecast: the projection onto the price interval of
/// `max( ln(q1 (T - t) / s) / q2, 1/q2 - C )`.
///
/// At `stock = 0` any price is optimal (nothing can be sold); the upper
/// bound is returned, which is also the closed form's limit.
pub fn cec_price(problem: &PricingProblem, t: usize, stock: f64) -> Result<f64> {
    if t >= problem.horizon {
        return Err(Error::OutOfDomain { what: "time", value: t as f64 });
    }
    if !stock.is_finite() || stock < 0.0 {
        return Err(Error::OutOfDomain { what: "stock", value: stock });
    }
    if stock == 0.0 {
        return Ok(problem.prices.max);
    }
    let d = &problem.demand;
    let remaining = (problem.horizon - t) as f64;
    let balanced = (d.q1 * remaining / stock).ln() / d.q2;
    let myopic = 1.0 / d.q2 - problem.unsold_cost;
    Ok(problem.prices.clamp(balanced.max(myopic)))
}

/// Certainty-equivalent price under a general point forecast `w_hat`. The
/// closed form applies when `w_hat == 1`; otherwise the one-dimensional
/// objective is maximised numerically.
pub fn cec_price_with_estimate(
    problem: &PricingProblem,
    t: usize,
    stock: f64,
    w_hat: f64,
) -> Result<f64> {
    if w_hat == 1.0 {
        return cec_price(problem, t, stock);
    }
    if !w_hat.is_finite() || w_hat <= 0.0 {
        return Err(Error::invalid("w_hat", "must be finite and > 0"));
    }
    if t >= problem.horizon {
        return Err(Error::OutOfDomain { what: "time", value: t as f64 });
    }
    if !stock.is_finite() || stock < 0.0 {
        return Err(Error::OutOfDomain { what: "stock", value: stock });
    }
    if stock == 0.0 {
        return Ok(problem.prices.max);
    }
    let best = optim::maximize_1d(
        |a| cec_objective_with_forecast(problem, t, stock, a, w_hat),
        problem.prices.min,
        problem.prices.max,
        2001,
        40,
    );
    Ok(best.x)
}

/// Certainty-equivalent control with a configurable forecast (defaults to
/// the disturbance mean).
pub struct CecPolicy<'a> {
    problem: &'a PricingProblem,
    w_hat: f64,
}

impl<'a> CecPolicy<'a> {
    pub fn new(problem: &'a PricingProblem) -> Self {
        CecPolicy {
            problem,
            w_hat: problem.disturbance.mean(),
        }
    }

    pub fn with_estimate(problem: &'a PricingProblem, w_hat: f64) -> Result<Self> {
        if !w_hat.is_finite() || w_hat <= 0.0 {
            return Err(Error::invalid("w_hat", "must be finite and > 0"));
        }
        Ok(CecPolicy { problem, w_hat })
    }

    pub fn forecast(&self) -> f64 {
        self.w_hat
    }
}

impl Policy for CecPolicy<'_> {
    fn name(&self) -> &str {
        "cec"
    }

    fn price(&self, _path: PathId, t: usize, stock: f64) -> Result<f64> {
        check_query(self.problem.horizon, t, stock)?;
        cec_price_with_estimate(self.problem, t, stock, self.w_hat)
    }
}

/// Parameters of the OLFC sample-average optimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlfcConfig {
    /// Disturbance paths per sample-average approximation.
    pub n_saa: usize,
    /// Convergence tolerance on price moves in one coordinate sweep.
    pub tol: f64,
    /// Maximum coordinate-ascent sweeps per start point.
    pub max_iters: usize,
    /// Number of start points: the certainty-equivalent solution plus
    /// `multistart - 1` random points in the box.
    pub multistart: usize,
    pub seed: u64,
}

impl Default for OlfcConfig {
    fn default() -> Self {
        OlfcConfig {
            n_saa: 1000,
            tol: 1e-4,
            max_iters: 50,
            multistart: 2,
            seed: 0,
        }
    }
}

impl OlfcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_saa < 1 {
            return Err(Error::invalid("n_saa", "must be >= 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be finite and > 0"));
        }
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters", "must be >= 1"));
        }
        if self.multistart < 1 {
            return Err(Error::invalid("multistart", "must be >= 1"));
        }
        Ok(())
    }
}

/// Open-loop feedback control. At epoch `t` it freezes `n_saa` disturbance
/// paths drawn from the stream `(seed, path, t)`, maximises the empirical
/// mean of the remaining profit over the price box, and posts the first
/// coordinate of the maximiser.
pub struct OlfcPolicy<'a> {
    problem: &'a PricingProblem,
    cfg: OlfcConfig,
}

impl<'a> OlfcPolicy<'a> {
    pub fn new(problem: &'a PricingProblem, cfg: OlfcConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(OlfcPolicy { problem, cfg })
    }

    pub fn config(&self) -> &OlfcConfig {
        &self.cfg
    }
}

impl Policy for OlfcPolicy<'_> {
    fn name(&self) -> &str {
        "olfc"
    }

    fn price(&self, path: PathId, t: usize, stock: f64) -> Result<f64> {
        check_query(self.problem.horizon, t, stock)?;
        if stock == 0.0 {
            return Ok(self.problem.prices.max);
        }

        let dim = self.problem.horizon - t;
        let mut stream = rng::stream(self.cfg.seed, &[rng::domain::OLFC_EPOCH, path.0, t as u64]);
        let samples = self
            .problem
            .disturbance
            .saa_paths(self.cfg.n_saa, dim, &mut stream);
        let objective = SaaObjective {
            problem: self.problem,
            stock,
            dim,
            samples: &samples,
        };

        let cec_start = vec![
            cec_price_with_estimate(self.problem, t, stock, self.problem.disturbance.mean())?;
            dim
        ];

        let mut best: Option<AscentOutcome> = None;
        for start_idx in 0..self.cfg.multistart {
            let start = if start_idx == 0 {
                cec_start.clone()
            } else {
                (0..dim)
                    .map(|_| stream.random_range(self.problem.prices.min..=self.problem.prices.max))
                    .collect()
            };
            let outcome = coordinate_ascent(&objective, start, &self.cfg, self.problem);
            best = Some(match best {
                Some(incumbent) if incumbent.value >= outcome.value => incumbent,
                _ => outcome,
            });
        }
        let best = best.expect("multistart >= 1");
        if !best.converged {
            return Err(Error::NoConvergence {
                best_price: best.prices[0],
                iterations: self.cfg.max_iters,
            });
        }
        Ok(self.problem.prices.clamp(best.prices[0]))
    }
}

/// Empirical mean of the remaining profit over frozen disturbance paths.
/// `samples` is row-major `n_paths x dim`.
pub(crate) struct SaaObjective<'a> {
    problem: &'a PricingProblem,
    stock: f64,
    dim: usize,
    samples: &'a [f64],
}

impl SaaObjective<'_> {
    fn n_paths(&self) -> usize {
        self.samples.len() / self.dim
    }

    pub(crate) fn value(&self, prices: &[f64]) -> f64 {
        let demands: Vec<f64> = prices.iter().map(|&a| self.problem.demand.eval(a)).collect();
        let cost = self.problem.unsold_cost;
        let mut acc = 0.0;
        for w_path in self.samples.chunks_exact(self.dim) {
            let mut stock = self.stock;
            let mut profit = 0.0;
            for tau in 0..self.dim {
                let sold = stock.min(demands[tau] * w_path[tau]);
                profit += prices[tau] * sold;
                stock -= sold;
            }
            acc += profit - cost * stock;
        }
        acc / self.n_paths() as f64
    }

    /// Per-path `(stock, accumulated revenue)` after applying coordinates
    /// `0..coord`; reused by every evaluation of a line search on `coord`.
    fn prefixes(&self, prices: &[f64], demands: &[f64], coord: usize) -> Vec<(f64, f64)> {
        self.samples
            .chunks_exact(self.dim)
            .map(|w_path| {
                let mut stock = self.stock;
                let mut revenue = 0.0;
                for tau in 0..coord {
                    let sold = stock.min(demands[tau] * w_path[tau]);
                    revenue += prices[tau] * sold;
                    stock -= sold;
                }
                (stock, revenue)
            })
            .collect()
    }

    /// Objective value with coordinate `coord` replaced by `x`, starting
    /// from precomputed prefixes.
    fn value_with_coord(
        &self,
        prices: &[f64],
        demands: &[f64],
        prefixes: &[(f64, f64)],
        coord: usize,
        x: f64,
    ) -> f64 {
        let demand_x = self.problem.demand.eval(x);
        let cost = self.problem.unsold_cost;
        let mut acc = 0.0;
        for (w_path, &(stock0, revenue0)) in self.samples.chunks_exact(self.dim).zip(prefixes) {
            let sold = stock0.min(demand_x * w_path[coord]);
            let mut stock = stock0 - sold;
            let mut profit = revenue0 + x * sold;
            for tau in coord + 1..self.dim {
                let sold = stock.min(demands[tau] * w_path[tau]);
                profit += prices[tau] * sold;
                stock -= sold;
            }
            acc += profit - cost * stock;
        }
        acc / self.n_paths() as f64
    }
}

struct AscentOutcome {
    prices: Vec<f64>,
    value: f64,
    converged: bool,
}

const LINE_SEARCH_GRID: usize = 9;
const LINE_SEARCH_REFINE: usize = 20;

/// Cyclic coordinate ascent over the price box; each coordinate is
/// maximised by the scan-plus-golden-section line search on the frozen
/// sample-average objective. Converged when a sweep moves no coordinate by
/// more than `cfg.tol`, or when a full sweep of line maximisations improves
/// the objective by less than machine-level noise (the coordinates are
/// coupled through the stock flow, so moves can zigzag long after the value
/// has stalled at its coordinate-wise maximum).
fn coordinate_ascent(
    objective: &SaaObjective<'_>,
    start: Vec<f64>,
    cfg: &OlfcConfig,
    problem: &PricingProblem,
) -> AscentOutcome {
    let mut prices = start;
    let mut demands: Vec<f64> = prices.iter().map(|&a| problem.demand.eval(a)).collect();
    let mut value = objective.value(&prices);
    let mut converged = false;

    let mut sweep_origin = prices.clone();
    for _ in 0..cfg.max_iters {
        let sweep_start = value;
        let mut max_move = 0.0f64;
        for coord in 0..prices.len() {
            let prefixes = objective.prefixes(&prices, &demands, coord);
            let best = optim::maximize_1d(
                |x| objective.value_with_coord(&prices, &demands, &prefixes, coord, x),
                problem.prices.min,
                problem.prices.max,
                LINE_SEARCH_GRID,
                LINE_SEARCH_REFINE,
            );
            if best.value > value + 1e-15 {
                max_move = max_move.max((best.x - prices[coord]).abs());
                prices[coord] = best.x;
                demands[coord] = problem.demand.eval(best.x);
                value = best.value;
            }
        }

        // The per-coordinate optima are coupled through the stock flow, so
        // plain sweeps zigzag along a diagonal valley. A line search along
        // the net sweep displacement collapses that walk.
        if prices.len() > 1 && max_move > 0.0 {
            let dir: Vec<f64> = prices
                .iter()
                .zip(&sweep_origin)
                .map(|(now, before)| now - before)
                .collect();
            let at = |theta: f64| -> Vec<f64> {
                prices
                    .iter()
                    .zip(&dir)
                    .map(|(p, d)| problem.prices.clamp(p + theta * d))
                    .collect()
            };
            let best = optim::maximize_1d(|theta| objective.value(&at(theta)), 0.0, 6.0, 5, 12);
            if best.value > value + 1e-15 {
                prices = at(best.x);
                for (d, &p) in demands.iter_mut().zip(&prices) {
                    *d = problem.demand.eval(p);
                }
                value = best.value;
            }
        }
        sweep_origin.copy_from_slice(&prices);

        let stalled = value - sweep_start < 1e-12 * (1.0 + value.abs());
        if max_move < cfg.tol || stalled {
            converged = true;
            break;
        }
    }

    AscentOutcome {
        prices,
        value,
        converged,
    }
}

/// Convenience wrapper running the OLFC optimisation once; exposed mainly
/// for direct experimentation with a single decision epoch.
pub fn olfc_price(
    problem: &PricingProblem,
    cfg: &OlfcConfig,
    path: PathId,
    t: usize,
    stock: f64,
) -> Result<f64> {
    OlfcPolicy::new(problem, *cfg)?.price(path, t, stock)
}
