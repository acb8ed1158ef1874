//! The dimensionless one-product pricing problem: exponential demand,
//! multiplicative stochastic disturbance, stock dynamics, stage revenue and
//! terminal cost, plus the dimensional-to-dimensionless scaling.
//!
//! Units are normalised so that the initial stock is 1 and prices live in a
//! closed subinterval of [0, 1]. Dimensional quantities enter only through
//! [`DimensionalScaling`].

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};

/// Stock at the start of the decision period; fixed by the scaling.
pub const INITIAL_STOCK: f64 = 1.0;

/// Exponential demand `q(a) = q1 * exp(-q2 * a)` in dimensionless units.
///
/// `q1` is the fraction of the initial stock demanded per period at price 0;
/// `q2` is the price sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandFunction {
    pub q1: f64,
    pub q2: f64,
}

impl DemandFunction {
    pub fn new(q1: f64, q2: f64) -> Result<Self> {
        let d = DemandFunction { q1, q2 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q1.is_finite() || self.q1 <= 0.0 {
            return Err(Error::invalid("q1", "must be finite and > 0"));
        }
        if !self.q2.is_finite() || self.q2 <= 0.0 {
            return Err(Error::invalid("q2", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Forecast demand at price `a`.
    #[inline]
    pub fn eval(&self, price: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&price));
        self.q1 * (-self.q2 * price).exp()
    }

    /// Units sold over one period: demand scaled by the disturbance, capped by stock.
    #[inline]
    pub fn sales(&self, stock: f64, price: f64, w: f64) -> f64 {
        debug_assert!(stock >= 0.0 && w >= 0.0);
        stock.min(self.eval(price) * w)
    }

    /// Advances the stock one period and returns `(next_stock, stage_revenue)`.
    ///
    /// `next_stock` never exceeds `stock` and never drops below zero, so
    /// repeated steps from stock 1 stay in [0, 1] exactly.
    #[inline]
    pub fn step(&self, stock: f64, price: f64, w: f64) -> (f64, f64) {
        let sold = self.sales(stock, price, w);
        (stock - sold, price * sold)
    }
}

/// Shape parameters `mu = nu = 1/(8 gamma^2) - 1/2` of the Beta disturbance.
///
/// Requires `gamma^2 < 1/12` so that the density is unimodal (`mu > 1`).
pub fn beta_shape_params(gamma: f64) -> Result<(f64, f64)> {
    if !gamma.is_finite() || gamma <= 0.0 || gamma * gamma >= 1.0 / 12.0 {
        return Err(Error::invalid(
            "gamma",
            format!("gamma^2 must lie in (0, 1/12) so the disturbance is unimodal, got gamma = {gamma}"),
        ));
    }
    let shape = 1.0 / (8.0 * gamma * gamma) - 0.5;
    Ok((shape, shape))
}

/// Multiplicative demand disturbance `W`.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceModel {
    /// `W = 1/2 + X` with `X ~ Beta(mu, nu)`, `mu = nu = 1/(8 gamma^2) - 1/2`.
    /// Support [0.5, 1.5], mean 1, variance `gamma^2`.
    ShiftedBeta { gamma: f64 },
    /// Point mass at `w`. Used for deterministic oracles; `w = 1` makes the
    /// open-loop feedback policy coincide with certainty-equivalent control.
    Degenerate { w: f64 },
    /// Uniform distribution over finitely many atoms. Expectations over this
    /// variant are computed exactly by enumeration rather than sampling.
    Finite { atoms: Vec<f64> },
}

impl DisturbanceModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            DisturbanceModel::ShiftedBeta { gamma } => beta_shape_params(*gamma).map(|_| ()),
            DisturbanceModel::Degenerate { w } => {
                if !w.is_finite() || *w < 0.0 {
                    return Err(Error::invalid("w", "must be finite and >= 0"));
                }
                Ok(())
            }
            DisturbanceModel::Finite { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::invalid("atoms", "must be non-empty"));
                }
                if atoms.iter().any(|a| !a.is_finite() || *a < 0.0) {
                    return Err(Error::invalid("atoms", "must all be finite and >= 0"));
                }
                Ok(())
            }
        }
    }

    /// `E[W]`.
    pub fn mean(&self) -> f64 {
        match self {
            DisturbanceModel::ShiftedBeta { .. } => 1.0,
            DisturbanceModel::Degenerate { w } => *w,
            DisturbanceModel::Finite { atoms } => {
                atoms.iter().sum::<f64>() / atoms.len() as f64
            }
        }
    }

    /// Draws one realisation from the given stream.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            DisturbanceModel::ShiftedBeta { gamma } => {
                let (mu, nu) = beta_shape_params(*gamma).expect("validated gamma");
                let beta = Beta::new(mu, nu).expect("valid shape parameters");
                0.5 + beta.sample(rng)
            }
            DisturbanceModel::Degenerate { w } => *w,
            DisturbanceModel::Finite { atoms } => atoms[rng.random_range(0..atoms.len())],
        }
    }

    /// Draws `n` realisations.
    pub fn sample_many(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            DisturbanceModel::ShiftedBeta { gamma } => {
                let (mu, nu) = beta_shape_params(*gamma).expect("validated gamma");
                let beta = Beta::new(mu, nu).expect("valid shape parameters");
                (0..n).map(|_| 0.5 + beta.sample(rng)).collect()
            }
            DisturbanceModel::Degenerate { w } => vec![*w; n],
            DisturbanceModel::Finite { atoms } => (0..n)
                .map(|_| atoms[rng.random_range(0..atoms.len())])
                .collect(),
        }
    }

    /// Sample set used to approximate an expectation `E[f(W)]` as an equally
    /// weighted average. Finite-support models are enumerated exactly (the
    /// returned set is the support itself, making the average the exact
    /// expectation); `ShiftedBeta` returns `n` Monte Carlo draws.
    pub fn expectation_samples(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            DisturbanceModel::ShiftedBeta { .. } => self.sample_many(n, rng),
            DisturbanceModel::Degenerate { w } => vec![*w],
            DisturbanceModel::Finite { atoms } => atoms.clone(),
        }
    }

    /// Disturbance paths of length `horizon` for sample-average approximation,
    /// flattened row-major. A degenerate disturbance needs a single path.
    pub(crate) fn saa_paths(&self, n: usize, horizon: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            DisturbanceModel::Degenerate { w } => vec![*w; horizon],
            _ => self.sample_many(n * horizon, rng),
        }
    }
}

/// Closed price interval `[min, max]`, a subset of [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceInterval {
    pub min: f64,
    pub max: f64,
}

impl Default for PriceInterval {
    fn default() -> Self {
        PriceInterval { min: 0.0, max: 1.0 }
    }
}

impl PriceInterval {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        let interval = PriceInterval { min, max };
        interval.validate()?;
        Ok(interval)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || self.min < 0.0 || self.max > 1.0 {
            return Err(Error::invalid(
                "price_interval",
                "bounds must be finite with [min, max] inside [0, 1]",
            ));
        }
        if self.min >= self.max {
            return Err(Error::invalid("price_interval", "min must be < max"));
        }
        Ok(())
    }

    /// Projects a price onto the interval.
    #[inline]
    pub fn clamp(&self, a: f64) -> f64 {
        a.clamp(self.min, self.max)
    }

    #[inline]
    pub fn contains(&self, a: f64) -> bool {
        (self.min..=self.max).contains(&a)
    }
}

/// The dimensionless pricing problem over `horizon` periods.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingProblem {
    /// Number of pricing periods `T`.
    pub horizon: usize,
    /// Cost `C` per unit of stock unsold at the end of the horizon.
    pub unsold_cost: f64,
    pub prices: PriceInterval,
    pub demand: DemandFunction,
    pub disturbance: DisturbanceModel,
}

impl PricingProblem {
    pub fn new(
        horizon: usize,
        unsold_cost: f64,
        prices: PriceInterval,
        demand: DemandFunction,
        disturbance: DisturbanceModel,
    ) -> Result<Self> {
        let p = PricingProblem {
            horizon,
            unsold_cost,
            prices,
            demand,
            disturbance,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::invalid("horizon", "must be >= 1"));
        }
        if !self.unsold_cost.is_finite() || self.unsold_cost < 0.0 {
            return Err(Error::invalid("unsold_cost", "must be finite and >= 0"));
        }
        self.prices.validate()?;
        self.demand.validate()?;
        self.disturbance.validate()
    }

    /// Value of holding stock `s` at the end of the horizon: `-C * s`.
    #[inline]
    pub fn terminal_value(&self, stock: f64) -> f64 {
        debug_assert!(stock >= 0.0);
        -self.unsold_cost * stock
    }
}

/// Physical units of the problem, used to map dimensional inputs onto the
/// dimensionless system (stock scaled by the initial stock, money by the
/// price cap).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalScaling {
    /// Initial stock in physical units.
    pub initial_stock: f64,
    /// Maximum price in currency units.
    pub max_price: f64,
    /// Cost per unit of unsold stock in currency units.
    pub unsold_cost: f64,
}

impl DimensionalScaling {
    pub fn new(initial_stock: f64, max_price: f64, unsold_cost: f64) -> Result<Self> {
        let s = DimensionalScaling {
            initial_stock,
            max_price,
            unsold_cost,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.initial_stock.is_finite() || self.initial_stock <= 0.0 {
            return Err(Error::invalid("initial_stock", "must be finite and > 0"));
        }
        if !self.max_price.is_finite() || self.max_price <= 0.0 {
            return Err(Error::invalid("max_price", "must be finite and > 0"));
        }
        if !self.unsold_cost.is_finite() || self.unsold_cost < 0.0 {
            return Err(Error::invalid("unsold_cost", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Dimensionless unsold-stock cost `C`.
    pub fn dimensionless_cost(&self) -> f64 {
        self.unsold_cost / self.max_price
    }

    /// Dimensionless demand `q(a) = q_hat(a * max_price) / initial_stock`
    /// for an arbitrary dimensional demand function `q_hat`.
    pub fn dimensionless_demand<'a>(
        &self,
        q_hat: impl Fn(f64) -> f64 + 'a,
    ) -> impl Fn(f64) -> f64 + 'a
    where
        Self: Sized,
    {
        let s0 = self.initial_stock;
        let a_max = self.max_price;
        move |a: f64| q_hat(a * a_max) / s0
    }

    /// Dimensionless parameters of an exponential dimensional demand
    /// `q_hat(a_hat) = q1_hat * exp(-q2_hat * a_hat)`.
    pub fn dimensionless_exponential(&self, q1_hat: f64, q2_hat: f64) -> Result<DemandFunction> {
        DemandFunction::new(q1_hat / self.initial_stock, q2_hat * self.max_price)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn example_demand() -> DemandFunction {
        DemandFunction::new(E * E / 3.0, 3.0).unwrap()
    }

    #[test]
    fn demand_hand_values() {
        let d = example_demand();
        assert_relative_eq!(d.eval(2.0 / 3.0), 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(d.eval(0.0), E * E / 3.0, epsilon = 1e-12);
        let other = DemandFunction::new(1.7, 0.4).unwrap();
        assert_relative_eq!(other.eval(0.0), 1.7, epsilon = 1e-15);
    }

    #[test]
    fn demand_is_positive_and_strictly_decreasing() {
        let d = example_demand();
        let mut prev = f64::INFINITY;
        for j in 0..=100 {
            let a = j as f64 / 100.0;
            let q = d.eval(a);
            assert!(q > 0.0 && q <= d.q1);
            assert!(q < prev);
            prev = q;
        }
    }

    #[test]
    fn demand_rejects_bad_parameters() {
        assert!(DemandFunction::new(0.0, 3.0).is_err());
        assert!(DemandFunction::new(1.0, -1.0).is_err());
        assert!(DemandFunction::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sales_caps_at_stock() {
        let d = example_demand();
        assert_relative_eq!(d.sales(1.0, 0.0, 1.0), 1.0);
        assert_eq!(d.sales(0.0, 0.5, 1.3), 0.0);
        assert_eq!(d.sales(0.7, 0.5, 0.0), 0.0);
    }

    #[test]
    fn step_hand_values() {
        let d = example_demand();
        let (next, revenue) = d.step(1.0, 1.0, 1.0);
        assert_relative_eq!(next, 1.0 - E.powi(-1) / 3.0, epsilon = 1e-12);
        assert_relative_eq!(revenue, E.powi(-1) / 3.0, epsilon = 1e-12);
        assert_eq!(d.step(0.0, 0.3, 1.2), (0.0, 0.0));
        assert_eq!(d.step(0.6, 0.3, 0.0), (0.6, 0.0));
    }

    #[test]
    fn step_never_increases_stock() {
        let d = example_demand();
        let mut rng = rng::stream(11, &[1]);
        let mut s = INITIAL_STOCK;
        for _ in 0..64 {
            let a: f64 = rng.random_range(0.0..=1.0);
            let w: f64 = rng.random_range(0.0..=2.0);
            let (next, rev) = d.step(s, a, w);
            assert!(next >= 0.0 && next <= s);
            assert!(rev >= 0.0);
            s = next;
        }
    }

    #[test]
    fn terminal_value_is_linear_cost() {
        let p = example_problem(1.0);
        assert_relative_eq!(p.terminal_value(1.0), -1.0);
        let p0 = example_problem(0.0);
        assert_relative_eq!(p0.terminal_value(0.73), 0.0);
        let ph = example_problem(0.5);
        assert_relative_eq!(ph.terminal_value(0.4), -0.2, epsilon = 1e-15);
    }

    fn example_problem(cost: f64) -> PricingProblem {
        PricingProblem::new(
            3,
            cost,
            PriceInterval::default(),
            example_demand(),
            DisturbanceModel::ShiftedBeta { gamma: 0.05 },
        )
        .unwrap()
    }

    #[test]
    fn beta_shape_hand_values() {
        let (mu, nu) = beta_shape_params(0.05).unwrap();
        assert_relative_eq!(mu, 49.5, epsilon = 1e-12);
        assert_relative_eq!(nu, 49.5, epsilon = 1e-12);
        let (mu, _) = beta_shape_params(0.1).unwrap();
        assert_relative_eq!(mu, 12.0, epsilon = 1e-12);
    }

    #[test]
    fn beta_shape_unimodality_bound() {
        let err = beta_shape_params(0.3).unwrap_err();
        assert!(err.to_string().contains("1/12"), "message names the bound: {err}");
        // mu > 1 exactly when gamma^2 < 1/12
        let just_inside = (1.0f64 / 12.0).sqrt() - 1e-9;
        assert!(beta_shape_params(just_inside).unwrap().0 > 1.0);
        assert!(beta_shape_params((1.0f64 / 12.0).sqrt()).is_err());
    }

    #[test]
    fn degenerate_sampling_is_exact() {
        let m = DisturbanceModel::Degenerate { w: 1.0 };
        let mut rng = rng::stream(3, &[9]);
        for _ in 0..16 {
            assert_eq!(m.sample(&mut rng), 1.0);
        }
        assert_eq!(m.expectation_samples(1000, &mut rng), vec![1.0]);
    }

    #[test]
    fn shifted_beta_support() {
        let m = DisturbanceModel::ShiftedBeta { gamma: 0.05 };
        let mut rng = rng::stream(5, &[2]);
        for w in m.sample_many(10_000, &mut rng) {
            assert!((0.5..=1.5).contains(&w), "sample {w} outside [0.5, 1.5]");
        }
    }

    #[test]
    fn finite_atoms_enumerated_exactly() {
        let m = DisturbanceModel::Finite {
            atoms: vec![0.5, 1.0, 2.0],
        };
        m.validate().unwrap();
        let mut rng = rng::stream(17, &[4]);
        assert_eq!(m.expectation_samples(1000, &mut rng), vec![0.5, 1.0, 2.0]);
        assert_relative_eq!(m.mean(), 3.5 / 3.0, epsilon = 1e-15);
        for w in m.sample_many(100, &mut rng) {
            assert!(w == 0.5 || w == 1.0 || w == 2.0);
        }
    }

    #[test]
    fn scaling_examples() {
        let s = DimensionalScaling::new(100.0, 4.0, 4.0).unwrap();
        assert_relative_eq!(s.dimensionless_cost(), 1.0);

        let q = s.dimensionless_demand(|_| 50.0);
        assert_relative_eq!(q(0.3), 0.5, epsilon = 1e-15);

        let s2 = DimensionalScaling::new(1.0, 10.0, 2.5).unwrap();
        assert_relative_eq!(s2.dimensionless_cost(), 0.25);
    }

    #[test]
    fn scaling_exponential_demand() {
        // q_hat(a_hat) = 200 exp(-0.5 a_hat) with s0 = 100, a_max = 2
        // => q(a) = 2 exp(-a)
        let s = DimensionalScaling::new(100.0, 2.0, 0.0).unwrap();
        let d = s.dimensionless_exponential(200.0, 0.5).unwrap();
        assert_relative_eq!(d.q1, 2.0);
        assert_relative_eq!(d.q2, 1.0);
        let direct = s.dimensionless_demand(|a_hat| 200.0 * (-0.5 * a_hat).exp());
        assert_relative_eq!(d.eval(0.7), direct(0.7), epsilon = 1e-12);
    }

    #[test]
    fn problem_validation() {
        assert!(PricingProblem::new(
            0,
            1.0,
            PriceInterval::default(),
            example_demand(),
            DisturbanceModel::Degenerate { w: 1.0 },
        )
        .is_err());
        assert!(PriceInterval::new(0.4, 0.4).is_err());
        assert!(PriceInterval::new(-0.1, 1.0).is_err());
        assert!(PriceInterval::new(0.0, 1.1).is_err());
        assert!(example_problem(1.0).validate().is_ok());
    }
}
