//! Flat key-value experiment configuration. Every key has a default equal to
//! the example system, so `pricer compare bellman cec` with no config file
//! reproduces the reference comparison.

use serde::{Deserialize, Serialize};

use pricing_core::{
    DemandFunction, DisturbanceModel, OlfcConfig, PriceInterval, PricingProblem, SolverConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Number of pricing periods (T).
    pub horizon: usize,
    /// Cost per unit of unsold stock (C).
    pub unsold_cost: f64,
    /// Disturbance standard deviation of the shifted-Beta model.
    pub gamma: f64,
    pub q1: f64,
    pub q2: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Solver stock-grid size (K).
    pub state_points: usize,
    /// Solver candidate-price count (M).
    pub price_points: usize,
    /// Monte Carlo samples per solver expectation.
    pub n_exp: usize,
    /// Golden-section refinement iterations in the solver.
    pub refine_iters: usize,
    /// Simulated paths for simulate/compare.
    pub n_sim: usize,
    /// Simulated paths per sweep cell.
    pub sweep_nsim: usize,
    /// OLFC sample-average size.
    pub n_saa: usize,
    pub olfc_tol: f64,
    pub olfc_max_iters: usize,
    pub olfc_multistart: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            horizon: 3,
            unsold_cost: 1.0,
            gamma: 0.05,
            q1: std::f64::consts::E * std::f64::consts::E / 3.0,
            q2: 3.0,
            a_min: 0.0,
            a_max: 1.0,
            state_points: 201,
            price_points: 201,
            n_exp: 1000,
            refine_iters: 20,
            n_sim: 10_000,
            sweep_nsim: 1000,
            n_saa: 1000,
            olfc_tol: 1e-4,
            olfc_max_iters: 50,
            olfc_multistart: 2,
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), String> {
        self.problem().map_err(|e| e.to_string())?;
        self.solver().validate().map_err(|e| e.to_string())?;
        self.olfc().validate().map_err(|e| e.to_string())?;
        if self.n_sim < 1 || self.sweep_nsim < 1 {
            return Err("n_sim and sweep_nsim must be >= 1".into());
        }
        Ok(())
    }

    pub fn problem(&self) -> pricing_core::Result<PricingProblem> {
        PricingProblem::new(
            self.horizon,
            self.unsold_cost,
            PriceInterval::new(self.a_min, self.a_max)?,
            DemandFunction::new(self.q1, self.q2)?,
            DisturbanceModel::ShiftedBeta { gamma: self.gamma },
        )
    }

    /// Problem with the same shape but different demand/cost/noise, used by
    /// the sweep driver.
    pub fn problem_with(
        &self,
        unsold_cost: f64,
        gamma: f64,
        q1: f64,
        q2: f64,
    ) -> pricing_core::Result<PricingProblem> {
        PricingProblem::new(
            self.horizon,
            unsold_cost,
            PriceInterval::new(self.a_min, self.a_max)?,
            DemandFunction::new(q1, q2)?,
            DisturbanceModel::ShiftedBeta { gamma },
        )
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            state_points: self.state_points,
            price_points: self.price_points,
            n_expectation: self.n_exp,
            refine_iters: self.refine_iters,
            seed: self.seed,
        }
    }

    pub fn olfc(&self) -> OlfcConfig {
        OlfcConfig {
            n_saa: self.n_saa,
            tol: self.olfc_tol,
            max_iters: self.olfc_max_iters,
            multistart: self.olfc_multistart,
            seed: self.seed,
        }
    }
}
