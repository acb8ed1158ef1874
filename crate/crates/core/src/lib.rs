//! Finite-horizon stochastic dynamic pricing of a single product.
//!
//! The library solves the dimensionless pricing problem — exponential demand
//! under multiplicative disturbance, with a terminal cost on unsold stock —
//! by backward-induction dynamic programming on a stock grid, and provides
//! two suboptimal online policies (certainty-equivalent control and
//! open-loop feedback control) together with the paired Monte Carlo
//! machinery to compare profit distributions under common random numbers.
//!
//! Everything stochastic draws from splittable, label-derived streams
//! ([`rng`]), so all solves, simulations and comparisons are bit-reproducible
//! for a fixed seed, independent of thread count.

pub mod dp;
pub mod error;
pub mod model;
mod optim;
pub mod policy;
pub mod rng;
pub mod sim;
pub mod stats;

pub use dp::{expected_stage_value, solve_bellman, SolverConfig, StateGrid, ValuePolicyTable};
pub use error::{Error, Result};
pub use model::{
    beta_shape_params, DemandFunction, DimensionalScaling, DisturbanceModel, PriceInterval,
    PricingProblem, INITIAL_STOCK,
};
pub use policy::{
    cec_objective, cec_price, cec_price_with_estimate, olfc_price, BellmanPolicy, CecPolicy,
    OlfcConfig, OlfcPolicy, PathId, Policy,
};
pub use sim::{
    estimate_objective, paired_compare, run_paths, simulate_path, ComparisonSamples, PathRecord,
};
pub use stats::{
    histogram, quantile, relative_l2, summarise, ComparisonStats, Histogram, DIFF_HIST_BINS,
    PROFIT_HIST_BINS,
};
