//! Exact and asymptotic topology of secure sensor networks that use
//! q-composite key predistribution over unreliable (on/off) channels, plus a
//! deterministic Monte Carlo harness for the underlying random intersection
//! graph.
//!
//! The closed-form side lives in [`analytic`] and is generic over the scalar
//! type; the aliases below fix it to `f64` (or `f32`) for everyday use.

pub mod analytic;
pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod real;
pub mod sampler;

pub use error::{AnalyticError, MonteCarloError, ParamError};
pub use real::Real;

pub type ModelParams = analytic::ModelParams<f64>;
pub type LinkProbabilities = analytic::LinkProbabilities<f64>;
pub type AsymptoticDecomposition = analytic::AsymptoticDecomposition<f64>;
pub type MinDegreePmf = analytic::MinDegreePmf<f64>;
pub type DesignGoal = analytic::DesignGoal<f64>;
pub type DesignSolution = analytic::DesignSolution<f64>;

pub type ModelParams32 = analytic::ModelParams<f32>;
pub type LinkProbabilities32 = analytic::LinkProbabilities<f32>;
pub type AsymptoticDecomposition32 = analytic::AsymptoticDecomposition<f32>;
pub type MinDegreePmf32 = analytic::MinDegreePmf<f32>;
