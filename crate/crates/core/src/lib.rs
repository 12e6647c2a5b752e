//! Directed preferential attachment with homophily between two groups of
//! nodes: analytic limits, a growth simulator, estimators for empirical
//! degree data and an experiment runner.

pub mod analytic;
pub mod atomic;
pub mod ext;
pub mod estimate;
pub mod model;
pub mod runner;
pub mod sim;

pub use analytic::{
    exponents_both_groups, glass_ceiling, solve_fixed_point, AnalyticError, ExponentReport,
    GceVerdict,
};
pub use model::{
    analysis_view, validate_params, AnalyticParams, Color, EventKind, HomophilyMatrix,
    ModelParams, ThetaPair,
};
