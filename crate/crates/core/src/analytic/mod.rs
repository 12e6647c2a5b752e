//! Analytic side of the model: the contraction map whose fixed point gives
//! the limiting degree shares, the power-law exponent constants of both
//! groups, the closed forms of the four special regimes and the glass
//! ceiling classification.

mod closed_form;
mod exponents;
mod fixed_point;
mod gce;

pub use closed_form::{special_case, ClosedFormResult, SpecialCase};
pub use exponents::{
    exponent_constants_red, exponents_both_groups, rate_constant_in, Derivation, Exponent,
    ExponentConstants, ExponentReport,
};
pub use fixed_point::{
    contraction_diagnostic, contraction_map, solve_fixed_point, FixedPointResult,
    DEFAULT_FD_STEP, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use gce::{glass_ceiling, GceVerdict, GlassCeilingVerdict, DEFAULT_GCE_TOL};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("denominator of {term} is not positive")]
    DegenerateDenominator { term: &'static str },
    #[error("fixed-point iteration did not converge in {max_iter} iterations (residual {residual:e})")]
    NoConvergence { max_iter: usize, residual: f64 },
    #[error("invalid solver input: {0}")]
    InvalidInput(&'static str),
    #[error("glass ceiling scores are indeterminate (red {red}, blue {blue})")]
    Indeterminate { red: f64, blue: f64 },
    #[error("{quantity}: fixed point gives {fixed_point}, closed form gives {closed_form}")]
    ClosedFormMismatch {
        quantity: &'static str,
        fixed_point: f64,
        closed_form: f64,
    },
}

pub type Result<T> = std::result::Result<T, AnalyticError>;

/// `num / den`, with an exactly-zero numerator short-circuiting to zero.
/// Terms whose acceptance weight vanishes (fully homophilic or heterophilic
/// corners) contribute nothing even when their denominator also vanishes.
pub(crate) fn frac(num: f64, den: f64, term: &'static str) -> Result<f64> {
    if num == 0.0 {
        return Ok(0.0);
    }
    if !(den > 0.0) {
        return Err(AnalyticError::DegenerateDenominator { term });
    }
    Ok(num / den)
}

/// `w * f()`, skipping `f` when the weight is exactly zero.
pub(crate) fn weighted(w: f64, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
    if w == 0.0 {
        Ok(0.0)
    } else {
        Ok(w * f()?)
    }
}
