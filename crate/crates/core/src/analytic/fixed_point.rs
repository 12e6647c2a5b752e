use serde::Serialize;

use super::{frac, weighted, AnalyticError, Result};
use crate::model::{AnalyticParams, ThetaPair};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Terms shared by the asymptotic acceptance probabilities. All degree and
/// group-size sums are scaled by `t`, so group sizes become `(p+q) r` and
/// `(p+q)(1-r)`.
struct Shares {
    /// `(p+q) r delta`
    red_nodes: f64,
    /// `(p+q) (1-r) delta`
    blue_nodes: f64,
    /// `1 + (p+q) delta`
    total: f64,
}

impl Shares {
    fn new(ap: &AnalyticParams) -> Self {
        let s = ap.p() + ap.q();
        Shares {
            red_nodes: s * ap.r() * ap.delta(),
            blue_nodes: s * ap.r_blue() * ap.delta(),
            total: 1.0 + s * ap.delta(),
        }
    }
}

/// The one-step mean map `F(theta)`. Its unique fixed point is the limit of
/// the red group's in/out-degree shares.
pub fn contraction_map(theta: &ThetaPair, ap: &AnalyticParams) -> Result<ThetaPair> {
    let (p, q, r, rb) = (ap.p(), ap.q(), ap.r(), ap.r_blue());
    let (rho_b, rho_r) = (ap.rho_blue(), ap.rho_red());
    let w3 = ap.densify_prob();
    let m = Shares::new(ap);

    // Preferential-attachment masses of each group, per unit time.
    let red_in = theta.theta_in() + m.red_nodes;
    let blue_in = theta.blue_in() + m.blue_nodes;
    let red_out = theta.theta_out() + m.red_nodes;
    let blue_out = theta.blue_out() + m.blue_nodes;

    // Event 1: new node followed by an existing node chosen by in-degree.
    let p1_rr = || {
        frac(
            red_in * rho_r,
            m.total - blue_in * rho_b - red_in * (1.0 - rho_r),
            "p1_RR",
        )
    };
    let p1_br = || {
        frac(
            red_in * (1.0 - rho_r),
            m.total - blue_in * (1.0 - rho_b) - red_in * rho_r,
            "p1_BR",
        )
    };
    // Event 2: new node follows an existing node chosen by out-degree.
    let p2_rr = || {
        frac(
            red_out * rho_r,
            m.total - blue_out * rho_r - red_out * (1.0 - rho_r),
            "p2_RR",
        )
    };
    let p2_br = || {
        frac(
            red_out * (1.0 - rho_b),
            m.total - blue_out * (1.0 - rho_b) - red_out * rho_b,
            "p2_BR",
        )
    };
    // Event 3: followed node by out-degree, follower by in-degree.
    let den3 = m.total * m.total
        - blue_out * blue_in * (1.0 - rho_b)
        - blue_out * red_in * rho_r
        - red_out * blue_in * rho_b
        - red_out * red_in * (1.0 - rho_r);
    let p3_rr = || frac(red_out * red_in * rho_r, den3, "p3_RR");
    let p3_br = || frac(blue_out * red_in * (1.0 - rho_r), den3, "p3_BR");
    let p3_rb = || frac(red_out * blue_in * (1.0 - rho_b), den3, "p3_RB");

    let f_in = weighted(p * r, p1_rr)?
        + weighted(p * rb, p1_br)?
        + q * r
        + weighted(w3, || Ok(p3_rr()? + p3_br()?))?;
    let f_out = p * r
        + weighted(q * r, p2_rr)?
        + weighted(q * rb, p2_br)?
        + weighted(w3, || Ok(p3_rr()? + p3_rb()?))?;
    Ok(ThetaPair::new(f_in, f_out))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub theta_star: ThetaPair,
    pub iterations: usize,
    /// Sup-norm of the last step.
    pub residual: f64,
    pub converged: bool,
    /// Frobenius norm of the numerical Jacobian of `F` at `theta_star`,
    /// when it could be evaluated.
    pub contraction_norm: Option<f64>,
    /// Set when `contraction_norm >= 1`: local contraction is not certified.
    pub contraction_warning: bool,
}

/// Iterates `theta <- F(theta)` from `theta0` until the sup-norm step falls
/// below `tol`.
pub fn solve_fixed_point(
    ap: &AnalyticParams,
    tol: f64,
    max_iter: usize,
    theta0: ThetaPair,
) -> Result<FixedPointResult> {
    if !(tol > 0.0) {
        return Err(AnalyticError::InvalidInput("tol must be positive"));
    }
    if max_iter == 0 {
        return Err(AnalyticError::InvalidInput("max_iter must be at least 1"));
    }
    if !theta0.in_unit_square() {
        return Err(AnalyticError::InvalidInput("theta0 must lie in [0,1]^2"));
    }
    let mut theta = theta0;
    let mut residual = f64::INFINITY;
    for k in 1..=max_iter {
        let next = contraction_map(&theta, ap)?;
        residual = next.dist(&theta);
        theta = next;
        if residual < tol {
            let contraction_norm = contraction_diagnostic(ap, &theta, DEFAULT_FD_STEP).ok();
            return Ok(FixedPointResult {
                theta_star: theta,
                iterations: k,
                residual,
                converged: true,
                contraction_norm,
                contraction_warning: contraction_norm.is_some_and(|n| n >= 1.0),
            });
        }
    }
    Err(AnalyticError::NoConvergence { max_iter, residual })
}

/// Frobenius norm of the Jacobian of `F` at `theta`, by central finite
/// differences with step `h` (one-sided at the edges of the unit square).
/// A value below one certifies local contraction.
pub fn contraction_diagnostic(ap: &AnalyticParams, theta: &ThetaPair, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(AnalyticError::InvalidInput("finite-difference step must be positive"));
    }
    let x = [theta.theta_in(), theta.theta_out()];
    let mut sum_sq = 0.0;
    for j in 0..2 {
        let lo = (x[j] - h).max(0.0);
        let hi = (x[j] + h).min(1.0);
        let at = |v: f64| {
            let mut y = x;
            y[j] = v;
            contraction_map(&ThetaPair::new(y[0], y[1]), ap)
        };
        let (f_hi, f_lo) = (at(hi)?, at(lo)?);
        let width = hi - lo;
        let d_in = (f_hi.theta_in() - f_lo.theta_in()) / width;
        let d_out = (f_hi.theta_out() - f_lo.theta_out()) / width;
        sum_sq += d_in * d_in + d_out * d_out;
    }
    Ok(sum_sq.sqrt())
}
