use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use super::{
    frac, glass_ceiling, solve_fixed_point, special_case, weighted, AnalyticError,
    ClosedFormResult, FixedPointResult, Result, SpecialCase, DEFAULT_GCE_TOL,
};
use crate::ext;
use crate::model::{AnalyticParams, ThetaPair};

/// A power-law exponent `gamma = 1 + 1/C`. `C = 0` yields [`Exponent::Infinite`]:
/// the degree distribution decays faster than any power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn from_constant(c: f64) -> Exponent {
        if c == 0.0 {
            Exponent::Infinite
        } else {
            Exponent::Finite(1.0 + 1.0 / c)
        }
    }

    /// `f64::INFINITY` for the infinite marker.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(g) => g,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ext::format(self.value()))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ext::to_json(self.value()).serialize(s)
    }
}

/// Degree-rate constants of one group: in-degrees grow like `t^{c_in}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentConstants {
    pub c_in: f64,
    pub c_out: f64,
}

impl ExponentConstants {
    pub fn new(c_in: f64, c_out: f64) -> Self {
        ExponentConstants { c_in, c_out }
    }
    pub fn gamma_in(&self) -> Exponent {
        Exponent::from_constant(self.c_in)
    }
    pub fn gamma_out(&self) -> Exponent {
        Exponent::from_constant(self.c_out)
    }
}

/// Red-group constants `C_in(R)` and `C_out(R)` at `theta`.
pub fn exponent_constants_red(ap: &AnalyticParams, theta: &ThetaPair) -> Result<ExponentConstants> {
    let (p, q, r, rb, d) = (ap.p(), ap.q(), ap.r(), ap.r_blue(), ap.delta());
    let (rho_b, rho_r) = (ap.rho_blue(), ap.rho_red());
    let w3 = ap.densify_prob();
    let ds = d * (p + q);
    let (th_in, th_out) = (theta.theta_in(), theta.theta_out());
    let (bl_in, bl_out) = (theta.blue_in(), theta.blue_out());

    let red_in = r * ds + th_in;
    let red_out = r * ds + th_out;
    let blue_in = rb * ds + bl_in;
    let blue_out = rb * ds + bl_out;
    let den3 = -rho_b * red_out * blue_in
        - rho_r * red_in * blue_out
        - (1.0 - rho_b) * blue_in * blue_out
        - (1.0 - rho_r) * red_in * red_out
        + (ds + 1.0) * (ds + 1.0);

    let c_in = frac(
        r * p * rho_r,
        ds - rho_b * blue_in - (1.0 - rho_r) * red_in + 1.0,
        "C_in(R) event 1 red",
    )? + frac(
        p * rb * (1.0 - rho_r),
        ds - rho_r * red_in - (1.0 - rho_b) * blue_in + 1.0,
        "C_in(R) event 1 blue",
    )? + weighted(w3, || {
        frac(
            rho_r * red_out + (1.0 - rho_r) * blue_out,
            den3,
            "C_in(R) event 3",
        )
    })?;

    let c_out = frac(
        r * q * rho_r,
        ds - rho_r * blue_out - (1.0 - rho_r) * red_out + 1.0,
        "C_out(R) event 2 red",
    )? + frac(
        q * rb * (1.0 - rho_b),
        ds - rho_b * red_out - (1.0 - rho_b) * blue_out + 1.0,
        "C_out(R) event 2 blue",
    )? + weighted(w3, || {
        frac(
            rho_r * red_in + (1.0 - rho_b) * blue_in,
            den3,
            "C_out(R) event 3",
        )
    })?;
    Ok(ExponentConstants::new(c_in, c_out))
}

/// The in-degree rate constant written as the sum of per-event acceptance
/// terms; algebraically identical to `C_in(R)` and kept as an independent
/// cross-check.
pub fn rate_constant_in(ap: &AnalyticParams, theta: &ThetaPair) -> Result<f64> {
    let (p, q, r, rb, d) = (ap.p(), ap.q(), ap.r(), ap.r_blue(), ap.delta());
    let (rho_b, rho_r) = (ap.rho_blue(), ap.rho_red());
    let s = p + q;
    let red_in = theta.theta_in() + d * s * r;
    let blue_in = theta.blue_in() + d * s * rb;
    let red_out = theta.theta_out() + s * r * d;
    let blue_out = theta.blue_out() + s * rb * d;
    let den3 = (1.0 + s * d) * (1.0 + s * d)
        - blue_out * blue_in * (1.0 - rho_b)
        - blue_out * red_in * rho_r
        - red_out * blue_in * rho_b
        - red_out * red_in * (1.0 - rho_r);
    Ok(frac(
        p * rb * (1.0 - rho_r),
        1.0 + d * s - red_in * rho_r - blue_in * (1.0 - rho_b),
        "A event 1 blue",
    )? + frac(
        p * r * rho_r,
        1.0 + d * s - red_in * (1.0 - rho_r) - blue_in * rho_b,
        "A event 1 red",
    )? + weighted(ap.densify_prob(), || {
        frac(
            blue_out * (1.0 - rho_r) + red_out * rho_r,
            den3,
            "A event 3",
        )
    })?)
}

/// How the reported values were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    FixedPointIteration,
    /// Fixed-point values that were verified against the closed form.
    ClosedForm(SpecialCase),
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derivation::FixedPointIteration => f.write_str("fixed_point_iteration"),
            Derivation::ClosedForm(c) => write!(f, "closed_form_{c}"),
        }
    }
}

impl Serialize for Derivation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub params: AnalyticParams,
    pub theta_star: ThetaPair,
    pub red: ExponentConstants,
    pub blue: ExponentConstants,
    pub derivation: Derivation,
    pub fixed_point: FixedPointResult,
    pub closed_form: Option<ClosedFormResult>,
}

impl ExponentReport {
    /// Flat JSON record. Infinite values are written as the strings `"inf"`
    /// and `"-inf"`.
    pub fn to_json(&self) -> Value {
        let (verdict, red_score, blue_score) = match glass_ceiling(self, DEFAULT_GCE_TOL) {
            Ok(v) => (v.verdict.to_string(), v.red_score, v.blue_score),
            Err(AnalyticError::Indeterminate { red, blue }) => ("indeterminate".to_string(), red, blue),
            Err(e) => (e.to_string(), f64::NAN, f64::NAN),
        };
        json!({
            "theta_in_star": self.theta_star.theta_in(),
            "theta_out_star": self.theta_star.theta_out(),
            "c_in_red": self.red.c_in,
            "c_out_red": self.red.c_out,
            "c_in_blue": self.blue.c_in,
            "c_out_blue": self.blue.c_out,
            "gamma_in_red": self.red.gamma_in(),
            "gamma_out_red": self.red.gamma_out(),
            "gamma_in_blue": self.blue.gamma_in(),
            "gamma_out_blue": self.blue.gamma_out(),
            "red_score": ext::to_json(red_score),
            "blue_score": ext::to_json(blue_score),
            "gce_verdict": verdict,
            "derivation": self.derivation,
            "iterations": self.fixed_point.iterations,
            "residual": self.fixed_point.residual,
            "contraction_norm": self.fixed_point.contraction_norm.map_or(Value::Null, ext::to_json),
            "contraction_warning": self.fixed_point.contraction_warning,
        })
    }
}

/// Solves for `theta*` and evaluates both groups' constants; blue values are
/// the red formulas applied to the color-swapped problem.
///
/// The iteration always runs in a canonical color orientation, so the blue
/// report of `ap` equals the red report of `ap.swapped()` bit for bit. When
/// `ap` is one of the special regimes the closed form is computed as well and
/// must agree to 1e-9, otherwise [`AnalyticError::ClosedFormMismatch`].
pub fn exponents_both_groups(
    ap: &AnalyticParams,
    tol: f64,
    max_iter: usize,
    theta0: Option<ThetaPair>,
) -> Result<ExponentReport> {
    let swapped = ap.swapped();
    let flip = swapped
        .key()
        .iter()
        .zip(ap.key().iter())
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_lt());
    let (canon, start) = if flip {
        (swapped, theta0.map(|t| t.swapped()))
    } else {
        (*ap, theta0)
    };
    let start = start.unwrap_or(ThetaPair::new(canon.r(), canon.r()));
    let mut fp = solve_fixed_point(&canon, tol, max_iter, start)?;
    if flip {
        fp.theta_star = fp.theta_star.swapped();
    }
    let theta = fp.theta_star;
    let red = exponent_constants_red(ap, &theta)?;
    let blue = exponent_constants_red(&swapped, &theta.swapped())?;

    let closed_form = special_case(ap);
    let mut derivation = Derivation::FixedPointIteration;
    if let Some(cf) = &closed_form {
        let pairs = [
            ("theta_in", theta.theta_in(), cf.theta_star.theta_in()),
            ("theta_out", theta.theta_out(), cf.theta_star.theta_out()),
            ("c_in_red", red.c_in, cf.red.c_in),
            ("c_out_red", red.c_out, cf.red.c_out),
            ("c_in_blue", blue.c_in, cf.blue.c_in),
            ("c_out_blue", blue.c_out, cf.blue.c_out),
        ];
        for (quantity, fixed_point, closed_form) in pairs {
            // Closed forms have removable singularities at a few corners.
            if !closed_form.is_finite() {
                continue;
            }
            if (fixed_point - closed_form).abs() > 1e-9 * closed_form.abs().max(1.0) {
                return Err(AnalyticError::ClosedFormMismatch {
                    quantity,
                    fixed_point,
                    closed_form,
                });
            }
        }
        derivation = Derivation::ClosedForm(cf.case);
    }
    Ok(ExponentReport {
        params: *ap,
        theta_star: theta,
        red,
        blue,
        derivation,
        fixed_point: fp,
        closed_form,
    })
}
