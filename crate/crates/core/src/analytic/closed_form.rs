use std::fmt;

use serde::Serialize;

use super::ExponentConstants;
use crate::model::{AnalyticParams, ThetaPair};

/// The four parameter regimes with closed-form solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpecialCase {
    /// `rho_blue = rho_red = 0.5`: no preference, any `p, q`.
    Unbiased,
    /// `rho_blue = rho_red = 1`, `q = 1 - p`.
    Homophilic,
    /// `rho_blue = rho_red = 0`, `q = 1 - p`.
    Heterophilic,
    /// `rho_blue = 0`, `rho_red = 1`, any `p, q`.
    RedHomophilicBlueHeterophilic,
}

impl SpecialCase {
    pub fn label(self) -> &'static str {
        match self {
            SpecialCase::Unbiased => "i",
            SpecialCase::Homophilic => "ii",
            SpecialCase::Heterophilic => "iii",
            SpecialCase::RedHomophilicBlueHeterophilic => "iv",
        }
    }
}

impl fmt::Display for SpecialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormResult {
    pub case: SpecialCase,
    pub theta_star: ThetaPair,
    pub red: ExponentConstants,
    pub blue: ExponentConstants,
}

/// Closed-form fixed point and exponent constants when `ap` lies exactly in
/// one of the special regimes. Matching is by exact equality; the mirror of
/// [`SpecialCase::RedHomophilicBlueHeterophilic`] is not matched.
pub fn special_case(ap: &AnalyticParams) -> Option<ClosedFormResult> {
    let (r, p, q, d) = (ap.r(), ap.p(), ap.q(), ap.delta());
    let (rho_b, rho_r) = (ap.rho_blue(), ap.rho_red());
    let s = p + q;
    let complementary = ap.densify_prob() == 0.0;

    if rho_b == 0.5 && rho_r == 0.5 {
        let den = d * s + 1.0;
        let c = ExponentConstants::new((1.0 - q) / den, (1.0 - p) / den);
        return Some(ClosedFormResult {
            case: SpecialCase::Unbiased,
            theta_star: ThetaPair::new(r, r),
            red: c,
            blue: c,
        });
    }
    if rho_b == 1.0 && rho_r == 1.0 && complementary {
        let c = ExponentConstants::new(p / (d + 1.0), (1.0 - p) / (d + 1.0));
        return Some(ClosedFormResult {
            case: SpecialCase::Homophilic,
            theta_star: ThetaPair::new(r, r),
            red: c,
            blue: c,
        });
    }
    if rho_b == 0.0 && rho_r == 0.0 && complementary {
        let theta_in = r * (1.0 - 2.0 * p) + p;
        let rb = 1.0 - r;
        let red = ExponentConstants::new(
            p * rb / (r * (1.0 + d) + p * (1.0 - 2.0 * r)),
            (1.0 - p) * rb / (r * (d - 1.0) + p * (2.0 * r - 1.0) + 1.0),
        );
        let blue = ExponentConstants::new(
            p * r / (rb * (1.0 + d) + p * (2.0 * r - 1.0)),
            (1.0 - p) * r / (rb * (d - 1.0) + p * (1.0 - 2.0 * r) + 1.0),
        );
        return Some(ClosedFormResult {
            case: SpecialCase::Heterophilic,
            theta_star: ThetaPair::new(theta_in, 1.0 - theta_in),
            red,
            blue,
        });
    }
    if rho_b == 0.0 && rho_r == 1.0 {
        let rb = 1.0 - r;
        let theta_in = r * (p * d * (1.0 - s * rb) + q * (1.0 + d)) / (p * (rb + d) + q * (1.0 + d));
        let theta_out = 1.0 - p * rb;
        let c_in = (1.0 - p * rb - q) / (d * s + 1.0);
        let red = ExponentConstants::new(c_in, (1.0 - p) / (p * (r * (1.0 + d) - 1.0) + q * r * d + 1.0));
        let blue = ExponentConstants::new(c_in, 0.0);
        return Some(ClosedFormResult {
            case: SpecialCase::RedHomophilicBlueHeterophilic,
            theta_star: ThetaPair::new(theta_in, theta_out),
            red,
            blue,
        });
    }
    None
}
