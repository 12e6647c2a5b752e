use std::fmt;

use serde::{Serialize, Serializer};

use super::{AnalyticError, ExponentConstants, ExponentReport, Result};

pub const DEFAULT_GCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GceVerdict {
    RedFacesGce,
    BlueFacesGce,
    NoGce,
}

impl fmt::Display for GceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GceVerdict::RedFacesGce => "red_faces_gce",
            GceVerdict::BlueFacesGce => "blue_faces_gce",
            GceVerdict::NoGce => "no_gce",
        })
    }
}

impl Serialize for GceVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlassCeilingVerdict {
    pub verdict: GceVerdict,
    /// `1/C_in(R) - 1/C_out(R)`, an extended real.
    pub red_score: f64,
    pub blue_score: f64,
}

/// `1/C_in - 1/C_out` with `1/0 = +inf`.
fn score(c: &ExponentConstants) -> f64 {
    let inv = |x: f64| if x == 0.0 { f64::INFINITY } else { 1.0 / x };
    inv(c.c_in) - inv(c.c_out)
}

/// A group faces the glass ceiling when its score is strictly below the
/// other's: its top out-degree tail is thinner relative to its in-degree
/// tail. Finite scores within `tol` of each other mean no ceiling.
pub fn glass_ceiling(report: &ExponentReport, tol: f64) -> Result<GlassCeilingVerdict> {
    let red = score(&report.red);
    let blue = score(&report.blue);
    if red.is_nan() || blue.is_nan() || (red.is_infinite() && red == blue) {
        return Err(AnalyticError::Indeterminate { red, blue });
    }
    let verdict = if (red - blue).abs() <= tol {
        GceVerdict::NoGce
    } else if red < blue {
        GceVerdict::RedFacesGce
    } else {
        GceVerdict::BlueFacesGce
    };
    Ok(GlassCeilingVerdict {
        verdict,
        red_score: red,
        blue_score: blue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{exponents_both_groups, DEFAULT_MAX_ITER, DEFAULT_TOL};
    use crate::model::AnalyticParams;

    fn verdict(r: f64, p: f64, q: f64, rb: f64, rr: f64, d: f64) -> Result<GlassCeilingVerdict> {
        let ap = AnalyticParams::new(r, p, q, rb, rr, d);
        let rep = exponents_both_groups(&ap, DEFAULT_TOL, DEFAULT_MAX_ITER, None)?;
        glass_ceiling(&rep, DEFAULT_GCE_TOL)
    }

    #[test]
    fn unbiased_has_no_ceiling() {
        assert_eq!(verdict(0.3, 0.2, 0.3, 0.5, 0.5, 2.0).unwrap().verdict, GceVerdict::NoGce);
    }

    #[test]
    fn symmetric_homophily_has_no_ceiling() {
        assert_eq!(verdict(0.3, 0.4, 0.6, 1.0, 1.0, 2.0).unwrap().verdict, GceVerdict::NoGce);
    }

    #[test]
    fn mixed_case_blue_faces_ceiling() {
        let v = verdict(0.3, 0.1, 0.2, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(v.verdict, GceVerdict::BlueFacesGce);
        assert_eq!(v.blue_score, f64::NEG_INFINITY);
        assert!(v.red_score.is_finite());
    }

    #[test]
    fn mirrored_mixed_case_red_faces_ceiling() {
        let v = verdict(0.7, 0.1, 0.2, 1.0, 0.0, 2.0).unwrap();
        assert_eq!(v.verdict, GceVerdict::RedFacesGce);
    }

    #[test]
    fn both_infinite_is_indeterminate() {
        let rep = exponents_both_groups(
            &AnalyticParams::new(0.3, 0.1, 0.2, 0.0, 1.0, 2.0),
            DEFAULT_TOL,
            DEFAULT_MAX_ITER,
            None,
        )
        .unwrap();
        let mut both = rep.clone();
        both.red.c_out = 0.0;
        assert!(matches!(
            glass_ceiling(&both, DEFAULT_GCE_TOL),
            Err(AnalyticError::Indeterminate { .. })
        ));
        let mut nan = rep;
        nan.red = ExponentConstants::new(0.0, 0.0);
        assert!(matches!(
            glass_ceiling(&nan, DEFAULT_GCE_TOL),
            Err(AnalyticError::Indeterminate { .. })
        ));
    }

    #[test]
    fn swapping_colors_mirrors_verdict() {
        for &(r, p, q, rb, rr, d) in &[
            (0.3, 0.2, 0.5, 0.7, 0.6, 4.0),
            (0.2, 0.4, 0.4, 0.9, 0.1, 2.0),
            (0.6, 0.1, 0.3, 0.3, 0.8, 8.0),
        ] {
            let a = verdict(r, p, q, rb, rr, d).unwrap().verdict;
            let b = verdict(1.0 - r, p, q, rr, rb, d).unwrap().verdict;
            let mirrored = match a {
                GceVerdict::RedFacesGce => GceVerdict::BlueFacesGce,
                GceVerdict::BlueFacesGce => GceVerdict::RedFacesGce,
                GceVerdict::NoGce => GceVerdict::NoGce,
            };
            assert_eq!(b, mirrored);
        }
    }
}
