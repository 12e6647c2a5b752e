use std::io::{self, Write};

use super::{degree_histogram, fit_power_law, DegreeHistogram, Direction, EstimateError, PowerLawFit};
use crate::analytic::{Exponent, ExponentReport};
use crate::ext;
use crate::model::{Color, ThetaPair};
use crate::sim::GrowthGraph;

const CELLS: [(Color, Direction); 4] = [
    (Color::Red, Direction::In),
    (Color::Red, Direction::Out),
    (Color::Blue, Direction::In),
    (Color::Blue, Direction::Out),
];

/// The four group/direction histograms of one or more graphs plus their
/// mean degree shares.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSummary {
    pub hists: [DegreeHistogram; 4],
    /// Mean of the per-graph shares over graphs that have edges.
    pub theta: Option<ThetaPair>,
    theta_sum: (f64, f64, usize),
}

impl DegreeSummary {
    pub fn from_graph(g: &GrowthGraph) -> Self {
        let hists = CELLS.map(|(c, d)| degree_histogram(g, c, d));
        let theta = g.theta();
        let theta_sum = theta.map_or((0.0, 0.0, 0), |t| (t.theta_in(), t.theta_out(), 1));
        DegreeSummary { hists, theta, theta_sum }
    }

    /// Merged histograms and averaged shares.
    pub fn pool<'a>(parts: impl IntoIterator<Item = &'a DegreeSummary>) -> Self {
        let mut hists = CELLS.map(|(c, d)| DegreeHistogram::new(c, d));
        let mut sum = (0.0, 0.0, 0);
        for p in parts {
            for (h, o) in hists.iter_mut().zip(&p.hists) {
                h.merge(o);
            }
            sum = (sum.0 + p.theta_sum.0, sum.1 + p.theta_sum.1, sum.2 + p.theta_sum.2);
        }
        let theta = (sum.2 > 0).then(|| ThetaPair::new(sum.0 / sum.2 as f64, sum.1 / sum.2 as f64));
        DegreeSummary {
            hists,
            theta,
            theta_sum: sum,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub group: Color,
    pub direction: Direction,
    pub gamma_analytic: Exponent,
    pub fit: Result<PowerLawFit, EstimateError>,
    /// The group's own limiting share of degree mass in this direction.
    pub theta_star: f64,
    pub theta_hat: Option<f64>,
}

impl ComparisonRow {
    /// `|gamma_fit - gamma_analytic|`; infinite when the analytic exponent is.
    pub fn abs_diff(&self) -> Option<f64> {
        self.fit
            .as_ref()
            .ok()
            .map(|f| (f.gamma_hat - self.gamma_analytic.value()).abs())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

fn share(t: &ThetaPair, c: Color, d: Direction) -> f64 {
    match (c, d) {
        (Color::Red, Direction::In) => t.theta_in(),
        (Color::Red, Direction::Out) => t.theta_out(),
        (Color::Blue, Direction::In) => t.blue_in(),
        (Color::Blue, Direction::Out) => t.blue_out(),
    }
}

/// Four rows comparing analytic exponents and shares with fits on `summary`.
/// Fit failures stay in their row.
pub fn compare_summary(report: &ExponentReport, summary: &DegreeSummary, label: &str) -> ComparisonTable {
    let rows = CELLS
        .iter()
        .zip(&summary.hists)
        .map(|(&(c, d), h)| {
            let consts = match c {
                Color::Red => report.red,
                Color::Blue => report.blue,
            };
            let gamma_analytic = match d {
                Direction::In => consts.gamma_in(),
                Direction::Out => consts.gamma_out(),
            };
            ComparisonRow {
                label: label.to_string(),
                group: c,
                direction: d,
                gamma_analytic,
                fit: fit_power_law(h, None),
                theta_star: share(&report.theta_star, c, d),
                theta_hat: summary.theta.map(|t| share(&t, c, d)),
            }
        })
        .collect();
    ComparisonTable { rows }
}

pub fn compare_analytic_empirical(report: &ExponentReport, g: &GrowthGraph) -> ComparisonTable {
    compare_summary(report, &DegreeSummary::from_graph(g), "")
}

impl ComparisonTable {
    pub fn extend(&mut self, other: ComparisonTable) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "label,group,direction,gamma_analytic,gamma_fit,stderr,k_min,n_tail,abs_diff,theta_star,theta_hat,status"
        )?;
        let na = || "n/a".to_string();
        for r in &self.rows {
            let (fit, stderr, k_min, n_tail, status) = match &r.fit {
                Ok(f) => (
                    ext::format(f.gamma_hat),
                    ext::format(f.stderr),
                    f.k_min.to_string(),
                    f.n_tail.to_string(),
                    "ok".to_string(),
                ),
                Err(e) => (na(), na(), na(), na(), e.to_string()),
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.label,
                r.group,
                r.direction,
                r.gamma_analytic,
                fit,
                stderr,
                k_min,
                n_tail,
                r.abs_diff().map_or_else(na, ext::format),
                ext::format(r.theta_star),
                r.theta_hat.map_or_else(na, ext::format),
                status.replace(',', ";"),
            )?;
        }
        Ok(())
    }
}
