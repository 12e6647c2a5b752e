//! Empirical quantities of finished graphs: degree shares, degree
//! histograms, power-law fits and the glass ceiling statistic.

mod compare;
mod fit;
mod gce;
mod zeta;

pub use compare::{compare_analytic_empirical, compare_summary, ComparisonRow, ComparisonTable, DegreeSummary};
pub use fit::{fit_ccdf_regression, fit_power_law, FitMethod, PowerLawFit, MIN_TAIL};
pub use gce::{gce_curve, gce_statistic, write_gce_csv, ExtRatio, GceStatistic};
pub use zeta::hurwitz_zeta;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::model::{Color, ThetaPair};
use crate::sim::GrowthGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("only {n_tail} tail samples (need at least 10)")]
    InsufficientTail { n_tail: u64 },
    #[error("all tail degrees are equal")]
    DegenerateSupport,
    #[error("degree threshold must be at least 1")]
    InvalidThreshold,
}

pub type Result<T> = std::result::Result<T, EstimateError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Direction {
    In,
    Out,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
        })
    }
}

/// `(d_in(R) / m, d_out(R) / m)`.
pub fn empirical_theta(g: &GrowthGraph) -> Result<ThetaPair> {
    g.theta().ok_or(EstimateError::EmptyGraph)
}

/// Number of nodes of one group at each degree, including degree 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub group: Color,
    pub direction: Direction,
    pub counts: BTreeMap<u64, u64>,
}

impl DegreeHistogram {
    pub fn new(group: Color, direction: Direction) -> Self {
        DegreeHistogram {
            group,
            direction,
            counts: BTreeMap::new(),
        }
    }

    /// Number of nodes counted.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Nodes with degree `>= k`.
    pub fn at_least(&self, k: u64) -> u64 {
        self.counts.range(k..).map(|(_, c)| c).sum()
    }

    /// Adds another histogram's counts. Panics on mismatched group or
    /// direction.
    pub fn merge(&mut self, other: &DegreeHistogram) {
        assert_eq!((self.group, self.direction), (other.group, other.direction));
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,count")?;
        for (k, c) in &self.counts {
            writeln!(w, "{k},{c}")?;
        }
        Ok(())
    }
}

pub fn degree_histogram(g: &GrowthGraph, group: Color, direction: Direction) -> DegreeHistogram {
    let degrees = match direction {
        Direction::In => g.in_degrees(),
        Direction::Out => g.out_degrees(),
    };
    let mut h = DegreeHistogram::new(group, direction);
    for (d, c) in degrees.iter().zip(g.colors()) {
        if *c == group {
            *h.counts.entry(*d).or_insert(0) += 1;
        }
    }
    h
}
