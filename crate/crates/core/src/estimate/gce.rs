use std::fmt;
use std::io::{self, Write};

use serde::{Serialize, Serializer};

use super::{EstimateError, Result};
use crate::ext;
use crate::model::Color;
use crate::sim::GrowthGraph;

/// A nonnegative ratio that may be infinite or undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtRatio {
    Finite(f64),
    Infinite,
    Indeterminate,
}

impl ExtRatio {
    pub fn of(num: u64, den: u64) -> ExtRatio {
        match (num, den) {
            (0, 0) => ExtRatio::Indeterminate,
            (_, 0) => ExtRatio::Infinite,
            _ => ExtRatio::Finite(num as f64 / den as f64),
        }
    }

    pub fn mul(self, other: ExtRatio) -> ExtRatio {
        use ExtRatio::*;
        match (self, other) {
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Infinite, Finite(x)) | (Finite(x), Infinite) if x == 0.0 => Indeterminate,
            (Infinite, _) | (_, Infinite) => Infinite,
            (Finite(a), Finite(b)) => Finite(a * b),
        }
    }

    /// `+inf` for [`ExtRatio::Infinite`], NaN when indeterminate.
    pub fn value(self) -> f64 {
        match self {
            ExtRatio::Finite(x) => x,
            ExtRatio::Infinite => f64::INFINITY,
            ExtRatio::Indeterminate => f64::NAN,
        }
    }
}

impl fmt::Display for ExtRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRatio::Indeterminate => f.write_str("indeterminate"),
            other => f.write_str(&ext::format(other.value())),
        }
    }
}

impl Serialize for ExtRatio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtRatio::Finite(x) => s.serialize_f64(*x),
            other => s.collect_str(other),
        }
    }
}

/// Tail counts at threshold `k` and the product
/// `(top_out(R) / top_in(R)) * (top_in(B) / top_out(B))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GceStatistic {
    pub k: u64,
    pub top_out_red: u64,
    pub top_in_red: u64,
    pub top_out_blue: u64,
    pub top_in_blue: u64,
    pub ratio: ExtRatio,
}

pub fn gce_statistic(g: &GrowthGraph, k: u64) -> Result<GceStatistic> {
    Ok(gce_curve(g, &[k])?.remove(0))
}

/// [`gce_statistic`] for every threshold in `ks`, in one pass over the nodes.
pub fn gce_curve(g: &GrowthGraph, ks: &[u64]) -> Result<Vec<GceStatistic>> {
    if ks.contains(&0) {
        return Err(EstimateError::InvalidThreshold);
    }
    let mut counts = vec![[0u64; 4]; ks.len()];
    for ((din, dout), c) in g.in_degrees().iter().zip(g.out_degrees()).zip(g.colors()) {
        let (o, i) = match c {
            Color::Red => (0, 1),
            Color::Blue => (2, 3),
        };
        for (row, &k) in counts.iter_mut().zip(ks) {
            row[o] += (*dout >= k) as u64;
            row[i] += (*din >= k) as u64;
        }
    }
    Ok(ks
        .iter()
        .zip(counts)
        .map(|(&k, [or, ir, ob, ib])| GceStatistic {
            k,
            top_out_red: or,
            top_in_red: ir,
            top_out_blue: ob,
            top_in_blue: ib,
            ratio: ExtRatio::of(or, ir).mul(ExtRatio::of(ib, ob)),
        })
        .collect())
}

/// `k,ratio` rows with `inf` and `indeterminate` literals.
pub fn write_gce_csv<W: Write>(curve: &[GceStatistic], mut w: W) -> io::Result<()> {
    writeln!(w, "k,ratio")?;
    for s in curve {
        writeln!(w, "{},{}", s.k, s.ratio)?;
    }
    Ok(())
}
