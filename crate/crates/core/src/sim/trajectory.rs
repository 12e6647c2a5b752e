use std::io::{self, Write};

use super::SimState;
use crate::ext;
use crate::model::{Color, ThetaPair};

pub const DEFAULT_SNAPSHOTS: usize = 50;

/// Snapshot series recorded during [`SimState::run`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    /// Accepted steps at each snapshot, strictly increasing.
    pub times: Vec<u64>,
    pub theta: Vec<ThetaPair>,
    /// Red node count divided by the number of accepted steps.
    pub frac_red_nodes: Vec<f64>,
    pub rejections_cum: Vec<u64>,
    /// Cumulative accepted events per kind.
    pub event_counts: Vec<[u64; 3]>,
    /// Cumulative abandoned events per kind.
    pub abandoned: Vec<[u64; 3]>,
}

impl Trajectory {
    pub(crate) fn record(&mut self, st: &SimState) {
        let g = st.graph();
        let t = st.steps();
        self.times.push(t);
        self.theta.push(g.theta().expect("at least one edge after a step"));
        self.frac_red_nodes.push(g.group_size(Color::Red) as f64 / t as f64);
        self.rejections_cum.push(st.rejections());
        self.event_counts.push(st.event_counts());
        self.abandoned.push(st.abandoned());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,theta_in,theta_out,frac_red_nodes,rejections_cum")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.times[i],
                ext::format(self.theta[i].theta_in()),
                ext::format(self.theta[i].theta_out()),
                ext::format(self.frac_red_nodes[i]),
                self.rejections_cum[i]
            )?;
        }
        Ok(())
    }
}

/// Up to `points` distinct step counts spaced geometrically over `1..=steps`,
/// always ending at `steps`.
pub fn geometric_schedule(steps: u64, points: usize) -> Vec<u64> {
    if steps == 0 || points == 0 {
        return Vec::new();
    }
    if points == 1 {
        return vec![steps];
    }
    let top = (steps as f64).ln();
    let mut out: Vec<u64> = (0..points)
        .map(|i| {
            let x = (top * i as f64 / (points - 1) as f64).exp().round() as u64;
            x.clamp(1, steps)
        })
        .collect();
    out.dedup();
    if out.last() != Some(&steps) {
        out.push(steps);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_shape() {
        let s = geometric_schedule(1_000_000, 50);
        assert_eq!(s.first(), Some(&1));
        assert_eq!(s.last(), Some(&1_000_000));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.len() <= 50 && s.len() > 40);
        assert_eq!(geometric_schedule(3, 50), vec![1, 2, 3]);
        assert!(geometric_schedule(0, 50).is_empty());
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        Trajectory::default().write_csv(&mut buf).unwrap();
        assert_eq!(buf, b"t,theta_in,theta_out,frac_red_nodes,rejections_cum\n");
    }
}
