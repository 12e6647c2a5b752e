use super::SimError;
use crate::model::{Color, ThetaPair};

/// Append-only directed multigraph. Edge `(source, target)` means `target`
/// follows `source`: `source` gains a follower (out-degree) and `target` a
/// followee (in-degree). Self-loops and parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthGraph {
    colors: Vec<Color>,
    in_degree: Vec<u64>,
    out_degree: Vec<u64>,
    edges: Vec<(u32, u32)>,
    red_in: u64,
    red_out: u64,
    n_red: u64,
}

impl Default for GrowthGraph {
    /// One red node (0), one blue node (1) and the edges `0 -> 1`, `1 -> 0`.
    fn default() -> Self {
        GrowthGraph::from_edges(vec![Color::Red, Color::Blue], vec![(0, 1), (1, 0)])
            .expect("seed graph is consistent")
    }
}

impl GrowthGraph {
    pub fn empty() -> Self {
        GrowthGraph {
            colors: Vec::new(),
            in_degree: Vec::new(),
            out_degree: Vec::new(),
            edges: Vec::new(),
            red_in: 0,
            red_out: 0,
            n_red: 0,
        }
    }

    /// Builds a graph from node colors and edges, deriving every degree.
    pub fn from_edges(colors: Vec<Color>, edges: Vec<(u32, u32)>) -> Result<Self, SimError> {
        if colors.len() > u32::MAX as usize {
            return Err(SimError::InvalidInitialGraph("too many nodes".into()));
        }
        let mut g = GrowthGraph::empty();
        for c in colors {
            g.add_node(c);
        }
        g.edges.reserve(edges.len());
        for (s, t) in edges {
            if s as usize >= g.node_count() || t as usize >= g.node_count() {
                return Err(SimError::InvalidInitialGraph(format!(
                    "edge ({s}, {t}) references a node outside 0..{}",
                    g.node_count()
                )));
            }
            g.add_edge(s, t);
        }
        Ok(g)
    }

    /// Like [`GrowthGraph::from_edges`], but also checks caller-supplied
    /// degree arrays against the edge list.
    pub fn from_parts(
        colors: Vec<Color>,
        in_degree: &[u64],
        out_degree: &[u64],
        edges: Vec<(u32, u32)>,
    ) -> Result<Self, SimError> {
        let g = GrowthGraph::from_edges(colors, edges)?;
        if g.in_degree != in_degree || g.out_degree != out_degree {
            return Err(SimError::InvalidInitialGraph(
                "degree arrays disagree with the edge list".into(),
            ));
        }
        Ok(g)
    }

    pub(crate) fn add_node(&mut self, c: Color) -> u32 {
        let id = self.colors.len() as u32;
        self.colors.push(c);
        self.in_degree.push(0);
        self.out_degree.push(0);
        if c == Color::Red {
            self.n_red += 1;
        }
        id
    }

    pub(crate) fn add_edge(&mut self, source: u32, target: u32) {
        self.edges.push((source, target));
        self.out_degree[source as usize] += 1;
        self.in_degree[target as usize] += 1;
        if self.colors[source as usize] == Color::Red {
            self.red_out += 1;
        }
        if self.colors[target as usize] == Color::Red {
            self.red_in += 1;
        }
    }

    pub fn node_count(&self) -> usize {
        self.colors.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }
    pub fn color(&self, node: u32) -> Color {
        self.colors[node as usize]
    }
    pub fn in_degrees(&self) -> &[u64] {
        &self.in_degree
    }
    pub fn out_degrees(&self) -> &[u64] {
        &self.out_degree
    }
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Total in-degree of the group.
    pub fn in_mass(&self, c: Color) -> u64 {
        match c {
            Color::Red => self.red_in,
            Color::Blue => self.edges.len() as u64 - self.red_in,
        }
    }
    pub fn out_mass(&self, c: Color) -> u64 {
        match c {
            Color::Red => self.red_out,
            Color::Blue => self.edges.len() as u64 - self.red_out,
        }
    }
    pub fn group_size(&self, c: Color) -> u64 {
        match c {
            Color::Red => self.n_red,
            Color::Blue => self.colors.len() as u64 - self.n_red,
        }
    }

    /// Red shares of in- and out-degree mass, `None` without edges.
    pub fn theta(&self) -> Option<ThetaPair> {
        let m = self.edges.len() as u64;
        if m == 0 {
            return None;
        }
        let share = |red: u64| red as f64 / m as f64;
        let t = ThetaPair::new(share(self.red_in), share(self.red_out));
        Some(t)
    }

    /// Same graph with every color flipped.
    pub fn color_swapped(&self) -> GrowthGraph {
        let colors = self.colors.iter().map(|c| c.other()).collect();
        GrowthGraph::from_edges(colors, self.edges.clone()).expect("ids unchanged")
    }

    /// Recomputes every aggregate from the edge list.
    pub fn is_consistent(&self) -> bool {
        let n = self.colors.len();
        if self.in_degree.len() != n || self.out_degree.len() != n {
            return false;
        }
        let mut ind = vec![0u64; n];
        let mut outd = vec![0u64; n];
        for &(s, t) in &self.edges {
            if s as usize >= n || t as usize >= n {
                return false;
            }
            outd[s as usize] += 1;
            ind[t as usize] += 1;
        }
        let red_sum = |d: &[u64]| {
            d.iter()
                .zip(&self.colors)
                .filter(|(_, c)| **c == Color::Red)
                .map(|(k, _)| *k)
                .sum::<u64>()
        };
        ind == self.in_degree
            && outd == self.out_degree
            && red_sum(&ind) == self.red_in
            && red_sum(&outd) == self.red_out
            && self.colors.iter().filter(|c| **c == Color::Red).count() as u64 == self.n_red
    }
}
