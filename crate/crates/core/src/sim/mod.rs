//! Event-driven growth of a two-color directed network.

mod graph;
mod io;
mod trajectory;

pub use graph::GrowthGraph;
pub use io::{export_graph, read_edge_list, write_edge_list};
pub use trajectory::{geometric_schedule, Trajectory, DEFAULT_SNAPSHOTS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{validate_params, Color, EventKind, ModelParams, ParamErrors};

pub const DEFAULT_MAX_REJECTIONS: u64 = 100_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid initial graph: {0}")]
    InvalidInitialGraph(String),
    #[error(transparent)]
    InvalidParams(#[from] ParamErrors),
    #[error("max_rejections must be at least 1")]
    InvalidMaxRejections,
    #[error("event {} abandoned after {attempts} rejected candidates", .event.number())]
    RejectionLimitExceeded { event: EventKind, attempts: u64 },
    #[error("{abandoned} consecutive events abandoned; parameters cannot grow this graph")]
    Degenerate { abandoned: u64 },
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: ModelParams,
    pub seed: u64,
    pub steps: u64,
    /// Defaults to [`GrowthGraph::default`].
    pub initial_graph: Option<GrowthGraph>,
    pub max_rejections: u64,
}

impl SimConfig {
    pub fn new(params: ModelParams, seed: u64, steps: u64) -> Self {
        SimConfig {
            params,
            seed,
            steps,
            initial_graph: None,
            max_rejections: DEFAULT_MAX_REJECTIONS,
        }
    }
}

/// One accepted event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventRecord {
    pub kind: EventKind,
    pub new_node: Option<(u32, Color)>,
    /// The followed node.
    pub source: u32,
    /// The follower.
    pub target: u32,
    /// Rejected candidates before acceptance.
    pub rejections: u64,
}

/// A single candidate draw with its acceptance coin, leaving the graph
/// untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trial {
    pub follower: Color,
    pub followee: Color,
    pub accepted: bool,
}

/// Node `u` with probability `(d_in(u) + delta) / (m + n delta)`: the target
/// of a uniform edge with probability `m / (m + n delta)`, else a uniform node.
pub fn sample_by_in_degree<R: Rng + ?Sized>(g: &GrowthGraph, delta: f64, rng: &mut R) -> u32 {
    sample_mixture(g, delta, rng, |e| e.1)
}

/// Node `u` with probability `(d_out(u) + delta) / (m + n delta)`.
pub fn sample_by_out_degree<R: Rng + ?Sized>(g: &GrowthGraph, delta: f64, rng: &mut R) -> u32 {
    sample_mixture(g, delta, rng, |e| e.0)
}

fn sample_mixture<R: Rng + ?Sized>(
    g: &GrowthGraph,
    delta: f64,
    rng: &mut R,
    end: impl Fn(&(u32, u32)) -> u32,
) -> u32 {
    let m = g.edge_count();
    let n = g.node_count();
    debug_assert!(n > 0);
    let x = rng.random::<f64>() * (m as f64 + n as f64 * delta);
    if x < m as f64 {
        end(&g.edges()[(x as usize).min(m - 1)])
    } else {
        (((x - m as f64) / delta) as usize).min(n - 1) as u32
    }
}

/// A running simulation. Owns its graph and random stream.
#[derive(Debug, Clone)]
pub struct SimState {
    params: ModelParams,
    graph: GrowthGraph,
    rng: ChaCha8Rng,
    max_rejections: u64,
    steps: u64,
    rejections: u64,
    event_counts: [u64; 3],
    abandoned: [u64; 3],
}

/// Validates the configuration and seeds the random stream.
pub fn init(config: &SimConfig) -> Result<SimState> {
    let params = validate_params(config.params)?;
    if config.max_rejections == 0 {
        return Err(SimError::InvalidMaxRejections);
    }
    let graph = config.initial_graph.clone().unwrap_or_default();
    if graph.node_count() == 0 {
        return Err(SimError::InvalidInitialGraph(
            "every event samples an existing node; the initial graph needs at least one".into(),
        ));
    }
    if !graph.is_consistent() {
        return Err(SimError::InvalidInitialGraph("aggregates disagree with edges".into()));
    }
    Ok(SimState {
        params,
        graph,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        max_rejections: config.max_rejections,
        steps: 0,
        rejections: 0,
        event_counts: [0; 3],
        abandoned: [0; 3],
    })
}

/// Runs `config.steps` steps on a fresh state with the default schedule.
pub fn simulate(config: &SimConfig) -> Result<(GrowthGraph, Trajectory)> {
    let mut st = init(config)?;
    let traj = st.run(config.steps, &geometric_schedule(config.steps, DEFAULT_SNAPSHOTS))?;
    Ok((st.into_graph(), traj))
}

impl SimState {
    pub fn graph(&self) -> &GrowthGraph {
        &self.graph
    }
    pub fn into_graph(self) -> GrowthGraph {
        self.graph
    }
    pub fn params(&self) -> &ModelParams {
        &self.params
    }
    /// Accepted events so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }
    pub fn rejections(&self) -> u64 {
        self.rejections
    }
    /// Accepted events per kind.
    pub fn event_counts(&self) -> [u64; 3] {
        self.event_counts
    }
    /// Abandoned (and redrawn) events per kind.
    pub fn abandoned(&self) -> [u64; 3] {
        self.abandoned
    }

    fn draw_event(&mut self) -> EventKind {
        let (p, q) = (self.params.p, self.params.q);
        let u = self.rng.random::<f64>();
        if u < p {
            EventKind::FollowNewNode
        } else if u < p + q || self.params.densify_prob() == 0.0 {
            EventKind::NewNodeFollows
        } else {
            EventKind::Densify
        }
    }

    fn draw_color(&mut self) -> Color {
        if self.rng.random::<f64>() < self.params.r {
            Color::Red
        } else {
            Color::Blue
        }
    }

    fn present(&self) -> impl Iterator<Item = Color> + '_ {
        [Color::Red, Color::Blue]
            .into_iter()
            .filter(|c| self.graph.group_size(*c) > 0)
    }

    /// True when some candidate present in the graph has positive acceptance.
    fn satisfiable(&self, kind: EventKind, new_color: Color) -> bool {
        let e = self.params.matrix(kind);
        match kind {
            EventKind::FollowNewNode => self.present().any(|f| e.accept(f, new_color) > 0.0),
            EventKind::NewNodeFollows => self.present().any(|s| e.accept(new_color, s) > 0.0),
            EventKind::Densify => self
                .present()
                .any(|f| self.present().any(|s| e.accept(f, s) > 0.0)),
        }
    }

    /// Draws one candidate link for `kind` and flips its acceptance coin.
    /// `new_color` is the color of the node an event 1 or 2 would create.
    pub fn trial(&mut self, kind: EventKind, new_color: Color) -> Trial {
        let (follower, followee) = self.candidate(kind, new_color);
        let acc = self.params.matrix(kind).accept(follower.1, followee.1);
        Trial {
            follower: follower.1,
            followee: followee.1,
            accepted: self.rng.random::<f64>() < acc,
        }
    }

    /// `(follower, followee)` as `(id, color)`; `u32::MAX` stands for the
    /// node not yet created.
    fn candidate(&mut self, kind: EventKind, new_color: Color) -> ((u32, Color), (u32, Color)) {
        let g = &self.graph;
        match kind {
            EventKind::FollowNewNode => {
                let u = sample_by_in_degree(g, self.params.delta_in, &mut self.rng);
                ((u, g.color(u)), (u32::MAX, new_color))
            }
            EventKind::NewNodeFollows => {
                let u = sample_by_out_degree(g, self.params.delta_out, &mut self.rng);
                ((u32::MAX, new_color), (u, g.color(u)))
            }
            EventKind::Densify => {
                let u = sample_by_out_degree(g, self.params.delta_out, &mut self.rng);
                let v = sample_by_in_degree(g, self.params.delta_in, &mut self.rng);
                ((v, g.color(v)), (u, g.color(u)))
            }
        }
    }

    /// Executes one event of the given kind, repeating candidate draws until
    /// one is accepted. Events whose acceptance is zero for every candidate
    /// are abandoned immediately with `attempts = 0`.
    pub fn try_event(&mut self, kind: EventKind, new_color: Option<Color>) -> Result<EventRecord> {
        let new_color = match (kind, new_color) {
            (EventKind::Densify, _) => Color::Red,
            (_, Some(c)) => c,
            (_, None) => self.draw_color(),
        };
        if !self.satisfiable(kind, new_color) {
            return Err(SimError::RejectionLimitExceeded { event: kind, attempts: 0 });
        }
        let e = *self.params.matrix(kind);
        for attempt in 0..self.max_rejections {
            let (follower, followee) = self.candidate(kind, new_color);
            let acc = e.accept(follower.1, followee.1);
            if self.rng.random::<f64>() < acc {
                return Ok(self.commit(kind, new_color, follower.0, followee.0, attempt));
            }
        }
        Err(SimError::RejectionLimitExceeded {
            event: kind,
            attempts: self.max_rejections,
        })
    }

    fn commit(&mut self, kind: EventKind, color: Color, follower: u32, followee: u32, rejections: u64) -> EventRecord {
        let (source, target, new_node) = match kind {
            EventKind::FollowNewNode => {
                let v = self.graph.add_node(color);
                (v, follower, Some((v, color)))
            }
            EventKind::NewNodeFollows => {
                let v = self.graph.add_node(color);
                (followee, v, Some((v, color)))
            }
            EventKind::Densify => (followee, follower, None),
        };
        self.graph.add_edge(source, target);
        self.steps += 1;
        self.rejections += rejections;
        self.event_counts[kind.index()] += 1;
        self.debug_check();
        EventRecord {
            kind,
            new_node,
            source,
            target,
            rejections,
        }
    }

    #[cfg(debug_assertions)]
    fn debug_check(&self) {
        let g = &self.graph;
        assert!(g.in_mass(Color::Red) <= g.edge_count() as u64);
        assert!(g.out_mass(Color::Red) <= g.edge_count() as u64);
        assert!(g.group_size(Color::Red) <= g.node_count() as u64);
        if self.steps.is_power_of_two() {
            assert!(g.is_consistent(), "graph aggregates drifted at step {}", self.steps);
        }
    }

    #[cfg(not(debug_assertions))]
    fn debug_check(&self) {}

    /// Draws an event kind and executes it. Abandoned events are redrawn;
    /// after `max_rejections` consecutive abandonments the parameters are
    /// declared degenerate for this graph.
    pub fn step(&mut self) -> Result<EventRecord> {
        for _ in 0..self.max_rejections {
            let kind = self.draw_event();
            match self.try_event(kind, None) {
                Ok(rec) => return Ok(rec),
                Err(SimError::RejectionLimitExceeded { event, .. }) => {
                    self.abandoned[event.index()] += 1;
                }
                Err(e) => return Err(e),
            }
        }
        Err(SimError::Degenerate {
            abandoned: self.max_rejections,
        })
    }

    /// Executes `steps` steps, snapshotting after the step counts listed in
    /// `schedule` (relative to the start of this call, increasing).
    pub fn run(&mut self, steps: u64, schedule: &[u64]) -> Result<Trajectory> {
        let mut traj = Trajectory::default();
        let mut next = schedule.iter().copied().filter(|&s| s <= steps).peekable();
        for k in 1..=steps {
            self.step()?;
            if next.peek() == Some(&k) {
                next.next();
                traj.record(self);
            }
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: f64, p: f64, q: f64, rb: f64, rr: f64, d: f64) -> ModelParams {
        ModelParams::shared(r, p, q, rb, rr, d)
    }

    #[test]
    fn zero_steps_keep_initial_graph() {
        let mut st = init(&SimConfig::new(params(0.3, 0.3, 0.3, 0.5, 0.5, 1.0), 1, 0)).unwrap();
        let traj = st.run(0, &geometric_schedule(0, 50)).unwrap();
        assert!(traj.times.is_empty());
        assert_eq!(st.graph(), &GrowthGraph::default());
    }

    #[test]
    fn empty_initial_graph_is_rejected() {
        let mut cfg = SimConfig::new(params(0.3, 0.0, 0.0, 0.5, 0.5, 1.0), 1, 10);
        cfg.initial_graph = Some(GrowthGraph::empty());
        assert!(matches!(init(&cfg), Err(SimError::InvalidInitialGraph(_))));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let cfg = SimConfig::new(params(0.3, 0.8, 0.8, 0.5, 0.5, 1.0), 1, 10);
        assert!(matches!(init(&cfg), Err(SimError::InvalidParams(_))));
        let mut cfg = SimConfig::new(params(0.3, 0.3, 0.3, 0.5, 0.5, 1.0), 1, 10);
        cfg.max_rejections = 0;
        assert!(matches!(init(&cfg), Err(SimError::InvalidMaxRejections)));
    }

    #[test]
    fn one_edge_per_step() {
        let mut st = init(&SimConfig::new(params(0.4, 0.2, 0.3, 0.8, 0.3, 2.0), 7, 0)).unwrap();
        for k in 1..=2000u64 {
            let nodes = st.graph().node_count();
            let rec = st.step().unwrap();
            assert_eq!(st.graph().edge_count() as u64, 2 + k);
            let grew = st.graph().node_count() - nodes;
            assert_eq!(grew == 1, rec.kind != EventKind::Densify);
            match rec.kind {
                EventKind::FollowNewNode => assert_eq!(rec.new_node.unwrap().0, rec.source),
                EventKind::NewNodeFollows => assert_eq!(rec.new_node.unwrap().0, rec.target),
                EventKind::Densify => assert!(rec.new_node.is_none()),
            }
        }
        assert!(st.graph().is_consistent());
    }

    #[test]
    fn same_seed_same_edges() {
        let cfg = SimConfig::new(params(0.4, 0.2, 0.3, 0.8, 0.3, 2.0), 99, 5000);
        let (a, _) = simulate(&cfg).unwrap();
        let (b, _) = simulate(&cfg).unwrap();
        assert_eq!(a.edges(), b.edges());
        let (c, _) = simulate(&SimConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn impossible_event_is_abandoned() {
        let mut cfg = SimConfig::new(params(1.0, 0.0, 1.0, 0.0, 1.0, 1.0), 3, 0);
        cfg.initial_graph = Some(GrowthGraph::from_edges(vec![Color::Blue; 2], vec![(0, 1)]).unwrap());
        let mut st = init(&cfg).unwrap();
        let err = st.try_event(EventKind::NewNodeFollows, Some(Color::Red)).unwrap_err();
        assert!(matches!(
            err,
            SimError::RejectionLimitExceeded { event: EventKind::NewNodeFollows, attempts: 0 }
        ));
        assert!(matches!(st.step(), Err(SimError::Degenerate { .. })));
    }

    #[test]
    fn bounded_rejection_loop() {
        // Acceptance is tiny but positive, so the cap is what stops the loop.
        let mut cfg = SimConfig::new(params(1.0, 0.0, 1.0, 0.0, 1.0 - 1e-12, 1.0), 3, 0);
        cfg.initial_graph = Some(GrowthGraph::from_edges(vec![Color::Blue; 2], vec![(0, 1)]).unwrap());
        cfg.max_rejections = 50;
        let mut st = init(&cfg).unwrap();
        let err = st.try_event(EventKind::NewNodeFollows, Some(Color::Red)).unwrap_err();
        assert!(matches!(err, SimError::RejectionLimitExceeded { attempts: 50, .. }));
    }

    #[test]
    fn mixed_case_runs_despite_impossible_events() {
        // A blue newcomer can never be followed under event 1 here.
        let cfg = SimConfig::new(params(0.3, 0.1, 0.2, 0.0, 1.0, 2.0), 5, 20_000);
        let mut st = init(&cfg).unwrap();
        st.run(20_000, &[]).unwrap();
        assert!(st.abandoned()[0] > 0);
        assert_eq!(st.steps(), 20_000);
    }

    #[test]
    fn single_node_sampler() {
        let g = GrowthGraph::from_edges(vec![Color::Red], vec![(0, 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(sample_by_in_degree(&g, 0.5, &mut rng), 0);
            assert_eq!(sample_by_out_degree(&g, 0.5, &mut rng), 0);
        }
    }

    #[test]
    fn trajectory_times_increase() {
        let cfg = SimConfig::new(params(0.35, 0.25, 0.25, 0.5, 0.5, 2.0), 11, 10_000);
        let (_, traj) = simulate(&cfg).unwrap();
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*traj.times.last().unwrap(), 10_000);
        assert!(traj.theta.iter().all(|t| t.in_unit_square()));
    }
}
