//! Model parameters, the homophily acceptance convention and the red/blue
//! color swap shared by the analytic engine and the simulator.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node group. Every node carries exactly one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    /// Single-letter tag used by the edge-list format.
    pub fn tag(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }

    pub fn from_tag(tag: &str) -> Option<Color> {
        match tag {
            "R" => Some(Color::Red),
            "B" => Some(Color::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Red => f.write_str("red"),
            Color::Blue => f.write_str("blue"),
        }
    }
}

/// The three growth events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    /// A new node is born and an existing node follows it.
    FollowNewNode,
    /// A new node is born and follows an existing node.
    NewNodeFollows,
    /// An existing node follows another existing node.
    Densify,
}

impl EventKind {
    pub const ALL: [EventKind; 3] = [
        EventKind::FollowNewNode,
        EventKind::NewNodeFollows,
        EventKind::Densify,
    ];

    /// 1, 2 or 3.
    pub fn number(self) -> u8 {
        match self {
            EventKind::FollowNewNode => 1,
            EventKind::NewNodeFollows => 2,
            EventKind::Densify => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<EventKind> {
        match n {
            1 => Some(EventKind::FollowNewNode),
            2 => Some(EventKind::NewNodeFollows),
            3 => Some(EventKind::Densify),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        self.number() as usize - 1
    }
}

/// Per-event homophily. Only the two diagonal entries are stored; the 2x2
/// matrix `[[rho_blue, 1 - rho_red], [1 - rho_blue, rho_red]]` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomophilyMatrix {
    pub rho_blue: f64,
    pub rho_red: f64,
}

impl HomophilyMatrix {
    pub fn new(rho_blue: f64, rho_red: f64) -> Self {
        HomophilyMatrix { rho_blue, rho_red }
    }

    /// Diagonal entry for color `c`.
    pub fn diagonal(&self, c: Color) -> f64 {
        match c {
            Color::Red => self.rho_red,
            Color::Blue => self.rho_blue,
        }
    }

    /// Row-major `[[E00, E01], [E10, E11]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [self.rho_blue, 1.0 - self.rho_red],
            [1.0 - self.rho_blue, self.rho_red],
        ]
    }

    /// Probability that `follower` accepts a link to `followee`. Same colors
    /// use the diagonal entry; mixed colors use the off-diagonal entry that
    /// belongs to the follower's color.
    pub fn accept(&self, follower: Color, followee: Color) -> f64 {
        let rho = self.diagonal(follower);
        if follower == followee {
            rho
        } else {
            1.0 - rho
        }
    }
}

/// The full parameter tuple `(r, p, q, E1, E2, E3, delta_in, delta_out)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Probability that a new node is red.
    pub r: f64,
    /// Probability of event 1.
    pub p: f64,
    /// Probability of event 2.
    pub q: f64,
    pub e1: HomophilyMatrix,
    pub e2: HomophilyMatrix,
    pub e3: HomophilyMatrix,
    pub delta_in: f64,
    pub delta_out: f64,
}

/// Slack allowed on `p + q <= 1` so that `q = 1 - p` written in floating
/// point is accepted.
pub const EVENT_SUM_SLACK: f64 = 4.0 * f64::EPSILON;

impl ModelParams {
    /// Analytic-regime constructor: one homophily matrix for all events and a
    /// single `delta`.
    pub fn shared(r: f64, p: f64, q: f64, rho_blue: f64, rho_red: f64, delta: f64) -> Self {
        let e = HomophilyMatrix::new(rho_blue, rho_red);
        ModelParams {
            r,
            p,
            q,
            e1: e,
            e2: e,
            e3: e,
            delta_in: delta,
            delta_out: delta,
        }
    }

    pub fn matrix(&self, event: EventKind) -> &HomophilyMatrix {
        match event {
            EventKind::FollowNewNode => &self.e1,
            EventKind::NewNodeFollows => &self.e2,
            EventKind::Densify => &self.e3,
        }
    }

    /// Probability of event 3. Values within rounding of zero are snapped to
    /// exactly zero.
    pub fn densify_prob(&self) -> f64 {
        densify_prob(self.p, self.q)
    }

    pub fn event_prob(&self, event: EventKind) -> f64 {
        match event {
            EventKind::FollowNewNode => self.p,
            EventKind::NewNodeFollows => self.q,
            EventKind::Densify => self.densify_prob(),
        }
    }

    /// Every violated constraint, in field order.
    pub fn violations(&self) -> Vec<ParamError> {
        let mut out = Vec::new();
        let unit = |name: &'static str, v: f64, out: &mut Vec<ParamError>| {
            if !(0.0..=1.0).contains(&v) {
                out.push(ParamError::Range {
                    field: name,
                    value: v,
                    allowed: "[0, 1]",
                });
            }
        };
        unit("r", self.r, &mut out);
        unit("p", self.p, &mut out);
        unit("q", self.q, &mut out);
        let names = [
            ("rho_blue_e1", "rho_red_e1"),
            ("rho_blue_e2", "rho_red_e2"),
            ("rho_blue_e3", "rho_red_e3"),
        ];
        for (e, (nb, nr)) in [self.e1, self.e2, self.e3].iter().zip(names) {
            unit(nb, e.rho_blue, &mut out);
            unit(nr, e.rho_red, &mut out);
        }
        for (name, v) in [("delta_in", self.delta_in), ("delta_out", self.delta_out)] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(ParamError::Range {
                    field: name,
                    value: v,
                    allowed: "(0, inf)",
                });
            }
        }
        if self.p + self.q > 1.0 + EVENT_SUM_SLACK {
            out.push(ParamError::Constraint("p + q <= 1"));
        }
        out
    }
}

pub(crate) fn densify_prob(p: f64, q: f64) -> f64 {
    let w = 1.0 - p - q;
    if w.abs() <= EVENT_SUM_SLACK {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{field} = {value} is outside {allowed}")]
    Range {
        field: &'static str,
        value: f64,
        allowed: &'static str,
    },
    #[error("constraint violated: {0}")]
    Constraint(&'static str),
}

/// All violations found by [`validate_params`].
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameters: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ParamErrors(pub Vec<ParamError>);

/// Returns the parameters unchanged when every constraint holds, otherwise
/// the full list of violations.
pub fn validate_params(raw: ModelParams) -> Result<ModelParams, ParamErrors> {
    let v = raw.violations();
    if v.is_empty() {
        Ok(raw)
    } else {
        Err(ParamErrors(v))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NotAnalytic {
    #[error("per-event homophily matrices differ; set rho_blue/rho_red once for all events")]
    MatricesDiffer,
    #[error("delta_in ({0}) != delta_out ({1}); use a single delta")]
    DeltasDiffer(f64, f64),
}

/// Parameters of the analytically tractable regime: a single homophily
/// matrix and `delta_in = delta_out`.
///
/// Both `r` and `1 - r` are stored so that [`color_swap`] is an exact
/// involution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    r: f64,
    r_blue: f64,
    p: f64,
    q: f64,
    rho_blue: f64,
    rho_red: f64,
    delta: f64,
}

impl AnalyticParams {
    /// Unchecked constructor; range validation lives in [`validate_params`].
    pub fn new(r: f64, p: f64, q: f64, rho_blue: f64, rho_red: f64, delta: f64) -> Self {
        AnalyticParams {
            r,
            r_blue: 1.0 - r,
            p,
            q,
            rho_blue,
            rho_red,
            delta,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    /// `1 - r`, as stored.
    pub fn r_blue(&self) -> f64 {
        self.r_blue
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn rho_blue(&self) -> f64 {
        self.rho_blue
    }
    pub fn rho_red(&self) -> f64 {
        self.rho_red
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn densify_prob(&self) -> f64 {
        densify_prob(self.p, self.q)
    }

    pub fn to_model(&self) -> ModelParams {
        ModelParams::shared(self.r, self.p, self.q, self.rho_blue, self.rho_red, self.delta)
    }

    /// Red-view parameters in the blue group's frame.
    pub fn swapped(&self) -> AnalyticParams {
        AnalyticParams {
            r: self.r_blue,
            r_blue: self.r,
            p: self.p,
            q: self.q,
            rho_blue: self.rho_red,
            rho_red: self.rho_blue,
            delta: self.delta,
        }
    }

    pub(crate) fn key(&self) -> [f64; 7] {
        [
            self.r,
            self.r_blue,
            self.rho_red,
            self.rho_blue,
            self.p,
            self.q,
            self.delta,
        ]
    }
}

impl Serialize for AnalyticParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AnalyticParams", 6)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("rho_blue", &self.rho_blue)?;
        st.serialize_field("rho_red", &self.rho_red)?;
        st.serialize_field("delta", &self.delta)?;
        st.end()
    }
}

/// Returns the restricted view iff `E1 = E2 = E3` element-wise (exact
/// equality) and `delta_in = delta_out`.
pub fn analysis_view(params: &ModelParams) -> Result<AnalyticParams, NotAnalytic> {
    let same = |a: &HomophilyMatrix, b: &HomophilyMatrix| {
        a.rho_blue.to_bits() == b.rho_blue.to_bits() && a.rho_red.to_bits() == b.rho_red.to_bits()
    };
    if !(same(&params.e1, &params.e2) && same(&params.e2, &params.e3)) {
        return Err(NotAnalytic::MatricesDiffer);
    }
    if params.delta_in.to_bits() != params.delta_out.to_bits() {
        return Err(NotAnalytic::DeltasDiffer(params.delta_in, params.delta_out));
    }
    Ok(AnalyticParams::new(
        params.r,
        params.p,
        params.q,
        params.e1.rho_blue,
        params.e1.rho_red,
        params.delta_in,
    ))
}

/// Probability that a sampled candidate link is accepted in `event`.
pub fn acceptance_probability(
    event: EventKind,
    follower: Color,
    followee: Color,
    params: &ModelParams,
) -> f64 {
    params.matrix(event).accept(follower, followee)
}

/// Red group's shares of total in-degree and out-degree.
///
/// The blue complements are stored alongside so that swapping colors is
/// exact. [`ThetaPair::new`] fills them with `1 - share`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPair {
    theta_in: f64,
    theta_out: f64,
    blue_in: f64,
    blue_out: f64,
}

impl ThetaPair {
    pub fn new(theta_in: f64, theta_out: f64) -> Self {
        ThetaPair {
            theta_in,
            theta_out,
            blue_in: 1.0 - theta_in,
            blue_out: 1.0 - theta_out,
        }
    }

    pub fn theta_in(&self) -> f64 {
        self.theta_in
    }
    pub fn theta_out(&self) -> f64 {
        self.theta_out
    }
    /// `1 - theta_in`, as stored.
    pub fn blue_in(&self) -> f64 {
        self.blue_in
    }
    /// `1 - theta_out`, as stored.
    pub fn blue_out(&self) -> f64 {
        self.blue_out
    }

    pub fn swapped(&self) -> ThetaPair {
        ThetaPair {
            theta_in: self.blue_in,
            theta_out: self.blue_out,
            blue_in: self.theta_in,
            blue_out: self.theta_out,
        }
    }

    pub fn in_unit_square(&self) -> bool {
        (0.0..=1.0).contains(&self.theta_in) && (0.0..=1.0).contains(&self.theta_out)
    }

    /// Sup-norm distance on the red components.
    pub fn dist(&self, other: &ThetaPair) -> f64 {
        (self.theta_in - other.theta_in)
            .abs()
            .max((self.theta_out - other.theta_out).abs())
    }
}

impl Serialize for ThetaPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ThetaPair", 2)?;
        st.serialize_field("theta_in", &self.theta_in)?;
        st.serialize_field("theta_out", &self.theta_out)?;
        st.end()
    }
}

/// Blue-view parameterization: `r <-> 1 - r`, `rho_blue <-> rho_red`,
/// `theta <-> 1 - theta`. Applying it twice is the identity.
pub fn color_swap(ap: &AnalyticParams, theta: &ThetaPair) -> (AnalyticParams, ThetaPair) {
    (ap.swapped(), theta.swapped())
}
