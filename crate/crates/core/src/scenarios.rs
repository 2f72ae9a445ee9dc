//! Game environments, adversaries and the simulation loop.

use std::sync::Arc;
use std::time::Instant;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::blackwell::BlackwellStrategy;
use crate::blocks::{block_of_round, BlockStrategy, ConstantPlay, Strategy};
use crate::error::{Error, Result};
use crate::geometry::{combine, ConvexBody, MixedAction, Norm, PayoffMatrix, TargetSet};
use crate::responses::{self, ConstrainedProblem, ResponseFunction};
use crate::targets::{graph_distance, Example, Parameterization, PhiPsiOracle, TargetFunction};

/// Resolution of the parameter grids behind oracle-based metrics.
pub const ORACLE_RESOLUTION: usize = 101;

/// Audit tolerance for opponent matrices leaving `K`.
pub const AUDIT_TOL: f64 = 1e-9;

/// An opponent set `K`, a target set and optional sample-path constraints.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub body: ConvexBody,
    pub param: Option<Parameterization>,
    pub target: TargetSet,
    pub constraint: Option<ConstrainedProblem>,
    pub example: Option<Example>,
}

impl Scenario {
    /// `K = [m♯, m†]`, target the negative orthant of `ℝ²` under `ℓ∞`.
    pub fn example1() -> Self {
        let param = Parameterization::example1();
        Scenario {
            id: "example1".into(),
            body: ConvexBody::new(param.vertices()).expect("two 2×2 vertices"),
            param: Some(param),
            target: TargetSet::negative_orthant(2, Norm::LInf).expect("dimension 2"),
            constraint: None,
            example: Some(Example::One),
        }
    }

    /// `K = [−1, 1]²` of scalar payoff pairs `(v, w)`, target `{0}`.
    pub fn example2() -> Self {
        Self::example2_on((-1.0, 1.0), (-1.0, 1.0), "example2")
    }

    /// The quadrant `v ∈ [−1, 0]`, `w ∈ [0, 1]` of the second example, on
    /// which `{0}` is approachable.
    pub fn example2_quadrant() -> Self {
        Self::example2_on((-1.0, 0.0), (0.0, 1.0), "example2_quadrant")
    }

    fn example2_on(v_range: (f64, f64), w_range: (f64, f64), id: &str) -> Self {
        let param = match Parameterization::example2() {
            Parameterization::Rectangle {
                origin, u_axis, v_axis, ..
            } => Parameterization::Rectangle {
                origin,
                u_axis,
                v_axis,
                u_range: v_range,
                v_range: w_range,
            },
            _ => unreachable!("the second example is a rectangle"),
        };
        Scenario {
            id: id.into(),
            body: ConvexBody::new(param.vertices()).expect("four 1×2 vertices"),
            param: Some(param),
            target: TargetSet::singleton(vec![0.0], Norm::L2).expect("dimension 1"),
            constraint: None,
            example: Some(Example::Two),
        }
    }

    /// `K` given by its vertices.
    pub fn custom(id: impl Into<String>, vertices: Vec<PayoffMatrix>, target: TargetSet) -> Result<Self> {
        let body = ConvexBody::new(vertices)?;
        if body.d() != target.dim() {
            return Err(Error::DimensionMismatch {
                what: "payoff dimension vs target set",
                expected: target.dim(),
                found: body.d(),
            });
        }
        let param = match body.vertices() {
            [m] => Some(Parameterization::Point(m.clone())),
            [a, b] => Some(Parameterization::Segment {
                start: a.clone(),
                end: b.clone(),
            }),
            _ => None,
        };
        Ok(Scenario {
            id: id.into(),
            body,
            param,
            target,
            constraint: None,
            example: None,
        })
    }

    /// A known finite game: `payoffs[a][y]` is the vector payoff of action
    /// `a` against opponent action `y`; `K` is the hull of the columns `m(y)`.
    pub fn known_game(id: impl Into<String>, payoffs: &[Vec<Vec<f64>>], target: TargetSet) -> Result<Self> {
        let opponent = payoffs.first().map_or(0, Vec::len);
        if opponent == 0 || payoffs.iter().any(|row| row.len() != opponent) {
            return Err(Error::InvalidInput("known game needs a rectangular payoff table".into()));
        }
        let vertices = (0..opponent)
            .map(|y| {
                let columns: Vec<Vec<f64>> = payoffs.iter().map(|row| row[y].clone()).collect();
                PayoffMatrix::from_columns(&columns)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::custom(id, vertices, target)
    }

    pub fn d(&self) -> usize {
        self.body.d()
    }

    pub fn actions(&self) -> usize {
        self.body.actions()
    }

    pub fn k_max(&self) -> f64 {
        self.body.norm_bound()
    }

    /// The natural `x⋆` response of the scenario.
    pub fn default_response(&self) -> ResponseFunction {
        if let Some(problem) = &self.constraint {
            return ResponseFunction::ConstrainedXStar(problem.clone());
        }
        match self.example {
            Some(Example::One) => ResponseFunction::Example1XStar,
            Some(Example::Two) => ResponseFunction::Example2XStar,
            None => ResponseFunction::XStar {
                target: self.target.clone(),
            },
        }
    }

    /// Parameters of `m`, when `K` is parameterized.
    pub fn locate(&self, m: &PayoffMatrix) -> Vec<f64> {
        self.param.as_ref().map_or_else(Vec::new, |p| p.locate(m))
    }

    /// The parameter point `p` as a payoff matrix.
    pub fn point(&self, p: &[f64]) -> Result<PayoffMatrix> {
        let param = self
            .param
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("scenario `{}` has no parameterization", self.id)))?;
        if p.len() != param.dim() {
            return Err(Error::DimensionMismatch {
                what: "parameter point",
                expected: param.dim(),
                found: p.len(),
            });
        }
        Ok(param.point(p))
    }

    /// Distance of `m` to `K` (zero inside).
    pub fn body_distance(&self, m: &PayoffMatrix) -> Result<f64> {
        match &self.param {
            Some(param) => Ok(m.distance(&param.point(&param.locate(m)))),
            None => self.body.l1_distance(m),
        }
    }

    /// Builds a named metric.
    ///
    /// Names: `phi_star`, `cav_phi_star`, `phi_xstar`, `phi_psi_oracle`,
    /// `graph_phi_xstar`, `alpha:<w₁>,<w₂>,…`, and for constrained
    /// scenarios `payoff` and `cost`.
    pub fn metric(&self, name: &str) -> Result<Metric> {
        let expansion = |phi: TargetFunction| Metric::Expansion {
            name: name.to_string(),
            phi,
            rows: None,
            target: self.target.clone(),
        };
        let needs_param = || {
            self.param
                .clone()
                .ok_or_else(|| Error::Unsupported(format!("metric `{name}` needs a parameterized K")))
        };
        if let Some(weights) = name.strip_prefix("alpha:") {
            let w = weights
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::config("metrics", format!("bad action in `{name}`: {e}")))?;
            if w.len() != self.actions() {
                return Err(Error::config("metrics", format!("`{name}` needs {} weights", self.actions())));
            }
            return Ok(expansion(TargetFunction::AlphaX {
                action: MixedAction::new(w)?,
                target: self.target.clone(),
            }));
        }
        match (name, &self.constraint) {
            ("cost", Some(problem)) => Ok(Metric::Set {
                name: name.into(),
                rows: problem.cost_rows.clone(),
                target: problem.cost_set.clone(),
            }),
            ("payoff", Some(problem)) => {
                let oracle = PhiPsiOracle::constrained(problem, needs_param()?, ORACLE_RESOLUTION)?;
                Ok(Metric::Expansion {
                    name: name.into(),
                    phi: TargetFunction::ConstrainedPhiPsi(Arc::new(oracle)),
                    rows: Some(problem.payoff_rows.clone()),
                    target: problem.payoff_target.clone(),
                })
            }
            ("cost" | "payoff", None) => Err(Error::config(
                "metrics",
                format!("`{name}` needs a constrained scenario"),
            )),
            ("phi_star", _) => Ok(expansion(TargetFunction::PhiStar {
                target: self.target.clone(),
            })),
            ("cav_phi_star", _) => match self.example {
                Some(e) => Ok(expansion(TargetFunction::CavPhiStarClosedForm(e))),
                None => Err(Error::Unsupported(format!(
                    "`{name}` is only available for the worked examples"
                ))),
            },
            ("phi_xstar", _) => match self.example {
                Some(e) => Ok(expansion(TargetFunction::PhiPsiClosedForm(e))),
                None => self.metric("phi_psi_oracle").map(|m| m.renamed(name)),
            },
            ("phi_psi_oracle", _) => {
                let param = needs_param()?;
                let budget = param.dim() + 1;
                let oracle = PhiPsiOracle::new(
                    self.default_response(),
                    self.target.clone(),
                    param,
                    budget,
                    ORACLE_RESOLUTION,
                )?;
                Ok(expansion(TargetFunction::PhiPsiOracle(Arc::new(oracle))))
            }
            ("graph_phi_xstar", _) => {
                let phi = match self.metric("phi_xstar")? {
                    Metric::Expansion { phi, .. } => phi,
                    _ => unreachable!("phi_xstar is an expansion metric"),
                };
                Ok(Metric::Graph {
                    name: name.into(),
                    phi,
                    target: self.target.clone(),
                    param: needs_param()?,
                    resolution: ORACLE_RESOLUTION,
                })
            }
            _ => Err(Error::config("metrics", format!("unknown metric `{name}`"))),
        }
    }
}

/// Sample-path constraints: payoff rows from `u`, cost rows from `c`.
///
/// Vertex `k` of `K` stacks `u_vertices[k]` over `c_vertices[k]`. Fails when
/// some vertex admits no action meeting the cost constraint.
pub fn build_constrained_scenario(
    u_vertices: &[PayoffMatrix],
    c_vertices: &[PayoffMatrix],
    cost_set: TargetSet,
    payoff_target: TargetSet,
) -> Result<Scenario> {
    if u_vertices.is_empty() || u_vertices.len() != c_vertices.len() {
        return Err(Error::InvalidInput(
            "payoff and cost vertex lists must be non-empty and of equal length".into(),
        ));
    }
    let du = u_vertices[0].d();
    let dc = c_vertices[0].d();
    let vertices = u_vertices
        .iter()
        .zip(c_vertices)
        .map(|(u, c)| {
            if u.actions() != c.actions() || u.d() != du || c.d() != dc {
                return Err(Error::InvalidInput("inconsistent payoff/cost vertex shapes".into()));
            }
            let columns: Vec<Vec<f64>> = u.columns().zip(c.columns()).map(|(a, b)| [a, b].concat()).collect();
            PayoffMatrix::from_columns(&columns)
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = ConstrainedProblem::new((0..du).collect(), (du..du + dc).collect(), payoff_target.clone(), cost_set)?;
    for v in &vertices {
        responses::respond_constrained(&problem, v)?;
    }
    let mut scenario = Scenario::custom("constrained", vertices, TargetSet::whole(du + dc)?)?;
    scenario.target = payoff_target;
    scenario.constraint = Some(problem);
    Ok(scenario)
}

/// A quantity recorded at every checkpoint.
#[derive(Debug, Clone)]
pub enum Metric {
    /// `d_p(P r̄, C_{φ(m̄)})`, with `P` the row selection (all rows if `None`).
    Expansion {
        name: String,
        phi: TargetFunction,
        rows: Option<Vec<usize>>,
        target: TargetSet,
    },
    /// `d_p(G r̄, Γ)`.
    Set {
        name: String,
        rows: Vec<usize>,
        target: TargetSet,
    },
    /// Distance of `(m̄, r̄)` to the graph of `m ↦ C_{φ(m)}`.
    Graph {
        name: String,
        phi: TargetFunction,
        target: TargetSet,
        param: Parameterization,
        resolution: usize,
    },
}

impl Metric {
    pub fn name(&self) -> &str {
        match self {
            Metric::Expansion { name, .. } | Metric::Set { name, .. } | Metric::Graph { name, .. } => name,
        }
    }

    fn renamed(mut self, new: &str) -> Self {
        match &mut self {
            Metric::Expansion { name, .. } | Metric::Set { name, .. } | Metric::Graph { name, .. } => {
                *name = new.to_string()
            }
        }
        self
    }

    pub fn eval(&self, m_bar: &PayoffMatrix, r_bar: &[f64]) -> Result<f64> {
        let select = |rows: &[usize]| rows.iter().map(|&i| r_bar[i]).collect::<Vec<f64>>();
        match self {
            Metric::Expansion { phi, rows, target, .. } => {
                let r = rows.as_deref().map_or_else(|| r_bar.to_vec(), select);
                target.distance_to_expansion(&r, phi.eval(m_bar)?.max(0.0))
            }
            Metric::Set { rows, target, .. } => target.distance(&select(rows)),
            Metric::Graph {
                phi,
                target,
                param,
                resolution,
                ..
            } => graph_distance(m_bar, r_bar, &|m| phi.eval(m), target, param, *resolution),
        }
    }
}

/// When a periodic schedule advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodUnit {
    /// Every `n` rounds.
    Rounds(usize),
    /// At every block boundary of the block strategy (lengths 1, 2, 3, …).
    Blocks,
}

/// What the opponent may look at before choosing `m_t`.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryView<'a> {
    /// The round about to be played, from 1.
    pub t: usize,
    /// `Σ_{s<t} x_s⊙m_s`.
    pub played_sum: &'a [f64],
    pub last_action: Option<&'a MixedAction>,
}

impl AdversaryView<'_> {
    /// `r̄_{t−1}`, or `None` before the first round.
    pub fn r_bar(&self) -> Option<Vec<f64>> {
        (self.t > 1).then(|| self.played_sum.iter().map(|v| v / (self.t - 1) as f64).collect())
    }
}

pub type Script = Arc<dyn Fn(&AdversaryView) -> PayoffMatrix + Send + Sync>;

/// Opponent behaviour; immutable, instantiated per run with a seed.
#[derive(Clone)]
pub enum AdversaryKind {
    Constant(PayoffMatrix),
    Periodic {
        schedule: Vec<PayoffMatrix>,
        unit: PeriodUnit,
    },
    /// Plays `stay` until `‖r̄ − anchor‖∞ ≤ ε`, then `switch` for as many
    /// rounds as elapsed so far, then halves `ε` and repeats.
    Switching {
        eps0: f64,
        anchor: Vec<f64>,
        stay: PayoffMatrix,
        switch: PayoffMatrix,
    },
    /// Independent draws of `vertices[i]` with probability `weights[i]`.
    RandomIid {
        vertices: Vec<PayoffMatrix>,
        weights: Vec<f64>,
    },
    Custom { name: String, script: Script },
}

impl std::fmt::Debug for AdversaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

impl AdversaryKind {
    /// The switching opponent of the first example: `m†` then `m♯`, anchor `(3, 4)`.
    pub fn switching_example1(eps0: f64) -> Self {
        let (dagger, sharp) = responses::example1_vertices();
        AdversaryKind::Switching {
            eps0,
            anchor: vec![3.0, 4.0],
            stay: dagger,
            switch: sharp,
        }
    }

    /// Uniform draws over the vertices of `K`.
    pub fn uniform_vertices(body: &ConvexBody) -> Self {
        let n = body.vertices().len();
        AdversaryKind::RandomIid {
            vertices: body.vertices().to_vec(),
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn name(&self) -> String {
        match self {
            AdversaryKind::Constant(_) => "constant".into(),
            AdversaryKind::Periodic {
                schedule,
                unit: PeriodUnit::Rounds(n),
            } => format!("periodic[{}x{n}rounds]", schedule.len()),
            AdversaryKind::Periodic {
                schedule,
                unit: PeriodUnit::Blocks,
            } => format!("periodic[{}xblocks]", schedule.len()),
            AdversaryKind::Switching { eps0, .. } => format!("switching[eps0={eps0}]"),
            AdversaryKind::RandomIid { vertices, .. } => format!("random_iid[{}]", vertices.len()),
            AdversaryKind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn instantiate(&self, seed: u64) -> Result<Adversary> {
        match self {
            AdversaryKind::Periodic { schedule, unit } => {
                if schedule.is_empty() || *unit == PeriodUnit::Rounds(0) {
                    return Err(Error::InvalidInput("periodic schedule must be non-empty".into()));
                }
            }
            AdversaryKind::RandomIid { vertices, weights } => {
                if vertices.is_empty() || vertices.len() != weights.len() {
                    return Err(Error::InvalidInput("random adversary needs one weight per vertex".into()));
                }
                MixedAction::new(weights.clone())?;
            }
            AdversaryKind::Switching { eps0, .. } if !(*eps0 > 0.0) => {
                return Err(Error::InvalidInput("switching threshold must be positive".into()));
            }
            _ => {}
        }
        let eps = match self {
            AdversaryKind::Switching { eps0, .. } => *eps0,
            _ => 0.0,
        };
        Ok(Adversary {
            kind: self.clone(),
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            eps,
            switch_until: None,
            switches: Vec::new(),
        })
    }
}

/// A running opponent.
#[derive(Debug, Clone)]
pub struct Adversary {
    kind: AdversaryKind,
    rng: Xoshiro256PlusPlus,
    eps: f64,
    switch_until: Option<usize>,
    switches: Vec<usize>,
}

/// Uniform draw in `[0, 1)` from the top 53 bits.
pub fn unit_draw(rng: &mut impl Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Adversary {
    pub fn kind(&self) -> &AdversaryKind {
        &self.kind
    }

    /// Rounds at which the switching opponent changed to its second matrix.
    pub fn switch_rounds(&self) -> &[usize] {
        &self.switches
    }

    pub fn next(&mut self, view: &AdversaryView) -> PayoffMatrix {
        match &self.kind {
            AdversaryKind::Constant(m) => m.clone(),
            AdversaryKind::Periodic { schedule, unit } => {
                let phase = match unit {
                    PeriodUnit::Rounds(n) => (view.t - 1) / n,
                    PeriodUnit::Blocks => block_of_round(view.t) - 1,
                };
                schedule[phase % schedule.len()].clone()
            }
            AdversaryKind::Switching {
                anchor, stay, switch, ..
            } => {
                if let Some(until) = self.switch_until {
                    if view.t <= until {
                        return switch.clone();
                    }
                    self.switch_until = None;
                    self.eps /= 2.0;
                }
                let close = view.r_bar().is_some_and(|r| {
                    r.iter().zip(anchor).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= self.eps
                });
                if close {
                    self.switch_until = Some(2 * (view.t - 1));
                    self.switches.push(view.t);
                    switch.clone()
                } else {
                    stay.clone()
                }
            }
            AdversaryKind::RandomIid { vertices, weights } => {
                let u = unit_draw(&mut self.rng);
                let mut acc = 0.0;
                let total: f64 = weights.iter().sum();
                for (v, w) in vertices.iter().zip(weights) {
                    acc += w / total;
                    if u < acc {
                        return v.clone();
                    }
                }
                vertices[vertices.len() - 1].clone()
            }
            AdversaryKind::Custom { script, .. } => script(view),
        }
    }
}

/// The decision maker.
#[derive(Debug, Clone)]
pub enum Player {
    Block(BlockStrategy),
    Blackwell(BlackwellStrategy),
    Constant(ConstantPlay),
}

impl Player {
    pub fn strategy(&mut self) -> &mut dyn Strategy {
        match self {
            Player::Block(s) => s,
            Player::Blackwell(s) => s,
            Player::Constant(s) => s,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Player::Block(s) => s.name(),
            Player::Blackwell(s) => s.name(),
            Player::Constant(s) => s.name(),
        }
    }

    fn response(&self) -> Option<&ResponseFunction> {
        match self {
            Player::Block(s) => Some(s.response()),
            _ => None,
        }
    }

    fn delta_norm(&self) -> f64 {
        match self {
            Player::Block(s) => crate::geometry::euclidean(s.delta()),
            Player::Blackwell(s) => s.delta_norm(),
            Player::Constant(_) => 0.0,
        }
    }
}

/// `{⌈1.2^k⌉} ∩ [1, T]` together with `T`.
pub fn default_checkpoints(horizon: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 0i32;
    loop {
        let t = 1.2f64.powi(k).ceil() as usize;
        if t > horizon {
            break;
        }
        if out.last() != Some(&t) {
            out.push(t);
        }
        k += 1;
    }
    if out.last() != Some(&horizon) && horizon > 0 {
        out.push(horizon);
    }
    out
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub horizon: usize,
    pub seed: u64,
    pub checkpoints: Vec<usize>,
    pub metrics: Vec<Metric>,
    /// Check every opponent matrix against `K`.
    pub audit: bool,
    /// Keep every `x_t` and `m_t`.
    pub record_trajectory: bool,
    /// Track `‖(1/T) Σ x_t⊙m_t − (1/T) Σ Ψ(m_t)⊙m_t‖₁` (one extra response per round).
    pub no_grouping: bool,
}

impl RunOptions {
    pub fn new(horizon: usize, seed: u64) -> Self {
        RunOptions {
            horizon,
            seed,
            checkpoints: default_checkpoints(horizon),
            metrics: Vec::new(),
            audit: false,
            record_trajectory: false,
            no_grouping: false,
        }
    }
}

/// Measurements at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRow {
    pub t: usize,
    pub r_bar: Vec<f64>,
    pub m_params: Vec<f64>,
    pub distances: Vec<f64>,
    pub gap: Option<f64>,
    pub bound: Option<f64>,
    pub delta_norm: f64,
    pub no_grouping: Option<f64>,
}

/// Every `x_t` and `m_t` of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub actions: Vec<MixedAction>,
    pub matrices: Vec<PayoffMatrix>,
}

/// Last round and discrepancy norm of each completed block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSummary {
    pub n: usize,
    pub end: usize,
    pub delta_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scenario: String,
    pub strategy: String,
    pub adversary: String,
    pub seed: u64,
    pub horizon: usize,
    pub d: usize,
    pub param_dim: usize,
    pub metric_names: Vec<String>,
    pub rows: Vec<CheckpointRow>,
    pub blocks: Vec<BlockSummary>,
    pub switch_rounds: Vec<usize>,
    pub trajectory: Option<Trajectory>,
    pub wall_clock_secs: f64,
}

impl RunRecord {
    /// Values of the named metric, one per checkpoint.
    pub fn series(&self, metric: &str) -> Option<Vec<(usize, f64)>> {
        let k = self.metric_names.iter().position(|n| n == metric)?;
        Some(self.rows.iter().map(|r| (r.t, r.distances[k])).collect())
    }

    pub fn last(&self) -> Option<&CheckpointRow> {
        self.rows.last()
    }
}

/// Simulates `horizon` rounds: the opponent commits `m_t` from the past,
/// the player commits `x_t` from the past, then both observe.
pub fn run(scenario: &Scenario, player: &mut Player, adversary: &AdversaryKind, opts: &RunOptions) -> Result<RunRecord> {
    let start = Instant::now();
    let d = scenario.d();
    let actions = scenario.actions();
    if opts.checkpoints.iter().any(|&t| t == 0 || t > opts.horizon) {
        return Err(Error::InvalidInput("checkpoints must lie in [1, T]".into()));
    }
    if opts.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("checkpoints must be strictly increasing".into()));
    }
    let mut opponent = adversary.instantiate(opts.seed)?;
    let k_max = scenario.k_max();
    let psi = if opts.no_grouping { player.response().cloned() } else { None };
    let mut played_sum = vec![0.0; d];
    let mut psi_sum = vec![0.0; d];
    let mut m_sum = PayoffMatrix::zeros(d, actions);
    let mut last_action: Option<MixedAction> = None;
    let mut trajectory = opts.record_trajectory.then(Trajectory::default);
    let mut rows = Vec::with_capacity(opts.checkpoints.len());
    let mut next_checkpoint = opts.checkpoints.iter().peekable();
    for t in 1..=opts.horizon {
        let m = opponent.next(&AdversaryView {
            t,
            played_sum: &played_sum,
            last_action: last_action.as_ref(),
        });
        if m.d() != d || m.actions() != actions {
            return Err(Error::DimensionMismatch {
                what: "opponent matrix entries",
                expected: d * actions,
                found: m.entries().len(),
            });
        }
        if opts.audit {
            let distance = scenario.body_distance(&m)?;
            if distance > AUDIT_TOL {
                return Err(Error::OutsideBody { round: t, distance });
            }
        }
        let strategy = player.strategy();
        let x = strategy.act();
        strategy.observe(&m)?;
        let r = combine(&x, &m)?;
        played_sum.iter_mut().zip(&r).for_each(|(s, v)| *s += v);
        m_sum.add_scaled(&m, 1.0);
        if let Some(psi) = &psi {
            let c = combine(&psi.respond(&m)?, &m)?;
            psi_sum.iter_mut().zip(&c).for_each(|(s, v)| *s += v);
        }
        if let Some(traj) = trajectory.as_mut() {
            traj.actions.push(x.clone());
            traj.matrices.push(m.clone());
        }
        last_action = Some(x);
        if next_checkpoint.peek() == Some(&&t) {
            next_checkpoint.next();
            let tf = t as f64;
            let r_bar: Vec<f64> = played_sum.iter().map(|v| v / tf).collect();
            let m_bar = m_sum.scaled(1.0 / tf);
            let distances = opts
                .metrics
                .iter()
                .map(|metric| metric.eval(&m_bar, &r_bar))
                .collect::<Result<Vec<_>>>()?;
            let certificate = match player {
                Player::Block(s) => Some(s.certificate(t, k_max)?),
                _ => None,
            };
            let no_grouping = psi
                .as_ref()
                .map(|_| played_sum.iter().zip(&psi_sum).map(|(a, b)| (a - b).abs()).sum::<f64>() / tf);
            rows.push(CheckpointRow {
                t,
                m_params: scenario.locate(&m_bar),
                r_bar,
                distances,
                gap: certificate.as_ref().map(|c| c.gap),
                bound: certificate.as_ref().map(|c| c.bound),
                delta_norm: player.delta_norm(),
                no_grouping,
            });
        }
    }
    let blocks = match player {
        Player::Block(s) => {
            let mut end = 0;
            s.history()
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    end += b.len;
                    BlockSummary {
                        n: i + 1,
                        end,
                        delta_norm: b.delta_norm_after,
                    }
                })
                .collect()
        }
        _ => Vec::new(),
    };
    Ok(RunRecord {
        scenario: scenario.id.clone(),
        strategy: player.name(),
        adversary: adversary.name(),
        seed: opts.seed,
        horizon: opts.horizon,
        d,
        param_dim: scenario.param.as_ref().map_or(0, Parameterization::dim),
        metric_names: opts.metrics.iter().map(|m| m.name().to_string()).collect(),
        rows,
        blocks,
        switch_rounds: opponent.switch_rounds().to_vec(),
        trajectory,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// A block strategy with the scenario's default response.
pub fn block_player(scenario: &Scenario) -> Player {
    Player::Block(BlockStrategy::new(scenario.d(), scenario.actions(), scenario.default_response()))
}

/// `max` over a parameter grid of `φ⋆`; a diagnostic, not a decision procedure.
pub fn alpha_unif_estimate(scenario: &Scenario, resolution: usize) -> Result<f64> {
    let param = scenario
        .param
        .as_ref()
        .ok_or_else(|| Error::Unsupported("α_unif estimate needs a parameterized K".into()))?;
    crate::targets::alpha_unif_estimate(param, &scenario.target, resolution)
}
