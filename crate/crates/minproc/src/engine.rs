//! The run loop and the seven scheduler models.
//!
//! | model | step shape                         | who chooses            |
//! |-------|------------------------------------|------------------------|
//! | A     | one switchable node                | adversarial policy     |
//! | B     | one switchable node                | benevolent policy      |
//! | C     | independent set of switchable nodes| benevolent policy      |
//! | D     | any set of switchable nodes        | benevolent policy      |
//! | E     | all switchable nodes               | nobody (synchronous)   |
//! | F     | one node, uniformly at random      | seeded RNG             |
//! | G     | each node independently with `p`   | seeded RNG             |
//!
//! Models A–D take a [`Policy`]. The engine ships the deterministic
//! [`PolicyKind`]s; callers can inject their own through
//! [`run_with_policy`]. Nothing here searches for optimal schedules.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, ReplayError};
use crate::graph::{Color, Graph, NodeId};
use crate::state::{check_shape, validate_step, DynamicState};

/// Scheduler model letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Sequential, adversarial choice.
    A,
    /// Sequential, benevolent choice.
    B,
    /// Independent set, benevolent choice.
    C,
    /// Arbitrary set, benevolent choice.
    D,
    /// Synchronous: every switchable node switches.
    E,
    /// Sequential, uniformly random.
    F,
    /// Every switchable node independently with probability `p`.
    G,
}

impl Model {
    /// All models in order.
    pub const ALL: [Model; 7] = [
        Model::A,
        Model::B,
        Model::C,
        Model::D,
        Model::E,
        Model::F,
        Model::G,
    ];

    /// The model's letter.
    pub fn letter(self) -> char {
        match self {
            Model::A => 'A',
            Model::B => 'B',
            Model::C => 'C',
            Model::D => 'D',
            Model::E => 'E',
            Model::F => 'F',
            Model::G => 'G',
        }
    }

    /// Parses a model letter (case-insensitive).
    pub fn from_letter(c: char) -> Option<Model> {
        Model::ALL
            .into_iter()
            .find(|m| m.letter() == c.to_ascii_uppercase())
    }

    /// Whether every step switches exactly one node.
    pub fn is_sequential(self) -> bool {
        matches!(self, Model::A | Model::B | Model::F)
    }

    /// Whether the process under this model may fail to stabilize.
    pub fn may_cycle(self) -> bool {
        matches!(self, Model::D | Model::E | Model::G)
    }
}

/// Built-in node-choice policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyKind {
    /// The switchable node with the smallest id.
    LowestId,
    /// The switchable node with the largest id.
    HighestId,
    /// A uniformly random switchable node from a seeded stream.
    SeededUniform(u64),
    /// A greedy maximal independent set of switchable nodes, by id.
    MaximalIndependent,
    /// Every switchable node.
    AllSwitchable,
}

impl PolicyKind {
    /// Instantiates the policy for a graph with `n` nodes.
    pub fn instantiate(self, n: usize) -> Box<dyn Policy> {
        match self {
            PolicyKind::LowestId => Box::new(LowestId),
            PolicyKind::HighestId => Box::new(HighestId),
            PolicyKind::SeededUniform(seed) => Box::new(SeededUniform::new(seed)),
            PolicyKind::MaximalIndependent => Box::new(MaximalIndependent::new(n)),
            PolicyKind::AllSwitchable => Box::new(AllSwitchable),
        }
    }
}

/// A scheduler model with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleModel {
    /// Model letter.
    pub model: Model,
    /// Node-choice policy (models A–D).
    pub policy: Option<PolicyKind>,
    /// Switch probability (model G).
    pub p: Option<f64>,
    /// RNG seed (models F and G).
    pub seed: Option<u64>,
}

impl ScheduleModel {
    /// Model A with the given policy.
    pub fn adversarial(policy: PolicyKind) -> Self {
        Self::with_policy(Model::A, policy)
    }

    /// Model B with the given policy.
    pub fn benevolent(policy: PolicyKind) -> Self {
        Self::with_policy(Model::B, policy)
    }

    /// Model C with the given policy.
    pub fn independent(policy: PolicyKind) -> Self {
        Self::with_policy(Model::C, policy)
    }

    /// Model D with the given policy.
    pub fn free(policy: PolicyKind) -> Self {
        Self::with_policy(Model::D, policy)
    }

    /// Model E.
    pub fn synchronous() -> Self {
        ScheduleModel {
            model: Model::E,
            policy: None,
            p: None,
            seed: None,
        }
    }

    /// Model F with a seed.
    pub fn sequential_random(seed: u64) -> Self {
        ScheduleModel {
            model: Model::F,
            policy: None,
            p: None,
            seed: Some(seed),
        }
    }

    /// Model G with probability `p` and a seed.
    pub fn concurrent_random(p: f64, seed: u64) -> Self {
        ScheduleModel {
            model: Model::G,
            policy: None,
            p: Some(p),
            seed: Some(seed),
        }
    }

    fn with_policy(model: Model, policy: PolicyKind) -> Self {
        ScheduleModel {
            model,
            policy: Some(policy),
            p: None,
            seed: None,
        }
    }

    /// The default configuration of a model: lowest-id choice for A and B,
    /// maximal-set choice for C and D, and `p = 1/2` for G.
    pub fn default_for(model: Model, seed: u64) -> Self {
        match model {
            Model::A => Self::adversarial(PolicyKind::LowestId),
            Model::B => Self::benevolent(PolicyKind::LowestId),
            Model::C => Self::independent(PolicyKind::MaximalIndependent),
            Model::D => Self::free(PolicyKind::AllSwitchable),
            Model::E => Self::synchronous(),
            Model::F => Self::sequential_random(seed),
            Model::G => Self::concurrent_random(0.5, seed),
        }
    }

    /// Checks that the parameters present match the model.
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: &str| Err(EngineError::BadModel(format!("model {}: {msg}", self.model.letter())));
        let wants_policy = matches!(self.model, Model::A | Model::B | Model::C | Model::D);
        if wants_policy != self.policy.is_some() {
            return bad(if wants_policy { "policy required" } else { "policy not allowed" });
        }
        if (self.model == Model::G) != self.p.is_some() {
            return bad("probability p is required for G and only for G");
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p <= 1.0) {
                return bad("p must lie in (0, 1]");
            }
        }
        if matches!(self.model, Model::F | Model::G) != self.seed.is_some() {
            return bad("seed is required for F and G and only for them");
        }
        Ok(())
    }
}

/// Bounds on a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLimits {
    /// Maximum number of steps.
    pub max_steps: u64,
    /// Whether repeated states are detected (models D, E, G).
    pub cycle_detection: bool,
    /// How many previous states are remembered for cycle detection.
    pub state_fingerprint_window: usize,
    /// Whether every step is stored in the trace.
    pub record_steps: bool,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits {
            max_steps: 1_000_000_000,
            cycle_detection: true,
            state_fingerprint_window: 2,
            record_steps: false,
        }
    }
}

impl RunLimits {
    /// Default limits that also record every step.
    pub fn recording() -> Self {
        RunLimits {
            record_steps: true,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.max_steps == 0 {
            return Err(EngineError::BadLimits("max_steps must be at least 1".into()));
        }
        if self.cycle_detection && self.state_fingerprint_window == 0 {
            return Err(EngineError::BadLimits(
                "cycle detection needs a window of at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Outcome {
    /// No node is switchable.
    Stable,
    /// The step budget ran out.
    StepLimit,
    /// A state repeated after `period` steps.
    Cycle {
        /// Distance between the two equal states.
        period: u64,
    },
    /// A replayed schedule ended before the state became stable.
    Unfinished,
}

/// Flat storage of a sequence of steps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepLog {
    offsets: Vec<u64>,
    nodes: Vec<NodeId>,
}

impl StepLog {
    /// An empty log.
    pub fn new() -> Self {
        StepLog {
            offsets: vec![0],
            nodes: Vec::new(),
        }
    }

    /// Appends a step.
    pub fn push(&mut self, step: &[NodeId]) {
        if self.offsets.is_empty() {
            self.offsets.push(0);
        }
        self.nodes.extend_from_slice(step);
        self.offsets.push(self.nodes.len() as u64);
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    /// Whether the log has no steps.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th step.
    pub fn get(&self, i: usize) -> &[NodeId] {
        &self.nodes[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Iterates over the steps.
    pub fn iter(&self) -> impl Iterator<Item = &[NodeId]> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// All switched nodes in order, step boundaries dropped.
    pub fn switches(&self) -> &[NodeId] {
        &self.nodes
    }
}

/// The record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Model the run used.
    pub model: Model,
    /// How the run ended.
    pub outcome: Outcome,
    /// Number of steps taken.
    pub step_count: u64,
    /// Number of node switches (equals `step_count` for sequential models).
    pub switch_count: u64,
    /// Switched nodes whose minority color was a tie.
    pub ties: u64,
    /// The steps, when recording was requested.
    pub steps: Option<StepLog>,
}

/// A finished run: its trace and final state.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Trace of the run.
    pub trace: Trace,
    /// State after the last step.
    pub state: DynamicState,
}

/// The set of currently switchable nodes.
///
/// Membership is O(1); a uniformly random member is O(1); smallest and
/// largest members are maintained with lazily cleaned heaps when the
/// policy asks for them.
#[derive(Debug, Clone)]
pub struct Frontier {
    dense: Vec<NodeId>,
    pos: Vec<u32>,
    min_heap: Option<BinaryHeap<Reverse<NodeId>>>,
    max_heap: Option<BinaryHeap<NodeId>>,
}

const ABSENT: u32 = u32::MAX;

impl Frontier {
    fn new(n: usize, ordered: bool) -> Self {
        Frontier {
            dense: Vec::new(),
            pos: vec![ABSENT; n],
            min_heap: ordered.then(BinaryHeap::new),
            max_heap: ordered.then(BinaryHeap::new),
        }
    }

    /// Number of switchable nodes.
    pub fn len(&self) -> usize {
        self.dense.len()
    }

    /// Whether no node is switchable.
    pub fn is_empty(&self) -> bool {
        self.dense.is_empty()
    }

    /// Whether `v` is switchable.
    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.pos[v as usize] != ABSENT
    }

    /// Members in unspecified (but deterministic) order.
    pub fn as_slice(&self) -> &[NodeId] {
        &self.dense
    }

    /// Members in increasing order.
    pub fn sorted(&self) -> Vec<NodeId> {
        let mut v = self.dense.clone();
        v.sort_unstable();
        v
    }

    /// The smallest member.
    pub fn min(&mut self) -> Option<NodeId> {
        if self.min_heap.is_none() {
            return self.dense.iter().copied().min();
        }
        let heap = self.min_heap.as_mut().unwrap();
        while let Some(&Reverse(v)) = heap.peek() {
            if self.pos[v as usize] != ABSENT {
                return Some(v);
            }
            heap.pop();
        }
        None
    }

    /// The largest member.
    pub fn max(&mut self) -> Option<NodeId> {
        if self.max_heap.is_none() {
            return self.dense.iter().copied().max();
        }
        let heap = self.max_heap.as_mut().unwrap();
        while let Some(&v) = heap.peek() {
            if self.pos[v as usize] != ABSENT {
                return Some(v);
            }
            heap.pop();
        }
        None
    }

    #[inline]
    fn set(&mut self, v: NodeId, member: bool) {
        let present = self.contains(v);
        if member && !present {
            self.pos[v as usize] = self.dense.len() as u32;
            self.dense.push(v);
            if let (Some(lo), Some(hi)) = (&mut self.min_heap, &mut self.max_heap) {
                lo.push(Reverse(v));
                hi.push(v);
                if lo.len() > 4 * self.dense.len() + 1024 {
                    *lo = self.dense.iter().map(|&u| Reverse(u)).collect();
                    *hi = self.dense.iter().copied().collect();
                }
            }
        } else if !member && present {
            let i = self.pos[v as usize] as usize;
            let last = *self.dense.last().unwrap();
            self.dense.swap_remove(i);
            if last != v {
                self.pos[last as usize] = i as u32;
            }
            self.pos[v as usize] = ABSENT;
        }
    }
}

/// Chooses the next step from the switchable set.
pub trait Policy {
    /// Writes the chosen nodes into `out` (which arrives empty).
    fn select(&mut self, g: &Graph, s: &DynamicState, frontier: &mut Frontier, out: &mut Vec<NodeId>);

    /// Whether the policy needs ordered access (`min`/`max`) to the frontier.
    fn needs_order(&self) -> bool {
        false
    }
}

/// Picks the smallest switchable id.
#[derive(Debug, Clone, Copy, Default)]
pub struct LowestId;

impl Policy for LowestId {
    fn select(&mut self, _: &Graph, _: &DynamicState, f: &mut Frontier, out: &mut Vec<NodeId>) {
        out.extend(f.min());
    }

    fn needs_order(&self) -> bool {
        true
    }
}

/// Picks the largest switchable id.
#[derive(Debug, Clone, Copy, Default)]
pub struct HighestId;

impl Policy for HighestId {
    fn select(&mut self, _: &Graph, _: &DynamicState, f: &mut Frontier, out: &mut Vec<NodeId>) {
        out.extend(f.max());
    }

    fn needs_order(&self) -> bool {
        true
    }
}

/// Picks a uniformly random switchable node.
#[derive(Debug, Clone)]
pub struct SeededUniform {
    rng: ChaCha8Rng,
}

impl SeededUniform {
    /// A policy drawing from a ChaCha8 stream seeded with `seed`.
    pub fn new(seed: u64) -> Self {
        SeededUniform {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for SeededUniform {
    fn select(&mut self, _: &Graph, _: &DynamicState, f: &mut Frontier, out: &mut Vec<NodeId>) {
        if !f.is_empty() {
            let i = self.rng.gen_range(0..f.len());
            out.push(f.as_slice()[i]);
        }
    }
}

/// Greedy maximal independent subset of the switchable set, by increasing id.
#[derive(Debug, Clone)]
pub struct MaximalIndependent {
    taken: Vec<bool>,
}

impl MaximalIndependent {
    /// A policy for graphs with `n` nodes.
    pub fn new(n: usize) -> Self {
        MaximalIndependent {
            taken: vec![false; n],
        }
    }
}

impl Policy for MaximalIndependent {
    fn select(&mut self, g: &Graph, _: &DynamicState, f: &mut Frontier, out: &mut Vec<NodeId>) {
        if self.taken.len() < g.node_count() {
            self.taken.resize(g.node_count(), false);
        }
        for v in f.sorted() {
            if g.neighbors(v).iter().all(|&u| !self.taken[u as usize]) {
                self.taken[v as usize] = true;
                out.push(v);
            }
        }
        for &v in out.iter() {
            self.taken[v as usize] = false;
        }
    }
}

/// Every switchable node.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllSwitchable;

impl Policy for AllSwitchable {
    fn select(&mut self, _: &Graph, _: &DynamicState, f: &mut Frontier, out: &mut Vec<NodeId>) {
        out.extend(f.sorted());
    }
}

/// Each switchable node independently with probability `p`; redrawn until
/// the draw is non-empty.
#[derive(Debug, Clone)]
struct Bernoulli {
    p: f64,
    rng: ChaCha8Rng,
}

impl Policy for Bernoulli {
    fn select(&mut self, _: &Graph, _: &DynamicState, f: &mut Frontier, out: &mut Vec<NodeId>) {
        if f.is_empty() {
            return;
        }
        let members = f.sorted();
        while out.is_empty() {
            for &v in &members {
                if self.p >= 1.0 || self.rng.gen_bool(self.p) {
                    out.push(v);
                }
            }
        }
    }
}

/// One applied step, as seen by an [`Observer`].
pub struct StepEvent<'a> {
    /// Zero-based step index.
    pub index: u64,
    /// The switched nodes, sorted.
    pub step: &'a [NodeId],
    /// Colors of the switched nodes before the step.
    pub old_colors: &'a [Color],
    /// The switchable set before the step, sorted (only when requested).
    pub before: &'a [NodeId],
    /// The switchable set after the step.
    pub after: &'a Frontier,
    /// The state after the step.
    pub state: &'a DynamicState,
    /// The graph.
    pub graph: &'a Graph,
    /// Ties among the switched nodes.
    pub ties: u32,
}

/// Hook called around every step of a run; used by the audit suites.
pub trait Observer {
    /// Whether [`StepEvent::before`] should be filled in.
    fn wants_frontier(&self) -> bool {
        false
    }

    /// Called once with the initial state and its sorted switchable set.
    fn on_start(&mut self, _g: &Graph, _s: &DynamicState, _frontier: &[NodeId]) {}

    /// Called after each step.
    fn on_step(&mut self, event: &StepEvent<'_>);
}

struct NoObserver;

impl Observer for NoObserver {
    fn on_step(&mut self, _: &StepEvent<'_>) {}
}

/// Runs the process from `s0` under `model` until it stabilizes, hits the step
/// limit, or (models D, E, G) revisits a recent state.
pub fn run(
    g: &Graph,
    s0: DynamicState,
    model: &ScheduleModel,
    limits: &RunLimits,
) -> Result<RunResult, EngineError> {
    run_observed(g, s0, model, limits, &mut NoObserver)
}

/// Like [`run`], calling `observer` after every step.
pub fn run_observed(
    g: &Graph,
    s0: DynamicState,
    model: &ScheduleModel,
    limits: &RunLimits,
    observer: &mut dyn Observer,
) -> Result<RunResult, EngineError> {
    model.validate()?;
    let mut policy: Box<dyn Policy> = match model.model {
        Model::A | Model::B | Model::C | Model::D => {
            model.policy.expect("validated").instantiate(g.node_count())
        }
        Model::E => Box::new(AllSwitchable),
        Model::F => Box::new(SeededUniform::new(model.seed.expect("validated"))),
        Model::G => Box::new(Bernoulli {
            p: model.p.expect("validated"),
            rng: ChaCha8Rng::seed_from_u64(model.seed.expect("validated")),
        }),
    };
    run_with_policy(g, s0, model.model, policy.as_mut(), limits, observer)
}

/// Runs the process with an injected policy; the step shape of `model` is
/// enforced on every step the policy returns.
pub fn run_with_policy(
    g: &Graph,
    s0: DynamicState,
    model: Model,
    policy: &mut dyn Policy,
    limits: &RunLimits,
    observer: &mut dyn Observer,
) -> Result<RunResult, EngineError> {
    limits.validate()?;
    let n = g.node_count();
    let mut state = s0;
    let mut frontier = Frontier::new(n, policy.needs_order());
    for v in 0..n as NodeId {
        if state.switchable_unchecked(g, v) {
            frontier.set(v, true);
        }
    }
    let detect = limits.cycle_detection && model.may_cycle();
    let mut fingerprint = if detect { zobrist_state(&state) } else { 0 };
    // Fingerprints of the most recent states, newest first.
    let mut history: VecDeque<u64> = VecDeque::new();
    if detect {
        history.push_front(fingerprint);
    }
    let want_before = observer.wants_frontier();
    observer.on_start(g, &state, &frontier.sorted());

    let mut trace = Trace {
        model,
        outcome: Outcome::Stable,
        step_count: 0,
        switch_count: 0,
        ties: 0,
        steps: limits.record_steps.then(StepLog::new),
    };
    let mut step: Vec<NodeId> = Vec::new();
    let mut old_colors: Vec<Color> = Vec::new();
    let mut before: Vec<NodeId> = Vec::new();
    let shape_checked = !matches!(model, Model::E);

    loop {
        if frontier.is_empty() {
            trace.outcome = Outcome::Stable;
            break;
        }
        if trace.step_count >= limits.max_steps {
            trace.outcome = Outcome::StepLimit;
            break;
        }
        let index = trace.step_count;
        step.clear();
        policy.select(g, &state, &mut frontier, &mut step);
        if step.is_empty() {
            return Err(EngineError::EmptyStep(index));
        }
        if step.len() > 1 {
            step.sort_unstable();
        }
        // Validation: membership in the frontier is exactly switchability.
        if let Some(&bad) = step.iter().find(|&&v| (v as usize) >= n || !frontier.contains(v)) {
            let source = if (bad as usize) >= n {
                crate::error::GraphError::NodeOutOfRange { node: bad, node_count: n }.into()
            } else {
                crate::error::StepError::NotSwitchable(bad)
            };
            return Err(EngineError::InvalidStep { index, source });
        }
        if shape_checked {
            if let Some(w) = step.windows(2).find(|w| w[0] == w[1]) {
                return Err(EngineError::InvalidStep {
                    index,
                    source: crate::error::StepError::Repeated(w[0]),
                });
            }
            check_shape(g, &step, model).map_err(|source| EngineError::InvalidStep { index, source })?;
        }
        if want_before {
            before.clear();
            before.extend(frontier.sorted());
        }
        old_colors.clear();
        old_colors.extend(step.iter().map(|&v| state.color(v)));

        let report = state.apply_unchecked(g, &step);
        for &v in &step {
            frontier.set(v, state.switchable_unchecked(g, v));
            for &u in g.neighbors(v) {
                frontier.set(u, state.switchable_unchecked(g, u));
            }
        }
        trace.step_count += 1;
        trace.switch_count += step.len() as u64;
        trace.ties += report.ties as u64;
        if let Some(log) = &mut trace.steps {
            log.push(&step);
        }
        observer.on_step(&StepEvent {
            index,
            step: &step,
            old_colors: &old_colors,
            before: &before,
            after: &frontier,
            state: &state,
            graph: g,
            ties: report.ties,
        });

        if detect {
            for (&v, &old) in step.iter().zip(&old_colors) {
                fingerprint ^= zobrist(v, old) ^ zobrist(v, state.color(v));
            }
            if let Some(d) = history.iter().position(|&h| h == fingerprint) {
                trace.outcome = Outcome::Cycle { period: d as u64 + 1 };
                break;
            }
            history.push_front(fingerprint);
            history.truncate(limits.state_fingerprint_window);
        }
    }
    Ok(RunResult { trace, state })
}

/// Replays a schedule with full validation of every step.
///
/// The outcome is `Stable` if the final state is stable and `Unfinished`
/// otherwise.
pub fn replay_schedule<'a, I>(
    g: &Graph,
    s0: DynamicState,
    schedule: I,
    model: Option<Model>,
) -> Result<RunResult, ReplayError>
where
    I: IntoIterator<Item = &'a [NodeId]>,
{
    let mut state = s0;
    let mut trace = Trace {
        model: model.unwrap_or(Model::D),
        outcome: Outcome::Stable,
        step_count: 0,
        switch_count: 0,
        ties: 0,
        steps: Some(StepLog::new()),
    };
    for (index, step) in schedule.into_iter().enumerate() {
        validate_step(g, &state, step, model).map_err(|source| ReplayError { index, source })?;
        let report = state.apply_unchecked(g, step);
        let mut sorted = step.to_vec();
        sorted.sort_unstable();
        trace.steps.as_mut().unwrap().push(&sorted);
        trace.step_count += 1;
        trace.switch_count += step.len() as u64;
        trace.ties += report.ties as u64;
    }
    let stable = (0..g.node_count() as NodeId).all(|v| !state.switchable_unchecked(g, v));
    trace.outcome = if stable { Outcome::Stable } else { Outcome::Unfinished };
    Ok(RunResult { trace, state })
}

/// Per-(node, color) key of the state fingerprint.
#[inline]
fn zobrist(v: NodeId, c: Color) -> u64 {
    splitmix64(((v as u64) << 8) | c as u64)
}

fn zobrist_state(s: &DynamicState) -> u64 {
    s.colors()
        .iter()
        .enumerate()
        .fold(0, |h, (v, &c)| h ^ zobrist(v as NodeId, c))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
