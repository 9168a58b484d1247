//! Invariant audits over full runs.
//!
//! [`InvariantObserver`] checks, after every step of a run,
//!
//! * `ties`: no switched node or neighbor of one has a tied minority color
//!   (balance 0 in two-color mode);
//! * `independence`: the switchable set before the step is independent;
//! * `monotonicity`: no switch removed another node from the switchable set;
//! * `group_coherence`: twins (nodes with the same color, neighbors and
//!   fixed attachments in the initial graph) agree in color whenever none of
//!   them is switchable;
//! * `pinned`: pinned nodes never switch;
//! * `parity`: every balance keeps its initial parity;
//! * `balance_cache`: cached balances of touched nodes equal a recount.
//!
//! The suites of [`audit`] select which of these are reported, and add two
//! whole-run comparisons: `confluence` (every node-choice policy gives the
//! same number of switches) and `equivalence` (the graph with materialized
//! fixed sets switches the same nodes in the same order).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::{run, run_observed, Observer, Outcome, PolicyKind, RunLimits, ScheduleModel, StepEvent};
use crate::error::{BuildError, EngineError};
use crate::gadgets::materialize_fixed_nodes;
use crate::graph::{Attachments, Color, Graph, NodeId};
use crate::state::DynamicState;

/// Number of seeded-uniform policies in the confluence suite.
pub const CONFLUENCE_SEEDS: u64 = 20;

/// A selection of audit checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Balance cache and parity.
    Balances,
    /// Independence of the switchable set.
    Independence,
    /// Tie-freeness.
    Ties,
    /// Monotone enablement, group coherence and pinned nodes.
    Monotonicity,
    /// Same switch count under every policy.
    Confluence,
    /// Same switches on the materialized graph.
    Equivalence,
    /// Everything.
    All,
}

impl Suite {
    /// All suites, `All` last.
    pub const ALL: [Suite; 7] = [
        Suite::Balances,
        Suite::Independence,
        Suite::Ties,
        Suite::Monotonicity,
        Suite::Confluence,
        Suite::Equivalence,
        Suite::All,
    ];

    /// Snake-case name.
    pub fn name(self) -> &'static str {
        match self {
            Suite::Balances => "balances",
            Suite::Independence => "independence",
            Suite::Ties => "ties",
            Suite::Monotonicity => "monotonicity",
            Suite::Confluence => "confluence",
            Suite::Equivalence => "equivalence",
            Suite::All => "all",
        }
    }

    fn step_checks(self) -> &'static [&'static str] {
        match self {
            Suite::Balances => &["balance_cache", "parity"],
            Suite::Independence => &["independence"],
            Suite::Ties => &["ties"],
            Suite::Monotonicity => &["monotonicity", "group_coherence", "pinned"],
            Suite::Confluence | Suite::Equivalence => &[],
            Suite::All => &STEP_CHECKS,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

const STEP_CHECKS: [&str; 7] = [
    "ties",
    "independence",
    "monotonicity",
    "group_coherence",
    "pinned",
    "parity",
    "balance_cache",
];

/// The first state at which a check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Number of steps applied before the offending state (0 = initial).
    pub state_index: u64,
    /// Nodes involved.
    pub nodes: Vec<NodeId>,
    /// What went wrong.
    pub detail: String,
}

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    /// Check name.
    pub name: String,
    /// Whether no violation was found.
    pub passed: bool,
    /// Number of violations.
    pub violations: u64,
    /// The first violation.
    pub counterexample: Option<Counterexample>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check {
            name: name.to_string(),
            passed: true,
            violations: 0,
            counterexample: None,
        }
    }

    fn fail(&mut self, state_index: u64, nodes: Vec<NodeId>, detail: impl Into<String>) {
        self.passed = false;
        self.violations += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(Counterexample {
                state_index,
                nodes,
                detail: detail.into(),
            });
        }
    }
}

/// Outcome of an audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    /// The suite that ran.
    pub suite: Suite,
    /// Outcome of the audited run.
    pub outcome: Outcome,
    /// Steps of the audited run.
    pub step_count: u64,
    /// Switches of the audited run.
    pub switch_count: u64,
    /// Tie occurrences.
    pub ties: u64,
    /// Independence violations.
    pub independence_violations: u64,
    /// Monotonicity violations.
    pub monotonicity_violations: u64,
    /// Every reported check.
    pub checks: Vec<Check>,
}

impl AuditReport {
    /// Whether every check passed and the run stabilized.
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Stable && self.checks.iter().all(|c| c.passed)
    }

    /// The first failed check.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// The check called `name`.
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Classes of at least two nodes with equal color, neighbors and fixed
/// attachments. Such nodes have equal balances as long as they agree in
/// color, so they act as one group.
pub fn twin_classes(g: &Graph) -> Vec<Vec<NodeId>> {
    let mut classes: HashMap<(Color, Attachments, &[NodeId]), Vec<NodeId>> = HashMap::new();
    for v in 0..g.node_count() as NodeId {
        if g.is_pinned(v) {
            continue;
        }
        classes
            .entry((g.init_color(v), g.attachments(v), g.neighbors(v)))
            .or_default()
            .push(v);
    }
    let mut out: Vec<Vec<NodeId>> = classes.into_values().filter(|c| c.len() > 1).collect();
    out.sort_unstable();
    out
}

/// Observer that checks the per-step invariants.
pub struct InvariantObserver {
    checks: Vec<Check>,
    parity: Vec<u8>,
    class_of: Vec<u32>,
    classes: Vec<Vec<NodeId>>,
    touched: Vec<NodeId>,
    mark: Vec<bool>,
}

const NO_CLASS: u32 = u32::MAX;

impl InvariantObserver {
    /// An observer for `g` checking the twin classes `classes`.
    pub fn new(g: &Graph, classes: Vec<Vec<NodeId>>) -> Self {
        let mut class_of = vec![NO_CLASS; g.node_count()];
        for (i, c) in classes.iter().enumerate() {
            for &v in c {
                class_of[v as usize] = i as u32;
            }
        }
        InvariantObserver {
            checks: STEP_CHECKS.iter().map(|n| Check::new(n)).collect(),
            parity: Vec::new(),
            class_of,
            classes,
            touched: Vec::new(),
            mark: vec![false; g.node_count()],
        }
    }

    fn check_mut(&mut self, name: &str) -> &mut Check {
        self.checks.iter_mut().find(|c| c.name == name).expect("known check")
    }

    /// The per-step checks, in a fixed order.
    pub fn into_checks(self) -> Vec<Check> {
        self.checks
    }
}

fn tie_at(g: &Graph, s: &DynamicState, v: NodeId) -> bool {
    if s.is_two_color() {
        s.balance(g, v) == Ok(0)
    } else {
        s.minority_color(g, v).is_ok_and(|(_, tie)| tie)
    }
}

impl Observer for InvariantObserver {
    fn wants_frontier(&self) -> bool {
        true
    }

    fn on_start(&mut self, g: &Graph, s: &DynamicState, frontier: &[NodeId]) {
        if s.is_two_color() {
            self.parity = (0..g.node_count() as NodeId)
                .map(|v| (s.balance(g, v).unwrap_or(0).rem_euclid(2)) as u8)
                .collect();
        }
        let ties: Vec<NodeId> = (0..g.node_count() as NodeId)
            .filter(|&v| !g.is_pinned(v) && tie_at(g, s, v))
            .collect();
        if !ties.is_empty() {
            self.check_mut("ties").fail(0, ties, "tied minority color in the initial state");
        }
        if let Some((u, v)) = adjacent_pair(g, frontier) {
            self.check_mut("independence")
                .fail(0, vec![u, v], "adjacent switchable nodes in the initial state");
        }
    }

    fn on_step(&mut self, e: &StepEvent<'_>) {
        let g = e.graph;
        let s = e.state;
        let at = e.index + 1;

        self.touched.clear();
        for &v in e.step {
            for u in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
                if !self.mark[u as usize] {
                    self.mark[u as usize] = true;
                    self.touched.push(u);
                }
            }
        }
        let touched = std::mem::take(&mut self.touched);
        for &u in &touched {
            self.mark[u as usize] = false;
        }

        if e.ties > 0 {
            self.check_mut("ties")
                .fail(at, e.step.to_vec(), format!("{} switched nodes had a tied minority color", e.ties));
        }
        let tied: Vec<NodeId> = touched.iter().copied().filter(|&u| !g.is_pinned(u) && tie_at(g, s, u)).collect();
        if !tied.is_empty() {
            self.check_mut("ties").fail(at, tied, "tied minority color");
        }

        if let Some((u, v)) = adjacent_pair(g, e.before) {
            self.check_mut("independence")
                .fail(e.index, vec![u, v], "adjacent switchable nodes");
        }

        let lost: Vec<NodeId> = e
            .before
            .iter()
            .copied()
            .filter(|v| e.step.binary_search(v).is_err() && !e.after.contains(*v))
            .collect();
        if !lost.is_empty() {
            self.check_mut("monotonicity")
                .fail(at, lost, "a switch made these nodes unswitchable");
        }

        for &v in e.step {
            let c = self.class_of[v as usize];
            if c == NO_CLASS {
                continue;
            }
            let members = &self.classes[c as usize];
            if members.iter().any(|&u| e.after.contains(u)) {
                continue;
            }
            let color = s.color(members[0]);
            if members.iter().any(|&u| s.color(u) != color) {
                let nodes = members.clone();
                self.check_mut("group_coherence")
                    .fail(at, nodes, "group members settled on different colors");
            }
        }

        let pinned: Vec<NodeId> = e.step.iter().copied().filter(|&v| g.is_pinned(v)).collect();
        if !pinned.is_empty() {
            self.check_mut("pinned").fail(at, pinned, "pinned nodes switched");
        }

        if s.is_two_color() {
            let mut bad_parity = Vec::new();
            let mut bad_cache = Vec::new();
            for &u in &touched {
                let cached = s.balance(g, u).expect("two-color mode");
                if cached.rem_euclid(2) as u8 != self.parity[u as usize] {
                    bad_parity.push(u);
                }
                if s.recompute_balance(g, u).expect("two-color mode") != cached {
                    bad_cache.push(u);
                }
            }
            if !bad_parity.is_empty() {
                self.check_mut("parity").fail(at, bad_parity, "balance parity changed");
            }
            if !bad_cache.is_empty() {
                self.check_mut("balance_cache")
                    .fail(at, bad_cache, "cached balance differs from a recount");
            }
        }
        self.touched = touched;
    }
}

/// Two adjacent nodes of the sorted set `set`, if any.
fn adjacent_pair(g: &Graph, set: &[NodeId]) -> Option<(NodeId, NodeId)> {
    set.iter().find_map(|&u| {
        g.neighbors(u)
            .iter()
            .find(|v| set.binary_search(v).is_ok())
            .map(|&v| (u, v))
    })
}

/// Errors of [`audit`].
#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    /// A run failed.
    #[error(transparent)]
    Engine(#[from] EngineError),
    /// The materialized graph could not be built.
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Runs `suite` on `g` from its initial coloring.
///
/// Per-step checks are made during a model-B run with the lowest-id policy.
/// `confluence` adds runs with the highest-id policy and
/// [`CONFLUENCE_SEEDS`] seeded-uniform policies; `equivalence` adds a run on
/// the materialized graph.
pub fn audit(g: &Graph, suite: Suite, limits: &RunLimits) -> Result<AuditReport, AuditError> {
    let want = suite.step_checks();
    let mut observer = InvariantObserver::new(g, twin_classes(g));
    let base = ScheduleModel::benevolent(PolicyKind::LowestId);
    let needs_steps = matches!(suite, Suite::Equivalence | Suite::All);
    let lim = RunLimits {
        record_steps: needs_steps || limits.record_steps,
        ..*limits
    };
    let res = run_observed(g, DynamicState::initial(g), &base, &lim, &mut observer)?;
    let mut checks: Vec<Check> = observer
        .into_checks()
        .into_iter()
        .filter(|c| want.contains(&c.name.as_str()))
        .collect();

    if matches!(suite, Suite::Confluence | Suite::All) {
        checks.push(confluence(g, limits, res.trace.switch_count)?);
    }
    if matches!(suite, Suite::Equivalence | Suite::All) {
        checks.push(equivalence(g, limits, res.trace.steps.as_ref().map(|s| s.switches()).unwrap_or(&[]))?);
    }
    let count = |name: &str| checks.iter().find(|c| c.name == name).map_or(0, |c| c.violations);
    Ok(AuditReport {
        suite,
        outcome: res.trace.outcome,
        step_count: res.trace.step_count,
        switch_count: res.trace.switch_count,
        ties: res.trace.ties.max(count("ties")),
        independence_violations: count("independence"),
        monotonicity_violations: count("monotonicity"),
        checks,
    })
}

/// Policies compared by the confluence check: highest id and the seeded
/// uniform policies (the lowest-id run is the reference).
pub fn confluence_policies() -> Vec<PolicyKind> {
    std::iter::once(PolicyKind::HighestId)
        .chain((0..CONFLUENCE_SEEDS).map(PolicyKind::SeededUniform))
        .collect()
}

fn confluence(g: &Graph, limits: &RunLimits, reference: u64) -> Result<Check, EngineError> {
    let mut check = Check::new("confluence");
    let lim = RunLimits {
        record_steps: false,
        ..*limits
    };
    for policy in confluence_policies() {
        let res = run(g, DynamicState::initial(g), &ScheduleModel::benevolent(policy), &lim)?;
        if res.trace.outcome != Outcome::Stable || res.trace.switch_count != reference {
            check.fail(
                res.trace.step_count,
                Vec::new(),
                format!(
                    "policy {policy:?} ends {:?} after {} switches, lowest-id takes {reference}",
                    res.trace.outcome, res.trace.switch_count
                ),
            );
        }
    }
    Ok(check)
}

fn equivalence(g: &Graph, limits: &RunLimits, reference: &[NodeId]) -> Result<Check, AuditError> {
    let mut check = Check::new("equivalence");
    let (lit, map) = materialize_fixed_nodes(g)?;
    let lim = RunLimits {
        record_steps: true,
        ..*limits
    };
    let res = run(&lit, DynamicState::initial(&lit), &ScheduleModel::benevolent(PolicyKind::LowestId), &lim)?;
    let mut back = vec![None; lit.node_count()];
    for (v, m) in map.iter().enumerate() {
        if let Some(m) = m {
            back[*m as usize] = Some(v as NodeId);
        }
    }
    let seen: Vec<NodeId> = res
        .trace
        .steps
        .as_ref()
        .map(|s| s.switches().iter().filter_map(|&v| back[v as usize]).collect())
        .unwrap_or_default();
    if let Some(i) = (0..seen.len().max(reference.len())).find(|&i| seen.get(i) != reference.get(i)) {
        check.fail(
            i as u64,
            seen.get(i).into_iter().chain(reference.get(i)).copied().collect(),
            format!(
                "switch {i} differs: {:?} on the materialized graph, {:?} on the original",
                seen.get(i),
                reference.get(i)
            ),
        );
    }
    let extra = res.trace.switch_count - seen.len() as u64;
    if extra > 0 {
        check.fail(0, Vec::new(), format!("{extra} fixed-set nodes switched"));
    }
    Ok(check)
}
