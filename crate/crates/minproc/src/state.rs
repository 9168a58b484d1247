//! Colorings and the local semantics of minority switching.
//!
//! For two colors the *balance* of a node is the number of neighbors with the
//! opposite color minus the number with the same color; a node is switchable
//! exactly when its balance is negative. With more colors a node is switchable
//! when some color is strictly rarer in its neighborhood than its own, and it
//! switches to the rarest color (lowest index on ties).

use crate::engine::Model;
use crate::error::{GraphError, StepError};
use crate::graph::{flip, Color, Graph, NodeId};

/// Current coloring of a graph plus, in two-color mode, a balance cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicState {
    color: Vec<Color>,
    balance: Option<Vec<i32>>,
}

/// What happened while applying one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepReport {
    /// Number of switched nodes whose minority color was a tie.
    pub ties: u32,
}

impl DynamicState {
    /// The initial coloring of `g`.
    pub fn initial(g: &Graph) -> Self {
        Self::build(g, g.init_colors().to_vec())
    }

    /// A state with an explicit coloring.
    pub fn from_colors(g: &Graph, colors: Vec<Color>) -> Result<Self, GraphError> {
        if colors.len() != g.node_count() {
            return Err(GraphError::LengthMismatch);
        }
        if let Some(v) = colors.iter().position(|&c| c >= g.num_colors()) {
            return Err(GraphError::ColorOutOfRange {
                node: v as NodeId,
                color: colors[v],
                k: g.num_colors(),
            });
        }
        Ok(Self::build(g, colors))
    }

    fn build(g: &Graph, color: Vec<Color>) -> Self {
        let balance = (g.num_colors() == 2).then(|| {
            (0..g.node_count() as NodeId)
                .map(|v| scan_balance(g, &color, v) as i32)
                .collect()
        });
        DynamicState { color, balance }
    }

    /// Whether the balance cache is maintained (two-color mode).
    pub fn is_two_color(&self) -> bool {
        self.balance.is_some()
    }

    /// Current color of `v`.
    #[inline]
    pub fn color(&self, v: NodeId) -> Color {
        self.color[v as usize]
    }

    /// The whole coloring.
    pub fn colors(&self) -> &[Color] {
        &self.color
    }

    /// Balance of `v` from the cache.
    pub fn balance(&self, g: &Graph, v: NodeId) -> Result<i64, GraphError> {
        check_node(g, v)?;
        let cache = self.balance.as_ref().ok_or(GraphError::NotTwoColor)?;
        Ok(cache[v as usize] as i64)
    }

    /// Balance of `v` recomputed from the current colors.
    pub fn recompute_balance(&self, g: &Graph, v: NodeId) -> Result<i64, GraphError> {
        check_node(g, v)?;
        if !self.is_two_color() {
            return Err(GraphError::NotTwoColor);
        }
        Ok(scan_balance(g, &self.color, v))
    }

    /// Whether `v` can strictly reduce its conflicts by recoloring.
    pub fn is_switchable(&self, g: &Graph, v: NodeId) -> Result<bool, GraphError> {
        check_node(g, v)?;
        Ok(self.switchable_unchecked(g, v))
    }

    #[inline]
    pub(crate) fn switchable_unchecked(&self, g: &Graph, v: NodeId) -> bool {
        if g.is_pinned(v) {
            return false;
        }
        match &self.balance {
            Some(b) => b[v as usize] < 0,
            None => {
                let hist = self.histogram(g, v);
                let own = hist[self.color(v) as usize];
                hist.iter().any(|&c| c < own)
            }
        }
    }

    /// Color counts in the neighborhood of `v`, attachments included.
    pub fn histogram(&self, g: &Graph, v: NodeId) -> Vec<u64> {
        let mut hist = vec![0u64; g.num_colors() as usize];
        for &u in g.neighbors(v) {
            hist[self.color(u) as usize] += 1;
        }
        let a = g.attachments(v);
        hist[0] += a[0] as u64;
        hist[1] += a[1] as u64;
        hist
    }

    /// The least frequent color around `v` and whether that minimum is shared
    /// by two or more colors. Ties resolve to the lowest color index.
    pub fn minority_color(&self, g: &Graph, v: NodeId) -> Result<(Color, bool), GraphError> {
        check_node(g, v)?;
        Ok(self.minority_unchecked(g, v))
    }

    pub(crate) fn minority_unchecked(&self, g: &Graph, v: NodeId) -> (Color, bool) {
        if let Some(b) = &self.balance {
            let bal = b[v as usize];
            let c = self.color(v);
            return match bal.cmp(&0) {
                std::cmp::Ordering::Less => (flip(c), false),
                std::cmp::Ordering::Greater => (c, false),
                std::cmp::Ordering::Equal => (0, true),
            };
        }
        let hist = self.histogram(g, v);
        let min = *hist.iter().min().expect("palette is non-empty");
        let best = hist.iter().position(|&c| c == min).unwrap() as Color;
        let tie = hist.iter().filter(|&&c| c == min).count() > 1;
        (best, tie)
    }

    /// Number of monochromatic edges, attachment edges included.
    pub fn total_conflicts(&self, g: &Graph) -> u64 {
        let explicit = g
            .edges()
            .filter(|&(u, v)| self.color(u) == self.color(v))
            .count() as u64;
        let leaves: u64 = (0..g.node_count() as NodeId)
            .map(|v| {
                let c = self.color(v);
                if c < 2 {
                    g.attachments(v)[c as usize] as u64
                } else {
                    0
                }
            })
            .sum();
        explicit + leaves
    }

    /// All switchable nodes in increasing order; empty iff the state is stable.
    pub fn switchable_set(&self, g: &Graph) -> Vec<NodeId> {
        (0..g.node_count() as NodeId)
            .filter(|&v| self.switchable_unchecked(g, v))
            .collect()
    }

    /// Validates and applies one step with simultaneous semantics: every node
    /// recolors to its minority color evaluated against the state before the
    /// step. `model` additionally enforces that model's step shape.
    pub fn apply_step(
        &mut self,
        g: &Graph,
        step: &[NodeId],
        model: Option<Model>,
    ) -> Result<StepReport, StepError> {
        validate_step(g, self, step, model)?;
        Ok(self.apply_unchecked(g, step))
    }

    /// Applies a step whose validity has already been established.
    pub(crate) fn apply_unchecked(&mut self, g: &Graph, step: &[NodeId]) -> StepReport {
        let mut report = StepReport::default();
        if self.is_two_color() {
            for &v in step {
                self.recolor(g, v, flip(self.color(v)));
            }
        } else {
            let targets: Vec<(NodeId, Color)> = step
                .iter()
                .map(|&v| {
                    let (c, tie) = self.minority_unchecked(g, v);
                    report.ties += tie as u32;
                    (v, c)
                })
                .collect();
            for (v, c) in targets {
                self.recolor(g, v, c);
            }
        }
        report
    }

    /// Sets the color of `v`, maintaining the balance cache incrementally.
    pub(crate) fn recolor(&mut self, g: &Graph, v: NodeId, c: Color) {
        let old = self.color[v as usize];
        if old == c {
            return;
        }
        self.color[v as usize] = c;
        if let Some(b) = &mut self.balance {
            b[v as usize] = -b[v as usize];
            for &u in g.neighbors(v) {
                let cu = self.color[u as usize];
                // `u` gains a same-colored neighbor and loses an opposite one,
                // or the reverse.
                b[u as usize] += if cu == c { -2 } else { 2 };
            }
        }
    }
}

/// Balance of `v` under `colors`, by a full neighborhood scan.
pub fn scan_balance(g: &Graph, colors: &[Color], v: NodeId) -> i64 {
    let c = colors[v as usize];
    let mut bal: i64 = 0;
    for &u in g.neighbors(v) {
        bal += if colors[u as usize] == c { -1 } else { 1 };
    }
    let a = g.attachments(v);
    if c < 2 {
        bal += a[flip(c) as usize] as i64 - a[c as usize] as i64;
    } else {
        bal += (a[0] + a[1]) as i64;
    }
    bal
}

fn check_node(g: &Graph, v: NodeId) -> Result<(), GraphError> {
    if (v as usize) < g.node_count() {
        Ok(())
    } else {
        Err(GraphError::NodeOutOfRange {
            node: v,
            node_count: g.node_count(),
        })
    }
}

/// Checks that `step` is a valid step in state `s`, and that it respects the
/// shape constraint of `model` when one is given.
pub fn validate_step(
    g: &Graph,
    s: &DynamicState,
    step: &[NodeId],
    model: Option<Model>,
) -> Result<(), StepError> {
    for &v in step {
        check_node(g, v)?;
    }
    let mut sorted = step.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(StepError::Repeated(w[0]));
    }
    if let Some(model) = model {
        check_shape(g, &sorted, model)?;
    }
    for &v in step {
        if !s.switchable_unchecked(g, v) {
            return Err(StepError::NotSwitchable(v));
        }
    }
    Ok(())
}

/// Enforces a model's step shape on a sorted, duplicate-free step.
pub(crate) fn check_shape(g: &Graph, sorted: &[NodeId], model: Model) -> Result<(), StepError> {
    let fail = |reason: String| StepError::ModelConstraint {
        model: model.letter(),
        reason,
    };
    if sorted.is_empty() {
        return Err(fail("empty step".into()));
    }
    if model.is_sequential() && sorted.len() != 1 {
        return Err(fail(format!("step has {} nodes, expected 1", sorted.len())));
    }
    if model == Model::C {
        for &u in sorted {
            if let Some(&v) = g
                .neighbors(u)
                .iter()
                .find(|v| sorted.binary_search(v).is_ok())
            {
                return Err(fail(format!("nodes {u} and {v} are adjacent")));
            }
        }
    }
    Ok(())
}
