//! Gadget library.
//!
//! Gadgets are assembled inside a [`BuildContext`], an arena of nodes, edges,
//! groups and fixed attachments. Every builder registers a [`GadgetCert`]
//! listing the balances its roles must have in the initial coloring once the
//! surrounding wiring is in place; [`BuildContext::finish`] checks all of them
//! against the assembled graph, so a miswired construction fails to build.
//!
//! Conventions shared by all gadgets:
//!
//! * a *fixed attachment* of color `c` on `v` is a pinned leaf of color `c`;
//!   one of `v`'s own color lowers its balance by one, one of the opposite
//!   color raises it by one;
//! * wherever a gadget node `w` must influence a node `x` outside the gadget
//!   only *after* `w` switches, `x` also receives a fixed attachment of the
//!   color `w` will switch to, so that before the switch the two cancel out.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::BuildError;
use crate::graph::{flip, Attachments, Color, Graph, NodeId, BLACK, WHITE};
use crate::state::{scan_balance, DynamicState};

/// Structural role of a node; exported as provenance tag in graph files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Base node of a rechargeable relay on the main chain.
    Base,
    /// Upper node `U` of a rechargeable relay.
    RelayUpper,
    /// Control group `C` of a rechargeable relay.
    RelayControl,
    /// Recharge node colored like the control group.
    RelayR1,
    /// Recharge node colored like the base.
    RelayR2,
    /// Base of a simple relay linking two gadgets.
    Link,
    /// Base of an input relay of a multi-input recharging system.
    InputRelay,
    /// Upper node of a recharging system.
    RsUpper,
    /// Middle group of a recharging system.
    RsMiddle,
    /// Lower-level node of a recharging system.
    RsLower,
    /// Sink leaf padding a lower-level node of a recharging system.
    RsSink,
    /// Node `A` of an AND gate.
    AndA,
    /// Node `B1` of an AND gate.
    AndB1,
    /// Node `B2` of an AND gate.
    AndB2,
    /// Group `C` of an AND gate.
    AndC,
    /// Output node `D` of an AND gate.
    AndD,
    /// Starter group `A_i` of a join.
    JoinA,
    /// Starter group `B_i` of a join.
    JoinB,
    /// Central node of a join.
    JoinCenter,
    /// Pinned node that starts the process.
    Starter,
    /// Node `F_i` of a fork.
    Fork,
    /// Shared group `P` of the adversarial family.
    Hub,
    /// Node `A_i` of the adversarial family.
    Spoke,
    /// Member of the shared white fixed set of a materialized graph.
    FixedWhite,
    /// Member of the shared black fixed set of a materialized graph.
    FixedBlack,
    /// Node added by the color extension.
    ColorExtension,
    /// Any other node.
    Plain,
}

impl Role {
    /// Snake-case name of the role.
    pub fn name(self) -> &'static str {
        match self {
            Role::Base => "base",
            Role::RelayUpper => "relay_upper",
            Role::RelayControl => "relay_control",
            Role::RelayR1 => "relay_r1",
            Role::RelayR2 => "relay_r2",
            Role::Link => "link",
            Role::InputRelay => "input_relay",
            Role::RsUpper => "rs_upper",
            Role::RsMiddle => "rs_middle",
            Role::RsLower => "rs_lower",
            Role::RsSink => "rs_sink",
            Role::AndA => "and_a",
            Role::AndB1 => "and_b1",
            Role::AndB2 => "and_b2",
            Role::AndC => "and_c",
            Role::AndD => "and_d",
            Role::JoinA => "join_a",
            Role::JoinB => "join_b",
            Role::JoinCenter => "join_center",
            Role::Starter => "starter",
            Role::Fork => "fork",
            Role::Hub => "hub",
            Role::Spoke => "spoke",
            Role::FixedWhite => "fixed_white",
            Role::FixedBlack => "fixed_black",
            Role::ColorExtension => "color_extension",
            Role::Plain => "plain",
        }
    }

    /// Parses a snake-case role name.
    pub fn from_name(s: &str) -> Option<Role> {
        ALL_ROLES.iter().copied().find(|r| r.name() == s)
    }
}

const ALL_ROLES: [Role; 27] = [
    Role::Base,
    Role::RelayUpper,
    Role::RelayControl,
    Role::RelayR1,
    Role::RelayR2,
    Role::Link,
    Role::InputRelay,
    Role::RsUpper,
    Role::RsMiddle,
    Role::RsLower,
    Role::RsSink,
    Role::AndA,
    Role::AndB1,
    Role::AndB2,
    Role::AndC,
    Role::AndD,
    Role::JoinA,
    Role::JoinB,
    Role::JoinCenter,
    Role::Starter,
    Role::Fork,
    Role::Hub,
    Role::Spoke,
    Role::FixedWhite,
    Role::FixedBlack,
    Role::ColorExtension,
    Role::Plain,
];

/// A set of nodes with the same color and the same neighbors.
///
/// Members are allocated contiguously.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    /// First member.
    pub first: NodeId,
    /// Number of members.
    pub len: u32,
}

impl Group {
    /// Member ids.
    pub fn range(&self) -> Range<NodeId> {
        self.first..self.first + self.len
    }

    /// Member ids as a vector.
    pub fn nodes(&self) -> Vec<NodeId> {
        self.range().collect()
    }
}

/// Direction of a gadget port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The gadget is triggered through this node.
    Input,
    /// The gadget triggers the outside through this node.
    Output,
}

/// A named connection point of a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    /// The node.
    pub node: NodeId,
    /// Its direction.
    pub direction: Direction,
    /// Color the node has when it triggers or is triggered.
    pub expected_color_at_trigger: Color,
}

/// Expected balance of a certified role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expect {
    /// Exactly this value.
    Exact(i64),
    /// At least this value.
    AtLeast(i64),
}

impl Expect {
    fn holds(self, b: i64) -> bool {
        match self {
            Expect::Exact(x) => b == x,
            Expect::AtLeast(x) => b >= x,
        }
    }

    fn bound(self) -> i64 {
        match self {
            Expect::Exact(x) | Expect::AtLeast(x) => x,
        }
    }
}

/// One certified balance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertEntry {
    /// Role name within the gadget.
    pub role: &'static str,
    /// Certified node.
    pub node: NodeId,
    /// Expected initial balance.
    pub expect: Expect,
    /// Neighbors whose contribution is excluded from the balance.
    pub ignoring: Vec<NodeId>,
}

/// Balances a gadget promises in the initial coloring of the assembled graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetCert {
    /// Gadget kind.
    pub kind: &'static str,
    /// Number of arena nodes the gadget created.
    pub node_count: usize,
    /// Certified roles.
    pub entries: Vec<CertEntry>,
    /// Unused lower-level capacity (recharging systems only).
    pub padding: u64,
}

impl GadgetCert {
    fn new(kind: &'static str, node_count: usize) -> Self {
        GadgetCert {
            kind,
            node_count,
            entries: Vec::new(),
            padding: 0,
        }
    }

    fn exact(mut self, role: &'static str, node: NodeId, b: i64) -> Self {
        self.entries.push(CertEntry {
            role,
            node,
            expect: Expect::Exact(b),
            ignoring: Vec::new(),
        });
        self
    }
}

/// Arena in which gadgets are assembled.
#[derive(Debug, Default, Clone)]
pub struct BuildContext {
    colors: Vec<Color>,
    pinned: Vec<bool>,
    attachments: Vec<Attachments>,
    roles: Vec<Role>,
    edges: Vec<(NodeId, NodeId)>,
    groups: Vec<Group>,
    ports: BTreeMap<String, Port>,
    certs: Vec<GadgetCert>,
    /// Recharging-system plans by target shape; constructions build many
    /// systems of one shape.
    plans: HashMap<Vec<(u64, u32)>, RsGeometry>,
}

/// The result of [`BuildContext::finish`].
#[derive(Debug, Clone)]
pub struct Built {
    /// The assembled graph.
    pub graph: Graph,
    /// Role of every node.
    pub roles: Vec<Role>,
    /// All groups of size two or more.
    pub groups: Vec<Group>,
    /// Named ports.
    pub ports: BTreeMap<String, Port>,
    /// Certificates of every gadget built, all verified.
    pub certs: Vec<GadgetCert>,
}

impl BuildContext {
    /// An empty arena.
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of nodes created so far.
    pub fn node_count(&self) -> usize {
        self.colors.len()
    }

    /// Adds one node.
    pub fn add_node(&mut self, color: Color, role: Role) -> NodeId {
        let v = self.colors.len() as NodeId;
        self.colors.push(color);
        self.pinned.push(false);
        self.attachments.push([0, 0]);
        self.roles.push(role);
        v
    }

    /// Adds one pinned node.
    pub fn add_pinned(&mut self, color: Color, role: Role) -> NodeId {
        let v = self.add_node(color, role);
        self.pinned[v as usize] = true;
        v
    }

    /// Adds a group of `size` nodes of the same color.
    pub fn add_group(&mut self, size: u32, color: Color, role: Role) -> Result<Group, BuildError> {
        if size == 0 {
            return Err(BuildError::Domain("a group needs at least one member".into()));
        }
        let first = self.colors.len() as NodeId;
        for _ in 0..size {
            self.add_node(color, role);
        }
        let g = Group { first, len: size };
        if size > 1 {
            self.groups.push(g);
        }
        Ok(g)
    }

    /// Initial color of `v`.
    pub fn color(&self, v: NodeId) -> Color {
        self.colors[v as usize]
    }

    /// Role of `v`.
    pub fn role(&self, v: NodeId) -> Role {
        self.roles[v as usize]
    }

    /// Fixed attachments of `v` so far.
    pub fn attachments(&self, v: NodeId) -> Attachments {
        self.attachments[v as usize]
    }

    /// Adds the edge `u`–`v`. Simplicity is checked when the graph is built.
    pub fn connect(&mut self, u: NodeId, v: NodeId) {
        self.edges.push((u, v));
    }

    /// Connects every node of `a` with every node of `b`.
    pub fn connect_all(&mut self, a: &[NodeId], b: &[NodeId]) {
        for &u in a {
            for &v in b {
                self.connect(u, v);
            }
        }
    }

    /// Attaches `count ≥ 1` fixed nodes of `color` to `v`.
    pub fn attach_fixed(&mut self, v: NodeId, color: Color, count: u32) -> Result<(), BuildError> {
        if count == 0 {
            return Err(BuildError::Domain("attachment count must be at least 1".into()));
        }
        if color > BLACK {
            return Err(BuildError::Domain(format!("fixed attachments are white or black, got {color}")));
        }
        self.attachments[v as usize][color as usize] += count;
        Ok(())
    }

    /// Like [`attach_fixed`](Self::attach_fixed) but a count of zero is a no-op.
    pub(crate) fn attach(&mut self, v: NodeId, color: Color, count: u32) {
        self.attachments[v as usize][color as usize] += count;
    }

    /// Registers a named port.
    pub fn set_port(&mut self, name: impl Into<String>, node: NodeId, direction: Direction, color: Color) {
        self.ports.insert(
            name.into(),
            Port {
                node,
                direction,
                expected_color_at_trigger: color,
            },
        );
    }

    /// Looks up a port.
    pub fn port(&self, name: &str) -> Option<Port> {
        self.ports.get(name).copied()
    }

    /// Registers a certificate to be checked by [`finish`](Self::finish).
    pub fn certify(&mut self, cert: GadgetCert) {
        self.certs.push(cert);
    }

    /// Restates the certificates of `node`, which assume an opposite-colored
    /// neighbor in the place of `neighbor`, with `neighbor` excluded. Used
    /// where an input is deliberately wired to start the process.
    pub fn exclude_from_certs(&mut self, node: NodeId, neighbor: NodeId) {
        for e in self.certs.iter_mut().flat_map(|c| c.entries.iter_mut()) {
            if e.node == node {
                e.ignoring.push(neighbor);
                e.expect = match e.expect {
                    Expect::Exact(x) => Expect::Exact(x - 1),
                    Expect::AtLeast(x) => Expect::AtLeast(x - 1),
                };
            }
        }
    }

    /// Builds the graph and checks simplicity, attachment budgets and every
    /// registered certificate.
    pub fn finish(self) -> Result<Built, BuildError> {
        let graph = Graph::from_edges(self.colors, self.pinned, self.attachments, &self.edges, 2)?;
        drop(self.edges);
        let delta = (0..graph.node_count() as NodeId)
            .map(|v| graph.explicit_degree(v))
            .max()
            .unwrap_or(0) as u32;
        for v in 0..graph.node_count() as NodeId {
            for (c, &count) in graph.attachments(v).iter().enumerate() {
                if count > delta + 1 {
                    return Err(BuildError::AttachmentBudget {
                        node: v,
                        color: c as Color,
                        count,
                        budget: delta + 1,
                    });
                }
            }
        }
        verify_certs(&graph, &self.certs)?;
        Ok(Built {
            graph,
            roles: self.roles,
            groups: self.groups,
            ports: self.ports,
            certs: self.certs,
        })
    }
}

/// Checks every certificate against the initial coloring of `g`.
pub fn verify_certs(g: &Graph, certs: &[GadgetCert]) -> Result<(), BuildError> {
    let colors = g.init_colors();
    for cert in certs {
        for e in &cert.entries {
            let mut b = scan_balance(g, colors, e.node);
            let c = colors[e.node as usize];
            for &u in &e.ignoring {
                b -= if colors[u as usize] == c { -1 } else { 1 };
            }
            if !e.expect.holds(b) {
                return Err(BuildError::Certification {
                    gadget: cert.kind,
                    role: format!("{} (node {})", e.role, e.node),
                    expected: e.expect.bound(),
                    actual: b,
                });
            }
        }
    }
    Ok(())
}

/// A one-node relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimpleRelay {
    /// The base node; both its input and its output port.
    pub base: NodeId,
}

/// Builds a simple relay of `color` with `n_outputs` output neighbors.
///
/// The base carries one same-colored fixed attachment per output, so that
/// with an opposite-colored input and outputs its balance is 1.
pub fn build_simple_relay(
    ctx: &mut BuildContext,
    color: Color,
    n_outputs: u32,
    role: Role,
) -> Result<SimpleRelay, BuildError> {
    if n_outputs == 0 {
        return Err(BuildError::Domain("a relay needs at least one output".into()));
    }
    let base = ctx.add_node(color, role);
    ctx.attach(base, color, n_outputs);
    ctx.certify(GadgetCert::new("simple_relay", 1).exact("B", base, 1));
    Ok(SimpleRelay { base })
}

/// Links `src` to every node of `targets` through the shortest chain of
/// simple relays that alternates colors: one relay when `src` has the
/// targets' color, two otherwise. All targets must share one color.
///
/// Returns the last relay base, i.e. the node adjacent to the targets.
pub fn link(ctx: &mut BuildContext, src: NodeId, targets: &[NodeId]) -> Result<NodeId, BuildError> {
    let Some(&first) = targets.first() else {
        return Err(BuildError::Domain("a link needs a target".into()));
    };
    let tc = ctx.color(first);
    if targets.iter().any(|&t| ctx.color(t) != tc) {
        return Err(BuildError::Domain("link targets must share one color".into()));
    }
    let sc = ctx.color(src);
    let len = if sc == tc { 1 } else { 2 };
    let mut prev = src;
    let mut color = flip(sc);
    for i in 0..len {
        let outputs = if i + 1 == len { targets.len() as u32 } else { 1 };
        let relay = build_simple_relay(ctx, color, outputs, Role::Link)?;
        ctx.connect(prev, relay.base);
        prev = relay.base;
        color = flip(color);
    }
    ctx.connect_all(&[prev], targets);
    Ok(prev)
}

/// A relay that can be fired repeatedly after being recharged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RechargeableRelay {
    /// Base node `B`, on the chain.
    pub base: NodeId,
    /// Upper node `U`.
    pub upper: NodeId,
    /// Control group `C` of two nodes.
    pub control: Group,
    /// Recharge node with the control group's color (balance 1).
    pub r1: NodeId,
    /// Recharge node with the base's color (balance 5).
    pub r2: NodeId,
    /// Initial color of the base.
    pub color: Color,
}

/// Builds a rechargeable relay whose base has `color`.
///
/// `B` and `U` have the relay's color, the control group and `R1` the
/// opposite one, `R2` the relay's color. `R1` and `R2` each get three fixed
/// attachments of the opposite color to their own, giving balances 1 and 5.
/// The base still needs an input and an output neighbor of the opposite color.
pub fn build_rechargeable_relay(ctx: &mut BuildContext, color: Color) -> Result<RechargeableRelay, BuildError> {
    let other = flip(color);
    let base = ctx.add_node(color, Role::Base);
    let upper = ctx.add_node(color, Role::RelayUpper);
    let control = ctx.add_group(2, other, Role::RelayControl)?;
    let r1 = ctx.add_node(other, Role::RelayR1);
    let r2 = ctx.add_node(color, Role::RelayR2);
    ctx.connect(base, upper);
    ctx.connect_all(&[upper], &control.nodes());
    ctx.connect_all(&control.nodes(), &[r1, r2]);
    ctx.attach(r1, color, 3);
    ctx.attach(r2, other, 3);
    let mut cert = GadgetCert::new("rechargeable_relay", 6)
        .exact("B", base, 1)
        .exact("U", upper, 1)
        .exact("R1", r1, 1)
        .exact("R2", r2, 5);
    for c in control.range() {
        cert = cert.exact("C", c, 1);
    }
    ctx.certify(cert);
    Ok(RechargeableRelay {
        base,
        upper,
        control,
        r1,
        r2,
        color,
    })
}

/// A target of a recharging system: a node or a whole group, and how many
/// lower-level nodes must reach each of its members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    /// The node, or all members of a group.
    pub nodes: Vec<NodeId>,
    /// Balance decrease in units of 2.
    pub demand: u32,
}

impl Target {
    /// A single-node target.
    pub fn node(v: NodeId, demand: u32) -> Self {
        Target {
            nodes: vec![v],
            demand,
        }
    }

    /// A group target.
    pub fn group(g: Group, demand: u32) -> Self {
        Target {
            nodes: g.nodes(),
            demand,
        }
    }
}

/// A three-level recharging system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RechargingSystem {
    /// Upper node `U`; its input relays attach here.
    pub upper: NodeId,
    /// Middle group `M`.
    pub middle: Group,
    /// Lower-level nodes `L_i`.
    pub lower: Vec<NodeId>,
    /// Sink leaves padding the lower nodes to equal load.
    pub sinks: Vec<NodeId>,
    /// Color the targets have when the system fires for the first time.
    pub target_color: Color,
    /// Total demand in edges.
    pub chi: u64,
    /// Side of the square geometry, `ceil(sqrt(chi))`.
    pub side: u32,
}

impl RechargingSystem {
    /// Number of arena nodes.
    pub fn size(&self) -> usize {
        1 + self.middle.len as usize + self.lower.len() + self.sinks.len()
    }

    /// Color the targets must have at the `use_index`-th firing (0-based):
    /// a fired system looks exactly like a fresh one of the opposite color.
    pub fn target_color_at(&self, use_index: u32) -> Color {
        self.target_color ^ (use_index % 2) as Color
    }
}

/// Shape of a recharging system, computed before any node is created.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsGeometry {
    /// Total demand in edges.
    pub chi: u64,
    /// `ceil(sqrt(chi))`.
    pub side: u32,
    /// Number of lower-level nodes.
    pub lower_count: u32,
    /// Size of the middle group: one more than the largest lower-node load.
    pub middle_size: u32,
    /// Largest number of target edges on one lower node.
    pub max_load: u64,
    /// For each target, the lower nodes serving it.
    pub assignment: Vec<Vec<usize>>,
    /// Target edges per lower node.
    pub load: Vec<u64>,
}

impl RsGeometry {
    /// Number of nodes of the system, sink nodes included.
    pub fn size(&self) -> usize {
        1 + self.middle_size as usize + self.lower_count as usize + self.padding() as usize
    }

    /// Number of sink nodes: unused lower-level capacity.
    pub fn padding(&self) -> u64 {
        self.lower_count as u64 * self.max_load - self.chi
    }
}

/// Plans a recharging system for targets given as `(members, demand)`.
///
/// Each target's demand is served by that many distinct lower nodes, chosen
/// greedily as the least loaded ones (heaviest targets first). The number of
/// lower nodes is the value between the largest demand and about
/// `2 sqrt(χ)` that minimizes the size of the system, including the sink
/// nodes that fill every lower node up to the largest load.
pub fn plan_recharging_system(targets: &[(u64, u32)]) -> Result<RsGeometry, BuildError> {
    if targets.is_empty() {
        return Err(BuildError::Domain("a recharging system needs targets".into()));
    }
    if let Some(&(w, d)) = targets.iter().find(|&&(w, d)| d == 0 || w == 0) {
        return Err(BuildError::Domain(format!(
            "recharging targets need positive demand and at least one node, got demand {d} on {w} nodes"
        )));
    }
    let chi: u64 = targets.iter().map(|&(w, d)| w * d as u64).sum();
    let mut side = (chi as f64).sqrt() as u64;
    while side * side < chi {
        side += 1;
    }
    let max_demand = targets.iter().map(|&(_, d)| d).max().unwrap() as u64;
    // Candidate lower-node counts around `sqrt(χ)`, at most 256 of them;
    // each is assigned for real, since heavy group targets make loads lumpy.
    let (lo, hi) = (max_demand, 2 * side + max_demand);
    let stride = ((hi - lo) / 256).max(1);
    let mut best: Option<RsGeometry> = None;
    for l in (lo..=hi).step_by(stride as usize) {
        let g = assign(targets, chi, side, l as usize)?;
        if best.as_ref().is_none_or(|b| g.size() < b.size()) {
            best = Some(g);
        }
    }
    Ok(best.expect("the candidate range is non-empty"))
}

fn assign(targets: &[(u64, u32)], chi: u64, side: u64, lower_count: usize) -> Result<RsGeometry, BuildError> {
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by_key(|&j| Reverse(targets[j].0));
    // `load` counts target edges per lower node. The `demand` least loaded
    // nodes are popped together, so they are distinct.
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = (0..lower_count).map(|i| Reverse((0, i))).collect();
    let mut load = vec![0u64; lower_count];
    let mut assignment: Vec<Vec<usize>> = vec![Vec::new(); targets.len()];
    for j in order {
        let (weight, demand) = targets[j];
        let used: Vec<usize> = (0..demand).filter_map(|_| heap.pop().map(|Reverse((_, i))| i)).collect();
        if used.len() < demand as usize {
            return Err(BuildError::Demand {
                demand,
                available: lower_count as u32,
            });
        }
        for &i in &used {
            load[i] += weight;
            heap.push(Reverse((load[i], i)));
        }
        assignment[j] = used;
    }
    let max_load = *load.iter().max().unwrap();
    Ok(RsGeometry {
        chi,
        side: side as u32,
        lower_count: lower_count as u32,
        middle_size: (max_load + 1) as u32,
        max_load,
        assignment,
        load,
    })
}

/// Builds a recharging system that lowers the balance of every target node by
/// `2 · demand` when it fires, for targets of color `color`.
///
/// `U` and the lower nodes get the opposite color, `M` gets `color`. With
/// `χ` the total number of target edges there are about `sqrt(χ)` lower
/// nodes (see [`plan_recharging_system`]), each with strictly fewer target
/// edges than `M` has members; lower nodes below the largest load are
/// topped up with sink leaves of `color`. Every target edge is paired with a
/// fixed attachment of `color` on the target, so the system is invisible
/// until it fires.
///
/// The system expects exactly one input node of `color` on `U`
/// (see [`link`]); further inputs go through [`add_compensated_input`].
pub fn build_recharging_system(
    ctx: &mut BuildContext,
    targets: &[Target],
    color: Color,
) -> Result<RechargingSystem, BuildError> {
    let shape: Vec<(u64, u32)> = targets.iter().map(|t| (t.nodes.len() as u64, t.demand)).collect();
    let RsGeometry {
        chi,
        side,
        lower_count,
        middle_size,
        assignment,
        max_load,
        load,
    } = match ctx.plans.get(&shape) {
        Some(plan) => plan.clone(),
        None => {
            let plan = plan_recharging_system(&shape)?;
            ctx.plans.insert(shape, plan.clone());
            plan
        }
    };

    let other = flip(color);
    let upper = ctx.add_node(other, Role::RsUpper);
    let middle = ctx.add_group(middle_size, color, Role::RsMiddle)?;
    let lower: Vec<NodeId> = (0..lower_count as usize).map(|_| ctx.add_node(other, Role::RsLower)).collect();
    let mids = middle.nodes();
    ctx.connect_all(&[upper], &mids);
    ctx.connect_all(&mids, &lower);
    ctx.attach(upper, other, middle_size);
    for m in middle.range() {
        ctx.attach(m, color, lower_count);
    }
    for (t, slots) in targets.iter().zip(&assignment) {
        for &i in slots {
            for &x in &t.nodes {
                ctx.connect(lower[i], x);
                ctx.attach(x, color, 1);
            }
        }
    }
    // Every lower node is filled up to `max_load` with sinks: leaves of the
    // targets' color that switch right after their lower node, so they keep
    // the targets' color at every use. Lower nodes thus have odd degree and
    // only become switchable once all of `M` has switched.
    let mut sinks = Vec::new();
    for (&l, &ld) in lower.iter().zip(&load) {
        for _ in ld..max_load {
            let sink = ctx.add_node(color, Role::RsSink);
            ctx.connect(l, sink);
            sinks.push(sink);
        }
    }

    let mut cert =
        GadgetCert::new("recharging_system", 1 + mids.len() + lower.len() + sinks.len()).exact("U", upper, 1);
    for &m in &mids {
        cert = cert.exact("M", m, 1);
    }
    for &l in &lower {
        cert.entries.push(CertEntry {
            role: "L",
            node: l,
            expect: Expect::AtLeast(1),
            ignoring: Vec::new(),
        });
    }
    for &x in &sinks {
        cert = cert.exact("S", x, 1);
    }
    cert.padding = sinks.len() as u64;
    ctx.certify(cert);
    Ok(RechargingSystem {
        upper,
        middle,
        lower,
        sinks,
        target_color: color,
        chi,
        side,
    })
}

/// Connects an additional input node to a recharging system's upper node.
///
/// `switches_to` is the color the input takes when it fires, which is the
/// color of `U` at that moment. A fixed attachment of that color on `U`
/// cancels the input until it fires.
pub fn add_compensated_input(ctx: &mut BuildContext, rs: &RechargingSystem, input: NodeId, switches_to: Color) {
    ctx.connect(input, rs.upper);
    ctx.attach(rs.upper, switches_to, 1);
}

/// An AND gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AndGate {
    /// Node `A`, adjacent to every input.
    pub a: NodeId,
    /// Node `B1`.
    pub b1: NodeId,
    /// Node `B2`.
    pub b2: NodeId,
    /// Group `C` of three nodes.
    pub c: Group,
    /// Output node `D`.
    pub d: NodeId,
    /// Color of `A`: the color the inputs switch to.
    pub color: Color,
}

/// Builds an AND gate firing once every input has switched to `color`.
///
/// `A`, `C` and `D` have `color`, `B1` and `B2` the opposite one. `A`, `B1`
/// and `B2` get `x + 1`, 4 and 3 fixed attachments of the opposite color.
/// `A` switches twice, so once the gate is done every input's balance is
/// back where it started; a fixed attachment of the opposite color on each
/// input compensates `A` in between.
pub fn build_and_gate(ctx: &mut BuildContext, inputs: &[NodeId], color: Color) -> Result<AndGate, BuildError> {
    if inputs.is_empty() {
        return Err(BuildError::Domain("an AND gate needs at least one input".into()));
    }
    let other = flip(color);
    let a = ctx.add_node(color, Role::AndA);
    let b1 = ctx.add_node(other, Role::AndB1);
    let b2 = ctx.add_node(other, Role::AndB2);
    let c = ctx.add_group(3, color, Role::AndC)?;
    let d = ctx.add_node(color, Role::AndD);
    let cs = c.nodes();
    ctx.connect_all(&[a], inputs);
    ctx.connect_all(&[a], &[b1, b2, d]);
    ctx.connect_all(&[a], &cs);
    ctx.connect_all(&[b1, b2], &cs);
    ctx.connect(b1, d);
    ctx.attach(a, other, inputs.len() as u32 + 1);
    ctx.attach(b1, other, 4);
    ctx.attach(b2, other, 3);
    for &x in inputs {
        ctx.attach(x, other, 1);
    }
    let mut cert = GadgetCert::new("and_gate", 7)
        .exact("B1", b1, 1)
        .exact("B2", b2, 1)
        .exact("D", d, 1);
    for &m in &cs {
        cert = cert.exact("C", m, 1);
    }
    cert.entries.push(CertEntry {
        role: "A",
        node: a,
        expect: Expect::Exact(inputs.len() as i64 - 1),
        ignoring: inputs.to_vec(),
    });
    ctx.certify(cert);
    Ok(AndGate { a, b1, b2, c, d, color })
}

/// A join gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Join {
    /// Starter groups `(A_i, B_i)`, input side first.
    pub starters: Vec<(Group, Group)>,
    /// Central node `C`, the output.
    pub center: NodeId,
}

/// Builds a join with `p` (even) inputs.
///
/// Starter `i` (1-based) is a group `A_i` of two nodes, white for odd `i`
/// and black for even `i`, with two fixed attachments of its own color,
/// completely joined to a group `B_i` of two nodes of the opposite color;
/// every `B_i` is joined to the white center `C`, which has two black fixed
/// attachments. Input `i` attaches to `A_i`; the output attaches to `C`.
pub fn build_join(ctx: &mut BuildContext, p: u32) -> Result<Join, BuildError> {
    if p == 0 || !p.is_multiple_of(2) {
        return Err(BuildError::Domain(format!("a join needs an even, positive number of inputs, got {p}")));
    }
    let center = ctx.add_node(WHITE, Role::JoinCenter);
    ctx.attach(center, BLACK, 2);
    let mut starters = Vec::with_capacity(p as usize);
    let mut cert = GadgetCert::new("join", 4 * p as usize + 1).exact("C", center, 3);
    for i in 1..=p {
        let ac = if i % 2 == 1 { WHITE } else { BLACK };
        let a = ctx.add_group(2, ac, Role::JoinA)?;
        let b = ctx.add_group(2, flip(ac), Role::JoinB)?;
        ctx.connect_all(&a.nodes(), &b.nodes());
        for v in a.range() {
            ctx.attach(v, ac, 2);
            cert = cert.exact("A", v, 1);
        }
        ctx.connect_all(&b.nodes(), &[center]);
        for v in b.range() {
            cert = cert.exact("B", v, if ac == WHITE { 3 } else { 1 });
        }
        starters.push((a, b));
    }
    ctx.certify(cert);
    Ok(Join { starters, center })
}

/// A fork gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fork {
    /// Nodes `F_1 .. F_q`, each the source of one output.
    pub outputs: Vec<NodeId>,
}

/// Builds a fork with `q` (odd) outputs fed by `input`.
///
/// `F_i` is black for odd `i` and white for even `i`, has a fixed attachment
/// of its own color, and is adjacent to `F_{i-1}`, `F_{i+1}` and `input`;
/// `F_1` gets an extra black and `F_q` an extra white attachment. Each
/// `F_i` still needs one output neighbor of the opposite color.
pub fn build_fork(ctx: &mut BuildContext, input: NodeId, q: u32) -> Result<Fork, BuildError> {
    if q.is_multiple_of(2) {
        return Err(BuildError::Domain(format!("a fork needs an odd number of outputs, got {q}")));
    }
    let mut outputs = Vec::with_capacity(q as usize);
    for i in 1..=q {
        let c = if i % 2 == 1 { BLACK } else { WHITE };
        let f = ctx.add_node(c, Role::Fork);
        ctx.connect(f, input);
        ctx.attach(f, c, 1);
        if let Some(&prev) = outputs.last() {
            ctx.connect(prev, f);
        }
        outputs.push(f);
    }
    ctx.attach(outputs[0], BLACK, 1);
    ctx.attach(*outputs.last().unwrap(), WHITE, 1);
    let mut cert = GadgetCert::new("fork", q as usize);
    for (i, &f) in outputs.iter().enumerate() {
        let b = if i == 0 || ctx.color(f) == WHITE { 1 } else { 3 };
        cert = cert.exact("F", f, b);
    }
    ctx.certify(cert);
    Ok(Fork { outputs })
}

/// Replaces all fixed attachments and pinned nodes by two shared fixed sets.
///
/// With `n` non-pinned nodes the result has `3n + 2` nodes: the original
/// non-pinned nodes keep their ids, followed by `n + 1` white and `n + 1`
/// black fixed nodes that are completely joined to each other. Every
/// attachment and every edge to a pinned node is rewired to a distinct
/// member of the fixed set of the right color. Nothing is pinned any more;
/// the fixed sets can never switch because each of their members has `n + 1`
/// opposite-colored neighbors and at most `n` others.
///
/// Returns the literal graph and, for every original node, its id in the
/// literal graph (`None` for pinned nodes, which are absorbed).
pub fn materialize_fixed_nodes(g: &Graph) -> Result<(Graph, Vec<Option<NodeId>>), BuildError> {
    let n_total = g.node_count();
    let mut map: Vec<Option<NodeId>> = vec![None; n_total];
    let mut colors = Vec::new();
    for v in 0..n_total as NodeId {
        if !g.is_pinned(v) {
            map[v as usize] = Some(colors.len() as NodeId);
            colors.push(g.init_color(v));
        }
    }
    let n = colors.len();
    let set_size = n + 1;
    if g.num_colors() != 2 {
        return Err(BuildError::Domain("materialization needs a two-color graph".into()));
    }
    let fixed_base = [n as NodeId, (n + set_size) as NodeId];
    // Pinned nodes are assigned to distinct fixed-set members first.
    let mut next_pinned = [0usize; 2];
    let mut pinned_slot: Vec<usize> = vec![usize::MAX; n_total];
    for v in 0..n_total as NodeId {
        if g.is_pinned(v) {
            let c = g.init_color(v) as usize;
            if next_pinned[c] >= set_size {
                return Err(BuildError::Domain("too many pinned nodes to materialize".into()));
            }
            pinned_slot[v as usize] = next_pinned[c];
            next_pinned[c] += 1;
        }
    }
    colors.extend(std::iter::repeat_n(WHITE, set_size));
    colors.extend(std::iter::repeat_n(BLACK, set_size));
    let total = colors.len();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for (u, v) in g.edges() {
        match (map[u as usize], map[v as usize]) {
            (Some(a), Some(b)) => edges.push((a, b)),
            (Some(a), None) => edges.push((a, fixed_base[g.init_color(v) as usize] + pinned_slot[v as usize] as NodeId)),
            (None, Some(b)) => edges.push((b, fixed_base[g.init_color(u) as usize] + pinned_slot[u as usize] as NodeId)),
            (None, None) => {}
        }
    }
    for v in 0..n_total as NodeId {
        let Some(a) = map[v as usize] else { continue };
        for c in 0..2usize {
            let taken: Vec<usize> = g
                .neighbors(v)
                .iter()
                .filter(|&&u| g.is_pinned(u) && g.init_color(u) as usize == c)
                .map(|&u| pinned_slot[u as usize])
                .collect();
            let need = g.attachments(v)[c] as usize;
            let mut slot = 0usize;
            for _ in 0..need {
                while taken.contains(&slot) {
                    slot += 1;
                }
                if slot >= set_size {
                    return Err(BuildError::Domain(format!("node {v} has too many fixed neighbors to materialize")));
                }
                edges.push((a, fixed_base[c] + slot as NodeId));
                slot += 1;
            }
        }
    }
    for i in 0..set_size as NodeId {
        for j in 0..set_size as NodeId {
            edges.push((fixed_base[0] + i, fixed_base[1] + j));
        }
    }
    let graph = Graph::from_edges(colors, vec![false; total], vec![[0, 0]; total], &edges, 2)?;
    Ok((graph, map))
}

/// Widens a two-color graph to `k ≥ 3` colors.
///
/// Adds, for every color `j` in `2..k`, a set of `Δ + 1` nodes of color `j`
/// (where `Δ` is the maximum degree including attachments). The new sets are
/// completely joined to each other and every new node is adjacent to every
/// original node. No original node ever prefers a new color, and the new
/// nodes have no conflicts, so the process behaves exactly as on the
/// original graph.
pub fn extend_colors(g: &Graph, k: u8) -> Result<Graph, BuildError> {
    if k < 3 {
        return Err(BuildError::Domain(format!("color extension needs k >= 3, got {k}")));
    }
    if g.num_colors() != 2 {
        return Err(BuildError::Domain("color extension starts from a two-color graph".into()));
    }
    let n = g.node_count();
    let set_size = g.max_degree() + 1;
    let mut colors = g.init_colors().to_vec();
    let mut pinned: Vec<bool> = (0..n as NodeId).map(|v| g.is_pinned(v)).collect();
    let mut attachments: Vec<Attachments> = (0..n as NodeId).map(|v| g.attachments(v)).collect();
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    let mut sets: Vec<Range<usize>> = Vec::new();
    for j in 2..k {
        let start = colors.len();
        for _ in 0..set_size {
            colors.push(j);
            pinned.push(false);
            attachments.push([0, 0]);
        }
        sets.push(start..colors.len());
    }
    for (a, sa) in sets.iter().enumerate() {
        for x in sa.clone() {
            for v in 0..n {
                edges.push((v as NodeId, x as NodeId));
            }
            for sb in &sets[a + 1..] {
                for y in sb.clone() {
                    edges.push((x as NodeId, y as NodeId));
                }
            }
        }
    }
    Ok(Graph::from_edges(colors, pinned, attachments, &edges, k)?)
}

/// Initial balances of every node of `g` (two-color graphs).
pub fn initial_balances(g: &Graph) -> Vec<i64> {
    let s = DynamicState::initial(g);
    (0..g.node_count() as NodeId)
        .map(|v| s.balance(g, v).unwrap_or(0))
        .collect()
}
