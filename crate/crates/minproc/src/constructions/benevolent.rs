//! The benevolent family and its multi-level variant.
//!
//! A chain of `m = 2(r−1)²` rechargeable relays is fed by a join and feeds
//! a fork. Every fork output starts a *branch* that recharges and resets all
//! relays and then re-enters the chain through the next join input, so the
//! chain is traversed once more per branch. The relays come in two classes
//! (even and odd chain positions, which always have opposite colors); per
//! class a branch
//!
//! 1. fires a recharging system that pushes the class's recharge nodes below
//!    zero, and waits with an AND gate until every relay's upper node has
//!    switched;
//! 2. fires a second system that resets the recharge nodes, and waits with an
//!    AND gate until every recharge node has switched back.
//!
//! Gadgets are linked by the shortest alternating chain of simple relays.
//! The process starts from a pinned white node replacing the first join input.
//!
//! With `depth ≥ 2` the recharging systems themselves become reusable: a
//! fired system looks exactly like a fresh system of the opposite color
//! except for the balances of its upper node and middle group, and a
//! level-`(i+1)` system restores exactly those. Level-1 systems are grouped
//! in bundles (four systems serving one branch); level-`(i+1)` bundles hold
//! two systems, one per color, that together reset every level-`i` system.
//! Between two rounds over all level-`i` bundles one level-`(i+1)` bundle
//! fires, inside the branch that starts the next round; rounds therefore
//! nest like an odometer. Reused systems receive one input relay per use;
//! such an input sits two relays deep so that the system's upper node
//! switching during other uses never enables it.

use crate::error::BuildError;
use crate::gadgets::{
    add_compensated_input, build_and_gate, build_fork, build_join, build_rechargeable_relay,
    build_recharging_system, build_simple_relay, link, plan_recharging_system, BuildContext, Built,
    CertEntry, Expect, Fork, GadgetCert, Join, RechargeableRelay, RechargingSystem, Role, Target,
};
use crate::graph::{flip, Color, NodeId, BLACK, WHITE};

/// Balance decrease, in units of 2, that a recharge node needs.
const RECHARGE_DEMAND: u32 = 3;

/// Parameters of the benevolent family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenevolentParams {
    /// Even, at least 2; the chain is traversed `r` times at depth 1.
    pub r: u32,
    /// Number of recharging levels, at least 1.
    pub depth: u32,
}

/// A bundle of recharging systems that fire together within one branch.
#[derive(Debug, Clone)]
pub struct Bundle {
    /// Level 1: `[even-class a, even-class b, odd-class a, odd-class b]`,
    /// where the `a` system is the recharging one on first use. Higher
    /// levels: the systems resetting white and black targets on first use.
    pub systems: Vec<RechargingSystem>,
}

/// One level of recharging systems.
#[derive(Debug, Clone)]
pub struct Level {
    /// 1-based level number.
    pub level: u32,
    /// The bundles of this level.
    pub bundles: Vec<Bundle>,
}

impl Level {
    /// Number of systems on this level.
    pub fn system_count(&self) -> usize {
        self.bundles.iter().map(|b| b.systems.len()).sum()
    }

    /// Number of nodes in this level's systems.
    pub fn node_count(&self) -> usize {
        self.bundles
            .iter()
            .flat_map(|b| &b.systems)
            .map(RechargingSystem::size)
            .sum()
    }
}

/// What one branch does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// The fork output starting the branch.
    pub fork_output: NodeId,
    /// Higher-level bundles fired first, as `(level, bundle)` in order.
    pub resets: Vec<(u32, u32)>,
    /// The level-1 bundle the branch uses.
    pub bundle: u32,
    /// The join input group the branch ends in.
    pub join_input: u32,
}

/// A built benevolent instance.
#[derive(Debug, Clone)]
pub struct BenevolentInstance {
    /// The graph and its metadata.
    pub built: Built,
    /// The parameter `r`.
    pub r: u32,
    /// Number of relays on the chain.
    pub m: u32,
    /// Number of levels actually built.
    pub depth: u32,
    /// The relays, left to right.
    pub relays: Vec<RechargeableRelay>,
    /// The join at the left end of the chain.
    pub join: Join,
    /// The fork at the right end of the chain.
    pub fork: Fork,
    /// The pinned node that starts the process.
    pub starter: NodeId,
    /// Recharging levels, level 1 first.
    pub levels: Vec<Level>,
    /// The branches in fork order.
    pub branches: Vec<Branch>,
    /// Non-fatal adjustments made while building.
    pub warnings: Vec<String>,
}

/// The multi-level instance has the same shape as the single-level one.
pub type RecursiveInstance = BenevolentInstance;

impl BenevolentInstance {
    /// Number of times the chain is traversed in a full run.
    pub fn traversals(&self) -> usize {
        self.branches.len() + 1
    }

    /// Base nodes of the chain, left to right.
    pub fn bases(&self) -> Vec<NodeId> {
        self.relays.iter().map(|r| r.base).collect()
    }
}

/// Builds the single-level benevolent instance for even `r ≥ 2`.
pub fn build_benevolent(r: u32) -> Result<BenevolentInstance, BuildError> {
    build_recursive(r, 1)
}

/// Builds the benevolent instance with `depth` recharging levels.
///
/// Depth 1 is [`build_benevolent`]. Level `i ≥ 2` gets the largest odd
/// number of bundles whose nodes fit within the node count of the chain;
/// if not even one bundle fits, the depth is clamped to `i − 1` and a
/// warning is recorded.
pub fn build_recursive(r: u32, depth: u32) -> Result<BenevolentInstance, BuildError> {
    if r < 2 || !r.is_multiple_of(2) {
        return Err(BuildError::Domain(format!("r must be even and at least 2, got {r}")));
    }
    if depth == 0 {
        return Err(BuildError::Domain("depth must be at least 1".into()));
    }
    let s = r - 1;
    let m = 2 * s * s;
    let mut warnings = Vec::new();
    let plan = plan_levels(s, m, depth, &mut warnings)?;
    let depth = plan.bundles.len() as u32;
    let branches = schedule_branches(&plan);
    let q = branches.len() as u32;

    let mut ctx = BuildContext::new();

    // The chain: relay j has color black for even j, white for odd j.
    let relays: Vec<RechargeableRelay> = (0..m)
        .map(|j| build_rechargeable_relay(&mut ctx, if j % 2 == 0 { BLACK } else { WHITE }))
        .collect::<Result<_, _>>()?;
    for w in relays.windows(2) {
        ctx.connect(w[0].base, w[1].base);
    }

    let join = build_join(&mut ctx, q + 1)?;
    ctx.connect(join.center, relays[0].base);
    let starter = ctx.add_pinned(WHITE, Role::Starter);
    ctx.connect_all(&[starter], &join.starters[0].0.nodes());
    for a in join.starters[0].0.range() {
        ctx.exclude_from_certs(a, starter);
    }
    ctx.set_port("start", starter, crate::gadgets::Direction::Input, WHITE);
    let last = relays.last().unwrap().base;
    let fork = build_fork(&mut ctx, last, q)?;

    // Level-1 systems: per bundle and class, two systems on the same recharge
    // nodes with opposite target colors. Bundle j serves branches of the
    // parity of j, which use R2 for even j and R1 for odd j.
    let mut levels: Vec<Level> = Vec::with_capacity(depth as usize);
    let mut level1 = Vec::with_capacity(plan.bundles[0] as usize);
    for j in 0..plan.bundles[0] {
        let mut systems = Vec::with_capacity(4);
        for class in 0..2u32 {
            let members: Vec<&RechargeableRelay> = relays.iter().skip(class as usize).step_by(2).collect();
            let targets: Vec<Target> = members
                .iter()
                .map(|rl| Target::node(if j % 2 == 0 { rl.r2 } else { rl.r1 }, RECHARGE_DEMAND))
                .collect();
            let t = class_color(class) ^ (j % 2) as Color;
            systems.push(build_recharging_system(&mut ctx, &targets, t)?);
            systems.push(build_recharging_system(&mut ctx, &targets, flip(t))?);
        }
        level1.push(Bundle { systems });
    }
    levels.push(Level { level: 1, bundles: level1 });

    // Higher levels reset every system of the level below.
    for (li, &count) in plan.bundles.iter().enumerate().skip(1) {
        let below: Vec<&RechargingSystem> = levels[li - 1].bundles.iter().flat_map(|b| &b.systems).collect();
        let (white, black) = reset_targets(&below);
        let mut bundles = Vec::with_capacity(count as usize);
        for i in 0..count {
            // Bundle i first fires after i + 1 rounds of the level below;
            // `reset_targets` describes the colors after an odd number.
            let (w, b) = if i % 2 == 0 { (&white, &black) } else { (&black, &white) };
            let x = build_recharging_system(&mut ctx, w, WHITE)?;
            let y = build_recharging_system(&mut ctx, b, BLACK)?;
            bundles.push(Bundle { systems: vec![x, y] });
        }
        levels.push(Level {
            level: li as u32 + 1,
            bundles,
        });
    }

    // Branch wiring.
    let mut uses: Vec<Vec<Vec<u32>>> = levels
        .iter()
        .map(|l| l.bundles.iter().map(|b| vec![0; b.systems.len()]).collect())
        .collect();
    let class_u: Vec<Vec<NodeId>> = (0..2)
        .map(|c| relays.iter().skip(c).step_by(2).map(|rl| rl.upper).collect())
        .collect();
    for (b, br) in branches.iter().enumerate() {
        let mut src = fork.outputs[b];
        for &(level, bundle) in &br.resets {
            let li = level as usize - 1;
            for k in 0..2 {
                let sys = &levels[li].bundles[bundle as usize].systems[k];
                let n = uses[li][bundle as usize][k];
                let t = sys.target_color_at(n);
                // `enable` switches to the target color right before the
                // system fires; it keeps the AND gate below dormant while the
                // lower nodes carry that color from an earlier use.
                let enable = build_simple_relay(&mut ctx, flip(t), 1, Role::Link)?.base;
                link(&mut ctx, src, &[enable])?;
                fire(&mut ctx, sys, n, enable)?;
                uses[li][bundle as usize][k] += 1;
                let mut inputs = sys.lower.clone();
                inputs.push(enable);
                src = build_and_gate(&mut ctx, &inputs, t)?.d;
            }
        }
        let bundle = &levels[0].bundles[br.bundle as usize];
        for class in 0..2usize {
            let u = class_color(class as u32) ^ (b % 2) as Color;
            let pair = [2 * class, 2 * class + 1];
            let counts = &uses[0][br.bundle as usize];
            let (rech, reset) = if bundle.systems[pair[0]].target_color_at(counts[pair[0]]) == u {
                (pair[0], pair[1])
            } else {
                (pair[1], pair[0])
            };
            debug_assert_eq!(bundle.systems[reset].target_color_at(counts[reset]), flip(u));
            let recharge_nodes: Vec<NodeId> = relays
                .iter()
                .skip(class)
                .step_by(2)
                .map(|rl| if br.bundle % 2 == 0 { rl.r2 } else { rl.r1 })
                .collect();

            let n = counts[rech];
            let v = fire(&mut ctx, &bundle.systems[rech], n, src)?;
            uses[0][br.bundle as usize][rech] += 1;
            let mut inputs = class_u[class].clone();
            inputs.push(v);
            src = build_and_gate(&mut ctx, &inputs, flip(u))?.d;

            let n = uses[0][br.bundle as usize][reset];
            let v = fire(&mut ctx, &bundle.systems[reset], n, src)?;
            uses[0][br.bundle as usize][reset] += 1;
            let mut inputs = recharge_nodes;
            inputs.push(v);
            src = build_and_gate(&mut ctx, &inputs, u)?.d;
        }
        let next = &join.starters[br.join_input as usize].0;
        link(&mut ctx, src, &next.nodes())?;
    }

    let built = ctx.finish()?;
    let branches = branches
        .into_iter()
        .enumerate()
        .map(|(b, br)| Branch {
            fork_output: fork.outputs[b],
            ..br
        })
        .collect();
    Ok(BenevolentInstance {
        built,
        r,
        m,
        depth,
        relays,
        join,
        fork,
        starter,
        levels,
        branches,
        warnings,
    })
}

/// Initial color of the relays of a class: black for even chain positions.
fn class_color(class: u32) -> Color {
    if class == 0 {
        BLACK
    } else {
        WHITE
    }
}

/// Connects the trigger of `sys`'s `n`-th use (0-based) to `src` and returns
/// the node that switches into the upper node's color to fire it.
///
/// The first use is a plain link. Later uses go through an input node with
/// two simple relays in front of it: its balance is 3 while the upper node
/// has the opposite color and 1 otherwise, so the upper node switching
/// during other uses never enables it, while the two relays firing does.
fn fire(ctx: &mut BuildContext, sys: &RechargingSystem, n: u32, src: NodeId) -> Result<NodeId, BuildError> {
    if n == 0 {
        return link(ctx, src, &[sys.upper]);
    }
    let upper_color = flip(sys.target_color_at(n));
    let p1 = build_simple_relay(ctx, upper_color, 1, Role::InputRelay)?.base;
    let p2 = build_simple_relay(ctx, upper_color, 1, Role::InputRelay)?.base;
    let input = ctx.add_node(flip(upper_color), Role::InputRelay);
    ctx.connect_all(&[input], &[p1, p2]);
    add_compensated_input(ctx, sys, input, upper_color);
    link(ctx, src, &[p1, p2])?;
    ctx.certify(GadgetCert {
        kind: "input_relay",
        node_count: 3,
        entries: vec![CertEntry {
            role: "input",
            node: input,
            expect: Expect::Exact(2),
            ignoring: vec![sys.upper],
        }],
        padding: 0,
    });
    Ok(input)
}

/// Splits the upper nodes and middle groups of `systems` by their color
/// after an odd number of uses, i.e. after their first use. The upper node
/// needs its balance lowered by `2·|M|`, each middle node by twice the
/// number of lower nodes.
fn reset_targets(systems: &[&RechargingSystem]) -> (Vec<Target>, Vec<Target>) {
    let mut white = Vec::new();
    let mut black = Vec::new();
    for sys in systems {
        // After one use: U has the first target color, M the opposite one.
        let t = sys.target_color;
        let upper = Target::node(sys.upper, sys.middle.len);
        let middle = Target::group(sys.middle, sys.lower.len() as u32);
        if t == WHITE {
            white.push(upper);
            black.push(middle);
        } else {
            black.push(upper);
            white.push(middle);
        }
    }
    (white, black)
}

/// Number of bundles per level.
struct LevelPlan {
    bundles: Vec<u32>,
}

fn plan_levels(s: u32, m: u32, depth: u32, warnings: &mut Vec<String>) -> Result<LevelPlan, BuildError> {
    if depth == 1 {
        return Ok(LevelPlan { bundles: vec![s] });
    }
    // With reuse the level-1 bundle count must be even, so that a bundle
    // always serves branches of one parity.
    let p1 = s + 1;
    let mut bundles = vec![p1];
    let chain_nodes = 6 * m as usize;
    // Geometry of the level below, as (upper demand, middle size, lower count, first target color).
    let class_size = (m / 2) as u64;
    let level1 = plan_recharging_system(&vec![(1, RECHARGE_DEMAND); class_size as usize])?;
    let mut below: Vec<(u32, u32, Color)> = Vec::new();
    for j in 0..p1 {
        for class in 0..2u32 {
            let t = class_color(class) ^ (j % 2) as Color;
            below.push((level1.middle_size, level1.lower_count, t));
            below.push((level1.middle_size, level1.lower_count, flip(t)));
        }
    }
    for level in 2..=depth {
        let mut white = Vec::new();
        let mut black = Vec::new();
        for &(mid, low, t) in &below {
            let (u, mm) = ((1u64, mid), (mid as u64, low));
            if t == WHITE {
                white.push(u);
                black.push(mm);
            } else {
                black.push(u);
                white.push(mm);
            }
        }
        let gw = plan_recharging_system(&white)?;
        let gb = plan_recharging_system(&black)?;
        let bundle_size = gw.size() + gb.size();
        let fit = chain_nodes / bundle_size;
        if fit == 0 {
            warnings.push(format!(
                "depth {depth} requested but a level-{level} bundle ({bundle_size} nodes) exceeds the chain size \
                 ({chain_nodes} nodes); depth clamped to {}",
                level - 1
            ));
            break;
        }
        let count = if fit % 2 == 1 { fit } else { fit - 1 } as u32;
        bundles.push(count);
        below.clear();
        // Swapping the target lists between bundles keeps the geometry.
        for _ in 0..count {
            below.push((gw.middle_size, gw.lower_count, WHITE));
            below.push((gb.middle_size, gb.lower_count, BLACK));
        }
    }
    if bundles.len() == 1 {
        // No higher level fits: fall back to the single-level layout.
        return Ok(LevelPlan { bundles: vec![s] });
    }
    Ok(LevelPlan { bundles })
}

/// Orders the branches: a round over the level-1 bundles, then (inside the
/// next branch) one higher-level bundle, resetting the level above first
/// whenever all of its bundles have been used, and so on until the top
/// level is exhausted. The last branch is dropped so that the fork has an
/// odd number of outputs.
fn schedule_branches(plan: &LevelPlan) -> Vec<Branch> {
    let p = &plan.bundles;
    let depth = p.len();
    let mut branches = Vec::new();
    if depth == 1 {
        for j in 0..p[0] {
            branches.push(Branch {
                fork_output: 0,
                resets: Vec::new(),
                bundle: j,
                join_input: j + 1,
            });
        }
        return branches;
    }
    // used[l] counts the bundles fired so far on level l + 1 (l ≥ 1).
    let mut used = vec![0u32; depth];
    let mut b = 0u32;
    'outer: loop {
        let mut resets = Vec::new();
        if b > 0 && b.is_multiple_of(p[0]) {
            // Find the lowest level that still has a fresh bundle.
            let mut level = 1;
            while level < depth && used[level] > 0 && used[level].is_multiple_of(p[level]) {
                level += 1;
            }
            if level == depth || (level == depth - 1 && used[level] >= p[level]) {
                break 'outer;
            }
            if used[level] >= p[level] && level + 1 >= depth {
                break 'outer;
            }
            // Fire from `level` down to level 2.
            for l in (1..=level).rev() {
                resets.push((l as u32 + 1, used[l] % p[l]));
                used[l] += 1;
            }
        }
        branches.push(Branch {
            fork_output: 0,
            resets,
            bundle: b % p[0],
            join_input: b + 1,
        });
        b += 1;
    }
    branches.pop();
    branches
}
