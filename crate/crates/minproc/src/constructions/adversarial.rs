//! The adversarial family: quadratically many steps under model A.
//!
//! A white group `P` of `m` nodes (one black fixed attachment each) is joined
//! to `2m` spokes `A_1 .. A_2m`; odd spokes are black, even spokes white,
//! and every spoke has `m + 1` fixed attachments of its own color. Switching
//! a spoke toward `P`'s color flips `P`'s balance negative again, so the
//! schedule `A_1, P, A_2, P, …, A_2m, P` (each `P` being `m` single-node
//! steps) is valid and has `2m² + 2m` steps on `3m` nodes.

use crate::error::BuildError;
use crate::gadgets::{BuildContext, Built, Group, Role};
use crate::graph::{NodeId, BLACK, WHITE};

/// A built adversarial instance with its schedule.
#[derive(Debug, Clone)]
pub struct AdversarialInstance {
    /// The graph and its metadata.
    pub built: Built,
    /// Size of the shared group.
    pub m: u32,
    /// The shared group `P`.
    pub hub: Group,
    /// Spokes `A_1 .. A_2m`.
    pub spokes: Vec<NodeId>,
    /// The slow schedule, one node per step.
    pub schedule: Vec<Vec<NodeId>>,
}

impl AdversarialInstance {
    /// The schedule as slices, ready for [`crate::engine::replay_schedule`].
    pub fn schedule_slices(&self) -> impl Iterator<Item = &[NodeId]> {
        self.schedule.iter().map(Vec::as_slice)
    }
}

/// Builds the adversarial instance for `m ≥ 1`.
pub fn build_adversarial(m: u32) -> Result<AdversarialInstance, BuildError> {
    if m == 0 {
        return Err(BuildError::Domain("the adversarial family needs m >= 1".into()));
    }
    let mut ctx = BuildContext::new();
    let hub = ctx.add_group(m, WHITE, Role::Hub)?;
    let members = hub.nodes();
    for &p in &members {
        ctx.attach_fixed(p, BLACK, 1)?;
    }
    let mut spokes = Vec::with_capacity(2 * m as usize);
    for i in 1..=2 * m {
        let c = if i % 2 == 1 { BLACK } else { WHITE };
        let a = ctx.add_node(c, Role::Spoke);
        ctx.connect_all(&[a], &members);
        ctx.attach_fixed(a, c, m + 1)?;
        spokes.push(a);
    }
    let mut schedule = Vec::with_capacity((2 * m * m + 2 * m) as usize);
    for &a in &spokes {
        schedule.push(vec![a]);
        schedule.extend(members.iter().map(|&p| vec![p]));
    }
    let built = ctx.finish()?;
    Ok(AdversarialInstance {
        built,
        m,
        hub,
        spokes,
        schedule,
    })
}
