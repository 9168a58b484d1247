//! Replaces fixed attachments by two shared fixed sets and compares the
//! model-B switch sequences of both representations.
//!
//! ```text
//! cargo run --example materialize -- 2
//! ```

use minproc::constructions::build_benevolent;
use minproc::gadgets::materialize_fixed_nodes;
use minproc::{run, DynamicState, NodeId, PolicyKind, RunLimits, ScheduleModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r: u32 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(2);
    let inst = build_benevolent(r)?;
    let g = &inst.built.graph;
    let (lit, map) = materialize_fixed_nodes(g)?;
    let n = g.unpinned_count();
    println!("compact: {n} nodes + {} attachments", g.attachment_count());
    println!("literal: {} nodes (3n + 2 = {})", lit.node_count(), 3 * n + 2);

    let model = ScheduleModel::benevolent(PolicyKind::LowestId);
    let a = run(g, DynamicState::initial(g), &model, &RunLimits::recording())?;
    let b = run(&lit, DynamicState::initial(&lit), &model, &RunLimits::recording())?;
    let mapped: Vec<NodeId> = a.trace.steps.unwrap().switches().iter().filter_map(|&v| map[v as usize]).collect();
    println!("identical switch sequences: {}", mapped == b.trace.steps.unwrap().switches());
    Ok(())
}
