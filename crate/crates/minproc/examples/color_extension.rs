//! Extends a benevolent instance to `k` colors and checks that the run is
//! unchanged and no original node ever adopts a new color.
//!
//! ```text
//! cargo run --example color_extension -- 2 4
//! ```

use minproc::constructions::build_benevolent;
use minproc::gadgets::extend_colors;
use minproc::{run, DynamicState, PolicyKind, RunLimits, ScheduleModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let r: u32 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2);
    let k: u8 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(4);
    let inst = build_benevolent(r)?;
    let g = &inst.built.graph;
    let ext = extend_colors(g, k)?;
    let model = ScheduleModel::benevolent(PolicyKind::LowestId);
    let two = run(g, DynamicState::initial(g), &model, &RunLimits::recording())?;
    let many = run(&ext, DynamicState::initial(&ext), &model, &RunLimits::recording())?;
    println!("two colors: {} nodes, {} steps", g.node_count(), two.trace.step_count);
    println!("{k} colors:  {} nodes, {} steps", ext.node_count(), many.trace.step_count);
    println!("same switch sequence: {}", two.trace.steps == many.trace.steps);
    let high = (0..g.node_count() as u32).filter(|&v| many.state.color(v) >= 2).count();
    println!("original nodes ending in a new color: {high}");
    Ok(())
}
