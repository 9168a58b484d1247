//! Builds the benevolent instance for one `r` and runs it under model B,
//! printing the instance inventory and the stabilization time.
//!
//! ```text
//! cargo run --release --example benevolent_run -- 8
//! ```

use std::time::Instant;

use minproc::constructions::{build_benevolent, instance_report};
use minproc::{run, DynamicState, PolicyKind, RunLimits, ScheduleModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r: u32 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(4);
    let t = Instant::now();
    let inst = build_benevolent(r)?;
    let report = instance_report("benevolent", &[("r", r as u64)], &inst.built);
    println!("built in {:.2?}", t.elapsed());
    println!("{}", serde_json::to_string_pretty(&report)?);

    let g = &inst.built.graph;
    let t = Instant::now();
    let res = run(
        g,
        DynamicState::initial(g),
        &ScheduleModel::benevolent(PolicyKind::LowestId),
        &RunLimits::default(),
    )?;
    println!(
        "model B: {:?} after {} steps ({} chain traversals), {:.2?}",
        res.trace.outcome,
        res.trace.step_count,
        inst.traversals(),
        t.elapsed()
    );
    Ok(())
}
