//! Replays the explicit slow schedule of the adversarial family and compares
//! its length with the quadratic lower bound.
//!
//! ```text
//! cargo run --example adversarial_replay -- 10
//! ```

use minproc::constructions::build_adversarial;
use minproc::{replay_schedule, DynamicState, Model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: u32 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(5);
    let inst = build_adversarial(m)?;
    let g = &inst.built.graph;
    let res = replay_schedule(g, DynamicState::initial(g), inst.schedule_slices(), Some(Model::A))?;
    let n = g.unpinned_count();
    println!("m = {m}: {n} nodes, {} edges", g.edge_count());
    println!("schedule: {} steps, outcome {:?}", res.trace.step_count, res.trace.outcome);
    println!("(2/9) n^2 = {:.1}", 2.0 / 9.0 * (n * n) as f64);
    Ok(())
}
