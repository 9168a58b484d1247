//! Counts how often each chain base switches at increasing recursion depth.
//!
//! ```text
//! cargo run --release --example recursive_traversals -- 8 3
//! ```

use minproc::constructions::build_recursive;
use minproc::{run, DynamicState, PolicyKind, RunLimits, ScheduleModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let r: u32 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(4);
    let max_depth: u32 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2);
    println!("{:>5} {:>8} {:>10} {:>10} {:>10}", "depth", "built", "nodes", "passes", "steps");
    for depth in 1..=max_depth {
        let inst = build_recursive(r, depth)?;
        for w in &inst.warnings {
            eprintln!("warning: {w}");
        }
        let g = &inst.built.graph;
        let res = run(
            g,
            DynamicState::initial(g),
            &ScheduleModel::benevolent(PolicyKind::LowestId),
            &RunLimits::recording(),
        )?;
        let switches = res.trace.steps.as_ref().unwrap().switches();
        let first = inst.bases()[0];
        let passes = switches.iter().filter(|&&v| v == first).count();
        println!(
            "{depth:>5} {:>8} {:>10} {passes:>10} {:>10}",
            inst.depth,
            g.unpinned_count(),
            res.trace.step_count
        );
    }
    Ok(())
}
