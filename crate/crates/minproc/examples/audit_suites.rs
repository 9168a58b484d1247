//! Runs every audit suite on a benevolent instance and prints the checks.
//!
//! ```text
//! cargo run --release --example audit_suites -- 4
//! ```

use minproc::audit::{audit, Suite};
use minproc::constructions::build_benevolent;
use minproc::RunLimits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r: u32 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(4);
    let inst = build_benevolent(r)?;
    let rep = audit(&inst.built.graph, Suite::All, &RunLimits::default())?;
    println!("r = {r}: {:?} after {} switches", rep.outcome, rep.switch_count);
    for c in &rep.checks {
        let verdict = if c.passed { "ok" } else { "FAILED" };
        println!("  {:<16} {verdict}", c.name);
        if let Some(ce) = &c.counterexample {
            println!("    at state {}: {} ({:?})", ce.state_index, ce.detail, ce.nodes);
        }
    }
    Ok(())
}
