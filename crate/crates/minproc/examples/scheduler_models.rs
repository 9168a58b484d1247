//! Runs all seven scheduler models on one small graph: a monochromatic
//! 5-cycle with a chord.
//!
//! ```text
//! cargo run --example scheduler_models
//! ```

use minproc::{run, DynamicState, Graph, Model, RunLimits, ScheduleModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)];
    let g = Graph::from_edges(vec![0; 5], vec![false; 5], vec![[0, 0]; 5], &edges, 2)?;
    let limits = RunLimits {
        max_steps: 1000,
        ..RunLimits::recording()
    };
    for letter in "ABCDEFG".chars() {
        let model = ScheduleModel::default_for(Model::from_letter(letter).unwrap(), 42);
        let res = run(&g, DynamicState::initial(&g), &model, &limits)?;
        let steps: Vec<Vec<u32>> = res.trace.steps.as_ref().unwrap().iter().map(<[u32]>::to_vec).collect();
        println!(
            "{letter}: {:?}, {} steps, {} switches, {} conflicts left, steps {steps:?}",
            res.trace.outcome,
            res.trace.step_count,
            res.trace.switch_count,
            res.state.total_conflicts(&g)
        );
    }
    Ok(())
}
