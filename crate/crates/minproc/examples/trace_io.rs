//! Writes a graph file and a trace of a seeded model-G run, reads both back
//! and verifies the trace by replaying it.
//!
//! ```text
//! cargo run --example trace_io -- /tmp/minproc-demo
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use minproc::constructions::build_benevolent;
use minproc::io::{read_trace, verify_trace, write_trace, GraphFile, GraphMeta, TraceHeader};
use minproc::{run, DynamicState, RunLimits, ScheduleModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "minproc-demo".into()));
    std::fs::create_dir_all(&dir)?;
    let inst = build_benevolent(2)?;
    let meta = GraphMeta {
        kind: "benevolent".into(),
        params: [("r".to_string(), 2)].into_iter().collect(),
    };
    let graph_path = dir.join("benevolent-r2.json");
    GraphFile::from_graph(&inst.built.graph, Some(&inst.built.roles), meta).write_to(File::create(&graph_path)?)?;

    let g = GraphFile::read_from(BufReader::new(File::open(&graph_path)?))?.to_graph()?;
    let model = ScheduleModel::concurrent_random(0.3, 2024);
    let limits = RunLimits::recording();
    let res = run(&g, DynamicState::initial(&g), &model, &limits)?;
    let trace_path = dir.join("benevolent-r2.trace.ndjson");
    write_trace(BufWriter::new(File::create(&trace_path)?), &TraceHeader::new(&g, model, limits), &res.trace)?;

    let file = read_trace(BufReader::new(File::open(&trace_path)?))?;
    verify_trace(&g, &file)?;
    println!(
        "{} and {} written; trace of {} steps ({} switches, {:?}) verified",
        graph_path.display(),
        trace_path.display(),
        file.footer.step_count,
        file.footer.switch_count,
        file.footer.outcome
    );
    Ok(())
}
