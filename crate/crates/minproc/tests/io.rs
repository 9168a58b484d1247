//! Graph files, traces, schedules, DOT and CSV.

use std::io::Cursor;

use minproc::constructions::{build_adversarial, build_benevolent};
use minproc::io::{
    graph_hash, read_schedule, read_trace, verify_trace, write_dot, write_schedule, write_trace, GraphFile, GraphMeta,
    TraceHeader,
};
use minproc::stats::{growth_slope, growth_table, log_log_slope, read_csv, write_csv, GrowthRow};
use minproc::{run, DynamicState, Outcome, PolicyKind, RunLimits, ScheduleModel};

fn meta() -> GraphMeta {
    GraphMeta {
        kind: "benevolent".into(),
        params: [("r".to_string(), 2)].into_iter().collect(),
    }
}

#[test]
fn graph_json_round_trip_is_byte_identical() {
    let inst = build_benevolent(2).unwrap();
    let file = GraphFile::from_graph(&inst.built.graph, Some(&inst.built.roles), meta());
    let text = file.to_json_string().unwrap();
    let back = GraphFile::from_json_str(&text).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.to_json_string().unwrap(), text);
    assert_eq!(back.to_graph().unwrap(), inst.built.graph);
    assert_eq!(back.roles(), inst.built.roles);
}

#[test]
fn graph_json_keys_are_sorted_and_edges_oriented() {
    let inst = build_adversarial(2).unwrap();
    let file = GraphFile::from_graph(&inst.built.graph, None, GraphMeta::default());
    let text = file.to_json_string().unwrap();
    let keys = ["\"edges\"", "\"format\"", "\"metadata\"", "\"nodes\"", "\"num_colors\"", "\"version\""];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert!(file.edges.iter().all(|e| e[0] < e[1]));
    assert!(file.edges.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn malformed_graph_files_are_rejected() {
    let inst = build_adversarial(1).unwrap();
    let mut file = GraphFile::from_graph(&inst.built.graph, None, GraphMeta::default());
    file.edges.push([1, 1]);
    assert!(file.to_graph().is_err());
    let mut file = GraphFile::from_graph(&inst.built.graph, None, GraphMeta::default());
    file.nodes[0].id = 7;
    assert!(file.to_graph().is_err());
    assert!(GraphFile::from_json_str("{\"format\": 3}").is_err());
}

#[test]
fn trace_round_trip_and_replay() {
    let inst = build_benevolent(2).unwrap();
    let g = &inst.built.graph;
    let model = ScheduleModel::benevolent(PolicyKind::LowestId);
    let limits = RunLimits::recording();
    let res = run(g, DynamicState::initial(g), &model, &limits).unwrap();
    let mut buf = Vec::new();
    write_trace(&mut buf, &TraceHeader::new(g, model, limits), &res.trace).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count() as u64, res.trace.step_count + 2);
    let file = read_trace(Cursor::new(&text)).unwrap();
    assert_eq!(file.header.graph_hash, graph_hash(g));
    assert_eq!(file.header.empty_draws, "redraw");
    assert_eq!(file.footer.outcome, Outcome::Stable);
    assert_eq!(Some(&file.steps), res.trace.steps.as_ref());
    let end = verify_trace(g, &file).unwrap();
    assert_eq!(end.colors(), res.state.colors());
}

#[test]
fn tampered_traces_fail_verification() {
    let inst = build_benevolent(2).unwrap();
    let g = &inst.built.graph;
    let model = ScheduleModel::benevolent(PolicyKind::LowestId);
    let res = run(g, DynamicState::initial(g), &model, &RunLimits::recording()).unwrap();
    let mut buf = Vec::new();
    write_trace(&mut buf, &TraceHeader::new(g, model, RunLimits::recording()), &res.trace).unwrap();
    let text = String::from_utf8(buf).unwrap();
    // Drop the last step: the footer no longer matches.
    let mut lines: Vec<&str> = text.lines().collect();
    lines.remove(lines.len() - 2);
    let file = read_trace(Cursor::new(lines.join("\n"))).unwrap();
    assert!(verify_trace(g, &file).is_err());
    // A different graph.
    let other = build_adversarial(2).unwrap();
    let file = read_trace(Cursor::new(&text)).unwrap();
    assert!(verify_trace(&other.built.graph, &file).is_err());
    // Missing footer.
    let head: Vec<&str> = text.lines().take(3).collect();
    assert!(read_trace(Cursor::new(head.join("\n"))).is_err());
}

#[test]
fn schedule_round_trip() {
    let inst = build_adversarial(3).unwrap();
    let mut buf = Vec::new();
    write_schedule(&mut buf, inst.schedule_slices()).unwrap();
    assert_eq!(read_schedule(Cursor::new(buf)).unwrap(), inst.schedule);
}

#[test]
fn dot_lists_every_node_and_edge() {
    let inst = build_adversarial(2).unwrap();
    let g = &inst.built.graph;
    let mut buf = Vec::new();
    write_dot(&mut buf, g, Some(&inst.built.roles)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("graph minproc {"));
    assert_eq!(text.matches(" -- ").count(), g.edge_count());
    assert_eq!(text.matches("[label=").count(), g.node_count());
}

#[test]
fn growth_csv_round_trip() {
    let rows = growth_table(&[2, 4], 1).unwrap();
    assert!(rows[0].n < rows[1].n && rows[0].steps < rows[1].steps);
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("r,depth,n,steps\n"));
    assert_eq!(read_csv(Cursor::new(buf)).unwrap(), rows);
    assert!(growth_slope(&rows).unwrap() > 1.0);
}

#[test]
fn log_log_slope_of_a_power_law() {
    let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 3.0 * (i as f64).powf(1.5))).collect();
    assert!((log_log_slope(&pts).unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(log_log_slope(&[(1.0, 1.0)]), None);
    assert_eq!(log_log_slope(&[(1.0, 1.0), (0.0, 2.0)]), None);
    let row = GrowthRow {
        r: 2,
        depth: 1,
        n: 1,
        steps: 1,
    };
    assert_eq!(growth_slope(&[row, row]), None);
}
