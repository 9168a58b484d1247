//! Property tests on random graphs.

use std::io::Cursor;

use minproc::gadgets::extend_colors;
use minproc::io::{read_trace, verify_trace, write_trace, GraphFile, GraphMeta, TraceHeader};
use minproc::state::scan_balance;
use minproc::{run, DynamicState, Graph, Model, NodeId, Outcome, PolicyKind, RunLimits, ScheduleModel};
use proptest::prelude::*;

/// A random simple graph with random colors, pins and attachments.
fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (2..=max_nodes).prop_flat_map(|n| {
        let pairs: Vec<(NodeId, NodeId)> =
            (0..n as NodeId).flat_map(|u| (u + 1..n as NodeId).map(move |v| (u, v))).collect();
        (
            proptest::collection::vec(0u8..2, n),
            proptest::collection::vec(proptest::bool::weighted(0.1), n),
            proptest::collection::vec((0u32..3, 0u32..3), n),
            proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()),
        )
            .prop_map(|(colors, pinned, att, edges)| {
                let att = att.into_iter().map(|(w, b)| [w, b]).collect();
                Graph::from_edges(colors, pinned, att, &edges, 2).unwrap()
            })
    })
}

fn model_b() -> ScheduleModel {
    ScheduleModel::benevolent(PolicyKind::LowestId)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balance_cache_matches_a_fresh_scan(g in graph_strategy(14), seed in 0u64..1000) {
        let res = run(&g, DynamicState::initial(&g), &ScheduleModel::sequential_random(seed), &RunLimits::recording())
            .unwrap();
        let mut s = DynamicState::initial(&g);
        for step in res.trace.steps.as_ref().unwrap().iter() {
            s.apply_step(&g, step, Some(Model::F)).unwrap();
            for v in 0..g.node_count() as NodeId {
                prop_assert_eq!(s.balance(&g, v).unwrap(), scan_balance(&g, s.colors(), v));
            }
        }
    }

    #[test]
    fn balance_parity_never_changes(g in graph_strategy(14)) {
        let res = run(&g, DynamicState::initial(&g), &model_b(), &RunLimits::recording()).unwrap();
        let mut s = DynamicState::initial(&g);
        let parity: Vec<i64> = (0..g.node_count() as NodeId).map(|v| s.balance(&g, v).unwrap().rem_euclid(2)).collect();
        for step in res.trace.steps.as_ref().unwrap().iter() {
            s.apply_step(&g, step, None).unwrap();
            for v in 0..g.node_count() as NodeId {
                prop_assert_eq!(s.balance(&g, v).unwrap().rem_euclid(2), parity[v as usize]);
            }
        }
    }

    #[test]
    fn every_sequential_switch_lowers_the_conflict_count(g in graph_strategy(14), seed in 0u64..1000) {
        let res = run(&g, DynamicState::initial(&g), &ScheduleModel::sequential_random(seed), &RunLimits::recording())
            .unwrap();
        prop_assert_eq!(res.trace.outcome, Outcome::Stable);
        let mut s = DynamicState::initial(&g);
        let mut phi = s.total_conflicts(&g);
        for step in res.trace.steps.as_ref().unwrap().iter() {
            s.apply_step(&g, step, None).unwrap();
            let next = s.total_conflicts(&g);
            prop_assert!(next < phi);
            phi = next;
        }
        prop_assert!(s.switchable_set(&g).is_empty());
    }

    #[test]
    fn non_adjacent_switches_commute(g in graph_strategy(12)) {
        let s0 = DynamicState::initial(&g);
        let sw = s0.switchable_set(&g);
        for (i, &u) in sw.iter().enumerate() {
            for &v in &sw[i + 1..] {
                if g.has_edge(u, v) {
                    continue;
                }
                let mut a = s0.clone();
                a.apply_step(&g, &[u], None).unwrap();
                a.apply_step(&g, &[v], None).unwrap();
                let mut b = s0.clone();
                b.apply_step(&g, &[v], None).unwrap();
                b.apply_step(&g, &[u], None).unwrap();
                let mut c = s0.clone();
                c.apply_step(&g, &[u, v], None).unwrap();
                prop_assert_eq!(a.colors(), b.colors());
                prop_assert_eq!(a.colors(), c.colors());
            }
        }
    }

    #[test]
    fn seeded_runs_are_reproducible(g in graph_strategy(14), seed in any::<u64>(), p in 0.05f64..1.0) {
        let limits = RunLimits { max_steps: 10_000, ..RunLimits::recording() };
        let model = ScheduleModel::concurrent_random(p, seed);
        let a = run(&g, DynamicState::initial(&g), &model, &limits).unwrap();
        let b = run(&g, DynamicState::initial(&g), &model, &limits).unwrap();
        prop_assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn graph_files_round_trip(g in graph_strategy(16)) {
        let file = GraphFile::from_graph(&g, None, GraphMeta::default());
        let text = file.to_json_string().unwrap();
        let back = GraphFile::from_json_str(&text).unwrap();
        prop_assert_eq!(back.to_json_string().unwrap(), text);
        prop_assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn traces_replay_to_their_footer(g in graph_strategy(14), letter in 0usize..7, seed in 0u64..100) {
        let m = [Model::A, Model::B, Model::C, Model::D, Model::E, Model::F, Model::G][letter];
        let model = ScheduleModel::default_for(m, seed);
        let limits = RunLimits { max_steps: 5_000, ..RunLimits::recording() };
        let res = run(&g, DynamicState::initial(&g), &model, &limits).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &TraceHeader::new(&g, model, limits), &res.trace).unwrap();
        let file = read_trace(Cursor::new(buf)).unwrap();
        let end = verify_trace(&g, &file).unwrap();
        prop_assert_eq!(end.colors(), res.state.colors());
    }

    #[test]
    fn color_extension_preserves_model_b_runs(g in graph_strategy(10), k in 3u8..6) {
        let ext = extend_colors(&g, k).unwrap();
        let a = run(&g, DynamicState::initial(&g), &model_b(), &RunLimits::recording()).unwrap();
        let b = run(&ext, DynamicState::initial(&ext), &model_b(), &RunLimits::recording()).unwrap();
        prop_assert_eq!(a.trace.steps, b.trace.steps);
    }

    #[test]
    fn independent_steps_never_contain_neighbors(g in graph_strategy(14)) {
        let model = ScheduleModel::independent(PolicyKind::MaximalIndependent);
        let res = run(&g, DynamicState::initial(&g), &model, &RunLimits::recording()).unwrap();
        prop_assert_eq!(res.trace.outcome, Outcome::Stable);
        for step in res.trace.steps.as_ref().unwrap().iter() {
            for (i, &u) in step.iter().enumerate() {
                for &v in &step[i + 1..] {
                    prop_assert!(!g.has_edge(u, v));
                }
            }
        }
    }
}
