//! Local switching rules and the run loop on small hand-checked graphs.

use minproc::error::StepError;
use minproc::{
    replay_schedule, run, DynamicState, EngineError, Graph, Model, Outcome, PolicyKind, RunLimits, ScheduleModel,
    BLACK, WHITE,
};

fn plain(colors: Vec<u8>, edges: &[(u32, u32)], k: u8) -> Graph {
    let n = colors.len();
    Graph::from_edges(colors, vec![false; n], vec![[0, 0]; n], edges, k).unwrap()
}

fn triangle() -> Graph {
    plain(vec![WHITE; 3], &[(0, 1), (1, 2), (0, 2)], 2)
}

#[test]
fn monochromatic_triangle_has_three_conflicts() {
    let g = triangle();
    let s = DynamicState::initial(&g);
    assert_eq!(s.total_conflicts(&g), 3);
    for v in 0..3 {
        assert_eq!(s.balance(&g, v).unwrap(), -2);
        assert!(s.is_switchable(&g, v).unwrap());
    }
}

#[test]
fn triangle_stabilizes_after_one_switch_under_model_b() {
    let g = triangle();
    let res = run(&g, DynamicState::initial(&g), &ScheduleModel::default_for(Model::B, 0), &RunLimits::recording())
        .unwrap();
    assert_eq!(res.trace.outcome, Outcome::Stable);
    assert_eq!(res.trace.switch_count, 1);
    assert_eq!(res.trace.steps.unwrap().get(0), &[0]);
    assert_eq!(res.state.total_conflicts(&g), 1);
}

#[test]
fn attachments_count_toward_balance() {
    // A white node with one black neighbor and two white fixed leaves.
    let g = Graph::from_edges(vec![WHITE, BLACK], vec![false, true], vec![[2, 0], [0, 0]], &[(0, 1)], 2).unwrap();
    let s = DynamicState::initial(&g);
    assert_eq!(s.balance(&g, 0).unwrap(), 1 - 2);
    assert!(s.is_switchable(&g, 0).unwrap());
    // Pinned nodes never switch, whatever their balance.
    assert!(!s.is_switchable(&g, 1).unwrap());
}

#[test]
fn zero_balance_is_not_switchable() {
    let g = plain(vec![WHITE, WHITE, BLACK], &[(0, 1), (0, 2)], 2);
    let s = DynamicState::initial(&g);
    assert_eq!(s.balance(&g, 0).unwrap(), 0);
    assert!(!s.is_switchable(&g, 0).unwrap());
}

#[test]
fn k_color_minority_breaks_ties_by_lowest_index() {
    // Node 0 (color 2) sees colors 0, 1, 2, 2: colors 0 and 1 tie as minority.
    let g = plain(vec![2, 0, 1, 2, 2], &[(0, 1), (0, 2), (0, 3), (0, 4)], 3);
    let s = DynamicState::initial(&g);
    assert_eq!(s.histogram(&g, 0), vec![1, 1, 2]);
    assert_eq!(s.minority_color(&g, 0).unwrap(), (0, true));
    assert!(s.is_switchable(&g, 0).unwrap());
}

#[test]
fn synchronous_pair_is_a_two_cycle() {
    let g = plain(vec![WHITE, WHITE], &[(0, 1)], 2);
    let res = run(&g, DynamicState::initial(&g), &ScheduleModel::synchronous(), &RunLimits::default()).unwrap();
    assert_eq!(res.trace.outcome, Outcome::Cycle { period: 2 });
    assert_eq!(res.trace.step_count, 2);
}

#[test]
fn step_limit_is_reported() {
    let g = plain(vec![WHITE, WHITE], &[(0, 1)], 2);
    let limits = RunLimits {
        max_steps: 3,
        cycle_detection: false,
        ..RunLimits::default()
    };
    let res = run(&g, DynamicState::initial(&g), &ScheduleModel::synchronous(), &limits).unwrap();
    assert_eq!(res.trace.outcome, Outcome::StepLimit);
    assert_eq!(res.trace.step_count, 3);
}

#[test]
fn model_parameters_are_validated() {
    let g = triangle();
    let bad = ScheduleModel {
        model: Model::G,
        policy: None,
        p: Some(1.5),
        seed: Some(1),
    };
    let err = run(&g, DynamicState::initial(&g), &bad, &RunLimits::default()).unwrap_err();
    assert!(matches!(err, EngineError::BadModel(_)));
    let missing = ScheduleModel {
        model: Model::B,
        policy: None,
        p: None,
        seed: None,
    };
    assert!(run(&g, DynamicState::initial(&g), &missing, &RunLimits::default()).is_err());
}

#[test]
fn replay_rejects_non_switchable_and_adjacent_steps() {
    let g = plain(vec![WHITE, WHITE, BLACK], &[(0, 1), (1, 2)], 2);
    // Node 2 has balance 1: not switchable.
    let err = replay_schedule(&g, DynamicState::initial(&g), [&[2u32][..]], None).unwrap_err();
    assert_eq!(err.index, 0);
    assert!(matches!(err.source, StepError::NotSwitchable(2)));
    // Two switchable nodes, but adjacent, in model C.
    let g = triangle();
    let err = replay_schedule(&g, DynamicState::initial(&g), [&[0u32, 1][..]], Some(Model::C)).unwrap_err();
    assert_eq!(err.index, 0);
}

#[test]
fn seeded_models_are_deterministic() {
    let g = plain(vec![WHITE; 6], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)], 2);
    for model in [ScheduleModel::sequential_random(7), ScheduleModel::concurrent_random(0.5, 7)] {
        let a = run(&g, DynamicState::initial(&g), &model, &RunLimits::recording()).unwrap();
        let b = run(&g, DynamicState::initial(&g), &model, &RunLimits::recording()).unwrap();
        assert_eq!(a.trace, b.trace);
    }
    let policy = ScheduleModel::benevolent(PolicyKind::SeededUniform(3));
    let a = run(&g, DynamicState::initial(&g), &policy, &RunLimits::recording()).unwrap();
    let b = run(&g, DynamicState::initial(&g), &policy, &RunLimits::recording()).unwrap();
    assert_eq!(a.trace, b.trace);
}

#[test]
fn concurrent_random_never_counts_empty_draws() {
    let g = plain(vec![WHITE; 4], &[(0, 1), (1, 2), (2, 3), (3, 0)], 2);
    let res = run(&g, DynamicState::initial(&g), &ScheduleModel::concurrent_random(0.05, 11), &RunLimits::recording())
        .unwrap();
    assert!(res.trace.steps.unwrap().iter().all(|s| !s.is_empty()));
}

#[test]
fn graph_rejects_loops_and_duplicates() {
    assert!(Graph::from_edges(vec![0, 0], vec![false; 2], vec![[0, 0]; 2], &[(0, 0)], 2).is_err());
    assert!(Graph::from_edges(vec![0, 0], vec![false; 2], vec![[0, 0]; 2], &[(0, 1), (1, 0)], 2).is_err());
    assert!(Graph::from_edges(vec![0, 3], vec![false; 2], vec![[0, 0]; 2], &[(0, 1)], 2).is_err());
}

#[test]
fn expanded_attachments_give_the_same_dynamics() {
    let g = Graph::from_edges(
        vec![WHITE, WHITE, BLACK],
        vec![false; 3],
        vec![[0, 1], [2, 0], [0, 0]],
        &[(0, 1), (1, 2)],
        2,
    )
    .unwrap();
    let e = g.expand_attachments();
    assert_eq!(e.node_count(), 3 + 3);
    assert!(!e.has_attachments());
    let model = ScheduleModel::benevolent(PolicyKind::LowestId);
    let a = run(&g, DynamicState::initial(&g), &model, &RunLimits::recording()).unwrap();
    let b = run(&e, DynamicState::initial(&e), &model, &RunLimits::recording()).unwrap();
    assert_eq!(a.trace.steps, b.trace.steps);
}
