//! The adversarial and benevolent families: structure and hand-derived counts.

use minproc::audit::{audit, Suite};
use minproc::constructions::{build_adversarial, build_benevolent, build_recursive, instance_report};
use minproc::gadgets::{extend_colors, initial_balances, materialize_fixed_nodes, Role};
use minproc::{replay_schedule, run, DynamicState, Outcome, PolicyKind, RunLimits, ScheduleModel, BLACK, WHITE};

#[test]
fn adversarial_initial_balances() {
    for m in [1, 2, 3, 8] {
        let inst = build_adversarial(m).unwrap();
        let g = &inst.built.graph;
        let b = initial_balances(g);
        for p in inst.hub.range() {
            assert_eq!(b[p as usize], 1);
        }
        for &a in &inst.spokes {
            let want = if g.init_color(a) == BLACK { -1 } else { -(2 * m as i64 + 1) };
            assert_eq!(b[a as usize], want);
        }
        assert_eq!(g.unpinned_count(), 3 * m as usize);
    }
}

#[test]
fn adversarial_schedule_for_m3_has_24_steps() {
    let inst = build_adversarial(3).unwrap();
    let g = &inst.built.graph;
    assert_eq!(inst.schedule.len(), 24);
    let res = replay_schedule(g, DynamicState::initial(g), inst.schedule_slices(), None).unwrap();
    assert_eq!(res.trace.outcome, Outcome::Stable);
    // Each hub member switches once per spoke.
    for p in inst.hub.range() {
        assert_eq!(res.trace.steps.as_ref().unwrap().switches().iter().filter(|&&v| v == p).count(), 6);
    }
}

#[test]
fn adversarial_rejects_zero() {
    assert!(build_adversarial(0).is_err());
}

#[test]
fn benevolent_parameters() {
    for r in [2, 4, 6] {
        let inst = build_benevolent(r).unwrap();
        let s = r - 1;
        assert_eq!(inst.m, 2 * s * s);
        assert_eq!(inst.relays.len(), inst.m as usize);
        assert_eq!(inst.depth, 1);
        assert_eq!(inst.traversals(), r as usize);
        assert_eq!(inst.fork.outputs.len() % 2, 1);
        assert!(inst.built.graph.is_pinned(inst.starter));
        assert_eq!(inst.built.graph.init_color(inst.starter), WHITE);
    }
    assert!(build_benevolent(3).is_err());
    assert!(build_benevolent(0).is_err());
    assert!(build_recursive(4, 0).is_err());
}

#[test]
fn shallow_instances_clamp_depth_with_a_warning() {
    let inst = build_recursive(2, 2).unwrap();
    assert_eq!(inst.depth, 1);
    assert_eq!(inst.warnings.len(), 1);
}

#[test]
fn chain_bases_switch_once_per_traversal() {
    for (r, depth) in [(2, 1), (4, 1), (4, 2)] {
        let inst = build_recursive(r, depth).unwrap();
        let g = &inst.built.graph;
        let res = run(
            g,
            DynamicState::initial(g),
            &ScheduleModel::benevolent(PolicyKind::LowestId),
            &RunLimits::recording(),
        )
        .unwrap();
        assert_eq!(res.trace.outcome, Outcome::Stable);
        let switches = res.trace.steps.as_ref().unwrap().switches();
        for b in inst.bases() {
            let count = switches.iter().filter(|&&v| v == b).count();
            assert_eq!(count, inst.traversals(), "r={r} depth={depth} base {b}");
        }
    }
}

#[test]
fn depth_two_traverses_more_often() {
    let one = build_recursive(4, 1).unwrap();
    let two = build_recursive(4, 2).unwrap();
    assert_eq!(two.depth, 2);
    assert!(two.traversals() > one.traversals());
    assert!(two.branches.iter().any(|b| !b.resets.is_empty()));
}

#[test]
fn benevolent_r2_passes_every_audit() {
    let inst = build_benevolent(2).unwrap();
    let rep = audit(&inst.built.graph, Suite::All, &RunLimits::default()).unwrap();
    assert!(rep.passed(), "{:?}", rep.first_failure());
    assert_eq!(rep.ties, 0);
    assert_eq!(rep.independence_violations, 0);
    assert_eq!(rep.monotonicity_violations, 0);
}

#[test]
fn report_counts_are_consistent() {
    let inst = build_benevolent(4).unwrap();
    let g = &inst.built.graph;
    let rep = instance_report("benevolent", &[("r", 4)], &inst.built);
    assert_eq!(rep.nodes, g.unpinned_count());
    assert_eq!(rep.pinned_nodes, 1);
    assert_eq!(rep.materialized_nodes, 3 * rep.nodes + 2);
    assert_eq!(rep.edges, g.edge_count());
    assert_eq!(rep.roles.values().sum::<usize>(), g.node_count());
    assert_eq!(rep.roles[Role::Base.name()], inst.m as usize);
    for kind in ["join", "fork", "rechargeable_relay", "recharging_system", "and_gate"] {
        assert!(rep.gadgets.contains_key(kind), "missing {kind}");
    }
}

#[test]
fn materialized_graph_has_no_pinned_nodes() {
    let inst = build_benevolent(2).unwrap();
    let g = &inst.built.graph;
    let (lit, map) = materialize_fixed_nodes(g).unwrap();
    assert_eq!(lit.node_count(), 3 * g.unpinned_count() + 2);
    assert!(!lit.has_attachments());
    assert!((0..lit.node_count() as u32).all(|v| !lit.is_pinned(v)));
    assert_eq!(map[inst.starter as usize], None);
}

#[test]
fn color_extension_keeps_the_two_color_run() {
    let inst = build_benevolent(2).unwrap();
    let g = &inst.built.graph;
    let ext = extend_colors(g, 3).unwrap();
    let model = ScheduleModel::benevolent(PolicyKind::LowestId);
    let a = run(g, DynamicState::initial(g), &model, &RunLimits::recording()).unwrap();
    let b = run(&ext, DynamicState::initial(&ext), &model, &RunLimits::recording()).unwrap();
    assert_eq!(a.trace.steps, b.trace.steps);
    assert!(extend_colors(g, 2).is_err());
}
