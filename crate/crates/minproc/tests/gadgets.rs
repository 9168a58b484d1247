//! Gadget builders: sizes, certified balances and behavior in isolation.

use minproc::gadgets::{
    build_fork, build_join, build_simple_relay, initial_balances, plan_recharging_system, BuildContext, Role,
};
use minproc::{run, BuildError, DynamicState, NodeId, Outcome, PolicyKind, RunLimits, ScheduleModel, BLACK, WHITE};

#[test]
fn join_has_four_nodes_per_input_plus_center() {
    for p in [2, 4, 6, 10] {
        let mut ctx = BuildContext::new();
        let join = build_join(&mut ctx, p).unwrap();
        assert_eq!(ctx.node_count(), 4 * p as usize + 1);
        assert_eq!(join.starters.len(), p as usize);
    }
    assert!(matches!(build_join(&mut BuildContext::new(), 3), Err(BuildError::Domain(_))));
}

#[test]
fn fork_needs_an_odd_output_count() {
    let mut ctx = BuildContext::new();
    let input = ctx.add_node(WHITE, Role::Plain);
    assert!(build_fork(&mut ctx, input, 4).is_err());
    let fork = build_fork(&mut ctx, input, 5).unwrap();
    assert_eq!(fork.outputs.len(), 5);
    let colors: Vec<u8> = fork.outputs.iter().map(|&f| ctx.color(f)).collect();
    assert_eq!(colors, vec![BLACK, WHITE, BLACK, WHITE, BLACK]);
}

/// A switchable white source, a chain of `n` alternating simple relays, and
/// a pinned sink of the color the last relay switches away from.
fn relay_chain(n: u32) -> (minproc::gadgets::Built, NodeId, Vec<NodeId>) {
    let mut ctx = BuildContext::new();
    let source = ctx.add_node(WHITE, Role::Plain);
    ctx.attach_fixed(source, WHITE, 2).unwrap();
    let mut prev = source;
    let mut color = BLACK;
    let mut relays = Vec::new();
    for _ in 0..n {
        let r = build_simple_relay(&mut ctx, color, 1, Role::Link).unwrap();
        ctx.connect(prev, r.base);
        relays.push(r.base);
        prev = r.base;
        color ^= 1;
    }
    let sink = ctx.add_pinned(color, Role::Plain);
    ctx.connect(prev, sink);
    (ctx.finish().unwrap(), source, relays)
}

#[test]
fn relay_chain_fires_once_in_order() {
    for n in [1, 2, 7, 30] {
        let (built, source, relays) = relay_chain(n);
        let g = &built.graph;
        let balances = initial_balances(g);
        assert_eq!(balances[source as usize], -1);
        assert!(relays.iter().all(|&b| balances[b as usize] == 1));
        let res = run(
            g,
            DynamicState::initial(g),
            &ScheduleModel::benevolent(PolicyKind::LowestId),
            &RunLimits::recording(),
        )
        .unwrap();
        assert_eq!(res.trace.outcome, Outcome::Stable);
        let expected: Vec<NodeId> = std::iter::once(source).chain(relays).collect();
        assert_eq!(res.trace.steps.unwrap().switches(), expected.as_slice());
    }
}

#[test]
fn certification_catches_wrong_balances() {
    // A relay base without its input and output neighbors has balance -1.
    let mut ctx = BuildContext::new();
    build_simple_relay(&mut ctx, WHITE, 1, Role::Link).unwrap();
    assert!(matches!(ctx.finish(), Err(BuildError::Certification { .. })));
}

#[test]
fn recharging_plan_serves_every_demand_with_distinct_lower_nodes() {
    let shapes: Vec<Vec<(u64, u32)>> = vec![
        vec![(1, 3); 3],
        vec![(2, 3); 12],
        vec![(1, 5), (4, 2), (1, 3), (3, 3)],
        vec![(7, 4); 9],
    ];
    for targets in shapes {
        let plan = plan_recharging_system(&targets).unwrap();
        let chi: u64 = targets.iter().map(|&(w, d)| w * d as u64).sum();
        assert_eq!(plan.chi, chi);
        let mut load = vec![0u64; plan.lower_count as usize];
        for (&(w, d), lows) in targets.iter().zip(&plan.assignment) {
            assert_eq!(lows.len(), d as usize);
            let mut sorted = lows.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), lows.len(), "lower nodes repeat within a target");
            for &l in lows {
                load[l] += w;
            }
        }
        assert_eq!(load, plan.load);
        assert_eq!(plan.max_load, *load.iter().max().unwrap());
        assert_eq!(plan.middle_size as u64, plan.max_load + 1);
    }
}

#[test]
fn recharging_plan_rejects_empty_and_zero_demands() {
    assert!(plan_recharging_system(&[]).is_err());
    assert!(plan_recharging_system(&[(1, 0)]).is_err());
}
