use proptest::prelude::*;

use sata::seed::rng_from_seed;
use sata::tracking::{
    build_primitives, distance, initial_world, parker_policy, run_episode, snapshot_instance, step_targets,
    write_episode_csv, Policy, PrimitiveLibrary, SimConfig,
};

fn config(preset: &str, seed: u64, forward: bool) -> SimConfig {
    let mut cfg = SimConfig::preset(preset).unwrap();
    cfg.seed = seed;
    if forward {
        cfg.library = PrimitiveLibrary::RandomForward { max_turn_deg: 30.0, max_length: cfg.robot_step, include_stay: true };
    }
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn motion_respects_speed_limits(seed in any::<u64>(), gazebo in any::<bool>(), forward in any::<bool>()) {
        let cfg = config(if gazebo { "gazebo-like" } else { "parker-cmp" }, seed, forward);
        let mut rng = rng_from_seed(seed);
        let mut world = initial_world(&cfg);
        for _ in 0..30 {
            let prims = build_primitives(&world, &cfg, &mut rng);
            for (robot, poses) in world.robots.iter().zip(&prims.poses) {
                prop_assert!(poses.iter().all(|&p| distance(robot.pos, p) <= cfg.robot_step + 1e-9));
            }
            for d in parker_policy(&world, &cfg) {
                prop_assert!(d[0].hypot(d[1]) <= cfg.robot_step + 1e-9);
            }
            let next = step_targets(&world, &cfg, &mut rng);
            for (a, b) in world.targets.iter().zip(&next.targets) {
                prop_assert!(distance(a.pos, b.pos) <= cfg.target_step + 1e-9);
                prop_assert!((0.0..=cfg.arena).contains(&b.pos[0]) && (0.0..=cfg.arena).contains(&b.pos[1]));
            }
            world = next;
        }
    }

    #[test]
    fn only_previously_observed_targets_become_edges(seed in any::<u64>()) {
        let cfg = config("gazebo-like", seed, false);
        let mut rng = rng_from_seed(seed);
        let world = initial_world(&cfg);
        let prims = build_primitives(&world, &cfg, &mut rng);
        let inst = snapshot_instance(&world, &prims, &cfg);
        for e in inst.edges() {
            prop_assert!(prims.observed[e.robot].contains(&e.target));
        }
    }
}

fn csv(policy: Policy, cfg: &SimConfig) -> Vec<u8> {
    let mut out = Vec::new();
    write_episode_csv(&run_episode(cfg, policy).unwrap().rows, &mut out).unwrap();
    out
}

#[test]
fn episodes_are_bit_reproducible() {
    let mut cfg = SimConfig::gazebo_like();
    cfg.horizon = 15;
    cfg.seed = 5;
    for policy in [Policy::Greedy, Policy::Random, Policy::Parker, Policy::Local { h: 1, epsilon: 0.1 }] {
        assert_eq!(csv(policy, &cfg), csv(policy, &cfg), "{policy}");
    }
    let mut other = cfg.clone();
    other.seed = 6;
    assert_ne!(csv(Policy::Greedy, &cfg), csv(Policy::Greedy, &other));
}

#[test]
fn straight_targets_are_predicted_exactly() {
    // no turns, no walls, every target in view: the plan is what happens
    let mut cfg = SimConfig::parker_cmp();
    cfg.arena = 10_000.0;
    cfg.turn_period = 1_000;
    cfg.sensing_range = 5_000.0;
    cfg.comm_range = 10_000.0;
    cfg.horizon = 10;
    cfg.seed = 8;
    let report = run_episode(&cfg, Policy::Greedy).unwrap();
    for row in &report.rows {
        assert_eq!(row.estimated, row.actual, "step {}", row.step);
    }
}
