//! Cross-checks of the fast solver paths against independent slow oracles on
//! seeded random games, including noisy (correlated-observation) structures
//! the example catalog does not cover.

use posg_core::comm::{self, CommPolicyPair, MessageSystem};
use posg_core::game::{Agent, Game};
use posg_core::informativeness::{
    apply_garbling, find_coordinated_garbling, more_informative_for_agent, GarblingOptions,
};
use posg_core::policy::{HumanAction, RobotAction};
use posg_core::random::{
    random_coordinated_garbling, random_game, random_one_sided_garbling, RandomGameConfig,
};
use posg_core::rational::Rational;
use posg_core::solver::solve_opp;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Case-count override for soak runs.
fn cases(default: usize) -> usize {
    std::env::var("POSG_ORACLE_CASES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

/// Exhaustive maximum over every cheap-talk policy pair, evaluated directly
/// with `expected_payoff_comm` — no best-response shortcut, no pruning.
fn brute_force_comm_value(game: &Game, msgs: &MessageSystem) -> Rational {
    let n_oh = game.human_obs().len();
    let n_or = game.robot_obs().len();
    let mut best: Option<Rational> = None;
    let human_msgs = (msgs.human as u64).pow(n_oh as u32);
    let human_acts = 2u64.pow((n_oh * msgs.robot) as u32);
    let robot_msgs = (msgs.robot as u64).pow(n_or as u32);
    let robot_acts = 3u64.pow((n_or * msgs.human) as u32);
    for hm_code in 0..human_msgs {
        let mut c = hm_code;
        let human_msg: Vec<usize> = (0..n_oh)
            .map(|_| {
                let m = (c % msgs.human as u64) as usize;
                c /= msgs.human as u64;
                m
            })
            .collect();
        for ha_code in 0..human_acts {
            let human_act: Vec<Vec<HumanAction>> = (0..n_oh)
                .map(|oh| {
                    (0..msgs.robot)
                        .map(|m| {
                            if ha_code >> (oh * msgs.robot + m) & 1 == 1 {
                                HumanAction::On
                            } else {
                                HumanAction::Off
                            }
                        })
                        .collect()
                })
                .collect();
            for rm_code in 0..robot_msgs {
                let mut c = rm_code;
                let robot_msg: Vec<usize> = (0..n_or)
                    .map(|_| {
                        let m = (c % msgs.robot as u64) as usize;
                        c /= msgs.robot as u64;
                        m
                    })
                    .collect();
                for ra_code in 0..robot_acts {
                    let mut c = ra_code;
                    let robot_act: Vec<Vec<RobotAction>> = (0..n_or)
                        .map(|_| {
                            (0..msgs.human)
                                .map(|_| {
                                    let action = match c % 3 {
                                        0 => RobotAction::Act,
                                        1 => RobotAction::Wait,
                                        _ => RobotAction::Off,
                                    };
                                    c /= 3;
                                    action
                                })
                                .collect()
                        })
                        .collect();
                    let pair = CommPolicyPair {
                        human_msg: human_msg.clone(),
                        human_act: human_act.clone(),
                        robot_msg: robot_msg.clone(),
                        robot_act: robot_act.clone(),
                    };
                    let value = comm::expected_payoff_comm(game, msgs, &pair).unwrap();
                    if best.as_ref().is_none_or(|b| value > *b) {
                        best = Some(value);
                    }
                }
            }
        }
    }
    best.unwrap()
}

#[test]
fn silent_comm_value_equals_plain_value_on_noisy_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let cfg = RandomGameConfig::small();
    for _ in 0..cases(100) {
        let game = random_game(&mut rng, &cfg);
        let plain = solve_opp(&game).unwrap().value;
        let silent = comm::solve_opp_comm(&game, &MessageSystem::silent())
            .unwrap()
            .value;
        assert_eq!(plain, silent);
    }
}

#[test]
fn comm_solver_matches_brute_force_on_random_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cfg = RandomGameConfig {
        max_states: 3,
        max_human_obs: 2,
        max_robot_obs: 2,
        ..RandomGameConfig::small()
    };
    for case in 0..cases(30) {
        let game = random_game(&mut rng, &cfg);
        for msgs in [
            MessageSystem::new(2, 1).unwrap(),
            MessageSystem::new(1, 2).unwrap(),
        ] {
            let solved = comm::solve_opp_comm(&game, &msgs).unwrap();
            let brute = brute_force_comm_value(&game, &msgs);
            assert_eq!(solved.value, brute, "case {case} msgs {msgs:?}");
            for pair in &solved.opps {
                assert_eq!(
                    comm::expected_payoff_comm(&game, &msgs, pair).unwrap(),
                    brute,
                    "case {case}: reported pair is not optimal"
                );
            }
        }
    }
}

#[test]
fn one_sided_garbling_search_is_complete_on_constructed_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let cfg = RandomGameConfig::small();
    for case in 0..cases(50) {
        let game = random_game(&mut rng, &cfg);
        let o1 = game.obs_structure();
        for side in [Agent::Human, Agent::Robot] {
            let (garbling, target_human, target_robot) =
                random_one_sided_garbling(&mut rng, &o1, side);
            let o2 = apply_garbling(&o1, &garbling, &target_human, &target_robot).unwrap();
            let kernel = more_informative_for_agent(&o1, &o2, side)
                .unwrap()
                .unwrap_or_else(|| panic!("case {case}: constructed {side} kernel not found"));
            // Witness soundness: the found kernel reproduces o2 exactly.
            let witness = match side {
                Agent::Human => posg_core::informativeness::IndependentGarbling {
                    human_kernel: kernel,
                    robot_kernel: posg_core::informativeness::identity_kernel(
                        o1.robot_obs.len(),
                    ),
                },
                Agent::Robot => posg_core::informativeness::IndependentGarbling {
                    human_kernel: posg_core::informativeness::identity_kernel(
                        o1.human_obs.len(),
                    ),
                    robot_kernel: kernel,
                },
            };
            let reapplied = apply_garbling(
                &o1,
                &posg_core::informativeness::CoordinatedGarbling::single(witness),
                &target_human,
                &target_robot,
            )
            .unwrap();
            assert_eq!(reapplied, o2, "case {case} side {side}");
        }
    }
}

#[test]
fn coordinated_garbling_search_is_complete_on_constructed_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let cfg = RandomGameConfig::small();
    let opts = GarblingOptions::default();
    for case in 0..cases(50) {
        let game = random_game(&mut rng, &cfg);
        let o1 = game.obs_structure();
        let (garbling, target_human, target_robot) = random_coordinated_garbling(&mut rng, &o1);
        let o2 = apply_garbling(&o1, &garbling, &target_human, &target_robot).unwrap();
        let witness = find_coordinated_garbling(&o1, &o2, &opts)
            .unwrap()
            .unwrap_or_else(|| panic!("case {case}: feasible instance reported infeasible"));
        let reapplied =
            apply_garbling(&o1, &witness, &target_human, &target_robot).unwrap();
        assert_eq!(reapplied, o2, "case {case}: witness does not reproduce o2");
    }
}
