//! Seeded random generators for games, policies, garblings, and graphs.
//!
//! Used by the property suites and the reproduction report. Everything is
//! driven by a caller-supplied RNG so failures replay from a seed. Generated
//! probabilities are exact rationals (integer weights normalized by their
//! sum); nothing passes through floating point.

use std::collections::BTreeMap;

use rand::Rng;

use crate::game::{Agent, Game, GameSpec};
use crate::informativeness::{CoordinatedGarbling, IndependentGarbling, ObsStructure};
use crate::maxcut::Graph;
use crate::policy::{
    HumanAction, HumanActionDist, HumanPolicy, PolicyPair, RobotAction, RobotActionDist,
    RobotPolicy, StochasticPolicyPair,
};
use crate::rational::{rat_int, Rational};

#[derive(Debug, Clone)]
pub struct RandomGameConfig {
    pub min_states: usize,
    pub max_states: usize,
    pub min_human_obs: usize,
    pub max_human_obs: usize,
    pub min_robot_obs: usize,
    pub max_robot_obs: usize,
    /// Payoffs are integers in `[-payoff_magnitude, payoff_magnitude]`.
    pub payoff_magnitude: i64,
    /// Distribution weights are integers in `[0, weight_magnitude]`.
    pub weight_magnitude: u64,
}

impl RandomGameConfig {
    /// Sizes small enough that exhaustive solving stays instant.
    pub fn small() -> Self {
        RandomGameConfig {
            min_states: 2,
            max_states: 4,
            min_human_obs: 1,
            max_human_obs: 3,
            min_robot_obs: 1,
            max_robot_obs: 3,
            payoff_magnitude: 5,
            weight_magnitude: 4,
        }
    }
}

/// A random exact distribution over `n` outcomes; some outcomes may get
/// probability zero, at least one is positive.
pub fn random_distribution<R: Rng>(rng: &mut R, cfg: &RandomGameConfig, n: usize) -> Vec<Rational> {
    loop {
        let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=cfg.weight_magnitude)).collect();
        let total: u64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        return weights
            .iter()
            .map(|&w| Rational::new((w as i64).into(), (total as i64).into()))
            .collect();
    }
}

fn spec_from_tables(
    n_states: usize,
    n_oh: usize,
    n_or: usize,
    prior: Vec<Rational>,
    obs: Vec<Vec<Rational>>,
    u_act: Vec<Rational>,
    u_off: Vec<Rational>,
) -> GameSpec {
    let states: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    let human_obs: Vec<String> = (0..n_oh).map(|i| format!("h{i}")).collect();
    let robot_obs: Vec<String> = (0..n_or).map(|i| format!("r{i}")).collect();
    let mut obs_dist = BTreeMap::new();
    for (s, state) in states.iter().enumerate() {
        let mut row = BTreeMap::new();
        for oh in 0..n_oh {
            for or in 0..n_or {
                let p = &obs[s][oh * n_or + or];
                if !num_traits::Zero::is_zero(p) {
                    row.insert((human_obs[oh].clone(), robot_obs[or].clone()), p.clone());
                }
            }
        }
        obs_dist.insert(state.clone(), row);
    }
    GameSpec {
        prior: states.iter().cloned().zip(prior).collect(),
        u_act: states.iter().cloned().zip(u_act).collect(),
        u_off: states.iter().cloned().zip(u_off).collect(),
        obs_dist,
        states,
        human_obs,
        robot_obs,
    }
}

/// A random validated game with a possibly noisy observation structure.
pub fn random_game<R: Rng>(rng: &mut R, cfg: &RandomGameConfig) -> Game {
    let n_states = rng.gen_range(cfg.min_states..=cfg.max_states);
    let n_oh = rng.gen_range(cfg.min_human_obs..=cfg.max_human_obs);
    let n_or = rng.gen_range(cfg.min_robot_obs..=cfg.max_robot_obs);
    let prior = random_distribution(rng, cfg, n_states);
    let obs = (0..n_states)
        .map(|_| random_distribution(rng, cfg, n_oh * n_or))
        .collect();
    let payoff = |rng: &mut R| rat_int(rng.gen_range(-cfg.payoff_magnitude..=cfg.payoff_magnitude));
    let u_act = (0..n_states).map(|_| payoff(rng)).collect();
    let u_off = (0..n_states).map(|_| payoff(rng)).collect();
    spec_from_tables(n_states, n_oh, n_or, prior, obs, u_act, u_off)
        .compile()
        .expect("generated spec is well-formed")
}

/// A random game in which `redundant` has redundant observations: that
/// agent's observation is drawn from a kernel applied to the other agent's,
/// so it is conditionally independent of the state.
pub fn random_redundant_game<R: Rng>(
    rng: &mut R,
    cfg: &RandomGameConfig,
    redundant: Agent,
) -> Game {
    let n_states = rng.gen_range(cfg.min_states..=cfg.max_states);
    let n_oh = rng.gen_range(cfg.min_human_obs..=cfg.max_human_obs);
    let n_or = rng.gen_range(cfg.min_robot_obs..=cfg.max_robot_obs);
    let (n_informed, n_copy) = match redundant {
        Agent::Robot => (n_oh, n_or),
        Agent::Human => (n_or, n_oh),
    };
    let prior = random_distribution(rng, cfg, n_states);
    let informed_dist: Vec<Vec<Rational>> = (0..n_states)
        .map(|_| random_distribution(rng, cfg, n_informed))
        .collect();
    let kernel: Vec<Vec<Rational>> = (0..n_informed)
        .map(|_| random_distribution(rng, cfg, n_copy))
        .collect();
    let obs = (0..n_states)
        .map(|s| {
            let mut row = vec![Rational::new(0.into(), 1.into()); n_oh * n_or];
            for informed in 0..n_informed {
                for (copy, k) in kernel[informed].iter().enumerate() {
                    let p = &informed_dist[s][informed] * k;
                    let (oh, or) = match redundant {
                        Agent::Robot => (informed, copy),
                        Agent::Human => (copy, informed),
                    };
                    row[oh * n_or + or] += p;
                }
            }
            row
        })
        .collect();
    let payoff = |rng: &mut R| rat_int(rng.gen_range(-cfg.payoff_magnitude..=cfg.payoff_magnitude));
    let u_act = (0..n_states).map(|_| payoff(rng)).collect();
    let u_off = (0..n_states).map(|_| payoff(rng)).collect();
    spec_from_tables(n_states, n_oh, n_or, prior, obs, u_act, u_off)
        .compile()
        .expect("generated spec is well-formed")
}

pub fn random_deterministic_pair<R: Rng>(rng: &mut R, game: &Game) -> PolicyPair {
    let human = HumanPolicy::new(
        (0..game.human_obs().len())
            .map(|_| {
                if rng.gen_bool(0.5) {
                    HumanAction::On
                } else {
                    HumanAction::Off
                }
            })
            .collect(),
    );
    let robot = RobotPolicy::new(
        (0..game.robot_obs().len())
            .map(|_| match rng.gen_range(0..3) {
                0 => RobotAction::Act,
                1 => RobotAction::Wait,
                _ => RobotAction::Off,
            })
            .collect(),
    );
    PolicyPair { human, robot }
}

pub fn random_stochastic_pair<R: Rng>(rng: &mut R, game: &Game) -> StochasticPolicyPair {
    let cfg = RandomGameConfig::small();
    let human = (0..game.human_obs().len())
        .map(|_| {
            let d = random_distribution(rng, &cfg, 2);
            HumanActionDist {
                on: d[0].clone(),
                off: d[1].clone(),
            }
        })
        .collect();
    let robot = (0..game.robot_obs().len())
        .map(|_| {
            let d = random_distribution(rng, &cfg, 3);
            RobotActionDist {
                act: d[0].clone(),
                wait: d[1].clone(),
                off: d[2].clone(),
            }
        })
        .collect();
    StochasticPolicyPair { human, robot }
}

/// A random coordinated garbling from the given structure onto smaller (or
/// equal) target observation sets, together with the target set names.
pub fn random_coordinated_garbling<R: Rng>(
    rng: &mut R,
    structure: &ObsStructure,
) -> (CoordinatedGarbling, Vec<String>, Vec<String>) {
    let cfg = RandomGameConfig::small();
    let n1h = structure.human_obs.len();
    let n1r = structure.robot_obs.len();
    let n2h = rng.gen_range(1..=n1h);
    let n2r = rng.gen_range(1..=n1r);
    let n_components = rng.gen_range(1..=3);
    let weights = random_distribution(rng, &cfg, n_components);
    let components = weights
        .into_iter()
        .map(|w| {
            let human_kernel = (0..n1h)
                .map(|_| random_distribution(rng, &cfg, n2h))
                .collect();
            let robot_kernel = (0..n1r)
                .map(|_| random_distribution(rng, &cfg, n2r))
                .collect();
            (
                w,
                IndependentGarbling {
                    human_kernel,
                    robot_kernel,
                },
            )
        })
        .collect();
    let target_human = (0..n2h).map(|i| format!("gh{i}")).collect();
    let target_robot = (0..n2r).map(|i| format!("gr{i}")).collect();
    (
        CoordinatedGarbling { components },
        target_human,
        target_robot,
    )
}

/// A one-sided random garbling (the other agent's kernel is the identity).
pub fn random_one_sided_garbling<R: Rng>(
    rng: &mut R,
    structure: &ObsStructure,
    side: Agent,
) -> (CoordinatedGarbling, Vec<String>, Vec<String>) {
    let cfg = RandomGameConfig::small();
    let n1h = structure.human_obs.len();
    let n1r = structure.robot_obs.len();
    let (garbling, target_human, target_robot) = match side {
        Agent::Human => {
            let n2h = rng.gen_range(1..=n1h);
            let human_kernel = (0..n1h)
                .map(|_| random_distribution(rng, &cfg, n2h))
                .collect();
            let g = IndependentGarbling {
                human_kernel,
                robot_kernel: crate::informativeness::identity_kernel(n1r),
            };
            let target_human: Vec<String> = (0..n2h).map(|i| format!("gh{i}")).collect();
            (g, target_human, structure.robot_obs.clone())
        }
        Agent::Robot => {
            let n2r = rng.gen_range(1..=n1r);
            let robot_kernel = (0..n1r)
                .map(|_| random_distribution(rng, &cfg, n2r))
                .collect();
            let g = IndependentGarbling {
                human_kernel: crate::informativeness::identity_kernel(n1h),
                robot_kernel,
            };
            let target_robot: Vec<String> = (0..n2r).map(|i| format!("gr{i}")).collect();
            (g, structure.human_obs.clone(), target_robot)
        }
    };
    (
        CoordinatedGarbling::single(garbling),
        target_human,
        target_robot,
    )
}

/// A random graph on `2..=max_vertices` vertices, each edge present with
/// probability 1/2.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize) -> Graph {
    let n = rng.gen_range(2..=max_vertices);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((vertices[i].clone(), vertices[j].clone()));
            }
        }
    }
    Graph::new(vertices, &edges).expect("no self-loops by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_game;
    use crate::informativeness::is_redundant;
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_games_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = RandomGameConfig::small();
        for _ in 0..100 {
            let game = random_game(&mut rng, &cfg);
            assert!(validate_game(game.spec()).is_clean());
            assert!(game.joint_table().total().is_one());
        }
    }

    #[test]
    fn redundant_games_are_redundant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = RandomGameConfig::small();
        for _ in 0..50 {
            let game = random_redundant_game(&mut rng, &cfg, Agent::Robot);
            assert!(is_redundant(&game, Agent::Robot));
            let game = random_redundant_game(&mut rng, &cfg, Agent::Human);
            assert!(is_redundant(&game, Agent::Human));
        }
    }

    #[test]
    fn graphs_have_no_self_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 6);
            for (u, v) in g.edges() {
                assert!(u < v);
            }
        }
    }
}
