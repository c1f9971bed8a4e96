//! Exhaustive search for optimal policy pairs and deference analysis.
//!
//! The solver enumerates every robot policy over the positive-probability
//! observations (3^n of them) and fills the human side with pointwise best
//! responses, branching on exact ties. The human's action only matters on
//! cells where the robot waits, so her best response separates per
//! observation; that pruning is what keeps desk-scale games instant while the
//! search remains exhaustive and the optimum certified.
//!
//! Candidate values are compared as big-integer numerators over a common
//! denominator precomputed at game compile time, so no fraction is reduced in
//! the inner loop and every comparison is exact.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::Error;
use crate::game::{Agent, Game};
use crate::policy::{self, HumanAction, HumanPolicy, PolicyPair, RobotAction, RobotPolicy};
use crate::rational::Rational;

/// Resource limits for exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Upper bound on candidate evaluations (robot policies plus tie
    /// branches). Finding optimal pairs is NP-hard, so there is no general
    /// shortcut; the cap turns a hopeless search into an explicit error.
    pub max_candidates: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_candidates: 10_000_000,
        }
    }
}

/// Optimal value and the complete set of deterministic optimal policy pairs.
///
/// `opps` is sorted lexicographically by robot policy then human policy.
/// `deference_sets[i]` is the set of robot observation indices on which
/// `opps[i]` waits, and `wait_probability[i]` its prior mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub value: Rational,
    pub opps: Vec<PolicyPair>,
    pub deference_sets: Vec<BTreeSet<usize>>,
    pub wait_probability: Vec<Rational>,
}

impl SolveResult {
    fn from_pairs(game: &Game, value: Rational, opps: Vec<PolicyPair>) -> Self {
        let deference_sets: Vec<BTreeSet<usize>> =
            opps.iter().map(|p| p.robot.wait_set()).collect();
        let wait_probability = deference_sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|&or| game.robot_marginal()[or].clone())
                    .sum()
            })
            .collect();
        SolveResult {
            value,
            opps,
            deference_sets,
            wait_probability,
        }
    }
}

fn decode_robot_policy(code: u64, positive: &[usize], n_or: usize) -> RobotPolicy {
    let mut actions = vec![RobotAction::Off; n_or];
    // Most significant digit first so ascending codes enumerate policies in
    // lexicographic order (ACT < WAIT < OFF).
    let mut rem = code;
    for (i, &or) in positive.iter().enumerate() {
        let place = 3u64.pow((positive.len() - 1 - i) as u32);
        let digit = rem / place;
        rem %= place;
        actions[or] = match digit {
            0 => RobotAction::Act,
            1 => RobotAction::Wait,
            _ => RobotAction::Off,
        };
    }
    RobotPolicy::new(actions)
}

/// Evaluates one robot policy with the human side best-responded pointwise.
/// Returns the scaled value numerator and, per positive human observation,
/// whether ON/OFF tie there.
fn evaluate_robot_code(
    game: &Game,
    code: u64,
    positive_or: &[usize],
    positive_oh: &[usize],
) -> (BigInt, RobotPolicy, Vec<bool>) {
    let n_or = game.robot_obs().len();
    let robot = decode_robot_policy(code, positive_or, n_or);
    let cells = game.scaled_cells();
    let mut total = BigInt::zero();
    for &or in positive_or {
        match robot.actions[or] {
            RobotAction::Act => {
                for &oh in positive_oh {
                    total += &cells.act[oh * n_or + or];
                }
            }
            RobotAction::Off => {
                for &oh in positive_oh {
                    total += &cells.off[oh * n_or + or];
                }
            }
            RobotAction::Wait => {}
        }
    }
    let mut ties = vec![false; positive_oh.len()];
    for (slot, &oh) in positive_oh.iter().enumerate() {
        let mut on = BigInt::zero();
        let mut off = BigInt::zero();
        for &or in positive_or {
            if robot.actions[or] == RobotAction::Wait {
                on += &cells.act[oh * n_or + or];
                off += &cells.off[oh * n_or + or];
            }
        }
        if on == off {
            ties[slot] = true;
        }
        total += on.max(off);
    }
    (total, robot, ties)
}

/// Expands the tied human observations of one maximizing robot policy into
/// the full list of optimal pairs for that robot policy.
fn expand_opps(
    game: &Game,
    robot: RobotPolicy,
    ties: &[bool],
    positive_oh: &[usize],
) -> Vec<PolicyPair> {
    let n_or = game.robot_obs().len();
    let n_oh = game.human_obs().len();
    let cells = game.scaled_cells();
    let mut choices: Vec<Vec<HumanAction>> = vec![vec![HumanAction::Off]; n_oh];
    for (slot, &oh) in positive_oh.iter().enumerate() {
        if ties[slot] {
            choices[oh] = vec![HumanAction::On, HumanAction::Off];
            continue;
        }
        let mut on = BigInt::zero();
        let mut off = BigInt::zero();
        for or in robot.wait_set() {
            on += &cells.act[oh * n_or + or];
            off += &cells.off[oh * n_or + or];
        }
        choices[oh] = vec![if on > off {
            HumanAction::On
        } else {
            HumanAction::Off
        }];
    }
    let mut humans = vec![Vec::with_capacity(n_oh)];
    for per_obs in &choices {
        let mut next = Vec::with_capacity(humans.len() * per_obs.len());
        for partial in &humans {
            for action in per_obs {
                let mut extended = partial.clone();
                extended.push(*action);
                next.push(extended);
            }
        }
        humans = next;
    }
    let mut pairs: Vec<PolicyPair> = humans
        .into_iter()
        .map(|actions| PolicyPair {
            human: HumanPolicy::new(actions),
            robot: robot.clone(),
        })
        .collect();
    pairs.sort();
    pairs
}

/// Finds the optimal value and every deterministic optimal policy pair.
pub fn solve_opp(game: &Game) -> Result<SolveResult, Error> {
    solve_opp_with(game, &SolveOptions::default())
}

/// [`solve_opp`] with explicit resource limits.
pub fn solve_opp_with(game: &Game, opts: &SolveOptions) -> Result<SolveResult, Error> {
    let positive_or = game.positive_robot_obs().to_vec();
    let positive_oh = game.positive_human_obs().to_vec();
    let robot_count = 3u128
        .checked_pow(positive_or.len() as u32)
        .ok_or(Error::EnumerationCap {
            candidates: u128::MAX,
            cap: opts.max_candidates,
        })?;
    if robot_count > opts.max_candidates as u128 {
        return Err(Error::EnumerationCap {
            candidates: 3u128
                .checked_pow(game.robot_obs().len() as u32)
                .unwrap_or(u128::MAX),
            cap: opts.max_candidates,
        });
    }
    let codes = 0..robot_count as u64;

    // Pass 1: the maximum scaled value over all robot policies.
    let best = codes
        .clone()
        .into_par_iter()
        .map(|code| evaluate_robot_code(game, code, &positive_or, &positive_oh).0)
        .reduce_with(|a, b| a.max(b))
        .expect("at least one robot policy exists");

    // Pass 2: collect every maximizing robot policy in code order and expand
    // human ties. The merge is deterministic regardless of thread schedule.
    let mut maximizers: Vec<(u64, RobotPolicy, Vec<bool>)> = codes
        .into_par_iter()
        .filter_map(|code| {
            let (value, robot, ties) = evaluate_robot_code(game, code, &positive_or, &positive_oh);
            (value == best).then_some((code, robot, ties))
        })
        .collect();
    maximizers.sort_by_key(|(code, _, _)| *code);

    let mut candidates = robot_count;
    let mut opps = Vec::new();
    for (_, robot, ties) in maximizers {
        let expanded = expand_opps(game, robot, &ties, &positive_oh);
        candidates += expanded.len() as u128;
        if candidates > opts.max_candidates as u128 {
            return Err(Error::EnumerationCap {
                candidates,
                cap: opts.max_candidates,
            });
        }
        opps.extend(expanded);
    }
    opps.sort_by(|a, b| (&a.robot, &a.human).cmp(&(&b.robot, &b.human)));

    let value = Rational::new(best, game.scaled_cells().denom.clone());
    Ok(SolveResult::from_pairs(game, value, opps))
}

/// Ordering of two robot policies by how often they wait (strict subset
/// relation on wait sets).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaitOrdering {
    StrictlyLess,
    Equal,
    StrictlyMore,
    Incomparable,
}

/// Compares wait sets of two robot policies over the same observation set.
pub fn waits_less(p1: &RobotPolicy, p2: &RobotPolicy) -> Result<WaitOrdering, Error> {
    if p1.actions.len() != p2.actions.len() {
        return Err(Error::MismatchedObservationSets {
            left: p1.actions.len(),
            right: p2.actions.len(),
        });
    }
    let w1: BTreeSet<usize> = p1.wait_set();
    let w2: BTreeSet<usize> = p2.wait_set();
    Ok(wait_set_relation(&w1, &w2))
}

/// Subset classification of two wait sets.
pub fn wait_set_relation<T: Ord>(w1: &BTreeSet<T>, w2: &BTreeSet<T>) -> WaitOrdering {
    let sub12 = w1.is_subset(w2);
    let sub21 = w2.is_subset(w1);
    match (sub12, sub21) {
        (true, true) => WaitOrdering::Equal,
        (true, false) => WaitOrdering::StrictlyLess,
        (false, true) => WaitOrdering::StrictlyMore,
        (false, false) => WaitOrdering::Incomparable,
    }
}

/// Does some optimal pair defer on every positive-probability observation?
/// Returns a witness pair when one exists.
pub fn exists_always_wait_opp(game: &Game) -> Result<(bool, Option<PolicyPair>), Error> {
    let result = solve_opp(game)?;
    let all: BTreeSet<usize> = game.positive_robot_obs().iter().copied().collect();
    for (pair, deference) in result.opps.iter().zip(&result.deference_sets) {
        if *deference == all {
            return Ok((true, Some(pair.clone())));
        }
    }
    Ok((false, None))
}

/// Does some optimal pair never defer? Returns a witness when one exists.
pub fn exists_never_wait_opp(game: &Game) -> Result<(bool, Option<PolicyPair>), Error> {
    let result = solve_opp(game)?;
    for (pair, deference) in result.opps.iter().zip(&result.deference_sets) {
        if deference.is_empty() {
            return Ok((true, Some(pair.clone())));
        }
    }
    Ok((false, None))
}

/// Whether the `knower`'s observation determines the other agent's
/// observation almost surely on the given subset of knower observations.
///
/// Returns the determining map when it exists. Zero-probability knower
/// observations in the subset are unconstrained and map to observation 0.
pub fn knows_observation(
    game: &Game,
    knower: Agent,
    given: &BTreeSet<usize>,
) -> Option<BTreeMap<usize, usize>> {
    let mut map = BTreeMap::new();
    for &obs in given {
        let mut other: Option<usize> = None;
        for entry in &game.joint_table().entries {
            let (own, partner) = match knower {
                Agent::Robot => (entry.robot_obs, entry.human_obs),
                Agent::Human => (entry.human_obs, entry.robot_obs),
            };
            if own != obs {
                continue;
            }
            match other {
                None => other = Some(partner),
                Some(existing) if existing != partner => return None,
                Some(_) => {}
            }
        }
        map.insert(obs, other.unwrap_or(0));
    }
    Some(map)
}

/// Replaces WAIT on the subset by the unilateral action with the same
/// outcome. Requires the robot to know the human's observation there; the
/// output has identical expected payoff.
pub fn normalize_no_wait(
    game: &Game,
    opp: &PolicyPair,
    subset: &BTreeSet<usize>,
) -> Result<PolicyPair, Error> {
    let known = knows_observation(game, Agent::Robot, subset).ok_or_else(|| {
        let bad = subset
            .iter()
            .find(|&&or| {
                let mut seen: Option<usize> = None;
                game.joint_table().entries.iter().any(|e| {
                    if e.robot_obs != or {
                        return false;
                    }
                    match seen {
                        None => {
                            seen = Some(e.human_obs);
                            false
                        }
                        Some(h) => h != e.human_obs,
                    }
                })
            })
            .copied()
            .unwrap_or(0);
        Error::KnowsPreconditionFailed { obs: bad }
    })?;
    let mut robot = opp.robot.clone();
    for (&or, &oh) in &known {
        let through = match opp.robot.actions[or] {
            RobotAction::Act => true,
            RobotAction::Off => false,
            RobotAction::Wait => opp.human.actions[oh] == HumanAction::On,
        };
        robot.actions[or] = if through {
            RobotAction::Act
        } else {
            RobotAction::Off
        };
    }
    Ok(PolicyPair {
        human: opp.human.clone(),
        robot,
    })
}

/// Makes the robot defer on all of `subset`, adjusting the human policy so
/// every outcome (and hence the expected payoff) is unchanged. Requires the
/// knows-that-knows condition: every human observation reachable alongside
/// the subset must itself determine the robot's observation.
pub fn normalize_all_wait(
    game: &Game,
    opp: &PolicyPair,
    subset: &BTreeSet<usize>,
) -> Result<PolicyPair, Error> {
    // Human observations jointly possible with the subset.
    let mut reachable: BTreeSet<usize> = BTreeSet::new();
    for entry in &game.joint_table().entries {
        if subset.contains(&entry.robot_obs) {
            reachable.insert(entry.human_obs);
        }
    }
    // Each of them must determine the robot observation.
    let known = knows_observation(game, Agent::Human, &reachable).ok_or_else(|| {
        let bad = reachable
            .iter()
            .find(|&&oh| {
                let mut seen: Option<usize> = None;
                game.joint_table().entries.iter().any(|e| {
                    if e.human_obs != oh {
                        return false;
                    }
                    match seen {
                        None => {
                            seen = Some(e.robot_obs);
                            false
                        }
                        Some(r) => r != e.robot_obs,
                    }
                })
            })
            .copied()
            .unwrap_or(0);
        Error::KnowsThatKnowsPreconditionFailed { obs: bad }
    })?;

    let mut human = opp.human.clone();
    for (&oh, &or) in &known {
        let through = match opp.robot.actions[or] {
            RobotAction::Act => true,
            RobotAction::Off => false,
            RobotAction::Wait => opp.human.actions[oh] == HumanAction::On,
        };
        human.actions[oh] = if through {
            HumanAction::On
        } else {
            HumanAction::Off
        };
    }
    let mut robot = opp.robot.clone();
    for &or in subset {
        robot.actions[or] = RobotAction::Wait;
    }
    Ok(PolicyPair { human, robot })
}

/// Brute-force optimum over the full cross product of deterministic
/// policies. Independent of the best-response shortcut in [`solve_opp`];
/// used as the slow certification oracle.
pub fn brute_force_optimal_value(game: &Game) -> Result<Rational, Error> {
    let n_oh = game.human_obs().len();
    let n_or = game.robot_obs().len();
    let mut best: Option<Rational> = None;
    for h_bits in 0..(1u64 << n_oh) {
        let human = HumanPolicy::new(
            (0..n_oh)
                .map(|i| {
                    if h_bits >> i & 1 == 1 {
                        HumanAction::On
                    } else {
                        HumanAction::Off
                    }
                })
                .collect(),
        );
        for code in 0..3u64.pow(n_or as u32) {
            let mut c = code;
            let robot = RobotPolicy::new(
                (0..n_or)
                    .map(|_| {
                        let action = match c % 3 {
                            0 => RobotAction::Act,
                            1 => RobotAction::Wait,
                            _ => RobotAction::Off,
                        };
                        c /= 3;
                        action
                    })
                    .collect(),
            );
            let value = policy::expected_payoff(
                game,
                &PolicyPair {
                    human: human.clone(),
                    robot,
                },
            )?;
            if best.as_ref().is_none_or(|b| value > *b) {
                best = Some(value);
            }
        }
    }
    Ok(best.expect("nonempty policy space"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::game::GameSpec;
    use crate::policy::expected_payoff;
    use crate::rational::{rat, rat_int};
    use num_traits::One;

    fn solve_catalog(name: &str) -> (Game, SolveResult) {
        let game = catalog::build_example(name, None).unwrap().game;
        let result = solve_opp(&game).unwrap();
        (game, result)
    }

    fn wait_names(game: &Game, set: &BTreeSet<usize>) -> BTreeSet<String> {
        set.iter()
            .map(|&or| game.robot_obs()[or].clone())
            .collect()
    }

    #[test]
    fn file_deletion_has_unique_opp() {
        let (game, result) = solve_catalog("file-deletion");
        assert_eq!(result.value, rat(7, 4));
        assert_eq!(result.opps.len(), 1);
        let opp = &result.opps[0];
        assert_eq!(
            opp.robot.to_named(&game)["L"],
            RobotAction::Act
        );
        assert_eq!(opp.robot.to_named(&game)["M"], RobotAction::Wait);
        assert_eq!(opp.human.to_named(&game)["1.0"], HumanAction::Off);
        assert_eq!(opp.human.to_named(&game)["2.0"], HumanAction::On);
        assert_eq!(
            wait_names(&game, &result.deference_sets[0]),
            ["M".to_string()].into()
        );
        assert_eq!(result.wait_probability[0], rat(1, 2));
    }

    #[test]
    fn variant_games_match_expected_values() {
        let (game, result) = solve_catalog("variant-coarse");
        assert_eq!(result.value, rat_int(1));
        assert_eq!(result.opps.len(), 1);
        assert_eq!(
            wait_names(&game, &result.deference_sets[0]),
            ["A".to_string(), "B".to_string()].into()
        );

        let (game, result) = solve_catalog("variant-full");
        assert_eq!(result.value, rat(4, 3));
        assert_eq!(result.opps.len(), 1);
        assert_eq!(
            wait_names(&game, &result.deference_sets[0]),
            ["B".to_string()].into()
        );
    }

    #[test]
    fn bug_fixing_scenarios() {
        let (game, result) = solve_catalog("bug-fixing-1");
        assert_eq!(result.value, rat(5, 3));
        assert_eq!(
            wait_names(&game, &result.deference_sets[0]),
            ["F".to_string()].into()
        );

        let (game, result) = solve_catalog("bug-fixing-2");
        assert_eq!(result.value, rat(11, 6));
        assert_eq!(
            wait_names(&game, &result.deference_sets[0]),
            ["F".to_string(), "S".to_string()].into()
        );
    }

    #[test]
    fn neg_voi_structures() {
        let (_, result) = solve_catalog("neg-voi-1");
        assert_eq!(result.value, rat(3, 4));
        assert_eq!(result.opps.len(), 2);

        let (game, result) = solve_catalog("neg-voi-2");
        assert_eq!(result.value, rat_int(1));
        assert_eq!(result.opps.len(), 1);
        assert_eq!(
            result.deference_sets[0],
            game.positive_robot_obs().iter().copied().collect()
        );
    }

    #[test]
    fn solver_matches_brute_force_on_catalog() {
        for name in catalog::catalog_names() {
            let game = catalog::build_example(name, None).unwrap().game;
            let result = solve_opp(&game).unwrap();
            let brute = brute_force_optimal_value(&game).unwrap();
            assert_eq!(result.value, brute, "value mismatch on {name}");
            for pair in &result.opps {
                assert_eq!(
                    expected_payoff(&game, pair).unwrap(),
                    result.value,
                    "non-optimal pair reported on {name}"
                );
            }
        }
    }

    #[test]
    fn waits_less_verdicts() {
        let full = catalog::build_example("variant-full", None).unwrap().game;
        let more_informed = solve_opp(&full).unwrap().opps[0].robot.clone();
        let coarse = catalog::build_example("variant-coarse", None).unwrap().game;
        let less_informed = solve_opp(&coarse).unwrap().opps[0].robot.clone();
        // Both variants share the robot observation set {A, B}.
        assert_eq!(
            waits_less(&more_informed, &less_informed).unwrap(),
            WaitOrdering::StrictlyLess
        );
        assert_eq!(
            waits_less(&more_informed, &more_informed).unwrap(),
            WaitOrdering::Equal
        );
        let wait_a = RobotPolicy::new(vec![RobotAction::Wait, RobotAction::Off]);
        let wait_b = RobotPolicy::new(vec![RobotAction::Off, RobotAction::Wait]);
        assert_eq!(
            waits_less(&wait_a, &wait_b).unwrap(),
            WaitOrdering::Incomparable
        );
        let short = RobotPolicy::new(vec![RobotAction::Wait]);
        assert!(waits_less(&short, &wait_b).is_err());
    }

    #[test]
    fn always_wait_exists_iff_structure_allows() {
        // Robot observations copy the human's: always-wait OPP exists.
        let game = shared_observation_game();
        let (exists, witness) = exists_always_wait_opp(&game).unwrap();
        assert!(exists);
        let witness = witness.unwrap();
        assert_eq!(
            expected_payoff(&game, &witness).unwrap(),
            solve_opp(&game).unwrap().value
        );

        let game = catalog::build_example("file-deletion", None).unwrap().game;
        let (exists, _) = exists_always_wait_opp(&game).unwrap();
        assert!(!exists);
    }

    #[test]
    fn indifferent_game_has_always_wait_opp() {
        let spec = GameSpec {
            states: vec!["s".into()],
            prior: [("s".into(), Rational::one())].into(),
            human_obs: vec!["o".into()],
            robot_obs: vec!["r".into()],
            obs_dist: [(
                "s".into(),
                [(("o".into(), "r".into()), Rational::one())].into(),
            )]
            .into(),
            u_act: [("s".into(), rat_int(2))].into(),
            u_off: [("s".into(), rat_int(2))].into(),
        };
        let game = spec.compile().unwrap();
        let (exists, _) = exists_always_wait_opp(&game).unwrap();
        assert!(exists);
    }

    /// Two states, both players observe the state exactly.
    fn shared_observation_game() -> Game {
        let spec = GameSpec {
            states: vec!["g".into(), "b".into()],
            prior: [("g".into(), rat(1, 2)), ("b".into(), rat(1, 2))].into(),
            human_obs: vec!["g".into(), "b".into()],
            robot_obs: vec!["g".into(), "b".into()],
            obs_dist: [
                (
                    "g".into(),
                    [(("g".into(), "g".into()), Rational::one())].into(),
                ),
                (
                    "b".into(),
                    [(("b".into(), "b".into()), Rational::one())].into(),
                ),
            ]
            .into(),
            u_act: [("g".into(), rat_int(1)), ("b".into(), rat_int(-1))].into(),
            u_off: [("g".into(), rat_int(0)), ("b".into(), rat_int(0))].into(),
        };
        spec.compile().unwrap()
    }

    #[test]
    fn knows_observation_examples() {
        let game = shared_observation_game();
        let all: BTreeSet<usize> = [0, 1].into();
        let map = knows_observation(&game, Agent::Robot, &all).unwrap();
        assert_eq!(map, [(0, 0), (1, 1)].into());

        let fd = catalog::build_example("file-deletion", None).unwrap().game;
        let l = fd.robot_obs_index("L").unwrap();
        assert!(knows_observation(&fd, Agent::Robot, &[l].into()).is_none());

        // A robot that observes a constant knows the human's observation iff
        // the human observation is almost surely constant.
        let constant = catalog::build_example("neg-voi-2", None).unwrap().game;
        let all: BTreeSet<usize> = [0].into();
        assert!(knows_observation(&constant, Agent::Robot, &all).is_none());
    }

    #[test]
    fn normalize_no_wait_removes_deference() {
        let game = shared_observation_game();
        // An all-wait OPP: human approves only the good state.
        let opp = PolicyPair {
            human: HumanPolicy::new(vec![HumanAction::On, HumanAction::Off]),
            robot: RobotPolicy::new(vec![RobotAction::Wait, RobotAction::Wait]),
        };
        let before = expected_payoff(&game, &opp).unwrap();
        let subset: BTreeSet<usize> = [0, 1].into();
        let normalized = normalize_no_wait(&game, &opp, &subset).unwrap();
        assert_eq!(
            normalized.robot.actions,
            vec![RobotAction::Act, RobotAction::Off]
        );
        assert_eq!(expected_payoff(&game, &normalized).unwrap(), before);

        // Empty subset: unchanged.
        let unchanged = normalize_no_wait(&game, &opp, &BTreeSet::new()).unwrap();
        assert_eq!(unchanged, opp);
    }

    #[test]
    fn normalize_no_wait_rejects_uninformed_robot() {
        let game = catalog::build_example("file-deletion", None).unwrap().game;
        let opp = solve_opp(&game).unwrap().opps[0].clone();
        let subset: BTreeSet<usize> = [game.robot_obs_index("M").unwrap()].into();
        assert!(matches!(
            normalize_no_wait(&game, &opp, &subset),
            Err(Error::KnowsPreconditionFailed { .. })
        ));
    }

    #[test]
    fn normalize_all_wait_makes_robot_defer() {
        let game = shared_observation_game();
        let opp = PolicyPair {
            human: HumanPolicy::new(vec![HumanAction::Off, HumanAction::Off]),
            robot: RobotPolicy::new(vec![RobotAction::Act, RobotAction::Off]),
        };
        let before = expected_payoff(&game, &opp).unwrap();
        let subset: BTreeSet<usize> = [0, 1].into();
        let normalized = normalize_all_wait(&game, &opp, &subset).unwrap();
        assert_eq!(
            normalized.robot.actions,
            vec![RobotAction::Wait, RobotAction::Wait]
        );
        assert_eq!(expected_payoff(&game, &normalized).unwrap(), before);
        assert_eq!(
            normalized.human.actions,
            vec![HumanAction::On, HumanAction::Off]
        );

        let unchanged = normalize_all_wait(&game, &opp, &BTreeSet::new()).unwrap();
        assert_eq!(unchanged, opp);
    }

    #[test]
    fn normalize_all_wait_requires_informed_human() {
        let game = catalog::build_example("file-deletion", None).unwrap().game;
        let opp = solve_opp(&game).unwrap().opps[0].clone();
        let subset: BTreeSet<usize> = [game.robot_obs_index("L").unwrap()].into();
        assert!(matches!(
            normalize_all_wait(&game, &opp, &subset),
            Err(Error::KnowsThatKnowsPreconditionFailed { .. })
        ));
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let game = catalog::build_example("file-deletion", None).unwrap().game;
        let opts = SolveOptions { max_candidates: 4 };
        match solve_opp_with(&game, &opts) {
            Err(Error::EnumerationCap { candidates, cap }) => {
                assert_eq!(candidates, 9);
                assert_eq!(cap, 4);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn tie_expansion_counts_against_the_cap() {
        // Payoff-indifferent game: every pair is optimal, so each of the 9
        // robot policies expands 2^4 human completions.
        let states: Vec<String> = (0..4).map(|i| format!("s{i}")).collect();
        let human_obs: Vec<String> = (0..4).map(|i| format!("h{i}")).collect();
        let spec = GameSpec {
            prior: states.iter().map(|s| (s.clone(), rat(1, 4))).collect(),
            u_act: states.iter().map(|s| (s.clone(), rat_int(1))).collect(),
            u_off: states.iter().map(|s| (s.clone(), rat_int(1))).collect(),
            obs_dist: states
                .iter()
                .zip(&human_obs)
                .map(|(s, oh)| {
                    (
                        s.clone(),
                        [((oh.clone(), "r0".to_string()), rat(1, 2)),
                         ((oh.clone(), "r1".to_string()), rat(1, 2))]
                        .into(),
                    )
                })
                .collect(),
            states,
            human_obs,
            robot_obs: vec!["r0".into(), "r1".into()],
        };
        let game = spec.compile().unwrap();
        let opts = SolveOptions { max_candidates: 100 };
        match solve_opp_with(&game, &opts) {
            Err(Error::EnumerationCap { candidates, cap }) => {
                assert!(candidates > 100, "expansions pushed past the cap");
                assert_eq!(cap, 100);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
        // With room to expand, all 9 * 16 pairs are optimal.
        let result = solve_opp(&game).unwrap();
        assert_eq!(result.opps.len(), 9 * 16);
    }

    #[test]
    fn opps_are_reported_in_canonical_order() {
        let (_, result) = solve_catalog("neg-voi-1");
        let mut sorted = result.opps.clone();
        sorted.sort_by(|a, b| (&a.robot, &a.human).cmp(&(&b.robot, &b.human)));
        assert_eq!(result.opps, sorted);
    }
}
