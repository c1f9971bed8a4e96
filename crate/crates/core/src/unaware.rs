//! The robot-unaware human and the robot's polynomial-time best response.
//!
//! A robot-unaware human thresholds `E[u_act(S) - u_off(S) | her observation]`
//! at zero, ignoring what the robot's deferral would reveal about the state.
//! Pairing that policy with a robot best response gives the unaware optimal
//! pair. Everything here is a per-observation computation over the joint
//! table; no policy enumeration happens, so the whole pipeline is polynomial
//! in the table sizes (in contrast to the NP-hard exact solver).

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::game::Game;
use crate::policy::{HumanAction, HumanPolicy, RobotAction, RobotPolicy};
use crate::rational::Rational;

/// What the human does on observations where the defining expectation is
/// exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    On,
    Off,
    /// Return every completion.
    Both,
}

/// The unaware human policy paired with the robot's best responses.
///
/// `robot` applies the WAIT > OFF > ACT tie preference; `robots` lists every
/// best response (ties expanded, sorted). `ties` is the set of human
/// observations whose defining expectation is exactly zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnawareSolveResult {
    pub human: HumanPolicy,
    pub robot: RobotPolicy,
    pub robots: Vec<RobotPolicy>,
    pub value: Rational,
    pub ties: BTreeSet<usize>,
}

/// Number of joint-table entries read by the unaware computations, updated
/// by the sweeps below so polynomial-runtime assertions measure real work.
#[derive(Debug, Default, Clone, Copy)]
pub struct EvalStats {
    pub table_visits: u64,
}

/// Per-observation sign of `E[u_act - u_off | obs]` for the human, with the
/// tie set. Zero-probability observations are pinned to OFF.
fn human_signs(game: &Game, stats: &mut EvalStats) -> (Vec<Option<HumanAction>>, BTreeSet<usize>) {
    let n_oh = game.human_obs().len();
    let mut diffs = vec![Rational::zero(); n_oh];
    for entry in &game.joint_table().entries {
        stats.table_visits += 1;
        let delta = &game.u_act()[entry.state] - &game.u_off()[entry.state];
        diffs[entry.human_obs] += &entry.prob * delta;
    }
    let mut ties = BTreeSet::new();
    let mut signs = Vec::with_capacity(n_oh);
    for (oh, diff) in diffs.iter().enumerate() {
        if !game.human_marginal()[oh].is_positive() {
            signs.push(Some(HumanAction::Off));
        } else if diff.is_positive() {
            signs.push(Some(HumanAction::On));
        } else if diff.is_negative() {
            signs.push(Some(HumanAction::Off));
        } else {
            ties.insert(oh);
            signs.push(None);
        }
    }
    (signs, ties)
}

/// The robot-unaware human policy.
///
/// ON where the conditional expectation of `u_act - u_off` is positive, OFF
/// where negative; `tie_break` settles exact zeroes (`Both` expands every
/// completion). The expectation is not conditioned on the robot's action.
pub fn unaware_human_policy(game: &Game, tie_break: TieBreak) -> Vec<HumanPolicy> {
    let (signs, _ties) = human_signs(game, &mut EvalStats::default());
    completions(&signs, tie_break)
}

fn completions(signs: &[Option<HumanAction>], tie_break: TieBreak) -> Vec<HumanPolicy> {
    match tie_break {
        TieBreak::On | TieBreak::Off => {
            let fill = if tie_break == TieBreak::On {
                HumanAction::On
            } else {
                HumanAction::Off
            };
            vec![HumanPolicy::new(
                signs.iter().map(|s| s.unwrap_or(fill)).collect(),
            )]
        }
        TieBreak::Both => {
            let mut policies = vec![Vec::with_capacity(signs.len())];
            for sign in signs {
                let options = match sign {
                    Some(action) => vec![*action],
                    None => vec![HumanAction::On, HumanAction::Off],
                };
                let mut next = Vec::with_capacity(policies.len() * options.len());
                for partial in &policies {
                    for action in &options {
                        let mut extended = partial.clone();
                        extended.push(*action);
                        next.push(extended);
                    }
                }
                policies = next;
            }
            let mut policies: Vec<HumanPolicy> =
                policies.into_iter().map(HumanPolicy::new).collect();
            policies.sort();
            policies
        }
    }
}

/// The robot's exact best response to a fixed human policy, computed per
/// observation from the three conditional payoff masses.
///
/// Tie preference WAIT > OFF > ACT selects `robot`; all tied alternatives are
/// recorded in `robots`. This is a true three-way argmax: when both waiting
/// margins are negative it still picks the better of ACT and OFF.
pub fn robot_best_response_unaware(game: &Game, human: &HumanPolicy) -> UnawareSolveResult {
    robot_best_response_counted(game, human, &mut EvalStats::default())
}

fn robot_best_response_counted(
    game: &Game,
    human: &HumanPolicy,
    stats: &mut EvalStats,
) -> UnawareSolveResult {
    let masses =
        crate::policy::robot_choice_masses_counted(game, human, &mut stats.table_visits);
    let n_or = game.robot_obs().len();
    let mut preferred = Vec::with_capacity(n_or);
    let mut tied_sets: Vec<Vec<RobotAction>> = Vec::with_capacity(n_or);
    let mut value = Rational::zero();
    for (or, (act, wait, off)) in masses.iter().enumerate() {
        if !game.robot_marginal()[or].is_positive() {
            preferred.push(RobotAction::Off);
            tied_sets.push(vec![RobotAction::Off]);
            continue;
        }
        let best = [act, wait, off].into_iter().max().unwrap().clone();
        value += &best;
        let tied: Vec<RobotAction> = [
            (RobotAction::Wait, wait),
            (RobotAction::Off, off),
            (RobotAction::Act, act),
        ]
        .into_iter()
        .filter(|(_, mass)| **mass == best)
        .map(|(a, _)| a)
        .collect();
        preferred.push(tied[0]);
        tied_sets.push(tied);
    }

    let mut robots = vec![Vec::with_capacity(n_or)];
    for tied in &tied_sets {
        let mut next = Vec::with_capacity(robots.len() * tied.len());
        for partial in &robots {
            for action in tied {
                let mut extended = partial.clone();
                extended.push(*action);
                next.push(extended);
            }
        }
        robots = next;
    }
    let mut robots: Vec<RobotPolicy> = robots.into_iter().map(RobotPolicy::new).collect();
    robots.sort();

    UnawareSolveResult {
        human: human.clone(),
        robot: RobotPolicy::new(preferred),
        robots,
        value,
        ties: BTreeSet::new(),
    }
}

/// The two-delta cascade response: ACT if waiting loses mass against acting,
/// else OFF if waiting loses against shutting off, else WAIT.
///
/// Kept for comparison with [`robot_best_response_unaware`]: when both deltas
/// are negative the cascade commits to ACT even if OFF is strictly better, so
/// it is not always a best response.
pub fn robot_response_cascade(game: &Game, human: &HumanPolicy) -> RobotPolicy {
    let masses = crate::policy::robot_choice_masses(game, human);
    let actions = masses
        .iter()
        .enumerate()
        .map(|(or, (act, wait, off))| {
            if !game.robot_marginal()[or].is_positive() {
                return RobotAction::Off;
            }
            let delta_act = wait - act;
            let delta_off = wait - off;
            if delta_act.is_negative() {
                RobotAction::Act
            } else if delta_off.is_negative() {
                RobotAction::Off
            } else {
                RobotAction::Wait
            }
        })
        .collect();
    RobotPolicy::new(actions)
}

/// The robot-unaware optimal pairs: the unaware human policy (one per tie
/// completion) with the robot's best response to each.
pub fn unaware_opp(game: &Game, tie_break: TieBreak) -> Vec<UnawareSolveResult> {
    unaware_opp_counted(game, tie_break).0
}

/// [`unaware_opp`] plus the number of joint-table entries actually read, for
/// checking that the computation stays polynomial in the table sizes.
pub fn unaware_opp_counted(
    game: &Game,
    tie_break: TieBreak,
) -> (Vec<UnawareSolveResult>, EvalStats) {
    let mut stats = EvalStats::default();
    let (signs, ties) = human_signs(game, &mut stats);
    let results = completions(&signs, tie_break)
        .into_iter()
        .map(|human| {
            let mut result = robot_best_response_counted(game, &human, &mut stats);
            result.ties = ties.clone();
            result
        })
        .collect();
    (results, stats)
}
