//! Policies and exact payoff evaluation.
//!
//! Deterministic policies are total maps from observation indices to actions,
//! stored as vectors aligned with the game's observation lists. Stochastic
//! policies attach an action distribution per observation; the two players
//! always randomize independently.
//!
//! Zero-probability observations are payoff-irrelevant. All policy-producing
//! operations in this crate pin them to OFF so enumeration stays finite and
//! the reported policy sets carry no spurious duplicates.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::game::{Agent, Game};
use crate::rational::Rational;

/// The human's move when the robot waits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HumanAction {
    On,
    Off,
}

/// The robot's move: act unilaterally, wait for the human, or shut off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RobotAction {
    Act,
    Wait,
    Off,
}

impl HumanAction {
    pub fn as_str(&self) -> &'static str {
        match self {
            HumanAction::On => "ON",
            HumanAction::Off => "OFF",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "ON" => Some(HumanAction::On),
            "OFF" => Some(HumanAction::Off),
            _ => None,
        }
    }
}

impl RobotAction {
    pub fn as_str(&self) -> &'static str {
        match self {
            RobotAction::Act => "ACT",
            RobotAction::Wait => "WAIT",
            RobotAction::Off => "OFF",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "ACT" => Some(RobotAction::Act),
            "WAIT" => Some(RobotAction::Wait),
            "OFF" => Some(RobotAction::Off),
            _ => None,
        }
    }
}

/// Total map human observation index -> {ON, OFF}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HumanPolicy {
    pub actions: Vec<HumanAction>,
}

/// Total map robot observation index -> {ACT, WAIT, OFF}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RobotPolicy {
    pub actions: Vec<RobotAction>,
}

impl HumanPolicy {
    pub fn new(actions: Vec<HumanAction>) -> Self {
        HumanPolicy { actions }
    }

    /// Builds a policy from observation names.
    pub fn from_named(game: &Game, choices: &BTreeMap<String, HumanAction>) -> Result<Self, Error> {
        let mut actions = vec![HumanAction::Off; game.human_obs().len()];
        for (name, action) in choices {
            let index = game
                .human_obs_index(name)
                .ok_or_else(|| Error::UnknownObservation {
                    agent: Agent::Human,
                    obs: name.clone(),
                })?;
            actions[index] = *action;
        }
        if choices.len() != game.human_obs().len() {
            return Err(Error::PolicySize {
                agent: Agent::Human,
                got: choices.len(),
                expected: game.human_obs().len(),
            });
        }
        Ok(HumanPolicy { actions })
    }

    pub fn to_named(&self, game: &Game) -> BTreeMap<String, HumanAction> {
        game.human_obs()
            .iter()
            .zip(&self.actions)
            .map(|(o, a)| (o.clone(), *a))
            .collect()
    }
}

impl RobotPolicy {
    pub fn new(actions: Vec<RobotAction>) -> Self {
        RobotPolicy { actions }
    }

    pub fn uniform(game: &Game, action: RobotAction) -> Self {
        RobotPolicy {
            actions: vec![action; game.robot_obs().len()],
        }
    }

    pub fn from_named(game: &Game, choices: &BTreeMap<String, RobotAction>) -> Result<Self, Error> {
        let mut actions = vec![RobotAction::Off; game.robot_obs().len()];
        for (name, action) in choices {
            let index = game
                .robot_obs_index(name)
                .ok_or_else(|| Error::UnknownObservation {
                    agent: Agent::Robot,
                    obs: name.clone(),
                })?;
            actions[index] = *action;
        }
        if choices.len() != game.robot_obs().len() {
            return Err(Error::PolicySize {
                agent: Agent::Robot,
                got: choices.len(),
                expected: game.robot_obs().len(),
            });
        }
        Ok(RobotPolicy { actions })
    }

    pub fn to_named(&self, game: &Game) -> BTreeMap<String, RobotAction> {
        game.robot_obs()
            .iter()
            .zip(&self.actions)
            .map(|(o, a)| (o.clone(), *a))
            .collect()
    }

    /// Observation indices on which the robot waits.
    pub fn wait_set(&self) -> std::collections::BTreeSet<usize> {
        self.actions
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == RobotAction::Wait)
            .map(|(i, _)| i)
            .collect()
    }
}

/// A deterministic policy pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolicyPair {
    pub human: HumanPolicy,
    pub robot: RobotPolicy,
}

/// Distribution over the human's two actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HumanActionDist {
    pub on: Rational,
    pub off: Rational,
}

/// Distribution over the robot's three actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobotActionDist {
    pub act: Rational,
    pub wait: Rational,
    pub off: Rational,
}

/// Independently randomizing policy pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticPolicyPair {
    pub human: Vec<HumanActionDist>,
    pub robot: Vec<RobotActionDist>,
}

impl StochasticPolicyPair {
    /// Embeds a deterministic pair as point masses.
    pub fn from_deterministic(pair: &PolicyPair) -> Self {
        let human = pair
            .human
            .actions
            .iter()
            .map(|a| match a {
                HumanAction::On => HumanActionDist {
                    on: Rational::one(),
                    off: Rational::zero(),
                },
                HumanAction::Off => HumanActionDist {
                    on: Rational::zero(),
                    off: Rational::one(),
                },
            })
            .collect();
        let robot = pair
            .robot
            .actions
            .iter()
            .map(|a| {
                let mut dist = RobotActionDist {
                    act: Rational::zero(),
                    wait: Rational::zero(),
                    off: Rational::zero(),
                };
                match a {
                    RobotAction::Act => dist.act = Rational::one(),
                    RobotAction::Wait => dist.wait = Rational::one(),
                    RobotAction::Off => dist.off = Rational::one(),
                }
                dist
            })
            .collect();
        StochasticPolicyPair { human, robot }
    }

    fn check(&self, game: &Game) -> Result<(), Error> {
        if self.human.len() != game.human_obs().len() {
            return Err(Error::PolicySize {
                agent: Agent::Human,
                got: self.human.len(),
                expected: game.human_obs().len(),
            });
        }
        if self.robot.len() != game.robot_obs().len() {
            return Err(Error::PolicySize {
                agent: Agent::Robot,
                got: self.robot.len(),
                expected: game.robot_obs().len(),
            });
        }
        for (i, d) in self.human.iter().enumerate() {
            let ok = !d.on.is_negative()
                && !d.off.is_negative()
                && (&d.on + &d.off).is_one();
            if !ok {
                return Err(Error::BadActionDistribution {
                    agent: Agent::Human,
                    obs: i,
                });
            }
        }
        for (i, d) in self.robot.iter().enumerate() {
            let ok = !d.act.is_negative()
                && !d.wait.is_negative()
                && !d.off.is_negative()
                && (&d.act + &d.wait + &d.off).is_one();
            if !ok {
                return Err(Error::BadActionDistribution {
                    agent: Agent::Robot,
                    obs: i,
                });
            }
        }
        Ok(())
    }
}

/// The indicator that the action goes through.
///
/// `human` must be present exactly when the robot waits; anything else is a
/// caller bug and panics.
pub fn action_goes_through(human: Option<HumanAction>, robot: RobotAction) -> bool {
    assert_eq!(
        human.is_some(),
        robot == RobotAction::Wait,
        "the human moves exactly when the robot waits"
    );
    match robot {
        RobotAction::Act => true,
        RobotAction::Off => false,
        RobotAction::Wait => human == Some(HumanAction::On),
    }
}

fn check_pair(game: &Game, pair: &PolicyPair) -> Result<(), Error> {
    if pair.human.actions.len() != game.human_obs().len() {
        return Err(Error::PolicySize {
            agent: Agent::Human,
            got: pair.human.actions.len(),
            expected: game.human_obs().len(),
        });
    }
    if pair.robot.actions.len() != game.robot_obs().len() {
        return Err(Error::PolicySize {
            agent: Agent::Robot,
            got: pair.robot.actions.len(),
            expected: game.robot_obs().len(),
        });
    }
    Ok(())
}

/// Exact expected common payoff of a deterministic pair.
pub fn expected_payoff(game: &Game, pair: &PolicyPair) -> Result<Rational, Error> {
    check_pair(game, pair)?;
    let mut total = Rational::zero();
    for entry in &game.joint_table().entries {
        let robot = pair.robot.actions[entry.robot_obs];
        let through = match robot {
            RobotAction::Wait => Some(pair.human.actions[entry.human_obs]) == Some(HumanAction::On),
            RobotAction::Act => true,
            RobotAction::Off => false,
        };
        let payoff = if through {
            &game.u_act()[entry.state]
        } else {
            &game.u_off()[entry.state]
        };
        total += &entry.prob * payoff;
    }
    Ok(total)
}

/// Exact expected payoff under independent randomization.
pub fn evaluate_stochastic(game: &Game, pair: &StochasticPolicyPair) -> Result<Rational, Error> {
    pair.check(game)?;
    let mut total = Rational::zero();
    for entry in &game.joint_table().entries {
        let robot = &pair.robot[entry.robot_obs];
        let human = &pair.human[entry.human_obs];
        let u_act = &game.u_act()[entry.state];
        let u_off = &game.u_off()[entry.state];
        let wait_value = &human.on * u_act + &human.off * u_off;
        let value = &robot.act * u_act + &robot.off * u_off + &robot.wait * wait_value;
        total += &entry.prob * value;
    }
    Ok(total)
}

/// The two per-observation payoff masses the human chooses between, against a
/// robot that waits with the given per-observation probability.
fn human_choice_masses(
    game: &Game,
    wait_prob: impl Fn(usize) -> Rational,
) -> Vec<(Rational, Rational)> {
    let n_oh = game.human_obs().len();
    let mut masses = vec![(Rational::zero(), Rational::zero()); n_oh];
    for entry in &game.joint_table().entries {
        let w = wait_prob(entry.robot_obs);
        if w.is_zero() {
            continue;
        }
        let scaled = &entry.prob * w;
        masses[entry.human_obs].0 += &scaled * &game.u_act()[entry.state];
        masses[entry.human_obs].1 += &scaled * &game.u_off()[entry.state];
    }
    masses
}

/// All deterministic human best responses to a fixed robot policy.
///
/// Per observation the human compares the exact payoff mass of ON against
/// OFF on the cells where the robot waits; ties expand the returned list.
/// Zero-probability observations are pinned to OFF.
pub fn best_response_human(game: &Game, robot: &RobotPolicy) -> Result<Vec<HumanPolicy>, Error> {
    if robot.actions.len() != game.robot_obs().len() {
        return Err(Error::PolicySize {
            agent: Agent::Robot,
            got: robot.actions.len(),
            expected: game.robot_obs().len(),
        });
    }
    let masses = human_choice_masses(game, |or| {
        if robot.actions[or] == RobotAction::Wait {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let mut choices: Vec<Vec<HumanAction>> = Vec::with_capacity(masses.len());
    for (oh, (on, off)) in masses.iter().enumerate() {
        if !game.human_marginal()[oh].is_positive() {
            choices.push(vec![HumanAction::Off]);
        } else if on > off {
            choices.push(vec![HumanAction::On]);
        } else if on < off {
            choices.push(vec![HumanAction::Off]);
        } else {
            choices.push(vec![HumanAction::On, HumanAction::Off]);
        }
    }
    Ok(expand_human(&choices))
}

fn expand_human(choices: &[Vec<HumanAction>]) -> Vec<HumanPolicy> {
    let mut policies = vec![Vec::with_capacity(choices.len())];
    for per_obs in choices {
        let mut next = Vec::with_capacity(policies.len() * per_obs.len());
        for partial in &policies {
            for action in per_obs {
                let mut extended = partial.clone();
                extended.push(*action);
                next.push(extended);
            }
        }
        policies = next;
    }
    let mut policies: Vec<HumanPolicy> = policies.into_iter().map(HumanPolicy::new).collect();
    policies.sort();
    policies
}

fn expand_robot(choices: &[Vec<RobotAction>]) -> Vec<RobotPolicy> {
    let mut policies = vec![Vec::with_capacity(choices.len())];
    for per_obs in choices {
        let mut next = Vec::with_capacity(policies.len() * per_obs.len());
        for partial in &policies {
            for action in per_obs {
                let mut extended = partial.clone();
                extended.push(*action);
                next.push(extended);
            }
        }
        policies = next;
    }
    let mut policies: Vec<RobotPolicy> = policies.into_iter().map(RobotPolicy::new).collect();
    policies.sort();
    policies
}

/// The robot's three conditional payoff masses (act, wait, off) per
/// observation against a fixed human policy. `visits` counts the joint
/// entries actually read, for polynomial-runtime instrumentation.
pub(crate) fn robot_choice_masses_counted(
    game: &Game,
    human: &HumanPolicy,
    visits: &mut u64,
) -> Vec<(Rational, Rational, Rational)> {
    let n_or = game.robot_obs().len();
    let mut masses = vec![(Rational::zero(), Rational::zero(), Rational::zero()); n_or];
    for entry in &game.joint_table().entries {
        *visits += 1;
        let u_act = &entry.prob * &game.u_act()[entry.state];
        let u_off = &entry.prob * &game.u_off()[entry.state];
        let slot = &mut masses[entry.robot_obs];
        match human.actions[entry.human_obs] {
            HumanAction::On => slot.1 += &u_act,
            HumanAction::Off => slot.1 += &u_off,
        }
        slot.0 += u_act;
        slot.2 += u_off;
    }
    masses
}

pub(crate) fn robot_choice_masses(
    game: &Game,
    human: &HumanPolicy,
) -> Vec<(Rational, Rational, Rational)> {
    robot_choice_masses_counted(game, human, &mut 0)
}

/// All deterministic robot best responses to a fixed human policy; ties
/// expand the list, zero-probability observations are pinned to OFF.
pub fn best_response_robot(game: &Game, human: &HumanPolicy) -> Result<Vec<RobotPolicy>, Error> {
    if human.actions.len() != game.human_obs().len() {
        return Err(Error::PolicySize {
            agent: Agent::Human,
            got: human.actions.len(),
            expected: game.human_obs().len(),
        });
    }
    let masses = robot_choice_masses(game, human);
    let mut choices: Vec<Vec<RobotAction>> = Vec::with_capacity(masses.len());
    for (or, (act, wait, off)) in masses.iter().enumerate() {
        if !game.robot_marginal()[or].is_positive() {
            choices.push(vec![RobotAction::Off]);
            continue;
        }
        let best = [act, wait, off].into_iter().max().unwrap().clone();
        let mut tied = Vec::new();
        if *act == best {
            tied.push(RobotAction::Act);
        }
        if *wait == best {
            tied.push(RobotAction::Wait);
        }
        if *off == best {
            tied.push(RobotAction::Off);
        }
        choices.push(tied);
    }
    Ok(expand_robot(&choices))
}

/// Collapses a stochastic pair into a deterministic pair that is at least as
/// good, by replacing the human and then the robot with a deterministic best
/// response.
///
/// Tie-breaking prefers actions the input plays with positive probability,
/// so an optimal input yields an optimal deterministic pair supported by it;
/// in particular a point-mass input comes back unchanged. Remaining ties are
/// settled in a fixed order (ON first; WAIT, then OFF, then ACT) so the
/// output is reproducible.
pub fn derandomize(game: &Game, pair: &StochasticPolicyPair) -> Result<PolicyPair, Error> {
    pair.check(game)?;

    // Human step: best response to the stochastic robot.
    let masses = human_choice_masses(game, |or| pair.robot[or].wait.clone());
    let mut human_actions = Vec::with_capacity(masses.len());
    for (oh, (on, off)) in masses.iter().enumerate() {
        if !game.human_marginal()[oh].is_positive() {
            human_actions.push(HumanAction::Off);
            continue;
        }
        let action = if on > off {
            HumanAction::On
        } else if off > on {
            HumanAction::Off
        } else {
            let dist = &pair.human[oh];
            if dist.on.is_positive() {
                HumanAction::On
            } else {
                HumanAction::Off
            }
        };
        human_actions.push(action);
    }
    let human = HumanPolicy::new(human_actions);

    // Robot step: best response to the now-deterministic human.
    let masses = robot_choice_masses(game, &human);
    let mut robot_actions = Vec::with_capacity(masses.len());
    for (or, (act, wait, off)) in masses.iter().enumerate() {
        if !game.robot_marginal()[or].is_positive() {
            robot_actions.push(RobotAction::Off);
            continue;
        }
        let best = [act, wait, off].into_iter().max().unwrap().clone();
        let dist = &pair.robot[or];
        let supported = |action: RobotAction| match action {
            RobotAction::Act => dist.act.is_positive(),
            RobotAction::Wait => dist.wait.is_positive(),
            RobotAction::Off => dist.off.is_positive(),
        };
        let tied: Vec<RobotAction> = [
            (RobotAction::Wait, wait),
            (RobotAction::Off, off),
            (RobotAction::Act, act),
        ]
        .into_iter()
        .filter(|(_, mass)| **mass == best)
        .map(|(a, _)| a)
        .collect();
        let action = tied
            .iter()
            .copied()
            .find(|a| supported(*a))
            .unwrap_or(tied[0]);
        robot_actions.push(action);
    }

    Ok(PolicyPair {
        human,
        robot: RobotPolicy::new(robot_actions),
    })
}
