//! Cheap talk: one simultaneous round of costless messages before actions.
//!
//! Each player sends a single message from a finite set after seeing their
//! observation; message choices may depend only on the sender's own
//! observation (the simultaneity constraint). Messages never enter the
//! payoff, so they matter only through the receiving player's action map.
//! Singleton message sets recover the plain game exactly.
//!
//! The solver enumerates robot message maps, robot action maps (per
//! observation and received human message), and human message maps; the
//! human action map is filled by pointwise best response per (observation,
//! received message) cell, branching on exact ties. Optimal pairs are
//! reported modulo relabeling of messages, and every payoff-irrelevant
//! coordinate (actions on unreachable cells, messages the receiver never
//! conditions on) is pinned canonically; raw enumeration would otherwise
//! inflate the set by |M_H|!·|M_R|! relabelings and arbitrary choices on
//! dead cells.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::Error;
use crate::game::{Agent, Game};
use crate::policy::{HumanAction, PolicyPair, RobotAction};
use crate::rational::Rational;
use crate::solver::SolveOptions;

/// Message-set sizes for the two players. Size 1 means no communication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageSystem {
    pub human: usize,
    pub robot: usize,
}

impl MessageSystem {
    pub fn new(human: usize, robot: usize) -> Result<Self, Error> {
        if human == 0 || robot == 0 {
            return Err(Error::EmptyMessageSet);
        }
        Ok(MessageSystem { human, robot })
    }

    pub fn silent() -> Self {
        MessageSystem { human: 1, robot: 1 }
    }
}

/// Componentwise comparison of message systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expressiveness {
    More,
    Less,
    Equal,
    Incomparable,
}

/// Which system can say at least as much, componentwise.
pub fn compare_expressiveness(m1: &MessageSystem, m2: &MessageSystem) -> Expressiveness {
    use std::cmp::Ordering;
    match (m1.human.cmp(&m2.human), m1.robot.cmp(&m2.robot)) {
        (Ordering::Equal, Ordering::Equal) => Expressiveness::Equal,
        (Ordering::Less | Ordering::Equal, Ordering::Less | Ordering::Equal) => {
            Expressiveness::Less
        }
        (Ordering::Greater | Ordering::Equal, Ordering::Greater | Ordering::Equal) => {
            Expressiveness::More
        }
        _ => Expressiveness::Incomparable,
    }
}

/// A deterministic policy pair with messages.
///
/// `human_msg[oh]` / `robot_msg[or]` are the sent messages; `human_act[oh][m]`
/// is the human's choice after receiving robot message `m`, and
/// `robot_act[or][m]` the robot's action after receiving human message `m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommPolicyPair {
    pub human_msg: Vec<usize>,
    pub human_act: Vec<Vec<HumanAction>>,
    pub robot_msg: Vec<usize>,
    pub robot_act: Vec<Vec<RobotAction>>,
}

impl CommPolicyPair {
    /// Embeds a plain pair with singleton message sets.
    pub fn from_plain(pair: &PolicyPair) -> Self {
        CommPolicyPair {
            human_msg: vec![0; pair.human.actions.len()],
            human_act: pair.human.actions.iter().map(|a| vec![*a]).collect(),
            robot_msg: vec![0; pair.robot.actions.len()],
            robot_act: pair.robot.actions.iter().map(|a| vec![*a]).collect(),
        }
    }

    /// The plain pair, when both message sets are singletons.
    pub fn as_plain(&self) -> Option<PolicyPair> {
        let human_singleton = self.human_act.iter().all(|row| row.len() == 1);
        let robot_singleton = self.robot_act.iter().all(|row| row.len() == 1);
        if !human_singleton || !robot_singleton {
            return None;
        }
        Some(PolicyPair {
            human: crate::policy::HumanPolicy::new(
                self.human_act.iter().map(|row| row[0]).collect(),
            ),
            robot: crate::policy::RobotPolicy::new(
                self.robot_act.iter().map(|row| row[0]).collect(),
            ),
        })
    }

    fn check(&self, game: &Game, msgs: &MessageSystem) -> Result<(), Error> {
        let n_oh = game.human_obs().len();
        let n_or = game.robot_obs().len();
        if self.human_msg.len() != n_oh || self.human_act.len() != n_oh {
            return Err(Error::PolicySize {
                agent: Agent::Human,
                got: self.human_msg.len().max(self.human_act.len()),
                expected: n_oh,
            });
        }
        if self.robot_msg.len() != n_or || self.robot_act.len() != n_or {
            return Err(Error::PolicySize {
                agent: Agent::Robot,
                got: self.robot_msg.len().max(self.robot_act.len()),
                expected: n_or,
            });
        }
        for &m in &self.human_msg {
            if m >= msgs.human {
                return Err(Error::MessageOutOfRange {
                    agent: Agent::Human,
                    index: m,
                    size: msgs.human,
                });
            }
        }
        for &m in &self.robot_msg {
            if m >= msgs.robot {
                return Err(Error::MessageOutOfRange {
                    agent: Agent::Robot,
                    index: m,
                    size: msgs.robot,
                });
            }
        }
        for row in &self.human_act {
            if row.len() != msgs.robot {
                return Err(Error::MessageOutOfRange {
                    agent: Agent::Robot,
                    index: row.len(),
                    size: msgs.robot,
                });
            }
        }
        for row in &self.robot_act {
            if row.len() != msgs.human {
                return Err(Error::MessageOutOfRange {
                    agent: Agent::Human,
                    index: row.len(),
                    size: msgs.human,
                });
            }
        }
        Ok(())
    }
}

/// Exact expected payoff of a cheap-talk pair. Messages affect the payoff
/// only through the action maps.
pub fn expected_payoff_comm(
    game: &Game,
    msgs: &MessageSystem,
    pair: &CommPolicyPair,
) -> Result<Rational, Error> {
    pair.check(game, msgs)?;
    let mut total = Rational::zero();
    for entry in &game.joint_table().entries {
        let human_message = pair.human_msg[entry.human_obs];
        let robot_message = pair.robot_msg[entry.robot_obs];
        let robot = pair.robot_act[entry.robot_obs][human_message];
        let through = match robot {
            RobotAction::Act => true,
            RobotAction::Off => false,
            RobotAction::Wait => {
                pair.human_act[entry.human_obs][robot_message] == HumanAction::On
            }
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

/// Optimal value and all optimal cheap-talk pairs, modulo message
/// relabeling.
///
/// `wait_cells[i]` lists the reachable (robot observation, human message)
/// cells where `opps[i]` waits; `always_wait_sets[i]` aggregates to the
/// observations where it waits for every message it can receive there, and
/// `wait_probability[i]` is that set's prior mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommSolveResult {
    pub value: Rational,
    pub opps: Vec<CommPolicyPair>,
    pub wait_cells: Vec<BTreeSet<(usize, usize)>>,
    pub always_wait_sets: Vec<BTreeSet<usize>>,
    pub wait_probability: Vec<Rational>,
}

struct CommEnum<'g> {
    game: &'g Game,
    msgs: MessageSystem,
    positive_oh: Vec<usize>,
    positive_or: Vec<usize>,
    /// Joint reachability of (oh, or) pairs.
    pair_positive: Vec<bool>,
    robot_msg_count: u64,
    robot_act_count: u64,
    human_msg_count: u64,
}

impl<'g> CommEnum<'g> {
    fn new(game: &'g Game, msgs: MessageSystem, cap: u64) -> Result<Self, Error> {
        let positive_oh = game.positive_human_obs().to_vec();
        let positive_or = game.positive_robot_obs().to_vec();
        let n_or = game.robot_obs().len();
        let pair_positive = (0..game.human_obs().len() * n_or)
            .map(|i| game.pair_prob(i / n_or, i % n_or).is_positive())
            .collect();

        let pow = |base: usize, exponent: usize| -> Option<u128> {
            let exponent = u32::try_from(exponent).ok()?;
            (base as u128).checked_pow(exponent)
        };
        let robot_msg_count = pow(msgs.robot, positive_or.len());
        let robot_act_count = positive_or
            .len()
            .checked_mul(msgs.human)
            .and_then(|cells| pow(3, cells));
        let human_msg_count = pow(msgs.human, positive_oh.len());
        let total = match (robot_msg_count, robot_act_count, human_msg_count) {
            (Some(a), Some(b), Some(c)) => a.checked_mul(b).and_then(|ab| ab.checked_mul(c)),
            _ => None,
        };
        let total = total.unwrap_or(u128::MAX);
        if total > cap as u128 {
            return Err(Error::EnumerationCap {
                candidates: total,
                cap,
            });
        }
        Ok(CommEnum {
            game,
            msgs,
            positive_oh,
            positive_or,
            pair_positive,
            robot_msg_count: robot_msg_count.unwrap() as u64,
            robot_act_count: robot_act_count.unwrap() as u64,
            human_msg_count: human_msg_count.unwrap() as u64,
        })
    }

    fn total(&self) -> u64 {
        self.robot_msg_count * self.robot_act_count * self.human_msg_count
    }

    fn pair_positive(&self, oh: usize, or: usize) -> bool {
        self.pair_positive[oh * self.game.robot_obs().len() + or]
    }

    /// Decodes a candidate index into message maps and the robot action map.
    fn decode(&self, code: u64) -> (Vec<usize>, Vec<Vec<RobotAction>>, Vec<usize>) {
        let n_oh = self.game.human_obs().len();
        let n_or = self.game.robot_obs().len();
        let hm_code = code % self.human_msg_count;
        let rest = code / self.human_msg_count;
        let ra_code = rest % self.robot_act_count;
        let rm_code = rest / self.robot_act_count;

        let mut robot_msg = vec![0usize; n_or];
        let mut rem = rm_code;
        for (i, &or) in self.positive_or.iter().enumerate() {
            let place = (self.msgs.robot as u64).pow((self.positive_or.len() - 1 - i) as u32);
            robot_msg[or] = (rem / place) as usize;
            rem %= place;
        }

        let mut robot_act = vec![vec![RobotAction::Off; self.msgs.human]; n_or];
        let mut rem = ra_code;
        let digits = self.positive_or.len() * self.msgs.human;
        for i in 0..digits {
            let place = 3u64.pow((digits - 1 - i) as u32);
            let digit = rem / place;
            rem %= place;
            let or = self.positive_or[i / self.msgs.human];
            let m = i % self.msgs.human;
            robot_act[or][m] = match digit {
                0 => RobotAction::Act,
                1 => RobotAction::Wait,
                _ => RobotAction::Off,
            };
        }

        let mut human_msg = vec![0usize; n_oh];
        let mut rem = hm_code;
        for (i, &oh) in self.positive_oh.iter().enumerate() {
            let place = (self.msgs.human as u64).pow((self.positive_oh.len() - 1 - i) as u32);
            human_msg[oh] = (rem / place) as usize;
            rem %= place;
        }

        (human_msg, robot_act, robot_msg)
    }

    /// Value of a candidate with the human action map best-responded per
    /// (observation, received message) cell.
    fn evaluate(&self, code: u64) -> BigInt {
        let (human_msg, robot_act, robot_msg) = self.decode(code);
        let cells = self.game.scaled_cells();
        let n_or = self.game.robot_obs().len();
        let mut total = BigInt::zero();
        // on/off masses per (oh, received robot message) bucket
        let mut buckets =
            vec![(BigInt::zero(), BigInt::zero()); self.game.human_obs().len() * self.msgs.robot];
        for &oh in &self.positive_oh {
            let sent = human_msg[oh];
            for &or in &self.positive_or {
                match robot_act[or][sent] {
                    RobotAction::Act => total += &cells.act[oh * n_or + or],
                    RobotAction::Off => total += &cells.off[oh * n_or + or],
                    RobotAction::Wait => {
                        let bucket = &mut buckets[oh * self.msgs.robot + robot_msg[or]];
                        bucket.0 += &cells.act[oh * n_or + or];
                        bucket.1 += &cells.off[oh * n_or + or];
                    }
                }
            }
        }
        for (on, off) in buckets {
            total += on.max(off);
        }
        total
    }

    /// Expands one maximizing candidate into canonical optimal pairs:
    /// resolves the human action map (branching on exact ties on cells that
    /// receive wait mass) and pins every payoff-irrelevant coordinate — the
    /// robot's action on unreached message cells, its message on
    /// observations where it never waits, and human cells no deferral can
    /// reach — so the reported set carries no spurious multiplicity.
    fn expand(&self, code: u64) -> Vec<CommPolicyPair> {
        let (human_msg, mut robot_act, mut robot_msg) = self.decode(code);
        let cells = self.game.scaled_cells();
        let n_or = self.game.robot_obs().len();
        let n_oh = self.game.human_obs().len();

        // Pin robot action cells that no jointly-possible human message
        // reaches.
        for &or in &self.positive_or {
            for (m, action) in robot_act[or].iter_mut().enumerate() {
                let reachable = self
                    .positive_oh
                    .iter()
                    .any(|&oh| human_msg[oh] == m && self.pair_positive(oh, or));
                if !reachable {
                    *action = RobotAction::Off;
                }
            }
        }

        // The robot's message only matters where it waits.
        for &or in &self.positive_or {
            if robot_act[or].iter().all(|a| *a != RobotAction::Wait) {
                robot_msg[or] = 0;
            }
        }

        // Resolve the human action map on cells that some deferral reaches.
        let mut choices: Vec<Vec<HumanAction>> = vec![vec![HumanAction::Off]; n_oh * self.msgs.robot];
        for &oh in &self.positive_oh {
            let sent = human_msg[oh];
            for m in 0..self.msgs.robot {
                let wait_reachable = self.positive_or.iter().any(|&or| {
                    robot_msg[or] == m
                        && self.pair_positive(oh, or)
                        && robot_act[or][sent] == RobotAction::Wait
                });
                if !wait_reachable {
                    continue;
                }
                let mut on = BigInt::zero();
                let mut off = BigInt::zero();
                for &or in &self.positive_or {
                    if robot_msg[or] == m && robot_act[or][sent] == RobotAction::Wait {
                        on += &cells.act[oh * n_or + or];
                        off += &cells.off[oh * n_or + or];
                    }
                }
                choices[oh * self.msgs.robot + m] = if on > off {
                    vec![HumanAction::On]
                } else if off > on {
                    vec![HumanAction::Off]
                } else {
                    vec![HumanAction::On, HumanAction::Off]
                };
            }
        }

        let mut acts: Vec<Vec<HumanAction>> = vec![Vec::with_capacity(choices.len())];
        for per_cell in &choices {
            let mut next = Vec::with_capacity(acts.len() * per_cell.len());
            for partial in &acts {
                for action in per_cell {
                    let mut extended = partial.clone();
                    extended.push(*action);
                    next.push(extended);
                }
            }
            acts = next;
        }
        acts.into_iter()
            .map(|flat| CommPolicyPair {
                human_msg: human_msg.clone(),
                human_act: (0..n_oh)
                    .map(|oh| flat[oh * self.msgs.robot..(oh + 1) * self.msgs.robot].to_vec())
                    .collect(),
                robot_msg: robot_msg.clone(),
                robot_act: robot_act.clone(),
            })
            .collect()
    }

    /// Resets every payoff-irrelevant coordinate of a pair to its canonical
    /// value. Idempotent; applied after relabeling so the canonical form is
    /// well defined (message 0 is a fixed label, so pinning does not commute
    /// with permutations on its own).
    fn pin_irrelevant(&self, pair: &mut CommPolicyPair) {
        let n_oh = self.game.human_obs().len();
        let n_or = self.game.robot_obs().len();
        for oh in 0..n_oh {
            if !self.positive_oh.contains(&oh) {
                pair.human_msg[oh] = 0;
                pair.human_act[oh] = vec![HumanAction::Off; self.msgs.robot];
            }
        }
        for or in 0..n_or {
            if !self.positive_or.contains(&or) {
                pair.robot_msg[or] = 0;
                pair.robot_act[or] = vec![RobotAction::Off; self.msgs.human];
            }
        }
        for &or in &self.positive_or {
            for m in 0..self.msgs.human {
                let reachable = self
                    .positive_oh
                    .iter()
                    .any(|&oh| pair.human_msg[oh] == m && self.pair_positive(oh, or));
                if !reachable {
                    pair.robot_act[or][m] = RobotAction::Off;
                }
            }
            if pair.robot_act[or].iter().all(|a| *a != RobotAction::Wait) {
                pair.robot_msg[or] = 0;
            }
        }
        for &oh in &self.positive_oh {
            let sent = pair.human_msg[oh];
            for m in 0..self.msgs.robot {
                let wait_reachable = self.positive_or.iter().any(|&or| {
                    pair.robot_msg[or] == m
                        && self.pair_positive(oh, or)
                        && pair.robot_act[or][sent] == RobotAction::Wait
                });
                if !wait_reachable {
                    pair.human_act[oh][m] = HumanAction::Off;
                }
            }
        }
    }

    /// Lexicographically minimal pinned relabeling of the pair's messages.
    fn canonical(&self, pair: &CommPolicyPair) -> CommPolicyPair {
        let human_perms = permutations(self.msgs.human);
        let robot_perms = permutations(self.msgs.robot);
        let mut best: Option<CommPolicyPair> = None;
        for sigma_h in &human_perms {
            for sigma_r in &robot_perms {
                let mut relabeled = relabel(pair, sigma_h, sigma_r);
                self.pin_irrelevant(&mut relabeled);
                if best.as_ref().is_none_or(|b| relabeled < *b) {
                    best = Some(relabeled);
                }
            }
        }
        best.expect("at least the identity relabeling")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut result = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    permute(&mut items, 0, &mut result);
    result.sort();
    result
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Applies message permutations to both sides of a pair.
fn relabel(pair: &CommPolicyPair, sigma_h: &[usize], sigma_r: &[usize]) -> CommPolicyPair {
    let mut inv_h = vec![0usize; sigma_h.len()];
    for (from, &to) in sigma_h.iter().enumerate() {
        inv_h[to] = from;
    }
    let mut inv_r = vec![0usize; sigma_r.len()];
    for (from, &to) in sigma_r.iter().enumerate() {
        inv_r[to] = from;
    }
    CommPolicyPair {
        human_msg: pair.human_msg.iter().map(|&m| sigma_h[m]).collect(),
        human_act: pair
            .human_act
            .iter()
            .map(|row| (0..sigma_r.len()).map(|m| row[inv_r[m]]).collect())
            .collect(),
        robot_msg: pair.robot_msg.iter().map(|&m| sigma_r[m]).collect(),
        robot_act: pair
            .robot_act
            .iter()
            .map(|row| (0..sigma_h.len()).map(|m| row[inv_h[m]]).collect())
            .collect(),
    }
}

/// Solves the cheap-talk game with default resource limits.
pub fn solve_opp_comm(game: &Game, msgs: &MessageSystem) -> Result<CommSolveResult, Error> {
    solve_opp_comm_with(game, msgs, &SolveOptions::default())
}

/// Solves the cheap-talk game: exact optimum and all optimal pairs modulo
/// message relabeling.
pub fn solve_opp_comm_with(
    game: &Game,
    msgs: &MessageSystem,
    opts: &SolveOptions,
) -> Result<CommSolveResult, Error> {
    MessageSystem::new(msgs.human, msgs.robot)?;
    let enumeration = CommEnum::new(game, *msgs, opts.max_candidates)?;
    let total = enumeration.total();

    let best = (0..total)
        .into_par_iter()
        .map(|code| enumeration.evaluate(code))
        .reduce_with(|a, b| a.max(b))
        .expect("candidate space is nonempty");

    let mut maximizers: Vec<u64> = (0..total)
        .into_par_iter()
        .filter(|&code| enumeration.evaluate(code) == best)
        .collect();
    maximizers.sort_unstable();

    let mut candidates = total as u128;
    let mut canonical: BTreeSet<CommPolicyPair> = BTreeSet::new();
    for code in maximizers {
        let expanded = enumeration.expand(code);
        candidates += expanded.len() as u128;
        if candidates > opts.max_candidates as u128 {
            return Err(Error::EnumerationCap {
                candidates,
                cap: opts.max_candidates,
            });
        }
        for pair in expanded {
            canonical.insert(enumeration.canonical(&pair));
        }
    }
    let opps: Vec<CommPolicyPair> = canonical.into_iter().collect();

    let mut wait_cells = Vec::with_capacity(opps.len());
    let mut always_wait_sets = Vec::with_capacity(opps.len());
    let mut wait_probability = Vec::with_capacity(opps.len());
    for pair in &opps {
        let (cells, always) = deference_cells(game, msgs, pair);
        wait_probability.push(
            always
                .iter()
                .map(|&or| game.robot_marginal()[or].clone())
                .sum(),
        );
        wait_cells.push(cells);
        always_wait_sets.push(always);
    }

    let value = Rational::new(best, game.scaled_cells().denom.clone());
    Ok(CommSolveResult {
        value,
        opps,
        wait_cells,
        always_wait_sets,
        wait_probability,
    })
}

/// Reachable wait cells of a pair and the observations where the robot waits
/// for every message it can receive.
pub fn deference_cells(
    game: &Game,
    msgs: &MessageSystem,
    pair: &CommPolicyPair,
) -> (BTreeSet<(usize, usize)>, BTreeSet<usize>) {
    let mut cells = BTreeSet::new();
    let mut always = BTreeSet::new();
    for &or in game.positive_robot_obs() {
        let mut all_wait = true;
        let mut any_reachable = false;
        for m in 0..msgs.human {
            let reachable = game.positive_human_obs().iter().any(|&oh| {
                pair.human_msg[oh] == m && game.pair_prob(oh, or).is_positive()
            });
            if !reachable {
                continue;
            }
            any_reachable = true;
            if pair.robot_act[or][m] == RobotAction::Wait {
                cells.insert((or, m));
            } else {
                all_wait = false;
            }
        }
        if all_wait && any_reachable {
            always.insert(or);
        }
    }
    (cells, always)
}

/// An optimal pair in which one side transmits its observation verbatim and
/// the other side holds all decision power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedCommOpp {
    pub pair: CommPolicyPair,
    pub value: Rational,
}

/// Constructs the optimal pair under unbounded communication for `side`.
///
/// With `side == Robot` the robot sends its observation and always defers;
/// with `side == Human` the human sends hers and the robot never defers. The
/// message set for `side` must cover that side's observation count. The value
/// equals the full-information optimum over observation pairs.
pub fn unbounded_comm_opp(
    game: &Game,
    msgs: &MessageSystem,
    side: Agent,
) -> Result<UnboundedCommOpp, Error> {
    let n_oh = game.human_obs().len();
    let n_or = game.robot_obs().len();
    let required = match side {
        Agent::Human => n_oh,
        Agent::Robot => n_or,
    };
    let available = match side {
        Agent::Human => msgs.human,
        Agent::Robot => msgs.robot,
    };
    if available < required {
        return Err(Error::MessageSetTooSmall {
            side,
            messages: available,
            observations: required,
        });
    }

    let pair = match side {
        Agent::Robot => {
            // Robot transmits its observation and waits; the human, knowing
            // both observations, approves exactly the cells worth acting in.
            let human_act = (0..n_oh)
                .map(|oh| {
                    (0..msgs.robot)
                        .map(|m| {
                            if m < n_or && game.cell_act(oh, m) > game.cell_off(oh, m) {
                                HumanAction::On
                            } else {
                                HumanAction::Off
                            }
                        })
                        .collect()
                })
                .collect();
            CommPolicyPair {
                human_msg: vec![0; n_oh],
                human_act,
                robot_msg: (0..n_or).collect(),
                robot_act: vec![vec![RobotAction::Wait; msgs.human]; n_or],
            }
        }
        Agent::Human => {
            let robot_act = (0..n_or)
                .map(|or| {
                    (0..msgs.human)
                        .map(|m| {
                            if m < n_oh && game.cell_act(m, or) > game.cell_off(m, or) {
                                RobotAction::Act
                            } else {
                                RobotAction::Off
                            }
                        })
                        .collect()
                })
                .collect();
            CommPolicyPair {
                human_msg: (0..n_oh).collect(),
                human_act: vec![vec![HumanAction::Off; msgs.robot]; n_oh],
                robot_msg: vec![0; n_or],
                robot_act,
            }
        }
    };
    let value = expected_payoff_comm(game, msgs, &pair)?;
    Ok(UnboundedCommOpp { pair, value })
}

/// The full-information optimum: the best payoff achievable when the acting
/// decision can depend on both observations. Independent upper-bound oracle
/// for the unbounded-communication constructions.
pub fn full_information_value(game: &Game) -> Rational {
    let mut total = Rational::zero();
    for oh in 0..game.human_obs().len() {
        for or in 0..game.robot_obs().len() {
            let act = game.cell_act(oh, or);
            let off = game.cell_off(oh, or);
            total += if act > off { act } else { off };
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::policy::{HumanPolicy, RobotPolicy};
    use crate::rational::{rat, rat_int};
    use crate::solver::solve_opp;

    fn game(name: &str) -> Game {
        catalog::build_example(name, None).unwrap().game
    }

    fn b1_game(p: (i64, i64)) -> Game {
        let params = [("p".to_string(), rat(p.0, p.1))].into();
        catalog::build_example("rob-messages-family", Some(&params))
            .unwrap()
            .game
    }

    #[test]
    fn expressiveness_comparisons() {
        let m = |h, r| MessageSystem::new(h, r).unwrap();
        assert_eq!(
            compare_expressiveness(&m(2, 3), &m(2, 2)),
            Expressiveness::More
        );
        assert_eq!(
            compare_expressiveness(&m(1, 1), &m(1, 1)),
            Expressiveness::Equal
        );
        assert_eq!(
            compare_expressiveness(&m(1, 3), &m(2, 1)),
            Expressiveness::Incomparable
        );
        assert_eq!(
            compare_expressiveness(&m(1, 2), &m(2, 2)),
            Expressiveness::Less
        );
        assert!(MessageSystem::new(0, 1).is_err());
    }

    #[test]
    fn silent_embedding_matches_plain_payoff() {
        let game = game("file-deletion");
        let plain = solve_opp(&game).unwrap().opps[0].clone();
        let comm = CommPolicyPair::from_plain(&plain);
        assert_eq!(
            expected_payoff_comm(&game, &MessageSystem::silent(), &comm).unwrap(),
            crate::policy::expected_payoff(&game, &plain).unwrap()
        );
        assert_eq!(comm.as_plain().unwrap(), plain);
    }

    #[test]
    fn b1_family_values_are_constant_in_p() {
        for p in [(1i64, 10i64), (1, 4), (2, 5)] {
            let game = b1_game(p);
            let silent = solve_opp_comm(&game, &MessageSystem::silent()).unwrap();
            assert_eq!(silent.value, rat(30, 4), "p = {p:?}");
            // With no communication the robot defers everywhere.
            assert_eq!(silent.opps.len(), 1);
            assert_eq!(
                silent.always_wait_sets[0],
                game.positive_robot_obs().iter().copied().collect()
            );

            let two = solve_opp_comm(&game, &MessageSystem::new(1, 2).unwrap()).unwrap();
            assert_eq!(two.value, rat(39, 4), "p = {p:?}");
            // Three optimal classes: act on A3 with split messages, or defer
            // everywhere with A3 sharing a message with A1 or with A2 (the
            // shared column nets the same mass as acting unilaterally).
            assert_eq!(two.opps.len(), 3);
            let a1 = game.robot_obs_index("A1").unwrap();
            let a2 = game.robot_obs_index("A2").unwrap();
            let shrunk: BTreeSet<usize> = [a1, a2].into();
            let position = two
                .always_wait_sets
                .iter()
                .position(|s| *s == shrunk)
                .expect("an optimal pair waits exactly on {A1, A2}");
            assert_eq!(two.wait_probability[position], rat(2 * p.0, p.1));

            let three = solve_opp_comm(&game, &MessageSystem::new(1, 3).unwrap()).unwrap();
            assert_eq!(three.value, rat(41, 4), "p = {p:?}");
            assert_eq!(three.value, full_information_value(&game));
            let all: BTreeSet<usize> = game.positive_robot_obs().iter().copied().collect();
            assert!(three.always_wait_sets.contains(&all));
        }
    }

    #[test]
    fn b1_stated_pair_reaches_39_quarters() {
        let game = b1_game((1, 4));
        let msgs = MessageSystem::new(1, 2).unwrap();
        let idx = |name: &str| game.robot_obs_index(name).unwrap();
        let oh = |name: &str| game.human_obs_index(name).unwrap();
        let mut robot_msg = vec![0usize; 3];
        robot_msg[idx("A1")] = 0;
        robot_msg[idx("A2")] = 1;
        let mut robot_act = vec![vec![RobotAction::Off; 1]; 3];
        robot_act[idx("A1")][0] = RobotAction::Wait;
        robot_act[idx("A2")][0] = RobotAction::Wait;
        robot_act[idx("A3")][0] = RobotAction::Act;
        let mut human_act = vec![vec![HumanAction::Off; 2]; 4];
        human_act[oh("B1")][0] = HumanAction::On;
        human_act[oh("B4")][0] = HumanAction::On;
        human_act[oh("B2")][1] = HumanAction::On;
        human_act[oh("B4")][1] = HumanAction::On;
        let pair = CommPolicyPair {
            human_msg: vec![0; 4],
            human_act,
            robot_msg,
            robot_act,
        };
        assert_eq!(
            expected_payoff_comm(&game, &msgs, &pair).unwrap(),
            rat(39, 4)
        );
    }

    #[test]
    fn b1_two_messages_matches_brute_force_oracle() {
        // Independent slow oracle: evaluate every policy pair directly with
        // expected_payoff_comm, no best-response shortcut.
        let game = b1_game((1, 4));
        let msgs = MessageSystem::new(1, 2).unwrap();
        let mut best: Option<Rational> = None;
        for rm_code in 0..8u32 {
            for ra_code in 0..27u32 {
                for ha_code in 0..256u32 {
                    let robot_msg: Vec<usize> =
                        (0..3).map(|i| (rm_code >> i & 1) as usize).collect();
                    let mut c = ra_code;
                    let robot_act: Vec<Vec<RobotAction>> = (0..3)
                        .map(|_| {
                            let a = match c % 3 {
                                0 => RobotAction::Act,
                                1 => RobotAction::Wait,
                                _ => RobotAction::Off,
                            };
                            c /= 3;
                            vec![a]
                        })
                        .collect();
                    let human_act: Vec<Vec<HumanAction>> = (0..4)
                        .map(|oh| {
                            (0..2)
                                .map(|m| {
                                    if ha_code >> (oh * 2 + m) & 1 == 1 {
                                        HumanAction::On
                                    } else {
                                        HumanAction::Off
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    let pair = CommPolicyPair {
                        human_msg: vec![0; 4],
                        human_act,
                        robot_msg,
                        robot_act,
                    };
                    let value = expected_payoff_comm(&game, &msgs, &pair).unwrap();
                    if best.as_ref().is_none_or(|b| value > *b) {
                        best = Some(value);
                    }
                }
            }
        }
        assert_eq!(best.unwrap(), rat(39, 4));
    }

    #[test]
    fn one_bit_human_message_game() {
        let game = game("hum-messages");
        let silent = solve_opp_comm(&game, &MessageSystem::silent()).unwrap();
        assert_eq!(silent.value, rat_int(1));
        assert_eq!(silent.opps.len(), 1);
        let x = game.robot_obs_index("X").unwrap();
        assert_eq!(silent.always_wait_sets[0], [x].into());

        let one_bit = solve_opp_comm(&game, &MessageSystem::new(2, 1).unwrap()).unwrap();
        assert_eq!(one_bit.value, rat(13, 10));
        assert_eq!(one_bit.opps.len(), 1, "unique up to message relabeling");
        let b = game.robot_obs_index("B").unwrap();
        let d = game.robot_obs_index("D").unwrap();
        let opp = &one_bit.opps[0];
        // The robot waits on X under both messages; which of B/D pairs with
        // which message depends on the relabeling, so compare as a set.
        let cells = &one_bit.wait_cells[0];
        assert_eq!(cells.len(), 4);
        assert!(cells.contains(&(x, 0)) && cells.contains(&(x, 1)));
        let m_b = opp.robot_act[b].iter().position(|a| *a == RobotAction::Wait);
        let m_d = opp.robot_act[d].iter().position(|a| *a == RobotAction::Wait);
        let (m_b, m_d) = (m_b.unwrap(), m_d.unwrap());
        assert_ne!(m_b, m_d);
        assert!(cells.contains(&(b, m_b)) && cells.contains(&(d, m_d)));
        assert_eq!(one_bit.always_wait_sets[0], [x].into());
        // The human message map splits {1,2} from {3,4}.
        let oh = |name: &str| game.human_obs_index(name).unwrap();
        assert_eq!(opp.human_msg[oh("1")], opp.human_msg[oh("2")]);
        assert_eq!(opp.human_msg[oh("3")], opp.human_msg[oh("4")]);
        assert_ne!(opp.human_msg[oh("1")], opp.human_msg[oh("3")]);
    }

    #[test]
    fn b2_perfect_pair_reaches_13_tenths() {
        let game = game("hum-messages");
        let msgs = MessageSystem::new(2, 1).unwrap();
        let oh = |name: &str| game.human_obs_index(name).unwrap();
        let or = |name: &str| game.robot_obs_index(name).unwrap();
        let mut human_msg = vec![0usize; 4];
        human_msg[oh("3")] = 1;
        human_msg[oh("4")] = 1;
        let mut human_act = vec![vec![HumanAction::Off; 1]; 4];
        human_act[oh("1")][0] = HumanAction::On;
        human_act[oh("3")][0] = HumanAction::On;
        let mut robot_act = vec![vec![RobotAction::Off; 2]; 5];
        robot_act[or("X")] = vec![RobotAction::Wait, RobotAction::Wait];
        robot_act[or("A")] = vec![RobotAction::Act, RobotAction::Off];
        robot_act[or("B")] = vec![RobotAction::Wait, RobotAction::Off];
        robot_act[or("C")] = vec![RobotAction::Off, RobotAction::Act];
        robot_act[or("D")] = vec![RobotAction::Off, RobotAction::Wait];
        let pair = CommPolicyPair {
            human_msg,
            human_act,
            robot_msg: vec![0; 5],
            robot_act,
        };
        assert_eq!(
            expected_payoff_comm(&game, &msgs, &pair).unwrap(),
            rat(26, 20)
        );
    }

    #[test]
    fn silent_comm_solver_equals_plain_solver_on_catalog() {
        for name in catalog::catalog_names() {
            let game = catalog::build_example(name, None).unwrap().game;
            let plain = solve_opp(&game).unwrap();
            let comm = solve_opp_comm(&game, &MessageSystem::silent()).unwrap();
            assert_eq!(comm.value, plain.value, "value mismatch on {name}");
            let projected: Vec<PolicyPair> = comm
                .opps
                .iter()
                .map(|p| p.as_plain().unwrap())
                .collect();
            assert_eq!(projected, plain.opps, "policy set mismatch on {name}");
        }
    }

    #[test]
    fn unbounded_robot_communication_in_file_deletion() {
        let game = game("file-deletion");
        let msgs = MessageSystem::new(1, 2).unwrap();
        let result = unbounded_comm_opp(&game, &msgs, Agent::Robot).unwrap();
        assert_eq!(result.value, rat_int(2));
        assert_eq!(result.value, full_information_value(&game));
        assert!(result
            .pair
            .robot_act
            .iter()
            .all(|row| row.iter().all(|a| *a == RobotAction::Wait)));
        // Matches the exhaustive cheap-talk optimum.
        let solved = solve_opp_comm(&game, &msgs).unwrap();
        assert_eq!(solved.value, rat_int(2));

        // A message set smaller than the observation set is rejected.
        let too_small = MessageSystem::new(1, 1).unwrap();
        assert!(matches!(
            unbounded_comm_opp(&game, &too_small, Agent::Robot),
            Err(Error::MessageSetTooSmall { .. })
        ));
    }

    #[test]
    fn unbounded_human_communication_never_waits() {
        let game = game("file-deletion");
        let msgs = MessageSystem::new(2, 1).unwrap();
        let result = unbounded_comm_opp(&game, &msgs, Agent::Human).unwrap();
        assert_eq!(result.value, full_information_value(&game));
        assert!(result
            .pair
            .robot_act
            .iter()
            .all(|row| row.iter().all(|a| *a != RobotAction::Wait)));
        let solved = solve_opp_comm(&game, &msgs).unwrap();
        assert_eq!(solved.value, result.value);
    }

    #[test]
    fn singleton_observation_set_is_trivially_unbounded() {
        let game = game("neg-voi-2");
        let msgs = MessageSystem::silent();
        let result = unbounded_comm_opp(&game, &msgs, Agent::Robot).unwrap();
        assert_eq!(result.value, solve_opp(&game).unwrap().value);
    }

    #[test]
    fn out_of_range_message_is_rejected() {
        let game = game("file-deletion");
        let plain = PolicyPair {
            human: HumanPolicy::new(vec![HumanAction::Off, HumanAction::On]),
            robot: RobotPolicy::new(vec![RobotAction::Wait, RobotAction::Wait]),
        };
        let mut comm = CommPolicyPair::from_plain(&plain);
        comm.human_msg[0] = 3;
        assert!(matches!(
            expected_payoff_comm(&game, &MessageSystem::silent(), &comm),
            Err(Error::MessageOutOfRange { .. })
        ));
    }

    #[test]
    fn comm_cap_reports_candidate_count() {
        let game = game("hum-messages");
        let msgs = MessageSystem::new(2, 2).unwrap();
        match solve_opp_comm(&game, &msgs) {
            Err(Error::EnumerationCap { candidates, cap }) => {
                // 2^5 robot message maps * 3^10 action maps * 2^4 human maps
                assert_eq!(candidates, 32 * 59049 * 16);
                assert_eq!(cap, SolveOptions::default().max_candidates);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }
}
