//! Game model: specification, validation, joint law, and posteriors.
//!
//! A [`GameSpec`] is the raw, name-keyed description of a game as it appears
//! in a game file. [`validate_game`] reports every violated invariant;
//! [`GameSpec::compile`] turns a clean spec into a [`Game`], the immutable
//! index-based form every other module consumes. The compile step
//! precomputes the joint law of (state, human observation, robot
//! observation), its marginals, and integer-scaled payoff tables that let the
//! solvers compare candidate policies without reducing fractions in the inner
//! loop.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::Rational;

/// The two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    Human,
    Robot,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Human => write!(f, "human"),
            Agent::Robot => write!(f, "robot"),
        }
    }
}

/// Name-keyed game description, prior to validation.
///
/// `states`, `human_obs`, and `robot_obs` are ordered lists of opaque
/// identifiers. `obs_dist` gives, per state, the joint distribution of the
/// two players' observations conditional on that state. Probabilities and
/// payoffs are exact rationals. Missing prior entries default to zero;
/// payoffs and (for states with positive prior) observation rows are
/// mandatory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub states: Vec<String>,
    pub prior: BTreeMap<String, Rational>,
    pub human_obs: Vec<String>,
    pub robot_obs: Vec<String>,
    pub obs_dist: BTreeMap<String, BTreeMap<(String, String), Rational>>,
    pub u_act: BTreeMap<String, Rational>,
    pub u_off: BTreeMap<String, Rational>,
}

/// One violated invariant of a [`GameSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyStates,
    EmptyHumanObs,
    EmptyRobotObs,
    DuplicateState(String),
    DuplicateHumanObs(String),
    DuplicateRobotObs(String),
    UnknownStateInPrior(String),
    UnknownStateInObsDist(String),
    UnknownStateInUAct(String),
    UnknownStateInUOff(String),
    UnknownHumanObs { state: String, obs: String },
    UnknownRobotObs { state: String, obs: String },
    NegativePrior(String),
    PriorSum(Rational),
    NegativeObsProb { state: String, human_obs: String, robot_obs: String },
    ObsDistSum { state: String, sum: Rational },
    MissingObsDist(String),
    MissingUAct(String),
    MissingUOff(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStates => write!(f, "the state list is empty"),
            Violation::EmptyHumanObs => write!(f, "the human observation list is empty"),
            Violation::EmptyRobotObs => write!(f, "the robot observation list is empty"),
            Violation::DuplicateState(s) => write!(f, "state `{s}` is declared twice"),
            Violation::DuplicateHumanObs(o) => {
                write!(f, "human observation `{o}` is declared twice")
            }
            Violation::DuplicateRobotObs(o) => {
                write!(f, "robot observation `{o}` is declared twice")
            }
            Violation::UnknownStateInPrior(s) => {
                write!(f, "prior mentions undeclared state `{s}`")
            }
            Violation::UnknownStateInObsDist(s) => {
                write!(f, "obs_dist mentions undeclared state `{s}`")
            }
            Violation::UnknownStateInUAct(s) => {
                write!(f, "u_act mentions undeclared state `{s}`")
            }
            Violation::UnknownStateInUOff(s) => {
                write!(f, "u_off mentions undeclared state `{s}`")
            }
            Violation::UnknownHumanObs { state, obs } => {
                write!(f, "obs_dist for state `{state}` mentions undeclared human observation `{obs}`")
            }
            Violation::UnknownRobotObs { state, obs } => {
                write!(f, "obs_dist for state `{state}` mentions undeclared robot observation `{obs}`")
            }
            Violation::NegativePrior(s) => write!(f, "prior of state `{s}` is negative"),
            Violation::PriorSum(sum) => {
                write!(f, "prior sums to {sum}, expected exactly 1")
            }
            Violation::NegativeObsProb { state, human_obs, robot_obs } => {
                write!(f, "obs_dist({state})({human_obs}, {robot_obs}) is negative")
            }
            Violation::ObsDistSum { state, sum } => {
                write!(f, "obs_dist for state `{state}` sums to {sum}, expected exactly 1")
            }
            Violation::MissingObsDist(s) => {
                write!(f, "state `{s}` has positive prior but no observation distribution")
            }
            Violation::MissingUAct(s) => write!(f, "state `{s}` has no u_act payoff"),
            Violation::MissingUOff(s) => write!(f, "state `{s}` has no u_off payoff"),
        }
    }
}

/// The list of violated invariants; empty iff the game spec is well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "(no violations)");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "- {v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a spec and reports all violations.
pub fn validate_game(spec: &GameSpec) -> ValidationReport {
    let mut violations = Vec::new();

    if spec.states.is_empty() {
        violations.push(Violation::EmptyStates);
    }
    if spec.human_obs.is_empty() {
        violations.push(Violation::EmptyHumanObs);
    }
    if spec.robot_obs.is_empty() {
        violations.push(Violation::EmptyRobotObs);
    }

    let mut seen = BTreeSet::new();
    for s in &spec.states {
        if !seen.insert(s) {
            violations.push(Violation::DuplicateState(s.clone()));
        }
    }
    let states: BTreeSet<&String> = spec.states.iter().collect();
    let mut seen = BTreeSet::new();
    for o in &spec.human_obs {
        if !seen.insert(o) {
            violations.push(Violation::DuplicateHumanObs(o.clone()));
        }
    }
    let human_obs: BTreeSet<&String> = spec.human_obs.iter().collect();
    let mut seen = BTreeSet::new();
    for o in &spec.robot_obs {
        if !seen.insert(o) {
            violations.push(Violation::DuplicateRobotObs(o.clone()));
        }
    }
    let robot_obs: BTreeSet<&String> = spec.robot_obs.iter().collect();

    let mut prior_sum = Rational::zero();
    for (state, p) in &spec.prior {
        if !states.contains(state) {
            violations.push(Violation::UnknownStateInPrior(state.clone()));
        }
        if p.is_negative() {
            violations.push(Violation::NegativePrior(state.clone()));
        }
        prior_sum += p;
    }
    if !spec.states.is_empty() && !prior_sum.is_one() {
        violations.push(Violation::PriorSum(prior_sum));
    }

    for (state, row) in &spec.obs_dist {
        if !states.contains(state) {
            violations.push(Violation::UnknownStateInObsDist(state.clone()));
            continue;
        }
        let mut row_sum = Rational::zero();
        for ((oh, or), p) in row {
            if !human_obs.contains(oh) {
                violations.push(Violation::UnknownHumanObs {
                    state: state.clone(),
                    obs: oh.clone(),
                });
            }
            if !robot_obs.contains(or) {
                violations.push(Violation::UnknownRobotObs {
                    state: state.clone(),
                    obs: or.clone(),
                });
            }
            if p.is_negative() {
                violations.push(Violation::NegativeObsProb {
                    state: state.clone(),
                    human_obs: oh.clone(),
                    robot_obs: or.clone(),
                });
            }
            row_sum += p;
        }
        if !row_sum.is_one() {
            violations.push(Violation::ObsDistSum {
                state: state.clone(),
                sum: row_sum,
            });
        }
    }

    for state in &spec.states {
        let prior = spec.prior.get(state);
        let positive = prior.is_some_and(|p| p.is_positive());
        if positive && !spec.obs_dist.contains_key(state) {
            violations.push(Violation::MissingObsDist(state.clone()));
        }
        if !spec.u_act.contains_key(state) {
            violations.push(Violation::MissingUAct(state.clone()));
        }
        if !spec.u_off.contains_key(state) {
            violations.push(Violation::MissingUOff(state.clone()));
        }
    }
    for state in spec.u_act.keys() {
        if !states.contains(state) {
            violations.push(Violation::UnknownStateInUAct(state.clone()));
        }
    }
    for state in spec.u_off.keys() {
        if !states.contains(state) {
            violations.push(Violation::UnknownStateInUOff(state.clone()));
        }
    }

    ValidationReport { violations }
}

/// One nonzero entry of the joint law of (state, human obs, robot obs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointEntry {
    pub state: usize,
    pub human_obs: usize,
    pub robot_obs: usize,
    pub prob: Rational,
}

/// The materialized joint law. Zero-probability triples are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    pub entries: Vec<JointEntry>,
}

impl JointTable {
    /// Total probability mass; exactly 1 for a validated game.
    pub fn total(&self) -> Rational {
        self.entries.iter().map(|e| e.prob.clone()).sum()
    }
}

/// Payoff tables scaled to a common denominator.
///
/// `act[oh * n_or + or]` is `denom * Σ_s P(s, oh, or) · u_act(s)` as a big
/// integer (similarly `off`). Candidate policies are compared by integer
/// sums, deferring all fraction reduction to the final result.
#[derive(Debug, Clone)]
pub(crate) struct ScaledCells {
    pub denom: BigInt,
    pub act: Vec<BigInt>,
    pub off: Vec<BigInt>,
}

/// A validated, immutable game. All operations are pure; sharing across
/// threads is safe.
#[derive(Debug, Clone)]
pub struct Game {
    spec: GameSpec,
    states: Vec<String>,
    human_obs: Vec<String>,
    robot_obs: Vec<String>,
    prior: Vec<Rational>,
    u_act: Vec<Rational>,
    u_off: Vec<Rational>,
    joint: JointTable,
    human_marginal: Vec<Rational>,
    robot_marginal: Vec<Rational>,
    pair_marginal: Vec<Rational>,
    positive_human_obs: Vec<usize>,
    positive_robot_obs: Vec<usize>,
    cell_act: Vec<Rational>,
    cell_off: Vec<Rational>,
    scaled: ScaledCells,
}

impl GameSpec {
    /// Validates the game spec and compiles it into a [`Game`].
    pub fn compile(self) -> Result<Game, Error> {
        let report = validate_game(&self);
        if !report.is_clean() {
            return Err(Error::InvalidGame(report));
        }

        let state_index: BTreeMap<&String, usize> =
            self.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let human_index: BTreeMap<&String, usize> =
            self.human_obs.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let robot_index: BTreeMap<&String, usize> =
            self.robot_obs.iter().enumerate().map(|(i, o)| (o, i)).collect();

        let n_states = self.states.len();
        let n_oh = self.human_obs.len();
        let n_or = self.robot_obs.len();

        let mut prior = vec![Rational::zero(); n_states];
        for (state, p) in &self.prior {
            prior[state_index[state]] = p.clone();
        }
        let mut u_act = vec![Rational::zero(); n_states];
        let mut u_off = vec![Rational::zero(); n_states];
        for (state, u) in &self.u_act {
            u_act[state_index[state]] = u.clone();
        }
        for (state, u) in &self.u_off {
            u_off[state_index[state]] = u.clone();
        }

        let mut entries = Vec::new();
        let mut human_marginal = vec![Rational::zero(); n_oh];
        let mut robot_marginal = vec![Rational::zero(); n_or];
        let mut pair_marginal = vec![Rational::zero(); n_oh * n_or];
        let mut cell_act = vec![Rational::zero(); n_oh * n_or];
        let mut cell_off = vec![Rational::zero(); n_oh * n_or];

        for (s, state) in self.states.iter().enumerate() {
            if !prior[s].is_positive() {
                continue;
            }
            let row = &self.obs_dist[state];
            for ((oh_name, or_name), p) in row {
                if !p.is_positive() {
                    continue;
                }
                let oh = human_index[oh_name];
                let or = robot_index[or_name];
                let prob = &prior[s] * p;
                human_marginal[oh] += &prob;
                robot_marginal[or] += &prob;
                pair_marginal[oh * n_or + or] += &prob;
                cell_act[oh * n_or + or] += &prob * &u_act[s];
                cell_off[oh * n_or + or] += &prob * &u_off[s];
                entries.push(JointEntry {
                    state: s,
                    human_obs: oh,
                    robot_obs: or,
                    prob,
                });
            }
        }

        let positive_human_obs: Vec<usize> = (0..n_oh)
            .filter(|&oh| human_marginal[oh].is_positive())
            .collect();
        let positive_robot_obs: Vec<usize> = (0..n_or)
            .filter(|&or| robot_marginal[or].is_positive())
            .collect();

        let mut denom = BigInt::one();
        for cell in cell_act.iter().chain(cell_off.iter()) {
            denom = denom.lcm(cell.denom());
        }
        let scale = |cells: &[Rational]| -> Vec<BigInt> {
            cells
                .iter()
                .map(|c| c.numer() * (&denom / c.denom()))
                .collect()
        };
        let scaled = ScaledCells {
            act: scale(&cell_act),
            off: scale(&cell_off),
            denom,
        };

        Ok(Game {
            states: self.states.clone(),
            human_obs: self.human_obs.clone(),
            robot_obs: self.robot_obs.clone(),
            prior,
            u_act,
            u_off,
            joint: JointTable { entries },
            human_marginal,
            robot_marginal,
            pair_marginal,
            positive_human_obs,
            positive_robot_obs,
            cell_act,
            cell_off,
            scaled,
            spec: self,
        })
    }
}

impl Game {
    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn human_obs(&self) -> &[String] {
        &self.human_obs
    }

    pub fn robot_obs(&self) -> &[String] {
        &self.robot_obs
    }

    pub fn obs(&self, agent: Agent) -> &[String] {
        match agent {
            Agent::Human => &self.human_obs,
            Agent::Robot => &self.robot_obs,
        }
    }

    pub fn prior(&self) -> &[Rational] {
        &self.prior
    }

    pub fn u_act(&self) -> &[Rational] {
        &self.u_act
    }

    pub fn u_off(&self) -> &[Rational] {
        &self.u_off
    }

    /// The joint law of (state, human obs, robot obs); nonzero entries only.
    pub fn joint_table(&self) -> &JointTable {
        &self.joint
    }

    pub fn human_marginal(&self) -> &[Rational] {
        &self.human_marginal
    }

    pub fn robot_marginal(&self) -> &[Rational] {
        &self.robot_marginal
    }

    /// Marginal probability of the observation pair (oh, or).
    pub fn pair_prob(&self, oh: usize, or: usize) -> &Rational {
        &self.pair_marginal[oh * self.robot_obs.len() + or]
    }

    /// `Σ_s P(s, oh, or) · u_act(s)`, the exact payoff mass of the cell when
    /// the action goes through there.
    pub fn cell_act(&self, oh: usize, or: usize) -> &Rational {
        &self.cell_act[oh * self.robot_obs.len() + or]
    }

    /// `Σ_s P(s, oh, or) · u_off(s)`.
    pub fn cell_off(&self, oh: usize, or: usize) -> &Rational {
        &self.cell_off[oh * self.robot_obs.len() + or]
    }

    pub(crate) fn scaled_cells(&self) -> &ScaledCells {
        &self.scaled
    }

    /// Human observation indices with positive marginal probability.
    pub fn positive_human_obs(&self) -> &[usize] {
        &self.positive_human_obs
    }

    /// Robot observation indices with positive marginal probability.
    pub fn positive_robot_obs(&self) -> &[usize] {
        &self.positive_robot_obs
    }

    pub fn human_obs_index(&self, name: &str) -> Option<usize> {
        self.human_obs.iter().position(|o| o == name)
    }

    pub fn robot_obs_index(&self, name: &str) -> Option<usize> {
        self.robot_obs.iter().position(|o| o == name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Exact posterior over states given one agent's observation (by name).
    ///
    /// Fails if the observation is undeclared or has zero marginal
    /// probability. States outside the support are omitted.
    pub fn posterior(&self, agent: Agent, obs: &str) -> Result<BTreeMap<String, Rational>, Error> {
        let index = match agent {
            Agent::Human => self.human_obs_index(obs),
            Agent::Robot => self.robot_obs_index(obs),
        }
        .ok_or_else(|| Error::UnknownObservation {
            agent,
            obs: obs.to_owned(),
        })?;
        let by_index = self.posterior_by_index(agent, index)?;
        Ok(by_index
            .into_iter()
            .map(|(s, p)| (self.states[s].clone(), p))
            .collect())
    }

    /// Exact posterior over state indices given one agent's observation.
    pub fn posterior_by_index(
        &self,
        agent: Agent,
        obs: usize,
    ) -> Result<BTreeMap<usize, Rational>, Error> {
        let marginal = match agent {
            Agent::Human => &self.human_marginal[obs],
            Agent::Robot => &self.robot_marginal[obs],
        };
        if !marginal.is_positive() {
            return Err(Error::ZeroProbabilityObservation {
                agent,
                obs: self.obs(agent)[obs].clone(),
            });
        }
        let mut posterior: BTreeMap<usize, Rational> = BTreeMap::new();
        for entry in &self.joint.entries {
            let matches = match agent {
                Agent::Human => entry.human_obs == obs,
                Agent::Robot => entry.robot_obs == obs,
            };
            if matches {
                *posterior.entry(entry.state).or_insert_with(Rational::zero) +=
                    &entry.prob / marginal;
            }
        }
        Ok(posterior)
    }

    /// The game's observation structure (copies names and per-state laws).
    pub fn obs_structure(&self) -> crate::informativeness::ObsStructure {
        let n_oh = self.human_obs.len();
        let n_or = self.robot_obs.len();
        let mut dist = vec![vec![Rational::zero(); n_oh * n_or]; self.states.len()];
        for (s, state) in self.states.iter().enumerate() {
            if let Some(row) = self.spec.obs_dist.get(state) {
                for ((oh_name, or_name), p) in row {
                    let oh = self.human_obs_index(oh_name).expect("validated");
                    let or = self.robot_obs_index(or_name).expect("validated");
                    dist[s][oh * n_or + or] = p.clone();
                }
            }
        }
        crate::informativeness::ObsStructure {
            human_obs: self.human_obs.clone(),
            robot_obs: self.robot_obs.clone(),
            dist,
        }
    }

    /// Same states, prior, and payoffs under a different observation
    /// structure.
    pub fn with_structure(
        &self,
        structure: &crate::informativeness::ObsStructure,
    ) -> Result<Game, Error> {
        if structure.dist.len() != self.states.len() {
            return Err(Error::StructureMismatch {
                reason: format!(
                    "structure covers {} states, game has {}",
                    structure.dist.len(),
                    self.states.len()
                ),
            });
        }
        GameSpec::from_parts(
            self.states.clone(),
            self.prior.clone(),
            structure,
            self.u_act.clone(),
            self.u_off.clone(),
        )
        .compile()
    }
}

impl GameSpec {
    /// Assembles a spec from index-aligned parts and an observation
    /// structure over the same state list.
    pub fn from_parts(
        states: Vec<String>,
        prior: Vec<Rational>,
        structure: &crate::informativeness::ObsStructure,
        u_act: Vec<Rational>,
        u_off: Vec<Rational>,
    ) -> GameSpec {
        let n_or = structure.robot_obs.len();
        let mut obs_dist = BTreeMap::new();
        for (s, state) in states.iter().enumerate() {
            let mut row = BTreeMap::new();
            for (oh, oh_name) in structure.human_obs.iter().enumerate() {
                for (or, or_name) in structure.robot_obs.iter().enumerate() {
                    let p = &structure.dist[s][oh * n_or + or];
                    if !p.is_zero() {
                        row.insert((oh_name.clone(), or_name.clone()), p.clone());
                    }
                }
            }
            obs_dist.insert(state.clone(), row);
        }
        GameSpec {
            prior: states
                .iter()
                .zip(prior)
                .map(|(s, p)| (s.clone(), p))
                .collect(),
            u_act: states
                .iter()
                .zip(u_act)
                .map(|(s, u)| (s.clone(), u))
                .collect(),
            u_off: states
                .iter()
                .zip(u_off)
                .map(|(s, u)| (s.clone(), u))
                .collect(),
            obs_dist,
            states,
            human_obs: structure.human_obs.clone(),
            robot_obs: structure.robot_obs.clone(),
        }
    }
}
