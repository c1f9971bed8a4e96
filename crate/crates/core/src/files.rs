//! JSON file formats.
//!
//! Game files carry every probability and payoff as a rational string
//! (`"p/q"` or an integer string); parsing and rendering never pass through
//! floating point, so a file round-trips bit-exactly. The observation
//! distribution is keyed `"<state>" -> { "<human obs>|<robot obs>": "p/q" }`.
//!
//! Result files carry a `schema_version` field and render all rationals in
//! lowest terms, with maps as sorted JSON objects so output is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::comm::{CommPolicyPair, CommSolveResult, MessageSystem};
use crate::error::Error;
use crate::game::{Game, GameSpec};
use crate::policy::{HumanAction, PolicyPair, RobotAction};
use crate::rational::{format_rational, parse_rational};
use crate::solver::SolveResult;
use crate::unaware::UnawareSolveResult;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk form of a game spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameSpecFile {
    pub states: Vec<String>,
    pub prior: BTreeMap<String, String>,
    pub human_obs: Vec<String>,
    pub robot_obs: Vec<String>,
    pub obs_dist: BTreeMap<String, BTreeMap<String, String>>,
    pub u_act: BTreeMap<String, String>,
    pub u_off: BTreeMap<String, String>,
}

impl GameSpecFile {
    pub fn from_spec(spec: &GameSpec) -> Result<Self, Error> {
        for obs in spec.human_obs.iter().chain(&spec.robot_obs) {
            if obs.contains('|') {
                return Err(Error::FileFormat(format!(
                    "observation `{obs}` contains `|`, which the obs_dist key format reserves"
                )));
            }
        }
        let rationals = |map: &BTreeMap<String, crate::rational::Rational>| {
            map.iter()
                .map(|(k, v)| (k.clone(), format_rational(v)))
                .collect()
        };
        Ok(GameSpecFile {
            states: spec.states.clone(),
            prior: rationals(&spec.prior),
            human_obs: spec.human_obs.clone(),
            robot_obs: spec.robot_obs.clone(),
            obs_dist: spec
                .obs_dist
                .iter()
                .map(|(state, row)| {
                    (
                        state.clone(),
                        row.iter()
                            .map(|((oh, or), p)| (format!("{oh}|{or}"), format_rational(p)))
                            .collect(),
                    )
                })
                .collect(),
            u_act: rationals(&spec.u_act),
            u_off: rationals(&spec.u_off),
        })
    }

    pub fn to_spec(&self) -> Result<GameSpec, Error> {
        let parse_map = |map: &BTreeMap<String, String>,
                         field: &str|
         -> Result<BTreeMap<String, crate::rational::Rational>, Error> {
            map.iter()
                .map(|(k, v)| {
                    parse_rational(v)
                        .map(|r| (k.clone(), r))
                        .map_err(|e| Error::FileFormat(format!("{field}[{k}]: {e}")))
                })
                .collect()
        };
        let mut obs_dist = BTreeMap::new();
        for (state, row) in &self.obs_dist {
            let mut parsed = BTreeMap::new();
            for (key, value) in row {
                let (oh, or) = key.split_once('|').ok_or_else(|| {
                    Error::FileFormat(format!(
                        "obs_dist[{state}] key `{key}` is not of the form `<human obs>|<robot obs>`"
                    ))
                })?;
                let p = parse_rational(value).map_err(|e| {
                    Error::FileFormat(format!("obs_dist[{state}][{key}]: {e}"))
                })?;
                parsed.insert((oh.to_owned(), or.to_owned()), p);
            }
            obs_dist.insert(state.clone(), parsed);
        }
        Ok(GameSpec {
            states: self.states.clone(),
            prior: parse_map(&self.prior, "prior")?,
            human_obs: self.human_obs.clone(),
            robot_obs: self.robot_obs.clone(),
            obs_dist,
            u_act: parse_map(&self.u_act, "u_act")?,
            u_off: parse_map(&self.u_off, "u_off")?,
        })
    }
}

/// Parses a game spec from JSON text.
pub fn game_spec_from_json(text: &str) -> Result<GameSpec, Error> {
    let file: GameSpecFile = serde_json::from_str(text)?;
    file.to_spec()
}

/// Renders a game spec as pretty JSON.
pub fn game_spec_to_json(spec: &GameSpec) -> Result<String, Error> {
    let file = GameSpecFile::from_spec(spec)?;
    Ok(serde_json::to_string_pretty(&file)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyPairFile {
    pub human: BTreeMap<String, String>,
    pub robot: BTreeMap<String, String>,
}

impl PolicyPairFile {
    pub fn from_pair(game: &Game, pair: &PolicyPair) -> Self {
        PolicyPairFile {
            human: pair
                .human
                .to_named(game)
                .into_iter()
                .map(|(o, a)| (o, a.as_str().to_owned()))
                .collect(),
            robot: pair
                .robot
                .to_named(game)
                .into_iter()
                .map(|(o, a)| (o, a.as_str().to_owned()))
                .collect(),
        }
    }

    pub fn to_pair(&self, game: &Game) -> Result<PolicyPair, Error> {
        let human = self
            .human
            .iter()
            .map(|(o, a)| {
                HumanAction::parse(a)
                    .map(|a| (o.clone(), a))
                    .ok_or_else(|| Error::FileFormat(format!("unknown human action `{a}`")))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        let robot = self
            .robot
            .iter()
            .map(|(o, a)| {
                RobotAction::parse(a)
                    .map(|a| (o.clone(), a))
                    .ok_or_else(|| Error::FileFormat(format!("unknown robot action `{a}`")))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Ok(PolicyPair {
            human: crate::policy::HumanPolicy::from_named(game, &human)?,
            robot: crate::policy::RobotPolicy::from_named(game, &robot)?,
        })
    }
}

/// On-disk form of a solve result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResultFile {
    pub schema_version: u32,
    pub value: String,
    pub opp_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opps: Option<Vec<PolicyPairFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deference_sets: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wait_probability: Option<Vec<String>>,
}

impl SolveResultFile {
    pub fn from_result(game: &Game, result: &SolveResult, all_opps: bool) -> Self {
        SolveResultFile {
            schema_version: SCHEMA_VERSION,
            value: format_rational(&result.value),
            opp_count: result.opps.len(),
            opps: all_opps.then(|| {
                result
                    .opps
                    .iter()
                    .map(|p| PolicyPairFile::from_pair(game, p))
                    .collect()
            }),
            deference_sets: all_opps.then(|| {
                result
                    .deference_sets
                    .iter()
                    .map(|set| {
                        set.iter()
                            .map(|&or| game.robot_obs()[or].clone())
                            .collect()
                    })
                    .collect()
            }),
            wait_probability: all_opps.then(|| {
                result.wait_probability.iter().map(format_rational).collect()
            }),
        }
    }
}

fn message_label(m: usize) -> String {
    format!("m{m}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommPolicyPairFile {
    pub message_policy: MessagePolicyFile,
    pub action_policy: ActionPolicyFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MessagePolicyFile {
    pub human: BTreeMap<String, String>,
    pub robot: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionPolicyFile {
    /// keyed `<human obs>|<robot message>`
    pub human: BTreeMap<String, String>,
    /// keyed `<robot obs>|<human message>`
    pub robot: BTreeMap<String, String>,
}

impl CommPolicyPairFile {
    pub fn from_pair(game: &Game, pair: &CommPolicyPair) -> Self {
        let human_msg = game
            .human_obs()
            .iter()
            .zip(&pair.human_msg)
            .map(|(o, &m)| (o.clone(), message_label(m)))
            .collect();
        let robot_msg = game
            .robot_obs()
            .iter()
            .zip(&pair.robot_msg)
            .map(|(o, &m)| (o.clone(), message_label(m)))
            .collect();
        let mut human_act = BTreeMap::new();
        for (oh, row) in pair.human_act.iter().enumerate() {
            for (m, action) in row.iter().enumerate() {
                human_act.insert(
                    format!("{}|{}", game.human_obs()[oh], message_label(m)),
                    action.as_str().to_owned(),
                );
            }
        }
        let mut robot_act = BTreeMap::new();
        for (or, row) in pair.robot_act.iter().enumerate() {
            for (m, action) in row.iter().enumerate() {
                robot_act.insert(
                    format!("{}|{}", game.robot_obs()[or], message_label(m)),
                    action.as_str().to_owned(),
                );
            }
        }
        CommPolicyPairFile {
            message_policy: MessagePolicyFile {
                human: human_msg,
                robot: robot_msg,
            },
            action_policy: ActionPolicyFile {
                human: human_act,
                robot: robot_act,
            },
        }
    }
}

/// On-disk form of a cheap-talk solve result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommSolveResultFile {
    pub schema_version: u32,
    pub value: String,
    pub message_system: MessageSystemFile,
    pub opp_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opps: Option<Vec<CommPolicyPairFile>>,
    /// Per optimal pair, the reachable (robot obs, human message) wait cells.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wait_cells: Option<Vec<Vec<[String; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub always_wait_sets: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wait_probability: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MessageSystemFile {
    pub human: usize,
    pub robot: usize,
}

impl CommSolveResultFile {
    pub fn from_result(
        game: &Game,
        msgs: &MessageSystem,
        result: &CommSolveResult,
        all_opps: bool,
    ) -> Self {
        CommSolveResultFile {
            schema_version: SCHEMA_VERSION,
            value: format_rational(&result.value),
            message_system: MessageSystemFile {
                human: msgs.human,
                robot: msgs.robot,
            },
            opp_count: result.opps.len(),
            opps: all_opps.then(|| {
                result
                    .opps
                    .iter()
                    .map(|p| CommPolicyPairFile::from_pair(game, p))
                    .collect()
            }),
            wait_cells: all_opps.then(|| {
                result
                    .wait_cells
                    .iter()
                    .map(|cells| {
                        cells
                            .iter()
                            .map(|&(or, m)| {
                                [game.robot_obs()[or].clone(), message_label(m)]
                            })
                            .collect()
                    })
                    .collect()
            }),
            always_wait_sets: all_opps.then(|| {
                result
                    .always_wait_sets
                    .iter()
                    .map(|set| {
                        set.iter()
                            .map(|&or| game.robot_obs()[or].clone())
                            .collect()
                    })
                    .collect()
            }),
            wait_probability: all_opps.then(|| {
                result.wait_probability.iter().map(format_rational).collect()
            }),
        }
    }
}

/// On-disk form of an unaware-human solve result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnawareResultFile {
    pub schema_version: u32,
    pub value: String,
    pub human: BTreeMap<String, String>,
    /// The preferred best response (WAIT > OFF > ACT on ties).
    pub robot: BTreeMap<String, String>,
    pub all_best_responses: Vec<BTreeMap<String, String>>,
    /// Human observations whose defining expectation is exactly zero.
    pub ties: Vec<String>,
}

impl UnawareResultFile {
    pub fn from_result(game: &Game, result: &UnawareSolveResult) -> Self {
        let named = |policy: &crate::policy::RobotPolicy| {
            policy
                .to_named(game)
                .into_iter()
                .map(|(o, a)| (o, a.as_str().to_owned()))
                .collect::<BTreeMap<_, _>>()
        };
        UnawareResultFile {
            schema_version: SCHEMA_VERSION,
            value: format_rational(&result.value),
            human: result
                .human
                .to_named(game)
                .into_iter()
                .map(|(o, a)| (o, a.as_str().to_owned()))
                .collect(),
            robot: named(&result.robot),
            all_best_responses: result.robots.iter().map(named).collect(),
            ties: result
                .ties
                .iter()
                .map(|&oh| game.human_obs()[oh].clone())
                .collect(),
        }
    }
}
