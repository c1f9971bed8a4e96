//! Programmatic constructors for the built-in example games, each bundled with
//! its expected solver outputs for regression testing.
//!
//! Every entry carries exact rational expected values; the reproduction
//! report (see [`crate::report`]) replays the relevant solvers over the whole
//! catalog and compares outputs by exact equality.

use std::collections::BTreeMap;

use crate::comm::MessageSystem;
use crate::error::Error;
use crate::game::{Game, GameSpec};
use crate::policy::{HumanAction, RobotAction};
use crate::rational::{rat, rat_int, Rational};

/// A named example game with its expected analysis results.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub params: BTreeMap<String, Rational>,
    pub spec: GameSpec,
    pub game: Game,
    pub expected: Expected,
}

/// Expected outputs, by exact rational and set equality. Fields are `None`
/// when the example makes no claim about them.
#[derive(Debug, Clone, Default)]
pub struct Expected {
    pub opp_value: Option<Rational>,
    pub opp_count: Option<usize>,
    /// Wait sets of all optimal pairs, in the solver's canonical order.
    pub wait_sets: Option<Vec<std::collections::BTreeSet<String>>>,
    /// Human policy of the unique optimal pair.
    pub human_policy: Option<BTreeMap<String, HumanAction>>,
    /// Robot policy of the unique optimal pair.
    pub robot_policy: Option<BTreeMap<String, RobotAction>>,
    /// Best payoff among pairs in which the robot always waits.
    pub all_wait_value: Option<Rational>,
    pub comm: Vec<CommExpectation>,
    pub unaware: Option<UnawareExpectation>,
    /// Robot-best-response values for fixed human policies.
    pub best_response_cases: Vec<BestResponseCase>,
}

#[derive(Debug, Clone)]
pub struct CommExpectation {
    pub msgs: MessageSystem,
    pub value: Rational,
    /// Number of optimal pairs modulo message relabeling.
    pub opp_count: Option<usize>,
    /// Always-wait observation set of the unique optimal pair.
    pub always_wait_set: Option<std::collections::BTreeSet<String>>,
    /// Prior mass of that set.
    pub wait_probability: Option<Rational>,
    /// Whether some optimal pair defers on every observation.
    pub has_all_wait_opp: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct UnawareExpectation {
    pub value: Rational,
    pub wait_set: std::collections::BTreeSet<String>,
    pub human_policy: BTreeMap<String, HumanAction>,
}

#[derive(Debug, Clone)]
pub struct BestResponseCase {
    pub human: BTreeMap<String, HumanAction>,
    pub value: Rational,
}

/// All example names, in catalog order.
pub fn catalog_names() -> &'static [&'static str] {
    &[
        "file-deletion",
        "variant-coarse",
        "variant-full",
        "bug-fixing-1",
        "bug-fixing-2",
        "neg-voi-1",
        "neg-voi-2",
        "rob-messages-family",
        "hum-messages",
        "voi-unaware-1",
        "voi-unaware-2",
    ]
}

/// Builds a product-state game: states are `(first, second)` pairs with
/// independent coordinate priors, deterministic observations given by the
/// two coordinate maps, and `u_off = 0`.
#[allow(clippy::too_many_arguments)]
fn product_game(
    first: &[&str],
    second: &[&str],
    first_prior: &[Rational],
    second_prior: &[Rational],
    u_act: &dyn Fn(usize, usize) -> Rational,
    human_obs: &[&str],
    human_map: &dyn Fn(usize, usize) -> usize,
    robot_obs: &[&str],
    robot_map: &dyn Fn(usize, usize) -> usize,
) -> GameSpec {
    let mut states = Vec::new();
    let mut prior = BTreeMap::new();
    let mut obs_dist = BTreeMap::new();
    let mut u_act_map = BTreeMap::new();
    let mut u_off_map = BTreeMap::new();
    for (i, a) in first.iter().enumerate() {
        for (j, b) in second.iter().enumerate() {
            let state = format!("{a},{b}");
            states.push(state.clone());
            prior.insert(state.clone(), &first_prior[i] * &second_prior[j]);
            let oh = human_obs[human_map(i, j)].to_owned();
            let or = robot_obs[robot_map(i, j)].to_owned();
            obs_dist.insert(state.clone(), [((oh, or), rat_int(1))].into());
            u_act_map.insert(state.clone(), u_act(i, j));
            u_off_map.insert(state, rat_int(0));
        }
    }
    GameSpec {
        states,
        prior,
        human_obs: human_obs.iter().map(|s| s.to_string()).collect(),
        robot_obs: robot_obs.iter().map(|s| s.to_string()).collect(),
        obs_dist,
        u_act: u_act_map,
        u_off: u_off_map,
    }
}

fn uniform(n: usize) -> Vec<Rational> {
    vec![Rational::new(1.into(), (n as i64).into()); n]
}

fn human_map(entries: &[(&str, HumanAction)]) -> BTreeMap<String, HumanAction> {
    entries.iter().map(|(o, a)| (o.to_string(), *a)).collect()
}

fn robot_map(entries: &[(&str, RobotAction)]) -> BTreeMap<String, RobotAction> {
    entries.iter().map(|(o, a)| (o.to_string(), *a)).collect()
}

fn names(set: &[&str]) -> std::collections::BTreeSet<String> {
    set.iter().map(|s| s.to_string()).collect()
}

fn file_deletion() -> (GameSpec, Expected) {
    let table = [[3i64, -5], [-1, 5]];
    let spec = product_game(
        &["1.0", "2.0"],
        &["L", "M"],
        &uniform(2),
        &uniform(2),
        &|i, j| rat_int(table[i][j]),
        &["1.0", "2.0"],
        &|i, _| i,
        &["L", "M"],
        &|_, j| j,
    );
    let expected = Expected {
        opp_value: Some(rat(7, 4)),
        opp_count: Some(1),
        wait_sets: Some(vec![names(&["M"])]),
        human_policy: Some(human_map(&[
            ("1.0", HumanAction::Off),
            ("2.0", HumanAction::On),
        ])),
        robot_policy: Some(robot_map(&[
            ("L", RobotAction::Act),
            ("M", RobotAction::Wait),
        ])),
        all_wait_value: Some(rat_int(1)),
        ..Expected::default()
    };
    (spec, expected)
}

fn variant(coarse: bool) -> (GameSpec, Expected) {
    let table = [[1i64, -5], [-2, 3], [3, 3]];
    let u = move |i: usize, j: usize| rat_int(table[i][j]);
    let spec = if coarse {
        product_game(
            &["1.0", "1.1", "2.0"],
            &["A", "B"],
            &uniform(3),
            &uniform(2),
            &u,
            &["1.x", "2.x"],
            &|i, _| if i < 2 { 0 } else { 1 },
            &["A", "B"],
            &|_, j| j,
        )
    } else {
        product_game(
            &["1.0", "1.1", "2.0"],
            &["A", "B"],
            &uniform(3),
            &uniform(2),
            &u,
            &["1.0", "1.1", "2.0"],
            &|i, _| i,
            &["A", "B"],
            &|_, j| j,
        )
    };
    let expected = if coarse {
        Expected {
            opp_value: Some(rat_int(1)),
            opp_count: Some(1),
            wait_sets: Some(vec![names(&["A", "B"])]),
            human_policy: Some(human_map(&[
                ("1.x", HumanAction::Off),
                ("2.x", HumanAction::On),
            ])),
            robot_policy: Some(robot_map(&[
                ("A", RobotAction::Wait),
                ("B", RobotAction::Wait),
            ])),
            unaware: Some(UnawareExpectation {
                value: rat_int(1),
                wait_set: names(&["A", "B"]),
                human_policy: human_map(&[
                    ("1.x", HumanAction::Off),
                    ("2.x", HumanAction::On),
                ]),
            }),
            ..Expected::default()
        }
    } else {
        Expected {
            opp_value: Some(rat(4, 3)),
            opp_count: Some(1),
            wait_sets: Some(vec![names(&["B"])]),
            human_policy: Some(human_map(&[
                ("1.0", HumanAction::Off),
                ("1.1", HumanAction::On),
                ("2.0", HumanAction::On),
            ])),
            robot_policy: Some(robot_map(&[
                ("A", RobotAction::Act),
                ("B", RobotAction::Wait),
            ])),
            unaware: Some(UnawareExpectation {
                value: rat(4, 3),
                wait_set: names(&["B"]),
                human_policy: human_map(&[
                    ("1.0", HumanAction::Off),
                    ("1.1", HumanAction::On),
                    ("2.0", HumanAction::On),
                ]),
            }),
            best_response_cases: vec![
                BestResponseCase {
                    human: human_map(&[
                        ("1.0", HumanAction::On),
                        ("1.1", HumanAction::On),
                        ("2.0", HumanAction::On),
                    ]),
                    value: rat(1, 2),
                },
                BestResponseCase {
                    human: human_map(&[
                        ("1.0", HumanAction::On),
                        ("1.1", HumanAction::Off),
                        ("2.0", HumanAction::On),
                    ]),
                    value: rat(5, 6),
                },
                BestResponseCase {
                    human: human_map(&[
                        ("1.0", HumanAction::Off),
                        ("1.1", HumanAction::On),
                        ("2.0", HumanAction::On),
                    ]),
                    value: rat(4, 3),
                },
                BestResponseCase {
                    human: human_map(&[
                        ("1.0", HumanAction::Off),
                        ("1.1", HumanAction::Off),
                        ("2.0", HumanAction::On),
                    ]),
                    value: rat_int(1),
                },
            ],
            ..Expected::default()
        }
    };
    (spec, expected)
}

fn bug_fixing(fine: bool) -> (GameSpec, Expected) {
    let table = [[2i64, 3, 4], [-4, -1, 2]];
    let u = move |i: usize, j: usize| rat_int(table[i][j]);
    let spec = if fine {
        product_game(
            &["N", "E"],
            &["F", "S", "M"],
            &uniform(2),
            &uniform(3),
            &u,
            &["N", "E"],
            &|i, _| i,
            &["F", "S", "M"],
            &|_, j| j,
        )
    } else {
        product_game(
            &["N", "E"],
            &["F", "S", "M"],
            &uniform(2),
            &uniform(3),
            &u,
            &["N", "E"],
            &|i, _| i,
            &["F", "SM"],
            &|_, j| if j == 0 { 0 } else { 1 },
        )
    };
    let human = human_map(&[("N", HumanAction::On), ("E", HumanAction::Off)]);
    let expected = if fine {
        Expected {
            opp_value: Some(rat(11, 6)),
            opp_count: Some(1),
            wait_sets: Some(vec![names(&["F", "S"])]),
            human_policy: Some(human.clone()),
            robot_policy: Some(robot_map(&[
                ("F", RobotAction::Wait),
                ("S", RobotAction::Wait),
                ("M", RobotAction::Act),
            ])),
            unaware: Some(UnawareExpectation {
                value: rat(11, 6),
                wait_set: names(&["F", "S"]),
                human_policy: human,
            }),
            ..Expected::default()
        }
    } else {
        Expected {
            opp_value: Some(rat(5, 3)),
            opp_count: Some(1),
            wait_sets: Some(vec![names(&["F"])]),
            human_policy: Some(human.clone()),
            robot_policy: Some(robot_map(&[
                ("F", RobotAction::Wait),
                ("SM", RobotAction::Act),
            ])),
            unaware: Some(UnawareExpectation {
                value: rat(5, 3),
                wait_set: names(&["F"]),
                human_policy: human,
            }),
            ..Expected::default()
        }
    };
    (spec, expected)
}

fn neg_voi(split_coordinates: bool) -> (GameSpec, Expected) {
    // Acting pays +2 when the coordinates differ and -1 when they match.
    let u = |i: usize, j: usize| if i == j { rat_int(-1) } else { rat_int(2) };
    if split_coordinates {
        let spec = product_game(
            &["1", "2"],
            &["1", "2"],
            &uniform(2),
            &uniform(2),
            &u,
            &["1", "2"],
            &|i, _| i,
            &["1", "2"],
            &|_, j| j,
        );
        let expected = Expected {
            opp_value: Some(rat(3, 4)),
            opp_count: Some(2),
            wait_sets: Some(vec![names(&["2"]), names(&["1"])]),
            ..Expected::default()
        };
        (spec, expected)
    } else {
        let spec = product_game(
            &["1", "2"],
            &["1", "2"],
            &uniform(2),
            &uniform(2),
            &u,
            &["0", "1"],
            &|i, j| usize::from(i != j),
            &["*"],
            &|_, _| 0,
        );
        let expected = Expected {
            opp_value: Some(rat_int(1)),
            opp_count: Some(1),
            wait_sets: Some(vec![names(&["*"])]),
            human_policy: Some(human_map(&[
                ("0", HumanAction::Off),
                ("1", HumanAction::On),
            ])),
            robot_policy: Some(robot_map(&[("*", RobotAction::Wait)])),
            ..Expected::default()
        };
        (spec, expected)
    }
}

fn rob_messages_family(p: &Rational) -> Result<(GameSpec, Expected), Error> {
    if !(p > &rat_int(0) && p < &rat(1, 2)) {
        return Err(Error::ParameterOutOfRange {
            name: "p".to_owned(),
            value: p.to_string(),
            range: "0 < p < 1/2".to_owned(),
        });
    }
    let rest = rat_int(1) - rat_int(2) * p;
    // Row payoffs scale as 1/P(row), so optimal values are constant in p.
    let u = {
        let p = p.clone();
        let rest = rest.clone();
        move |i: usize, j: usize| -> Rational {
            let over_p = |n: i64| rat_int(n) / &p;
            let over_rest = |n: i64| rat_int(n) / &rest;
            match (i, j) {
                (0, 0) => over_p(5),
                (0, 1) | (0, 2) => over_p(-10),
                (0, 3) => over_p(10),
                (1, 0) | (1, 2) => over_p(-10),
                (1, 1) => over_p(5),
                (1, 3) => over_p(10),
                (2, 0) | (2, 1) => over_rest(-1),
                (2, 2) => over_rest(1),
                (2, 3) => over_rest(10),
                _ => unreachable!(),
            }
        }
    };
    let first_prior = vec![p.clone(), p.clone(), rest];
    let spec = product_game(
        &["A1", "A2", "A3"],
        &["B1", "B2", "B3", "B4"],
        &first_prior,
        &uniform(4),
        &u,
        &["B1", "B2", "B3", "B4"],
        &|_, j| j,
        &["A1", "A2", "A3"],
        &|i, _| i,
    );
    let expected = Expected {
        opp_value: Some(rat(30, 4)),
        opp_count: Some(1),
        wait_sets: Some(vec![names(&["A1", "A2", "A3"])]),
        human_policy: Some(human_map(&[
            ("B1", HumanAction::Off),
            ("B2", HumanAction::Off),
            ("B3", HumanAction::Off),
            ("B4", HumanAction::On),
        ])),
        robot_policy: Some(robot_map(&[
            ("A1", RobotAction::Wait),
            ("A2", RobotAction::Wait),
            ("A3", RobotAction::Wait),
        ])),
        comm: vec![
            CommExpectation {
                msgs: MessageSystem { human: 1, robot: 1 },
                value: rat(30, 4),
                opp_count: Some(1),
                always_wait_set: Some(names(&["A1", "A2", "A3"])),
                wait_probability: Some(rat_int(1)),
                has_all_wait_opp: Some(true),
            },
            // Besides the pair that acts on A3 and defers on {A1, A2},
            // two tied optima defer everywhere with A3 sharing a message:
            // the shared column nets the same mass as acting unilaterally.
            CommExpectation {
                msgs: MessageSystem { human: 1, robot: 2 },
                value: rat(39, 4),
                opp_count: Some(3),
                always_wait_set: Some(names(&["A1", "A2"])),
                wait_probability: Some(rat_int(2) * p),
                has_all_wait_opp: None,
            },
            CommExpectation {
                msgs: MessageSystem { human: 1, robot: 3 },
                value: rat(41, 4),
                opp_count: None,
                always_wait_set: None,
                wait_probability: None,
                has_all_wait_opp: Some(true),
            },
        ],
        ..Expected::default()
    };
    Ok((spec, expected))
}

fn hum_messages() -> (GameSpec, Expected) {
    let table = [
        [10i64, 1, 1, -30, -30],
        [-30, 1, -30, -30, -30],
        [10, -30, -30, 1, 1],
        [-30, -30, -30, 1, -30],
    ];
    let spec = product_game(
        &["1", "2", "3", "4"],
        &["X", "A", "B", "C", "D"],
        &uniform(4),
        &uniform(5),
        &|i, j| rat_int(table[i][j]),
        &["1", "2", "3", "4"],
        &|i, _| i,
        &["X", "A", "B", "C", "D"],
        &|_, j| j,
    );
    let expected = Expected {
        opp_value: Some(rat_int(1)),
        opp_count: Some(1),
        wait_sets: Some(vec![names(&["X"])]),
        human_policy: Some(human_map(&[
            ("1", HumanAction::On),
            ("2", HumanAction::Off),
            ("3", HumanAction::On),
            ("4", HumanAction::Off),
        ])),
        robot_policy: Some(robot_map(&[
            ("X", RobotAction::Wait),
            ("A", RobotAction::Off),
            ("B", RobotAction::Off),
            ("C", RobotAction::Off),
            ("D", RobotAction::Off),
        ])),
        comm: vec![
            CommExpectation {
                msgs: MessageSystem { human: 1, robot: 1 },
                value: rat_int(1),
                opp_count: Some(1),
                always_wait_set: Some(names(&["X"])),
                wait_probability: Some(rat(1, 5)),
                has_all_wait_opp: Some(false),
            },
            CommExpectation {
                msgs: MessageSystem { human: 2, robot: 1 },
                value: rat(13, 10),
                opp_count: Some(1),
                always_wait_set: Some(names(&["X"])),
                wait_probability: Some(rat(1, 5)),
                has_all_wait_opp: Some(false),
            },
        ],
        ..Expected::default()
    };
    (spec, expected)
}

fn voi_unaware(full_rows: bool) -> (GameSpec, Expected) {
    let table = [[1i64, 1], [2, -3], [-4, -4]];
    let u = move |i: usize, j: usize| rat_int(table[i][j]);
    if full_rows {
        let spec = product_game(
            &["1", "2", "3"],
            &["A", "B"],
            &uniform(3),
            &uniform(2),
            &u,
            &["1", "2", "3"],
            &|i, _| i,
            &["A", "B"],
            &|_, j| j,
        );
        let expected = Expected {
            unaware: Some(UnawareExpectation {
                value: rat(1, 3),
                wait_set: names(&["A", "B"]),
                human_policy: human_map(&[
                    ("1", HumanAction::On),
                    ("2", HumanAction::Off),
                    ("3", HumanAction::Off),
                ]),
            }),
            ..Expected::default()
        };
        (spec, expected)
    } else {
        let spec = product_game(
            &["1", "2", "3"],
            &["A", "B"],
            &uniform(3),
            &uniform(2),
            &u,
            &["0", "1"],
            &|i, _| usize::from(i == 2),
            &["A", "B"],
            &|_, j| j,
        );
        let expected = Expected {
            unaware: Some(UnawareExpectation {
                value: rat(1, 2),
                wait_set: names(&["A"]),
                human_policy: human_map(&[
                    ("0", HumanAction::On),
                    ("1", HumanAction::Off),
                ]),
            }),
            ..Expected::default()
        };
        (spec, expected)
    }
}

/// Builds a catalog entry by name; `params` supplies family parameters
/// (currently only `p` for `rob-messages-family`, default 1/4).
pub fn build_example(
    name: &str,
    params: Option<&BTreeMap<String, Rational>>,
) -> Result<CatalogEntry, Error> {
    let mut used_params: BTreeMap<String, Rational> = BTreeMap::new();
    let (spec, expected, description) = match name {
        "file-deletion" => {
            let (spec, expected) = file_deletion();
            (
                spec,
                expected,
                "Two OS versions and two code types; the robot vets compatibility, the human knows the installed version.",
            )
        }
        "variant-coarse" => {
            let (spec, expected) = variant(true);
            (
                spec,
                expected,
                "Three OS versions, two code types; the human sees only the major version digit.",
            )
        }
        "variant-full" => {
            let (spec, expected) = variant(false);
            (
                spec,
                expected,
                "Three OS versions, two code types; the human sees the full version number.",
            )
        }
        "bug-fixing-1" => {
            let (spec, expected) = bug_fixing(false);
            (
                spec,
                expected,
                "Novice or expert programmer; the robot cannot tell `some` from `many` bugs.",
            )
        }
        "bug-fixing-2" => {
            let (spec, expected) = bug_fixing(true);
            (
                spec,
                expected,
                "Novice or expert programmer; the robot distinguishes few, some, and many bugs.",
            )
        }
        // `neg-voi` is an alias for the split-coordinate structure.
        "neg-voi-1" | "neg-voi" => {
            let (spec, expected) = neg_voi(true);
            (
                spec,
                expected,
                "Acting pays +2 on distinct coordinates, -1 on matching ones; each player sees one coordinate.",
            )
        }
        "neg-voi-2" => {
            let (spec, expected) = neg_voi(false);
            (
                spec,
                expected,
                "Same payoffs, but the human sees whether the coordinates differ and the robot sees nothing.",
            )
        }
        "rob-messages-family" => {
            let default_p = rat(1, 4);
            let p = params
                .and_then(|m| m.get("p"))
                .unwrap_or(&default_p)
                .clone();
            used_params.insert("p".to_owned(), p.clone());
            let (spec, expected) = rob_messages_family(&p)?;
            (
                spec,
                expected,
                "Communication family: payoffs scale inversely with the observation prior, so optima are constant in p.",
            )
        }
        "hum-messages" => {
            let (spec, expected) = hum_messages();
            (
                spec,
                expected,
                "One-bit human message game: a perfect pair exists exactly when the human can send one bit.",
            )
        }
        "voi-unaware-1" => {
            let (spec, expected) = voi_unaware(true);
            (
                spec,
                expected,
                "Unaware-human game; the human sees the full row of the 3 x 2 payoff table.",
            )
        }
        "voi-unaware-2" => {
            let (spec, expected) = voi_unaware(false);
            (
                spec,
                expected,
                "Unaware-human game; the human sees only whether the row is the last one.",
            )
        }
        other => return Err(Error::UnknownExample(other.to_owned())),
    };
    let game = spec.clone().compile()?;
    Ok(CatalogEntry {
        name: name.to_owned(),
        description: description.to_owned(),
        params: used_params,
        spec,
        game,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_compiles_clean() {
        for name in catalog_names() {
            let entry = build_example(name, None).unwrap();
            assert!(crate::game::validate_game(&entry.spec).is_clean(), "{name}");
        }
    }

    #[test]
    fn unknown_example_is_rejected() {
        assert!(matches!(
            build_example("no-such-game", None),
            Err(Error::UnknownExample(_))
        ));
    }

    #[test]
    fn family_parameter_is_range_checked() {
        for bad in [rat_int(0), rat(1, 2), rat_int(1), rat(-1, 4)] {
            let params = [("p".to_owned(), bad)].into();
            assert!(matches!(
                build_example("rob-messages-family", Some(&params)),
                Err(Error::ParameterOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn family_payoff_entries_at_quarter() {
        let entry = build_example("rob-messages-family", None).unwrap();
        // At p = 1/4: 5/p = 20 and 1/(1-2p) = 2.
        assert_eq!(entry.spec.u_act["A1,B1"], rat_int(20));
        assert_eq!(entry.spec.u_act["A3,B3"], rat_int(2));
        assert_eq!(entry.spec.u_act["A1,B2"], rat_int(-40));
        assert_eq!(entry.spec.u_act["A3,B4"], rat_int(20));
    }

    #[test]
    fn neg_voi_payoffs() {
        let entry = build_example("neg-voi", None).unwrap();
        assert_eq!(entry.spec.u_act["1,1"], rat_int(-1));
        assert_eq!(entry.spec.u_act["1,2"], rat_int(2));
        assert_eq!(entry.spec.u_act["2,1"], rat_int(2));
        assert_eq!(entry.spec.u_act["2,2"], rat_int(-1));
        assert_eq!(entry.spec, build_example("neg-voi-1", None).unwrap().spec);
    }

    #[test]
    fn family_human_sees_second_coordinate() {
        let entry = build_example("rob-messages-family", None).unwrap();
        let game = &entry.game;
        for e in &game.joint_table().entries {
            let state = &game.states()[e.state];
            let (a, b) = state.split_once(',').unwrap();
            assert_eq!(game.human_obs()[e.human_obs], b);
            assert_eq!(game.robot_obs()[e.robot_obs], a);
        }
    }
}
