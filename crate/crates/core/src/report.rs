//! One-shot reproduction report over the examples catalog.
//!
//! Replays the solvers over every catalog entry, compares against the
//! expected records by exact equality, and adds the cross-entry checks
//! (deference orderings, informativeness verdicts, garbling existence, the
//! cut/game equivalence on a fixed graph set plus seeded random graphs).
//! With `properties` enabled it also runs the seeded random property suites.
//!
//! Output is deterministic byte-for-byte for a fixed seed, independent of
//! thread count.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{self, CatalogEntry};
use crate::comm::{self, MessageSystem};
use crate::error::Error;
use crate::game::{Agent, Game};
use crate::informativeness::{self, GarblingOptions};
use crate::maxcut;
use crate::policy::{self, PolicyPair, RobotAction, RobotPolicy, StochasticPolicyPair};
use crate::random;
use crate::rational::{format_rational, Rational};
use crate::solver::{self, WaitOrdering};
use crate::unaware::{self, TieBreak};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub example: String,
    pub check: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReproductionReport {
    pub rows: Vec<ReportRow>,
}

impl ReproductionReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    /// Fixed-width text table, stable across runs and thread counts.
    pub fn render_table(&self) -> String {
        let headers = ["example", "check", "expected", "computed", "status"];
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            let cells = [
                row.example.as_str(),
                row.check.as_str(),
                row.expected.as_str(),
                row.computed.as_str(),
            ];
            for (w, cell) in widths.iter_mut().zip(cells) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:w0$}  {:w1$}  {:w2$}  {:w3$}  {}",
            headers[0],
            headers[1],
            headers[2],
            headers[3],
            headers[4],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3],
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:w0$}  {:w1$}  {:w2$}  {:w3$}  {}",
                row.example,
                row.check,
                row.expected,
                row.computed,
                if row.pass { "pass" } else { "FAIL" },
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3],
            );
        }
        let _ = writeln!(
            out,
            "{} checks, {} failed",
            self.rows.len(),
            self.failed()
        );
        out
    }

    fn push(&mut self, example: &str, check: &str, expected: String, computed: String) {
        let pass = expected == computed;
        self.rows.push(ReportRow {
            example: example.to_owned(),
            check: check.to_owned(),
            expected,
            computed,
            pass,
        });
    }

    fn push_outcome(&mut self, example: &str, check: &str, outcome: Result<(), String>) {
        let (computed, pass) = match outcome {
            Ok(()) => ("ok".to_owned(), true),
            Err(message) => (message, false),
        };
        self.rows.push(ReportRow {
            example: example.to_owned(),
            check: check.to_owned(),
            expected: "ok".to_owned(),
            computed,
            pass,
        });
    }
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    /// Also run the seeded random property suites.
    pub properties: bool,
    pub seed: u64,
    /// Cases per random property suite.
    pub property_cases: usize,
    /// Random graphs in the cut-equivalence check.
    pub random_graphs: usize,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            properties: false,
            seed: 0,
            property_cases: 50,
            random_graphs: 20,
        }
    }
}

fn set_to_string(set: &BTreeSet<String>) -> String {
    let items: Vec<&str> = set.iter().map(|s| s.as_str()).collect();
    format!("{{{}}}", items.join(", "))
}

fn wait_names(game: &Game, set: &BTreeSet<usize>) -> BTreeSet<String> {
    set.iter()
        .map(|&or| game.robot_obs()[or].clone())
        .collect()
}

fn catalog_rows(report: &mut ReproductionReport, entry: &CatalogEntry) -> Result<(), Error> {
    let game = &entry.game;
    let expected = &entry.expected;
    let name = &entry.name;

    if expected.opp_value.is_some()
        || expected.opp_count.is_some()
        || expected.wait_sets.is_some()
    {
        let result = solver::solve_opp(game)?;
        if let Some(value) = &expected.opp_value {
            report.push(
                name,
                "optimal value",
                format_rational(value),
                format_rational(&result.value),
            );
        }
        if let Some(count) = expected.opp_count {
            report.push(
                name,
                "optimal pair count",
                count.to_string(),
                result.opps.len().to_string(),
            );
        }
        if let Some(wait_sets) = &expected.wait_sets {
            let computed: Vec<String> = result
                .deference_sets
                .iter()
                .map(|s| set_to_string(&wait_names(game, s)))
                .collect();
            let stated: Vec<String> = wait_sets.iter().map(set_to_string).collect();
            report.push(name, "wait sets", stated.join(" "), computed.join(" "));
        }
        if let (Some(human), 1) = (&expected.human_policy, result.opps.len()) {
            let computed = result.opps[0].human.to_named(game);
            report.push(
                name,
                "human policy",
                format!("{human:?}"),
                format!("{computed:?}"),
            );
        }
        if let (Some(robot), 1) = (&expected.robot_policy, result.opps.len()) {
            let computed = result.opps[0].robot.to_named(game);
            report.push(
                name,
                "robot policy",
                format!("{robot:?}"),
                format!("{computed:?}"),
            );
        }
    }

    if let Some(all_wait) = &expected.all_wait_value {
        let robot = RobotPolicy::uniform(game, RobotAction::Wait);
        let human = policy::best_response_human(game, &robot)?.remove(0);
        let value = policy::expected_payoff(game, &PolicyPair { human, robot })?;
        report.push(
            name,
            "best always-wait value",
            format_rational(all_wait),
            format_rational(&value),
        );
    }

    for case in &expected.comm {
        let label = format!("comm H={} R={}", case.msgs.human, case.msgs.robot);
        let result = comm::solve_opp_comm(game, &case.msgs)?;
        report.push(
            name,
            &format!("{label} value"),
            format_rational(&case.value),
            format_rational(&result.value),
        );
        if let Some(count) = case.opp_count {
            report.push(
                name,
                &format!("{label} pair count"),
                count.to_string(),
                result.opps.len().to_string(),
            );
        }
        if let Some(always) = &case.always_wait_set {
            // Existence check: ties can add optimal pairs with other wait
            // sets, so the witness is located rather than assumed first.
            let position = result
                .always_wait_sets
                .iter()
                .position(|s| wait_names(game, s) == *always);
            report.push(
                name,
                &format!("{label} some pair waits exactly on"),
                set_to_string(always),
                match position {
                    Some(i) => set_to_string(&wait_names(game, &result.always_wait_sets[i])),
                    None => "(no such pair)".to_owned(),
                },
            );
            if let (Some(mass), Some(i)) = (&case.wait_probability, position) {
                report.push(
                    name,
                    &format!("{label} its wait probability"),
                    format_rational(mass),
                    format_rational(&result.wait_probability[i]),
                );
            }
        }
        if let Some(has) = case.has_all_wait_opp {
            let all: BTreeSet<usize> = game.positive_robot_obs().iter().copied().collect();
            let computed = result.always_wait_sets.contains(&all);
            report.push(
                name,
                &format!("{label} all-wait pair exists"),
                has.to_string(),
                computed.to_string(),
            );
        }
    }

    if let Some(unaware_expected) = &expected.unaware {
        let result = unaware::unaware_opp(game, TieBreak::On).remove(0);
        report.push(
            name,
            "unaware value",
            format_rational(&unaware_expected.value),
            format_rational(&result.value),
        );
        report.push(
            name,
            "unaware wait set",
            set_to_string(&unaware_expected.wait_set),
            set_to_string(&wait_names(game, &result.robot.wait_set())),
        );
        report.push(
            name,
            "unaware human policy",
            format!("{:?}", unaware_expected.human_policy),
            format!("{:?}", result.human.to_named(game)),
        );
    }

    for case in &expected.best_response_cases {
        let human = policy::HumanPolicy::from_named(game, &case.human)?;
        let result = unaware::robot_best_response_unaware(game, &human);
        report.push(
            name,
            &format!("best response to {:?}", case.human),
            format_rational(&case.value),
            format_rational(&result.value),
        );
    }

    Ok(())
}

fn cross_entry_rows(report: &mut ReproductionReport) -> Result<(), Error> {
    // Deference shrinks when the human is better informed.
    let coarse = catalog::build_example("variant-coarse", None)?.game;
    let full = catalog::build_example("variant-full", None)?.game;
    let coarse_wait = wait_names(&coarse, &solver::solve_opp(&coarse)?.deference_sets[0]);
    let full_wait = wait_names(&full, &solver::solve_opp(&full)?.deference_sets[0]);
    let verdict = solver::wait_set_relation(&full_wait, &coarse_wait);
    report.push(
        "variant pair",
        "informed-human wait ordering",
        format!("{:?}", WaitOrdering::StrictlyLess),
        format!("{verdict:?}"),
    );
    let relation = informativeness::informativeness_relation_for_agent(
        &full.obs_structure(),
        &coarse.obs_structure(),
        Agent::Human,
    )?;
    report.push(
        "variant pair",
        "human informativeness",
        "StrictlyMore".to_owned(),
        format!("{relation:?}"),
    );

    // Deference shrinks when the robot is less informed.
    let coarse = catalog::build_example("bug-fixing-1", None)?.game;
    let fine = catalog::build_example("bug-fixing-2", None)?.game;
    let coarse_wait = wait_names(&coarse, &solver::solve_opp(&coarse)?.deference_sets[0]);
    let fine_wait = wait_names(&fine, &solver::solve_opp(&fine)?.deference_sets[0]);
    let verdict = solver::wait_set_relation(&coarse_wait, &fine_wait);
    report.push(
        "bug-fixing pair",
        "less-informed-robot wait ordering",
        format!("{:?}", WaitOrdering::StrictlyLess),
        format!("{verdict:?}"),
    );
    let relation = informativeness::informativeness_relation_for_agent(
        &fine.obs_structure(),
        &coarse.obs_structure(),
        Agent::Robot,
    )?;
    report.push(
        "bug-fixing pair",
        "robot informativeness",
        "StrictlyMore".to_owned(),
        format!("{relation:?}"),
    );
    let relation = informativeness::informativeness_relation(
        &fine.obs_structure(),
        &coarse.obs_structure(),
        &GarblingOptions::default(),
    )?;
    report.push(
        "bug-fixing pair",
        "coordinated informativeness",
        "StrictlyMore".to_owned(),
        format!("{relation:?}"),
    );

    // A garbling can raise the optimum only because it is not coordinated.
    let o1 = catalog::build_example("neg-voi-1", None)?.game.obs_structure();
    let o2 = catalog::build_example("neg-voi-2", None)?.game.obs_structure();
    let any = informativeness::find_any_garbling(&o1, &o2)?.is_some();
    let coordinated =
        informativeness::find_coordinated_garbling(&o1, &o2, &GarblingOptions::default())?
            .is_some();
    report.push(
        "neg-voi pair",
        "unrestricted garbling exists",
        "true".to_owned(),
        any.to_string(),
    );
    report.push(
        "neg-voi pair",
        "coordinated garbling exists",
        "false".to_owned(),
        coordinated.to_string(),
    );

    Ok(())
}

/// Exact equivalence between cut sizes and reduction-game optima on a fixed
/// graph set plus seeded random graphs, including the no-unilateral-action
/// property of every optimal pair.
pub fn maxcut_equivalence(seed: u64, random_graphs: usize) -> Result<(), String> {
    let mut graphs = vec![
        ("K3".to_owned(), maxcut::Graph::complete(3)),
        ("K4".to_owned(), maxcut::Graph::complete(4)),
        ("P3".to_owned(), maxcut::Graph::path(3)),
        ("C5".to_owned(), maxcut::Graph::cycle(5)),
        ("S5".to_owned(), maxcut::Graph::star(5)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random_graphs {
        graphs.push((format!("random-{i}"), random::random_graph(&mut rng, 6)));
    }
    for (label, graph) in &graphs {
        let game = maxcut::graph_to_posg(graph).map_err(|e| format!("{label}: {e}"))?;
        let result = solver::solve_opp(&game).map_err(|e| format!("{label}: {e}"))?;
        let brute = maxcut::brute_force_maxcut(graph).map_err(|e| format!("{label}: {e}"))?;
        let expected = Rational::from_integer((brute as i64).into());
        if result.value != expected {
            return Err(format!(
                "{label}: game optimum {} differs from max cut {brute}",
                result.value
            ));
        }
        for pair in &result.opps {
            if pair.robot.actions.contains(&RobotAction::Act) {
                return Err(format!("{label}: an optimal pair acts unilaterally"));
            }
            let (side, _) =
                maxcut::policy_to_cut(graph, pair).map_err(|e| format!("{label}: {e}"))?;
            if maxcut::cut_size(graph, &side) < brute {
                return Err(format!("{label}: optimal pair induces a sub-maximum cut"));
            }
        }
    }
    Ok(())
}

/// Redundant observations admit an optimal pair that always (never) waits
/// when the robot (human) is the redundant side.
pub fn redundancy_implies_deference(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = random::RandomGameConfig::small();
    for i in 0..cases {
        let game = random::random_redundant_game(&mut rng, &cfg, Agent::Robot);
        let (exists, _) =
            solver::exists_always_wait_opp(&game).map_err(|e| format!("case {i}: {e}"))?;
        if !exists {
            return Err(format!(
                "case {i}: robot-redundant game has no always-wait optimal pair"
            ));
        }
        let game = random::random_redundant_game(&mut rng, &cfg, Agent::Human);
        let (exists, _) =
            solver::exists_never_wait_opp(&game).map_err(|e| format!("case {i}: {e}"))?;
        if !exists {
            return Err(format!(
                "case {i}: human-redundant game has no never-wait optimal pair"
            ));
        }
    }
    Ok(())
}

/// Applying a coordinated garbling never raises the optimal value.
pub fn garbling_monotonicity(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = random::RandomGameConfig::small();
    for i in 0..cases {
        let game = random::random_game(&mut rng, &cfg);
        let structure = game.obs_structure();
        let (garbling, target_human, target_robot) =
            random::random_coordinated_garbling(&mut rng, &structure);
        let garbled_structure =
            informativeness::apply_garbling(&structure, &garbling, &target_human, &target_robot)
                .map_err(|e| format!("case {i}: {e}"))?;
        let garbled = game
            .with_structure(&garbled_structure)
            .map_err(|e| format!("case {i}: {e}"))?;
        let original = solver::solve_opp(&game).map_err(|e| format!("case {i}: {e}"))?;
        let coarser = solver::solve_opp(&garbled).map_err(|e| format!("case {i}: {e}"))?;
        if original.value < coarser.value {
            return Err(format!(
                "case {i}: garbling raised the optimum from {} to {}",
                original.value, coarser.value
            ));
        }
    }
    Ok(())
}

/// More robot-side information never hurts a robot facing an unaware human.
pub fn unaware_robot_information_monotonicity(seed: u64, cases: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = random::RandomGameConfig::small();
    for i in 0..cases {
        let game = random::random_game(&mut rng, &cfg);
        let structure = game.obs_structure();
        let (garbling, target_human, target_robot) =
            random::random_one_sided_garbling(&mut rng, &structure, Agent::Robot);
        let garbled_structure =
            informativeness::apply_garbling(&structure, &garbling, &target_human, &target_robot)
                .map_err(|e| format!("case {i}: {e}"))?;
        let garbled = game
            .with_structure(&garbled_structure)
            .map_err(|e| format!("case {i}: {e}"))?;
        let original = unaware::unaware_opp(&game, TieBreak::On).remove(0);
        let coarser = unaware::unaware_opp(&garbled, TieBreak::On).remove(0);
        if original.value < coarser.value {
            return Err(format!(
                "case {i}: robot-side garbling raised the unaware value from {} to {}",
                original.value, coarser.value
            ));
        }
    }
    Ok(())
}

/// Nested message systems give monotone non-decreasing optimal values on
/// every catalog game.
pub fn expressiveness_monotonicity() -> Result<(), String> {
    for name in catalog::catalog_names() {
        let entry = catalog::build_example(name, None).map_err(|e| e.to_string())?;
        let chains: Vec<Vec<(usize, usize)>> = match *name {
            "hum-messages" => vec![vec![(1, 1), (2, 1)], vec![(1, 1), (1, 2)]],
            "rob-messages-family" => {
                vec![vec![(1, 1), (1, 2), (1, 3)], vec![(1, 1), (2, 2)]]
            }
            _ => vec![vec![(1, 1), (2, 1), (2, 2)]],
        };
        for chain in chains {
            let mut last: Option<Rational> = None;
            for (h, r) in chain {
                let msgs = MessageSystem::new(h, r).map_err(|e| e.to_string())?;
                let result = comm::solve_opp_comm(&entry.game, &msgs)
                    .map_err(|e| format!("{name} H={h} R={r}: {e}"))?;
                if let Some(previous) = &last {
                    if result.value < *previous {
                        return Err(format!(
                            "{name}: value dropped from {previous} to {} at H={h} R={r}",
                            result.value
                        ));
                    }
                }
                last = Some(result.value);
            }
        }
    }
    Ok(())
}

/// Derandomization reproduces unique optimal pairs from their point masses
/// and never loses payoff on random stochastic pairs.
pub fn derandomize_checks(seed: u64, cases: usize) -> Result<(), String> {
    for name in catalog::catalog_names() {
        let entry = catalog::build_example(name, None).map_err(|e| e.to_string())?;
        let result = solver::solve_opp(&entry.game).map_err(|e| e.to_string())?;
        if result.opps.len() == 1 {
            let point_mass = StochasticPolicyPair::from_deterministic(&result.opps[0]);
            let recovered =
                policy::derandomize(&entry.game, &point_mass).map_err(|e| e.to_string())?;
            if recovered != result.opps[0] {
                return Err(format!("{name}: point-mass optimum not recovered"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = random::RandomGameConfig::small();
    for i in 0..cases {
        let game = random::random_game(&mut rng, &cfg);
        let pair = random::random_stochastic_pair(&mut rng, &game);
        let before = policy::evaluate_stochastic(&game, &pair).map_err(|e| e.to_string())?;
        let deterministic = policy::derandomize(&game, &pair).map_err(|e| e.to_string())?;
        let after =
            policy::expected_payoff(&game, &deterministic).map_err(|e| e.to_string())?;
        if after < before {
            return Err(format!(
                "case {i}: derandomization lost payoff ({before} -> {after})"
            ));
        }
    }
    Ok(())
}

/// Sanity checks that hold on every catalog entry regardless of its expected
/// record: the solver value is certified by the slow oracle and every
/// reported pair attains it.
fn certification_rows(report: &mut ReproductionReport) -> Result<(), Error> {
    for name in catalog::catalog_names() {
        let entry = catalog::build_example(name, None)?;
        let result = solver::solve_opp(&entry.game)?;
        let brute = solver::brute_force_optimal_value(&entry.game)?;
        report.push(
            name,
            "value matches exhaustive cross product",
            format_rational(&brute),
            format_rational(&result.value),
        );
        let all_optimal = result.opps.iter().all(|pair| {
            policy::expected_payoff(&entry.game, pair)
                .map(|v| v == result.value)
                .unwrap_or(false)
        });
        report.push(
            name,
            "every reported pair is optimal",
            "true".to_owned(),
            all_optimal.to_string(),
        );
    }
    Ok(())
}

/// Runs the full reproduction.
pub fn run_reproduction(opts: &ReproduceOptions) -> Result<ReproductionReport, Error> {
    let mut report = ReproductionReport::default();
    for name in catalog::catalog_names() {
        let entry = catalog::build_example(name, None)?;
        catalog_rows(&mut report, &entry)?;
    }
    cross_entry_rows(&mut report)?;
    certification_rows(&mut report)?;
    report.push_outcome(
        "maxcut",
        &format!("cut/game equivalence ({} random graphs)", opts.random_graphs),
        maxcut_equivalence(opts.seed, opts.random_graphs),
    );
    if opts.properties {
        report.push_outcome(
            "properties",
            &format!("redundancy implies deference ({} cases)", opts.property_cases),
            redundancy_implies_deference(opts.seed, opts.property_cases),
        );
        report.push_outcome(
            "properties",
            &format!("garbling monotonicity ({} cases)", opts.property_cases),
            garbling_monotonicity(opts.seed, opts.property_cases),
        );
        report.push_outcome(
            "properties",
            "message expressiveness monotonicity",
            expressiveness_monotonicity(),
        );
        report.push_outcome(
            "properties",
            &format!("derandomization ({} cases)", opts.property_cases),
            derandomize_checks(opts.seed, opts.property_cases),
        );
        report.push_outcome(
            "properties",
            &format!(
                "unaware robot-information monotonicity ({} cases)",
                opts.property_cases
            ),
            unaware_robot_information_monotonicity(opts.seed, opts.property_cases),
        );
    }
    Ok(report)
}
