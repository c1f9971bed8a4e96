//! `posg`: exact analysis of partially observable off-switch games.
//!
//! Subcommands: `solve` (optimal pairs, optionally with cheap talk),
//! `unaware` (the robot-unaware pair), `compare-obs` (informativeness
//! verdicts with witness kernels), `reduce-maxcut` (graph-to-game reduction
//! with verification), `catalog` (built-in example games), and `reproduce`
//! (the full regression report). All numeric output is exact `p/q` text.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use posg_core::catalog;
use posg_core::comm::{self, MessageSystem};
use posg_core::files;
use posg_core::game::{Agent, Game};
use posg_core::informativeness::{self, GarblingOptions, ObsStructure};
use posg_core::maxcut;
use posg_core::rational::{format_rational, parse_rational, Rational};
use posg_core::report::{self, ReproduceOptions};
use posg_core::solver::{self, SolveOptions};
use posg_core::unaware::{self, TieBreak};

#[derive(Parser)]
#[command(name = "posg", version, about)]
struct Cli {
    /// Worker threads for enumeration (0 = library default). Results are
    /// identical for every thread count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game for its optimal value and optimal policy pairs.
    Solve(SolveArgs),
    /// Compute the robot-unaware human policy and the robot's best response.
    Unaware(UnawareArgs),
    /// Decide informativeness relations between two games' observation
    /// structures.
    CompareObs(CompareArgs),
    /// Convert a graph into its off-switch game and verify cut equivalence.
    ReduceMaxcut(ReduceArgs),
    /// List or emit the built-in example games.
    Catalog(CatalogArgs),
    /// Replay the whole catalog and print a pass/fail report.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Game spec file (JSON).
    game: PathBuf,
    /// Message-set sizes, e.g. `H=1,R=2`, to solve with cheap talk.
    #[arg(long)]
    messages: Option<String>,
    /// List every optimal pair instead of just the value.
    #[arg(long)]
    all_opps: bool,
    /// Candidate-evaluation cap for the exhaustive search.
    #[arg(long, default_value_t = SolveOptions::default().max_candidates)]
    max_candidates: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UnawareArgs {
    game: PathBuf,
    /// What the human plays where the defining expectation is exactly zero.
    #[arg(long, value_enum, default_value_t = TieBreakArg::On)]
    tie_break: TieBreakArg,
    /// Use the two-delta cascade rule for the robot instead of the exact
    /// argmax best response (the two differ when both deltas are negative).
    #[arg(long)]
    cascade: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    On,
    Off,
    Both,
}

#[derive(Args)]
struct CompareArgs {
    game1: PathBuf,
    game2: PathBuf,
    /// Restrict to one-sided garblings for this agent (H or R).
    #[arg(long = "for", value_enum)]
    for_agent: Option<AgentArg>,
    /// Allow arbitrary (uncoordinated) garblings.
    #[arg(long)]
    any_garbling: bool,
    /// Cap on deterministic kernel pairs in the coordinated search.
    #[arg(long, default_value_t = GarblingOptions::default().max_extreme_points)]
    max_extreme_points: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum AgentArg {
    #[value(name = "H", alias = "h")]
    H,
    #[value(name = "R", alias = "r")]
    R,
}

#[derive(Args)]
struct ReduceArgs {
    /// Edge list: one `u v` pair per line, `#` comments.
    edgelist: PathBuf,
    /// Write the reduction game spec here.
    #[arg(long)]
    emit_game: Option<PathBuf>,
    /// Solve both sides and print the equivalence verdict.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct CatalogArgs {
    #[command(subcommand)]
    action: CatalogAction,
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List example names and descriptions.
    List,
    /// Emit an example's game spec as JSON.
    Emit {
        name: String,
        /// Family parameter, e.g. `p=1/4`. Repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ReproduceArgs {
    /// Run the full catalog (required; partial runs are not supported).
    #[arg(long)]
    all: bool,
    /// Also run the seeded random property suites.
    #[arg(long)]
    properties: bool,
    /// Seed for the random suites, so failures are replayable.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cases per random property suite.
    #[arg(long, default_value_t = 50)]
    cases: usize,
    /// Random graphs in the cut-equivalence check.
    #[arg(long, default_value_t = 20)]
    random_graphs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: cannot configure {} threads: {e}", cli.threads);
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Unaware(args) => cmd_unaware(args),
        Command::CompareObs(args) => cmd_compare(args),
        Command::ReduceMaxcut(args) => cmd_reduce(args),
        Command::Catalog(args) => cmd_catalog(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    }
}

fn load_game(path: &PathBuf) -> Result<Game> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read game file {}", path.display()))?;
    let spec = files::game_spec_from_json(&text)
        .with_context(|| format!("cannot parse game file {}", path.display()))?;
    spec.compile()
        .with_context(|| format!("game file {} failed validation", path.display()))
}

fn parse_messages(text: &str) -> Result<MessageSystem> {
    let mut human = None;
    let mut robot = None;
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .with_context(|| format!("`{part}` is not of the form H=<int> or R=<int>"))?;
        let count: usize = value
            .trim()
            .parse()
            .with_context(|| format!("`{value}` is not a message count"))?;
        match key.trim() {
            "H" | "h" => human = Some(count),
            "R" | "r" => robot = Some(count),
            other => bail!("unknown message side `{other}` (expected H or R)"),
        }
    }
    Ok(MessageSystem::new(human.unwrap_or(1), robot.unwrap_or(1))?)
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let game = load_game(&args.game)?;
    let opts = SolveOptions {
        max_candidates: args.max_candidates,
    };
    let text = match &args.messages {
        None => {
            let result = solver::solve_opp_with(&game, &opts)?;
            let file = files::SolveResultFile::from_result(&game, &result, args.all_opps);
            serde_json::to_string_pretty(&file)?
        }
        Some(spec) => {
            let msgs = parse_messages(spec)?;
            let result = comm::solve_opp_comm_with(&game, &msgs, &opts)?;
            let file =
                files::CommSolveResultFile::from_result(&game, &msgs, &result, args.all_opps);
            serde_json::to_string_pretty(&file)?
        }
    };
    emit(&args.out, text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_unaware(args: UnawareArgs) -> Result<ExitCode> {
    let game = load_game(&args.game)?;
    let tie = match args.tie_break {
        TieBreakArg::On => TieBreak::On,
        TieBreakArg::Off => TieBreak::Off,
        TieBreakArg::Both => TieBreak::Both,
    };
    let mut results = unaware::unaware_opp(&game, tie);
    if args.cascade {
        for result in &mut results {
            let robot = unaware::robot_response_cascade(&game, &result.human);
            let pair = posg_core::policy::PolicyPair {
                human: result.human.clone(),
                robot: robot.clone(),
            };
            result.value = posg_core::policy::expected_payoff(&game, &pair)?;
            result.robots = vec![robot.clone()];
            result.robot = robot;
        }
    }
    let rendered: Vec<files::UnawareResultFile> = results
        .iter()
        .map(|r| files::UnawareResultFile::from_result(&game, r))
        .collect();
    let text = if rendered.len() == 1 {
        serde_json::to_string_pretty(&rendered[0])?
    } else {
        serde_json::to_string_pretty(&rendered)?
    };
    println!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn kernel_json(
    labels_from: &[String],
    labels_to: &[String],
    kernel: &[Vec<Rational>],
) -> serde_json::Value {
    let zero = Rational::from_integer(0.into());
    let mut rows = serde_json::Map::new();
    for (from, row) in labels_from.iter().zip(kernel) {
        let mut cells = serde_json::Map::new();
        for (to, p) in labels_to.iter().zip(row) {
            if *p != zero {
                cells.insert(to.clone(), json!(format_rational(p)));
            }
        }
        rows.insert(from.clone(), serde_json::Value::Object(cells));
    }
    serde_json::Value::Object(rows)
}

fn cell_labels(structure: &ObsStructure) -> Vec<String> {
    let mut labels = Vec::new();
    for oh in &structure.human_obs {
        for or in &structure.robot_obs {
            labels.push(format!("{oh}|{or}"));
        }
    }
    labels
}

fn coordinated_json(
    o1: &ObsStructure,
    o2: &ObsStructure,
    garbling: &informativeness::CoordinatedGarbling,
) -> serde_json::Value {
    let components: Vec<serde_json::Value> = garbling
        .components
        .iter()
        .map(|(weight, g)| {
            json!({
                "weight": format_rational(weight),
                "human_kernel": kernel_json(&o1.human_obs, &o2.human_obs, &g.human_kernel),
                "robot_kernel": kernel_json(&o1.robot_obs, &o2.robot_obs, &g.robot_kernel),
            })
        })
        .collect();
    json!({ "components": components })
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode> {
    let game1 = load_game(&args.game1)?;
    let game2 = load_game(&args.game2)?;
    if game1.states() != game2.states() {
        bail!("the two games must share the same state list, in the same order");
    }
    let o1 = game1.obs_structure();
    let o2 = game2.obs_structure();

    let output = if let Some(agent) = args.for_agent {
        let agent = match agent {
            AgentArg::H => Agent::Human,
            AgentArg::R => Agent::Robot,
        };
        let forward = informativeness::more_informative_for_agent(&o1, &o2, agent)?;
        let backward = informativeness::more_informative_for_agent(&o2, &o1, agent)?;
        let relation = informativeness::informativeness_relation_for_agent(&o1, &o2, agent)?;
        let (from, to) = match agent {
            Agent::Human => (&o1.human_obs, &o2.human_obs),
            Agent::Robot => (&o1.robot_obs, &o2.robot_obs),
        };
        json!({
            "schema_version": files::SCHEMA_VERSION,
            "mode": format!("one-sided ({agent})"),
            "verdict": format!("{relation:?}"),
            "forward_witness": forward.map(|k| kernel_json(from, to, &k)),
            "backward_witness": backward.map(|k| kernel_json(to, from, &k)),
        })
    } else if args.any_garbling {
        let forward = informativeness::find_any_garbling(&o1, &o2)?;
        let backward = informativeness::find_any_garbling(&o2, &o1)?;
        let relation = informativeness::informativeness_relation_any(&o1, &o2)?;
        json!({
            "schema_version": files::SCHEMA_VERSION,
            "mode": "unrestricted garblings",
            "verdict": format!("{relation:?}"),
            "forward_witness": forward.map(|g| kernel_json(&cell_labels(&o1), &cell_labels(&o2), &g.kernel)),
            "backward_witness": backward.map(|g| kernel_json(&cell_labels(&o2), &cell_labels(&o1), &g.kernel)),
        })
    } else {
        let opts = GarblingOptions {
            max_extreme_points: args.max_extreme_points,
        };
        let forward = informativeness::find_coordinated_garbling(&o1, &o2, &opts)?;
        let backward = informativeness::find_coordinated_garbling(&o2, &o1, &opts)?;
        let relation = informativeness::informativeness_relation(&o1, &o2, &opts)?;
        json!({
            "schema_version": files::SCHEMA_VERSION,
            "mode": "coordinated garblings",
            "verdict": format!("{relation:?}"),
            "forward_witness": forward.map(|g| coordinated_json(&o1, &o2, &g)),
            "backward_witness": backward.map(|g| coordinated_json(&o2, &o1, &g)),
        })
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(args: ReduceArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.edgelist)
        .with_context(|| format!("cannot read {}", args.edgelist.display()))?;
    let graph = maxcut::Graph::parse_edge_list(&text)?;
    let game = maxcut::graph_to_posg(&graph)?;
    if let Some(path) = &args.emit_game {
        fs::write(path, files::game_spec_to_json(game.spec())?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let mut output = json!({
        "schema_version": files::SCHEMA_VERSION,
        "vertices": graph.vertices().len(),
        "edges": graph.edges().len(),
        "states": game.states().len(),
    });
    let mut all_pass = true;
    if args.verify {
        let cut = maxcut::brute_force_maxcut(&graph)?;
        let solved = solver::solve_opp(&game)?;
        let equivalent =
            solved.value == Rational::from_integer((cut as i64).into());
        let any_acts = solved.opps.iter().any(|pair| {
            pair.robot
                .actions.contains(&posg_core::policy::RobotAction::Act)
        });
        all_pass = equivalent && !any_acts;
        let object = output.as_object_mut().unwrap();
        object.insert("max_cut".into(), json!(cut));
        object.insert("game_value".into(), json!(format_rational(&solved.value)));
        object.insert("equivalent".into(), json!(equivalent));
        object.insert("any_optimal_pair_acts".into(), json!(any_acts));
    }
    println!("{}", serde_json::to_string_pretty(&output)?);
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_catalog(args: CatalogArgs) -> Result<ExitCode> {
    match args.action {
        CatalogAction::List => {
            for name in catalog::catalog_names() {
                let entry = catalog::build_example(name, None)?;
                let params = if entry.params.is_empty() {
                    String::new()
                } else {
                    let rendered: Vec<String> = entry
                        .params
                        .iter()
                        .map(|(k, v)| format!("{k}={}", format_rational(v)))
                        .collect();
                    format!(" [{}]", rendered.join(", "))
                };
                println!("{name}{params}: {}", entry.description);
            }
        }
        CatalogAction::Emit { name, params, out } => {
            let mut map: BTreeMap<String, Rational> = BTreeMap::new();
            for param in &params {
                let (key, value) = param
                    .split_once('=')
                    .with_context(|| format!("`{param}` is not of the form name=<rational>"))?;
                map.insert(key.trim().to_owned(), parse_rational(value)?);
            }
            let entry = catalog::build_example(&name, Some(&map))?;
            emit(&out, files::game_spec_to_json(&entry.spec)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<ExitCode> {
    if !args.all {
        bail!("pass --all to run the full catalog reproduction");
    }
    let report = report::run_reproduction(&ReproduceOptions {
        properties: args.properties,
        seed: args.seed,
        property_cases: args.cases,
        random_graphs: args.random_graphs,
    })?;
    print!("{}", report.render_table());
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
