//! The MAXCUT reduction: graphs to games and cuts to policies.
//!
//! A graph on n vertices maps to a game whose states are ordered vertex
//! pairs: acting pays -n^4 on the diagonal, n^2 on edges, 0 elsewhere, with
//! uniform prior and the human/robot observing the first/second vertex. The
//! n^2 edge payoff cancels the 1/n^2 prior, so a cut of size k induces a
//! policy pair of expected payoff exactly k, and conversely any pair that
//! never acts unilaterally induces a cut at least as large as its payoff.
//! Both directions are exercised against a brute-force cut oracle.

use std::collections::BTreeSet;


use crate::error::Error;
use crate::game::{Game, GameSpec};
use crate::policy::{HumanAction, HumanPolicy, PolicyPair, RobotAction, RobotPolicy};
use crate::rational::{rat_int, Rational};

/// An undirected graph without self-loops. Edges are stored as index pairs
/// `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: &[(String, String)]) -> Result<Self, Error> {
        let index = |name: &String| {
            vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVertex {
                    vertex: name.clone(),
                })
        };
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            let (i, j) = (index(a)?, index(b)?);
            if i == j {
                return Err(Error::SelfLoop { vertex: a.clone() });
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Graph {
            vertices,
            edges: set,
        })
    }

    /// Parses the edge-list format: one `u v` pair per line, `#` comments.
    /// The vertex set is the set of mentioned endpoints, in order of first
    /// appearance.
    pub fn parse_edge_list(text: &str) -> Result<Self, Error> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a.to_owned(), b.to_owned()),
                _ => {
                    return Err(Error::FileFormat(format!(
                        "line {}: expected `u v`, got `{raw}`",
                        lineno + 1
                    )))
                }
            };
            for v in [&a, &b] {
                if !vertices.contains(v) {
                    vertices.push(v.clone());
                }
            }
            edges.push((a, b));
        }
        Graph::new(vertices, &edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Complete graph on `n` vertices named `v0..`.
    pub fn complete(n: usize) -> Self {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph { vertices, edges }
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> Self {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Graph { vertices, edges }
    }

    /// Cycle on `n` vertices.
    pub fn cycle(n: usize) -> Self {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges: BTreeSet<(usize, usize)> =
            (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if n > 2 {
            edges.insert((0, n - 1));
        }
        Graph { vertices, edges }
    }

    /// Star with `leaves` leaves around a hub.
    pub fn star(leaves: usize) -> Self {
        let mut vertices = vec!["hub".to_owned()];
        vertices.extend((0..leaves).map(|i| format!("v{i}")));
        Graph {
            vertices,
            edges: (1..=leaves).map(|i| (0, i)).collect(),
        }
    }
}

/// State name for the ordered vertex pair.
fn pair_name(a: &str, b: &str) -> String {
    format!("{a},{b}")
}

/// Builds the reduction game: states are ordered vertex pairs under the
/// uniform prior, the human observes the first vertex and the robot the
/// second, shutting off pays 0, and acting pays -n^4 / n^2 / 0 on
/// diagonal / edge / non-edge pairs.
pub fn graph_to_posg(graph: &Graph) -> Result<Game, Error> {
    let n = graph.vertices.len();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let n_i64 = n as i64;
    let mut states = Vec::with_capacity(n * n);
    let mut prior = std::collections::BTreeMap::new();
    let mut obs_dist = std::collections::BTreeMap::new();
    let mut u_act = std::collections::BTreeMap::new();
    let mut u_off = std::collections::BTreeMap::new();
    for (i, a) in graph.vertices.iter().enumerate() {
        for (j, b) in graph.vertices.iter().enumerate() {
            let state = pair_name(a, b);
            states.push(state.clone());
            prior.insert(state.clone(), Rational::new(1.into(), (n_i64 * n_i64).into()));
            obs_dist.insert(
                state.clone(),
                [((a.clone(), b.clone()), rat_int(1))].into(),
            );
            let payoff = if i == j {
                rat_int(-n_i64.pow(4))
            } else if graph.has_edge(i, j) {
                rat_int(n_i64.pow(2))
            } else {
                rat_int(0)
            };
            u_act.insert(state.clone(), payoff);
            u_off.insert(state, rat_int(0));
        }
    }
    GameSpec {
        states,
        prior,
        human_obs: graph.vertices.clone(),
        robot_obs: graph.vertices.clone(),
        obs_dist,
        u_act,
        u_off,
    }
    .compile()
}

/// Translates a cut `(human_part, robot_part)` into the policy pair that
/// realizes it: the human approves on her part, the robot waits on its part
/// and shuts off elsewhere. The pair's expected payoff equals the cut size.
pub fn cut_to_policy(
    graph: &Graph,
    cut: (&BTreeSet<usize>, &BTreeSet<usize>),
) -> Result<PolicyPair, Error> {
    let (human_part, robot_part) = cut;
    let n = graph.vertices.len();
    let disjoint = human_part.is_disjoint(robot_part);
    let covering = human_part.len() + robot_part.len() == n
        && human_part.iter().chain(robot_part).all(|&v| v < n);
    if !disjoint || !covering {
        return Err(Error::NotAPartition(format!(
            "({human_part:?}, {robot_part:?})"
        )));
    }
    let human = HumanPolicy::new(
        (0..n)
            .map(|v| {
                if human_part.contains(&v) {
                    HumanAction::On
                } else {
                    HumanAction::Off
                }
            })
            .collect(),
    );
    let robot = RobotPolicy::new(
        (0..n)
            .map(|v| {
                if robot_part.contains(&v) {
                    RobotAction::Wait
                } else {
                    RobotAction::Off
                }
            })
            .collect(),
    );
    Ok(PolicyPair { human, robot })
}

/// Reads a cut off a policy pair for the reduction game: the human's ON set
/// against the rest. The cut size is at least the pair's expected payoff.
///
/// Rejects pairs in which the robot ever acts unilaterally; the diagonal
/// penalty makes unilateral action strictly dominated, so such pairs carry no
/// cut guarantee.
pub fn policy_to_cut(
    graph: &Graph,
    pair: &PolicyPair,
) -> Result<(BTreeSet<usize>, BTreeSet<usize>), Error> {
    let n = graph.vertices.len();
    if pair.human.actions.len() != n || pair.robot.actions.len() != n {
        return Err(Error::NotAPartition(
            "policy does not cover the vertex set".to_owned(),
        ));
    }
    if let Some(v) = pair
        .robot
        .actions
        .iter()
        .position(|a| *a == RobotAction::Act)
    {
        return Err(Error::ReductionPolicyActs {
            obs: graph.vertices[v].clone(),
        });
    }
    let on_side: BTreeSet<usize> = (0..n)
        .filter(|&v| pair.human.actions[v] == HumanAction::On)
        .collect();
    let rest: BTreeSet<usize> = (0..n).filter(|v| !on_side.contains(v)).collect();
    Ok((on_side, rest))
}

/// Number of edges crossing a bipartition.
pub fn cut_size(graph: &Graph, side: &BTreeSet<usize>) -> u64 {
    graph
        .edges
        .iter()
        .filter(|(u, v)| side.contains(u) != side.contains(v))
        .count() as u64
}

/// Exact maximum cut by enumerating all bipartitions. Independent oracle for
/// the reduction; capped at 20 vertices.
pub fn brute_force_maxcut(graph: &Graph) -> Result<u64, Error> {
    let n = graph.vertices.len();
    if n > 20 {
        return Err(Error::GraphTooLarge { got: n, cap: 20 });
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut best = 0u64;
    // Fix vertex 0's side; complements give the same cut.
    for bits in 0..(1u64 << (n - 1)) {
        let side: BTreeSet<usize> = (1..n).filter(|&v| bits >> (v - 1) & 1 == 1).collect();
        best = best.max(cut_size(graph, &side));
    }
    Ok(best)
}
