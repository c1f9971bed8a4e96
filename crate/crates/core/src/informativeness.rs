//! Garblings, redundancy, and informativeness relations between observation
//! structures.
//!
//! A garbling post-processes an observation pair with a stochastic kernel.
//! Independent garblings factor per agent; coordinated garblings are mixtures
//! of independent ones. Structure `O1` is more informative than `O2` when a
//! coordinated garbling pushes every per-state law of `O1` onto `O2`.
//!
//! Decision procedures:
//!
//! - one-sided (single-agent) garbling existence is a linear feasibility
//!   problem in the kernel entries and is decided exactly;
//! - coordinated-garbling existence is decided exactly by a feasibility LP
//!   over mixture weights of all deterministic kernel pairs, which are the
//!   extreme points of the coordinated set (cost exponential in the
//!   observation-set sizes, guarded by a cap);
//! - unrestricted garbling existence is again a plain feasibility LP;
//! - general two-sided independent garbling existence is bilinear and is NOT
//!   decided exactly; [`find_independent_garbling`] is a non-exhaustive
//!   alternating search whose `None` is not a proof of absence.
//!
//! All pivoting is exact rational arithmetic, so verdicts are certificates.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::game::{Agent, Game};
use crate::lp::{self, LpOutcome};
use crate::rational::Rational;

/// An observation structure over an external state list: observation sets
/// plus, per state, the joint law of the observation pair.
///
/// `dist[s][oh * robot_obs.len() + or]` is the probability of the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObsStructure {
    pub human_obs: Vec<String>,
    pub robot_obs: Vec<String>,
    pub dist: Vec<Vec<Rational>>,
}

impl ObsStructure {
    pub fn at(&self, state: usize, oh: usize, or: usize) -> &Rational {
        &self.dist[state][oh * self.robot_obs.len() + or]
    }

    pub fn states_len(&self) -> usize {
        self.dist.len()
    }

    fn check_rows(&self) -> Result<(), Error> {
        let cells = self.human_obs.len() * self.robot_obs.len();
        for (s, row) in self.dist.iter().enumerate() {
            if row.len() != cells {
                return Err(Error::StructureMismatch {
                    reason: format!("state {s} row has {} cells, expected {cells}", row.len()),
                });
            }
        }
        Ok(())
    }
}

/// Stochastic map per agent; the joint kernel is the product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentGarbling {
    /// `human_kernel[from][to]`
    pub human_kernel: Vec<Vec<Rational>>,
    /// `robot_kernel[from][to]`
    pub robot_kernel: Vec<Vec<Rational>>,
}

/// The n x n identity kernel.
pub fn identity_kernel(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

impl IndependentGarbling {
    /// The identity garbling on the given set sizes.
    pub fn identity(n_human: usize, n_robot: usize) -> Self {
        IndependentGarbling {
            human_kernel: identity_kernel(n_human),
            robot_kernel: identity_kernel(n_robot),
        }
    }

    /// Deterministic garbling from a pair of maps.
    pub fn deterministic(
        human_map: &[usize],
        n_human_to: usize,
        robot_map: &[usize],
        n_robot_to: usize,
    ) -> Self {
        let dirac = |map: &[usize], n_to: usize| {
            map.iter()
                .map(|&to| {
                    let mut row = vec![Rational::zero(); n_to];
                    row[to] = Rational::one();
                    row
                })
                .collect()
        };
        IndependentGarbling {
            human_kernel: dirac(human_map, n_human_to),
            robot_kernel: dirac(robot_map, n_robot_to),
        }
    }

    fn check(&self) -> Result<(), Error> {
        for (label, kernel) in [("human", &self.human_kernel), ("robot", &self.robot_kernel)] {
            for (i, row) in kernel.iter().enumerate() {
                if row.iter().any(|p| p.is_negative()) {
                    return Err(Error::BadGarbling {
                        reason: format!("{label} kernel row {i} has a negative entry"),
                    });
                }
                if !row.iter().sum::<Rational>().is_one() {
                    return Err(Error::BadGarbling {
                        reason: format!("{label} kernel row {i} does not sum to 1"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Mixture of independent garblings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinatedGarbling {
    pub components: Vec<(Rational, IndependentGarbling)>,
}

impl CoordinatedGarbling {
    pub fn single(garbling: IndependentGarbling) -> Self {
        CoordinatedGarbling {
            components: vec![(Rational::one(), garbling)],
        }
    }

    fn check(&self) -> Result<(), Error> {
        let total: Rational = self.components.iter().map(|(w, _)| w.clone()).sum();
        if !total.is_one() || self.components.iter().any(|(w, _)| w.is_negative()) {
            return Err(Error::BadGarbling {
                reason: "mixture weights must be nonnegative and sum to 1".to_owned(),
            });
        }
        for (_, g) in &self.components {
            g.check()?;
        }
        Ok(())
    }
}

/// An unrestricted stochastic map between observation pairs.
///
/// `kernel[oh1 * n_or1 + or1][oh2 * n_or2 + or2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Garbling {
    pub kernel: Vec<Vec<Rational>>,
}

/// Resource limits for the coordinated-garbling search.
#[derive(Debug, Clone)]
pub struct GarblingOptions {
    /// Cap on the number of deterministic kernel pairs (the LP columns).
    pub max_extreme_points: u64,
}

impl Default for GarblingOptions {
    fn default() -> Self {
        GarblingOptions {
            max_extreme_points: 20_000,
        }
    }
}

/// Informativeness verdict between two structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoRelation {
    StrictlyMore,
    Equivalent,
    StrictlyLess,
    Incomparable,
}

/// Whether the agent's observations are conditionally independent of the
/// state given the other agent's observations (a Markov chain through the
/// other player).
///
/// Checked exactly: for every other-agent observation with positive
/// probability, the conditional law of the agent's observation given
/// (state, other observation) must coincide across all states in the
/// support.
pub fn is_redundant(game: &Game, agent: Agent) -> bool {
    // keyed by the conditioning observation, then by state
    let mut groups: BTreeMap<usize, BTreeMap<usize, Vec<(usize, Rational)>>> = BTreeMap::new();
    for entry in &game.joint_table().entries {
        let (cond, own) = match agent {
            Agent::Robot => (entry.human_obs, entry.robot_obs),
            Agent::Human => (entry.robot_obs, entry.human_obs),
        };
        groups
            .entry(cond)
            .or_default()
            .entry(entry.state)
            .or_default()
            .push((own, entry.prob.clone()));
    }
    for per_state in groups.values() {
        let mut reference: Option<BTreeMap<usize, Rational>> = None;
        for own_probs in per_state.values() {
            let total: Rational = own_probs.iter().map(|(_, p)| p.clone()).sum();
            let mut conditional: BTreeMap<usize, Rational> = BTreeMap::new();
            for (own, p) in own_probs {
                *conditional.entry(*own).or_insert_with(Rational::zero) += p / &total;
            }
            match &reference {
                None => reference = Some(conditional),
                Some(existing) => {
                    if *existing != conditional {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Pushes a structure through a coordinated garbling, producing the composed
/// structure over the target observation sets. Exact; preserves per-state
/// normalization.
pub fn apply_garbling(
    structure: &ObsStructure,
    garbling: &CoordinatedGarbling,
    target_human: &[String],
    target_robot: &[String],
) -> Result<ObsStructure, Error> {
    structure.check_rows()?;
    garbling.check()?;
    let n1h = structure.human_obs.len();
    let n1r = structure.robot_obs.len();
    let n2h = target_human.len();
    let n2r = target_robot.len();
    for (_, g) in &garbling.components {
        if g.human_kernel.len() != n1h
            || g.robot_kernel.len() != n1r
            || g.human_kernel.iter().any(|row| row.len() != n2h)
            || g.robot_kernel.iter().any(|row| row.len() != n2r)
        {
            return Err(Error::BadGarbling {
                reason: format!(
                    "kernel dimensions do not map ({n1h} x {n1r}) observations onto ({n2h} x {n2r})"
                ),
            });
        }
    }

    let mut dist = Vec::with_capacity(structure.states_len());
    for row in &structure.dist {
        let mut out = vec![Rational::zero(); n2h * n2r];
        for oh1 in 0..n1h {
            for or1 in 0..n1r {
                let p = &row[oh1 * n1r + or1];
                if p.is_zero() {
                    continue;
                }
                for (weight, g) in &garbling.components {
                    if weight.is_zero() {
                        continue;
                    }
                    for (oh2, hk) in g.human_kernel[oh1].iter().enumerate() {
                        if hk.is_zero() {
                            continue;
                        }
                        for (or2, rk) in g.robot_kernel[or1].iter().enumerate() {
                            if rk.is_zero() {
                                continue;
                            }
                            out[oh2 * n2r + or2] += p * weight * hk * rk;
                        }
                    }
                }
            }
        }
        dist.push(out);
    }
    Ok(ObsStructure {
        human_obs: target_human.to_vec(),
        robot_obs: target_robot.to_vec(),
        dist,
    })
}

/// Pushes a structure through an unrestricted garbling.
pub fn apply_any_garbling(
    structure: &ObsStructure,
    garbling: &Garbling,
    target_human: &[String],
    target_robot: &[String],
) -> Result<ObsStructure, Error> {
    structure.check_rows()?;
    let n1 = structure.human_obs.len() * structure.robot_obs.len();
    let n2 = target_human.len() * target_robot.len();
    if garbling.kernel.len() != n1 || garbling.kernel.iter().any(|row| row.len() != n2) {
        return Err(Error::BadGarbling {
            reason: format!("kernel is not {n1} x {n2}"),
        });
    }
    let mut dist = Vec::with_capacity(structure.states_len());
    for row in &structure.dist {
        let mut out = vec![Rational::zero(); n2];
        for (c1, p) in row.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (c2, k) in garbling.kernel[c1].iter().enumerate() {
                if !k.is_zero() {
                    out[c2] += p * k;
                }
            }
        }
        dist.push(out);
    }
    Ok(ObsStructure {
        human_obs: target_human.to_vec(),
        robot_obs: target_robot.to_vec(),
        dist,
    })
}

fn check_same_states(o1: &ObsStructure, o2: &ObsStructure) -> Result<(), Error> {
    o1.check_rows()?;
    o2.check_rows()?;
    if o1.states_len() != o2.states_len() {
        return Err(Error::StructureMismatch {
            reason: format!(
                "structures cover {} and {} states",
                o1.states_len(),
                o2.states_len()
            ),
        });
    }
    Ok(())
}

/// Decides whether `o1` is more informative than `o2` *for one agent*: a
/// one-sided independent garbling that leaves the other agent's observations
/// untouched. Exact LP feasibility in the kernel entries; returns the kernel
/// when one exists.
pub fn more_informative_for_agent(
    o1: &ObsStructure,
    o2: &ObsStructure,
    agent: Agent,
) -> Result<Option<Vec<Vec<Rational>>>, Error> {
    check_same_states(o1, o2)?;
    let fixed_matches = match agent {
        Agent::Human => o1.robot_obs == o2.robot_obs,
        Agent::Robot => o1.human_obs == o2.human_obs,
    };
    if !fixed_matches {
        return Err(Error::StructureMismatch {
            reason: format!("the non-{agent} observation sets must be identical"),
        });
    }

    let (n_from, n_to) = match agent {
        Agent::Human => (o1.human_obs.len(), o2.human_obs.len()),
        Agent::Robot => (o1.robot_obs.len(), o2.robot_obs.len()),
    };
    let n_fixed = match agent {
        Agent::Human => o1.robot_obs.len(),
        Agent::Robot => o1.human_obs.len(),
    };
    let n_vars = n_from * n_to;
    let var = |from: usize, to: usize| from * n_to + to;

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for from in 0..n_from {
        let mut row = vec![Rational::zero(); n_vars];
        for to in 0..n_to {
            row[var(from, to)] = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    for s in 0..o1.states_len() {
        for to in 0..n_to {
            for fixed in 0..n_fixed {
                let mut row = vec![Rational::zero(); n_vars];
                for from in 0..n_from {
                    let p = match agent {
                        Agent::Human => o1.at(s, from, fixed),
                        Agent::Robot => o1.at(s, fixed, from),
                    };
                    row[var(from, to)] = p.clone();
                }
                rows.push(row);
                rhs.push(match agent {
                    Agent::Human => o2.at(s, to, fixed).clone(),
                    Agent::Robot => o2.at(s, fixed, to).clone(),
                });
            }
        }
    }

    Ok(lp::feasible_point(&rows, &rhs).map(|x| {
        (0..n_from)
            .map(|from| (0..n_to).map(|to| x[var(from, to)].clone()).collect())
            .collect()
    }))
}

fn count_maps(from: usize, to: usize) -> Option<u128> {
    (to as u128).checked_pow(from as u32)
}

fn decode_map(mut code: u128, from: usize, to: usize) -> Vec<usize> {
    let mut map = vec![0usize; from];
    for slot in map.iter_mut() {
        *slot = (code % to as u128) as usize;
        code /= to as u128;
    }
    map
}

/// Decides whether a coordinated garbling maps `o1` onto `o2`, by exact
/// linear feasibility over mixture weights of all deterministic kernel pairs
/// (the extreme points of the coordinated set). Returns a witness mixture.
pub fn find_coordinated_garbling(
    o1: &ObsStructure,
    o2: &ObsStructure,
    opts: &GarblingOptions,
) -> Result<Option<CoordinatedGarbling>, Error> {
    check_same_states(o1, o2)?;
    let n1h = o1.human_obs.len();
    let n1r = o1.robot_obs.len();
    let n2h = o2.human_obs.len();
    let n2r = o2.robot_obs.len();

    let human_maps = count_maps(n1h, n2h);
    let robot_maps = count_maps(n1r, n2r);
    let points = match (human_maps, robot_maps) {
        (Some(h), Some(r)) => h.checked_mul(r),
        _ => None,
    }
    .unwrap_or(u128::MAX);
    if points > opts.max_extreme_points as u128 {
        return Err(Error::ExtremePointCap {
            points,
            cap: opts.max_extreme_points,
        });
    }
    let human_maps = human_maps.unwrap();
    let robot_maps = robot_maps.unwrap();
    let points = points as usize;

    let n_states = o1.states_len();
    let n_constraints = 1 + n_states * n2h * n2r;
    let mut rows = vec![vec![Rational::zero(); points]; n_constraints];
    let mut rhs = vec![Rational::zero(); n_constraints];
    rhs[0] = Rational::one();
    for s in 0..n_states {
        for b in 0..n2h {
            for t in 0..n2r {
                rhs[1 + s * n2h * n2r + b * n2r + t] = o2.at(s, b, t).clone();
            }
        }
    }

    let mut maps = Vec::with_capacity(points);
    for h_code in 0..human_maps {
        let human_map = decode_map(h_code, n1h, n2h);
        for r_code in 0..robot_maps {
            let robot_map = decode_map(r_code, n1r, n2r);
            let p = maps.len();
            rows[0][p] = Rational::one();
            for s in 0..n_states {
                for (a, &image_a) in human_map.iter().enumerate() {
                    for (r, &image_r) in robot_map.iter().enumerate() {
                        let mass = o1.at(s, a, r);
                        if mass.is_zero() {
                            continue;
                        }
                        let target = 1 + s * n2h * n2r + image_a * n2r + image_r;
                        rows[target][p] += mass;
                    }
                }
            }
            maps.push((human_map.clone(), robot_map));
        }
    }

    let solution = match lp::feasible_point(&rows, &rhs) {
        Some(x) => x,
        None => return Ok(None),
    };
    let components = maps
        .into_iter()
        .zip(solution)
        .filter(|(_, weight)| weight.is_positive())
        .map(|((human_map, robot_map), weight)| {
            (
                weight,
                IndependentGarbling::deterministic(&human_map, n2h, &robot_map, n2r),
            )
        })
        .collect();
    Ok(Some(CoordinatedGarbling { components }))
}

/// Decides whether ANY stochastic map (coordinated or not) carries `o1` onto
/// `o2`. Exact LP feasibility in the full kernel.
pub fn find_any_garbling(o1: &ObsStructure, o2: &ObsStructure) -> Result<Option<Garbling>, Error> {
    check_same_states(o1, o2)?;
    let n1 = o1.human_obs.len() * o1.robot_obs.len();
    let n2 = o2.human_obs.len() * o2.robot_obs.len();
    let n_vars = n1 * n2;
    let var = |c1: usize, c2: usize| c1 * n2 + c2;

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for c1 in 0..n1 {
        let mut row = vec![Rational::zero(); n_vars];
        for c2 in 0..n2 {
            row[var(c1, c2)] = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    for s in 0..o1.states_len() {
        for c2 in 0..n2 {
            let mut row = vec![Rational::zero(); n_vars];
            for c1 in 0..n1 {
                row[var(c1, c2)] = o1.dist[s][c1].clone();
            }
            rows.push(row);
            rhs.push(o2.dist[s][c2].clone());
        }
    }

    Ok(lp::feasible_point(&rows, &rhs).map(|x| Garbling {
        kernel: (0..n1)
            .map(|c1| (0..n2).map(|c2| x[var(c1, c2)].clone()).collect())
            .collect(),
    }))
}

/// Classifies the coordinated-garbling relation between two structures by
/// deciding feasibility in both directions.
pub fn informativeness_relation(
    o1: &ObsStructure,
    o2: &ObsStructure,
    opts: &GarblingOptions,
) -> Result<InfoRelation, Error> {
    let forward = find_coordinated_garbling(o1, o2, opts)?.is_some();
    let backward = find_coordinated_garbling(o2, o1, opts)?.is_some();
    Ok(classify(forward, backward))
}

/// Classifies the one-sided (per-agent) relation.
pub fn informativeness_relation_for_agent(
    o1: &ObsStructure,
    o2: &ObsStructure,
    agent: Agent,
) -> Result<InfoRelation, Error> {
    let forward = more_informative_for_agent(o1, o2, agent)?.is_some();
    let backward = more_informative_for_agent(o2, o1, agent)?.is_some();
    Ok(classify(forward, backward))
}

/// Classifies the unrestricted-garbling relation.
pub fn informativeness_relation_any(
    o1: &ObsStructure,
    o2: &ObsStructure,
) -> Result<InfoRelation, Error> {
    let forward = find_any_garbling(o1, o2)?.is_some();
    let backward = find_any_garbling(o2, o1)?.is_some();
    Ok(classify(forward, backward))
}

fn classify(forward: bool, backward: bool) -> InfoRelation {
    match (forward, backward) {
        (true, true) => InfoRelation::Equivalent,
        (true, false) => InfoRelation::StrictlyMore,
        (false, true) => InfoRelation::StrictlyLess,
        (false, false) => InfoRelation::Incomparable,
    }
}

/// Non-exhaustive search for a single two-sided independent garbling from
/// `o1` to `o2` by alternating exact deviation-minimizing LPs over the two
/// kernels. A returned garbling is a verified witness; `None` only means the
/// search failed (the joint problem is bilinear, so this is not a decision
/// procedure).
pub fn find_independent_garbling(
    o1: &ObsStructure,
    o2: &ObsStructure,
    max_iters: usize,
) -> Result<Option<IndependentGarbling>, Error> {
    check_same_states(o1, o2)?;
    let n1r = o1.robot_obs.len();
    let n2r = o2.robot_obs.len();

    // Start from the identity when shapes allow, otherwise uniform rows.
    let start = |n_from: usize, n_to: usize| -> Vec<Vec<Rational>> {
        (0..n_from)
            .map(|i| {
                (0..n_to)
                    .map(|j| {
                        if n_from == n_to {
                            if i == j {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        } else {
                            Rational::new(1.into(), (n_to as i64).into())
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let mut human_kernel;
    let mut robot_kernel = start(n1r, n2r);

    for _ in 0..max_iters {
        let (deviation, new_human) =
            best_one_side(o1, o2, Agent::Human, &robot_kernel)?;
        human_kernel = new_human;
        if deviation.is_zero() {
            return Ok(Some(IndependentGarbling {
                human_kernel,
                robot_kernel,
            }));
        }
        let (deviation, new_robot) =
            best_one_side(o1, o2, Agent::Robot, &human_kernel)?;
        robot_kernel = new_robot;
        if deviation.is_zero() {
            return Ok(Some(IndependentGarbling {
                human_kernel,
                robot_kernel,
            }));
        }
    }
    Ok(None)
}

/// With the other side's kernel fixed, minimizes the total L1 deviation from
/// the target structure over this side's kernel. Always feasible thanks to
/// slack variables; exact.
fn best_one_side(
    o1: &ObsStructure,
    o2: &ObsStructure,
    side: Agent,
    other_kernel: &[Vec<Rational>],
) -> Result<(Rational, Vec<Vec<Rational>>), Error> {
    let n1h = o1.human_obs.len();
    let n1r = o1.robot_obs.len();
    let n2h = o2.human_obs.len();
    let n2r = o2.robot_obs.len();
    let (n_from, n_to) = match side {
        Agent::Human => (n1h, n2h),
        Agent::Robot => (n1r, n2r),
    };
    let n_kernel = n_from * n_to;
    let n_states = o1.states_len();
    let n_match = n_states * n2h * n2r;
    // variables: kernel entries, then u and v slack per matching constraint
    let n_vars = n_kernel + 2 * n_match;
    let var = |from: usize, to: usize| from * n_to + to;

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for from in 0..n_from {
        let mut row = vec![Rational::zero(); n_vars];
        for to in 0..n_to {
            row[var(from, to)] = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    let mut constraint = 0usize;
    for s in 0..n_states {
        for b in 0..n2h {
            for t in 0..n2r {
                let mut row = vec![Rational::zero(); n_vars];
                for a in 0..n1h {
                    for r in 0..n1r {
                        let mass = o1.at(s, a, r);
                        if mass.is_zero() {
                            continue;
                        }
                        match side {
                            Agent::Human => {
                                // mass * H[a][b] * fixed_R[r][t]
                                let coeff = mass * &other_kernel[r][t];
                                if !coeff.is_zero() {
                                    row[var(a, b)] += coeff;
                                }
                            }
                            Agent::Robot => {
                                let coeff = mass * &other_kernel[a][b];
                                if !coeff.is_zero() {
                                    row[var(r, t)] += coeff;
                                }
                            }
                        }
                    }
                }
                row[n_kernel + 2 * constraint] = Rational::one();
                row[n_kernel + 2 * constraint + 1] = -Rational::one();
                rows.push(row);
                rhs.push(o2.at(s, b, t).clone());
                constraint += 1;
            }
        }
    }

    let mut objective = vec![Rational::zero(); n_vars];
    for slack in objective.iter_mut().skip(n_kernel) {
        *slack = Rational::one();
    }
    match lp::minimize(&objective, &rows, &rhs) {
        LpOutcome::Optimal(value, x) => {
            let kernel = (0..n_from)
                .map(|from| (0..n_to).map(|to| x[var(from, to)].clone()).collect())
                .collect();
            Ok((value, kernel))
        }
        LpOutcome::Infeasible => unreachable!("slack variables make the LP feasible"),
        LpOutcome::Unbounded => unreachable!("objective is bounded below by 0"),
    }
}

/// The structure in which the robot's observation is replaced by a copy of
/// the human's (both players see the human observation).
pub fn shared_observation_structure(game: &Game) -> ObsStructure {
    let base = game.obs_structure();
    let n_oh = base.human_obs.len();
    let n_or = base.robot_obs.len();
    let dist = base
        .dist
        .iter()
        .map(|row| {
            let mut out = vec![Rational::zero(); n_oh * n_oh];
            for oh in 0..n_oh {
                let mass: Rational = (0..n_or).map(|or| row[oh * n_or + or].clone()).sum();
                out[oh * n_oh + oh] = mass;
            }
            out
        })
        .collect();
    ObsStructure {
        human_obs: base.human_obs.clone(),
        robot_obs: base.human_obs,
        dist,
    }
}

/// The explicit independent garbling that regenerates a robot-redundant
/// game's structure from [`shared_observation_structure`]: the human side is
/// the identity and the robot side redraws the original robot observation
/// from its conditional law given the human observation.
pub fn redundancy_witness_kernel(game: &Game) -> IndependentGarbling {
    let n_oh = game.human_obs().len();
    let n_or = game.robot_obs().len();
    let mut robot_kernel = vec![vec![Rational::zero(); n_or]; n_oh];
    for (oh, row) in robot_kernel.iter_mut().enumerate() {
        let marginal = &game.human_marginal()[oh];
        if marginal.is_positive() {
            for entry in &game.joint_table().entries {
                if entry.human_obs == oh {
                    row[entry.robot_obs] += &entry.prob / marginal;
                }
            }
        } else {
            row[0] = Rational::one();
        }
    }
    IndependentGarbling {
        human_kernel: identity_kernel(n_oh),
        robot_kernel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::rat;

    fn structure(name: &str) -> ObsStructure {
        catalog::build_example(name, None).unwrap().game.obs_structure()
    }

    #[test]
    fn redundancy_examples() {
        // Robot observations a deterministic function of the human's.
        let game = catalog::build_example("file-deletion", None).unwrap().game;
        assert!(!is_redundant(&game, Agent::Robot));

        let shared = shared_observation_structure(&game);
        let copied = game.with_structure(&shared).unwrap();
        assert!(is_redundant(&copied, Agent::Robot));
        assert!(is_redundant(&copied, Agent::Human));

        // A constant robot observation is redundant.
        let constant = catalog::build_example("neg-voi-2", None).unwrap().game;
        assert!(is_redundant(&constant, Agent::Robot));
        assert!(!is_redundant(&constant, Agent::Human));
    }

    #[test]
    fn identity_garbling_leaves_structure_unchanged() {
        let o = structure("file-deletion");
        let identity = CoordinatedGarbling::single(IndependentGarbling::identity(
            o.human_obs.len(),
            o.robot_obs.len(),
        ));
        let out = apply_garbling(&o, &identity, &o.human_obs, &o.robot_obs).unwrap();
        assert_eq!(out, o);
    }

    #[test]
    fn merging_human_versions_yields_coarse_structure() {
        let full = structure("variant-full");
        let coarse = structure("variant-coarse");
        // 1.0, 1.1 -> 1.x ; 2.0 -> 2.x ; robot side identity.
        let g = IndependentGarbling::deterministic(&[0, 0, 1], 2, &[0, 1], 2);
        let out = apply_garbling(
            &full,
            &CoordinatedGarbling::single(g),
            &coarse.human_obs,
            &coarse.robot_obs,
        )
        .unwrap();
        assert_eq!(out, coarse);
    }

    #[test]
    fn merging_robot_bug_counts_yields_scenario_one() {
        let fine = structure("bug-fixing-2");
        let coarse = structure("bug-fixing-1");
        // F -> F, S -> SM, M -> SM; human side identity.
        let g = IndependentGarbling::deterministic(&[0, 1], 2, &[0, 1, 1], 2);
        let out = apply_garbling(
            &fine,
            &CoordinatedGarbling::single(g),
            &coarse.human_obs,
            &coarse.robot_obs,
        )
        .unwrap();
        assert_eq!(out, coarse);
    }

    #[test]
    fn one_sided_relation_between_variant_structures() {
        let full = structure("variant-full");
        let coarse = structure("variant-coarse");
        let kernel = more_informative_for_agent(&full, &coarse, Agent::Human)
            .unwrap()
            .expect("the merging kernel exists");
        // Witness soundness: re-applying reproduces the coarse structure.
        let g = IndependentGarbling {
            human_kernel: kernel,
            robot_kernel: identity_kernel(2),
        };
        let out = apply_garbling(
            &full,
            &CoordinatedGarbling::single(g),
            &coarse.human_obs,
            &coarse.robot_obs,
        )
        .unwrap();
        assert_eq!(out, coarse);

        // Coarse observations cannot determine fine ones.
        assert!(more_informative_for_agent(&coarse, &full, Agent::Human)
            .unwrap()
            .is_none());

        // Reflexivity.
        assert!(more_informative_for_agent(&full, &full, Agent::Human)
            .unwrap()
            .is_some());
        assert_eq!(
            informativeness_relation_for_agent(&full, &coarse, Agent::Human).unwrap(),
            InfoRelation::StrictlyMore
        );
    }

    #[test]
    fn bug_fixing_scenarios_are_ordered_for_the_robot() {
        let fine = structure("bug-fixing-2");
        let coarse = structure("bug-fixing-1");
        assert_eq!(
            informativeness_relation_for_agent(&fine, &coarse, Agent::Robot).unwrap(),
            InfoRelation::StrictlyMore
        );
        let opts = GarblingOptions::default();
        assert_eq!(
            informativeness_relation(&fine, &coarse, &opts).unwrap(),
            InfoRelation::StrictlyMore
        );
    }

    #[test]
    fn structure_is_equivalent_to_itself() {
        let o = structure("file-deletion");
        let opts = GarblingOptions::default();
        let witness = find_coordinated_garbling(&o, &o, &opts).unwrap().unwrap();
        let out = apply_garbling(&o, &witness, &o.human_obs, &o.robot_obs).unwrap();
        assert_eq!(out, o);
        assert_eq!(
            informativeness_relation(&o, &o, &opts).unwrap(),
            InfoRelation::Equivalent
        );
    }

    #[test]
    fn neg_voi_uncoordinated_garbling_exists_but_coordinated_does_not() {
        let o1 = structure("neg-voi-1");
        let o2 = structure("neg-voi-2");
        let opts = GarblingOptions::default();

        let any = find_any_garbling(&o1, &o2).unwrap().expect(
            "the parity map is an unrestricted garbling from structure 1 to 2",
        );
        let out = apply_any_garbling(&o1, &any, &o2.human_obs, &o2.robot_obs).unwrap();
        assert_eq!(out, o2);

        assert!(find_coordinated_garbling(&o1, &o2, &opts).unwrap().is_none());
        assert!(find_coordinated_garbling(&o2, &o1, &opts).unwrap().is_none());
        assert_eq!(
            informativeness_relation(&o1, &o2, &opts).unwrap(),
            InfoRelation::Incomparable
        );
        // No garbling exists back from structure 2 even unrestricted.
        assert!(find_any_garbling(&o2, &o1).unwrap().is_none());
    }

    #[test]
    fn redundancy_witness_regenerates_redundant_structure() {
        // Build a robot-redundant game: the robot sees a garbled copy of the
        // human observation.
        let game = catalog::build_example("file-deletion", None).unwrap().game;
        let shared = shared_observation_structure(&game);
        let n_oh = shared.human_obs.len();
        let noisy = IndependentGarbling {
            human_kernel: identity_kernel(n_oh),
            robot_kernel: vec![
                vec![rat(2, 3), rat(1, 3)],
                vec![rat(1, 4), rat(3, 4)],
            ],
        };
        let garbled = apply_garbling(
            &shared,
            &CoordinatedGarbling::single(noisy),
            &shared.human_obs,
            &["r0".into(), "r1".into()],
        )
        .unwrap();
        let redundant_game = game.with_structure(&garbled).unwrap();
        assert!(is_redundant(&redundant_game, Agent::Robot));

        // The explicit kernel carries the shared structure onto the game's.
        let witness = redundancy_witness_kernel(&redundant_game);
        let regenerated = apply_garbling(
            &shared_observation_structure(&redundant_game),
            &CoordinatedGarbling::single(witness),
            &garbled.human_obs,
            &garbled.robot_obs,
        )
        .unwrap();
        assert_eq!(regenerated, garbled);
    }

    #[test]
    fn alternating_search_finds_one_sided_witness() {
        let full = structure("variant-full");
        let coarse = structure("variant-coarse");
        let found = find_independent_garbling(&full, &coarse, 4)
            .unwrap()
            .expect("identity robot start solves the human side in one pass");
        let out = apply_garbling(
            &full,
            &CoordinatedGarbling::single(found),
            &coarse.human_obs,
            &coarse.robot_obs,
        )
        .unwrap();
        assert_eq!(out, coarse);
        // And it gives up (without a false positive) on the impossible pair.
        let o1 = structure("neg-voi-1");
        let o2 = structure("neg-voi-2");
        assert!(find_independent_garbling(&o2, &o1, 3).unwrap().is_none());
    }

    #[test]
    fn extreme_point_cap_is_enforced() {
        let o = structure("hum-messages");
        let opts = GarblingOptions {
            max_extreme_points: 10,
        };
        match find_coordinated_garbling(&o, &o, &opts) {
            Err(Error::ExtremePointCap { points, cap }) => {
                assert_eq!(points, 256 * 3125);
                assert_eq!(cap, 10);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }
}
