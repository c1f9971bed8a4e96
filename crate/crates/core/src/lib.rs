//! Exact analysis toolkit for partially observable off-switch games.
//!
//! A partially observable off-switch game (POSG) is a one-shot common-payoff
//! Bayesian game between a human and a robot. Nature draws a state; each
//! player receives a private observation; the robot either acts unilaterally,
//! waits for the human's decision, or shuts itself off; if the robot waits,
//! the human chooses ON (let the action go through) or OFF. Both players
//! receive `u_act(state)` when the action goes through and `u_off(state)`
//! otherwise.
//!
//! Everything in this crate runs on exact rational arithmetic with unbounded
//! integers. Optimal values are exact fractions, policy-set computations are
//! certified by exhaustive enumeration, and the garbling/informativeness
//! decision procedures are backed by an exact-pivot simplex, so equality
//! checks are certificates rather than tolerance tests.
//!
//! The main entry points:
//!
//! - [`game`]: the game model, validation, joint law, and posteriors.
//! - [`policy`]: deterministic and stochastic policy pairs and exact payoff
//!   evaluation, best responses, and derandomization.
//! - [`solver`]: exhaustive search for the optimal value and the complete set
//!   of deterministic optimal policy pairs, deference metrics, and the
//!   wait-set normalization transforms.
//! - [`comm`]: cheap-talk extension with one simultaneous round of messages.
//! - [`unaware`]: the robot-unaware human policy and the polynomial-time
//!   robot best response.
//! - [`informativeness`]: garblings, redundancy, and decision procedures for
//!   the "more informative" relations between observation structures.
//! - [`maxcut`]: the MAXCUT reduction with brute-force oracles on both sides.
//! - [`catalog`]: programmatic constructors for the built-in example games,
//!   bundled with their expected solver outputs.
//! - [`report`]: a one-shot reproduction report over the whole catalog.

pub mod catalog;
pub mod comm;
pub mod error;
pub mod files;
pub mod game;
pub mod informativeness;
pub mod lp;
pub mod maxcut;
pub mod policy;
pub mod random;
pub mod rational;
pub mod report;
pub mod solver;
pub mod unaware;

pub use error::Error;
pub use game::{validate_game, Agent, Game, GameSpec, JointTable, ValidationReport};
pub use policy::{
    action_goes_through, best_response_human, best_response_robot, derandomize,
    evaluate_stochastic, expected_payoff, HumanAction, HumanPolicy, PolicyPair, RobotAction,
    RobotPolicy, StochasticPolicyPair,
};
pub use rational::Rational;
pub use solver::{
    exists_always_wait_opp, exists_never_wait_opp, knows_observation, normalize_all_wait,
    normalize_no_wait, solve_opp, solve_opp_with, waits_less, SolveOptions, SolveResult,
    WaitOrdering,
};
