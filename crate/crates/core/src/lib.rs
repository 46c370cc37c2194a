//! Equilibrium analysis of a two-player game in which states either pause or
//! race towards superintelligent AI.
//!
//! The model code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which the sweep artifacts and the CLI use.
//!
//! ```
//! use raceworlds::{classify_world, Params, World};
//!
//! let p = Params::informed_enemies(0.05, 4.0).unwrap();
//! assert_eq!(classify_world(&p), World::Trust);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod phase;
pub mod scalar;
pub mod thresholds;
pub mod verify;

pub use equilibrium::{
    best_response, classify_world, min_pause_gap, payoff_table, pure_nash, BestResponse,
    EquilibriumSet, StrategyProfile, TieFlags, World, TIE_TOLERANCE,
};
pub use error::{ModelError, Result};
pub use game::{
    boost_constant, expected_utility, logistic, p_lose, p_win, pause_advantage, payoff_cell,
    shifted_win_prob, win_probability, GameParams, Orientation, PayoffCell, Role, ShiftDirection,
    Strategy,
};
pub use phase::{emit_csv, region_areas, render_svg, sweep, PhaseGrid, RegionAreas, SweepSpec};
pub use scalar::Scalar;
pub use thresholds::{
    racing_incentive, threshold, threshold_by_bisection, threshold_curve, threshold_equilibria,
    ThresholdCurveSample, ThresholdKind, Thresholds,
};

pub type Params = GameParams<f64>;
pub type Params32 = GameParams<f32>;
pub type Payoffs = PayoffCell<f64>;
pub type Sweep = SweepSpec<f64>;
pub type Grid = PhaseGrid<f64>;
pub type CurveSample = ThresholdCurveSample<f64>;
