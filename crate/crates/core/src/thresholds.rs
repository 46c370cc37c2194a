//! Closed-form indifference thresholds and a bisection oracle for them.
//!
//! Each threshold is the catastrophe cost at which one player is indifferent
//! between pausing and racing against a fixed rival strategy. Above it the
//! player pauses. All four share the shape `k * P - 1` with
//!
//! * `k_safe   = W / (1 - s) * (1 - e^-B)` for the cooperation thresholds
//!   (rival pauses), and
//! * `k_sucker = s W / (1 - s) * (e^B - 1)` for the unilateral-break
//!   thresholds (rival races),
//!
//! where `P` is the probability that the *rival* wins a symmetric contest:
//! `P_lose(delta)` for the Frontrunner, `P_win(delta)` for the Laggard.

use std::fmt;

use serde::Serialize;

use crate::equilibrium::{EquilibriumSet, StrategyProfile};
use crate::error::{domain, ModelError, Result};
use crate::game::{
    check_race_safety, check_sigma, check_winner_advantage, p_lose, p_win, pause_advantage,
    GameParams, Orientation, Role, Strategy,
};
use crate::scalar::Scalar;

/// Absolute bracket tolerance of [`threshold_by_bisection`].
pub const BISECTION_TOLERANCE: f64 = 1e-10;
pub const BISECTION_MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ThresholdKind {
    FrontrunnerCooperation,
    FrontrunnerUnilateralBreak,
    LaggardCooperation,
    LaggardUnilateralBreak,
}

impl ThresholdKind {
    pub const ALL: [ThresholdKind; 4] = [
        ThresholdKind::FrontrunnerCooperation,
        ThresholdKind::FrontrunnerUnilateralBreak,
        ThresholdKind::LaggardCooperation,
        ThresholdKind::LaggardUnilateralBreak,
    ];

    pub fn role(self) -> Role {
        match self {
            ThresholdKind::FrontrunnerCooperation | ThresholdKind::FrontrunnerUnilateralBreak => {
                Role::Frontrunner
            }
            ThresholdKind::LaggardCooperation | ThresholdKind::LaggardUnilateralBreak => {
                Role::Laggard
            }
        }
    }

    /// Strategy the rival is held at in the indifference problem.
    pub fn rival_strategy(self) -> Strategy {
        match self {
            ThresholdKind::FrontrunnerCooperation | ThresholdKind::LaggardCooperation => {
                Strategy::Pause
            }
            ThresholdKind::FrontrunnerUnilateralBreak | ThresholdKind::LaggardUnilateralBreak => {
                Strategy::Race
            }
        }
    }

    pub fn for_problem(role: Role, rival: Strategy) -> ThresholdKind {
        match (role, rival) {
            (Role::Frontrunner, Strategy::Pause) => ThresholdKind::FrontrunnerCooperation,
            (Role::Frontrunner, Strategy::Race) => ThresholdKind::FrontrunnerUnilateralBreak,
            (Role::Laggard, Strategy::Pause) => ThresholdKind::LaggardCooperation,
            (Role::Laggard, Strategy::Race) => ThresholdKind::LaggardUnilateralBreak,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            ThresholdKind::FrontrunnerCooperation => "FC",
            ThresholdKind::FrontrunnerUnilateralBreak => "FUB",
            ThresholdKind::LaggardCooperation => "LC",
            ThresholdKind::LaggardUnilateralBreak => "LUB",
        }
    }
}

impl fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

fn check_inputs<T: Scalar>(delta: T, winner_advantage: T, sigma: T, s_race: T) -> Result<()> {
    if !delta.is_finite() {
        return Err(domain("delta", delta.as_f64(), "finite reals"));
    }
    check_winner_advantage(winner_advantage)?;
    check_sigma(sigma)?;
    check_race_safety(s_race)
}

/// `threshold + 1`, the product `k * P` of the racing multiplier and the
/// rival's symmetric win probability. Exactly linear in `W`; evaluating it
/// directly avoids the cancellation of `(k P - 1) + 1` when `k P` is tiny.
pub fn racing_incentive<T: Scalar>(
    kind: ThresholdKind,
    delta: T,
    winner_advantage: T,
    sigma: T,
    s_race: T,
) -> Result<T> {
    check_inputs(delta, winner_advantage, sigma, s_race)?;
    let one = T::one();
    let boost = (one - s_race) / sigma;
    let k = match kind.rival_strategy() {
        Strategy::Pause => winner_advantage / (one - s_race) * -(-boost).exp_m1(),
        Strategy::Race => s_race * winner_advantage / (one - s_race) * boost.exp_m1(),
    };
    let rival_wins = match kind.role() {
        Role::Frontrunner => p_lose(delta, sigma)?,
        Role::Laggard => p_win(delta, sigma)?,
    };
    Ok(k * rival_wins)
}

/// Closed-form critical cost. Negative values mean the player pauses at
/// every admissible cost; they are returned unclamped.
pub fn threshold<T: Scalar>(
    kind: ThresholdKind,
    delta: T,
    winner_advantage: T,
    sigma: T,
    s_race: T,
) -> Result<T> {
    Ok(racing_incentive(kind, delta, winner_advantage, sigma, s_race)? - T::one())
}

/// All four thresholds at one capability lead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds<T> {
    #[serde(rename = "FC")]
    pub frontrunner_cooperation: T,
    #[serde(rename = "FUB")]
    pub frontrunner_unilateral_break: T,
    #[serde(rename = "LC")]
    pub laggard_cooperation: T,
    #[serde(rename = "LUB")]
    pub laggard_unilateral_break: T,
}

impl<T: Scalar> Thresholds<T> {
    pub fn at(params: &GameParams<T>) -> Self {
        let eval = |kind| {
            threshold(
                kind,
                params.delta(),
                params.winner_advantage(),
                params.sigma(),
                params.s_race(),
            )
            .expect("validated parameters")
        };
        Thresholds {
            frontrunner_cooperation: eval(ThresholdKind::FrontrunnerCooperation),
            frontrunner_unilateral_break: eval(ThresholdKind::FrontrunnerUnilateralBreak),
            laggard_cooperation: eval(ThresholdKind::LaggardCooperation),
            laggard_unilateral_break: eval(ThresholdKind::LaggardUnilateralBreak),
        }
    }

    pub fn get(&self, kind: ThresholdKind) -> T {
        match kind {
            ThresholdKind::FrontrunnerCooperation => self.frontrunner_cooperation,
            ThresholdKind::FrontrunnerUnilateralBreak => self.frontrunner_unilateral_break,
            ThresholdKind::LaggardCooperation => self.laggard_cooperation,
            ThresholdKind::LaggardUnilateralBreak => self.laggard_unilateral_break,
        }
    }

    /// Best response implied by the threshold predicate `cost >= threshold`.
    pub fn predicted_response(&self, role: Role, rival: Strategy, cost: T) -> Strategy {
        if cost >= self.get(ThresholdKind::for_problem(role, rival)) {
            Strategy::Pause
        } else {
            Strategy::Race
        }
    }

    pub fn equilibria(&self, cost: T) -> EquilibriumSet {
        EquilibriumSet::from_profiles(StrategyProfile::ALL.into_iter().filter(|p| {
            self.predicted_response(Role::Frontrunner, p.laggard, cost) == p.frontrunner
                && self.predicted_response(Role::Laggard, p.frontrunner, cost) == p.laggard
        }))
    }
}

/// Pure equilibria from the four threshold predicates alone.
pub fn threshold_equilibria<T: Scalar>(params: &GameParams<T>) -> EquilibriumSet {
    Thresholds::at(params).equilibria(params.cost())
}

/// Recovers a threshold by bisecting the raw utility gap
/// `EU(Pause) - EU(Race)` in the cost on `[0, c_max]`.
///
/// Returns `-1` when pausing already weakly wins at zero cost, i.e. the
/// player pauses at every admissible cost.
pub fn threshold_by_bisection<T: Scalar>(
    kind: ThresholdKind,
    delta: T,
    winner_advantage: T,
    sigma: T,
    s_race: T,
    c_max: T,
) -> Result<T> {
    check_inputs(delta, winner_advantage, sigma, s_race)?;
    if !(c_max.is_finite() && c_max > T::zero()) {
        return Err(domain("c_max", c_max.as_f64(), "(0, inf)"));
    }
    let (params, orientation) =
        GameParams::from_signed_delta(delta, winner_advantage, T::zero(), sigma, s_race)?;
    let role = match orientation {
        Orientation::AsGiven => kind.role(),
        Orientation::Swapped => kind.role().other(),
    };
    let rival = kind.rival_strategy();
    let gap = |cost: T| -> Result<T> { Ok(pause_advantage(role, rival, &params.with_cost(cost)?)) };

    let mut lo = T::zero();
    let mut hi = c_max;
    let gap_low = gap(lo)?;
    if gap_low >= T::zero() {
        return Ok(-T::one());
    }
    let gap_high = gap(hi)?;
    if gap_high < T::zero() {
        return Err(ModelError::Bracket {
            c_max: c_max.as_f64(),
            gap_low: gap_low.as_f64(),
            gap_high: gap_high.as_f64(),
        });
    }
    let tol = T::lit(BISECTION_TOLERANCE);
    let two = T::one() + T::one();
    for _ in 0..BISECTION_MAX_ITERATIONS {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        if gap(mid)? >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo + (hi - lo) / two)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdCurveSample<T> {
    pub delta: T,
    pub kind: ThresholdKind,
    pub c_star: T,
}

/// Samples the closed form on an ascending grid of leads.
pub fn threshold_curve<T: Scalar>(
    kind: ThresholdKind,
    delta_grid: &[T],
    winner_advantage: T,
    sigma: T,
    s_race: T,
) -> Result<Vec<ThresholdCurveSample<T>>> {
    if delta_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(ModelError::Sweep(
            "delta grid must be sorted ascending".into(),
        ));
    }
    delta_grid
        .iter()
        .map(|&delta| {
            Ok(ThresholdCurveSample {
                delta,
                kind,
                c_star: threshold(kind, delta, winner_advantage, sigma, s_race)?,
            })
        })
        .collect()
}
