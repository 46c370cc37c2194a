//! Model parameters, contest probabilities and expected utilities.
//!
//! Two states choose between pausing (effective safety exactly 1) and racing
//! (effective safety `s_race`). The base win probability is a logistic
//! contest in the capability lead; racing against a pauser shifts the racer's
//! logit up by the boost constant `B = (1 - s_race) / sigma`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Safety level adopted by a racing player unless stated otherwise.
pub const DEFAULT_RACE_SAFETY: f64 = 0.85;

/// Binary policy choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    Pause,
    Race,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Pause, Strategy::Race];

    /// Probability that a win by this player stays under control.
    pub fn effective_safety<T: Scalar>(self, s_race: T) -> T {
        match self {
            Strategy::Pause => T::one(),
            Strategy::Race => s_race,
        }
    }

    pub fn other(self) -> Strategy {
        match self {
            Strategy::Pause => Strategy::Race,
            Strategy::Race => Strategy::Pause,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Pause => "Pause",
            Strategy::Race => "Race",
        })
    }
}

/// Player position. The Frontrunner's base win probability uses `+delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Frontrunner,
    Laggard,
}

impl Role {
    pub const ALL: [Role; 2] = [Role::Frontrunner, Role::Laggard];

    pub fn other(self) -> Role {
        match self {
            Role::Frontrunner => Role::Laggard,
            Role::Laggard => Role::Frontrunner,
        }
    }

    fn lead_sign<T: Scalar>(self) -> T {
        match self {
            Role::Frontrunner => T::one(),
            Role::Laggard => -T::one(),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Frontrunner => "Frontrunner",
            Role::Laggard => "Laggard",
        })
    }
}

/// Which player ended up as Frontrunner after normalizing a signed lead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Player 1 is the Frontrunner (lead was already non-negative).
    AsGiven,
    /// The lead was negative; player 2 is the Frontrunner.
    Swapped,
}

/// One instance of the game.
///
/// Fields are private so every value in circulation satisfies the range
/// invariants checked in [`GameParams::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams<T> {
    delta: T,
    winner_advantage: T,
    cost: T,
    sigma: T,
    s_race: T,
}

impl<T: Scalar> GameParams<T> {
    pub fn new(delta: T, winner_advantage: T, cost: T, sigma: T, s_race: T) -> Result<Self> {
        check_finite("delta", delta)?;
        if delta < T::zero() {
            return Err(domain("delta", delta.as_f64(), "[0, inf)"));
        }
        check_winner_advantage(winner_advantage)?;
        check_finite("cost", cost)?;
        if cost < T::zero() {
            return Err(domain("cost", cost.as_f64(), "[0, inf)"));
        }
        check_sigma(sigma)?;
        check_race_safety(s_race)?;
        Ok(GameParams {
            delta,
            winner_advantage,
            cost,
            sigma,
            s_race,
        })
    }

    /// Accepts a lead of either sign and relabels players so the stored lead
    /// is non-negative.
    pub fn from_signed_delta(
        delta: T,
        winner_advantage: T,
        cost: T,
        sigma: T,
        s_race: T,
    ) -> Result<(Self, Orientation)> {
        check_finite("delta", delta)?;
        let orientation = if delta < T::zero() {
            Orientation::Swapped
        } else {
            Orientation::AsGiven
        };
        let params = Self::new(delta.abs(), winner_advantage, cost, sigma, s_race)?;
        Ok((params, orientation))
    }

    /// Parameters of the winner-takes-all, low-uncertainty regime
    /// (`W = 1`, `sigma = 0.1`, `s_race = 0.85`).
    pub fn informed_enemies(delta: T, cost: T) -> Result<Self> {
        Self::new(
            delta,
            T::one(),
            cost,
            T::lit(0.1),
            T::lit(DEFAULT_RACE_SAFETY),
        )
    }

    pub fn with_delta(self, delta: T) -> Result<Self> {
        Self::new(
            delta,
            self.winner_advantage,
            self.cost,
            self.sigma,
            self.s_race,
        )
    }

    pub fn with_cost(self, cost: T) -> Result<Self> {
        Self::new(
            self.delta,
            self.winner_advantage,
            cost,
            self.sigma,
            self.s_race,
        )
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn winner_advantage(&self) -> T {
        self.winner_advantage
    }

    pub fn cost(&self) -> T {
        self.cost
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn s_race(&self) -> T {
        self.s_race
    }

    pub fn boost(&self) -> T {
        (T::one() - self.s_race) / self.sigma
    }

    /// `s_race * e^B`. Values below 1 mark the degenerate regime where the
    /// unilateral-break thresholds fall below the cooperation thresholds.
    pub fn race_leverage(&self) -> T {
        self.s_race * self.boost().exp()
    }
}

fn check_finite<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(name, v.as_f64(), "finite reals"))
    }
}

pub(crate) fn check_sigma<T: Scalar>(sigma: T) -> Result<()> {
    if sigma.is_finite() && sigma > T::zero() {
        Ok(())
    } else {
        Err(domain("sigma", sigma.as_f64(), "(0, inf)"))
    }
}

pub(crate) fn check_race_safety<T: Scalar>(s_race: T) -> Result<()> {
    if s_race >= T::zero() && s_race < T::one() {
        Ok(())
    } else {
        Err(domain("s_race", s_race.as_f64(), "[0, 1)"))
    }
}

pub(crate) fn check_winner_advantage<T: Scalar>(w: T) -> Result<()> {
    if w >= T::zero() && w <= T::one() {
        Ok(())
    } else {
        Err(domain("winner_advantage", w.as_f64(), "[0, 1]"))
    }
}

/// `1 / (1 + e^-x)` without overflow for any finite `x`; saturates to exactly
/// 0 or 1 once `e^-|x|` underflows.
pub fn logistic<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Boost constant `B = (1 - s_race) / sigma`.
pub fn boost_constant<T: Scalar>(s_race: T, sigma: T) -> Result<T> {
    check_race_safety(s_race)?;
    check_sigma(sigma)?;
    Ok((T::one() - s_race) / sigma)
}

/// Frontrunner's win probability when both players play the same strategy.
/// Negative `delta` is allowed here and means the roles are swapped.
pub fn p_win<T: Scalar>(delta: T, sigma: T) -> Result<T> {
    check_sigma(sigma)?;
    check_finite("delta", delta)?;
    Ok(logistic(delta / sigma))
}

/// Frontrunner's loss probability when both players play the same strategy.
pub fn p_lose<T: Scalar>(delta: T, sigma: T) -> Result<T> {
    check_sigma(sigma)?;
    check_finite("delta", delta)?;
    Ok(logistic(-delta / sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// `P^R`: the player races while the rival pauses.
    RacingVsPauser,
    /// `P^S`: the player pauses while the rival races.
    PausingVsRacer,
}

/// Shifts a base win probability by the race boost:
/// `P^R = P / (P + (1-P) e^-B)` and `P^S = P / (P + (1-P) e^B)`.
pub fn shifted_win_prob<T: Scalar>(base_p: T, boost: T, direction: ShiftDirection) -> Result<T> {
    if !(base_p > T::zero() && base_p < T::one()) {
        return Err(domain("base_p", base_p.as_f64(), "(0, 1)"));
    }
    if !(boost >= T::zero()) || !boost.is_finite() {
        return Err(domain("boost", boost.as_f64(), "[0, inf)"));
    }
    let factor = match direction {
        ShiftDirection::RacingVsPauser => (-boost).exp(),
        ShiftDirection::PausingVsRacer => boost.exp(),
    };
    Ok(base_p / (base_p + (T::one() - base_p) * factor))
}

/// Probability that `role` wins when it plays `own` against `rival`.
///
/// Evaluated as the logistic of the shifted logit `±delta/sigma ± B`, which
/// equals [`shifted_win_prob`] applied to the base probability but stays exact
/// at the saturated ends where the base probability rounds to 0 or 1.
pub fn win_probability<T: Scalar>(
    role: Role,
    own: Strategy,
    rival: Strategy,
    params: &GameParams<T>,
) -> T {
    let logit = role.lead_sign::<T>() * params.delta / params.sigma;
    let shift = match (own, rival) {
        (Strategy::Race, Strategy::Pause) => params.boost(),
        (Strategy::Pause, Strategy::Race) => -params.boost(),
        _ => T::zero(),
    };
    logistic(logit + shift)
}

/// Utility of winning the race while playing `own`: the safe-win payoff 1
/// with probability `s_own`, catastrophe `-C` otherwise.
pub fn win_payoff<T: Scalar>(own: Strategy, params: &GameParams<T>) -> T {
    let s = own.effective_safety(params.s_race);
    s - (T::one() - s) * params.cost
}

/// Utility of losing to a rival that plays `rival`: the safe-loss payoff
/// `1 - W` with probability `s_rival`, catastrophe `-C` otherwise.
pub fn lose_payoff<T: Scalar>(rival: Strategy, params: &GameParams<T>) -> T {
    let s = rival.effective_safety(params.s_race);
    s * (T::one() - params.winner_advantage) - (T::one() - s) * params.cost
}

/// `win_payoff(own) - lose_payoff(rival)`, arranged as
/// `s_own - s_rival (1 - W) + (s_own - s_rival) C` so the cost term vanishes
/// exactly when both players share a safety level.
pub fn payoff_spread<T: Scalar>(own: Strategy, rival: Strategy, params: &GameParams<T>) -> T {
    let s_own = own.effective_safety(params.s_race);
    let s_rival = rival.effective_safety(params.s_race);
    s_own - s_rival * (T::one() - params.winner_advantage) + (s_own - s_rival) * params.cost
}

/// `EU = P(win) * win_payoff + P(lose) * lose_payoff`, written as
/// `lose_payoff + P(win) * (win_payoff - lose_payoff)`.
pub fn expected_utility<T: Scalar>(
    role: Role,
    own: Strategy,
    rival: Strategy,
    params: &GameParams<T>,
) -> T {
    let q = win_probability(role, own, rival, params);
    lose_payoff(rival, params) + q * payoff_spread(own, rival, params)
}

/// `EU(Pause) - EU(Race)` for `role` against a fixed `rival` strategy.
///
/// The lose payoff depends only on the rival and cancels, leaving
/// `P^pause * spread(Pause) - P^race * spread(Race)`. Evaluating it in this
/// form keeps the gap accurate when both win probabilities are tiny or the
/// cost is large.
pub fn pause_advantage<T: Scalar>(role: Role, rival: Strategy, params: &GameParams<T>) -> T {
    let gain = |own: Strategy| {
        win_probability(role, own, rival, params) * payoff_spread(own, rival, params)
    };
    gain(Strategy::Pause) - gain(Strategy::Race)
}

/// Both players' expected utilities under one joint strategy choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffCell<T> {
    pub eu_frontrunner: T,
    pub eu_laggard: T,
}

pub fn payoff_cell<T: Scalar>(
    frontrunner: Strategy,
    laggard: Strategy,
    params: &GameParams<T>,
) -> PayoffCell<T> {
    PayoffCell {
        eu_frontrunner: expected_utility(Role::Frontrunner, frontrunner, laggard, params),
        eu_laggard: expected_utility(Role::Laggard, laggard, frontrunner, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn fig1(delta: f64, cost: f64) -> GameParams<f64> {
        GameParams::informed_enemies(delta, cost).unwrap()
    }

    #[test]
    fn boost_constant_values() {
        assert!(close(boost_constant(0.85, 0.1).unwrap(), 1.5, 1e-12));
        assert!(close(boost_constant(0.85, 0.2).unwrap(), 0.75, 1e-12));
        let tiny = boost_constant(1.0 - 1e-12, 0.1).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-10);
    }

    #[test]
    fn boost_constant_rejects_bad_inputs() {
        assert!(boost_constant(0.85, 0.0).is_err());
        assert!(boost_constant(0.85, -0.1).is_err());
        assert!(boost_constant(1.0, 0.1).is_err());
        assert!(boost_constant(-0.01, 0.1).is_err());
    }

    #[test]
    fn logistic_saturates_without_nan() {
        for x in [1e4, 1e6, 800.0, f64::MAX] {
            assert_eq!(logistic(x), 1.0);
            assert_eq!(logistic(-x), 0.0);
        }
        assert_eq!(p_win(1e3, 0.1).unwrap(), 1.0);
        assert_eq!(p_lose(1e3, 0.1).unwrap(), 0.0);
        assert!(p_win(0.0, 0.0).is_err());
        assert!(p_win(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn symmetric_base_probability() {
        assert_eq!(p_win(0.0, 0.1).unwrap(), 0.5);
        assert_eq!(p_lose(0.0, 0.1).unwrap(), 0.5);
    }

    #[test]
    fn zero_boost_is_identity() {
        for p in [1e-9, 0.2, 0.5, 0.93] {
            for dir in [
                ShiftDirection::RacingVsPauser,
                ShiftDirection::PausingVsRacer,
            ] {
                assert_eq!(shifted_win_prob(p, 0.0, dir).unwrap(), p);
            }
        }
    }

    #[test]
    fn shifted_prob_domain() {
        assert!(shifted_win_prob(0.0, 1.0, ShiftDirection::RacingVsPauser).is_err());
        assert!(shifted_win_prob(1.0, 1.0, ShiftDirection::PausingVsRacer).is_err());
        assert!(shifted_win_prob(0.5, -1.0, ShiftDirection::PausingVsRacer).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(GameParams::new(0.1, 1.0, 1.0, 0.1, 0.85).is_ok());
        assert!(GameParams::new(-0.1, 1.0, 1.0, 0.1, 0.85).is_err());
        assert!(GameParams::new(0.1, 1.1, 1.0, 0.1, 0.85).is_err());
        assert!(GameParams::new(0.1, 1.0, -1.0, 0.1, 0.85).is_err());
        assert!(GameParams::new(0.1, 1.0, 1.0, 0.0, 0.85).is_err());
        assert!(GameParams::new(0.1, 1.0, 1.0, 0.1, 1.0).is_err());
        assert!(GameParams::new(0.1, 1.0, 50.0, 0.1, 0.85).is_ok());
    }

    #[test]
    fn signed_delta_is_normalized() {
        let (p, o) = GameParams::from_signed_delta(-0.3, 1.0, 2.0, 0.1, 0.85).unwrap();
        assert_eq!(p.delta(), 0.3);
        assert_eq!(o, Orientation::Swapped);
        let (_, o) = GameParams::from_signed_delta(0.0, 1.0, 2.0, 0.1, 0.85).unwrap();
        assert_eq!(o, Orientation::AsGiven);
    }

    #[test]
    fn pause_has_exact_unit_safety() {
        assert_eq!(Strategy::Pause.effective_safety(0.85), 1.0);
        assert_eq!(Strategy::Race.effective_safety(0.85), 0.85);
        // no catastrophe term for a pausing winner, however large C gets
        let p = fig1(0.2, 1e300);
        assert_eq!(win_payoff(Strategy::Pause, &p), 1.0);
    }

    #[test]
    fn mutual_pause_at_parity_pays_half() {
        for cost in [0.0, 3.0, 1e6] {
            let p = fig1(0.0, cost);
            for role in Role::ALL {
                let eu = expected_utility(role, Strategy::Pause, Strategy::Pause, &p);
                assert!(close(eu, 0.5, 1e-15), "{role} {cost} {eu}");
            }
        }
    }

    #[test]
    fn mutual_race_at_parity() {
        let p = fig1(0.0, 1.0);
        for role in Role::ALL {
            let eu = expected_utility(role, Strategy::Race, Strategy::Race, &p);
            assert!(close(eu, 0.275, 1e-12), "{eu}");
        }
    }

    #[test]
    fn certain_safe_win_pays_one() {
        let p = GameParams::new(1e5, 0.6, 7.0, 0.1, 0.85).unwrap();
        let eu = expected_utility(Role::Frontrunner, Strategy::Pause, Strategy::Pause, &p);
        assert!(close(eu, 1.0, 1e-15));
    }

    #[test]
    fn pause_advantage_matches_eu_difference() {
        let p = GameParams::new(0.07, 0.8, 2.5, 0.15, 0.8).unwrap();
        for role in Role::ALL {
            for rival in Strategy::ALL {
                let direct = expected_utility(role, Strategy::Pause, rival, &p)
                    - expected_utility(role, Strategy::Race, rival, &p);
                assert!(close(pause_advantage(role, rival, &p), direct, 1e-14));
            }
        }
    }

    #[test]
    fn spread_matches_payoff_difference() {
        let p = GameParams::new(0.3, 0.4, 3.0, 0.2, 0.7).unwrap();
        for own in Strategy::ALL {
            for rival in Strategy::ALL {
                let direct = win_payoff(own, &p) - lose_payoff(rival, &p);
                assert!(close(payoff_spread(own, rival, &p), direct, 1e-14));
            }
        }
        let huge = p.with_cost(1e12).unwrap();
        assert_eq!(
            payoff_spread(Strategy::Race, Strategy::Race, &huge),
            0.7 * 0.4
        );
    }

    #[test]
    fn generic_over_f32() {
        let p = GameParams::<f32>::informed_enemies(0.0, 1.0).unwrap();
        let eu = expected_utility(Role::Laggard, Strategy::Race, Strategy::Race, &p);
        assert!((eu - 0.275).abs() < 1e-6);
    }
}
