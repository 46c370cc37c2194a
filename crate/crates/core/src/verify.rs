//! Seeded randomized cross-checks between the closed forms, the bisection
//! oracle and direct best-response enumeration.
//!
//! Draws use `ChaCha8Rng::seed_from_u64(seed)`, so a seed reproduces the same
//! parameter tuples on every platform.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibrium::{min_pause_gap, pure_nash, StrategyProfile};
use crate::error::Result;
use crate::game::{win_probability, GameParams, Role};
use crate::thresholds::{threshold, threshold_by_bisection, ThresholdKind, Thresholds};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Relative agreement required between closed form and bisection,
/// `|bisect - closed| <= tol * max(1, |closed|)`.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
/// Samples whose smallest `|EU(Pause) - EU(Race)|` is at or below this band
/// are excluded from the predicate check.
pub const TIE_BAND: f64 = 1e-9;
pub const CONSERVATION_TOLERANCE: f64 = 1e-12;

/// Sampling ranges for the random parameter tuples.
pub const DELTA_RANGE: (f64, f64) = (0.0, 3.0);
pub const WINNER_ADVANTAGE_RANGE: (f64, f64) = (0.0, 1.0);
pub const SIGMA_RANGE: (f64, f64) = (0.02, 0.5);
pub const RACE_SAFETY_RANGE: (f64, f64) = (0.5, 0.99);
pub const COST_RANGE: (f64, f64) = (0.0, 30.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Property {
    ClosedFormVsBisection,
    PredicateVsBestResponse,
    ProbabilityConservation,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::ClosedFormVsBisection => "closed-form vs bisection",
            Property::PredicateVsBestResponse => "threshold predicate vs best response",
            Property::ProbabilityConservation => "probability conservation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub sample: usize,
    pub property: Property,
    pub params: GameParams<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub passed: usize,
    /// Samples inside the tie band, where the predicate check is skipped.
    pub tie_band_skips: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        for c in &self.counterexamples {
            writeln!(
                f,
                "FAIL sample {} [{}]: delta={} W={} C={} sigma={} s={}: {}",
                c.sample,
                c.property,
                c.params.delta(),
                c.params.winner_advantage(),
                c.params.cost(),
                c.params.sigma(),
                c.params.s_race(),
                c.detail
            )?;
        }
        if !self.all_passed() {
            writeln!(
                f,
                "reproduce with: verify --seed {} --samples {}",
                self.seed, self.samples
            )?;
        }
        write!(
            f,
            "{}/{} passed ({} inside the tie band)",
            self.passed, self.samples, self.tie_band_skips
        )
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// The `i`-th parameter tuple of a seeded run.
pub fn draw_samples(seed: u64, samples: usize) -> Result<Vec<GameParams<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let delta = uniform(&mut rng, DELTA_RANGE);
            let w = uniform(&mut rng, WINNER_ADVANTAGE_RANGE);
            let sigma = uniform(&mut rng, SIGMA_RANGE);
            let s = uniform(&mut rng, RACE_SAFETY_RANGE);
            let cost = uniform(&mut rng, COST_RANGE);
            GameParams::new(delta, w, cost, sigma, s)
        })
        .collect()
}

/// Signature of a closed-form threshold evaluator (kind, delta, W, sigma, s).
pub type ClosedForm = dyn Fn(ThresholdKind, f64, f64, f64, f64) -> Result<f64>;

pub fn run(config: VerifyConfig) -> Result<VerifyReport> {
    run_with(config, &threshold::<f64>)
}

/// Runs the suite against a caller-supplied closed form, so a deliberately
/// wrong evaluator can be checked to fail.
pub fn run_with(config: VerifyConfig, closed_form: &ClosedForm) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        seed: config.seed,
        samples: config.samples,
        passed: 0,
        tie_band_skips: 0,
        counterexamples: Vec::new(),
    };
    for (i, params) in draw_samples(config.seed, config.samples)?
        .into_iter()
        .enumerate()
    {
        let failures = check_sample(&params, closed_form, &mut report.tie_band_skips)?;
        if failures.is_empty() {
            report.passed += 1;
        }
        report
            .counterexamples
            .extend(
                failures
                    .into_iter()
                    .map(|(property, detail)| Counterexample {
                        sample: i,
                        property,
                        params,
                        detail,
                    }),
            );
    }
    Ok(report)
}

fn check_sample(
    params: &GameParams<f64>,
    closed_form: &ClosedForm,
    tie_band_skips: &mut usize,
) -> Result<Vec<(Property, String)>> {
    let mut failures = Vec::new();
    let (d, w, sigma, s) = (
        params.delta(),
        params.winner_advantage(),
        params.sigma(),
        params.s_race(),
    );

    let mut values = [0.0; 4];
    for (slot, kind) in values.iter_mut().zip(ThresholdKind::ALL) {
        let closed = closed_form(kind, d, w, sigma, s)?;
        *slot = closed;
        let c_max = 10.0 * (closed.max(0.0) + 2.0);
        let ok = match threshold_by_bisection(kind, d, w, sigma, s, c_max) {
            Ok(bisected) if closed > 0.0 => {
                (bisected - closed).abs() <= ORACLE_TOLERANCE * closed.abs().max(1.0)
            }
            // pausing weakly dominates at zero cost: either the sentinel or a
            // root indistinguishable from zero
            Ok(bisected) => bisected == -1.0 || bisected <= ORACLE_TOLERANCE,
            Err(_) => false,
        };
        if !ok {
            let got = threshold_by_bisection(kind, d, w, sigma, s, c_max)
                .map(|v| v.to_string())
                .unwrap_or_else(|e| e.to_string());
            failures.push((
                Property::ClosedFormVsBisection,
                format!("{kind}: closed form {closed}, bisection {got}"),
            ));
        }
    }

    if min_pause_gap(params) > TIE_BAND {
        let thresholds = Thresholds {
            frontrunner_cooperation: values[0],
            frontrunner_unilateral_break: values[1],
            laggard_cooperation: values[2],
            laggard_unilateral_break: values[3],
        };
        let predicted = thresholds.equilibria(params.cost());
        let enumerated = pure_nash(params);
        if !predicted.same_profiles(&enumerated) {
            failures.push((
                Property::PredicateVsBestResponse,
                format!("predicates give {predicted}, best responses give {enumerated}"),
            ));
        }
    } else {
        *tie_band_skips += 1;
    }

    for profile in StrategyProfile::ALL {
        let total =
            win_probability(
                Role::Frontrunner,
                profile.frontrunner,
                profile.laggard,
                params,
            ) + win_probability(Role::Laggard, profile.laggard, profile.frontrunner, params);
        if (total - 1.0).abs() > CONSERVATION_TOLERANCE {
            failures.push((
                Property::ProbabilityConservation,
                format!("{profile}: win probabilities sum to {total}"),
            ));
        }
    }
    Ok(failures)
}
