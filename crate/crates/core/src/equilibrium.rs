//! Best responses, pure Nash equilibria and the world taxonomy.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::game::{pause_advantage, payoff_cell, GameParams, PayoffCell, Role, Strategy};
use crate::scalar::Scalar;

/// Absolute band on `EU(Pause) - EU(Race)` inside which a best response is
/// flagged as a tie. The flag is informational; the decision rule is always
/// "pause iff the gap is >= 0".
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Joint strategy choice, Frontrunner first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StrategyProfile {
    pub frontrunner: Strategy,
    pub laggard: Strategy,
}

impl StrategyProfile {
    pub const ALL: [StrategyProfile; 4] = [
        StrategyProfile::new(Strategy::Pause, Strategy::Pause),
        StrategyProfile::new(Strategy::Pause, Strategy::Race),
        StrategyProfile::new(Strategy::Race, Strategy::Pause),
        StrategyProfile::new(Strategy::Race, Strategy::Race),
    ];

    pub const fn new(frontrunner: Strategy, laggard: Strategy) -> Self {
        StrategyProfile {
            frontrunner,
            laggard,
        }
    }

    pub fn of(&self, role: Role) -> Strategy {
        match role {
            Role::Frontrunner => self.frontrunner,
            Role::Laggard => self.laggard,
        }
    }

    fn index(&self) -> usize {
        (self.frontrunner as usize) * 2 + self.laggard as usize
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.frontrunner, self.laggard)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse<T> {
    pub strategy: Strategy,
    /// `|EU(Pause) - EU(Race)| <= TIE_TOLERANCE`.
    pub tie: bool,
    /// `EU(Pause) - EU(Race)`.
    pub gap: T,
}

/// Best response of `role` to a fixed rival strategy. Pause wins ties.
pub fn best_response<T: Scalar>(
    role: Role,
    rival: Strategy,
    params: &GameParams<T>,
) -> BestResponse<T> {
    let gap = pause_advantage(role, rival, params);
    BestResponse {
        strategy: if gap >= T::zero() {
            Strategy::Pause
        } else {
            Strategy::Race
        },
        tie: gap.abs() <= T::lit(TIE_TOLERANCE),
        gap,
    }
}

/// Per-player indicator of a best-response tie at any rival strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TieFlags {
    pub frontrunner: bool,
    pub laggard: bool,
}

/// Set of pure Nash profiles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EquilibriumSet {
    members: [bool; 4],
    pub tie_flags: TieFlags,
}

impl EquilibriumSet {
    pub fn from_profiles<I: IntoIterator<Item = StrategyProfile>>(profiles: I) -> Self {
        let mut set = EquilibriumSet::default();
        for p in profiles {
            set.members[p.index()] = true;
        }
        set
    }

    pub fn contains(&self, profile: StrategyProfile) -> bool {
        self.members[profile.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        StrategyProfile::ALL
            .into_iter()
            .filter(|p| self.contains(*p))
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same profile membership, ignoring tie flags.
    pub fn same_profiles(&self, other: &EquilibriumSet) -> bool {
        self.members == other.members
    }
}

impl Serialize for EquilibriumSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl fmt::Display for EquilibriumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Pure Nash equilibria: profiles where each strategy is a best response to
/// the other (pause on ties).
pub fn pure_nash<T: Scalar>(params: &GameParams<T>) -> EquilibriumSet {
    let mut set = EquilibriumSet::default();
    let mut ties = TieFlags::default();
    let mut responses = [[Strategy::Pause; 2]; 2];
    for role in Role::ALL {
        for rival in Strategy::ALL {
            let br = best_response(role, rival, params);
            responses[role as usize][rival as usize] = br.strategy;
            match role {
                Role::Frontrunner => ties.frontrunner |= br.tie,
                Role::Laggard => ties.laggard |= br.tie,
            }
        }
    }
    for profile in StrategyProfile::ALL {
        let f_ok =
            responses[Role::Frontrunner as usize][profile.laggard as usize] == profile.frontrunner;
        let l_ok =
            responses[Role::Laggard as usize][profile.frontrunner as usize] == profile.laggard;
        set.members[profile.index()] = f_ok && l_ok;
    }
    set.tie_flags = ties;
    set
}

/// Smallest `|EU(Pause) - EU(Race)|` over both players and both rival
/// strategies; distance of the point from every best-response switch.
pub fn min_pause_gap<T: Scalar>(params: &GameParams<T>) -> T {
    Role::ALL
        .into_iter()
        .flat_map(|role| Strategy::ALL.into_iter().map(move |rival| (role, rival)))
        .map(|(role, rival)| pause_advantage(role, rival, params).abs())
        .fold(T::infinity(), T::min)
}

/// Strategic world implied by the pure equilibrium set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum World {
    /// Mutual pause is the unique equilibrium.
    SafeHarmony,
    /// Mutual pause and mutual race are both equilibria.
    Trust,
    /// Frontrunner pauses, Laggard races.
    Subversion,
    /// Mutual race is the unique equilibrium.
    Preemption,
    /// Frontrunner races, Laggard pauses.
    ReverseSubversion,
    /// Both asymmetric profiles are equilibria (anti-coordination). Needs
    /// `s_race * e^B < 1` together with a negative cost, so admissible
    /// parameters never produce it.
    AntiCoordination,
    NoPureEquilibrium,
}

impl World {
    pub const ALL: [World; 7] = [
        World::SafeHarmony,
        World::Trust,
        World::Subversion,
        World::Preemption,
        World::ReverseSubversion,
        World::AntiCoordination,
        World::NoPureEquilibrium,
    ];

    /// The four worlds of the taxonomy, as opposed to degenerate labels.
    pub const CANONICAL: [World; 4] = [
        World::SafeHarmony,
        World::Trust,
        World::Subversion,
        World::Preemption,
    ];

    pub fn is_canonical(self) -> bool {
        World::CANONICAL.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            World::SafeHarmony => "SafeHarmony",
            World::Trust => "Trust",
            World::Subversion => "Subversion",
            World::Preemption => "Preemption",
            World::ReverseSubversion => "ReverseSubversion",
            World::AntiCoordination => "AntiCoordination",
            World::NoPureEquilibrium => "NoPureEquilibrium",
        }
    }

    /// Label for an equilibrium set, or `None` for sets that best responses
    /// cannot produce (pure Nash output never yields one: mutual pause and
    /// mutual race each exclude both asymmetric profiles).
    pub fn from_equilibria(set: &EquilibriumSet) -> Option<World> {
        use Strategy::{Pause as P, Race as R};
        let has = |f, l| set.contains(StrategyProfile::new(f, l));
        let world = match (has(P, P), has(P, R), has(R, P), has(R, R)) {
            (true, false, false, false) => World::SafeHarmony,
            (true, false, false, true) => World::Trust,
            (false, false, false, true) => World::Preemption,
            (false, true, false, false) => World::Subversion,
            (false, false, true, false) => World::ReverseSubversion,
            (false, true, true, false) => World::AntiCoordination,
            (false, false, false, false) => World::NoPureEquilibrium,
            _ => return None,
        };
        Some(world)
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_world<T: Scalar>(params: &GameParams<T>) -> World {
    World::from_equilibria(&pure_nash(params))
        .expect("best-response equilibria are always one of the labelled sets")
}

/// Payoff cells for the four profiles in [`StrategyProfile::ALL`] order.
pub fn payoff_table<T: Scalar>(params: &GameParams<T>) -> [(StrategyProfile, PayoffCell<T>); 4] {
    StrategyProfile::ALL.map(|p| (p, payoff_cell(p.frontrunner, p.laggard, params)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Strategy::{Pause, Race};

    fn fig1(delta: f64, cost: f64) -> GameParams<f64> {
        GameParams::informed_enemies(delta, cost).unwrap()
    }

    #[test]
    fn figure_one_best_responses() {
        let br = best_response(Role::Frontrunner, Pause, &fig1(0.5, 10.0));
        assert_eq!(br.strategy, Pause);
        assert!(!br.tie);
        let br = best_response(Role::Laggard, Pause, &fig1(0.6, 2.0));
        assert_eq!(br.strategy, Race);
    }

    #[test]
    fn huge_cost_always_pauses() {
        let p = fig1(0.3, 1e6);
        for role in Role::ALL {
            for rival in Strategy::ALL {
                assert_eq!(best_response(role, rival, &p).strategy, Pause);
            }
        }
        assert_eq!(classify_world(&p), World::SafeHarmony);
    }

    #[test]
    fn figure_one_equilibrium_sets() {
        let trust = pure_nash(&fig1(0.05, 4.0));
        assert!(trust.same_profiles(&EquilibriumSet::from_profiles([
            StrategyProfile::new(Pause, Pause),
            StrategyProfile::new(Race, Race)
        ])));
        let pre = pure_nash(&fig1(0.12, 1.0));
        assert!(
            pre.same_profiles(&EquilibriumSet::from_profiles([StrategyProfile::new(
                Race, Race
            )]))
        );
        let sub = pure_nash(&fig1(0.6, 2.0));
        assert!(
            sub.same_profiles(&EquilibriumSet::from_profiles([StrategyProfile::new(
                Pause, Race
            )]))
        );
    }

    #[test]
    fn figure_one_worlds() {
        assert_eq!(classify_world(&fig1(0.5, 10.0)), World::SafeHarmony);
        assert_eq!(classify_world(&fig1(0.05, 4.0)), World::Trust);
        assert_eq!(classify_world(&fig1(0.12, 1.0)), World::Preemption);
        assert_eq!(classify_world(&fig1(0.6, 2.0)), World::Subversion);
    }

    #[test]
    fn zero_cost_at_parity_is_preemption() {
        assert_eq!(classify_world(&fig1(0.0, 0.0)), World::Preemption);
    }

    #[test]
    fn zero_winner_advantage_is_harmony() {
        for cost in [0.0, 0.5, 20.0] {
            let p = GameParams::new(0.2, 0.0, cost, 0.1, 0.85).unwrap();
            assert_eq!(classify_world(&p), World::SafeHarmony);
        }
    }

    #[test]
    fn mapping_covers_every_reachable_set() {
        for bits in 0u8..16 {
            let set = EquilibriumSet::from_profiles(
                StrategyProfile::ALL
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| bits & (1 << i) != 0)
                    .map(|(_, p)| p),
            );
            let pp = set.contains(StrategyProfile::new(Pause, Pause));
            let rr = set.contains(StrategyProfile::new(Race, Race));
            let asym = set.contains(StrategyProfile::new(Pause, Race))
                || set.contains(StrategyProfile::new(Race, Pause));
            let reachable = !((pp || rr) && asym);
            assert_eq!(World::from_equilibria(&set).is_some(), reachable, "{set}");
        }
    }

    #[test]
    fn degenerate_regime_is_harmony_for_admissible_costs() {
        // s e^B = 0.85 e^0.075 < 1 pushes every threshold below zero.
        let base = GameParams::new(0.0, 1.0, 0.0, 2.0, 0.85).unwrap();
        assert!(base.race_leverage() < 1.0);
        for cost in [0.0, 0.01, 1.0, 30.0] {
            let p = base.with_cost(cost).unwrap();
            assert_eq!(classify_world(&p), World::SafeHarmony);
        }
    }

    #[test]
    fn asymmetric_pair_maps_to_anti_coordination() {
        let set = EquilibriumSet::from_profiles([
            StrategyProfile::new(Pause, Race),
            StrategyProfile::new(Race, Pause),
        ]);
        assert_eq!(World::from_equilibria(&set), Some(World::AntiCoordination));
        assert_eq!(
            World::from_equilibria(&EquilibriumSet::default()),
            Some(World::NoPureEquilibrium)
        );
    }

    #[test]
    fn tie_flag_set_on_exact_indifference() {
        // cost placed on the parity cooperation threshold, shared by both roles
        let base = fig1(0.0, 0.0);
        let p = base.with_cost(1.589566132838567).unwrap();
        let set = pure_nash(&p);
        assert!(set.tie_flags.laggard && set.tie_flags.frontrunner);
        assert!(!pure_nash(&base).tie_flags.laggard);
    }

    #[test]
    fn payoff_table_order() {
        let table = payoff_table(&fig1(0.0, 1.0));
        assert_eq!(table[0].0, StrategyProfile::new(Pause, Pause));
        assert!((table[3].1.eu_frontrunner - 0.275).abs() < 1e-12);
        assert!((table[3].1.eu_laggard - 0.275).abs() < 1e-12);
    }
}
