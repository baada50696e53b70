//! Single decision-maker policy over the accept / recourse / reject actions.
//!
//! A decision-maker screens applicants of two latent types. Accepting a
//! profitable applicant pays +1, accepting an unprofitable one pays -1,
//! rejecting pays 0. Offering recourse re-screens the applicant: a profitable
//! applicant continues with probability `u`, an unprofitable applicant
//! manipulates the process with probability `m`.

use thiserror::Error;

/// Validation failure for probability-like inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvalidParameter {
    #[error("probability must lie in [0, 1], got {0}")]
    Probability(f64),
    #[error("policy parameter {name} must lie in [0, 1], got {value}")]
    PolicyParam { name: &'static str, value: f64 },
}

/// A probability in `[0, 1]`. NaN and infinities are rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self, InvalidParameter> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(InvalidParameter::Probability(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Probability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::str::FromStr for Probability {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value: f64 = s.parse().map_err(|e| format!("{e}"))?;
        Probability::new(value).map_err(|e| e.to_string())
    }
}

/// The pair `(u, m)`: the probability a profitable applicant continues after
/// being offered recourse, and the probability an unprofitable applicant
/// manipulates the recourse process into an acceptance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    u: f64,
    m: f64,
}

impl PolicyParams {
    pub fn new(u: f64, m: f64) -> Result<Self, InvalidParameter> {
        if !(u.is_finite() && (0.0..=1.0).contains(&u)) {
            return Err(InvalidParameter::PolicyParam { name: "u", value: u });
        }
        if !(m.is_finite() && (0.0..=1.0).contains(&m)) {
            return Err(InvalidParameter::PolicyParam { name: "m", value: m });
        }
        Ok(PolicyParams { u, m })
    }

    /// Continuation probability for profitable applicants.
    pub fn u(&self) -> f64 {
        self.u
    }

    /// Ease of manipulation for unprofitable applicants.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Recourse is ever worth offering only when `m < u`.
    pub fn recourse_viable(&self) -> bool {
        self.m < self.u
    }
}

/// The three actions available to the decision-maker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Accept,
    Recourse,
    Reject,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Accept, Action::Recourse, Action::Reject];

    /// Applicant preference rank: applicants prefer accept to recourse and
    /// recourse to reject. Lower rank is preferred.
    pub fn applicant_rank(self) -> u8 {
        match self {
            Action::Accept => 0,
            Action::Recourse => 1,
            Action::Reject => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Action::Accept => "accept",
            Action::Recourse => "recourse",
            Action::Reject => "reject",
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Expected payoff of each action for one applicant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedPayoffs {
    pub accept: f64,
    pub recourse: f64,
    pub reject: f64,
}

impl ExpectedPayoffs {
    pub fn of(&self, action: Action) -> f64 {
        match action {
            Action::Accept => self.accept,
            Action::Recourse => self.recourse,
            Action::Reject => self.reject,
        }
    }

    /// The payoff-maximal action; exact ties go to the applicant-preferred
    /// action (accept over recourse over reject).
    pub fn best_action(&self) -> Action {
        let mut best = Action::Accept;
        for action in [Action::Recourse, Action::Reject] {
            if self.of(action) > self.of(best) {
                best = action;
            }
        }
        best
    }
}

/// Expected payoffs for an applicant with estimated profitability `p`:
/// accept pays `2p - 1`, recourse pays `p*u - (1-p)*m`, reject pays 0.
pub fn expected_payoffs(p: Probability, params: &PolicyParams) -> ExpectedPayoffs {
    let p = p.value();
    ExpectedPayoffs {
        accept: 2.0 * p - 1.0,
        recourse: p * params.u() - (1.0 - p) * params.m(),
        reject: 0.0,
    }
}

/// The payoff-maximal action for one applicant, ties broken by applicant
/// preference.
pub fn optimal_action(p: Probability, params: &PolicyParams) -> Action {
    expected_payoffs(p, params).best_action()
}

/// An open interval of profitability estimates, or the empty set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Band {
    Empty,
    Open { lower: Probability, upper: Probability },
}

impl Band {
    fn open(lower: f64, upper: f64) -> Band {
        debug_assert!(lower < upper);
        Band::Open {
            lower: Probability::new(lower).expect("band endpoint out of range"),
            upper: Probability::new(upper).expect("band endpoint out of range"),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Band::Empty)
    }

    /// Strict interior membership; the empty band contains nothing.
    pub fn contains(&self, p: Probability) -> bool {
        match self {
            Band::Empty => false,
            Band::Open { lower, upper } => lower.value() < p.value() && p.value() < upper.value(),
        }
    }

    /// Width of the interval, 0 for the empty band.
    pub fn magnitude(&self) -> f64 {
        match self {
            Band::Empty => 0.0,
            Band::Open { lower, upper } => upper.value() - lower.value(),
        }
    }

    pub fn endpoints(&self) -> Option<(f64, f64)> {
        match self {
            Band::Empty => None,
            Band::Open { lower, upper } => Some((lower.value(), upper.value())),
        }
    }
}

/// The interval of `p` on which recourse is the strictly optimal action:
/// `m/(u+m) < p < (1-m)/((1-m)+(1-u))`, empty whenever `m >= u`.
pub fn recourse_band(params: &PolicyParams) -> Band {
    if !params.recourse_viable() {
        return Band::Empty;
    }
    // m < u rules out both degenerate denominators (u+m = 0 needs u = m = 0,
    // and (1-m)+(1-u) = 0 needs u = m = 1).
    let lower = params.m() / (params.u() + params.m());
    let upper = (1.0 - params.m()) / ((1.0 - params.m()) + (1.0 - params.u()));
    Band::open(lower, upper)
}

/// Width of the recourse band; 0 when the band is empty.
pub fn band_magnitude(params: &PolicyParams) -> f64 {
    recourse_band(params).magnitude()
}

/// Applicants in `(1/2, upper)` would be accepted if recourse were not an
/// option but are offered recourse once it is. Empty whenever `m >= u`
/// (no recourse is offered at all).
pub fn accept_to_recourse_band(params: &PolicyParams) -> Band {
    match recourse_band(params) {
        Band::Empty => Band::Empty,
        Band::Open { upper, .. } if upper.value() > 0.5 => Band::open(0.5, upper.value()),
        Band::Open { .. } => Band::Empty,
    }
}

/// Per-action population counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ActionCounts {
    pub accept: usize,
    pub recourse: usize,
    pub reject: usize,
}

impl ActionCounts {
    pub fn total(&self) -> usize {
        self.accept + self.recourse + self.reject
    }

    pub fn of(&self, action: Action) -> usize {
        match action {
            Action::Accept => self.accept,
            Action::Recourse => self.recourse,
            Action::Reject => self.reject,
        }
    }

    fn record(&mut self, action: Action) {
        match action {
            Action::Accept => self.accept += 1,
            Action::Recourse => self.recourse += 1,
            Action::Reject => self.reject += 1,
        }
    }
}

/// Population classification: per-applicant optimal actions (in input order)
/// plus the per-action counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedPopulation {
    pub actions: Vec<Action>,
    pub counts: ActionCounts,
}

/// Apply [`optimal_action`] to every applicant. An empty input yields zero
/// counts.
pub fn classify_population(ps: &[Probability], params: &PolicyParams) -> ClassifiedPopulation {
    let mut counts = ActionCounts::default();
    let actions = ps
        .iter()
        .map(|&p| {
            let action = optimal_action(p, params);
            counts.record(action);
            action
        })
        .collect();
    ClassifiedPopulation { actions, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    fn params(u: f64, m: f64) -> PolicyParams {
        PolicyParams::new(u, m).unwrap()
    }

    #[test]
    fn probability_rejects_out_of_range_and_non_finite() {
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(1.1).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert!(Probability::new(f64::INFINITY).is_err());
        assert!(Probability::new(0.0).is_ok());
        assert!(Probability::new(1.0).is_ok());
    }

    #[test]
    fn policy_params_reject_out_of_range() {
        assert!(PolicyParams::new(-0.2, 0.5).is_err());
        assert!(PolicyParams::new(0.2, 1.5).is_err());
        assert!(PolicyParams::new(f64::NAN, 0.5).is_err());
        assert!(PolicyParams::new(0.0, 0.0).is_ok());
        assert!(PolicyParams::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn payoffs_match_running_example() {
        // Running parameters u = 0.5, m = 0.2 at p = 0.6.
        let pay = expected_payoffs(p(0.6), &params(0.5, 0.2));
        assert!((pay.accept - 0.2).abs() < 1e-12);
        assert!((pay.recourse - 0.22).abs() < 1e-12);
        assert_eq!(pay.reject, 0.0);
    }

    #[test]
    fn payoffs_at_certain_types() {
        let pay = expected_payoffs(p(0.0), &params(0.3, 0.7));
        assert_eq!(pay.accept, -1.0);
        assert!((pay.recourse - (-0.7)).abs() < 1e-12);

        let pay = expected_payoffs(p(1.0), &params(0.9, 0.5));
        assert_eq!(pay.accept, 1.0);
        assert!((pay.recourse - 0.9).abs() < 1e-12);
    }

    #[test]
    fn optimal_action_examples() {
        assert_eq!(optimal_action(p(0.6), &params(0.5, 0.2)), Action::Recourse);
        // Three-way tie at p = 0.5, u = m = 0.5: applicant-preferred accept wins.
        assert_eq!(optimal_action(p(0.5), &params(0.5, 0.5)), Action::Accept);
        // Direct evaluation: accept = -0.5, recourse = 0.125 - 0.15 = -0.025.
        assert_eq!(optimal_action(p(0.25), &params(0.5, 0.2)), Action::Reject);
    }

    #[test]
    fn recourse_band_running_example() {
        let band = recourse_band(&params(0.5, 0.2));
        let (lower, upper) = band.endpoints().unwrap();
        // 0.2/0.7 = 2/7 and 0.8/1.3 = 8/13.
        assert!((lower - 2.0 / 7.0).abs() < 1e-12);
        assert!((upper - 8.0 / 13.0).abs() < 1e-12);
        assert!((band.magnitude() - 30.0 / 91.0).abs() < 1e-12);
    }

    #[test]
    fn recourse_band_full_interval_when_unmanipulable() {
        let band = recourse_band(&params(1.0, 0.0));
        assert_eq!(band.endpoints(), Some((0.0, 1.0)));
        assert_eq!(band.magnitude(), 1.0);
    }

    #[test]
    fn recourse_band_empty_when_manipulation_dominates() {
        assert!(recourse_band(&params(0.3, 0.3)).is_empty());
        assert!(recourse_band(&params(0.2, 0.5)).is_empty());
        assert_eq!(band_magnitude(&params(0.2, 0.5)), 0.0);
        // Degenerate corners fall under the same m >= u rule.
        assert!(recourse_band(&params(0.0, 0.0)).is_empty());
        assert!(recourse_band(&params(1.0, 1.0)).is_empty());
    }

    #[test]
    fn accept_to_recourse_band_examples() {
        let band = accept_to_recourse_band(&params(0.5, 0.2));
        let (lower, upper) = band.endpoints().unwrap();
        assert_eq!(lower, 0.5);
        assert!((upper - 8.0 / 13.0).abs() < 1e-12);

        assert_eq!(
            accept_to_recourse_band(&params(1.0, 0.0)).endpoints(),
            Some((0.5, 1.0))
        );
        assert!(accept_to_recourse_band(&params(0.2, 0.5)).is_empty());
    }

    #[test]
    fn classify_population_counts_and_order() {
        let ps = [p(0.1), p(0.4), p(0.9)];
        let out = classify_population(&ps, &params(0.5, 0.2));
        assert_eq!(
            out.actions,
            vec![Action::Reject, Action::Recourse, Action::Accept]
        );
        assert_eq!(out.counts.reject, 1);
        assert_eq!(out.counts.recourse, 1);
        assert_eq!(out.counts.accept, 1);
        assert_eq!(out.counts.total(), 3);
    }

    #[test]
    fn classify_population_empty_input() {
        let out = classify_population(&[], &params(0.5, 0.2));
        assert!(out.actions.is_empty());
        assert_eq!(out.counts.total(), 0);
    }

    #[test]
    fn classify_population_tie_rule_picks_accept() {
        let out = classify_population(&[p(0.5), p(0.5)], &params(0.2, 0.5));
        assert_eq!(out.counts.accept, 2);
    }

    #[test]
    fn band_interior_is_exactly_where_recourse_is_strict_argmax() {
        // Exhaustive grid over p at several parameter pairs, step 1e-3.
        for &(u, m) in &[(0.5, 0.2), (1.0, 0.0), (0.3, 0.3), (0.2, 0.5), (0.9, 0.1)] {
            let params = params(u, m);
            let band = recourse_band(&params);
            for i in 0..=1000 {
                let prob = p(i as f64 / 1000.0);
                let pay = expected_payoffs(prob, &params);
                let strict =
                    pay.recourse > pay.accept && pay.recourse > pay.reject;
                assert_eq!(
                    band.contains(prob),
                    strict,
                    "u={u} m={m} p={}",
                    prob.value()
                );
                if strict {
                    assert_eq!(optimal_action(prob, &params), Action::Recourse);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn optimal_action_is_argmax_under_tie_order(
            pv in 0.0..=1.0f64, u in 0.0..=1.0f64, m in 0.0..=1.0f64
        ) {
            let pay = expected_payoffs(p(pv), &params(u, m));
            let action = optimal_action(p(pv), &params(u, m));
            let max = pay.accept.max(pay.recourse).max(pay.reject);
            prop_assert_eq!(pay.of(action), max);
            // No applicant-preferred action achieves the same payoff.
            for other in Action::ALL {
                if other.applicant_rank() < action.applicant_rank() {
                    prop_assert!(pay.of(other) < max);
                }
            }
        }

        #[test]
        fn band_nonempty_iff_m_below_u(u in 0.0..=1.0f64, m in 0.0..=1.0f64) {
            let params = params(u, m);
            prop_assert_eq!(!recourse_band(&params).is_empty(), m < u);
        }

        #[test]
        fn counts_are_permutation_invariant(
            mut ps in proptest::collection::vec(0.0..=1.0f64, 0..60),
            u in 0.0..=1.0f64,
            m in 0.0..=1.0f64,
        ) {
            let params = params(u, m);
            let probs: Vec<_> = ps.iter().map(|&v| p(v)).collect();
            let forward = classify_population(&probs, &params);
            prop_assert_eq!(forward.counts.total(), probs.len());
            ps.reverse();
            let probs_rev: Vec<_> = ps.iter().map(|&v| p(v)).collect();
            let backward = classify_population(&probs_rev, &params);
            prop_assert_eq!(forward.counts, backward.counts);
        }
    }
}
