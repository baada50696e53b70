//! Monte Carlo oracle for the expected-payoff formulas.
//!
//! Draws applicant types and recourse outcomes from the generative story
//! behind the payoffs and estimates each action's expected payoff by
//! simulation, independently of the closed-form expressions. Reproducible:
//! draws are processed in fixed batches of [`BATCH_SIZE`]; batch `b` reads
//! stream `b` of a ChaCha8 generator keyed by the seed, so draw `i` depends
//! only on `(seed, i / BATCH_SIZE, i % BATCH_SIZE)` and results do not change
//! with how batches are scheduled across workers.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::policy::{expected_payoffs, optimal_action, Action, PolicyParams, Probability};

/// Draws per RNG stream.
pub const BATCH_SIZE: u64 = 1024;

/// A simulated mean payoff with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(draws); 0 for a single draw.
    pub std_error: f64,
    pub draws: u64,
    pub seed: u64,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    // 53-bit mantissa uniform in [0, 1).
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Simulate one action's payoff for an applicant profitable with probability
/// `p`. Per draw: accept pays +1 for a profitable type and -1 otherwise;
/// reject pays 0; recourse pays +1 when a profitable type continues
/// (probability `u`), -1 when an unprofitable type manipulates (probability
/// `m`), and 0 otherwise.
pub fn simulate_action_payoff(
    p: Probability,
    params: &PolicyParams,
    action: Action,
    draws: u64,
    seed: u64,
) -> SimEstimate {
    assert!(draws >= 1, "draws must be positive");
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let batches = draws.div_ceil(BATCH_SIZE);
    for batch in 0..batches {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let in_batch = (draws - batch * BATCH_SIZE).min(BATCH_SIZE);
        for _ in 0..in_batch {
            let profitable = uniform(&mut rng) < p.value();
            let payoff = match action {
                Action::Accept => {
                    if profitable {
                        1.0
                    } else {
                        -1.0
                    }
                }
                Action::Reject => 0.0,
                Action::Recourse => {
                    let outcome = uniform(&mut rng);
                    if profitable {
                        if outcome < params.u() {
                            1.0
                        } else {
                            0.0
                        }
                    } else if outcome < params.m() {
                        -1.0
                    } else {
                        0.0
                    }
                }
            };
            sum += payoff;
            sum_sq += payoff * payoff;
        }
    }
    let n = draws as f64;
    let mean = sum / n;
    let std_error = if draws >= 2 {
        // Payoffs are in {-1, 0, 1}, so both sums are exact integers and the
        // sample variance is computed without cancellation error beyond the
        // final subtraction.
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    SimEstimate {
        mean,
        std_error,
        draws,
        seed,
    }
}

/// One comparison between the simulated and analytic optimal action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyCheck {
    pub p: Probability,
    pub analytic: Action,
    pub simulated: Action,
    pub agree: bool,
    /// True when the simulated payoff gap between the two actions is inside
    /// the statistical-ambiguity zone (less than four combined standard
    /// errors), so a disagreement carries no evidence.
    pub ambiguous: bool,
    pub gap: f64,
    pub combined_std_error: f64,
    pub estimates: [SimEstimate; 3],
}

/// Simulation-vs-formula verification over a grid of estimates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<PolicyCheck>,
    pub disagreements: usize,
    pub non_ambiguous_disagreements: usize,
}

/// SplitMix64; spreads grid and action indices into independent sub-seeds.
fn mix(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cell_seed(seed: u64, grid_index: usize, action_index: usize) -> u64 {
    mix(mix(seed ^ (grid_index as u64)) ^ (action_index as u64))
}

/// For each grid point, compare the argmax of the three simulated means
/// against [`optimal_action`]. An empty grid yields an empty report.
pub fn verify_policy(
    p_grid: &[Probability],
    params: &PolicyParams,
    draws: u64,
    seed: u64,
) -> VerificationReport {
    let mut report = VerificationReport::default();
    for (gi, &p) in p_grid.iter().enumerate() {
        let estimates = [
            simulate_action_payoff(p, params, Action::Accept, draws, cell_seed(seed, gi, 0)),
            simulate_action_payoff(p, params, Action::Recourse, draws, cell_seed(seed, gi, 1)),
            simulate_action_payoff(p, params, Action::Reject, draws, cell_seed(seed, gi, 2)),
        ];
        let sim_mean = |a: Action| estimates[action_index(a)].mean;
        let mut simulated = Action::Accept;
        for action in [Action::Recourse, Action::Reject] {
            if sim_mean(action) > sim_mean(simulated) {
                simulated = action;
            }
        }
        let analytic = optimal_action(p, params);
        let agree = simulated == analytic;
        let gap = sim_mean(simulated) - sim_mean(analytic);
        let se_a = estimates[action_index(simulated)].std_error;
        let se_b = estimates[action_index(analytic)].std_error;
        let combined_std_error = (se_a * se_a + se_b * se_b).sqrt();
        let ambiguous = gap < 4.0 * combined_std_error;
        if !agree {
            report.disagreements += 1;
            if !ambiguous {
                report.non_ambiguous_disagreements += 1;
            }
        }
        report.checks.push(PolicyCheck {
            p,
            analytic,
            simulated,
            agree,
            ambiguous,
            gap,
            combined_std_error,
            estimates,
        });
    }
    report
}

fn action_index(action: Action) -> usize {
    match action {
        Action::Accept => 0,
        Action::Recourse => 1,
        Action::Reject => 2,
    }
}

/// Analytic expected payoff of one action; the quantity the simulator
/// estimates.
pub fn analytic_payoff(p: Probability, params: &PolicyParams, action: Action) -> f64 {
    expected_payoffs(p, params).of(action)
}
