//! Decision-maker incentives for offering algorithmic recourse.
//!
//! A decision-maker (a bank, say) screens applicants using a calibrated
//! probability that each applicant is profitable. Besides accepting or
//! rejecting, she may offer *recourse*: reject but disclose the steps needed
//! to gain acceptance. This crate models when recourse is worth offering,
//! what changes once two decision-makers compete for the same applicants, and
//! grounds both in a credit-scoring pipeline over the German Credit dataset,
//! with a Monte Carlo simulator double-checking every payoff formula.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! - **`payoffs_and_bands`** - expected payoffs, optimal actions, and the
//!   recourse band of a single decision-maker
//! - **`duopoly_game`** - the 3x3 competition game: payoff matrix, dominance
//!   elimination, pure Nash equilibria
//! - **`competition_regions`** - closed-form competition thresholds vs. the
//!   enumerated equilibria, and how competition widens the accept region
//! - **`monte_carlo_check`** - simulated payoffs vs. the analytic formulas
//! - **`credit_pipeline`** - parse, summarize, split, train, predict, and
//!   classify the German Credit applications end to end
//! - **`sharpening_series`** - how sharper predictions shrink the set of
//!   applicants offered recourse
//! - **`band_sweep_heatmap`** - parameter sweeps over (u, m) written as CSV
//!   and SVG heatmaps
//!
//! ```bash
//! cargo run -p recourse --example payoffs_and_bands
//! cargo run -p recourse --example credit_pipeline
//! ```
//!
//! The `recourse` binary exposes the same machinery as subcommands
//! (`ingest`, `summarize`, `pipeline`, `sweep`, `classify`, `game`,
//! `simulate`); see the README.

pub mod encode;
pub mod game;
pub mod german;
pub mod logit;
pub mod policy;
pub mod report;
pub mod simulate;

pub use policy::{Action, PolicyParams, Probability};
