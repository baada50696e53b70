//! Probability histograms split by the action each applicant receives.

use crate::game::{competitive_region, Region};
use crate::policy::{optimal_action, Action, ActionCounts, PolicyParams, Probability};

use super::csvfmt::fmt_f64;
use super::ReportError;

/// Per-bin counts split by action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinCounts {
    pub reject: usize,
    pub recourse: usize,
    pub accept: usize,
}

impl BinCounts {
    pub fn total(&self) -> usize {
        self.reject + self.recourse + self.accept
    }
}

/// A histogram over [0, 1] whose bars are split by action.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionHistogram {
    /// `bins + 1` ascending edges spanning [0, 1].
    pub edges: Vec<f64>,
    pub bins: Vec<BinCounts>,
    /// Action totals over the whole population.
    pub totals: ActionCounts,
}

fn edges(bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| i as f64 / bins as f64).collect()
}

fn bin_of(p: f64, bins: usize) -> usize {
    ((p * bins as f64) as usize).min(bins - 1)
}

/// Label one applicant under competition; exact threshold hits go to the
/// applicant-preferred side (accept at the accept threshold, recourse at the
/// reject threshold), mirroring the single-decision-maker tie rule.
fn competitive_action(p: Probability, params: &PolicyParams) -> Action {
    match competitive_region(p, params) {
        Region::Accept => Action::Accept,
        Region::Recourse => Action::Recourse,
        Region::Reject => Action::Reject,
        Region::Boundary => {
            let t = crate::game::competition_thresholds(params);
            if (p.value() - t.accept_threshold.value()).abs()
                <= (p.value() - t.reject_threshold.value()).abs()
            {
                Action::Accept
            } else {
                Action::Recourse
            }
        }
    }
}

/// Build the histogram. With `competition` the action labels come from the
/// two-decision-maker equilibrium regions instead of the monopoly policy.
pub fn region_histogram(
    probs: &[Probability],
    params: &PolicyParams,
    bins: usize,
    competition: bool,
) -> Result<RegionHistogram, ReportError> {
    if bins == 0 {
        return Err(ReportError::Validation(
            "histogram needs at least one bin".into(),
        ));
    }
    let mut counts = vec![BinCounts::default(); bins];
    let mut totals = ActionCounts::default();
    for &p in probs {
        let action = if competition {
            competitive_action(p, params)
        } else {
            optimal_action(p, params)
        };
        let bin = &mut counts[bin_of(p.value(), bins)];
        match action {
            Action::Reject => {
                bin.reject += 1;
                totals.reject += 1;
            }
            Action::Recourse => {
                bin.recourse += 1;
                totals.recourse += 1;
            }
            Action::Accept => {
                bin.accept += 1;
                totals.accept += 1;
            }
        }
    }
    Ok(RegionHistogram {
        edges: edges(bins),
        bins: counts,
        totals,
    })
}

impl RegionHistogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lower,bin_upper,reject,recourse,accept\n");
        for (i, bin) in self.bins.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(self.edges[i]),
                fmt_f64(self.edges[i + 1]),
                bin.reject,
                bin.recourse,
                bin.accept
            ));
        }
        out
    }
}

/// Per-bin counts before and after recourse becomes available. "Before" the
/// decision-maker accepts exactly when p > 1/2; "after" she follows the
/// three-action policy, and the recourse bars are split by whether the
/// applicant would have been accepted before (the inflated group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BeforeAfterBin {
    pub before_reject: usize,
    pub before_accept: usize,
    pub after_reject: usize,
    pub after_recourse_from_reject: usize,
    pub after_recourse_from_accept: usize,
    pub after_accept: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeforeAfter {
    pub edges: Vec<f64>,
    pub bins: Vec<BeforeAfterBin>,
    /// Applicants accepted before but offered recourse after.
    pub inflated: usize,
}

/// Compare the accept-only baseline with the recourse policy. With
/// `competition` the "after" labels come from the duopoly regions.
pub fn before_after(
    probs: &[Probability],
    params: &PolicyParams,
    bins: usize,
    competition: bool,
) -> Result<BeforeAfter, ReportError> {
    if bins == 0 {
        return Err(ReportError::Validation(
            "histogram needs at least one bin".into(),
        ));
    }
    let mut out = vec![BeforeAfterBin::default(); bins];
    let mut inflated = 0;
    for &p in probs {
        let bin = &mut out[bin_of(p.value(), bins)];
        // Baseline tie at p = 1/2 goes to accept, as in the three-action rule.
        let accepted_before = p.value() >= 0.5;
        if accepted_before {
            bin.before_accept += 1;
        } else {
            bin.before_reject += 1;
        }
        let after = if competition {
            competitive_action(p, params)
        } else {
            optimal_action(p, params)
        };
        match after {
            Action::Reject => bin.after_reject += 1,
            Action::Accept => bin.after_accept += 1,
            Action::Recourse => {
                if accepted_before {
                    bin.after_recourse_from_accept += 1;
                    inflated += 1;
                } else {
                    bin.after_recourse_from_reject += 1;
                }
            }
        }
    }
    Ok(BeforeAfter {
        edges: edges(bins),
        bins: out,
        inflated,
    })
}

impl BeforeAfter {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "bin_lower,bin_upper,before_reject,before_accept,after_reject,\
             after_recourse_from_reject,after_recourse_from_accept,after_accept\n",
        );
        for (i, bin) in self.bins.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_f64(self.edges[i]),
                fmt_f64(self.edges[i + 1]),
                bin.before_reject,
                bin.before_accept,
                bin.after_reject,
                bin.after_recourse_from_reject,
                bin.after_recourse_from_accept,
                bin.after_accept
            ));
        }
        out
    }
}
