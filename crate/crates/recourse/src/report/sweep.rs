//! Parameter sweeps over the (u, m) square.

use crate::game::competition_thresholds;
use crate::policy::{accept_to_recourse_band, band_magnitude, PolicyParams};

use super::csvfmt::fmt_f64;
use super::ReportError;

/// What a sweep cell computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Width of the recourse band.
    BandMagnitude,
    /// Width of the accepted-to-recourse inflation band.
    AcceptToRecourse,
    /// The competition accept threshold.
    CompetitionThresholds,
}

impl SweepMode {
    pub fn slug(self) -> &'static str {
        match self {
            SweepMode::BandMagnitude => "band_magnitude",
            SweepMode::AcceptToRecourse => "accept_to_recourse",
            SweepMode::CompetitionThresholds => "competition_thresholds",
        }
    }

    pub fn value_label(self) -> &'static str {
        match self {
            SweepMode::BandMagnitude => "recourse band magnitude",
            SweepMode::AcceptToRecourse => "accept-to-recourse magnitude",
            SweepMode::CompetitionThresholds => "competition accept threshold",
        }
    }

    fn evaluate(self, params: &PolicyParams) -> f64 {
        match self {
            SweepMode::BandMagnitude => band_magnitude(params),
            SweepMode::AcceptToRecourse => accept_to_recourse_band(params).magnitude(),
            SweepMode::CompetitionThresholds => {
                competition_thresholds(params).accept_threshold.value()
            }
        }
    }
}

/// A dense grid of cell values over ascending u and m axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub mode: SweepMode,
    pub u_values: Vec<f64>,
    pub m_values: Vec<f64>,
    /// `cells[i][j]` is the value at `(u_values[i], m_values[j])`.
    pub cells: Vec<Vec<f64>>,
}

fn axis(range: (f64, f64), steps: usize, name: &str) -> Result<Vec<f64>, ReportError> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi))
    {
        return Err(ReportError::Validation(format!(
            "{name} range must lie within [0, 1], got [{lo}, {hi}]"
        )));
    }
    if lo > hi {
        return Err(ReportError::Validation(format!(
            "{name} range must be ascending, got [{lo}, {hi}]"
        )));
    }
    if steps < 2 {
        return Err(ReportError::Validation(format!(
            "sweep needs at least 2 steps per axis, got {steps}"
        )));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Evaluate `mode` over a `steps x steps` grid. Cell order is row-major in u
/// then m, so repeated runs emit byte-identical CSV.
pub fn sweep(
    mode: SweepMode,
    u_range: (f64, f64),
    m_range: (f64, f64),
    steps: usize,
) -> Result<SweepGrid, ReportError> {
    let u_values = axis(u_range, steps, "u")?;
    let m_values = axis(m_range, steps, "m")?;
    let cells = u_values
        .iter()
        .map(|&u| {
            m_values
                .iter()
                .map(|&m| {
                    let params = PolicyParams::new(u, m).expect("axis stays in range");
                    mode.evaluate(&params)
                })
                .collect()
        })
        .collect();
    Ok(SweepGrid {
        mode,
        u_values,
        m_values,
        cells,
    })
}

impl SweepGrid {
    /// `u,m,value` rows covering the whole grid.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,m,value\n");
        for (i, &u) in self.u_values.iter().enumerate() {
            for (j, &m) in self.m_values.iter().enumerate() {
                out.push_str(&fmt_f64(u));
                out.push(',');
                out.push_str(&fmt_f64(m));
                out.push(',');
                out.push_str(&fmt_f64(self.cells[i][j]));
                out.push('\n');
            }
        }
        out
    }

    /// Value at the grid point nearest to `(u, m)`.
    pub fn nearest(&self, u: f64, m: f64) -> f64 {
        let pick = |axis: &[f64], target: f64| {
            axis.iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (*a - target).abs().partial_cmp(&(*b - target).abs()).unwrap()
                })
                .map(|(i, _)| i)
                .unwrap()
        };
        self.cells[pick(&self.u_values, u)][pick(&self.m_values, m)]
    }
}
