//! Report generation: everything the CLI emits lives here so the binary
//! stays a thin argument parser.

pub mod config;
pub mod csvfmt;
pub mod histogram;
pub mod pipeline;
pub mod svg;
pub mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::game::{build_payoff_matrix, competition_thresholds, pure_nash};
use crate::german::DataError;
use crate::logit::{ModelIoError, PredictError, TrainError};
use crate::policy::{Action, ActionCounts, InvalidParameter, PolicyParams, Probability};
use crate::simulate::{simulate_action_payoff, verify_policy, SimEstimate, VerificationReport};

pub use config::{ConfigError, RunConfig};
pub use histogram::{before_after, region_histogram};
pub use pipeline::{run_pipeline, PipelineReport};
pub use sweep::{sweep, SweepGrid, SweepMode};

/// Which artifacts a command writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

impl OutputFormat {
    pub fn wants_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn wants_svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!("unknown format {other:?} (expected csv, svg or both)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Model(#[from] ModelIoError),
    #[error(transparent)]
    Param(#[from] InvalidParameter),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<ReportError>,
    },
}

impl ReportError {
    /// Process exit code: 0 success, 1 validation, 2 I/O, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Io { .. } => 2,
            ReportError::Data(DataError::Io(_)) => 2,
            ReportError::Config(ConfigError::Io(_)) => 2,
            ReportError::Model(ModelIoError::Io(_)) => 2,
            ReportError::Train(TrainError::NonConverged { .. }) => 3,
            ReportError::Stage { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    fn stage(stage: &'static str) -> impl FnOnce(ReportError) -> ReportError {
        move |source| ReportError::Stage {
            stage,
            source: Box::new(source),
        }
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| ReportError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(contents.as_bytes())
        .map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub(crate) fn read_file(path: &Path) -> Result<String, ReportError> {
    std::fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Artifacts written by one command.
#[derive(Debug, Clone, Default)]
pub struct WrittenFiles {
    pub files: Vec<PathBuf>,
}

impl WrittenFiles {
    fn add(&mut self, path: PathBuf) -> &mut Self {
        self.files.push(path);
        self
    }
}

/// Parse + encode a raw file into the encoded-dataset CSV. The encoding is
/// fitted on the full input (the pipeline fits on its training split
/// instead).
pub fn cmd_ingest(raw_path: &Path, out_path: &Path) -> Result<WrittenFiles, ReportError> {
    let records = crate::german::parse_german(open(raw_path)?)?;
    let encoding = crate::encode::Encoding::fit(&records)?;
    write_file(out_path, &encoding.to_csv(&records))?;
    let mut written = WrittenFiles::default();
    written.add(out_path.to_path_buf());
    Ok(written)
}

fn open(path: &Path) -> Result<std::fs::File, ReportError> {
    std::fs::File::open(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Group-wise summary statistics CSV in the published table's layout, with
/// the straightforward foreign-worker share and its inversion side by side.
pub fn summary_csv(stats: &crate::german::SummaryStats) -> String {
    use csvfmt::fmt_f64 as f;
    let (u, p) = (&stats.unprofitable, &stats.profitable);
    let mut out = String::from("statistic,unprofitable,profitable\n");
    let mut row = |name: &str, a: String, b: String| {
        out.push_str(&format!("{name},{a},{b}\n"));
    };
    row("observations", u.count.to_string(), p.count.to_string());
    row("age_mean", f(u.age.mean), f(p.age.mean));
    row("age_sd", f(u.age.sd), f(p.age.sd));
    row(
        "residence_years_mean",
        f(u.residence_years.mean),
        f(p.residence_years.mean),
    );
    row(
        "residence_years_sd",
        f(u.residence_years.sd),
        f(p.residence_years.sd),
    );
    row("duration_mean", f(u.duration.mean), f(p.duration.mean));
    row("duration_sd", f(u.duration.sd), f(p.duration.sd));
    row("amount_mean", f(u.amount.mean), f(p.amount.mean));
    row("amount_sd", f(u.amount.sd), f(p.amount.sd));
    row("female", f(u.female), f(p.female));
    row("foreign_worker", f(u.foreign_worker), f(p.foreign_worker));
    row(
        "not_foreign_worker",
        f(1.0 - u.foreign_worker),
        f(1.0 - p.foreign_worker),
    );
    row("new_car", f(u.new_car), f(p.new_car));
    row("electronics", f(u.electronics), f(p.electronics));
    row("telephone", f(u.telephone), f(p.telephone));
    out
}

/// Parse a raw file and write its summary-statistics CSV.
pub fn cmd_summarize(
    raw_path: &Path,
    out_path: &Path,
) -> Result<(crate::german::SummaryStats, WrittenFiles), ReportError> {
    let records = crate::german::parse_german(open(raw_path)?)?;
    let stats = crate::german::summarize(&records)?;
    write_file(out_path, &summary_csv(&stats))?;
    let mut written = WrittenFiles::default();
    written.add(out_path.to_path_buf());
    Ok((stats, written))
}

/// Run a parameter sweep and write its CSV / SVG artifacts.
pub fn cmd_sweep(
    mode: SweepMode,
    u_range: (f64, f64),
    m_range: (f64, f64),
    steps: usize,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<(SweepGrid, WrittenFiles), ReportError> {
    let grid = sweep(mode, u_range, m_range, steps)?;
    let mut written = WrittenFiles::default();
    if format.wants_csv() {
        let path = out_dir.join(format!("sweep_{}.csv", mode.slug()));
        write_file(&path, &grid.to_csv())?;
        written.add(path);
    }
    if format.wants_svg() {
        let path = out_dir.join(format!("sweep_{}.svg", mode.slug()));
        write_file(&path, &svg::heatmap_svg(&grid, mode.value_label()))?;
        written.add(path);
    }
    Ok((grid, written))
}

/// Classification artifacts of one probability file.
#[derive(Debug, Clone)]
pub struct ClassifyOutput {
    pub counts: ActionCounts,
    pub inflated: usize,
    pub written: WrittenFiles,
}

/// Classify a probability file into action regions and write the histogram
/// plus the before/after comparison.
pub fn cmd_classify(
    probs_path: &Path,
    params: &PolicyParams,
    bins: usize,
    competition: bool,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<ClassifyOutput, ReportError> {
    let probs = csvfmt::parse_probability_file(&read_file(probs_path)?)
        .map_err(ReportError::Validation)?;
    let hist = region_histogram(&probs, params, bins, competition)?;
    let cmp = before_after(&probs, params, bins, competition)?;
    let mut written = WrittenFiles::default();
    let suffix = if competition { "_competition" } else { "" };
    if format.wants_csv() {
        let path = out_dir.join(format!("classify_regions{suffix}.csv"));
        write_file(&path, &hist.to_csv())?;
        written.add(path);
        let path = out_dir.join(format!("classify_before_after{suffix}.csv"));
        write_file(&path, &cmp.to_csv())?;
        written.add(path);
    }
    if format.wants_svg() {
        let title = if competition {
            "actions under competition"
        } else {
            "actions by predicted probability"
        };
        let path = out_dir.join(format!("classify_regions{suffix}.svg"));
        write_file(&path, &svg::region_histogram_svg(&hist, title))?;
        written.add(path);
        let path = out_dir.join(format!("classify_before_after{suffix}.svg"));
        write_file(
            &path,
            &svg::before_after_svg(&cmp, "impact of introducing recourse"),
        )?;
        written.add(path);
    }
    Ok(ClassifyOutput {
        counts: hist.totals,
        inflated: cmp.inflated,
        written,
    })
}

/// Equilibrium analysis of one applicant's game, as text and CSV.
#[derive(Debug, Clone)]
pub struct GameOutput {
    pub equilibria: Vec<(Action, Action)>,
    pub report_text: String,
    pub written: WrittenFiles,
}

pub fn cmd_game(
    p: Probability,
    params: &PolicyParams,
    out_dir: &Path,
) -> Result<GameOutput, ReportError> {
    use csvfmt::fmt_f64 as f;
    let matrix = build_payoff_matrix(p, params);
    let result = pure_nash(&matrix);
    let thresholds = competition_thresholds(params);

    let mut csv = String::from("row_action,col_action,row_payoff,col_payoff\n");
    for row in Action::ALL {
        for col in Action::ALL {
            let (rp, cp) = matrix.get(row, col);
            csv.push_str(&format!("{row},{col},{},{}\n", f(rp), f(cp)));
        }
    }

    let mut text = String::new();
    text.push_str(&format!(
        "competition game at p={} u={} m={}\n\n",
        f(p.value()),
        f(params.u()),
        f(params.m())
    ));
    text.push_str("payoff matrix (row payoff, col payoff):\n");
    text.push_str(&format!(
        "{:>10} | {:^16} | {:^16} | {:^16}\n",
        "", "accept", "recourse", "reject"
    ));
    for row in Action::ALL {
        text.push_str(&format!("{:>10} |", row.label()));
        for col in Action::ALL {
            let (rp, cp) = matrix.get(row, col);
            text.push_str(&format!(" {:>7}, {:<7} |", f(rp), f(cp)));
        }
        text.push('\n');
    }
    text.push_str("\ndominance elimination:\n");
    if result.elimination_trace.is_empty() {
        text.push_str("  (no strictly dominated actions)\n");
    }
    for step in &result.elimination_trace {
        text.push_str(&format!(
            "  {} player: {} eliminated (dominated by {})\n",
            step.player, step.eliminated, step.dominated_by
        ));
    }
    text.push_str("\npure Nash equilibria:\n");
    for (row, col) in &result.pure_equilibria {
        text.push_str(&format!("  ({row}, {col})\n"));
    }
    if result.indifference {
        text.push_str("  note: some equilibrium has a payoff-equal deviation\n");
    }
    text.push_str(&format!(
        "\ncompetition thresholds: reject below {}, accept above {}\n",
        f(thresholds.reject_threshold.value()),
        f(thresholds.accept_threshold.value())
    ));

    let mut written = WrittenFiles::default();
    let path = out_dir.join("game_matrix.csv");
    write_file(&path, &csv)?;
    written.add(path);
    let path = out_dir.join("game_report.txt");
    write_file(&path, &text)?;
    written.add(path);

    Ok(GameOutput {
        equilibria: result.pure_equilibria,
        report_text: text,
        written,
    })
}

/// Simulation artifacts for one parameter point.
#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub estimates: [(Action, SimEstimate); 3],
    pub verification: Option<VerificationReport>,
    pub written: WrittenFiles,
}

pub fn cmd_simulate(
    p: Probability,
    params: &PolicyParams,
    draws: u64,
    seed: u64,
    grid: Option<&[Probability]>,
    out_dir: &Path,
) -> Result<SimulateOutput, ReportError> {
    use csvfmt::fmt_f64 as f;
    if draws == 0 {
        return Err(ReportError::Validation("draws must be positive".into()));
    }
    let estimates = [
        Action::Accept,
        Action::Recourse,
        Action::Reject,
    ]
    .map(|action| {
        (
            action,
            simulate_action_payoff(p, params, action, draws, seed),
        )
    });

    let mut csv = String::from("action,mean,std_error,draws,analytic,abs_error\n");
    for (action, est) in &estimates {
        let analytic = crate::simulate::analytic_payoff(p, params, *action);
        csv.push_str(&format!(
            "{action},{},{},{},{},{}\n",
            f(est.mean),
            f(est.std_error),
            est.draws,
            f(analytic),
            f((est.mean - analytic).abs())
        ));
    }
    let mut written = WrittenFiles::default();
    let path = out_dir.join("simulate_payoffs.csv");
    write_file(&path, &csv)?;
    written.add(path);

    let verification = match grid {
        None => None,
        Some(grid) => {
            let report = verify_policy(grid, params, draws, seed);
            let mut csv = String::from(
                "p,analytic_action,simulated_action,agree,ambiguous,gap,combined_std_error\n",
            );
            for check in &report.checks {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    f(check.p.value()),
                    check.analytic,
                    check.simulated,
                    check.agree,
                    check.ambiguous,
                    f(check.gap),
                    f(check.combined_std_error)
                ));
            }
            let path = out_dir.join("simulate_policy.csv");
            write_file(&path, &csv)?;
            written.add(path);
            Some(report)
        }
    };

    Ok(SimulateOutput {
        estimates,
        verification,
        written,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::PolicyParams;

    fn params() -> PolicyParams {
        PolicyParams::new(0.5, 0.2).unwrap()
    }

    #[test]
    fn exit_codes_classify_errors() {
        let io = ReportError::Io {
            path: "x".into(),
            source: std::io::Error::other("nope"),
        };
        assert_eq!(io.exit_code(), 2);
        assert_eq!(ReportError::Validation("bad".into()).exit_code(), 1);
        let nc = ReportError::Train(TrainError::NonConverged {
            iterations: 5,
            gradient_norm: 1.0,
            tolerance: 1e-8,
        });
        assert_eq!(nc.exit_code(), 3);
        let staged = ReportError::Stage {
            stage: "train",
            source: Box::new(nc),
        };
        assert_eq!(staged.exit_code(), 3);
    }

    #[test]
    fn cmd_sweep_writes_requested_formats() {
        let dir = tempfile::tempdir().unwrap();
        let (_, written) = cmd_sweep(
            SweepMode::BandMagnitude,
            (0.0, 1.0),
            (0.0, 1.0),
            5,
            dir.path(),
            OutputFormat::Both,
        )
        .unwrap();
        assert_eq!(written.files.len(), 2);
        for path in &written.files {
            assert!(path.exists());
        }
        let (_, csv_only) = cmd_sweep(
            SweepMode::BandMagnitude,
            (0.0, 1.0),
            (0.0, 1.0),
            5,
            dir.path(),
            OutputFormat::Csv,
        )
        .unwrap();
        assert_eq!(csv_only.files.len(), 1);
    }

    #[test]
    fn cmd_classify_counts_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let probs_path = dir.path().join("probs.csv");
        std::fs::write(&probs_path, "probability\n0.1\n0.4\n0.9\n").unwrap();
        let out = cmd_classify(
            &probs_path,
            &params(),
            10,
            false,
            dir.path(),
            OutputFormat::Both,
        )
        .unwrap();
        assert_eq!(out.counts.total(), 3);
        assert_eq!(out.counts.recourse, 1);

        std::fs::write(&probs_path, "0.1\n7.0\n").unwrap();
        let err = cmd_classify(
            &probs_path,
            &params(),
            10,
            false,
            dir.path(),
            OutputFormat::Csv,
        )
        .unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn cmd_game_reports_equilibrium() {
        let dir = tempfile::tempdir().unwrap();
        let out = cmd_game(Probability::new(0.6).unwrap(), &params(), dir.path()).unwrap();
        assert_eq!(out.equilibria, vec![(Action::Accept, Action::Accept)]);
        assert!(out.report_text.contains("pure Nash equilibria"));
        assert_eq!(out.written.files.len(), 2);
    }

    #[test]
    fn cmd_simulate_writes_estimates() {
        let dir = tempfile::tempdir().unwrap();
        let grid = [Probability::new(0.1).unwrap(), Probability::new(0.9).unwrap()];
        let out = cmd_simulate(
            Probability::new(0.6).unwrap(),
            &params(),
            20_000,
            7,
            Some(&grid),
            dir.path(),
        )
        .unwrap();
        let report = out.verification.unwrap();
        assert_eq!(report.checks.len(), 2);
        assert_eq!(report.non_ambiguous_disagreements, 0);
        assert_eq!(out.written.files.len(), 2);
    }

    #[test]
    fn missing_input_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = cmd_ingest(&dir.path().join("absent.data"), &dir.path().join("out.csv"))
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
