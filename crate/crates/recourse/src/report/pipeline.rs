//! End-to-end pipeline: ingest, summarize, split, train, predict, classify,
//! sharpen. Every stage failure carries the stage name.

use std::path::{Path, PathBuf};

use crate::encode::Encoding;
use crate::german::{parse_german, summarize, SummaryStats};
use crate::logit::{
    calibration_report, classification_accuracy, sharpen, split, train_logit, LogitModel,
};
use crate::policy::{ActionCounts, Probability};

use super::csvfmt::fmt_f64;
use super::histogram::{before_after, region_histogram};
use super::{summary_csv, svg, OutputFormat, ReportError, RunConfig, WrittenFiles};

/// Everything the pipeline measured, for callers that want numbers rather
/// than files.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub summary: SummaryStats,
    pub train_size: usize,
    pub test_size: usize,
    pub model: LogitModel,
    pub test_probabilities: Vec<Probability>,
    pub test_accuracy: f64,
    /// Share of the majority class in the full dataset.
    pub majority_rate: f64,
    pub ece: f64,
    pub action_counts: ActionCounts,
    /// Recourse counts per sharpening exponent, in config order.
    pub sharpening: Vec<(f64, ActionCounts)>,
    pub written: WrittenFiles,
}

fn stage<T>(name: &'static str, result: Result<T, impl Into<ReportError>>) -> Result<T, ReportError> {
    result.map_err(|e| ReportError::Stage {
        stage: name,
        source: Box::new(e.into()),
    })
}

/// Run the whole pipeline on a raw data file, writing artifacts under
/// `out_dir`.
pub fn run_pipeline(
    raw_path: &Path,
    config: &RunConfig,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<PipelineReport, ReportError> {
    let mut written = WrittenFiles::default();
    let mut emit = |path: PathBuf, contents: &str, written: &mut WrittenFiles| {
        super::write_file(&path, contents)?;
        written.add(path);
        Ok::<(), ReportError>(())
    };

    // Ingest.
    let file = stage("ingest", super::open(raw_path))?;
    let records = stage("ingest", parse_german(file))?;

    // Summarize.
    let summary = stage("summarize", summarize(&records))?;
    emit(
        out_dir.join("summary_stats.csv"),
        &summary_csv(&summary),
        &mut written,
    )?;

    // Split; standardization statistics come from the training part only.
    let (train_raw, test_raw) = stage(
        "split",
        split(&records, config.train_fraction, config.seed),
    )?;
    let encoding = stage("encode", Encoding::fit(&train_raw))?;
    let train = encoding.encode(&train_raw);
    let test = encoding.encode(&test_raw);

    // Train.
    let model = stage("train", train_logit(&encoding, &train, &config.train_config()))?;
    let model_path = out_dir.join("model.txt");
    stage("train", model.save(&model_path))?;
    written.add(model_path);

    // Predict.
    let probs = stage("predict", model.predict_all(&encoding, &test))?;
    let labels: Vec<i8> = test.iter().map(|r| r.label).collect();
    let mut probs_csv = String::from("probability\n");
    for p in &probs {
        probs_csv.push_str(&fmt_f64(p.value()));
        probs_csv.push('\n');
    }
    emit(
        out_dir.join("test_probabilities.csv"),
        &probs_csv,
        &mut written,
    )?;

    let test_accuracy = classification_accuracy(&probs, &labels);
    let good = records
        .iter()
        .filter(|r| r.label == crate::german::CreditLabel::Good)
        .count();
    let majority_rate = good.max(records.len() - good) as f64 / records.len() as f64;
    let calibration = stage(
        "predict",
        calibration_report(&probs, &labels, config.calibration_bins),
    )?;
    let mut calib_csv = String::from("bin,mean_predicted,positive_rate,count\n");
    for (i, bin) in calibration.bins.iter().enumerate() {
        calib_csv.push_str(&format!(
            "{i},{},{},{}\n",
            fmt_f64(bin.mean_predicted),
            fmt_f64(bin.positive_rate),
            bin.count
        ));
    }
    emit(out_dir.join("calibration.csv"), &calib_csv, &mut written)?;

    if format.wants_svg() {
        emit(
            out_dir.join("probability_histogram.svg"),
            &svg::probability_histogram_svg(
                &probs,
                config.histogram_bins,
                "test-set predicted probabilities",
            ),
            &mut written,
        )?;
    }

    // Classify.
    let params = stage("classify", config.policy())?;
    let hist = stage(
        "classify",
        region_histogram(&probs, &params, config.histogram_bins, false),
    )?;
    emit(out_dir.join("action_regions.csv"), &hist.to_csv(), &mut written)?;
    let comparison = stage(
        "classify",
        before_after(&probs, &params, config.histogram_bins, false),
    )?;
    emit(
        out_dir.join("before_after.csv"),
        &comparison.to_csv(),
        &mut written,
    )?;
    if format.wants_svg() {
        emit(
            out_dir.join("action_regions.svg"),
            &svg::region_histogram_svg(&hist, "actions by predicted probability"),
            &mut written,
        )?;
        emit(
            out_dir.join("before_after.svg"),
            &svg::before_after_svg(&comparison, "impact of introducing recourse"),
            &mut written,
        )?;
    }

    // Sharpening series: same decision rule, increasingly confident model.
    let mut sharpening = Vec::new();
    let mut sharpen_csv = String::from("beta,reject,recourse,accept\n");
    for &beta in &config.betas {
        let sharpened = stage("sharpen", sharpen(&probs, beta))?;
        let hist = stage(
            "sharpen",
            region_histogram(&sharpened, &params, config.histogram_bins, false),
        )?;
        sharpen_csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(beta),
            hist.totals.reject,
            hist.totals.recourse,
            hist.totals.accept
        ));
        if format.wants_svg() {
            emit(
                out_dir.join(format!("sharpening_beta_{}.svg", fmt_f64(beta))),
                &svg::region_histogram_svg(
                    &hist,
                    &format!("actions with confidence sharpened by beta = {}", fmt_f64(beta)),
                ),
                &mut written,
            )?;
        }
        sharpening.push((beta, hist.totals));
    }
    emit(
        out_dir.join("sharpening_counts.csv"),
        &sharpen_csv,
        &mut written,
    )?;

    Ok(PipelineReport {
        summary,
        train_size: train.len(),
        test_size: test.len(),
        model,
        test_probabilities: probs,
        test_accuracy,
        majority_rate,
        ece: calibration.ece,
        action_counts: hist.totals,
        sharpening,
        written,
    })
}
