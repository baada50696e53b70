//! Logistic profitability model: deterministic train/test split, full-batch
//! Newton fitting of an L2-penalized logit, calibration reporting, and the
//! confidence-sharpening transform.

use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::encode::{EncodedRecord, Encoding};
use crate::policy::Probability;

/// Training hyperparameters. The split fraction and seed live here too so a
/// single value pins the whole fitting pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub max_iterations: usize,
    /// Convergence tolerance on the Euclidean norm of the penalized gradient.
    pub tolerance: f64,
    /// Per-sample L2 penalty on the weights (the intercept is unpenalized).
    pub l2_penalty: f64,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_iterations: 100,
            tolerance: 1e-8,
            l2_penalty: 1e-4,
            seed: 17,
            train_fraction: 0.75,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.max_iterations == 0 {
            return Err(TrainError::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(TrainError::InvalidConfig(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if !(self.l2_penalty.is_finite() && self.l2_penalty >= 0.0) {
            return Err(TrainError::InvalidConfig(format!(
                "l2_penalty must be >= 0, got {}",
                self.l2_penalty
            )));
        }
        if !(self.train_fraction.is_finite()
            && self.train_fraction > 0.0
            && self.train_fraction < 1.0)
        {
            return Err(TrainError::InvalidFraction(self.train_fraction));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("dataset too small to split (need at least 2 records, got {0})")]
    TooSmall(usize),
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set contains a single class only")]
    SingleClass,
    #[error("training set contains non-finite feature values")]
    NonFiniteFeature,
    #[error("record has {got} features but the encoding declares {want}")]
    WidthMismatch { got: usize, want: usize },
    #[error("Newton step failed: Hessian is not positive definite")]
    SingularHessian,
    #[error("did not converge after {iterations} iterations (gradient norm {gradient_norm:e} >= tolerance {tolerance:e})")]
    NonConverged {
        iterations: usize,
        gradient_norm: f64,
        tolerance: f64,
    },
}

/// Deterministic shuffle-and-split: Fisher-Yates driven by a ChaCha8 stream
/// seeded from `seed`, then a cut at `floor(n * fraction)`. The two parts are
/// disjoint and exhaustive.
pub fn split<T: Clone>(
    records: &[T],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>), TrainError> {
    if !(fraction.is_finite() && fraction > 0.0 && fraction < 1.0) {
        return Err(TrainError::InvalidFraction(fraction));
    }
    if records.len() < 2 {
        return Err(TrainError::TooSmall(records.len()));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..order.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    let cut = (records.len() as f64 * fraction).floor() as usize;
    let train = order[..cut].iter().map(|&i| records[i].clone()).collect();
    let test = order[cut..].iter().map(|&i| records[i].clone()).collect();
    Ok((train, test))
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`] on (0, 1).
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Fitting diagnostics carried by a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingInfo {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub l2_penalty: f64,
    pub train_size: usize,
}

/// A fitted logit model tied to the encoding that produced its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitModel {
    weights: Vec<f64>,
    intercept: f64,
    fingerprint: u64,
    feature_names: Vec<String>,
    pub training: TrainingInfo,
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("record has {got} features but the model expects {want}")]
    WidthMismatch { got: usize, want: usize },
    #[error("encoding fingerprint {got:#018x} does not match the model's {want:#018x}")]
    EncodingMismatch { got: u64, want: u64 },
    #[error("probabilities and labels differ in length ({probs} vs {labels})")]
    LengthMismatch { probs: usize, labels: usize },
    #[error("calibration needs at least one bin")]
    NoBins,
    #[error("sharpening exponent must be >= 1, got {0}")]
    BetaBelowOne(f64),
}

/// Maximize the L2-penalized log-likelihood by damped full-batch Newton
/// iteration. Deterministic given the input order; terminates when the
/// penalized gradient norm drops below the tolerance, and reports
/// non-convergence explicitly otherwise.
pub fn train_logit(
    encoding: &Encoding,
    records: &[EncodedRecord],
    config: &TrainConfig,
) -> Result<LogitModel, TrainError> {
    config.validate()?;
    if records.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    let width = encoding.width();
    for r in records {
        if r.features.len() != width {
            return Err(TrainError::WidthMismatch {
                got: r.features.len(),
                want: width,
            });
        }
        if r.features.iter().any(|v| !v.is_finite()) {
            return Err(TrainError::NonFiniteFeature);
        }
    }
    if records.iter().all(|r| r.label > 0) || records.iter().all(|r| r.label < 0) {
        return Err(TrainError::SingleClass);
    }

    let n = records.len();
    let dim = width + 1; // intercept first, then weights
    let lambda = config.l2_penalty;
    let mut beta = DVector::<f64>::zeros(dim);

    let margin = |beta: &DVector<f64>, r: &EncodedRecord| -> f64 {
        let mut z = beta[0];
        for (w, x) in beta.as_slice()[1..].iter().zip(&r.features) {
            z += w * x;
        }
        z
    };
    let objective = |beta: &DVector<f64>| -> f64 {
        let mut loss = 0.0;
        for r in records {
            let yz = f64::from(r.label) * margin(beta, r);
            // ln(1 + exp(-yz)), stable for large |yz|
            loss += if yz > 0.0 {
                (-yz).exp().ln_1p()
            } else {
                -yz + yz.exp().ln_1p()
            };
        }
        let penalty: f64 = beta.as_slice()[1..].iter().map(|w| w * w).sum();
        loss / n as f64 + 0.5 * lambda * penalty
    };

    let mut iterations = 0;
    loop {
        // Penalized gradient.
        let mut grad = DVector::<f64>::zeros(dim);
        for r in records {
            let y = f64::from(r.label);
            let coeff = -y * sigmoid(-y * margin(&beta, r)) / n as f64;
            grad[0] += coeff;
            for (g, x) in grad.as_mut_slice()[1..].iter_mut().zip(&r.features) {
                *g += coeff * x;
            }
        }
        for (g, w) in grad.as_mut_slice()[1..]
            .iter_mut()
            .zip(&beta.as_slice()[1..].to_vec())
        {
            *g += lambda * w;
        }
        let gradient_norm = grad.norm();
        if gradient_norm < config.tolerance {
            let (intercept, weights) = (beta[0], beta.as_slice()[1..].to_vec());
            return Ok(LogitModel {
                weights,
                intercept,
                fingerprint: encoding.fingerprint(),
                feature_names: encoding.column_names(),
                training: TrainingInfo {
                    iterations,
                    gradient_norm,
                    l2_penalty: lambda,
                    train_size: n,
                },
            });
        }
        if iterations >= config.max_iterations {
            return Err(TrainError::NonConverged {
                iterations,
                gradient_norm,
                tolerance: config.tolerance,
            });
        }

        // Penalized Hessian.
        let mut hessian = DMatrix::<f64>::zeros(dim, dim);
        for r in records {
            let z = margin(&beta, r);
            let s = sigmoid(z) * sigmoid(-z) / n as f64;
            let mut x = Vec::with_capacity(dim);
            x.push(1.0);
            x.extend_from_slice(&r.features);
            for i in 0..dim {
                if x[i] == 0.0 {
                    continue;
                }
                let sx = s * x[i];
                for j in i..dim {
                    hessian[(i, j)] += sx * x[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                hessian[(i, j)] = hessian[(j, i)];
            }
            if i > 0 {
                hessian[(i, i)] += lambda;
            }
        }

        let step = Cholesky::new(hessian)
            .ok_or(TrainError::SingularHessian)?
            .solve(&(-&grad));

        // Damped update: halve the step while it fails to improve.
        let current = objective(&beta);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = &beta + t * &step;
            if objective(&candidate) <= current {
                beta = candidate;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No improving step length: treat as converged-as-far-as-possible
            // and let the gradient check on the next pass decide.
            return Err(TrainError::NonConverged {
                iterations: iterations + 1,
                gradient_norm,
                tolerance: config.tolerance,
            });
        }
        iterations += 1;
    }
}

impl LogitModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// sigmoid(w . x + b); always strictly inside (0, 1).
    pub fn predict_proba(&self, record: &EncodedRecord) -> Result<Probability, PredictError> {
        if record.features.len() != self.weights.len() {
            return Err(PredictError::WidthMismatch {
                got: record.features.len(),
                want: self.weights.len(),
            });
        }
        let z: f64 = self.intercept
            + self
                .weights
                .iter()
                .zip(&record.features)
                .map(|(w, x)| w * x)
                .sum::<f64>();
        Ok(Probability::new(sigmoid(z)).expect("sigmoid output in range"))
    }

    /// Predict a whole dataset after checking the encoding fingerprint.
    pub fn predict_all(
        &self,
        encoding: &Encoding,
        records: &[EncodedRecord],
    ) -> Result<Vec<Probability>, PredictError> {
        if encoding.fingerprint() != self.fingerprint {
            return Err(PredictError::EncodingMismatch {
                got: encoding.fingerprint(),
                want: self.fingerprint,
            });
        }
        records.iter().map(|r| self.predict_proba(r)).collect()
    }
}

/// Share of records whose thresholded prediction (p > 1/2) matches the label.
pub fn classification_accuracy(probs: &[Probability], labels: &[i8]) -> f64 {
    assert_eq!(probs.len(), labels.len());
    if probs.is_empty() {
        return 0.0;
    }
    let hits = probs
        .iter()
        .zip(labels)
        .filter(|(p, &l)| (p.value() > 0.5) == (l > 0))
        .count();
    hits as f64 / probs.len() as f64
}

/// One calibration bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationBin {
    pub mean_predicted: f64,
    pub positive_rate: f64,
    pub count: usize,
}

/// Equal-width-bin calibration summary with the expected calibration error.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub bins: Vec<CalibrationBin>,
    pub ece: f64,
}

/// Bin predictions into `n_bins` equal-width bins on [0, 1] and compare each
/// bin's mean prediction with its empirical positive rate. The expected
/// calibration error is the count-weighted mean absolute gap.
pub fn calibration_report(
    probs: &[Probability],
    labels: &[i8],
    n_bins: usize,
) -> Result<CalibrationReport, PredictError> {
    if n_bins == 0 {
        return Err(PredictError::NoBins);
    }
    if probs.len() != labels.len() {
        return Err(PredictError::LengthMismatch {
            probs: probs.len(),
            labels: labels.len(),
        });
    }
    let mut sums = vec![(0.0f64, 0usize, 0usize); n_bins]; // (sum p, positives, count)
    for (p, &l) in probs.iter().zip(labels) {
        let mut bin = (p.value() * n_bins as f64) as usize;
        if bin == n_bins {
            bin -= 1; // p = 1.0 joins the top bin
        }
        sums[bin].0 += p.value();
        if l > 0 {
            sums[bin].1 += 1;
        }
        sums[bin].2 += 1;
    }
    let total = probs.len();
    let mut bins = Vec::with_capacity(n_bins);
    let mut ece = 0.0;
    for (sum_p, positives, count) in sums {
        if count == 0 {
            bins.push(CalibrationBin {
                mean_predicted: 0.0,
                positive_rate: 0.0,
                count: 0,
            });
            continue;
        }
        let mean_predicted = sum_p / count as f64;
        let positive_rate = positives as f64 / count as f64;
        ece += (count as f64 / total as f64) * (mean_predicted - positive_rate).abs();
        bins.push(CalibrationBin {
            mean_predicted,
            positive_rate,
            count,
        });
    }
    Ok(CalibrationReport { bins, ece })
}

/// Temperature-sharpen one probability: `sigmoid(beta * logit(p))`. The
/// endpoints map to themselves, 1/2 is a fixed point, and order is preserved.
pub fn sharpen_one(p: Probability, beta: f64) -> Result<Probability, PredictError> {
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(PredictError::BetaBelowOne(beta));
    }
    let v = p.value();
    if v == 0.0 || v == 1.0 {
        return Ok(p);
    }
    Ok(Probability::new(sigmoid(beta * logit(v))).expect("sigmoid output in range"))
}

/// Sharpen a whole population; models the predictor growing more confident
/// while the decision rule stays fixed.
pub fn sharpen(probs: &[Probability], beta: f64) -> Result<Vec<Probability>, PredictError> {
    probs.iter().map(|&p| sharpen_one(p, beta)).collect()
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("line {line}: expected key=value")]
    Malformed { line: usize },
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("line {line}: could not parse value for {key:?}")]
    BadValue { line: usize, key: String },
    #[error("unsupported model format {0:?}")]
    BadFormat(String),
    #[error("failed to read or write model file")]
    Io(#[from] std::io::Error),
}

const MODEL_FORMAT: &str = "recourse-logit-v1";

impl LogitModel {
    /// Serialize as a plain-text key=value document. Floats use Rust's
    /// shortest round-trip formatting, so parsing back is bit-exact.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("format={MODEL_FORMAT}\n"));
        out.push_str(&format!("fingerprint={}\n", self.fingerprint));
        out.push_str(&format!("train_size={}\n", self.training.train_size));
        out.push_str(&format!("iterations={}\n", self.training.iterations));
        out.push_str(&format!("gradient_norm={}\n", self.training.gradient_norm));
        out.push_str(&format!("l2_penalty={}\n", self.training.l2_penalty));
        out.push_str(&format!("intercept={}\n", self.intercept));
        for (name, w) in self.feature_names.iter().zip(&self.weights) {
            out.push_str(&format!("weight.{name}={w}\n"));
        }
        out
    }

    pub fn from_key_value(text: &str) -> Result<LogitModel, ModelIoError> {
        let mut format = None;
        let mut fingerprint = None;
        let mut train_size = None;
        let mut iterations = None;
        let mut gradient_norm = None;
        let mut l2_penalty = None;
        let mut intercept = None;
        let mut feature_names = Vec::new();
        let mut weights = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let (key, value) = raw
                .split_once('=')
                .ok_or(ModelIoError::Malformed { line })?;
            let bad = || ModelIoError::BadValue {
                line,
                key: key.to_string(),
            };
            match key {
                "format" => format = Some(value.to_string()),
                "fingerprint" => fingerprint = Some(value.parse().map_err(|_| bad())?),
                "train_size" => train_size = Some(value.parse().map_err(|_| bad())?),
                "iterations" => iterations = Some(value.parse().map_err(|_| bad())?),
                "gradient_norm" => gradient_norm = Some(value.parse().map_err(|_| bad())?),
                "l2_penalty" => l2_penalty = Some(value.parse().map_err(|_| bad())?),
                "intercept" => intercept = Some(value.parse().map_err(|_| bad())?),
                _ => match key.strip_prefix("weight.") {
                    Some(name) => {
                        feature_names.push(name.to_string());
                        weights.push(value.parse().map_err(|_| bad())?);
                    }
                    None => return Err(ModelIoError::Malformed { line }),
                },
            }
        }

        let format = format.ok_or(ModelIoError::MissingKey("format"))?;
        if format != MODEL_FORMAT {
            return Err(ModelIoError::BadFormat(format));
        }
        Ok(LogitModel {
            weights,
            intercept: intercept.ok_or(ModelIoError::MissingKey("intercept"))?,
            fingerprint: fingerprint.ok_or(ModelIoError::MissingKey("fingerprint"))?,
            feature_names,
            training: TrainingInfo {
                iterations: iterations.ok_or(ModelIoError::MissingKey("iterations"))?,
                gradient_norm: gradient_norm.ok_or(ModelIoError::MissingKey("gradient_norm"))?,
                l2_penalty: l2_penalty.ok_or(ModelIoError::MissingKey("l2_penalty"))?,
                train_size: train_size.ok_or(ModelIoError::MissingKey("train_size"))?,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelIoError> {
        std::fs::write(path, self.to_key_value())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<LogitModel, ModelIoError> {
        LogitModel::from_key_value(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    /// Hand-rolled two-feature encoding stand-in for unit tests.
    fn toy_encoding() -> Encoding {
        // Fit on two synthetic raw records is overkill here; instead reuse the
        // real schema with a tiny slice of the canonical file.
        let lines = "\
A11 6 A34 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1
A12 48 A32 A43 5951 A61 A73 2 A92 A101 2 A121 22 A143 A152 1 A173 1 A191 A201 2";
        let records = crate::german::parse_german(lines.as_bytes()).unwrap();
        Encoding::fit(&records).unwrap()
    }

    fn toy_records(encoding: &Encoding) -> Vec<EncodedRecord> {
        let lines = "\
A11 6 A34 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1
A12 48 A32 A43 5951 A61 A73 2 A92 A101 2 A121 22 A143 A152 1 A173 1 A191 A201 2";
        let records = crate::german::parse_german(lines.as_bytes()).unwrap();
        encoding.encode(&records)
    }

    #[test]
    fn split_sizes_and_determinism() {
        let records: Vec<u32> = (0..1000).collect();
        let (train, test) = split(&records, 0.75, 7).unwrap();
        assert_eq!(train.len(), 750);
        assert_eq!(test.len(), 250);
        let (train2, test2) = split(&records, 0.75, 7).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
        // Disjoint and exhaustive.
        let mut all: Vec<u32> = train.iter().chain(test.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, records);
    }

    #[test]
    fn split_small_and_invalid_inputs() {
        let records: Vec<u32> = (0..4).collect();
        let (train, test) = split(&records, 0.5, 3).unwrap();
        assert_eq!((train.len(), test.len()), (2, 2));
        assert!(matches!(split(&[1u32], 0.5, 3), Err(TrainError::TooSmall(1))));
        assert!(matches!(
            split(&records, 1.0, 3),
            Err(TrainError::InvalidFraction(_))
        ));
    }

    #[test]
    fn separable_toy_set_trains_to_perfect_accuracy() {
        let encoding = toy_encoding();
        let records = toy_records(&encoding);
        let model = train_logit(&encoding, &records, &TrainConfig::default()).unwrap();
        assert!(model.training.gradient_norm < 1e-8);
        let probs: Vec<Probability> = records
            .iter()
            .map(|r| model.predict_proba(r).unwrap())
            .collect();
        let labels: Vec<i8> = records.iter().map(|r| r.label).collect();
        assert_eq!(classification_accuracy(&probs, &labels), 1.0);
        for w in model.weights() {
            assert!(w.is_finite());
        }
    }

    #[test]
    fn single_class_training_set_is_rejected() {
        let encoding = toy_encoding();
        let mut records = toy_records(&encoding);
        records[1].label = 1;
        assert!(matches!(
            train_logit(&encoding, &records, &TrainConfig::default()),
            Err(TrainError::SingleClass)
        ));
    }

    #[test]
    fn non_finite_features_are_rejected() {
        let encoding = toy_encoding();
        let mut records = toy_records(&encoding);
        records[0].features[3] = f64::NAN;
        assert!(matches!(
            train_logit(&encoding, &records, &TrainConfig::default()),
            Err(TrainError::NonFiniteFeature)
        ));
    }

    #[test]
    fn zero_model_predicts_one_half() {
        let encoding = toy_encoding();
        let records = toy_records(&encoding);
        let model = LogitModel {
            weights: vec![0.0; encoding.width()],
            intercept: 0.0,
            fingerprint: encoding.fingerprint(),
            feature_names: encoding.column_names(),
            training: TrainingInfo {
                iterations: 0,
                gradient_norm: 0.0,
                l2_penalty: 0.0,
                train_size: 0,
            },
        };
        assert_eq!(model.predict_proba(&records[0]).unwrap().value(), 0.5);
    }

    #[test]
    fn prediction_rejects_width_mismatch() {
        let encoding = toy_encoding();
        let records = toy_records(&encoding);
        let model = train_logit(&encoding, &records, &TrainConfig::default()).unwrap();
        let short = EncodedRecord {
            features: vec![0.0; 3],
            label: 1,
        };
        assert!(matches!(
            model.predict_proba(&short),
            Err(PredictError::WidthMismatch { got: 3, .. })
        ));
    }

    #[test]
    fn mirrored_records_have_complementary_probabilities() {
        let encoding = toy_encoding();
        let records = toy_records(&encoding);
        let mut model = train_logit(&encoding, &records, &TrainConfig::default()).unwrap();
        model.intercept = 0.0;
        let mirrored = EncodedRecord {
            features: records[0].features.iter().map(|v| -v).collect(),
            label: -1,
        };
        let a = model.predict_proba(&records[0]).unwrap().value();
        let b = model.predict_proba(&mirrored).unwrap().value();
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        // Random small instance with a fixed seed.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut uniform = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let n = 20;
        let d = 3;
        let records: Vec<EncodedRecord> = (0..n)
            .map(|_| {
                let features: Vec<f64> = (0..d).map(|_| uniform() * 2.0 - 1.0).collect();
                let label = if uniform() > 0.5 { 1 } else { -1 };
                EncodedRecord { features, label }
            })
            .collect();
        let lambda = 1e-3;
        let beta: Vec<f64> = (0..=d).map(|_| uniform() - 0.5).collect();

        let objective = |beta: &[f64]| -> f64 {
            let mut loss = 0.0;
            for r in &records {
                let z: f64 = beta[0]
                    + beta[1..]
                        .iter()
                        .zip(&r.features)
                        .map(|(w, x)| w * x)
                        .sum::<f64>();
                let yz = f64::from(r.label) * z;
                loss += if yz > 0.0 {
                    (-yz).exp().ln_1p()
                } else {
                    -yz + yz.exp().ln_1p()
                };
            }
            loss / n as f64 + 0.5 * lambda * beta[1..].iter().map(|w| w * w).sum::<f64>()
        };

        // Analytic gradient, same formula train_logit uses.
        let mut grad = vec![0.0; d + 1];
        for r in &records {
            let z: f64 = beta[0]
                + beta[1..]
                    .iter()
                    .zip(&r.features)
                    .map(|(w, x)| w * x)
                    .sum::<f64>();
            let y = f64::from(r.label);
            let coeff = -y * sigmoid(-y * z) / n as f64;
            grad[0] += coeff;
            for (g, x) in grad[1..].iter_mut().zip(&r.features) {
                *g += coeff * x;
            }
        }
        for (g, w) in grad[1..].iter_mut().zip(&beta[1..].to_vec()) {
            *g += lambda * w;
        }

        let h = 1e-6;
        for k in 0..=d {
            let mut plus = beta.clone();
            let mut minus = beta.clone();
            plus[k] += h;
            minus[k] -= h;
            let fd = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let denom = fd.abs().max(1e-8);
            assert!(
                ((grad[k] - fd) / denom).abs() < 1e-5,
                "component {k}: analytic {} vs fd {}",
                grad[k],
                fd
            );
        }
    }

    #[test]
    fn calibration_edge_cases() {
        let half = vec![p(0.5); 4];
        let labels = vec![1, -1, 1, -1];
        let report = calibration_report(&half, &labels, 10).unwrap();
        assert_eq!(report.ece, 0.0);

        let ones = vec![p(1.0); 3];
        let neg = vec![-1, -1, -1];
        let report = calibration_report(&ones, &neg, 10).unwrap();
        assert_eq!(report.ece, 1.0);

        let exact = vec![p(0.0), p(1.0)];
        let labels = vec![-1, 1];
        let report = calibration_report(&exact, &labels, 10).unwrap();
        assert_eq!(report.ece, 0.0);
        assert_eq!(report.bins.iter().map(|b| b.count).sum::<usize>(), 2);
    }

    #[test]
    fn calibration_rejects_bad_inputs() {
        assert!(matches!(
            calibration_report(&[p(0.5)], &[1, -1], 10),
            Err(PredictError::LengthMismatch { .. })
        ));
        assert!(matches!(
            calibration_report(&[p(0.5)], &[1], 0),
            Err(PredictError::NoBins)
        ));
    }

    #[test]
    fn sharpen_examples() {
        let probs = vec![p(0.2), p(0.5), p(sigmoid(1.0))];
        let out = sharpen(&probs, 1.0).unwrap();
        for (a, b) in probs.iter().zip(&out) {
            assert!((a.value() - b.value()).abs() < 1e-15);
        }
        let out = sharpen(&probs, 2.0).unwrap();
        assert_eq!(out[1].value(), 0.5);
        assert!((out[2].value() - sigmoid(2.0)).abs() < 1e-12);
        assert!(matches!(
            sharpen(&probs, 0.5),
            Err(PredictError::BetaBelowOne(_))
        ));
        assert_eq!(sharpen_one(p(0.0), 4.0).unwrap().value(), 0.0);
        assert_eq!(sharpen_one(p(1.0), 4.0).unwrap().value(), 1.0);
    }

    #[test]
    fn model_round_trips_bit_exactly() {
        let encoding = toy_encoding();
        let records = toy_records(&encoding);
        let model = train_logit(&encoding, &records, &TrainConfig::default()).unwrap();
        let text = model.to_key_value();
        let back = LogitModel::from_key_value(&text).unwrap();
        assert_eq!(model, back);
        assert_eq!(back.to_key_value(), text);
    }

    #[test]
    fn model_parse_reports_bad_lines() {
        assert!(matches!(
            LogitModel::from_key_value("format=recourse-logit-v1\nnota-kv-line\n"),
            Err(ModelIoError::Malformed { line: 2 })
        ));
        assert!(matches!(
            LogitModel::from_key_value("format=other-v9\n"),
            Err(ModelIoError::BadFormat(_))
        ));
        assert!(matches!(
            LogitModel::from_key_value(""),
            Err(ModelIoError::MissingKey("format"))
        ));
    }

    proptest! {
        #[test]
        fn sharpen_preserves_order_and_fixed_point(
            a in 0.001..0.999f64, b in 0.001..0.999f64, beta in 1.0..16.0f64
        ) {
            let sa = sharpen_one(p(a), beta).unwrap().value();
            let sb = sharpen_one(p(b), beta).unwrap().value();
            match a.partial_cmp(&b).unwrap() {
                std::cmp::Ordering::Less => prop_assert!(sa < sb),
                std::cmp::Ordering::Equal => prop_assert_eq!(sa, sb),
                std::cmp::Ordering::Greater => prop_assert!(sa > sb),
            }
            prop_assert_eq!(sharpen_one(p(0.5), beta).unwrap().value(), 0.5);
        }

        #[test]
        fn sharpen_band_exits_are_permanent(
            probs in proptest::collection::vec(0.001..0.999f64, 1..40),
            beta1 in 1.0..8.0f64,
            extra in 0.0..8.0f64,
        ) {
            let beta2 = beta1 + extra;
            let band = |values: &[Probability]| {
                values.iter().filter(|q| 0.3 < q.value() && q.value() < 0.6).count()
            };
            let population: Vec<Probability> = probs.iter().map(|&v| p(v)).collect();
            let first = sharpen(&population, beta1).unwrap();
            let second = sharpen(&population, beta2).unwrap();
            prop_assert!(band(&second) <= band(&first));
        }
    }
}
