//! Feature encoding of parsed records for the probability model.
//!
//! Column layout, in raw attribute order: each integer attribute becomes one
//! standardized column ((value - mean) / sd, statistics taken from the
//! records the encoding was fitted on); each categorical attribute becomes
//! one indicator column per code except the first, which serves as the
//! reference level. Labels map good -> +1, bad -> -1.

use crate::german::{AttrKind, DataError, RawRecord, SCHEMA};

/// One encoded column.
#[derive(Debug, Clone, PartialEq)]
enum Column {
    Standardized { attr: usize, mean: f64, sd: f64 },
    Indicator { attr: usize, level: usize },
}

impl Column {
    fn name(&self) -> String {
        match *self {
            Column::Standardized { attr, .. } => SCHEMA[attr].name.to_string(),
            Column::Indicator { attr, level } => match SCHEMA[attr].kind {
                AttrKind::Categorical(codes) => {
                    format!("{}_{}", SCHEMA[attr].name, codes[level])
                }
                AttrKind::Integer { .. } => unreachable!("indicator on integer attribute"),
            },
        }
    }

    fn value(&self, record: &RawRecord) -> f64 {
        match *self {
            Column::Standardized { attr, mean, sd } => {
                if sd > 0.0 {
                    (record.numeric(attr) as f64 - mean) / sd
                } else {
                    0.0
                }
            }
            Column::Indicator { attr, level } => {
                if record.level(attr) == level {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// A fitted feature encoding. Encoding is a pure function of the fitted
/// statistics and the schema; identical inputs produce bit-identical output.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    columns: Vec<Column>,
    fingerprint: u64,
}

/// One encoded application: the feature vector plus the signed label.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedRecord {
    pub features: Vec<f64>,
    /// +1 for a profitable (good) applicant, -1 for an unprofitable one.
    pub label: i8,
}

impl Encoding {
    /// Fit standardization statistics on `records` (the training split in the
    /// full pipeline, to keep test data out of the statistics).
    pub fn fit(records: &[RawRecord]) -> Result<Encoding, DataError> {
        if records.is_empty() {
            return Err(DataError::Empty);
        }
        let n = records.len() as f64;
        let mut columns = Vec::new();
        for (attr, spec) in SCHEMA.iter().enumerate() {
            match spec.kind {
                AttrKind::Integer { .. } => {
                    let mean =
                        records.iter().map(|r| r.numeric(attr) as f64).sum::<f64>() / n;
                    let sd = if records.len() >= 2 {
                        (records
                            .iter()
                            .map(|r| (r.numeric(attr) as f64 - mean).powi(2))
                            .sum::<f64>()
                            / (n - 1.0))
                            .sqrt()
                    } else {
                        0.0
                    };
                    columns.push(Column::Standardized { attr, mean, sd });
                }
                AttrKind::Categorical(codes) => {
                    for level in 1..codes.len() {
                        columns.push(Column::Indicator { attr, level });
                    }
                }
            }
        }
        let fingerprint = fingerprint(&columns);
        Ok(Encoding {
            columns,
            fingerprint,
        })
    }

    /// Number of feature columns.
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// Identifier tying models to the encoding that produced their inputs.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(Column::name).collect()
    }

    pub fn encode_one(&self, record: &RawRecord) -> EncodedRecord {
        EncodedRecord {
            features: self.columns.iter().map(|c| c.value(record)).collect(),
            label: record.label.signed(),
        }
    }

    pub fn encode(&self, records: &[RawRecord]) -> Vec<EncodedRecord> {
        records.iter().map(|r| self.encode_one(r)).collect()
    }

    /// The encoded dataset as CSV: header row, one row per record, label in
    /// the final column, LF line endings.
    pub fn to_csv(&self, records: &[RawRecord]) -> String {
        let mut out = String::new();
        let names = self.column_names();
        out.push_str(&names.join(","));
        out.push_str(",label\n");
        for record in records {
            let encoded = self.encode_one(record);
            for value in &encoded.features {
                out.push_str(&crate::report::csvfmt::fmt_f64(*value));
                out.push(',');
            }
            out.push_str(&encoded.label.to_string());
            out.push('\n');
        }
        out
    }
}

/// FNV-1a over the column names and the bit patterns of the fitted
/// statistics.
fn fingerprint(columns: &[Column]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(PRIME);
        }
    };
    for column in columns {
        eat(column.name().as_bytes());
        eat(&[0]);
        if let Column::Standardized { mean, sd, .. } = column {
            eat(&mean.to_bits().to_le_bytes());
            eat(&sd.to_bits().to_le_bytes());
        }
    }
    hash
}

/// Labels as the encoded dataset uses them; convenience for callers holding
/// raw records.
pub fn signed_labels(records: &[RawRecord]) -> Vec<i8> {
    records.iter().map(|r| r.label.signed()).collect()
}

pub use crate::german::CreditLabel as Label;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::german::parse_german;

    const LINES: &str = "\
A11 6 A34 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1
A12 48 A32 A43 5951 A61 A73 2 A92 A101 2 A121 22 A143 A152 1 A173 1 A191 A201 2
A14 12 A34 A46 2096 A61 A74 2 A93 A101 3 A121 49 A143 A152 1 A172 2 A191 A201 1";

    fn records() -> Vec<RawRecord> {
        parse_german(LINES.as_bytes()).unwrap()
    }

    #[test]
    fn width_matches_schema() {
        let enc = Encoding::fit(&records()).unwrap();
        // 7 integer attributes + sum over categorical attributes of (codes - 1).
        let expected: usize = SCHEMA
            .iter()
            .map(|s| match s.kind {
                AttrKind::Integer { .. } => 1,
                AttrKind::Categorical(codes) => codes.len() - 1,
            })
            .sum();
        assert_eq!(enc.width(), expected);
        assert_eq!(enc.width(), 50);
        assert_eq!(enc.column_names().len(), enc.width());
        for r in enc.encode(&records()) {
            assert_eq!(r.features.len(), enc.width());
        }
    }

    #[test]
    fn labels_map_to_signs() {
        let enc = Encoding::fit(&records()).unwrap();
        let encoded = enc.encode(&records());
        assert_eq!(encoded[0].label, 1);
        assert_eq!(encoded[1].label, -1);
        assert_eq!(encoded[2].label, 1);
    }

    #[test]
    fn indicator_columns_are_zero_or_one() {
        let enc = Encoding::fit(&records()).unwrap();
        let names = enc.column_names();
        let telephone_col = names.iter().position(|n| n == "telephone_A192").unwrap();
        let encoded = enc.encode(&records());
        assert_eq!(encoded[0].features[telephone_col], 1.0);
        assert_eq!(encoded[1].features[telephone_col], 0.0);
    }

    #[test]
    fn standardized_columns_have_unit_scale_on_fit_data() {
        let enc = Encoding::fit(&records()).unwrap();
        let encoded = enc.encode(&records());
        let names = enc.column_names();
        let age_col = names.iter().position(|n| n == "age").unwrap();
        let vals: Vec<f64> = encoded.iter().map(|r| r.features[age_col]).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 1e-10);
        assert!((sd - 1.0).abs() < 1e-10);
    }

    #[test]
    fn encoding_is_deterministic() {
        let a = Encoding::fit(&records()).unwrap();
        let b = Encoding::fit(&records()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.to_csv(&records()), b.to_csv(&records()));
    }

    #[test]
    fn fingerprint_tracks_fit_statistics() {
        let all = records();
        let a = Encoding::fit(&all).unwrap();
        let b = Encoding::fit(&all[..2]).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn csv_has_header_and_label_column() {
        let enc = Encoding::fit(&records()).unwrap();
        let csv = enc.to_csv(&records());
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("checking_status_A12,"));
        assert!(header.ends_with(",label"));
        assert_eq!(lines.count(), 3);
        assert!(csv.ends_with('\n'));
    }
}
