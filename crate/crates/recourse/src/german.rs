//! Parser and summary statistics for the raw German Credit file.
//!
//! The raw file is whitespace-separated, one application per line, 20 coded
//! attributes followed by the outcome label (1 = good customer, 2 = bad).
//! Categorical attributes use the `A..` code sets from the dataset
//! documentation; the remaining attributes are integers.

use std::io::{BufRead, BufReader, Read};

use thiserror::Error;

/// Kind of one raw attribute.
#[derive(Debug, Clone, Copy)]
pub enum AttrKind {
    /// Valid codes, in documentation order.
    Categorical(&'static [&'static str]),
    /// Inclusive integer range.
    Integer { min: i64, max: i64 },
}

/// Schema entry for one of the 20 attributes.
#[derive(Debug, Clone, Copy)]
pub struct AttributeSpec {
    pub name: &'static str,
    pub kind: AttrKind,
}

macro_rules! categorical {
    ($name:literal, $($code:literal),+) => {
        AttributeSpec { name: $name, kind: AttrKind::Categorical(&[$($code),+]) }
    };
}

macro_rules! integer {
    ($name:literal, $min:literal ..= $max:literal) => {
        AttributeSpec {
            name: $name,
            kind: AttrKind::Integer { min: $min, max: $max },
        }
    };
}

/// The 20 attributes of the raw file, in column order.
pub const SCHEMA: [AttributeSpec; 20] = [
    categorical!("checking_status", "A11", "A12", "A13", "A14"),
    integer!("duration", 1..=120),
    categorical!("credit_history", "A30", "A31", "A32", "A33", "A34"),
    categorical!(
        "purpose",
        "A40", "A41", "A42", "A43", "A44", "A45", "A46", "A47", "A48", "A49", "A410"
    ),
    integer!("amount", 1..=1_000_000),
    categorical!("savings", "A61", "A62", "A63", "A64", "A65"),
    categorical!("employment", "A71", "A72", "A73", "A74", "A75"),
    integer!("installment_rate", 1..=4),
    categorical!("personal_status", "A91", "A92", "A93", "A94", "A95"),
    categorical!("other_debtors", "A101", "A102", "A103"),
    integer!("residence_since", 1..=4),
    categorical!("property", "A121", "A122", "A123", "A124"),
    integer!("age", 16..=120),
    categorical!("other_plans", "A141", "A142", "A143"),
    categorical!("housing", "A151", "A152", "A153"),
    integer!("existing_credits", 1..=4),
    categorical!("job", "A171", "A172", "A173", "A174"),
    integer!("dependents", 1..=2),
    categorical!("telephone", "A191", "A192"),
    categorical!("foreign_worker", "A201", "A202"),
];

// Attribute indices used by the summary and the flag accessors.
const DURATION: usize = 1;
const PURPOSE: usize = 3;
const AMOUNT: usize = 4;
const PERSONAL_STATUS: usize = 8;
const RESIDENCE: usize = 10;
const AGE: usize = 12;
const TELEPHONE: usize = 18;
const FOREIGN_WORKER: usize = 19;

/// Outcome label of one application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CreditLabel {
    /// Raw label 1: a profitable applicant.
    Good,
    /// Raw label 2: an unprofitable applicant.
    Bad,
}

impl CreditLabel {
    /// The label as stored in the raw file.
    pub fn raw(self) -> i64 {
        match self {
            CreditLabel::Good => 1,
            CreditLabel::Bad => 2,
        }
    }

    /// The label convention of the encoded dataset: good = +1, bad = -1.
    pub fn signed(self) -> i8 {
        match self {
            CreditLabel::Good => 1,
            CreditLabel::Bad => -1,
        }
    }
}

/// One parsed application. Categorical attributes are stored as the index of
/// the code within the schema's code list; integer attributes as their value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    values: [i64; 20],
    pub label: CreditLabel,
}

impl RawRecord {
    /// Level index of a categorical attribute.
    pub fn level(&self, attr: usize) -> usize {
        debug_assert!(matches!(SCHEMA[attr].kind, AttrKind::Categorical(_)));
        self.values[attr] as usize
    }

    /// Value of an integer attribute.
    pub fn numeric(&self, attr: usize) -> i64 {
        debug_assert!(matches!(SCHEMA[attr].kind, AttrKind::Integer { .. }));
        self.values[attr]
    }

    /// Code string of a categorical attribute.
    pub fn code(&self, attr: usize) -> &'static str {
        match SCHEMA[attr].kind {
            AttrKind::Categorical(codes) => codes[self.level(attr)],
            AttrKind::Integer { .. } => panic!("{} is not categorical", SCHEMA[attr].name),
        }
    }

    pub fn age(&self) -> i64 {
        self.numeric(AGE)
    }

    pub fn duration_months(&self) -> i64 {
        self.numeric(DURATION)
    }

    pub fn amount(&self) -> i64 {
        self.numeric(AMOUNT)
    }

    pub fn residence_years(&self) -> i64 {
        self.numeric(RESIDENCE)
    }

    /// Personal-status codes A92 and A95 describe female applicants.
    pub fn is_female(&self) -> bool {
        matches!(self.code(PERSONAL_STATUS), "A92" | "A95")
    }

    /// A201 marks a foreign worker. Nearly every record in the canonical file
    /// carries it; see [`SummaryStats`] on how the reports handle this.
    pub fn is_foreign_worker(&self) -> bool {
        self.code(FOREIGN_WORKER) == "A201"
    }

    /// Loan purpose A40: a new car.
    pub fn purpose_is_new_car(&self) -> bool {
        self.code(PURPOSE) == "A40"
    }

    /// Loan purpose A43: radio / television.
    pub fn purpose_is_electronics(&self) -> bool {
        self.code(PURPOSE) == "A43"
    }

    /// A192: a telephone registered under the customer's name.
    pub fn has_telephone(&self) -> bool {
        self.code(TELEPHONE) == "A192"
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: expected 21 fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: unknown code {code:?} for attribute {attribute}")]
    UnknownCode {
        line: usize,
        attribute: &'static str,
        code: String,
    },
    #[error("line {line}: value {value:?} for attribute {attribute} is not an integer in [{min}, {max}]")]
    InvalidInteger {
        line: usize,
        attribute: &'static str,
        value: String,
        min: i64,
        max: i64,
    },
    #[error("line {line}: invalid label {value:?} (expected 1 or 2)")]
    InvalidLabel { line: usize, value: String },
    #[error("dataset is empty")]
    Empty,
    #[error("failed to read input")]
    Io(#[from] std::io::Error),
}

/// Parse the raw file. Blank lines are skipped; every other line must carry
/// exactly 21 valid fields.
pub fn parse_german<R: Read>(input: R) -> Result<Vec<RawRecord>, DataError> {
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 21 {
            return Err(DataError::FieldCount {
                line: line_no,
                found: fields.len(),
            });
        }
        let mut values = [0i64; 20];
        for (attr, spec) in SCHEMA.iter().enumerate() {
            let field = fields[attr];
            values[attr] = match spec.kind {
                AttrKind::Categorical(codes) => match codes.iter().position(|&c| c == field) {
                    Some(level) => level as i64,
                    None => {
                        return Err(DataError::UnknownCode {
                            line: line_no,
                            attribute: spec.name,
                            code: field.to_string(),
                        })
                    }
                },
                AttrKind::Integer { min, max } => match field.parse::<i64>() {
                    Ok(v) if (min..=max).contains(&v) => v,
                    _ => {
                        return Err(DataError::InvalidInteger {
                            line: line_no,
                            attribute: spec.name,
                            value: field.to_string(),
                            min,
                            max,
                        })
                    }
                },
            };
        }
        let label = match fields[20] {
            "1" => CreditLabel::Good,
            "2" => CreditLabel::Bad,
            other => {
                return Err(DataError::InvalidLabel {
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        records.push(RawRecord { values, label });
    }
    Ok(records)
}

/// Mean and sample standard deviation of one feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

fn mean_sd(values: impl Iterator<Item = f64>) -> MeanSd {
    let values: Vec<f64> = values.collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    // Sample convention (n - 1); a single observation has zero spread.
    let sd = if values.len() >= 2 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MeanSd { mean, sd }
}

/// Summary of one label group on the unstandardized values.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub count: usize,
    pub age: MeanSd,
    pub residence_years: MeanSd,
    pub duration: MeanSd,
    pub amount: MeanSd,
    /// Share of female applicants (personal-status codes A92/A95).
    pub female: f64,
    /// Share of foreign workers under the straightforward A201 mapping. The
    /// published summary table appears to use the inverted flag; the reports
    /// surface both rather than forcing a match.
    pub foreign_worker: f64,
    pub new_car: f64,
    pub electronics: f64,
    pub telephone: f64,
}

fn group_stats(records: &[&RawRecord]) -> GroupStats {
    let n = records.len() as f64;
    let share = |pred: fn(&RawRecord) -> bool| -> f64 {
        records.iter().filter(|r| pred(r)).count() as f64 / n
    };
    GroupStats {
        count: records.len(),
        age: mean_sd(records.iter().map(|r| r.age() as f64)),
        residence_years: mean_sd(records.iter().map(|r| r.residence_years() as f64)),
        duration: mean_sd(records.iter().map(|r| r.duration_months() as f64)),
        amount: mean_sd(records.iter().map(|r| r.amount() as f64)),
        female: share(RawRecord::is_female),
        foreign_worker: share(RawRecord::is_foreign_worker),
        new_car: share(RawRecord::purpose_is_new_car),
        electronics: share(RawRecord::purpose_is_electronics),
        telephone: share(RawRecord::has_telephone),
    }
}

/// Group-wise summary statistics in the layout of the published table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub unprofitable: GroupStats,
    pub profitable: GroupStats,
}

/// Summarize the unstandardized records, grouped by label. Errors on empty
/// input.
pub fn summarize(records: &[RawRecord]) -> Result<SummaryStats, DataError> {
    if records.is_empty() {
        return Err(DataError::Empty);
    }
    let bad: Vec<&RawRecord> = records
        .iter()
        .filter(|r| r.label == CreditLabel::Bad)
        .collect();
    let good: Vec<&RawRecord> = records
        .iter()
        .filter(|r| r.label == CreditLabel::Good)
        .collect();
    Ok(SummaryStats {
        unprofitable: group_stats(&bad),
        profitable: group_stats(&good),
    })
}
