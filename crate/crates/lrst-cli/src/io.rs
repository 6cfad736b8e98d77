//! Long-format CSV ingestion and emission.
//!
//! Expected columns: `subject_id,arm,visit,outcome,value` (extra columns are
//! ignored). Visits may be arbitrary labels: if every distinct label parses
//! as a finite number they are ordered numerically, otherwise
//! lexicographically. Panels must be complete cases — a missing
//! (visit, outcome) cell for any subject is a hard error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use lrst_core::{Arm, DatasetError, TrialDataset};

use crate::schema::SchemaConfig;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
    #[error("Csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("MissingColumn: header lacks required column '{name}'")]
    MissingColumn { name: String },
    #[error("UnknownArm: row {line}: arm '{arm}' is not named in the schema")]
    UnknownArm { arm: String, line: u64 },
    #[error("UnknownOutcome: row {line}: outcome '{outcome}' is not named in the schema")]
    UnknownOutcome { outcome: String, line: u64 },
    #[error("NonNumericValue: row {line}: value '{value}' is not a finite number")]
    NonNumericValue { value: String, line: u64 },
    #[error("DuplicateCell: subject '{subject}' has two values for visit '{visit}', outcome '{outcome}'")]
    DuplicateCell {
        subject: String,
        visit: String,
        outcome: String,
    },
    #[error("MissingCell: subject '{subject}' has no value for visit '{visit}', outcome '{outcome}'")]
    MissingCell {
        subject: String,
        visit: String,
        outcome: String,
    },
    #[error("SubjectInMultipleArms: subject '{subject}' appears in arms '{first}' and '{second}'")]
    SubjectInMultipleArms {
        subject: String,
        first: String,
        second: String,
    },
    #[error("TooFewSubjects: arm '{arm}' has {n} complete subject(s); at least 2 are required")]
    TooFewSubjects { arm: String, n: usize },
    #[error("EmptyFile: no data rows found")]
    EmptyFile,
    #[error("Dataset: {0}")]
    Dataset(#[from] DatasetError),
}

/// Sort visit labels numerically when every label parses as a finite
/// number, lexicographically otherwise.
fn sort_visit_labels(labels: &mut Vec<String>) {
    let numeric: Option<Vec<f64>> = labels
        .iter()
        .map(|l| l.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    if let Some(nums) = numeric {
        let mut keyed: Vec<(f64, String)> = nums.into_iter().zip(labels.drain(..)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        *labels = keyed.into_iter().map(|(_, l)| l).collect();
    } else {
        labels.sort();
    }
}

struct RawRow {
    subject: String,
    arm_index: usize, // 0 = control, 1.. = dose order
    visit: String,
    outcome_index: usize,
    value: f64,
}

/// Read and validate a long-format trial CSV against a schema. Returns the
/// dataset with visits mapped to their sort order and outcomes in schema
/// order. Benefit directions are *not* applied here; run
/// `harmonize_directions` with the schema's outcome specs afterwards.
pub fn load_csv(path: &Path, schema: &SchemaConfig) -> Result<TrialDataset, LoadError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize, LoadError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| LoadError::MissingColumn { name: name.into() })
    };
    let c_subject = col("subject_id")?;
    let c_arm = col("arm")?;
    let c_visit = col("visit")?;
    let c_outcome = col("outcome")?;
    let c_value = col("value")?;

    let arm_labels: Vec<&str> = std::iter::once(schema.control.as_str())
        .chain(schema.doses.iter().map(String::as_str))
        .collect();
    let outcome_names = schema.outcome_names();

    let mut rows = Vec::new();
    let mut visit_labels: Vec<String> = Vec::new();
    // subject → arm index, to reject subjects spanning arms
    let mut subject_arm: BTreeMap<String, usize> = BTreeMap::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let arm = record.get(c_arm).unwrap_or("").to_string();
        let arm_index = arm_labels
            .iter()
            .position(|l| *l == arm)
            .ok_or_else(|| LoadError::UnknownArm {
                arm: arm.clone(),
                line,
            })?;
        let outcome = record.get(c_outcome).unwrap_or("").to_string();
        let outcome_index = outcome_names
            .iter()
            .position(|n| *n == outcome)
            .ok_or_else(|| LoadError::UnknownOutcome {
                outcome: outcome.clone(),
                line,
            })?;
        let raw_value = record.get(c_value).unwrap_or("").to_string();
        let parsed = raw_value.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        let value = match parsed {
            Some(v) => v,
            None => {
                return Err(LoadError::NonNumericValue {
                    value: raw_value,
                    line,
                })
            }
        };
        let subject = record.get(c_subject).unwrap_or("").to_string();
        let visit = record.get(c_visit).unwrap_or("").to_string();

        if let Some(&prev) = subject_arm.get(&subject) {
            if prev != arm_index {
                return Err(LoadError::SubjectInMultipleArms {
                    subject,
                    first: arm_labels[prev].to_string(),
                    second: arm_labels[arm_index].to_string(),
                });
            }
        } else {
            subject_arm.insert(subject.clone(), arm_index);
        }
        if !visit_labels.contains(&visit) {
            visit_labels.push(visit.clone());
        }
        rows.push(RawRow {
            subject,
            arm_index,
            visit,
            outcome_index,
            value,
        });
    }
    if rows.is_empty() {
        return Err(LoadError::EmptyFile);
    }

    sort_visit_labels(&mut visit_labels);
    let visit_index: BTreeMap<&str, usize> = visit_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let t_len = visit_labels.len();
    let k_len = outcome_names.len();

    // per arm: subject → cell grid
    let mut grids: Vec<BTreeMap<String, Vec<Option<f64>>>> =
        (0..arm_labels.len()).map(|_| BTreeMap::new()).collect();
    for row in rows {
        let t = visit_index[row.visit.as_str()];
        let grid = grids[row.arm_index]
            .entry(row.subject.clone())
            .or_insert_with(|| vec![None; t_len * k_len]);
        let cell = &mut grid[t * k_len + row.outcome_index];
        if cell.is_some() {
            return Err(LoadError::DuplicateCell {
                subject: row.subject,
                visit: row.visit,
                outcome: outcome_names[row.outcome_index].clone(),
            });
        }
        *cell = Some(row.value);
    }

    let mut arms = Vec::with_capacity(arm_labels.len());
    for (a, label) in arm_labels.iter().enumerate() {
        let subjects = &grids[a];
        if subjects.len() < 2 {
            return Err(LoadError::TooFewSubjects {
                arm: label.to_string(),
                n: subjects.len(),
            });
        }
        let mut values = Vec::with_capacity(subjects.len() * t_len * k_len);
        for (subject, grid) in subjects {
            for (pos, cell) in grid.iter().enumerate() {
                match cell {
                    Some(v) => values.push(*v),
                    None => {
                        return Err(LoadError::MissingCell {
                            subject: subject.clone(),
                            visit: visit_labels[pos / k_len].clone(),
                            outcome: outcome_names[pos % k_len].clone(),
                        })
                    }
                }
            }
        }
        arms.push(Arm::new(label.to_string(), t_len, k_len, values)?);
    }

    let control = arms.remove(0);
    Ok(TrialDataset::new(
        control,
        arms,
        outcome_names,
        t_len,
    )?)
}

/// Serialize a dataset back to the long CSV format. Visits are written as
/// 1..T and subject ids as `<arm>_<index>`, zero-padded so a reload
/// reproduces the tensor bit for bit.
pub fn write_trial_csv<W: Write>(ds: &TrialDataset, mut w: W) -> std::io::Result<()> {
    writeln!(w, "subject_id,arm,visit,outcome,value")?;
    let width = ds
        .doses()
        .iter()
        .map(|a| a.n_subjects())
        .chain([ds.control().n_subjects()])
        .max()
        .unwrap_or(1)
        .to_string()
        .len();
    let arms = std::iter::once(ds.control()).chain(ds.doses().iter());
    for arm in arms {
        for i in 0..arm.n_subjects() {
            for t in 0..ds.n_visits() {
                for k in 0..ds.n_outcomes() {
                    writeln!(
                        w,
                        "{}_{:0width$},{},{},{},{}",
                        arm.label(),
                        i + 1,
                        arm.label(),
                        t + 1,
                        ds.outcome_names()[k],
                        arm.value(i, t, k),
                    )?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_trial_csv_file(ds: &TrialDataset, path: &Path) -> std::io::Result<()> {
    write_trial_csv(ds, BufWriter::new(File::create(path)?))
}
