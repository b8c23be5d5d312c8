//! Reading LIBSVM-format classification data and standardizing features.
//!
//! The format is line-oriented: `label index:value index:value ...` with
//! 1-based feature indices, strictly increasing within a line; absent
//! indices are zeros. Binary label sets are remapped to {0, 1} by sorted
//! order so downstream losses never see raw encodings like {-1, +1}.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Dense classification dataset with labels already remapped to {0, 1}.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Matrix, // n x d
    labels: Vec<f64>,
}

impl Dataset {
    pub fn from_dense(features: Matrix, labels: Vec<f64>) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: labels.len(),
            });
        }
        Ok(Dataset { features, labels })
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn d(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Parse LIBSVM-format data from a reader.
///
/// The feature dimension is the largest index seen anywhere in the file.
/// More than two distinct labels is an error (the losses here are binary);
/// the two (or one) distinct raw labels are remapped to 0/1 in ascending
/// order. All malformed input is reported with its 1-based line number.
pub fn parse_libsvm(reader: impl BufRead) -> Result<Dataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad label {label_tok:?}"),
        })?;
        if label.is_nan() {
            return Err(Error::Parse { line: lineno, msg: "label is NaN".into() });
        }

        let mut row = Vec::new();
        let mut prev_index = 0usize;
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected index:value, got {tok:?}"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad feature index {idx_s:?}"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "feature indices are 1-based, got 0".into(),
                });
            }
            if idx <= prev_index {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!(
                        "feature indices must be strictly increasing, got {idx} after {prev_index}"
                    ),
                });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad feature value {val_s:?}"),
            })?;
            prev_index = idx;
            max_index = max_index.max(idx);
            row.push((idx, val));
        }
        rows.push(row);
        raw_labels.push(label);
    }

    if rows.is_empty() {
        return Err(Error::InvalidArgument("no data lines in input".into()));
    }

    let mut distinct = raw_labels.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() > 2 {
        return Err(Error::InvalidArgument(format!(
            "expected at most two classes, found {}",
            distinct.len()
        )));
    }

    let n = rows.len();
    let d = max_index;
    let mut features = Matrix::zeros(n, d);
    for (i, row) in rows.iter().enumerate() {
        for &(idx, val) in row {
            features[(i, idx - 1)] = val;
        }
    }
    let labels = raw_labels
        .iter()
        .map(|l| if distinct.len() == 2 && *l == distinct[1] { 1.0 } else { 0.0 })
        .collect();
    Dataset::from_dense(features, labels)
}

/// Parse a LIBSVM-format file from disk.
pub fn read_libsvm(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = File::open(path.as_ref())?;
    parse_libsvm(BufReader::new(file))
}

/// Standardize features in place: per column, subtract the mean and divide
/// by the population standard deviation. Constant columns become all zeros.
/// Returns the per-column means and (unguarded) standard deviations.
pub fn standardize(data: &mut Dataset) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (data.n(), data.d());
    let mut means = vec![0.0; d];
    let mut stds = vec![0.0; d];
    for j in 0..d {
        let mut s = 0.0;
        for i in 0..n {
            s += data.features[(i, j)];
        }
        means[j] = s / n as f64;
        let mut v = 0.0;
        for i in 0..n {
            let c = data.features[(i, j)] - means[j];
            v += c * c;
        }
        stds[j] = (v / n as f64).sqrt();
        for i in 0..n {
            let cell = &mut data.features[(i, j)];
            *cell = if stds[j] > 0.0 { (*cell - means[j]) / stds[j] } else { 0.0 };
        }
    }
    (means, stds)
}
