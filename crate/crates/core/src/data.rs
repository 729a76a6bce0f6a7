//! Dataset ingestion, feature normalization, label handling, and seeded
//! random sources shared by every stochastic step.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer class ids plus the original class names, indexed by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    /// One id per observation.
    pub ids: Vec<usize>,
    /// Name for each id; ids are assigned in sorted-name order so they do not
    /// depend on row order.
    pub names: Vec<String>,
}

impl Labels {
    /// Builds the id table from raw per-row label strings.
    pub fn from_strings(raw: &[String]) -> Self {
        let mut names: Vec<String> = raw
            .iter()
            .collect::<HashSet<_>>()
            .into_iter()
            .cloned()
            .collect();
        names.sort();
        let ids = raw
            .iter()
            .map(|s| names.binary_search(s).expect("name in table"))
            .collect();
        Labels { ids, names }
    }

    pub fn select(&self, rows: &[usize]) -> Labels {
        Labels {
            ids: rows.iter().map(|&r| self.ids[r]).collect(),
            names: self.names.clone(),
        }
    }
}

/// An observations x features matrix with optional labels and feature names.
///
/// Immutable after construction; all operations return new values.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub values: DMatrix<f64>,
    pub labels: Option<Labels>,
    pub feature_names: Option<Vec<String>>,
}

impl DataMatrix {
    pub fn from_values(values: DMatrix<f64>) -> Self {
        DataMatrix {
            values,
            labels: None,
            feature_names: None,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    /// Returns a copy whose feature columns are 0-1 normalized.
    pub fn normalize_features(&self) -> Result<DataMatrix> {
        Ok(DataMatrix {
            values: normalize_01(&self.values, NormalizeMode::PerColumn)?,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
        })
    }

    /// Keeps the given feature columns, in the given order.
    pub fn select_features(&self, features: &[usize]) -> DataMatrix {
        let values = DMatrix::from_fn(self.n_rows(), features.len(), |r, c| {
            self.values[(r, features[c])]
        });
        let feature_names = self
            .feature_names
            .as_ref()
            .map(|names| features.iter().map(|&f| names[f].clone()).collect());
        DataMatrix {
            values,
            labels: self.labels.clone(),
            feature_names,
        }
    }

    /// Keeps the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> DataMatrix {
        let values =
            DMatrix::from_fn(rows.len(), self.n_features(), |r, c| self.values[(rows[r], c)]);
        DataMatrix {
            values,
            labels: self.labels.as_ref().map(|l| l.select(rows)),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Selects how [`normalize_01`] computes its range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizeMode {
    /// Each column scaled by its own min/max (feature scaling).
    PerColumn,
    /// One min/max over every entry (distance scaling).
    WholeMatrix,
}

/// 0-1 normalization: (v - min) / (max - min); a zero range maps to zeros.
pub fn normalize_01(values: &DMatrix<f64>, mode: NormalizeMode) -> Result<DMatrix<f64>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("normalize_01 input".into()));
    }
    let mut out = values.clone();
    match mode {
        NormalizeMode::PerColumn => {
            for mut col in out.column_iter_mut() {
                let (lo, hi) = col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                    (l.min(v), h.max(v))
                });
                let range = hi - lo;
                for v in col.iter_mut() {
                    *v = if range > 0.0 { (*v - lo) / range } else { 0.0 };
                }
            }
        }
        NormalizeMode::WholeMatrix => {
            let (lo, hi) = out.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
            let range = hi - lo;
            for v in out.iter_mut() {
                *v = if range > 0.0 { (*v - lo) / range } else { 0.0 };
            }
        }
    }
    Ok(out)
}

/// Two domains plus the anchor list of known cross-domain correspondences:
/// (i, j) means x-row i corresponds to y-row j.
#[derive(Debug, Clone)]
pub struct DomainPair {
    pub x: DataMatrix,
    pub y: DataMatrix,
    pub anchors: Vec<(usize, usize)>,
}

impl DomainPair {
    /// Validates index ranges and one-to-one partial correspondence.
    pub fn new(x: DataMatrix, y: DataMatrix, anchors: Vec<(usize, usize)>) -> Result<Self> {
        let (n_x, n_y) = (x.n_rows(), y.n_rows());
        let mut seen_x = HashSet::new();
        let mut seen_y = HashSet::new();
        for &(i, j) in &anchors {
            if i >= n_x || j >= n_y {
                return Err(Error::InvalidAnchors(format!(
                    "anchor ({i}, {j}) out of range for {n_x}x{n_y} pair"
                )));
            }
            if !seen_x.insert(i) || !seen_y.insert(j) {
                return Err(Error::InvalidAnchors(format!(
                    "anchor ({i}, {j}) repeats an index; correspondence must be one-to-one"
                )));
            }
        }
        Ok(DomainPair { x, y, anchors })
    }

    /// Replaces the anchor list after re-validation.
    pub fn with_anchors(&self, anchors: Vec<(usize, usize)>) -> Result<Self> {
        DomainPair::new(self.x.clone(), self.y.clone(), anchors)
    }

    pub fn anchors_x(&self) -> Vec<usize> {
        self.anchors.iter().map(|&(i, _)| i).collect()
    }

    pub fn anchors_y(&self) -> Vec<usize> {
        self.anchors.iter().map(|&(_, j)| j).collect()
    }
}

/// Seed wrapper: every stochastic operation draws from a ChaCha stream keyed
/// by this seed, so identical seeds reproduce identical outputs end-to-end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Derives an independent stream for a named sub-task (FNV-1a over the
    /// seed bytes and the label), so unrelated draws never share state.
    pub fn fork(&self, label: &str) -> RandomSource {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        for b in self.seed.to_le_bytes().iter().chain(label.as_bytes()) {
            h ^= u64::from(*b);
            h = h.wrapping_mul(PRIME);
        }
        RandomSource { seed: h }
    }
}

/// Loads a CSV (UTF-8, comma-delimited, header required, empty cell =
/// missing). Rows containing a missing cell are dropped; features are 0-1
/// normalized per column; labels are extracted if `label_column` names a
/// header field.
pub fn load_csv(path: &Path, label_column: Option<&str>) -> Result<DataMatrix> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: display.clone(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Parse {
                path: display.clone(),
                message: e.to_string(),
            },
        })?;

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: display.clone(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_owned)
        .collect();

    let label_idx = match label_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingLabelColumn(name.into()))?,
        ),
        None => None,
    };
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: display.clone(),
            message: e.to_string(),
        })?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                path: display.clone(),
                message: format!(
                    "row {} has {} cells, header has {}",
                    line + 2,
                    record.len(),
                    header.len()
                ),
            });
        }
        let mut row = Vec::with_capacity(feature_names.len());
        let mut label = None;
        let mut missing = false;
        for (i, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                missing = true;
                break;
            }
            if Some(i) == label_idx {
                label = Some(cell.to_owned());
            } else {
                row.push(cell.parse::<f64>().map_err(|_| Error::Parse {
                    path: display.clone(),
                    message: format!("row {}: {cell:?} is not a number", line + 2),
                })?);
            }
        }
        if missing {
            continue;
        }
        rows.push(row);
        if let Some(l) = label {
            raw_labels.push(l);
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }

    let values = DMatrix::from_fn(rows.len(), feature_names.len(), |r, c| rows[r][c]);
    DataMatrix {
        values,
        labels: label_idx.map(|_| Labels::from_strings(&raw_labels)),
        feature_names: Some(feature_names),
    }
    .normalize_features()
}
