//! Information distances between probability rows and classical
//! (Torgerson) MDS embedding of precomputed distance matrices.

use std::ops::Range;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Epsilon added inside logarithms: diffusion rows contain exact zeros.
pub const LOG_EPS: f64 = 1e-7;

/// Information distance selector for diffusion rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoDistance {
    Potential,
    Hellinger,
    Kl,
}

impl InfoDistance {
    /// Evaluates without the probability-vector validation; used on matrix
    /// rows that are probability vectors by construction.
    pub(crate) fn eval_raw(&self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            InfoDistance::Potential => log_euclidean_raw(p, q, LOG_EPS),
            InfoDistance::Hellinger => hellinger_raw(p, q),
            InfoDistance::Kl => kl_raw(p, q, LOG_EPS),
        }
    }
}

fn validate_probability(name: &str, p: &[f64]) -> Result<()> {
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("{name} contains a non-finite entry")));
    }
    if p.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter(format!("{name} has a negative entry")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "{name} sums to {sum}, not 1 within 1e-6"
        )));
    }
    Ok(())
}

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::InvalidParameter(format!(
            "vector lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    validate_probability("p", p)?;
    validate_probability("q", q)
}

pub(crate) fn hellinger_raw(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    (s / 2.0).sqrt()
}

pub(crate) fn kl_raw(p: &[f64], q: &[f64], eps: f64) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| (a - b) * ((a + eps).ln() - (b + eps).ln()))
        .sum()
}

/// Euclidean distance between the log-coordinates of two nonnegative rows.
/// Shared by the potential distance and the geodesic info-distance option,
/// whose inputs are not probability vectors.
pub(crate) fn log_euclidean_raw(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = (a + eps).ln() - (b + eps).ln();
            d * d
        })
        .sum();
    s.sqrt()
}

/// Hellinger distance (1/sqrt(2)) * ||sqrt(p) - sqrt(q)||, in [0, 1].
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    Ok(hellinger_raw(p, q))
}

/// Symmetrized KL divergence KL(p||q) + KL(q||p), epsilon-smoothed inside the
/// logarithms.
pub fn kl_divergence_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    Ok(kl_raw(p, q, LOG_EPS))
}

/// Potential distance: Euclidean distance between -log potential coordinates.
pub fn potential_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    Ok(log_euclidean_raw(p, q, LOG_EPS))
}

/// A joint embedding: rows are points, columns are coordinates.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub coords: DMatrix<f64>,
    /// The `dim` leading Gram eigenvalues in non-increasing order (for MDS
    /// embeddings); baseline methods document their own spectrum semantics.
    pub eigenvalues: Vec<f64>,
    /// Row ranges of each domain within `coords`.
    pub domain_ranges: Vec<Range<usize>>,
    /// True when fewer than `dim` positive eigenvalues existed; the missing
    /// trailing coordinates are zero.
    pub truncated: bool,
}

impl Embedding {
    /// Coordinate rows of one domain.
    pub fn domain_coords(&self, d: usize) -> DMatrix<f64> {
        let r = self.domain_ranges[d].clone();
        self.coords.rows(r.start, r.end - r.start).into_owned()
    }
}

/// Deterministic sign convention: the largest-magnitude entry of each column
/// is made positive (first index wins on ties).
pub(crate) fn fix_column_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0usize;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Classical (Torgerson) MDS of a symmetric zero-diagonal distance matrix:
/// double-center B = -1/2 J D^2 J, eigendecompose, scale the top-`dim`
/// eigenvectors by sqrt(eigenvalue). Negative Gram eigenvalues never enter
/// the coordinates; if fewer than `dim` positive ones exist the remaining
/// columns stay zero and the embedding is marked truncated.
pub fn classical_mds(d: &DMatrix<f64>, dim: usize) -> Result<Embedding> {
    let n = d.nrows();
    if d.ncols() != n || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "distance matrix must be square and nonempty, got {}x{}",
            n,
            d.ncols()
        )));
    }
    if dim == 0 || dim > n {
        return Err(Error::InvalidParameter(format!(
            "embedding dim {dim} must be in [1, {n}]"
        )));
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("distance matrix".into()));
    }
    for i in 0..n {
        if d[(i, i)].abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "distance matrix diagonal entry ({i},{i}) = {} is not 0",
                d[(i, i)]
            )));
        }
        for j in (i + 1)..n {
            if (d[(i, j)] - d[(j, i)]).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "distance matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }

    let sq = d.map(|v| v * v);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand)
    });

    let eig = b.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });

    let mut coords = DMatrix::zeros(n, dim);
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut positive = 0usize;
    for (c, &idx) in order.iter().take(dim).enumerate() {
        let lambda = eig.eigenvalues[idx];
        eigenvalues.push(lambda);
        if lambda > 0.0 {
            positive += 1;
            let scale = lambda.sqrt();
            for r in 0..n {
                coords[(r, c)] = eig.eigenvectors[(r, idx)] * scale;
            }
        }
    }
    fix_column_signs(&mut coords);

    Ok(Embedding {
        coords,
        eigenvalues,
        domain_ranges: vec![0..n],
        truncated: positive < dim,
    })
}

/// All-pairs Euclidean distances between the rows of a coordinate matrix.
pub fn pairwise_distances(coords: &DMatrix<f64>) -> DMatrix<f64> {
    let n = coords.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (coords.row(i) - coords.row(j)).norm();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}
