//! Local geometry: exact k-NN search, the two-sided adaptive-bandwidth
//! alpha-decaying kernel, per-domain similarity matrices, and the joint block
//! matrix W with anchor and neighbor-extension edges.

use std::collections::HashSet;
use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{normalize_01, DataMatrix, DomainPair, NormalizeMode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
}

impl Metric {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

/// Kernel construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelParams {
    /// Neighbor count; must stay below the domain's point count.
    pub k: usize,
    /// Decay exponent; 2 gives Gaussian-like decay.
    pub alpha: f64,
    pub metric: Metric,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            k: 5,
            alpha: 2.0,
            metric: Metric::Euclidean,
        }
    }
}

impl KernelParams {
    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k >= n {
            return Err(Error::KTooLarge { k: self.k, n });
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a positive real, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Dense all-pairs distances between the rows of a data matrix.
pub(crate) fn dense_distances(data: &DataMatrix, metric: Metric) -> DMatrix<f64> {
    let n = data.n_rows();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| data.values.row(i).iter().copied().collect())
        .collect();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = metric.eval(&rows[i], &rows[j]);
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

fn knn_from_dense(d: &DMatrix<f64>, k: usize) -> Vec<Vec<(usize, f64)>> {
    let n = d.nrows();
    (0..n)
        .map(|i| {
            let mut all: Vec<(usize, f64)> = (0..n).filter(|&j| j != i).map(|j| (j, d[(i, j)])).collect();
            all.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distance").then(a.0.cmp(&b.0)));
            all.truncate(k);
            all
        })
        .collect()
}

/// For each point, its k nearest neighbors (self excluded) with raw metric
/// distances; ties broken by lower index.
pub fn knn_distances(data: &DataMatrix, params: &KernelParams) -> Result<Vec<Vec<(usize, f64)>>> {
    params.validate(data.n_rows())?;
    Ok(knn_from_dense(&dense_distances(data, params.metric), params.k))
}

/// The two-sided adaptive-bandwidth kernel:
/// K(d) = exp(-(d/sigma_i)^alpha)/2 + exp(-(d/sigma_j)^alpha)/2.
pub fn alpha_decay_kernel(d: f64, sigma_i: f64, sigma_j: f64, alpha: f64) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "distance must be a nonnegative real, got {d}"
        )));
    }
    if !(sigma_i > 0.0) || !(sigma_j > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bandwidths must be positive, got ({sigma_i}, {sigma_j})"
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(0.5 * (-((d / sigma_i).powf(alpha))).exp() + 0.5 * (-((d / sigma_j).powf(alpha))).exp())
}

/// Sparse symmetric kernel matrix of one domain: nonzero exactly on the union
/// of directed k-NN edges, unit diagonal.
#[derive(Debug, Clone)]
pub struct DomainSimilarity {
    pub weights: DMatrix<f64>,
    pub params: KernelParams,
    /// Directed k-NN lists (neighbor indices in ascending-distance order);
    /// the joint construction needs them for neighbor extension.
    pub neighbors: Vec<Vec<usize>>,
}

impl DomainSimilarity {
    pub fn n(&self) -> usize {
        self.weights.nrows()
    }
}

/// Builds the per-domain similarity matrix: raw distances are 0-1 normalized
/// over the whole matrix, bandwidths are the normalized distances to each
/// point's k-th neighbor (zero bandwidths fall back to the smallest positive
/// distance in the domain, or 1e-12), and the kernel is evaluated on the
/// union-symmetrized k-NN edge set.
pub fn build_domain_similarity(data: &DataMatrix, params: &KernelParams) -> Result<DomainSimilarity> {
    let n = data.n_rows();
    params.validate(n)?;
    let raw = dense_distances(data, params.metric);
    let d = normalize_01(&raw, NormalizeMode::WholeMatrix)?;
    let knn = knn_from_dense(&d, params.k);

    let smallest_positive = d
        .iter()
        .filter(|&&v| v > 0.0)
        .fold(f64::INFINITY, |acc, &v| acc.min(v));
    let fallback = if smallest_positive.is_finite() {
        smallest_positive
    } else {
        1e-12
    };
    let sigma: Vec<f64> = knn
        .iter()
        .map(|nbrs| {
            let s = nbrs[params.k - 1].1;
            if s > 0.0 {
                s
            } else {
                fallback
            }
        })
        .collect();

    let mut w = DMatrix::zeros(n, n);
    for (i, nbrs) in knn.iter().enumerate() {
        for &(j, dist) in nbrs {
            let v = alpha_decay_kernel(dist, sigma[i], sigma[j], params.alpha)?;
            if v > w[(i, j)] {
                w[(i, j)] = v;
            }
        }
    }
    // union symmetrization: keep an edge if either endpoint listed it
    for i in 0..n {
        for j in (i + 1)..n {
            let v = w[(i, j)].max(w[(j, i)]);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        w[(i, i)] = 1.0;
    }

    let neighbors = knn
        .iter()
        .map(|nbrs| nbrs.iter().map(|&(j, _)| j).collect())
        .collect();
    Ok(DomainSimilarity {
        weights: w,
        params: *params,
        neighbors,
    })
}

/// The joint block matrix W = [[W_X, W_XY], [W_YX, W_Y]], with anchor entries
/// nu and neighbor-extension entries gamma * W of the anchored point's
/// neighbors. Symmetric, entrywise in [0, 1].
#[derive(Debug, Clone)]
pub struct JointSimilarity {
    pub w: DMatrix<f64>,
    pub n_x: usize,
    pub n_y: usize,
    pub nu: f64,
    pub gamma: f64,
}

impl JointSimilarity {
    pub fn n(&self) -> usize {
        self.n_x + self.n_y
    }

    /// Cross-block entry for x-row i, y-row j.
    pub fn cross(&self, i: usize, j: usize) -> f64 {
        self.w[(i, self.n_x + j)]
    }

    /// Writes a cross-block entry and its transpose mirror.
    pub fn set_cross(&mut self, i: usize, j: usize, v: f64) {
        self.w[(i, self.n_x + j)] = v;
        self.w[(self.n_x + j, i)] = v;
    }

    /// Count of nonzero entries in the cross block.
    pub fn cross_nnz(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n_x {
            for j in 0..self.n_y {
                if self.cross(i, j) != 0.0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Coordinate-list export (row, col, value) of all nonzero entries.
    pub fn write_coo<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let v = self.w[(i, j)];
                if v != 0.0 {
                    writeln!(out, "{i} {j} {v}")?;
                }
            }
        }
        Ok(())
    }
}

/// Assembles W from the two domain similarities: diagonal blocks as given,
/// anchor cross entries set to nu, and (for gamma > 0) extension entries
/// gamma * W_Y(l, j) for each anchor (i, j) and each unanchored neighbor l of
/// y_j (symmetrically gamma * W_X(m, i) for unanchored neighbors m of x_i).
/// Extensions never touch anchor cells; colliding extensions keep the max.
pub fn build_joint_similarity(
    pair: &DomainPair,
    wx: &DomainSimilarity,
    wy: &DomainSimilarity,
    nu: f64,
    gamma: f64,
) -> Result<JointSimilarity> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParameter(format!("nu must be in (0, 1], got {nu}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be in [0, 1], got {gamma}"
        )));
    }
    let (n_x, n_y) = (pair.x.n_rows(), pair.y.n_rows());
    if wx.n() != n_x || wy.n() != n_y {
        return Err(Error::InvalidParameter(format!(
            "similarity sizes ({}, {}) do not match pair sizes ({n_x}, {n_y})",
            wx.n(),
            wy.n()
        )));
    }

    let n = n_x + n_y;
    let mut w = DMatrix::zeros(n, n);
    w.view_mut((0, 0), (n_x, n_x)).copy_from(&wx.weights);
    w.view_mut((n_x, n_x), (n_y, n_y)).copy_from(&wy.weights);

    let anchored_x: HashSet<usize> = pair.anchors_x().into_iter().collect();
    let anchored_y: HashSet<usize> = pair.anchors_y().into_iter().collect();

    let set_sym = |w: &mut DMatrix<f64>, i: usize, j: usize, v: f64| {
        w[(i, n_x + j)] = v;
        w[(n_x + j, i)] = v;
    };

    if gamma > 0.0 {
        for &(i, j) in &pair.anchors {
            // l is never an anchor target and never j itself, so extension
            // cells are disjoint from anchor cells by construction
            for &l in &wy.neighbors[j] {
                if !anchored_y.contains(&l) {
                    let v = gamma * wy.weights[(l, j)];
                    if v > w[(i, n_x + l)] {
                        set_sym(&mut w, i, l, v);
                    }
                }
            }
            for &m in &wx.neighbors[i] {
                if !anchored_x.contains(&m) {
                    let v = gamma * wx.weights[(m, i)];
                    if v > w[(m, n_x + j)] {
                        set_sym(&mut w, m, j, v);
                    }
                }
            }
        }
    }
    for &(i, j) in &pair.anchors {
        set_sym(&mut w, i, j, nu);
    }

    Ok(JointSimilarity {
        w,
        n_x,
        n_y,
        nu,
        gamma,
    })
}
