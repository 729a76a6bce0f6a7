//! Alignment quality metrics: FOSCTTM (fraction of samples closer than the
//! true match, averaged over both directions), cross-embedding k-NN
//! classification accuracy, and their combined score.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embed::Embedding;
use crate::error::{Error, Result};

/// Evaluation summary serialized into metrics artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub foscttm: f64,
    pub ce_accuracy: f64,
    /// Always ce_accuracy - foscttm.
    pub combined: f64,
    pub n_eval_pairs: usize,
    /// Neighbor count used by the CE classifier.
    pub knn_k: usize,
    pub embedding_dim: usize,
}

fn check_pairs(pairs: &[(usize, usize)], n_x: usize, n_y: usize) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("evaluation pair list is empty".into()));
    }
    if n_x < 2 || n_y < 2 {
        return Err(Error::InvalidParameter(
            "FOSCTTM needs at least two points per domain".into(),
        ));
    }
    for &(i, j) in pairs {
        if i >= n_x || j >= n_y {
            return Err(Error::InvalidParameter(format!(
                "evaluation pair ({i}, {j}) is out of range for sizes ({n_x}, {n_y})"
            )));
        }
    }
    Ok(())
}

/// FOSCTTM from an n_x x n_y cross-domain distance block. For each true pair
/// the fraction of co-domain points strictly closer than the match is
/// computed in both directions (denominator: co-domain size minus one) and
/// averaged over all pairs and directions.
pub fn foscttm_from_cross(cross: &DMatrix<f64>, pairs: &[(usize, usize)]) -> Result<f64> {
    let (n_x, n_y) = (cross.nrows(), cross.ncols());
    check_pairs(pairs, n_x, n_y)?;
    let mut total = 0.0;
    for &(i, j) in pairs {
        let d = cross[(i, j)];
        let closer_y = (0..n_y).filter(|&l| cross[(i, l)] < d).count();
        let closer_x = (0..n_x).filter(|&m| cross[(m, j)] < d).count();
        total += closer_y as f64 / (n_y - 1) as f64;
        total += closer_x as f64 / (n_x - 1) as f64;
    }
    Ok(total / (2 * pairs.len()) as f64)
}

/// FOSCTTM over a joint (n_x+n_y)-square distance matrix whose leading n_x
/// rows are domain X; pairs are (x index, y index) within their domains.
pub fn foscttm_from_joint(d: &DMatrix<f64>, n_x: usize, pairs: &[(usize, usize)]) -> Result<f64> {
    let n = d.nrows();
    if d.ncols() != n || n_x == 0 || n_x >= n {
        return Err(Error::InvalidParameter(format!(
            "joint matrix {}x{} cannot split at {n_x}",
            d.nrows(),
            d.ncols()
        )));
    }
    let cross = d.view((0, n_x), (n_x, n - n_x)).into_owned();
    foscttm_from_cross(&cross, pairs)
}

/// FOSCTTM of an embedding holding two domains, with Euclidean distances in
/// embedding space.
pub fn foscttm(embedding: &Embedding, pairs: &[(usize, usize)]) -> Result<f64> {
    if embedding.domain_ranges.len() < 2 {
        return Err(Error::InvalidParameter(
            "embedding does not hold two domains".into(),
        ));
    }
    let x = embedding.domain_coords(0);
    let y = embedding.domain_coords(1);
    let cross = DMatrix::from_fn(x.nrows(), y.nrows(), |i, j| {
        (x.row(i) - y.row(j)).norm()
    });
    foscttm_from_cross(&cross, pairs)
}

/// k-NN prediction of test-row labels from labeled training rows. Votes are
/// majority count; ties prefer the label whose voting neighbors have the
/// smallest cumulative distance, then the lowest label id.
pub fn knn_predict(
    train: &DMatrix<f64>,
    labels: &[usize],
    test: &DMatrix<f64>,
    k: usize,
) -> Result<Vec<usize>> {
    let n = train.nrows();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    if labels.len() != n {
        return Err(Error::MissingLabels(format!(
            "{} labels for {n} training rows",
            labels.len()
        )));
    }
    if train.ncols() != test.ncols() {
        return Err(Error::InvalidParameter(format!(
            "training dim {} does not match test dim {}",
            train.ncols(),
            test.ncols()
        )));
    }
    Ok((0..test.nrows())
        .map(|q| {
            let mut near: Vec<(f64, usize)> = (0..n)
                .map(|i| ((train.row(i) - test.row(q)).norm(), i))
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            near.truncate(k);

            // per-label vote count and cumulative neighbor distance
            let mut tally: Vec<(usize, usize, f64)> = Vec::new();
            for &(d, i) in &near {
                let label = labels[i];
                match tally.iter_mut().find(|t| t.0 == label) {
                    Some(t) => {
                        t.1 += 1;
                        t.2 += d;
                    }
                    None => tally.push((label, 1, d)),
                }
            }
            tally.sort_by(|a, b| {
                b.1.cmp(&a.1)
                    .then(a.2.total_cmp(&b.2))
                    .then(a.0.cmp(&b.0))
            });
            tally[0].0
        })
        .collect())
}

/// Accuracy of k-NN label prediction from embedded domain X onto embedded
/// domain Y.
pub fn cross_embedding_accuracy(
    embedding: &Embedding,
    labels_x: &[usize],
    labels_y: &[usize],
    k: usize,
) -> Result<f64> {
    if embedding.domain_ranges.len() < 2 {
        return Err(Error::InvalidParameter(
            "embedding does not hold two domains".into(),
        ));
    }
    let x = embedding.domain_coords(0);
    let y = embedding.domain_coords(1);
    if labels_y.len() != y.nrows() {
        return Err(Error::MissingLabels(format!(
            "{} labels for {} Y rows",
            labels_y.len(),
            y.nrows()
        )));
    }
    let predicted = knn_predict(&x, labels_x, &y, k)?;
    let hits = predicted.iter().zip(labels_y).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / labels_y.len() as f64)
}

/// Single summary score combining both metrics; 1 is ideal.
pub fn combined_score(ce_accuracy: f64, foscttm: f64) -> f64 {
    ce_accuracy - foscttm
}

/// Computes all metrics of an embedding at once.
pub fn evaluate(
    embedding: &Embedding,
    labels_x: &[usize],
    labels_y: &[usize],
    pairs: &[(usize, usize)],
    k: usize,
) -> Result<MetricsReport> {
    let f = foscttm(embedding, pairs)?;
    let ce = cross_embedding_accuracy(embedding, labels_x, labels_y, k)?;
    Ok(MetricsReport {
        foscttm: f,
        ce_accuracy: ce,
        combined: combined_score(ce, f),
        n_eval_pairs: pairs.len(),
        knn_k: k,
        embedding_dim: embedding.coords.ncols(),
    })
}
