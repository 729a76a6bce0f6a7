//! Reference alignments for comparison runs: joint Laplacian eigenmaps
//! (JLMA) and per-domain eigenmaps stitched together by Procrustes analysis
//! (MAPA).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::DomainPair;
use crate::embed::{fix_column_signs, Embedding};
use crate::error::{Error, Result};
use crate::graph::{build_domain_similarity, build_joint_similarity, KernelParams};
use crate::result::AlignmentResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Jlma,
    Mapa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    pub dim: usize,
    pub kparams: KernelParams,
}

/// Eigenvalues below this count as zero (connected-component modes).
const ZERO_TOL: f64 = 1e-9;

pub(crate) struct EigenmapParts {
    pub(crate) coords: DMatrix<f64>,
    /// The `dim` selected eigenvalues, ascending.
    pub(crate) eigenvalues: Vec<f64>,
    /// Spectrum diagnostics, asserted on by the test suite.
    #[allow(dead_code)]
    pub(crate) zero_multiplicity: usize,
    #[allow(dead_code)]
    pub(crate) min_eigenvalue: f64,
}

/// Laplacian eigenmap of a similarity matrix with unit diagonal: forms
/// L = I - D^{-1/2} W D^{-1/2}, takes the eigenvectors of the `dim`
/// smallest nonzero eigenvalues, and rescales rows by D^{-1/2} so the
/// coordinates are orthonormal in the degree-weighted inner product.
pub(crate) fn laplacian_eigenmap(w: &DMatrix<f64>, dim: usize) -> Result<EigenmapParts> {
    let n = w.nrows();
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be at least 1".into()));
    }
    let deg: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
    if deg.iter().any(|&d| d <= 0.0) {
        return Err(Error::Numerical("zero-degree node in similarity graph".into()));
    }
    let dis: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut l = DMatrix::from_fn(n, n, |i, j| {
        let v = -w[(i, j)] * dis[i] * dis[j];
        if i == j {
            1.0 + v
        } else {
            v
        }
    });
    // exact symmetry for the eigensolver
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (l[(i, j)] + l[(j, i)]);
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    let eig = l.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let min_eigenvalue = eig.eigenvalues[order[0]];
    let zero_multiplicity = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] < ZERO_TOL)
        .count();
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| eig.eigenvalues[i] >= ZERO_TOL)
        .take(dim)
        .collect();
    if kept.len() < dim {
        return Err(Error::Numerical(format!(
            "only {} nonzero Laplacian eigenvalues for a {dim}-dimensional embedding",
            kept.len()
        )));
    }
    let mut coords = DMatrix::zeros(n, dim);
    for (c, &idx) in kept.iter().enumerate() {
        for r in 0..n {
            coords[(r, c)] = eig.eigenvectors[(r, idx)] * dis[r];
        }
    }
    fix_column_signs(&mut coords);
    Ok(EigenmapParts {
        coords,
        eigenvalues: kept.iter().map(|&i| eig.eigenvalues[i]).collect(),
        zero_multiplicity,
        min_eigenvalue,
    })
}

/// Joint Laplacian manifold alignment: one eigenmap over the combined
/// similarity graph whose only cross-domain edges are the anchors.
pub fn jlma_align(pair: &DomainPair, cfg: &BaselineConfig) -> Result<AlignmentResult> {
    if pair.anchors.is_empty() {
        return Err(Error::InvalidAnchors("jlma needs at least one anchor".into()));
    }
    let wx = build_domain_similarity(&pair.x, &cfg.kparams)?;
    let wy = build_domain_similarity(&pair.y, &cfg.kparams)?;
    let joint = build_joint_similarity(pair, &wx, &wy, 1.0, 0.0)?;
    let parts = laplacian_eigenmap(&joint.w, cfg.dim)?;
    let n_x = pair.x.n_rows();
    Ok(AlignmentResult::from_embedding(Embedding {
        coords: parts.coords,
        eigenvalues: parts.eigenvalues,
        domain_ranges: vec![0..n_x, n_x..n_x + pair.y.n_rows()],
        truncated: false,
    }))
}

/// Similarity transform y -> scale * (y - source_mean) * rotation
/// + target_mean fitted by orthogonal Procrustes analysis.
#[derive(Debug, Clone)]
pub struct ProcrustesTransform {
    pub rotation: DMatrix<f64>,
    pub scale: f64,
    pub source_mean: Vec<f64>,
    pub target_mean: Vec<f64>,
    /// Rank-deficient anchor configuration: the fit is not unique.
    pub degenerate: bool,
}

impl ProcrustesTransform {
    pub fn apply(&self, points: &DMatrix<f64>) -> DMatrix<f64> {
        let mut centered = points.clone();
        for r in 0..centered.nrows() {
            for c in 0..centered.ncols() {
                centered[(r, c)] -= self.source_mean[c];
            }
        }
        let mut out = &centered * &self.rotation * self.scale;
        for r in 0..out.nrows() {
            for c in 0..out.ncols() {
                out[(r, c)] += self.target_mean[c];
            }
        }
        out
    }
}

/// Least-squares similarity transform mapping `source` points onto `target`
/// (rows are paired points): center both, solve the rotation from the SVD of
/// the cross-covariance, and set the scale to tr(S) / ||centered source||^2.
pub fn procrustes_fit(target: &DMatrix<f64>, source: &DMatrix<f64>) -> Result<ProcrustesTransform> {
    if target.nrows() != source.nrows() || target.ncols() != source.ncols() {
        return Err(Error::InvalidParameter(format!(
            "procrustes needs matching point sets, got {}x{} vs {}x{}",
            target.nrows(),
            target.ncols(),
            source.nrows(),
            source.ncols()
        )));
    }
    let (n, d) = (target.nrows(), target.ncols());
    if n == 0 || d == 0 {
        return Err(Error::EmptyData);
    }
    let target_mean: Vec<f64> = (0..d).map(|c| target.column(c).sum() / n as f64).collect();
    let source_mean: Vec<f64> = (0..d).map(|c| source.column(c).sum() / n as f64).collect();
    let ac = DMatrix::from_fn(n, d, |r, c| target[(r, c)] - target_mean[c]);
    let bc = DMatrix::from_fn(n, d, |r, c| source[(r, c)] - source_mean[c]);

    let m = bc.transpose() * &ac;
    let svd = m.svd(true, true);
    let u = svd.u.as_ref().ok_or_else(|| Error::Numerical("svd failed".into()))?;
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Numerical("svd failed".into()))?;
    let rotation = u * v_t;

    let s_max = svd.singular_values.iter().fold(0.0f64, |a, &v| a.max(v));
    let s_min = svd.singular_values.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let b_norm2 = bc.norm_squared();
    let degenerate = b_norm2 == 0.0 || s_min <= 1e-12 * s_max;
    let scale = if b_norm2 == 0.0 {
        1.0
    } else {
        svd.singular_values.iter().sum::<f64>() / b_norm2
    };
    Ok(ProcrustesTransform {
        rotation,
        scale,
        source_mean,
        target_mean,
        degenerate,
    })
}

/// Manifold alignment via Procrustes analysis: embed each domain with its
/// own Laplacian eigenmap, then map the Y embedding onto the X embedding by
/// the similarity transform fitted on the anchor pairs.
pub fn mapa_align(pair: &DomainPair, cfg: &BaselineConfig) -> Result<AlignmentResult> {
    let n_a = pair.anchors.len();
    if n_a < cfg.dim + 1 {
        return Err(Error::InvalidAnchors(format!(
            "mapa needs at least dim + 1 = {} anchors, got {n_a}",
            cfg.dim + 1
        )));
    }
    let wx = build_domain_similarity(&pair.x, &cfg.kparams)?;
    let wy = build_domain_similarity(&pair.y, &cfg.kparams)?;
    let ex = laplacian_eigenmap(&wx.weights, cfg.dim)?;
    let ey = laplacian_eigenmap(&wy.weights, cfg.dim)?;

    let ax = pair.anchors_x();
    let ay = pair.anchors_y();
    let a_coords = DMatrix::from_fn(n_a, cfg.dim, |r, c| ex.coords[(ax[r], c)]);
    let b_coords = DMatrix::from_fn(n_a, cfg.dim, |r, c| ey.coords[(ay[r], c)]);
    let transform = procrustes_fit(&a_coords, &b_coords)?;
    let y_aligned = transform.apply(&ey.coords);

    let (n_x, n_y) = (pair.x.n_rows(), pair.y.n_rows());
    let mut coords = DMatrix::zeros(n_x + n_y, cfg.dim);
    coords.rows_mut(0, n_x).copy_from(&ex.coords);
    coords.rows_mut(n_x, n_y).copy_from(&y_aligned);
    let mut result = AlignmentResult::from_embedding(Embedding {
        coords,
        // spectrum of the target space (the X-domain eigenmap)
        eigenvalues: ex.eigenvalues,
        domain_ranges: vec![0..n_x, n_x..n_x + n_y],
        truncated: false,
    });
    if transform.degenerate {
        result.flags.push("degenerate_procrustes".to_string());
    }
    Ok(result)
}

/// Dispatches on `cfg.method`.
pub fn baseline_align(pair: &DomainPair, cfg: &BaselineConfig) -> Result<AlignmentResult> {
    match cfg.method {
        BaselineMethod::Jlma => jlma_align(pair, cfg),
        BaselineMethod::Mapa => mapa_align(pair, cfg),
    }
}
