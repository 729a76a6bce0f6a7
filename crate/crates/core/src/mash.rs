//! Manifold Alignment via Stochastic Hopping: the joint diffusion operator,
//! entropy-based time-scale selection, integrated diffusion distances, the
//! pseudo-connection refinement loop with held-out validation, and label
//! transfer through the aligned embedding.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{normalize_01, DomainPair, NormalizeMode, RandomSource};
use crate::embed::{classical_mds, InfoDistance};
use crate::error::{Error, Result};
use crate::graph::{build_domain_similarity, build_joint_similarity, JointSimilarity, KernelParams};
use crate::metrics::{foscttm_from_joint, knn_predict};
use crate::result::AlignmentResult;

/// Row-stochastic random-walk operator over the joint graph.
#[derive(Debug, Clone)]
pub struct DiffusionOperator {
    pub p: DMatrix<f64>,
    /// Diffusion time; set by time-scale selection or an override.
    pub t: Option<usize>,
    /// The joint similarity the operator was derived from.
    pub source: JointSimilarity,
}

impl DiffusionOperator {
    /// P^t by literal repeated multiplication (t is small after knee
    /// selection; stochasticity keeps entries in [0, 1]).
    pub fn powered(&self) -> Result<DMatrix<f64>> {
        let t = self
            .t
            .ok_or_else(|| Error::InvalidParameter("diffusion time scale is not set".into()))?;
        if t == 0 {
            return Err(Error::InvalidParameter("diffusion time must be positive".into()));
        }
        let mut out = self.p.clone();
        for _ in 1..t {
            out = &out * &self.p;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MashConfig {
    pub info_distance: InfoDistance,
    /// Pseudo-connection threshold on normalized integrated distances.
    pub eta: f64,
    /// Refinement iteration cap; 0 disables the loop entirely (MASH-).
    pub max_iterations: usize,
    /// Cap on pseudo-connections added per iteration.
    pub max_new_per_iter: usize,
    /// Fraction of anchors reserved for held-out validation.
    pub holdout_fraction: f64,
    /// Bypass entropy-based selection with a fixed diffusion time.
    pub t_override: Option<usize>,
    /// Anchor similarity written into the joint graph.
    pub nu: f64,
    /// Neighbor-extension strength of the joint graph.
    pub gamma: f64,
    /// Largest diffusion time considered by entropy selection.
    pub t_max: usize,
}

impl Default for MashConfig {
    fn default() -> Self {
        MashConfig {
            info_distance: InfoDistance::Potential,
            eta: 0.2,
            max_iterations: 10,
            max_new_per_iter: 10,
            holdout_fraction: 0.2,
            t_override: None,
            nu: 1.0,
            gamma: 1.0,
            t_max: 100,
        }
    }
}

impl MashConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must be in (0, 1), got {}",
                self.eta
            )));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "holdout_fraction must be in (0, 1), got {}",
                self.holdout_fraction
            )));
        }
        if self.max_new_per_iter == 0 {
            return Err(Error::InvalidParameter(
                "max_new_per_iter must be positive".into(),
            ));
        }
        if self.t_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "t_max must be at least 2, got {}",
                self.t_max
            )));
        }
        if self.t_override == Some(0) {
            return Err(Error::InvalidParameter("t_override must be positive".into()));
        }
        Ok(())
    }
}

/// Per-run refinement record; serialized alongside alignment artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MashDiagnostics {
    /// Diffusion time of the final (best accepted) operator.
    pub t_selected: usize,
    /// Entropy H(t) for t = 1..=t_max of the final operator; empty when the
    /// time scale was overridden.
    pub vne_curve: Vec<f64>,
    /// Refinement iterations executed (accepted + reverted).
    pub iterations_run: usize,
    /// Pairs trialed per iteration; consult `accepted_iterations` for which
    /// survived.
    pub connections_added: Vec<Vec<(usize, usize)>>,
    /// Held-out FOSCTTM: baseline first, then one entry per iteration.
    pub holdout_foscttm_trace: Vec<f64>,
    /// Accept/revert outcome per iteration.
    pub accepted_iterations: Vec<bool>,
    pub reverted_iterations: usize,
}

/// P(i, j) = W(i, j) / sum_j W(i, j); the unit diagonal of W guarantees
/// positive row sums.
pub fn row_normalize(w: &JointSimilarity) -> DiffusionOperator {
    let n = w.n();
    let mut p = w.w.clone();
    for i in 0..n {
        let sum: f64 = p.row(i).iter().sum();
        assert!(sum > 0.0, "joint similarity row {i} sums to zero");
        for j in 0..n {
            p[(i, j)] /= sum;
        }
    }
    DiffusionOperator {
        p,
        t: None,
        source: w.clone(),
    }
}

/// Outcome of entropy-based time-scale selection.
#[derive(Debug, Clone)]
pub struct VneSelection {
    pub t: usize,
    /// H(t) for t = 1..=t_max.
    pub curve: Vec<f64>,
}

/// Picks the diffusion time at the knee of the Von Neumann entropy curve.
/// The spectrum of the symmetric conjugate D^{-1/2} W D^{-1/2} (equal to the
/// spectrum of P) is powered, normalized, and summarized as entropy H(t);
/// the knee is the largest discrete second difference, with flat curves
/// falling back to t = 1 and ties to the smallest t.
pub fn select_t(p: &DiffusionOperator, t_max: usize) -> Result<VneSelection> {
    if t_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "t_max must be at least 2, got {t_max}"
        )));
    }
    let n = p.source.n();
    let deg: Vec<f64> = (0..n).map(|i| p.source.w.row(i).iter().sum()).collect();
    let conj = DMatrix::from_fn(n, n, |i, j| p.source.w[(i, j)] / (deg[i] * deg[j]).sqrt());
    let lam: Vec<f64> = conj
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .filter(|&l| l >= 0.0)
        .collect();
    if lam.is_empty() {
        return Err(Error::Numerical(
            "no nonnegative eigenvalues in the diffusion spectrum".into(),
        ));
    }

    let mut pow = lam.clone();
    let mut curve = Vec::with_capacity(t_max);
    for _ in 1..=t_max {
        let sum: f64 = pow.iter().sum();
        let mut h = 0.0;
        if sum > 0.0 {
            for &v in &pow {
                let eta = v / sum;
                if eta > 0.0 {
                    h -= eta * eta.ln();
                }
            }
        }
        curve.push(h);
        for (v, &l) in pow.iter_mut().zip(&lam) {
            *v *= l;
        }
    }

    let mut best_t = 1;
    let mut best = f64::NEG_INFINITY;
    for t in 2..t_max {
        let d2 = curve[t] - 2.0 * curve[t - 1] + curve[t - 2];
        if d2 > best {
            best = d2;
            best_t = t;
        }
    }
    let t = if !best.is_finite() || best.abs() <= 1e-12 {
        1
    } else {
        best_t
    };
    Ok(VneSelection { t, curve })
}

/// Integrated diffusion distance: the chosen information distance between
/// all row pairs of P^t, 0-1 normalized over the whole matrix.
pub fn integrated_diffusion_distance(
    p: &DiffusionOperator,
    info: InfoDistance,
) -> Result<DMatrix<f64>> {
    let pt = p.powered()?;
    let n = pt.nrows();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| pt.row(i).iter().copied().collect()).collect();
    let tri: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| ((i + 1)..n).map(|j| info.eval_raw(&rows[i], &rows[j])).collect())
        .collect();
    let mut d = DMatrix::zeros(n, n);
    for (i, row) in tri.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    normalize_01(&d, NormalizeMode::WholeMatrix)
}

/// Writes up to `max_new_per_iter` new cross edges W_XY(i, j) = nu - D(i, j)
/// for the smallest-distance candidate pairs below the threshold, skipping
/// pairs already connected or excluded. Ties order lexicographically by
/// (distance, i, j).
pub fn add_pseudo_connections(
    w: &JointSimilarity,
    d: &DMatrix<f64>,
    cfg: &MashConfig,
    excluded: &HashSet<(usize, usize)>,
) -> (JointSimilarity, Vec<(usize, usize)>) {
    // capping at nu keeps the written weight positive even when eta > nu
    let threshold = cfg.eta.min(cfg.nu);
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..w.n_x {
        for j in 0..w.n_y {
            let dv = d[(i, w.n_x + j)];
            if dv < threshold && w.cross(i, j) == 0.0 && !excluded.contains(&(i, j)) {
                cands.push((dv, i, j));
            }
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    cands.truncate(cfg.max_new_per_iter);

    let mut out = w.clone();
    let mut added = Vec::with_capacity(cands.len());
    for (dv, i, j) in cands {
        out.set_cross(i, j, cfg.nu - dv);
        added.push((i, j));
    }
    (out, added)
}

struct LoopState {
    w: JointSimilarity,
    p: DiffusionOperator,
    curve: Vec<f64>,
    d: DMatrix<f64>,
    holdout_foscttm: Option<f64>,
}

/// Full MASH pipeline. Anchors are split into training (used to build the
/// joint graph) and held-out validation pairs; each refinement iteration
/// rebuilds the operator (re-selecting t), recomputes integrated distances,
/// and keeps the change only on strict held-out FOSCTTM decrease, excluding
/// rejected pairs from later consideration. With max_iterations = 0 (MASH-)
/// all anchors train and the loop never runs. The best integrated distances
/// are embedded by MDS; the coupling block of the best P^t is returned.
pub fn mash_align(
    pair: &DomainPair,
    kparams: &KernelParams,
    cfg: &MashConfig,
    dim: usize,
    source: &RandomSource,
) -> Result<AlignmentResult> {
    cfg.validate()?;
    if pair.anchors.is_empty() {
        return Err(Error::InvalidAnchors("mash needs at least one anchor".into()));
    }
    let (n_x, n_y) = (pair.x.n_rows(), pair.y.n_rows());
    let n = n_x + n_y;
    if dim == 0 || dim > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "dim must be in [1, {}], got {dim}",
            n - 1
        )));
    }

    let (training, holdout) = if cfg.max_iterations == 0 {
        (pair.anchors.clone(), Vec::new())
    } else {
        let n_a = pair.anchors.len();
        if cfg.holdout_fraction * (n_a as f64) < 1.0 {
            return Err(Error::InvalidAnchors(format!(
                "holdout_fraction {} of {n_a} anchors reserves no validation pairs",
                cfg.holdout_fraction
            )));
        }
        let m = (cfg.holdout_fraction * n_a as f64).floor() as usize;
        let mut order: Vec<usize> = (0..n_a).collect();
        order.shuffle(&mut source.fork("holdout").rng());
        let mut hold: Vec<(usize, usize)> = order[..m].iter().map(|&o| pair.anchors[o]).collect();
        let mut train: Vec<(usize, usize)> = order[m..].iter().map(|&o| pair.anchors[o]).collect();
        hold.sort_unstable();
        train.sort_unstable();
        (train, hold)
    };

    let wx = build_domain_similarity(&pair.x, kparams)?;
    let wy = build_domain_similarity(&pair.y, kparams)?;
    let train_pair = pair.with_anchors(training)?;
    let w0 = build_joint_similarity(&train_pair, &wx, &wy, cfg.nu, cfg.gamma)?;

    let pass = |w: &JointSimilarity| -> Result<(DiffusionOperator, Vec<f64>, DMatrix<f64>)> {
        let mut p = row_normalize(w);
        let (t, curve) = match cfg.t_override {
            Some(t) => (t, Vec::new()),
            None => {
                let sel = select_t(&p, cfg.t_max)?;
                (sel.t, sel.curve)
            }
        };
        p.t = Some(t);
        let d = integrated_diffusion_distance(&p, cfg.info_distance)?;
        Ok((p, curve, d))
    };

    let (p0, curve0, d0) = pass(&w0)?;
    let mut best = LoopState {
        holdout_foscttm: if holdout.is_empty() {
            None
        } else {
            Some(foscttm_from_joint(&d0, n_x, &holdout)?)
        },
        w: w0,
        p: p0,
        curve: curve0,
        d: d0,
    };

    let mut trace = Vec::new();
    if let Some(f) = best.holdout_foscttm {
        trace.push(f);
    }
    let mut connections_added = Vec::new();
    let mut accepted_iterations = Vec::new();
    let mut excluded: HashSet<(usize, usize)> = HashSet::new();
    let mut reverted = 0usize;

    for _ in 0..cfg.max_iterations {
        let (w_trial, added) = add_pseudo_connections(&best.w, &best.d, cfg, &excluded);
        if added.is_empty() {
            break; // no candidates left: natural termination
        }
        let (p1, curve1, d1) = pass(&w_trial)?;
        let f1 = foscttm_from_joint(&d1, n_x, &holdout)?;
        connections_added.push(added.clone());
        trace.push(f1);
        if f1 < best.holdout_foscttm.expect("holdout exists when iterating") {
            accepted_iterations.push(true);
            best = LoopState {
                w: w_trial,
                p: p1,
                curve: curve1,
                d: d1,
                holdout_foscttm: Some(f1),
            };
        } else {
            accepted_iterations.push(false);
            reverted += 1;
            excluded.extend(added);
        }
    }

    let mut embedding = classical_mds(&best.d, dim)?;
    embedding.domain_ranges = vec![0..n_x, n_x..n];
    let mut flags = Vec::new();
    if embedding.truncated {
        flags.push("embedding_truncated".to_string());
    }

    let pt = best.p.powered()?;
    let coupling = pt.view((0, n_x), (n_x, n_y)).into_owned();
    let diagnostics = MashDiagnostics {
        t_selected: best.p.t.expect("time scale set"),
        vne_curve: best.curve,
        iterations_run: accepted_iterations.len(),
        connections_added,
        holdout_foscttm_trace: trace,
        accepted_iterations,
        reverted_iterations: reverted,
    };
    Ok(AlignmentResult {
        embedding,
        coupling: Some(coupling),
        mash: Some(diagnostics),
        flags,
    })
}

/// Predicts labels for domain Y by k-NN vote among embedded X points.
pub fn transfer_labels(
    result: &AlignmentResult,
    labels_x: &[usize],
    k: usize,
) -> Result<Vec<usize>> {
    if result.embedding.domain_ranges.len() < 2 {
        return Err(Error::InvalidParameter(
            "embedding does not hold two domains".into(),
        ));
    }
    let x = result.embedding.domain_coords(0);
    let y = result.embedding.domain_coords(1);
    if labels_x.len() != x.nrows() {
        return Err(Error::MissingLabels(format!(
            "{} labels for {} X rows",
            labels_x.len(),
            x.nrows()
        )));
    }
    knn_predict(&x, labels_x, &y, k)
}
