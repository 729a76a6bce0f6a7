//! Shortest Paths on the Union of Domains: within-domain geodesics over the
//! kernel graph, cross-domain geodesic estimation through anchors (two-path
//! aggregation, exact union-graph distances, or the dense NAMA variant), and
//! the MDS hand-off.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{normalize_01, DomainPair, NormalizeMode};
use crate::embed::{classical_mds, log_euclidean_raw, LOG_EPS};
use crate::error::{Error, Result};
use crate::graph::{build_domain_similarity, dense_distances, DomainSimilarity, KernelParams};
use crate::result::AlignmentResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Min,
    Max,
    Mean,
    AbsDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicMode {
    /// Two candidate paths, one through each endpoint's nearest anchor,
    /// combined by the configured aggregation.
    #[default]
    NearestAnchor,
    /// Exact shortest-path distances on the union graph (both domains plus
    /// anchor edges); aggregation is ignored.
    AllAnchors,
    /// Like `AllAnchors` but within-domain distances are dense all-pairs
    /// metric distances instead of k-NN geodesics (the NAMA variant).
    DenseNama,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeodesicConfig {
    pub aggregation: Aggregation,
    pub mode: GeodesicMode,
    /// Re-express joint distances as log-coordinate row distances before MDS.
    pub use_info_distance: bool,
    /// Anchor edge similarity; the anchor hop has length 1 - nu.
    pub nu: f64,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            aggregation: Aggregation::Min,
            mode: GeodesicMode::NearestAnchor,
            use_info_distance: false,
            nu: 1.0,
        }
    }
}

/// Estimated geodesic distances over both domains. Within-domain blocks are
/// always the single-domain shortest-path distances; the cross block depends
/// on the mode. Unreachable entries hold infinity and a false mask bit.
#[derive(Debug, Clone)]
pub struct CrossGeodesic {
    pub dists: DMatrix<f64>,
    pub reachable: DMatrix<bool>,
    pub n_x: usize,
    pub n_y: usize,
}

#[derive(Debug, Clone, Copy)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    // reversed: BinaryHeap pops the smallest distance first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem { dist: 0.0, node: src });
    while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, len) in &adj[u] {
            let nd = d + len;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem { dist: nd, node: v });
            }
        }
    }
    dist
}

/// All-pairs shortest-path distances over one domain's kernel graph. Edge
/// lengths are 1 - weight, 0-1 normalized over the whole length matrix;
/// pairs with zero similarity are non-edges, so disconnected components
/// yield infinite distances.
pub fn domain_geodesics(w: &DomainSimilarity) -> DMatrix<f64> {
    let n = w.n();
    let mut lengths = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            lengths[(i, j)] = 1.0 - w.weights[(i, j)];
        }
    }
    // zero diagonal pins the minimum at 0; non-edges hold the maximum 1
    // whenever any exist, so sparse-graph lengths pass through unchanged
    let lengths = normalize_01(&lengths, NormalizeMode::WholeMatrix).expect("finite lengths");

    let adj: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && w.weights[(i, j)] > 0.0)
                .map(|j| (j, lengths[(i, j)]))
                .collect()
        })
        .collect();

    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|i| dijkstra(&adj, i)).collect();
    let mut out = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

/// For each point, the anchor (as a position in `anchors`) minimizing the
/// within-domain geodesic distance, with its distance; ties go to the
/// earliest anchor in the list. `None` when no anchor is reachable.
pub fn nearest_anchor(dists: &DMatrix<f64>, anchors: &[usize]) -> Result<Vec<Option<(usize, f64)>>> {
    if anchors.is_empty() {
        return Err(Error::InvalidAnchors("anchor set is empty".into()));
    }
    Ok((0..dists.nrows())
        .map(|i| {
            let mut best: Option<(usize, f64)> = None;
            for (ord, &a) in anchors.iter().enumerate() {
                let d = dists[(i, a)];
                if d.is_finite() && best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((ord, d));
                }
            }
            best
        })
        .collect())
}

fn aggregate(agg: Aggregation, c1: f64, c2: f64) -> f64 {
    match agg {
        Aggregation::Min => c1.min(c2),
        _ if !c1.is_finite() || !c2.is_finite() => f64::INFINITY,
        Aggregation::Max => c1.max(c2),
        Aggregation::Mean => 0.5 * (c1 + c2),
        Aggregation::AbsDiff => (c1 - c2).abs(),
    }
}

fn union_dijkstra_from(
    src: usize,
    gx: &DMatrix<f64>,
    gy: &DMatrix<f64>,
    hop: f64,
    x_to_y: &[Option<usize>],
    y_to_x: &[Option<usize>],
) -> Vec<f64> {
    let (n_x, n_y) = (gx.nrows(), gy.nrows());
    let n = n_x + n_y;
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    loop {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            return dist;
        }
        done[u] = true;
        let du = dist[u];
        if u < n_x {
            for v in 0..n_x {
                let len = gx[(u, v)];
                if len.is_finite() && du + len < dist[v] {
                    dist[v] = du + len;
                }
            }
            if let Some(j) = x_to_y[u] {
                if du + hop < dist[n_x + j] {
                    dist[n_x + j] = du + hop;
                }
            }
        } else {
            let uy = u - n_x;
            for v in 0..n_y {
                let len = gy[(uy, v)];
                if len.is_finite() && du + len < dist[n_x + v] {
                    dist[n_x + v] = du + len;
                }
            }
            if let Some(i) = y_to_x[uy] {
                if du + hop < dist[i] {
                    dist[i] = du + hop;
                }
            }
        }
    }
}

/// Estimates cross-domain geodesics from the two within-domain distance
/// matrices. `nearest_anchor` mode combines the two candidate paths through
/// each endpoint's nearest anchor; `all_anchors`/`dense_nama` compute exact
/// union-graph shortest paths (within-domain blocks stay single-domain).
pub fn cross_geodesics(
    pair: &DomainPair,
    gx: &DMatrix<f64>,
    gy: &DMatrix<f64>,
    cfg: &GeodesicConfig,
) -> Result<CrossGeodesic> {
    if pair.anchors.is_empty() {
        return Err(Error::InvalidAnchors("cross-domain geodesics need at least one anchor".into()));
    }
    if !(cfg.nu > 0.0 && cfg.nu <= 1.0) {
        return Err(Error::InvalidParameter(format!("nu must be in (0, 1], got {}", cfg.nu)));
    }
    let (n_x, n_y) = (pair.x.n_rows(), pair.y.n_rows());
    if gx.nrows() != n_x || gx.ncols() != n_x || gy.nrows() != n_y || gy.ncols() != n_y {
        return Err(Error::InvalidParameter(
            "within-domain distance matrices must match the pair's sizes".into(),
        ));
    }
    let hop = 1.0 - cfg.nu;
    let n = n_x + n_y;
    let mut dists = DMatrix::from_element(n, n, f64::INFINITY);
    dists.view_mut((0, 0), (n_x, n_x)).copy_from(gx);
    dists.view_mut((n_x, n_x), (n_y, n_y)).copy_from(gy);

    match cfg.mode {
        GeodesicMode::NearestAnchor => {
            let ax = nearest_anchor(gx, &pair.anchors_x())?;
            let ay = nearest_anchor(gy, &pair.anchors_y())?;
            for i in 0..n_x {
                for j in 0..n_y {
                    let c1 = ax[i].map_or(f64::INFINITY, |(ord, d)| {
                        d + hop + gy[(pair.anchors[ord].1, j)]
                    });
                    let c2 = ay[j].map_or(f64::INFINITY, |(ord, d)| {
                        d + hop + gx[(pair.anchors[ord].0, i)]
                    });
                    let v = aggregate(cfg.aggregation, c1, c2);
                    dists[(i, n_x + j)] = v;
                    dists[(n_x + j, i)] = v;
                }
            }
        }
        GeodesicMode::AllAnchors | GeodesicMode::DenseNama => {
            let mut x_to_y = vec![None; n_x];
            let mut y_to_x = vec![None; n_y];
            for &(i, j) in &pair.anchors {
                x_to_y[i] = Some(j);
                y_to_x[j] = Some(i);
            }
            let rows: Vec<Vec<f64>> = (0..n_x)
                .into_par_iter()
                .map(|i| union_dijkstra_from(i, gx, gy, hop, &x_to_y, &y_to_x))
                .collect();
            for (i, row) in rows.iter().enumerate() {
                for j in 0..n_y {
                    dists[(i, n_x + j)] = row[n_x + j];
                    dists[(n_x + j, i)] = row[n_x + j];
                }
            }
        }
    }

    let reachable = DMatrix::from_fn(n, n, |i, j| dists[(i, j)].is_finite());
    Ok(CrossGeodesic {
        dists,
        reachable,
        n_x,
        n_y,
    })
}

/// Full SPUD pipeline: per-domain graphs and geodesics (or dense distances in
/// `dense_nama` mode), cross-domain estimation, optional log-coordinate row
/// distances, and classical MDS. Unreachable distances are imputed as 1.5x
/// the largest finite distance before embedding, with a result flag.
pub fn spud_align(
    pair: &DomainPair,
    kparams: &KernelParams,
    cfg: &GeodesicConfig,
    dim: usize,
) -> Result<AlignmentResult> {
    let (n_x, n_y) = (pair.x.n_rows(), pair.y.n_rows());
    let n = n_x + n_y;
    if dim == 0 || dim > n.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!(
            "dim must be in [1, {}], got {dim}",
            n.saturating_sub(1)
        )));
    }
    let (gx, gy) = match cfg.mode {
        GeodesicMode::DenseNama => (
            normalize_01(&dense_distances(&pair.x, kparams.metric), NormalizeMode::WholeMatrix)?,
            normalize_01(&dense_distances(&pair.y, kparams.metric), NormalizeMode::WholeMatrix)?,
        ),
        _ => (
            domain_geodesics(&build_domain_similarity(&pair.x, kparams)?),
            domain_geodesics(&build_domain_similarity(&pair.y, kparams)?),
        ),
    };
    let cg = cross_geodesics(pair, &gx, &gy, cfg)?;

    let mut joint = cg.dists;
    let mut flags = Vec::new();
    if cg.reachable.iter().any(|&r| !r) {
        let max_finite = joint.iter().filter(|v| v.is_finite()).fold(0.0f64, |a, &v| a.max(v));
        let fill = 1.5 * max_finite;
        for v in joint.iter_mut() {
            if !v.is_finite() {
                *v = fill;
            }
        }
        flags.push("unreachable_imputed".to_string());
    }

    if cfg.use_info_distance {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| joint.row(i).iter().copied().collect()).collect();
        let mut transformed = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = log_euclidean_raw(&rows[i], &rows[j], LOG_EPS);
                transformed[(i, j)] = v;
                transformed[(j, i)] = v;
            }
        }
        joint = transformed;
    }

    let mut embedding = classical_mds(&joint, dim)?;
    embedding.domain_ranges = vec![0..n_x, n_x..n];
    if embedding.truncated {
        flags.push("embedding_truncated".to_string());
    }
    Ok(AlignmentResult {
        embedding,
        coupling: None,
        mash: None,
        flags,
    })
}
