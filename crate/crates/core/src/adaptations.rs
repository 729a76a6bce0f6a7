//! Domain-adaptation generators: turn one labeled dataset into a co-domain
//! pair by feature splitting or distortion, plus anchor sampling.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{DataMatrix, DomainPair, RandomSource};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptationKind {
    /// Features partitioned uniformly at random.
    Random,
    /// Most important features form X, the rest form Y.
    Skewed,
    /// Important features divided evenly between the domains.
    Even,
    /// Y = X + i.i.d. Gaussian noise.
    Distort,
    /// Y = X rotated by a random orthogonal matrix.
    Rotation,
}

/// Ranks features by how much a supervised signal depends on them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceOracle {
    /// Permutation importance of a leave-one-out k-NN classifier: shuffle
    /// one feature column, measure the accuracy drop, average over
    /// `repetitions` shuffles.
    KnnPermutation { k: usize, repetitions: usize },
    /// Externally supplied ranking, most important feature index first.
    Fixed(Vec<usize>),
}

impl Default for ImportanceOracle {
    fn default() -> Self {
        ImportanceOracle::KnnPermutation {
            k: 5,
            repetitions: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptationSpec {
    pub kind: AdaptationKind,
    /// Fraction of rows anchored, in (0, 1].
    pub anchor_fraction: f64,
    pub seed: RandomSource,
    /// Gaussian distortion scale (distort only).
    pub noise_scale: f64,
    /// Feature ranking used by the skewed and even splits.
    pub importance_oracle: ImportanceOracle,
    /// Overrides the skewed split's X-domain size (default: ceil(p / 2)).
    pub x_feature_count: Option<usize>,
}

impl Default for AdaptationSpec {
    fn default() -> Self {
        AdaptationSpec {
            kind: AdaptationKind::Random,
            anchor_fraction: 0.2,
            seed: RandomSource::new(0),
            noise_scale: 0.05,
            importance_oracle: ImportanceOracle::default(),
            x_feature_count: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportanceMode {
    Skewed,
    Even,
}

impl ImportanceOracle {
    /// Feature indices ordered most important first. The k-NN oracle scores
    /// each feature by the leave-one-out accuracy drop after permuting it;
    /// ties break toward the lower feature index.
    pub fn rank_features(&self, data: &DataMatrix, source: &RandomSource) -> Result<Vec<usize>> {
        let p = data.n_features();
        match self {
            ImportanceOracle::Fixed(order) => {
                let mut seen = vec![false; p];
                if order.len() != p || order.iter().any(|&f| f >= p || std::mem::replace(&mut seen[f], true)) {
                    return Err(Error::InvalidParameter(format!(
                        "fixed importance ranking must be a permutation of 0..{p}"
                    )));
                }
                Ok(order.clone())
            }
            ImportanceOracle::KnnPermutation { k, repetitions } => {
                let labels = data
                    .labels
                    .as_ref()
                    .ok_or_else(|| Error::MissingLabels("importance ranking".into()))?;
                let n = data.n_rows();
                if *k == 0 || *k >= n {
                    return Err(Error::KTooLarge { k: *k, n });
                }
                if *repetitions == 0 {
                    return Err(Error::InvalidParameter(
                        "importance repetitions must be positive".into(),
                    ));
                }

                // squared distances suffice: monotone in the Euclidean metric
                let mut d2 = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in (i + 1)..n {
                        let v = (data.values.row(i) - data.values.row(j)).norm_squared();
                        d2[(i, j)] = v;
                        d2[(j, i)] = v;
                    }
                }
                let baseline = loo_accuracy(&d2, &labels.ids, *k);

                let mut scores = vec![0.0f64; p];
                for f in 0..p {
                    let col: Vec<f64> = (0..n).map(|i| data.values[(i, f)]).collect();
                    let mut drop_sum = 0.0;
                    for r in 0..*repetitions {
                        let mut perm: Vec<usize> = (0..n).collect();
                        perm.shuffle(&mut source.fork(&format!("importance-f{f}-r{r}")).rng());
                        // adjust one feature's contribution instead of
                        // recomputing all distances
                        let mut d2p = d2.clone();
                        for i in 0..n {
                            for j in (i + 1)..n {
                                let old = col[i] - col[j];
                                let new = col[perm[i]] - col[perm[j]];
                                let v = (d2p[(i, j)] - old * old + new * new).max(0.0);
                                d2p[(i, j)] = v;
                                d2p[(j, i)] = v;
                            }
                        }
                        drop_sum += baseline - loo_accuracy(&d2p, &labels.ids, *k);
                    }
                    scores[f] = drop_sum / *repetitions as f64;
                }

                let mut order: Vec<usize> = (0..p).collect();
                order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
                Ok(order)
            }
        }
    }
}

/// Leave-one-out k-NN accuracy from a precomputed squared-distance matrix.
/// Vote ties break by smaller cumulative distance, then lower label id.
fn loo_accuracy(d2: &DMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let n = labels.len();
    let mut correct = 0usize;
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| d2[(i, a)].total_cmp(&d2[(i, b)]).then(a.cmp(&b)));
        order.truncate(k);
        let mut tally: Vec<(usize, usize, f64)> = Vec::new();
        for &j in &order {
            match tally.iter_mut().find(|t| t.0 == labels[j]) {
                Some(t) => {
                    t.1 += 1;
                    t.2 += d2[(i, j)];
                }
                None => tally.push((labels[j], 1, d2[(i, j)])),
            }
        }
        tally.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.total_cmp(&b.2)).then(a.0.cmp(&b.0)));
        if tally[0].0 == labels[i] {
            correct += 1;
        }
    }
    correct as f64 / n as f64
}

/// Splits rows shared by both domains into anchored and free, keeping
/// ceil(fraction * n) sorted row indices as (i, i) anchors.
pub fn sample_anchors(pair: &DomainPair, fraction: f64, source: &RandomSource) -> Result<DomainPair> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "anchor fraction must be in (0, 1], got {fraction}"
        )));
    }
    let n = pair.x.n_rows();
    if n != pair.y.n_rows() {
        return Err(Error::InvalidAnchors(format!(
            "anchor sampling needs shared row identity, got {n} vs {} rows",
            pair.y.n_rows()
        )));
    }
    let m = (fraction * n as f64).ceil() as usize;
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut source.rng());
    rows.truncate(m);
    rows.sort_unstable();
    pair.with_anchors(rows.into_iter().map(|i| (i, i)).collect())
}

fn partition(data: &DataMatrix, mut xs: Vec<usize>, mut ys: Vec<usize>, spec: &AdaptationSpec) -> Result<DomainPair> {
    // domains keep the original column order regardless of how the
    // partition was drawn
    xs.sort_unstable();
    ys.sort_unstable();
    let pair = DomainPair::new(data.select_features(&xs), data.select_features(&ys), Vec::new())?;
    sample_anchors(&pair, spec.anchor_fraction, &spec.seed.fork("anchors"))
}

/// Random feature split: X gets ceil(p / 2) features, Y the rest.
pub fn split_random(data: &DataMatrix, spec: &AdaptationSpec) -> Result<DomainPair> {
    let p = data.n_features();
    if p < 2 {
        return Err(Error::InvalidParameter(format!(
            "feature split needs at least 2 features, got {p}"
        )));
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut spec.seed.fork("split").rng());
    let ys = order.split_off(p.div_ceil(2));
    partition(data, order, ys, spec)
}

/// Importance-guided split. Skewed: the top features by importance form X
/// (count from `x_feature_count`, default ceil(p / 2)). Even: the important
/// half is divided between the domains (X gets ceil(h / 2) of it), and the
/// remaining features fill both domains up to the same sizes as the random
/// split.
pub fn split_by_importance(
    data: &DataMatrix,
    spec: &AdaptationSpec,
    mode: ImportanceMode,
) -> Result<DomainPair> {
    let p = data.n_features();
    if p < 2 {
        return Err(Error::InvalidParameter(format!(
            "feature split needs at least 2 features, got {p}"
        )));
    }
    let ranking = spec
        .importance_oracle
        .rank_features(data, &spec.seed.fork("importance"))?;

    match mode {
        ImportanceMode::Skewed => {
            let h = spec.x_feature_count.unwrap_or(p.div_ceil(2));
            if h == 0 || h >= p {
                return Err(Error::InvalidParameter(format!(
                    "x_feature_count must leave both domains nonempty, got {h} of {p}"
                )));
            }
            let xs = ranking[..h].to_vec();
            let ys = ranking[h..].to_vec();
            partition(data, xs, ys, spec)
        }
        ImportanceMode::Even => {
            let h = p.div_ceil(2);
            let mut important = ranking[..h].to_vec();
            let mut rest = ranking[h..].to_vec();
            important.shuffle(&mut spec.seed.fork("even-important").rng());
            rest.shuffle(&mut spec.seed.fork("even-rest").rng());
            let mut xs = important.split_off(important.len() - h.div_ceil(2));
            let mut ys = important; // floor(h / 2) important features
            let x_total = p.div_ceil(2);
            for f in rest {
                if xs.len() < x_total {
                    xs.push(f);
                } else {
                    ys.push(f);
                }
            }
            partition(data, xs, ys, spec)
        }
    }
}

/// Y = X + N(0, noise_scale^2) per cell; zero scale copies X bit-for-bit.
pub fn distort_gaussian(data: &DataMatrix, spec: &AdaptationSpec) -> Result<DomainPair> {
    if !(spec.noise_scale >= 0.0 && spec.noise_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise_scale must be a nonnegative real, got {}",
            spec.noise_scale
        )));
    }
    let y = if spec.noise_scale == 0.0 {
        data.clone()
    } else {
        let normal = Normal::new(0.0, spec.noise_scale)
            .map_err(|e| Error::InvalidParameter(format!("noise distribution: {e}")))?;
        let mut rng = spec.seed.fork("distort").rng();
        let mut values = data.values.clone();
        for r in 0..values.nrows() {
            for c in 0..values.ncols() {
                values[(r, c)] += normal.sample(&mut rng);
            }
        }
        DataMatrix {
            values,
            labels: data.labels.clone(),
            feature_names: data.feature_names.clone(),
        }
    };
    let pair = DomainPair::new(data.clone(), y, Vec::new())?;
    sample_anchors(&pair, spec.anchor_fraction, &spec.seed.fork("anchors"))
}

/// Random proper rotation: orthogonal factor of a seeded Gaussian matrix,
/// sign-canonicalized (positive R diagonal) and determinant fixed to +1.
pub(crate) fn random_rotation(p: usize, source: &RandomSource) -> DMatrix<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = source.rng();
    let m = DMatrix::from_fn(p, p, |_, _| normal.sample(&mut rng));
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            for i in 0..p {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        let last = p - 1;
        for i in 0..p {
            q[(i, last)] = -q[(i, last)];
        }
    }
    q
}

/// Y = X * Q for a seeded random rotation Q.
pub fn distort_rotation(data: &DataMatrix, spec: &AdaptationSpec) -> Result<DomainPair> {
    let p = data.n_features();
    if p < 2 {
        return Err(Error::InvalidParameter(format!(
            "rotation needs at least 2 features, got {p}"
        )));
    }
    let q = random_rotation(p, &spec.seed.fork("rotation"));
    let y = DataMatrix {
        values: &data.values * &q,
        labels: data.labels.clone(),
        // rotated columns are mixtures; the original names no longer apply
        feature_names: None,
    };
    let pair = DomainPair::new(data.clone(), y, Vec::new())?;
    sample_anchors(&pair, spec.anchor_fraction, &spec.seed.fork("anchors"))
}

/// Dispatches on `spec.kind`.
pub fn apply(data: &DataMatrix, spec: &AdaptationSpec) -> Result<DomainPair> {
    match spec.kind {
        AdaptationKind::Random => split_random(data, spec),
        AdaptationKind::Skewed => split_by_importance(data, spec, ImportanceMode::Skewed),
        AdaptationKind::Even => split_by_importance(data, spec, ImportanceMode::Even),
        AdaptationKind::Distort => distort_gaussian(data, spec),
        AdaptationKind::Rotation => distort_rotation(data, spec),
    }
}

/// Keeps ceil(fraction * n_x) seeded-random X rows (sorted), leaves Y
/// untouched, and anchors every kept row to its original Y counterpart.
/// Models a small labeled domain paired with a large unlabeled one.
pub fn restrict_x_rows(pair: &DomainPair, fraction: f64, source: &RandomSource) -> Result<DomainPair> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "row fraction must be in (0, 1], got {fraction}"
        )));
    }
    let n = pair.x.n_rows();
    if n != pair.y.n_rows() {
        return Err(Error::InvalidAnchors(format!(
            "row restriction needs shared row identity, got {n} vs {} rows",
            pair.y.n_rows()
        )));
    }
    let m = (fraction * n as f64).ceil() as usize;
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut source.rng());
    rows.truncate(m);
    rows.sort_unstable();
    let anchors: Vec<(usize, usize)> = rows.iter().enumerate().map(|(ni, &oi)| (ni, oi)).collect();
    DomainPair::new(pair.x.select_rows(&rows), pair.y.clone(), anchors)
}
