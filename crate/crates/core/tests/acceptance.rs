//! End-to-end acceptance run: six checks, one printed line each.
//!
//! Prints `[ACCEPTANCE] <name>: PASS` or `[ACCEPTANCE] <name>: FAIL (<reason>)`
//! per check and exits nonzero if any check failed. Two checks depend on
//! datasets that cannot be redistributed with the repository; they report an
//! honest failure until `python3 tools/fetch_datasets.py` (network required)
//! has populated `data/`.

use manifold_align::adaptations::{
    ImportanceMode,
    apply, distort_gaussian, distort_rotation, restrict_x_rows, split_by_importance,
    AdaptationKind, AdaptationSpec,
};
use manifold_align::data::{load_csv, DataMatrix, DomainPair, RandomSource};
use manifold_align::embed::{classical_mds, hellinger, Embedding, InfoDistance};
use manifold_align::graph::{
    alpha_decay_kernel, build_domain_similarity, build_joint_similarity, DomainSimilarity,
    JointSimilarity, KernelParams,
};
use manifold_align::mash::{
    add_pseudo_connections, integrated_diffusion_distance, mash_align, row_normalize, select_t,
    transfer_labels, MashConfig,
};
use manifold_align::metrics::{evaluate, foscttm, MetricsReport};
use manifold_align::spud::{
    cross_geodesics, domain_geodesics, spud_align, Aggregation, GeodesicConfig, GeodesicMode,
};
use manifold_align::result::AlignmentResult;
use nalgebra::DMatrix;
use rand::Rng;
use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

fn main() {
    let checks: &[(&str, fn() -> Result<(), String>)] = &[
        ("seeds_figure_reproduction", seeds_figure_reproduction),
        ("breast_cancer_label_transfer", breast_cancer_label_transfer),
        ("method_ordering", method_ordering),
        ("oracle_equivalence", oracle_equivalence),
        ("invariant_suite", invariant_suite),
        ("degenerate_input_suite", degenerate_input_suite),
    ];
    let mut failed = false;
    for (name, check) in checks {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("[ACCEPTANCE] {name}: PASS ({secs:.1}s)"),
            Err(reason) => {
                failed = true;
                println!("[ACCEPTANCE] {name}: FAIL ({reason})");
            }
        }
    }
    if failed {
        std::process::exit(1);
    }
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn fail<T>(e: impl std::fmt::Display) -> Result<T, String> {
    Err(e.to_string())
}

fn budget(started: Instant, limit_secs: f64) -> Result<(), String> {
    let secs = started.elapsed().as_secs_f64();
    if secs > limit_secs {
        return Err(format!("took {secs:.1}s, budget {limit_secs:.0}s"));
    }
    Ok(())
}

fn in_range(what: &str, value: f64, lo: f64, hi: f64) -> Result<(), String> {
    if value < lo || value > hi {
        return Err(format!("{what} = {value:.4}, outside [{lo}, {hi}]"));
    }
    Ok(())
}

/// Identity pairs for every non-anchored X row; the standard evaluation set
/// for adaptation-generated pairs, where row i of X corresponds to row i of Y.
fn eval_pairs(pair: &DomainPair) -> Vec<(usize, usize)> {
    let anchored: HashSet<usize> = pair.anchors.iter().map(|&(i, _)| i).collect();
    (0..pair.x.n_rows())
        .filter(|i| !anchored.contains(i))
        .map(|i| (i, i))
        .collect()
}

fn score(pair: &DomainPair, res: &AlignmentResult) -> Result<MetricsReport, String> {
    let lx = &pair.x.labels.as_ref().ok_or("X labels missing")?.ids;
    let ly = &pair.y.labels.as_ref().ok_or("Y labels missing")?.ids;
    evaluate(&res.embedding, lx, ly, &eval_pairs(pair), 5).map_err(|e| e.to_string())
}

// --- check 1: Seeds, skewed split, 5% anchors, potential distance ---------

fn seeds_figure_reproduction() -> Result<(), String> {
    let path = data_dir().join("seeds.csv");
    if !path.exists() {
        return Err(
            "data/seeds.csv missing — not redistributable; run `python3 tools/fetch_datasets.py` \
             (network required) and re-run"
                .into(),
        );
    }
    let started = Instant::now();
    let data = load_csv(&path, Some("class")).or_else(fail)?;
    let kp = KernelParams::default();
    let (mut ce_sum, mut fos_sum) = (0.0, 0.0);
    for seed in 0..10u64 {
        let spec = AdaptationSpec {
            kind: AdaptationKind::Skewed,
            anchor_fraction: 0.05,
            seed: RandomSource::new(seed),
            ..Default::default()
        };
        let pair = apply(&data, &spec).or_else(fail)?;
        let dim = pair.x.n_features().min(pair.y.n_features());
        let cfg = MashConfig {
            info_distance: InfoDistance::Potential,
            ..Default::default()
        };
        let res = mash_align(&pair, &kp, &cfg, dim, &RandomSource::new(seed)).or_else(fail)?;
        let rep = score(&pair, &res)?;
        ce_sum += rep.ce_accuracy;
        fos_sum += rep.foscttm;
    }
    in_range("mean CE", ce_sum / 10.0, 0.78, 0.95)?;
    in_range("mean FOSCTTM", fos_sum / 10.0, 0.05, 0.20)?;
    budget(started, 120.0)
}

// --- check 2: breast cancer label transfer --------------------------------

fn breast_cancer_label_transfer() -> Result<(), String> {
    let path = data_dir().join("breast_cancer_original.csv");
    if !path.exists() {
        return Err(
            "data/breast_cancer_original.csv missing — not redistributable; run \
             `python3 tools/fetch_datasets.py` (network required) and re-run"
                .into(),
        );
    }
    let started = Instant::now();
    let data = load_csv(&path, Some("class")).or_else(fail)?;
    let mut acc_sum = 0.0;
    for seed in 0..10u64 {
        let source = RandomSource::new(seed);
        let spec = AdaptationSpec {
            kind: AdaptationKind::Skewed,
            x_feature_count: Some(4),
            seed: source,
            ..Default::default()
        };
        // domain A: the four most important features, 10% of the rows;
        // domain B: the remaining five features, every row
        let split = split_by_importance(&data, &spec, ImportanceMode::Skewed).or_else(fail)?;
        let pair = restrict_x_rows(&split, 0.10, &source.fork("restrict")).or_else(fail)?;
        let cfg = MashConfig {
            info_distance: InfoDistance::Potential,
            ..Default::default()
        };
        let res = mash_align(&pair, &KernelParams::default(), &cfg, 4, &source).or_else(fail)?;
        let labels_x = &pair.x.labels.as_ref().ok_or("X labels missing")?.ids;
        let labels_y = &pair.y.labels.as_ref().ok_or("Y labels missing")?.ids;
        let predicted = transfer_labels(&res, labels_x, 5).or_else(fail)?;
        let hits = predicted.iter().zip(labels_y).filter(|(p, t)| p == t).count();
        acc_sum += hits as f64 / labels_y.len() as f64;
    }
    let acc = acc_sum / 10.0;
    if acc < 0.93 {
        return Err(format!("mean transfer accuracy {acc:.4} < 0.93"));
    }
    budget(started, 120.0)
}

// --- check 3: directional method ordering on the bundled corpus -----------

const ORDERING_SLACK: f64 = 0.03;

fn spud_best(pair: &DomainPair, kp: &KernelParams, dim: usize) -> Result<f64, String> {
    let mut best = f64::NEG_INFINITY;
    for use_info in [false, true] {
        for aggregation in [
            Aggregation::Min,
            Aggregation::Max,
            Aggregation::Mean,
            Aggregation::AbsDiff,
        ] {
            let cfg = GeodesicConfig {
                aggregation,
                mode: GeodesicMode::NearestAnchor,
                use_info_distance: use_info,
                ..Default::default()
            };
            let res = spud_align(pair, kp, &cfg, dim).or_else(fail)?;
            best = best.max(score(pair, &res)?.combined);
        }
        // aggregation has no effect in all-anchors mode
        let cfg = GeodesicConfig {
            mode: GeodesicMode::AllAnchors,
            use_info_distance: use_info,
            ..Default::default()
        };
        let res = spud_align(pair, kp, &cfg, dim).or_else(fail)?;
        best = best.max(score(pair, &res)?.combined);
    }
    Ok(best)
}

fn mash_best(
    pair: &DomainPair,
    kp: &KernelParams,
    dim: usize,
    max_iterations: usize,
    source: &RandomSource,
) -> Result<f64, String> {
    let mut best = f64::NEG_INFINITY;
    for info in [
        InfoDistance::Potential,
        InfoDistance::Hellinger,
        InfoDistance::Kl,
    ] {
        if max_iterations == 0 {
            let cfg = MashConfig {
                info_distance: info,
                max_iterations: 0,
                ..Default::default()
            };
            let res = mash_align(pair, kp, &cfg, dim, source).or_else(fail)?;
            best = best.max(score(pair, &res)?.combined);
        } else {
            for eta in [0.4, 0.7] {
                for holdout_fraction in [0.05, 0.2] {
                    let cfg = MashConfig {
                        info_distance: info,
                        eta,
                        holdout_fraction,
                        max_iterations,
                        ..Default::default()
                    };
                    let res = mash_align(pair, kp, &cfg, dim, source).or_else(fail)?;
                    best = best.max(score(pair, &res)?.combined);
                }
            }
        }
    }
    Ok(best)
}

/// Per cell (dataset x adaptation), each method reports its best combined
/// score over a small parameter grid; the cell means are then compared
/// directionally. Mirrors how the benchmark aggregates per-method bests.
fn method_ordering() -> Result<(), String> {
    let started = Instant::now();
    let datasets = ["iris", "wine", "wdbc", "digits", "artificial_tree"];
    let kp = KernelParams::default();
    let source = RandomSource::new(7);
    let (mut spud_sum, mut mash_sum, mut minus_sum) = (0.0, 0.0, 0.0);
    let (mut rot_mash_sum, mut rot_minus_sum) = (0.0, 0.0);
    for name in datasets {
        let path = data_dir().join(format!("{name}.csv"));
        let data = load_csv(&path, Some("class")).or_else(fail)?;
        for kind in [
            AdaptationKind::Random,
            AdaptationKind::Skewed,
            AdaptationKind::Even,
        ] {
            let spec = AdaptationSpec {
                kind,
                anchor_fraction: 0.2,
                seed: source,
                ..Default::default()
            };
            let pair = apply(&data, &spec).or_else(fail)?;
            let dim = pair.x.n_features().min(pair.y.n_features());
            spud_sum += spud_best(&pair, &kp, dim)?;
            mash_sum += mash_best(&pair, &kp, dim, 10, &source)?;
            minus_sum += mash_best(&pair, &kp, dim, 0, &source)?;
        }
        let spec = AdaptationSpec {
            kind: AdaptationKind::Rotation,
            anchor_fraction: 0.2,
            seed: source,
            ..Default::default()
        };
        let pair = apply(&data, &spec).or_else(fail)?;
        let dim = pair.x.n_features();
        rot_mash_sum += mash_best(&pair, &kp, dim, 10, &source)?;
        rot_minus_sum += mash_best(&pair, &kp, dim, 0, &source)?;
    }
    let cells = (datasets.len() * 3) as f64;
    let spud = spud_sum / cells;
    let mash = mash_sum / cells;
    let minus = minus_sum / cells;
    let rot_mash = rot_mash_sum / datasets.len() as f64;
    let rot_minus = rot_minus_sum / datasets.len() as f64;
    if spud + ORDERING_SLACK < mash {
        return Err(format!(
            "feature splits: SPUD {spud:.4} < MASH {mash:.4} beyond slack"
        ));
    }
    if mash + ORDERING_SLACK < minus {
        return Err(format!(
            "feature splits: MASH {mash:.4} < MASH- {minus:.4} beyond slack"
        ));
    }
    if rot_minus + ORDERING_SLACK < rot_mash {
        return Err(format!(
            "rotation: MASH- {rot_minus:.4} < MASH {rot_mash:.4} beyond slack"
        ));
    }
    budget(started, 900.0)
}

// --- check 4: oracle equivalence -------------------------------------------

fn random_similarity(n: usize, edge_prob: f64, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut w = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_range(0.0..1.0) < edge_prob {
                let v = rng.random_range(0.05..0.95);
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    w
}

fn sim(weights: DMatrix<f64>) -> DomainSimilarity {
    let n = weights.nrows();
    DomainSimilarity {
        weights,
        params: KernelParams::default(),
        neighbors: vec![Vec::new(); n],
    }
}

fn floyd_warshall(lengths: &DMatrix<f64>) -> DMatrix<f64> {
    let n = lengths.nrows();
    let mut d = lengths.clone();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, k)] + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    d
}

fn length_matrix(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    let max_len = w.iter().fold(0.0f64, |a, &v| a.max(1.0 - v));
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else if w[(i, j)] > 0.0 {
            (1.0 - w[(i, j)]) / max_len
        } else {
            f64::INFINITY
        }
    })
}

fn brute_force_foscttm(coords: &DMatrix<f64>, n_x: usize, pairs: &[(usize, usize)]) -> f64 {
    let n_y = coords.nrows() - n_x;
    let dist = |a: usize, b: usize| (coords.row(a) - coords.row(b)).norm();
    let mut total = 0.0;
    for &(i, j) in pairs {
        let d_true = dist(i, n_x + j);
        let closer_y = (0..n_y)
            .filter(|&l| l != j && dist(i, n_x + l) < d_true)
            .count();
        let closer_x = (0..n_x)
            .filter(|&l| l != i && dist(l, n_x + j) < d_true)
            .count();
        total += closer_y as f64 / (n_y - 1) as f64;
        total += closer_x as f64 / (n_x - 1) as f64;
    }
    total / (2 * pairs.len()) as f64
}

fn union_graph_dijkstra(
    wx: &DMatrix<f64>,
    wy: &DMatrix<f64>,
    anchors: &[(usize, usize)],
    nu: f64,
) -> DMatrix<f64> {
    let (n_x, n_y) = (wx.nrows(), wy.nrows());
    let n = n_x + n_y;
    let lx = length_matrix(wx);
    let ly = length_matrix(wy);
    let mut adj = vec![Vec::new(); n];
    for i in 0..n_x {
        for j in 0..n_x {
            if i != j && lx[(i, j)].is_finite() {
                adj[i].push((j, lx[(i, j)]));
            }
        }
    }
    for i in 0..n_y {
        for j in 0..n_y {
            if i != j && ly[(i, j)].is_finite() {
                adj[n_x + i].push((n_x + j, ly[(i, j)]));
            }
        }
    }
    for &(i, j) in anchors {
        adj[i].push((n_x + j, 1.0 - nu));
        adj[n_x + j].push((i, 1.0 - nu));
    }
    let mut out = DMatrix::from_element(n, n, f64::INFINITY);
    for src in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[src] = 0.0;
        for _ in 0..n {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..n {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for &(v, len) in &adj[u] {
                if dist[u] + len < dist[v] {
                    dist[v] = dist[u] + len;
                }
            }
        }
        for v in 0..n {
            out[(src, v)] = dist[v];
        }
    }
    out
}

fn oracle_equivalence() -> Result<(), String> {
    // (a) within-domain geodesics against Floyd-Warshall
    let mut rng = RandomSource::new(2024).rng();
    for trial in 0..50 {
        let w = random_similarity(12, 0.35, &mut rng);
        let g = domain_geodesics(&sim(w.clone()));
        let fw = floyd_warshall(&length_matrix(&w));
        for i in 0..12 {
            for j in 0..12 {
                if fw[(i, j)].is_finite() {
                    if (g[(i, j)] - fw[(i, j)]).abs() > 1e-12 {
                        return Err(format!(
                            "geodesic trial {trial}: d({i},{j}) = {} vs Floyd-Warshall {}",
                            g[(i, j)],
                            fw[(i, j)]
                        ));
                    }
                } else if !g[(i, j)].is_infinite() {
                    return Err(format!("geodesic trial {trial}: ({i},{j}) should be unreachable"));
                }
            }
        }
    }

    // (b) FOSCTTM against brute-force rank counting
    let mut rng = RandomSource::new(77).rng();
    for trial in 0..50 {
        let coords = DMatrix::from_fn(16, 3, |_, _| rng.random_range(-1.0..1.0));
        let pairs: Vec<(usize, usize)> = (0..8).map(|i| (i, i)).collect();
        let emb = Embedding {
            coords: coords.clone(),
            eigenvalues: vec![],
            domain_ranges: vec![0..8, 8..16],
            truncated: false,
        };
        let got = foscttm(&emb, &pairs).or_else(fail)?;
        let want = brute_force_foscttm(&coords, 8, &pairs);
        if (got - want).abs() > 1e-15 {
            return Err(format!("foscttm trial {trial}: {got} vs brute force {want}"));
        }
    }

    // (c) all-anchors cross distances against union-graph Dijkstra
    let mut rng = RandomSource::new(9090).rng();
    for trial in 0..20 {
        let n_x = rng.random_range(6..11);
        let n_y = rng.random_range(6..11);
        let x = DataMatrix::from_values(DMatrix::from_fn(n_x, 3, |_, _| rng.random_range(0.0..4.0)));
        let y = DataMatrix::from_values(DMatrix::from_fn(n_y, 3, |_, _| rng.random_range(0.0..4.0)));
        let n_anchor = rng.random_range(1..4usize);
        let anchors: Vec<(usize, usize)> = (0..n_anchor).map(|a| (a, a)).collect();
        let pair = DomainPair::new(x, y, anchors.clone()).or_else(fail)?;
        let params = KernelParams { k: 3, ..Default::default() };
        let wx = build_domain_similarity(&pair.x, &params).or_else(fail)?;
        let wy = build_domain_similarity(&pair.y, &params).or_else(fail)?;
        let gx = domain_geodesics(&wx);
        let gy = domain_geodesics(&wy);
        let nu = [1.0, 0.7, 0.4][trial % 3];
        let cfg = GeodesicConfig { mode: GeodesicMode::AllAnchors, nu, ..Default::default() };
        let cross = cross_geodesics(&pair, &gx, &gy, &cfg).or_else(fail)?;
        let oracle = union_graph_dijkstra(&wx.weights, &wy.weights, &anchors, nu);
        for i in 0..n_x {
            for j in 0..n_y {
                let got = cross.dists[(i, n_x + j)];
                let want = oracle[(i, n_x + j)];
                if want.is_finite() {
                    if (got - want).abs() > 1e-12 {
                        return Err(format!(
                            "union trial {trial}: cross({i},{j}) = {got} vs Dijkstra {want}"
                        ));
                    }
                } else if !got.is_infinite() {
                    return Err(format!("union trial {trial}: cross({i},{j}) should be unreachable"));
                }
            }
        }
    }

    // (d) MDS distance roundtrip on planar point sets
    let point_sets: Vec<Vec<(f64, f64)>> = vec![
        vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)],
        vec![(0.0, 0.0), (3.0, 0.0), (0.0, 4.0), (1.0, 4.0 / 3.0)],
        (0..6)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 6.0;
                (2.0 * a.cos(), 2.0 * a.sin())
            })
            .collect(),
    ];
    for (set_idx, points) in point_sets.iter().enumerate() {
        let n = points.len();
        let d = DMatrix::from_fn(n, n, |i, j| {
            let (xi, yi) = points[i];
            let (xj, yj) = points[j];
            ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt()
        });
        let emb = classical_mds(&d, 2).or_else(fail)?;
        for i in 0..n {
            for j in 0..n {
                let got = (emb.coords.row(i) - emb.coords.row(j)).norm();
                if (got - d[(i, j)]).abs() > 1e-6 {
                    return Err(format!(
                        "mds set {set_idx}: distance ({i},{j}) = {got} vs {}",
                        d[(i, j)]
                    ));
                }
            }
        }
    }
    Ok(())
}

// --- check 5: invariants ----------------------------------------------------

fn iris_pair(kind: AdaptationKind, seed: u64) -> Result<DomainPair, String> {
    let data = load_csv(&data_dir().join("iris.csv"), Some("class")).or_else(fail)?;
    let spec = AdaptationSpec {
        kind,
        anchor_fraction: 0.2,
        seed: RandomSource::new(seed),
        ..Default::default()
    };
    apply(&data, &spec).or_else(fail)
}

fn joint_of(pair: &DomainPair, kp: &KernelParams) -> Result<JointSimilarity, String> {
    let wx = build_domain_similarity(&pair.x, kp).or_else(fail)?;
    let wy = build_domain_similarity(&pair.y, kp).or_else(fail)?;
    build_joint_similarity(pair, &wx, &wy, 1.0, 1.0).or_else(fail)
}

fn invariant_suite() -> Result<(), String> {
    let kp = KernelParams::default();

    // row-stochasticity of P and P^t
    let pair = iris_pair(AdaptationKind::Random, 3)?;
    let w = joint_of(&pair, &kp)?;
    let mut p = row_normalize(&w);
    for (i, row) in p.p.row_iter().enumerate() {
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-8 {
            return Err(format!("P row {i} sums to {s}"));
        }
    }
    let sel = select_t(&p, 100).or_else(fail)?;
    p.t = Some(sel.t);
    let pt = p.powered().or_else(fail)?;
    for (i, row) in pt.row_iter().enumerate() {
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-8 {
            return Err(format!("P^{} row {i} sums to {s}", sel.t));
        }
    }

    // symmetry of the joint similarity
    let n = w.n();
    for i in 0..n {
        for j in 0..n {
            if w.w[(i, j)] != w.w[(j, i)] {
                return Err(format!("W asymmetric at ({i},{j})"));
            }
        }
    }

    // kernel boundary cases: zero distance and d = sigma_i = sigma_j
    for alpha in [1.0, 2.0, 10.0] {
        for s in [0.3, 1.0, 2.0] {
            let at_zero = alpha_decay_kernel(0.0, s, s, alpha).or_else(fail)?;
            if at_zero != 1.0 {
                return Err(format!("kernel(0) = {at_zero} at sigma {s}, alpha {alpha}"));
            }
            let at_sigma = alpha_decay_kernel(s, s, s, alpha).or_else(fail)?;
            if (at_sigma - (-1.0f64).exp()).abs() > 1e-15 {
                return Err(format!(
                    "kernel(sigma) = {at_sigma}, expected e^-1, at sigma {s}, alpha {alpha}"
                ));
            }
        }
    }

    // Hellinger distance: bounds and pseudometric axioms on random rows
    let mut rng = RandomSource::new(11).rng();
    let mut random_prob = |len: usize| -> Vec<f64> {
        let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0)).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    };
    for trial in 0..100 {
        let p = random_prob(8);
        let q = random_prob(8);
        let r = random_prob(8);
        let pq = hellinger(&p, &q).or_else(fail)?;
        let qp = hellinger(&q, &p).or_else(fail)?;
        let pp = hellinger(&p, &p).or_else(fail)?;
        let pr = hellinger(&p, &r).or_else(fail)?;
        let qr = hellinger(&q, &r).or_else(fail)?;
        if !(0.0..=1.0 + 1e-12).contains(&pq) {
            return Err(format!("hellinger out of bounds: {pq} (trial {trial})"));
        }
        if pq != qp {
            return Err(format!("hellinger asymmetric: {pq} vs {qp} (trial {trial})"));
        }
        if pp > 1e-15 {
            return Err(format!("hellinger self-distance {pp} (trial {trial})"));
        }
        if pr > pq + qr + 1e-12 {
            return Err(format!(
                "hellinger triangle violated: {pr} > {pq} + {qr} (trial {trial})"
            ));
        }
    }

    // rotation adaptation preserves pairwise distances
    let data = load_csv(&data_dir().join("iris.csv"), Some("class")).or_else(fail)?;
    let spec = AdaptationSpec {
        kind: AdaptationKind::Rotation,
        anchor_fraction: 0.2,
        seed: RandomSource::new(5),
        ..Default::default()
    };
    let rot = distort_rotation(&data, &spec).or_else(fail)?;
    let nr = rot.x.n_rows();
    for i in 0..nr {
        for j in (i + 1)..nr {
            let dx = (rot.x.values.row(i) - rot.x.values.row(j)).norm();
            let dy = (rot.y.values.row(i) - rot.y.values.row(j)).norm();
            if (dx - dy).abs() > 1e-9 {
                return Err(format!("rotation distorted d({i},{j}): {dx} vs {dy}"));
            }
        }
    }

    // the held-out trace never worsens across accepted iterations
    let digits = load_csv(&data_dir().join("digits.csv"), Some("class")).or_else(fail)?;
    let spec = AdaptationSpec {
        kind: AdaptationKind::Skewed,
        anchor_fraction: 0.2,
        seed: RandomSource::new(1),
        ..Default::default()
    };
    let pair = apply(&digits, &spec).or_else(fail)?;
    let cfg = MashConfig {
        eta: 0.7,
        holdout_fraction: 0.1,
        max_new_per_iter: 30,
        ..Default::default()
    };
    let res = mash_align(&pair, &kp, &cfg, 32, &RandomSource::new(1)).or_else(fail)?;
    let diag = res.mash.as_ref().ok_or("diagnostics missing")?;
    let accepted_scores: Vec<f64> = diag
        .holdout_foscttm_trace
        .iter()
        .skip(1)
        .zip(&diag.accepted_iterations)
        .filter(|(_, acc)| **acc)
        .map(|(f, _)| *f)
        .collect();
    if accepted_scores.is_empty() {
        return Err("monotonicity instance accepted no iterations; check is vacuous".into());
    }
    let mut prev = diag.holdout_foscttm_trace[0];
    for (idx, f) in accepted_scores.iter().enumerate() {
        if *f > prev {
            return Err(format!(
                "holdout trace rose at accepted iteration {idx}: {f} > {prev}"
            ));
        }
        prev = *f;
    }

    // max_iterations = 0 is bit-identical to a single unrefined pass
    let pair = iris_pair(AdaptationKind::Random, 3)?;
    let cfg = MashConfig { max_iterations: 0, ..Default::default() };
    let res = mash_align(&pair, &kp, &cfg, 2, &RandomSource::new(3)).or_else(fail)?;
    let w = joint_of(&pair, &kp)?;
    let mut p = row_normalize(&w);
    let sel = select_t(&p, cfg.t_max).or_else(fail)?;
    p.t = Some(sel.t);
    let d = integrated_diffusion_distance(&p, cfg.info_distance).or_else(fail)?;
    let expect = classical_mds(&d, 2).or_else(fail)?;
    if res.embedding.coords != expect.coords {
        return Err("max_iterations = 0 differs from a single unrefined pass".into());
    }
    let diag = res.mash.as_ref().ok_or("diagnostics missing")?;
    if diag.t_selected != sel.t || diag.iterations_run != 0 {
        return Err("max_iterations = 0 diagnostics are not a plain single pass".into());
    }

    // fixed seeds reproduce results exactly, from adaptation through embedding
    let rerun = |seed: u64| -> Result<(DMatrix<f64>, DMatrix<f64>), String> {
        let pair = iris_pair(AdaptationKind::Even, seed)?;
        let s = spud_align(&pair, &kp, &GeodesicConfig::default(), 2).or_else(fail)?;
        let cfg = MashConfig { eta: 0.7, ..Default::default() };
        let m = mash_align(&pair, &kp, &cfg, 2, &RandomSource::new(seed)).or_else(fail)?;
        Ok((s.embedding.coords, m.embedding.coords))
    };
    let (s1, m1) = rerun(8)?;
    let (s2, m2) = rerun(8)?;
    if s1 != s2 {
        return Err("spud rerun differs under a fixed seed".into());
    }
    if m1 != m2 {
        return Err("mash rerun differs under a fixed seed".into());
    }
    Ok(())
}

// --- check 6: degenerate inputs ---------------------------------------------

fn degenerate_input_suite() -> Result<(), String> {
    let kp = KernelParams::default();
    let data = load_csv(&data_dir().join("iris.csv"), Some("class")).or_else(fail)?;

    // identical domains, every row anchored: alignment must be near-perfect
    let spec = AdaptationSpec {
        kind: AdaptationKind::Distort,
        noise_scale: 0.0,
        anchor_fraction: 1.0,
        seed: RandomSource::new(2),
        ..Default::default()
    };
    let pair = distort_gaussian(&data, &spec).or_else(fail)?;
    let identity: Vec<(usize, usize)> = (0..pair.x.n_rows()).map(|i| (i, i)).collect();
    let spud = spud_align(&pair, &kp, &GeodesicConfig::default(), 2).or_else(fail)?;
    let f_spud = foscttm(&spud.embedding, &identity).or_else(fail)?;
    if f_spud >= 0.05 {
        return Err(format!("identity adaptation: SPUD FOSCTTM {f_spud:.4} >= 0.05"));
    }
    let mash = mash_align(&pair, &kp, &MashConfig::default(), 2, &RandomSource::new(2))
        .or_else(fail)?;
    let f_mash = foscttm(&mash.embedding, &identity).or_else(fail)?;
    if f_mash >= 0.05 {
        return Err(format!("identity adaptation: MASH FOSCTTM {f_mash:.4} >= 0.05"));
    }

    // eta = 0 admits no pseudo-connections
    let spec = AdaptationSpec {
        kind: AdaptationKind::Random,
        anchor_fraction: 0.2,
        seed: RandomSource::new(5),
        ..Default::default()
    };
    let pair = apply(&data, &spec).or_else(fail)?;
    let wx = build_domain_similarity(&pair.x, &kp).or_else(fail)?;
    let wy = build_domain_similarity(&pair.y, &kp).or_else(fail)?;
    let w = build_joint_similarity(&pair, &wx, &wy, 1.0, 1.0).or_else(fail)?;
    let mut p = row_normalize(&w);
    let sel = select_t(&p, 100).or_else(fail)?;
    p.t = Some(sel.t);
    let d = integrated_diffusion_distance(&p, InfoDistance::Potential).or_else(fail)?;
    let cfg = MashConfig { eta: 0.0, ..Default::default() };
    let (w_after, added) = add_pseudo_connections(&w, &d, &cfg, &HashSet::new());
    if !added.is_empty() {
        return Err(format!("eta = 0 still added {} connections", added.len()));
    }
    if w_after.cross_nnz() != w.cross_nnz() {
        return Err("eta = 0 changed the cross block".into());
    }

    // gamma = 0 leaves exactly one cross entry per anchor
    let w_plain = build_joint_similarity(&pair, &wx, &wy, 1.0, 0.0).or_else(fail)?;
    if w_plain.cross_nnz() != pair.anchors.len() {
        return Err(format!(
            "gamma = 0: cross nnz {} != |anchors| {}",
            w_plain.cross_nnz(),
            pair.anchors.len()
        ));
    }
    Ok(())
}
