//! Verb implementations: align, benchmark, transfer, importance.

use crate::config::{Method, RunConfig};
use crate::svg;
use anyhow::{bail, Context, Result};
use manifold_align::adaptations::{apply, AdaptationKind, AdaptationSpec};
use manifold_align::baselines::{baseline_align, BaselineConfig, BaselineMethod};
use manifold_align::data::{load_csv, DataMatrix, DomainPair, RandomSource};
use manifold_align::embed::Embedding;
use manifold_align::mash::{mash_align, transfer_labels, MashConfig};
use manifold_align::metrics::{cross_embedding_accuracy, foscttm};
use manifold_align::result::AlignmentResult;
use manifold_align::spud::{spud_align, Aggregation, GeodesicConfig, GeodesicMode};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn load_dataset(cfg: &RunConfig, path: &Path) -> Result<DataMatrix> {
    load_csv(path, cfg.label_column.as_deref())
        .with_context(|| format!("cannot load dataset {}", path.display()))
}

fn read_anchor_file(path: &Path) -> Result<Vec<(usize, usize)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("cannot read anchor file {}", path.display()))?;
    let mut anchors = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            bail!(
                "anchor file {} line {}: expected `x_index,y_index`",
                path.display(),
                line + 1
            );
        }
        let parse = |field: &str| -> Result<usize> {
            field
                .trim()
                .parse()
                .with_context(|| format!("anchor file {} line {}", path.display(), line + 1))
        };
        anchors.push((parse(&record[0])?, parse(&record[1])?));
    }
    if anchors.is_empty() {
        bail!("anchor file {} holds no pairs", path.display());
    }
    Ok(anchors)
}

/// The pair to align plus the correspondences metrics evaluate on:
/// adaptation-generated pairs score the non-anchored identity
/// correspondences; explicit pairs only have the anchor file to go by.
struct Job {
    pair: DomainPair,
    eval_pairs: Vec<(usize, usize)>,
}

fn build_job(cfg: &RunConfig, seed: u64) -> Result<Job> {
    if let Some(y_path) = &cfg.dataset_y {
        let x_path = cfg
            .dataset
            .as_ref()
            .context("two-dataset mode requires `dataset` alongside `dataset_y`")?;
        let anchor_path = cfg
            .anchor_file
            .as_ref()
            .context("two-dataset mode requires `anchor_file`")?;
        let x = load_dataset(cfg, x_path)?;
        let y = load_dataset(cfg, y_path)?;
        let anchors = read_anchor_file(anchor_path)?;
        let pair = DomainPair::new(x, y, anchors.clone())?;
        return Ok(Job {
            pair,
            eval_pairs: anchors,
        });
    }
    let path = cfg
        .dataset
        .as_ref()
        .context("no `dataset` configured (set it in the config file or pass --dataset)")?;
    let data = load_dataset(cfg, path)?;
    let spec = AdaptationSpec {
        seed: RandomSource::new(seed),
        ..cfg.adaptation.clone()
    };
    let pair = apply(&data, &spec)?;
    Ok(Job {
        eval_pairs: identity_eval_pairs(&pair),
        pair,
    })
}

fn identity_eval_pairs(pair: &DomainPair) -> Vec<(usize, usize)> {
    let anchored: Vec<usize> = pair.anchors.iter().map(|&(i, _)| i).collect();
    let free: Vec<(usize, usize)> = (0..pair.x.n_rows())
        .filter(|i| !anchored.contains(i))
        .map(|i| (i, i))
        .collect();
    if free.is_empty() {
        // fully anchored: score the anchors themselves
        (0..pair.x.n_rows()).map(|i| (i, i)).collect()
    } else {
        free
    }
}

fn default_dim(pair: &DomainPair) -> usize {
    pair.x.n_features().min(pair.y.n_features()).max(1)
}

fn run_one(
    method: Method,
    cfg: &RunConfig,
    pair: &DomainPair,
    dim: usize,
    seed: u64,
) -> Result<AlignmentResult> {
    let result = match method {
        Method::Spud => spud_align(pair, &cfg.kernel, &cfg.geodesic, dim)?,
        Method::Nama => {
            let geodesic = GeodesicConfig {
                mode: GeodesicMode::DenseNama,
                aggregation: Aggregation::Min,
                ..cfg.geodesic
            };
            spud_align(pair, &cfg.kernel, &geodesic, dim)?
        }
        Method::Mash => mash_align(pair, &cfg.kernel, &cfg.mash, dim, &RandomSource::new(seed))?,
        Method::MashMinus => {
            let mash = MashConfig {
                max_iterations: 0,
                ..cfg.mash.clone()
            };
            mash_align(pair, &cfg.kernel, &mash, dim, &RandomSource::new(seed))?
        }
        Method::Jlma | Method::Mapa => {
            let baseline = BaselineConfig {
                method: if method == Method::Jlma {
                    BaselineMethod::Jlma
                } else {
                    BaselineMethod::Mapa
                },
                dim,
                kparams: cfg.kernel.clone(),
            };
            baseline_align(pair, &baseline)?
        }
    };
    Ok(result)
}

#[derive(Serialize)]
struct MetricsDoc {
    foscttm: f64,
    /// Absent when either domain has no labels.
    ce_accuracy: Option<f64>,
    /// Always ce_accuracy - foscttm when both are present.
    combined: Option<f64>,
    n_eval_pairs: usize,
    knn_k: usize,
    embedding_dim: usize,
}

fn metrics_doc(job: &Job, res: &AlignmentResult, k: usize) -> Result<MetricsDoc> {
    let f = foscttm(&res.embedding, &job.eval_pairs)?;
    let ce = match (&job.pair.x.labels, &job.pair.y.labels) {
        (Some(lx), Some(ly)) => Some(cross_embedding_accuracy(
            &res.embedding,
            &lx.ids,
            &ly.ids,
            k,
        )?),
        _ => None,
    };
    Ok(MetricsDoc {
        foscttm: f,
        ce_accuracy: ce,
        combined: ce.map(|c| c - f),
        n_eval_pairs: job.eval_pairs.len(),
        knn_k: k,
        embedding_dim: res.embedding.coords.ncols(),
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_embedding_csv(path: &Path, emb: &Embedding) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    let dim = emb.coords.ncols();
    let mut header = vec!["id".to_string(), "domain".to_string()];
    header.extend((0..dim).map(|c| format!("c{c}")));
    writer.write_record(&header)?;
    for (d, range) in emb.domain_ranges.iter().enumerate() {
        let domain = if d == 0 { "x" } else { "y" };
        for (idx, row) in range.clone().enumerate() {
            let mut record = vec![idx.to_string(), domain.to_string()];
            record.extend((0..dim).map(|c| format!("{}", emb.coords[(row, c)])));
            writer.write_record(&record)?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn align(cfg: &RunConfig) -> Result<()> {
    let seeds = cfg.effective_seeds();
    let split_dirs = seeds.len() > 1;
    for &seed in &seeds {
        let dir = if split_dirs {
            cfg.out_dir.join(format!("seed_{seed}"))
        } else {
            cfg.out_dir.clone()
        };
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let job = build_job(cfg, seed)?;
        let dim = cfg.dim.unwrap_or_else(|| default_dim(&job.pair));
        let res = run_one(cfg.method, cfg, &job.pair, dim, seed)?;
        write_embedding_csv(&dir.join("embedding.csv"), &res.embedding)?;
        write_json(&dir.join("metrics.json"), &metrics_doc(&job, &res, cfg.knn_k)?)?;
        if let Some(diag) = &res.mash {
            write_json(&dir.join("diagnostics.json"), diag)?;
        }
        fs::write(
            dir.join("scatter.svg"),
            svg::scatter(&res.embedding, &job.pair.anchors),
        )?;
    }
    Ok(())
}

// --- benchmark --------------------------------------------------------------

struct Cell {
    dataset: PathBuf,
    kind: AdaptationKind,
    fraction: f64,
    method: Method,
    seed: u64,
}

struct CellRow {
    dataset: String,
    adaptation: String,
    fraction: f64,
    method: &'static str,
    seed: u64,
    outcome: Result<(MetricsDoc, f64)>, // metrics + wall seconds
}

fn adaptation_name(kind: AdaptationKind) -> String {
    // reuse the serde name so config files and reports agree
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_else(|| format!("{kind:?}"))
}

fn run_cell(cfg: &RunConfig, data: &DataMatrix, cell: &Cell) -> Result<(MetricsDoc, f64)> {
    let started = Instant::now();
    let spec = AdaptationSpec {
        kind: cell.kind,
        anchor_fraction: cell.fraction,
        seed: RandomSource::new(cell.seed),
        ..cfg.adaptation.clone()
    };
    let pair = apply(data, &spec)?;
    let job = Job {
        eval_pairs: identity_eval_pairs(&pair),
        pair,
    };
    let dim = cfg.dim.unwrap_or_else(|| default_dim(&job.pair));
    let res = run_one(cell.method, cfg, &job.pair, dim, cell.seed)?;
    let doc = metrics_doc(&job, &res, cfg.knn_k)?;
    Ok((doc, started.elapsed().as_secs_f64()))
}

pub fn benchmark(cfg: &RunConfig) -> Result<()> {
    let datasets: Vec<PathBuf> = if cfg.datasets.is_empty() {
        vec![cfg
            .dataset
            .clone()
            .context("benchmark needs `datasets` (or a single `dataset`)")?]
    } else {
        cfg.datasets.clone()
    };
    let adaptations = if cfg.adaptations.is_empty() {
        vec![cfg.adaptation.kind]
    } else {
        cfg.adaptations.clone()
    };
    let fractions = if cfg.anchor_fractions.is_empty() {
        vec![cfg.adaptation.anchor_fraction]
    } else {
        cfg.anchor_fractions.clone()
    };
    let methods = if cfg.methods.is_empty() {
        vec![cfg.method]
    } else {
        cfg.methods.clone()
    };
    let seeds = cfg.effective_seeds();

    // one load per dataset; cells only borrow
    let mut loaded: HashMap<PathBuf, DataMatrix> = HashMap::new();
    for path in &datasets {
        if !loaded.contains_key(path) {
            loaded.insert(path.clone(), load_dataset(cfg, path)?);
        }
    }

    let mut cells = Vec::new();
    for dataset in &datasets {
        for &kind in &adaptations {
            for &fraction in &fractions {
                for &method in &methods {
                    for &seed in &seeds {
                        cells.push(Cell {
                            dataset: dataset.clone(),
                            kind,
                            fraction,
                            method,
                            seed,
                        });
                    }
                }
            }
        }
    }

    let rows: Vec<CellRow> = cells
        .par_iter()
        .map(|cell| CellRow {
            dataset: cell.dataset.display().to_string(),
            adaptation: adaptation_name(cell.kind),
            fraction: cell.fraction,
            method: cell.method.name(),
            seed: cell.seed,
            outcome: run_cell(cfg, &loaded[&cell.dataset], cell),
        })
        .collect();

    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    let mut writer = csv::Writer::from_path(cfg.out_dir.join("benchmark.csv"))?;
    writer.write_record([
        "dataset",
        "adaptation",
        "anchor_fraction",
        "method",
        "seed",
        "status",
        "foscttm",
        "ce_accuracy",
        "combined",
        "wall_secs",
        "error",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &rows {
        let (status, f, ce, comb, wall, error) = match &row.outcome {
            Ok((doc, wall)) => (
                "ok",
                doc.foscttm.to_string(),
                opt(doc.ce_accuracy),
                opt(doc.combined),
                format!("{wall:.3}"),
                String::new(),
            ),
            Err(e) => (
                "error",
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("{e:#}"),
            ),
        };
        writer.write_record([
            row.dataset.as_str(),
            row.adaptation.as_str(),
            &row.fraction.to_string(),
            row.method,
            &row.seed.to_string(),
            status,
            &f,
            &ce,
            &comb,
            &wall,
            &error,
        ])?;
    }
    writer.flush()?;

    // mean over datasets and seeds per (adaptation, fraction, method):
    // the shape the per-split method comparisons are read from
    let mut summary = csv::Writer::from_path(cfg.out_dir.join("summary.csv"))?;
    summary.write_record([
        "adaptation",
        "anchor_fraction",
        "method",
        "n_ok",
        "n_error",
        "mean_foscttm",
        "mean_ce_accuracy",
        "mean_combined",
    ])?;
    for &kind in &adaptations {
        for &fraction in &fractions {
            for &method in &methods {
                let adaptation = adaptation_name(kind);
                let group: Vec<&CellRow> = rows
                    .iter()
                    .filter(|r| {
                        r.adaptation == adaptation
                            && r.fraction == fraction
                            && r.method == method.name()
                    })
                    .collect();
                let ok: Vec<&MetricsDoc> = group
                    .iter()
                    .filter_map(|r| r.outcome.as_ref().ok().map(|(doc, _)| doc))
                    .collect();
                let n_error = group.len() - ok.len();
                let mean = |extract: fn(&MetricsDoc) -> Option<f64>| -> String {
                    let values: Vec<f64> = ok.iter().filter_map(|d| extract(d)).collect();
                    if values.is_empty() {
                        String::new()
                    } else {
                        (values.iter().sum::<f64>() / values.len() as f64).to_string()
                    }
                };
                summary.write_record([
                    adaptation.as_str(),
                    &fraction.to_string(),
                    method.name(),
                    &ok.len().to_string(),
                    &n_error.to_string(),
                    &mean(|d| Some(d.foscttm)),
                    &mean(|d| d.ce_accuracy),
                    &mean(|d| d.combined),
                ])?;
            }
        }
    }
    summary.flush()?;
    Ok(())
}

// --- transfer ----------------------------------------------------------------

pub fn transfer(cfg: &RunConfig) -> Result<()> {
    if !matches!(cfg.method, Method::Mash | Method::MashMinus) {
        bail!("transfer requires a mash coupling; got method {}", cfg.method.name());
    }
    let seed = *cfg.effective_seeds().first().unwrap_or(&0);
    let job = build_job(cfg, seed)?;
    let labels_x = job
        .pair
        .x
        .labels
        .as_ref()
        .context("label transfer requires labels in domain X (set `label_column`)")?
        .clone();
    let dim = cfg.dim.unwrap_or_else(|| default_dim(&job.pair));
    let res = run_one(cfg.method, cfg, &job.pair, dim, seed)?;
    let predicted = transfer_labels(&res, &labels_x.ids, cfg.knn_k)?;

    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    let truth = job.pair.y.labels.as_ref();
    let mut writer = csv::Writer::from_path(cfg.out_dir.join("predictions.csv"))?;
    if truth.is_some() {
        writer.write_record(["id", "predicted", "actual"])?;
    } else {
        writer.write_record(["id", "predicted"])?;
    }
    for (i, &p) in predicted.iter().enumerate() {
        let name = labels_x.names[p].as_str();
        match truth {
            Some(ly) => {
                writer.write_record([&i.to_string(), name, ly.names[ly.ids[i]].as_str()])?
            }
            None => writer.write_record([&i.to_string(), name])?,
        }
    }
    writer.flush()?;

    #[derive(Serialize)]
    struct AccuracyDoc {
        accuracy: Option<f64>,
        n_points: usize,
        knn_k: usize,
    }
    let accuracy = truth.map(|ly| {
        let hits = predicted.iter().zip(&ly.ids).filter(|(p, t)| p == t).count();
        hits as f64 / predicted.len() as f64
    });
    write_json(
        &cfg.out_dir.join("accuracy.json"),
        &AccuracyDoc {
            accuracy,
            n_points: predicted.len(),
            knn_k: cfg.knn_k,
        },
    )
}

// --- importance ----------------------------------------------------------------

pub fn importance(cfg: &RunConfig) -> Result<()> {
    let path = cfg
        .dataset
        .as_ref()
        .context("no `dataset` configured (set it in the config file or pass --dataset)")?;
    let data = load_dataset(cfg, path)?;
    let seed = *cfg.effective_seeds().first().unwrap_or(&0);
    let ranking = cfg
        .adaptation
        .importance_oracle
        .rank_features(&data, &RandomSource::new(seed))?;
    let mut lines = String::new();
    for &f in &ranking {
        match &data.feature_names {
            Some(names) => lines.push_str(&names[f]),
            None => lines.push_str(&f.to_string()),
        }
        lines.push('\n');
    }
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    fs::write(cfg.out_dir.join("ranking.txt"), lines)?;
    Ok(())
}
