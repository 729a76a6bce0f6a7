//! Run configuration: a single JSON document, optionally overridden by
//! command-line flags.

use crate::CommonArgs;
use anyhow::{bail, Context, Result};
use manifold_align::adaptations::{AdaptationKind, AdaptationSpec};
use manifold_align::graph::KernelParams;
use manifold_align::mash::MashConfig;
use manifold_align::spud::GeodesicConfig;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spud,
    Mash,
    MashMinus,
    Nama,
    Jlma,
    Mapa,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spud => "spud",
            Method::Mash => "mash",
            Method::MashMinus => "mash_minus",
            Method::Nama => "nama",
            Method::Jlma => "jlma",
            Method::Mapa => "mapa",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Dataset CSV; becomes both domains through `adaptation`.
    pub dataset: Option<PathBuf>,
    /// Second dataset CSV; switches to explicit two-dataset mode, where
    /// `dataset` is domain X, `dataset_y` is domain Y, and `anchor_file`
    /// supplies the known correspondences.
    pub dataset_y: Option<PathBuf>,
    /// CSV of `x_index,y_index` anchor pairs (no header).
    pub anchor_file: Option<PathBuf>,
    pub label_column: Option<String>,
    pub method: Method,
    pub adaptation: AdaptationSpec,
    pub kernel: KernelParams,
    /// Used by spud and nama.
    pub geodesic: GeodesicConfig,
    /// Used by mash and mash_minus.
    pub mash: MashConfig,
    /// Embedding dimension; defaults to the smaller split's feature count.
    pub dim: Option<usize>,
    /// Seed count when `seeds` is empty (seeds 0..repetitions).
    pub repetitions: usize,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Neighbor count for label transfer and the CE metric.
    pub knn_k: usize,
    /// Benchmark grid; empty axes fall back to the single-run fields above.
    pub datasets: Vec<PathBuf>,
    pub adaptations: Vec<AdaptationKind>,
    pub anchor_fractions: Vec<f64>,
    pub methods: Vec<Method>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            dataset_y: None,
            anchor_file: None,
            label_column: None,
            method: Method::Spud,
            adaptation: AdaptationSpec::default(),
            kernel: KernelParams::default(),
            geodesic: GeodesicConfig::default(),
            mash: MashConfig::default(),
            dim: None,
            repetitions: 1,
            seeds: Vec::new(),
            out_dir: PathBuf::from("out"),
            knn_k: 5,
            datasets: Vec::new(),
            adaptations: Vec::new(),
            anchor_fractions: Vec::new(),
            methods: Vec::new(),
        }
    }
}

impl RunConfig {
    /// The seed list actually run: explicit seeds, else 0..repetitions.
    pub fn effective_seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            (0..self.repetitions as u64).collect()
        } else {
            self.seeds.clone()
        }
    }
}

pub fn resolve(args: CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("cannot parse config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.seeds = vec![seed];
    }
    if let Some(method) = args.method {
        cfg.method = method;
    }
    if let Some(anchors) = &args.anchors {
        match anchors.parse::<f64>() {
            Ok(fraction) => cfg.adaptation.anchor_fraction = fraction,
            Err(_) => cfg.anchor_file = Some(PathBuf::from(anchors)),
        }
    }
    if let Some(dim) = args.dim {
        cfg.dim = Some(dim);
    }
    if let Some(dataset) = args.dataset {
        cfg.dataset = Some(dataset);
    }
    if let Some(label_column) = args.label_column {
        cfg.label_column = Some(label_column);
    }
    if cfg.repetitions == 0 {
        bail!("repetitions must be at least 1");
    }
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("worker pool already configured")?;
    }
    Ok(cfg)
}
