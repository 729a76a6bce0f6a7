//! Semi-supervised manifold alignment of two domains sharing a partial
//! correspondence (anchor points).
//!
//! Two aligners are provided, both built on an adaptive similarity kernel
//! over each domain plus anchor links joining them:
//!
//! - **SPUD** ([`spud_align`]): shortest-path distances through the anchored
//!   joint graph, embedded by classical MDS.
//! - **MASH** ([`mash_align`]): information distances between rows of a
//!   powered joint diffusion operator (time scale picked at the knee of the
//!   Von Neumann entropy curve), iteratively densified with cross-domain
//!   pseudo-connections gated by held-out validation anchors.
//!
//! Supporting pieces: evaluation metrics (FOSCTTM, cross-embedding
//! classification), generators that split or distort one dataset into a
//! co-domain pair for benchmarking, and two reference methods (JLMA, MAPA).

pub mod adaptations;
pub mod baselines;
pub mod data;
pub mod embed;
pub mod error;
pub mod graph;
pub mod mash;
pub mod metrics;
pub mod result;
pub mod spud;

pub use adaptations::{apply as apply_adaptation, AdaptationKind, AdaptationSpec, ImportanceOracle};
pub use baselines::{baseline_align, jlma_align, mapa_align, procrustes_fit, BaselineConfig, BaselineMethod};
pub use data::{load_csv, DataMatrix, DomainPair, Labels, RandomSource};
pub use embed::{classical_mds, Embedding, InfoDistance};
pub use error::{Error, Result};
pub use graph::{build_domain_similarity, build_joint_similarity, JointSimilarity, KernelParams, Metric};
pub use mash::{mash_align, transfer_labels, MashConfig, MashDiagnostics};
pub use metrics::{evaluate, foscttm, MetricsReport};
pub use result::AlignmentResult;
pub use spud::{spud_align, Aggregation, GeodesicConfig, GeodesicMode};
