//! Shared output container for every alignment method.

use nalgebra::DMatrix;

use crate::embed::Embedding;
use crate::mash::MashDiagnostics;

/// What an alignment run produces: the joint embedding, optionally the
/// diffusion coupling block (MASH only), optional refinement diagnostics,
/// and any warnings raised along the way.
#[derive(Debug, Clone)]
pub struct AlignmentResult {
    pub embedding: Embedding,
    /// Rows = X points, columns = Y points; each row sums to at most 1.
    pub coupling: Option<DMatrix<f64>>,
    pub mash: Option<MashDiagnostics>,
    /// Non-fatal conditions, e.g. "unreachable_imputed", "embedding_truncated".
    pub flags: Vec<String>,
}

impl AlignmentResult {
    pub fn from_embedding(embedding: Embedding) -> Self {
        let flags = if embedding.truncated {
            vec!["embedding_truncated".to_string()]
        } else {
            Vec::new()
        };
        AlignmentResult {
            embedding,
            coupling: None,
            mash: None,
            flags,
        }
    }
}
