//! Rule-based back-translation of event-semantics logical forms into English,
//! and the faithfulness score built on it.

mod embed;
mod render;

#[cfg(test)]
mod tests;

pub use embed::{cosine, Embedder, Embedding, HttpEmbedder, LexicalEmbedder};
pub use render::{analyse, informalise, split_camel, EntityDescriptor, EventFrame};

use crate::logic::Formula;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InformalError {
    #[error("unsupported formula shape: {0}")]
    UnsupportedShape(String),
    #[error("embedder unavailable: {0}")]
    EmbedderUnavailable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulnessReport {
    pub original: String,
    pub informalised: String,
    pub similarity: f64,
}

pub fn faithfulness(original: &str, f: &Formula, embedder: &dyn Embedder) -> Result<FaithfulnessReport, InformalError> {
    let informalised = informalise(f)?;
    let similarity = cosine(&embedder.embed(original)?, &embedder.embed(&informalised)?);
    Ok(FaithfulnessReport { original: original.to_string(), informalised, similarity })
}
