use std::collections::BTreeMap;
use std::time::Duration;

use super::InformalError;

#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// Token counts.
    Sparse(BTreeMap<String, f64>),
    Dense(Vec<f64>),
}

pub trait Embedder: Send + Sync {
    fn embed(&self, sentence: &str) -> Result<Embedding, InformalError>;
}

/// Cosine similarity, clamped to `[0, 1]`. A zero vector scores 0 against
/// anything, and so do embeddings of different kinds.
pub fn cosine(a: &Embedding, b: &Embedding) -> f64 {
    let (dot, na, nb) = match (a, b) {
        (Embedding::Sparse(x), Embedding::Sparse(y)) => (
            x.iter().map(|(k, v)| v * y.get(k).copied().unwrap_or(0.0)).sum::<f64>(),
            x.values().map(|v| v * v).sum::<f64>(),
            y.values().map(|v| v * v).sum::<f64>(),
        ),
        (Embedding::Dense(x), Embedding::Dense(y)) if x.len() == y.len() => (
            x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>(),
            x.iter().map(|v| v * v).sum::<f64>(),
            y.iter().map(|v| v * v).sum::<f64>(),
        ),
        _ => return 0.0,
    };
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 1.0)
}

/// Bag of lower-cased alphanumeric tokens.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalEmbedder;

impl Embedder for LexicalEmbedder {
    fn embed(&self, sentence: &str) -> Result<Embedding, InformalError> {
        let mut counts = BTreeMap::new();
        for tok in sentence.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
            *counts.entry(tok.to_lowercase()).or_insert(0.0) += 1.0;
        }
        Ok(Embedding::Sparse(counts))
    }
}

/// Client for an OpenAI-compatible `/embeddings` endpoint.
pub struct HttpEmbedder {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpEmbedder {
    /// `api_key_env` names the environment variable holding the key.
    pub fn new(endpoint: &str, model: &str, api_key_env: Option<&str>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        HttpEmbedder {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key: api_key_env.and_then(|v| std::env::var(v).ok()),
            agent,
        }
    }
}

impl Embedder for HttpEmbedder {
    fn embed(&self, sentence: &str) -> Result<Embedding, InformalError> {
        let unavailable = |e: &dyn std::fmt::Display| InformalError::EmbedderUnavailable(e.to_string());
        let body = serde_json::json!({ "model": self.model, "input": sentence });
        let mut req = self.agent.post(format!("{}/embeddings", self.endpoint));
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let value: serde_json::Value =
            req.send_json(&body).map_err(|e| unavailable(&e))?.body_mut().read_json().map_err(|e| unavailable(&e))?;
        let vector = value["data"][0]["embedding"]
            .as_array()
            .ok_or_else(|| unavailable(&"response has no data[0].embedding"))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| unavailable(&"non-numeric embedding")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Embedding::Dense(vector))
    }
}
