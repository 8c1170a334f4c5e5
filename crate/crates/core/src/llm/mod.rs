//! LLM gateway: prompt templates per pipeline stage, providers (live,
//! replay, recording, scripted), call accounting and answer parsing.

mod answers;
mod providers;
mod templates;

#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::prover::sha256_hex;

pub use answers::{
    extract_code_block, parse_explanation_list, parse_formalisation, parse_refinement_answer, parse_syntactic_parse,
    Answer, Formalisation, SentenceParse,
};
pub use providers::{
    load_llm_cassette, write_llm_cassette, HttpProvider, LlmCassetteRecord, ProviderConfig, RateLimiter,
    RecordingProvider, ReplayProvider, ScriptedProvider,
};
pub use templates::{allowed_slots, render_prompt, PromptTemplate, TemplateSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    SyntacticParse,
    Autoformalise,
    QuantifierRefine,
    SyntaxRefine,
    ConsistencyRefine,
    ExtractLogic,
    ProofSketch,
    RefineExplanation,
}

impl Stage {
    pub const ALL: &'static [Stage] = &[
        Stage::SyntacticParse,
        Stage::Autoformalise,
        Stage::QuantifierRefine,
        Stage::SyntaxRefine,
        Stage::ConsistencyRefine,
        Stage::ExtractLogic,
        Stage::ProofSketch,
        Stage::RefineExplanation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::SyntacticParse => "syntactic_parse",
            Stage::Autoformalise => "autoformalise",
            Stage::QuantifierRefine => "quantifier_refine",
            Stage::SyntaxRefine => "syntax_refine",
            Stage::ConsistencyRefine => "consistency_refine",
            Stage::ExtractLogic => "extract_logic",
            Stage::ProofSketch => "proof_sketch",
            Stage::RefineExplanation => "refine_explanation",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rendered prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub stage: Stage,
    pub system: String,
    pub user: String,
}

impl Prompt {
    /// The text that is hashed for cassettes.
    pub fn text(&self) -> String {
        format!("SYSTEM:\n{}\n\nUSER:\n{}", self.system, self.user)
    }

    pub fn digest(&self) -> String {
        sha256_hex(&self.text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub latency: Duration,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl Completion {
    pub fn instant(text: impl Into<String>) -> Self {
        Completion { text: text.into(), latency: Duration::ZERO, prompt_tokens: None, completion_tokens: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("template {stage}: {reason}")]
    Template { stage: Stage, reason: String },
    #[error("template {stage}: unknown slot {name}")]
    UnknownSlot { stage: Stage, name: String },
    #[error("template {stage}: no binding for slot {name}")]
    MissingSlot { stage: Stage, name: String },
    #[error("rate limited")]
    RateLimited { retry_after: Option<Duration> },
    #[error("provider error: {0}")]
    Provider(String),
    #[error("no cassette entry for {stage} prompt {digest}")]
    CassetteMiss { stage: Stage, digest: String },
    #[error("malformed {stage} answer: {reason}")]
    MalformedAnswer { stage: Stage, reason: String },
}

impl LlmError {
    /// Errors that end an instance rather than a single iteration.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, LlmError::MalformedAnswer { .. })
    }
}

pub trait LlmProvider: Send + Sync {
    fn complete(&self, prompt: &Prompt) -> Result<Completion, LlmError>;
}

/// One provider call as seen by an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmExchange {
    pub stage: Stage,
    pub prompt: String,
    pub response: String,
    pub latency_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_tokens: Option<u64>,
}

/// Per-instance access to a shared provider. Every completed call appends
/// exactly one exchange, so the history length is the call count.
pub struct LlmGateway {
    provider: Arc<dyn LlmProvider>,
    templates: Arc<TemplateSet>,
    history: Vec<LlmExchange>,
    max_retries: u32,
    backoff: Duration,
}

impl LlmGateway {
    pub fn new(provider: Arc<dyn LlmProvider>, templates: Arc<TemplateSet>) -> Self {
        LlmGateway { provider, templates, history: Vec::new(), max_retries: 3, backoff: Duration::from_millis(500) }
    }

    /// Retry budget for rate-limited calls and the base of the exponential
    /// backoff between them.
    pub fn with_retries(mut self, max_retries: u32, backoff: Duration) -> Self {
        self.max_retries = max_retries;
        self.backoff = backoff;
        self
    }

    pub fn calls(&self) -> usize {
        self.history.len()
    }

    pub fn history(&self) -> &[LlmExchange] {
        &self.history
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }

    pub fn render(&self, stage: Stage, bindings: &BTreeMap<String, String>) -> Result<Prompt, LlmError> {
        self.templates.get(stage).render(bindings)
    }

    /// Sends one prompt, retrying while the provider is rate limited.
    pub fn complete(&mut self, prompt: &Prompt) -> Result<String, LlmError> {
        let mut attempt = 0;
        let completion = loop {
            match self.provider.complete(prompt) {
                Err(LlmError::RateLimited { retry_after }) if attempt < self.max_retries => {
                    let wait = retry_after.unwrap_or(self.backoff * 2u32.pow(attempt));
                    log::warn!("{} rate limited, retrying in {wait:?}", prompt.stage);
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                other => break other?,
            }
        };
        self.history.push(LlmExchange {
            stage: prompt.stage,
            prompt: prompt.text(),
            response: completion.text.clone(),
            latency_ms: completion.latency.as_millis() as u64,
            prompt_tokens: completion.prompt_tokens,
            completion_tokens: completion.completion_tokens,
        });
        Ok(completion.text)
    }

    /// Renders, sends and parses. A malformed answer is requested once more
    /// with the stage's format reminder appended; a second failure is
    /// returned as `MalformedAnswer`.
    pub fn ask<T>(
        &mut self,
        stage: Stage,
        bindings: &BTreeMap<String, String>,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, LlmError> {
        let prompt = self.render(stage, bindings)?;
        let first = self.complete(&prompt)?;
        let reason = match parse(&first) {
            Ok(v) => return Ok(v),
            Err(reason) => reason,
        };
        log::info!("{stage}: malformed answer ({reason}), asking again");
        let reminder = &self.templates.get(stage).reminder;
        let retry = Prompt {
            user: format!("{}\n\nYour previous answer could not be used: {reason}. {reminder}", prompt.user),
            ..prompt
        };
        let second = self.complete(&retry)?;
        parse(&second).map_err(|reason| LlmError::MalformedAnswer { stage, reason })
    }
}
