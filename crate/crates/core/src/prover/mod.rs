//! Theorem prover gateway: submission, ATP search per proof step and
//! classification of raw prover output.

mod backends;
mod classify;
mod ground;


use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::theory::{extract_used_axioms, render_thy_file, ProofOutcome, ProofSketch, TheoryDoc};

pub use backends::{
    load_prover_cassette, write_prover_cassette, MockProver, ProcessProver, ProverCassetteRecord, RecordingProver,
    ScriptedProver,
};
pub use classify::{classify_output, PatternError, PatternTable};
pub use ground::GroundProver;

/// Default per-call ATP budget.
pub const DEFAULT_TIMEOUT_SECS: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyntaxErrorKind {
    MissingBracket,
    TypeUnification,
    UndefinedSymbol,
    InnerSyntax,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ProverVerdict {
    ProofFound { outcome: ProofOutcome },
    StepFailed { step_index: usize, statement: String, message: String },
    SyntaxError { kind: SyntaxErrorKind, message: String, location: Option<usize> },
    Timeout { stage: String },
    NoProof { message: String },
}

impl ProverVerdict {
    pub fn is_proof(&self) -> bool {
        matches!(self, ProverVerdict::ProofFound { .. })
    }

    pub fn summary(&self) -> String {
        match self {
            ProverVerdict::ProofFound { outcome } => format!("proof found: {}", outcome.proof_text),
            ProverVerdict::StepFailed { step_index, message, .. } => format!("step {step_index} failed: {message}"),
            ProverVerdict::SyntaxError { kind, message, location } => match location {
                Some(l) => format!("syntax error ({kind:?}) at line {l}: {message}"),
                None => format!("syntax error ({kind:?}): {message}"),
            },
            ProverVerdict::Timeout { stage } => format!("timeout in {stage}"),
            ProverVerdict::NoProof { message } => format!("no proof: {message}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RequestKind {
    Theory,
    Step(usize),
}

/// One submission to a backend.
#[derive(Debug, Clone)]
pub struct ProverRequest {
    pub kind: RequestKind,
    pub theory_name: String,
    pub text: String,
}

/// What a backend returns. `verdict` overrides classification of `raw`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverReply {
    pub raw: String,
    pub verdict: Option<ProverVerdict>,
}

impl ProverReply {
    pub fn raw(raw: impl Into<String>) -> Self {
        ProverReply { raw: raw.into(), verdict: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProverError {
    #[error("prover session down: {0}")]
    SessionDown(String),
    #[error("prover cassette record {index}: expected theory {expected}, got {actual}")]
    CassetteMismatch { index: usize, expected: String, actual: String },
    #[error("prover cassette exhausted after {0} records")]
    CassetteExhausted(usize),
    #[error("step {index} is not a placeholder of a sketch with {len} steps")]
    BadStep { index: usize, len: usize },
    #[error("prover cassette: {0}")]
    Cassette(String),
}

pub trait ProverBackend: Send {
    fn submit(&mut self, request: &ProverRequest) -> Result<ProverReply, ProverError>;
}

impl<B: ProverBackend + ?Sized> ProverBackend for Box<B> {
    fn submit(&mut self, request: &ProverRequest) -> Result<ProverReply, ProverError> {
        (**self).submit(request)
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// A submission and its verdict, kept for the run log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictLogEntry {
    pub kind: RequestKind,
    pub theory_name: String,
    pub theory_sha256: String,
    pub verdict: ProverVerdict,
    pub raw: String,
}

/// One backend plus the log of what was sent to it.
pub struct ProverSession {
    backend: Box<dyn ProverBackend>,
    patterns: &'static PatternTable,
    log: Vec<VerdictLogEntry>,
}

impl ProverSession {
    pub fn new(backend: Box<dyn ProverBackend>) -> Self {
        ProverSession { backend, patterns: PatternTable::builtin(), log: Vec::new() }
    }

    pub fn with_patterns(mut self, patterns: &'static PatternTable) -> Self {
        self.patterns = patterns;
        self
    }

    pub fn log(&self) -> &[VerdictLogEntry] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<VerdictLogEntry> {
        std::mem::take(&mut self.log)
    }

    /// Submits a whole theory and classifies the outcome. Used labels of a
    /// proof are re-extracted against `declared`.
    pub fn check_theory(
        &mut self,
        theory_name: &str,
        theory_text: &str,
        declared: &[String],
    ) -> Result<ProverVerdict, ProverError> {
        let request =
            ProverRequest { kind: RequestKind::Theory, theory_name: theory_name.into(), text: theory_text.into() };
        let (verdict, raw) = self.run(&request)?;
        let verdict = with_labels(verdict, declared);
        self.record(&request, &verdict, raw);
        Ok(verdict)
    }

    /// Runs the ATP search on one placeholder step of `sketch` inside `theory`.
    /// A failed search is reported as `StepFailed` for that step.
    pub fn check_step(
        &mut self,
        theory: &TheoryDoc,
        sketch: &ProofSketch,
        step_index: usize,
    ) -> Result<ProverVerdict, ProverError> {
        let len = sketch.steps.len();
        let probe = sketch.probe(step_index).map_err(|_| ProverError::BadStep { index: step_index, len })?;
        let mut doc = theory.clone();
        doc.proof = Some(probe);
        let request = ProverRequest {
            kind: RequestKind::Step(step_index),
            theory_name: theory.name.clone(),
            text: render_thy_file(&doc),
        };
        let (verdict, raw) = self.run(&request)?;
        let statement = sketch.steps[step_index].statement.clone();
        let verdict = match verdict {
            ProverVerdict::NoProof { message } | ProverVerdict::StepFailed { message, .. } => {
                ProverVerdict::StepFailed { step_index, statement, message }
            }
            other => with_labels(other, &theory.labels()),
        };
        self.record(&request, &verdict, raw);
        Ok(verdict)
    }

    fn run(&mut self, request: &ProverRequest) -> Result<(ProverVerdict, String), ProverError> {
        let reply = self.backend.submit(request)?;
        let verdict = reply.verdict.clone().unwrap_or_else(|| self.patterns.classify(&reply.raw));
        Ok((verdict, reply.raw))
    }

    fn record(&mut self, request: &ProverRequest, verdict: &ProverVerdict, raw: String) {
        log::debug!("{} {:?}: {}", request.theory_name, request.kind, verdict.summary());
        self.log.push(VerdictLogEntry {
            kind: request.kind,
            theory_name: request.theory_name.clone(),
            theory_sha256: sha256_hex(&request.text),
            verdict: verdict.clone(),
            raw,
        });
    }
}

fn with_labels(verdict: ProverVerdict, declared: &[String]) -> ProverVerdict {
    match verdict {
        ProverVerdict::ProofFound { outcome } => {
            ProverVerdict::ProofFound { outcome: extract_used_axioms(&outcome.proof_text, declared) }
        }
        other => other,
    }
}
