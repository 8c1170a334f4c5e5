use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{Completion, LlmError, LlmProvider, Prompt, Stage};

/// Settings for an OpenAI-compatible chat endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_retries: u32,
    /// Environment variable holding the API key.
    pub api_key_env: Option<String>,
    /// 0 disables client-side throttling.
    pub requests_per_minute: u32,
    pub timeout_secs: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4".into(),
            temperature: 0.0,
            max_retries: 3,
            api_key_env: Some("OPENAI_API_KEY".into()),
            requests_per_minute: 0,
            timeout_secs: 120,
        }
    }
}

/// Spaces calls evenly; shared by every instance using one provider.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn per_minute(requests: u32) -> Self {
        let interval = if requests == 0 { Duration::ZERO } else { Duration::from_secs(60) / requests };
        RateLimiter { interval, next: Mutex::new(None) }
    }

    /// Blocks until the caller's slot.
    pub fn acquire(&self) {
        if self.interval.is_zero() {
            return;
        }
        let wait = {
            let mut next = self.next.lock().unwrap_or_else(|e| e.into_inner());
            let now = Instant::now();
            let slot = next.map_or(now, |n| n.max(now));
            *next = Some(slot + self.interval);
            slot - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

pub struct HttpProvider {
    config: ProviderConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

impl HttpProvider {
    pub fn new(config: ProviderConfig) -> Self {
        let agent =
            ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(config.timeout_secs))).build().into();
        let api_key = config.api_key_env.as_deref().and_then(|v| std::env::var(v).ok());
        let limiter = RateLimiter::per_minute(config.requests_per_minute);
        HttpProvider { config, api_key, agent, limiter }
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }
}

impl LlmProvider for HttpProvider {
    fn complete(&self, prompt: &Prompt) -> Result<Completion, LlmError> {
        self.limiter.acquire();
        let body = serde_json::json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                { "role": "system", "content": prompt.system },
                { "role": "user", "content": prompt.user },
            ],
        });
        let url = format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'));
        let mut req = self.agent.post(url);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let start = Instant::now();
        let mut response = match req.send_json(&body) {
            Ok(r) => r,
            Err(ureq::Error::StatusCode(429)) => return Err(LlmError::RateLimited { retry_after: None }),
            Err(e) => return Err(LlmError::Provider(e.to_string())),
        };
        let value: serde_json::Value =
            response.body_mut().read_json().map_err(|e| LlmError::Provider(e.to_string()))?;
        let text = value["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| LlmError::Provider("response has no choices[0].message.content".into()))?;
        Ok(Completion {
            text: text.to_string(),
            latency: start.elapsed(),
            prompt_tokens: value["usage"]["prompt_tokens"].as_u64(),
            completion_tokens: value["usage"]["completion_tokens"].as_u64(),
        })
    }
}

/// One line of an LLM cassette.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmCassetteRecord {
    pub stage: Stage,
    pub prompt_sha256: String,
    pub response: String,
}

pub fn load_llm_cassette(path: &Path) -> Result<Vec<LlmCassetteRecord>, LlmError> {
    let file = fs::File::open(path).map_err(|e| LlmError::Provider(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| LlmError::Provider(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| LlmError::Provider(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_llm_cassette(path: &Path, records: &[LlmCassetteRecord]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut file = fs::File::create(path)?;
    for r in records {
        writeln!(file, "{}", serde_json::to_string(r).map_err(std::io::Error::other)?)?;
    }
    Ok(())
}

/// Answers from a cassette keyed by prompt digest. Entries with the same
/// key are served in order and the last one repeats. Unknown prompts go to
/// the fallback if there is one, else fail with `CassetteMiss`.
pub struct ReplayProvider {
    entries: Mutex<HashMap<String, VecDeque<String>>>,
    fallback: Option<Arc<dyn LlmProvider>>,
}

impl ReplayProvider {
    pub fn new(records: Vec<LlmCassetteRecord>) -> Self {
        let mut entries: HashMap<String, VecDeque<String>> = HashMap::new();
        for r in records {
            entries.entry(r.prompt_sha256).or_default().push_back(r.response);
        }
        ReplayProvider { entries: Mutex::new(entries), fallback: None }
    }

    pub fn from_file(path: &Path) -> Result<Self, LlmError> {
        Ok(Self::new(load_llm_cassette(path)?))
    }

    pub fn with_fallback(mut self, fallback: Arc<dyn LlmProvider>) -> Self {
        self.fallback = Some(fallback);
        self
    }
}

impl LlmProvider for ReplayProvider {
    fn complete(&self, prompt: &Prompt) -> Result<Completion, LlmError> {
        let digest = prompt.digest();
        let hit = {
            let mut entries = self.entries.lock().unwrap_or_else(|e| e.into_inner());
            entries.get_mut(&digest).and_then(|q| if q.len() > 1 { q.pop_front() } else { q.front().cloned() })
        };
        match (hit, &self.fallback) {
            (Some(text), _) => Ok(Completion::instant(text)),
            (None, Some(fallback)) => fallback.complete(prompt),
            (None, None) => Err(LlmError::CassetteMiss { stage: prompt.stage, digest }),
        }
    }
}

/// Forwards to an inner provider and keeps every answered prompt.
pub struct RecordingProvider {
    inner: Arc<dyn LlmProvider>,
    records: Arc<Mutex<Vec<LlmCassetteRecord>>>,
}

impl RecordingProvider {
    pub fn new(inner: Arc<dyn LlmProvider>) -> Self {
        RecordingProvider { inner, records: Arc::default() }
    }

    pub fn records(&self) -> Arc<Mutex<Vec<LlmCassetteRecord>>> {
        Arc::clone(&self.records)
    }
}

impl LlmProvider for RecordingProvider {
    fn complete(&self, prompt: &Prompt) -> Result<Completion, LlmError> {
        let completion = self.inner.complete(prompt)?;
        self.records.lock().unwrap_or_else(|e| e.into_inner()).push(LlmCassetteRecord {
            stage: prompt.stage,
            prompt_sha256: prompt.digest(),
            response: completion.text.clone(),
        });
        Ok(completion)
    }
}

type Script = dyn Fn(&Prompt) -> Result<String, LlmError> + Send + Sync;

/// A provider driven by a closure, for tests and offline demos.
pub struct ScriptedProvider {
    script: Box<Script>,
}

impl ScriptedProvider {
    pub fn new(script: impl Fn(&Prompt) -> Result<String, LlmError> + Send + Sync + 'static) -> Self {
        ScriptedProvider { script: Box::new(script) }
    }

    /// Serves the listed answers per stage in order, repeating the last.
    /// A stage without answers fails with `Provider`.
    pub fn per_stage(answers: BTreeMap<Stage, Vec<String>>) -> Self {
        let queues: Mutex<BTreeMap<Stage, VecDeque<String>>> =
            Mutex::new(answers.into_iter().map(|(k, v)| (k, v.into())).collect());
        ScriptedProvider::new(move |prompt| {
            let mut queues = queues.lock().unwrap_or_else(|e| e.into_inner());
            let queue = queues
                .get_mut(&prompt.stage)
                .filter(|q| !q.is_empty())
                .ok_or_else(|| LlmError::Provider(format!("no scripted answer for {}", prompt.stage)))?;
            Ok(if queue.len() > 1 { queue.pop_front().unwrap_or_default() } else { queue[0].clone() })
        })
    }
}

impl LlmProvider for ScriptedProvider {
    fn complete(&self, prompt: &Prompt) -> Result<Completion, LlmError> {
        (self.script)(prompt).map(Completion::instant)
    }
}
