//! Chat-completion transport: one synchronous interface over a scripted
//! backend (deterministic tests and replays) and an HTTP backend (live
//! runs), with every call captured in a transcript.
//!
//! Nothing above this layer builds network requests; agents talk to a
//! [`Gateway`] and nothing else. Code extraction and prompt construction
//! live with the agents, not here.

use std::fs;
use std::io;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub request_seed: Option<u64>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams { temperature: 1.0, top_p: 1.0, max_tokens: 4096, request_seed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GatewayError {
    #[error("transport failure: {0}")]
    TransportError(String),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("authentication rejected: {0}")]
    AuthError(String),
    #[error("backend refused the request: {0}")]
    BackendRefusal(String),
    #[error("response did not match the expected wire format: {0}")]
    MalformedResponse(String),
    #[error("scripted backend has no response left for this request")]
    ScriptExhausted,
}

impl GatewayError {
    /// Transient failures worth retrying; everything else surfaces at once.
    pub fn retryable(&self) -> bool {
        matches!(self, GatewayError::TransportError(_) | GatewayError::Timeout(_))
    }
}

/// What a backend hands back for one request.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendResponse {
    pub content: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl BackendResponse {
    pub fn text(content: impl Into<String>) -> Self {
        BackendResponse { content: content.into(), prompt_tokens: None, completion_tokens: None }
    }
}

/// A chat-completion provider. Implementations must be shareable across
/// threads; the benchmark runner calls them concurrently.
pub trait ChatBackend: Send + Sync {
    fn complete(
        &self,
        messages: &[ChatMessage],
        params: &GenerationParams,
    ) -> Result<BackendResponse, GatewayError>;

    /// Scripted backends suppress wall-clock fields in the transcript so a
    /// replayed run serializes byte-identically.
    fn deterministic(&self) -> bool {
        false
    }
}

/// One recorded gateway call. Timing and token fields stay `None` under
/// deterministic backends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub agent: String,
    pub request: Vec<ChatMessage>,
    pub params: GenerationParams,
    pub response: String,
    pub timestamp_ms: Option<u64>,
    pub latency_ms: Option<u64>,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

/// Append-only record of every completed call, serialized as JSON lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    pub fn append(&mut self, entry: TranscriptEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let mut entries = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            entries.push(serde_json::from_str(line)?);
        }
        Ok(Transcript { entries })
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_jsonl())
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        Transcript::from_jsonl(&text)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
    }

    /// A backend that replays this transcript's responses in order, so a
    /// recorded run can be re-driven without the original provider.
    pub fn to_scripted_backend(&self) -> ScriptedBackend {
        ScriptedBackend::sequence(self.entries.iter().map(|e| e.response.clone()))
    }
}

enum Script {
    Sequence { responses: Vec<String>, cursor: usize },
    Rules(Vec<(String, String)>),
}

/// Deterministic backend: either a fixed response sequence or
/// substring-triggered rules (first match wins).
pub struct ScriptedBackend {
    script: Mutex<Script>,
}

impl ScriptedBackend {
    pub fn sequence(responses: impl IntoIterator<Item = impl Into<String>>) -> Self {
        ScriptedBackend {
            script: Mutex::new(Script::Sequence {
                responses: responses.into_iter().map(Into::into).collect(),
                cursor: 0,
            }),
        }
    }

    /// Rules are `(pattern, response)` pairs; a request is answered by the
    /// first rule whose pattern occurs in the concatenated request text.
    pub fn rules(rules: impl IntoIterator<Item = (impl Into<String>, impl Into<String>)>) -> Self {
        ScriptedBackend {
            script: Mutex::new(Script::Rules(
                rules.into_iter().map(|(p, r)| (p.into(), r.into())).collect(),
            )),
        }
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(
        &self,
        messages: &[ChatMessage],
        _params: &GenerationParams,
    ) -> Result<BackendResponse, GatewayError> {
        let mut script = self.script.lock().expect("script lock");
        match &mut *script {
            Script::Sequence { responses, cursor } => {
                let response = responses.get(*cursor).ok_or(GatewayError::ScriptExhausted)?;
                *cursor += 1;
                Ok(BackendResponse::text(response.clone()))
            }
            Script::Rules(rules) => {
                let haystack: String = messages
                    .iter()
                    .map(|m| m.content.as_str())
                    .collect::<Vec<_>>()
                    .join("\n");
                for (pattern, response) in rules.iter() {
                    if haystack.contains(pattern.as_str()) {
                        return Ok(BackendResponse::text(response.clone()));
                    }
                }
                Err(GatewayError::ScriptExhausted)
            }
        }
    }

    fn deterministic(&self) -> bool {
        true
    }
}

/// Retry schedule for transient failures: `attempts` total tries, sleeping
/// `initial_backoff` doubled after each failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, initial_backoff: Duration::from_secs(1) }
    }
}

impl RetryPolicy {
    /// No waiting between tries; for tests against local stubs.
    pub fn immediate(attempts: u32) -> Self {
        RetryPolicy { attempts, initial_backoff: Duration::ZERO }
    }
}

/// The single entry point for model calls: owns the backend, the retry
/// policy, the transcript, and the call counter.
pub struct Gateway {
    backend: Arc<dyn ChatBackend>,
    retry: RetryPolicy,
    transcript: Mutex<Transcript>,
    calls: AtomicU64,
}

impl Gateway {
    pub fn new(backend: Arc<dyn ChatBackend>) -> Self {
        Gateway {
            backend,
            retry: RetryPolicy::default(),
            transcript: Mutex::new(Transcript::new()),
            calls: AtomicU64::new(0),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Number of logical completion calls made so far (retries of one call
    /// count once).
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn transcript(&self) -> Transcript {
        self.transcript.lock().expect("transcript lock").clone()
    }

    /// Removes and returns everything recorded so far; used to cut one
    /// task's transcript out before the next begins.
    pub fn take_transcript(&self) -> Transcript {
        std::mem::take(&mut *self.transcript.lock().expect("transcript lock"))
    }

    pub fn complete(
        &self,
        agent: &str,
        messages: &[ChatMessage],
        params: &GenerationParams,
    ) -> Result<ChatMessage, GatewayError> {
        assert!(!messages.is_empty(), "a completion request needs at least one message");
        self.calls.fetch_add(1, Ordering::SeqCst);
        let deterministic = self.backend.deterministic();
        let started = Instant::now();
        let mut backoff = self.retry.initial_backoff;
        let mut last_error = GatewayError::TransportError("no attempt was made".to_string());
        for attempt in 0..self.retry.attempts.max(1) {
            if attempt > 0 {
                if !backoff.is_zero() {
                    std::thread::sleep(backoff);
                }
                backoff *= 2;
            }
            match self.backend.complete(messages, params) {
                Ok(response) => {
                    let (timestamp_ms, latency_ms) = if deterministic {
                        (None, None)
                    } else {
                        let now = SystemTime::now()
                            .duration_since(UNIX_EPOCH)
                            .unwrap_or(Duration::ZERO)
                            .as_millis() as u64;
                        (Some(now), Some(started.elapsed().as_millis() as u64))
                    };
                    let entry = TranscriptEntry {
                        agent: agent.to_string(),
                        request: messages.to_vec(),
                        params: params.clone(),
                        response: response.content.clone(),
                        timestamp_ms,
                        latency_ms,
                        prompt_tokens: response.prompt_tokens,
                        completion_tokens: response.completion_tokens,
                    };
                    self.transcript.lock().expect("transcript lock").append(entry);
                    return Ok(ChatMessage::assistant(response.content));
                }
                Err(e) if e.retryable() => last_error = e,
                Err(e) => return Err(e),
            }
        }
        Err(last_error)
    }
}

/// Remote chat-completion backend speaking the common JSON wire format:
/// POST `{model, messages, temperature, top_p, max_tokens, seed?}`, read
/// `choices[0].message.content`.
pub struct HttpBackend {
    endpoint: String,
    model: String,
    auth_token: Option<String>,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
    top_p: f64,
    max_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .expect("http client builds");
        HttpBackend { endpoint: endpoint.into(), model: model.into(), auth_token: None, client }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("http client builds");
        self
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.auth_token = Some(token.into());
        self
    }

    /// Reads the bearer token from the named environment variable; absent
    /// or empty means requests go out unauthenticated.
    pub fn with_token_env(mut self, var: &str) -> Self {
        self.auth_token = std::env::var(var).ok().filter(|t| !t.is_empty());
        self
    }
}

impl ChatBackend for HttpBackend {
    fn complete(
        &self,
        messages: &[ChatMessage],
        params: &GenerationParams,
    ) -> Result<BackendResponse, GatewayError> {
        let body = WireRequest {
            model: &self.model,
            messages,
            temperature: params.temperature,
            top_p: params.top_p,
            max_tokens: params.max_tokens,
            seed: params.request_seed,
        };
        let mut request = self.client.post(&self.endpoint).json(&body);
        if let Some(token) = &self.auth_token {
            request = request.bearer_auth(token);
        }
        let response = request.send().map_err(|e| {
            if e.is_timeout() {
                GatewayError::Timeout(e.to_string())
            } else {
                GatewayError::TransportError(e.to_string())
            }
        })?;

        let status = response.status();
        let text = response
            .text()
            .map_err(|e| GatewayError::TransportError(e.to_string()))?;
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(GatewayError::AuthError(format!("{status}: {text}")));
        }
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(GatewayError::TransportError(format!("{status}: {text}")));
        }
        if !status.is_success() {
            return Err(GatewayError::BackendRefusal(format!("{status}: {text}")));
        }

        let json: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| GatewayError::MalformedResponse(format!("{e}: {text}")))?;
        let content = json["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| {
                GatewayError::MalformedResponse(format!(
                    "missing choices[0].message.content in: {text}"
                ))
            })?
            .to_string();
        Ok(BackendResponse {
            content,
            prompt_tokens: json["usage"]["prompt_tokens"].as_u64(),
            completion_tokens: json["usage"]["completion_tokens"].as_u64(),
        })
    }
}
