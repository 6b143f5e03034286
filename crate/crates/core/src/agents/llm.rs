use std::fs::{File, OpenOptions};
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::{build_prompt, ExampleBank, Task};
use super::{AgentError, DomainDetector, Reply, RespondInput, Responder, Tracker};
use crate::corpus::{render_context, Turn};
use crate::delex::{parse_agent_output, DelexResponse, DelexToken};
use crate::domain::Domain;
use crate::dst::DialogueState;
use crate::kb::{book, Database, VenueSummary};

/// Environment variable holding the endpoint credential.
pub const API_KEY_ENV: &str = "DARD_LLM_API_KEY";

/// Chat-completion endpoint settings. Decoding is greedy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model: String,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    /// Total attempts per call, including the first.
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    /// Delay before the first retry; doubles on every further retry.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    /// Line-delimited JSON log of every request and response.
    #[serde(default)]
    pub audit_log: Option<PathBuf>,
}

fn default_max_tokens() -> u32 {
    512
}
fn default_timeout_secs() -> u64 {
    60
}
fn default_max_attempts() -> u32 {
    4
}
fn default_backoff_ms() -> u64 {
    500
}

impl LlmConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        LlmConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            max_tokens: default_max_tokens(),
            timeout_secs: default_timeout_secs(),
            max_attempts: default_max_attempts(),
            backoff_ms: default_backoff_ms(),
            audit_log: None,
        }
    }
}

enum Failure {
    Retryable(String),
    Fatal(AgentError),
}

/// Blocking client for an OpenAI-style `chat/completions` endpoint.
pub struct LlmClient {
    config: LlmConfig,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
    audit: Option<Mutex<File>>,
}

impl std::fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmClient")
            .field("config", &self.config)
            .field("api_key", &self.api_key.as_ref().map(|_| "<set>"))
            .finish()
    }
}

impl LlmClient {
    /// Client whose credential is read from [`API_KEY_ENV`].
    pub fn from_env(config: LlmConfig) -> Result<Self, AgentError> {
        let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::with_api_key(config, key)
    }

    /// A missing key is reported on the first call, before any request.
    pub fn with_api_key(config: LlmConfig, api_key: Option<String>) -> Result<Self, AgentError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| AgentError::Config(format!("http client: {e}")))?;
        let audit = match &config.audit_log {
            Some(path) => Some(Mutex::new(
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| AgentError::Config(format!("audit log {}: {e}", path.display())))?,
            )),
            None => None,
        };
        Ok(LlmClient {
            config,
            api_key,
            http,
            audit,
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    pub fn has_api_key(&self) -> bool {
        self.api_key.is_some()
    }

    fn log(&self, record: Value) {
        if let Some(file) = &self.audit {
            let mut f = file.lock().unwrap_or_else(|p| p.into_inner());
            if let Err(e) = writeln!(f, "{record}") {
                log::warn!("audit log write failed: {e}");
            }
        }
    }

    fn attempt(&self, key: &str, body: &Value) -> Result<String, Failure> {
        let resp = self
            .http
            .post(&self.config.endpoint)
            .bearer_auth(key)
            .json(body)
            .send()
            .map_err(|e| Failure::Retryable(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Failure::Retryable(e.to_string()))?;
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(Failure::Retryable(format!("HTTP {status}: {text}")));
        }
        if !status.is_success() {
            return Err(Failure::Fatal(AgentError::Config(format!(
                "endpoint rejected the request with HTTP {status}: {text}"
            ))));
        }
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Fatal(AgentError::Output(format!("response is not JSON: {e}"))))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| {
                Failure::Fatal(AgentError::Output(
                    "response has no choices[0].message.content".to_string(),
                ))
            })
    }

    /// One completion for a system + user prompt pair.
    pub fn complete(&self, dialogue_id: &str, system: &str, user: &str) -> Result<String, AgentError> {
        let key = self.api_key.as_deref().ok_or_else(|| {
            AgentError::Config(format!("{API_KEY_ENV} is not set"))
        })?;
        let body = json!({
            "model": self.config.model,
            "temperature": 0,
            "max_tokens": self.config.max_tokens,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        });
        let attempts = self.config.max_attempts.max(1);
        let mut last = String::new();
        for attempt in 1..=attempts {
            match self.attempt(key, &body) {
                Ok(text) => {
                    self.log(json!({
                        "dialogue_id": dialogue_id, "attempt": attempt,
                        "request": body, "response": text,
                    }));
                    return Ok(text);
                }
                Err(Failure::Fatal(e)) => {
                    self.log(json!({
                        "dialogue_id": dialogue_id, "attempt": attempt,
                        "request": body, "error": e.to_string(),
                    }));
                    return Err(e);
                }
                Err(Failure::Retryable(msg)) => {
                    self.log(json!({
                        "dialogue_id": dialogue_id, "attempt": attempt,
                        "request": body, "error": msg,
                    }));
                    last = msg;
                    if attempt < attempts {
                        let delay = self.config.backoff_ms.saturating_mul(1 << (attempt - 1).min(16));
                        std::thread::sleep(Duration::from_millis(delay));
                    }
                }
            }
        }
        Err(AgentError::Transport {
            attempts,
            message: last,
        })
    }
}

/// Reads a state from model text: the first JSON object after an optional
/// `State:` label, with string or list-of-string values.
pub fn parse_state_output(raw: &str, domain: Domain) -> Result<DialogueState, AgentError> {
    let tail = raw
        .to_ascii_lowercase()
        .find("state:")
        .map_or(raw, |i| &raw[i + "state:".len()..]);
    let start = tail
        .find('{')
        .ok_or_else(|| AgentError::Output(format!("no state object in `{raw}`")))?;
    let mut stream = serde_json::Deserializer::from_str(&tail[start..]).into_iter::<Value>();
    let value = match stream.next() {
        Some(Ok(v)) => v,
        _ => return Err(AgentError::Output(format!("malformed state object in `{raw}`"))),
    };
    let obj = value
        .as_object()
        .ok_or_else(|| AgentError::Output("state is not an object".to_string()))?;
    // Accept both `{slot: ...}` and `{domain: {slot: ...}}`.
    let slots = match obj.get(domain.as_str()).and_then(Value::as_object) {
        Some(inner) => inner,
        None => obj,
    };
    let mut state = DialogueState::new();
    for (key, v) in slots {
        let values: Vec<String> = match v {
            Value::String(s) => vec![s.clone()],
            Value::Array(xs) => xs.iter().filter_map(Value::as_str).map(str::to_string).collect(),
            Value::Number(n) => vec![n.to_string()],
            _ => continue,
        };
        let values: Vec<String> = values
            .into_iter()
            .map(|s| s.trim().to_lowercase())
            .filter(|s| !s.is_empty())
            .collect();
        if !values.is_empty() {
            state.insert(domain, key.to_lowercase(), values);
        }
    }
    Ok(state)
}

/// Active domains named in model text, in order of first mention.
pub fn parse_domain_list(raw: &str) -> Vec<Domain> {
    let lower = raw.to_lowercase();
    let mut found: Vec<(usize, Domain)> = Domain::ACTIVE
        .iter()
        .filter_map(|d| lower.find(d.as_str()).map(|i| (i, *d)))
        .collect();
    found.sort();
    found.into_iter().map(|(_, d)| d).collect()
}

/// Prompted state tracker over a seeded sample of training examples.
pub struct LlmTracker {
    client: Arc<LlmClient>,
    bank: Arc<ExampleBank>,
    seed: u64,
}

impl LlmTracker {
    pub fn new(client: Arc<LlmClient>, bank: Arc<ExampleBank>, seed: u64) -> Self {
        LlmTracker { client, bank, seed }
    }
}

impl Tracker for LlmTracker {
    fn track(&self, dialogue_id: &str, domain: Domain, turns: &[Turn]) -> Result<DialogueState, AgentError> {
        if turns.is_empty() {
            return Ok(DialogueState::new());
        }
        let examples = self.bank.sample_dst(domain, self.seed);
        let prompt = build_prompt(domain, turns, &VenueSummary::empty(), &examples, Task::Dst);
        let raw = self.client.complete(dialogue_id, &prompt.system_text(), &prompt.user_text())?;
        parse_state_output(&raw, domain)
    }
}

/// Prompted responder. A reference token in the output is bound to the
/// knowledge base's booking reference when the booking can be made.
pub struct LlmResponder {
    client: Arc<LlmClient>,
    db: Arc<Database>,
}

impl LlmResponder {
    pub fn new(client: Arc<LlmClient>, db: Arc<Database>) -> Self {
        LlmResponder { client, db }
    }
}

impl Responder for LlmResponder {
    fn respond(&self, input: &RespondInput<'_>) -> Result<Reply, AgentError> {
        let d = input.domain;
        let prompt = build_prompt(d, input.turns, input.summary, &[], Task::Respond);
        let raw = self
            .client
            .complete(input.dialogue_id, &prompt.system_text(), &prompt.user_text())?;
        let out = parse_agent_output(&raw, d)?;
        let mut bindings = out.token_values;
        let venue = input
            .state
            .first(d, "name")
            .and_then(|n| self.db.find_by_name(d, n).into_iter().next())
            .or_else(|| input.summary.sample.clone())
            .or_else(|| (d == Domain::Taxi).then(|| self.db.synthesize_taxi(input.dialogue_id)));
        let ref_token = DelexToken::new(d, "ref");
        let mut booking = None;
        if out.response.contains(&ref_token.to_string()) {
            if let Some(v) = &venue {
                let fields = [("bookpeople", "people"), ("bookday", "day"), ("booktime", "time"), ("bookstay", "stay")]
                    .into_iter()
                    .filter_map(|(k, f)| input.state.first(d, k).map(|v| (f.to_string(), v.to_string())))
                    .collect();
                if let Ok(record) = book(input.dialogue_id, d, v, &fields, input.turn_index()) {
                    bindings.insert(ref_token, record.reference.clone());
                    booking = Some(record);
                }
            }
        }
        let delex = DelexResponse::new(out.response, bindings)?;
        Ok(Reply {
            delex,
            booking,
            venue,
        })
    }
}

/// Prompted dialogue manager naming the active domains.
pub struct LlmDetector {
    client: Arc<LlmClient>,
}

impl LlmDetector {
    pub fn new(client: Arc<LlmClient>) -> Self {
        LlmDetector { client }
    }
}

const DETECTOR_INSTRUCTIONS: &str = "You route a travel information conversation. List every \
domain among restaurant, hotel, attraction, train and taxi that the user has given \
constraints for, in the order they were introduced. Reply with one line: \
Domains: <comma-separated list>";

impl DomainDetector for LlmDetector {
    fn detect(&self, dialogue_id: &str, turns: &[Turn]) -> Result<Vec<Domain>, AgentError> {
        if turns.is_empty() {
            return Ok(Vec::new());
        }
        let user = format!("Conversation:\n{}", render_context(turns));
        let raw = self.client.complete(dialogue_id, DETECTOR_INSTRUCTIONS, &user)?;
        Ok(parse_domain_list(&raw))
    }
}
