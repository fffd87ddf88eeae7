//! Chat-completions client for OpenAI-compatible endpoints.

use std::env;
use std::thread;
use std::time::Duration;

use serde_json::{json, Value as Json};

use super::{ChatRequest, LlmBackend, LlmError, Ticket};

#[derive(Debug, Clone, PartialEq)]
pub struct HttpConfig {
    pub base_url: String,
    pub api_key: String,
    /// Delay before each retry; its length is the retry count.
    pub backoff: Vec<Duration>,
    pub timeout: Duration,
}

pub const DEFAULT_BASE_URL: &str = "https://openrouter.ai/api/v1";

impl HttpConfig {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            api_key: api_key.into(),
            backoff: [1, 4, 16].map(Duration::from_secs).to_vec(),
            timeout: Duration::from_secs(300),
        }
    }

    /// Reads `LLM_API_KEY` (required) and `LLM_BASE_URL`.
    pub fn from_env() -> Result<Self, LlmError> {
        let key = env::var("LLM_API_KEY").ok().filter(|k| !k.trim().is_empty());
        let key = key.ok_or_else(|| LlmError::Config("LLM_API_KEY is not set".into()))?;
        let base = env::var("LLM_BASE_URL").ok().filter(|b| !b.trim().is_empty());
        Ok(Self::new(base.unwrap_or_else(|| DEFAULT_BASE_URL.into()), key))
    }
}

pub struct HttpBackend {
    cfg: HttpConfig,
    agent: ureq::Agent,
}

enum Failure {
    Retry(String),
    Fatal(LlmError),
}

impl HttpBackend {
    pub fn new(cfg: HttpConfig) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(cfg.timeout)).http_status_as_error(false).build().into();
        Self { cfg, agent }
    }

    fn attempt(&self, req: &ChatRequest) -> Result<String, Failure> {
        let url = format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'));
        let body = json!({
            "model": req.model,
            "messages": req.messages,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        });
        let mut resp = self
            .agent
            .post(&url)
            .header("Authorization", format!("Bearer {}", self.cfg.api_key))
            .send_json(&body)
            .map_err(|e| Failure::Retry(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| Failure::Retry(e.to_string()))?;
        if status == 429 || status >= 500 {
            return Err(Failure::Retry(format!("HTTP {status}: {}", snippet(&text))));
        }
        if !(200..300).contains(&status) {
            return Err(Failure::Fatal(LlmError::Transport { attempts: 1, message: format!("HTTP {status}: {}", snippet(&text)) }));
        }
        let parsed: Json = serde_json::from_str(&text).map_err(|e| Failure::Fatal(LlmError::MalformedResponse(e.to_string())))?;
        parsed["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| Failure::Fatal(LlmError::MalformedResponse(format!("no message content in {}", snippet(&text)))))
    }
}

fn snippet(s: &str) -> String {
    s.chars().take(200).collect()
}

impl LlmBackend for HttpBackend {
    fn complete(&self, ticket: &Ticket, req: &ChatRequest) -> Result<String, LlmError> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(req) {
                Ok(text) => return Ok(text),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retry(message)) => match self.cfg.backoff.get(attempts as usize - 1) {
                    Some(delay) => {
                        tracing::warn!(call = ticket.call_index, attempt = attempts, %message, "retrying LLM request");
                        thread::sleep(*delay);
                    }
                    None => return Err(LlmError::Transport { attempts, message }),
                },
            }
        }
    }
}
