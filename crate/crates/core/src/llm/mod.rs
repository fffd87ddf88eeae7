//! Text-generation backends and the budgeted gateway in front of them.
//!
//! Calls are made in two steps: [`Gateway::reserve`] takes one unit of the
//! shared budget and hands out a [`Ticket`] carrying the global call index;
//! [`Gateway::complete`] then performs the request. Reserving in a fixed
//! order keeps scripted runs reproducible even when the requests themselves
//! run concurrently.

mod extract;
mod http;
mod scripted;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use extract::{extract_program, strip_comments, ExtractError};
pub use http::{HttpBackend, HttpConfig};
pub use scripted::ScriptedBackend;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LlmError {
    #[error("LLM call budget of {limit} exhausted")]
    BudgetExhausted { limit: u64 },
    #[error("transport error after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("script has no response left for process {process_id} (call {call_index})")]
    ScriptExhausted { process_id: usize, call_index: u64 },
    #[error("backend configuration: {0}")]
    Config(String),
}

impl LlmError {
    /// Errors after which a run cannot continue meaningfully.
    pub fn is_fatal(&self) -> bool {
        matches!(self, LlmError::ScriptExhausted { .. } | LlmError::Config(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self { model: "qwen/qwen-2.5-72b-instruct".into(), temperature: 1.0, max_tokens: 4096 }
    }
}

impl GenerationConfig {
    pub fn request(&self, prompt: &str) -> ChatRequest {
        ChatRequest {
            model: self.model.clone(),
            messages: vec![ChatMessage { role: "user".into(), content: prompt.into() }],
            temperature: self.temperature,
            max_tokens: self.max_tokens,
        }
    }
}

/// Shared call counter; `used` never exceeds `limit`.
#[derive(Debug)]
pub struct BudgetCounter {
    limit: u64,
    used: AtomicU64,
}

impl BudgetCounter {
    pub fn new(limit: u64) -> Self {
        Self { limit, used: AtomicU64::new(0) }
    }

    /// Takes one unit and returns its 0-based index.
    pub fn try_acquire(&self) -> Result<u64, LlmError> {
        self.used
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |u| (u < self.limit).then_some(u + 1))
            .map_err(|_| LlmError::BudgetExhausted { limit: self.limit })
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::SeqCst)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used()
    }
}

/// One reserved call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ticket {
    /// 0-based index among all calls of the run.
    pub call_index: u64,
    pub process_id: usize,
    /// 0-based index among this process's calls.
    pub process_call: u64,
}

pub trait LlmBackend: Send + Sync {
    fn complete(&self, ticket: &Ticket, req: &ChatRequest) -> Result<String, LlmError>;
}

pub struct Gateway {
    backend: Arc<dyn LlmBackend>,
    budget: BudgetCounter,
    generation: GenerationConfig,
    per_process: Mutex<HashMap<usize, u64>>,
}

impl Gateway {
    pub fn new(backend: Arc<dyn LlmBackend>, budget: u64, generation: GenerationConfig) -> Self {
        Self { backend, budget: BudgetCounter::new(budget), generation, per_process: Mutex::new(HashMap::new()) }
    }

    pub fn budget(&self) -> &BudgetCounter {
        &self.budget
    }

    pub fn reserve(&self, process_id: usize) -> Result<Ticket, LlmError> {
        let mut per = self.per_process.lock().unwrap();
        let call_index = self.budget.try_acquire()?;
        let slot = per.entry(process_id).or_insert(0);
        let process_call = *slot;
        *slot += 1;
        Ok(Ticket { call_index, process_id, process_call })
    }

    pub fn complete(&self, ticket: &Ticket, prompt: &str) -> Result<String, LlmError> {
        self.backend.complete(ticket, &self.generation.request(prompt))
    }

    /// `reserve` followed by `complete`.
    pub fn call(&self, process_id: usize, prompt: &str) -> Result<String, LlmError> {
        let ticket = self.reserve(process_id)?;
        self.complete(&ticket, prompt)
    }
}
