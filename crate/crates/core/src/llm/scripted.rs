//! Replays canned responses from a JSON-lines file.
//!
//! Each line is either a JSON string, which answers the call with the same
//! global index as the line's position among string lines, or an object
//! `{"process": p, "response": "..."}`, which answers process `p`'s calls in
//! order. Process-specific lines take precedence.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{ChatRequest, LlmBackend, LlmError, Ticket};

#[derive(Deserialize)]
#[serde(untagged)]
enum Line {
    Shared(String),
    Keyed { process: usize, response: String },
}

#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    shared: Vec<String>,
    keyed: HashMap<usize, Vec<String>>,
}

impl ScriptedBackend {
    pub fn from_responses<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        Self { shared: responses.into_iter().map(Into::into).collect(), keyed: HashMap::new() }
    }

    pub fn with_process_responses<S: Into<String>>(mut self, process: usize, responses: impl IntoIterator<Item = S>) -> Self {
        self.keyed.entry(process).or_default().extend(responses.into_iter().map(Into::into));
        self
    }

    pub fn parse(text: &str) -> Result<Self, LlmError> {
        let mut out = Self::default();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line: Line = serde_json::from_str(raw).map_err(|e| LlmError::Config(format!("script line {}: {e}", i + 1)))?;
            match line {
                Line::Shared(s) => out.shared.push(s),
                Line::Keyed { process, response } => out.keyed.entry(process).or_default().push(response),
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self, LlmError> {
        let text = fs::read_to_string(path).map_err(|e| LlmError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.shared.len() + self.keyed.values().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl LlmBackend for ScriptedBackend {
    fn complete(&self, ticket: &Ticket, _req: &ChatRequest) -> Result<String, LlmError> {
        if let Some(r) = self.keyed.get(&ticket.process_id).and_then(|q| q.get(ticket.process_call as usize)) {
            return Ok(r.clone());
        }
        self.shared
            .get(ticket.call_index as usize)
            .cloned()
            .ok_or(LlmError::ScriptExhausted { process_id: ticket.process_id, call_index: ticket.call_index })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{Gateway, GenerationConfig};
    use std::sync::Arc;

    #[test]
    fn queue_order_then_exhausted() {
        let gw = Gateway::new(Arc::new(ScriptedBackend::from_responses(["A", "B"])), 10, GenerationConfig::default());
        assert_eq!(gw.call(0, "").unwrap(), "A");
        assert_eq!(gw.call(0, "").unwrap(), "B");
        assert!(matches!(gw.call(0, ""), Err(LlmError::ScriptExhausted { .. })));
        assert_eq!(gw.budget().used(), 3);
    }

    #[test]
    fn parse_mixed_lines() {
        let s = ScriptedBackend::parse("\"x\"\n{\"process\": 1, \"response\": \"y\"}\n\n\"z\"\n").unwrap();
        let gw = Gateway::new(Arc::new(s), 10, GenerationConfig::default());
        assert_eq!(gw.call(1, "").unwrap(), "y");
        assert_eq!(gw.call(0, "").unwrap(), "z");
        assert!(ScriptedBackend::parse("{oops").is_err());
    }
}
