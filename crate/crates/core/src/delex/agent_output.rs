use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{tokens_in, DelexError, DelexToken, Vocabulary};
use crate::domain::Domain;

static ANY_TOKEN_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\[[A-Za-z]+_[A-Za-z0-9]+\]|\b[A-Z][A-Z_]{1,}\b").unwrap());

static HEADER_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?im)^\s*\**\s*(response|token[_ ]values|reasoning)\s*\**\s*:\s*").unwrap()
});

const VALUE_TRIM: &[char] = &[' ', '\t', ':', '=', ',', ';', '-', '"', '\''];

/// A responder's structured reply.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentOutput {
    pub response: String,
    pub token_values: BTreeMap<DelexToken, String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub reasoning: String,
}

impl AgentOutput {
    pub fn render(&self) -> String {
        let values: Vec<String> = self
            .token_values
            .iter()
            .map(|(t, v)| format!("{t} - {v}"))
            .collect();
        let mut out = format!(
            "Response: {}\nToken_values: {}",
            self.response,
            values.join(", ")
        );
        if !self.reasoning.is_empty() {
            out.push_str("\nReasoning: ");
            out.push_str(&self.reasoning);
        }
        out
    }
}

/// Canonical token for a bracketed or uppercase placeholder. `next` is the
/// text that follows it, used to read `COUNT people` as a party size.
fn canonical(raw: &str, domain: Domain, next: &str) -> Option<DelexToken> {
    let vocab = Vocabulary::bundled();
    if raw.starts_with('[') {
        let token: DelexToken = raw.to_ascii_lowercase().parse().ok()?;
        return vocab.contains(&token).then_some(token);
    }
    if !vocab.is_alias(raw) {
        return None;
    }
    if raw == "COUNT" && next.trim_start().to_ascii_lowercase().starts_with("people") {
        if let Some(t) = vocab.resolve_alias(domain, "PEOPLE") {
            return Some(t);
        }
    }
    vocab.resolve_alias(domain, raw)
}

fn canonicalize_text(text: &str, domain: Domain) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for m in ANY_TOKEN_RE.find_iter(text) {
        out.push_str(&text[last..m.start()]);
        match canonical(m.as_str(), domain, &text[m.end()..]) {
            Some(t) => out.push_str(&t.to_string()),
            None => out.push_str(m.as_str()),
        }
        last = m.end();
    }
    out.push_str(&text[last..]);
    out
}

fn parse_values(line: &str, domain: Domain) -> BTreeMap<DelexToken, String> {
    let mut marks: Vec<(usize, usize, DelexToken)> = Vec::new();
    for m in ANY_TOKEN_RE.find_iter(line) {
        if let Some(t) = canonical(m.as_str(), domain, &line[m.end()..]) {
            marks.push((m.start(), m.end(), t));
        }
    }
    let mut out = BTreeMap::new();
    for (i, (_, end, token)) in marks.iter().enumerate() {
        let stop = marks.get(i + 1).map_or(line.len(), |m| m.0);
        let value = line[*end..stop].trim_matches(VALUE_TRIM);
        if !value.is_empty() {
            out.entry(token.clone()).or_insert_with(|| value.to_string());
        }
    }
    out
}

/// Parses `Response:` / `Token_values:` / `Reasoning:` sections. Uppercase
/// placeholders are mapped onto the domain's tokens; bindings for tokens the
/// response does not use are dropped.
pub fn parse_agent_output(raw: &str, domain: Domain) -> Result<AgentOutput, DelexError> {
    let headers: Vec<_> = HEADER_RE.captures_iter(raw).collect();
    let mut sections: BTreeMap<String, String> = BTreeMap::new();
    for (i, cap) in headers.iter().enumerate() {
        let whole = cap.get(0).unwrap();
        let stop = headers
            .get(i + 1)
            .map_or(raw.len(), |c| c.get(0).unwrap().start());
        let name = cap[1].to_ascii_lowercase().replace(' ', "_");
        sections
            .entry(name)
            .or_insert_with(|| raw[whole.end()..stop].trim().to_string());
    }
    let response = sections
        .get("response")
        .filter(|r| !r.is_empty())
        .ok_or_else(|| DelexError::MissingResponse {
            raw: raw.to_string(),
        })?;
    let response = canonicalize_text(response, domain);
    let mut token_values = sections
        .get("token_values")
        .map(|v| parse_values(v, domain))
        .unwrap_or_default();
    let used = tokens_in(&response);
    token_values.retain(|t, _| used.contains(t));
    Ok(AgentOutput {
        response,
        token_values,
        reasoning: sections.remove("reasoning").unwrap_or_default(),
    })
}
