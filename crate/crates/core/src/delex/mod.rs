//! Delexicalized responses: placeholder vocabulary, delexicalization of
//! surface text, lexicalization, and the structured agent output format.

mod agent_output;
mod gold;
mod vocab;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub use agent_output::{parse_agent_output, AgentOutput};
pub use gold::{delexicalize_gold, gold_turn_domain};
pub use vocab::{slot_for_key, BadToken, DelexToken, TokenSpec, Vocabulary};

use crate::domain::Domain;
use crate::dst::DialogueState;
use crate::kb::{BookingRecord, Venue};

static TOKEN_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\[([a-z]+)_([a-z]+)\]").unwrap());

/// Values that are never replaced: too generic to carry venue information.
const STOP_VALUES: [&str; 8] = ["yes", "no", "none", "dontcare", "?", "not mentioned", "free", "all"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DelexError {
    #[error("token {0} has no value")]
    Unbound(DelexToken),
    #[error("agent output has no `Response:` line: {raw:?}")]
    MissingResponse { raw: String },
}

/// Delexicalized text with a value for every placeholder it contains.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelexResponse {
    pub text: String,
    #[serde(default)]
    pub token_values: BTreeMap<DelexToken, String>,
    /// Tokens that replaced differing surface values; lexicalizing restores
    /// only the first of them.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub collapsed: BTreeSet<DelexToken>,
}

impl DelexResponse {
    /// Keeps the bindings the text uses; fails on a placeholder without one.
    pub fn new(
        text: impl Into<String>,
        mut bindings: BTreeMap<DelexToken, String>,
    ) -> Result<Self, DelexError> {
        let text = text.into();
        let used = tokens_in(&text);
        if let Some(t) = used.iter().find(|t| !bindings.contains_key(*t)) {
            return Err(DelexError::Unbound(t.clone()));
        }
        bindings.retain(|t, _| used.contains(t));
        Ok(DelexResponse {
            text,
            token_values: bindings,
            collapsed: BTreeSet::new(),
        })
    }

    pub fn plain(text: impl Into<String>) -> Self {
        DelexResponse {
            text: text.into(),
            token_values: BTreeMap::new(),
            collapsed: BTreeSet::new(),
        }
    }

    pub fn tokens(&self) -> BTreeSet<DelexToken> {
        tokens_in(&self.text)
    }

    /// Whether lexicalizing gives back the original utterance.
    pub fn is_reversible(&self) -> bool {
        self.collapsed.is_empty()
    }
}

/// Canonical placeholders occurring in `text`.
pub fn tokens_in(text: &str) -> BTreeSet<DelexToken> {
    TOKEN_RE
        .find_iter(text)
        .filter_map(|m| m.as_str().parse().ok())
        .collect()
}

/// Replaces every placeholder with its binding.
pub fn lexicalize(delex: &DelexResponse) -> Result<String, DelexError> {
    let mut out = String::with_capacity(delex.text.len());
    let mut last = 0;
    for m in TOKEN_RE.find_iter(&delex.text) {
        let Ok(token) = m.as_str().parse::<DelexToken>() else {
            continue;
        };
        let value = delex
            .token_values
            .get(&token)
            .ok_or_else(|| DelexError::Unbound(token.clone()))?;
        out.push_str(&delex.text[last..m.start()]);
        out.push_str(value);
        last = m.end();
    }
    out.push_str(&delex.text[last..]);
    Ok(out)
}

/// What a surface utterance may mention: tracked values, venues on offer,
/// a confirmed booking, venue counts, and any extra (token, value) pairs
/// such as those carried by dialogue-act annotations.
#[derive(Debug, Clone, Default)]
pub struct DelexContext<'a> {
    pub state: Option<&'a DialogueState>,
    pub venues: Vec<&'a Venue>,
    pub booking: Option<&'a BookingRecord>,
    pub counts: Vec<(Domain, usize)>,
    pub extra: Vec<(DelexToken, String)>,
}

impl DelexContext<'_> {
    fn candidates(&self) -> Vec<(String, DelexToken)> {
        let mut out: Vec<(String, DelexToken)> = Vec::new();
        let mut push = |value: &str, token: DelexToken| {
            for v in surface_variants(value) {
                if acceptable(&v, &token.slot) {
                    out.push((v, token.clone()));
                }
            }
        };
        for (token, value) in &self.extra {
            if Vocabulary::bundled().contains(token) {
                push(value, token.clone());
            }
        }
        if let Some(b) = self.booking {
            if let Some(slot) = slot_for_key(b.domain, "ref") {
                push(&b.reference, DelexToken::new(b.domain, slot));
            }
            for (field, value) in &b.fields {
                if let Some(slot) = slot_for_key(b.domain, &format!("book{field}")) {
                    push(value, DelexToken::new(b.domain, slot));
                }
            }
        }
        for venue in &self.venues {
            for (k, v) in &venue.attributes {
                if let Some(slot) = slot_for_key(venue.domain, k) {
                    push(v, DelexToken::new(venue.domain, slot));
                }
            }
        }
        if let Some(state) = self.state {
            for (d, k, values) in state.iter() {
                if let Some(slot) = slot_for_key(d, k) {
                    for v in values {
                        push(v, DelexToken::new(d, slot));
                    }
                }
            }
        }
        for (d, n) in &self.counts {
            if let Some(slot) = slot_for_key(*d, "choice") {
                out.push((n.to_string(), DelexToken::new(*d, slot)));
            }
        }
        out
    }
}

fn surface_variants(value: &str) -> Vec<String> {
    let v = value.trim().to_ascii_lowercase();
    let mut out = vec![v.clone()];
    if let Some(rest) = v.strip_prefix("the ") {
        out.push(rest.to_string());
    }
    out
}

fn acceptable(value: &str, slot: &str) -> bool {
    if value.is_empty() || STOP_VALUES.contains(&value) {
        return false;
    }
    if value.chars().all(|c| c.is_ascii_digit()) {
        // Short bare numbers are only meaningful for these slots.
        return value.len() >= 5
            || matches!(slot, "choice" | "bookpeople" | "bookstay" | "stars");
    }
    value.chars().count() >= 2
}

fn is_word_char(c: Option<char>) -> bool {
    c.is_some_and(|c| c.is_alphanumeric())
}

/// Replaces mentions of known values with placeholders, longest value first
/// then leftmost occurrence; matching is case-insensitive on word boundaries.
pub fn delexicalize(utterance: &str, ctx: &DelexContext<'_>) -> DelexResponse {
    let mut candidates = ctx.candidates();
    // Stable order: longest first, earlier sources win ties.
    candidates.sort_by_key(|c| std::cmp::Reverse(c.0.len()));
    let lowered = utterance.to_ascii_lowercase();
    let mut claimed = vec![false; lowered.len()];
    let mut spans: Vec<(usize, usize, DelexToken)> = Vec::new();
    for (value, token) in &candidates {
        let mut from = 0;
        while let Some(rel) = lowered[from..].find(value.as_str()) {
            let start = from + rel;
            let end = start + value.len();
            from = start + 1;
            while !lowered.is_char_boundary(from) && from < lowered.len() {
                from += 1;
            }
            let before = lowered[..start].chars().next_back();
            let after = lowered[end..].chars().next();
            if is_word_char(before) || is_word_char(after) {
                continue;
            }
            if claimed[start..end].iter().any(|c| *c) {
                continue;
            }
            claimed[start..end].iter_mut().for_each(|c| *c = true);
            spans.push((start, end, token.clone()));
        }
    }
    spans.sort_by_key(|s| s.0);
    let mut text = String::with_capacity(utterance.len());
    let mut bindings: BTreeMap<DelexToken, String> = BTreeMap::new();
    let mut collapsed = BTreeSet::new();
    let mut last = 0;
    for (start, end, token) in spans {
        text.push_str(&utterance[last..start]);
        text.push_str(&token.to_string());
        let surface = &utterance[start..end];
        match bindings.get(&token) {
            Some(first) if first != surface => {
                collapsed.insert(token);
            }
            Some(_) => {}
            None => {
                bindings.insert(token, surface.to_string());
            }
        }
        last = end;
    }
    text.push_str(&utterance[last..]);
    DelexResponse {
        text,
        token_values: bindings,
        collapsed,
    }
}
