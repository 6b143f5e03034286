//! Tracker, responder and domain-detector interfaces with rule-based and
//! remote-model implementations.

pub mod lexicon;
mod llm;
mod prompt;
mod template;

use serde::{Deserialize, Serialize};

pub use llm::{
    parse_domain_list, parse_state_output, LlmClient, LlmConfig, LlmDetector, LlmResponder,
    LlmTracker, API_KEY_ENV,
};
pub use prompt::{build_prompt, ExampleBank, PromptBundle, Task, DST_EXAMPLE_COUNT};
pub use template::{TemplateResponder, TemplateTracker};

/// Rule-based dialogue manager; the template tracker doubles as detector.
pub type RuleDetector = TemplateTracker;

use crate::corpus::Turn;
use crate::delex::{DelexError, DelexResponse};
use crate::domain::Domain;
use crate::dst::DialogueState;
use crate::kb::{BookingRecord, Venue, VenueSummary};

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("unusable agent output: {0}")]
    Output(String),
    #[error(transparent)]
    Delex(#[from] DelexError),
}

/// Reply policy of the rule-based responder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Name a candidate venue while asking for remaining preferences.
    #[default]
    SuggestAndAsk,
    /// Report counts and ask for preferences without naming a venue.
    AskOnly,
}

impl std::str::FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "suggest_and_ask" => Ok(Policy::SuggestAndAsk),
            "ask_only" => Ok(Policy::AskOnly),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

/// Everything a responder sees for one turn.
#[derive(Debug, Clone, Copy)]
pub struct RespondInput<'a> {
    pub dialogue_id: &'a str,
    /// Conversation so far, ending with the user turn being answered.
    pub turns: &'a [Turn],
    pub domain: Domain,
    pub state: &'a DialogueState,
    pub summary: &'a VenueSummary,
}

impl RespondInput<'_> {
    pub fn last_user(&self) -> &str {
        self.turns
            .iter()
            .rev()
            .find(|t| t.is_user())
            .map_or("", |t| t.utterance.as_str())
    }

    /// Index of the turn being answered.
    pub fn turn_index(&self) -> usize {
        self.turns.last().map_or(0, |t| t.index)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Reply {
    pub delex: DelexResponse,
    pub booking: Option<BookingRecord>,
    /// Venue the reply talks about, if any.
    pub venue: Option<Venue>,
}

pub trait Tracker: Send + Sync {
    /// State restricted to `domain` for the conversation `turns`.
    fn track(
        &self,
        dialogue_id: &str,
        domain: Domain,
        turns: &[Turn],
    ) -> Result<DialogueState, AgentError>;
}

pub trait Responder: Send + Sync {
    fn respond(&self, input: &RespondInput<'_>) -> Result<Reply, AgentError>;
}

pub trait DomainDetector: Send + Sync {
    /// Active domains for the conversation, ordered so that the most
    /// recently introduced domain comes last.
    fn detect(&self, dialogue_id: &str, turns: &[Turn]) -> Result<Vec<Domain>, AgentError>;
}
