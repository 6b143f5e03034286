//! Dialogue manager loop: domain detection, delegation, per-domain state
//! tracking and response generation, batch replay over a corpus split, and
//! best-agent selection.

mod registry;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use registry::{select_best, AgentKind, AgentSpec, Candidate, Registry, SelectError};

use crate::agents::lexicon::{is_closing, Gazetteer};
use crate::agents::{
    AgentError, DomainDetector, ExampleBank, LlmClient, LlmConfig, LlmDetector, LlmResponder,
    LlmTracker, Reply, RespondInput, Responder, TemplateResponder, TemplateTracker, Tracker,
    API_KEY_ENV,
};
use crate::corpus::{Dialogue, Turn};
use crate::delex::{lexicalize, DelexResponse};
use crate::domain::Domain;
use crate::dst::{union_states, DialogueState};
use crate::kb::{BookingRecord, Database, VenueSummary};
use crate::metrics::{PredictionSet, TurnPrediction};

/// What a corpus run produces per turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// States only, tracked over the gold conversation.
    DstOnly,
    /// States and responses, with predicted system turns in the context.
    EndToEnd,
}

impl std::str::FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "dst_only" | "dst" => Ok(RunMode::DstOnly),
            "end_to_end" | "e2e" => Ok(RunMode::EndToEnd),
            other => Err(format!("unknown run mode `{other}`")),
        }
    }
}

/// Merged state plus the trackers that failed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DstOutcome {
    pub domains: Vec<Domain>,
    pub state: DialogueState,
    pub errors: Vec<(Domain, String)>,
    pub manager_error: Option<String>,
}

impl DstOutcome {
    fn error_text(&self) -> Option<String> {
        let mut parts: Vec<String> = self.manager_error.iter().map(|e| format!("manager: {e}")).collect();
        parts.extend(self.errors.iter().map(|(d, e)| format!("{d} tracker: {e}")));
        (!parts.is_empty()).then(|| parts.join("; "))
    }
}

/// The most recently introduced domain.
pub fn delegate(domains: &[Domain]) -> Option<Domain> {
    domains.last().copied()
}

/// Live conversation state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Session {
    pub dialogue_id: String,
    pub transcript: Vec<Turn>,
    pub state: DialogueState,
    pub bookings: Vec<BookingRecord>,
    /// Domain that answered each system turn, when one did.
    pub domain_history: Vec<Domain>,
}

impl Session {
    pub fn new(dialogue_id: impl Into<String>) -> Self {
        Session {
            dialogue_id: dialogue_id.into(),
            ..Default::default()
        }
    }
}

/// Outcome of one user turn.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnOutput {
    pub surface: String,
    pub delex: DelexResponse,
    pub domain: Option<Domain>,
    pub state: DialogueState,
    pub error: Option<String>,
}

const FALLBACK_REPLY: &str = "how can i help you today?";
const FAILURE_REPLY: &str = "i am sorry, something went wrong. could you repeat that?";

/// Agents wired from a [`Registry`].
pub struct Pipeline {
    db: Arc<Database>,
    detector: Box<dyn DomainDetector>,
    trackers: BTreeMap<Domain, Arc<dyn Tracker>>,
    responders: BTreeMap<Domain, Arc<dyn Responder>>,
}

impl Pipeline {
    /// Builds every agent, reading the remote credential from the environment.
    pub fn build(registry: &Registry, db: Arc<Database>, bank: Arc<ExampleBank>) -> Result<Self, AgentError> {
        let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::build_with_key(registry, db, bank, key)
    }

    /// Fails up front when a remote agent is configured without a credential.
    pub fn build_with_key(
        registry: &Registry,
        db: Arc<Database>,
        bank: Arc<ExampleBank>,
        api_key: Option<String>,
    ) -> Result<Self, AgentError> {
        registry.validate().map_err(AgentError::Config)?;
        if registry.uses_llm() && api_key.is_none() {
            return Err(AgentError::Config(format!(
                "remote agents are configured but {API_KEY_ENV} is not set"
            )));
        }
        let gazetteer = Arc::new(Gazetteer::from_database(&db));
        let template = Arc::new(TemplateTracker::with_gazetteer(gazetteer));
        let client = |spec: &AgentSpec| -> Result<Arc<LlmClient>, AgentError> {
            let mut cfg = LlmConfig::new(
                spec.endpoint.clone().unwrap_or_default(),
                spec.model.clone().unwrap_or_default(),
            );
            cfg.audit_log = spec.audit_log.clone();
            Ok(Arc::new(LlmClient::with_api_key(cfg, api_key.clone())?))
        };
        let detector: Box<dyn DomainDetector> = match registry.manager.kind {
            AgentKind::Template => Box::new((*template).clone()),
            AgentKind::Llm => Box::new(LlmDetector::new(client(&registry.manager)?)),
        };
        let mut trackers: BTreeMap<Domain, Arc<dyn Tracker>> = BTreeMap::new();
        for (d, spec) in &registry.trackers {
            let t: Arc<dyn Tracker> = match spec.kind {
                AgentKind::Template => template.clone(),
                AgentKind::Llm => Arc::new(LlmTracker::new(client(spec)?, bank.clone(), spec.seed)),
            };
            trackers.insert(*d, t);
        }
        let mut responders: BTreeMap<Domain, Arc<dyn Responder>> = BTreeMap::new();
        for (d, spec) in &registry.responders {
            let r: Arc<dyn Responder> = match spec.kind {
                AgentKind::Template => Arc::new(TemplateResponder::new(db.clone(), spec.policy)),
                AgentKind::Llm => Arc::new(LlmResponder::new(client(spec)?, db.clone())),
            };
            responders.insert(*d, r);
        }
        Ok(Self::from_parts(db, detector, trackers, responders))
    }

    /// Assembles a pipeline from ready-made agents.
    pub fn from_parts(
        db: Arc<Database>,
        detector: Box<dyn DomainDetector>,
        trackers: BTreeMap<Domain, Arc<dyn Tracker>>,
        responders: BTreeMap<Domain, Arc<dyn Responder>>,
    ) -> Self {
        Pipeline {
            db,
            detector,
            trackers,
            responders,
        }
    }

    pub fn database(&self) -> &Arc<Database> {
        &self.db
    }

    /// Active domains in order of introduction; empty for an empty context.
    pub fn detect_domains(&self, dialogue_id: &str, turns: &[Turn]) -> Result<Vec<Domain>, AgentError> {
        if turns.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = self.detector.detect(dialogue_id, turns)?;
        out.retain(|d| d.is_active());
        Ok(out)
    }

    /// Runs each listed domain's tracker and merges the results; a failing
    /// tracker is recorded and skipped.
    pub fn track_domains(&self, dialogue_id: &str, turns: &[Turn], domains: &[Domain]) -> DstOutcome {
        let mut parts = Vec::new();
        let mut errors = Vec::new();
        for d in domains {
            let Some(tracker) = self.trackers.get(d) else {
                errors.push((*d, "no tracker".to_string()));
                continue;
            };
            match tracker.track(dialogue_id, *d, turns) {
                Ok(s) => parts.push(s.project(*d)),
                Err(e) => errors.push((*d, e.to_string())),
            }
        }
        let state = union_states(parts).expect("projections are disjoint");
        DstOutcome {
            domains: domains.to_vec(),
            state,
            errors,
            manager_error: None,
        }
    }

    /// Detect, track per domain, merge.
    pub fn multi_agent_dst(&self, dialogue_id: &str, turns: &[Turn]) -> DstOutcome {
        match self.detect_domains(dialogue_id, turns) {
            Ok(domains) => self.track_domains(dialogue_id, turns, &domains),
            Err(e) => DstOutcome {
                manager_error: Some(e.to_string()),
                ..Default::default()
            },
        }
    }

    fn respond(
        &self,
        session: &Session,
        domain: Domain,
        state: &DialogueState,
    ) -> Result<Reply, AgentError> {
        let user = session.transcript.last().map_or("", |t| t.utterance.as_str());
        let summary = if is_closing(user) || !domain.has_venues() {
            VenueSummary::empty()
        } else {
            let c = self.db.constraints_from_state(domain, state);
            self.db
                .venue_summary(domain, &c)
                .map_err(|e| AgentError::Output(e.to_string()))?
        };
        let responder = self
            .responders
            .get(&domain)
            .ok_or_else(|| AgentError::Config(format!("no responder for `{domain}`")))?;
        responder.respond(&RespondInput {
            dialogue_id: &session.dialogue_id,
            turns: &session.transcript,
            domain,
            state,
            summary: &summary,
        })
    }

    /// Appends the user turn, tracks, responds and appends the system turn.
    /// Failures produce a marked turn and leave the session usable.
    pub fn run_turn(&self, session: &mut Session, user_utterance: &str) -> TurnOutput {
        let index = session.transcript.len();
        session.transcript.push(Turn::user(index, user_utterance));
        let mut errors: Vec<String> = Vec::new();
        let mut domains = match self.detect_domains(&session.dialogue_id, &session.transcript) {
            Ok(ds) => ds,
            Err(e) => {
                errors.push(format!("manager: {e}"));
                Vec::new()
            }
        };
        if domains.is_empty() {
            domains.extend(session.domain_history.last().copied());
        }
        let dst = self.track_domains(&session.dialogue_id, &session.transcript, &domains);
        errors.extend(dst.errors.iter().map(|(d, e)| format!("{d} tracker: {e}")));
        session.state = dst.state.clone();
        let domain = delegate(&domains);
        let (delex, surface) = match domain {
            None => (DelexResponse::plain(FALLBACK_REPLY), FALLBACK_REPLY.to_string()),
            Some(d) => match self
                .respond(session, d, &dst.state)
                .and_then(|r| Ok((lexicalize(&r.delex)?, r)))
            {
                Ok((surface, reply)) => {
                    session.bookings.extend(reply.booking);
                    (reply.delex, surface)
                }
                Err(e) => {
                    errors.push(format!("{d} responder: {e}"));
                    (DelexResponse::plain(""), FAILURE_REPLY.to_string())
                }
            },
        };
        if let Some(d) = domain {
            session.domain_history.push(d);
        }
        session
            .transcript
            .push(Turn::system(session.transcript.len(), surface.clone()));
        TurnOutput {
            surface,
            delex,
            domain,
            state: dst.state,
            error: (!errors.is_empty()).then(|| errors.join("; ")),
        }
    }

    /// Static replay of one dialogue: gold user turns, predicted system turns.
    pub fn replay(&self, dialogue: &Dialogue, mode: RunMode) -> Vec<TurnPrediction> {
        let mut out = Vec::new();
        match mode {
            RunMode::DstOnly => {
                for (pos, turn) in dialogue.turns.iter().enumerate().filter(|(_, t)| t.is_user()) {
                    let dst = self.multi_agent_dst(&dialogue.id, &dialogue.turns[..=pos]);
                    out.push(TurnPrediction {
                        turn_index: turn.index,
                        error: dst.error_text(),
                        state: dst.state,
                        ..Default::default()
                    });
                }
            }
            RunMode::EndToEnd => {
                let mut session = Session::new(dialogue.id.clone());
                for turn in dialogue.user_turns() {
                    let t = self.run_turn(&mut session, &turn.utterance);
                    out.push(TurnPrediction {
                        turn_index: turn.index,
                        state: t.state,
                        response_delex: Some(t.delex.text),
                        response_surface: Some(t.surface),
                        token_values: t.delex.token_values,
                        active_domain: t.domain,
                        error: t.error,
                    });
                }
            }
        }
        out
    }

    /// Replays every dialogue on at most `concurrency` worker threads.
    pub fn run_corpus(&self, dialogues: &[Dialogue], mode: RunMode, concurrency: usize) -> PredictionSet {
        let work = || -> BTreeMap<String, Vec<TurnPrediction>> {
            dialogues
                .par_iter()
                .map(|d| (d.id.clone(), self.replay(d, mode)))
                .collect()
        };
        let map = match rayon::ThreadPoolBuilder::new()
            .num_threads(concurrency.max(1))
            .build()
        {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        };
        PredictionSet(map)
    }
}
