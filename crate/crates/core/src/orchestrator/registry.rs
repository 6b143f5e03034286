use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::agents::Policy;
use crate::domain::Domain;
use crate::metrics::EvalReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Template,
    Llm,
}

/// How to build one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    /// Label used in reports and tie-breaks.
    #[serde(default)]
    pub name: String,
    pub kind: AgentKind,
    #[serde(default)]
    pub policy: Policy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_log: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl AgentSpec {
    pub fn template(policy: Policy) -> Self {
        AgentSpec {
            name: match policy {
                Policy::SuggestAndAsk => "template".to_string(),
                Policy::AskOnly => "template-ask-only".to_string(),
            },
            kind: AgentKind::Template,
            policy,
            endpoint: None,
            model: None,
            audit_log: None,
            seed: 0,
        }
    }

    pub fn llm(name: &str, endpoint: &str, model: &str) -> Self {
        AgentSpec {
            name: name.to_string(),
            kind: AgentKind::Llm,
            policy: Policy::default(),
            endpoint: Some(endpoint.to_string()),
            model: Some(model.to_string()),
            audit_log: None,
            seed: 0,
        }
    }

    fn validate(&self, role: &str) -> Result<(), String> {
        if self.kind == AgentKind::Llm {
            for (field, v) in [("endpoint", &self.endpoint), ("model", &self.model)] {
                if v.as_deref().is_none_or(str::is_empty) {
                    return Err(format!("{role}: llm agent needs `{field}`"));
                }
            }
        }
        Ok(())
    }
}

/// Agent wiring: a dialogue manager plus one tracker and one responder per
/// active domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registry {
    pub manager: AgentSpec,
    pub trackers: BTreeMap<Domain, AgentSpec>,
    pub responders: BTreeMap<Domain, AgentSpec>,
}

impl Registry {
    /// The same spec for every role.
    pub fn uniform(spec: AgentSpec) -> Self {
        let all = |s: &AgentSpec| Domain::ACTIVE.iter().map(|d| (*d, s.clone())).collect();
        Registry {
            manager: spec.clone(),
            trackers: all(&spec),
            responders: all(&spec),
        }
    }

    pub fn template(policy: Policy) -> Self {
        Self::uniform(AgentSpec::template(policy))
    }

    /// Checks totality over the active domains and per-spec requirements.
    pub fn validate(&self) -> Result<(), String> {
        self.manager.validate("manager")?;
        for (role, map) in [("trackers", &self.trackers), ("responders", &self.responders)] {
            for d in Domain::ACTIVE {
                map.get(&d)
                    .ok_or_else(|| format!("{role}: no agent for domain `{d}`"))?
                    .validate(&format!("{role}.{d}"))?;
            }
            if let Some(d) = map.keys().find(|d| !d.is_active()) {
                return Err(format!("{role}: domain `{d}` is not active"));
            }
        }
        Ok(())
    }

    pub fn uses_llm(&self) -> bool {
        self.manager.kind == AgentKind::Llm
            || self
                .trackers
                .values()
                .chain(self.responders.values())
                .any(|s| s.kind == AgentKind::Llm)
    }
}

/// An agent evaluated on validation data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub tracker: AgentSpec,
    pub responder: AgentSpec,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectError {
    #[error("no candidate reports")]
    Empty,
}

/// Per domain, the candidate with the highest per-domain combined score;
/// ties go to higher success, then to the lexicographically smaller name.
/// A candidate without a score for a domain ranks below any with one.
pub fn select_best(candidates: &[Candidate], manager: AgentSpec) -> Result<Registry, SelectError> {
    if candidates.is_empty() {
        return Err(SelectError::Empty);
    }
    let mut trackers = BTreeMap::new();
    let mut responders = BTreeMap::new();
    for d in Domain::ACTIVE {
        let best = candidates
            .iter()
            .min_by(|a, b| {
                let score = |c: &Candidate| {
                    c.report
                        .per_domain
                        .get(&d)
                        .map_or((f64::NEG_INFINITY, f64::NEG_INFINITY), |s| (s.combined, s.success))
                };
                let (ca, sa) = score(a);
                let (cb, sb) = score(b);
                cb.total_cmp(&ca)
                    .then(sb.total_cmp(&sa))
                    .then(a.name.cmp(&b.name))
            })
            .expect("nonempty");
        trackers.insert(d, best.tracker.clone());
        responders.insert(d, best.responder.clone());
    }
    Ok(Registry {
        manager,
        trackers,
        responders,
    })
}
