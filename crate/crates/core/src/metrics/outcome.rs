use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::predictions::TurnPrediction;
use crate::agents::lexicon::{EntryKind, Gazetteer};
use crate::corpus::{canonical_key, Dialogue, DomainGoal};
use crate::delex::{lexicalize, slot_for_key, DelexResponse, DelexToken};
use crate::domain::Domain;
use crate::dst::FuzzyMatcher;
use crate::kb::{Constraints, Database, Venue};

static TRAIN_ID_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\btr\s?(\d{4})\b").unwrap());

/// Per-domain task outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainOutcome {
    pub informed: bool,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueOutcome {
    pub informed: bool,
    pub success: bool,
    pub per_domain: BTreeMap<Domain, DomainOutcome>,
}

/// Goal constraints expressible as a database query.
pub fn goal_constraints(db: &Database, domain: Domain, goal: &DomainGoal) -> Constraints {
    let known = db.attribute_keys(domain);
    goal.informable
        .iter()
        .map(|(k, v)| (canonical_key(domain, k), v.clone()))
        .filter(|(k, _)| !k.starts_with("book") && known.is_some_and(|ks| ks.contains(k)))
        .collect()
}

/// Token slots the goal's requests (and booking, which needs a reference)
/// must be answered with.
pub fn required_slots(domain: Domain, goal: &DomainGoal) -> BTreeSet<&'static str> {
    let mut out: BTreeSet<&'static str> = goal
        .requestable
        .iter()
        .filter_map(|r| slot_for_key(domain, &canonical_key(domain, r)))
        .collect();
    if !goal.booking.is_empty() && domain.is_bookable() {
        if let Some(s) = slot_for_key(domain, "ref") {
            out.insert(s);
        }
    }
    out
}

/// Inform and success judged from predicted responses.
pub struct OutcomeJudge<'a> {
    db: &'a Database,
    gazetteer: &'a Gazetteer,
    matcher: FuzzyMatcher<'static>,
}

fn surface(p: &TurnPrediction) -> Option<String> {
    if let Some(s) = &p.response_surface {
        return Some(s.to_lowercase());
    }
    let text = p.response_delex.as_ref()?;
    let d = DelexResponse {
        text: text.clone(),
        token_values: p.token_values.clone(),
        ..Default::default()
    };
    Some(lexicalize(&d).unwrap_or_else(|_| text.clone()).to_lowercase())
}

impl<'a> OutcomeJudge<'a> {
    pub fn new(db: &'a Database, gazetteer: &'a Gazetteer, matcher: FuzzyMatcher<'static>) -> Self {
        OutcomeJudge { db, gazetteer, matcher }
    }

    /// Venues of `domain` the predictions put in front of the user.
    pub fn named_venues(&self, domain: Domain, preds: &[TurnPrediction]) -> Vec<Venue> {
        let mut out: Vec<Venue> = Vec::new();
        let slot = if domain == Domain::Train { "id" } else { "name" };
        let token = DelexToken::new(domain, slot);
        let token_text = token.to_string();
        for p in preds {
            let mut found = Vec::new();
            match p.token_values.get(&token) {
                Some(v) => found.extend(self.db.find_by_name(domain, v)),
                None if p.response_delex.as_ref().is_some_and(|t| t.contains(&token_text)) => {
                    // Unbound name token: the first venue the predicted state selects.
                    let c = self.db.constraints_from_state(domain, &p.state);
                    if let Ok(vs) = self.db.query(domain, &c) {
                        found.extend(vs.into_iter().take(1));
                    }
                }
                None => {}
            }
            if let Some(text) = surface(p) {
                if domain == Domain::Train {
                    for cap in TRAIN_ID_RE.captures_iter(&text) {
                        found.extend(self.db.find_by_name(domain, &format!("tr{}", &cap[1])));
                    }
                } else {
                    for m in self
                        .gazetteer
                        .mentions(&text, |e| e.domain == domain && e.kind == EntryKind::Name)
                    {
                        found.extend(self.db.find_by_name(domain, &m.entry.value));
                    }
                }
            }
            for v in found {
                if !out.iter().any(|o| o.id == v.id) {
                    out.push(v);
                }
            }
        }
        out
    }

    fn provided(&self, domain: Domain, slot: &str, preds: &[TurnPrediction], venue: Option<&Venue>) -> bool {
        let token = DelexToken::new(domain, slot).to_string();
        if preds
            .iter()
            .any(|p| p.response_delex.as_ref().is_some_and(|t| t.contains(&token)))
        {
            return true;
        }
        let key = if domain == Domain::Train && slot == "id" { "trainid" } else { slot };
        let Some(value) = venue.and_then(|v| v.get(key)) else {
            return false;
        };
        let value = self.matcher.normalize(value);
        if value.len() < 2 {
            return false;
        }
        preds
            .iter()
            .filter_map(surface)
            .any(|s| self.matcher.normalize(&s).contains(&value))
    }

    pub fn judge(&self, dialogue: &Dialogue, preds: &[TurnPrediction]) -> DialogueOutcome {
        let mut per_domain = BTreeMap::new();
        for (&domain, goal) in dialogue.goal.domains.iter().filter(|(d, _)| d.is_active()) {
            let (informed, venue) = if domain.has_venues() {
                let c = goal_constraints(self.db, domain, goal);
                let wanted: BTreeSet<String> = self
                    .db
                    .query(domain, &c)
                    .unwrap_or_default()
                    .into_iter()
                    .map(|v| v.id)
                    .collect();
                let hit = self
                    .named_venues(domain, preds)
                    .into_iter()
                    .find(|v| wanted.contains(&v.id));
                (hit.is_some(), hit)
            } else {
                (true, None)
            };
            let success = informed
                && required_slots(domain, goal)
                    .into_iter()
                    .all(|s| self.provided(domain, s, preds, venue.as_ref()));
            per_domain.insert(domain, DomainOutcome { informed, success });
        }
        let informed = per_domain.values().all(|o| o.informed);
        let success = informed && per_domain.values().all(|o| o.success);
        DialogueOutcome {
            informed,
            success,
            per_domain,
        }
    }
}
