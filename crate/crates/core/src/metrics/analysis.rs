use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{canonical_key, Dialogue, DialogueAct};
use crate::delex::gold_turn_domain;
use crate::domain::Domain;
use crate::kb::Database;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BucketRate {
    /// Eligible system turns.
    pub turns: usize,
    /// Of those, turns that named a venue.
    pub named: usize,
    /// `named / turns` as a percentage; 0 for an empty bucket.
    pub rate: f64,
}

impl BucketRate {
    fn record(&mut self, named: bool) {
        self.turns += 1;
        self.named += named as usize;
        self.rate = 100.0 * self.named as f64 / self.turns as f64;
    }
}

/// How often a first venue is proposed, bucketed by how many venues the
/// gold state admits at that point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SuggestionRates {
    pub at_least_10: BucketRate,
    pub from_5_to_9: BucketRate,
    pub under_5: BucketRate,
}

fn names_venue(act: &DialogueAct, domain: Domain) -> bool {
    let key = canonical_key(domain, &act.slot);
    key == domain.name_key() || (domain == Domain::Train && key == "id")
}

fn act_domain(act: &DialogueAct, turn_domain: Option<Domain>) -> Option<Domain> {
    match act.service() {
        Some(d) => Some(d),
        None if act.domain == "booking" => turn_domain,
        None => None,
    }
}

/// Over gold system turns of a venue domain at which no venue of that domain
/// has been named yet and the preceding gold state admits at least one
/// venue: the share of turns whose `Recommend`/`Inform` acts name one.
pub fn venue_suggestion_analysis(dialogues: &[Dialogue], db: &Database) -> SuggestionRates {
    let mut rates = SuggestionRates::default();
    for dialogue in dialogues {
        let mut named_before: BTreeSet<Domain> = BTreeSet::new();
        let mut state = None;
        for (pos, turn) in dialogue.turns.iter().enumerate() {
            if turn.is_user() {
                state = turn.gold_state.as_ref();
                continue;
            }
            let domain = gold_turn_domain(dialogue, pos);
            if let (Some(d), Some(s)) = (domain.filter(|d| d.has_venues()), state) {
                if !named_before.contains(&d) {
                    let n = db.count(d, &db.constraints_from_state(d, s)).unwrap_or(0);
                    if n > 0 {
                        let named = turn.dialogue_acts.iter().any(|a| {
                            matches!(a.act.as_str(), "Recommend" | "Inform")
                                && a.service() == Some(d)
                                && names_venue(a, d)
                        });
                        let bucket = match n {
                            10.. => &mut rates.at_least_10,
                            5..=9 => &mut rates.from_5_to_9,
                            _ => &mut rates.under_5,
                        };
                        bucket.record(named);
                    }
                }
            }
            for a in &turn.dialogue_acts {
                if let Some(d) = act_domain(a, domain) {
                    if d.has_venues() && names_venue(a, d) && !a.value.is_empty() {
                        named_before.insert(d);
                    }
                }
            }
        }
    }
    rates
}
