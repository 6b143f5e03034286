use std::collections::BTreeMap;

use super::{delexicalize, slot_for_key, DelexContext, DelexResponse, DelexToken};
use crate::corpus::{canonical_key, Dialogue};
use crate::domain::Domain;
use crate::kb::Database;

/// Token slot for an act slot, trying the booking-prefixed key for bare
/// booking fields (`people` → `bookpeople`).
fn act_slot(domain: Domain, raw: &str) -> Option<&'static str> {
    let key = canonical_key(domain, raw);
    slot_for_key(domain, &key).or_else(|| slot_for_key(domain, &format!("book{key}")))
}

/// Domain a system turn serves: the most frequent active service among its
/// acts, else the first active intent or first changed state domain of the
/// preceding user turn.
pub fn gold_turn_domain(dialogue: &Dialogue, pos: usize) -> Option<Domain> {
    let turn = dialogue.turns.get(pos)?;
    let mut counts: BTreeMap<Domain, usize> = BTreeMap::new();
    for act in &turn.dialogue_acts {
        if let Some(d) = act.service().filter(|d| d.is_active()) {
            *counts.entry(d).or_default() += 1;
        }
    }
    if let Some((d, _)) = counts.iter().max_by_key(|(d, n)| (**n, std::cmp::Reverse(**d))) {
        return Some(*d);
    }
    let user_pos = dialogue.turns[..pos].iter().rposition(|t| t.is_user())?;
    let user = &dialogue.turns[user_pos];
    if let Some(d) = user.active_intents.keys().copied().find(|d| d.is_active()) {
        return Some(d);
    }
    let state = user.gold_state.as_ref()?;
    let previous = dialogue.turns[..user_pos]
        .iter()
        .rev()
        .find_map(|t| t.gold_state.as_ref());
    state
        .domains()
        .filter(|d| d.is_active())
        .find(|d| previous.is_none_or(|p| p.project(*d) != state.project(*d)))
        .or_else(|| state.domains().find(|d| d.is_active()))
}

/// Reference delexicalization of the gold system turn at `pos`, driven by
/// its dialogue-act values, the venues those acts name and the preceding
/// gold state.
pub fn delexicalize_gold(dialogue: &Dialogue, pos: usize, db: &Database) -> DelexResponse {
    let Some(turn) = dialogue.turns.get(pos) else {
        return DelexResponse::default();
    };
    let domain = gold_turn_domain(dialogue, pos);
    let mut extra: Vec<(DelexToken, String)> = Vec::new();
    let mut venues = Vec::new();
    for act in &turn.dialogue_acts {
        let d = match act.service() {
            Some(d) => d,
            None if act.domain == "booking" => match domain {
                Some(d) => d,
                None => continue,
            },
            None => continue,
        };
        if act.value.is_empty() {
            continue;
        }
        let Some(slot) = act_slot(d, &act.slot) else { continue };
        extra.push((DelexToken::new(d, slot), act.value.clone()));
        if slot == "name" || slot == "id" {
            venues.extend(db.find_by_name(d, &act.value));
        }
    }
    let state = dialogue.turns[..pos]
        .iter()
        .rev()
        .find_map(|t| t.gold_state.as_ref());
    let ctx = DelexContext {
        state,
        venues: venues.iter().collect(),
        booking: None,
        counts: Vec::new(),
        extra,
    };
    delexicalize(&turn.utterance, &ctx)
}
