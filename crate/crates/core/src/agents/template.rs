use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::lexicon::{
    extract_slots, is_closing, requested_slots, utterance_domains, wants_booking, EntryKind,
    Gazetteer,
};
use super::{AgentError, DomainDetector, Policy, Reply, RespondInput, Responder, Tracker};
use crate::corpus::Turn;
use crate::delex::{DelexResponse, DelexToken};
use crate::domain::Domain;
use crate::dst::DialogueState;
use crate::kb::{book, BookingRecord, Database, KbError, Venue};

/// Rule-based tracker: keyword lexicon for categorical slots and a
/// database gazetteer for names, over user utterances only.
#[derive(Debug, Clone)]
pub struct TemplateTracker {
    gazetteer: Arc<Gazetteer>,
}

impl TemplateTracker {
    pub fn new(db: &Database) -> Self {
        TemplateTracker {
            gazetteer: Arc::new(Gazetteer::from_database(db)),
        }
    }

    pub fn with_gazetteer(gazetteer: Arc<Gazetteer>) -> Self {
        TemplateTracker { gazetteer }
    }

    pub fn gazetteer(&self) -> &Arc<Gazetteer> {
        &self.gazetteer
    }

    /// Ordered domains of the conversation; see [`DomainDetector`].
    pub fn detect_domains(&self, turns: &[Turn]) -> Vec<Domain> {
        let mut last_seen: BTreeMap<Domain, usize> = BTreeMap::new();
        for (pos, turn) in turns.iter().enumerate().filter(|(_, t)| t.is_user()) {
            for d in utterance_domains(&turn.utterance, &self.gazetteer) {
                last_seen.insert(d, pos);
            }
        }
        let mut ordered: Vec<(usize, u8, Domain)> = last_seen
            .into_iter()
            .map(|(d, pos)| (pos, recency_rank(d), d))
            .collect();
        ordered.sort();
        ordered.into_iter().map(|(_, _, d)| d).collect()
    }
}

/// Tie-break among domains introduced by the same utterance; higher wins.
fn recency_rank(d: Domain) -> u8 {
    match d {
        Domain::Taxi => 4,
        Domain::Train => 3,
        Domain::Hotel => 2,
        Domain::Restaurant => 1,
        _ => 0,
    }
}

impl Tracker for TemplateTracker {
    fn track(
        &self,
        _dialogue_id: &str,
        domain: Domain,
        turns: &[Turn],
    ) -> Result<DialogueState, AgentError> {
        let mut state = DialogueState::new();
        let mut current: BTreeSet<Domain> = BTreeSet::new();
        let mut antecedent: Option<String> = None;
        for turn in turns {
            if turn.is_user() {
                let hits = utterance_domains(&turn.utterance, &self.gazetteer);
                if !hits.is_empty() {
                    current = hits;
                }
                if current.contains(&domain) {
                    let slots =
                        extract_slots(domain, &turn.utterance, &self.gazetteer, antecedent.as_deref());
                    for (k, v) in slots {
                        state.set(domain, k, v);
                    }
                }
            }
            let lower = turn.utterance.to_lowercase();
            if let Some(m) = self
                .gazetteer
                .mentions(&lower, |e| e.kind == EntryKind::Name)
                .last()
            {
                antecedent = Some(m.entry.value.clone());
            }
        }
        Ok(state)
    }
}

impl DomainDetector for TemplateTracker {
    fn detect(&self, _dialogue_id: &str, turns: &[Turn]) -> Result<Vec<Domain>, AgentError> {
        Ok(self.detect_domains(turns))
    }
}

/// Rule-based responder over the venue digest and the tracked state.
#[derive(Debug, Clone)]
pub struct TemplateResponder {
    db: Arc<Database>,
    policy: Policy,
}

/// Delexicalized text under construction with its bindings.
#[derive(Default)]
struct Draft {
    parts: Vec<String>,
    bindings: BTreeMap<DelexToken, String>,
}

impl Draft {
    fn token(&mut self, domain: Domain, slot: &str, value: impl Into<String>) -> String {
        let t = DelexToken::new(domain, slot);
        let text = t.to_string();
        self.bindings.entry(t).or_insert_with(|| value.into());
        text
    }

    fn say(&mut self, sentence: impl Into<String>) {
        self.parts.push(sentence.into());
    }

    fn finish(self) -> Result<DelexResponse, AgentError> {
        Ok(DelexResponse::new(self.parts.join(" "), self.bindings)?)
    }
}

fn attribute_key(domain: Domain, slot: &str) -> &str {
    match (domain, slot) {
        (Domain::Train, "id") => "trainid",
        _ => slot,
    }
}

fn describe(slot: &str, value: &str) -> String {
    match slot {
        "phone" => format!("the phone number is {value}"),
        "address" => format!("the address is {value}"),
        "postcode" => format!("the postcode is {value}"),
        "pricerange" => format!("it is in the {value} price range"),
        "price" => format!("the price is {value}"),
        "entrancefee" => format!("the entrance fee is {value}"),
        "openhours" => format!("the opening hours are {value}"),
        "area" => format!("it is in the {value} area"),
        "food" => format!("it serves {value} food"),
        "stars" => format!("it has {value} stars"),
        "type" => format!("it is a {value}"),
        "duration" => format!("the journey takes {value}"),
        "arriveby" => format!("it arrives at {value}"),
        "leaveat" => format!("it leaves at {value}"),
        "id" => format!("the train id is {value}"),
        "ref" => format!("your reference number is {value}"),
        other => format!("the {other} is {value}"),
    }
}

fn booking_fields(domain: Domain, state: &DialogueState) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (key, field) in [
        ("bookpeople", "people"),
        ("bookday", "day"),
        ("booktime", "time"),
        ("bookstay", "stay"),
    ] {
        if let Some(v) = state.first(domain, key) {
            out.insert(field.to_string(), v.to_string());
        }
    }
    if domain == Domain::Train {
        if let Some(v) = state.first(domain, "day") {
            out.entry("day".to_string()).or_insert_with(|| v.to_string());
        }
    }
    out
}

fn question_for(field: &str) -> &'static str {
    match field {
        "people" => "how many people will be in your party?",
        "day" => "what day would you like?",
        "time" => "what time would you like?",
        "stay" => "how many nights will you be staying?",
        "departure" => "where will you be leaving from?",
        "destination" => "where would you like to go?",
        _ => "what time would you like to leave or arrive?",
    }
}

/// Preference questions per domain, asked for informable slots still unset.
fn preference_question(domain: Domain, state: &DialogueState) -> Option<&'static str> {
    let ask: &[(&str, &str)] = match domain {
        Domain::Restaurant => &[
            ("food", "what type of food would you like?"),
            ("area", "which part of town do you prefer?"),
            ("pricerange", "what price range are you looking for?"),
        ],
        Domain::Hotel => &[
            ("area", "which area would you like to stay in?"),
            ("pricerange", "what price range are you looking for?"),
            ("type", "would you prefer a hotel or a guesthouse?"),
            ("stars", "how many stars would you like?"),
        ],
        Domain::Attraction => &[
            ("type", "what type of attraction are you interested in?"),
            ("area", "which area would you like to visit?"),
        ],
        Domain::Train => &[
            ("day", "what day will you be travelling?"),
            ("leaveat", "what time would you like to leave?"),
        ],
        _ => &[],
    };
    ask.iter()
        .find(|(slot, _)| state.get(domain, slot).is_none())
        .map(|(_, q)| *q)
}

impl TemplateResponder {
    pub fn new(db: Arc<Database>, policy: Policy) -> Self {
        TemplateResponder { db, policy }
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    fn venue(&self, input: &RespondInput<'_>) -> Option<Venue> {
        let d = input.domain;
        if d == Domain::Taxi {
            return Some(self.db.synthesize_taxi(input.dialogue_id));
        }
        let named = input
            .state
            .first(d, d.name_key())
            .or_else(|| input.state.first(d, "name"))
            .and_then(|n| self.db.find_by_name(d, n).into_iter().next());
        named.or_else(|| input.summary.sample.clone())
    }

    fn suggesting(&self) -> bool {
        self.policy == Policy::SuggestAndAsk
    }

    fn answer_requests(&self, draft: &mut Draft, d: Domain, venue: &Venue, slots: &[&str]) {
        let mut clauses = Vec::new();
        for slot in slots {
            let Some(value) = venue.get(attribute_key(d, slot)) else { continue };
            let token = draft.token(d, slot, value);
            clauses.push(describe(slot, &token));
        }
        if clauses.is_empty() {
            return;
        }
        let body = clauses.join(" and ");
        if self.suggesting() && d != Domain::Taxi {
            if let Some(name) = venue.name() {
                let slot = if d == Domain::Train { "id" } else { "name" };
                let t = draft.token(d, slot, name);
                draft.say(format!("for {t}, {body}."));
                return;
            }
        }
        draft.say(format!("{body}."));
    }

    fn try_book(
        &self,
        draft: &mut Draft,
        input: &RespondInput<'_>,
        venue: &Venue,
    ) -> Result<Option<BookingRecord>, AgentError> {
        let d = input.domain;
        if d == Domain::Taxi {
            let mut missing: Vec<&str> = ["departure", "destination"]
                .into_iter()
                .filter(|k| input.state.get(d, k).is_none())
                .collect();
            if input.state.get(d, "leaveat").is_none() && input.state.get(d, "arriveby").is_none() {
                missing.push("time");
            }
            if !missing.is_empty() {
                let qs: Vec<&str> = missing.iter().map(|f| question_for(f)).collect();
                draft.say(format!("i can book a taxi for you. {}", qs.join(" ")));
                return Ok(None);
            }
        }
        let fields = booking_fields(d, input.state);
        match book(input.dialogue_id, d, venue, &fields, input.turn_index()) {
            Ok(record) => {
                let ref_token = draft.token(d, "ref", record.reference.clone());
                let name = match (self.suggesting(), venue.name()) {
                    (true, Some(n)) if d != Domain::Taxi => {
                        let slot = if d == Domain::Train { "id" } else { "name" };
                        format!(" {}", draft.token(d, slot, n))
                    }
                    _ => String::new(),
                };
                let f = |k: &str| record.fields.get(k).cloned().unwrap_or_default();
                let text = match d {
                    Domain::Restaurant => format!(
                        "i have booked a table{} for {} people on {} at {}. the table will be held for 15 minutes. your reference number is {ref_token}.",
                        if name.is_empty() { String::new() } else { format!(" at{name}") },
                        draft.token(d, "bookpeople", f("people")),
                        draft.token(d, "bookday", f("day")),
                        draft.token(d, "booktime", f("time")),
                    ),
                    Domain::Hotel => format!(
                        "i have booked{} for {} people for {} nights starting {}. your reference number is {ref_token}.",
                        if name.is_empty() { " your room".to_string() } else { name },
                        draft.token(d, "bookpeople", f("people")),
                        draft.token(d, "bookstay", f("stay")),
                        draft.token(d, "bookday", f("day")),
                    ),
                    Domain::Train => format!(
                        "i have booked {} tickets{}. your reference number is {ref_token}.",
                        draft.token(d, "bookpeople", f("people")),
                        if name.is_empty() { String::new() } else { format!(" on{name}") },
                    ),
                    _ => {
                        // Taxi bookings carry no reference token.
                        draft.bindings.remove(&DelexToken::new(d, "ref"));
                        format!(
                            "i have booked a taxi for you. it is a {} and the contact number is {}.",
                            draft.token(d, "type", venue.get("type").unwrap_or_default()),
                            draft.token(d, "phone", venue.get("phone").unwrap_or_default()),
                        )
                    }
                };
                draft.say(text);
                Ok(Some(record))
            }
            Err(KbError::IncompleteBooking { missing }) => {
                let qs: Vec<&str> = missing.iter().map(|f| question_for(f)).collect();
                let lead = match (self.suggesting(), venue.name()) {
                    (true, Some(n)) => {
                        let slot = if d == Domain::Train { "id" } else { "name" };
                        format!("i can book {} for you.", draft.token(d, slot, n))
                    }
                    _ => "i can book that for you.".to_string(),
                };
                draft.say(format!("{lead} {}", qs.join(" ")));
                Ok(None)
            }
            Err(other) => Err(AgentError::Output(other.to_string())),
        }
    }

    fn suggest(&self, draft: &mut Draft, input: &RespondInput<'_>, venue: &Venue) {
        let d = input.domain;
        let count = input.summary.count;
        let noun = if count == 1 { d.as_str().to_string() } else { d.plural().to_string() };
        let choice = (count > 1).then(|| draft.token(d, "choice", count.to_string()));
        if d == Domain::Train {
            let id = draft.token(d, "id", venue.name().unwrap_or_default());
            let leave = draft.token(d, "leaveat", venue.get("leaveat").unwrap_or_default());
            let arrive = draft.token(d, "arriveby", venue.get("arriveby").unwrap_or_default());
            let lead = choice.map_or(String::new(), |c| format!("there are {c} trains that match. "));
            draft.say(format!(
                "{lead}{id} leaves at {leave} and arrives at {arrive}. would you like me to book it?"
            ));
            return;
        }
        let name = draft.token(d, "name", venue.name().unwrap_or_default());
        let area = venue
            .get("area")
            .map(|a| format!(" in the {} area", draft.token(d, "area", a)))
            .unwrap_or_default();
        let lead = match choice {
            Some(c) => format!("there are {c} {noun} that match your request. i would suggest {name}{area}."),
            None => format!("{name} matches your request. it is{area}."),
        };
        let follow = match preference_question(d, input.state) {
            Some(q) if count > 1 => format!("if not, {q}"),
            _ => match d {
                Domain::Restaurant => "would you like me to book a table?".to_string(),
                Domain::Hotel => "would you like me to book a room?".to_string(),
                _ => "would you like the address or phone number?".to_string(),
            },
        };
        draft.say(format!("{lead} {follow}"));
    }

    fn ask_only(&self, draft: &mut Draft, input: &RespondInput<'_>) {
        let d = input.domain;
        let count = input.summary.count;
        let noun = if count == 1 { d.as_str() } else { d.plural() };
        let choice = draft.token(d, "choice", count.to_string());
        let q = preference_question(d, input.state).unwrap_or("do you have any other preferences?");
        let verb = if count == 1 { "is" } else { "are" };
        let agree = if count == 1 { "matches" } else { "match" };
        draft.say(format!("there {verb} {choice} {noun} that {agree} your request. {q}"));
    }
}

impl Responder for TemplateResponder {
    fn respond(&self, input: &RespondInput<'_>) -> Result<Reply, AgentError> {
        let d = input.domain;
        let user = input.last_user();
        let previous_system = input
            .turns
            .iter()
            .rev()
            .find(|t| !t.is_user())
            .map(|t| t.utterance.as_str());
        let requests = requested_slots(d, user);
        let booking_intent = d == Domain::Taxi || wants_booking(user, previous_system);
        let mut draft = Draft::default();

        if is_closing(user) && requests.is_empty() && !(booking_intent && d != Domain::Taxi) {
            draft.say("thank you for contacting us. have a great day!");
            return Ok(Reply {
                delex: draft.finish()?,
                ..Reply::default()
            });
        }

        let venue = self.venue(input);
        let Some(venue) = venue else {
            draft.say(format!(
                "i am sorry, but no {} matches your request. would you like to try something else?",
                d.as_str()
            ));
            return Ok(Reply {
                delex: draft.finish()?,
                ..Reply::default()
            });
        };

        let mut booking = None;
        if booking_intent && d.is_bookable() {
            booking = self.try_book(&mut draft, input, &venue)?;
        }
        let requests: Vec<&str> = requests
            .into_iter()
            .filter(|s| !(booking.is_some() && *s == "ref"))
            .collect();
        if !requests.is_empty() {
            self.answer_requests(&mut draft, d, &venue, &requests);
        }
        if draft.parts.is_empty() {
            if self.suggesting() {
                self.suggest(&mut draft, input, &venue);
            } else {
                self.ask_only(&mut draft, input);
            }
        }
        Ok(Reply {
            delex: draft.finish()?,
            booking,
            venue: Some(venue),
        })
    }
}
