//! Keyword lexicon and database gazetteer shared by the rule-based tracker
//! and the rule-based domain detector.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use regex::Regex;

use crate::domain::Domain;
use crate::dst::normalize_value;
use crate::kb::Database;

/// Words that signal a domain on their own.
const DOMAIN_WORDS: [(Domain, &[&str]); 5] = [
    (
        Domain::Restaurant,
        &[
            "restaurant", "restaurants", "food", "eat", "dine", "dining", "cuisine", "lunch",
            "dinner", "table", "meal", "brunch",
        ],
    ),
    (
        Domain::Hotel,
        &[
            "hotel", "hotels", "guesthouse", "guesthouses", "guest house", "lodging",
            "accommodation", "place to stay", "room", "nights", "wifi", "internet", "parking",
            "bed and breakfast",
        ],
    ),
    (
        Domain::Attraction,
        &[
            "attraction", "attractions", "museum", "museums", "college", "colleges", "park",
            "theatre", "theater", "cinema", "nightclub", "night club", "entertainment",
            "architecture", "boat", "swimming pool", "pool", "concert hall", "sightseeing",
            "things to do", "entrance fee", "gallery",
        ],
    ),
    (Domain::Train, &["train", "trains", "railway", "rail"]),
    (Domain::Taxi, &["taxi", "cab", "taxis"]),
];

const NUMBER_WORDS: [(&str, &str); 10] = [
    ("one", "1"),
    ("two", "2"),
    ("three", "3"),
    ("four", "4"),
    ("five", "5"),
    ("six", "6"),
    ("seven", "7"),
    ("eight", "8"),
    ("nine", "9"),
    ("zero", "0"),
];

const ATTRACTION_TYPES: [(&str, &str); 24] = [
    ("museums", "museum"),
    ("museum", "museum"),
    ("colleges", "college"),
    ("college", "college"),
    ("parks", "park"),
    ("park", "park"),
    ("theatres", "theatre"),
    ("theatre", "theatre"),
    ("theater", "theatre"),
    ("cinemas", "cinema"),
    ("cinema", "cinema"),
    ("nightclubs", "nightclub"),
    ("nightclub", "nightclub"),
    ("night club", "nightclub"),
    ("entertainment", "entertainment"),
    ("architecture", "architecture"),
    ("boats", "boat"),
    ("boat", "boat"),
    ("swimming pool", "swimmingpool"),
    ("pool", "swimmingpool"),
    ("concert hall", "concerthall"),
    ("concerthall", "concerthall"),
    ("multiple sports", "multiple sports"),
    ("sports", "multiple sports"),
];

const TIME: &str = r"(\d{1,2}:\d{2}(?:\s*[ap]\.?m\.?)?|\d{1,2}\s*[ap]\.?m\.?)";

static AREA_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(centre|center|central|downtown|north|south|east|west)\b").unwrap()
});
static PRICE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b(cheap|inexpensive|budget|moderately priced|moderate|mid-?range|expensive|upscale|high end|pricey)\b",
    )
    .unwrap()
});
static DONTCARE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b(?:any|no preference|do ?n'?t care|does ?n'?t matter|does not matter)\b[^.?!]{0,25}?\b(area|part of town|food|cuisine|price range|price|type)\b",
    )
    .unwrap()
});
static STARS_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b([0-5]|zero|one|two|three|four|five)[- ]stars?\b").unwrap()
});
static NO_PARKING_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(no|not need|don'?t need|without)\b[^.?!]{0,12}\b(parking|wifi|internet)\b")
        .unwrap()
});
static PEOPLE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b(\d{1,2}|one|two|three|four|five|six|seven|eight)\s+(?:people|persons|person|guests|adults|tickets?|of us)\b|\b(?:party of|table for)\s+(\d{1,2}|one|two|three|four|five|six|seven|eight)\b",
    )
    .unwrap()
});
static STAY_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(\d{1,2}|one|two|three|four|five|six|seven|eight)\s+nights?\b").unwrap()
});
static DAY_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(monday|tuesday|wednesday|thursday|friday|saturday|sunday)s?\b").unwrap()
});
static LEAVE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"\b(?:leav(?:e|es|ing)|depart(?:s|ing)?|pick(?:ed)? (?:me )?up)\s+(?:after|at|from|around)?\s*{TIME}|\bafter\s+{TIME}"
    ))
    .unwrap()
});
static ARRIVE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"\b(?:arriv(?:e|es|ing|al)|get there|be there)\s+(?:by|before|at|around)?\s*{TIME}|\b(?:by|before)\s+{TIME}"
    ))
    .unwrap()
});
static AT_TIME_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"\b(?:at|for|around)\s+{TIME}")).unwrap());
/// "the hotel", "my restaurant": an earlier venue used as a taxi endpoint.
static VENUE_REF_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:the|my|our|that|this)\s+(?:hotel|guesthouse|guest house|restaurant|attraction|college|museum)\b")
        .unwrap()
});
static CLOSING_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b(bye|goodbye|that is all|that's all|thats all|that's everything|that is everything|all i need|nothing else|no more|that will be all|have a (?:good|great|nice) day)\b",
    )
    .unwrap()
});
static THANKS_ONLY_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*(?:ok(?:ay)?,?\s*|great,?\s*)?(?:thanks|thank you)(?: very much| so much)?[.! ]*$")
        .unwrap()
});

/// What a gazetteer entry names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntryKind {
    Name,
    Food,
    AttractionType,
    Station,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub surface: String,
    pub domain: Domain,
    pub kind: EntryKind,
    /// Canonical value to emit (the database spelling).
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention<'g> {
    pub start: usize,
    pub end: usize,
    pub entry: &'g Entry,
}

/// Venue names, cuisines, attraction types and stations from the database,
/// matched longest-first on word boundaries.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: Vec<Entry>,
}

fn bare_name_is_distinctive(name: &str) -> bool {
    let bare = name.strip_prefix("the ").unwrap_or(name);
    bare.contains(' ') || bare.chars().count() >= 6
}

impl Gazetteer {
    pub fn from_database(db: &Database) -> Gazetteer {
        let mut seen = BTreeSet::new();
        let mut entries = Vec::new();
        let mut push = |surface: String, domain, kind, value: String| {
            if surface.is_empty() || !seen.insert((surface.clone(), domain, kind)) {
                return;
            }
            entries.push(Entry {
                surface,
                domain,
                kind,
                value,
            });
        };
        for domain in [Domain::Restaurant, Domain::Hotel, Domain::Attraction] {
            let Ok(table) = db.table(domain) else { continue };
            for venue in table {
                let Some(name) = venue.name() else { continue };
                let lower = name.to_lowercase();
                if !bare_name_is_distinctive(&lower) {
                    continue;
                }
                push(lower.clone(), domain, EntryKind::Name, lower.clone());
                if let Some(bare) = lower.strip_prefix("the ") {
                    push(bare.to_string(), domain, EntryKind::Name, lower.clone());
                }
            }
        }
        if let Ok(table) = db.table(Domain::Restaurant) {
            for venue in table {
                if let Some(food) = venue.get("food") {
                    let f = food.to_lowercase();
                    push(f.clone(), Domain::Restaurant, EntryKind::Food, f);
                }
            }
        }
        for (surface, value) in ATTRACTION_TYPES {
            push(
                surface.to_string(),
                Domain::Attraction,
                EntryKind::AttractionType,
                value.to_string(),
            );
        }
        if let Ok(table) = db.table(Domain::Train) {
            for venue in table {
                for key in ["departure", "destination"] {
                    if let Some(s) = venue.get(key) {
                        let s = s.to_lowercase();
                        push(s.clone(), Domain::Train, EntryKind::Station, s);
                    }
                }
            }
        }
        entries.sort_by(|a, b| {
            b.surface
                .len()
                .cmp(&a.surface.len())
                .then_with(|| a.surface.cmp(&b.surface))
                .then_with(|| a.domain.cmp(&b.domain))
                .then_with(|| a.kind.cmp(&b.kind))
        });
        Gazetteer { entries }
    }

    /// Non-overlapping mentions in `text` (already lowercased), longest
    /// entries first, returned in text order.
    pub fn mentions<'g>(&'g self, text: &str, keep: impl Fn(&Entry) -> bool) -> Vec<Mention<'g>> {
        let mut taken = vec![false; text.len()];
        let mut out = Vec::new();
        for entry in self.entries.iter().filter(|e| keep(e)) {
            for (start, _) in text.match_indices(entry.surface.as_str()) {
                let end = start + entry.surface.len();
                if !on_word_boundary(text, start, end) || taken[start..end].iter().any(|t| *t) {
                    continue;
                }
                taken[start..end].iter_mut().for_each(|t| *t = true);
                out.push(Mention { start, end, entry });
            }
        }
        out.sort_by_key(|m| m.start);
        out
    }
}

fn on_word_boundary(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
}

fn contains_phrase(text: &str, phrase: &str) -> bool {
    text.match_indices(phrase)
        .any(|(s, _)| on_word_boundary(text, s, s + phrase.len()))
}

fn mask(text: &str, spans: &[(usize, usize)]) -> String {
    let mut bytes = text.as_bytes().to_vec();
    for &(s, e) in spans {
        bytes[s..e].iter_mut().for_each(|b| *b = b' ');
    }
    String::from_utf8(bytes).expect("masking ASCII spaces over whole characters")
}

fn number(word: &str) -> String {
    NUMBER_WORDS
        .iter()
        .find(|(w, _)| *w == word)
        .map_or_else(|| word.to_string(), |(_, d)| d.to_string())
}

/// Domains signalled by one user utterance. Venue names inside a taxi
/// request are endpoints, not domain mentions.
pub fn utterance_domains(text: &str, gazetteer: &Gazetteer) -> BTreeSet<Domain> {
    let lower = text.to_lowercase();
    let has = |text: &str, d: Domain| {
        DOMAIN_WORDS
            .iter()
            .any(|(x, words)| *x == d && words.iter().any(|w| contains_phrase(text, w)))
    };
    let taxi = has(&lower, Domain::Taxi);
    // Inside a taxi request, venue references are endpoints, not new domains.
    let scan = if taxi { VENUE_REF_RE.replace_all(&lower, " ").into_owned() } else { lower.clone() };
    let mut hits: BTreeSet<Domain> = DOMAIN_WORDS
        .iter()
        .map(|(d, _)| *d)
        .filter(|d| has(&scan, *d))
        .collect();
    if !taxi {
        for m in gazetteer.mentions(&lower, |e| e.kind != EntryKind::Station) {
            hits.insert(m.entry.domain);
        }
    }
    hits
}

pub fn is_closing(text: &str) -> bool {
    let lower = text.to_lowercase();
    CLOSING_RE.is_match(&lower) || THANKS_ONLY_RE.is_match(&lower)
}

/// Slot values one user utterance expresses for `domain`. `antecedent` is
/// the most recent venue named earlier in the conversation, used for "there".
pub fn extract_slots(
    domain: Domain,
    text: &str,
    gazetteer: &Gazetteer,
    antecedent: Option<&str>,
) -> BTreeMap<String, String> {
    let lower = text.to_lowercase();
    let mut out = BTreeMap::new();
    let mentions = gazetteer.mentions(&lower, |_| true);
    let masked = mask(
        &lower,
        &mentions.iter().map(|m| (m.start, m.end)).collect::<Vec<_>>(),
    );

    match domain {
        Domain::Taxi => {
            extract_endpoints(&lower, &mentions, antecedent, &mut out);
            extract_times(&masked, &mut out);
            return out;
        }
        Domain::Train => {
            extract_stations(&lower, &mentions, &mut out);
            extract_times(&masked, &mut out);
            if let Some(c) = DAY_RE.captures(&masked) {
                out.insert("day".into(), c[1].to_string());
            }
            extract_people(&masked, &mut out);
            return out;
        }
        _ => {}
    }

    for m in &mentions {
        let e = m.entry;
        match e.kind {
            EntryKind::Name if e.domain == domain => {
                out.insert("name".into(), e.value.clone());
            }
            EntryKind::Food if domain == Domain::Restaurant => {
                out.insert("food".into(), e.value.clone());
            }
            EntryKind::AttractionType if domain == Domain::Attraction => {
                out.insert("type".into(), e.value.clone());
            }
            _ => {}
        }
    }
    if let Some(c) = AREA_RE.captures(&masked) {
        let area = match &c[1] {
            "centre" | "center" | "central" | "downtown" => "centre",
            other => other,
        };
        out.insert("area".into(), area.to_string());
    }
    if matches!(domain, Domain::Restaurant | Domain::Hotel) {
        if let Some(c) = PRICE_RE.captures(&masked) {
            let v = match &c[1] {
                "cheap" | "inexpensive" | "budget" => "cheap",
                "expensive" | "upscale" | "high end" | "pricey" => "expensive",
                _ => "moderate",
            };
            out.insert("pricerange".into(), v.into());
        }
    }
    for c in DONTCARE_RE.captures_iter(&masked) {
        let key = match &c[1] {
            "area" | "part of town" => "area",
            "food" | "cuisine" if domain == Domain::Restaurant => "food",
            "price" | "price range" if domain != Domain::Attraction => "pricerange",
            "type" if domain != Domain::Restaurant => "type",
            _ => continue,
        };
        out.insert(key.into(), "dontcare".into());
    }
    match domain {
        Domain::Hotel => {
            if contains_phrase(&masked, "guesthouse")
                || contains_phrase(&masked, "guest house")
                || contains_phrase(&masked, "bed and breakfast")
            {
                out.insert("type".into(), "guesthouse".into());
            } else if contains_phrase(&masked, "hotel") {
                out.insert("type".into(), "hotel".into());
            }
            if let Some(c) = STARS_RE.captures(&masked) {
                out.insert("stars".into(), number(&c[1]));
            }
            let negated: BTreeSet<String> = NO_PARKING_RE
                .captures_iter(&masked)
                .map(|c| c[2].to_string())
                .collect();
            if contains_phrase(&masked, "parking") && !negated.contains("parking") {
                out.insert("parking".into(), "yes".into());
            }
            if ["wifi", "internet"]
                .iter()
                .any(|w| contains_phrase(&masked, w) && !negated.contains(*w))
            {
                out.insert("internet".into(), "yes".into());
            }
            if let Some(c) = STAY_RE.captures(&masked) {
                out.insert("bookstay".into(), number(&c[1]));
            }
            if let Some(c) = DAY_RE.captures(&masked) {
                out.insert("bookday".into(), c[1].to_string());
            }
            extract_people(&masked, &mut out);
        }
        Domain::Restaurant => {
            if let Some(c) = DAY_RE.captures(&masked) {
                out.insert("bookday".into(), c[1].to_string());
            }
            if let Some(c) = AT_TIME_RE.captures(&masked) {
                out.insert("booktime".into(), normalize_value(&c[1]));
            }
            extract_people(&masked, &mut out);
        }
        _ => {}
    }
    out
}

fn extract_people(text: &str, out: &mut BTreeMap<String, String>) {
    if let Some(c) = PEOPLE_RE.captures(text) {
        let n = c.get(1).or_else(|| c.get(2)).expect("one group matches");
        out.insert("bookpeople".into(), number(n.as_str()));
    }
}

fn extract_times(text: &str, out: &mut BTreeMap<String, String>) {
    let group = |c: &regex::Captures<'_>| {
        c.get(1)
            .or_else(|| c.get(2))
            .map(|m| normalize_value(m.as_str()))
    };
    let leave = LEAVE_RE.captures(text);
    if let Some(v) = leave.as_ref().and_then(group) {
        out.insert("leaveat".into(), v);
    }
    // "after" belongs to departure; a lone "by"/"before" to arrival.
    if let Some(v) = ARRIVE_RE.captures(text).as_ref().and_then(group) {
        if out.get("leaveat") != Some(&v) {
            out.insert("arriveby".into(), v);
        }
    }
}

fn preceded_by(text: &str, start: usize, words: &[&str]) -> bool {
    let head = text[..start].trim_end();
    words.iter().any(|w| {
        head.strip_suffix(w)
            .is_some_and(|rest| !rest.chars().next_back().is_some_and(char::is_alphanumeric))
    })
}

fn extract_stations(text: &str, mentions: &[Mention<'_>], out: &mut BTreeMap<String, String>) {
    for m in mentions.iter().filter(|m| m.entry.kind == EntryKind::Station) {
        if preceded_by(text, m.start, &["from", "leaving", "departing"]) {
            out.insert("departure".into(), m.entry.value.clone());
        } else if preceded_by(text, m.start, &["to", "into", "towards", "for"]) {
            out.insert("destination".into(), m.entry.value.clone());
        }
    }
}

fn extract_endpoints(
    text: &str,
    mentions: &[Mention<'_>],
    antecedent: Option<&str>,
    out: &mut BTreeMap<String, String>,
) {
    for m in mentions
        .iter()
        .filter(|m| matches!(m.entry.kind, EntryKind::Name | EntryKind::Station))
    {
        if preceded_by(text, m.start, &["from", "at"]) {
            out.insert("departure".into(), m.entry.value.clone());
        } else if preceded_by(text, m.start, &["to", "towards", "get to"]) {
            out.insert("destination".into(), m.entry.value.clone());
        }
    }
    if let Some(a) = antecedent {
        for (key, phrases) in [
            ("departure", ["from there", "from the venue", "from it"]),
            ("destination", ["to there", "to the venue", "to it"]),
        ] {
            if !out.contains_key(key) && phrases.iter().any(|p| contains_phrase(text, p)) {
                out.insert(key.into(), a.to_string());
            }
        }
    }
}

static REQUEST_CUE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\?|\b(what|which|when|how|where|could i (?:get|have)|can i (?:get|have)|may i (?:get|have)|give me|tell me|i need the|i'd like the|i would like the|send me)\b",
    )
    .unwrap()
});
static BOOK_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(book|reserve|reservation|table for)\b").unwrap());
static BOOK_OFFER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(book|booking|reserv\w*)\b").unwrap());
static DECLINE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*(no|nope|not now|not yet)\b|\b(don'?t|do not) (need|want) (to book|a booking|a reservation)")
        .unwrap()
});

/// Attributes asked about, as token slots in mention order.
const REQUEST_PATTERNS: [(&str, &str); 16] = [
    (r"\bphone\b|\bcontact number\b|\bnumber to call\b", "phone"),
    (r"\baddress\b|\bwhere is it\b|\blocated\b", "address"),
    (r"\bpost ?code\b|\bzip\b", "postcode"),
    (r"\bentrance fee\b|\badmission\b|\bentry fee\b", "entrancefee"),
    (r"\bprice\b|\bhow much\b|\bcost\b|\bfee\b", "price"),
    (r"\bopening hours\b|\bopen\b|\bhours\b", "openhours"),
    (r"\b(what|which) area\b|\bwhat part of town\b", "area"),
    (r"\b(what|which) (kind|type) of food\b|\bcuisine\b", "food"),
    (r"\bstar rating\b|\bhow many stars\b", "stars"),
    (r"\b(what|which) (type|kind)\b", "type"),
    (r"\bhow long\b|\btravel time\b|\bduration\b", "duration"),
    (r"\barrival time\b|\bwhen does it arrive\b|\bwhat time does it arrive\b", "arriveby"),
    (r"\bdeparture time\b|\bwhen does it leave\b|\bwhat time does it (leave|depart)\b", "leaveat"),
    (r"\btrain id\b|\btrain number\b|\bwhich train\b", "id"),
    (r"\breference\b", "ref"),
    (r"\b(car|vehicle) type\b|\bwhat (car|kind of car)\b", "type"),
];

static REQUEST_RES: LazyLock<Vec<(Regex, &'static str)>> = LazyLock::new(|| {
    REQUEST_PATTERNS
        .iter()
        .map(|(p, s)| (Regex::new(p).unwrap(), *s))
        .collect()
});

/// Token slots the utterance asks about for `domain`, restricted to the
/// domain's vocabulary.
pub fn requested_slots(domain: Domain, text: &str) -> Vec<&'static str> {
    let lower = text.to_lowercase();
    if !REQUEST_CUE_RE.is_match(&lower) {
        return Vec::new();
    }
    let vocab = crate::delex::Vocabulary::bundled();
    let mut found: Vec<(usize, &'static str)> = Vec::new();
    for (re, slot) in REQUEST_RES.iter() {
        let Some(m) = re.find(&lower) else { continue };
        let slot = match (*slot, domain) {
            ("price", Domain::Restaurant | Domain::Hotel) => "pricerange",
            ("price", Domain::Attraction) => "entrancefee",
            (s, _) => s,
        };
        if vocab.has_slot(domain, slot) && !found.iter().any(|(_, s)| *s == slot) {
            found.push((m.start(), slot));
        }
    }
    found.sort_by_key(|(pos, _)| *pos);
    found.into_iter().map(|(_, s)| s).collect()
}

/// Whether the user asks to book, or supplies booking details after the
/// system offered or asked about a booking.
pub fn wants_booking(user: &str, previous_system: Option<&str>) -> bool {
    let lower = user.to_lowercase();
    if DECLINE_RE.is_match(&lower) {
        return false;
    }
    if BOOK_RE.is_match(&lower) {
        return true;
    }
    // A party size with a date or stay length only makes sense as a booking.
    if PEOPLE_RE.is_match(&lower) && (DAY_RE.is_match(&lower) || STAY_RE.is_match(&lower)) {
        return true;
    }
    let offered = previous_system.is_some_and(|s| BOOK_OFFER_RE.is_match(&s.to_lowercase()));
    offered
        && (PEOPLE_RE.is_match(&lower)
            || DAY_RE.is_match(&lower)
            || STAY_RE.is_match(&lower)
            || lower.trim_start().starts_with("yes")
            || lower.trim_start().starts_with("sure")
            || lower.contains("please"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaz() -> Gazetteer {
        Gazetteer::from_database(&Database::bundled())
    }

    #[test]
    fn dining_request() {
        let g = gaz();
        let slots = extract_slots(
            Domain::Restaurant,
            "I need a place to dine in the center thats expensive",
            &g,
            None,
        );
        assert_eq!(slots.get("area").map(String::as_str), Some("centre"));
        assert_eq!(slots.get("pricerange").map(String::as_str), Some("expensive"));
        assert_eq!(slots.len(), 2);
    }

    #[test]
    fn dontcare_and_names() {
        let g = gaz();
        let s = extract_slots(Domain::Restaurant, "Any sort of food would be fine", &g, None);
        assert_eq!(s.get("food").map(String::as_str), Some("dontcare"));
        let s = extract_slots(Domain::Restaurant, "Tell me about Curry Garden", &g, None);
        assert_eq!(s.get("name").map(String::as_str), Some("curry garden"));
        let s = extract_slots(Domain::Restaurant, "north american food", &g, None);
        assert_eq!(s.get("food").map(String::as_str), Some("north american"));
        assert!(!s.contains_key("area"));
    }

    #[test]
    fn booking_fields() {
        let g = gaz();
        let s = extract_slots(Domain::Restaurant, "5 people on a Wednesday at 19:45.", &g, None);
        assert_eq!(s["bookpeople"], "5");
        assert_eq!(s["bookday"], "wednesday");
        assert_eq!(s["booktime"], "19:45");
        let s = extract_slots(Domain::Hotel, "for three people for 2 nights", &g, None);
        assert_eq!(s["bookpeople"], "3");
        assert_eq!(s["bookstay"], "2");
    }

    #[test]
    fn train_request() {
        let g = gaz();
        let s = extract_slots(
            Domain::Train,
            "I need a train from ely to cambridge on friday. I want to arrive by 11:00.",
            &g,
            None,
        );
        assert_eq!(s["departure"], "ely");
        assert_eq!(s["destination"], "cambridge");
        assert_eq!(s["day"], "friday");
        assert_eq!(s["arriveby"], "11:00");
        assert!(!s.contains_key("leaveat"));
    }

    #[test]
    fn taxi_endpoints() {
        let g = gaz();
        let s = extract_slots(
            Domain::Taxi,
            "I also need a taxi from there to curry garden, leaving at 17:00.",
            &g,
            Some("the fitzwilliam museum"),
        );
        assert_eq!(s["departure"], "the fitzwilliam museum");
        assert_eq!(s["destination"], "curry garden");
        assert_eq!(s["leaveat"], "17:00");
    }

    #[test]
    fn domain_signals() {
        let g = gaz();
        let d = utterance_domains("I need a taxi to the museum", &g);
        assert!(d.contains(&Domain::Taxi));
        let d = utterance_domains("Are there any African restaurants in the centre?", &g);
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![Domain::Restaurant]);
        assert!(utterance_domains("5 people on a Wednesday at 19:45.", &g).is_empty());
    }

    #[test]
    fn requests_and_booking_intent() {
        assert_eq!(
            requested_slots(Domain::Restaurant, "Could I get the phone number for your recommendation?"),
            vec!["phone"]
        );
        assert_eq!(
            requested_slots(Domain::Train, "Yes, book it for 2 people. What is the price?"),
            vec!["price"]
        );
        assert!(requested_slots(Domain::Restaurant, "I want cheap food").is_empty());
        assert!(wants_booking(
            "5 people on a Wednesday at 19:45.",
            Some("great choice. when can i make the reservation for?")
        ));
        assert!(!wants_booking("No thanks, just the phone number.", Some("Would you like a table booked?")));
        assert!(wants_booking("Please book it for me.", None));
        assert!(wants_booking("Yes please, for 3 people for 2 nights starting saturday.", None));
        assert!(!wants_booking("Is it good for 3 people?", None));
    }

    #[test]
    fn closings() {
        assert!(is_closing("Thank you, that is all I need."));
        assert!(is_closing("Thanks, bye."));
        assert!(!is_closing("Could I get the phone number?"));
    }
}
