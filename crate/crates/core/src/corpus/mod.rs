//! Typed MultiWOZ 2.2 corpus: loading, active-domain filtering and DST
//! training-data export.

mod export;
pub mod raw;
mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use export::{export_dst, write_jsonl, DstExample, ExportMode};
pub use schema::{canonical_key, split_slot_name, Schema, SlotDef};

use crate::domain::Domain;
use crate::dst::DialogueState;
use raw::{
    RawActsFile, RawDialogue, RawDomainGoal, RawFrame, RawFrameState, RawGoalsFile, RawService,
    RawTurn, RawTurnActs,
};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("missing corpus file {0}")]
    Missing(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("malformed dialogue {dialogue_id}{}: {reason}", turn.map(|t| format!(" turn {t}")).unwrap_or_default())]
    Malformed {
        dialogue_id: String,
        turn: Option<usize>,
        reason: String,
    },
    #[error("invalid schema: {0}")]
    Schema(#[from] schema::EmptyCategorical),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    /// Directory name in the distribution.
    pub fn dir_name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "val" | "valid" | "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    User,
    System,
}

/// One annotated dialogue act: `Restaurant-Inform(area=centre)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DialogueAct {
    pub act: String,
    /// Lowercased act domain; besides services this can be `booking` or `general`.
    pub domain: String,
    pub slot: String,
    pub value: String,
}

impl DialogueAct {
    pub fn service(&self) -> Option<Domain> {
        self.domain.parse().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub index: usize,
    pub speaker: Speaker,
    pub utterance: String,
    /// Present on user turns only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_state: Option<DialogueState>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub requested: BTreeMap<Domain, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub active_intents: BTreeMap<Domain, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dialogue_acts: Vec<DialogueAct>,
}

impl Turn {
    pub fn user(index: usize, utterance: impl Into<String>) -> Self {
        Turn {
            index,
            speaker: Speaker::User,
            utterance: utterance.into(),
            gold_state: Some(DialogueState::new()),
            requested: BTreeMap::new(),
            active_intents: BTreeMap::new(),
            dialogue_acts: Vec::new(),
        }
    }

    pub fn system(index: usize, utterance: impl Into<String>) -> Self {
        Turn {
            index,
            speaker: Speaker::System,
            utterance: utterance.into(),
            gold_state: None,
            requested: BTreeMap::new(),
            active_intents: BTreeMap::new(),
            dialogue_acts: Vec::new(),
        }
    }

    pub fn is_user(&self) -> bool {
        self.speaker == Speaker::User
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainGoal {
    pub informable: BTreeMap<String, String>,
    pub requestable: BTreeSet<String>,
    /// Booking fields keyed `people`, `day`, `time`, `stay`.
    pub booking: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoalSource {
    Annotated,
    #[default]
    Reconstructed,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub domains: BTreeMap<Domain, DomainGoal>,
    pub source: GoalSource,
}

impl Goal {
    pub fn get(&self, domain: Domain) -> Option<&DomainGoal> {
        self.domains.get(&domain)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dialogue {
    pub id: String,
    pub services: BTreeSet<Domain>,
    pub turns: Vec<Turn>,
    pub goal: Goal,
}

impl Dialogue {
    pub fn user_turns(&self) -> impl Iterator<Item = &Turn> {
        self.turns.iter().filter(|t| t.is_user())
    }

    /// Turns up to and including position `pos`.
    pub fn prefix(&self, pos: usize) -> &[Turn] {
        &self.turns[..=pos.min(self.turns.len().saturating_sub(1))]
    }

    pub fn active_services(&self) -> impl Iterator<Item = Domain> + '_ {
        self.services.iter().copied().filter(|d| d.is_active())
    }

    /// Builds a dialogue from its on-disk records.
    pub fn from_raw(
        raw: &RawDialogue,
        acts: Option<&BTreeMap<String, RawTurnActs>>,
        goal: Option<&BTreeMap<String, RawDomainGoal>>,
        schema: &Schema,
    ) -> Result<Dialogue, CorpusError> {
        let malformed = |turn: Option<usize>, reason: String| CorpusError::Malformed {
            dialogue_id: raw.dialogue_id.clone(),
            turn,
            reason,
        };
        let mut services = BTreeSet::new();
        for s in &raw.services {
            match s.parse::<Domain>() {
                Ok(d) => {
                    services.insert(d);
                }
                Err(_) => log::debug!("{}: ignoring service `{s}`", raw.dialogue_id),
            }
        }

        let mut turns = Vec::with_capacity(raw.turns.len());
        for (pos, rt) in raw.turns.iter().enumerate() {
            let speaker = match rt.speaker.to_ascii_uppercase().as_str() {
                "USER" => Speaker::User,
                "SYSTEM" => Speaker::System,
                other => return Err(malformed(Some(pos), format!("unknown speaker `{other}`"))),
            };
            let expected = if pos % 2 == 0 { Speaker::User } else { Speaker::System };
            if speaker != expected {
                return Err(malformed(
                    Some(pos),
                    "turns must alternate user/system starting with user".into(),
                ));
            }
            let index = rt
                .turn_id
                .trim()
                .parse::<usize>()
                .map_err(|_| malformed(Some(pos), format!("bad turn_id `{}`", rt.turn_id)))?;

            let mut gold_state = None;
            let mut requested: BTreeMap<Domain, Vec<String>> = BTreeMap::new();
            let mut active_intents = BTreeMap::new();
            if speaker == Speaker::User {
                let mut state = DialogueState::new();
                for frame in &rt.frames {
                    let Some(fs) = &frame.state else { continue };
                    let frame_domain = frame.service.parse::<Domain>().ok();
                    for (name, values) in &fs.slot_values {
                        let Some((d, key)) = split_slot_name(name) else {
                            return Err(malformed(Some(pos), format!("bad slot name `{name}`")));
                        };
                        state.insert(d, key, values.iter().cloned());
                    }
                    for name in &fs.requested_slots {
                        if let Some((d, key)) = split_slot_name(name) {
                            let entry = requested.entry(d).or_default();
                            if !entry.iter().any(|k| k == key) {
                                entry.push(key.to_string());
                            }
                        }
                    }
                    if let Some(d) = frame_domain {
                        if fs.active_intent != "NONE" {
                            active_intents.insert(d, fs.active_intent.clone());
                        }
                    }
                }
                for d in state.domains() {
                    if services.insert(d) {
                        log::warn!(
                            "{}: state references `{d}` missing from services",
                            raw.dialogue_id
                        );
                    }
                }
                gold_state = Some(state);
            }

            let dialogue_acts = acts
                .and_then(|a| a.get(&rt.turn_id))
                .map(parse_turn_acts)
                .unwrap_or_default();

            turns.push(Turn {
                index,
                speaker,
                utterance: rt.utterance.clone(),
                gold_state,
                requested,
                active_intents,
                dialogue_acts,
            });
        }

        let goal = match goal {
            Some(g) => annotated_goal(g, schema),
            None => reconstruct_goal(&services, &turns, schema),
        };

        Ok(Dialogue {
            id: raw.dialogue_id.clone(),
            services,
            turns,
            goal,
        })
    }

    /// Inverse of [`from_raw`](Self::from_raw): the dialogue record plus its
    /// entry in `dialog_acts.json`.
    pub fn to_raw(&self) -> (RawDialogue, BTreeMap<String, RawTurnActs>) {
        let mut acts = BTreeMap::new();
        let turns = self
            .turns
            .iter()
            .map(|t| {
                let turn_id = t.index.to_string();
                let frames = match &t.gold_state {
                    Some(state) => {
                        let mut domains: BTreeSet<Domain> = self.services.clone();
                        domains.extend(state.domains());
                        domains.extend(t.requested.keys().copied());
                        domains.extend(t.active_intents.keys().copied());
                        domains
                            .into_iter()
                            .map(|d| RawFrame {
                                actions: vec![],
                                service: d.to_string(),
                                slots: vec![],
                                state: Some(RawFrameState {
                                    active_intent: t
                                        .active_intents
                                        .get(&d)
                                        .cloned()
                                        .unwrap_or_else(|| "NONE".into()),
                                    requested_slots: t
                                        .requested
                                        .get(&d)
                                        .map(|ks| ks.iter().map(|k| format!("{d}-{k}")).collect())
                                        .unwrap_or_default(),
                                    slot_values: state
                                        .slots(d)
                                        .map(|slots| {
                                            slots
                                                .iter()
                                                .map(|(k, v)| (format!("{d}-{k}"), v.clone()))
                                                .collect()
                                        })
                                        .unwrap_or_default(),
                                }),
                            })
                            .collect()
                    }
                    None => self
                        .services
                        .iter()
                        .map(|d| RawFrame {
                            actions: vec![],
                            service: d.to_string(),
                            slots: vec![],
                            state: None,
                        })
                        .collect(),
                };
                if !t.dialogue_acts.is_empty() {
                    let mut grouped: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
                    for a in &t.dialogue_acts {
                        grouped
                            .entry(format!("{}-{}", capitalize(&a.domain), a.act))
                            .or_default()
                            .push(vec![a.slot.clone(), a.value.clone()]);
                    }
                    acts.insert(
                        turn_id.clone(),
                        RawTurnActs {
                            dialog_act: grouped,
                            span_info: vec![],
                        },
                    );
                }
                RawTurn {
                    frames,
                    speaker: match t.speaker {
                        Speaker::User => "USER".into(),
                        Speaker::System => "SYSTEM".into(),
                    },
                    turn_id,
                    utterance: t.utterance.clone(),
                }
            })
            .collect();
        (
            RawDialogue {
                dialogue_id: self.id.clone(),
                services: self.services.iter().map(|d| d.to_string()).collect(),
                turns,
            },
            acts,
        )
    }
}

fn capitalize(s: &str) -> String {
    if s == "general" {
        return s.to_string();
    }
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

fn parse_turn_acts(raw: &RawTurnActs) -> Vec<DialogueAct> {
    let mut out = Vec::new();
    for (name, pairs) in &raw.dialog_act {
        let (domain, act) = name.split_once('-').unwrap_or(("general", name.as_str()));
        for pair in pairs {
            out.push(DialogueAct {
                act: act.to_string(),
                domain: domain.to_ascii_lowercase(),
                slot: pair.first().cloned().unwrap_or_default(),
                value: pair.get(1).cloned().unwrap_or_default(),
            });
        }
    }
    out
}

fn split_booking(domain: Domain, slots: &BTreeMap<String, Vec<String>>) -> DomainGoal {
    let mut goal = DomainGoal::default();
    for (k, v) in slots {
        let Some(first) = v.first() else { continue };
        match k.strip_prefix("book") {
            Some(field) if !field.is_empty() => {
                goal.booking.insert(field.to_string(), first.clone());
            }
            _ => {
                goal.informable
                    .insert(canonical_key(domain, k), first.clone());
            }
        }
    }
    goal
}

fn annotated_goal(raw: &BTreeMap<String, RawDomainGoal>, schema: &Schema) -> Goal {
    let mut domains = BTreeMap::new();
    for (name, g) in raw {
        let Ok(domain) = name.parse::<Domain>() else { continue };
        let mut goal = DomainGoal::default();
        for (k, v) in &g.info {
            goal.informable.insert(canonical_key(domain, k), v.clone());
        }
        for k in &g.reqt {
            let key = canonical_key(domain, k);
            if schema.has_slot(domain, &key) {
                goal.requestable.insert(key);
            }
        }
        for (k, v) in &g.book {
            if matches!(k.as_str(), "people" | "day" | "time" | "stay") {
                goal.booking.insert(k.clone(), v.clone());
            }
        }
        domains.insert(domain, goal);
    }
    Goal {
        domains,
        source: GoalSource::Annotated,
    }
}

/// Goal from the annotations that MultiWOZ 2.2 does ship: the last non-empty
/// per-domain state gives informable and booking fields; requested slots and
/// user `Request` acts give requestables.
fn reconstruct_goal(services: &BTreeSet<Domain>, turns: &[Turn], schema: &Schema) -> Goal {
    let mut domains: BTreeMap<Domain, DomainGoal> = BTreeMap::new();
    for &d in services {
        domains.insert(d, DomainGoal::default());
    }
    for turn in turns.iter().filter(|t| t.is_user()) {
        if let Some(state) = &turn.gold_state {
            for d in state.domains() {
                let fresh = split_booking(d, state.slots(d).expect("listed domain"));
                let goal = domains.entry(d).or_default();
                goal.informable = fresh.informable;
                goal.booking = fresh.booking;
            }
        }
        for (d, keys) in &turn.requested {
            for k in keys {
                let key = canonical_key(*d, k);
                if schema.has_slot(*d, &key) {
                    domains.entry(*d).or_default().requestable.insert(key);
                }
            }
        }
        for act in &turn.dialogue_acts {
            if act.act != "Request" {
                continue;
            }
            let Some(d) = act.service() else { continue };
            let key = canonical_key(d, &act.slot);
            if schema.has_slot(d, &key) {
                domains.entry(d).or_default().requestable.insert(key);
            }
        }
    }
    Goal {
        domains,
        source: GoalSource::Reconstructed,
    }
}

/// Parsed distribution; immutable after load.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub schema: Schema,
    splits: BTreeMap<Split, Vec<Dialogue>>,
}

impl Corpus {
    pub fn new(schema: Schema, splits: BTreeMap<Split, Vec<Dialogue>>) -> Self {
        Corpus { schema, splits }
    }

    pub fn split(&self, split: Split) -> &[Dialogue] {
        self.splits.get(&split).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.splits.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn find(&self, id: &str) -> Option<(Split, &Dialogue)> {
        self.splits
            .iter()
            .find_map(|(s, ds)| ds.iter().find(|d| d.id == id).map(|d| (*s, d)))
    }

    /// Loads `schema.json`, optional `dialog_acts.json` and `goals.json`, and
    /// every `dialogues_*.json` under `train/`, `dev/` and `test/`.
    pub fn load(root: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
        let root = root.as_ref();
        let schema_path = root.join("schema.json");
        let services: Vec<RawService> = read_json(&schema_path)?;
        let schema = Schema::from_raw(&services)?;

        let acts_path = root.join("dialog_acts.json");
        let acts: RawActsFile = if acts_path.exists() {
            read_json(&acts_path)?
        } else {
            RawActsFile::new()
        };
        let goals_path = root.join("goals.json");
        let goals: RawGoalsFile = if goals_path.exists() {
            read_json(&goals_path)?
        } else {
            RawGoalsFile::new()
        };

        let mut splits = BTreeMap::new();
        for split in Split::ALL {
            let dir = root.join(split.dir_name());
            if !dir.is_dir() {
                return Err(CorpusError::Missing(dir));
            }
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|source| CorpusError::Io {
                    path: dir.clone(),
                    source,
                })?
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| {
                    p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("dialogues_") && n.ends_with(".json"))
                })
                .collect();
            files.sort();
            let mut dialogues = Vec::new();
            for file in files {
                let raws: Vec<RawDialogue> = read_json(&file)?;
                for raw in &raws {
                    dialogues.push(Dialogue::from_raw(
                        raw,
                        acts.get(&raw.dialogue_id),
                        goals.get(&raw.dialogue_id),
                        &schema,
                    )?);
                }
            }
            splits.insert(split, dialogues);
        }
        Ok(Corpus { schema, splits })
    }

    /// Removes hospital and police from the training split. Their frames are
    /// stripped from multi-domain dialogues; dialogues left with no active
    /// domain are dropped. Validation and test are returned unchanged.
    pub fn filter_active(&self) -> Corpus {
        let mut splits = self.splits.clone();
        if let Some(train) = splits.get_mut(&Split::Train) {
            let kept: Vec<Dialogue> = train
                .drain(..)
                .filter_map(|mut d| {
                    let inactive = d.services.iter().any(|s| !s.is_active());
                    if !inactive {
                        return Some(d);
                    }
                    d.services.retain(|s| s.is_active());
                    if d.services.is_empty() {
                        return None;
                    }
                    for t in &mut d.turns {
                        if let Some(s) = &mut t.gold_state {
                            s.retain_domains(Domain::is_active);
                        }
                        t.requested.retain(|k, _| k.is_active());
                        t.active_intents.retain(|k, _| k.is_active());
                        t.dialogue_acts.retain(|a| a.service().is_none_or(Domain::is_active));
                    }
                    d.goal.domains.retain(|k, _| k.is_active());
                    Some(d)
                })
                .collect();
            *train = kept;
        }
        Corpus {
            schema: self.schema.clone(),
            splits,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::Missing(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CorpusError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// `USER:` / `SYSTEM:` prefixed lines, one per turn.
pub fn render_context(turns: &[Turn]) -> String {
    turns
        .iter()
        .map(|t| match t.speaker {
            Speaker::User => format!("USER: {}", t.utterance),
            Speaker::System => format!("SYSTEM: {}", t.utterance),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw_turn(speaker: &str, id: usize, text: &str, slots: &[(&str, &str)]) -> RawTurn {
        let state = (speaker == "USER").then(|| RawFrameState {
            active_intent: "find_restaurant".into(),
            requested_slots: vec![],
            slot_values: slots
                .iter()
                .map(|(k, v)| (k.to_string(), vec![v.to_string()]))
                .collect(),
        });
        RawTurn {
            frames: vec![RawFrame {
                actions: vec![],
                service: "restaurant".into(),
                slots: vec![],
                state,
            }],
            speaker: speaker.into(),
            turn_id: id.to_string(),
            utterance: text.into(),
        }
    }

    #[test]
    fn rejects_non_alternating_turns() {
        let raw = RawDialogue {
            dialogue_id: "X1".into(),
            services: vec!["restaurant".into()],
            turns: vec![raw_turn("USER", 0, "hi", &[]), raw_turn("USER", 1, "hi", &[])],
        };
        let err = Dialogue::from_raw(&raw, None, None, &Schema::default()).unwrap_err();
        match err {
            CorpusError::Malformed {
                dialogue_id, turn, ..
            } => {
                assert_eq!(dialogue_id, "X1");
                assert_eq!(turn, Some(1));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn state_domains_join_services() {
        let raw = RawDialogue {
            dialogue_id: "X2".into(),
            services: vec![],
            turns: vec![raw_turn("USER", 0, "cheap food", &[("restaurant-pricerange", "cheap")])],
        };
        let d = Dialogue::from_raw(&raw, None, None, &Schema::default()).unwrap();
        assert!(d.services.contains(&Domain::Restaurant));
        assert_eq!(
            d.goal.get(Domain::Restaurant).unwrap().informable.get("pricerange"),
            Some(&"cheap".to_string())
        );
    }

    #[test]
    fn context_rendering() {
        let turns = vec![Turn::user(0, "hello"), Turn::system(1, "hi there")];
        assert_eq!(render_context(&turns), "USER: hello\nSYSTEM: hi there");
    }
}
