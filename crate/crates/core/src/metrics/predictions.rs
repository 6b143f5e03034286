use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Dialogue;
use crate::delex::{delexicalize_gold, gold_turn_domain, DelexToken};
use crate::domain::Domain;
use crate::dst::DialogueState;
use crate::kb::Database;

/// Prediction for one user turn and the system reply that follows it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurnPrediction {
    /// Index of the user turn in the dialogue.
    pub turn_index: usize,
    #[serde(default)]
    pub state: DialogueState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_delex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_surface: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub token_values: BTreeMap<DelexToken, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Predictions keyed by dialogue id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PredictionSet(pub BTreeMap<String, Vec<TurnPrediction>>);

#[derive(Debug, thiserror::Error)]
pub enum PredictionError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dialogue `{dialogue_id}` (line {line}): {message}")]
    Entry {
        dialogue_id: String,
        line: usize,
        message: String,
    },
}

/// 1-based line of the first `"key":` occurrence.
fn line_of_key(raw: &str, key: &str) -> usize {
    let quoted = serde_json::to_string(key).unwrap_or_default();
    let mut from = 0;
    while let Some(rel) = raw[from..].find(&quoted) {
        let at = from + rel;
        let rest = raw[at + quoted.len()..].trim_start();
        if rest.starts_with(':') {
            return raw[..at].matches('\n').count() + 1;
        }
        from = at + quoted.len();
    }
    0
}

impl PredictionSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, dialogue_id: &str) -> Option<&[TurnPrediction]> {
        self.0.get(dialogue_id).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<TurnPrediction>)> {
        self.0.iter()
    }

    /// Turns recorded with an error.
    pub fn failed_turns(&self) -> usize {
        self.0.values().flatten().filter(|t| t.error.is_some()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("predictions serialize")
    }

    /// Parses a prediction file, reporting the line and dialogue id of the
    /// first bad entry.
    pub fn from_json(raw: &str) -> Result<Self, PredictionError> {
        let value: BTreeMap<String, serde_json::Value> =
            serde_json::from_str(raw).map_err(|e| PredictionError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        let mut out = BTreeMap::new();
        for (id, entry) in value {
            let turns: Vec<TurnPrediction> =
                serde_json::from_value(entry).map_err(|e| PredictionError::Entry {
                    line: line_of_key(raw, &id),
                    dialogue_id: id.clone(),
                    message: e.to_string(),
                })?;
            out.insert(id, turns);
        }
        Ok(PredictionSet(out))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PredictionError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|source| PredictionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&raw)
    }

    /// Gold states and gold delexicalized system turns as predictions.
    pub fn from_gold<'a>(dialogues: impl IntoIterator<Item = &'a Dialogue>, db: &Database) -> Self {
        let mut out = BTreeMap::new();
        for d in dialogues {
            let mut turns = Vec::new();
            for (pos, t) in d.turns.iter().enumerate().filter(|(_, t)| t.is_user()) {
                let reply = d.turns.get(pos + 1).filter(|s| !s.is_user());
                let delex = reply.map(|_| delexicalize_gold(d, pos + 1, db));
                turns.push(TurnPrediction {
                    turn_index: t.index,
                    state: t.gold_state.as_ref().map(DialogueState::active).unwrap_or_default(),
                    response_delex: delex.as_ref().map(|x| x.text.clone()),
                    response_surface: reply.map(|s| s.utterance.clone()),
                    token_values: delex.map(|x| x.token_values).unwrap_or_default(),
                    active_domain: reply.and_then(|_| gold_turn_domain(d, pos + 1)),
                    error: None,
                });
            }
            out.insert(d.id.clone(), turns);
        }
        PredictionSet(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_entry_names_dialogue_and_line() {
        let raw = "{\n  \"A.json\": [],\n  \"B.json\": [\n    {\"turn_index\": \"x\"}\n  ]\n}";
        match PredictionSet::from_json(raw) {
            Err(PredictionError::Entry { dialogue_id, line, .. }) => {
                assert_eq!(dialogue_id, "B.json");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            PredictionSet::from_json("{\n  \"A.json\": [,]\n}"),
            Err(PredictionError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn round_trips() {
        let mut s = DialogueState::new();
        s.set(Domain::Hotel, "area", "north");
        let set = PredictionSet(
            [(
                "X.json".to_string(),
                vec![TurnPrediction {
                    turn_index: 0,
                    state: s,
                    response_delex: Some("[hotel_name] is nice".into()),
                    token_values: [(DelexToken::new(Domain::Hotel, "name"), "worth house".into())].into(),
                    active_domain: Some(Domain::Hotel),
                    ..Default::default()
                }],
            )]
            .into(),
        );
        assert_eq!(PredictionSet::from_json(&set.to_json()).unwrap(), set);
    }
}
