//! Serde mirror of the MultiWOZ 2.2 on-disk records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDialogue {
    pub dialogue_id: String,
    #[serde(default)]
    pub services: Vec<String>,
    pub turns: Vec<RawTurn>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTurn {
    #[serde(default)]
    pub frames: Vec<RawFrame>,
    pub speaker: String,
    pub turn_id: String,
    pub utterance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawFrame {
    #[serde(default)]
    pub actions: Vec<serde_json::Value>,
    pub service: String,
    #[serde(default)]
    pub slots: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<RawFrameState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawFrameState {
    #[serde(default = "none_intent")]
    pub active_intent: String,
    #[serde(default)]
    pub requested_slots: Vec<String>,
    #[serde(default)]
    pub slot_values: BTreeMap<String, Vec<String>>,
}

fn none_intent() -> String {
    "NONE".to_string()
}

/// `dialog_acts.json`: dialogue id → turn id → acts.
pub type RawActsFile = BTreeMap<String, BTreeMap<String, RawTurnActs>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawTurnActs {
    #[serde(default)]
    pub dialog_act: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub span_info: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawService {
    pub service_name: String,
    #[serde(default)]
    pub slots: Vec<RawSlot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSlot {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub is_categorical: bool,
    #[serde(default)]
    pub possible_values: Vec<String>,
}

/// Optional `goals.json`: dialogue id → domain → goal, in the layout of the
/// original MultiWOZ goal annotations.
pub type RawGoalsFile = BTreeMap<String, BTreeMap<String, RawDomainGoal>>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawDomainGoal {
    #[serde(default)]
    pub info: BTreeMap<String, String>,
    #[serde(default)]
    pub reqt: Vec<String>,
    #[serde(default)]
    pub book: BTreeMap<String, String>,
}
