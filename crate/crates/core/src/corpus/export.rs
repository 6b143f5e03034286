use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{render_context, Corpus, Split};
use crate::domain::Domain;
use crate::dst::DialogueState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportMode {
    /// One example per user turn with the full state.
    Single,
    /// One example per (user turn, domain in its state), restricted to that domain.
    PerDomain,
}

impl std::str::FromStr for ExportMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "single" => Ok(ExportMode::Single),
            "per_domain" => Ok(ExportMode::PerDomain),
            other => Err(format!("unknown export mode `{other}`")),
        }
    }
}

/// A dialogue prefix ending at a user utterance and the state to predict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DstExample {
    pub context: String,
    #[serde(rename = "state")]
    pub target_state: DialogueState,
    #[serde(rename = "domain", default, skip_serializing_if = "Option::is_none")]
    pub domain_filter: Option<Domain>,
}

pub fn export_dst(corpus: &Corpus, split: Split, mode: ExportMode) -> Vec<DstExample> {
    let mut out = Vec::new();
    for dialogue in corpus.split(split) {
        for (pos, turn) in dialogue.turns.iter().enumerate() {
            let Some(gold) = &turn.gold_state else { continue };
            let gold = gold.active();
            let context = render_context(&dialogue.turns[..=pos]);
            match mode {
                ExportMode::Single => out.push(DstExample {
                    context,
                    target_state: gold,
                    domain_filter: None,
                }),
                ExportMode::PerDomain => {
                    for d in gold.domains() {
                        out.push(DstExample {
                            context: context.clone(),
                            target_state: gold.project(d),
                            domain_filter: Some(d),
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn write_jsonl<W: Write, T: Serialize>(mut w: W, records: &[T]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
