use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context};

use dard::agents::{ExampleBank, API_KEY_ENV};
use dard::corpus::{Corpus, Dialogue, Goal};
use dard::kb::Database;
use dard::orchestrator::{Pipeline, Session};

use crate::config::RunConfig;
use crate::{Classify, CmdResult, Failure};

/// Line-oriented conversation. `/state` prints the tracked state, `/quit`
/// (or end of input) writes the transcript and exits.
pub fn cmd_chat<R: BufRead, W: Write>(cfg: &RunConfig, input: R, mut out: W, transcript: &Path) -> CmdResult {
    let registry = cfg.registry();
    let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
    if registry.uses_llm() && key.is_none() {
        return Err(Failure::Usage(anyhow!("remote agents are configured but {API_KEY_ENV} is not set")));
    }
    let (db, bank) = match &cfg.corpus_root {
        Some(root) => {
            let db = Database::for_corpus(root).data()?;
            let bank = if registry.uses_llm() {
                let c = Corpus::load(root).data()?.filter_active();
                ExampleBank::from_corpus(&c)
            } else {
                ExampleBank::default()
            };
            (db, bank)
        }
        None => (Database::bundled(), ExampleBank::default()),
    };
    let db = db.with_fuzzy_threshold(cfg.fuzzy_threshold);
    let pipeline = Pipeline::build_with_key(&registry, Arc::new(db), Arc::new(bank), key).usage()?;
    let mut session = Session::new(format!("chat-{}", cfg.seed));
    let io = |e: std::io::Error| Failure::Data(e.into());
    for line in input.lines() {
        let line = line.map_err(io)?;
        let line = line.trim();
        match line {
            "" => continue,
            "/quit" => break,
            "/state" => {
                writeln!(out, "{}", serde_json::to_string(&session.state).expect("state serializes")).map_err(io)?;
            }
            _ => {
                let t = pipeline.run_turn(&mut session, line);
                let user = session.transcript.len() - 2;
                session.transcript[user].gold_state = Some(t.state.clone());
                if let Some(e) = &t.error {
                    writeln!(out, "[error] {e}").map_err(io)?;
                }
                writeln!(out, "system: {}", t.surface).map_err(io)?;
            }
        }
        out.flush().map_err(io)?;
    }
    write_transcript(&session, transcript)
}

/// Writes the session as a one-dialogue file in the corpus dialogue format,
/// predicted states standing in for annotations.
fn write_transcript(session: &Session, path: &Path) -> CmdResult {
    let dialogue = Dialogue {
        id: session.dialogue_id.clone(),
        services: session.domain_history.iter().copied().collect(),
        turns: session.transcript.clone(),
        goal: Goal::default(),
    };
    let (raw, _) = dialogue.to_raw();
    let json = serde_json::to_string_pretty(&[raw]).expect("transcript serializes");
    std::fs::write(path, json + "\n")
        .with_context(|| format!("cannot write transcript {}", path.display()))
        .data()
}
