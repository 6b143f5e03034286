//! One line per acceptance criterion. Criteria that need the full MultiWOZ 2.2
//! distribution read it from `MULTIWOZ22_ROOT`; without it they report FAIL
//! as blocked (with a fixture stand-in measurement) instead of passing.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config as PtConfig, TestRunner};

use dard::agents::Policy;
use dard::corpus::{Corpus, Split};
use dard::delex::{delexicalize_gold, lexicalize};
use dard::domain::Domain;
use dard::dst::{union_states, DialogueState, FuzzyMatcher};
use dard::kb::Database;
use dard::metrics::{classify_dst_error, combined, ErrorCategory, Evaluator, PredictionSet};
use dard::orchestrator::RunMode;

const CORPUS_ENV: &str = "MULTIWOZ22_ROOT";
const SPLIT_SIZES: [(Split, usize); 3] = [(Split::Train, 8437), (Split::Validation, 1000), (Split::Test, 1000)];
const EXPENSIVE_CENTRE_RESTAURANTS: usize = 33;
const TABLE2_TOLERANCE: f64 = 0.1;
const TABLE4_TOLERANCE: f64 = 5.0;
const TABLE4_RATES: [f64; 3] = [24.5, 35.4, 55.6];
const TAXONOMY_PAIRS: u32 = 2000;
const EXACT: f64 = 1e-9;
/// Fixture test split, gold as predictions: computed by
/// `tests/oracles/gold_outcomes.py` (5 of 6 dialogues informed and successful).
const FIXTURE_GOLD_INFORM: f64 = 500.0 / 6.0;
const FIXTURE_GOLD_SUCCESS: f64 = 500.0 / 6.0;

/// (system, BLEU, Inform, Success, Combined) as printed.
const TABLE2: [(&str, f64, f64, f64, f64); 12] = [
    ("GALAXY", 19.64, 85.4, 75.7, 100.2),
    ("TOATOD", 17.04, 90.0, 79.8, 101.9),
    ("RewardNet", 17.6, 87.6, 81.5, 102.2),
    ("Mars", 19.9, 88.9, 78.0, 103.4),
    ("KRLS", 19.0, 89.2, 80.3, 103.8),
    ("DiactTOD", 17.5, 89.5, 84.2, 104.4),
    ("Flan-T5 single", 13.0, 51.1, 44.5, 60.8),
    ("Flan-T5 multi-agent", 15.6, 82.8, 70.7, 92.3),
    ("Claude multi-agent", 9.5, 95.6, 88.0, 101.3),
    ("Mistral single", 15.6, 81.0, 63.6, 87.9),
    ("Mistral multi-agent", 15.2, 78.8, 61.2, 85.2),
    ("Best domain agent", 12.1, 96.6, 88.3, 104.6),
];

enum Status {
    Pass(String),
    Fail(String),
    /// Needs data this environment lacks; reported as FAIL.
    Blocked(String),
}

fn corpus_root() -> Option<PathBuf> {
    std::env::var_os(CORPUS_ENV).map(PathBuf::from).filter(|p| p.exists())
}

fn load_full() -> Result<Option<(Corpus, Database, PathBuf)>, String> {
    let Some(root) = corpus_root() else { return Ok(None) };
    let corpus = Corpus::load(&root).map_err(|e| e.to_string())?;
    let db = Database::for_corpus(&root).map_err(|e| e.to_string())?;
    Ok(Some((corpus, db, root)))
}

fn blocked(what: &str, stand_in: String) -> Status {
    Status::Blocked(format!("{CORPUS_ENV} unset, {what} needs the full corpus; fixture stand-in: {stand_in}"))
}

fn criterion_1(full: &Option<(Corpus, Database, PathBuf)>) -> Status {
    let Some((c, _, _)) = full else {
        let f = common::fixture();
        let sizes: Vec<usize> = Split::ALL.iter().map(|s| f.split(*s).len()).collect();
        return blocked("split sizes", format!("sizes {sizes:?}"));
    };
    let sizes: Vec<(Split, usize, usize)> = SPLIT_SIZES.iter().map(|(s, n)| (*s, c.split(*s).len(), *n)).collect();
    let filtered = c.filter_active();
    let inactive = filtered
        .split(Split::Train)
        .iter()
        .filter(|d| {
            d.services.iter().any(|s| !s.is_active())
                || d.turns.iter().filter_map(|t| t.gold_state.as_ref()).any(|s| s.domains().any(|x| !x.is_active()))
        })
        .count();
    let ok = sizes.iter().all(|(_, got, want)| got == want) && inactive == 0;
    let msg = format!("sizes {sizes:?}, hospital/police dialogues after filtering {inactive}");
    if ok { Status::Pass(msg) } else { Status::Fail(msg) }
}

fn criterion_2(full: &Option<(Corpus, Database, PathBuf)>) -> Status {
    let db = full.as_ref().map_or_else(Database::bundled, |(_, db, _)| db.clone());
    let c: BTreeMap<String, String> =
        [("area".into(), "centre".into()), ("pricerange".into(), "expensive".into())].into();
    match db.query(Domain::Restaurant, &c) {
        Ok(v) if v.len() == EXPENSIVE_CENTRE_RESTAURANTS => Status::Pass(format!("{} venues", v.len())),
        Ok(v) => Status::Fail(format!("{} venues, expected {EXPENSIVE_CENTRE_RESTAURANTS}", v.len())),
        Err(e) => Status::Fail(e.to_string()),
    }
}

fn criterion_3() -> Status {
    let worst = TABLE2
        .iter()
        .map(|(name, b, i, s, printed)| (name, (combined(*i, *s, *b) - printed).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let msg = format!("{} rows, largest deviation {:.3} ({})", TABLE2.len(), worst.1, worst.0);
    if worst.1 <= TABLE2_TOLERANCE + EXACT { Status::Pass(msg) } else { Status::Fail(msg) }
}

fn gold_scores(corpus: &Corpus, db: &Database) -> (f64, f64, f64, f64) {
    let test = corpus.split(Split::Test);
    let r = Evaluator::new(db, 0.9).evaluate(test, &PredictionSet::from_gold(test, db));
    (r.jsa, r.bleu, r.inform, r.success)
}

fn run_oracle(root: Option<&PathBuf>) -> Result<(f64, f64), String> {
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/oracles/gold_outcomes.py");
    let mut cmd = Command::new("python3");
    cmd.arg(script);
    if let Some(r) = root {
        cmd.arg(r);
    }
    let out = cmd.output().map_err(|e| format!("cannot run oracle: {e}"))?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).trim().to_string());
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok((v["inform"].as_f64().unwrap_or(f64::NAN), v["success"].as_f64().unwrap_or(f64::NAN)))
}

fn criterion_4(full: &Option<(Corpus, Database, PathBuf)>) -> Status {
    let Some((c, db, root)) = full else {
        let f = common::fixture().filter_active();
        let (jsa, bleu, inform, success) = gold_scores(&f, &Database::bundled());
        let golden = (inform - FIXTURE_GOLD_INFORM).abs() < EXACT && (success - FIXTURE_GOLD_SUCCESS).abs() < EXACT;
        return blocked(
            "the test split",
            format!("jsa {jsa} bleu {bleu} inform {inform:.2} success {success:.2} (golden match: {golden})"),
        );
    };
    let (jsa, bleu, inform, success) = gold_scores(&c.filter_active(), db);
    let exact = (jsa - 1.0).abs() < EXACT && (bleu - 100.0).abs() < EXACT;
    let msg = format!("jsa {jsa} bleu {bleu} inform {inform:.2} success {success:.2}");
    match run_oracle(Some(root)) {
        Ok((oi, os)) if exact && (oi - inform).abs() < 1e-3 && (os - success).abs() < 1e-3 => Status::Pass(msg),
        Ok((oi, os)) => Status::Fail(format!("{msg}; oracle inform {oi:.2} success {os:.2}")),
        Err(e) => Status::Fail(format!("{msg}; oracle unavailable: {e}")),
    }
}

fn criterion_5(full: &Option<(Corpus, Database, PathBuf)>) -> Status {
    let Some((c, db, _)) = full else {
        let f = common::fixture().filter_active();
        let r = dard::metrics::venue_suggestion_analysis(f.split(Split::Train), &Database::bundled());
        return blocked(
            "bucket rates",
            format!("{:.1}/{:.1}/{:.1}", r.at_least_10.rate, r.from_5_to_9.rate, r.under_5.rate),
        );
    };
    let r = dard::metrics::venue_suggestion_analysis(c.filter_active().split(Split::Train), db);
    let got = [r.at_least_10.rate, r.from_5_to_9.rate, r.under_5.rate];
    let ok = got.iter().zip(TABLE4_RATES).all(|(g, w)| (g - w).abs() <= TABLE4_TOLERANCE);
    let msg = format!(
        "rates {:.1}/{:.1}/{:.1} over {}/{}/{} turns, target {:?} ±{TABLE4_TOLERANCE}",
        got[0], got[1], got[2], r.at_least_10.turns, r.from_5_to_9.turns, r.under_5.turns, TABLE4_RATES
    );
    if ok { Status::Pass(msg) } else { Status::Fail(msg) }
}

fn random_state() -> impl Strategy<Value = DialogueState> {
    let d = prop::sample::select(Domain::ACTIVE.to_vec());
    let k = prop::sample::select(vec!["area", "food", "name", "day", "stars"]);
    let v = prop::sample::select(vec!["north", "centre", "thai", "monday", "4"]);
    prop::collection::vec((d, k, v), 0..7).prop_map(|t| {
        let mut s = DialogueState::new();
        for (d, k, v) in t {
            s.set(d, k, v);
        }
        s
    })
}

fn set_oracle(pred: &DialogueState, gold: &DialogueState) -> ErrorCategory {
    let triples = |s: &DialogueState| -> std::collections::BTreeSet<(Domain, String, String)> {
        s.iter().flat_map(|(d, k, vs)| vs.iter().map(move |v| (d, k.to_string(), v.clone()))).collect()
    };
    let (p, g) = (triples(pred), triples(gold));
    match (g.is_subset(&p), p.is_subset(&g)) {
        (true, true) => ErrorCategory::Correct,
        (true, false) => ErrorCategory::OverPrediction,
        (false, true) => ErrorCategory::UnderPrediction,
        (false, false) if pred.keys() == gold.keys() => ErrorCategory::ValueMatchError,
        (false, false) => ErrorCategory::BothMismatch,
    }
}

fn criterion_6() -> Status {
    let m = FuzzyMatcher::new(0.9);
    let mut runner = TestRunner::deterministic();
    let pairs = (random_state(), random_state());
    let mut disagreements = 0u32;
    for _ in 0..TAXONOMY_PAIRS {
        let (p, g) = pairs.new_tree(&mut runner).expect("strategy generates").current();
        if classify_dst_error(&p, &g, &m) != set_oracle(&p, &g) {
            disagreements += 1;
        }
    }
    let msg = format!("{TAXONOMY_PAIRS} pairs, {disagreements} disagreement(s)");
    if disagreements == 0 && TAXONOMY_PAIRS >= 1000 { Status::Pass(msg) } else { Status::Fail(msg) }
}

fn determinism(corpus: &Corpus, db: &Database) -> (bool, f64, f64) {
    let test = corpus.split(Split::Test);
    let suggest = common::template_pipeline(Policy::SuggestAndAsk);
    let a = suggest.run_corpus(test, RunMode::EndToEnd, 4).to_json();
    let b = suggest.run_corpus(test, RunMode::EndToEnd, 2).to_json();
    let ask = common::template_pipeline(Policy::AskOnly).run_corpus(test, RunMode::EndToEnd, 4);
    let ev = Evaluator::new(db, 0.9);
    let si = ev.evaluate(test, &PredictionSet::from_json(&a).expect("own output parses")).inform;
    let ai = ev.evaluate(test, &ask).inform;
    (a == b, si, ai)
}

fn criterion_7(full: &Option<(Corpus, Database, PathBuf)>) -> Status {
    let Some((c, db, _)) = full else {
        let f = common::fixture().filter_active();
        let (same, si, ai) = determinism(&f, &Database::bundled());
        return blocked("the test split", format!("identical {same}, inform suggest {si:.1} vs ask-only {ai:.1}"));
    };
    let (same, si, ai) = determinism(&c.filter_active(), db);
    let msg = format!("identical {same}, inform suggest {si:.1} vs ask-only {ai:.1}");
    if same && si > ai { Status::Pass(msg) } else { Status::Fail(msg) }
}

fn criterion_8(full: &Option<(Corpus, Database, PathBuf)>) -> Status {
    let (corpus, db, source) = match full {
        Some((c, db, _)) => (c.filter_active(), db.clone(), "full corpus"),
        None => (common::fixture().filter_active(), Database::bundled(), "fixture corpus"),
    };
    let mut failures: Vec<String> = Vec::new();

    // Fuzzy matching: reflexive and symmetric.
    let m = FuzzyMatcher::new(0.9);
    let mut runner = TestRunner::new(PtConfig { cases: 1000, ..PtConfig::default() });
    if runner
        .run(&("[a-z0-9 ':]{0,14}", "[a-z0-9 ':]{0,14}"), |(a, b)| {
            prop_assert!(m.matches(&a, &a));
            prop_assert_eq!(m.matches(&a, &b), m.matches(&b, &a));
            Ok(())
        })
        .is_err()
    {
        failures.push("fuzzy match".into());
    }

    let mut states = 0usize;
    let mut round_trips = 0usize;
    let mut collapsed = 0usize;
    for split in Split::ALL {
        for d in corpus.split(split) {
            for (pos, t) in d.turns.iter().enumerate() {
                if let Some(s) = &t.gold_state {
                    states += 1;
                    let merged = union_states(s.domains().map(|x| s.project(x)));
                    if merged.as_ref() != Ok(s) {
                        failures.push(format!("projection union {} turn {}", d.id, t.index));
                    }
                } else {
                    let delex = delexicalize_gold(d, pos, &db);
                    if delex.token_values.is_empty() {
                        continue;
                    }
                    if !delex.is_reversible() {
                        collapsed += 1;
                        continue;
                    }
                    round_trips += 1;
                    if lexicalize(&delex).as_deref() != Ok(t.utterance.as_str()) {
                        failures.push(format!("round trip {} turn {}", d.id, t.index));
                    }
                }
            }
        }
    }

    // Success implies inform, for gold and both template policies.
    let ev = Evaluator::new(&db, 0.9);
    let mut judged = 0usize;
    for split in Split::ALL {
        let ds = corpus.split(split);
        let runs = [
            PredictionSet::from_gold(ds, &db),
            common::template_pipeline(Policy::SuggestAndAsk).run_corpus(ds, RunMode::EndToEnd, 4),
            common::template_pipeline(Policy::AskOnly).run_corpus(ds, RunMode::EndToEnd, 4),
        ];
        for preds in &runs {
            for d in ds {
                judged += 1;
                let o = ev.judge(d, preds.get(&d.id).unwrap_or(&[]));
                if o.success && !o.informed {
                    failures.push(format!("success without inform {}", d.id));
                }
            }
        }
    }
    let msg = format!(
        "{source}: {states} gold states, {round_trips} resolvable system turns ({collapsed} with one token over differing values skipped), {judged} judged dialogues, {} failure(s){}",
        failures.len(),
        failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
    );
    if failures.is_empty() { Status::Pass(msg) } else { Status::Fail(msg) }
}

fn main() {
    let full = match load_full() {
        Ok(f) => f,
        Err(e) => panic!("{CORPUS_ENV} is set but the corpus does not load: {e}"),
    };
    let results: Vec<(u8, &str, Status)> = vec![
        (1, "corpus fidelity", criterion_1(&full)),
        (2, "database fidelity", criterion_2(&full)),
        (3, "combined-score arithmetic", criterion_3()),
        (4, "metric self-consistency", criterion_4(&full)),
        (5, "venue-suggestion rates", criterion_5(&full)),
        (6, "error taxonomy vs oracle", criterion_6()),
        (7, "determinism and policy ablation", criterion_7(&full)),
        (8, "property suites", criterion_8(&full)),
    ];
    let mut failed = Vec::new();
    for (id, name, status) in &results {
        match status {
            Status::Pass(m) => println!("criterion {id} [{name}]: PASS ({m})"),
            Status::Fail(m) => {
                println!("criterion {id} [{name}]: FAIL ({m})");
                failed.push(*id);
            }
            Status::Blocked(m) => println!("criterion {id} [{name}]: FAIL blocked ({m})"),
        }
    }
    // Also check the frozen oracle output still reproduces.
    if full.is_none() {
        if let Ok((i, s)) = run_oracle(None) {
            assert!((i - FIXTURE_GOLD_INFORM).abs() < 1e-3 && (s - FIXTURE_GOLD_SUCCESS).abs() < 1e-3);
        }
    }
    if !failed.is_empty() {
        eprintln!("criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
