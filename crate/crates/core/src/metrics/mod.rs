//! Evaluation: joint state accuracy, inform and success, delexicalized BLEU,
//! the combined score, lexical richness, the state-error taxonomy and the
//! venue-suggestion analysis.

mod analysis;
mod bleu;
mod outcome;
mod predictions;
mod richness;
mod taxonomy;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use analysis::{venue_suggestion_analysis, BucketRate, SuggestionRates};
pub use bleu::{corpus_bleu, tokenize, BleuStats, MAX_ORDER};
pub use outcome::{goal_constraints, required_slots, DialogueOutcome, DomainOutcome, OutcomeJudge};
pub use predictions::{PredictionError, PredictionSet, TurnPrediction};
pub use richness::{richness, Richness};
pub use taxonomy::{classify_dst_error, ErrorCategory};

use crate::agents::lexicon::Gazetteer;
use crate::corpus::Dialogue;
use crate::delex::{delexicalize_gold, gold_turn_domain};
use crate::domain::Domain;
use crate::dst::{DialogueState, FuzzyMatcher};
use crate::kb::Database;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no predicted responses to score")]
    NoResponses,
}

/// `(inform + success) / 2 + bleu`.
pub fn combined(inform_pct: f64, success_pct: f64, bleu: f64) -> f64 {
    (inform_pct + success_pct) / 2.0 + bleu
}

/// Corpus BLEU over `(prediction, reference)` pairs; an empty set is an error.
pub fn bleu<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<f64, MetricsError> {
    let mut stats = BleuStats::default();
    let mut any = false;
    for (h, r) in pairs {
        stats.add(h, r);
        any = true;
    }
    if any {
        Ok(stats.score())
    } else {
        Err(MetricsError::NoResponses)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DomainScores {
    /// Dialogues whose goal includes the domain.
    pub dialogues: usize,
    pub inform: f64,
    pub success: f64,
    /// Over turns delegated to the domain.
    pub bleu: f64,
    pub combined: f64,
    /// Joint accuracy of the domain's slots over turns where either side has any.
    #[serde(default)]
    pub jsa: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dialogues: usize,
    pub user_turns: usize,
    /// User turns without a prediction; they count as mismatches.
    pub missing_turns: usize,
    pub failed_turns: usize,
    /// Turns scored for BLEU.
    pub response_turns: usize,
    pub jsa: f64,
    /// Percentages.
    pub inform: f64,
    pub success: f64,
    pub bleu: f64,
    pub combined: f64,
    pub cbe: f64,
    pub unique_words: usize,
    pub unique_trigrams: usize,
    pub per_domain: BTreeMap<Domain, DomainScores>,
    /// Category name → fraction of scored user turns.
    pub error_histogram: BTreeMap<ErrorCategory, f64>,
}

impl EvalReport {
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "dialogues {}  user turns {}  missing {}  failed {}\n\
             JSA {:.4}  Inform {:.1}  Success {:.1}  BLEU {:.2}  Combined {:.2}\n\
             CBE {:.3}  unique words {}  unique trigrams {}\n\n\
             {:<11} {:>9} {:>7} {:>8} {:>6} {:>9} {:>6}\n",
            self.dialogues,
            self.user_turns,
            self.missing_turns,
            self.failed_turns,
            self.jsa,
            self.inform,
            self.success,
            self.bleu,
            self.combined,
            self.cbe,
            self.unique_words,
            self.unique_trigrams,
            "domain", "dialogues", "inform", "success", "bleu", "combined", "jsa"
        );
        for (d, s) in &self.per_domain {
            out.push_str(&format!(
                "{:<11} {:>9} {:>7.1} {:>8.1} {:>6.2} {:>9.2} {:>6}\n",
                d.as_str(),
                s.dialogues,
                s.inform,
                s.success,
                s.bleu,
                s.combined,
                s.jsa.map_or("-".to_string(), |j| format!("{j:.3}"))
            ));
        }
        out.push('\n');
        for (c, f) in &self.error_histogram {
            out.push_str(&format!("{:<18} {:>6.2}%\n", c.as_str(), 100.0 * f));
        }
        out
    }
}

/// Per-dialogue partial results, reduced associatively.
#[derive(Default)]
struct Partial {
    dialogues: usize,
    user_turns: usize,
    missing: usize,
    failed: usize,
    joint_hits: usize,
    domain_jsa: BTreeMap<Domain, (usize, usize)>,
    informed: usize,
    succeeded: usize,
    domain_outcomes: BTreeMap<Domain, (usize, usize, usize)>,
    bleu: BleuStats,
    domain_bleu: BTreeMap<Domain, BleuStats>,
    responses: Vec<String>,
    histogram: BTreeMap<ErrorCategory, usize>,
}

impl Partial {
    fn merge(mut self, o: Partial) -> Partial {
        self.dialogues += o.dialogues;
        self.user_turns += o.user_turns;
        self.missing += o.missing;
        self.failed += o.failed;
        self.joint_hits += o.joint_hits;
        for (d, (h, n)) in o.domain_jsa {
            let e = self.domain_jsa.entry(d).or_default();
            e.0 += h;
            e.1 += n;
        }
        self.informed += o.informed;
        self.succeeded += o.succeeded;
        for (d, (n, i, s)) in o.domain_outcomes {
            let e = self.domain_outcomes.entry(d).or_default();
            e.0 += n;
            e.1 += i;
            e.2 += s;
        }
        self.bleu = self.bleu.merge(&o.bleu);
        for (d, b) in o.domain_bleu {
            let e = self.domain_bleu.entry(d).or_default();
            *e = e.merge(&b);
        }
        self.responses.extend(o.responses);
        for (c, n) in o.histogram {
            *self.histogram.entry(c).or_default() += n;
        }
        self
    }
}

fn pct(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

/// Scores prediction sets against gold dialogues.
pub struct Evaluator<'a> {
    db: &'a Database,
    gazetteer: Gazetteer,
    matcher: FuzzyMatcher<'static>,
}

impl<'a> Evaluator<'a> {
    pub fn new(db: &'a Database, fuzzy_threshold: f64) -> Self {
        Evaluator {
            db,
            gazetteer: Gazetteer::from_database(db),
            matcher: FuzzyMatcher::new(fuzzy_threshold),
        }
    }

    pub fn matcher(&self) -> &FuzzyMatcher<'static> {
        &self.matcher
    }

    pub fn judge(&self, dialogue: &Dialogue, preds: &[TurnPrediction]) -> DialogueOutcome {
        OutcomeJudge::new(self.db, &self.gazetteer, self.matcher).judge(dialogue, preds)
    }

    pub fn inform(&self, dialogue: &Dialogue, preds: &[TurnPrediction]) -> bool {
        self.judge(dialogue, preds).informed
    }

    pub fn success(&self, dialogue: &Dialogue, preds: &[TurnPrediction]) -> bool {
        self.judge(dialogue, preds).success
    }

    fn partial(&self, dialogue: &Dialogue, preds: &[TurnPrediction], score_errors: bool) -> Partial {
        let mut p = Partial {
            dialogues: 1,
            ..Default::default()
        };
        let by_index: BTreeMap<usize, &TurnPrediction> =
            preds.iter().map(|t| (t.turn_index, t)).collect();
        let empty = DialogueState::new();
        for (pos, turn) in dialogue.turns.iter().enumerate() {
            let Some(gold) = turn.gold_state.as_ref().filter(|_| turn.is_user()) else {
                continue;
            };
            let gold = gold.active();
            p.user_turns += 1;
            let pred = by_index.get(&turn.index).copied();
            if pred.is_none() {
                p.missing += 1;
                log::debug!("{}: no prediction for turn {}", dialogue.id, turn.index);
            }
            let state = pred.map_or(&empty, |t| &t.state);
            if pred.is_some_and(|t| t.error.is_some()) {
                p.failed += 1;
            }
            if self.matcher.joint_match(state, &gold) {
                p.joint_hits += 1;
            }
            *p.histogram
                .entry(classify_dst_error(state, &gold, &self.matcher))
                .or_default() += 1;
            for d in Domain::ACTIVE {
                let (g, s) = (gold.project(d), state.project(d));
                if g.is_empty() && s.is_empty() {
                    continue;
                }
                let e = p.domain_jsa.entry(d).or_default();
                e.0 += self.matcher.joint_match(&s, &g) as usize;
                e.1 += 1;
            }
            let Some(pred) = pred else { continue };
            let has_reply = dialogue.turns.get(pos + 1).is_some_and(|t| !t.is_user());
            let scored = pred.response_delex.is_some() || (score_errors && pred.error.is_some());
            if has_reply && scored {
                let hyp = pred.response_delex.clone().unwrap_or_default();
                let reference = delexicalize_gold(dialogue, pos + 1, self.db).text;
                p.bleu.add(&hyp, &reference);
                let domain = pred.active_domain.or_else(|| gold_turn_domain(dialogue, pos + 1));
                if let Some(d) = domain {
                    p.domain_bleu.entry(d).or_default().add(&hyp, &reference);
                }
                p.responses.push(hyp);
            }
        }
        let outcome = self.judge(dialogue, preds);
        p.informed += outcome.informed as usize;
        p.succeeded += outcome.success as usize;
        for (d, o) in outcome.per_domain {
            let e = p.domain_outcomes.entry(d).or_default();
            e.0 += 1;
            e.1 += o.informed as usize;
            e.2 += o.success as usize;
        }
        p
    }

    /// Full report. Dialogues absent from `preds` are scored as if every
    /// turn went unpredicted.
    pub fn evaluate(&self, dialogues: &[Dialogue], preds: &PredictionSet) -> EvalReport {
        let score_errors = preds.iter().flat_map(|(_, v)| v).any(|t| t.response_delex.is_some());
        let total = dialogues
            .par_iter()
            .map(|d| self.partial(d, preds.get(&d.id).unwrap_or(&[]), score_errors))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Partial::default(), Partial::merge);

        let bleu = if total.responses.is_empty() { 0.0 } else { total.bleu.score() };
        let inform = pct(total.informed, total.dialogues);
        let success = pct(total.succeeded, total.dialogues);
        let rich = richness(total.responses.iter().map(String::as_str)).unwrap_or(Richness {
            cbe: 0.0,
            unique_words: 0,
            unique_trigrams: 0,
        });
        let mut per_domain = BTreeMap::new();
        for d in Domain::ACTIVE {
            let (n, i, s) = total.domain_outcomes.get(&d).copied().unwrap_or_default();
            let jsa = total.domain_jsa.get(&d).map(|(h, n)| *h as f64 / *n as f64);
            if n == 0 && jsa.is_none() {
                continue;
            }
            let b = total.domain_bleu.get(&d).map_or(0.0, BleuStats::score);
            let (inf, suc) = (pct(i, n), pct(s, n));
            per_domain.insert(
                d,
                DomainScores {
                    dialogues: n,
                    inform: inf,
                    success: suc,
                    bleu: b,
                    combined: combined(inf, suc, b),
                    jsa,
                },
            );
        }
        let scored: usize = total.histogram.values().sum();
        let error_histogram = ErrorCategory::ALL
            .into_iter()
            .map(|c| {
                let n = total.histogram.get(&c).copied().unwrap_or(0);
                (c, if scored == 0 { 0.0 } else { n as f64 / scored as f64 })
            })
            .collect();
        EvalReport {
            dialogues: total.dialogues,
            user_turns: total.user_turns,
            missing_turns: total.missing,
            failed_turns: total.failed,
            response_turns: total.responses.len(),
            jsa: if total.user_turns == 0 {
                0.0
            } else {
                total.joint_hits as f64 / total.user_turns as f64
            },
            inform,
            success,
            bleu,
            combined: combined(inform, success, bleu),
            cbe: rich.cbe,
            unique_words: rich.unique_words,
            unique_trigrams: rich.unique_trigrams,
            per_domain,
            error_histogram,
        }
    }
}
