//! Dialogue-state representation, value canonicalization, fuzzy value
//! comparison and the per-domain state union used by the multi-agent tracker.

mod normalize;
mod state;

use std::collections::BTreeSet;

pub use normalize::{normalize_value, Normalizer, SynonymTable};
pub use state::{DialogueState, SlotTriple};

use crate::domain::Domain;

pub const DEFAULT_FUZZY_THRESHOLD: f64 = 0.9;

const DONTCARE: &str = "dontcare";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DstError {
    #[error("domain `{0}` was tracked more than once")]
    DuplicateDomain(Domain),
}

/// Slot-value comparator: equal after normalization, or normalized
/// Levenshtein similarity at or above the threshold.
#[derive(Debug, Clone, Copy)]
pub struct FuzzyMatcher<'a> {
    pub threshold: f64,
    normalizer: &'a Normalizer,
}

impl Default for FuzzyMatcher<'static> {
    fn default() -> Self {
        FuzzyMatcher::new(DEFAULT_FUZZY_THRESHOLD)
    }
}

impl FuzzyMatcher<'static> {
    pub fn new(threshold: f64) -> Self {
        FuzzyMatcher {
            threshold,
            normalizer: Normalizer::bundled(),
        }
    }
}

impl<'a> FuzzyMatcher<'a> {
    pub fn with_normalizer(threshold: f64, normalizer: &'a Normalizer) -> Self {
        FuzzyMatcher {
            threshold,
            normalizer,
        }
    }

    pub fn normalize(&self, raw: &str) -> String {
        self.normalizer.normalize(raw)
    }

    pub fn matches(&self, a: &str, b: &str) -> bool {
        let na = self.normalizer.normalize(a);
        let nb = self.normalizer.normalize(b);
        self.matches_normalized(&na, &nb)
    }

    /// Same as [`matches`](Self::matches) for already-normalized inputs.
    pub fn matches_normalized(&self, na: &str, nb: &str) -> bool {
        if na == nb {
            return true;
        }
        // dontcare is a value, not a wildcard.
        if na == DONTCARE || nb == DONTCARE {
            return false;
        }
        similarity(na, nb) >= self.threshold
    }

    pub fn any_match(&self, a: &[String], b: &[String]) -> bool {
        a.iter().any(|x| b.iter().any(|y| self.matches(x, y)))
    }

    /// Exact (domain, key) set equality plus an any-to-any fuzzy value hit
    /// on every key.
    pub fn joint_match(&self, pred: &DialogueState, gold: &DialogueState) -> bool {
        if pred.keys() != gold.keys() {
            return false;
        }
        gold.iter().all(|(d, k, gv)| {
            pred.get(d, k)
                .is_some_and(|pv| self.any_match(pv, gv))
        })
    }
}

/// `1 - levenshtein / max_len` over characters.
pub fn similarity(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / max_len as f64
}

pub fn fuzzy_match(a: &str, b: &str) -> bool {
    FuzzyMatcher::default().matches(a, b)
}

pub fn joint_match(pred: &DialogueState, gold: &DialogueState) -> bool {
    FuzzyMatcher::default().joint_match(pred, gold)
}

/// Merges single-domain states. A domain appearing in two inputs is an error.
pub fn union_states<I>(per_domain: I) -> Result<DialogueState, DstError>
where
    I: IntoIterator<Item = DialogueState>,
{
    let mut seen = BTreeSet::new();
    let mut out = DialogueState::new();
    for state in per_domain {
        for domain in state.domains().collect::<Vec<_>>() {
            if !seen.insert(domain) {
                return Err(DstError::DuplicateDomain(domain));
            }
        }
        for (d, k, v) in state.iter() {
            out.insert(d, k, v.iter().cloned());
        }
    }
    Ok(out)
}
