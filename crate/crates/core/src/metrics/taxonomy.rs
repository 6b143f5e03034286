use serde::{Deserialize, Serialize};

use crate::dst::{DialogueState, FuzzyMatcher};

/// Relation between a predicted and a gold state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Correct,
    /// Every gold slot is predicted, plus extra ones.
    OverPrediction,
    /// Every predicted slot is gold, but some gold slots are missing.
    UnderPrediction,
    /// Both sides have slots the other lacks.
    BothMismatch,
    /// Same slot keys, some value differs.
    ValueMatchError,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 5] = [
        ErrorCategory::Correct,
        ErrorCategory::OverPrediction,
        ErrorCategory::UnderPrediction,
        ErrorCategory::BothMismatch,
        ErrorCategory::ValueMatchError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Correct => "correct",
            ErrorCategory::OverPrediction => "over_prediction",
            ErrorCategory::UnderPrediction => "under_prediction",
            ErrorCategory::BothMismatch => "both_mismatch",
            ErrorCategory::ValueMatchError => "value_match_error",
        }
    }
}

/// Every slot of `a` has a fuzzily matching slot in `b`.
fn contained(a: &DialogueState, b: &DialogueState, m: &FuzzyMatcher<'_>) -> bool {
    a.iter()
        .all(|(d, k, av)| b.get(d, k).is_some_and(|bv| m.any_match(av, bv)))
}

/// Subset relations are checked before value agreement.
pub fn classify_dst_error(
    pred: &DialogueState,
    gold: &DialogueState,
    matcher: &FuzzyMatcher<'_>,
) -> ErrorCategory {
    let gold_in_pred = contained(gold, pred, matcher);
    let pred_in_gold = contained(pred, gold, matcher);
    match (gold_in_pred, pred_in_gold) {
        (true, true) => ErrorCategory::Correct,
        (true, false) => ErrorCategory::OverPrediction,
        (false, true) => ErrorCategory::UnderPrediction,
        (false, false) if pred.keys() == gold.keys() => ErrorCategory::ValueMatchError,
        (false, false) => ErrorCategory::BothMismatch,
    }
}
