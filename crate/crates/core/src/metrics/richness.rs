use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::bleu::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richness {
    /// Conditional bigram entropy in bits.
    pub cbe: f64,
    pub unique_words: usize,
    pub unique_trigrams: usize,
}

/// Lexical diversity of a set of responses. Bigrams and trigrams do not
/// cross response boundaries. `None` for an empty set.
pub fn richness<'a>(responses: impl IntoIterator<Item = &'a str>) -> Option<Richness> {
    let mut any = false;
    let mut words: HashSet<String> = HashSet::new();
    let mut trigrams: HashSet<Vec<String>> = HashSet::new();
    let mut bigrams: HashMap<(String, String), usize> = HashMap::new();
    let mut firsts: HashMap<String, usize> = HashMap::new();
    for r in responses {
        any = true;
        let toks = tokenize(r);
        words.extend(toks.iter().cloned());
        for w in toks.windows(3) {
            trigrams.insert(w.to_vec());
        }
        for w in toks.windows(2) {
            *bigrams.entry((w[0].clone(), w[1].clone())).or_default() += 1;
            *firsts.entry(w[0].clone()).or_default() += 1;
        }
    }
    if !any {
        return None;
    }
    let total: usize = bigrams.values().sum();
    let cbe = if total == 0 {
        0.0
    } else {
        let mut pairs: Vec<_> = bigrams.iter().collect();
        // Fixed summation order keeps the result bit-stable.
        pairs.sort();
        -pairs
            .into_iter()
            .map(|((w1, _), c)| {
                let joint = *c as f64 / total as f64;
                let cond = *c as f64 / firsts[w1] as f64;
                joint * cond.log2()
            })
            .sum::<f64>()
    };
    Some(Richness {
        cbe: cbe.max(0.0),
        unique_words: words.len(),
        unique_trigrams: trigrams.len(),
    })
}
