use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

static TOKEN_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\[[a-z]+_[a-z0-9]+\]|[a-z0-9]+(?:'[a-z]+)?|[^\sa-z0-9]").unwrap()
});

/// Lowercased words, with punctuation split off and delexicalized tokens
/// kept whole.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    TOKEN_RE
        .find_iter(&lower)
        .map(|m| m.as_str().to_string())
        .collect()
}

pub const MAX_ORDER: usize = 4;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut out = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *out.entry(w).or_insert(0) += 1;
        }
    }
    out
}

/// Sufficient statistics of corpus BLEU.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn add(&mut self, hypothesis: &str, reference: &str) {
        let h = tokenize(hypothesis);
        let r = tokenize(reference);
        self.hyp_len += h.len();
        self.ref_len += r.len();
        for n in 1..=MAX_ORDER {
            let hc = ngram_counts(&h, n);
            let rc = ngram_counts(&r, n);
            self.totals[n - 1] += h.len().saturating_sub(n - 1);
            self.matches[n - 1] += hc
                .iter()
                .map(|(g, c)| (*c).min(rc.get(g).copied().unwrap_or(0)))
                .sum::<usize>();
        }
    }

    pub fn merge(mut self, other: &BleuStats) -> BleuStats {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
        self
    }

    /// Score on a 0-100 scale. Zero-match orders get exponentially decaying
    /// pseudo-precisions; orders the hypotheses are too short for are left
    /// out of the geometric mean. No matching n-gram at all scores 0.
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 || self.matches.iter().all(|m| *m == 0) {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut order = 0;
        let mut smooth = 1.0;
        for n in 0..MAX_ORDER {
            if self.totals[n] == 0 {
                break;
            }
            order += 1;
            let p = if self.matches[n] == 0 {
                smooth *= 2.0;
                1.0 / (smooth * self.totals[n] as f64)
            } else {
                self.matches[n] as f64 / self.totals[n] as f64
            };
            log_sum += p.ln();
        }
        let bp = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        100.0 * bp * (log_sum / order as f64).exp()
    }
}

/// Corpus BLEU over `(hypothesis, reference)` pairs, one reference each.
pub fn corpus_bleu<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> f64 {
    let mut stats = BleuStats::default();
    for (h, r) in pairs {
        stats.add(h, r);
    }
    stats.score()
}
