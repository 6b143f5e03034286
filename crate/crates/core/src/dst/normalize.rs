//! Value canonicalization shared by state comparison and database matching.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::Deserialize;

const TABLE_JSON: &str = include_str!("../../data/normalization.json");

/// Upper bound on pipeline passes; every table shipped so far settles in two.
const MAX_PASSES: usize = 8;

static TIME_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\d{1,2})(?:[:.](\d{2}))?\s*(a\.?\s?m\.?|p\.?\s?m\.?)?$").unwrap()
});

static DEFAULT: LazyLock<Normalizer> =
    LazyLock::new(|| Normalizer::from_json(TABLE_JSON).expect("bundled normalization table"));

#[derive(Debug, Clone, Deserialize)]
pub struct SynonymTable {
    pub version: u32,
    #[serde(default)]
    pub words: HashMap<String, String>,
    #[serde(default)]
    pub values: HashMap<String, String>,
}

/// Lowercases, strips punctuation and the leading article, canonicalizes
/// clock times to 24-hour `HH:MM` and folds synonyms.
#[derive(Debug, Clone)]
pub struct Normalizer {
    table: SynonymTable,
}

impl Normalizer {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        let raw: SynonymTable = serde_json::from_str(json)?;
        // Keys are matched against already-stripped text, so strip them too.
        let words = raw
            .words
            .into_iter()
            .map(|(k, v)| (strip_punctuation(&k.to_lowercase()), v))
            .collect();
        let values = raw
            .values
            .into_iter()
            .map(|(k, v)| (strip_punctuation(&k.to_lowercase()), v))
            .collect();
        Ok(Normalizer {
            table: SynonymTable {
                version: raw.version,
                words,
                values,
            },
        })
    }

    pub fn bundled() -> &'static Normalizer {
        &DEFAULT
    }

    pub fn version(&self) -> u32 {
        self.table.version
    }

    pub fn normalize(&self, raw: &str) -> String {
        let mut current = self.pass(raw);
        for _ in 0..MAX_PASSES {
            let next = self.pass(&current);
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    fn pass(&self, raw: &str) -> String {
        let lower = raw.trim().to_lowercase();
        if let Some(t) = canonical_time(&lower) {
            return t;
        }
        let stripped = strip_punctuation(&lower);
        let mut words: Vec<&str> = stripped.split_whitespace().collect();
        while words.len() > 1 && words[0] == "the" {
            words.remove(0);
        }
        let folded: Vec<&str> = words
            .iter()
            .map(|w| self.table.words.get(*w).map(String::as_str).unwrap_or(w))
            .collect();
        let joined = folded.join(" ");
        let out = match self.table.values.get(&joined) {
            Some(v) => v.clone(),
            None => joined,
        };
        canonical_time(&out).unwrap_or(out)
    }
}

/// Removes punctuation except `:` and `.` between digits; `-`, `/` and `&`
/// become word separators.
fn strip_punctuation(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    for (i, &c) in chars.iter().enumerate() {
        match c {
            c if c.is_alphanumeric() || c.is_whitespace() => out.push(c),
            ':' => out.push(':'),
            '.' => {
                let digit_before = i > 0 && chars[i - 1].is_ascii_digit();
                let digit_after = chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
                if digit_before && digit_after {
                    out.push('.');
                }
            }
            '-' | '/' | '_' => out.push(' '),
            '&' => out.push_str(" and "),
            _ => {}
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn canonical_time(s: &str) -> Option<String> {
    let caps = TIME_RE.captures(s)?;
    let minutes_given = caps.get(2).is_some();
    let meridiem = caps.get(3).map(|m| m.as_str().starts_with('p'));
    if !minutes_given && meridiem.is_none() {
        // A bare number ("5") is a count, not a time.
        return None;
    }
    let mut hour: u32 = caps[1].parse().ok()?;
    let minute: u32 = caps.get(2).map_or(Some(0), |m| m.as_str().parse().ok())?;
    if minute > 59 {
        return None;
    }
    match meridiem {
        Some(pm) => {
            if hour == 0 || hour > 12 {
                if pm && hour > 12 && hour < 24 {
                    // "17:45 pm" is redundant, not invalid.
                } else {
                    return None;
                }
            } else if pm && hour < 12 {
                hour += 12;
            } else if !pm && hour == 12 {
                hour = 0;
            }
        }
        None => {
            if hour > 23 {
                return None;
            }
        }
    }
    Some(format!("{hour:02}:{minute:02}"))
}

/// Normalizes with the bundled synonym table.
pub fn normalize_value(raw: &str) -> String {
    DEFAULT.normalize(raw)
}
