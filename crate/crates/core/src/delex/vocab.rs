use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::Domain;

const VOCAB_JSON: &str = include_str!("../../data/delex_vocab.json");

static BUNDLED: LazyLock<Vocabulary> =
    LazyLock::new(|| serde_json::from_str(VOCAB_JSON).expect("bundled token vocabulary"));

/// A typed placeholder, written `[domain_slot]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DelexToken {
    pub domain: Domain,
    pub slot: String,
}

impl DelexToken {
    pub fn new(domain: Domain, slot: impl Into<String>) -> Self {
        DelexToken {
            domain,
            slot: slot.into(),
        }
    }
}

impl fmt::Display for DelexToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}_{}]", self.domain, self.slot)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a delexicalized token: `{0}`")]
pub struct BadToken(pub String);

impl FromStr for DelexToken {
    type Err = BadToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| BadToken(s.to_string()))?;
        let (d, slot) = inner.split_once('_').ok_or_else(|| BadToken(s.to_string()))?;
        let domain = d.parse().map_err(|_| BadToken(s.to_string()))?;
        if slot.is_empty() || !slot.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(BadToken(s.to_string()));
        }
        Ok(DelexToken::new(domain, slot.to_ascii_lowercase()))
    }
}

impl Serialize for DelexToken {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DelexToken {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct TokenSpec {
    pub slot: String,
    pub description: String,
}

/// Per-domain token vocabulary plus the uppercase placeholder aliases
/// (`NAME`, `REFERENCE`, ...) accepted on input.
#[derive(Debug, Clone, Deserialize)]
pub struct Vocabulary {
    pub version: u32,
    /// Domains whose vocabularies were built from the schema rather than
    /// taken from a published agent prompt.
    #[serde(default)]
    pub reconstructed: Vec<Domain>,
    domains: BTreeMap<Domain, Vec<TokenSpec>>,
    aliases: BTreeMap<String, Vec<String>>,
}

impl Vocabulary {
    pub fn bundled() -> &'static Vocabulary {
        &BUNDLED
    }

    pub fn tokens(&self, domain: Domain) -> &[TokenSpec] {
        self.domains.get(&domain).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, token: &DelexToken) -> bool {
        self.has_slot(token.domain, &token.slot)
    }

    pub fn has_slot(&self, domain: Domain, slot: &str) -> bool {
        self.tokens(domain).iter().any(|t| t.slot == slot)
    }

    /// Token for an uppercase placeholder in the given domain.
    pub fn resolve_alias(&self, domain: Domain, alias: &str) -> Option<DelexToken> {
        self.aliases
            .get(alias)?
            .iter()
            .find(|slot| self.has_slot(domain, slot))
            .map(|slot| DelexToken::new(domain, slot.clone()))
    }

    pub fn is_alias(&self, word: &str) -> bool {
        self.aliases.contains_key(word)
    }
}

/// Token slot for a venue attribute or state key, when one exists.
pub fn slot_for_key(domain: Domain, key: &str) -> Option<&'static str> {
    let slot = match key {
        "name" => "name",
        "trainid" | "id" if domain == Domain::Train => "id",
        "food" => "food",
        "pricerange" => "pricerange",
        "area" => "area",
        "address" => "address",
        "phone" => "phone",
        "postcode" => "postcode",
        "type" => "type",
        "stars" => "stars",
        "leaveat" => "leaveat",
        "arriveby" => "arriveby",
        "price" => "price",
        "duration" => "duration",
        "day" => "day",
        "departure" => "departure",
        "destination" => "destination",
        "entrancefee" => "entrancefee",
        "openhours" => "openhours",
        "choice" => "choice",
        "ref" => "ref",
        "bookday" => "bookday",
        "bookpeople" => "bookpeople",
        "booktime" => "booktime",
        "bookstay" => "bookstay",
        _ => return None,
    };
    Vocabulary::bundled()
        .has_slot(domain, slot)
        .then_some(slot)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restaurant_has_twelve_tokens() {
        let v = Vocabulary::bundled();
        let slots: Vec<&str> = v
            .tokens(Domain::Restaurant)
            .iter()
            .map(|t| t.slot.as_str())
            .collect();
        assert_eq!(
            slots,
            [
                "name", "food", "pricerange", "area", "address", "phone", "postcode", "choice",
                "ref", "booktime", "bookday", "bookpeople"
            ]
        );
    }

    #[test]
    fn token_text_form() {
        let t: DelexToken = "[restaurant_name]".parse().unwrap();
        assert_eq!(t, DelexToken::new(Domain::Restaurant, "name"));
        assert_eq!(t.to_string(), "[restaurant_name]");
        assert!("[restaurant]".parse::<DelexToken>().is_err());
        assert!("[bus_name]".parse::<DelexToken>().is_err());
    }

    #[test]
    fn aliases_resolve_per_domain() {
        let v = Vocabulary::bundled();
        assert_eq!(
            v.resolve_alias(Domain::Restaurant, "REFERENCE"),
            Some(DelexToken::new(Domain::Restaurant, "ref"))
        );
        assert_eq!(
            v.resolve_alias(Domain::Train, "PRICE"),
            Some(DelexToken::new(Domain::Train, "price"))
        );
        assert_eq!(
            v.resolve_alias(Domain::Train, "NAME"),
            Some(DelexToken::new(Domain::Train, "id"))
        );
        assert_eq!(v.resolve_alias(Domain::Attraction, "REFERENCE"), None);
    }
}
