use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize};

use crate::domain::Domain;

/// One tracked slot: domain, key, and its candidate values (at least one).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotTriple {
    pub domain: Domain,
    pub key: String,
    pub value: Vec<String>,
}

/// Belief state: domain → slot key → candidate values.
///
/// Empty value lists are never stored. On input a slot value may be a bare
/// string or a list of strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DialogueState(BTreeMap<Domain, BTreeMap<String, Vec<String>>>);

impl DialogueState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<I, S>(&mut self, domain: Domain, key: impl Into<String>, values: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return;
        }
        self.0.entry(domain).or_default().insert(key.into(), values);
    }

    pub fn set(&mut self, domain: Domain, key: impl Into<String>, value: impl Into<String>) {
        self.insert(domain, key, [value.into()]);
    }

    pub fn remove(&mut self, domain: Domain, key: &str) {
        if let Some(slots) = self.0.get_mut(&domain) {
            slots.remove(key);
            if slots.is_empty() {
                self.0.remove(&domain);
            }
        }
    }

    pub fn get(&self, domain: Domain, key: &str) -> Option<&[String]> {
        self.0.get(&domain)?.get(key).map(Vec::as_slice)
    }

    pub fn first(&self, domain: Domain, key: &str) -> Option<&str> {
        self.get(domain, key)?.first().map(String::as_str)
    }

    pub fn slots(&self, domain: Domain) -> Option<&BTreeMap<String, Vec<String>>> {
        self.0.get(&domain)
    }

    pub fn domains(&self) -> impl Iterator<Item = Domain> + '_ {
        self.0.keys().copied()
    }

    pub fn contains_domain(&self, domain: Domain) -> bool {
        self.0.contains_key(&domain)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of (domain, key) slots.
    pub fn len(&self) -> usize {
        self.0.values().map(BTreeMap::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Domain, &str, &[String])> + '_ {
        self.0.iter().flat_map(|(d, slots)| {
            slots
                .iter()
                .map(move |(k, v)| (*d, k.as_str(), v.as_slice()))
        })
    }

    pub fn triples(&self) -> Vec<SlotTriple> {
        self.iter()
            .map(|(domain, key, value)| SlotTriple {
                domain,
                key: key.to_string(),
                value: value.to_vec(),
            })
            .collect()
    }

    pub fn keys(&self) -> BTreeSet<(Domain, String)> {
        self.iter().map(|(d, k, _)| (d, k.to_string())).collect()
    }

    /// The single-domain slice of this state.
    pub fn project(&self, domain: Domain) -> DialogueState {
        let mut out = DialogueState::new();
        if let Some(slots) = self.0.get(&domain) {
            out.0.insert(domain, slots.clone());
        }
        out
    }

    pub fn retain_domains(&mut self, keep: impl Fn(Domain) -> bool) {
        self.0.retain(|d, _| keep(*d));
    }

    /// Copy restricted to the five active domains.
    pub fn active(&self) -> DialogueState {
        let mut out = self.clone();
        out.retain_domains(Domain::is_active);
        out
    }
}

impl FromIterator<SlotTriple> for DialogueState {
    fn from_iter<T: IntoIterator<Item = SlotTriple>>(iter: T) -> Self {
        let mut s = DialogueState::new();
        for t in iter {
            s.insert(t.domain, t.key, t.value);
        }
        s
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl<'de> Deserialize<'de> for DialogueState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<Domain, BTreeMap<String, OneOrMany>> =
            BTreeMap::deserialize(deserializer)?;
        let mut state = DialogueState::new();
        for (domain, slots) in raw {
            for (key, value) in slots {
                match value {
                    OneOrMany::One(v) => state.set(domain, key, v),
                    OneOrMany::Many(vs) => state.insert(domain, key, vs),
                }
            }
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_value_lists_are_dropped() {
        let mut s = DialogueState::new();
        s.insert(Domain::Hotel, "area", Vec::<String>::new());
        assert!(s.is_empty());
    }

    #[test]
    fn accepts_scalar_or_list_values() {
        let s: DialogueState =
            serde_json::from_str(r#"{"restaurant":{"area":"centre","food":["indian","thai"]}}"#)
                .unwrap();
        assert_eq!(s.first(Domain::Restaurant, "area"), Some("centre"));
        assert_eq!(s.get(Domain::Restaurant, "food").unwrap().len(), 2);
        let back = serde_json::to_string(&s).unwrap();
        assert_eq!(back, r#"{"restaurant":{"area":["centre"],"food":["indian","thai"]}}"#);
    }

    #[test]
    fn projection_keeps_one_domain() {
        let mut s = DialogueState::new();
        s.set(Domain::Restaurant, "area", "centre");
        s.set(Domain::Attraction, "type", "college");
        let p = s.project(Domain::Attraction);
        assert_eq!(p.domains().collect::<Vec<_>>(), vec![Domain::Attraction]);
        assert!(s.project(Domain::Taxi).is_empty());
    }
}
