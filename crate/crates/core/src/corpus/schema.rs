use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::raw::RawService;
use crate::domain::Domain;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDef {
    pub key: String,
    pub categorical: bool,
    /// Allowed values; empty for free-form slots.
    pub allowed: Vec<String>,
}

/// Per-domain slot catalogue.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    domains: BTreeMap<Domain, Vec<SlotDef>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("categorical slot `{domain}-{key}` has no possible values")]
pub struct EmptyCategorical {
    pub domain: Domain,
    pub key: String,
}

impl Schema {
    pub fn from_raw(services: &[RawService]) -> Result<Self, EmptyCategorical> {
        let mut domains: BTreeMap<Domain, Vec<SlotDef>> = BTreeMap::new();
        for service in services {
            let Ok(domain) = service.service_name.parse::<Domain>() else {
                log::debug!("skipping unsupported service `{}`", service.service_name);
                continue;
            };
            let slots = domains.entry(domain).or_default();
            for slot in &service.slots {
                let key = split_slot_name(&slot.name)
                    .map(|(_, k)| k.to_string())
                    .unwrap_or_else(|| slot.name.clone());
                if slot.is_categorical && slot.possible_values.is_empty() {
                    return Err(EmptyCategorical { domain, key });
                }
                slots.push(SlotDef {
                    key,
                    categorical: slot.is_categorical,
                    allowed: slot.possible_values.clone(),
                });
            }
        }
        Ok(Schema { domains })
    }

    pub fn slots(&self, domain: Domain) -> &[SlotDef] {
        self.domains.get(&domain).map_or(&[], Vec::as_slice)
    }

    pub fn slot(&self, domain: Domain, key: &str) -> Option<&SlotDef> {
        self.slots(domain).iter().find(|s| s.key == key)
    }

    pub fn has_slot(&self, domain: Domain, key: &str) -> bool {
        self.slot(domain, key).is_some()
    }

    pub fn domains(&self) -> impl Iterator<Item = Domain> + '_ {
        self.domains.keys().copied()
    }
}

/// Splits `"restaurant-area"` into its domain and key.
pub fn split_slot_name(name: &str) -> Option<(Domain, &str)> {
    let (d, k) = name.split_once('-')?;
    Some((d.parse().ok()?, k))
}

/// Maps the assorted key spellings found in acts, goal annotations and
/// database files onto schema keys.
pub fn canonical_key(domain: Domain, raw: &str) -> String {
    let k: String = raw
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .collect();
    let mapped = match (domain, k.as_str()) {
        (Domain::Train, "id") => "trainid",
        (_, "addr") => "address",
        (_, "post") => "postcode",
        (_, "reference") => "ref",
        (_, "fee") => "entrancefee",
        (_, "open") => "openhours",
        (Domain::Taxi, "car" | "cartype") => "type",
        (Domain::Train, "ticket") => "price",
        (_, "arrive") => "arriveby",
        (_, "leave") => "leaveat",
        (_, "depart") => "departure",
        (_, "dest") => "destination",
        _ => return k,
    };
    mapped.to_string()
}
