use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A MultiWOZ service. Hospital and police are parsed but never tracked,
/// orchestrated or evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Restaurant,
    Hotel,
    Attraction,
    Train,
    Taxi,
    Hospital,
    Police,
}

impl Domain {
    pub const ALL: [Domain; 7] = [
        Domain::Restaurant,
        Domain::Hotel,
        Domain::Attraction,
        Domain::Train,
        Domain::Taxi,
        Domain::Hospital,
        Domain::Police,
    ];

    pub const ACTIVE: [Domain; 5] = [
        Domain::Restaurant,
        Domain::Hotel,
        Domain::Attraction,
        Domain::Train,
        Domain::Taxi,
    ];

    /// Domains with an enumerable venue table that inform/success are scored on.
    pub const VENUE: [Domain; 4] = [
        Domain::Restaurant,
        Domain::Hotel,
        Domain::Attraction,
        Domain::Train,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Restaurant => "restaurant",
            Domain::Hotel => "hotel",
            Domain::Attraction => "attraction",
            Domain::Train => "train",
            Domain::Taxi => "taxi",
            Domain::Hospital => "hospital",
            Domain::Police => "police",
        }
    }

    pub fn is_active(self) -> bool {
        !matches!(self, Domain::Hospital | Domain::Police)
    }

    pub fn is_bookable(self) -> bool {
        matches!(
            self,
            Domain::Restaurant | Domain::Hotel | Domain::Train | Domain::Taxi
        )
    }

    pub fn has_venues(self) -> bool {
        Domain::VENUE.contains(&self)
    }

    /// Noun used in generated text ("restaurants", "trains", ...).
    pub fn plural(self) -> &'static str {
        match self {
            Domain::Restaurant => "restaurants",
            Domain::Hotel => "hotels",
            Domain::Attraction => "attractions",
            Domain::Train => "trains",
            Domain::Taxi => "taxis",
            Domain::Hospital => "departments",
            Domain::Police => "police stations",
        }
    }

    /// Attribute that identifies a venue: `trainid` for trains, `name` elsewhere.
    pub fn name_key(self) -> &'static str {
        match self {
            Domain::Train => "trainid",
            _ => "name",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown domain `{0}`")]
pub struct UnknownDomain(pub String);

impl FromStr for Domain {
    type Err = UnknownDomain;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Domain::ALL
            .iter()
            .copied()
            .find(|d| d.as_str() == lower)
            .ok_or_else(|| UnknownDomain(s.to_string()))
    }
}
