use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{KbError, Venue};
use crate::domain::Domain;

const REFERENCE_ALPHABET: &[u8; 36] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
const REFERENCE_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookingRecord {
    pub domain: Domain,
    pub venue_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue_name: Option<String>,
    /// Booking fields as provided (`people`, `day`, `time`, `stay`).
    pub fields: BTreeMap<String, String>,
    pub reference: String,
}

/// Fields a booking needs before it can be confirmed, in the order they are asked for.
pub fn required_booking_fields(domain: Domain) -> Result<&'static [&'static str], KbError> {
    match domain {
        Domain::Restaurant => Ok(&["people", "day", "time"]),
        Domain::Hotel => Ok(&["people", "day", "stay"]),
        Domain::Train => Ok(&["people"]),
        Domain::Taxi => Ok(&[]),
        other => Err(KbError::NotBookable(other)),
    }
}

/// Confirms a booking. The reference depends only on the dialogue id, domain
/// and turn index.
pub fn book(
    dialogue_id: &str,
    domain: Domain,
    venue: &Venue,
    fields: &BTreeMap<String, String>,
    turn_index: usize,
) -> Result<BookingRecord, KbError> {
    let required = required_booking_fields(domain)?;
    let missing: Vec<String> = required
        .iter()
        .filter(|f| fields.get(**f).is_none_or(|v| v.trim().is_empty()))
        .map(|f| f.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(KbError::IncompleteBooking { missing });
    }
    Ok(BookingRecord {
        domain,
        venue_id: venue.id.clone(),
        venue_name: venue.name().map(str::to_string),
        fields: fields.clone(),
        reference: booking_reference(dialogue_id, domain, turn_index),
    })
}

pub(crate) fn booking_reference(dialogue_id: &str, domain: Domain, turn_index: usize) -> String {
    let mut h = Sha256::new();
    h.update(dialogue_id.as_bytes());
    h.update([0x1f]);
    h.update(domain.as_str().as_bytes());
    h.update([0x1f]);
    h.update((turn_index as u64).to_le_bytes());
    let digest = h.finalize();
    digest[..REFERENCE_LEN]
        .iter()
        .map(|b| REFERENCE_ALPHABET[(*b as usize) % REFERENCE_ALPHABET.len()] as char)
        .collect()
}
