//! Venue database: constraint queries, venue digests for agent context, and
//! booking references.

mod booking;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use booking::{book, required_booking_fields, BookingRecord};

use crate::corpus::canonical_key;
use crate::domain::Domain;
use crate::dst::{DialogueState, FuzzyMatcher};

/// Free-text fields of the distributed database files that are not venue attributes.
const DROPPED_FIELDS: [&str; 4] = ["introduction", "signature", "location", "n"];

const BUNDLED: [(Domain, &str); 4] = [
    (Domain::Restaurant, include_str!("../../data/db/restaurant_db.json")),
    (Domain::Hotel, include_str!("../../data/db/hotel_db.json")),
    (Domain::Attraction, include_str!("../../data/db/attraction_db.json")),
    (Domain::Train, include_str!("../../data/db/train_db.json")),
];
const BUNDLED_TAXI: &str = include_str!("../../data/db/taxi_db.json");

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("no venue table for domain `{0}`")]
    NoTable(Domain),
    #[error("taxi has no enumerable venue table")]
    NotEnumerable,
    #[error("unknown constraint key `{key}` for domain `{domain}`")]
    UnknownKey { domain: Domain, key: String },
    #[error("domain `{0}` does not take bookings")]
    NotBookable(Domain),
    #[error("booking is missing fields: {}", missing.join(", "))]
    IncompleteBooking { missing: Vec<String> },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid database file {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Venue {
    pub domain: Domain,
    pub id: String,
    pub attributes: BTreeMap<String, String>,
}

impl Venue {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.attributes.get(key).map(String::as_str)
    }

    /// Name, or train id for trains.
    pub fn name(&self) -> Option<&str> {
        self.get(self.domain.name_key())
    }
}

/// Count of matching venues plus the first match, as injected into agent context.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VenueSummary {
    pub count: usize,
    pub sample: Option<Venue>,
}

impl VenueSummary {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Block in the layout the response agents are given:
    ///
    /// ```text
    /// Number of restaurants that meet the user's criteria: 33
    /// One of them is the following:
    ///   <restaurant>
    ///    address - 106 Regent Street City Centre
    ///    ...
    ///   </restaurant>
    /// ```
    pub fn render(&self, domain: Domain) -> String {
        let mut out = format!(
            "Number of {} that meet the user's criteria: {}",
            domain.plural(),
            self.count
        );
        if let Some(v) = &self.sample {
            out.push_str("\nOne of them is the following:\n");
            out.push_str(&format!("  <{domain}>\n"));
            for (k, val) in &v.attributes {
                out.push_str(&format!("   {k} - {val}\n"));
            }
            out.push_str(&format!("  </{domain}>"));
        }
        out
    }
}

pub type Constraints = BTreeMap<String, String>;

#[derive(Debug, Clone)]
struct Row {
    venue: Venue,
    normalized: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct TaxiSpec {
    #[serde(default)]
    taxi_colors: Vec<String>,
    #[serde(default)]
    taxi_types: Vec<String>,
}

/// Immutable per-domain venue tables.
#[derive(Debug, Clone)]
pub struct Database {
    tables: BTreeMap<Domain, Vec<Row>>,
    keys: BTreeMap<Domain, BTreeSet<String>>,
    taxi: TaxiSpec,
    matcher: FuzzyMatcher<'static>,
}

impl Database {
    /// The database files shipped with this crate.
    pub fn bundled() -> Database {
        let mut tables = BTreeMap::new();
        for (domain, json) in BUNDLED {
            let raw: Vec<serde_json::Value> =
                serde_json::from_str(json).expect("bundled database is valid JSON");
            tables.insert(domain, raw);
        }
        let taxi = serde_json::from_str(BUNDLED_TAXI).expect("bundled taxi spec");
        Database::build(tables, taxi)
    }

    /// Reads `<domain>_db.json` files from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Database, KbError> {
        let dir = dir.as_ref();
        let mut tables = BTreeMap::new();
        for domain in Domain::VENUE {
            let path = dir.join(format!("{domain}_db.json"));
            tables.insert(domain, read_json(&path)?);
        }
        let taxi_path = dir.join("taxi_db.json");
        let taxi = if taxi_path.exists() {
            read_json(&taxi_path)?
        } else {
            TaxiSpec::default()
        };
        Ok(Database::build(tables, taxi))
    }

    /// `<root>/db` when the corpus directory carries one, else the bundled files.
    pub fn for_corpus(root: impl AsRef<Path>) -> Result<Database, KbError> {
        let dir = root.as_ref().join("db");
        if dir.join("restaurant_db.json").exists() {
            Database::load_dir(dir)
        } else {
            Ok(Database::bundled())
        }
    }

    fn build(raw: BTreeMap<Domain, Vec<serde_json::Value>>, taxi: TaxiSpec) -> Database {
        let matcher = FuzzyMatcher::default();
        let mut tables = BTreeMap::new();
        let mut keys = BTreeMap::new();
        for (domain, records) in raw {
            let mut rows: Vec<Row> = records
                .iter()
                .filter_map(|r| r.as_object())
                .map(|obj| {
                    let mut attributes = BTreeMap::new();
                    for (k, v) in obj {
                        if DROPPED_FIELDS.contains(&k.as_str()) {
                            continue;
                        }
                        let value = match v {
                            serde_json::Value::String(s) => s.clone(),
                            serde_json::Value::Number(n) => n.to_string(),
                            _ => continue,
                        };
                        attributes.insert(canonical_key(domain, k), value);
                    }
                    let id = attributes
                        .get("id")
                        .or_else(|| attributes.get("trainid"))
                        .cloned()
                        .unwrap_or_default();
                    let normalized = attributes
                        .iter()
                        .map(|(k, v)| (k.clone(), matcher.normalize(v)))
                        .collect();
                    Row {
                        venue: Venue {
                            domain,
                            id,
                            attributes,
                        },
                        normalized,
                    }
                })
                .collect();
            rows.sort_by(|a, b| venue_order(&a.venue, &b.venue));
            let table_keys = rows
                .iter()
                .flat_map(|r| r.venue.attributes.keys().cloned())
                .collect();
            keys.insert(domain, table_keys);
            tables.insert(domain, rows);
        }
        Database {
            tables,
            keys,
            taxi,
            matcher,
        }
    }

    /// Uses `threshold` for attribute comparisons.
    pub fn with_fuzzy_threshold(mut self, threshold: f64) -> Self {
        self.matcher = FuzzyMatcher::new(threshold);
        self
    }

    pub fn domains(&self) -> impl Iterator<Item = Domain> + '_ {
        self.tables.keys().copied()
    }

    pub fn table(&self, domain: Domain) -> Result<impl Iterator<Item = &Venue> + '_, KbError> {
        Ok(self.rows(domain)?.iter().map(|r| &r.venue))
    }

    pub fn attribute_keys(&self, domain: Domain) -> Option<&BTreeSet<String>> {
        self.keys.get(&domain)
    }

    fn rows(&self, domain: Domain) -> Result<&[Row], KbError> {
        if domain == Domain::Taxi {
            return Err(KbError::NotEnumerable);
        }
        self.tables
            .get(&domain)
            .map(Vec::as_slice)
            .ok_or(KbError::NoTable(domain))
    }

    /// Venues whose attributes satisfy every constraint, ordered by id then
    /// name. `dontcare` constraints are ignored; for trains `leaveat` and
    /// `arriveby` are lower and upper bounds.
    pub fn query(&self, domain: Domain, constraints: &Constraints) -> Result<Vec<Venue>, KbError> {
        Ok(self
            .matching_rows(domain, constraints)?
            .map(|r| r.venue.clone())
            .collect())
    }

    pub fn count(&self, domain: Domain, constraints: &Constraints) -> Result<usize, KbError> {
        Ok(self.matching_rows(domain, constraints)?.count())
    }

    fn matching_rows<'a>(
        &'a self,
        domain: Domain,
        constraints: &Constraints,
    ) -> Result<impl Iterator<Item = &'a Row> + 'a, KbError> {
        let rows = self.rows(domain)?;
        let known = &self.keys[&domain];
        let mut prepared = Vec::with_capacity(constraints.len());
        for (k, v) in constraints {
            if !known.contains(k) {
                return Err(KbError::UnknownKey {
                    domain,
                    key: k.clone(),
                });
            }
            let nv = self.matcher.normalize(v);
            if nv == "dontcare" || nv.is_empty() {
                continue;
            }
            prepared.push((k.clone(), nv));
        }
        let matcher = self.matcher;
        Ok(rows.iter().filter(move |row| {
            prepared.iter().all(|(k, nv)| {
                let Some(have) = row.normalized.get(k) else {
                    return false;
                };
                match (domain, k.as_str()) {
                    (Domain::Train, "leaveat") if is_clock(nv) && is_clock(have) => {
                        have.as_str() >= nv.as_str()
                    }
                    (Domain::Train, "arriveby") if is_clock(nv) && is_clock(have) => {
                        have.as_str() <= nv.as_str()
                    }
                    _ => matcher.matches_normalized(have, nv),
                }
            })
        }))
    }

    pub fn venue_summary(
        &self,
        domain: Domain,
        constraints: &Constraints,
    ) -> Result<VenueSummary, KbError> {
        let mut it = self.matching_rows(domain, constraints)?;
        let sample = it.next().map(|r| r.venue.clone());
        let count = sample.is_some() as usize + it.count();
        Ok(VenueSummary { count, sample })
    }

    /// Query constraints from the state's slots that are attributes of the
    /// domain's table.
    pub fn constraints_from_state(&self, domain: Domain, state: &DialogueState) -> Constraints {
        let Some(known) = self.keys.get(&domain) else {
            return Constraints::new();
        };
        state
            .slots(domain)
            .into_iter()
            .flatten()
            .filter(|(k, _)| known.contains(*k) && !k.starts_with("book"))
            .filter_map(|(k, v)| Some((k.clone(), v.first()?.clone())))
            .collect()
    }

    /// Venues whose name (train id for trains) fuzzily matches `name`.
    pub fn find_by_name(&self, domain: Domain, name: &str) -> Vec<Venue> {
        let Ok(rows) = self.rows(domain) else {
            return Vec::new();
        };
        let key = domain.name_key();
        let n = self.matcher.normalize(name);
        rows.iter()
            .filter(|r| {
                r.normalized
                    .get(key)
                    .is_some_and(|have| self.matcher.matches_normalized(have, &n))
            })
            .map(|r| r.venue.clone())
            .collect()
    }

    /// A taxi "venue" (car and contact number) drawn from the taxi attribute
    /// ranges with an RNG keyed by the dialogue id.
    pub fn synthesize_taxi(&self, dialogue_id: &str) -> Venue {
        let digest = Sha256::digest(dialogue_id.as_bytes());
        let seed = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |rng: &mut ChaCha8Rng, xs: &[String], fallback: &str| -> String {
            if xs.is_empty() {
                fallback.to_string()
            } else {
                xs[rng.random_range(0..xs.len())].clone()
            }
        };
        let color = pick(&mut rng, &self.taxi.taxi_colors, "black");
        let car = pick(&mut rng, &self.taxi.taxi_types, "toyota");
        let phone: String = std::iter::once("07".to_string())
            .chain((0..8).map(|_| rng.random_range(0..10u8).to_string()))
            .collect();
        let mut attributes = BTreeMap::new();
        attributes.insert("type".to_string(), format!("{color} {car}"));
        attributes.insert("phone".to_string(), phone);
        Venue {
            domain: Domain::Taxi,
            id: format!("taxi-{}", hex_prefix(&digest)),
            attributes,
        }
    }
}

fn hex_prefix(digest: &[u8]) -> String {
    digest[..4].iter().map(|b| format!("{b:02x}")).collect()
}

fn is_clock(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 5 && b[2] == b':' && b[..2].iter().chain(&b[3..]).all(u8::is_ascii_digit)
}

/// Numeric ids compare numerically, anything else lexicographically; name breaks ties.
fn venue_order(a: &Venue, b: &Venue) -> Ordering {
    let by_id = match (a.id.parse::<u64>(), b.id.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.id.cmp(&b.id),
    };
    by_id.then_with(|| a.name().cmp(&b.name()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, KbError> {
    let text = fs::read_to_string(path).map_err(|source| KbError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| KbError::Json {
        path: path.to_path_buf(),
        source,
    })
}
