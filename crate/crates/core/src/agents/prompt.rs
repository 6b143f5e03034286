use std::fmt::Write as _;

use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{export_dst, render_context, Corpus, DstExample, ExportMode, Split, Turn};
use crate::delex::Vocabulary;
use crate::domain::Domain;
use crate::kb::VenueSummary;

/// In-context examples given to a prompted state tracker.
pub const DST_EXAMPLE_COUNT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Dst,
    Respond,
}

/// Training-split state examples, grouped per domain, to sample prompts from.
#[derive(Debug, Clone, Default)]
pub struct ExampleBank {
    dst: Vec<DstExample>,
}

impl ExampleBank {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        Self::from_examples(export_dst(corpus, Split::Train, ExportMode::PerDomain))
    }

    pub fn from_examples(dst: Vec<DstExample>) -> Self {
        ExampleBank { dst }
    }

    pub fn len(&self) -> usize {
        self.dst.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dst.is_empty()
    }

    /// Up to [`DST_EXAMPLE_COUNT`] examples for `domain`, drawn without
    /// replacement by a generator seeded with `seed`, in bank order.
    pub fn sample_dst(&self, domain: Domain, seed: u64) -> Vec<&DstExample> {
        let pool: Vec<&DstExample> = self
            .dst
            .iter()
            .filter(|e| e.domain_filter.is_none_or(|d| d == domain))
            .collect();
        let n = DST_EXAMPLE_COUNT.min(pool.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = sample(&mut rng, pool.len(), n).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| pool[i]).collect()
    }
}

/// A prompt split into its fixed sections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub task: Task,
    pub domain: Domain,
    pub instructions: String,
    pub delexicalization: String,
    pub how_to_respond: String,
    pub output_format: String,
    /// `(scenario, examples)` groups.
    pub examples: Vec<(String, Vec<String>)>,
    pub context: String,
    /// Venue digest; empty for state tracking.
    pub venues: String,
}

impl PromptBundle {
    pub fn examples_block(&self) -> String {
        let mut out = String::new();
        for (scenario, items) in &self.examples {
            let _ = writeln!(out, "<{scenario}>");
            for item in items {
                let _ = writeln!(out, "{item}\n");
            }
            let _ = writeln!(out, "</{scenario}>");
        }
        out
    }

    /// System part of the prompt.
    pub fn system_text(&self) -> String {
        format!(
            "<instructions>\n{}\n</instructions>\n\n<Delexicalization>\n{}\n</Delexicalization>\n\n\
             <how to respond>\n{}\n</how to respond>\n\n<output format>\n{}\n</output format>\n\n\
             <examples>\n{}</examples>",
            self.instructions,
            self.delexicalization,
            self.how_to_respond,
            self.output_format,
            self.examples_block()
        )
    }

    /// Per-turn part: the conversation plus, for responses, the venue digest.
    pub fn user_text(&self) -> String {
        if self.venues.is_empty() {
            format!("Conversation:\n{}", self.context)
        } else {
            format!("Conversation:\n{}\n\n{}", self.context, self.venues)
        }
    }

    pub fn render(&self) -> String {
        format!("{}\n\n{}", self.system_text(), self.user_text())
    }
}

/// State keys a tracker may fill, per domain.
fn state_keys(domain: Domain) -> &'static [&'static str] {
    match domain {
        Domain::Restaurant => &[
            "area", "food", "name", "pricerange", "bookday", "bookpeople", "booktime",
        ],
        Domain::Hotel => &[
            "area", "internet", "name", "parking", "pricerange", "stars", "type", "bookday",
            "bookpeople", "bookstay",
        ],
        Domain::Attraction => &["area", "name", "type"],
        Domain::Train => &[
            "arriveby", "day", "departure", "destination", "leaveat", "bookpeople",
        ],
        Domain::Taxi => &["arriveby", "departure", "destination", "leaveat"],
        _ => &[],
    }
}

fn token_section(domain: Domain) -> String {
    let vocab = Vocabulary::bundled();
    let mut out = format!(
        "Replace every {domain} value in your response with its token. The tokens are:\n"
    );
    for spec in vocab.tokens(domain) {
        let _ = writeln!(out, "[{domain}_{}] {}", spec.slot, spec.description);
    }
    out.push_str("Never write a raw venue name, address, phone number or reference number.");
    out
}

fn respond_guidelines(domain: Domain) -> String {
    let noun = domain.as_str();
    let plural = domain.plural();
    let mut rules = vec![
        format!("1. Use only the {plural} listed under the database results; never invent one."),
        format!("2. If no {noun} meets the criteria, say that no {noun} is found and ask the user to change a preference."),
        format!("3. If exactly one {noun} meets the criteria, describe it using its tokens."),
        format!("4. If several {plural} meet the criteria, inform the user about the count with the [{domain}_choice] token and also suggest the listed one with the [{domain}_name] token while asking for a remaining preference."),
        "5. When the user asks for an attribute, give it using the matching token.".to_string(),
    ];
    if domain.is_bookable() {
        rules.push(format!(
            "6. Book only when the user asks to. If booking details are missing, ask for exactly those. Once booked, give the reference with the [{domain}_ref] token."
        ));
    }
    rules.push(format!(
        "{}. When the user says goodbye or thanks without a further request, thank them and end the conversation.",
        rules.len() + 1
    ));
    rules.join("\n")
}

const RESPOND_FORMAT: &str = "Reply with exactly these lines:\n\
Response: <the delexicalized response>\n\
Token_values: [token] - value, [token] - value\n\
Reasoning: <one sentence on why>";

/// Canned examples per scenario for response prompts.
fn respond_examples(domain: Domain) -> Vec<(String, Vec<String>)> {
    let d = domain;
    let (noun, plural) = (d.as_str(), d.plural());
    let (ask, name, attr, attr_value, book_user) = match d {
        Domain::Restaurant => ("what type of food would you like?", "curry garden", "phone", "01223302330", "book a table for 5 people on wednesday at 19:45"),
        Domain::Hotel => ("do you prefer a hotel or a guesthouse?", "worth house", "phone", "01223316074", "book it for 3 people for 2 nights from saturday"),
        Domain::Attraction => ("what type of attraction do you like?", "the fitzwilliam museum", "address", "trumpington street", ""),
        Domain::Train => ("what time would you like to leave?", "tr7075", "price", "23.60 pounds", "book 2 tickets please"),
        _ => ("where would you like to go?", "", "phone", "07218068540", "i need a taxi from the museum to curry garden at 17:00"),
    };
    let name_slot = if d == Domain::Train { "id" } else { "name" };
    let mut groups = Vec::new();
    if d != Domain::Taxi {
        groups.push((
            "suggesting".to_string(),
            vec![format!(
                "USER: i am looking for a {noun} in the centre.\n\
                 Response: there are [{d}_choice] {plural} in the centre. i suggest [{d}_{name_slot}]. {ask}\n\
                 Token_values: [{d}_choice] - 5, [{d}_{name_slot}] - {name}\n\
                 Reasoning: several {plural} match, so suggest one and ask for a preference."
            ), format!(
                "USER: what is the {attr} of [{d}_{name_slot}]?\n\
                 Response: the {attr} of [{d}_{name_slot}] is [{d}_{attr}].\n\
                 Token_values: [{d}_{name_slot}] - {name}, [{d}_{attr}] - {attr_value}\n\
                 Reasoning: the user asked for an attribute."
            )],
        ));
        groups.push((
            "no result found".to_string(),
            vec![format!(
                "USER: i want a {noun} in the west that is free.\n\
                 Response: i am sorry, no {noun} is found that matches. would you like to try another area?\n\
                 Token_values:\n\
                 Reasoning: the database returned no results."
            )],
        ));
    }
    if d.is_bookable() {
        let confirm = match d {
            Domain::Taxi => format!(
                "Response: your taxi is booked. it is a [{d}_type] and the contact number is [{d}_phone].\n\
                 Token_values: [{d}_type] - red toyota, [{d}_phone] - {attr_value}"
            ),
            _ => format!(
                "Response: i have booked [{d}_{name_slot}] for you. your reference number is [{d}_ref].\n\
                 Token_values: [{d}_{name_slot}] - {name}, [{d}_ref] - 9QZ3YHLB"
            ),
        };
        groups.push((
            "booking".to_string(),
            vec![format!("USER: {book_user}.\n{confirm}\nReasoning: all booking details are known.")],
        ));
    }
    groups.push((
        "ending".to_string(),
        vec!["USER: thank you, that is all.\n\
              Response: thank you for contacting us. have a great day!\n\
              Token_values:\n\
              Reasoning: the user ended the conversation."
            .to_string()],
    ));
    groups
}

/// Assembles a prompt. For [`Task::Dst`] the examples are the caller's
/// seeded sample; for [`Task::Respond`] they are the scenario groups and
/// `dst_examples` is ignored.
pub fn build_prompt(
    domain: Domain,
    context: &[Turn],
    summary: &VenueSummary,
    dst_examples: &[&DstExample],
    task: Task,
) -> PromptBundle {
    let context = render_context(context);
    match task {
        Task::Respond => PromptBundle {
            task,
            domain,
            instructions: format!(
                "You are the {domain} agent of a travel information system for Cambridge. \
                 Write the next system turn of the conversation, using the database results \
                 given after the conversation."
            ),
            delexicalization: token_section(domain),
            how_to_respond: respond_guidelines(domain),
            output_format: RESPOND_FORMAT.to_string(),
            examples: respond_examples(domain),
            context,
            venues: summary.render(domain),
        },
        Task::Dst => {
            let keys = state_keys(domain);
            let examples = dst_examples
                .iter()
                .map(|e| {
                    let state = e
                        .target_state
                        .slots(domain)
                        .map(|s| serde_json::to_string(s).expect("state serializes"))
                        .unwrap_or_else(|| "{}".to_string());
                    format!("{}\nState: {state}", e.context)
                })
                .collect();
            PromptBundle {
                task,
                domain,
                instructions: format!(
                    "You track the {domain} part of the dialogue state. Read the conversation \
                     and list every {domain} slot the user has constrained so far."
                ),
                delexicalization: format!("Allowed slots: {}", keys.join(", ")),
                how_to_respond: "Use values as the user expressed them, lowercased. Use \
                                 \"dontcare\" when the user has no preference. Omit slots \
                                 the user has not mentioned."
                    .to_string(),
                output_format: "Reply with one line: State: {\"slot\": [\"value\"], ...}"
                    .to_string(),
                examples: vec![("state tracking".to_string(), examples)],
                context,
                venues: String::new(),
            }
        }
    }
}
