//! Multi-agent task-oriented dialogue engine with a MultiWOZ 2.2
//! evaluation harness.

pub mod agents;
pub mod corpus;
pub mod delex;
pub mod domain;
pub mod dst;
pub mod kb;
pub mod metrics;
pub mod orchestrator;

pub use domain::Domain;
pub use dst::{DialogueState, SlotTriple};
