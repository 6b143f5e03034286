#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use dard::agents::{ExampleBank, Policy};
use dard::corpus::Corpus;
use dard::kb::Database;
use dard::orchestrator::{Pipeline, Registry};

pub fn fixture_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/multiwoz22")
}

pub fn fixture() -> Corpus {
    Corpus::load(fixture_root()).expect("fixture corpus loads")
}

pub fn template_pipeline(policy: Policy) -> Pipeline {
    Pipeline::build_with_key(
        &Registry::template(policy),
        Arc::new(Database::bundled()),
        Arc::new(ExampleBank::default()),
        None,
    )
    .expect("template registry builds")
}
