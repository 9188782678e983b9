#![allow(dead_code)]

use std::path::PathBuf;

use spmiti_core::kb::load_kb;
use spmiti_core::model::load_model;
use spmiti_core::{ApplicationModel, KnowledgeBase};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn catalog_kb() -> KnowledgeBase {
    load_kb(fixture("kb_catalog.json")).expect("kb fixture loads")
}

pub fn fig_tree(kb: &KnowledgeBase) -> ApplicationModel {
    load_model(fixture("fig_tree.json"), kb).expect("fig fixture loads")
}
