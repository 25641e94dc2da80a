//! Command-line front end: argument handling, JSON documents, graph file
//! formats and the persisted memo cache.

pub mod cache;
mod commands;
pub mod document;
pub mod graph_text;

pub use commands::{check_document, run, Outcome, EXIT_BUDGET, EXIT_FAILED, EXIT_MALFORMED, EXIT_OK};
