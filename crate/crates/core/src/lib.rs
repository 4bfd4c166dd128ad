//! Extraction of BPMN process graphs from annotated process descriptions.

pub mod bpmn;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiments;
pub mod ner;
pub mod pipeline;
pub mod preprocess;
pub mod relex;
pub mod resolve;
pub mod synth;

pub use error::{Error, Result};
