//! Mention statistics of a corpus file, or of a corpus with the reference
//! PET v1.1 counts when no file is given.
//!
//! ```text
//! cargo run --example corpus_stats -- data/pet.jsonl
//! ```

use anyhow::Result;
use proc2bpmn::corpus::{corpus_stats, load_corpus, CorpusFormat, MentionType};
use proc2bpmn::synth::count_matched_corpus;

fn main() -> Result<()> {
    let corpus = match std::env::args().nth(1) {
        Some(path) => load_corpus(path, CorpusFormat::Auto)?,
        None => {
            use MentionType::*;
            count_matched_corpus(
                45,
                417,
                &[
                    (Actor, 449),
                    (Activity, 502),
                    (ActivityData, 459),
                    (XorGateway, 117),
                    (FurtherSpecification, 64),
                    (ConditionSpecification, 80),
                    (AndGateway, 8),
                ],
            )?
        }
    };
    print!("{}", corpus_stats(&corpus)?);
    Ok(())
}
