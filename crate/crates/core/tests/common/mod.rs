#![allow(dead_code, unused_imports)]

use proc2bpmn::corpus::{Document, MentionType, Relation, RelationType, Span};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "the", "clerk", "checks", "form", "and", "then", "if", "it", "is", "valid", "manager", "signs",
    "order", "he", "she", "sends", "report", "to", "customer", "simultaneously", "files", "claim",
];

/// A document with random tokens, non-overlapping random mentions and
/// random relations among them.
pub fn random_document(seed: u64, name: &str) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentences = rng.gen_range(1..=4);
    let mut toks = Vec::new();
    let mut spans = Vec::new();
    for s in 0..sentences {
        let len = rng.gen_range(1..=12);
        toks.push(
            (0..len)
                .map(|_| (WORDS.choose(&mut rng).unwrap().to_string(), String::new()))
                .collect::<Vec<_>>(),
        );
        let mut i = 0;
        while i < len {
            if rng.gen_bool(0.4) {
                let end = (i + rng.gen_range(0..3)).min(len - 1);
                spans.push(Span {
                    sentence_id: s,
                    start: i,
                    end,
                    mention_type: *MentionType::ALL.choose(&mut rng).unwrap(),
                });
                i = end + 1;
            } else {
                i += 1;
            }
        }
    }
    let mut doc = Document::from_sentences(name, toks);
    doc.set_spans(spans);
    let n = doc.mentions.len();
    if n >= 2 {
        let mut rels = Vec::new();
        for _ in 0..rng.gen_range(0..2 * n) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                rels.push(Relation {
                    source: a,
                    target: b,
                    relation_type: *RelationType::GOLD.choose(&mut rng).unwrap(),
                });
            }
        }
        rels.sort();
        rels.dedup_by_key(|r| (r.source, r.target));
        doc.relations = rels;
    }
    doc
}

pub mod crf;
pub mod graph;
pub mod pipeline_counts;

/// The library lending description used for end-to-end extraction.
pub const LIBRARY: &str = "When a request for a book comes in, the library staff member consults \
the digital catalog to check for the book's availability. If the book is currently on loan or \
not in the library's collection, the staff member informs the requester right away. If the book \
is available, the staff member starts the checkout procedure by logging the book against the \
requester's library account and simultaneously retrieving the book using the automated system.";
