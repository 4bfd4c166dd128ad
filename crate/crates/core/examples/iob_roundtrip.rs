//! Encodes the mentions of a small document as IOB tags and decodes them
//! back.

use anyhow::Result;
use proc2bpmn::corpus::{decode_iob, encode_iob, Document, MentionType, Span};

fn main() -> Result<()> {
    let text = [
        "The clerk checks the invoice .",
        "If the amount exceeds the limit , the manager approves it .",
    ];
    let mut doc = Document::from_sentences(
        "example",
        text.iter()
            .map(|s| s.split(' ').map(|w| (w.to_string(), String::new())).collect::<Vec<_>>()),
    );
    let span = |sentence_id, start, end, mention_type| Span {
        sentence_id,
        start,
        end,
        mention_type,
    };
    doc.set_spans(vec![
        span(0, 0, 1, MentionType::Actor),
        span(0, 2, 2, MentionType::Activity),
        span(0, 3, 4, MentionType::ActivityData),
        span(1, 0, 0, MentionType::XorGateway),
        span(1, 1, 5, MentionType::ConditionSpecification),
        span(1, 7, 8, MentionType::Actor),
        span(1, 9, 9, MentionType::Activity),
    ]);
    doc.validate()?;

    let tags = encode_iob(&doc)?;
    for (sentence, tags) in doc.sentences().iter().zip(&tags) {
        for (tok, tag) in sentence.iter().zip(tags) {
            println!("{:<10} {tag}", tok.text);
        }
        println!();
    }

    let decoded = decode_iob(&tags);
    let original: Vec<Span> = doc.mentions.iter().map(|m| m.span()).collect();
    assert_eq!(decoded, original);
    for m in &doc.mentions {
        println!("{:<24} {}", m.mention_type.name(), m.text);
    }
    Ok(())
}
