//! IOB view over mention spans.

use super::{Document, IobTag, Span};
use crate::error::{Error, Result};

/// Per-sentence IOB tags for a document's mentions.
pub fn encode_iob(document: &Document) -> Result<Vec<Vec<IobTag>>> {
    let mut tags: Vec<Vec<IobTag>> = document
        .sentence_ranges()
        .into_iter()
        .map(|r| vec![IobTag::O; r.len()])
        .collect();
    let mut owner: Vec<Vec<Option<usize>>> = tags.iter().map(|s| vec![None; s.len()]).collect();
    for m in &document.mentions {
        let sentence = tags
            .get_mut(m.sentence_id)
            .ok_or_else(|| Error::invariant(&document.name, "mention outside document"))?;
        if m.token_end >= sentence.len() || m.token_start > m.token_end {
            return Err(Error::invariant(&document.name, "mention outside sentence"));
        }
        for i in m.token_start..=m.token_end {
            if let Some(other) = owner[m.sentence_id][i] {
                return Err(Error::Overlap {
                    document: document.name.clone(),
                    first: other,
                    second: m.mention_id,
                });
            }
            owner[m.sentence_id][i] = Some(m.mention_id);
            sentence[i] = if i == m.token_start {
                IobTag::B(m.mention_type)
            } else {
                IobTag::I(m.mention_type)
            };
        }
    }
    Ok(tags)
}

/// Decodes per-sentence tags into spans.
///
/// Maximal `B-X I-X*` runs become spans. A stray `I-X` (at sentence start,
/// after `O`, or after a run of another type) opens a new span as if it were
/// `B-X`, so every tag sequence decodes.
pub fn decode_iob<S: AsRef<[IobTag]>>(tags: &[S]) -> Vec<Span> {
    let mut spans = Vec::new();
    for (sentence_id, sentence) in tags.iter().enumerate() {
        let mut open: Option<Span> = None;
        for (i, &tag) in sentence.as_ref().iter().enumerate() {
            let continues = match (tag, &open) {
                (IobTag::I(t), Some(run)) => run.mention_type == t,
                _ => false,
            };
            if continues {
                if let Some(run) = open.as_mut() {
                    run.end = i;
                }
                continue;
            }
            spans.extend(open.take());
            if let Some(t) = tag.mention_type() {
                open = Some(Span {
                    sentence_id,
                    start: i,
                    end: i,
                    mention_type: t,
                });
            }
        }
        spans.extend(open);
    }
    spans
}

/// Parses per-sentence tag strings.
pub fn parse_tags<S: AsRef<str>>(tags: &[Vec<S>]) -> Result<Vec<Vec<IobTag>>> {
    tags.iter()
        .map(|s| s.iter().map(|t| t.as_ref().parse()).collect())
        .collect()
}
