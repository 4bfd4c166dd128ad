use std::collections::HashMap;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{encode_iob, Document, Mention, MentionType, RelationType};
use crate::error::{Error, Result};

pub const NONE: &str = "NONE";

/// Which token of a mention span stands for the mention.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadSelection {
    First,
    #[default]
    Last,
}

impl FromStr for HeadSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(HeadSelection::First),
            "last" => Ok(HeadSelection::Last),
            other => Err(Error::Config(format!("relex.head must be first|last, got `{other}`"))),
        }
    }
}

/// Reading of the "previous and next tag" frame columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborReading {
    /// Types of the neighboring mentions in document order.
    #[default]
    Mention,
    /// IOB tags of the tokens just outside the span.
    Iob,
    /// POS tags of the tokens just outside the span.
    Pos,
}

impl FromStr for NeighborReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mention" => Ok(NeighborReading::Mention),
            "iob" => Ok(NeighborReading::Iob),
            "pos" => Ok(NeighborReading::Pos),
            other => Err(Error::Config(format!(
                "relex.neighbors must be mention|iob|pos, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameConfig {
    pub head: HeadSelection,
    pub neighbors: NeighborReading,
}

/// One end of a mention pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MentionSide {
    /// Lowercased head token.
    pub token: String,
    pub mention_type: MentionType,
    pub pos: String,
    pub sentence_id: usize,
    /// Within-sentence index of the head token.
    pub token_id: usize,
    pub prev: String,
    pub next: String,
}

/// Feature row for an ordered mention pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MentionPairFrame {
    pub source_id: usize,
    pub target_id: usize,
    pub source: MentionSide,
    pub target: MentionSide,
    /// Target head global index minus source head global index.
    pub token_distance: i64,
    pub sentence_distance: i64,
    pub dependency: String,
    pub label: RelationType,
}

struct Prepared<'a> {
    doc: &'a Document,
    offsets: Vec<usize>,
    iob: Vec<Vec<String>>,
}

impl<'a> Prepared<'a> {
    fn new(doc: &'a Document) -> Self {
        let offsets = doc.sentence_ranges().into_iter().map(|r| r.start).collect();
        let iob = encode_iob(doc)
            .map(|tags| {
                tags.into_iter()
                    .map(|s| s.into_iter().map(|t| t.to_string()).collect())
                    .collect()
            })
            .unwrap_or_default();
        Prepared { doc, offsets, iob }
    }

    fn head(&self, m: &Mention, head: HeadSelection) -> usize {
        let within = match head {
            HeadSelection::First => m.token_start,
            HeadSelection::Last => m.token_end,
        };
        self.offsets[m.sentence_id] + within
    }

    fn neighbor_token(&self, m: &Mention, before: bool, reading: NeighborReading) -> String {
        let sentence_len = self
            .doc
            .sentence_ranges()
            .get(m.sentence_id)
            .map_or(0, |r| r.len());
        let idx = if before {
            m.token_start.checked_sub(1)
        } else {
            Some(m.token_end + 1).filter(|&i| i < sentence_len)
        };
        let Some(i) = idx else {
            return NONE.to_string();
        };
        match reading {
            NeighborReading::Iob => self
                .iob
                .get(m.sentence_id)
                .and_then(|s| s.get(i))
                .cloned()
                .unwrap_or_else(|| NONE.to_string()),
            _ => {
                let pos = &self.doc.tokens[self.offsets[m.sentence_id] + i].pos;
                if pos.is_empty() {
                    NONE.to_string()
                } else {
                    pos.clone()
                }
            }
        }
    }
}

/// Frames for all ordered pairs `(a, b)`, `a != b`, of the given mentions.
///
/// Mentions may differ from the document's gold mentions; a pair is labeled
/// with the gold relation between the gold mentions that have exactly the
/// same spans and types, and `NoRelation` otherwise. Frames come out in
/// document order of (source, target), independent of the order of
/// `mentions`.
pub fn build_pair_frames(
    document: &Document,
    mentions: &[Mention],
    cfg: &FrameConfig,
) -> Vec<MentionPairFrame> {
    let prep = Prepared::new(document);
    let mut ordered: Vec<&Mention> = mentions.iter().collect();
    ordered.sort_by_key(|m| (m.span(), m.mention_id));

    let gold_by_span: HashMap<_, usize> = document
        .mentions
        .iter()
        .map(|m| (m.span(), m.mention_id))
        .collect();
    let gold_relations: HashMap<(usize, usize), RelationType> = document
        .relations
        .iter()
        .map(|r| ((r.source, r.target), r.relation_type))
        .collect();

    let sides: Vec<(MentionSide, usize)> = ordered
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let head = prep.head(m, cfg.head);
            let tok = &document.tokens[head];
            let (prev, next) = match cfg.neighbors {
                NeighborReading::Mention => (
                    i.checked_sub(1)
                        .map_or(NONE.to_string(), |j| ordered[j].mention_type.to_string()),
                    ordered
                        .get(i + 1)
                        .map_or(NONE.to_string(), |n| n.mention_type.to_string()),
                ),
                reading => (
                    prep.neighbor_token(m, true, reading),
                    prep.neighbor_token(m, false, reading),
                ),
            };
            let side = MentionSide {
                token: tok.text.to_lowercase(),
                mention_type: m.mention_type,
                pos: if tok.pos.is_empty() {
                    NONE.to_string()
                } else {
                    tok.pos.clone()
                },
                sentence_id: m.sentence_id,
                token_id: tok.token_id,
                prev,
                next,
            };
            (side, head)
        })
        .collect();

    let mut frames = Vec::with_capacity(ordered.len() * ordered.len().saturating_sub(1));
    for (i, a) in ordered.iter().enumerate() {
        for (j, b) in ordered.iter().enumerate() {
            if i == j {
                continue;
            }
            let (src, src_head) = &sides[i];
            let (tgt, tgt_head) = &sides[j];
            let label = gold_by_span
                .get(&a.span())
                .zip(gold_by_span.get(&b.span()))
                .and_then(|(ga, gb)| gold_relations.get(&(*ga, *gb)).copied())
                .unwrap_or(RelationType::NoRelation);
            let dependency = match (
                &document.tokens[*src_head].dep,
                &document.tokens[*tgt_head].dep,
            ) {
                (None, None) => NONE.to_string(),
                (s, t) => format!(
                    "{}>{}",
                    s.as_deref().unwrap_or(NONE),
                    t.as_deref().unwrap_or(NONE)
                ),
            };
            frames.push(MentionPairFrame {
                source_id: a.mention_id,
                target_id: b.mention_id,
                source: src.clone(),
                target: tgt.clone(),
                token_distance: *tgt_head as i64 - *src_head as i64,
                sentence_distance: b.sentence_id as i64 - a.sentence_id as i64,
                dependency,
                label,
            });
        }
    }
    frames
}

/// Column order of [`write_frames_csv`].
pub const CSV_COLUMNS: [&str; 20] = [
    "source_id",
    "target_id",
    "source_token",
    "source_type",
    "source_pos",
    "source_sentence_id",
    "source_token_id",
    "source_prev",
    "source_next",
    "target_token",
    "target_type",
    "target_pos",
    "target_sentence_id",
    "target_token_id",
    "target_prev",
    "target_next",
    "token_distance",
    "sentence_distance",
    "dependency",
    "label",
];

/// Writes frames as CSV, header first, columns as in [`CSV_COLUMNS`].
/// `document` is prepended as an extra first column when given.
pub fn write_frames_csv<W: Write>(
    out: W,
    frames: &[(String, MentionPairFrame)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    let mut header = vec!["document"];
    header.extend(CSV_COLUMNS);
    w.write_record(&header).map_err(csv_err)?;
    for (doc, f) in frames {
        let row = [
            doc.clone(),
            f.source_id.to_string(),
            f.target_id.to_string(),
            f.source.token.clone(),
            f.source.mention_type.to_string(),
            f.source.pos.clone(),
            f.source.sentence_id.to_string(),
            f.source.token_id.to_string(),
            f.source.prev.clone(),
            f.source.next.clone(),
            f.target.token.clone(),
            f.target.mention_type.to_string(),
            f.target.pos.clone(),
            f.target.sentence_id.to_string(),
            f.target.token_id.to_string(),
            f.target.prev.clone(),
            f.target.next.clone(),
            f.token_distance.to_string(),
            f.sentence_distance.to_string(),
            f.dependency.clone(),
            f.label.to_string(),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Relation, Span};

    fn doc(n_mentions: usize) -> Document {
        let words: Vec<(String, String)> = (0..n_mentions * 2)
            .map(|i| (format!("w{i}"), "NN".to_string()))
            .collect();
        let mut d = Document::from_sentences("d", [words]);
        d.set_spans(
            (0..n_mentions)
                .map(|i| Span {
                    sentence_id: 0,
                    start: 2 * i,
                    end: 2 * i,
                    mention_type: MentionType::Activity,
                })
                .collect(),
        );
        d
    }

    #[test]
    fn pair_counts() {
        let d = doc(2);
        assert_eq!(build_pair_frames(&d, &d.mentions, &FrameConfig::default()).len(), 2);
        let d = doc(5);
        assert_eq!(build_pair_frames(&d, &d.mentions, &FrameConfig::default()).len(), 20);
        let d = doc(1);
        assert!(build_pair_frames(&d, &d.mentions, &FrameConfig::default()).is_empty());
    }

    #[test]
    fn labels_are_directional() {
        let mut d = doc(2);
        d.relations.push(Relation {
            source: 0,
            target: 1,
            relation_type: RelationType::Flow,
        });
        let frames = build_pair_frames(&d, &d.mentions, &FrameConfig::default());
        let f01 = frames.iter().find(|f| f.source_id == 0).unwrap();
        let f10 = frames.iter().find(|f| f.source_id == 1).unwrap();
        assert_eq!(f01.label, RelationType::Flow);
        assert_eq!(f10.label, RelationType::NoRelation);
        assert_eq!(f01.token_distance, 2);
        assert_eq!(f10.token_distance, -2);
        assert_eq!(f01.source.prev, NONE);
        assert_eq!(f01.source.next, "Activity");
        assert_eq!(f01.dependency, NONE);
    }

    #[test]
    fn head_selection() {
        let mut d = Document::from_sentences(
            "d",
            [vec![
                ("check".to_string(), "VB".to_string()),
                ("invoice".to_string(), "NN".to_string()),
                ("then".to_string(), "RB".to_string()),
            ]],
        );
        d.set_spans(vec![
            Span {
                sentence_id: 0,
                start: 0,
                end: 1,
                mention_type: MentionType::Activity,
            },
            Span {
                sentence_id: 0,
                start: 2,
                end: 2,
                mention_type: MentionType::Activity,
            },
        ]);
        let last = build_pair_frames(&d, &d.mentions, &FrameConfig::default());
        assert_eq!(last[0].source.token, "invoice");
        assert_eq!(last[0].token_distance, 1);
        let cfg = FrameConfig {
            head: HeadSelection::First,
            neighbors: NeighborReading::Pos,
        };
        let first = build_pair_frames(&d, &d.mentions, &cfg);
        assert_eq!(first[0].source.token, "check");
        assert_eq!(first[0].token_distance, 2);
        assert_eq!(first[0].source.prev, NONE);
        assert_eq!(first[0].source.next, "RB");
    }

    #[test]
    fn csv_has_fixed_header() {
        let d = doc(2);
        let frames: Vec<_> = build_pair_frames(&d, &d.mentions, &FrameConfig::default())
            .into_iter()
            .map(|f| ("d".to_string(), f))
            .collect();
        let mut buf = Vec::new();
        write_frames_csv(&mut buf, &frames).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            format!("document,{}", CSV_COLUMNS.join(","))
        );
        assert_eq!(lines.count(), 2);
    }
}
