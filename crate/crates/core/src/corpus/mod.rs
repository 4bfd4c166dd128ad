//! Canonical data model for annotated process descriptions.
//!
//! A [`Document`] is a flat token list carrying per-sentence indices, a list
//! of typed mention spans and a list of typed, directed relations between
//! mentions. IOB tags are a serialization view over the mention spans (see
//! [`iob`]); the spans are the primary representation.

pub mod io;
pub mod iob;
pub mod split;
pub mod stats;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use io::{load_corpus, write_jsonl, CorpusFormat};
pub use iob::{decode_iob, encode_iob};
pub use split::kfold_split;
pub use stats::{corpus_stats, StatsTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub pos: String,
    pub sentence_id: usize,
    pub token_id: usize,
    pub global_id: usize,
    /// Dependency label, when the input file carries one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dep: Option<String>,
}

/// The seven mention (entity) types of the BPMN tagset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MentionType {
    Actor,
    Activity,
    ActivityData,
    XorGateway,
    AndGateway,
    FurtherSpecification,
    ConditionSpecification,
}

impl MentionType {
    pub const ALL: [MentionType; 7] = [
        MentionType::Actor,
        MentionType::Activity,
        MentionType::ActivityData,
        MentionType::XorGateway,
        MentionType::AndGateway,
        MentionType::FurtherSpecification,
        MentionType::ConditionSpecification,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MentionType::Actor => "Actor",
            MentionType::Activity => "Activity",
            MentionType::ActivityData => "ActivityData",
            MentionType::XorGateway => "XorGateway",
            MentionType::AndGateway => "AndGateway",
            MentionType::FurtherSpecification => "FurtherSpecification",
            MentionType::ConditionSpecification => "ConditionSpecification",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_gateway(self) -> bool {
        matches!(self, MentionType::XorGateway | MentionType::AndGateway)
    }
}

impl fmt::Display for MentionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MentionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MentionType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// One of the 15 IOB tags: `O`, or `B-`/`I-` combined with a [`MentionType`].
///
/// The enumeration order of [`IobTag::ALL`] is the label index order used by
/// the CRF, and it is the tie-break order of Viterbi decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IobTag {
    O,
    B(MentionType),
    I(MentionType),
}

impl IobTag {
    pub const COUNT: usize = 15;

    pub const ALL: [IobTag; 15] = [
        IobTag::O,
        IobTag::B(MentionType::Actor),
        IobTag::I(MentionType::Actor),
        IobTag::B(MentionType::Activity),
        IobTag::I(MentionType::Activity),
        IobTag::B(MentionType::ActivityData),
        IobTag::I(MentionType::ActivityData),
        IobTag::B(MentionType::XorGateway),
        IobTag::I(MentionType::XorGateway),
        IobTag::B(MentionType::AndGateway),
        IobTag::I(MentionType::AndGateway),
        IobTag::B(MentionType::FurtherSpecification),
        IobTag::I(MentionType::FurtherSpecification),
        IobTag::B(MentionType::ConditionSpecification),
        IobTag::I(MentionType::ConditionSpecification),
    ];

    pub fn index(self) -> usize {
        match self {
            IobTag::O => 0,
            IobTag::B(t) => 1 + 2 * t.index(),
            IobTag::I(t) => 2 + 2 * t.index(),
        }
    }

    pub fn from_index(index: usize) -> Option<IobTag> {
        IobTag::ALL.get(index).copied()
    }

    pub fn mention_type(self) -> Option<MentionType> {
        match self {
            IobTag::O => None,
            IobTag::B(t) | IobTag::I(t) => Some(t),
        }
    }
}

impl fmt::Display for IobTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IobTag::O => f.write_str("O"),
            IobTag::B(t) => write!(f, "B-{t}"),
            IobTag::I(t) => write!(f, "I-{t}"),
        }
    }
}

impl FromStr for IobTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(IobTag::O);
        }
        let unknown = || Error::UnknownTag(s.to_string());
        let (prefix, name) = s.split_once('-').ok_or_else(unknown)?;
        let ty: MentionType = name.parse().map_err(|_| unknown())?;
        match prefix {
            "B" => Ok(IobTag::B(ty)),
            "I" => Ok(IobTag::I(ty)),
            _ => Err(unknown()),
        }
    }
}

impl Serialize for IobTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IobTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A typed token span inside one sentence, without document context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub sentence_id: usize,
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub mention_type: MentionType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub mention_id: usize,
    #[serde(rename = "type")]
    pub mention_type: MentionType,
    pub sentence_id: usize,
    pub token_start: usize,
    /// Inclusive.
    pub token_end: usize,
    pub text: String,
}

impl Mention {
    pub fn span(&self) -> Span {
        Span {
            sentence_id: self.sentence_id,
            start: self.token_start,
            end: self.token_end,
            mention_type: self.mention_type,
        }
    }

    pub fn len(&self) -> usize {
        self.token_end - self.token_start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationType {
    Flow,
    Uses,
    ActorPerformer,
    ActorRecipient,
    FurtherSpecification,
    SameGateway,
    /// Produced and consumed by the relation classifier only; never written
    /// into gold files.
    NoRelation,
}

impl RelationType {
    pub const ALL: [RelationType; 7] = [
        RelationType::Flow,
        RelationType::Uses,
        RelationType::ActorPerformer,
        RelationType::ActorRecipient,
        RelationType::FurtherSpecification,
        RelationType::SameGateway,
        RelationType::NoRelation,
    ];

    pub const GOLD: [RelationType; 6] = [
        RelationType::Flow,
        RelationType::Uses,
        RelationType::ActorPerformer,
        RelationType::ActorRecipient,
        RelationType::FurtherSpecification,
        RelationType::SameGateway,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationType::Flow => "Flow",
            RelationType::Uses => "Uses",
            RelationType::ActorPerformer => "ActorPerformer",
            RelationType::ActorRecipient => "ActorRecipient",
            RelationType::FurtherSpecification => "FurtherSpecification",
            RelationType::SameGateway => "SameGateway",
            RelationType::NoRelation => "NoRelation",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownRelation(s.to_string()))
    }
}

impl Serialize for RelationType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for RelationType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relation {
    pub source: usize,
    pub target: usize,
    #[serde(rename = "type")]
    pub relation_type: RelationType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub name: String,
    pub tokens: Vec<Token>,
    pub mentions: Vec<Mention>,
    pub relations: Vec<Relation>,
}

impl Document {
    /// Builds a document from sentences of `(text, pos)` pairs, assigning all
    /// token indices. Mentions and relations start empty.
    pub fn from_sentences<S, T>(name: impl Into<String>, sentences: S) -> Document
    where
        S: IntoIterator<Item = T>,
        T: IntoIterator<Item = (String, String)>,
    {
        let mut tokens = Vec::new();
        for (sentence_id, sentence) in sentences.into_iter().enumerate() {
            for (token_id, (text, pos)) in sentence.into_iter().enumerate() {
                tokens.push(Token {
                    text,
                    pos,
                    sentence_id,
                    token_id,
                    global_id: tokens.len(),
                    dep: None,
                });
            }
        }
        Document {
            name: name.into(),
            tokens,
            mentions: Vec::new(),
            relations: Vec::new(),
        }
    }

    /// Global token index range of every sentence, in sentence order.
    pub fn sentence_ranges(&self) -> Vec<Range<usize>> {
        let mut ranges: Vec<Range<usize>> = Vec::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.sentence_id + 1 == ranges.len() {
                if let Some(r) = ranges.last_mut() {
                    r.end = i + 1;
                }
            } else {
                ranges.push(i..i + 1);
            }
        }
        ranges
    }

    pub fn sentence_count(&self) -> usize {
        self.tokens.last().map_or(0, |t| t.sentence_id + 1)
    }

    pub fn sentences(&self) -> Vec<&[Token]> {
        self.sentence_ranges()
            .into_iter()
            .map(|r| &self.tokens[r])
            .collect()
    }

    /// Global index of a within-sentence token.
    pub fn global_index(&self, sentence_id: usize, token_id: usize) -> Option<usize> {
        let ranges = self.sentence_ranges();
        let r = ranges.get(sentence_id)?;
        (token_id < r.len()).then_some(r.start + token_id)
    }

    /// Global token range covered by a mention.
    pub fn mention_range(&self, m: &Mention) -> Range<usize> {
        let offset = self.sentence_ranges()[m.sentence_id].start;
        offset + m.token_start..offset + m.token_end + 1
    }

    pub fn span_text(&self, span: &Span) -> String {
        let offset = self.sentence_ranges()[span.sentence_id].start;
        self.tokens[offset + span.start..=offset + span.end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Replaces the mention list with the given spans, sorted into document
    /// order and numbered from 0. Relations are cleared because their mention
    /// ids no longer apply.
    pub fn set_spans(&mut self, mut spans: Vec<Span>) {
        spans.sort();
        self.mentions = spans
            .iter()
            .enumerate()
            .map(|(i, s)| Mention {
                mention_id: i,
                mention_type: s.mention_type,
                sentence_id: s.sentence_id,
                token_start: s.start,
                token_end: s.end,
                text: self.span_text(s),
            })
            .collect();
        self.relations.clear();
    }

    /// Checks every document invariant: token numbering, mention bounds,
    /// non-overlap, mention text, and relation references.
    pub fn validate(&self) -> Result<()> {
        let name = self.name.as_str();
        let mut sentence_lengths: Vec<usize> = Vec::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.global_id != i {
                return Err(Error::invariant(
                    name,
                    format!("token {i} has global_id {}", tok.global_id),
                ));
            }
            if tok.text.is_empty() {
                return Err(Error::invariant(name, format!("token {i} has empty text")));
            }
            if tok.sentence_id == sentence_lengths.len() {
                sentence_lengths.push(0);
            }
            if tok.sentence_id + 1 != sentence_lengths.len() {
                return Err(Error::invariant(
                    name,
                    format!("token {i} has out-of-order sentence_id {}", tok.sentence_id),
                ));
            }
            let len = sentence_lengths.last_mut().expect("pushed above");
            if tok.token_id != *len {
                return Err(Error::invariant(
                    name,
                    format!("token {i} has token_id {}, expected {len}", tok.token_id),
                ));
            }
            *len += 1;
        }

        let mut covered: Vec<Option<usize>> = vec![None; self.tokens.len()];
        for (i, m) in self.mentions.iter().enumerate() {
            if m.mention_id != i {
                return Err(Error::invariant(
                    name,
                    format!("mention at position {i} has id {}", m.mention_id),
                ));
            }
            let Some(&len) = sentence_lengths.get(m.sentence_id) else {
                return Err(Error::invariant(
                    name,
                    format!("mention {i} refers to missing sentence {}", m.sentence_id),
                ));
            };
            if m.token_start > m.token_end || m.token_end >= len {
                return Err(Error::invariant(
                    name,
                    format!(
                        "mention {i} span {}..={} outside sentence of length {len}",
                        m.token_start, m.token_end
                    ),
                ));
            }
            let range = self.mention_range(m);
            for g in range {
                if let Some(other) = covered[g] {
                    return Err(Error::Overlap {
                        document: name.to_string(),
                        first: other,
                        second: i,
                    });
                }
                covered[g] = Some(i);
            }
            let expected = self.span_text(&m.span());
            if m.text != expected {
                return Err(Error::invariant(
                    name,
                    format!("mention {i} text `{}` differs from span `{expected}`", m.text),
                ));
            }
        }

        let n = self.mentions.len();
        for r in &self.relations {
            if r.source >= n || r.target >= n {
                return Err(Error::invariant(
                    name,
                    format!("relation {}->{} references a missing mention", r.source, r.target),
                ));
            }
            if r.source == r.target {
                return Err(Error::invariant(
                    name,
                    format!("relation {}->{} is a self-loop", r.source, r.target),
                ));
            }
            if r.relation_type == RelationType::NoRelation {
                return Err(Error::invariant(name, "NoRelation in gold relations"));
            }
        }
        Ok(())
    }

    /// The mention covering a global token index, if any.
    pub fn mention_at(&self, global: usize) -> Option<usize> {
        self.mentions
            .iter()
            .position(|m| self.mention_range(m).contains(&global))
    }

    pub fn word_count(&self) -> usize {
        self.tokens
            .iter()
            .filter(|t| t.text.chars().any(char::is_alphanumeric))
            .count()
    }
}

/// An ordered collection of documents with a provenance tag per document
/// (e.g. `PET`, `LESCHNEIDER`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub provenance: Vec<String>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, provenance: impl Into<String>) -> Result<Corpus> {
        let tag = provenance.into();
        let provenance = vec![tag; documents.len()];
        let corpus = Corpus {
            documents,
            provenance,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for d in &self.documents {
            if !seen.insert(d.name.as_str()) {
                return Err(Error::invariant(&d.name, "duplicate document name"));
            }
            d.validate()?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Concatenates corpora, keeping each document's provenance.
    pub fn merge(parts: impl IntoIterator<Item = Corpus>) -> Result<Corpus> {
        let mut out = Corpus::default();
        for part in parts {
            out.documents.extend(part.documents);
            out.provenance.extend(part.provenance);
        }
        out.validate()?;
        Ok(out)
    }

    pub(crate) fn select(&self, indices: &[usize]) -> Corpus {
        Corpus {
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
            provenance: indices.iter().map(|&i| self.provenance[i].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagset_has_fifteen_members_in_index_order() {
        assert_eq!(IobTag::ALL.len(), IobTag::COUNT);
        for (i, t) in IobTag::ALL.iter().enumerate() {
            assert_eq!(t.index(), i);
            assert_eq!(IobTag::from_index(i), Some(*t));
            assert_eq!(t.to_string().parse::<IobTag>().unwrap(), *t);
        }
        let unique: std::collections::HashSet<String> =
            IobTag::ALL.iter().map(|t| t.to_string()).collect();
        assert_eq!(unique.len(), 15);
    }

    #[test]
    fn tag_strings_are_exact() {
        assert_eq!(IobTag::B(MentionType::XorGateway).to_string(), "B-XorGateway");
        assert_eq!(
            IobTag::I(MentionType::ConditionSpecification).to_string(),
            "I-ConditionSpecification"
        );
        assert!("B-XOR Gateway".parse::<IobTag>().is_err());
        assert!("X-Actor".parse::<IobTag>().is_err());
        assert!(matches!("B-Foo".parse::<IobTag>(), Err(Error::UnknownTag(_))));
    }

    #[test]
    fn relation_names_are_exact() {
        let names: Vec<_> = RelationType::GOLD.iter().map(|r| r.name()).collect();
        assert_eq!(
            names,
            [
                "Flow",
                "Uses",
                "ActorPerformer",
                "ActorRecipient",
                "FurtherSpecification",
                "SameGateway"
            ]
        );
        assert!(matches!(
            "flow".parse::<RelationType>(),
            Err(Error::UnknownRelation(_))
        ));
    }

    fn doc() -> Document {
        Document::from_sentences(
            "d",
            vec![
                vec![("The", "DT"), ("clerk", "NN"), ("checks", "VBZ")],
                vec![("Done", "VBN"), (".", ".")],
            ]
            .into_iter()
            .map(|s| s.into_iter().map(|(a, b)| (a.to_string(), b.to_string()))),
        )
    }

    #[test]
    fn sentence_ranges_follow_sentence_ids() {
        let d = doc();
        assert_eq!(d.sentence_ranges(), vec![0..3, 3..5]);
        assert_eq!(d.global_index(1, 1), Some(4));
        assert_eq!(d.global_index(1, 2), None);
        assert_eq!(d.sentence_count(), 2);
    }

    #[test]
    fn validate_rejects_overlap_and_bad_relations() {
        let mut d = doc();
        d.set_spans(vec![Span {
            sentence_id: 0,
            start: 0,
            end: 1,
            mention_type: MentionType::Actor,
        }]);
        assert_eq!(d.mentions[0].text, "The clerk");
        d.validate().unwrap();

        let mut overlapping = d.clone();
        let mut m = overlapping.mentions[0].clone();
        m.mention_id = 1;
        m.token_start = 1;
        m.text = "clerk".into();
        overlapping.mentions.push(m);
        assert!(matches!(overlapping.validate(), Err(Error::Overlap { .. })));

        let mut bad = d.clone();
        bad.relations.push(Relation {
            source: 0,
            target: 3,
            relation_type: RelationType::Flow,
        });
        assert!(matches!(bad.validate(), Err(Error::Invariant { .. })));
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = Corpus::new(vec![doc(), doc()], "X").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }
}
