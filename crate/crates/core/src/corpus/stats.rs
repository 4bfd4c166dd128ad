//! Mention-type statistics tables.
//!
//! All derived values are computed in exact integer arithmetic as hundredths
//! with half-up rounding, so tables compare exactly with reference figures.

use std::fmt;

use serde::Serialize;

use super::{Corpus, MentionType};
use crate::error::{Error, Result};

/// A value in hundredths, e.g. `2674` displays as `26.74`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Hundredths(pub u64);

impl Hundredths {
    /// `numerator / denominator` rounded half-up to two decimals.
    pub fn ratio(numerator: u64, denominator: u64) -> Hundredths {
        assert!(denominator > 0, "ratio with zero denominator");
        Hundredths((numerator * 200 + denominator) / (2 * denominator))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Hundredths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeStats {
    pub mention_type: MentionType,
    pub absolute: u64,
    /// Percentage of all mentions.
    pub relative: Hundredths,
    pub per_document: Hundredths,
    pub per_sentence: Hundredths,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatsTable {
    pub documents: u64,
    pub sentences: u64,
    pub mentions: u64,
    /// One row per mention type in the conventional column order:
    /// Actor, Activity, ActivityData, XOR, FurtherSpec, CondSpec, AND.
    pub rows: Vec<TypeStats>,
}

/// Column order used when printing tables.
pub const TABLE_ORDER: [MentionType; 7] = [
    MentionType::Actor,
    MentionType::Activity,
    MentionType::ActivityData,
    MentionType::XorGateway,
    MentionType::FurtherSpecification,
    MentionType::ConditionSpecification,
    MentionType::AndGateway,
];

impl StatsTable {
    pub fn row(&self, t: MentionType) -> &TypeStats {
        self.rows
            .iter()
            .find(|r| r.mention_type == t)
            .expect("every type has a row")
    }
}

pub fn corpus_stats(corpus: &Corpus) -> Result<StatsTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let documents = corpus.len() as u64;
    let sentences: u64 = corpus
        .documents
        .iter()
        .map(|d| d.sentence_count() as u64)
        .sum();
    if sentences == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut counts = [0u64; 7];
    for d in &corpus.documents {
        for m in &d.mentions {
            counts[m.mention_type.index()] += 1;
        }
    }
    let mentions: u64 = counts.iter().sum();
    let rows = TABLE_ORDER
        .iter()
        .map(|&t| {
            let n = counts[t.index()];
            TypeStats {
                mention_type: t,
                absolute: n,
                relative: if mentions == 0 {
                    Hundredths(0)
                } else {
                    Hundredths::ratio(n * 100, mentions)
                },
                per_document: Hundredths::ratio(n, documents),
                per_sentence: Hundredths::ratio(n, sentences),
            }
        })
        .collect();
    Ok(StatsTable {
        documents,
        sentences,
        mentions,
        rows,
    })
}

impl fmt::Display for StatsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let headers = [
            "Actor", "Activity", "ActData", "XOR", "FurtherSpec", "CondSpec", "AND",
        ];
        write!(f, "{:<16}", "")?;
        for h in headers {
            write!(f, "{h:>12}")?;
        }
        writeln!(f)?;
        let line = |f: &mut fmt::Formatter<'_>, label: &str, cell: &dyn Fn(&TypeStats) -> String| {
            write!(f, "{label:<16}")?;
            for r in &self.rows {
                write!(f, "{:>12}", cell(r))?;
            }
            writeln!(f)
        };
        line(f, "absolute count", &|r| r.absolute.to_string())?;
        line(f, "relative count", &|r| format!("{}%", r.relative))?;
        line(f, "per document", &|r| r.per_document.to_string())?;
        line(f, "per sentence", &|r| r.per_sentence.to_string())?;
        writeln!(
            f,
            "({} documents, {} sentences, {} mentions)",
            self.documents, self.sentences, self.mentions
        )
    }
}
