//! Mention-pair relation extraction.

pub mod classifier;
pub mod frame;
pub mod sampling;

pub use classifier::{
    train_relation_classifier, LogisticRegression, LrConfig, RelationClassifier,
    RelationTrainingReport,
};
pub use frame::{build_pair_frames, FrameConfig, HeadSelection, MentionPairFrame, NeighborReading};
pub use sampling::{apply_sampling, SamplingStrategy};

use rayon::prelude::*;

use crate::corpus::{Corpus, Document, Mention, Relation, RelationType};

/// Classifies every ordered mention pair and keeps the non-`NoRelation`
/// predictions, sorted by (source, target).
pub fn predict_relations<C: RelationClassifier + ?Sized>(
    model: &C,
    document: &Document,
    mentions: &[Mention],
    cfg: &FrameConfig,
) -> Vec<Relation> {
    let mut out: Vec<Relation> = build_pair_frames(document, mentions, cfg)
        .iter()
        .filter_map(|f| {
            let t = model.predict(f);
            (t != RelationType::NoRelation).then_some(Relation {
                source: f.source_id,
                target: f.target_id,
                relation_type: t,
            })
        })
        .collect();
    out.sort_by_key(|r| (r.source, r.target));
    out
}

/// Gold-labeled frames of every document, in document order.
pub fn corpus_frames(corpus: &Corpus, cfg: &FrameConfig) -> Vec<(String, MentionPairFrame)> {
    corpus
        .documents
        .par_iter()
        .map(|d| {
            build_pair_frames(d, &d.mentions, cfg)
                .into_iter()
                .map(|f| (d.name.clone(), f))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
