//! Training and evaluation drivers: NER cross-validation and transfer,
//! relation sampling comparison, pipeline scoring on gold corpora.

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{encode_iob, kfold_split, Corpus, IobTag, RelationType};
use crate::error::Result;
use crate::eval::{
    aggregate_cv, classification_report, ner_metrics, pipeline_metrics, MetricsReport,
    NerEvalOptions, PipelineScore, SpanMode,
};
use crate::ner::{labeled_sequences, train_crf, CrfModel, Embeddings, TrainConfig};
use crate::pipeline::Extractor;
use crate::preprocess::PosTagger;
use crate::relex::{
    apply_sampling, corpus_frames, FrameConfig, LogisticRegression, LrConfig, MentionPairFrame,
    RelationClassifier, SamplingStrategy,
};

/// Trains a CRF on every sentence of `corpus`. The model carries a POS
/// tagger learned from the corpus for use on raw text.
pub fn train_ner(corpus: &Corpus, cfg: &TrainConfig, embeddings: Option<&Embeddings>) -> Result<CrfModel> {
    let data = labeled_sequences(corpus, embeddings)?;
    let mut model = train_crf(&data, cfg)?;
    model.pos_tagger = Some(PosTagger::from_corpus(corpus));
    Ok(model)
}

pub fn evaluate_ner(
    model: &CrfModel,
    corpus: &Corpus,
    embeddings: Option<&Embeddings>,
    options: &NerEvalOptions,
) -> Result<MetricsReport> {
    let mut gold: Vec<Vec<IobTag>> = Vec::new();
    let mut pred: Vec<Vec<IobTag>> = Vec::new();
    for doc in &corpus.documents {
        gold.extend(encode_iob(doc)?);
        pred.extend(model.tag_document(doc, embeddings));
    }
    ner_metrics(&gold, &pred, options)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvReport {
    pub folds: Vec<MetricsReport>,
    pub mean: MetricsReport,
}

/// Document-level k-fold cross-validation of the CRF.
pub fn cross_validate_ner(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    cfg: &TrainConfig,
    embeddings: Option<&Embeddings>,
    options: &NerEvalOptions,
) -> Result<CvReport> {
    let mut folds = Vec::with_capacity(k);
    for (train, test) in kfold_split(corpus, k, seed)? {
        let model = train_ner(&train, cfg, embeddings)?;
        folds.push(evaluate_ner(&model, &test, embeddings, options)?);
    }
    let mean = aggregate_cv(&folds)?;
    Ok(CvReport { folds, mean })
}

/// Train on one corpus, score on another.
pub fn transfer_ner(
    train: &Corpus,
    test: &Corpus,
    cfg: &TrainConfig,
    embeddings: Option<&Embeddings>,
    options: &NerEvalOptions,
) -> Result<MetricsReport> {
    let model = train_ner(train, cfg, embeddings)?;
    evaluate_ner(&model, test, embeddings, options)
}

/// Per-relation scores of `model` on gold-labeled frames. `NoRelation` is
/// reported but left out of the averages.
pub fn evaluate_relations<C: RelationClassifier + ?Sized>(
    model: &C,
    frames: &[MentionPairFrame],
) -> MetricsReport {
    let gold: Vec<RelationType> = frames.iter().map(|f| f.label).collect();
    let pred: Vec<RelationType> = frames.iter().map(|f| model.predict(f)).collect();
    classification_report(&gold, &pred, &RelationType::ALL, &[RelationType::NoRelation])
}

/// Samples `frames` and fits a classifier on all of them.
pub fn fit_relations(
    frames: &[MentionPairFrame],
    strategy: &SamplingStrategy,
    cfg: &LrConfig,
) -> Result<LogisticRegression> {
    let sampled = apply_sampling(frames, strategy)?;
    let mut model = LogisticRegression::new(cfg.clone());
    model.fit(&sampled)?;
    Ok(model)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingResult {
    pub strategy: String,
    pub report: MetricsReport,
}

/// Cross-validated relation scores for each sampling strategy, on gold
/// mentions. Folds are split by document; the same folds serve every
/// strategy.
pub fn compare_sampling(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    frame: &FrameConfig,
    lr: &LrConfig,
    strategies: &[SamplingStrategy],
) -> Result<Vec<SamplingResult>> {
    let folds: Vec<(Vec<MentionPairFrame>, Vec<MentionPairFrame>)> = kfold_split(corpus, k, seed)?
        .iter()
        .map(|(train, test)| {
            let strip = |c: &Corpus| corpus_frames(c, frame).into_iter().map(|(_, f)| f).collect();
            (strip(train), strip(test))
        })
        .collect();
    strategies
        .iter()
        .map(|strategy| {
            let reports = folds
                .par_iter()
                .map(|(train, test)| {
                    let model = fit_relations(train, strategy, lr)?;
                    Ok(evaluate_relations(&model, test))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SamplingResult {
                strategy: strategy.name().to_string(),
                report: aggregate_cv(&reports)?,
            })
        })
        .collect()
}

/// Runs the extractor on the tokens of every gold document and scores the
/// predicted elements and relations.
pub fn evaluate_pipeline(extractor: &Extractor<'_>, gold: &Corpus, mode: SpanMode) -> Result<PipelineScore> {
    let pred: Vec<_> = gold
        .documents
        .par_iter()
        .map(|d| extractor.annotate(d).document)
        .collect();
    pipeline_metrics(&gold.documents, &pred, mode)
}
