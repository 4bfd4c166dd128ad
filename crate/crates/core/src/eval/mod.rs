//! Scoring: per-class NER reports with micro, macro and weighted averages,
//! cross-validation aggregation, and element/relation pipeline counts.

pub mod metrics;
pub mod pipeline;

pub use metrics::{
    aggregate_cv, classification_report, f1_score, ner_metrics, Averages, ClassScores,
    MetricsReport, NerEvalOptions,
};
pub use pipeline::{pipeline_metrics, score_document, Counts, DocumentScore, PipelineScore, SpanMode, Tenths};
