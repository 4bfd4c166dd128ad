//! Trains the CRF tagger on a synthetic corpus, reports the optimizer trace
//! and tags an unseen sentence.

use anyhow::Result;
use proc2bpmn::corpus::decode_iob;
use proc2bpmn::ner::{labeled_sequences, train_crf_with_trace, Optimizer, TrainConfig};
use proc2bpmn::preprocess::{preprocess_text, PosTagger, DEFAULT_STRIP_CHARS};
use proc2bpmn::synth::{synthetic_corpus, SynthConfig};

fn main() -> Result<()> {
    let corpus = synthetic_corpus(&SynthConfig::default())?;
    let data = labeled_sequences(&corpus, None)?;

    for optimizer in [Optimizer::Lbfgs, Optimizer::GradientDescent] {
        let cfg = TrainConfig {
            optimizer,
            ..Default::default()
        };
        let (model, trace) = train_crf_with_trace(&data, &cfg)?;
        println!(
            "{optimizer:?}: {} features, objective {:.1} -> {:.3} in {} steps, |grad| {:.2e}",
            model.vocabulary().len(),
            trace.objective[0],
            trace.objective.last().unwrap_or(&f64::NAN),
            trace.objective.len() - 1,
            trace.final_grad_norm,
        );

        let doc = preprocess_text(
            "probe",
            "The supervisor signs the contract and then the driver ships the parcel.",
            DEFAULT_STRIP_CHARS,
            &PosTagger::bundled(),
        );
        let tags = model.tag_document(&doc, None);
        for s in decode_iob(&tags) {
            println!("  {:<24} {}", s.mention_type.name(), doc.span_text(&s));
        }
    }
    Ok(())
}
