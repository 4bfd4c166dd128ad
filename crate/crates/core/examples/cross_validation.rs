//! Five-fold document-level cross-validation of the CRF tagger.

use anyhow::Result;
use proc2bpmn::eval::NerEvalOptions;
use proc2bpmn::experiments::cross_validate_ner;
use proc2bpmn::ner::TrainConfig;
use proc2bpmn::synth::{synthetic_corpus, SynthConfig};

fn main() -> Result<()> {
    let corpus = synthetic_corpus(&SynthConfig {
        documents: 40,
        seed: 11,
        ..Default::default()
    })?;
    let cv = cross_validate_ner(&corpus, 5, 7, &TrainConfig::default(), None, &NerEvalOptions::default())?;
    for (i, f) in cv.folds.iter().enumerate() {
        println!("fold {i}: weighted F1 {:.3}", f.weighted.f1);
    }
    println!();
    print!("{}", cv.mean);
    Ok(())
}
