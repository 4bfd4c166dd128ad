//! Builds mention-pair frames, shows what each sampling strategy does to
//! the class counts, and compares the strategies by cross-validation.

use std::collections::BTreeMap;

use anyhow::Result;
use proc2bpmn::corpus::RelationType;
use proc2bpmn::experiments::compare_sampling;
use proc2bpmn::relex::{apply_sampling, corpus_frames, FrameConfig, LrConfig, SamplingStrategy};
use proc2bpmn::synth::{synthetic_corpus, SynthConfig};

fn main() -> Result<()> {
    let corpus = synthetic_corpus(&SynthConfig::default())?;
    let frames: Vec<_> = corpus_frames(&corpus, &FrameConfig::default())
        .into_iter()
        .map(|(_, f)| f)
        .collect();

    let strategies = [
        SamplingStrategy::None,
        SamplingStrategy::NegativeSampling { rate: 5.0, seed: 1 },
        SamplingStrategy::RandomOverSampling {
            target: RelationType::Flow,
            multiplier: 2.0,
            seed: 1,
        },
    ];
    for s in &strategies {
        let mut counts: BTreeMap<RelationType, usize> = BTreeMap::new();
        for f in apply_sampling(&frames, s)? {
            *counts.entry(f.label).or_default() += 1;
        }
        let row: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{:<18} {}", s.name(), row.join(" "));
    }

    println!();
    let results = compare_sampling(&corpus, 5, 1, &FrameConfig::default(), &LrConfig::default(), &strategies)?;
    print!("{:<18}", "F1");
    for c in &results[0].report.classes {
        print!(" {:>8.8}", c.label);
    }
    println!();
    for r in &results {
        print!("{:<18}", r.strategy);
        for c in &r.report.classes {
            print!(" {:>8.3}", c.f1);
        }
        println!();
    }
    Ok(())
}
