//! Trains both models on the synthetic corpus and turns the library
//! lending description into a process graph.

use anyhow::Result;
use proc2bpmn::bpmn::{emit_dot, NodeKind};
use proc2bpmn::config::RunConfig;
use proc2bpmn::experiments::train_ner;
use proc2bpmn::pipeline::{ExtractOptions, Extractor};
use proc2bpmn::relex::{apply_sampling, corpus_frames, train_relation_classifier};
use proc2bpmn::synth::{synthetic_corpus, SynthConfig};

const LIBRARY: &str = "When a request for a book comes in, the library staff member consults \
the digital catalog to check for the book's availability. If the book is currently on loan or \
not in the library's collection, the staff member informs the requester right away. If the book \
is available, the staff member starts the checkout procedure by logging the book against the \
requester's library account and simultaneously retrieving the book using the automated system.";

fn main() -> Result<()> {
    let cfg = RunConfig::default();
    let corpus = synthetic_corpus(&SynthConfig::default())?;

    let ner = train_ner(&corpus, &cfg.train_config(), None)?;
    let frames: Vec<_> = corpus_frames(&corpus, &cfg.frame_config())
        .into_iter()
        .map(|(_, f)| f)
        .collect();
    let (re, report) = train_relation_classifier(&apply_sampling(&frames, &cfg.sampling())?, &cfg.lr_config())?;
    if let Some(r) = report.held_out {
        eprintln!("relation classifier, held-out frames:\n{r}");
    }

    let extractor = Extractor {
        ner: &ner,
        relations: &re,
        embeddings: None,
        options: ExtractOptions::from(&cfg),
    };
    let out = extractor.extract_text("library", LIBRARY);
    for m in &out.document.mentions {
        eprintln!("{:>3} {:<24} {}", m.mention_id, m.mention_type.name(), m.text);
    }
    for r in &out.document.relations {
        eprintln!("{} -> {} {}", r.source, r.target, r.relation_type);
    }
    let g = &out.graph;
    eprintln!(
        "xor: {}  and: {}  labeled edges: {}",
        g.count(NodeKind::XorGateway),
        g.count(NodeKind::AndGateway),
        g.edges.iter().filter(|e| !e.label.is_empty()).count()
    );
    print!("{}", emit_dot(g));
    Ok(())
}
