mod common;

use common::graph::{check, graph};
use common::random_document;
use proc2bpmn::bpmn::{close_gateways, AssembleConfig, BpmnGraph};
use proc2bpmn::synth::{synthetic_corpus, SynthConfig};
use proptest::prelude::*;

#[test]
fn synthetic_documents_satisfy_graph_invariants() {
    let corpus = synthetic_corpus(&SynthConfig {
        documents: 200,
        seed: 17,
        ..Default::default()
    })
    .unwrap();
    for doc in &corpus.documents {
        for cfg in [
            AssembleConfig::default(),
            AssembleConfig { events: false, contract_conditions: false },
        ] {
            check(doc, &cfg).unwrap_or_else(|e| panic!("{}: {e}", doc.name));
        }
    }
}

#[test]
fn graph_json_roundtrip() {
    let corpus = synthetic_corpus(&SynthConfig { documents: 20, ..Default::default() }).unwrap();
    for doc in &corpus.documents {
        let g = close_gateways(&graph(doc, &AssembleConfig::default()));
        assert_eq!(BpmnGraph::from_json(&g.to_json().unwrap()).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_relations_satisfy_graph_invariants(seed in any::<u64>(), events in any::<bool>(), contract in any::<bool>()) {
        let doc = random_document(seed, "d");
        check(&doc, &AssembleConfig { events, contract_conditions: contract }).map_err(TestCaseError::fail)?;
    }
}
