//! Assembles a process graph from hand-made mentions and relations, closes
//! its gateways and prints DOT.

use anyhow::Result;
use proc2bpmn::bpmn::{assemble_graph, close_gateways, emit_dot, parse_dot, AssembleConfig};
use proc2bpmn::corpus::{Document, MentionType, Relation, RelationType, Span};
use proc2bpmn::resolve::{cluster_mentions, ResolveConfig};

fn main() -> Result<()> {
    let sentence = "the clerk opens the claim and simultaneously checks the form and then archives it";
    let mut doc = Document::from_sentences(
        "closure",
        [sentence.split(' ').map(|w| (w.to_string(), String::new())).collect::<Vec<_>>()],
    );
    let span = |start, end, mention_type| Span {
        sentence_id: 0,
        start,
        end,
        mention_type,
    };
    doc.set_spans(vec![
        span(0, 1, MentionType::Actor),
        span(2, 2, MentionType::Activity),
        span(3, 4, MentionType::ActivityData),
        span(5, 6, MentionType::AndGateway),
        span(7, 7, MentionType::Activity),
        span(8, 9, MentionType::ActivityData),
        span(12, 12, MentionType::Activity),
    ]);
    let rel = |source, target, relation_type| Relation {
        source,
        target,
        relation_type,
    };
    doc.relations = vec![
        rel(1, 0, RelationType::ActorPerformer),
        rel(1, 2, RelationType::Uses),
        rel(3, 1, RelationType::Flow),
        rel(3, 4, RelationType::Flow),
        rel(4, 5, RelationType::Uses),
        rel(1, 6, RelationType::Flow),
        rel(4, 6, RelationType::Flow),
    ];
    doc.validate()?;

    let clusters = cluster_mentions(&doc, &doc.mentions, &ResolveConfig::default());
    let open = assemble_graph(&doc.mentions, &doc.relations, &clusters, &AssembleConfig::default());
    let closed = close_gateways(&open);
    eprintln!("nodes before/after closure: {} / {}", open.nodes.len(), closed.nodes.len());

    let dot = emit_dot(&closed);
    let parsed = parse_dot(&dot)?;
    eprintln!("DOT parses: {} nodes, {} edges", parsed.nodes.len(), parsed.edges.len());
    print!("{dot}");
    Ok(())
}
