//! Structural checks shared by the graph tests.

use std::collections::{BTreeMap, BTreeSet};

use proc2bpmn::bpmn::{
    assemble_graph, close_gateways, emit_dot, parse_dot, represented_mentions, AssembleConfig, BpmnGraph,
    EdgeKind,
};
use proc2bpmn::corpus::Document;
use proc2bpmn::resolve::{cluster_mentions, ResolveConfig};

macro_rules! ensure {
    ($c:expr) => {
        if !$c {
            return Err(format!("failed: {}", stringify!($c)));
        }
    };
    ($c:expr, $($fmt:tt)+) => {
        if !$c {
            return Err(format!($($fmt)+));
        }
    };
}

macro_rules! ensure_eq {
    ($a:expr, $b:expr) => {
        if $a != $b {
            return Err(format!("{} != {}: {:?} vs {:?}", stringify!($a), stringify!($b), $a, $b));
        }
    };
    ($a:expr, $b:expr, $($fmt:tt)+) => {
        if $a != $b {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn graph(doc: &Document, cfg: &AssembleConfig) -> BpmnGraph {
    let clusters = cluster_mentions(doc, &doc.mentions, &ResolveConfig::default());
    assemble_graph(&doc.mentions, &doc.relations, &clusters, cfg)
}

/// Node id to every node reachable by one or more sequence flows.
pub fn reach(g: &BpmnGraph) -> BTreeMap<usize, BTreeSet<usize>> {
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in g.edges.iter().filter(|e| e.kind == EdgeKind::SequenceFlow) {
        succ.entry(e.source).or_default().push(e.target);
    }
    g.nodes
        .iter()
        .map(|n| {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<usize> = succ.get(&n.id).cloned().unwrap_or_default();
            while let Some(u) = stack.pop() {
                if seen.insert(u) {
                    stack.extend(succ.get(&u).into_iter().flatten());
                }
            }
            (n.id, seen)
        })
        .collect()
}

pub fn check(doc: &Document, cfg: &AssembleConfig) -> Result<(), String> {
    let g = graph(doc, cfg);
    ensure!(g.validate().is_ok(), "{:?}", g.validate());
    let all: BTreeSet<usize> = doc.mentions.iter().map(|m| m.mention_id).collect();
    ensure_eq!(represented_mentions(&g), all.clone());

    let closed = close_gateways(&g);
    ensure!(closed.validate().is_ok());
    ensure_eq!(&close_gateways(&closed), &closed);
    ensure_eq!(represented_mentions(&closed), all);

    let before = reach(&g);
    let after = reach(&closed);
    let original: BTreeSet<usize> = g.nodes.iter().map(|n| n.id).collect();
    for (id, r) in &before {
        let kept: BTreeSet<usize> = after[id].intersection(&original).copied().collect();
        ensure_eq!(&kept, r, "reachability from {} changed", id);
    }

    let dot = emit_dot(&closed);
    ensure_eq!(&emit_dot(&close_gateways(&graph(doc, cfg))), &dot);
    let parsed = parse_dot(&dot).unwrap();
    ensure!(parsed.directed);
    ensure_eq!(parsed.nodes.len(), closed.nodes.len());
    ensure_eq!(parsed.edges.len(), closed.edges.len());
    for n in &closed.nodes {
        let key = format!("n{}", n.id);
        ensure!(parsed.nodes.contains_key(&key));
    }
    for (pe, e) in parsed.edges.iter().zip(&closed.edges) {
        ensure_eq!(&pe.source, &format!("n{}", e.source));
        ensure_eq!(&pe.target, &format!("n{}", e.target));
        ensure_eq!(pe.attributes.get("label").cloned().unwrap_or_default(), e.label.clone());
    }
    Ok(())
}
