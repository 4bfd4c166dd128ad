use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::graph::{BpmnEdge, BpmnGraph, BpmnNode, EdgeKind, NodeKind};

/// Upper bound on inserted joins per call.
const MAX_INSERTIONS: usize = 10_000;

fn is_join(graph: &BpmnGraph, in_deg: &HashMap<usize, usize>, id: usize) -> bool {
    graph.node(id).is_some_and(|n| n.kind.is_gateway()) && in_deg.get(&id).copied().unwrap_or(0) >= 2
}

/// BFS distances from `start` along sequence flows, never entering `split`
/// and not expanding join gateways.
fn branch_reach(
    graph: &BpmnGraph,
    succ: &BTreeMap<usize, Vec<usize>>,
    in_deg: &HashMap<usize, usize>,
    split: usize,
    start: usize,
) -> HashMap<usize, usize> {
    let mut dist = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if is_join(graph, in_deg, u) {
            continue;
        }
        for &v in succ.get(&u).into_iter().flatten() {
            if v != split && !dist.contains_key(&v) {
                dist.insert(v, dist[&u] + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// One closure step for `split`: returns true when a join was inserted.
fn close_one(graph: &mut BpmnGraph, split: usize) -> bool {
    let succ = graph.successors();
    let in_deg = graph.in_degrees();
    let branches = succ.get(&split).cloned().unwrap_or_default();
    if branches.len() < 2 {
        return false;
    }
    let reaches: Vec<HashMap<usize, usize>> = branches
        .iter()
        .map(|&b| branch_reach(graph, &succ, &in_deg, split, b))
        .collect();

    // First common descendant: smallest worst-branch distance, then id.
    let mut best: Option<(usize, usize)> = None;
    let mut candidates: BTreeSet<usize> = BTreeSet::new();
    for r in &reaches {
        candidates.extend(r.keys().copied());
    }
    for &n in &candidates {
        let hits: Vec<usize> = reaches.iter().filter_map(|r| r.get(&n).copied()).collect();
        if hits.len() < 2 {
            continue;
        }
        let key = (*hits.iter().max().expect("non-empty"), n);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    let Some((_, target)) = best else {
        return false;
    };
    if is_join(graph, &in_deg, target) {
        return false;
    }

    let mut region: BTreeSet<usize> = BTreeSet::from([split]);
    for r in &reaches {
        region.extend(r.keys().copied().filter(|&k| k != target));
    }
    let converging: Vec<usize> = graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EdgeKind::SequenceFlow && e.target == target && region.contains(&e.source))
        .map(|(i, _)| i)
        .collect();
    if converging.len() < 2 {
        return false;
    }

    let kind = graph.node(split).map_or(NodeKind::XorGateway, |n| n.kind);
    let join = graph.next_id();
    graph.nodes.push(BpmnNode {
        id: join,
        kind,
        label: String::new(),
        mentions: Vec::new(),
    });
    for i in converging {
        graph.edges[i].target = join;
    }
    graph.edges.push(BpmnEdge {
        source: join,
        target,
        kind: EdgeKind::SequenceFlow,
        label: String::new(),
        conditions: Vec::new(),
    });
    true
}

/// Inserts join gateways where branches of a split gateway reconverge on a
/// node that is not already a join.
///
/// Splits are visited in descending id order, repeatedly, until no split
/// changes; the result is therefore a fixpoint and a second call returns it
/// unchanged. Rerouting `u -> n` into `u -> J -> n` keeps every reachability
/// between existing nodes.
pub fn close_gateways(graph: &BpmnGraph) -> BpmnGraph {
    let mut g = graph.clone();
    let mut inserted = 0;
    loop {
        let mut changed = false;
        let mut splits: Vec<usize> = {
            let succ = g.successors();
            g.nodes
                .iter()
                .filter(|n| n.kind.is_gateway() && succ.get(&n.id).is_some_and(|s| s.len() >= 2))
                .map(|n| n.id)
                .collect()
        };
        splits.sort_unstable_by(|a, b| b.cmp(a));
        for s in splits {
            while inserted < MAX_INSERTIONS && close_one(&mut g, s) {
                inserted += 1;
                changed = true;
            }
        }
        if !changed || inserted >= MAX_INSERTIONS {
            break;
        }
    }
    g.normalize();
    g
}
