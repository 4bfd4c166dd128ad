use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Mention, MentionType, Relation, RelationType};
use crate::error::{Error, Result};
use crate::resolve::EntityCluster;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Task,
    XorGateway,
    AndGateway,
    Actor,
    DataObject,
    Annotation,
    StartEvent,
    EndEvent,
}

impl NodeKind {
    pub fn is_gateway(self) -> bool {
        matches!(self, NodeKind::XorGateway | NodeKind::AndGateway)
    }

    /// Kinds allowed at either end of a sequence flow.
    pub fn is_flow_node(self) -> bool {
        matches!(
            self,
            NodeKind::Task
                | NodeKind::XorGateway
                | NodeKind::AndGateway
                | NodeKind::StartEvent
                | NodeKind::EndEvent
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    SequenceFlow,
    Performer,
    Recipient,
    DataUse,
    Specification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpmnNode {
    pub id: usize,
    pub kind: NodeKind,
    pub label: String,
    /// Mentions the node stands for (empty for synthetic nodes).
    #[serde(default)]
    pub mentions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpmnEdge {
    pub source: usize,
    pub target: usize,
    pub kind: EdgeKind,
    /// Condition text, or empty.
    #[serde(default)]
    pub label: String,
    /// Condition mentions contracted into `label`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpmnGraph {
    pub nodes: Vec<BpmnNode>,
    pub edges: Vec<BpmnEdge>,
    #[serde(default)]
    pub unconnected: BTreeSet<usize>,
    /// Relations that could not be placed, with the reason.
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembleConfig {
    pub events: bool,
    pub contract_conditions: bool,
}

impl Default for AssembleConfig {
    fn default() -> Self {
        AssembleConfig {
            events: true,
            contract_conditions: true,
        }
    }
}

impl BpmnGraph {
    pub fn node(&self, id: usize) -> Option<&BpmnNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn next_id(&self) -> usize {
        self.nodes.iter().map(|n| n.id + 1).max().unwrap_or(0)
    }

    pub fn sequence_flows(&self) -> impl Iterator<Item = &BpmnEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::SequenceFlow)
    }

    /// Sequence-flow successors per node, sorted.
    pub fn successors(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = self.nodes.iter().map(|n| (n.id, Vec::new())).collect();
        for e in self.sequence_flows() {
            out.entry(e.source).or_default().push(e.target);
        }
        for v in out.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        out
    }

    /// Sequence-flow in-degree per node.
    pub fn in_degrees(&self) -> HashMap<usize, usize> {
        let mut out: HashMap<usize, usize> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        for e in self.sequence_flows() {
            *out.entry(e.target).or_default() += 1;
        }
        out
    }

    /// Nodes without incident flow, data or specification edges (for Actors:
    /// without performer or recipient edges).
    pub fn compute_unconnected(&self) -> BTreeSet<usize> {
        let mut linked = BTreeSet::new();
        for e in &self.edges {
            let counts = |kind: NodeKind| match e.kind {
                EdgeKind::Performer | EdgeKind::Recipient => kind == NodeKind::Actor,
                _ => kind != NodeKind::Actor,
            };
            for id in [e.source, e.target] {
                if self.node(id).is_some_and(|n| counts(n.kind)) {
                    linked.insert(id);
                }
            }
        }
        self.nodes
            .iter()
            .map(|n| n.id)
            .filter(|id| !linked.contains(id))
            .collect()
    }

    pub fn refresh_unconnected(&mut self) {
        self.unconnected = self.compute_unconnected();
    }

    /// Nodes sorted by id, edges sorted by (source, target, kind, label).
    pub fn normalize(&mut self) {
        self.nodes.sort_by_key(|n| n.id);
        self.edges.sort_by(|a, b| {
            (a.source, a.target, a.kind, &a.label).cmp(&(b.source, b.target, b.kind, &b.label))
        });
        self.refresh_unconnected();
    }

    /// Checks unique ids, edge endpoints, sequence-flow endpoint kinds and
    /// the unconnected set.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Error::Invariant {
            document: "graph".into(),
            msg,
        };
        let mut kinds = HashMap::new();
        for n in &self.nodes {
            if kinds.insert(n.id, n.kind).is_some() {
                return Err(bad(format!("duplicate node id {}", n.id)));
            }
            let needs_label = matches!(n.kind, NodeKind::Task | NodeKind::Actor | NodeKind::DataObject);
            if needs_label && n.label.trim().is_empty() {
                return Err(bad(format!("node {} has an empty label", n.id)));
            }
        }
        for e in &self.edges {
            let (Some(s), Some(t)) = (kinds.get(&e.source), kinds.get(&e.target)) else {
                return Err(bad(format!("edge {} -> {} has a missing endpoint", e.source, e.target)));
            };
            if e.kind == EdgeKind::SequenceFlow && !(s.is_flow_node() && t.is_flow_node()) {
                return Err(bad(format!(
                    "sequence flow {} -> {} joins {s:?} and {t:?}",
                    e.source, e.target
                )));
            }
        }
        if self.unconnected != self.compute_unconnected() {
            return Err(bad("unconnected set is stale".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<BpmnGraph> {
        let g: BpmnGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

struct Builder {
    graph: BpmnGraph,
    edge_index: HashMap<(usize, usize, EdgeKind), usize>,
}

impl Builder {
    fn add_node(&mut self, kind: NodeKind, label: String, mentions: Vec<usize>) -> usize {
        let id = self.graph.nodes.len();
        self.graph.nodes.push(BpmnNode {
            id,
            kind,
            label,
            mentions,
        });
        id
    }

    fn add_edge(&mut self, source: usize, target: usize, kind: EdgeKind, label: &str, conditions: &[usize]) {
        match self.edge_index.get(&(source, target, kind)) {
            Some(&i) => {
                let e = &mut self.graph.edges[i];
                if !label.is_empty() {
                    let mut parts: Vec<&str> = e.label.split(" / ").filter(|s| !s.is_empty()).collect();
                    if !parts.contains(&label) {
                        parts.push(label);
                    }
                    e.label = parts.join(" / ");
                }
                for c in conditions {
                    if !e.conditions.contains(c) {
                        e.conditions.push(*c);
                    }
                }
                e.conditions.sort_unstable();
            }
            None => {
                self.edge_index.insert((source, target, kind), self.graph.edges.len());
                self.graph.edges.push(BpmnEdge {
                    source,
                    target,
                    kind,
                    label: label.to_string(),
                    conditions: conditions.to_vec(),
                });
            }
        }
    }

    fn diagnose(&mut self, r: &Relation, why: &str) {
        self.graph.diagnostics.push(format!(
            "{} {} -> {} dropped: {why}",
            r.relation_type, r.source, r.target
        ));
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// Builds the process graph.
///
/// Node ids follow document order of the first mention each node stands
/// for; the synthetic start and end events take the two highest ids.
pub fn assemble_graph(
    mentions: &[Mention],
    relations: &[Relation],
    clusters: &[EntityCluster],
    cfg: &AssembleConfig,
) -> BpmnGraph {
    let mut order: Vec<usize> = (0..mentions.len()).collect();
    order.sort_by_key(|&i| (mentions[i].span(), mentions[i].mention_id));
    let pos: HashMap<usize, usize> = mentions
        .iter()
        .enumerate()
        .map(|(i, m)| (m.mention_id, i))
        .collect();
    let mut b = Builder {
        graph: BpmnGraph::default(),
        edge_index: HashMap::new(),
    };

    // Group keys: merged gateways via SameGateway, clusters for entities.
    let mut parent: Vec<usize> = (0..mentions.len()).collect();
    for r in relations.iter().filter(|r| r.relation_type == RelationType::SameGateway) {
        let (Some(&s), Some(&t)) = (pos.get(&r.source), pos.get(&r.target)) else {
            b.diagnose(r, "unknown mention");
            continue;
        };
        let (ks, kt) = (mentions[s].mention_type, mentions[t].mention_type);
        if !(ks.is_gateway() && ks == kt) {
            b.diagnose(r, &format!("SameGateway needs two gateways of one kind, got {ks} and {kt}"));
            continue;
        }
        let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
        parent[rs.max(rt)] = rs.min(rt);
    }
    let mut canonical: HashMap<usize, usize> = HashMap::new();
    for c in clusters {
        if let Some(&first) = c.members.iter().filter_map(|m| pos.get(m)).min() {
            for m in &c.members {
                if let Some(&i) = pos.get(m) {
                    if matches!(mentions[i].mention_type, MentionType::Actor | MentionType::ActivityData) {
                        parent[i] = first;
                    }
                }
            }
            if let Some(&ci) = pos.get(&c.canonical) {
                canonical.insert(first, ci);
            }
        }
    }

    // Conditions with flow on both sides become edge labels.
    let flow_rel = |r: &&Relation| r.relation_type == RelationType::Flow;
    let is_flow_mention = |i: usize| matches!(
        mentions[i].mention_type,
        MentionType::Activity | MentionType::XorGateway | MentionType::AndGateway
    );
    let mut cond_in: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut cond_out: HashMap<usize, Vec<usize>> = HashMap::new();
    for r in relations.iter().filter(flow_rel) {
        let (Some(&s), Some(&t)) = (pos.get(&r.source), pos.get(&r.target)) else {
            continue;
        };
        if mentions[t].mention_type == MentionType::ConditionSpecification && is_flow_mention(s) {
            cond_in.entry(t).or_default().push(s);
        }
        if mentions[s].mention_type == MentionType::ConditionSpecification && is_flow_mention(t) {
            cond_out.entry(s).or_default().push(t);
        }
    }
    let contracted: BTreeSet<usize> = (0..mentions.len())
        .filter(|&i| {
            cfg.contract_conditions
                && mentions[i].mention_type == MentionType::ConditionSpecification
                && cond_in.contains_key(&i)
                && cond_out.contains_key(&i)
        })
        .collect();

    let mut node_of: HashMap<usize, usize> = HashMap::new();
    let mut group_node: HashMap<usize, usize> = HashMap::new();
    for &i in &order {
        if contracted.contains(&i) {
            continue;
        }
        let m = &mentions[i];
        let root = find(&mut parent, i);
        if let Some(&n) = group_node.get(&root) {
            b.graph.nodes[n].mentions.push(m.mention_id);
            if m.mention_type.is_gateway() {
                let label = &mut b.graph.nodes[n].label;
                label.push_str(" / ");
                label.push_str(&m.text);
            }
            node_of.insert(i, n);
            continue;
        }
        let kind = match m.mention_type {
            MentionType::Activity => NodeKind::Task,
            MentionType::XorGateway => NodeKind::XorGateway,
            MentionType::AndGateway => NodeKind::AndGateway,
            MentionType::Actor => NodeKind::Actor,
            MentionType::ActivityData => NodeKind::DataObject,
            MentionType::FurtherSpecification | MentionType::ConditionSpecification => NodeKind::Annotation,
        };
        let label = canonical
            .get(&root)
            .map_or_else(|| m.text.clone(), |&c| mentions[c].text.clone());
        let n = b.add_node(kind, label, vec![m.mention_id]);
        group_node.insert(root, n);
        node_of.insert(i, n);
    }

    for r in relations {
        let (Some(&s), Some(&t)) = (pos.get(&r.source), pos.get(&r.target)) else {
            b.diagnose(r, "unknown mention");
            continue;
        };
        let (ts, tt) = (mentions[s].mention_type, mentions[t].mention_type);
        use MentionType as M;
        match r.relation_type {
            RelationType::SameGateway => {}
            RelationType::NoRelation => b.diagnose(r, "NoRelation is not a graph relation"),
            RelationType::Flow => {
                if contracted.contains(&s) || contracted.contains(&t) {
                    continue;
                }
                match (ts, tt) {
                    (_, M::ConditionSpecification) if is_flow_mention(s) => {
                        b.add_edge(node_of[&s], node_of[&t], EdgeKind::Specification, "", &[]);
                    }
                    (M::ConditionSpecification, _) if is_flow_mention(t) => {
                        b.add_edge(node_of[&t], node_of[&s], EdgeKind::Specification, "", &[]);
                    }
                    _ if is_flow_mention(s) && is_flow_mention(t) => {
                        b.add_edge(node_of[&s], node_of[&t], EdgeKind::SequenceFlow, "", &[]);
                    }
                    _ => b.diagnose(r, &format!("Flow cannot join {ts} and {tt}")),
                }
            }
            RelationType::Uses => match (ts, tt) {
                (M::Activity, M::ActivityData) => {
                    b.add_edge(node_of[&s], node_of[&t], EdgeKind::DataUse, "", &[])
                }
                (M::ActivityData, M::Activity) => {
                    b.add_edge(node_of[&t], node_of[&s], EdgeKind::DataUse, "", &[])
                }
                _ => b.diagnose(r, &format!("Uses cannot join {ts} and {tt}")),
            },
            RelationType::ActorPerformer | RelationType::ActorRecipient => {
                let kind = if r.relation_type == RelationType::ActorPerformer {
                    EdgeKind::Performer
                } else {
                    EdgeKind::Recipient
                };
                match (ts, tt) {
                    (M::Activity, M::Actor) => b.add_edge(node_of[&t], node_of[&s], kind, "", &[]),
                    (M::Actor, M::Activity) => b.add_edge(node_of[&s], node_of[&t], kind, "", &[]),
                    _ => b.diagnose(r, &format!("{} cannot join {ts} and {tt}", r.relation_type)),
                }
            }
            RelationType::FurtherSpecification => {
                let (host, spec) = match (ts, tt) {
                    (_, M::FurtherSpecification) if ts != M::FurtherSpecification => (s, t),
                    (M::FurtherSpecification, _) if tt != M::FurtherSpecification => (t, s),
                    _ => {
                        b.diagnose(r, &format!("FurtherSpecification cannot join {ts} and {tt}"));
                        continue;
                    }
                };
                if contracted.contains(&host) {
                    b.diagnose(r, "host condition was contracted into an edge label");
                    continue;
                }
                b.add_edge(node_of[&host], node_of[&spec], EdgeKind::Specification, "", &[]);
            }
        }
    }

    for &c in &contracted {
        let text = mentions[c].text.clone();
        let cid = mentions[c].mention_id;
        let mut preds = cond_in[&c].clone();
        let mut succs = cond_out[&c].clone();
        preds.sort_unstable();
        preds.dedup();
        succs.sort_unstable();
        succs.dedup();
        for &p in &preds {
            for &s in &succs {
                b.add_edge(node_of[&p], node_of[&s], EdgeKind::SequenceFlow, &text, &[cid]);
            }
        }
    }

    if cfg.events {
        let flow_nodes: Vec<usize> = b
            .graph
            .nodes
            .iter()
            .filter(|n| n.kind.is_flow_node())
            .map(|n| n.id)
            .collect();
        if !flow_nodes.is_empty() {
            let has_in: BTreeSet<usize> = b.graph.sequence_flows().map(|e| e.target).collect();
            let has_out: BTreeSet<usize> = b.graph.sequence_flows().map(|e| e.source).collect();
            let start = b.add_node(NodeKind::StartEvent, "start".into(), Vec::new());
            let end = b.add_node(NodeKind::EndEvent, "end".into(), Vec::new());
            for &n in &flow_nodes {
                if !has_in.contains(&n) {
                    b.add_edge(start, n, EdgeKind::SequenceFlow, "", &[]);
                }
                if !has_out.contains(&n) {
                    b.add_edge(n, end, EdgeKind::SequenceFlow, "", &[]);
                }
            }
        }
    }

    let mut graph = b.graph;
    for n in &mut graph.nodes {
        n.mentions.sort_unstable();
    }
    graph.normalize();
    graph
}

/// Mention ids covered by the graph: node mentions plus contracted
/// condition mentions on edges.
pub fn represented_mentions(graph: &BpmnGraph) -> BTreeSet<usize> {
    graph
        .nodes
        .iter()
        .flat_map(|n| n.mentions.iter().copied())
        .chain(graph.edges.iter().flat_map(|e| e.conditions.iter().copied()))
        .collect()
}
