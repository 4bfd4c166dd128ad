//! Rule-based entity resolution over Actor and ActivityData mentions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Mention, MentionType};
use crate::error::Result;

pub const PRONOUNS: [&str; 7] = ["he", "she", "they", "it", "him", "her", "them"];
const ARTICLES: [&str; 3] = ["the", "a", "an"];

/// Largest sentence distance a pronoun may reach back to its antecedent.
pub const PRONOUN_WINDOW: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolveConfig {
    pub exact_match: bool,
    pub head_match: bool,
    pub pronouns: bool,
}

impl Default for ResolveConfig {
    fn default() -> Self {
        ResolveConfig {
            exact_match: true,
            head_match: true,
            pronouns: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityCluster {
    pub entity_type: MentionType,
    /// Mention id of the most complete member.
    pub canonical: usize,
    /// Member mention ids, ascending.
    pub members: Vec<usize>,
}

fn normalize(text: &str) -> String {
    let lower = text.to_lowercase();
    let mut words: Vec<&str> = lower.split_whitespace().collect();
    if words.len() > 1 && ARTICLES.contains(&words[0]) {
        words.remove(0);
    }
    words.join(" ")
}

fn head(text: &str) -> String {
    text.split_whitespace()
        .last()
        .unwrap_or_default()
        .to_lowercase()
}

pub fn is_pronoun(m: &Mention) -> bool {
    PRONOUNS.contains(&m.text.to_lowercase().as_str())
}

fn resolvable(t: MentionType) -> bool {
    matches!(t, MentionType::Actor | MentionType::ActivityData)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = i;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups coreferent mentions.
///
/// Actor and ActivityData mentions are linked by exact text after
/// lowercasing and dropping a leading article, then by equal last token;
/// pronoun Actors join the nearest preceding non-pronoun Actor at most
/// [`PRONOUN_WINDOW`] sentences back. Pronouns take no part in the two text
/// rules. All other mentions are singletons. Clusters come out ordered by
/// their first member in document order.
pub fn cluster_mentions(
    _document: &Document,
    mentions: &[Mention],
    cfg: &ResolveConfig,
) -> Vec<EntityCluster> {
    let mut order: Vec<usize> = (0..mentions.len()).collect();
    order.sort_by_key(|&i| (mentions[i].span(), mentions[i].mention_id));
    let ms: Vec<&Mention> = order.iter().map(|&i| &mentions[i]).collect();
    let mut uf = UnionFind((0..ms.len()).collect());

    let rule = |key: &dyn Fn(&Mention) -> String, uf: &mut UnionFind| {
        let mut first: HashMap<(MentionType, String), usize> = HashMap::new();
        for (i, m) in ms.iter().enumerate() {
            if !resolvable(m.mention_type) || is_pronoun(m) {
                continue;
            }
            let k = key(m);
            if k.is_empty() {
                continue;
            }
            match first.get(&(m.mention_type, k.clone())) {
                Some(&j) => uf.union(i, j),
                None => {
                    first.insert((m.mention_type, k), i);
                }
            }
        }
    };
    if cfg.exact_match {
        rule(&|m| normalize(&m.text), &mut uf);
    }
    if cfg.head_match {
        rule(&|m| head(&m.text), &mut uf);
    }
    if cfg.pronouns {
        for (i, m) in ms.iter().enumerate() {
            if m.mention_type != MentionType::Actor || !is_pronoun(m) {
                continue;
            }
            let antecedent = (0..i).rev().find(|&j| {
                ms[j].mention_type == MentionType::Actor && !is_pronoun(ms[j])
            });
            if let Some(j) = antecedent {
                if m.sentence_id - ms[j].sentence_id <= PRONOUN_WINDOW {
                    uf.union(i, j);
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..ms.len() {
        let root = uf.find(i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
        .into_iter()
        .map(|g| {
            let mut best = g[0];
            for &i in &g[1..] {
                if ms[i].text.chars().count() > ms[best].text.chars().count() {
                    best = i;
                }
            }
            let mut members: Vec<usize> = g.iter().map(|&i| ms[i].mention_id).collect();
            members.sort_unstable();
            EntityCluster {
                entity_type: ms[g[0]].mention_type,
                canonical: ms[best].mention_id,
                members,
            }
        })
        .collect()
}

pub fn clusters_to_json(clusters: &[EntityCluster]) -> Result<String> {
    Ok(serde_json::to_string_pretty(clusters)?)
}
