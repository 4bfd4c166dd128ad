//! Seeded generator of annotated process descriptions.
//!
//! Documents are built from sentence templates over a small office and
//! logistics vocabulary: sequential steps, exclusive branches with
//! conditions, parallel steps, further specifications, recipients,
//! pronoun references and sentences without process content. Every
//! document carries gold mentions and relations.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, MentionType, Relation, RelationType, Span};
use crate::error::Result;
use crate::preprocess::{pos_tag, PosTagger};

const ACTORS: &[&str] = &[
    "the clerk",
    "the manager",
    "the customer",
    "the technician",
    "the agent",
    "the supervisor",
    "the accountant",
    "the warehouse worker",
    "the sales representative",
    "the applicant",
    "the engineer",
    "the secretary",
    "the officer",
    "the assistant",
    "the driver",
    "the inspector",
    "the team lead",
    "the buyer",
    "the office staff member",
    "the front desk employee",
    "the customer service agent",
    "the quality assurance team",
    "the shipping department",
    "the IT specialist",
];

const DATA: &[&str] = &[
    "the invoice",
    "the order",
    "the claim",
    "the report",
    "the form",
    "the contract",
    "the application",
    "the payment",
    "the ticket",
    "the shipment",
    "the document",
    "the receipt",
    "the purchase order",
    "the delivery note",
    "the request",
    "the parcel",
    "the quote",
    "the offer",
    "the budget plan",
    "the customer file",
    "the account",
    "the database entry",
    "the status",
    "the inventory list",
    "the registration",
];

const DATA_MODIFIERS: &[&str] = &["digital", "new", "current", "internal", "updated"];

/// (third person, base, gerund) forms of activity verbs.
const VERBS: &[(&str, &str, &str)] = &[
    ("checks", "check", "checking"),
    ("reviews", "review", "reviewing"),
    ("approves", "approve", "approving"),
    ("rejects", "reject", "rejecting"),
    ("sends", "send", "sending"),
    ("records", "record", "recording"),
    ("prepares", "prepare", "preparing"),
    ("signs", "sign", "signing"),
    ("forwards", "forward", "forwarding"),
    ("registers", "register", "registering"),
    ("updates", "update", "updating"),
    ("archives", "archive", "archiving"),
    ("validates", "validate", "validating"),
    ("ships", "ship", "shipping"),
    ("packs", "pack", "packing"),
    ("calculates", "calculate", "calculating"),
    ("submits", "submit", "submitting"),
    ("enters", "enter", "entering"),
    ("verifies", "verify", "verifying"),
    ("schedules", "schedule", "scheduling"),
    ("inspects", "inspect", "inspecting"),
    ("files", "file", "filing"),
    ("prints", "print", "printing"),
    ("scans", "scan", "scanning"),
    ("creates", "create", "creating"),
    ("completes", "complete", "completing"),
    ("processes", "process", "processing"),
    ("stores", "store", "storing"),
    ("consults", "consult", "consulting"),
    ("searches", "search", "searching"),
    ("starts", "start", "starting"),
    ("opens", "open", "opening"),
    ("closes", "close", "closing"),
    ("collects", "collect", "collecting"),
    ("retrieves", "retrieve", "retrieving"),
    ("logs", "log", "logging"),
    ("assigns", "assign", "assigning"),
    ("confirms", "confirm", "confirming"),
    ("reserves", "reserve", "reserving"),
    ("returns", "return", "returning"),
    ("evaluates", "evaluate", "evaluating"),
    ("issues", "issue", "issuing"),
];

const NOTIFY_VERBS: &[&str] = &["notifies", "informs", "contacts", "calls", "asks"];

const TOOLS: &[&str] = &[
    "the online portal",
    "the ERP system",
    "a spreadsheet",
    "the scanner",
    "the internal database",
    "the company website",
    "a standard template",
    "the mail server",
    "the automated system",
    "the tracking system",
    "the booking tool",
];

const ADJECTIVES: &[&str] = &[
    "valid",
    "invalid",
    "complete",
    "incomplete",
    "approved",
    "rejected",
    "missing",
    "late",
    "damaged",
    "correct",
    "urgent",
    "available",
    "on hold",
    "out of stock",
    "too high",
    "in order",
    "overdue",
    "signed",
    "lost",
    "paid",
];

const COPULAS: &[&str] = &["is", "is not", "is currently", "is still", "was"];

const NOISE: &[&str] = &[
    "This step usually takes a few minutes .",
    "The process is part of the standard procedure .",
    "All steps are documented for later audits .",
    "Most cases are handled on the same day .",
    "The whole procedure was introduced last year .",
    "Some of these tasks are done by temporary staff .",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    pub documents: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            documents: 60,
            min_sentences: 3,
            max_sentences: 7,
            seed: 0,
        }
    }
}

struct Builder<'a> {
    rng: &'a mut ChaCha8Rng,
    sentences: Vec<Vec<String>>,
    spans: Vec<Span>,
    relations: Vec<(usize, usize, RelationType)>,
    /// Last mentioned non-pronoun actor phrase, for pronoun sentences.
    last_actor: Option<usize>,
}

impl<'a> Builder<'a> {
    fn words(&mut self, text: &str) -> (usize, usize) {
        let sentence = self.sentences.last_mut().expect("open sentence");
        let start = sentence.len();
        sentence.extend(text.split(' ').filter(|w| !w.is_empty()).map(str::to_string));
        (start, sentence.len() - 1)
    }

    fn mention(&mut self, text: &str, t: MentionType) -> usize {
        let (start, end) = self.words(text);
        self.spans.push(Span {
            sentence_id: self.sentences.len() - 1,
            start,
            end,
            mention_type: t,
        });
        self.spans.len() - 1
    }

    fn relate(&mut self, a: usize, b: usize, t: RelationType) {
        self.relations.push((a, b, t));
    }

    fn open(&mut self) {
        self.sentences.push(Vec::new());
    }

    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        *items.choose(self.rng).expect("non-empty vocabulary")
    }

    fn capitalize_first(&mut self) {
        if let Some(w) = self.sentences.last_mut().and_then(|s| s.first_mut()) {
            let mut c = w.chars();
            if let Some(f) = c.next() {
                *w = f.to_uppercase().chain(c).collect();
            }
        }
    }

    fn actor(&mut self) -> usize {
        let a = self.pick(ACTORS);
        let m = self.mention(a, MentionType::Actor);
        self.last_actor = Some(m);
        m
    }

    fn data(&mut self) -> usize {
        let d = self.pick(DATA);
        let text = if self.rng.gen_bool(0.15) {
            let m = self.pick(DATA_MODIFIERS);
            d.replacen("the ", &format!("the {m} "), 1)
        } else {
            d.to_string()
        };
        self.mention(&text, MentionType::ActivityData)
    }

    fn adverb(&mut self) {
        if self.rng.gen_bool(0.1) {
            let w = self.pick(&["right away", "immediately", "promptly"]);
            self.words(w);
        }
    }

    /// `<verb> <data>` with optional recipient or tool and an optional
    /// purpose (`to <verb> ...`) or means (`by <verb>ing ...`) activity, for
    /// a known actor. Returns the activities in flow order.
    fn action(&mut self, actor: usize) -> Vec<usize> {
        if self.rng.gen_bool(0.2) {
            let v = self.pick(NOTIFY_VERBS);
            let act = self.mention(v, MentionType::Activity);
            self.relate(act, actor, RelationType::ActorPerformer);
            let to = self.pick(ACTORS);
            let r = self.mention(to, MentionType::Actor);
            self.relate(act, r, RelationType::ActorRecipient);
            self.adverb();
            return vec![act];
        }
        let (verb, _, _) = self.pick(VERBS);
        let act = self.mention(verb, MentionType::Activity);
        self.relate(act, actor, RelationType::ActorPerformer);
        let data = self.data();
        self.relate(act, data, RelationType::Uses);
        if self.rng.gen_bool(0.15) {
            self.words("to");
            let to = self.pick(ACTORS);
            let r = self.mention(to, MentionType::Actor);
            self.relate(act, r, RelationType::ActorRecipient);
        } else if self.rng.gen_bool(0.2) {
            self.tool(act);
        }
        let mut acts = vec![act];
        let follow = match self.rng.gen_range(0..10) {
            0 | 1 => {
                self.words("to");
                let (_, base, _) = self.pick(VERBS);
                Some(self.mention(base, MentionType::Activity))
            }
            2 => {
                self.words("by");
                let (_, _, gerund) = self.pick(VERBS);
                Some(self.mention(gerund, MentionType::Activity))
            }
            _ => None,
        };
        if let Some(a2) = follow {
            self.relate(a2, actor, RelationType::ActorPerformer);
            if self.rng.gen_bool(0.3) {
                self.words("for");
            }
            let d2 = self.data();
            self.relate(a2, d2, RelationType::Uses);
            self.relate(act, a2, RelationType::Flow);
            acts.push(a2);
        }
        self.adverb();
        acts
    }

    fn tool(&mut self, act: usize) {
        let tool = self.pick(TOOLS);
        let prep = self.pick(&["using", "via", "with"]);
        let fs = self.mention(&format!("{prep} {tool}"), MentionType::FurtherSpecification);
        self.relate(act, fs, RelationType::FurtherSpecification);
    }

    fn subject(&mut self) -> usize {
        if self.last_actor.is_some() && self.rng.gen_bool(0.15) {
            let p = self.pick(&["he", "she"]);
            self.mention(p, MentionType::Actor)
        } else {
            self.actor()
        }
    }

    /// `<actor> <action>`; returns the activities in flow order.
    fn clause(&mut self) -> Vec<usize> {
        let actor = self.subject();
        self.action(actor)
    }

    fn condition(&mut self) -> usize {
        let first = self.condition_text();
        let text = if self.rng.gen_bool(0.2) {
            format!("{first} or {}", self.condition_text())
        } else {
            first
        };
        self.mention(&text, MentionType::ConditionSpecification)
    }

    fn condition_text(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => format!("{} exceeds {}", self.pick(&["the amount", "the total", "the price", "the cost"]), self.pick(&["the limit", "the budget", "1000 euros"])),
            1 => format!("{} {}", self.pick(ACTORS), self.pick(&["agrees", "declines", "is satisfied", "does not respond"])),
            _ => format!("{} {} {}", self.pick(DATA), self.pick(COPULAS), self.pick(ADJECTIVES)),
        }
    }

    fn flow_into(&mut self, exits: &[usize], entry: usize) {
        for &e in exits {
            self.relate(e, entry, RelationType::Flow);
        }
    }

    fn end_sentence(&mut self) {
        self.words(".");
        self.capitalize_first();
    }

    /// Emits one block of one or two sentences; returns its exits.
    fn block(&mut self, exits: &[usize], first: bool) -> Vec<usize> {
        let kind = if first { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..10) };
        match kind {
            // When <data> arrives, <clause>.
            0 if first => {
                self.open();
                let d = self.pick(DATA);
                let d = if self.rng.gen_bool(0.4) {
                    let head = self.pick(&["a request", "a notice", "a question", "an inquiry"]);
                    format!("{head} for {d}")
                } else {
                    d.to_string()
                };
                let what = self.pick(&["arrives", "comes in", "is received"]);
                self.words(&format!("when {d} {what} ,"));
                let acts = self.clause();
                self.end_sentence();
                vec![*acts.last().expect("non-empty")]
            }
            // Sequential clause, optionally chained with "and then".
            0..=2 => {
                self.open();
                if !first && self.rng.gen_bool(0.5) {
                    let w = self.pick(&["then", "afterwards", "next", "after that"]);
                    self.words(&format!("{w} ,"));
                }
                let acts = self.clause();
                self.flow_into(exits, acts[0]);
                let mut last = *acts.last().expect("non-empty");
                if self.rng.gen_bool(0.3) {
                    self.words("and then");
                    let actor = self.last_performer(acts[0]);
                    let more = self.action(actor);
                    self.relate(last, more[0], RelationType::Flow);
                    last = *more.last().expect("non-empty");
                }
                self.end_sentence();
                vec![last]
            }
            3..=5 => self.xor_block(exits),
            6..=7 => self.and_block(exits),
            8 => {
                self.open();
                let s = self.pick(NOISE);
                self.words(s);
                self.capitalize_first();
                exits.to_vec()
            }
            _ => {
                self.open();
                let acts = self.clause();
                self.flow_into(exits, acts[0]);
                self.words("within");
                let n = self.pick(&["two", "three", "five", "ten"]);
                let fs = self.mention(&format!("{n} days"), MentionType::FurtherSpecification);
                self.relate(acts[0], fs, RelationType::FurtherSpecification);
                self.end_sentence();
                vec![*acts.last().expect("non-empty")]
            }
        }
    }

    fn last_performer(&self, activity: usize) -> usize {
        self.relations
            .iter()
            .find(|(a, _, t)| *a == activity && *t == RelationType::ActorPerformer)
            .map(|(_, b, _)| *b)
            .expect("every activity has a performer")
    }

    fn xor_block(&mut self, exits: &[usize]) -> Vec<usize> {
        self.open();
        let marker = self.pick(&["if", "if", "if", "in case"]);
        let gw = self.mention(marker, MentionType::XorGateway);
        self.flow_into(exits, gw);
        let cond = self.condition();
        self.words(",");
        self.relate(gw, cond, RelationType::Flow);
        let acts = self.clause();
        self.relate(cond, acts[0], RelationType::Flow);
        self.end_sentence();
        let mut out = vec![*acts.last().expect("non-empty")];

        self.open();
        match self.rng.gen_range(0..3) {
            0 => {
                let gw2 = self.mention("otherwise", MentionType::XorGateway);
                self.words(",");
                self.relate(gw, gw2, RelationType::SameGateway);
                let acts2 = self.clause();
                self.relate(gw2, acts2[0], RelationType::Flow);
                out.extend(acts2.last());
            }
            _ => {
                let gw2 = self.mention(marker, MentionType::XorGateway);
                self.relate(gw, gw2, RelationType::SameGateway);
                let cond2 = self.condition();
                self.words(",");
                self.relate(gw2, cond2, RelationType::Flow);
                let acts2 = self.clause();
                self.relate(cond2, acts2[0], RelationType::Flow);
                out.extend(acts2.last());
            }
        }
        self.end_sentence();
        out
    }

    fn and_block(&mut self, exits: &[usize]) -> Vec<usize> {
        let ends = |a: &[usize], b: &[usize]| vec![*a.last().expect("non-empty"), *b.last().expect("non-empty")];
        self.open();
        match self.rng.gen_range(0..6) {
            0..=2 => {
                let a1 = self.clause();
                let marker = self.pick(&["and simultaneously", "and simultaneously", "and at the same time", "and in parallel"]);
                let gw = self.mention(marker, MentionType::AndGateway);
                let actor = self.last_performer(a1[0]);
                let a2 = self.action(actor);
                self.flow_into(exits, gw);
                self.relate(gw, a1[0], RelationType::Flow);
                self.relate(gw, a2[0], RelationType::Flow);
                self.end_sentence();
                ends(&a1, &a2)
            }
            3 => {
                let gw = self.mention("while", MentionType::AndGateway);
                self.flow_into(exits, gw);
                let a1 = self.clause();
                self.words(",");
                let a2 = self.clause();
                self.relate(gw, a1[0], RelationType::Flow);
                self.relate(gw, a2[0], RelationType::Flow);
                self.end_sentence();
                ends(&a1, &a2)
            }
            4 => {
                let gw = self.mention("in parallel", MentionType::AndGateway);
                self.words(",");
                self.flow_into(exits, gw);
                let a1 = self.clause();
                self.words("and");
                let a2 = self.clause();
                self.relate(gw, a1[0], RelationType::Flow);
                self.relate(gw, a2[0], RelationType::Flow);
                self.end_sentence();
                ends(&a1, &a2)
            }
            // <actor> <verb> <data> by <verb>ing <data> and simultaneously <verb>ing <data>.
            _ => {
                let actor = self.subject();
                let (verb, _, _) = self.pick(VERBS);
                let act = self.mention(verb, MentionType::Activity);
                self.relate(act, actor, RelationType::ActorPerformer);
                let d = self.data();
                self.relate(act, d, RelationType::Uses);
                self.flow_into(exits, act);
                self.words("by");
                let g1 = self.gerund_action(actor);
                let marker = self.pick(&["and simultaneously", "and at the same time"]);
                let gw = self.mention(marker, MentionType::AndGateway);
                let g2 = self.gerund_action(actor);
                self.relate(act, gw, RelationType::Flow);
                self.relate(gw, g1, RelationType::Flow);
                self.relate(gw, g2, RelationType::Flow);
                self.end_sentence();
                vec![g1, g2]
            }
        }
    }

    /// `<verb>ing <data> [<spec>]`.
    fn gerund_action(&mut self, actor: usize) -> usize {
        let (_, _, gerund) = self.pick(VERBS);
        let act = self.mention(gerund, MentionType::Activity);
        self.relate(act, actor, RelationType::ActorPerformer);
        let d = self.data();
        self.relate(act, d, RelationType::Uses);
        if self.rng.gen_bool(0.3) {
            self.tool(act);
        }
        act
    }
}

/// One synthetic document with POS tags from `tagger`.
pub fn synthetic_document(
    rng: &mut ChaCha8Rng,
    name: &str,
    sentences: usize,
    tagger: &PosTagger,
) -> Document {
    let mut b = Builder {
        rng,
        sentences: Vec::new(),
        spans: Vec::new(),
        relations: Vec::new(),
        last_actor: None,
    };
    let mut exits = Vec::new();
    while b.sentences.len() < sentences {
        exits = b.block(&exits, b.sentences.is_empty());
    }
    let Builder {
        sentences,
        spans,
        relations,
        ..
    } = b;

    let mut doc = Document::from_sentences(
        name,
        sentences.iter().map(|s| {
            let tags = pos_tag(s, tagger);
            s.iter().cloned().zip(tags).collect::<Vec<_>>()
        }),
    );
    doc.set_spans(spans.clone());
    let ids: HashMap<Span, usize> = doc.mentions.iter().map(|m| (m.span(), m.mention_id)).collect();
    let mut rels: Vec<Relation> = relations
        .into_iter()
        .map(|(a, b, t)| Relation {
            source: ids[&spans[a]],
            target: ids[&spans[b]],
            relation_type: t,
        })
        .collect();
    rels.sort();
    rels.dedup();
    doc.relations = rels;
    doc
}

/// A seeded corpus of synthetic documents named `synth-000`, `synth-001`, ...
pub fn synthetic_corpus(cfg: &SynthConfig) -> Result<Corpus> {
    let tagger = PosTagger::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let docs = (0..cfg.documents)
        .map(|i| {
            let n = rng.gen_range(cfg.min_sentences..=cfg.max_sentences.max(cfg.min_sentences));
            synthetic_document(&mut rng, &format!("synth-{i:03}"), n, &tagger)
        })
        .collect();
    Corpus::new(docs, "SYNTH")
}

/// A corpus with exactly the given document, sentence and per-type mention
/// counts (one-token mentions over filler words, no relations). Useful for
/// checking table arithmetic.
pub fn count_matched_corpus(
    documents: usize,
    sentences: usize,
    counts: &[(MentionType, usize)],
) -> Result<Corpus> {
    assert!(documents > 0 && sentences >= documents, "need at least one sentence per document");
    let total: usize = counts.iter().map(|(_, n)| n).sum();
    let mut types: Vec<MentionType> = counts
        .iter()
        .flat_map(|&(t, n)| std::iter::repeat_n(t, n))
        .collect();
    types.reverse();
    let per_sentence = total.div_ceil(sentences).max(1);
    let mut docs = Vec::with_capacity(documents);
    for d in 0..documents {
        let n_sent = sentences / documents + usize::from(d < sentences % documents);
        let mut spans = Vec::new();
        let mut sents = Vec::new();
        for s in 0..n_sent {
            let mut words = Vec::new();
            for k in 0..per_sentence {
                words.push((format!("w{k}"), "NN".to_string()));
                if let Some(t) = types.pop() {
                    spans.push(Span {
                        sentence_id: s,
                        start: k,
                        end: k,
                        mention_type: t,
                    });
                }
            }
            sents.push(words);
        }
        let mut doc = Document::from_sentences(format!("doc-{d:03}"), sents);
        doc.set_spans(spans);
        docs.push(doc);
    }
    Corpus::new(docs, "COUNTS")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_stats;

    #[test]
    fn corpus_is_valid_and_deterministic() {
        let cfg = SynthConfig {
            documents: 30,
            ..Default::default()
        };
        let a = synthetic_corpus(&cfg).unwrap();
        let b = synthetic_corpus(&cfg).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        for d in &a.documents {
            assert!(d.sentence_count() >= cfg.min_sentences);
            assert!(!d.mentions.is_empty());
        }
    }

    #[test]
    fn every_type_occurs() {
        let c = synthetic_corpus(&SynthConfig::default()).unwrap();
        let stats = corpus_stats(&c).unwrap();
        for t in MentionType::ALL {
            assert!(stats.row(t).absolute > 0, "{t} missing");
        }
        let rels: std::collections::BTreeSet<_> = c
            .documents
            .iter()
            .flat_map(|d| d.relations.iter().map(|r| r.relation_type))
            .collect();
        assert_eq!(rels.len(), 6);
    }

    #[test]
    fn vocabulary_avoids_the_library_domain() {
        let c = synthetic_corpus(&SynthConfig::default()).unwrap();
        for d in &c.documents {
            for t in &d.tokens {
                let w = t.text.to_lowercase();
                assert!(!["book", "library", "requester", "catalog", "loan"].contains(&w.as_str()), "{w}");
            }
        }
    }

    #[test]
    fn count_matching() {
        let c = count_matched_corpus(3, 7, &[(MentionType::Actor, 5), (MentionType::AndGateway, 2)]).unwrap();
        let s = corpus_stats(&c).unwrap();
        assert_eq!((s.documents, s.sentences, s.mentions), (3, 7, 7));
        assert_eq!(s.row(MentionType::Actor).absolute, 5);
    }
}
