//! Corpus ingestion (native JSONL and the PET JSON layout) and the canonical
//! JSONL writer.
//!
//! Native JSONL: one document per line,
//!
//! ```text
//! {"mentions":[{"end":1,"sentence_id":0,"start":0,"type":"Activity"}],
//!  "name":"doc-1",
//!  "relations":[{"source":0,"target":1,"type":"Flow"}],
//!  "tokens":[{"pos":"VB","sentence_id":0,"text":"submit","token_id":0}, ...]}
//! ```
//!
//! Instead of `mentions`, a record may carry a flat per-token `tags` array of
//! IOB strings, decoded with [`decode_iob`](super::decode_iob). Tokens may
//! carry an optional `dep` label.
//!
//! PET layout: records keyed by `"document name"`, either one record per
//! document (`tokens`, `sentence-IDs`, `ner_tags`/`ner-tags`, `relations`
//! addressed by head sentence/word ids) or one record per sentence
//! (`sentence-ID`, `tokens`, `ner-tags`). Tag and relation names use PET's
//! spelling (`B-XOR Gateway`, `actor performer`, ...).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::{json, Value};

use super::iob::decode_iob;
use super::{Corpus, Document, IobTag, MentionType, Relation, RelationType, Span, Token};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    PetJson,
    NativeJsonl,
    /// Decide per record: `"document name"` means PET, `"name"` means native.
    Auto,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pet-json" | "pet" => Ok(CorpusFormat::PetJson),
            "native-jsonl" | "jsonl" => Ok(CorpusFormat::NativeJsonl),
            "auto" => Ok(CorpusFormat::Auto),
            other => Err(Error::Config(format!("unknown corpus format `{other}`"))),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusFormat::PetJson => "pet-json",
            CorpusFormat::NativeJsonl => "native-jsonl",
            CorpusFormat::Auto => "auto",
        })
    }
}

/// Loads a corpus file. Every document is validated; the provenance tag of
/// each document is the file stem.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let provenance = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_corpus(&content, &path.display().to_string(), format, &provenance)
}

/// Parses corpus text; `origin` is used in error messages.
pub fn parse_corpus(
    content: &str,
    origin: &str,
    format: CorpusFormat,
    provenance: &str,
) -> Result<Corpus> {
    let records = split_records(content, origin)?;
    let mut documents = Vec::new();
    let mut pet_sentences: BTreeMap<String, Vec<(usize, usize, Value)>> = BTreeMap::new();
    let mut pet_order: Vec<String> = Vec::new();

    for (line, value) in records {
        let is_pet = match format {
            CorpusFormat::PetJson => true,
            CorpusFormat::NativeJsonl => false,
            CorpusFormat::Auto => value.get("document name").is_some(),
        };
        let parse_err = |msg: String| Error::Parse {
            path: origin.to_string(),
            line,
            msg,
        };
        if !is_pet {
            let record: NativeRecord =
                serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?;
            documents.push(record.into_document()?);
            continue;
        }
        let name = value
            .get("document name")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err("missing \"document name\"".into()))?
            .to_string();
        if let Some(sid) = value.get("sentence-ID") {
            let sid = sid
                .as_u64()
                .ok_or_else(|| parse_err("\"sentence-ID\" is not an integer".into()))?;
            if !pet_sentences.contains_key(&name) {
                pet_order.push(name.clone());
            }
            pet_sentences
                .entry(name)
                .or_default()
                .push((sid as usize, line, value));
        } else {
            documents.push(pet_document(&name, &value).map_err(|e| match e {
                Error::Parse { msg, .. } => parse_err(msg),
                other => other,
            })?);
        }
    }

    for name in pet_order {
        let mut sentences = pet_sentences.remove(&name).unwrap_or_default();
        sentences.sort_by_key(|(sid, _, _)| *sid);
        documents.push(pet_sentence_document(&name, &sentences, origin)?);
    }

    Corpus::new(documents, provenance)
}

fn split_records(content: &str, origin: &str) -> Result<Vec<(usize, Value)>> {
    let trimmed = content.trim_start();
    if trimmed.starts_with('[') {
        let values: Vec<Value> = serde_json::from_str(content).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: e.line(),
            msg: e.to_string(),
        })?;
        return Ok(values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (i + 1, v))
            .collect());
    }
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeRecord {
    name: String,
    tokens: Vec<NativeToken>,
    #[serde(default)]
    mentions: Option<Vec<NativeMention>>,
    #[serde(default)]
    tags: Option<Vec<String>>,
    #[serde(default)]
    relations: Vec<NativeRelation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeToken {
    text: String,
    #[serde(default)]
    pos: String,
    sentence_id: usize,
    token_id: usize,
    #[serde(default)]
    dep: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeMention {
    #[serde(rename = "type")]
    ty: String,
    sentence_id: usize,
    start: usize,
    end: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeRelation {
    source: usize,
    target: usize,
    #[serde(rename = "type")]
    ty: String,
}

impl NativeRecord {
    fn into_document(self) -> Result<Document> {
        let tokens: Vec<Token> = self
            .tokens
            .into_iter()
            .enumerate()
            .map(|(i, t)| Token {
                text: t.text,
                pos: t.pos,
                sentence_id: t.sentence_id,
                token_id: t.token_id,
                global_id: i,
                dep: t.dep,
            })
            .collect();
        let mut doc = Document {
            name: self.name,
            tokens,
            mentions: Vec::new(),
            relations: Vec::new(),
        };
        // Token numbering must hold before spans can be resolved.
        doc.validate()?;

        let spans = match (self.mentions, self.tags) {
            (Some(_), Some(_)) => {
                return Err(Error::invariant(
                    &doc.name,
                    "record has both \"mentions\" and \"tags\"",
                ))
            }
            (Some(mentions), None) => mentions
                .into_iter()
                .map(|m| {
                    Ok(Span {
                        sentence_id: m.sentence_id,
                        start: m.start,
                        end: m.end,
                        mention_type: m.ty.parse()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            (None, Some(tags)) => {
                if tags.len() != doc.tokens.len() {
                    return Err(Error::invariant(
                        &doc.name,
                        format!("{} tags for {} tokens", tags.len(), doc.tokens.len()),
                    ));
                }
                let per_sentence: Vec<Vec<IobTag>> = doc
                    .sentence_ranges()
                    .into_iter()
                    .map(|r| tags[r].iter().map(|t| t.parse()).collect())
                    .collect::<Result<_>>()?;
                decode_iob(&per_sentence)
            }
            (None, None) => Vec::new(),
        };

        let sentence_lengths: Vec<usize> =
            doc.sentence_ranges().into_iter().map(|r| r.len()).collect();
        for (i, s) in spans.iter().enumerate() {
            let ok = sentence_lengths
                .get(s.sentence_id)
                .is_some_and(|&len| s.start <= s.end && s.end < len);
            if !ok {
                return Err(Error::invariant(
                    &doc.name,
                    format!(
                        "mention {i} span {}:{}..={} is out of bounds",
                        s.sentence_id, s.start, s.end
                    ),
                ));
            }
        }
        // Mention ids in the file are array positions; keep that order when
        // it is already document order, which the canonical writer produces.
        let mut order: Vec<usize> = (0..spans.len()).collect();
        order.sort_by_key(|&i| spans[i]);
        let mut remap = vec![0; spans.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        doc.set_spans(spans);

        doc.relations = self
            .relations
            .into_iter()
            .map(|r| {
                let relation_type: RelationType = r.ty.parse()?;
                if relation_type == RelationType::NoRelation {
                    return Err(Error::UnknownRelation(r.ty));
                }
                let map = |id: usize| {
                    remap.get(id).copied().ok_or_else(|| {
                        Error::invariant(
                            &doc.name,
                            format!("relation references missing mention {id}"),
                        )
                    })
                };
                Ok(Relation {
                    source: map(r.source)?,
                    target: map(r.target)?,
                    relation_type,
                })
            })
            .collect::<Result<_>>()?;
        doc.validate()?;
        Ok(doc)
    }
}

/// Serializes one document as a canonical native record (sorted keys).
pub fn document_to_json(doc: &Document) -> Value {
    let tokens: Vec<Value> = doc
        .tokens
        .iter()
        .map(|t| {
            let mut v = json!({
                "text": t.text,
                "pos": t.pos,
                "sentence_id": t.sentence_id,
                "token_id": t.token_id,
            });
            if let Some(dep) = &t.dep {
                v["dep"] = json!(dep);
            }
            v
        })
        .collect();
    let mentions: Vec<Value> = doc
        .mentions
        .iter()
        .map(|m| {
            json!({
                "type": m.mention_type.name(),
                "sentence_id": m.sentence_id,
                "start": m.token_start,
                "end": m.token_end,
            })
        })
        .collect();
    let relations: Vec<Value> = doc
        .relations
        .iter()
        .map(|r| {
            json!({
                "source": r.source,
                "target": r.target,
                "type": r.relation_type.name(),
            })
        })
        .collect();
    json!({
        "name": doc.name,
        "tokens": tokens,
        "mentions": mentions,
        "relations": relations,
    })
}

/// Canonical native JSONL text for a corpus.
pub fn to_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for d in &corpus.documents {
        out.push_str(&document_to_json(d).to_string());
        out.push('\n');
    }
    out
}

pub fn write_jsonl(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(to_jsonl(corpus).as_bytes())
        .map_err(|e| Error::io(path, e))
}

fn normalize_name(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn pet_mention_type(name: &str) -> Option<MentionType> {
    Some(match normalize_name(name).as_str() {
        "actor" => MentionType::Actor,
        "activity" => MentionType::Activity,
        "activitydata" => MentionType::ActivityData,
        "xorgateway" => MentionType::XorGateway,
        "andgateway" => MentionType::AndGateway,
        "furtherspecification" => MentionType::FurtherSpecification,
        "conditionspecification" => MentionType::ConditionSpecification,
        _ => return None,
    })
}

/// Parses a tag in PET spelling (`B-Activity Data`) or canonical spelling.
pub fn pet_tag(s: &str) -> Result<IobTag> {
    if s == "O" {
        return Ok(IobTag::O);
    }
    let unknown = || Error::UnknownTag(s.to_string());
    let (prefix, name) = s.split_once('-').ok_or_else(unknown)?;
    let ty = pet_mention_type(name).ok_or_else(unknown)?;
    match prefix {
        "B" => Ok(IobTag::B(ty)),
        "I" => Ok(IobTag::I(ty)),
        _ => Err(unknown()),
    }
}

/// Parses a relation name in PET spelling (`actor performer`) or canonical
/// spelling. Names outside the six-type tagset are errors.
pub fn pet_relation(s: &str) -> Result<RelationType> {
    Ok(match normalize_name(s).as_str() {
        "flow" => RelationType::Flow,
        "uses" => RelationType::Uses,
        "actorperformer" => RelationType::ActorPerformer,
        "actorrecipient" => RelationType::ActorRecipient,
        "furtherspecification" => RelationType::FurtherSpecification,
        "samegateway" => RelationType::SameGateway,
        _ => return Err(Error::UnknownRelation(s.to_string())),
    })
}

fn field<'a>(v: &'a Value, names: &[&str]) -> Option<&'a Value> {
    names.iter().find_map(|n| v.get(*n))
}

fn string_list(v: &Value, what: &str) -> Result<Vec<String>> {
    let parse_err = |msg: String| Error::Parse {
        path: String::new(),
        line: 0,
        msg,
    };
    let arr = v
        .as_array()
        .ok_or_else(|| parse_err(format!("\"{what}\" is not an array")))?;
    arr.iter()
        .map(|x| match x {
            Value::String(s) => Ok(s.clone()),
            Value::Number(_) => Err(parse_err(format!(
                "\"{what}\" holds integer labels; export string labels instead"
            ))),
            _ => Err(parse_err(format!("\"{what}\" holds a non-string entry"))),
        })
        .collect()
}

fn index_list(v: &Value, what: &str) -> Result<Vec<usize>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse {
        path: String::new(),
        line: 0,
        msg: format!("\"{what}\" is not an array"),
    })?;
    arr.iter()
        .map(|x| {
            x.as_u64().map(|n| n as usize).ok_or_else(|| Error::Parse {
                path: String::new(),
                line: 0,
                msg: format!("\"{what}\" holds a non-integer entry"),
            })
        })
        .collect()
}

fn pet_document(name: &str, value: &Value) -> Result<Document> {
    let missing = |key: &str| Error::Parse {
        path: String::new(),
        line: 0,
        msg: format!("document `{name}`: missing \"{key}\""),
    };
    let tokens = string_list(value.get("tokens").ok_or_else(|| missing("tokens"))?, "tokens")?;
    let sentence_ids = index_list(
        field(value, &["sentence-IDs", "sentence_ids"]).ok_or_else(|| missing("sentence-IDs"))?,
        "sentence-IDs",
    )?;
    let tags = string_list(
        field(value, &["ner_tags", "ner-tags"]).ok_or_else(|| missing("ner_tags"))?,
        "ner_tags",
    )?;
    if tokens.len() != sentence_ids.len() || tokens.len() != tags.len() {
        return Err(Error::invariant(
            name,
            "tokens, sentence-IDs and ner_tags differ in length",
        ));
    }

    let mut sentences: Vec<Vec<(String, IobTag)>> = Vec::new();
    let mut first_id = None;
    for ((tok, sid), tag) in tokens.into_iter().zip(sentence_ids).zip(tags) {
        let base = *first_id.get_or_insert(sid);
        let idx = sid.checked_sub(base).ok_or_else(|| {
            Error::invariant(name, "sentence-IDs are not in ascending order")
        })?;
        if idx + 1 < sentences.len() || idx > sentences.len() {
            return Err(Error::invariant(name, "sentence-IDs are not contiguous"));
        }
        if idx == sentences.len() {
            sentences.push(Vec::new());
        }
        sentences[idx].push((tok, pet_tag(&tag)?));
    }
    let mut doc = build_pet_document(name, &sentences)?;

    if let Some(rel) = value.get("relations") {
        doc.relations = pet_relations(&doc, rel)?;
    }
    doc.validate()?;
    Ok(doc)
}

fn pet_sentence_document(
    name: &str,
    records: &[(usize, usize, Value)],
    origin: &str,
) -> Result<Document> {
    let mut sentences = Vec::new();
    for (_, line, v) in records {
        let wrap = |e: Error| match e {
            Error::Parse { msg, .. } => Error::Parse {
                path: origin.to_string(),
                line: *line,
                msg,
            },
            other => other,
        };
        let tokens = v
            .get("tokens")
            .ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: *line,
                msg: "missing \"tokens\"".into(),
            })
            .and_then(|t| string_list(t, "tokens").map_err(wrap))?;
        let tags = field(v, &["ner-tags", "ner_tags"])
            .ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: *line,
                msg: "missing \"ner-tags\"".into(),
            })
            .and_then(|t| string_list(t, "ner-tags").map_err(wrap))?;
        if tokens.len() != tags.len() {
            return Err(Error::invariant(name, "tokens and ner-tags differ in length"));
        }
        let sentence = tokens
            .into_iter()
            .zip(tags)
            .map(|(t, g)| Ok((t, pet_tag(&g)?)))
            .collect::<Result<Vec<_>>>()?;
        sentences.push(sentence);
    }
    let doc = build_pet_document(name, &sentences)?;
    doc.validate()?;
    Ok(doc)
}

fn build_pet_document(name: &str, sentences: &[Vec<(String, IobTag)>]) -> Result<Document> {
    let mut doc = Document::from_sentences(
        name,
        sentences
            .iter()
            .map(|s| s.iter().map(|(t, _)| (t.clone(), String::new()))),
    );
    let tags: Vec<Vec<IobTag>> = sentences
        .iter()
        .map(|s| s.iter().map(|(_, g)| *g).collect())
        .collect();
    doc.set_spans(decode_iob(&tags));
    if let Some(t) = doc.tokens.iter().find(|t| t.text.is_empty()) {
        return Err(Error::invariant(
            name,
            format!("empty token at {}:{}", t.sentence_id, t.token_id),
        ));
    }
    Ok(doc)
}

fn pet_relations(doc: &Document, rel: &Value) -> Result<Vec<Relation>> {
    let rows: Vec<Value> = match rel {
        Value::Array(items) => items.clone(),
        Value::Object(map) => {
            let cols: Vec<(&String, &Vec<Value>)> = map
                .iter()
                .filter_map(|(k, v)| v.as_array().map(|a| (k, a)))
                .collect();
            let n = cols.first().map_or(0, |(_, a)| a.len());
            if cols.iter().any(|(_, a)| a.len() != n) {
                return Err(Error::invariant(&doc.name, "relation columns differ in length"));
            }
            (0..n)
                .map(|i| {
                    Value::Object(
                        cols.iter()
                            .map(|(k, a)| ((*k).clone(), a[i].clone()))
                            .collect(),
                    )
                })
                .collect()
        }
        _ => return Err(Error::invariant(&doc.name, "\"relations\" has unknown shape")),
    };

    let lookup = |row: &Value, side: &str| -> Result<usize> {
        let get = |key: &str| {
            row.get(format!("{side}-head-{key}").as_str())
                .and_then(Value::as_u64)
                .map(|n| n as usize)
                .ok_or_else(|| {
                    Error::invariant(&doc.name, format!("relation lacks {side}-head-{key}"))
                })
        };
        let sid = get("sentence-ID")?;
        let wid = get("word-ID")?;
        let global = doc.global_index(sid, wid).ok_or_else(|| {
            Error::invariant(&doc.name, format!("relation head {sid}:{wid} out of range"))
        })?;
        doc.mention_at(global).ok_or_else(|| {
            Error::invariant(
                &doc.name,
                format!("relation head {sid}:{wid} is not inside a mention"),
            )
        })
    };

    let mut out = Vec::new();
    for row in &rows {
        let ty = row
            .get("relation-type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::invariant(&doc.name, "relation lacks relation-type"))?;
        let relation_type = pet_relation(ty)?;
        out.push(Relation {
            source: lookup(row, "source")?,
            target: lookup(row, "target")?,
            relation_type,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_record_with_tags_decodes_mentions() {
        let line = r#"{"name":"d1","tokens":[{"text":"submit","pos":"VB","sentence_id":0,"token_id":0},{"text":"request","pos":"NN","sentence_id":0,"token_id":1}],"tags":["B-Activity","I-Activity"]}"#;
        let c = parse_corpus(line, "mem", CorpusFormat::NativeJsonl, "T").unwrap();
        let d = &c.documents[0];
        assert_eq!(d.mentions.len(), 1);
        assert_eq!(d.mentions[0].mention_type, MentionType::Activity);
        assert_eq!((d.mentions[0].token_start, d.mentions[0].token_end), (0, 1));
        assert_eq!(d.mentions[0].text, "submit request");
        assert_eq!(c.provenance, vec!["T".to_string()]);
    }

    #[test]
    fn stray_inside_tag_is_repaired_on_load() {
        let line = r#"{"name":"d1","tokens":[{"text":"a","sentence_id":0,"token_id":0},{"text":"b","sentence_id":0,"token_id":1}],"tags":["I-Activity","O"]}"#;
        let c = parse_corpus(line, "mem", CorpusFormat::Auto, "T").unwrap();
        assert_eq!(c.documents[0].mentions.len(), 1);
        assert_eq!(c.documents[0].mentions[0].token_start, 0);
    }

    #[test]
    fn parse_error_reports_line() {
        let text = "\n{\"name\": 3}\n";
        match parse_corpus(text, "f.jsonl", CorpusFormat::NativeJsonl, "T") {
            Err(Error::Parse { path, line, .. }) => {
                assert_eq!(path, "f.jsonl");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_tag_and_relation_are_errors() {
        let bad_tag = r#"{"name":"d","tokens":[{"text":"a","sentence_id":0,"token_id":0}],"tags":["B-Event"]}"#;
        assert!(matches!(
            parse_corpus(bad_tag, "m", CorpusFormat::NativeJsonl, "T"),
            Err(Error::UnknownTag(_))
        ));
        let bad_rel = r#"{"name":"d","tokens":[{"text":"a","sentence_id":0,"token_id":0},{"text":"b","sentence_id":0,"token_id":1}],"tags":["B-Activity","B-Activity"],"relations":[{"source":0,"target":1,"type":"Loop"}]}"#;
        assert!(matches!(
            parse_corpus(bad_rel, "m", CorpusFormat::NativeJsonl, "T"),
            Err(Error::UnknownRelation(_))
        ));
    }

    #[test]
    fn invariant_violation_names_document() {
        let text = r#"{"name":"doc-x","tokens":[{"text":"a","sentence_id":0,"token_id":0}],"mentions":[{"type":"Actor","sentence_id":0,"start":0,"end":3}]}"#;
        let err = parse_corpus(text, "m", CorpusFormat::NativeJsonl, "T").unwrap_err();
        assert!(err.to_string().contains("doc-x"), "{err}");
        assert!(err.to_string().contains("mention 0"), "{err}");
    }

    #[test]
    fn pet_document_layout() {
        let text = r#"[{"document name":"doc-1.1","tokens":["The","clerk","checks","it","."],"tokens-IDs":[0,1,2,0,1],"sentence-IDs":[0,0,0,1,1],"ner_tags":["O","B-Actor","B-Activity","B-Activity Data","O"],"relations":{"source-head-sentence-ID":[0],"source-head-word-ID":[2],"relation-type":["actor performer"],"target-head-sentence-ID":[0],"target-head-word-ID":[1]}}]"#;
        let c = parse_corpus(text, "pet.json", CorpusFormat::Auto, "PET").unwrap();
        let d = &c.documents[0];
        assert_eq!(d.sentence_count(), 2);
        assert_eq!(d.mentions.len(), 3);
        assert_eq!(d.mentions[2].mention_type, MentionType::ActivityData);
        assert_eq!(
            d.relations,
            vec![Relation {
                source: 1,
                target: 0,
                relation_type: RelationType::ActorPerformer
            }]
        );
    }

    #[test]
    fn pet_sentence_layout_groups_by_document() {
        let text = concat!(
            r#"{"document name":"a","sentence-ID":1,"tokens":["Then","ship"],"ner-tags":["O","B-Activity"]}"#,
            "\n",
            r#"{"document name":"a","sentence-ID":0,"tokens":["If","ok"],"ner-tags":["B-XOR Gateway","B-Condition Specification"]}"#,
            "\n",
            r#"{"document name":"b","sentence-ID":0,"tokens":["x"],"ner-tags":["O"]}"#,
        );
        let c = parse_corpus(text, "m", CorpusFormat::PetJson, "PET").unwrap();
        assert_eq!(c.documents.len(), 2);
        let a = &c.documents[0];
        assert_eq!(a.tokens[0].text, "If");
        assert_eq!(a.mentions[0].mention_type, MentionType::XorGateway);
        assert_eq!(a.mentions[2].sentence_id, 1);
    }

    #[test]
    fn pet_unknown_relation_surfaces() {
        let text = r#"[{"document name":"d","tokens":["a","b"],"sentence-IDs":[0,0],"ner_tags":["B-Activity","B-Activity"],"relations":[{"source-head-sentence-ID":0,"source-head-word-ID":0,"relation-type":"loop","target-head-sentence-ID":0,"target-head-word-ID":1}]}]"#;
        assert!(matches!(
            parse_corpus(text, "m", CorpusFormat::PetJson, "PET"),
            Err(Error::UnknownRelation(_))
        ));
    }

    #[test]
    fn pet_integer_labels_rejected() {
        let text = r#"[{"document name":"d","tokens":["a"],"sentence-IDs":[0],"ner_tags":[1]}]"#;
        let err = parse_corpus(text, "m", CorpusFormat::PetJson, "PET").unwrap_err();
        assert!(err.to_string().contains("integer labels"), "{err}");
    }

    #[test]
    fn canonical_writer_sorts_keys() {
        let line = r#"{"name":"d1","tokens":[{"text":"submit","pos":"VB","sentence_id":0,"token_id":0}],"tags":["B-Activity"]}"#;
        let c = parse_corpus(line, "m", CorpusFormat::NativeJsonl, "T").unwrap();
        let out = to_jsonl(&c);
        assert_eq!(
            out,
            "{\"mentions\":[{\"end\":0,\"sentence_id\":0,\"start\":0,\"type\":\"Activity\"}],\"name\":\"d1\",\"relations\":[],\"tokens\":[{\"pos\":\"VB\",\"sentence_id\":0,\"text\":\"submit\",\"token_id\":0}]}\n"
        );
    }
}
