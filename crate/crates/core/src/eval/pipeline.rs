use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Mention};
use crate::error::{Error, Result};

/// A percentage in tenths, rounded half-up (`901` is `90.1%`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Tenths(pub u64);

impl Tenths {
    /// `100 * numerator / denominator`, half-up to one decimal; 0 when the
    /// denominator is 0.
    pub fn percent(numerator: u64, denominator: u64) -> Tenths {
        if denominator == 0 {
            return Tenths(0);
        }
        Tenths((numerator * 2000 + denominator) / (2 * denominator))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl fmt::Display for Tenths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}%", self.0 / 10, self.0 % 10)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub gold: u64,
    pub predicted: u64,
    pub correct: u64,
}

impl Counts {
    pub fn new(gold: u64, predicted: u64, correct: u64) -> Result<Counts> {
        if correct > gold.min(predicted) {
            return Err(Error::Config(format!(
                "correct count {correct} exceeds min(gold {gold}, predicted {predicted})"
            )));
        }
        Ok(Counts {
            gold,
            predicted,
            correct,
        })
    }

    pub fn precision(&self) -> Tenths {
        Tenths::percent(self.correct, self.predicted)
    }

    pub fn recall(&self) -> Tenths {
        Tenths::percent(self.correct, self.gold)
    }

    /// Harmonic mean of the unrounded precision and recall, which equals
    /// `2 * correct / (gold + predicted)`.
    pub fn f1(&self) -> Tenths {
        Tenths::percent(2 * self.correct, self.gold + self.predicted)
    }

    fn add(&mut self, other: &Counts) {
        self.gold += other.gold;
        self.predicted += other.predicted;
        self.correct += other.correct;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DocumentScore {
    pub name: String,
    pub words: u64,
    pub elements: Counts,
    pub relations: Counts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineScore {
    pub documents: Vec<DocumentScore>,
    pub words: u64,
    pub elements: Counts,
    pub relations: Counts,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanMode {
    #[default]
    Exact,
    /// Same type and overlapping tokens.
    Relaxed,
}

impl PipelineScore {
    /// Totals are sums over the rows.
    pub fn from_rows(documents: Vec<DocumentScore>) -> PipelineScore {
        let mut elements = Counts::default();
        let mut relations = Counts::default();
        let mut words = 0;
        for d in &documents {
            words += d.words;
            elements.add(&d.elements);
            relations.add(&d.relations);
        }
        PipelineScore {
            documents,
            words,
            elements,
            relations,
        }
    }

    /// Parses rows of `name,words,el_gold,el_pred,el_correct,rel_gold,rel_pred,rel_correct`
    /// (a header line starting with `name` is skipped).
    pub fn from_counts_csv(text: &str) -> Result<PipelineScore> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let parse_err = |msg: String| Error::Parse {
                path: "counts".into(),
                line: i + 1,
                msg,
            };
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            if rec.get(0) == Some("name") {
                continue;
            }
            if rec.len() != 8 {
                return Err(parse_err(format!("expected 8 fields, found {}", rec.len())));
            }
            let n: Vec<u64> = (1..8)
                .map(|j| rec[j].parse::<u64>().map_err(|e| parse_err(format!("field {j}: {e}"))))
                .collect::<Result<_>>()?;
            rows.push(DocumentScore {
                name: rec[0].to_string(),
                words: n[0],
                elements: Counts::new(n[1], n[2], n[3]).map_err(|e| parse_err(e.to_string()))?,
                relations: Counts::new(n[4], n[5], n[6]).map_err(|e| parse_err(e.to_string()))?,
            });
        }
        Ok(PipelineScore::from_rows(rows))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Both blocks as CSV: `section,name,words,gold,predicted,correct,precision,recall,f1`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record([
            "section", "name", "words", "gold", "predicted", "correct", "precision", "recall",
            "f1",
        ]);
        for (section, get) in self.sections() {
            let total = ("Total".to_string(), self.words, get_total(self, section));
            let rows = self
                .documents
                .iter()
                .map(|d| (d.name.clone(), d.words, get(d)))
                .chain(std::iter::once(total));
            for (name, words, c) in rows {
                let _ = w.write_record([
                    section.to_string(),
                    name,
                    words.to_string(),
                    c.gold.to_string(),
                    c.predicted.to_string(),
                    c.correct.to_string(),
                    format!("{:.1}", c.precision().as_f64()),
                    format!("{:.1}", c.recall().as_f64()),
                    format!("{:.1}", c.f1().as_f64()),
                ]);
            }
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 csv")
    }

    fn sections(&self) -> [(&'static str, Section); 2] {
        [("elements", |d| d.elements), ("relations", |d| d.relations)]
    }
}

type Section = fn(&DocumentScore) -> Counts;

fn get_total(s: &PipelineScore, section: &str) -> Counts {
    if section == "elements" {
        s.elements
    } else {
        s.relations
    }
}

impl fmt::Display for PipelineScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .documents
            .iter()
            .map(|d| d.name.len())
            .max()
            .unwrap_or(0)
            .max(6);
        let header = format!(
            "{:<width$}  {:>6}  {:>5}  {:>5}  {:>8}  {:>9}  {:>7}  {:>7}",
            "", "#Words", "#Gold", "#Pred", "#Correct", "Precision", "Recall", "F1"
        );
        for (section, get) in self.sections() {
            writeln!(f, "{section}")?;
            writeln!(f, "{header}")?;
            let total = ("Total".to_string(), self.words, get_total(self, section));
            let rows = self
                .documents
                .iter()
                .map(|d| (d.name.clone(), d.words, get(d)))
                .chain(std::iter::once(total));
            for (name, words, c) in rows {
                writeln!(
                    f,
                    "{:<width$}  {:>6}  {:>5}  {:>5}  {:>8}  {:>9}  {:>7}  {:>7}",
                    name,
                    words,
                    c.gold,
                    c.predicted,
                    c.correct,
                    c.precision().to_string(),
                    c.recall().to_string(),
                    c.f1().to_string()
                )?;
            }
        }
        Ok(())
    }
}

fn overlaps(a: &Mention, b: &Mention) -> bool {
    a.sentence_id == b.sentence_id && a.token_start <= b.token_end && b.token_start <= a.token_end
}

/// One-to-one alignment of predicted to gold mentions (indices into the
/// mention lists). Relaxed matching walks predictions in document order and
/// takes the earliest free overlapping gold mention of the same type.
fn align(gold: &[Mention], pred: &[Mention], mode: SpanMode) -> HashMap<usize, usize> {
    let mut out = HashMap::new();
    let mut taken = vec![false; gold.len()];
    let mut order: Vec<usize> = (0..pred.len()).collect();
    order.sort_by_key(|&i| pred[i].span());
    let mut gold_order: Vec<usize> = (0..gold.len()).collect();
    gold_order.sort_by_key(|&i| gold[i].span());
    for p in order {
        let hit = gold_order.iter().copied().find(|&g| {
            !taken[g]
                && gold[g].mention_type == pred[p].mention_type
                && match mode {
                    SpanMode::Exact => gold[g].span() == pred[p].span(),
                    SpanMode::Relaxed => overlaps(&gold[g], &pred[p]),
                }
        });
        if let Some(g) = hit {
            taken[g] = true;
            out.insert(p, g);
        }
    }
    out
}

/// Element and relation counts for one document pair.
pub fn score_document(gold: &Document, pred: &Document, mode: SpanMode) -> Result<DocumentScore> {
    let same_text = gold.tokens.len() == pred.tokens.len()
        && gold.tokens.iter().zip(&pred.tokens).all(|(a, b)| a.text == b.text);
    if gold.name != pred.name || !same_text {
        return Err(Error::DocumentMismatch {
            gold: gold.name.clone(),
            pred: pred.name.clone(),
        });
    }
    let alignment = align(&gold.mentions, &pred.mentions, mode);
    let gold_pos: HashMap<usize, usize> = gold
        .mentions
        .iter()
        .enumerate()
        .map(|(i, m)| (m.mention_id, i))
        .collect();
    let pred_pos: HashMap<usize, usize> = pred
        .mentions
        .iter()
        .enumerate()
        .map(|(i, m)| (m.mention_id, i))
        .collect();

    let mut remaining: HashMap<(usize, usize, crate::corpus::RelationType), usize> = HashMap::new();
    for r in &gold.relations {
        if let (Some(&s), Some(&t)) = (gold_pos.get(&r.source), gold_pos.get(&r.target)) {
            *remaining.entry((s, t, r.relation_type)).or_default() += 1;
        }
    }
    let mut correct_relations = 0;
    for r in &pred.relations {
        let mapped = pred_pos
            .get(&r.source)
            .and_then(|p| alignment.get(p))
            .zip(pred_pos.get(&r.target).and_then(|p| alignment.get(p)));
        if let Some((&s, &t)) = mapped {
            if let Some(n) = remaining.get_mut(&(s, t, r.relation_type)) {
                if *n > 0 {
                    *n -= 1;
                    correct_relations += 1;
                }
            }
        }
    }
    Ok(DocumentScore {
        name: gold.name.clone(),
        words: gold.word_count() as u64,
        elements: Counts {
            gold: gold.mentions.len() as u64,
            predicted: pred.mentions.len() as u64,
            correct: alignment.len() as u64,
        },
        relations: Counts {
            gold: gold.relations.len() as u64,
            predicted: pred.relations.len() as u64,
            correct: correct_relations,
        },
    })
}

/// Scores predicted documents against gold documents, pairwise in order;
/// totals are sums over documents.
pub fn pipeline_metrics(gold: &[Document], pred: &[Document], mode: SpanMode) -> Result<PipelineScore> {
    if gold.len() != pred.len() {
        return Err(Error::SequenceCountMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let rows = gold
        .iter()
        .zip(pred)
        .map(|(g, p)| score_document(g, p, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(PipelineScore::from_rows(rows))
}
