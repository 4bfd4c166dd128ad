use std::fmt;

use serde::Serialize;

use crate::corpus::{decode_iob, IobTag, MentionType, Span};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassScores {
    pub label: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Gold occurrences (`tp + fn` for a single report).
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    safe_div(2.0 * precision * recall, precision + recall)
}

impl ClassScores {
    pub fn from_counts(label: impl Into<String>, tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = safe_div(tp as f64, (tp + fp) as f64);
        let recall = safe_div(tp as f64, (tp + fn_) as f64);
        ClassScores {
            label: label.into(),
            tp,
            fp,
            fn_,
            support: tp + fn_,
            precision,
            recall,
            f1: f1_score(precision, recall),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub classes: Vec<ClassScores>,
    /// Labels reported per class but left out of every average.
    pub excluded: Vec<String>,
    pub micro: Averages,
    #[serde(rename = "macro")]
    pub macro_avg: Averages,
    pub weighted: Averages,
}

impl MetricsReport {
    /// Builds the averages from per-class rows.
    pub fn from_classes(classes: Vec<ClassScores>, excluded: Vec<String>) -> Self {
        let included: Vec<&ClassScores> = classes
            .iter()
            .filter(|c| !excluded.contains(&c.label))
            .collect();
        let (tp, fp, fn_) = included
            .iter()
            .fold((0, 0, 0), |(a, b, c), s| (a + s.tp, b + s.fp, c + s.fn_));
        let micro_p = safe_div(tp as f64, (tp + fp) as f64);
        let micro_r = safe_div(tp as f64, (tp + fn_) as f64);
        let micro = Averages {
            precision: micro_p,
            recall: micro_r,
            f1: f1_score(micro_p, micro_r),
        };

        let supported: Vec<&&ClassScores> = included.iter().filter(|c| c.support > 0).collect();
        let n = supported.len() as f64;
        let macro_avg = Averages {
            precision: safe_div(supported.iter().map(|c| c.precision).sum(), n),
            recall: safe_div(supported.iter().map(|c| c.recall).sum(), n),
            f1: safe_div(supported.iter().map(|c| c.f1).sum(), n),
        };
        let total: f64 = included.iter().map(|c| c.support as f64).sum();
        let weigh = |get: fn(&ClassScores) -> f64| {
            safe_div(
                included.iter().map(|c| get(c) * c.support as f64).sum(),
                total,
            )
        };
        let weighted = Averages {
            precision: weigh(|c| c.precision),
            recall: weigh(|c| c.recall),
            f1: weigh(|c| c.f1),
        };
        MetricsReport {
            classes,
            excluded,
            micro,
            macro_avg,
            weighted,
        }
    }

    pub fn class(&self, label: &str) -> Option<&ClassScores> {
        self.classes.iter().find(|c| c.label == label)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `label,precision,recall,f1,support` rows followed by the three
    /// averages.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut rows: Vec<[String; 5]> = vec![[
            "label".into(),
            "precision".into(),
            "recall".into(),
            "f1".into(),
            "support".into(),
        ]];
        for c in &self.classes {
            rows.push([
                c.label.clone(),
                format!("{:.4}", c.precision),
                format!("{:.4}", c.recall),
                format!("{:.4}", c.f1),
                c.support.to_string(),
            ]);
        }
        let support = self.included_support().to_string();
        for (name, a) in self.averages() {
            rows.push([
                name.into(),
                format!("{:.4}", a.precision),
                format!("{:.4}", a.recall),
                format!("{:.4}", a.f1),
                support.clone(),
            ]);
        }
        for r in rows {
            w.write_record(&r).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 csv")
    }

    fn averages(&self) -> [(&'static str, Averages); 3] {
        [
            ("micro avg", self.micro),
            ("macro avg", self.macro_avg),
            ("weighted avg", self.weighted),
        ]
    }

    fn included_support(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| !self.excluded.contains(&c.label))
            .map(|c| c.support)
            .sum()
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .classes
            .iter()
            .map(|c| c.label.len())
            .max()
            .unwrap_or(0)
            .max(12);
        writeln!(
            f,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}",
            "", "precision", "recall", "f1-score", "support"
        )?;
        for c in &self.classes {
            let mark = if self.excluded.contains(&c.label) { "*" } else { "" };
            writeln!(
                f,
                "{:<width$}  {:>9.2}  {:>9.2}  {:>9.2}  {:>7}{mark}",
                c.label, c.precision, c.recall, c.f1, c.support
            )?;
        }
        writeln!(f)?;
        let support = self.included_support();
        for (name, a) in self.averages() {
            writeln!(
                f,
                "{:<width$}  {:>9.2}  {:>9.2}  {:>9.2}  {:>7}",
                name, a.precision, a.recall, a.f1, support
            )?;
        }
        if !self.excluded.is_empty() {
            writeln!(f, "* excluded from averages")?;
        }
        Ok(())
    }
}

/// Single-label classification report over `labels` (in that order).
/// Items whose gold and predicted label are both outside `labels` are
/// ignored.
pub fn classification_report<L: Copy + PartialEq + fmt::Display>(
    gold: &[L],
    pred: &[L],
    labels: &[L],
    exclude: &[L],
) -> MetricsReport {
    let mut tp = vec![0; labels.len()];
    let mut fp = vec![0; labels.len()];
    let mut fn_ = vec![0; labels.len()];
    let pos = |l: &L| labels.iter().position(|x| x == l);
    for (g, p) in gold.iter().zip(pred) {
        if g == p {
            if let Some(i) = pos(g) {
                tp[i] += 1;
            }
        } else {
            if let Some(i) = pos(p) {
                fp[i] += 1;
            }
            if let Some(i) = pos(g) {
                fn_[i] += 1;
            }
        }
    }
    let classes = labels
        .iter()
        .enumerate()
        .map(|(i, l)| ClassScores::from_counts(l.to_string(), tp[i], fp[i], fn_[i]))
        .collect();
    MetricsReport::from_classes(classes, exclude.iter().map(|l| l.to_string()).collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct NerEvalOptions {
    /// Report `O` but leave it out of the averages.
    pub exclude_o: bool,
    /// Score typed spans (exact match) instead of tokens.
    pub span_level: bool,
}

fn check_shapes(gold: &[Vec<IobTag>], pred: &[Vec<IobTag>]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::SequenceCountMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    for (index, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::LengthMismatch {
                index,
                gold: g.len(),
                pred: p.len(),
            });
        }
    }
    Ok(())
}

/// NER scores over the 15 IOB tags (token level) or the 7 mention types
/// (span level).
pub fn ner_metrics(
    gold: &[Vec<IobTag>],
    pred: &[Vec<IobTag>],
    options: &NerEvalOptions,
) -> Result<MetricsReport> {
    check_shapes(gold, pred)?;
    if options.span_level {
        return Ok(span_metrics(gold, pred));
    }
    let g: Vec<IobTag> = gold.iter().flatten().copied().collect();
    let p: Vec<IobTag> = pred.iter().flatten().copied().collect();
    let exclude: &[IobTag] = if options.exclude_o { &[IobTag::O] } else { &[] };
    Ok(classification_report(&g, &p, &IobTag::ALL, exclude))
}

fn span_metrics(gold: &[Vec<IobTag>], pred: &[Vec<IobTag>]) -> MetricsReport {
    let mut tp = [0; 7];
    let mut fp = [0; 7];
    let mut fn_ = [0; 7];
    for (g, p) in gold.iter().zip(pred) {
        let gs: Vec<Span> = decode_iob(&[g]);
        let ps: Vec<Span> = decode_iob(&[p]);
        for s in &ps {
            if gs.contains(s) {
                tp[s.mention_type.index()] += 1;
            } else {
                fp[s.mention_type.index()] += 1;
            }
        }
        for s in gs.iter().filter(|s| !ps.contains(s)) {
            fn_[s.mention_type.index()] += 1;
        }
    }
    let classes = MentionType::ALL
        .iter()
        .map(|t| ClassScores::from_counts(t.name(), tp[t.index()], fp[t.index()], fn_[t.index()]))
        .collect();
    MetricsReport::from_classes(classes, Vec::new())
}

/// Fold-wise mean of every score; counts and supports are summed.
pub fn aggregate_cv(reports: &[MetricsReport]) -> Result<MetricsReport> {
    let first = reports.first().ok_or(Error::EmptyCorpus)?;
    for r in reports {
        let same = r.classes.len() == first.classes.len()
            && r.classes.iter().zip(&first.classes).all(|(a, b)| a.label == b.label)
            && r.excluded == first.excluded;
        if !same {
            return Err(Error::ClassSetMismatch);
        }
    }
    let n = reports.len() as f64;
    let mean = |get: &dyn Fn(&MetricsReport) -> f64| reports.iter().map(get).sum::<f64>() / n;
    let classes = (0..first.classes.len())
        .map(|i| {
            let sum = |get: fn(&ClassScores) -> usize| reports.iter().map(|r| get(&r.classes[i])).sum();
            ClassScores {
                label: first.classes[i].label.clone(),
                tp: sum(|c| c.tp),
                fp: sum(|c| c.fp),
                fn_: sum(|c| c.fn_),
                support: sum(|c| c.support),
                precision: mean(&|r| r.classes[i].precision),
                recall: mean(&|r| r.classes[i].recall),
                f1: mean(&|r| r.classes[i].f1),
            }
        })
        .collect();
    let avg = |get: fn(&MetricsReport) -> Averages| Averages {
        precision: mean(&|r| get(r).precision),
        recall: mean(&|r| get(r).recall),
        f1: mean(&|r| get(r).f1),
    };
    Ok(MetricsReport {
        classes,
        excluded: first.excluded.clone(),
        micro: avg(|r| r.micro),
        macro_avg: avg(|r| r.macro_avg),
        weighted: avg(|r| r.weighted),
    })
}
