use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::frame::MentionPairFrame;
use crate::corpus::RelationType;
use crate::error::{Error, Result};
use crate::eval::{classification_report, MetricsReport};

pub const NUM_CLASSES: usize = RelationType::ALL.len();

/// Multiclass classifier over mention-pair frames.
pub trait RelationClassifier {
    fn fit(&mut self, frames: &[MentionPairFrame]) -> Result<()>;

    /// Class probabilities indexed by [`RelationType::index`].
    fn scores(&self, frame: &MentionPairFrame) -> [f64; NUM_CLASSES];

    /// Highest-scoring class; ties go to the lower class index.
    fn predict(&self, frame: &MentionPairFrame) -> RelationType {
        let s = self.scores(frame);
        let mut best = 0;
        for c in 1..NUM_CLASSES {
            if s[c] > s[best] {
                best = c;
            }
        }
        RelationType::ALL[best]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// AdaGrad base step.
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            epochs: 20,
            batch_size: 32,
            learning_rate: 0.3,
            l2: 1e-5,
            seed: 0,
        }
    }
}

const NUMERIC: usize = 4;

fn bucket(d: i64) -> String {
    let a = d.unsigned_abs();
    let b = match a {
        0..=2 => a.to_string(),
        3..=4 => "3-4".into(),
        5..=8 => "5-8".into(),
        9..=16 => "9-16".into(),
        _ => "17+".into(),
    };
    if d < 0 {
        format!("-{b}")
    } else {
        b
    }
}

/// One-hot feature names of a frame.
pub fn categorical_features(f: &MentionPairFrame) -> Vec<String> {
    let (s, t) = (&f.source, &f.target);
    let pair = format!("{}|{}", s.mention_type, t.mention_type);
    let sd = f.sentence_distance.clamp(-3, 3);
    vec![
        format!("s.tok={}", s.token),
        format!("s.type={}", s.mention_type),
        format!("s.pos={}", s.pos),
        format!("s.prev={}", s.prev),
        format!("s.next={}", s.next),
        format!("t.tok={}", t.token),
        format!("t.type={}", t.mention_type),
        format!("t.pos={}", t.pos),
        format!("t.prev={}", t.prev),
        format!("t.next={}", t.next),
        format!("dep={}", f.dependency),
        format!("pair={pair}"),
        format!("pair={pair}|sd={sd}"),
        format!("pair={pair}|td={}", bucket(f.token_distance)),
        format!("pair={pair}|s.next={}|t.prev={}", s.next, t.prev),
        format!("td={}", bucket(f.token_distance)),
    ]
}

fn numeric_features(f: &MentionPairFrame) -> [f64; NUMERIC] {
    let td = f.token_distance as f64;
    let sd = f.sentence_distance as f64;
    [td, sd, td.abs(), sd.abs()]
}

/// L2-regularized multinomial logistic regression trained with seeded
/// mini-batch AdaGrad.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub config: LrConfig,
    features: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    mean: [f64; NUMERIC],
    std: [f64; NUMERIC],
    /// Rows: categorical features, then numeric features, then the bias.
    weights: Vec<[f64; NUM_CLASSES]>,
}

impl LogisticRegression {
    pub fn new(config: LrConfig) -> Self {
        LogisticRegression {
            config,
            features: Vec::new(),
            index: HashMap::new(),
            mean: [0.0; NUMERIC],
            std: [1.0; NUMERIC],
            weights: vec![[0.0; NUM_CLASSES]; NUMERIC + 1],
        }
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    fn rebuild_index(&mut self) {
        self.index = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
    }

    fn encode(&self, f: &MentionPairFrame) -> Vec<(usize, f64)> {
        let n = self.features.len();
        let mut row: Vec<(usize, f64)> = categorical_features(f)
            .iter()
            .filter_map(|k| self.index.get(k).map(|&i| (i, 1.0)))
            .collect();
        for (j, v) in numeric_features(f).into_iter().enumerate() {
            row.push((n + j, (v - self.mean[j]) / self.std[j]));
        }
        row.push((n + NUMERIC, 1.0));
        row
    }

    fn probabilities(&self, row: &[(usize, f64)]) -> [f64; NUM_CLASSES] {
        let mut z = [0.0; NUM_CLASSES];
        for &(i, v) in row {
            for (zc, wc) in z.iter_mut().zip(&self.weights[i]) {
                *zc += wc * v;
            }
        }
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for zc in &mut z {
            *zc = (*zc - max).exp();
            total += *zc;
        }
        z.iter_mut().for_each(|p| *p /= total);
        z
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ClassifierFile {
            format: FORMAT.into(),
            version: VERSION,
            classes: RelationType::ALL.iter().map(|r| r.to_string()).collect(),
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ClassifierFile = serde_json::from_str(text)?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::ModelFormat(format!(
                "expected {FORMAT} v{VERSION}, found {} v{}",
                file.format, file.version
            )));
        }
        let expected: Vec<String> = RelationType::ALL.iter().map(|r| r.to_string()).collect();
        if file.classes != expected {
            return Err(Error::ModelFormat(format!("unexpected class list {:?}", file.classes)));
        }
        let mut model = file.model;
        if model.weights.len() != model.features.len() + NUMERIC + 1 {
            return Err(Error::ModelFormat("weight rows do not match feature count".into()));
        }
        model.rebuild_index();
        Ok(model)
    }
}

const FORMAT: &str = "proc2bpmn-relation-classifier";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ClassifierFile {
    format: String,
    version: u32,
    classes: Vec<String>,
    model: LogisticRegression,
}

impl RelationClassifier for LogisticRegression {
    fn fit(&mut self, frames: &[MentionPairFrame]) -> Result<()> {
        if frames.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        let cfg = self.config.clone();
        if cfg.batch_size == 0 || !(cfg.learning_rate > 0.0) || !(cfg.l2 >= 0.0) {
            return Err(Error::Config(format!("invalid classifier settings {cfg:?}")));
        }

        let mut seen = std::collections::BTreeSet::new();
        for f in frames {
            seen.extend(categorical_features(f));
        }
        self.features = seen.into_iter().collect();
        self.rebuild_index();

        let n = frames.len() as f64;
        for j in 0..NUMERIC {
            let values: Vec<f64> = frames.iter().map(|f| numeric_features(f)[j]).collect();
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            self.mean[j] = mean;
            self.std[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }

        let rows: Vec<Vec<(usize, f64)>> = frames.iter().map(|f| self.encode(f)).collect();
        let labels: Vec<usize> = frames.iter().map(|f| f.label.index()).collect();
        let dim = self.features.len() + NUMERIC + 1;
        self.weights = vec![[0.0; NUM_CLASSES]; dim];
        let mut accum = vec![[0.0; NUM_CLASSES]; dim];
        let mut grad = vec![[0.0; NUM_CLASSES]; dim];
        let mut touched = vec![false; dim];
        let mut touched_list = Vec::new();

        let mut order: Vec<usize> = (0..frames.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(cfg.batch_size) {
                let scale = 1.0 / batch.len() as f64;
                for &k in batch {
                    let p = self.probabilities(&rows[k]);
                    for &(i, v) in &rows[k] {
                        if !touched[i] {
                            touched[i] = true;
                            touched_list.push(i);
                        }
                        for c in 0..NUM_CLASSES {
                            let y = if c == labels[k] { 1.0 } else { 0.0 };
                            grad[i][c] += (p[c] - y) * v * scale;
                        }
                    }
                }
                touched_list.sort_unstable();
                for &i in &touched_list {
                    for c in 0..NUM_CLASSES {
                        let g = grad[i][c] + cfg.l2 * self.weights[i][c];
                        accum[i][c] += g * g;
                        self.weights[i][c] -= cfg.learning_rate * g / (accum[i][c].sqrt() + 1e-8);
                        grad[i][c] = 0.0;
                    }
                    touched[i] = false;
                }
                touched_list.clear();
            }
        }
        if self.weights.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteObjective { iteration: cfg.epochs });
        }
        Ok(())
    }

    fn scores(&self, frame: &MentionPairFrame) -> [f64; NUM_CLASSES] {
        self.probabilities(&self.encode(frame))
    }
}

/// Held-out evaluation produced while training.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationTrainingReport {
    pub train_size: usize,
    pub held_out_size: usize,
    /// Per-class scores on the held-out frames; `None` when too few frames
    /// were available to hold any out.
    pub held_out: Option<MetricsReport>,
}

/// Stratified 90/10 split by label, seeded; returns (train, held-out)
/// frame indices, each in input order.
pub fn held_out_split(frames: &[MentionPairFrame], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut held = vec![false; frames.len()];
    for label in RelationType::ALL {
        let mut members: Vec<usize> = (0..frames.len())
            .filter(|&i| frames[i].label == label)
            .collect();
        members.shuffle(&mut rng);
        for &i in members.iter().take(members.len() / 10) {
            held[i] = true;
        }
    }
    (0..frames.len()).partition(|&i| !held[i])
}

/// Fits a logistic-regression classifier on 90% of `frames` (stratified)
/// and scores it on the remaining 10%.
pub fn train_relation_classifier(
    frames: &[MentionPairFrame],
    config: &LrConfig,
) -> Result<(LogisticRegression, RelationTrainingReport)> {
    let labels: std::collections::BTreeSet<_> = frames.iter().map(|f| f.label).collect();
    if labels.len() < 2 {
        return Err(Error::SingleClass(
            labels
                .iter()
                .next()
                .map_or("no frames".to_string(), |l| l.to_string()),
        ));
    }
    let (train_idx, test_idx) = held_out_split(frames, config.seed);
    let train: Vec<MentionPairFrame> = train_idx.iter().map(|&i| frames[i].clone()).collect();
    let mut model = LogisticRegression::new(config.clone());
    model.fit(&train)?;

    let held_out = (!test_idx.is_empty()).then(|| {
        let gold: Vec<RelationType> = test_idx.iter().map(|&i| frames[i].label).collect();
        let pred: Vec<RelationType> = test_idx.iter().map(|&i| model.predict(&frames[i])).collect();
        classification_report(&gold, &pred, &RelationType::ALL, &[])
    });
    Ok((
        model,
        RelationTrainingReport {
            train_size: train.len(),
            held_out_size: test_idx.len(),
            held_out,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::MentionType;
    use crate::relex::frame::MentionSide;

    fn frame(src: MentionType, tgt: MentionType, i: usize) -> MentionPairFrame {
        let side = |t, k: usize| MentionSide {
            token: format!("w{}", k % 7),
            mention_type: t,
            pos: "NN".into(),
            sentence_id: k % 3,
            token_id: k % 5,
            prev: "NONE".into(),
            next: "NONE".into(),
        };
        let label = match (src, tgt) {
            (MentionType::Activity, MentionType::Activity) => RelationType::Flow,
            (MentionType::Actor, MentionType::Activity) => RelationType::ActorPerformer,
            (MentionType::Activity, MentionType::ActivityData) => RelationType::Uses,
            _ => RelationType::NoRelation,
        };
        MentionPairFrame {
            source_id: i,
            target_id: i + 1,
            source: side(src, i),
            target: side(tgt, i + 3),
            token_distance: (i % 11) as i64 - 5,
            sentence_distance: (i % 3) as i64 - 1,
            dependency: "NONE".into(),
            label,
        }
    }

    fn separable(n: usize) -> Vec<MentionPairFrame> {
        let types = [
            MentionType::Actor,
            MentionType::Activity,
            MentionType::ActivityData,
        ];
        (0..n)
            .map(|i| frame(types[i % 3], types[(i / 3) % 3], i))
            .collect()
    }

    #[test]
    fn separable_frames_are_learned() {
        let frames = separable(300);
        let (model, report) = train_relation_classifier(&frames, &LrConfig::default()).unwrap();
        let held = report.held_out.unwrap();
        assert!(report.held_out_size > 0);
        assert_eq!(held.micro.f1, 1.0, "{held}");
        for f in &frames {
            assert_eq!(model.predict(f), f.label);
        }
    }

    #[test]
    fn scores_sum_to_one() {
        let frames = separable(60);
        let mut model = LogisticRegression::new(LrConfig::default());
        model.fit(&frames).unwrap();
        for f in &frames {
            let s: f64 = model.scores(f).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let frames: Vec<_> = (0..20)
            .map(|i| frame(MentionType::Activity, MentionType::Activity, i))
            .collect();
        assert!(matches!(
            train_relation_classifier(&frames, &LrConfig::default()),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn fits_are_deterministic_and_round_trip() {
        let frames = separable(90);
        let cfg = LrConfig {
            seed: 9,
            ..Default::default()
        };
        let mut a = LogisticRegression::new(cfg.clone());
        let mut b = LogisticRegression::new(cfg);
        a.fit(&frames).unwrap();
        b.fit(&frames).unwrap();
        assert_eq!(a, b);
        let back = LogisticRegression::from_json(&a.to_json().unwrap()).unwrap();
        for f in &frames {
            assert_eq!(back.scores(f), a.scores(f));
        }
    }

    #[test]
    fn distance_buckets() {
        assert_eq!(bucket(0), "0");
        assert_eq!(bucket(-2), "-2");
        assert_eq!(bucket(7), "5-8");
        assert_eq!(bucket(-40), "-17+");
    }
}
