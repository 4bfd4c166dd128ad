//! Linear-chain CRF tagger over the 15-tag IOB tagset.

pub mod crf;
pub mod features;
pub mod train;

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{encode_iob, Corpus, Document, IobTag};
use crate::error::{Error, Result};
use crate::preprocess::PosTagger;

pub use crf::Layout;
pub use features::{extract_features, Embeddings, TokenFeatures};
pub use train::{Optimizer, TrainConfig, TrainTrace};

/// A sentence's features with its gold tags.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSequence {
    pub features: Vec<TokenFeatures>,
    pub tags: Vec<IobTag>,
}

/// Feature/tag sequences for every sentence of every document.
pub fn labeled_sequences(
    corpus: &Corpus,
    embeddings: Option<&Embeddings>,
) -> Result<Vec<LabeledSequence>> {
    let mut out = Vec::new();
    for doc in &corpus.documents {
        let tags = encode_iob(doc)?;
        for (sentence, tags) in doc.sentences().into_iter().zip(tags) {
            out.push(LabeledSequence {
                features: extract_features(sentence, embeddings),
                tags,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrfModel {
    vocabulary: Vec<String>,
    index: HashMap<String, usize>,
    /// Emission weights then transition weights, see [`crf::Layout`].
    weights: Vec<f64>,
    pub lambda: f64,
    pub seed: u64,
    /// Dimension of the embedding table used in training, if any.
    pub embedding_dim: Option<usize>,
    /// Tagger used to fill POS for raw text at extraction time.
    pub pos_tagger: Option<PosTagger>,
}

impl CrfModel {
    /// Zero-weight model over a fixed feature vocabulary.
    pub fn new(vocabulary: Vec<String>, lambda: f64) -> CrfModel {
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let layout = Layout::new(vocabulary.len(), IobTag::COUNT);
        CrfModel {
            vocabulary,
            index,
            weights: vec![0.0; layout.len()],
            lambda,
            seed: 0,
            embedding_dim: None,
            pos_tagger: None,
        }
    }

    /// Vocabulary of every feature observed in the data, in first-seen order.
    pub fn vocabulary_from(data: &[LabeledSequence]) -> Vec<String> {
        let mut seen = HashMap::new();
        let mut vocab = Vec::new();
        for seq in data {
            for tok in &seq.features {
                for (k, _) in tok.iter() {
                    if !seen.contains_key(&k) {
                        seen.insert(k.clone(), vocab.len());
                        vocab.push(k);
                    }
                }
            }
        }
        vocab
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.vocabulary.len(), IobTag::COUNT)
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.layout().len() {
            return Err(Error::ModelFormat(format!(
                "expected {} weights, got {}",
                self.layout().len(),
                weights.len()
            )));
        }
        self.weights = weights;
        Ok(())
    }

    pub fn emission(&self, feature: &str, tag: IobTag) -> f64 {
        self.index
            .get(feature)
            .map_or(0.0, |&f| self.weights[self.layout().emission(f, tag.index())])
    }

    pub fn set_emission(&mut self, feature: &str, tag: IobTag, value: f64) -> Result<()> {
        let f = *self
            .index
            .get(feature)
            .ok_or_else(|| Error::ModelFormat(format!("feature `{feature}` not in vocabulary")))?;
        let i = self.layout().emission(f, tag.index());
        self.weights[i] = value;
        Ok(())
    }

    pub fn transition(&self, prev: IobTag, tag: IobTag) -> f64 {
        self.weights[self.layout().transition(prev.index(), tag.index())]
    }

    pub fn set_transition(&mut self, prev: IobTag, tag: IobTag, value: f64) {
        let i = self.layout().transition(prev.index(), tag.index());
        self.weights[i] = value;
    }

    /// Maps token features onto vocabulary ids; unknown features are dropped.
    pub fn index_features(&self, features: &[TokenFeatures]) -> crf::Positions {
        features
            .iter()
            .map(|tok| {
                tok.iter()
                    .filter_map(|(k, v)| self.index.get(&k).map(|&i| (i, v)))
                    .collect()
            })
            .collect()
    }

    fn to_sequences(&self, data: &[LabeledSequence]) -> Vec<crf::Sequence> {
        data.iter()
            .map(|s| crf::Sequence {
                positions: self.index_features(&s.features),
                labels: s.tags.iter().map(|t| t.index()).collect(),
            })
            .collect()
    }

    /// Best IOB path; ties go to the earlier tag in [`IobTag::ALL`].
    pub fn viterbi_decode(&self, features: &[TokenFeatures]) -> Vec<IobTag> {
        let layout = self.layout();
        let em = crf::emission_scores(&layout, &self.weights, &self.index_features(features));
        let (path, _) = crf::viterbi(&layout, &self.weights, &em);
        path.into_iter()
            .map(|i| IobTag::from_index(i).expect("label index within tagset"))
            .collect()
    }

    /// Unnormalized score of a tag path.
    pub fn path_score(&self, features: &[TokenFeatures], tags: &[IobTag]) -> f64 {
        let layout = self.layout();
        let em = crf::emission_scores(&layout, &self.weights, &self.index_features(features));
        let labels: Vec<usize> = tags.iter().map(|t| t.index()).collect();
        crf::path_score(&layout, &self.weights, &em, &labels)
    }

    /// Per-sentence tags for a document.
    pub fn tag_document(&self, doc: &Document, embeddings: Option<&Embeddings>) -> Vec<Vec<IobTag>> {
        doc.sentences()
            .into_iter()
            .map(|s| self.viterbi_decode(&extract_features(s, embeddings)))
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string(&self.to_file())?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<CrfModel> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CrfModel::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<CrfModel> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }

    fn to_file(&self) -> ModelFile {
        let layout = self.layout();
        let l = IobTag::COUNT;
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            tags: IobTag::ALL.iter().map(|t| t.to_string()).collect(),
            lambda: self.lambda,
            seed: self.seed,
            embedding_dim: self.embedding_dim,
            features: self.vocabulary.clone(),
            emission: (0..self.vocabulary.len())
                .map(|f| self.weights[layout.emission(f, 0)..layout.emission(f, 0) + l].to_vec())
                .collect(),
            transition: (0..l)
                .map(|a| (0..l).map(|b| self.weights[layout.transition(a, b)]).collect())
                .collect(),
            pos_tagger: self.pos_tagger.clone(),
        }
    }
}

const MODEL_FORMAT: &str = "proc2bpmn-crf";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    tags: Vec<String>,
    lambda: f64,
    seed: u64,
    embedding_dim: Option<usize>,
    features: Vec<String>,
    emission: Vec<Vec<f64>>,
    transition: Vec<Vec<f64>>,
    pos_tagger: Option<PosTagger>,
}

impl ModelFile {
    fn into_model(self) -> Result<CrfModel> {
        if self.format != MODEL_FORMAT {
            return Err(Error::ModelFormat(format!("unexpected format `{}`", self.format)));
        }
        if self.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!("unsupported version {}", self.version)));
        }
        if self.tags.len() != IobTag::COUNT {
            return Err(Error::ModelFormat(format!(
                "model has {} tags, expected {}",
                self.tags.len(),
                IobTag::COUNT
            )));
        }
        for (i, t) in self.tags.iter().enumerate() {
            if t.parse::<IobTag>()? != IobTag::ALL[i] {
                return Err(Error::ModelFormat(format!("tag {i} is `{t}`, order differs")));
            }
        }
        let l = IobTag::COUNT;
        if self.emission.len() != self.features.len()
            || self.emission.iter().any(|r| r.len() != l)
            || self.transition.len() != l
            || self.transition.iter().any(|r| r.len() != l)
        {
            return Err(Error::ModelFormat("weight table shape mismatch".into()));
        }
        let mut model = CrfModel::new(self.features, self.lambda);
        let weights: Vec<f64> = self
            .emission
            .into_iter()
            .flatten()
            .chain(self.transition.into_iter().flatten())
            .collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::ModelFormat("non-finite weight".into()));
        }
        model.set_weights(weights)?;
        model.seed = self.seed;
        model.embedding_dim = self.embedding_dim;
        model.pos_tagger = self.pos_tagger;
        Ok(model)
    }
}

/// Regularized negative log-likelihood of `data` under the model and its
/// gradient, laid out like [`CrfModel::weights`].
pub fn crf_objective(model: &CrfModel, data: &[LabeledSequence]) -> (f64, Vec<f64>) {
    let seqs = model.to_sequences(data);
    crf::objective(&model.layout(), &model.weights, &seqs, model.lambda)
}

/// Trains a CRF over the features observed in `data`.
pub fn train_crf(data: &[LabeledSequence], cfg: &TrainConfig) -> Result<CrfModel> {
    Ok(train_crf_with_trace(data, cfg)?.0)
}

pub fn train_crf_with_trace(
    data: &[LabeledSequence],
    cfg: &TrainConfig,
) -> Result<(CrfModel, TrainTrace)> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingData);
    }
    let mut model = CrfModel::new(CrfModel::vocabulary_from(data), cfg.lambda);
    model.seed = cfg.seed;
    model.embedding_dim = data
        .iter()
        .flat_map(|s| &s.features)
        .map(|t| t.dense.len())
        .find(|&d| d > 0);
    let seqs = model.to_sequences(data);
    let (weights, trace) = train::minimize(&model.layout(), &seqs, cfg)?;
    model.set_weights(weights)?;
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::MentionType;

    fn features(words: &[&str]) -> Vec<TokenFeatures> {
        let doc = Document::from_sentences(
            "s",
            [words.iter().map(|w| (w.to_string(), String::new()))],
        );
        extract_features(&doc.tokens, None)
    }

    fn toy_data() -> Vec<LabeledSequence> {
        use IobTag::*;
        vec![
            LabeledSequence {
                features: features(&["the", "clerk", "will", "submit", "it"]),
                tags: vec![O, B(MentionType::Actor), O, B(MentionType::Activity), O],
            },
            LabeledSequence {
                features: features(&["submit", "the", "clerk"]),
                tags: vec![B(MentionType::Activity), O, B(MentionType::Actor)],
            },
        ]
    }

    #[test]
    fn zero_model_decodes_all_o() {
        let model = CrfModel::new(vec!["bias".into()], 0.1);
        assert_eq!(
            model.viterbi_decode(&features(&["a", "b", "c"])),
            vec![IobTag::O; 3]
        );
    }

    #[test]
    fn dominant_emission_wins() {
        let data = toy_data();
        let mut model = CrfModel::new(CrfModel::vocabulary_from(&data), 0.1);
        model
            .set_emission("lower=clerk", IobTag::B(MentionType::Actor), 10.0)
            .unwrap();
        let tags = model.viterbi_decode(&features(&["the", "clerk"]));
        assert_eq!(tags, vec![IobTag::O, IobTag::B(MentionType::Actor)]);
    }

    #[test]
    fn separable_toy_is_learned() {
        let data = toy_data();
        let model = train_crf(&data, &TrainConfig::default()).unwrap();
        for seq in &data {
            assert_eq!(model.viterbi_decode(&seq.features), seq.tags);
        }
    }

    #[test]
    fn huge_lambda_shrinks_weights() {
        let cfg = TrainConfig {
            lambda: 1e6,
            ..Default::default()
        };
        let model = train_crf(&toy_data(), &cfg).unwrap();
        let max = model.weights().iter().fold(0.0f64, |m, w| m.max(w.abs()));
        assert!(max < 1e-4, "max weight {max}");
    }

    #[test]
    fn zero_weight_objective_is_log_fifteen_per_token() {
        let data = vec![LabeledSequence {
            features: features(&["x"]),
            tags: vec![IobTag::O],
        }];
        let model = CrfModel::new(CrfModel::vocabulary_from(&data), 0.0);
        let (nll, grad) = crf_objective(&model, &data);
        assert!((nll - 15f64.ln()).abs() < 1e-12);
        assert_eq!(grad.len(), model.weights().len());
    }

    #[test]
    fn save_load_round_trip_and_tag_check() {
        let model = train_crf(&toy_data(), &TrainConfig::default()).unwrap();
        let json = model.to_json().unwrap();
        let back = CrfModel::from_json(&json).unwrap();
        assert_eq!(back.vocabulary(), model.vocabulary());
        assert_eq!(back.weights(), model.weights());

        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["tags"].as_array_mut().unwrap().pop();
        let err = CrfModel::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("14 tags"), "{err}");
    }
}
