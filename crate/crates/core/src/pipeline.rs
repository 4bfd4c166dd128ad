//! End-to-end extraction: text or tokens in, mentions, relations, entity
//! clusters and a process graph out.

use serde::Serialize;

use crate::bpmn::{assemble_graph, close_gateways, AssembleConfig, BpmnGraph};
use crate::config::RunConfig;
use crate::corpus::{decode_iob, Document};
use crate::error::Result;
use crate::ner::{CrfModel, Embeddings};
use crate::preprocess::{preprocess_text, PosTagger};
use crate::relex::{predict_relations, FrameConfig, RelationClassifier};
use crate::resolve::{cluster_mentions, EntityCluster, ResolveConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractOptions {
    pub strip_chars: String,
    pub frame: FrameConfig,
    pub resolve: ResolveConfig,
    pub assemble: AssembleConfig,
    pub close_gateways: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions::from(&RunConfig::default())
    }
}

impl From<&RunConfig> for ExtractOptions {
    fn from(cfg: &RunConfig) -> Self {
        ExtractOptions {
            strip_chars: cfg.preprocess.strip_chars.clone(),
            frame: cfg.frame_config(),
            resolve: cfg.resolve,
            assemble: cfg.assemble_config(),
            close_gateways: cfg.bpmn.close_gateways,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extraction {
    /// Input tokens with predicted mentions and relations.
    #[serde(serialize_with = "serialize_document")]
    pub document: Document,
    pub clusters: Vec<EntityCluster>,
    pub graph: BpmnGraph,
}

fn serialize_document<S: serde::Serializer>(doc: &Document, s: S) -> Result<S::Ok, S::Error> {
    crate::corpus::io::document_to_json(doc).serialize(s)
}

impl Extraction {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The NER and relation models plus everything needed to run them.
pub struct Extractor<'a> {
    pub ner: &'a CrfModel,
    pub relations: &'a (dyn RelationClassifier + Sync),
    pub embeddings: Option<&'a Embeddings>,
    pub options: ExtractOptions,
}

impl Extractor<'_> {
    /// Runs the pipeline on already tokenized text. Any mentions and
    /// relations on `document` are replaced by predictions.
    pub fn annotate(&self, document: &Document) -> Extraction {
        let tags = self.ner.tag_document(document, self.embeddings);
        let mut doc = document.clone();
        doc.set_spans(decode_iob(&tags));
        doc.relations = predict_relations(self.relations, &doc, &doc.mentions, &self.options.frame);
        let clusters = cluster_mentions(&doc, &doc.mentions, &self.options.resolve);
        let mut graph = assemble_graph(&doc.mentions, &doc.relations, &clusters, &self.options.assemble);
        if self.options.close_gateways {
            graph = close_gateways(&graph);
        }
        Extraction {
            document: doc,
            clusters,
            graph,
        }
    }

    /// Preprocesses raw text (POS from the model's tagger, or the bundled
    /// one) and annotates it.
    pub fn extract_text(&self, name: &str, text: &str) -> Extraction {
        let tagger = self.ner.pos_tagger.clone().unwrap_or_else(PosTagger::bundled);
        let doc = preprocess_text(name, text, &self.options.strip_chars, &tagger);
        self.annotate(&doc)
    }
}
