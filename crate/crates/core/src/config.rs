//! Run configuration: TOML file, `PROC2BPMN_CONFIG` fallback, `key=value`
//! overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::bpmn::AssembleConfig;
use crate::corpus::RelationType;
use crate::error::{Error, Result};
use crate::eval::{NerEvalOptions, SpanMode};
use crate::ner::{Optimizer, TrainConfig};
use crate::preprocess::DEFAULT_STRIP_CHARS;
use crate::relex::{FrameConfig, HeadSelection, LrConfig, NeighborReading, SamplingStrategy};
use crate::resolve::ResolveConfig;

pub const CONFIG_ENV: &str = "PROC2BPMN_CONFIG";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub preprocess: PreprocessSection,
    pub ner: NerSection,
    pub relex: RelexSection,
    pub resolve: ResolveConfig,
    pub bpmn: BpmnSection,
    pub eval: EvalSection,
    pub paths: PathsSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    pub strip_chars: String,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        PreprocessSection {
            strip_chars: DEFAULT_STRIP_CHARS.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NerSection {
    pub lambda: f64,
    pub max_iter: usize,
    pub tolerance: f64,
    pub optimizer: Optimizer,
    /// Whitespace-separated embedding table; empty disables the features.
    pub embeddings: String,
}

impl Default for NerSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        NerSection {
            lambda: t.lambda,
            max_iter: t.max_iterations,
            tolerance: t.tolerance,
            optimizer: t.optimizer,
            embeddings: String::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingChoice {
    None,
    NegativeSampling,
    Ros,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelexSection {
    pub sampling: SamplingChoice,
    pub neg_rate: f64,
    pub ros_multiplier: f64,
    pub head: HeadSelection,
    pub neighbors: NeighborReading,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for RelexSection {
    fn default() -> Self {
        let lr = LrConfig::default();
        RelexSection {
            sampling: SamplingChoice::NegativeSampling,
            neg_rate: 5.0,
            ros_multiplier: 2.0,
            head: HeadSelection::Last,
            neighbors: NeighborReading::Mention,
            epochs: lr.epochs,
            batch_size: lr.batch_size,
            learning_rate: lr.learning_rate,
            l2: lr.l2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BpmnSection {
    pub events: bool,
    pub close_gateways: bool,
    pub contract_conditions: bool,
}

impl Default for BpmnSection {
    fn default() -> Self {
        BpmnSection {
            events: true,
            close_gateways: true,
            contract_conditions: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    #[serde(rename = "exclude_O")]
    pub exclude_o: bool,
    pub relaxed_spans: bool,
    pub span_level: bool,
    pub folds: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            exclude_o: false,
            relaxed_spans: false,
            span_level: false,
            folds: 5,
        }
    }
}

/// Empty strings mean "not set".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub corpus: String,
    pub ner_model: String,
    pub re_model: String,
    pub output_dir: String,
}

/// Every accepted key with a one-line description.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("seed", "seed for splits, sampling and training"),
    ("preprocess.strip_chars", "characters removed from tokens"),
    ("ner.lambda", "CRF L2 strength"),
    ("ner.max_iter", "CRF optimizer iterations"),
    ("ner.tolerance", "CRF gradient-norm stopping threshold"),
    ("ner.optimizer", "lbfgs | gradient-descent"),
    ("ner.embeddings", "embedding table path (empty: off)"),
    ("relex.sampling", "none | negative-sampling | ros"),
    ("relex.neg_rate", "negatives kept per positive"),
    ("relex.ros_multiplier", "Flow frame multiplier for ros"),
    ("relex.head", "head token of a mention: first | last"),
    ("relex.neighbors", "neighbor columns: mention | iob | pos"),
    ("relex.epochs", "classifier epochs"),
    ("relex.batch_size", "classifier mini-batch size"),
    ("relex.learning_rate", "classifier AdaGrad step"),
    ("relex.l2", "classifier L2 strength"),
    ("resolve.exact_match", "link mentions with equal normalized text"),
    ("resolve.head_match", "link mentions with equal last token"),
    ("resolve.pronouns", "link pronoun actors to a preceding actor"),
    ("bpmn.events", "add start and end events"),
    ("bpmn.close_gateways", "insert join gateways"),
    ("bpmn.contract_conditions", "turn conditions into edge labels"),
    ("eval.exclude_O", "leave O out of NER averages"),
    ("eval.relaxed_spans", "overlapping spans count as correct"),
    ("eval.span_level", "score NER on spans instead of tokens"),
    ("eval.folds", "cross-validation folds"),
    ("paths.corpus", "default corpus path"),
    ("paths.ner_model", "default NER model path"),
    ("paths.re_model", "default relation model path"),
    ("paths.output_dir", "directory for written artifacts"),
];

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

fn lookup<'a>(table: &'a Table, key: &str) -> Option<&'a Value> {
    let mut parts = key.split('.');
    let mut cur = table.get(parts.next()?)?;
    for p in parts {
        cur = cur.as_table()?.get(p)?;
    }
    Some(cur)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Explicit file if given, else the file named by `PROC2BPMN_CONFIG`,
    /// else defaults.
    pub fn resolve_file(explicit: Option<&Path>) -> Result<RunConfig> {
        if let Some(p) = explicit {
            return RunConfig::load(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => RunConfig::load(PathBuf::from(p)),
            _ => Ok(RunConfig::default()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn to_table(&self) -> Table {
        Table::try_from(self).expect("config serializes")
    }

    /// Applies one `section.key=value` override. The value is read as a TOML
    /// literal, falling back to a bare string.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        let key = key.trim();
        if !CONFIG_KEYS.iter().any(|(k, _)| *k == key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        let raw = raw.trim();
        let value = toml::from_str::<Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        let mut table = self.to_table();
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().expect("non-empty key");
        let mut cur = &mut table;
        for p in parts {
            cur = cur
                .entry(p)
                .or_insert_with(|| Value::Table(Table::new()))
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("`{p}` is not a section")))?;
        }
        cur.insert(last.to_string(), value);
        let updated: RunConfig = Value::Table(table)
            .try_into()
            .map_err(|e| Error::Config(format!("{key}: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    /// Rendered default of every key, for help output.
    pub fn key_listing() -> String {
        let defaults = RunConfig::default().to_table();
        let width = CONFIG_KEYS.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (key, help) in CONFIG_KEYS {
            let value = lookup(&defaults, key).map_or("\"\"".to_string(), |v| v.to_string());
            out.push_str(&format!("  {key:<width$} = {value:<10} {help}\n"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config().validate()?;
        self.sampling().validate()?;
        if self.relex.epochs == 0 || self.relex.batch_size == 0 {
            return Err(Error::Config("relex.epochs and relex.batch_size must be >= 1".into()));
        }
        if !(self.relex.learning_rate > 0.0) || !(self.relex.l2 >= 0.0) {
            return Err(Error::Config("relex.learning_rate must be > 0 and relex.l2 >= 0".into()));
        }
        if self.eval.folds < 2 {
            return Err(Error::Config("eval.folds must be >= 2".into()));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            lambda: self.ner.lambda,
            max_iterations: self.ner.max_iter,
            tolerance: self.ner.tolerance,
            optimizer: self.ner.optimizer,
            seed: self.seed,
        }
    }

    pub fn embeddings_path(&self) -> Option<&Path> {
        (!self.ner.embeddings.is_empty()).then(|| Path::new(&self.ner.embeddings))
    }

    pub fn sampling(&self) -> SamplingStrategy {
        match self.relex.sampling {
            SamplingChoice::None => SamplingStrategy::None,
            SamplingChoice::NegativeSampling => SamplingStrategy::NegativeSampling {
                rate: self.relex.neg_rate,
                seed: self.seed,
            },
            SamplingChoice::Ros => SamplingStrategy::RandomOverSampling {
                target: RelationType::Flow,
                multiplier: self.relex.ros_multiplier,
                seed: self.seed,
            },
        }
    }

    /// The strategies compared by the sampling experiment.
    pub fn sampling_strategies(&self) -> Vec<SamplingStrategy> {
        vec![
            SamplingStrategy::None,
            SamplingStrategy::NegativeSampling {
                rate: self.relex.neg_rate,
                seed: self.seed,
            },
            SamplingStrategy::RandomOverSampling {
                target: RelationType::Flow,
                multiplier: self.relex.ros_multiplier,
                seed: self.seed,
            },
        ]
    }

    pub fn frame_config(&self) -> FrameConfig {
        FrameConfig {
            head: self.relex.head,
            neighbors: self.relex.neighbors,
        }
    }

    pub fn lr_config(&self) -> LrConfig {
        LrConfig {
            epochs: self.relex.epochs,
            batch_size: self.relex.batch_size,
            learning_rate: self.relex.learning_rate,
            l2: self.relex.l2,
            seed: self.seed,
        }
    }

    pub fn assemble_config(&self) -> AssembleConfig {
        AssembleConfig {
            events: self.bpmn.events,
            contract_conditions: self.bpmn.contract_conditions,
        }
    }

    pub fn ner_eval_options(&self) -> NerEvalOptions {
        NerEvalOptions {
            exclude_o: self.eval.exclude_o,
            span_level: self.eval.span_level,
        }
    }

    pub fn span_mode(&self) -> SpanMode {
        if self.eval.relaxed_spans {
            SpanMode::Relaxed
        } else {
            SpanMode::Exact
        }
    }
}
