//! The `proc2bpmn` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::bpmn::{emit_dot, parse_dot, BpmnGraph};
use crate::config::RunConfig;
use crate::corpus::io::write_jsonl;
use crate::corpus::{corpus_stats, kfold_split, load_corpus, Corpus, CorpusFormat};
use crate::error::Error;
use crate::eval::PipelineScore;
use crate::experiments::{
    compare_sampling, cross_validate_ner, evaluate_ner, evaluate_pipeline, evaluate_relations,
    train_ner, transfer_ner,
};
use crate::ner::{CrfModel, Embeddings};
use crate::pipeline::{ExtractOptions, Extractor};
use crate::relex::{apply_sampling, corpus_frames, train_relation_classifier, LogisticRegression};
use crate::relex::frame::write_frames_csv;

#[derive(Parser, Debug)]
#[command(name = "proc2bpmn", version, about = "Extract BPMN process graphs from process descriptions")]
struct Cli {
    /// TOML config file (default: $PROC2BPMN_CONFIG, then built-in defaults).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set ner.lambda=0.2`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CorpusArgs {
    /// Corpus file; several are concatenated.
    #[arg(long = "corpus", value_name = "PATH")]
    paths: Vec<PathBuf>,
    /// pet-json | native-jsonl | auto
    #[arg(long, default_value = "auto")]
    format: String,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Write CSV instead of a table.
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    /// Output file (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mention-type statistics of a corpus.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        json: bool,
    },
    /// Write document-level k-fold train/test files.
    Split {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Train the CRF mention tagger.
    TrainNer {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// lbfgs | gradient-descent
        #[arg(long)]
        optimizer: Option<String>,
        #[arg(long, value_name = "PATH")]
        embeddings: Option<PathBuf>,
    },
    /// Score a trained tagger on a corpus.
    EvalNer {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        #[arg(long)]
        exclude_o: bool,
        #[arg(long)]
        span_level: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-validate the tagger (pass several corpora to combine them), or
    /// with --test train on the corpora and score on another.
    CvNer {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_name = "PATH")]
        test: Option<PathBuf>,
        #[arg(long)]
        exclude_o: bool,
        #[arg(long)]
        span_level: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Train the relation classifier on gold mentions.
    TrainRe {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// none | negative-sampling | ros
        #[arg(long)]
        sampling: Option<String>,
        #[arg(long)]
        neg_rate: Option<f64>,
        #[arg(long)]
        ros_multiplier: Option<f64>,
        /// Also dump the sampled training frames as CSV.
        #[arg(long, value_name = "PATH")]
        frames_csv: Option<PathBuf>,
    },
    /// Score a relation model, or without --model compare sampling
    /// strategies by cross-validation.
    EvalRe {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Raw text to a process graph (DOT, optionally JSON).
    Extract {
        #[arg(long, value_name = "PATH")]
        text: PathBuf,
        #[arg(long, value_name = "PATH")]
        ner: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        re: Option<PathBuf>,
        /// DOT output (default: stdout).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Graph, mentions and clusters as JSON.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Element and relation scores of the full pipeline on a gold corpus,
    /// or recomputed from a counts CSV.
    EvalPipeline {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "PATH")]
        ner: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        re: Option<PathBuf>,
        #[arg(long)]
        relaxed: bool,
        /// CSV rows `name,words,eg,ep,ec,rg,rp,rc`.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["ner", "re"])]
        counts: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Graph JSON to DOT.
    Render {
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => Failure::Usage(msg),
            other => Failure::Data(other),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn command() -> clap::Command {
    Cli::command().after_help(format!(
        "Config keys (set in a TOML file or with --set):\n{}",
        RunConfig::key_listing()
    ))
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code: 0 success, 1 usage or config error, 2 data error.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn set_opt<T: ToString>(cfg: &mut RunConfig, key: &str, value: &Option<T>) -> CliResult {
    if let Some(v) = value {
        cfg.set(&format!("{key}={}", toml_literal(&v.to_string())))?;
    }
    Ok(())
}

fn toml_literal(v: &str) -> String {
    if v.parse::<f64>().is_ok() || v == "true" || v == "false" {
        v.to_string()
    } else {
        format!("{v:?}")
    }
}

fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::resolve_file(cli.config.as_deref())?;
    for o in &cli.overrides {
        cfg.set(o)?;
    }
    set_opt(&mut cfg, "seed", &cli.seed)?;
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    match &cli.command {
        Command::TrainNer {
            lambda,
            max_iter,
            optimizer,
            embeddings,
            ..
        } => {
            set_opt(&mut cfg, "ner.lambda", lambda)?;
            set_opt(&mut cfg, "ner.max_iter", max_iter)?;
            set_opt(&mut cfg, "ner.optimizer", optimizer)?;
            set_opt(&mut cfg, "ner.embeddings", &path(embeddings))?;
        }
        Command::EvalNer {
            exclude_o,
            span_level,
            model,
            ..
        } => {
            set_flag(&mut cfg, "eval.exclude_O", *exclude_o)?;
            set_flag(&mut cfg, "eval.span_level", *span_level)?;
            set_opt(&mut cfg, "paths.ner_model", &path(model))?;
        }
        Command::CvNer {
            k,
            exclude_o,
            span_level,
            ..
        } => {
            set_opt(&mut cfg, "eval.folds", k)?;
            set_flag(&mut cfg, "eval.exclude_O", *exclude_o)?;
            set_flag(&mut cfg, "eval.span_level", *span_level)?;
        }
        Command::Split { k, .. } => set_opt(&mut cfg, "eval.folds", k)?,
        Command::TrainRe {
            sampling,
            neg_rate,
            ros_multiplier,
            ..
        } => {
            set_opt(&mut cfg, "relex.sampling", sampling)?;
            set_opt(&mut cfg, "relex.neg_rate", neg_rate)?;
            set_opt(&mut cfg, "relex.ros_multiplier", ros_multiplier)?;
        }
        Command::EvalRe { k, model, .. } => {
            set_opt(&mut cfg, "eval.folds", k)?;
            set_opt(&mut cfg, "paths.re_model", &path(model))?;
        }
        Command::Extract { ner, re, .. } => {
            set_opt(&mut cfg, "paths.ner_model", &path(ner))?;
            set_opt(&mut cfg, "paths.re_model", &path(re))?;
        }
        Command::EvalPipeline {
            ner, re, relaxed, ..
        } => {
            set_opt(&mut cfg, "paths.ner_model", &path(ner))?;
            set_opt(&mut cfg, "paths.re_model", &path(re))?;
            set_flag(&mut cfg, "eval.relaxed_spans", *relaxed)?;
        }
        Command::Stats { .. } | Command::Render { .. } => {}
    }
    Ok(cfg)
}

fn set_flag(cfg: &mut RunConfig, key: &str, on: bool) -> CliResult {
    if on {
        cfg.set(&format!("{key}=true"))?;
    }
    Ok(())
}

fn load_corpora(args: &CorpusArgs, cfg: &RunConfig) -> CliResult<Corpus> {
    let format: CorpusFormat = args.format.parse()?;
    let paths: Vec<PathBuf> = if args.paths.is_empty() {
        if cfg.paths.corpus.is_empty() {
            return Err(usage("no corpus given (--corpus or paths.corpus)"));
        }
        vec![PathBuf::from(&cfg.paths.corpus)]
    } else {
        args.paths.clone()
    };
    let parts = paths
        .iter()
        .map(|p| load_corpus(p, format))
        .collect::<crate::Result<Vec<_>>>()?;
    let corpus = Corpus::merge(parts)?;
    if corpus.is_empty() {
        return Err(Failure::Data(Error::EmptyCorpus));
    }
    Ok(corpus)
}

fn required_path(value: &str, what: &str, key: &str) -> CliResult<PathBuf> {
    if value.is_empty() {
        Err(usage(format!("no {what} given (--{} or {key})", key.rsplit('.').next().unwrap_or(key))))
    } else {
        Ok(PathBuf::from(value))
    }
}

fn output_path(cfg: &RunConfig, p: &Path) -> PathBuf {
    if cfg.paths.output_dir.is_empty() || p.is_absolute() {
        p.to_path_buf()
    } else {
        Path::new(&cfg.paths.output_dir).join(p)
    }
}

fn emit(cfg: &RunConfig, out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => {
            let p = output_path(cfg, p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            fs::write(&p, text).map_err(|e| Failure::Data(Error::io(&p, e)))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Data(Error::io("<stdout>", e)))
        }
    }
}

fn embeddings(cfg: &RunConfig) -> CliResult<Option<Embeddings>> {
    Ok(cfg.embeddings_path().map(Embeddings::load).transpose()?)
}

fn render_report(
    output: &OutputArgs,
    json: impl FnOnce() -> crate::Result<String>,
    csv: impl FnOnce() -> String,
    table: impl FnOnce() -> String,
) -> CliResult<String> {
    Ok(if output.json {
        json()? + "\n"
    } else if output.csv {
        csv()
    } else {
        table()
    })
}

fn run(cli: Cli) -> CliResult {
    let cfg = resolve_config(&cli)?;
    eprintln!("# resolved config\n{}", cfg.to_toml().trim_end());

    match &cli.command {
        Command::Stats { corpus, json } => {
            let c = load_corpora(corpus, &cfg)?;
            let table = corpus_stats(&c)?;
            let text = if *json {
                serde_json::to_string_pretty(&table).map_err(Error::from)? + "\n"
            } else {
                table.to_string()
            };
            emit(&cfg, None, &text)
        }
        Command::Split {
            corpus, out_dir, ..
        } => {
            let c = load_corpora(corpus, &cfg)?;
            let dir = out_dir
                .clone()
                .or_else(|| (!cfg.paths.output_dir.is_empty()).then(|| PathBuf::from(&cfg.paths.output_dir)))
                .ok_or_else(|| usage("no output directory (--out-dir or paths.output_dir)"))?;
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            for (i, (train, test)) in kfold_split(&c, cfg.eval.folds, cfg.seed)?.iter().enumerate() {
                write_jsonl(train, dir.join(format!("fold-{i}-train.jsonl")))?;
                write_jsonl(test, dir.join(format!("fold-{i}-test.jsonl")))?;
                eprintln!("fold {i}: {} train / {} test documents", train.len(), test.len());
            }
            Ok(())
        }
        Command::TrainNer { corpus, out, .. } => {
            let c = load_corpora(corpus, &cfg)?;
            let out = out
                .clone()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| cfg.paths.ner_model.clone());
            let out = output_path(&cfg, &required_path(&out, "model output", "paths.ner_model")?);
            let emb = embeddings(&cfg)?;
            let model = train_ner(&c, &cfg.train_config(), emb.as_ref())?;
            model.save(&out)?;
            eprintln!("wrote {} ({} features)", out.display(), model.vocabulary().len());
            Ok(())
        }
        Command::EvalNer { corpus, output, .. } => {
            let c = load_corpora(corpus, &cfg)?;
            let model = CrfModel::load(required_path(&cfg.paths.ner_model, "NER model", "paths.ner_model")?)?;
            let emb = embeddings(&cfg)?;
            let report = evaluate_ner(&model, &c, emb.as_ref(), &cfg.ner_eval_options())?;
            let text = render_report(output, || report.to_json(), || report.to_csv(), || report.to_string())?;
            emit(&cfg, output.out.as_deref(), &text)
        }
        Command::CvNer {
            corpus,
            test,
            output,
            ..
        } => {
            let c = load_corpora(corpus, &cfg)?;
            let emb = embeddings(&cfg)?;
            let opts = cfg.ner_eval_options();
            let text = match test {
                Some(t) => {
                    let format: CorpusFormat = corpus.format.parse()?;
                    let test = load_corpus(t, format)?;
                    let report = transfer_ner(&c, &test, &cfg.train_config(), emb.as_ref(), &opts)?;
                    render_report(output, || report.to_json(), || report.to_csv(), || report.to_string())?
                }
                None => {
                    let cv = cross_validate_ner(&c, cfg.eval.folds, cfg.seed, &cfg.train_config(), emb.as_ref(), &opts)?;
                    render_report(
                        output,
                        || Ok(serde_json::to_string_pretty(&cv)?),
                        || cv.mean.to_csv(),
                        || {
                            let mut s = String::new();
                            for (i, f) in cv.folds.iter().enumerate() {
                                s.push_str(&format!(
                                    "fold {i}: micro F1 {:.4}  macro F1 {:.4}  weighted F1 {:.4}\n",
                                    f.micro.f1, f.macro_avg.f1, f.weighted.f1
                                ));
                            }
                            s.push_str(&format!("\nmean over {} folds\n{}", cv.folds.len(), cv.mean));
                            s
                        },
                    )?
                }
            };
            emit(&cfg, output.out.as_deref(), &text)
        }
        Command::TrainRe {
            corpus,
            out,
            frames_csv,
            ..
        } => {
            let c = load_corpora(corpus, &cfg)?;
            let out = out
                .clone()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| cfg.paths.re_model.clone());
            let out = output_path(&cfg, &required_path(&out, "model output", "paths.re_model")?);
            let named = corpus_frames(&c, &cfg.frame_config());
            let frames: Vec<_> = named.iter().map(|(_, f)| f.clone()).collect();
            let sampled = apply_sampling(&frames, &cfg.sampling())?;
            if let Some(p) = frames_csv {
                let p = output_path(&cfg, p);
                let file = fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
                let rows: Vec<(String, _)> = if sampled.len() == frames.len() && sampled == frames {
                    named.clone()
                } else {
                    sampled.iter().map(|f| (String::new(), f.clone())).collect()
                };
                write_frames_csv(file, &rows)?;
            }
            let (model, report) = train_relation_classifier(&sampled, &cfg.lr_config())?;
            model.save(&out)?;
            eprintln!(
                "wrote {} ({} training frames, {} held out)",
                out.display(),
                report.train_size,
                report.held_out_size
            );
            if let Some(r) = report.held_out {
                emit(&cfg, None, &format!("held-out frames\n{r}"))?;
            }
            Ok(())
        }
        Command::EvalRe { corpus, output, .. } => {
            let c = load_corpora(corpus, &cfg)?;
            let text = if cfg.paths.re_model.is_empty() {
                let results = compare_sampling(
                    &c,
                    cfg.eval.folds,
                    cfg.seed,
                    &cfg.frame_config(),
                    &cfg.lr_config(),
                    &cfg.sampling_strategies(),
                )?;
                render_report(
                    output,
                    || Ok(serde_json::to_string_pretty(&results)?),
                    || {
                        let mut s = String::from("strategy,");
                        let labels: Vec<&str> = results[0].report.classes.iter().map(|c| c.label.as_str()).collect();
                        s.push_str(&labels.join(","));
                        s.push_str(",macro_f1\n");
                        for r in &results {
                            s.push_str(&r.strategy);
                            for c in &r.report.classes {
                                s.push_str(&format!(",{:.4}", c.f1));
                            }
                            s.push_str(&format!(",{:.4}\n", r.report.macro_avg.f1));
                        }
                        s
                    },
                    || {
                        results
                            .iter()
                            .map(|r| format!("strategy: {}\n{}\n", r.strategy, r.report))
                            .collect()
                    },
                )?
            } else {
                let model = LogisticRegression::load(&cfg.paths.re_model)?;
                let frames: Vec<_> = corpus_frames(&c, &cfg.frame_config())
                    .into_iter()
                    .map(|(_, f)| f)
                    .collect();
                let report = evaluate_relations(&model, &frames);
                render_report(output, || report.to_json(), || report.to_csv(), || report.to_string())?
            };
            emit(&cfg, output.out.as_deref(), &text)
        }
        Command::Extract { text, out, json, .. } => {
            let ner = CrfModel::load(required_path(&cfg.paths.ner_model, "NER model", "paths.ner_model")?)?;
            let re = LogisticRegression::load(required_path(&cfg.paths.re_model, "relation model", "paths.re_model")?)?;
            let emb = embeddings(&cfg)?;
            let raw = fs::read_to_string(text).map_err(|e| Error::io(text, e))?;
            let name = text
                .file_stem()
                .map_or("document".to_string(), |s| s.to_string_lossy().into_owned());
            let extractor = Extractor {
                ner: &ner,
                relations: &re,
                embeddings: emb.as_ref(),
                options: ExtractOptions::from(&cfg),
            };
            let result = extractor.extract_text(&name, &raw);
            if let Some(p) = json {
                emit(&cfg, Some(p), &(result.to_json()? + "\n"))?;
            }
            emit(&cfg, out.as_deref(), &emit_dot(&result.graph))
        }
        Command::EvalPipeline {
            corpus,
            counts,
            output,
            ..
        } => {
            let score = match counts {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                    PipelineScore::from_counts_csv(&text)?
                }
                None => {
                    let c = load_corpora(corpus, &cfg)?;
                    let ner = CrfModel::load(required_path(&cfg.paths.ner_model, "NER model", "paths.ner_model")?)?;
                    let re = LogisticRegression::load(required_path(&cfg.paths.re_model, "relation model", "paths.re_model")?)?;
                    let emb = embeddings(&cfg)?;
                    let extractor = Extractor {
                        ner: &ner,
                        relations: &re,
                        embeddings: emb.as_ref(),
                        options: ExtractOptions::from(&cfg),
                    };
                    evaluate_pipeline(&extractor, &c, cfg.span_mode())?
                }
            };
            let text = render_report(output, || score.to_json(), || score.to_csv(), || score.to_string())?;
            emit(&cfg, output.out.as_deref(), &text)
        }
        Command::Render { graph, out } => {
            let text = fs::read_to_string(graph).map_err(|e| Error::io(graph, e))?;
            let g = match BpmnGraph::from_json(&text) {
                Ok(g) => g,
                Err(_) => {
                    // Accept the full extraction JSON as well.
                    let v: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
                    let inner = v.get("graph").cloned().ok_or_else(|| {
                        Failure::Data(Error::ModelFormat("no graph object in JSON".into()))
                    })?;
                    BpmnGraph::from_json(&inner.to_string())?
                }
            };
            g.validate()?;
            let dot = emit_dot(&g);
            parse_dot(&dot)?;
            emit(&cfg, out.as_deref(), &dot)
        }
    }
}
