//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria 1 to 4 need the annotated corpora: point `PROC2BPMN_PET` at the
//! PET v1.1 file and `PROC2BPMN_LESCHNEIDER` at the LESCHNEIDER documents.
//! Without them those lines read FAIL with the reason. The process exits
//! non-zero when a criterion that could be evaluated fails, or, with
//! `PROC2BPMN_STRICT=1`, when any criterion fails.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use proc2bpmn::bpmn::{EdgeKind, NodeKind};
use proc2bpmn::config::RunConfig;
use proc2bpmn::corpus::{corpus_stats, load_corpus, Corpus, CorpusFormat, IobTag, MentionType, RelationType};
use proc2bpmn::eval::{Counts, MetricsReport, PipelineScore};
use proc2bpmn::experiments::{compare_sampling, cross_validate_ner, train_ner, transfer_ner};
use proc2bpmn::ner::labeled_sequences;
use proc2bpmn::pipeline::{ExtractOptions, Extractor};
use proc2bpmn::relex::frame::MentionSide;
use proc2bpmn::relex::{
    apply_sampling, build_pair_frames, corpus_frames, train_relation_classifier, FrameConfig, LrConfig,
    MentionPairFrame, SamplingStrategy,
};
use proc2bpmn::synth::{count_matched_corpus, synthetic_corpus, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    /// Could not be evaluated here.
    Missing(String),
}

struct Data {
    pet: Option<Corpus>,
    leschneider: Option<Corpus>,
}

fn load_env(var: &str) -> Result<Option<Corpus>> {
    match std::env::var_os(var) {
        Some(p) if !p.is_empty() => {
            let path = PathBuf::from(p);
            let c = load_corpus(&path, CorpusFormat::Auto).with_context(|| format!("loading {}", path.display()))?;
            Ok(Some(c))
        }
        _ => Ok(None),
    }
}

fn missing(what: &str) -> Outcome {
    Outcome::Missing(format!("{what} not available"))
}

fn gate(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

type Row = (MentionType, u64, [u64; 3]);

fn table(abs: [u64; 7], rel: [u64; 7], doc: [u64; 7], sent: [u64; 7]) -> Vec<Row> {
    use MentionType::*;
    [Actor, Activity, ActivityData, XorGateway, FurtherSpecification, ConditionSpecification, AndGateway]
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, abs[i], [rel[i], doc[i], sent[i]]))
        .collect()
}

fn pet_table() -> Vec<Row> {
    table(
        [449, 502, 459, 117, 64, 80, 8],
        [2674, 2990, 2734, 697, 381, 476, 48],
        [998, 1116, 1020, 260, 142, 178, 18],
        [108, 120, 110, 28, 15, 19, 2],
    )
}

fn combined_table() -> Vec<Row> {
    table(
        [542, 613, 568, 136, 86, 98, 40],
        [2602, 2943, 2727, 653, 413, 470, 192],
        [903, 1022, 947, 227, 143, 163, 67],
        [107, 121, 112, 27, 17, 19, 8],
    )
}

fn stats_match(corpus: &Corpus, want: &[Row]) -> Result<Option<String>> {
    let t = corpus_stats(corpus)?;
    for &(ty, abs, [rel, doc, sent]) in want {
        let r = t.row(ty);
        let got = (r.absolute, r.relative.0, r.per_document.0, r.per_sentence.0);
        if got != (abs, rel, doc, sent) {
            return Ok(Some(format!("{}: got {got:?}, want {:?}", ty.name(), (abs, rel, doc, sent))));
        }
    }
    Ok(None)
}

fn criterion1(data: &Data) -> Result<Outcome> {
    // Arithmetic on corpora with the reference document, sentence and
    // mention counts.
    let counts = |rows: &[Row]| rows.iter().map(|&(t, n, _)| (t, n as usize)).collect::<Vec<_>>();
    let mut arithmetic = Vec::new();
    for (name, docs, sentences, rows) in [("PET table", 45, 417, pet_table()), ("combined table", 60, 508, combined_table())] {
        let c = count_matched_corpus(docs, sentences, &counts(&rows))?;
        if let Some(e) = stats_match(&c, &rows)? {
            return Ok(Outcome::Fail(format!("{name} arithmetic: {e}")));
        }
        arithmetic.push(name);
    }
    let Some(pet) = &data.pet else {
        return Ok(Outcome::Missing(format!(
            "PET corpus not available (PROC2BPMN_PET); count-matched arithmetic reproduces {}",
            arithmetic.join(" and ")
        )));
    };
    let start = Instant::now();
    if let Some(e) = stats_match(pet, &pet_table())? {
        return Ok(Outcome::Fail(format!("PET: {e}")));
    }
    let Some(les) = &data.leschneider else {
        return Ok(missing("LESCHNEIDER corpus (PROC2BPMN_LESCHNEIDER)"));
    };
    let combined = Corpus::merge([pet.clone(), les.clone()])?;
    if let Some(e) = stats_match(&combined, &combined_table())? {
        return Ok(Outcome::Fail(format!("PET+LESCHNEIDER: {e}")));
    }
    let elapsed = start.elapsed();
    Ok(gate(elapsed < Duration::from_secs(5), format!("PET and combined tables exact in {elapsed:.2?}")))
}

fn f1(report: &MetricsReport, label: &str) -> f64 {
    report.class(label).map_or(0.0, |c| c.f1)
}

fn criterion2(data: &Data, cfg: &RunConfig) -> Result<(Outcome, Option<f64>)> {
    let Some(pet) = &data.pet else {
        return Ok((missing("PET corpus (PROC2BPMN_PET)"), None));
    };
    let cv = cross_validate_ner(pet, 5, cfg.seed, &cfg.train_config(), None, &cfg.ner_eval_options())?;
    let w = cv.mean.weighted.f1;
    let actor = f1(&cv.mean, "B-Actor");
    let activity = f1(&cv.mean, "B-Activity");
    let ok = (w - 0.72).abs() <= 0.05 && actor >= 0.75 && activity >= 0.73;
    Ok((
        gate(ok, format!("weighted F1 {w:.3} (0.72 +- 0.05), B-Actor {actor:.3} (>= 0.75), B-Activity {activity:.3} (>= 0.73)")),
        Some(w),
    ))
}

fn criterion3(data: &Data, cfg: &RunConfig, baseline: Option<f64>) -> Result<Outcome> {
    let (Some(pet), Some(les)) = (&data.pet, &data.leschneider) else {
        return Ok(missing("PET and LESCHNEIDER corpora"));
    };
    let Some(base) = baseline else {
        return Ok(missing("criterion 2 baseline"));
    };
    let r = transfer_ner(pet, les, &cfg.train_config(), None, &cfg.ner_eval_options())?;
    let w = r.weighted.f1;
    Ok(gate(base - w >= 0.05, format!("transfer weighted F1 {w:.3} vs baseline {base:.3} (drop >= 0.05)")))
}

fn criterion4(data: &Data, cfg: &RunConfig) -> Result<Outcome> {
    let (Some(pet), Some(les)) = (&data.pet, &data.leschneider) else {
        return Ok(missing("PET and LESCHNEIDER corpora"));
    };
    let combined = Corpus::merge([pet.clone(), les.clone()])?;
    let cv = cross_validate_ner(&combined, 5, cfg.seed, &cfg.train_config(), None, &cfg.ner_eval_options())?;
    let and = cv.mean.class("B-AndGateway").cloned();
    let (p, f) = and.map_or((0.0, 0.0), |c| (c.precision, c.f1));
    Ok(gate(f > 0.0 && p >= 0.30, format!("B-AndGateway F1 {f:.3} (> 0), precision {p:.3} (>= 0.30)")))
}

fn criterion5() -> Result<Outcome> {
    let start = Instant::now();
    let worst = (0..20).map(|s| common::crf::gradient_gap(s, 0.05)).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut viterbi_ok = 0;
    let mut viterbi_total = 0;
    for len in 1..=4 {
        for _ in 0..10 {
            viterbi_total += 1;
            viterbi_ok += usize::from(common::crf::viterbi_is_exact(&mut rng, IobTag::COUNT, len));
        }
    }
    let z_gap = (0..200)
        .map(|i| common::crf::partition_gap(&mut rng, IobTag::COUNT, 1 + i % 40))
        .fold(0.0, f64::max);

    // A trained model's decode scores at least as high as the gold path.
    let corpus = synthetic_corpus(&SynthConfig { documents: 20, ..Default::default() })?;
    let model = train_ner(&corpus, &RunConfig::default().train_config(), None)?;
    let dominated = labeled_sequences(&corpus, None)?.iter().all(|s| {
        let best = model.viterbi_decode(&s.features);
        model.path_score(&s.features, &best) >= model.path_score(&s.features, &s.tags) - 1e-9
    });
    let elapsed = start.elapsed();
    let ok = worst < 1e-4
        && viterbi_ok == viterbi_total
        && z_gap < 1e-8
        && dominated
        && elapsed < Duration::from_secs(60);
    Ok(gate(
        ok,
        format!(
            "gradient gap {worst:.1e} (< 1e-4), Viterbi exact {viterbi_ok}/{viterbi_total}, \
             log Z gap {z_gap:.1e} (< 1e-8), decode >= gold: {dominated}, {elapsed:.2?}"
        ),
    ))
}

fn count(frames: &[MentionPairFrame], t: RelationType) -> usize {
    frames.iter().filter(|f| f.label == t).count()
}

fn criterion6() -> Result<Outcome> {
    let mut checked = 0;
    for seed in 0..200u64 {
        let frames: Vec<MentionPairFrame> = (0..5)
            .flat_map(|i| {
                let d = common::random_document(seed * 7 + i, "d");
                build_pair_frames(&d, &d.mentions, &FrameConfig::default())
            })
            .collect();
        let ros = apply_sampling(
            &frames,
            &SamplingStrategy::RandomOverSampling { target: RelationType::Flow, multiplier: 2.0, seed },
        )?;
        for t in RelationType::ALL {
            let want = count(&frames, t) * if t == RelationType::Flow { 2 } else { 1 };
            if count(&ros, t) != want {
                return Ok(Outcome::Fail(format!("seed {seed}: ROS {t} count {} != {want}", count(&ros, t))));
            }
        }
        let positives = frames.len() - count(&frames, RelationType::NoRelation);
        if positives == 0 {
            continue;
        }
        let rate = [0.5, 1.0, 1.7, 2.0, 5.0][seed as usize % 5];
        let ns = apply_sampling(&frames, &SamplingStrategy::NegativeSampling { rate, seed })?;
        let kept_pos = ns.len() - count(&ns, RelationType::NoRelation);
        let want_neg = ((rate * positives as f64) - 1e-9).ceil() as usize;
        let want_neg = want_neg.min(count(&frames, RelationType::NoRelation));
        if kept_pos != positives || count(&ns, RelationType::NoRelation) != want_neg {
            return Ok(Outcome::Fail(format!("seed {seed}: negative sampling counts")));
        }
        checked += 1;
    }
    Ok(Outcome::Pass(format!(
        "ROS doubles Flow on 200 frame sets; negative sampling exact on {checked}"
    )))
}

fn separable_frames(n: usize) -> Vec<MentionPairFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    (0..n)
        .map(|id| {
            let s = MentionType::ALL[rng.gen_range(0..7)];
            let t = MentionType::ALL[rng.gen_range(0..7)];
            let side = |mention_type, rng: &mut ChaCha8Rng| MentionSide {
                token: format!("w{}", rng.gen_range(0..50)),
                mention_type,
                pos: "NN".into(),
                sentence_id: 0,
                token_id: rng.gen_range(0..20),
                prev: "NONE".into(),
                next: "NONE".into(),
            };
            MentionPairFrame {
                source_id: id,
                target_id: id + 1,
                source: side(s, &mut rng),
                target: side(t, &mut rng),
                token_distance: rng.gen_range(-10..10),
                sentence_distance: 0,
                dependency: "NONE".into(),
                label: RelationType::ALL[(s.index() * 3 + t.index()) % 7],
            }
        })
        .collect()
}

fn criterion7(data: &Data, cfg: &RunConfig) -> Result<Outcome> {
    let (_, report) = train_relation_classifier(&separable_frames(1500), &LrConfig::default())?;
    let acc = report.held_out.map_or(0.0, |r| r.micro.f1);

    let (corpus, source) = match (&data.pet, &data.leschneider) {
        (Some(p), Some(l)) => (Corpus::merge([p.clone(), l.clone()])?, "PET+LESCHNEIDER"),
        _ => (synthetic_corpus(&SynthConfig::default())?, "synthetic corpus, real data unavailable"),
    };
    let ros = SamplingStrategy::RandomOverSampling {
        target: RelationType::Flow,
        multiplier: cfg.relex.ros_multiplier,
        seed: cfg.seed,
    };
    let results = compare_sampling(&corpus, 5, cfg.seed, &cfg.frame_config(), &cfg.lr_config(), &[ros])?;
    let flow = f1(&results[0].report, "Flow");
    Ok(gate(
        acc == 1.0,
        format!(
            "separable held-out accuracy {:.1}% (gate 100%); Flow F1 with ROS {:.1}% on {source} (reference 62%)",
            acc * 100.0,
            flow * 100.0
        ),
    ))
}

fn criterion8() -> Result<Outcome> {
    let start = Instant::now();
    let score = PipelineScore::from_counts_csv(common::pipeline_counts::COUNTS)?;
    let rows = |f: fn(&proc2bpmn::eval::DocumentScore) -> Counts, total: Counts| {
        score.documents.iter().map(f).chain([total]).collect::<Vec<_>>()
    };
    let el = rows(|d| d.elements, score.elements);
    let rel = rows(|d| d.relations, score.relations);
    let mut mismatches = 0;
    for (c, want) in el.iter().zip(common::pipeline_counts::ELEMENTS).chain(rel.iter().zip(common::pipeline_counts::RELATIONS)) {
        mismatches += usize::from((c.precision().0, c.recall().0, c.f1().0) != want);
    }
    let elapsed = start.elapsed();
    Ok(gate(
        mismatches == 0 && elapsed < Duration::from_secs(1),
        format!(
            "42 percentages, {mismatches} mismatches; elements {}/{}/{}, relations {}/{}/{}, {elapsed:.2?}",
            score.elements.precision(),
            score.elements.recall(),
            score.elements.f1(),
            score.relations.precision(),
            score.relations.recall(),
            score.relations.f1()
        ),
    ))
}

fn criterion9() -> Result<Outcome> {
    let corpus = synthetic_corpus(&SynthConfig { documents: 200, seed: 9, ..Default::default() })?;
    for doc in &corpus.documents {
        if let Err(e) = common::graph::check(doc, &Default::default()) {
            return Ok(Outcome::Fail(format!("{}: {e}", doc.name)));
        }
    }
    Ok(Outcome::Pass(
        "200 documents: all mentions represented, closure idempotent and reachability-preserving, DOT stable and parseable"
            .into(),
    ))
}

fn criterion10(data: &Data, cfg: &RunConfig) -> Result<Outcome> {
    let (corpus, source) = match (&data.pet, &data.leschneider) {
        (Some(p), Some(l)) => (Corpus::merge([p.clone(), l.clone()])?, "PET+LESCHNEIDER"),
        _ => (synthetic_corpus(&SynthConfig::default())?, "synthetic corpus"),
    };
    let ner = train_ner(&corpus, &cfg.train_config(), None)?;
    let frames: Vec<_> = corpus_frames(&corpus, &cfg.frame_config()).into_iter().map(|(_, f)| f).collect();
    let (re, _) = train_relation_classifier(&apply_sampling(&frames, &cfg.sampling())?, &cfg.lr_config())?;
    let extractor = Extractor { ner: &ner, relations: &re, embeddings: None, options: ExtractOptions::from(cfg) };
    let g = extractor.extract_text("library", common::LIBRARY).graph;
    let xor = g.count(NodeKind::XorGateway);
    let and = g.count(NodeKind::AndGateway);
    let conditions = g
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::SequenceFlow && !e.label.is_empty())
        .count();
    Ok(gate(
        xor >= 1 && and >= 1 && conditions >= 1,
        format!("trained on {source}: {xor} XOR, {and} AND, {conditions} condition-labeled flows"),
    ))
}

fn main() -> Result<()> {
    let data = Data {
        pet: load_env("PROC2BPMN_PET")?,
        leschneider: load_env("PROC2BPMN_LESCHNEIDER")?,
    };
    let cfg = RunConfig::default();
    let (c2, baseline) = criterion2(&data, &cfg)?;
    let outcomes = [
        criterion1(&data)?,
        c2,
        criterion3(&data, &cfg, baseline)?,
        criterion4(&data, &cfg)?,
        criterion5()?,
        criterion6()?,
        criterion7(&data, &cfg)?,
        criterion8()?,
        criterion9()?,
        criterion10(&data, &cfg)?,
    ];
    let strict = std::env::var("PROC2BPMN_STRICT").is_ok_and(|v| v == "1");
    let mut failed = false;
    for (i, o) in outcomes.iter().enumerate() {
        let n = i + 1;
        match o {
            Outcome::Pass(d) => println!("PASS criterion {n}: {d}"),
            Outcome::Fail(d) => {
                failed = true;
                println!("FAIL criterion {n}: {d}");
            }
            Outcome::Missing(d) => {
                failed |= strict;
                println!("FAIL criterion {n}: not evaluated, {d}");
            }
        }
    }
    if failed {
        std::process::exit(1);
    }
    Ok(())
}
