use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use jel::baselines::{
    logistic_baseline_train, logistic_training_rows, BaselineScorer, LogisticConfig, LogisticModel, Method,
};
use jel::blocking::Blocker;
use jel::config::parse_key_values;
use jel::entity_embed::{build_triplets, industry_purity, train_entity_embeddings, TripletConfig};
use jel::evalkit::{format_metrics_table, format_precision_at_k, scaled_confusion, MetricsRow};
use jel::kb::{load_kb, KnowledgeBase};
use jel::linker::{
    rank_candidates, read_mentions, read_predictions, train_linker, write_mentions, write_predictions, LinkerConfig,
    LinkerModel, MentionContext, Prediction, Resources,
};
use jel::textprep::{tokenize, CharVocab, TfIdfModel};
use jel::vectors::{load_word_vectors, EmbeddingTable};
use jel::weaklabel::{
    answers_from_gold, apply_review, balance_dataset, generate_synthetic_corpus, read_gold, read_pairs, split_dataset,
    weak_label_pairs, write_gold, write_pairs, write_review_queue, LabeledPair, SyntheticSpec, WeakLabelThresholds,
};

use super::outputs::Outputs;
use super::{EvalArgs, IngestArgs, LabelArgs, LinkArgs, SynthArgs, TrainEmbedArgs, TrainLinkArgs};

fn config_entries(path: &Option<std::path::PathBuf>) -> Result<Vec<(String, String)>> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(parse_key_values(&text, &p.display().to_string())?)
        }
        None => Ok(Vec::new()),
    }
}

fn fit_description_tfidf(kb: &KnowledgeBase) -> TfIdfModel {
    let docs: Vec<Vec<String>> = kb.entities().iter().map(|e| tokenize(&e.description)).collect();
    TfIdfModel::fit(docs.iter())
}

fn tfidf_or_fit(path: &Option<std::path::PathBuf>, kb: &KnowledgeBase) -> Result<TfIdfModel> {
    Ok(match path {
        Some(p) => TfIdfModel::load(p)?,
        None => fit_description_tfidf(kb),
    })
}

fn vocab_or_build(path: &Option<std::path::PathBuf>, kb: &KnowledgeBase) -> Result<CharVocab> {
    Ok(match path {
        Some(p) => CharVocab::load(p)?,
        None => CharVocab::build(kb.entities().iter().map(|e| e.name.as_str())),
    })
}

fn require<'a>(p: &'a Option<std::path::PathBuf>, flag: &str, method: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| anyhow!("--{flag} is required for method {method}"))
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let mut spec = SyntheticSpec::default();
    for (k, v) in config_entries(&a.config)? {
        spec.set(&k, &v)?;
    }
    if let Some(v) = a.entities {
        spec.entities = v;
    }
    if let Some(v) = a.industries {
        spec.industries = v;
    }
    if let Some(v) = a.ambiguity {
        spec.ambiguity = v;
    }
    if let Some(v) = a.mentions_per_entity {
        spec.mentions_per_entity = v;
    }
    if let Some(v) = a.word_dim {
        spec.word_dim = v;
    }
    if let Some(v) = a.typo_rate {
        spec.typo_rate = v;
    }
    if let Some(v) = a.seed {
        spec.seed = v;
    }
    let corpus = generate_synthetic_corpus(&spec)?;
    let ambiguous = corpus.ambiguous_mentions().len();

    let mut report = format!("# synth {}\n", spec.describe());
    let _ = writeln!(report, "entities\t{}", corpus.kb.len());
    let _ = writeln!(report, "distinct_names\t{}", corpus.kb.name_count());
    let _ = writeln!(report, "mentions\t{}", corpus.mentions.len());
    let _ = writeln!(report, "ambiguous_mentions\t{ambiguous}");
    let _ = writeln!(report, "words\t{}", corpus.words.len());

    let mut out = Outputs::default();
    out.add(a.out.join("entities.tsv"), corpus.kb.to_tsv());
    out.add(a.out.join("mentions.tsv"), write_mentions(&corpus.mentions)?);
    out.add(a.out.join("gold.tsv"), write_gold(&corpus.gold));
    out.add(a.out.join("word_vectors.txt"), corpus.words.to_text());
    out.add(a.out.join("synth_report.txt"), report);
    out.commit()
}

pub fn ingest(a: IngestArgs) -> Result<()> {
    let kb = load_kb(&a.kb)?;
    let vocab = CharVocab::build(kb.entities().iter().map(|e| e.name.as_str()));
    let tfidf = fit_description_tfidf(&kb);
    let shared = kb
        .entities()
        .iter()
        .map(|e| e.name.as_str())
        .collect::<HashSet<_>>()
        .into_iter()
        .filter(|n| kb.ids_named(n).len() > 1)
        .count();
    let mut report = format!("# ingest kb={}\n", a.kb.display());
    let _ = writeln!(report, "entities\t{}", kb.len());
    let _ = writeln!(report, "distinct_names\t{}", kb.name_count());
    let _ = writeln!(report, "shared_names\t{shared}");
    let _ = writeln!(report, "char_vocab\t{}", vocab.len());
    let _ = writeln!(report, "description_vocab\t{}", tfidf.vocab_size());
    log::info!("loaded {} entities", kb.len());

    let mut out = Outputs::default();
    out.add(a.out.join("char_vocab.tsv"), vocab.to_tsv());
    out.add(a.out.join("tfidf.tsv"), tfidf.to_tsv());
    out.add(a.out.join("ingest_report.txt"), report);
    out.commit()
}

pub fn train_embed(a: TrainEmbedArgs) -> Result<()> {
    let mut cfg = TripletConfig::default();
    for (k, v) in config_entries(&a.config)? {
        cfg.set(&k, &v)?;
    }
    if let Some(v) = a.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = a.margin {
        cfg.margin = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    cfg.validate()?;
    let kb = load_kb(&a.kb)?;
    let words = load_word_vectors(&a.words, None)?;
    let tfidf = tfidf_or_fit(&a.tfidf, &kb)?;
    let set = build_triplets(&kb, &words, &tfidf, &cfg);
    let run = train_entity_embeddings(&set, &words, &cfg)?;

    let mut report = format!("# train-embed {}\n", cfg.describe());
    let _ = writeln!(report, "triplets\t{}", set.triplets.len());
    let _ = writeln!(report, "entities_embedded\t{}", run.table.len());
    let _ = writeln!(report, "entities_excluded\t{}", run.excluded.len());
    if let Some(l) = run.loss_trace.last() {
        let _ = writeln!(report, "final_mean_loss\t{l}");
    }
    if kb.entities().iter().any(|e| e.industry.is_some()) {
        let _ = writeln!(
            report,
            "industry_purity_at_10\t{}",
            industry_purity(&kb, &run.table, 10)
        );
    }

    let mut out = Outputs::default();
    out.add(a.out.join("entity_vectors.txt"), run.table.to_text());
    out.add(a.out.join("embed_loss.tsv"), run.loss_report(&cfg));
    out.add(a.out.join("embed_report.txt"), report);
    out.commit()
}

pub fn label(a: LabelArgs) -> Result<()> {
    let kb = load_kb(&a.kb)?;
    let mentions = read_mentions(&a.mentions)?;
    let weak = weak_label_pairs(&mentions, &kb, None, WeakLabelThresholds::default());

    let mut answers = HashMap::new();
    if let Some(p) = &a.gold {
        let gold: HashMap<String, String> = read_gold(p)?.into_iter().collect();
        answers.extend(answers_from_gold(&weak.review, &gold));
    }
    if let Some(p) = &a.reviewed {
        for pair in read_pairs(p)? {
            let label = pair.label.expect("labeled-pairs rows carry a label");
            answers.insert((pair.mention.id, pair.entity_id), label);
        }
    }
    let (reviewed, open) = apply_review(&weak.review, &answers);
    let mut labeled = weak.labeled.clone();
    labeled.extend(reviewed.iter().cloned());
    let balanced = balance_dataset(&labeled, a.seed);
    let (train, valid, test) = split_dataset(&balanced, a.seed);

    let mut seen = HashSet::new();
    let test_mentions: Vec<MentionContext> = test
        .iter()
        .filter(|p| seen.insert(p.mention.id.clone()))
        .map(|p| p.mention.clone())
        .collect();
    let count = |v: &[LabeledPair], y: bool| v.iter().filter(|p| p.label == Some(y)).count();

    let mut report = format!(
        "# label kb={} mentions={} seed={}\n",
        a.kb.display(),
        a.mentions.display(),
        a.seed
    );
    let _ = writeln!(report, "candidate_pairs\t{}", mentions.len() * kb.len());
    let _ = writeln!(report, "auto_positive\t{}", count(&weak.labeled, true));
    let _ = writeln!(report, "auto_negative\t{}", count(&weak.labeled, false));
    let _ = writeln!(report, "discarded\t{}", weak.discarded);
    let _ = writeln!(report, "review_queue\t{}", weak.review.len());
    let _ = writeln!(report, "name_collisions\t{}", weak.collisions);
    let _ = writeln!(report, "reviewed\t{}", reviewed.len());
    let _ = writeln!(report, "review_open\t{}", open.len());
    let _ = writeln!(report, "balanced_pairs\t{}", balanced.len());
    let _ = writeln!(
        report,
        "train\t{}\nvalid\t{}\ntest\t{}",
        train.len(),
        valid.len(),
        test.len()
    );

    let mut out = Outputs::default();
    out.add(a.out.join("pairs.tsv"), write_pairs(&balanced)?);
    out.add(a.out.join("train.tsv"), write_pairs(&train)?);
    out.add(a.out.join("valid.tsv"), write_pairs(&valid)?);
    out.add(a.out.join("test.tsv"), write_pairs(&test)?);
    out.add(a.out.join("test_mentions.tsv"), write_mentions(&test_mentions)?);
    out.add(a.out.join("review.tsv"), write_review_queue(&open)?);
    out.add(a.out.join("label_report.txt"), report);
    out.commit()
}

pub fn train_link(a: TrainLinkArgs) -> Result<()> {
    let kb = load_kb(&a.kb)?;
    let pairs = read_pairs(&a.pairs)?;
    let mut out = Outputs::default();
    match Method::parse(&a.method) {
        Some(Method::Jel) => {
            let mut cfg = LinkerConfig::default();
            for (k, v) in config_entries(&a.config)? {
                cfg.set(&k, &v)?;
            }
            if let Some(v) = a.epochs {
                cfg.epochs = v;
            }
            if let Some(v) = a.learning_rate {
                cfg.learning_rate = v;
            }
            if let Some(v) = a.seed {
                cfg.seed = v;
            }
            cfg.validate()?;
            let words = load_word_vectors(require(&a.words, "words", "jel")?, None)?;
            let entity_vecs = load_word_vectors(require(&a.entity_vectors, "entity-vectors", "jel")?, None)?;
            let vocab = vocab_or_build(&a.vocab, &kb)?;
            let res = Resources {
                vocab: &vocab,
                words: &words,
                entity_vecs: &entity_vecs,
            };
            let run = train_linker(&pairs, &kb, &res, &cfg)?;
            out.add(a.out.join("linker.ckpt"), run.model.to_checkpoint());
            out.add(a.out.join("link_loss.tsv"), run.loss_report());
        }
        Some(Method::Lr) => {
            let tfidf = tfidf_or_fit(&a.tfidf, &kb)?;
            let rows = logistic_training_rows(&pairs, &kb, &tfidf)?;
            let model = logistic_baseline_train(&rows, &LogisticConfig::default());
            let hits = rows.iter().filter(|(f, y)| model.predict(f) == *y).count();
            let mut text = format!(
                "# lr pairs={} train_accuracy={}\n",
                rows.len(),
                hits as f64 / rows.len().max(1) as f64
            );
            text.push_str(&model.to_text());
            out.add(a.out.join("lr_model.tsv"), text);
        }
        _ => bail!("train-link supports methods jel and lr, not `{}`", a.method),
    }
    out.commit()
}

pub fn link(a: LinkArgs) -> Result<()> {
    let method = Method::parse(&a.method).ok_or_else(|| anyhow!("unknown method `{}`", a.method))?;
    let kb = load_kb(&a.kb)?;
    let mentions = read_mentions(&a.mentions)?;
    let blocker = Blocker::new(&kb, a.block_threshold);
    let mut header: Vec<(String, String)> = vec![
        ("method".into(), method.as_str().into()),
        ("block_threshold".into(), a.block_threshold.to_string()),
        ("mentions".into(), mentions.len().to_string()),
    ];

    let ranked: Vec<Vec<Prediction>> = match method {
        Method::Jel => {
            let model = LinkerModel::load(require(&a.checkpoint, "checkpoint", "jel")?)?;
            let words = load_word_vectors(require(&a.words, "words", "jel")?, None)?;
            let entity_vecs: EmbeddingTable =
                load_word_vectors(require(&a.entity_vectors, "entity-vectors", "jel")?, None)?;
            let vocab = vocab_or_build(&a.vocab, &kb)?;
            if vocab.len() != model.vocab_size() {
                bail!(
                    "character vocabulary has {} entries but the checkpoint expects {}",
                    vocab.len(),
                    model.vocab_size()
                );
            }
            header.push(("threshold".into(), model.config.decision_threshold().to_string()));
            for (k, v) in model.config.entries() {
                if k != "threshold" {
                    header.push((format!("config.{k}"), v));
                }
            }
            let res = Resources {
                vocab: &vocab,
                words: &words,
                entity_vecs: &entity_vecs,
            };
            mentions
                .par_iter()
                .map(|m| {
                    let cands = blocker.candidates(&m.surface);
                    let ranked = rank_candidates(&model, m, &cands, &res)?;
                    Ok(ranked
                        .into_iter()
                        .enumerate()
                        .map(|(i, r)| Prediction {
                            mention_id: m.id.clone(),
                            entity_id: r.entity_id,
                            d_syx: Some(r.score.d_syx),
                            d_smc: Some(r.score.d_smc),
                            d_w: r.score.d_w,
                            rank: i + 1,
                        })
                        .collect())
                })
                .collect::<jel::Result<Vec<_>>>()?
        }
        _ => {
            let tfidf = tfidf_or_fit(&a.tfidf, &kb)?;
            let lr = match method {
                Method::Lr => {
                    let p = require(&a.lr_model, "lr-model", "lr")?;
                    Some(LogisticModel::load(p)?)
                }
                _ => None,
            };
            let scorer = BaselineScorer::new(method, &kb, &tfidf, lr.as_ref())?;
            let sim_threshold = method.similarity_threshold().unwrap_or(0.0);
            header.push(("threshold".into(), (1.0 - sim_threshold).to_string()));
            mentions
                .par_iter()
                .map(|m| {
                    let cands = blocker.candidates(&m.surface);
                    scorer
                        .rank(m, &cands)
                        .into_iter()
                        .enumerate()
                        .map(|(i, c)| Prediction {
                            mention_id: m.id.clone(),
                            entity_id: c.entity_id,
                            d_syx: None,
                            d_smc: None,
                            d_w: 1.0 - c.similarity,
                            rank: i + 1,
                        })
                        .collect()
                })
                .collect()
        }
    };
    let total: usize = ranked.iter().map(Vec::len).sum();
    header.push(("candidates".into(), total.to_string()));
    header.push(("kb_size".into(), kb.len().to_string()));
    let preds: Vec<Prediction> = ranked.into_iter().flatten().collect();

    let mut out = Outputs::default();
    out.add(&a.out, write_predictions(&preds, &header));
    out.commit()
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let (preds, header) = read_predictions(&a.predictions)?;
    let header: HashMap<String, String> = header.into_iter().collect();
    let mut gold: HashMap<String, String> = read_gold(&a.gold)?.into_iter().collect();
    if let Some(p) = &a.mentions {
        let keep: HashSet<String> = read_mentions(p)?.into_iter().map(|m| m.id).collect();
        gold.retain(|m, _| keep.contains(m));
    } else {
        let linked: HashSet<&str> = preds.iter().map(|p| p.mention_id.as_str()).collect();
        gold.retain(|m, _| linked.contains(m.as_str()));
    }
    if gold.is_empty() {
        bail!("no gold links for the evaluated mentions");
    }
    let threshold = match a.threshold {
        Some(t) => t,
        None => header
            .get("threshold")
            .ok_or_else(|| anyhow!("predictions carry no threshold; pass --threshold"))?
            .parse()
            .context("threshold in predictions header")?,
    };
    let method = a
        .method
        .clone()
        .or_else(|| header.get("method").cloned())
        .unwrap_or_else(|| "unknown".into());

    let mut ranked: HashMap<String, Vec<(usize, String)>> = HashMap::new();
    let mut distance: HashMap<(&str, &str), f64> = HashMap::new();
    for p in &preds {
        ranked
            .entry(p.mention_id.clone())
            .or_default()
            .push((p.rank, p.entity_id.clone()));
        distance.insert((p.mention_id.as_str(), p.entity_id.as_str()), p.d_w);
    }
    let ranked: HashMap<String, Vec<String>> = ranked
        .into_iter()
        .map(|(m, mut v)| {
            v.sort();
            (m, v.into_iter().map(|(_, e)| e).collect())
        })
        .collect();

    let outcomes: Vec<(bool, bool)> = match &a.pairs {
        Some(p) => read_pairs(p)?
            .iter()
            .filter(|p| gold.contains_key(&p.mention.id))
            .filter_map(|p| {
                let predicted = distance
                    .get(&(p.mention.id.as_str(), p.entity_id.as_str()))
                    .is_some_and(|d| *d < threshold);
                p.label.map(|y| (predicted, y))
            })
            .collect(),
        None => preds
            .iter()
            .filter_map(|p| gold.get(&p.mention_id).map(|g| (p.d_w < threshold, *g == p.entity_id)))
            .collect(),
    };
    let confusion = scaled_confusion(&outcomes)?;

    let mut ks = a.k.clone();
    ks.sort_unstable();
    ks.dedup();
    let pk: Vec<(usize, f64)> = ks
        .iter()
        .map(|&k| (k, jel::evalkit::precision_at_k(&ranked, &gold, k)))
        .collect();

    let mut report = String::new();
    let _ = writeln!(
        report,
        "# eval predictions={} gold={} threshold={threshold} mentions={} pairs={}",
        a.predictions.display(),
        a.gold.display(),
        gold.len(),
        outcomes.len()
    );
    let mut keys: Vec<&String> = header.keys().collect();
    keys.sort();
    for k in keys {
        let _ = writeln!(report, "# {k}={}", header[k]);
    }
    report.push_str(&format_metrics_table(&[MetricsRow::new(method.clone(), confusion)]));
    report.push('\n');
    report.push_str(&format_precision_at_k(&method, &pk));

    let mut out = Outputs::default();
    out.add(&a.out, report);
    out.commit()
}
