//! Weak labeling of mention/entity pairs and synthetic corpora.
//!
//! Every mention is paired with every entity and the pair is bucketed by
//! the bigram cosine of the two names:
//!
//! | similarity        | outcome                                          |
//! |-------------------|--------------------------------------------------|
//! | `< 0.5`           | labeled 0                                        |
//! | `0.5 ..= 0.75`    | discarded                                        |
//! | `(0.75, 1)`       | review queue                                     |
//! | `1`               | labeled 1, or review queue if the name is shared |
//!
//! The review queue is written to a file, answered outside the pipeline and
//! read back.

mod synth;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::ngram_cosine;
use crate::error::{Error, Result};
use crate::fsutil::{data_lines, read_text};
use crate::kb::KnowledgeBase;
use crate::linker::MentionContext;
use crate::textprep::{normalize_name, TfIdfModel};

pub use synth::{ambiguous_mentions, generate_synthetic_corpus, SyntheticCorpus, SyntheticSpec};

/// How a pair obtained (or is waiting for) its label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    AutoNegative,
    AutoPositive,
    ReviewQueue,
    Reviewed,
    Synthetic,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::AutoNegative => "auto-negative",
            Provenance::AutoPositive => "auto-positive",
            Provenance::ReviewQueue => "review-queue",
            Provenance::Reviewed => "reviewed",
            Provenance::Synthetic => "synthetic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "auto-negative" => Provenance::AutoNegative,
            "auto-positive" => Provenance::AutoPositive,
            "review-queue" => Provenance::ReviewQueue,
            "reviewed" => Provenance::Reviewed,
            "synthetic" => Provenance::Synthetic,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPair {
    pub mention: MentionContext,
    pub entity_id: String,
    /// `None` while the pair waits in the review queue.
    pub label: Option<bool>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakLabelThresholds {
    pub negative_below: f64,
    pub review_above: f64,
}

impl Default for WeakLabelThresholds {
    fn default() -> Self {
        Self {
            negative_below: 0.5,
            review_above: 0.75,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct WeakLabelOutput {
    pub labeled: Vec<LabeledPair>,
    pub review: Vec<LabeledPair>,
    pub discarded: usize,
    /// Exact-name pairs queued because the name belongs to several entities.
    pub collisions: usize,
}

const EXACT: f64 = 1.0 - 1e-12;

/// Buckets every mention × entity pair by bigram cosine of the names.
pub fn weak_label_pairs(
    mentions: &[MentionContext],
    kb: &KnowledgeBase,
    tfidf: Option<&TfIdfModel>,
    thresholds: WeakLabelThresholds,
) -> WeakLabelOutput {
    let normalized: Vec<Option<String>> = kb
        .entities()
        .iter()
        .map(|e| normalize_name(&e.name).ok().map(|n| n.joined))
        .collect();
    let mut name_counts: HashMap<&str, usize> = HashMap::new();
    for n in normalized.iter().flatten() {
        *name_counts.entry(n.as_str()).or_default() += 1;
    }

    let mut out = WeakLabelOutput::default();
    for m in mentions {
        for (e, norm) in kb.entities().iter().zip(&normalized) {
            let sim = ngram_cosine(&m.surface, &e.name, 2, tfidf);
            let pair = |label, provenance| LabeledPair {
                mention: m.clone(),
                entity_id: e.id.clone(),
                label,
                provenance,
            };
            if sim < thresholds.negative_below {
                out.labeled.push(pair(Some(false), Provenance::AutoNegative));
            } else if sim >= EXACT {
                let shared = norm
                    .as_deref()
                    .is_some_and(|n| name_counts.get(n).copied().unwrap_or(0) > 1);
                if shared {
                    out.collisions += 1;
                    out.review.push(pair(None, Provenance::ReviewQueue));
                } else {
                    out.labeled.push(pair(Some(true), Provenance::AutoPositive));
                }
            } else if sim > thresholds.review_above {
                out.review.push(pair(None, Provenance::ReviewQueue));
            } else {
                out.discarded += 1;
            }
        }
    }
    out
}

/// Applies reviewer answers keyed by `(mention id, entity id)`. Returns the
/// labeled pairs and the pairs still without an answer.
pub fn apply_review(
    queue: &[LabeledPair],
    answers: &HashMap<(String, String), bool>,
) -> (Vec<LabeledPair>, Vec<LabeledPair>) {
    let mut done = Vec::new();
    let mut open = Vec::new();
    for p in queue {
        match answers.get(&(p.mention.id.clone(), p.entity_id.clone())) {
            Some(&y) => done.push(LabeledPair {
                label: Some(y),
                provenance: Provenance::Reviewed,
                ..p.clone()
            }),
            None => open.push(p.clone()),
        }
    }
    (done, open)
}

/// Answers every queued pair from gold links (a stand-in reviewer for
/// synthetic corpora).
pub fn answers_from_gold(queue: &[LabeledPair], gold: &HashMap<String, String>) -> HashMap<(String, String), bool> {
    queue
        .iter()
        .filter_map(|p| {
            gold.get(&p.mention.id)
                .map(|g| ((p.mention.id.clone(), p.entity_id.clone()), *g == p.entity_id))
        })
        .collect()
}

/// Keeps every positive and a seeded uniform sample of as many negatives.
/// Relative order is preserved. Unlabeled pairs are dropped.
pub fn balance_dataset(pairs: &[LabeledPair], seed: u64) -> Vec<LabeledPair> {
    let positives = pairs.iter().filter(|p| p.label == Some(true)).count();
    let negatives: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].label == Some(false)).collect();
    if positives == 0 {
        log::warn!("no positive pairs; balancing keeps no negatives");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keep: HashSet<usize> = if negatives.len() <= positives {
        negatives.into_iter().collect()
    } else {
        index::sample(&mut rng, negatives.len(), positives)
            .into_iter()
            .map(|k| negatives[k])
            .collect()
    };
    pairs
        .iter()
        .enumerate()
        .filter(|(i, p)| p.label == Some(true) || keep.contains(i))
        .map(|(_, p)| p.clone())
        .collect()
}

/// Seeded 80/10/10 split; all pairs of a mention go to the same part.
pub fn split_dataset(pairs: &[LabeledPair], seed: u64) -> (Vec<LabeledPair>, Vec<LabeledPair>, Vec<LabeledPair>) {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&LabeledPair>> = HashMap::new();
    for p in pairs {
        let g = groups.entry(p.mention.id.as_str()).or_default();
        if g.is_empty() {
            order.push(p.mention.id.as_str());
        }
        g.push(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let n = pairs.len() as f64;
    let (train_target, valid_target) = ((0.8 * n).round() as usize, (0.1 * n).round() as usize);
    let (mut train, mut valid, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for id in order {
        let part = if train.len() < train_target {
            &mut train
        } else if valid.len() < valid_target {
            &mut valid
        } else {
            &mut test
        };
        part.extend(groups[id].iter().map(|p| (*p).clone()));
    }
    (train, valid, test)
}

fn check_field(field: &str) -> Result<()> {
    if field.contains(['\t', '\n', '\r']) {
        return Err(Error::Config(format!("field `{field}` contains a tab or newline")));
    }
    Ok(())
}

fn write_pair_rows(pairs: &[LabeledPair], with_label: bool) -> Result<String> {
    let mut out = if with_label {
        String::from("# mention_id\tsurface\tleft_context\tright_context\tentity_id\tlabel\tprovenance\n")
    } else {
        String::from("# mention_id\tsurface\tleft_context\tright_context\tentity_id\tprovenance\n")
    };
    for p in pairs {
        let m = &p.mention;
        check_field(&m.id)?;
        check_field(&m.surface)?;
        check_field(&p.entity_id)?;
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t",
            m.id,
            m.surface,
            m.left_tokens.join(" "),
            m.right_tokens.join(" "),
            p.entity_id
        );
        if with_label {
            let label = p
                .label
                .ok_or_else(|| Error::Config(format!("pair of mention {} has no label", m.id)))?;
            let _ = write!(out, "{}\t", u8::from(label));
        }
        let _ = writeln!(out, "{}", p.provenance.as_str());
    }
    Ok(out)
}

/// `mention_id, surface, left, right, entity_id, label, provenance`.
pub fn write_pairs(pairs: &[LabeledPair]) -> Result<String> {
    write_pair_rows(pairs, true)
}

/// The labeled-pairs layout without the label column.
pub fn write_review_queue(pairs: &[LabeledPair]) -> Result<String> {
    write_pair_rows(pairs, false)
}

fn parse_pair_rows(text: &str, origin: &str, with_label: bool) -> Result<Vec<LabeledPair>> {
    let width = if with_label { 7 } else { 6 };
    data_lines(text)
        .map(|(n, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != width {
                return Err(Error::parse(
                    origin,
                    n,
                    format!("expected {width} fields, found {}", f.len()),
                ));
            }
            let mention = crate::linker::io_mention_from_fields(&f, origin, n)?;
            if f[4].is_empty() {
                return Err(Error::parse(origin, n, "empty entity id"));
            }
            let label = if with_label {
                Some(match f[5] {
                    "1" => true,
                    "0" => false,
                    other => {
                        return Err(Error::parse(
                            origin,
                            n,
                            format!("label must be 0 or 1, found `{other}`"),
                        ))
                    }
                })
            } else {
                None
            };
            let prov = f[width - 1];
            let provenance = Provenance::parse(prov)
                .ok_or_else(|| Error::parse(origin, n, format!("unknown provenance `{prov}`")))?;
            Ok(LabeledPair {
                mention,
                entity_id: f[4].to_string(),
                label,
                provenance,
            })
        })
        .collect()
}

pub fn parse_pairs(text: &str, origin: &str) -> Result<Vec<LabeledPair>> {
    parse_pair_rows(text, origin, true)
}

pub fn parse_review_queue(text: &str, origin: &str) -> Result<Vec<LabeledPair>> {
    parse_pair_rows(text, origin, false)
}

pub fn read_pairs(path: &Path) -> Result<Vec<LabeledPair>> {
    parse_pairs(&read_text(path)?, &path.display().to_string())
}

pub fn read_review_queue(path: &Path) -> Result<Vec<LabeledPair>> {
    parse_review_queue(&read_text(path)?, &path.display().to_string())
}

/// `mention_id<TAB>entity_id` lines.
pub fn write_gold(gold: &[(String, String)]) -> String {
    let mut out = String::from("# mention_id\tentity_id\n");
    for (m, e) in gold {
        let _ = writeln!(out, "{m}\t{e}");
    }
    out
}

pub fn parse_gold(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    let mut seen = HashSet::new();
    data_lines(text)
        .map(|(n, line)| {
            let (m, e) = line
                .split_once('\t')
                .filter(|(m, e)| !m.is_empty() && !e.is_empty() && !e.contains('\t'))
                .ok_or_else(|| Error::parse(origin, n, "expected `mention_id<TAB>entity_id`"))?;
            if !seen.insert(m.to_string()) {
                return Err(Error::parse(origin, n, format!("duplicate mention id `{m}`")));
            }
            Ok((m.to_string(), e.to_string()))
        })
        .collect()
}

pub fn read_gold(path: &Path) -> Result<Vec<(String, String)>> {
    parse_gold(&read_text(path)?, &path.display().to_string())
}
