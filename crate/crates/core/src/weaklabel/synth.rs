//! Synthetic knowledge bases and mention corpora.
//!
//! Entities belong to industries. Each industry owns a vocabulary whose
//! word vectors scatter around an industry centroid; generic words scatter
//! around the origin. Descriptions and mention contexts mix an entity's
//! signature words, other words of its industry and generic words. A
//! configurable share of names is given to two entities of different
//! industries, so those mentions can only be resolved from context.

use std::collections::{HashMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::baselines::ngram_cosine;
use crate::blocking::{bigram_tokens, DEFAULT_BLOCK_THRESHOLD};
use crate::config::parse_value;
use crate::error::{Error, Result};
use crate::kb::{Entity, KnowledgeBase};
use crate::linker::MentionContext;
use crate::textprep::{normalize_name, tokenize};
use crate::vectors::EmbeddingTable;

use super::WeakLabelThresholds;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub entities: usize,
    pub industries: usize,
    /// Fraction of entities whose name is given to a second entity.
    pub ambiguity: f64,
    pub mentions_per_entity: usize,
    pub word_dim: usize,
    pub description_words: usize,
    pub context_min: usize,
    pub context_max: usize,
    pub window: usize,
    pub industry_vocab: usize,
    pub generic_vocab: usize,
    pub signature_words: usize,
    pub typo_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            entities: 200,
            industries: 5,
            ambiguity: 0.2,
            mentions_per_entity: 5,
            word_dim: 50,
            description_words: 30,
            context_min: 20,
            context_max: 40,
            window: 10,
            industry_vocab: 60,
            generic_vocab: 200,
            signature_words: 8,
            typo_rate: 0.2,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn shared_names(&self) -> usize {
        (self.ambiguity * self.entities as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.industries < 2 {
            return bad("at least 2 industries are required");
        }
        if self.entities == 0 {
            return bad("at least one entity is required");
        }
        if !(0.0..=0.5).contains(&self.ambiguity) || 2 * self.shared_names() > self.entities {
            return bad("ambiguity must lie in [0, 0.5]");
        }
        if self.context_min == 0 || self.context_min > self.context_max {
            return bad("context lengths must satisfy 0 < min <= max");
        }
        if self.word_dim == 0 || self.window == 0 || self.industry_vocab == 0 || self.generic_vocab == 0 {
            return bad("dimensions and vocabulary sizes must be positive");
        }
        if self.signature_words == 0 || self.signature_words > self.industry_vocab {
            return bad("signature words must be between 1 and the industry vocabulary size");
        }
        if !(0.0..=1.0).contains(&self.typo_rate) {
            return bad("typo rate must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "entities" => self.entities = parse_value(key, value)?,
            "industries" => self.industries = parse_value(key, value)?,
            "ambiguity" => self.ambiguity = parse_value(key, value)?,
            "mentions_per_entity" => self.mentions_per_entity = parse_value(key, value)?,
            "word_dim" => self.word_dim = parse_value(key, value)?,
            "description_words" => self.description_words = parse_value(key, value)?,
            "context_min" => self.context_min = parse_value(key, value)?,
            "context_max" => self.context_max = parse_value(key, value)?,
            "window" => self.window = parse_value(key, value)?,
            "industry_vocab" => self.industry_vocab = parse_value(key, value)?,
            "generic_vocab" => self.generic_vocab = parse_value(key, value)?,
            "signature_words" => self.signature_words = parse_value(key, value)?,
            "typo_rate" => self.typo_rate = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            _ => return Err(Error::Config(format!("unknown synth setting `{key}`"))),
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "entities={} industries={} ambiguity={} mentions_per_entity={} word_dim={} description_words={} \
             context_min={} context_max={} window={} industry_vocab={} generic_vocab={} signature_words={} \
             typo_rate={} seed={}",
            self.entities,
            self.industries,
            self.ambiguity,
            self.mentions_per_entity,
            self.word_dim,
            self.description_words,
            self.context_min,
            self.context_max,
            self.window,
            self.industry_vocab,
            self.generic_vocab,
            self.signature_words,
            self.typo_rate,
            self.seed
        )
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub kb: KnowledgeBase,
    pub mentions: Vec<MentionContext>,
    /// `(mention id, entity id)` in mention order.
    pub gold: Vec<(String, String)>,
    pub words: EmbeddingTable,
}

impl SyntheticCorpus {
    pub fn gold_map(&self) -> HashMap<String, String> {
        self.gold.iter().cloned().collect()
    }

    /// Mentions whose gold entity shares its normalized name with another
    /// entity.
    pub fn ambiguous_mentions(&self) -> HashSet<String> {
        ambiguous_mentions(&self.kb, &self.gold)
    }
}

/// Mentions whose gold entity's normalized name is carried by more than one
/// entity of `kb`.
pub fn ambiguous_mentions(kb: &KnowledgeBase, gold: &[(String, String)]) -> HashSet<String> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for e in kb.entities() {
        if let Ok(n) = normalize_name(&e.name) {
            *counts.entry(n.joined).or_default() += 1;
        }
    }
    gold.iter()
        .filter(|(_, e)| {
            kb.get(e)
                .and_then(|e| normalize_name(&e.name).ok())
                .is_some_and(|n| counts[&n.joined] > 1)
        })
        .map(|(m, _)| m.clone())
        .collect()
}

const INDUSTRY_NAMES: [&str; 10] = [
    "software", "lighting", "energy", "retail", "biotech", "banking", "mining", "shipping", "media", "foods",
];
const SUFFIXES: [&str; 7] = ["Inc", "Corp", "LLC", "Ltd", "Co", "Corporation", ""];
const CONSONANTS: &[u8] = b"bcdfghjklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

fn industry_name(i: usize) -> String {
    let base = INDUSTRY_NAMES[i % INDUSTRY_NAMES.len()];
    if i < INDUSTRY_NAMES.len() {
        base.to_string()
    } else {
        format!("{base}{}", i / INDUSTRY_NAMES.len())
    }
}

struct WordMaker {
    used: HashSet<String>,
}

impl WordMaker {
    fn make(&mut self, rng: &mut ChaCha8Rng, syllables: usize) -> String {
        loop {
            let mut w = String::new();
            for _ in 0..syllables {
                w.push(*CONSONANTS.choose(rng).expect("nonempty") as char);
                w.push(*VOWELS.choose(rng).expect("nonempty") as char);
            }
            if rng.random_bool(0.3) {
                w.push(*CONSONANTS.choose(rng).expect("nonempty") as char);
            }
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

struct Plan {
    industry: usize,
    base: Vec<String>,
    suffix: &'static str,
    signature: Vec<usize>,
}

/// Deterministic corpus for `spec.seed`.
pub fn generate_synthetic_corpus(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut maker = WordMaker { used: HashSet::new() };

    // vocabularies and vectors
    let d = spec.word_dim;
    let centroid_dist = Normal::new(0.0, 2.0 / (d as f64).sqrt()).expect("valid normal");
    let noise_dist = Normal::new(0.0, 1.0 / (d as f64).sqrt()).expect("valid normal");
    let mut words = EmbeddingTable::new(d);
    let mut industry_words: Vec<Vec<String>> = Vec::with_capacity(spec.industries);
    for _ in 0..spec.industries {
        let centroid: Vec<f64> = (0..d).map(|_| centroid_dist.sample(&mut rng)).collect();
        let mut vocab = Vec::with_capacity(spec.industry_vocab);
        for _ in 0..spec.industry_vocab {
            let w = maker.make(&mut rng, 2);
            let v: Vec<f64> = centroid.iter().map(|c| c + noise_dist.sample(&mut rng)).collect();
            words.insert(w.clone(), &v)?;
            vocab.push(w);
        }
        industry_words.push(vocab);
    }
    let mut generic = Vec::with_capacity(spec.generic_vocab);
    for _ in 0..spec.generic_vocab {
        let w = maker.make(&mut rng, 2);
        let v: Vec<f64> = (0..d).map(|_| noise_dist.sample(&mut rng)).collect();
        words.insert(w.clone(), &v)?;
        generic.push(w);
    }

    // entity names; twins take consecutive slots so their industries differ
    let n = spec.entities;
    let shared = spec.shared_names();
    let mut names_seen: HashSet<String> = HashSet::new();
    let mut plans: Vec<Plan> = Vec::with_capacity(n);
    for i in 0..n {
        let industry = i % spec.industries;
        let signature = index_sample(&mut rng, spec.industry_vocab, spec.signature_words);
        let suffix = *SUFFIXES.choose(&mut rng).expect("nonempty");
        if i < 2 * shared && i % 2 == 1 {
            let base = plans[i - 1].base.clone();
            plans.push(Plan {
                industry,
                base,
                suffix: plans[i - 1].suffix,
                signature,
            });
            continue;
        }
        let base = loop {
            let count = if rng.random_bool(0.3) { 2 } else { 1 };
            let base: Vec<String> = (0..count)
                .map(|k| {
                    let syl = if k == 0 { rng.random_range(2..=3) } else { 2 };
                    maker.make(&mut rng, syl)
                })
                .collect();
            if names_seen.insert(base.concat()) {
                break base;
            }
        };
        plans.push(Plan {
            industry,
            base,
            suffix,
            signature,
        });
    }

    let mut ids: Vec<usize> = (1..=n).collect();
    ids.shuffle(&mut rng);
    let width = n.to_string().len().max(4);
    let id_of = |i: usize| format!("E{:0width$}", ids[i]);

    let mut entities = Vec::with_capacity(n);
    for (i, p) in plans.iter().enumerate() {
        let sig = &p.signature;
        let vocab = &industry_words[p.industry];
        let desc: Vec<&str> = (0..spec.description_words)
            .map(|_| {
                let r: f64 = rng.random();
                if r < 0.5 {
                    vocab[sig[rng.random_range(0..sig.len())]].as_str()
                } else if r < 0.75 {
                    vocab.choose(&mut rng).expect("nonempty").as_str()
                } else {
                    generic.choose(&mut rng).expect("nonempty").as_str()
                }
            })
            .collect();
        let name = display_name(&p.base, p.suffix);
        entities.push(Entity::new(id_of(i), name, desc.join(" ")).with_industry(industry_name(p.industry)));
    }
    let mut sorted = entities.clone();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let kb = KnowledgeBase::from_entities(sorted)?;

    let distinct_names: Vec<String> = names_seen.iter().cloned().collect();
    let mut mentions = Vec::with_capacity(n * spec.mentions_per_entity);
    let mut gold = Vec::with_capacity(n * spec.mentions_per_entity);
    let mut counter = 0usize;
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..spec.mentions_per_entity {
        order.shuffle(&mut rng);
        for &i in &order {
            counter += 1;
            let p = &plans[i];
            let surface = mention_surface(&mut rng, p, spec.typo_rate, &distinct_names);
            let mention_tokens = tokenize(&surface);
            let len = rng
                .random_range(spec.context_min..=spec.context_max)
                .max(mention_tokens.len());
            let filler = len - mention_tokens.len();
            let start = rng.random_range(0..=filler);
            let vocab = &industry_words[p.industry];
            let mut tokens: Vec<String> = (0..filler)
                .map(|_| {
                    let r: f64 = rng.random();
                    if r < 0.3 {
                        vocab[p.signature[rng.random_range(0..p.signature.len())]].clone()
                    } else if r < 0.6 {
                        vocab.choose(&mut rng).expect("nonempty").clone()
                    } else {
                        generic.choose(&mut rng).expect("nonempty").clone()
                    }
                })
                .collect();
            tokens.splice(start..start, mention_tokens.iter().cloned());
            let id = format!("M{counter:05}");
            mentions.push(MentionContext::from_tokens(
                id.clone(),
                surface,
                &tokens,
                start,
                mention_tokens.len(),
                spec.window,
            ));
            gold.push((id, id_of(i)));
        }
    }

    Ok(SyntheticCorpus {
        kb,
        mentions,
        gold,
        words,
    })
}

fn index_sample(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

fn display_name(base: &[String], suffix: &str) -> String {
    let mut parts: Vec<String> = base.iter().map(|w| capitalize(w)).collect();
    if !suffix.is_empty() {
        parts.push(suffix.to_string());
    }
    parts.join(" ")
}

/// A surface form of the entity name: the full name, a variant that
/// normalizes to the same string, or (at `typo_rate`) a one-letter typo
/// that still shares enough bigrams to pass blocking and is closer to the
/// true name than to any other, and close enough to land in the review
/// band of weak labeling.
fn mention_surface(rng: &mut ChaCha8Rng, p: &Plan, typo_rate: f64, names: &[String]) -> String {
    if rng.random_bool(typo_rate) {
        for _ in 0..8 {
            if let Some(s) = typo_variant(rng, &p.base, names) {
                return s;
            }
        }
    }
    match rng.random_range(0..4) {
        0 => display_name(&p.base, p.suffix),
        1 => display_name(&p.base, ""),
        2 => display_name(&p.base, SUFFIXES.choose(rng).expect("nonempty")),
        _ => display_name(&p.base, p.suffix).to_uppercase(),
    }
}

fn typo_variant(rng: &mut ChaCha8Rng, base: &[String], names: &[String]) -> Option<String> {
    let candidates: Vec<usize> = (0..base.len()).filter(|&k| base[k].len() >= 5).collect();
    let &k = candidates.choose(rng)?;
    let mut chars: Vec<u8> = base[k].as_bytes().to_vec();
    let pos = rng.random_range(1..chars.len());
    let pool = if VOWELS.contains(&chars[pos]) {
        VOWELS
    } else {
        CONSONANTS
    };
    let replacement = *pool
        .iter()
        .filter(|c| **c != chars[pos])
        .collect::<Vec<_>>()
        .choose(rng)?;
    chars[pos] = *replacement;
    let mut words = base.to_vec();
    words[k] = String::from_utf8(chars).ok()?;

    let original = base.concat();
    let typo = words.concat();
    let shared = bigram_tokens(&typo).intersection(&bigram_tokens(&original)).count();
    if shared < DEFAULT_BLOCK_THRESHOLD {
        return None;
    }
    let own = ngram_cosine(&typo, &original, 2, None);
    let closest_other = names
        .iter()
        .filter(|n| **n != original)
        .map(|n| ngram_cosine(&typo, n, 2, None))
        .fold(0.0, f64::max);
    let reviewable = own > WeakLabelThresholds::default().review_above;
    (reviewable && own > closest_other && names.iter().all(|n| *n != typo)).then(|| display_name(&words, ""))
}
