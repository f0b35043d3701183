//! Entity embeddings from short descriptions.
//!
//! Each entity's top tf-idf description words (that have word vectors)
//! become positives; words absent from the description become negatives.
//! The entity vector is the anchor of a hinge triplet loss
//! `max(0, ‖a − p‖² − ‖a − n‖² + α)` summed over its triplets, with the
//! word vectors held fixed.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Matrix, NodeId, ParamId, ParamSet, Tape};
use crate::config::parse_value;
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::textprep::{tfidf_scores, tokenize, top_k_words, TfIdfModel};
use crate::vectors::EmbeddingTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet {
    pub entity_id: String,
    pub positive_word: String,
    pub negative_word: String,
}

#[derive(Debug, Clone)]
pub struct TripletConfig {
    /// Hinge margin α.
    pub margin: f64,
    pub positives_per_entity: usize,
    pub negatives_per_entity: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TripletConfig {
    fn default() -> Self {
        Self {
            margin: 2.0,
            positives_per_entity: 10,
            negatives_per_entity: 10,
            epochs: 200,
            learning_rate: 0.05,
            seed: 0,
        }
    }
}

impl TripletConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.margin > 0.0) {
            return Err(Error::Config(format!("margin must be positive, got {}", self.margin)));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "margin" => self.margin = parse_value(key, value)?,
            "positives_per_entity" => self.positives_per_entity = parse_value(key, value)?,
            "negatives_per_entity" => self.negatives_per_entity = parse_value(key, value)?,
            "epochs" => self.epochs = parse_value(key, value)?,
            "learning_rate" => self.learning_rate = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            _ => return Err(Error::Config(format!("unknown embedding setting `{key}`"))),
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "margin={} positives_per_entity={} negatives_per_entity={} epochs={} learning_rate={} seed={}",
            self.margin,
            self.positives_per_entity,
            self.negatives_per_entity,
            self.epochs,
            self.learning_rate,
            self.seed
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct TripletSet {
    pub triplets: Vec<Triplet>,
    /// Entities that produced no triplet (empty or out-of-vocabulary
    /// descriptions), in knowledge-base order.
    pub without_triplets: Vec<String>,
}

/// `max(0, ‖a − p‖² − ‖a − n‖² + α)`
pub fn triplet_loss(f_a: &[f64], f_p: &[f64], f_n: &[f64], margin: f64) -> f64 {
    let dp: f64 = f_a.iter().zip(f_p).map(|(a, p)| (a - p) * (a - p)).sum();
    let dn: f64 = f_a.iter().zip(f_n).map(|(a, n)| (a - n) * (a - n)).sum();
    (dp - dn + margin).max(0.0)
}

pub fn build_triplets(
    kb: &KnowledgeBase,
    words: &EmbeddingTable,
    tfidf: &TfIdfModel,
    cfg: &TripletConfig,
) -> TripletSet {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab = words.keys();
    let mut out = TripletSet::default();

    for entity in kb.entities() {
        let desc = tokenize(&entity.description);
        let in_desc: HashSet<&str> = desc.iter().map(String::as_str).collect();
        let scored: Vec<(String, f64)> = tfidf_scores(&desc, tfidf)
            .into_iter()
            .filter(|(w, _)| words.contains(w))
            .collect();
        let positives = top_k_words(&scored, cfg.positives_per_entity);
        let wanted = positives.len().min(cfg.negatives_per_entity);

        let mut negatives: Vec<&str> = Vec::with_capacity(wanted);
        let mut attempts = 0;
        while negatives.len() < wanted && attempts < 50 * wanted.max(1) && !vocab.is_empty() {
            attempts += 1;
            let w = vocab[rng.random_range(0..vocab.len())].as_str();
            if !in_desc.contains(w) && !negatives.contains(&w) {
                negatives.push(w);
            }
        }

        if negatives.is_empty() {
            log::warn!("entity {} yields no triplets", entity.id);
            out.without_triplets.push(entity.id.clone());
            continue;
        }
        for (p, n) in positives.iter().zip(negatives) {
            out.triplets.push(Triplet {
                entity_id: entity.id.clone(),
                positive_word: p.clone(),
                negative_word: n.to_string(),
            });
        }
    }
    out
}

/// Records the summed triplet loss of one anchor (row `row` of `anchors`)
/// over `(positive, negative)` vector pairs.
pub fn record_anchor_loss(
    tape: &mut Tape,
    ps: &ParamSet,
    anchors: ParamId,
    row: usize,
    pairs: &[(&[f64], &[f64])],
    margin: f64,
) -> NodeId {
    let a = tape.param_row(ps, anchors, row);
    let mut terms = Vec::with_capacity(pairs.len());
    for (p, n) in pairs {
        let p = tape.constant(p.to_vec());
        let n = tape.constant(n.to_vec());
        let ap = tape.sub(a, p);
        let an = tape.sub(a, n);
        let dp = tape.sq_norm(ap);
        let dn = tape.sq_norm(an);
        let diff = tape.sub(dp, dn);
        let z = tape.add_scalar(diff, margin);
        terms.push(tape.relu(z));
    }
    let all = tape.concat(&terms);
    tape.sum(all)
}

#[derive(Debug, Clone)]
pub struct EmbeddingRun {
    pub table: EmbeddingTable,
    /// Mean loss per triplet for each epoch.
    pub loss_trace: Vec<f64>,
    pub excluded: Vec<String>,
}

impl EmbeddingRun {
    /// `epoch<TAB>mean_loss` lines preceded by a config echo.
    pub fn loss_report(&self, cfg: &TripletConfig) -> String {
        let mut out = format!("# {}\nepoch\tmean_loss\n", cfg.describe());
        for (e, l) in self.loss_trace.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", e + 1, l);
        }
        for id in &self.excluded {
            let _ = writeln!(out, "# excluded\t{id}");
        }
        out
    }
}

/// Trains one vector per entity that has triplets, by per-entity batch SGD.
pub fn train_entity_embeddings(set: &TripletSet, words: &EmbeddingTable, cfg: &TripletConfig) -> Result<EmbeddingRun> {
    cfg.validate()?;
    let dim = words.dim();

    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<(&[f64], &[f64])>> = HashMap::new();
    for t in &set.triplets {
        let p = words
            .get(&t.positive_word)
            .ok_or_else(|| Error::Config(format!("no word vector for `{}`", t.positive_word)))?;
        let n = words
            .get(&t.negative_word)
            .ok_or_else(|| Error::Config(format!("no word vector for `{}`", t.negative_word)))?;
        let g = groups.entry(t.entity_id.as_str()).or_default();
        if g.is_empty() {
            order.push(t.entity_id.as_str());
        }
        g.push((p, n));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_e1);
    let mut init = Matrix::zeros(order.len(), dim);
    for (row, id) in order.iter().enumerate() {
        let pairs = &groups[id];
        let target = init.row_mut(row);
        for (p, _) in pairs {
            for (t, v) in target.iter_mut().zip(*p) {
                *t += v / pairs.len() as f64;
            }
        }
        if target.iter().all(|v| *v == 0.0) {
            let bound = 1.0 / (dim as f64).sqrt();
            target.iter_mut().for_each(|v| *v = rng.random_range(-bound..=bound));
        }
    }
    let mut ps = ParamSet::new();
    let anchors = ps.add("entities", init);

    let total = set.triplets.len().max(1) as f64;
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        for (row, id) in order.iter().enumerate() {
            let mut tape = Tape::new();
            let out = record_anchor_loss(&mut tape, &ps, anchors, row, &groups[id], cfg.margin);
            epoch_loss += tape.scalar(out);
            tape.backward(out, &mut ps);
            let p = ps.get_mut(anchors);
            let (value, grad) = (&mut p.value, &mut p.grad);
            for (v, g) in value.row_mut(row).iter_mut().zip(grad.row_mut(row).iter_mut()) {
                *v -= cfg.learning_rate * *g;
                *g = 0.0;
            }
        }
        loss_trace.push(epoch_loss / total);
    }

    let mut table = EmbeddingTable::new(dim);
    for (row, id) in order.iter().enumerate() {
        table.insert(*id, ps.value(anchors).row(row))?;
    }
    Ok(EmbeddingRun {
        table,
        loss_trace,
        excluded: set.without_triplets.clone(),
    })
}

/// Mean fraction of each entity's `k` nearest other entities that share its
/// industry. Entities without an industry tag or a vector are skipped.
pub fn industry_purity(kb: &KnowledgeBase, table: &EmbeddingTable, k: usize) -> f64 {
    let industry: HashMap<&str, &str> = kb
        .entities()
        .iter()
        .filter_map(|e| e.industry.as_deref().map(|i| (e.id.as_str(), i)))
        .collect();
    let mut total = 0.0;
    let mut counted = 0usize;
    for (id, v) in table.iter() {
        let Some(own) = industry.get(id) else { continue };
        let Ok(nn) = table.knn(v, k + 1) else { continue };
        let neighbours: Vec<&(String, f64)> = nn.iter().filter(|(n, _)| n != id).take(k).collect();
        if neighbours.is_empty() {
            continue;
        }
        let same = neighbours
            .iter()
            .filter(|(n, _)| industry.get(n.as_str()) == Some(own))
            .count();
        total += same as f64 / neighbours.len() as f64;
        counted += 1;
    }
    if counted == 0 {
        0.0
    } else {
        total / counted as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{grad_check, tape_objective, GradCheckConfig};
    use crate::kb::Entity;

    #[test]
    fn triplet_loss_hand_values() {
        assert_eq!(triplet_loss(&[0.0], &[0.0], &[1.0], 2.0), 1.0);
        // ‖a − n‖² = 4 = ‖a − p‖² + α sits exactly on the hinge
        assert_eq!(triplet_loss(&[0.0, 0.0], &[1.0, 1.0], &[2.0, 0.0], 2.0), 0.0);
        assert_eq!(triplet_loss(&[0.0, 0.0], &[1.0, 1.0], &[1.0, 1.0], 2.0), 2.0);
        let a = [0.3, -0.2];
        let p = [1.0, 1.0];
        let expect = (0.7f64 * 0.7 + 1.2 * 1.2) + 2.0;
        assert!((triplet_loss(&a, &p, &a, 2.0) - expect).abs() < 1e-12);
    }

    fn word_table(rows: &[(&str, [f64; 2])]) -> EmbeddingTable {
        let mut t = EmbeddingTable::new(2);
        for (w, v) in rows {
            t.insert(*w, v).unwrap();
        }
        t
    }

    fn desc_words(n: usize, prefix: &str) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn triplet_counts_follow_available_words() {
        let rich = desc_words(12, "r");
        let poor = desc_words(4, "p");
        let kb = KnowledgeBase::from_entities(vec![
            Entity::new("rich", "Rich", rich.join(" ")),
            Entity::new("poor", "Poor", poor.join(" ")),
            Entity::new("empty", "Empty", ""),
        ])
        .unwrap();
        let mut words = EmbeddingTable::new(2);
        for (i, w) in rich.iter().chain(&poor).chain(&desc_words(30, "n")).enumerate() {
            words.insert(w.clone(), &[i as f64, 1.0]).unwrap();
        }
        let docs: Vec<Vec<String>> = kb.entities().iter().map(|e| tokenize(&e.description)).collect();
        let tfidf = TfIdfModel::fit(docs.iter());
        let set = build_triplets(&kb, &words, &tfidf, &TripletConfig::default());

        let count = |id: &str| set.triplets.iter().filter(|t| t.entity_id == id).count();
        assert_eq!(count("rich"), 10);
        assert_eq!(count("poor"), 4);
        assert_eq!(count("empty"), 0);
        assert_eq!(set.without_triplets, vec!["empty"]);
        for t in &set.triplets {
            let desc = tokenize(&kb.get(&t.entity_id).unwrap().description);
            assert!(!desc.contains(&t.negative_word));
            assert!(desc.contains(&t.positive_word));
        }
        let again = build_triplets(&kb, &words, &tfidf, &TripletConfig::default());
        assert_eq!(set.triplets, again.triplets);
    }

    fn separable_instance() -> (TripletSet, EmbeddingTable) {
        let words = word_table(&[
            ("sun", [5.0, 5.0]),
            ("ray", [5.5, 4.5]),
            ("ice", [-5.0, -5.0]),
            ("sno", [-4.5, -5.5]),
        ]);
        let t = |e: &str, p: &str, n: &str| Triplet {
            entity_id: e.into(),
            positive_word: p.into(),
            negative_word: n.into(),
        };
        let set = TripletSet {
            triplets: vec![
                t("hot", "sun", "ice"),
                t("hot", "ray", "sno"),
                t("cold", "ice", "sun"),
                t("cold", "sno", "ray"),
            ],
            without_triplets: vec![],
        };
        (set, words)
    }

    #[test]
    fn separable_instance_reaches_zero_loss() {
        let (set, words) = separable_instance();
        let cfg = TripletConfig {
            epochs: 100,
            ..Default::default()
        };
        let run = train_entity_embeddings(&set, &words, &cfg).unwrap();
        assert_eq!(*run.loss_trace.last().unwrap(), 0.0);
        assert!(run.loss_trace.iter().all(|l| l.is_finite() && *l >= 0.0));
        assert_eq!(run.table.len(), 2);
    }

    #[test]
    fn training_is_deterministic_and_loss_decreases_from_bad_start() {
        let (mut set, words) = separable_instance();
        // swap roles so the mean-of-positives start is far from optimal
        set.triplets.push(Triplet {
            entity_id: "hot".into(),
            positive_word: "ice".into(),
            negative_word: "ray".into(),
        });
        let cfg = TripletConfig {
            epochs: 50,
            seed: 3,
            ..Default::default()
        };
        let a = train_entity_embeddings(&set, &words, &cfg).unwrap();
        let b = train_entity_embeddings(&set, &words, &cfg).unwrap();
        assert_eq!(a.table.to_text(), b.table.to_text());
        assert_eq!(a.loss_trace, b.loss_trace);
        assert!(a.loss_trace.last().unwrap() <= &a.loss_trace[0]);
    }

    #[test]
    fn settings_by_key() {
        let mut cfg = TripletConfig::default();
        cfg.set("margin", "3.5").unwrap();
        cfg.set("epochs", "7").unwrap();
        assert_eq!((cfg.margin, cfg.epochs), (3.5, 7));
        assert!(cfg.set("alpha", "1").is_err());
        assert!(cfg.set("epochs", "x").is_err());
    }

    #[test]
    fn rejects_non_positive_margin() {
        let (set, words) = separable_instance();
        let cfg = TripletConfig {
            margin: 0.0,
            ..Default::default()
        };
        assert!(train_entity_embeddings(&set, &words, &cfg).is_err());
    }

    #[test]
    fn summed_loss_gradient_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut ps = ParamSet::new();
            let anchors = ps.add_uniform("a", 2, 4, 1, &mut rng);
            let vecs: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let pairs: Vec<(&[f64], &[f64])> = vecs.chunks(2).map(|c| (c[0].as_slice(), c[1].as_slice())).collect();
            let report = grad_check(
                &mut ps,
                tape_objective(|t, ps| record_anchor_loss(t, ps, anchors, 1, &pairs, 2.0)),
                GradCheckConfig::default(),
            );
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn loss_zero_iff_margin_satisfied() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let v: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (a, p, n) = (&v[0..2], &v[2..4], &v[4..6]);
            let dp: f64 = a.iter().zip(p).map(|(x, y)| (x - y).powi(2)).sum();
            let dn: f64 = a.iter().zip(n).map(|(x, y)| (x - y).powi(2)).sum();
            assert_eq!(triplet_loss(a, p, n, 2.0) == 0.0, dp + 2.0 <= dn);
        }
    }

    #[test]
    fn purity_counts_same_industry_neighbours() {
        let kb = KnowledgeBase::from_entities(vec![
            Entity::new("a1", "A1", "").with_industry("x"),
            Entity::new("a2", "A2", "").with_industry("x"),
            Entity::new("b1", "B1", "").with_industry("y"),
            Entity::new("b2", "B2", "").with_industry("y"),
        ])
        .unwrap();
        let t = word_table(&[
            ("a1", [0.0, 0.0]),
            ("a2", [0.1, 0.0]),
            ("b1", [5.0, 5.0]),
            ("b2", [5.1, 5.0]),
        ]);
        assert_eq!(industry_purity(&kb, &t, 1), 1.0);
        assert_eq!(industry_purity(&kb, &t, 3), 1.0 / 3.0);
    }
}
