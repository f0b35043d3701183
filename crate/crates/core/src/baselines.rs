//! Comparison methods: n-gram cosine string matching, context-overlap
//! similarity and a logistic classifier over engineered features.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use crate::autodiff::{Matrix, NodeId, ParamId, ParamSet, Tape};
use crate::error::{Error, Result};
use crate::fsutil::{data_lines, read_text, write_text};
use crate::kb::{Entity, KnowledgeBase};
use crate::linker::MentionContext;
use crate::textprep::{normalize_name, tokenize, TfIdfModel};
use crate::weaklabel::LabeledPair;

/// Contiguous character n-grams of the normalized joined name, unpadded.
pub fn char_ngrams(s: &str, n: usize) -> Vec<String> {
    let Ok(name) = normalize_name(s) else { return Vec::new() };
    let chars: Vec<char> = name.joined.chars().collect();
    if n == 0 || chars.len() < n {
        return Vec::new();
    }
    chars.windows(n).map(|w| w.iter().collect()).collect()
}

/// Document-frequency model over the `n`-grams of every entity name.
pub fn fit_ngram_tfidf(kb: &KnowledgeBase, n: usize) -> TfIdfModel {
    let docs: Vec<Vec<String>> = kb.entities().iter().map(|e| char_ngrams(&e.name, n)).collect();
    TfIdfModel::fit(docs.iter())
}

fn weight(tfidf: Option<&TfIdfModel>, token: &str) -> f64 {
    match tfidf {
        Some(m) if m.contains(token) => m.idf(token),
        _ => 1.0,
    }
}

fn weighted_counts<'a>(tokens: &'a [String], tfidf: Option<&TfIdfModel>) -> BTreeMap<&'a str, f64> {
    let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_default() += 1.0;
    }
    counts.iter_mut().for_each(|(t, c)| *c *= weight(tfidf, t));
    counts
}

fn cosine(a: &BTreeMap<&str, f64>, b: &BTreeMap<&str, f64>) -> f64 {
    let na: f64 = a.values().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().filter_map(|(k, v)| large.get(k).map(|w| v * w)).sum();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Cosine of tf-idf weighted `n`-gram count vectors of the normalized
/// names. Tokens unknown to `tfidf` (or all tokens, when `tfidf` is
/// `None`) get weight 1.
pub fn ngram_cosine(a: &str, b: &str, n: usize, tfidf: Option<&TfIdfModel>) -> f64 {
    let (ga, gb) = (char_ngrams(a, n), char_ngrams(b, n));
    if !ga.is_empty() && ga == gb {
        return 1.0;
    }
    cosine(&weighted_counts(&ga, tfidf), &weighted_counts(&gb, tfidf))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextKind {
    Jaccard,
    Cosine,
}

/// Word-overlap similarity between a mention context and an entity
/// description; pairs sharing no word score 0.
pub fn context_similarity(ctx: &[String], desc: &[String], kind: ContextKind) -> f64 {
    let sa: BTreeSet<&str> = ctx.iter().map(String::as_str).collect();
    let sb: BTreeSet<&str> = desc.iter().map(String::as_str).collect();
    let shared = sa.intersection(&sb).count();
    if shared == 0 {
        return 0.0;
    }
    match kind {
        ContextKind::Jaccard => shared as f64 / sa.union(&sb).count() as f64,
        ContextKind::Cosine => cosine(&weighted_counts(ctx, None), &weighted_counts(desc, None)),
    }
}

/// Lowercase plus a plural `s` strip; a stand-in for lemmatization.
pub fn lemma(word: &str) -> String {
    let w = word.to_lowercase();
    if w.len() > 3 && w.ends_with('s') && !w.ends_with("ss") {
        w[..w.len() - 1].to_string()
    } else {
        w
    }
}

fn lemma_set(words: &[String]) -> BTreeSet<String> {
    words.iter().map(|w| lemma(w)).collect()
}

/// `1 − levenshtein(a, b) / max(|a|, |b|)` over normalized joined names.
pub fn str_similarity(a: &str, b: &str) -> f64 {
    let ja = normalize_name(a).map(|n| n.joined).unwrap_or_default();
    let jb = normalize_name(b).map(|n| n.joined).unwrap_or_default();
    let longest = ja.chars().count().max(jb.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(&ja, &jb) as f64 / longest as f64
}

/// The contiguous context span: left window followed by the right window
/// with its leading mention words removed.
pub fn context_tokens(m: &MentionContext) -> Vec<String> {
    let surface = m.surface_tokens();
    let mut out = m.left_tokens.clone();
    let skip = if m.right_tokens.starts_with(&surface) {
        surface.len()
    } else {
        0
    };
    if m.left_tokens.is_empty() {
        out.extend(m.right_tokens.iter().cloned());
    } else {
        out.extend(m.right_tokens.iter().skip(skip).cloned());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFeatures {
    pub str_sim_surface: f64,
    pub exact_equal_surface: f64,
    pub tf_sim_context: f64,
    pub word_num_match: f64,
}

impl SurfaceFeatures {
    pub fn to_array(&self) -> [f64; 4] {
        [
            self.str_sim_surface,
            self.exact_equal_surface,
            self.tf_sim_context,
            self.word_num_match,
        ]
    }
}

pub fn surface_features(mention: &MentionContext, entity: &Entity, tfidf: &TfIdfModel) -> SurfaceFeatures {
    let words = |s: &str| normalize_name(s).map(|n| n.words).unwrap_or_default();
    let name_overlap = lemma_set(&words(&mention.surface))
        .intersection(&lemma_set(&words(&entity.name)))
        .count();
    let ctx = context_tokens(mention);
    let desc = tokenize(&entity.description);
    let ctx_overlap = lemma_set(&ctx).intersection(&lemma_set(&desc)).count();
    SurfaceFeatures {
        str_sim_surface: str_similarity(&mention.surface, &entity.name),
        exact_equal_surface: name_overlap as f64,
        tf_sim_context: cosine(
            &weighted_counts(&ctx, Some(tfidf)),
            &weighted_counts(&desc, Some(tfidf)),
        ),
        word_num_match: ctx_overlap as f64,
    }
}

#[derive(Debug, Clone)]
pub struct LogisticConfig {
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 0.5,
        }
    }
}

/// Four-feature logistic regression. Features are standardized with the
/// training mean and deviation before the affine map.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: [f64; 4],
    pub bias: f64,
    pub mean: [f64; 4],
    pub scale: [f64; 4],
}

impl Default for LogisticModel {
    fn default() -> Self {
        Self {
            weights: [0.0; 4],
            bias: 0.0,
            mean: [0.0; 4],
            scale: [1.0; 4],
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    crate::autodiff::ops::sigmoid(z)
}

impl LogisticModel {
    fn standardize(&self, x: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| (x[i] - self.mean[i]) / self.scale[i])
    }

    pub fn score(&self, f: &SurfaceFeatures) -> f64 {
        let x = self.standardize(&f.to_array());
        sigmoid(self.weights.iter().zip(&x).map(|(w, x)| w * x).sum::<f64>() + self.bias)
    }

    pub fn predict(&self, f: &SurfaceFeatures) -> bool {
        self.score(f) >= 0.5
    }

    pub fn to_text(&self) -> String {
        let row = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        format!(
            "weights\t{}\nbias\t{}\nmean\t{}\nscale\t{}\n",
            row(&self.weights),
            self.bias,
            row(&self.mean),
            row(&self.scale)
        )
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut fields: HashMap<&str, Vec<f64>> = HashMap::new();
        for (n, line) in data_lines(text) {
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, n, "expected `key<TAB>values`"))?;
            let vals = v
                .split(' ')
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::parse(origin, n, format!("bad number `{t}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            fields.insert(k, vals);
        }
        let four = |k: &str| -> Result<[f64; 4]> {
            fields
                .get(k)
                .and_then(|v| <[f64; 4]>::try_from(v.as_slice()).ok())
                .ok_or_else(|| Error::parse(origin, 0, format!("`{k}` needs 4 values")))
        };
        let bias = fields
            .get("bias")
            .filter(|v| v.len() == 1)
            .ok_or_else(|| Error::parse(origin, 0, "`bias` needs 1 value"))?[0];
        Ok(Self {
            weights: four("weights")?,
            bias,
            mean: four("mean")?,
            scale: four("scale")?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, &path.display().to_string())
    }
}

/// Mean logistic loss `softplus(z) − y·z` over `(x, y)` rows.
pub fn record_logistic_loss(
    tape: &mut Tape,
    ps: &ParamSet,
    w: ParamId,
    b: ParamId,
    data: &[([f64; 4], bool)],
) -> NodeId {
    let wn = tape.param(ps, w);
    let bn = tape.param(ps, b);
    let mut terms = Vec::with_capacity(data.len());
    for (x, y) in data {
        let xn = tape.constant(x.to_vec());
        let dot = tape.dot(wn, xn);
        let z = tape.add(dot, bn);
        let sp = tape.softplus(z);
        terms.push(if *y { tape.sub(sp, z) } else { sp });
    }
    let all = tape.concat(&terms);
    let total = tape.sum(all);
    tape.scale(total, 1.0 / data.len().max(1) as f64)
}

/// Full-batch gradient descent from zero weights.
pub fn logistic_baseline_train(data: &[(SurfaceFeatures, bool)], cfg: &LogisticConfig) -> LogisticModel {
    let mut model = LogisticModel::default();
    if data.is_empty() {
        return model;
    }
    let n = data.len() as f64;
    for i in 0..4 {
        let mean = data.iter().map(|(f, _)| f.to_array()[i]).sum::<f64>() / n;
        let var = data.iter().map(|(f, _)| (f.to_array()[i] - mean).powi(2)).sum::<f64>() / n;
        model.mean[i] = mean;
        model.scale[i] = if var > 1e-12 { var.sqrt() } else { 1.0 };
    }
    let rows: Vec<([f64; 4], bool)> = data
        .iter()
        .map(|(f, y)| (model.standardize(&f.to_array()), *y))
        .collect();

    let mut ps = ParamSet::new();
    let w = ps.add("lr.w", Matrix::zeros(4, 1));
    let b = ps.add("lr.b", Matrix::zeros(1, 1));
    for _ in 0..cfg.epochs {
        ps.zero_grad();
        let mut tape = Tape::new();
        let loss = record_logistic_loss(&mut tape, &ps, w, b, &rows);
        tape.backward(loss, &mut ps);
        ps.sgd_step(cfg.learning_rate, &[]);
    }
    model.weights.copy_from_slice(ps.value(w).as_slice());
    model.bias = ps.value(b).as_slice()[0];
    model
}

pub fn logistic_baseline_score(model: &LogisticModel, f: &SurfaceFeatures) -> f64 {
    model.score(f)
}

/// Builds training rows for the classifier from labeled pairs.
pub fn logistic_training_rows(
    pairs: &[LabeledPair],
    kb: &KnowledgeBase,
    tfidf: &TfIdfModel,
) -> Result<Vec<(SurfaceFeatures, bool)>> {
    pairs
        .iter()
        .filter_map(|p| p.label.map(|y| (p, y)))
        .map(|(p, y)| {
            let e = kb
                .get(&p.entity_id)
                .ok_or_else(|| Error::UnknownEntity(p.entity_id.clone()))?;
            Ok((surface_features(&p.mention, e, tfidf), y))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Jel,
    Bigram,
    Trigram,
    JaccardCtx,
    CosineCtx,
    Lr,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Jel,
        Method::Bigram,
        Method::Trigram,
        Method::JaccardCtx,
        Method::CosineCtx,
        Method::Lr,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Jel => "jel",
            Method::Bigram => "bigram",
            Method::Trigram => "trigram",
            Method::JaccardCtx => "jaccard-ctx",
            Method::CosineCtx => "cosine-ctx",
            Method::Lr => "lr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }

    /// Similarity above which a baseline predicts a link. String matching
    /// accepts at 0.8, context methods on any shared word, the classifier
    /// at probability 0.5.
    pub fn similarity_threshold(&self) -> Option<f64> {
        match self {
            Method::Jel => None,
            Method::Bigram | Method::Trigram => Some(0.8),
            Method::JaccardCtx | Method::CosineCtx => Some(0.0),
            Method::Lr => Some(0.5),
        }
    }
}

/// Scores mention/entity pairs with one of the non-neural methods.
#[derive(Debug)]
pub struct BaselineScorer<'a> {
    method: Method,
    ngram_tfidf: Option<TfIdfModel>,
    word_tfidf: &'a TfIdfModel,
    logistic: Option<&'a LogisticModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub entity_id: String,
    pub similarity: f64,
}

impl<'a> BaselineScorer<'a> {
    pub fn new(
        method: Method,
        kb: &KnowledgeBase,
        word_tfidf: &'a TfIdfModel,
        logistic: Option<&'a LogisticModel>,
    ) -> Result<Self> {
        let ngram_tfidf = match method {
            Method::Bigram => Some(fit_ngram_tfidf(kb, 2)),
            Method::Trigram => Some(fit_ngram_tfidf(kb, 3)),
            Method::Lr if logistic.is_none() => {
                return Err(Error::Config("the lr method needs a trained classifier".into()))
            }
            Method::Jel => return Err(Error::Config("jel is not a baseline method".into())),
            _ => None,
        };
        Ok(Self {
            method,
            ngram_tfidf,
            word_tfidf,
            logistic,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn similarity(&self, mention: &MentionContext, entity: &Entity) -> f64 {
        match self.method {
            Method::Bigram => ngram_cosine(&mention.surface, &entity.name, 2, self.ngram_tfidf.as_ref()),
            Method::Trigram => ngram_cosine(&mention.surface, &entity.name, 3, self.ngram_tfidf.as_ref()),
            Method::JaccardCtx => context_similarity(
                &context_tokens(mention),
                &tokenize(&entity.description),
                ContextKind::Jaccard,
            ),
            Method::CosineCtx => context_similarity(
                &context_tokens(mention),
                &tokenize(&entity.description),
                ContextKind::Cosine,
            ),
            Method::Lr => {
                let f = surface_features(mention, entity, self.word_tfidf);
                self.logistic.map_or(0.5, |m| m.score(&f))
            }
            Method::Jel => unreachable!("rejected in BaselineScorer::new"),
        }
    }

    /// Candidates by descending similarity, ties by entity id.
    pub fn rank(&self, mention: &MentionContext, candidates: &[&Entity]) -> Vec<ScoredCandidate> {
        let mut out: Vec<ScoredCandidate> = candidates
            .iter()
            .map(|e| ScoredCandidate {
                entity_id: e.id.clone(),
                similarity: self.similarity(mention, e),
            })
            .collect();
        out.sort_by(|a, b| {
            b.similarity
                .total_cmp(&a.similarity)
                .then_with(|| a.entity_id.cmp(&b.entity_id))
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{grad_check, tape_objective, GradCheckConfig};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn ngram_cosine_hand_values() {
        assert_eq!(ngram_cosine("Acme", "ACME Inc.", 2, None), 1.0);
        assert_eq!(ngram_cosine("abc", "xyz", 2, None), 0.0);
        let s = ngram_cosine("luminet", "luminex", 2, None);
        assert!((s - 5.0 / 6.0).abs() < 1e-12, "{s}");
        assert_eq!(char_ngrams("acma", 2), vec!["ac", "cm", "ma"]);
        assert!(char_ngrams("a", 2).is_empty());
    }

    #[test]
    fn ngram_cosine_uses_idf_weights() {
        let kb = KnowledgeBase::from_entities(vec![
            Entity::new("1", "abx", ""),
            Entity::new("2", "aby", ""),
            Entity::new("3", "cd", ""),
        ])
        .unwrap();
        let model = fit_ngram_tfidf(&kb, 2);
        // "ab" is in 2 of 3 names, "bx" in 1: weights ln(3/2) and ln 3
        let (wab, wbx) = ((1.5f64).ln(), 3f64.ln());
        let expect = wab * wab / (wab * wab + wbx * wbx);
        let got = ngram_cosine("abx", "aby", 2, Some(&model));
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn context_similarity_hand_values() {
        assert_eq!(
            context_similarity(&words("a b"), &words("b a"), ContextKind::Jaccard),
            1.0
        );
        assert_eq!(
            context_similarity(&words("a b"), &words("c d"), ContextKind::Cosine),
            0.0
        );
        let j = context_similarity(&words("a b"), &words("b c"), ContextKind::Jaccard);
        assert!((j - 1.0 / 3.0).abs() < 1e-12);
        let c = context_similarity(&words("a a b"), &words("a"), ContextKind::Cosine);
        assert!((c - 2.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn surface_feature_cases() {
        let tfidf = TfIdfModel::fit([words("solar panels for homes"), words("frozen food")].iter());
        let e = Entity::new("e", "Lumier Holdings", "solar panels for homes");
        let m = MentionContext::new("m", "Lumier Holdings", words("solar panels for homes"), vec![]);
        let f = surface_features(&m, &e, &tfidf);
        assert_eq!(f.str_sim_surface, 1.0);
        assert_eq!(f.exact_equal_surface, 2.0);
        assert!((f.tf_sim_context - 1.0).abs() < 1e-12);
        assert_eq!(f.word_num_match, 4.0);

        let bare = Entity::new("e", "Lumier", "");
        let f = surface_features(&m, &bare, &tfidf);
        assert_eq!((f.tf_sim_context, f.word_num_match), (0.0, 0.0));

        let s = str_similarity("luminet", "luminex");
        assert!((s - (1.0 - 1.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn lemma_strips_plural_s() {
        assert_eq!(lemma("Panels"), "panel");
        assert_eq!(lemma("glass"), "glass");
        assert_eq!(lemma("gas"), "gas");
    }

    #[test]
    fn context_tokens_are_contiguous() {
        let m = MentionContext::new("m", "Acme Co", words("we met acme co"), words("acme co today"));
        assert_eq!(context_tokens(&m), words("we met acme co today"));
    }

    fn feats(v: [f64; 4]) -> SurfaceFeatures {
        SurfaceFeatures {
            str_sim_surface: v[0],
            exact_equal_surface: v[1],
            tf_sim_context: v[2],
            word_num_match: v[3],
        }
    }

    #[test]
    fn logistic_fits_separable_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<(SurfaceFeatures, bool)> = (0..200)
            .map(|i| {
                let y = i % 2 == 0;
                let base = if y { 0.8 } else { 0.2 };
                let f = feats([
                    base + rng.random_range(-0.15..0.15),
                    rng.random_range(0.0..3.0),
                    rng.random_range(0.0..1.0),
                    rng.random_range(0.0..5.0),
                ]);
                (f, y)
            })
            .collect();
        let model = logistic_baseline_train(&data, &LogisticConfig::default());
        let hits = data.iter().filter(|(f, y)| model.predict(f) == *y).count();
        assert!(hits as f64 / data.len() as f64 >= 0.99, "{hits}");
        let back = LogisticModel::parse(&model.to_text(), "mem").unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn zero_weights_score_one_half() {
        assert_eq!(
            logistic_baseline_score(&LogisticModel::default(), &feats([0.3, 1.0, 0.2, 4.0])),
            0.5
        );
    }

    #[test]
    fn logistic_gradient_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut ps = ParamSet::new();
        let w = ps.add_uniform("w", 4, 1, 4, &mut rng);
        let b = ps.add_uniform("b", 1, 1, 4, &mut rng);
        let data: Vec<([f64; 4], bool)> = (0..8)
            .map(|i| (std::array::from_fn(|_| rng.random_range(-2.0..2.0)), i % 3 == 0))
            .collect();
        let report = grad_check(
            &mut ps,
            tape_objective(|t, ps| record_logistic_loss(t, ps, w, b, &data)),
            GradCheckConfig::default(),
        );
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn scorer_ranks_by_similarity_then_id() {
        let kb = KnowledgeBase::from_entities(vec![
            Entity::new("z", "Acme", "rockets"),
            Entity::new("a", "Acme", "rockets"),
            Entity::new("q", "Quux", "cheese"),
        ])
        .unwrap();
        let tfidf = TfIdfModel::fit([words("rockets"), words("cheese")].iter());
        let scorer = BaselineScorer::new(Method::Trigram, &kb, &tfidf, None).unwrap();
        let m = MentionContext::new("m", "Acme", words("acme"), words("acme"));
        let cands: Vec<&Entity> = kb.entities().iter().collect();
        let ids: Vec<String> = scorer.rank(&m, &cands).into_iter().map(|c| c.entity_id).collect();
        assert_eq!(ids, vec!["a", "z", "q"]);
        assert!(BaselineScorer::new(Method::Lr, &kb, &tfidf, None).is_err());
        for m in Method::ALL {
            assert_eq!(Method::parse(m.as_str()), Some(m));
        }
    }

    proptest! {
        #[test]
        fn ngram_cosine_symmetric_and_bounded(a in "[a-z ]{0,12}", b in "[a-z ]{0,12}", n in 2usize..4) {
            let x = ngram_cosine(&a, &b, n, None);
            prop_assert_eq!(x, ngram_cosine(&b, &a, n, None));
            prop_assert!((0.0..=1.0).contains(&x));
        }

        #[test]
        fn context_similarities_bounded(a in prop::collection::vec("[a-d]", 0..6), b in prop::collection::vec("[a-d]", 0..6)) {
            for kind in [ContextKind::Jaccard, ContextKind::Cosine] {
                let s = context_similarity(&a, &b, kind);
                prop_assert!((0.0..=1.0).contains(&s));
            }
        }

        #[test]
        fn str_similarity_one_iff_equal(a in "[a-c]{1,6}", b in "[a-c]{1,6}") {
            let s = str_similarity(&a, &b);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s == 1.0, a == b);
        }
    }
}
