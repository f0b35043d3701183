use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil;

/// Document frequencies over a corpus of token lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TfIdfModel {
    df: HashMap<String, usize>,
    docs: usize,
}

impl TfIdfModel {
    pub fn fit<'a, D, I>(docs: D) -> Self
    where
        D: IntoIterator<Item = I>,
        I: IntoIterator<Item = &'a String>,
    {
        let mut model = Self::default();
        for doc in docs {
            model.docs += 1;
            let mut seen: Vec<&String> = doc.into_iter().collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *model.df.entry(t.clone()).or_insert(0) += 1;
            }
        }
        model
    }

    pub fn doc_count(&self) -> usize {
        self.docs
    }

    pub fn vocab_size(&self) -> usize {
        self.df.len()
    }

    pub fn df(&self, token: &str) -> Option<usize> {
        self.df.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.df.contains_key(token)
    }

    /// `ln(N / df)`; unknown tokens count as `df = 1`.
    pub fn idf(&self, token: &str) -> f64 {
        let df = self.df(token).unwrap_or(1).max(1);
        (self.docs.max(1) as f64 / df as f64).ln()
    }

    /// Header `N<TAB>count`, then `token<TAB>df` sorted by token.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("N\t{}\n", self.docs);
        let mut entries: Vec<_> = self.df.iter().collect();
        entries.sort();
        for (t, df) in entries {
            let _ = writeln!(out, "{t}\t{df}");
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lines = fsutil::data_lines(text);
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 1, "missing `N<TAB>count` header"))?;
        let docs = match header.split_once('\t') {
            Some(("N", n)) => n
                .parse::<usize>()
                .map_err(|_| Error::parse(origin, ln, "bad document count"))?,
            _ => return Err(Error::parse(origin, ln, "missing `N<TAB>count` header")),
        };
        let mut df = HashMap::new();
        for (ln, line) in lines {
            let (tok, n) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, ln, "expected `token<TAB>df`"))?;
            let n: usize = n.parse().map_err(|_| Error::parse(origin, ln, "bad df"))?;
            if n == 0 || n > docs {
                return Err(Error::parse(origin, ln, format!("df {n} outside 1..={docs}")));
            }
            df.insert(tok.to_string(), n);
        }
        Ok(Self { df, docs })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::write_text(path, &self.to_tsv())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fsutil::read_text(path)?, &path.display().to_string())
    }
}

/// `tf(w, doc) · ln(N / df(w))` for each distinct word, in order of first
/// appearance.
pub fn tfidf_scores(doc: &[String], model: &TfIdfModel) -> Vec<(String, f64)> {
    let mut order: Vec<&String> = Vec::new();
    let mut tf: HashMap<&String, usize> = HashMap::new();
    for w in doc {
        let c = tf.entry(w).or_insert(0);
        if *c == 0 {
            order.push(w);
        }
        *c += 1;
    }
    order
        .into_iter()
        .map(|w| (w.clone(), tf[w] as f64 * model.idf(w)))
        .collect()
}

/// The `k` highest-scoring words; ties go to the lexicographically smaller
/// word.
pub fn top_k_words(scored: &[(String, f64)], k: usize) -> Vec<String> {
    let mut sorted: Vec<&(String, f64)> = scored.iter().collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    sorted.into_iter().take(k).map(|(w, _)| w.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn hand_evaluated_score() {
        let docs = [words("alpha beta"), words("beta gamma")];
        let model = TfIdfModel::fit(docs.iter());
        let scores = tfidf_scores(&words("alpha alpha alpha beta"), &model);
        assert_eq!(scores[0].0, "alpha");
        assert!((scores[0].1 - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!((scores[0].1 - 2.0794).abs() < 1e-4);
        // beta is in every document
        assert_eq!(scores[1].1, 0.0);
        assert!(tfidf_scores(&[], &model).is_empty());
    }

    #[test]
    fn unknown_words_use_df_one() {
        let docs = [words("a"), words("b"), words("c")];
        let model = TfIdfModel::fit(docs.iter());
        let s = tfidf_scores(&words("zzz"), &model);
        assert!((s[0].1 - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn top_k_rules() {
        let scored: Vec<(String, f64)> = (0..12).map(|i| (format!("w{i:02}"), i as f64)).collect();
        let top = top_k_words(&scored, 10);
        assert_eq!(top.len(), 10);
        assert_eq!(top[0], "w11");
        assert_eq!(top_k_words(&scored[..4], 10).len(), 4);
        let tied = vec![("b".to_string(), 1.0), ("a".to_string(), 1.0), ("c".to_string(), 2.0)];
        assert_eq!(top_k_words(&tied, 3), vec!["c", "a", "b"]);
    }

    #[test]
    fn model_round_trip() {
        let docs = [words("x y z"), words("x y"), words("x")];
        let model = TfIdfModel::fit(docs.iter());
        assert_eq!(TfIdfModel::parse(&model.to_tsv(), "m").unwrap(), model);
        assert!(TfIdfModel::parse("N\t2\nfoo\t3\n", "m").is_err());
        assert!(TfIdfModel::parse("foo\t1\n", "m").is_err());
    }

    proptest! {
        #[test]
        fn score_zero_iff_absent_or_ubiquitous(
            corpus in prop::collection::vec(prop::collection::vec("[a-d]", 1..5), 1..6),
            doc in prop::collection::vec("[a-f]", 0..8),
        ) {
            let model = TfIdfModel::fit(corpus.iter());
            for (w, s) in tfidf_scores(&doc, &model) {
                let ubiquitous = model.df(&w) == Some(model.doc_count());
                // tf > 0 for every returned word; unknown words score ln N
                prop_assert_eq!(s == 0.0, ubiquitous || (model.doc_count() == 1 && !model.contains(&w)));
                if let Some(df) = model.df(&w) {
                    prop_assert!(df >= 1 && df <= model.doc_count());
                }
            }
        }
    }
}
