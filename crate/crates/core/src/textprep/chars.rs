use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{normalize_name, NormalizedName};
use crate::error::{Error, Result};
use crate::fsutil;

pub const MIN_NGRAM: usize = 2;
pub const MAX_NGRAM: usize = 5;

/// Dense index over subword tokens.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CharVocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

/// Binary indicator vector over a [`CharVocab`]: sorted, unique indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CharFeatureVector {
    pub indices: Vec<u32>,
}

impl CharFeatureVector {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub enum VocabMode<'a> {
    /// Unseen tokens are added.
    Build(&'a mut CharVocab),
    /// Unseen tokens are dropped.
    Frozen(&'a CharVocab),
}

/// Raw token list (with repeats) for a normalized name: every n-gram,
/// `n ∈ [2, 5]`, of `*joined*`, followed by each word padded as `*word*`.
pub fn char_tokens(name: &NormalizedName) -> Vec<String> {
    let padded: Vec<char> = std::iter::once('*')
        .chain(name.joined.chars())
        .chain(std::iter::once('*'))
        .collect();
    let mut out = Vec::new();
    for n in MIN_NGRAM..=MAX_NGRAM {
        if n > padded.len() {
            break;
        }
        out.extend(padded.windows(n).map(|w| w.iter().collect::<String>()));
    }
    out.extend(name.words.iter().map(|w| format!("*{w}*")));
    out
}

pub fn featurize_chars(raw: &str, mode: VocabMode<'_>) -> Result<CharFeatureVector> {
    let name = normalize_name(raw)?;
    let tokens = char_tokens(&name);
    let mut indices: Vec<u32> = match mode {
        VocabMode::Build(vocab) => tokens.into_iter().map(|t| vocab.insert(t)).collect(),
        VocabMode::Frozen(vocab) => tokens.iter().filter_map(|t| vocab.get(t)).collect(),
    };
    indices.sort_unstable();
    indices.dedup();
    Ok(CharFeatureVector { indices })
}

impl CharVocab {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from names in the given order; degenerate names
    /// are skipped.
    pub fn build<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut vocab = Self::new();
        for name in names {
            let _ = vocab.featurize_build(name);
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: u32) -> Option<&str> {
        self.tokens.get(index as usize).map(String::as_str)
    }

    pub fn insert(&mut self, token: String) -> u32 {
        if let Some(&i) = self.index.get(&token) {
            return i;
        }
        let i = self.tokens.len() as u32;
        self.index.insert(token.clone(), i);
        self.tokens.push(token);
        i
    }

    pub fn featurize_build(&mut self, raw: &str) -> Result<CharFeatureVector> {
        featurize_chars(raw, VocabMode::Build(self))
    }

    pub fn featurize(&self, raw: &str) -> Result<CharFeatureVector> {
        featurize_chars(raw, VocabMode::Frozen(self))
    }

    /// `token<TAB>index` lines in index order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            let _ = writeln!(out, "{t}\t{i}");
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut vocab = Self::new();
        for (line_no, line) in fsutil::data_lines(text) {
            let (tok, idx) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line_no, "expected `token<TAB>index`"))?;
            let idx: usize = idx.parse().map_err(|_| Error::parse(origin, line_no, "bad index"))?;
            if idx != vocab.len() {
                return Err(Error::parse(origin, line_no, format!("index {idx} out of sequence")));
            }
            if vocab.get(tok).is_some() {
                return Err(Error::parse(origin, line_no, format!("duplicate token `{tok}`")));
            }
            vocab.insert(tok.to_string());
        }
        Ok(vocab)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::write_text(path, &self.to_tsv())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fsutil::read_text(path)?, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use proptest::prelude::*;

    fn token_set(raw: &str) -> BTreeSet<String> {
        char_tokens(&normalize_name(raw).unwrap()).into_iter().collect()
    }

    #[test]
    fn paypal_tokens() {
        let set = token_set("PayPal Holdings, Inc.");
        for t in ["*p", "ay", "lhlds", "hlds*", "*paypal*", "*hlds*"] {
            assert!(set.contains(t), "missing {t}");
        }
    }

    #[test]
    fn two_letter_name_enumerated_by_hand() {
        let set = token_set("ab");
        let expect: BTreeSet<String> = ["*a", "ab", "b*", "*ab", "ab*", "*ab*"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(set, expect);
        assert_eq!(char_tokens(&normalize_name("ab").unwrap()).len(), 7);
    }

    /// Count of raw tokens by brute-force enumeration of every substring.
    fn brute_force_count(joined: &str, words: usize) -> usize {
        let padded: Vec<char> = format!("*{joined}*").chars().collect();
        let mut count = 0;
        for start in 0..padded.len() {
            for end in start + 1..=padded.len() {
                if (2..=5).contains(&(end - start)) {
                    count += 1;
                }
            }
        }
        count + words
    }

    #[test]
    fn frozen_mode_drops_unseen() {
        let mut vocab = CharVocab::new();
        let built = vocab.featurize_build("Lumier").unwrap();
        let again = vocab.featurize("Lumier").unwrap();
        assert_eq!(built, again);
        let other = vocab.featurize("Zzyzx").unwrap();
        assert!(other.is_empty());
        assert_eq!(vocab.len() as u32, *built.indices.iter().max().unwrap() + 1);
    }

    #[test]
    fn vocab_round_trip_and_errors() {
        let vocab = CharVocab::build(["Acma Retail", "Hulu", "PayPal Holdings"]);
        let back = CharVocab::parse(&vocab.to_tsv(), "v").unwrap();
        assert_eq!(vocab, back);
        assert!(CharVocab::parse("ab\t1\n", "v").is_err());
        assert!(CharVocab::parse("ab 0\n", "v").is_err());
    }

    #[test]
    fn vocab_build_is_deterministic() {
        let names = ["Acma Retail", "Hulu", "PayPal Holdings", "Lumier"];
        assert_eq!(CharVocab::build(names), CharVocab::build(names));
    }

    proptest! {
        #[test]
        fn token_count_matches_enumeration(raw in "[a-z]{1,6}( [a-z]{1,6}){0,2}") {
            let name = normalize_name(&raw).unwrap();
            let len = name.joined.chars().count() + 2;
            let formula: usize = (2..=5).map(|n| (len + 1).saturating_sub(n)).sum::<usize>() + name.words.len();
            let tokens = char_tokens(&name);
            prop_assert_eq!(tokens.len(), formula);
            prop_assert_eq!(tokens.len(), brute_force_count(&name.joined, name.words.len()));
        }

        #[test]
        fn token_shapes(raw in "[A-Za-z0-9 ,.&-]{1,30}") {
            if let Ok(name) = normalize_name(&raw) {
                let n_words = name.words.len();
                let tokens = char_tokens(&name);
                let (ngrams, words) = tokens.split_at(tokens.len() - n_words);
                for t in ngrams {
                    let n = t.chars().count();
                    prop_assert!((2..=5).contains(&n));
                }
                for w in words {
                    prop_assert!(w.starts_with('*') && w.ends_with('*'));
                }
            }
        }

        #[test]
        fn frozen_is_subset_of_build(seed_names in prop::collection::vec("[a-z]{2,8}", 1..5), probe in "[a-z]{2,8}") {
            let vocab = CharVocab::build(seed_names.iter().map(String::as_str));
            let frozen = vocab.featurize(&probe).unwrap();
            let mut grown = vocab.clone();
            let built = grown.featurize_build(&probe).unwrap();
            prop_assert!(frozen.indices.iter().all(|i| built.indices.contains(i)));
        }

        #[test]
        fn equal_normalization_gives_equal_features(a in "[A-Za-z]{2,8}", suffix in "(, Inc\\.| LLC| Corp|)") {
            let mut vocab = CharVocab::build([a.as_str()]);
            let b = format!("{}{}", a.to_uppercase(), suffix);
            prop_assert_eq!(normalize_name(&a).unwrap(), normalize_name(&b).unwrap());
            let fa = vocab.featurize_build(&a).unwrap();
            let fb = vocab.featurize_build(&b).unwrap();
            prop_assert_eq!(fa, fb);
        }
    }
}
