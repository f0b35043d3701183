//! String normalization, subword featurization, tokenization and tf-idf.

mod chars;
mod tfidf;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use chars::{char_tokens, featurize_chars, CharFeatureVector, CharVocab, VocabMode};
pub use tfidf::{tfidf_scores, top_k_words, TfIdfModel};

/// Company-suffix rewrites applied to every word after the first.
/// `None` drops the word.
#[derive(Debug, Clone)]
pub struct SuffixMap {
    map: HashMap<String, Option<String>>,
}

impl Default for SuffixMap {
    fn default() -> Self {
        let mut map = HashMap::new();
        for drop in [
            "incorporated",
            "inc",
            "corp",
            "corporation",
            "llc",
            "ltd",
            "limited",
            "co",
        ] {
            map.insert(drop.to_string(), None);
        }
        for (from, to) in [
            ("holdings", "hlds"),
            ("technologies", "tech"),
            ("international", "intl"),
        ] {
            map.insert(from.to_string(), Some(to.to_string()));
        }
        Self { map }
    }
}

impl SuffixMap {
    pub fn empty() -> Self {
        Self { map: HashMap::new() }
    }

    /// Adds or replaces a rule; `to = None` drops the word.
    pub fn insert(&mut self, from: &str, to: Option<&str>) {
        self.map.insert(from.to_lowercase(), to.map(str::to_lowercase));
    }

    fn apply(&self, word: String) -> Option<String> {
        match self.map.get(&word) {
            Some(rule) => rule.clone(),
            None => Some(word),
        }
    }
}

/// Result of [`normalize_name`]: the per-word list and its concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalizedName {
    pub joined: String,
    pub words: Vec<String>,
}

fn strip_punctuation(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric() || c.is_whitespace()).collect()
}

/// Lowercases, strips punctuation, rewrites company suffixes and joins
/// the remaining words, e.g. `"PayPal Holdings, Inc."` → `"paypalhlds"`.
pub fn normalize_name(raw: &str) -> Result<NormalizedName> {
    normalize_name_with(raw, &SuffixMap::default())
}

pub fn normalize_name_with(raw: &str, suffixes: &SuffixMap) -> Result<NormalizedName> {
    let cleaned = strip_punctuation(&raw.to_lowercase());
    let words: Vec<String> = cleaned
        .split_whitespace()
        .enumerate()
        .filter_map(|(i, w)| {
            if i == 0 {
                Some(w.to_string())
            } else {
                suffixes.apply(w.to_string())
            }
        })
        .filter(|w| !w.is_empty())
        .collect();
    if words.is_empty() {
        return Err(Error::DegenerateInput(raw.to_string()));
    }
    Ok(NormalizedName {
        joined: words.concat(),
        words,
    })
}

/// Lowercase, strip punctuation, split on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    strip_punctuation(&text.to_lowercase())
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paypal_normalizes_to_paypalhlds() {
        let n = normalize_name("PayPal Holdings, Inc.").unwrap();
        assert_eq!(n.joined, "paypalhlds");
        assert_eq!(n.words, vec!["paypal", "hlds"]);
    }

    #[test]
    fn simple_and_dropped_suffixes() {
        let n = normalize_name("IBM").unwrap();
        assert_eq!((n.joined.as_str(), n.words.clone()), ("ibm", vec!["ibm".to_string()]));
        let n = normalize_name("Acma Furniture, LLC").unwrap();
        assert_eq!(n.joined, "acmafurniture");
        assert_eq!(n.words, vec!["acma", "furniture"]);
    }

    #[test]
    fn leading_word_is_never_treated_as_suffix() {
        assert_eq!(normalize_name("Limited Brands").unwrap().joined, "limitedbrands");
    }

    #[test]
    fn degenerate_inputs() {
        for raw in ["", "   ", "...", "!?"] {
            assert!(matches!(normalize_name(raw), Err(Error::DegenerateInput(_))));
        }
    }

    #[test]
    fn custom_suffix_rules() {
        let mut m = SuffixMap::empty();
        m.insert("Group", Some("grp"));
        assert_eq!(normalize_name_with("Acma Group Inc", &m).unwrap().joined, "acmagrpinc");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("Acma filed, for bankruptcy."),
            vec!["acma", "filed", "for", "bankruptcy"]
        );
        assert!(tokenize("").is_empty());
    }

    proptest! {
        #[test]
        fn tokenize_is_stable_under_retokenization(s in "\\PC{0,60}") {
            let once = tokenize(&s);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }
    }
}
