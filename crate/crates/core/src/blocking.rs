//! Overlap blocking: a candidate survives when its normalized name shares
//! at least `threshold` distinct bigrams with the mention, or when both
//! normalize to the same string.

use std::collections::BTreeSet;

use crate::kb::{Entity, KnowledgeBase};
use crate::textprep::normalize_name;

pub const DEFAULT_BLOCK_THRESHOLD: usize = 2;

/// Distinct character bigrams of the normalized joined string, unpadded.
/// Degenerate names give the empty set.
pub fn bigram_tokens(s: &str) -> BTreeSet<String> {
    match normalize_name(s) {
        Ok(n) => joined_bigrams(&n.joined),
        Err(_) => BTreeSet::new(),
    }
}

fn joined_bigrams(joined: &str) -> BTreeSet<String> {
    let chars: Vec<char> = joined.chars().collect();
    chars.windows(2).map(|w| w.iter().collect()).collect()
}

#[derive(Debug, Clone)]
struct Key {
    joined: Option<String>,
    bigrams: BTreeSet<String>,
}

impl Key {
    fn new(s: &str) -> Self {
        match normalize_name(s) {
            Ok(n) => Self {
                bigrams: joined_bigrams(&n.joined),
                joined: Some(n.joined),
            },
            Err(_) => Self {
                joined: None,
                bigrams: BTreeSet::new(),
            },
        }
    }
}

/// Pre-computed bigram sets for every entity of a knowledge base.
#[derive(Debug, Clone)]
pub struct Blocker<'a> {
    kb: &'a KnowledgeBase,
    keys: Vec<Key>,
    threshold: usize,
}

impl<'a> Blocker<'a> {
    pub fn new(kb: &'a KnowledgeBase, threshold: usize) -> Self {
        Self {
            kb,
            keys: kb.entities().iter().map(|e| Key::new(&e.name)).collect(),
            threshold,
        }
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Candidates in knowledge-base order.
    pub fn candidates(&self, mention_surface: &str) -> Vec<&'a Entity> {
        let probe = Key::new(mention_surface);
        let Some(joined) = probe.joined.as_deref() else {
            return Vec::new();
        };
        self.kb
            .entities()
            .iter()
            .zip(&self.keys)
            .filter(|(_, key)| {
                key.joined.as_deref() == Some(joined)
                    || key.bigrams.intersection(&probe.bigrams).take(self.threshold).count() >= self.threshold
            })
            .map(|(e, _)| e)
            .collect()
    }
}

pub fn block_candidates<'a>(mention_surface: &str, kb: &'a KnowledgeBase, threshold: usize) -> Vec<&'a Entity> {
    Blocker::new(kb, threshold).candidates(mention_surface)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bigram_examples() {
        assert_eq!(bigram_tokens("acma"), set(&["ac", "cm", "ma"]));
        assert!(bigram_tokens("a").is_empty());
        assert_eq!(bigram_tokens("Lumier"), bigram_tokens("LUMIER, Inc."));
    }

    #[test]
    fn repeated_letter_names_survive_exact_match() {
        let kb = KnowledgeBase::from_entities(vec![Entity::new("a", "Aaa", ""), Entity::new("b", "Bab", "")]).unwrap();
        let ids: Vec<&str> = block_candidates("AAA Inc", &kb, 2)
            .iter()
            .map(|e| e.id.as_str())
            .collect();
        assert_eq!(ids, vec!["a"]);
    }

    fn acma_kb() -> KnowledgeBase {
        KnowledgeBase::from_entities(vec![
            Entity::new("a1", "Acma Global Retail Inc", ""),
            Entity::new("a2", "Acma Furniture, LLC", ""),
            Entity::new("z1", "Zenith Bq", ""),
            Entity::new("h1", "Hulu", ""),
        ])
        .unwrap()
    }

    #[test]
    fn retains_overlapping_and_filters_disjoint() {
        let kb = acma_kb();
        let ids: Vec<&str> = block_candidates("Acma Retail", &kb, 2)
            .iter()
            .map(|e| e.id.as_str())
            .collect();
        assert_eq!(ids, vec!["a1", "a2"]);
        assert!(block_candidates("Xyvw", &kb, 2).is_empty());
        assert!(block_candidates("...", &kb, 2).is_empty());
    }

    #[test]
    fn threshold_is_configurable() {
        let kb = acma_kb();
        // acmaretail vs acmaglobalretail share ac cm ma re et ta ai il
        assert_eq!(block_candidates("Acma Retail", &kb, 8).len(), 1);
        assert_eq!(block_candidates("Acma Retail", &kb, 9).len(), 0);
    }

    proptest! {
        #[test]
        fn exact_name_always_survives(name in "[a-z]{3,10}( [a-z]{1,6})?") {
            let kb = KnowledgeBase::from_entities(vec![
                Entity::new("x", name.clone(), ""),
                Entity::new("y", "qqqq", ""),
            ]).unwrap();
            let out = block_candidates(&name, &kb, 2);
            prop_assert!(out.iter().any(|e| e.id == "x"));
        }

        #[test]
        fn adding_entities_never_removes_candidates(
            names in prop::collection::vec("[a-e]{2,6}", 1..8),
            extra in "[a-e]{2,6}",
            probe in "[a-e]{2,6}",
        ) {
            let ents: Vec<Entity> = names.iter().enumerate().map(|(i, n)| Entity::new(format!("e{i}"), n.clone(), "")).collect();
            let kb = KnowledgeBase::from_entities(ents.clone()).unwrap();
            let mut bigger = ents;
            bigger.push(Entity::new("extra", extra, ""));
            let kb2 = KnowledgeBase::from_entities(bigger).unwrap();
            let before: Vec<String> = block_candidates(&probe, &kb, 2).iter().map(|e| e.id.clone()).collect();
            let after: Vec<String> = block_candidates(&probe, &kb2, 2).iter().map(|e| e.id.clone()).collect();
            prop_assert!(before.iter().all(|id| after.contains(id)));
        }
    }
}
